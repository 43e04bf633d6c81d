use dirac_res::forward::{jost_function, jost_profile};
use dirac_res::single;
use num_complex::Complex32;

#[test]
fn constant_potential_in_f32() {
    let q = single::Potential::constant(1.0, 512, Complex32::new(1.0, 0.0)).unwrap();
    let psi = jost_function(&q, Complex32::new(0.0, 0.0)).unwrap();
    assert!((psi - std::f32::consts::E).norm() < 1e-4, "{psi}");
}

#[test]
fn f32_profile_tracks_f64() {
    let shape = |x: f64| num_complex::Complex64::new(0.4 * (3.0 * x).cos(), 0.2 * x);
    let q64 = dirac_res::Potential::from_fn(1.0, 128, shape).unwrap();
    let q32 = single::Potential::from_fn(1.0, 128, |x: f32| {
        let v = shape(f64::from(x));
        Complex32::new(v.re as f32, v.im as f32)
    })
    .unwrap();
    let f64_profile = jost_profile(&q64, &dirac_res::TransformOptions::new(100.0, 4096)).unwrap();
    let f32_profile = jost_profile(&q32, &single::TransformOptions::new(100.0, 4096)).unwrap();
    let gap = f64_profile
        .g_samples()
        .iter()
        .zip(f32_profile.g_samples())
        .map(|(a, b)| (a - num_complex::Complex64::new(f64::from(b.re), f64::from(b.im))).norm())
        .fold(0.0, f64::max);
    assert!(gap < 1e-3, "{gap}");
}
