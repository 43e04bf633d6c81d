//! Half-line Wiener algebra: elements `c + ℱh` with `h` sampled on `[0, T]`.
//!
//! Products are computed on the trapezoid sequences `a₀ = step·h₀/2`, `aⱼ = step·hⱼ`, whose
//! discrete convolution is the trapezoid rule for `∫₀ˢ h₁(t)h₂(s-t)dt`. The logarithm works on
//! the discrete Fourier series of the same sequences, so `exp(log w) = w` holds up to rounding
//! and truncation. Norms and frequency values use Gregory weights.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, is_finite_c, lit, to_f64, Real, C};
use crate::transform::{forward_nodal_at, gregory_weights};

/// Profile step used by the atoms when none is given.
pub const DEFAULT_STEP: f64 = 1.0 / 1024.0;
/// Horizons are chosen so the analytic tail mass stays below this.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Constant of the logarithm bound: `2·(2 ln 2)` rounded up.
pub const LOG_BOUND_CONSTANT: f64 = 2.78;

const EXP_MAX_TERMS: usize = 60;
const EXP_MAX_HALVINGS: usize = 10;
const MAX_LOG_LENGTH: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct WienerElement<T> {
    pub c: C<T>,
    h: Vec<C<T>>,
    step: T,
    tail_bound: T,
}

fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn to_sequence<T: Real>(h: &[C<T>], step: T) -> Vec<C<T>> {
    let mut a: Vec<C<T>> = h.iter().map(|v| v * step).collect();
    if let Some(first) = a.first_mut() {
        *first = *first * lit::<T>(0.5);
    }
    a
}

fn from_sequence<T: Real>(a: &[C<T>], step: T) -> Vec<C<T>> {
    let mut h: Vec<C<T>> = a.iter().map(|v| v / step).collect();
    if let Some(first) = h.first_mut() {
        *first = *first * lit::<T>(2.0);
    }
    h
}

/// Linear convolution, by FFT once the inputs are long enough.
fn convolve<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![zero(); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j] + x * y;
            }
        }
        return out;
    }
    let n = len.next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa = a.to_vec();
    fa.resize(n, zero());
    let mut fb = b.to_vec();
    fb.resize(n, zero());
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y;
    }
    inv.process(&mut fa);
    let scale = T::one() / from_usize(n);
    fa.truncate(len);
    fa.into_iter().map(|v| v * scale).collect()
}

impl<T: Real> WienerElement<T> {
    pub fn new(c: C<T>, h: Vec<C<T>>, step: T, tail_bound: T) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidInput(format!("profile step must be positive, got {step}")));
        }
        if !is_finite_c(c) || h.iter().any(|v| !is_finite_c(*v)) {
            return Err(Error::InvalidInput("non-finite algebra element".into()));
        }
        if !(tail_bound >= T::zero()) {
            return Err(Error::InvalidInput("tail bound must be nonnegative".into()));
        }
        Ok(Self { c, h, step, tail_bound })
    }

    pub fn unit(step: T) -> Self {
        Self { c: C::new(T::one(), T::zero()), h: Vec::new(), step, tail_bound: T::zero() }
    }

    pub fn zero(step: T) -> Self {
        Self { c: zero(), h: Vec::new(), step, tail_bound: T::zero() }
    }

    /// Samples `h(j·step)` for `j < n`.
    pub fn from_fn(c: C<T>, step: T, n: usize, h: impl Fn(T) -> C<T>) -> Result<Self> {
        Self::new(c, (0..n).map(|j| h(from_usize::<T>(j) * step)).collect(), step, T::zero())
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.h
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    /// Last sampled abscissa `T`.
    pub fn horizon(&self) -> T {
        from_usize::<T>(self.h.len().saturating_sub(1)) * self.step
    }

    pub fn l1(&self) -> T {
        gregory_weights(self.h.len(), self.step).iter().zip(&self.h).map(|(w, v)| *w * v.norm()).sum()
    }

    pub fn l2(&self) -> T {
        gregory_weights(self.h.len(), self.step).iter().zip(&self.h).map(|(w, v)| *w * v.norm_sqr()).sum::<T>().sqrt()
    }

    /// `|c| + ‖h‖_{L¹} + ‖h‖_{L²} + tail_bound`.
    pub fn norm(&self) -> T {
        self.c.norm() + self.l1() + self.l2() + self.tail_bound
    }

    /// `c + ∫₀^T h(s) e^{2iks} ds`.
    pub fn eval(&self, k: C<T>) -> C<T> {
        self.c + forward_nodal_at(&self.h, T::zero(), self.step, k)
    }

    fn check_step(&self, other: &Self) -> Result<()> {
        if ((self.step - other.step) / self.step).abs() > lit(1e-12) {
            return Err(Error::IncompatibleGrid(format!("steps {} and {} differ", self.step, other.step)));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, a: C<T>, b: C<T>) -> Result<Self> {
        self.check_step(other)?;
        let n = self.h.len().max(other.h.len());
        let h = (0..n)
            .map(|j| {
                let x = self.h.get(j).copied().unwrap_or(zero());
                let y = other.h.get(j).copied().unwrap_or(zero());
                x * a + y * b
            })
            .collect();
        let tail = self.tail_bound * a.norm() + other.tail_bound * b.norm();
        Ok(Self { c: self.c * a + other.c * b, h, step: self.step, tail_bound: tail })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = C::new(T::one(), T::zero());
        self.combine(other, one, one)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let one = C::new(T::one(), T::zero());
        self.combine(other, one, -one)
    }

    pub fn scale(&self, a: C<T>) -> Self {
        Self {
            c: self.c * a,
            h: self.h.iter().map(|v| v * a).collect(),
            step: self.step,
            tail_bound: self.tail_bound * a.norm(),
        }
    }

    /// `(c₁c₂, c₁h₂ + c₂h₁ + h₁∗h₂)`, truncated to the longer horizon; the discarded `L¹` mass
    /// and the propagated tails go into `tail_bound`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_step(other)?;
        let n = self.h.len().max(other.h.len());
        let step = self.step;
        let conv = from_sequence(&convolve(&to_sequence(&self.h, step), &to_sequence(&other.h, step)), step);
        let mut h = vec![zero(); n];
        for (j, v) in h.iter_mut().enumerate() {
            let x = self.h.get(j).copied().unwrap_or(zero());
            let y = other.h.get(j).copied().unwrap_or(zero());
            let z = conv.get(j).copied().unwrap_or(zero());
            *v = self.c * y + other.c * x + z;
        }
        let discarded: T = if conv.len() > n {
            let w = gregory_weights(conv.len() - n + 1, step);
            conv[n - 1..].iter().zip(&w).skip(1).map(|(v, w)| v.norm() * *w).sum()
        } else {
            T::zero()
        };
        let (t1, t2) = (self.tail_bound, other.tail_bound);
        let tail = t1 * (other.c.norm() + other.l1() + t2) + t2 * (self.c.norm() + self.l1()) + discarded;
        Ok(Self { c: self.c * other.c, h, step, tail_bound: tail })
    }

    /// `|Δc| + ‖Δh‖_{L¹} + ‖Δh‖_{L²}` over the sampled horizon, leaving out the tail bounds.
    pub fn distance(&self, other: &Self) -> Result<T> {
        let mut d = self.sub(other)?;
        d.tail_bound = T::zero();
        Ok(d.norm())
    }

    /// Same element with its profile extended by zeros (or truncated) to `n` samples.
    pub fn with_len(&self, n: usize) -> Self {
        let mut h = self.h.clone();
        let dropped: T = if n < h.len() {
            gregory_weights(h.len() - n + 1, self.step).iter().zip(&h[n - 1..]).skip(1).map(|(w, v)| *w * v.norm()).sum()
        } else {
            T::zero()
        };
        h.resize(n, zero());
        Self { c: self.c, h, step: self.step, tail_bound: self.tail_bound + dropped }
    }
}

/// Grid certificate for invertibility in the algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub invertible: bool,
    pub min_modulus: f64,
    pub limit_value: [f64; 2],
    /// Some sample landed on `(-∞, 0]`, which excludes the element from the logarithm's domain.
    pub touches_cut: bool,
    pub real_points: usize,
    pub ray_points: usize,
}

/// Sampling density of [`spectrum_test`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub real_points: usize,
    pub rays: usize,
    pub points_per_ray: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { real_points: 2048, rays: 8, points_per_ray: 64 }
    }
}

fn on_cut<T: Real>(v: C<T>) -> bool {
    v.re <= T::zero() && v.im.abs() <= lit::<T>(1e-14) * (T::one() + v.norm())
}

/// Samples `c + ℱh` on a symmetric real grid up to the sampling limit `π/(2·step)` and along
/// rays into the upper half-plane.
pub fn spectrum_test<T: Real>(w: &WienerElement<T>, opts: &SpectrumOptions) -> SpectrumReport {
    let k_max = T::PI() / (lit::<T>(2.0) * w.step);
    let mut points: Vec<C<T>> = (0..opts.real_points)
        .map(|j| {
            let t = from_usize::<T>(j) / from_usize::<T>(opts.real_points.max(2) - 1);
            C::new(-k_max + t * k_max * lit(2.0), T::zero())
        })
        .collect();
    let r_min = lit::<T>(1e-2);
    for r in 0..opts.rays {
        let theta = T::PI() * (from_usize::<T>(r) + lit(0.5)) / from_usize(opts.rays);
        for j in 0..opts.points_per_ray {
            let t = from_usize::<T>(j) / from_usize::<T>(opts.points_per_ray.max(2) - 1);
            let rad = r_min * (k_max / r_min).powf(t);
            points.push(C::from_polar(rad, theta));
        }
    }
    let values: Vec<C<T>> = points.par_iter().map(|&k| w.eval(k)).collect();
    let mut min_mod = w.c.norm();
    let mut touches = on_cut(w.c);
    for v in &values {
        min_mod = min_mod.min(v.norm());
        touches |= on_cut(*v);
    }
    let tol = lit::<T>(1e-12) * (T::one() + w.norm());
    SpectrumReport {
        invertible: min_mod > tol && w.c.norm() > tol,
        min_modulus: to_f64(min_mod),
        limit_value: [to_f64(w.c.re), to_f64(w.c.im)],
        touches_cut: touches,
        real_points: opts.real_points,
        ray_points: opts.rays * opts.points_per_ray,
    }
}

fn require_unit_constant<T: Real>(w: &WienerElement<T>) -> Result<()> {
    if (w.c - C::new(T::one(), T::zero())).norm() > lit(1e-12) {
        return Err(Error::Domain(format!("constant part must be 1, got {}", w.c)))
    }
    Ok(())
}

/// Logarithm of an element with `c = 1` whose values avoid `(-∞, 0]`; the result has `c = 0`.
pub fn log_element<T: Real>(w: &WienerElement<T>) -> Result<WienerElement<T>> {
    require_unit_constant(w)?;
    let n = w.h.len();
    if n == 0 {
        return Ok(WienerElement::zero(w.step));
    }
    let cert = spectrum_test(w, &SpectrumOptions { real_points: 0, ..Default::default() });
    if cert.touches_cut || !cert.invertible {
        return Err(Error::Domain("element takes values on (-inf, 0] in the closed upper half-plane".into()));
    }
    let tol = lit::<T>(DEFAULT_TAIL_TOL);
    let mut big = (4 * n).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    loop {
        // A_m = Σ aⱼ e^{2πi jm/N}: the trapezoid transform at k_m = πm/(N·step).
        let mut buf = to_sequence(&w.h, w.step);
        buf.resize(big, zero());
        planner.plan_fft_inverse(big).process(&mut buf);
        let values: Vec<C<T>> = buf.iter().map(|a| C::new(T::one(), T::zero()) + a).collect();
        check_principal_branch(&values)?;
        let mut logs: Vec<C<T>> = values.iter().map(|v| v.ln()).collect();
        planner.plan_fft_forward(big).process(&mut logs);
        let inv_n = T::one() / from_usize(big);
        let b: Vec<C<T>> = logs.iter().map(|v| v * inv_n).collect();
        // The logarithm decays at the rate set by the zeros of w, which may be slower than w
        // itself: keep going until the last quarter of the period carries no mass.
        let far: T = b[big / 4..big / 2].iter().map(|v| v.norm()).sum();
        if far > tol && big < MAX_LOG_LENGTH {
            big *= 2;
            continue;
        }
        let mut remaining: T = b[n..big / 2].iter().map(|v| v.norm()).sum();
        let mut len = n;
        while remaining > tol && len < big / 2 {
            remaining = remaining - b[len].norm();
            len += 1;
        }
        let h = from_sequence(&b[..len], w.step);
        let tail = remaining.max(T::zero()) + far + w.tail_bound / lit::<T>(cert.min_modulus);
        return WienerElement::new(zero(), h, w.step, tail);
    }
}

/// Rejects sampled values on `(-∞, 0]` and curves that cross the cut between samples. The phase
/// is unwrapped around the period starting from the Nyquist frequency, where the values are
/// closest to the limit 1; any disagreement with the principal branch means a crossing.
fn check_principal_branch<T: Real>(values: &[C<T>]) -> Result<()> {
    if values.iter().any(|v| on_cut(*v)) {
        return Err(Error::Domain("element takes values on (-inf, 0] on the real grid".into()));
    }
    let big = values.len();
    let start = big / 2;
    let mut phase = values[start].arg();
    let mut prev = phase;
    for step in 1..=big {
        let arg = values[(start + step) % big].arg();
        let mut d = arg - prev;
        while d > T::PI() {
            d = d - lit::<T>(2.0) * T::PI();
        }
        while d < -T::PI() {
            d = d + lit::<T>(2.0) * T::PI();
        }
        phase = phase + d;
        prev = arg;
        if (phase - arg).abs() > lit(1e-9) {
            return Err(Error::Domain("logarithm leaves the principal branch along the real grid".into()));
        }
    }
    Ok(())
}

fn exp_series<T: Real>(w: &WienerElement<T>) -> Option<WienerElement<T>> {
    let mut acc = WienerElement::unit(w.step).with_len(w.h.len());
    let mut term = acc.clone();
    for m in 1..=EXP_MAX_TERMS {
        term = term.multiply(w).ok()?.scale(C::new(T::one() / from_usize(m), T::zero()));
        acc = acc.add(&term).ok()?;
        if term.norm() < lit::<T>(1e-12) * acc.norm() {
            return Some(acc);
        }
    }
    None
}

/// `exp(w) = 1 + Σ wᵐ/m!` for `c = 0`, with scaling and squaring when the series is slow.
pub fn exp_element<T: Real>(w: &WienerElement<T>) -> Result<WienerElement<T>> {
    if w.c.norm() > lit(1e-12) {
        return Err(Error::Domain(format!("exponential expects a zero constant part, got {}", w.c)));
    }
    for halvings in 0..=EXP_MAX_HALVINGS {
        let scaled = w.scale(C::new(lit::<T>(0.5).powi(halvings as i32), T::zero()));
        if let Some(mut e) = exp_series(&scaled) {
            for _ in 0..halvings {
                e = e.multiply(&e)?;
            }
            return Ok(e);
        }
    }
    Err(Error::Convergence(format!(
        "exponential series did not converge in {EXP_MAX_TERMS} terms after {EXP_MAX_HALVINGS} halvings (norm {})",
        w.norm()
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBound {
    pub bound_ok: bool,
    pub ratio: f64,
}

/// `‖log w‖ / ‖w - 1‖` for `‖w - 1‖ < 1/4`.
pub fn log_norm_bound<T: Real>(w: &WienerElement<T>) -> Result<LogBound> {
    require_unit_constant(w)?;
    let f = w.sub(&WienerElement::unit(w.step))?;
    let nf = f.norm();
    if nf >= lit(0.25) {
        return Err(Error::Domain(format!("‖w - 1‖ = {nf} is not below 1/4")));
    }
    if nf == T::zero() {
        return Ok(LogBound { bound_ok: true, ratio: 0.0 });
    }
    let ratio = to_f64(log_element(w)?.norm() / nf);
    Ok(LogBound { bound_ok: ratio <= LOG_BOUND_CONSTANT, ratio })
}

/// Resolvent-integral form of the logarithm, used to cross-check [`log_element`]:
/// `log(1+f) = (1/2πi)∮ log(1+λ)(λ-f)⁻¹ dλ` on `|λ| = 2‖f‖` with a 64-point trapezoid rule and
/// the Neumann series `(λ-f)⁻¹ = Σ fᵐ λ^{-m-1}`. Summing over the nodes first turns the
/// integral into `Σ ĉₘ fᵐ` with `ĉₘ = (1/64) Σ_p log(1+λ_p) λ_p^{-m}`.
pub fn log_element_contour<T: Real>(w: &WienerElement<T>) -> Result<WienerElement<T>> {
    require_unit_constant(w)?;
    let f = w.sub(&WienerElement::unit(w.step))?;
    let nf = f.norm();
    if nf >= lit(0.25) {
        return Err(Error::Domain(format!("contour route needs ‖w - 1‖ < 1/4, got {nf}")));
    }
    if nf == T::zero() {
        return Ok(WienerElement::zero(w.step).with_len(w.h.len()));
    }
    const NODES: usize = 64;
    let r = nf * lit(2.0);
    let nodes: Vec<C<T>> = (0..NODES)
        .map(|p| C::from_polar(r, lit::<T>(2.0) * T::PI() * from_usize(p) / from_usize(NODES)))
        .collect();
    let logs: Vec<C<T>> = nodes.iter().map(|l| (C::new(T::one(), T::zero()) + l).ln()).collect();
    let coef = |m: usize| -> C<T> {
        nodes.iter().zip(&logs).map(|(l, g)| g * l.powi(-(m as i32))).fold(zero(), |a, b| a + b) / from_usize::<T>(NODES)
    };
    let mut power = WienerElement::unit(w.step).with_len(w.h.len());
    let mut acc = power.scale(coef(0));
    for m in 1..NODES {
        power = power.multiply(&f)?;
        let term = power.scale(coef(m));
        acc = acc.add(&term)?;
        if power.norm() < lit::<T>(1e-16) * (T::one() + acc.norm()) {
            break;
        }
    }
    Ok(acc)
}

fn check_lower<T: Real>(z: C<T>, what: &str) -> Result<()> {
    if !(z.im < T::zero()) || !is_finite_c(z) {
        return Err(Error::Domain(format!("{what} = {z} must lie in the open lower half-plane")));
    }
    Ok(())
}

/// Number of samples covering `[0, T]` with `T` the smallest horizon where `tail(T) < tol`.
fn horizon_samples<T: Real>(step: T, tol: T, tail: impl Fn(T) -> T) -> usize {
    let mut t = step * lit(8.0);
    while tail(t) >= tol && t < lit(1e6) {
        t = t * lit(1.25);
    }
    (to_f64(t / step).ceil() as usize) + 1
}

/// `g(k) = 1 + ρ/(k₀ - k)`, i.e. `h(s) = 2iρ e^{-2ik₀s}`, at the default step and tail tolerance.
pub fn atom<T: Real>(k0: C<T>, rho: C<T>) -> Result<WienerElement<T>> {
    atom_with(k0, rho, lit(DEFAULT_STEP), lit(DEFAULT_TAIL_TOL))
}

pub fn atom_with<T: Real>(k0: C<T>, rho: C<T>, step: T, tail_tol: T) -> Result<WienerElement<T>> {
    check_lower(k0, "k0")?;
    if rho.norm() == T::zero() {
        return Ok(WienerElement::unit(step));
    }
    let decay = -k0.im;
    let amp = rho.norm() * lit(2.0);
    let tail = |t: T| amp * (lit::<T>(-2.0) * decay * t).exp() / (lit::<T>(2.0) * decay);
    let n = horizon_samples(step, tail_tol, tail);
    let i = Complex::new(T::zero(), T::one());
    let mut w = WienerElement::from_fn(C::new(T::one(), T::zero()), step, n, |s| i * rho * lit::<T>(2.0) * (-i * k0 * s * lit::<T>(2.0)).exp())?;
    w.tail_bound = tail(w.horizon());
    Ok(w)
}

/// `log(1 + ρ/(k₀ - k))`: `h(s) = e^{-2ik₀s}(1 - e^{-2iρs})/s`, `h(0) = 2iρ`.
pub fn atom_log<T: Real>(k0: C<T>, rho: C<T>) -> Result<WienerElement<T>> {
    atom_log_with(k0, rho, lit(DEFAULT_STEP), lit(DEFAULT_TAIL_TOL))
}

pub fn atom_log_with<T: Real>(k0: C<T>, rho: C<T>, step: T, tail_tol: T) -> Result<WienerElement<T>> {
    check_lower(k0, "k0")?;
    check_lower(k0 + rho, "k0 + rho")?;
    if rho.norm() == T::zero() {
        return Ok(WienerElement::zero(step));
    }
    let (d0, d1) = (-k0.im, -(k0 + rho).im);
    let two = lit::<T>(2.0);
    // |h(s)| ≤ (e^{-2d₀s} + e^{-2d₁s})/s
    let tail = |t: T| ((-two * d0 * t).exp() / (two * d0) + (-two * d1 * t).exp() / (two * d1)) / t;
    let n = horizon_samples(step, tail_tol, tail);
    let i = Complex::new(T::zero(), T::one());
    let mut w = WienerElement::from_fn(zero(), step, n, |s| {
        if s == T::zero() {
            i * rho * two
        } else {
            let x = i * rho * two * s;
            // (1 - e^{-x})/s without cancellation for small x
            let ratio = if x.norm() < lit(1e-3) {
                C::new(T::one(), T::zero()) - x / two + x * x / lit::<T>(6.0)
            } else {
                (C::new(T::one(), T::zero()) - (-x).exp()) / x
            };
            (-i * k0 * two * s).exp() * ratio * i * rho * two
        }
    })?;
    w.tail_bound = tail(w.horizon());
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{invert_half_line, FrequencyGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    fn random_element(rng: &mut ChaCha8Rng, target_norm: f64) -> WienerElement<f64> {
        // sum of decaying exponentials on a common horizon
        let n = 8000;
        let terms: Vec<(C<f64>, C<f64>)> = (0..3)
            .map(|_| (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(3.0..6.0), rng.gen_range(-3.0..3.0))))
            .collect();
        let w = WienerElement::from_fn(c(0.0, 0.0), DEFAULT_STEP, n, |s| {
            terms.iter().map(|(a, b)| a * (-b * s).exp()).sum::<C<f64>>()
        })
        .unwrap();
        w.scale(c(target_norm / w.norm(), 0.0))
    }

    #[test]
    fn unit_and_norms() {
        let u = WienerElement::<f64>::unit(DEFAULT_STEP);
        assert_eq!(u.norm(), 1.0);
        let w = atom(c(0.0, -1.0), c(0.1, 0.0)).unwrap();
        let f = w.sub(&u).unwrap();
        assert!((f.norm() - 0.2).abs() < 1e-6, "{}", f.norm());
        let w = atom(c(0.0, -4.0), c(0.1, 0.0)).unwrap();
        assert!((w.sub(&u).unwrap().norm() - 0.075).abs() < 1e-6);
        assert!(w.tail_bound() < DEFAULT_TAIL_TOL);
        assert_eq!(atom(c(0.0, -1.0), c(0.0, 0.0)).unwrap(), u);
        assert!(matches!(atom(c(0.0, 0.0), c(0.1, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn atom_frequency_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (k0, rho) = (c(0.5, -1.0), c(0.2, 0.1));
        let w = atom(k0, rho).unwrap();
        for _ in 0..20 {
            let k = c(rng.gen_range(-30.0..30.0), 0.0);
            let exact = 1.0 + rho / (k0 - k);
            assert!((w.eval(k) - exact).norm() < 1e-6);
        }
    }

    #[test]
    fn multiplication_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_element(&mut rng, 0.7).add(&WienerElement::unit(DEFAULT_STEP)).unwrap();
        let b = random_element(&mut rng, 1.3);
        let d = random_element(&mut rng, 0.4);
        let u = WienerElement::unit(DEFAULT_STEP);
        let au = a.multiply(&u).unwrap();
        assert_eq!(au.c, a.c);
        assert_eq!(au.samples(), a.samples());
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        assert!(ab.distance(&ba).unwrap() < 1e-8 * ab.norm());
        let l = ab.multiply(&d).unwrap();
        let r = a.multiply(&b.multiply(&d).unwrap()).unwrap();
        assert!(l.distance(&r).unwrap() < 1e-8 * l.norm());
        for _ in 0..20 {
            let k = c(rng.gen_range(-20.0..20.0), 0.0);
            assert!((ab.eval(k) - a.eval(k) * b.eval(k)).norm() < 1e-4, "{k} {} {}", ab.eval(k), a.eval(k) * b.eval(k));
        }
    }

    #[test]
    fn submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (na, nb, ca) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0));
            let a = random_element(&mut rng, na).add(&WienerElement::unit(DEFAULT_STEP).scale(c(ca, 0.0))).unwrap();
            let b = random_element(&mut rng, nb);
            let p = a.multiply(&b).unwrap();
            assert!(p.norm() <= a.norm() * b.norm() * (1.0 + 1e-6));
        }
    }

    #[test]
    fn spectrum_examples() {
        let u = WienerElement::<f64>::unit(DEFAULT_STEP);
        let rep = spectrum_test(&u, &SpectrumOptions::default());
        assert!(rep.invertible && rep.limit_value == [1.0, 0.0]);
        let a = atom(c(0.0, -1.0), c(0.3, 0.8)).unwrap();
        assert!(spectrum_test(&a, &SpectrumOptions::default()).invertible);
        let z = WienerElement::from_fn(c(0.0, 0.0), DEFAULT_STEP, 100, |s| c((-s).exp(), 0.0)).unwrap();
        assert!(!spectrum_test(&z, &SpectrumOptions::default()).invertible);
    }

    #[test]
    fn log_exp_pairs() {
        let u = WienerElement::<f64>::unit(DEFAULT_STEP);
        assert_eq!(log_element(&u).unwrap().norm(), 0.0);
        assert_eq!(exp_element(&WienerElement::zero(DEFAULT_STEP)).unwrap(), u);
        for (k0, rho) in [(c(0.0, -1.0), c(0.1, 0.0)), (c(1.0, -2.0), c(0.3, 0.2)), (c(-2.0, -0.7), c(0.05, -0.1))] {
            let a = atom(k0, rho).unwrap();
            let l = atom_log(k0, rho).unwrap();
            let la = log_element(&a).unwrap();
            let n = la.samples().len().max(l.samples().len());
            assert!(la.with_len(n).sub(&l.with_len(n)).unwrap().norm() < 1e-5);
            let el = exp_element(&l).unwrap();
            let n = el.samples().len().max(a.samples().len());
            assert!(el.with_len(n).sub(&a.with_len(n)).unwrap().norm() < 1e-5);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..10 {
                let k = c(rng.gen_range(-20.0..20.0), 0.0);
                assert!((el.eval(k) - l.eval(k).exp()).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn exp_log_identity_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let w = random_element(&mut rng, 0.2).add(&WienerElement::unit(DEFAULT_STEP)).unwrap();
            let back = exp_element(&log_element(&w).unwrap()).unwrap();
            let n = back.samples().len();
            assert!(back.distance(&w.with_len(n)).unwrap() < 1e-6);
        }
    }

    #[test]
    fn exp_uses_scaling_and_squaring() {
        let w = atom_log(c(0.0, -1.0), c(0.0, -0.5)).unwrap().scale(c(6.0, 0.0)).with_len(40 * 1024);
        let e = exp_element(&w).unwrap();
        let k = c(1.5, 0.0);
        assert!((e.eval(k) - w.eval(k).exp()).norm() < 1e-4 * e.eval(k).norm(), "{} {}", e.eval(k), w.eval(k).exp());
    }

    #[test]
    fn log_bound_and_contour() {
        let u = WienerElement::<f64>::unit(DEFAULT_STEP);
        assert_eq!(log_norm_bound(&u).unwrap().ratio, 0.0);
        let w = atom(c(0.0, -1.0), c(5e-4, 0.0)).unwrap();
        let b = log_norm_bound(&w).unwrap();
        assert!(b.bound_ok && (b.ratio - 1.0).abs() < 1e-2, "{b:?}");
        let w = atom(c(0.0, -1.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(log_norm_bound(&w), Err(Error::Domain(_))));
        let w = atom(c(0.3, -1.5), c(0.1, 0.05)).unwrap();
        let a = log_element(&w).unwrap();
        let b = log_element_contour(&w).unwrap();
        let n = a.samples().len().max(b.samples().len());
        assert!(a.with_len(n).distance(&b.with_len(n)).unwrap() < 1e-10);
    }

    #[test]
    fn atom_log_matches_numerical_inverse() {
        let (k0, rho) = (c(0.0, -2.0), c(0.3, 0.0));
        let l = atom_log(k0, rho).unwrap();
        let grid = FrequencyGrid::aligned(DEFAULT_STEP, 1 << 16).unwrap();
        let values: Vec<_> = grid.points().iter().map(|&k| (1.0 + rho / (k0 - k)).ln()).collect();
        let inv = invert_half_line(&grid, &values, 0.0, DEFAULT_STEP, l.samples().len(), 3).unwrap();
        let numeric = WienerElement::new(c(0.0, 0.0), inv.samples, DEFAULT_STEP, 0.0).unwrap();
        assert!(numeric.sub(&l).unwrap().l2() < 1e-4);
    }
}
