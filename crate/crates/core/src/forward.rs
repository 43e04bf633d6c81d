//! Forward problem: Jost solution by transfer matrices, Jost function, scattering matrix.
//!
//! The Jost solution solves `f' = (Q + izσ₃) f` on `[0, γ]` with `f(γ, z) = e^{izγσ₃}`, where
//! `Q = [[0, q], [q̄, 0]]`. On a cell where `q` is constant the generator
//! `A = [[iz, q], [q̄, -iz]]` satisfies `A² = λ² I` with `λ² = |q|² - z²`, so the backward
//! propagator over a cell of width `h` is `e^{-Ah} = cosh(λh) I - (sinh(λh)/λ) A`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jost::JostFunction;
use crate::potential::Potential;
use crate::scalar::{from_usize, is_finite_c, lit, Real, C};
use crate::transform::{self, FrequencyGrid, DEFAULT_EDGE_ORDERS};

pub type Mat2<T> = [[C<T>; 2]; 2];

/// Below this `|λh|` the cell exponential switches to its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

/// Value of the Jost solution at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostMatrix<T> {
    pub entries: Mat2<T>,
    pub z: C<T>,
}

impl<T: Real> JostMatrix<T> {
    pub fn det(&self) -> C<T> {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// `ψ(z) = f₁₁(0, z) - f₂₁(0, z)`.
    pub fn psi(&self) -> C<T> {
        self.entries[0][0] - self.entries[1][0]
    }
}

fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn one<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

pub(crate) fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub(crate) fn mat_vec<T: Real>(a: &Mat2<T>, v: [C<T>; 2]) -> [C<T>; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub(crate) fn vec_mat<T: Real>(v: [C<T>; 2], a: &Mat2<T>) -> [C<T>; 2] {
    [v[0] * a[0][0] + v[1] * a[1][0], v[0] * a[0][1] + v[1] * a[1][1]]
}

/// `cosh(λh)`, `sinh(λh)/λ` and their derivatives with respect to `μ = λ²`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellFunctions<T> {
    pub c: C<T>,
    pub s: C<T>,
    pub dc: C<T>,
    pub ds: C<T>,
}

pub(crate) fn cell_functions<T: Real>(mu: C<T>, h: T, with_derivative: bool) -> CellFunctions<T> {
    let x = mu * h * h;
    let two = lit::<T>(2.0);
    let (c, s) = if x.norm().sqrt() < lit(SERIES_THRESHOLD) {
        // cosh = 1 + x/2 + x²/24, sinh(λh)/λ = h(1 + x/6 + x²/120)
        let c = one::<T>() + x / two + x * x / lit::<T>(24.0);
        let s = (one::<T>() + x / lit::<T>(6.0) + x * x / lit::<T>(120.0)) * h;
        (c, s)
    } else {
        let lam = mu.sqrt();
        let e = (lam * h).exp();
        let ei = e.inv();
        ((e + ei) / two, (e - ei) / (lam * two))
    };
    if !with_derivative {
        return CellFunctions { c, s, dc: zero(), ds: zero() };
    }
    let dc = s * h / two;
    let ds = if x.norm() < T::one() {
        // d/dμ Σ μⁿ h^{2n+1}/(2n+1)! = h³ Σ_{n≥1} n xⁿ⁻¹ / (2n+1)!
        let mut acc = zero::<T>();
        let mut pow = one::<T>();
        let mut fact = lit::<T>(6.0);
        for n in 1..16usize {
            acc = acc + pow * from_usize::<T>(n) / fact;
            pow = pow * x;
            fact = fact * from_usize::<T>(2 * n + 2) * from_usize::<T>(2 * n + 3);
        }
        acc * h * h * h
    } else {
        (c * h - s) / (mu * two)
    };
    CellFunctions { c, s, dc, ds }
}

/// Generator `A = [[iz, q], [q̄, -iz]]` of one cell.
pub(crate) fn generator<T: Real>(q: C<T>, z: C<T>) -> Mat2<T> {
    let iz = Complex::new(-z.im, z.re);
    [[iz, q], [q.conj(), -iz]]
}

/// Backward propagator `e^{-Ah}` of one cell.
pub(crate) fn cell_propagator<T: Real>(q: C<T>, z: C<T>, h: T) -> Mat2<T> {
    let mu = C::new(q.norm_sqr(), T::zero()) - z * z;
    let f = cell_functions(mu, h, false);
    let a = generator(q, z);
    [[f.c - f.s * a[0][0], -f.s * a[0][1]], [-f.s * a[1][0], f.c - f.s * a[1][1]]]
}

/// `e^{-Ah}` and `d/dz e^{-Ah}`.
pub(crate) fn cell_propagator_dz<T: Real>(q: C<T>, z: C<T>, h: T) -> (Mat2<T>, Mat2<T>) {
    let mu = C::new(q.norm_sqr(), T::zero()) - z * z;
    let f = cell_functions(mu, h, true);
    let a = generator(q, z);
    let dmu = -z * lit::<T>(2.0);
    let i = Complex::new(T::zero(), T::one());
    let p = [[f.c - f.s * a[0][0], -f.s * a[0][1]], [-f.s * a[1][0], f.c - f.s * a[1][1]]];
    // dP = dc·dμ I - ds·dμ A - s·dA, dA/dz = iσ₃
    let dcm = f.dc * dmu;
    let dsm = f.ds * dmu;
    let dp = [
        [dcm - dsm * a[0][0] - f.s * i, -dsm * a[0][1]],
        [-dsm * a[1][0], dcm - dsm * a[1][1] + f.s * i],
    ];
    (p, dp)
}

/// `e^{-Ah}` together with its derivatives in `Re q` and `Im q`.
pub(crate) fn cell_propagator_dq<T: Real>(q: C<T>, z: C<T>, h: T) -> (Mat2<T>, Mat2<T>, Mat2<T>) {
    let mu = C::new(q.norm_sqr(), T::zero()) - z * z;
    let f = cell_functions(mu, h, true);
    let a = generator(q, z);
    let two = lit::<T>(2.0);
    let p = [[f.c - f.s * a[0][0], -f.s * a[0][1]], [-f.s * a[1][0], f.c - f.s * a[1][1]]];
    let i = Complex::new(T::zero(), T::one());
    let build = |dmu: T, da01: C<T>, da10: C<T>| -> Mat2<T> {
        let dcm = f.dc * dmu;
        let dsm = f.ds * dmu;
        [
            [dcm - dsm * a[0][0], -dsm * a[0][1] - f.s * da01],
            [-dsm * a[1][0] - f.s * da10, dcm - dsm * a[1][1]],
        ]
    };
    let dre = build(two * q.re, one(), one());
    let dim = build(two * q.im, i, -i);
    (p, dre, dim)
}

fn overflow<T: Real>(cell: usize, z: C<T>) -> Error {
    Error::Overflow { cell, z: format!("{z}") }
}

fn check_z<T: Real>(q: &Potential<T>, z: C<T>) -> Result<()> {
    if !is_finite_c(z) {
        return Err(Error::InvalidInput(format!("non-finite spectral parameter {z}")));
    }
    if lit::<T>(2.0) * q.gamma() * z.im.abs() > T::exp_guard() {
        return Err(overflow(q.n_cells().saturating_sub(1), z));
    }
    Ok(())
}

/// Jost solution at `x = 0`, propagated backward from `x = γ`.
pub fn jost_solution<T: Real>(q: &Potential<T>, z: C<T>) -> Result<JostMatrix<T>> {
    check_z(q, z)?;
    let h = q.step();
    let i = Complex::new(T::zero(), T::one());
    let e = (i * z * q.gamma()).exp();
    let mut f: Mat2<T> = [[e, zero()], [zero(), e.inv()]];
    for (j, &qj) in q.samples().iter().enumerate().rev() {
        f = mat_mul(&cell_propagator(qj, z, h), &f);
        if !f.iter().flatten().all(|v| is_finite_c(*v)) {
            return Err(overflow(j, z));
        }
    }
    Ok(JostMatrix { entries: f, z })
}

/// Jost function `ψ(z) = f₁₁(0, z) - f₂₁(0, z)`.
pub fn jost_function<T: Real>(q: &Potential<T>, z: C<T>) -> Result<C<T>> {
    jost_function_with_derivative(q, z, false).map(|(v, _)| v)
}

/// `ψ(z)` and, if requested, `ψ'(z)` from the analytic derivative of each cell propagator.
pub fn jost_function_with_derivative<T: Real>(q: &Potential<T>, z: C<T>, derivative: bool) -> Result<(C<T>, C<T>)> {
    check_z(q, z)?;
    let h = q.step();
    let i = Complex::new(T::zero(), T::one());
    let e = (i * z * q.gamma()).exp();
    // Column vector u = P_j ⋯ P_{n-1} (e^{izγ}, 0)ᵀ and its z-derivative.
    let mut u = [e, zero()];
    let mut du = [i * q.gamma() * e, zero()];
    for (j, &qj) in q.samples().iter().enumerate().rev() {
        if derivative {
            let (p, dp) = cell_propagator_dz(qj, z, h);
            let a = mat_vec(&dp, u);
            let b = mat_vec(&p, du);
            du = [a[0] + b[0], a[1] + b[1]];
            u = mat_vec(&p, u);
        } else {
            u = mat_vec(&cell_propagator(qj, z, h), u);
        }
        if !(is_finite_c(u[0]) && is_finite_c(u[1])) {
            return Err(overflow(j, z));
        }
    }
    Ok((u[0] - u[1], du[0] - du[1]))
}

/// `S(z) = conj(ψ(z)) / ψ(z)` for real `z`.
pub fn scattering_matrix<T: Real>(q: &Potential<T>, z: T) -> Result<C<T>> {
    let psi = jost_function(q, C::new(z, T::zero()))?;
    scattering_from_psi(psi, z)
}

pub(crate) fn scattering_from_psi<T: Real>(psi: C<T>, z: T) -> Result<C<T>> {
    if psi.norm() < lit(1e-12) {
        return Err(Error::Division(format!("{z}")));
    }
    Ok(psi.conj() / psi)
}

/// Parameters of the sampled transform used to build time-domain profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions<T> {
    pub k_max: T,
    pub n_k: usize,
    pub leak_tol: T,
    pub edge_orders: usize,
    /// Number of profile cells; `None` uses the potential's own grid.
    pub profile_cells: Option<usize>,
}

impl<T: Real> Default for TransformOptions<T> {
    fn default() -> Self {
        Self { k_max: lit(200.0), n_k: 16384, leak_tol: lit(1e-3), edge_orders: DEFAULT_EDGE_ORDERS, profile_cells: None }
    }
}

impl<T: Real> TransformOptions<T> {
    pub fn new(k_max: T, n_k: usize) -> Self {
        Self { k_max, n_k, ..Self::default() }
    }

    pub(crate) fn grid(&self) -> Result<FrequencyGrid<T>> {
        if !self.n_k.is_power_of_two() {
            return Err(Error::InvalidInput(format!("n_k must be a power of two, got {}", self.n_k)));
        }
        FrequencyGrid::new(self.k_max, self.n_k)
    }
}

/// `ψ` sampled on the real frequency grid.
pub fn sample_jost<T: Real>(q: &Potential<T>, grid: &FrequencyGrid<T>) -> Result<Vec<C<T>>> {
    (0..grid.n)
        .into_par_iter()
        .map(|m| jost_function(q, C::new(grid.point(m), T::zero())))
        .collect()
}

/// Inverse transform of sampled `ψ - 1` onto `[0, γ]`, failing when leakage exceeds the tolerance.
pub(crate) fn profile_from_samples<T: Real>(
    gamma: T,
    psi: &[C<T>],
    grid: &FrequencyGrid<T>,
    cells: usize,
    opts: &TransformOptions<T>,
) -> Result<JostFunction<T>> {
    let shifted: Vec<C<T>> = psi.iter().map(|v| v - T::one()).collect();
    let prof = transform::invert_interval(grid, &shifted, T::zero(), gamma, cells, opts.edge_orders)?;
    if !(prof.leakage <= opts.leak_tol) {
        return Err(Error::Resolution(format!(
            "out-of-support leakage {:.3e} exceeds {:.1e}; increase k_max or n_k",
            prof.leakage, opts.leak_tol
        )));
    }
    JostFunction::new(gamma, prof.samples, prof.leakage)
}

/// Time-domain profile `g` with `ψ = 1 + ℱg`, obtained from `ψ` on a real grid.
pub fn jost_profile<T: Real>(q: &Potential<T>, opts: &TransformOptions<T>) -> Result<JostFunction<T>> {
    let grid = opts.grid()?;
    let psi = sample_jost(q, &grid)?;
    profile_from_samples(q.gamma(), &psi, &grid, opts.profile_cells.unwrap_or(q.n_cells()), opts)
}

/// [`jost_profile`] and the S-matrix on the same grid from one pass over the frequencies.
pub fn jost_and_smatrix<T: Real>(q: &Potential<T>, opts: &TransformOptions<T>) -> Result<(JostFunction<T>, SMatrixProfile<T>)> {
    let grid = opts.grid()?;
    let psi = sample_jost(q, &grid)?;
    let s = SMatrixProfile::from_jost_samples(q.gamma(), &grid, &psi)?;
    let f = profile_from_samples(q.gamma(), &psi, &grid, opts.profile_cells.unwrap_or(q.n_cells()), opts)?;
    Ok((f, s))
}

/// Winding number of a unimodular sequence written as `S = e^{-2iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub winding: i64,
    /// `(φ_end - φ_start)/π` minus its rounded value.
    pub residual: f64,
}

/// Largest tolerated phase step between neighbours; larger steps are ambiguous after wrapping.
const MAX_PHASE_STEP: f64 = 0.75 * std::f64::consts::PI;

/// Counts revolutions of `S = e^{-2iφ}` along the grid: `(φ_end - φ_start)/π`.
///
/// With this convention a single factor `(z - i)/(z + i)` over a wide symmetric grid gives
/// `-1` (its argument increases by `2π`).
pub fn winding_number<T: Real>(samples: &[C<T>]) -> Result<Winding> {
    if samples.len() < 2 {
        return Ok(Winding { winding: 0, residual: 0.0 });
    }
    let mut theta = 0.0f64;
    let mut prev = samples[0];
    for (j, &s) in samples.iter().enumerate().skip(1) {
        let r = s * prev.conj();
        let d = r.im.to_f64().unwrap_or(f64::NAN).atan2(r.re.to_f64().unwrap_or(f64::NAN));
        if !d.is_finite() || d.abs() > MAX_PHASE_STEP {
            return Err(Error::Undersampled(format!("phase step {d:.3} rad between samples {} and {j}", j - 1)));
        }
        theta += d;
        prev = s;
    }
    let turns = -theta / (2.0 * std::f64::consts::PI);
    let winding = turns.round();
    Ok(Winding { winding: winding as i64, residual: turns - winding })
}

/// `S` sampled on a symmetric real grid, with the support length of the underlying potential.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixProfile<T> {
    pub gamma: T,
    pub k_max: T,
    pub n_k: usize,
    pub values: Vec<C<T>>,
}

impl<T: Real> SMatrixProfile<T> {
    pub fn grid(&self) -> Result<FrequencyGrid<T>> {
        FrequencyGrid::new(self.k_max, self.n_k)
    }

    pub fn from_jost_samples(gamma: T, grid: &FrequencyGrid<T>, psi: &[C<T>]) -> Result<Self> {
        let values = psi
            .iter()
            .enumerate()
            .map(|(m, &p)| scattering_from_psi(p, grid.point(m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gamma, k_max: grid.k_max, n_k: grid.n, values })
    }

    pub fn from_potential(q: &Potential<T>, opts: &TransformOptions<T>) -> Result<Self> {
        let grid = opts.grid()?;
        let psi = sample_jost(q, &grid)?;
        Self::from_jost_samples(q.gamma(), &grid, &psi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixReport {
    pub max_modulus_defect: f64,
    pub winding: i64,
    pub winding_residual: f64,
    /// Energy of `F` below `-γ - δ` relative to its total energy.
    pub leakage_below: f64,
    pub delta: f64,
    pub l2_norm: f64,
    pub l1_norm: f64,
    pub failures: Vec<String>,
}

impl SMatrixReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `|S| = 1`, `W(S) = 0` and that `F = ℱ⁻¹(S - 1)` vanishes below `-γ`.
pub fn verify_smatrix<T: Real>(s: &SMatrixProfile<T>, leak_tol: T) -> Result<SMatrixReport> {
    let grid = s.grid()?;
    if s.values.len() != grid.n {
        return Err(Error::InvalidInput("S-matrix sample count does not match its grid".into()));
    }
    let mut failures = Vec::new();
    let defect = s.values.iter().map(|v| (v.norm() - T::one()).abs()).fold(T::zero(), T::max);
    if defect > lit(1e-10) {
        failures.push(format!("|S| deviates from 1 by {defect:.3e}"));
    }
    let w = winding_number(&s.values)?;
    if w.winding != 0 {
        failures.push(format!("winding number {} (expected 0)", w.winding));
    }
    let minus_one: Vec<C<T>> = s.values.iter().map(|v| v - T::one()).collect();
    let native = transform::invert_plain(&grid, &minus_one)?;
    let ds = grid.native_s_step();
    let delta = ds * lit(8.0);
    let lower = -s.gamma - delta;
    let mut below = T::zero();
    let mut total = T::zero();
    let mut l2 = T::zero();
    let mut l1 = T::zero();
    for (x, v) in &native {
        let e = v.norm_sqr();
        total = total + e;
        if *x < lower {
            below = below + e;
        }
        if *x >= -s.gamma {
            l2 = l2 + e;
            l1 = l1 + v.norm();
        }
    }
    let leakage = if total > T::zero() { below / total } else { T::zero() };
    if leakage > leak_tol {
        failures.push(format!("mass of F below -γ-δ is {leakage:.3e} (tolerance {leak_tol:.1e})"));
    }
    Ok(SMatrixReport {
        max_modulus_defect: defect.to_f64().unwrap_or(f64::NAN),
        winding: w.winding,
        winding_residual: w.residual,
        leakage_below: leakage.to_f64().unwrap_or(f64::NAN),
        delta: delta.to_f64().unwrap_or(f64::NAN),
        l2_norm: (l2 * ds).sqrt().to_f64().unwrap_or(f64::NAN),
        l1_norm: (l1 * ds).to_f64().unwrap_or(f64::NAN),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    fn unit_potential(n: usize) -> Potential<f64> {
        Potential::constant(1.0, n, c(1.0, 0.0)).unwrap()
    }

    /// Classical fourth-order Runge–Kutta with step doubling, integrating `f' = (Q + izσ₃) f`
    /// from `γ` to `0` for constant real `q`.
    fn rk_oracle(qv: f64, gamma: f64, z: C<f64>) -> Mat2<f64> {
        let a = [[c(0.0, 1.0) * z, c(qv, 0.0)], [c(qv, 0.0), -c(0.0, 1.0) * z]];
        let rhs = |f: &Mat2<f64>| mat_mul(&a, f);
        let add = |f: &Mat2<f64>, k: &Mat2<f64>, s: f64| -> Mat2<f64> {
            let mut o = *f;
            for r in 0..2 {
                for col in 0..2 {
                    o[r][col] += k[r][col] * s;
                }
            }
            o
        };
        let step = |f: &Mat2<f64>, h: f64| {
            let k1 = rhs(f);
            let k2 = rhs(&add(f, &k1, h / 2.0));
            let k3 = rhs(&add(f, &k2, h / 2.0));
            let k4 = rhs(&add(f, &k3, h));
            let mut o = *f;
            for r in 0..2 {
                for col in 0..2 {
                    o[r][col] += (k1[r][col] + k2[r][col] * 2.0 + k3[r][col] * 2.0 + k4[r][col]) * (h / 6.0);
                }
            }
            o
        };
        let e = (c(0.0, 1.0) * z * gamma).exp();
        let mut f = [[e, c(0.0, 0.0)], [c(0.0, 0.0), e.inv()]];
        let mut x = gamma;
        let mut h = -1e-3;
        while x > 0.0 {
            if x + h < 0.0 {
                h = -x;
            }
            let full = step(&f, h);
            let half = step(&step(&f, h / 2.0), h / 2.0);
            let err = (0..2).flat_map(|r| (0..2).map(move |k| (r, k))).map(|(r, k)| (full[r][k] - half[r][k]).norm()).fold(0.0, f64::max);
            if err < 1e-13 || h.abs() < 1e-7 {
                f = half;
                x += h;
                if err < 1e-15 {
                    h *= 1.5;
                }
            } else {
                h /= 2.0;
            }
        }
        f
    }

    #[test]
    fn zero_potential_gives_identity() {
        let q = Potential::zero(1.0, 64).unwrap();
        for z in [c(0.3, 0.0), c(-2.0, 1.5), c(4.0, -3.0)] {
            let f = jost_solution(&q, z).unwrap();
            assert!((f.entries[0][0] - 1.0).norm() < 1e-13);
            assert!((f.entries[1][1] - 1.0).norm() < 1e-13);
            assert!(f.entries[0][1].norm() < 1e-13 && f.entries[1][0].norm() < 1e-13);
            assert!((jost_function(&q, z).unwrap() - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_potential_at_origin() {
        let q = unit_potential(256);
        let f = jost_solution(&q, c(0.0, 0.0)).unwrap();
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        assert!((f.entries[0][0] - ch).norm() < 1e-13);
        assert!((f.entries[0][1] + sh).norm() < 1e-13);
        assert!((f.entries[1][0] + sh).norm() < 1e-13);
        assert!((f.entries[1][1] - ch).norm() < 1e-13);
        assert!((f.psi() - std::f64::consts::E).norm() < 1e-12);
    }

    #[test]
    fn matches_runge_kutta_oracle() {
        let q = unit_potential(512);
        for z in [c(0.0, 2.0), c(1.5, -0.5), c(3.0, 0.0)] {
            let f = jost_solution(&q, z).unwrap();
            let o = rk_oracle(1.0, 1.0, z);
            for r in 0..2 {
                for k in 0..2 {
                    assert!((f.entries[r][k] - o[r][k]).norm() < 1e-8, "z={z} entry {r}{k}");
                }
            }
        }
    }

    #[test]
    fn determinant_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = Potential::from_fn(1.0, 200, |x| c(1.0 + x, 0.5 * x * x)).unwrap();
        for _ in 0..30 {
            let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0));
            let f = jost_solution(&q, z).unwrap();
            let g = jost_solution(&q, z.conj()).unwrap();
            assert!((f.det() - 1.0).norm() < 1e-8 * f.entries[0][0].norm_sqr().max(1.0));
            assert!((f.entries[0][0] - g.entries[1][1].conj()).norm() < 1e-9 * f.entries[0][0].norm().max(1.0));
            assert!((f.entries[0][1] - g.entries[1][0].conj()).norm() < 1e-9 * f.entries[0][0].norm().max(1.0));
        }
    }

    #[test]
    fn analytic_derivative_matches_difference_quotient() {
        let q = Potential::from_fn(1.0, 300, |x| c(0.7 - x, 0.2 + 0.1 * x)).unwrap();
        for z in [c(2.0, -0.4), c(-5.0, 0.8), c(0.0, 0.0), c(1e-6, 0.0)] {
            let (_, d) = jost_function_with_derivative(&q, z, true).unwrap();
            let e = 1e-5;
            let fd = (jost_function(&q, z + e).unwrap() - jost_function(&q, z - e).unwrap()) / (2.0 * e);
            assert!((d - fd).norm() < 1e-7 * d.norm().max(1.0), "z={z} {d} {fd}");
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        // |q| = |z| puts λ = 0 exactly.
        let q = Potential::constant(1.0, 100, c(0.6, 0.8)).unwrap();
        let a = jost_function(&q, c(1.0, 0.0)).unwrap();
        let b = jost_function(&q, c(1.0 + 1e-7, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn parameter_derivatives_match_difference_quotients() {
        let z = c(1.3, -0.2);
        let q0 = c(0.4, -0.3);
        let (_, dre, dim) = cell_propagator_dq(q0, z, 0.05);
        let e = 1e-6;
        let fre = |d: C<f64>| cell_propagator(q0 + d, z, 0.05);
        for (dq, ana) in [(c(e, 0.0), dre), (c(0.0, e), dim)] {
            let p = fre(dq);
            let m = fre(-dq);
            for r in 0..2 {
                for k in 0..2 {
                    let fd = (p[r][k] - m[r][k]) / (2.0 * e);
                    assert!((fd - ana[r][k]).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let q = unit_potential(16);
        match jost_solution(&q, c(0.0, -400.0)) {
            Err(Error::Overflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn scattering_matrix_is_unimodular() {
        let q = Potential::from_fn(1.0, 128, |x: f64| c(x.sin(), 1.0 - x)).unwrap();
        for z in [-7.0, -0.1, 0.0, 2.5, 13.0] {
            assert!((scattering_matrix(&q, z).unwrap().norm() - 1.0).abs() < 1e-10);
        }
        assert!((scattering_matrix(&unit_potential(64), 0.0).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn winding_of_blaschke_factor() {
        let samples: Vec<C<f64>> = (0..=20000)
            .map(|j| {
                let z = c(-1000.0 + 0.1 * j as f64, 0.0);
                (z - c(0.0, 1.0)) / (z + c(0.0, 1.0))
            })
            .collect();
        let w = winding_number(&samples).unwrap();
        assert_eq!(w.winding, -1);
        let flat = vec![c(1.0, 0.0); 10];
        assert_eq!(winding_number(&flat).unwrap().winding, 0);
        let jumpy = vec![c(1.0, 0.0), c(-1.0, 0.01)];
        assert!(matches!(winding_number(&jumpy), Err(Error::Undersampled(_))));
    }
}
