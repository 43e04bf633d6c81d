//! Discrete transforms with the kernel `e^{±2iks}`.
//!
//! Forward: `(ℱh)(k) = ∫ h(s) e^{2iks} ds`. Inverse: `(ℱ⁻¹F)(s) = (1/π) ∫ F(k) e^{-2iks} dk`.
//! With this kernel Plancherel reads `‖ℱh‖²_{L²(ℝ)} = π‖h‖²_{L²(ℝ)}`.
//!
//! Profiles with jumps at the ends of their support have spectra decaying like `1/k`, so a
//! plain truncated inverse rings (Gibbs) and leaks mass outside the support. The inverses here
//! fit the large-`k` behaviour with a function whose transform is known in closed form
//! (a polynomial on `[a, b]`, or `(s-a)^m e^{-(s-a)}` terms on a half-line), subtract it in the
//! frequency domain, invert only the smooth remainder and add the fitted function back.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real, C};

/// Number of jump orders fitted per edge (value, slope, curvature).
pub const DEFAULT_EDGE_ORDERS: usize = 3;

/// Uniform frequency grid `k_m = -k_max + m·Δk`, `m = 0..n`, `Δk = 2 k_max / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid<T> {
    pub k_max: T,
    pub n: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(k_max: T, n: usize) -> Result<Self> {
        if !(k_max > T::zero()) || n < 8 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "frequency grid needs k_max > 0 and an even n >= 8 (got {k_max}, {n})"
            )));
        }
        Ok(Self { k_max, n })
    }

    /// Grid whose FFT lands exactly on `s_j = j·step_s`.
    pub fn aligned(step_s: T, n: usize) -> Result<Self> {
        Self::new(T::PI() / (lit::<T>(2.0) * step_s), n)
    }

    pub fn step(&self) -> T {
        lit::<T>(2.0) * self.k_max / from_usize(self.n)
    }

    pub fn point(&self, m: usize) -> T {
        -self.k_max + from_usize::<T>(m) * self.step()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|m| self.point(m)).collect()
    }

    /// Spacing of the native `s` grid produced by a length-`n` FFT.
    pub fn native_s_step(&self) -> T {
        T::PI() / (from_usize::<T>(self.n) * self.step())
    }

    /// Period in `s` of the discrete inverse.
    pub fn s_period(&self) -> T {
        T::PI() / self.step()
    }
}

/// Where the transformed function is allowed to live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support<T> {
    /// `[a, b]`, jumps fitted at both ends.
    Interval(T, T),
    /// `[a, ∞)`, jump fitted at `a` only.
    HalfLine(T),
}

impl<T: Real> Support<T> {
    fn contains(&self, s: T, margin: T) -> bool {
        match *self {
            Support::Interval(a, b) => s >= a - margin && s <= b + margin,
            Support::HalfLine(a) => s >= a - margin,
        }
    }
}

/// `∫₀¹ tᵐ e^{iwt} dt` for `m = 0..=max_m`.
fn monomial_moments<T: Real>(w: T, max_m: usize) -> Vec<C<T>> {
    let i = Complex::new(T::zero(), T::one());
    let threshold = lit::<T>(4.0).max(from_usize::<T>(2 * max_m));
    if w.abs() > threshold {
        let e = C::from_polar(T::one(), w);
        let iw = i * w;
        let mut out = Vec::with_capacity(max_m + 1);
        let mut prev = (e - T::one()) / iw;
        out.push(prev);
        for m in 1..=max_m {
            prev = (e - prev * from_usize::<T>(m)) / iw;
            out.push(prev);
        }
        out
    } else {
        (0..=max_m)
            .map(|m| {
                let mut term = C::new(T::one(), T::zero());
                let mut acc = term / from_usize::<T>(m + 1);
                for n in 1..60 {
                    term = term * i * w / from_usize::<T>(n);
                    let add = term / from_usize::<T>(m + n + 1);
                    acc = acc + add;
                    if add.norm() < T::epsilon() * lit(1e-3) * acc.norm() {
                        break;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Exactly transformable function carrying the endpoint behaviour of the data.
#[derive(Debug, Clone)]
enum EdgeModel<T> {
    /// `Σ cₘ ((s-a)/L)ᵐ` on `[a, b]`, degree `< 2·orders`.
    Polynomial { a: T, len: T, coef: Vec<C<T>> },
    /// `Σ cₘ (s-a)ᵐ e^{-β(s-a)}` on `[a, ∞)`.
    Exponential { a: T, beta: T, coef: Vec<C<T>> },
}

impl<T: Real> EdgeModel<T> {
    fn poly_hats(a: T, len: T, degree: usize, k: T) -> Vec<C<T>> {
        let i = Complex::new(T::zero(), T::one());
        let two = lit::<T>(2.0);
        let pre = (i * two * k * a).exp() * len;
        monomial_moments(two * k * len, degree).into_iter().map(|v| v * pre).collect()
    }

    fn exp_hats(a: T, beta: T, orders: usize, k: T) -> Vec<C<T>> {
        let i = Complex::new(T::zero(), T::one());
        let two = lit::<T>(2.0);
        let pre = (i * two * k * a).exp();
        let base = Complex::new(beta, -two * k);
        let mut fact = T::one();
        let mut pow = base;
        (0..orders)
            .map(|m| {
                if m > 0 {
                    fact = fact * from_usize(m);
                    pow = pow * base;
                }
                pre * fact / pow
            })
            .collect()
    }

    fn hats(&self, k: T) -> Vec<C<T>> {
        match self {
            EdgeModel::Polynomial { a, len, coef } => Self::poly_hats(*a, *len, coef.len() - 1, k),
            EdgeModel::Exponential { a, beta, coef } => Self::exp_hats(*a, *beta, coef.len(), k),
        }
    }

    fn coef(&self) -> &[C<T>] {
        match self {
            EdgeModel::Polynomial { coef, .. } | EdgeModel::Exponential { coef, .. } => coef,
        }
    }

    fn hat(&self, k: T) -> C<T> {
        self.hats(k)
            .into_iter()
            .zip(self.coef())
            .fold(C::new(T::zero(), T::zero()), |acc, (h, c)| acc + h * c)
    }

    fn value(&self, s: T) -> C<T> {
        let zero = C::new(T::zero(), T::zero());
        match self {
            EdgeModel::Polynomial { a, len, coef } => {
                let t = (s - *a) / *len;
                if t < T::zero() || t > T::one() {
                    return zero;
                }
                coef.iter().rev().fold(zero, |acc, c| acc * t + c)
            }
            EdgeModel::Exponential { a, beta, coef } => {
                let u = s - *a;
                if u < T::zero() {
                    return zero;
                }
                coef.iter().rev().fold(zero, |acc, c| acc * u + c) * (-*beta * u).exp()
            }
        }
    }

    /// Least-squares fit of the model transform to `values` on `|k| ≥ k_max/4`.
    fn fit(grid: &FrequencyGrid<T>, values: &[C<T>], support: Support<T>, orders: usize) -> Self {
        let zero = C::new(T::zero(), T::zero());
        let mut model = match support {
            Support::Interval(a, b) => EdgeModel::Polynomial { a, len: b - a, coef: vec![zero; 2 * orders] },
            Support::HalfLine(a) => EdgeModel::Exponential { a, beta: T::one(), coef: vec![zero; orders] },
        };
        let p = model.coef().len();
        if p == 0 {
            return model;
        }
        let cut = grid.k_max / lit(4.0);
        let rows: Vec<usize> = (0..grid.n).filter(|&m| grid.point(m).abs() >= cut).collect();
        let mut cols = vec![Vec::with_capacity(rows.len()); p];
        for &r in &rows {
            for (col, h) in cols.iter_mut().zip(model.hats(grid.point(r))) {
                col.push(h);
            }
        }
        let rhs: Vec<C<T>> = rows.iter().map(|&r| values[r]).collect();
        let sol = least_squares(cols, &rhs);
        match &mut model {
            EdgeModel::Polynomial { coef, .. } | EdgeModel::Exponential { coef, .. } => *coef = sol,
        }
        model
    }
}

/// Complex least squares by twice-iterated modified Gram–Schmidt; rank-deficient columns get
/// a zero coefficient.
pub(crate) fn least_squares<T: Real>(mut cols: Vec<Vec<C<T>>>, rhs: &[C<T>]) -> Vec<C<T>> {
    let p = cols.len();
    let zero = C::new(T::zero(), T::zero());
    let mut r = vec![vec![zero; p]; p];
    let mut alive = vec![true; p];
    let dot = |a: &[C<T>], b: &[C<T>]| a.iter().zip(b).fold(zero, |acc, (x, y)| acc + x.conj() * y);
    let orig_norms: Vec<T> = cols.iter().map(|c| dot(c, c).re.sqrt()).collect();
    for j in 0..p {
        for _ in 0..2 {
            for i in 0..j {
                if !alive[i] {
                    continue;
                }
                let proj = dot(&cols[i], &cols[j]);
                r[i][j] = r[i][j] + proj;
                let qi = cols[i].clone();
                for (x, q) in cols[j].iter_mut().zip(&qi) {
                    *x = *x - q * proj;
                }
            }
        }
        let nrm = dot(&cols[j], &cols[j]).re.sqrt();
        if !(nrm > lit::<T>(1e-10) * orig_norms[j]) || nrm == T::zero() {
            alive[j] = false;
            continue;
        }
        r[j][j] = C::new(nrm, T::zero());
        for x in cols[j].iter_mut() {
            *x = *x / nrm;
        }
    }
    let qtb: Vec<C<T>> = (0..p).map(|j| if alive[j] { dot(&cols[j], rhs) } else { zero }).collect();
    let mut x = vec![zero; p];
    for j in (0..p).rev() {
        if !alive[j] {
            continue;
        }
        let mut acc = qtb[j];
        for k in j + 1..p {
            acc = acc - r[j][k] * x[k];
        }
        x[j] = acc / r[j][j];
    }
    x
}

/// Result of an inverse transform onto a sampled profile.
#[derive(Debug, Clone)]
pub struct InverseProfile<T> {
    pub samples: Vec<C<T>>,
    /// Energy of the reconstruction outside the support divided by the total energy.
    pub leakage: T,
}

fn fft_forward<T: Real>(n: usize) -> Arc<dyn Fft<T>> {
    FftPlanner::<T>::new().plan_fft_forward(n)
}

/// Remainder inverse on the native FFT grid; returns `(s_j, r(s_j))` with `s` unwrapped to
/// `[-period/2, period/2)`.
fn native_inverse<T: Real>(grid: &FrequencyGrid<T>, values: &[C<T>]) -> Vec<(T, C<T>)> {
    let n = grid.n;
    let mut buf = values.to_vec();
    fft_forward::<T>(n).process(&mut buf);
    let ds = grid.native_s_step();
    let scale = grid.step() / T::PI();
    let two = lit::<T>(2.0);
    buf.into_iter()
        .enumerate()
        .map(|(j, x)| {
            let s = if j < n / 2 { from_usize::<T>(j) * ds } else { from_usize::<T>(j) * ds - grid.s_period() };
            // k_m = -K + mΔk: factor e^{2iKs}.
            let phase = C::from_polar(T::one(), two * grid.k_max * s);
            (s, x * phase * scale)
        })
        .collect()
}

fn leakage_of<T: Real>(grid: &FrequencyGrid<T>, native: &[(T, C<T>)], support: Support<T>, inside_energy: T) -> T {
    let ds = grid.native_s_step();
    let outside: T = native
        .iter()
        .filter(|(s, _)| !support.contains(*s, ds * lit(0.5)))
        .map(|(_, v)| v.norm_sqr())
        .sum::<T>()
        * ds;
    let total = outside + inside_energy;
    if total > T::zero() {
        outside / total
    } else {
        T::zero()
    }
}

/// Inverse transform of `values` (sampled on `grid`) onto the midpoints of `cells` equal cells
/// of `[a, b]`.
pub fn invert_interval<T: Real>(
    grid: &FrequencyGrid<T>,
    values: &[C<T>],
    a: T,
    b: T,
    cells: usize,
    orders: usize,
) -> Result<InverseProfile<T>> {
    if values.len() != grid.n {
        return Err(Error::InvalidInput("sample count does not match frequency grid".into()));
    }
    if !(b > a) || cells == 0 {
        return Err(Error::InvalidInput("empty support interval".into()));
    }
    if grid.s_period() < lit::<T>(2.0) * (b - a.min(T::zero())).max(b - a) {
        return Err(Error::Resolution(
            "frequency step too coarse: the discrete inverse wraps onto the support; increase n_k".into(),
        ));
    }
    let support = Support::Interval(a, b);
    let model = EdgeModel::fit(grid, values, support, orders);
    let remainder: Vec<C<T>> = (0..grid.n).map(|m| values[m] - model.hat(grid.point(m))).collect();

    let h = (b - a) / from_usize(cells);
    let dk = grid.step();
    let scale = dk / T::PI();
    let two = lit::<T>(2.0);
    let samples: Vec<C<T>> = (0..cells)
        .into_par_iter()
        .map(|j| {
            let s = a + (from_usize::<T>(j) + lit(0.5)) * h;
            let rot = C::from_polar(T::one(), -two * dk * s);
            let mut acc = C::new(T::zero(), T::zero());
            let mut t = C::new(T::one(), T::zero());
            for (m, r) in remainder.iter().enumerate() {
                if m % 1024 == 0 {
                    t = C::from_polar(T::one(), -two * grid.point(m) * s);
                }
                acc = acc + r * t;
                t = t * rot;
            }
            acc * scale + model.value(s)
        })
        .collect();

    let inside: T = samples.iter().map(|v| v.norm_sqr()).sum::<T>() * h;
    let native = native_inverse(grid, &remainder);
    let leakage = leakage_of(grid, &native, support, inside);
    Ok(InverseProfile { samples, leakage })
}

/// Inverse transform onto nodes `s_j = a + j·step`, `j < n_nodes`, for a function living on
/// `[a, ∞)`. The grid must be aligned with `step` (see [`FrequencyGrid::aligned`]).
pub fn invert_half_line<T: Real>(
    grid: &FrequencyGrid<T>,
    values: &[C<T>],
    a: T,
    step: T,
    n_nodes: usize,
    orders: usize,
) -> Result<InverseProfile<T>> {
    if values.len() != grid.n {
        return Err(Error::InvalidInput("sample count does not match frequency grid".into()));
    }
    if ((grid.native_s_step() - step) / step).abs() > lit(1e-9) {
        return Err(Error::IncompatibleGrid("frequency grid not aligned with the profile step".into()));
    }
    if n_nodes > grid.n / 2 {
        return Err(Error::Resolution("profile horizon exceeds half the transform period".into()));
    }
    let support = Support::HalfLine(a);
    let model = EdgeModel::fit(grid, values, support, orders);
    // Shift so the left edge sits at s = 0 of the native grid.
    let i = Complex::new(T::zero(), T::one());
    let two = lit::<T>(2.0);
    let remainder: Vec<C<T>> = (0..grid.n)
        .map(|m| {
            let k = grid.point(m);
            (values[m] - model.hat(k)) * (-(i * two * k * a)).exp()
        })
        .collect();
    let native = native_inverse(grid, &remainder);
    let samples: Vec<C<T>> = (0..n_nodes)
        .map(|j| {
            let s = from_usize::<T>(j) * step;
            native[j].1 + model.value(a + s)
        })
        .collect();
    let inside: T = samples.iter().map(|v| v.norm_sqr()).sum::<T>() * step;
    let shifted = Support::HalfLine(T::zero());
    let leakage = leakage_of(grid, &native, shifted, inside);
    Ok(InverseProfile { samples, leakage })
}

/// Plain (uncorrected) inverse on the native grid, for functions whose support is not compact
/// on both sides.
pub fn invert_plain<T: Real>(grid: &FrequencyGrid<T>, values: &[C<T>]) -> Result<Vec<(T, C<T>)>> {
    if values.len() != grid.n {
        return Err(Error::InvalidInput("sample count does not match frequency grid".into()));
    }
    Ok(native_inverse(grid, values))
}

/// Gregory end-corrected trapezoid weights (fourth order) for `n` equally spaced nodes.
pub fn gregory_weights<T: Real>(n: usize, step: T) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![T::zero()],
        2..=5 => {
            let mut w = vec![step; n];
            w[0] = step * lit(0.5);
            w[n - 1] = step * lit(0.5);
            w
        }
        _ => {
            let mut w = vec![step; n];
            let ends = [lit::<T>(3.0 / 8.0), lit(7.0 / 6.0), lit(23.0 / 24.0)];
            for (j, e) in ends.iter().enumerate() {
                w[j] = step * *e;
                w[n - 1 - j] = step * *e;
            }
            w
        }
    }
}

/// Frequency values `∫ h(s) e^{2iks} ds` of nodal samples `h(a + j·step)` at every point of an
/// aligned grid, using Gregory weights.
pub fn forward_nodal_aligned<T: Real>(grid: &FrequencyGrid<T>, samples: &[C<T>], a: T, step: T) -> Result<Vec<C<T>>> {
    if ((grid.native_s_step() - step) / step).abs() > lit(1e-9) {
        return Err(Error::IncompatibleGrid("frequency grid not aligned with the profile step".into()));
    }
    if samples.len() > grid.n {
        return Err(Error::Resolution("profile longer than the transform length".into()));
    }
    let n = grid.n;
    let w = gregory_weights(samples.len(), step);
    // X_m = Σ_j w_j h_j e^{2i k_m s_j}, k_m = -K + mΔk, s_j = j·step, NΔk·step = π
    //     = Σ_j (w_j h_j e^{-2iK s_j}) e^{+2πi jm/N}: an inverse DFT without normalisation.
    let two = lit::<T>(2.0);
    let mut buf = vec![C::new(T::zero(), T::zero()); n];
    for (j, (&h, &wj)) in samples.iter().zip(&w).enumerate() {
        let s = from_usize::<T>(j) * step;
        buf[j] = h * wj * C::from_polar(T::one(), -two * grid.k_max * s);
    }
    FftPlanner::<T>::new().plan_fft_inverse(n).process(&mut buf);
    let i = Complex::new(T::zero(), T::one());
    Ok(buf
        .into_iter()
        .enumerate()
        .map(|(m, x)| x * (i * two * grid.point(m) * a).exp())
        .collect())
}

/// Direct Gregory-weighted evaluation of `∫ h(s) e^{2izs} ds` at a single complex `z`.
pub fn forward_nodal_at<T: Real>(samples: &[C<T>], a: T, step: T, z: C<T>) -> C<T> {
    let w = gregory_weights(samples.len(), step);
    let i = Complex::new(T::zero(), T::one());
    let two = lit::<T>(2.0);
    let rot = (i * two * z * step).exp();
    let mut t = (i * two * z * a).exp();
    let mut acc = C::new(T::zero(), T::zero());
    for (j, (&h, &wj)) in samples.iter().zip(&w).enumerate() {
        if j % 512 == 0 && j > 0 {
            t = (i * two * z * (a + from_usize::<T>(j) * step)).exp();
        }
        acc = acc + h * t * wj;
        t = t * rot;
    }
    acc
}
