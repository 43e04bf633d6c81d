//! Zero-set statistics for entire functions of exponential type: truncated Hadamard products,
//! counting functions, Levinson slopes and Lindelöf-type partial sums.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::{modulus_order, Analytic};
use crate::scalar::{from_usize, lit, to_f64, Real, C};

/// Data of `f(k) = C kᵖ e^{iϰk} Π (1 - k/kₙ)` with the product taken in order of modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardData<T> {
    zeros: Vec<C<T>>,
    pub c: C<T>,
    pub kappa: T,
    pub p: usize,
}

/// Value of a truncated product with the size of the neglected first-order term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardValue<T> {
    pub value: C<T>,
    /// Estimate of `|k Σ_{tail} 1/kₙ|`, taken as `|k|` times the largest change of the partial
    /// sums `Σ_{|kₙ|≤r} 1/kₙ` over the outer quarter of the stored radii.
    pub tail_estimate: T,
}

impl<T: Real> HadamardData<T> {
    /// Sorts the zeros by modulus; zeros at the origin belong in `p`.
    pub fn new(mut zeros: Vec<C<T>>, c: C<T>, kappa: T, p: usize) -> Result<Self> {
        if zeros.iter().any(|z| z.norm() == T::zero()) {
            return Err(Error::InvalidInput("zeros at the origin must be recorded through p".into()));
        }
        zeros.sort_by(modulus_order);
        Ok(Self { zeros, c, kappa, p })
    }

    pub fn zeros(&self) -> &[C<T>] {
        &self.zeros
    }

    /// Same data restricted to zeros with `|kₙ| ≤ r`.
    pub fn truncated(&self, r: T) -> Self {
        Self { zeros: self.zeros.iter().copied().filter(|z| z.norm() <= r).collect(), ..self.clone() }
    }

    pub fn eval(&self, k: C<T>) -> Result<HadamardValue<T>> {
        if self.zeros.is_empty() && self.p == 0 && self.c.norm() == T::zero() {
            return Err(Error::Degenerate("empty product with zero leading coefficient".into()));
        }
        let i = Complex::new(T::zero(), T::one());
        let mut v = self.c * k.powu(self.p as u32) * (i * k * self.kappa).exp();
        for z in &self.zeros {
            v = v * (C::new(T::one(), T::zero()) - k / z);
        }
        let partial = partial_reciprocal_sums(&self.zeros);
        let tail = match self.zeros.last() {
            Some(last) => {
                let r_max = last.norm();
                let total = partial.last().copied().unwrap_or(C::new(T::zero(), T::zero()));
                let start = r_max * lit(0.75);
                let spread = self
                    .zeros
                    .iter()
                    .zip(&partial)
                    .filter(|(z, _)| z.norm() >= start)
                    .map(|(_, s)| (total - s).norm())
                    .fold(T::zero(), T::max);
                spread * k.norm()
            }
            None => T::zero(),
        };
        Ok(HadamardValue { value: v, tail_estimate: tail })
    }
}

/// Running sums `Σ_{j≤n} 1/kⱼ` along a modulus-sorted list.
fn partial_reciprocal_sums<T: Real>(zeros: &[C<T>]) -> Vec<C<T>> {
    let mut acc = C::new(T::zero(), T::zero());
    zeros
        .iter()
        .map(|z| {
            acc = acc + z.inv();
            acc
        })
        .collect()
}

impl<T: Real> Analytic<T> for HadamardData<T> {
    fn gamma(&self) -> T {
        self.kappa
    }

    fn value_and_derivative(&self, k: C<T>) -> Result<(C<T>, C<T>)> {
        // Product rule, accumulated factor by factor so zeros of the product are harmless.
        let i = Complex::new(T::zero(), T::one());
        let e = (i * k * self.kappa).exp();
        let (mut v, mut d) = if self.p == 0 {
            (self.c * e, self.c * e * i * self.kappa)
        } else {
            let kp = k.powu(self.p as u32);
            let dkp = k.powu(self.p as u32 - 1) * from_usize::<T>(self.p);
            (self.c * kp * e, self.c * e * (dkp + kp * i * self.kappa))
        };
        for z in &self.zeros {
            let factor = C::new(T::one(), T::zero()) - k / z;
            d = d * factor - v / z;
            v = v * factor;
        }
        Ok((v, d))
    }
}

/// `n(r)`: number of entries (with repetition) of modulus at most `r`.
pub fn counting_function<T: Real>(zeros: &[C<T>], r: T) -> usize {
    zeros.iter().filter(|z| z.norm() <= r).count()
}

/// `count` geometric radii from `r_min` to `r_max` inclusive.
pub fn geometric_radii<T: Real>(r_min: T, r_max: T, count: usize) -> Vec<T> {
    if count < 2 {
        return vec![r_max];
    }
    let ratio = (r_max / r_min).ln() / from_usize(count - 1);
    (0..count).map(|j| r_min * (ratio * from_usize(j)).exp()).collect()
}

/// Least-squares line through `(r, n(r))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of `n(r)` from the fitted line.
    pub residual: f64,
}

/// Number of radii used by [`levinson_slope`].
pub const SLOPE_RADII: usize = 20;

/// Slope of `n(r)` over `[r_min, r_max]` sampled on a geometric grid; `2γ/π` for Jost functions.
pub fn levinson_slope<T: Real>(zeros: &[C<T>], r_min: T, r_max: T) -> Result<SlopeFit> {
    if !(r_min > T::zero() && r_max > r_min) {
        return Err(Error::Degenerate(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if zeros.is_empty() {
        return Ok(SlopeFit { slope: 0.0, intercept: 0.0, residual: 0.0 });
    }
    let radii = geometric_radii(r_min, r_max, SLOPE_RADII);
    let pts: Vec<(f64, f64)> = radii.iter().map(|&r| (to_f64(r), counting_function(zeros, r) as f64)).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Degenerate("fewer than two distinct radii".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SlopeFit { slope, intercept, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindelofReport {
    pub radii: Vec<f64>,
    /// `|Σ_{|kₙ|≤r} 1/kₙ|` at each radius.
    pub reciprocal_sums: Vec<f64>,
    pub max_reciprocal_sum: f64,
    /// `n(r)/r`.
    pub counting_ratio: Vec<f64>,
    /// `Σ_{|kₙ|≤r} |Im kₙ|/|kₙ|²`.
    pub imaginary_sums: Vec<f64>,
    pub flags: Vec<String>,
}

impl LindelofReport {
    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

/// Increment of a series over the last quarter of the grid compared with the first quarter;
/// sums that converge have shrinking increments on a geometric grid.
fn keeps_growing(values: &[C<f64>]) -> bool {
    let n = values.len();
    if n < 4 {
        return false;
    }
    let q = n / 4;
    let first = (values[q] - values[0]).norm();
    let last = (values[n - 1] - values[n - 1 - q]).norm();
    last > 1e-12 && last > 0.75 * first
}

/// Partial sums of `1/kₙ`, the ratio `n(r)/r` and partial sums of `|Im kₙ|/|kₙ|²` on `radii`,
/// with flags where the last quarter of the grid shows growth.
pub fn lindelof_check<T: Real>(zeros: &[C<T>], radii: &[T]) -> LindelofReport {
    let mut sorted = zeros.to_vec();
    sorted.sort_by(modulus_order);
    let mut recip = Vec::with_capacity(radii.len());
    let mut ratio = Vec::with_capacity(radii.len());
    let mut imag = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut s = Complex::new(0.0, 0.0);
        let mut im = 0.0;
        let mut count = 0usize;
        for z in sorted.iter().take_while(|z| z.norm() <= r) {
            let zf = Complex::new(to_f64(z.re), to_f64(z.im));
            s += zf.inv();
            im += zf.im.abs() / zf.norm_sqr();
            count += 1;
        }
        recip.push(s);
        imag.push(Complex::new(im, 0.0));
        ratio.push(if r > T::zero() { count as f64 / to_f64(r) } else { 0.0 });
    }
    let mut flags = Vec::new();
    if keeps_growing(&recip) {
        flags.push("partial sums of 1/k_n keep growing".to_string());
    }
    if keeps_growing(&imag) {
        flags.push("partial sums of |Im k_n|/|k_n|^2 keep growing".to_string());
    }
    let n = ratio.len();
    if n >= 4 {
        let q = n / 4;
        let first = ratio[..q].iter().sum::<f64>() / q as f64;
        let last = ratio[n - q..].iter().sum::<f64>() / q as f64;
        if last > 2.0 * first.max(1e-12) {
            flags.push("n(r)/r grows".to_string());
        }
    }
    let moduli: Vec<f64> = recip.iter().map(|s| s.norm()).collect();
    LindelofReport {
        radii: radii.iter().map(|r| to_f64(*r)).collect(),
        max_reciprocal_sum: moduli.iter().copied().fold(0.0, f64::max),
        reciprocal_sums: moduli,
        counting_ratio: ratio,
        imaginary_sums: imag.iter().map(|v| v.re).collect(),
        flags,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountCompareReport {
    /// `max |kₙ - kₙᵒ|` over the paired prefix.
    pub shift: f64,
    pub precondition_violations: Vec<String>,
    /// Radii at which `n_o(r - 2s) ≤ n(r) ≤ n_o(r + 2s)` fails.
    pub sandwich_violations: Vec<f64>,
}

impl CountCompareReport {
    pub fn passed(&self) -> bool {
        self.precondition_violations.is_empty() && self.sandwich_violations.is_empty()
    }
}

/// Checks the counting sandwich for zeros paired by index with their unperturbed partners.
pub fn perturbed_count_compare<T: Real>(zeros_o: &[C<T>], zeros: &[C<T>], s_bound: T) -> CountCompareReport {
    let mut pre = Vec::new();
    if zeros_o.len() != zeros.len() {
        pre.push(format!("lists differ in length ({} vs {}); comparing the common prefix", zeros_o.len(), zeros.len()));
    }
    let m = zeros_o.len().min(zeros.len());
    let (a, b) = (&zeros_o[..m], &zeros[..m]);
    let mut s = T::zero();
    for (j, (x, y)) in a.iter().zip(b).enumerate() {
        let d = (*x - *y).norm();
        if d > s_bound {
            pre.push(format!("pair {j}: |k - k_o| = {d:.4e} exceeds the bound {s_bound}"));
        }
        s = s.max(d);
    }
    let mut violations = Vec::new();
    if m > 0 {
        let r_lo = a.iter().chain(b).map(|z| z.norm()).fold(T::infinity(), T::min).max(lit(1e-3));
        let r_hi = a.iter().chain(b).map(|z| z.norm()).fold(T::zero(), T::max) * lit(1.1);
        let two_s = s * lit(2.0);
        for r in geometric_radii(r_lo * lit(0.5), r_hi, 200) {
            let n = counting_function(b, r);
            let lo = if r - two_s >= T::zero() { counting_function(a, r - two_s) } else { 0 };
            let hi = counting_function(a, r + two_s);
            if n < lo || n > hi {
                violations.push(to_f64(r));
            }
        }
    }
    CountCompareReport { shift: to_f64(s), precondition_violations: pre, sandwich_violations: violations }
}

/// CSV rows `r,n(r),n(r)·π/(2γr)` for plotting.
pub fn counting_csv<T: Real>(zeros: &[C<T>], gamma: T, radii: &[T]) -> String {
    let mut out = String::from("r,n_r,normalized\n");
    for &r in radii {
        let n = counting_function(zeros, r);
        let norm = if r > T::zero() { n as f64 * std::f64::consts::PI / (2.0 * to_f64(gamma) * to_f64(r)) } else { 0.0 };
        let _ = writeln!(out, "{},{},{}", to_f64(r), n, norm);
    }
    out
}
