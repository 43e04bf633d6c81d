//! Compactly supported potentials sampled as cell values on `[0, γ]`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, is_finite_c, lit, Real, C};

/// Width of the right-end window, in cells, used by the effective-support test.
pub const SUPPORT_WINDOW_CELLS: usize = 4;
/// Minimum fraction of the L² norm that must sit in the right-end window.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Piecewise-constant complex potential on `[0, γ]`.
///
/// Cell `j` covers `[j·step, (j+1)·step)` with `step = γ / n_cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    gamma: T,
    samples: Vec<C<T>>,
}

impl<T: Real> Potential<T> {
    pub fn new(gamma: T, samples: Vec<C<T>>) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("support length must be positive, got {gamma}")));
        }
        if samples.is_empty() {
            return Err(Error::InvalidInput("potential needs at least one cell".into()));
        }
        Ok(Self { gamma, samples })
    }

    /// Samples `f` at the cell midpoints.
    pub fn from_fn(gamma: T, n_cells: usize, f: impl Fn(T) -> C<T>) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidInput("potential needs at least one cell".into()));
        }
        let h = gamma / from_usize(n_cells);
        let samples = (0..n_cells)
            .map(|j| f((from_usize::<T>(j) + lit(0.5)) * h))
            .collect();
        Self::new(gamma, samples)
    }

    pub fn constant(gamma: T, n_cells: usize, value: C<T>) -> Result<Self> {
        Self::from_fn(gamma, n_cells, |_| value)
    }

    pub fn zero(gamma: T, n_cells: usize) -> Result<Self> {
        Self::constant(gamma, n_cells, C::new(T::zero(), T::zero()))
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn step(&self) -> T {
        self.gamma / from_usize(self.samples.len())
    }

    pub fn n_cells(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C<T>> {
        self.samples
    }

    pub fn midpoint(&self, j: usize) -> T {
        (from_usize::<T>(j) + lit(0.5)) * self.step()
    }

    pub fn l2_norm(&self) -> T {
        l2_norm(&self.samples, self.step())
    }

    /// L²(0,γ) distance.
    pub fn metric(&self, other: &Self) -> Result<T> {
        check_same_domain(self.gamma, other.gamma)?;
        if self.n_cells() != other.n_cells() {
            return Err(Error::IncompatibleGrid(format!(
                "{} vs {} cells; resample one side explicitly",
                self.n_cells(),
                other.n_cells()
            )));
        }
        Ok(l2_distance(&self.samples, &other.samples, self.step()))
    }

    /// Exact cell-average resampling of the piecewise-constant function.
    pub fn resample(&self, n_cells: usize) -> Result<Self> {
        let samples = resample_cells(&self.samples, n_cells)?;
        Self::new(self.gamma, samples)
    }

    /// Pointwise map of the samples, keeping the grid.
    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { gamma: self.gamma, samples: self.samples.iter().map(|&q| f(q)).collect() }
    }

    pub fn validate_membership(&self) -> MembershipReport {
        membership(&self.samples, self.step())
    }
}

pub(crate) fn check_same_domain<T: Real>(a: T, b: T) -> Result<()> {
    if (a - b).abs() > lit::<T>(1e-12) * a.abs().max(b.abs()) {
        return Err(Error::IncompatibleDomain(format!("gamma {a} vs {b}")));
    }
    Ok(())
}

pub(crate) fn l2_norm<T: Real>(samples: &[C<T>], step: T) -> T {
    (samples.iter().map(|z| z.norm_sqr()).sum::<T>() * step).sqrt()
}

pub(crate) fn l2_distance<T: Real>(a: &[C<T>], b: &[C<T>], step: T) -> T {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<T>() * step).sqrt()
}

/// Cell averages of a piecewise-constant function on a new uniform grid over the same interval.
pub(crate) fn resample_cells<T: Real>(samples: &[C<T>], n_new: usize) -> Result<Vec<C<T>>> {
    if n_new == 0 {
        return Err(Error::InvalidInput("cannot resample to zero cells".into()));
    }
    let n_old = samples.len();
    if n_old == n_new {
        return Ok(samples.to_vec());
    }
    // Work in units where the interval is [0, n_old * n_new].
    let mut out = Vec::with_capacity(n_new);
    for i in 0..n_new {
        let (a, b) = (i * n_old, (i + 1) * n_old);
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut j = a / n_new;
        while j < n_old && j * n_new < b {
            let lo = a.max(j * n_new);
            let hi = b.min((j + 1) * n_new);
            acc = acc + samples[j] * from_usize::<T>(hi - lo);
            j += 1;
        }
        out.push(acc / from_usize::<T>(n_old));
    }
    Ok(out)
}

/// Outcome of the class-membership checks for a sampled profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub finite: bool,
    pub nonzero_norm: bool,
    pub support_reaches_end: bool,
    pub norm: f64,
    /// L² mass in the right-end window divided by the total L² norm.
    pub tail_ratio: f64,
    pub failures: Vec<String>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) fn membership<T: Real>(samples: &[C<T>], step: T) -> MembershipReport {
    let finite = samples.iter().all(|&z| is_finite_c(z));
    let norm = l2_norm(samples, step);
    let nonzero_norm = finite && norm > T::zero();
    let window = SUPPORT_WINDOW_CELLS.min(samples.len());
    let tail = l2_norm(&samples[samples.len() - window..], step);
    let tail_ratio = if nonzero_norm { tail / norm } else { T::zero() };
    let support_reaches_end = nonzero_norm && tail_ratio > lit(SUPPORT_TOL);

    let mut failures = Vec::new();
    if !finite {
        failures.push("non-finite samples".to_string());
    }
    if !nonzero_norm {
        failures.push("zero L2 norm".to_string());
    }
    if !support_reaches_end {
        failures.push(format!(
            "effective support ends before gamma (tail ratio {:.3e} <= {:.1e})",
            crate::scalar::to_f64(tail_ratio),
            SUPPORT_TOL
        ));
    }
    MembershipReport {
        finite,
        nonzero_norm,
        support_reaches_end,
        norm: crate::scalar::to_f64(norm),
        tail_ratio: crate::scalar::to_f64(tail_ratio),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn metric_identity_and_unit_constant() {
        let one = Potential::constant(1.0, 50, c(1.0, 0.0)).unwrap();
        let zero = Potential::zero(1.0, 50).unwrap();
        assert_eq!(one.metric(&one).unwrap(), 0.0);
        assert!((one.metric(&zero).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn metric_of_linear_ramp() {
        let ramp = Potential::from_fn(1.0, 2000, |x| c(x, 0.0)).unwrap();
        let zero = Potential::zero(1.0, 2000).unwrap();
        let d = ramp.metric(&zero).unwrap();
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn metric_rejects_mixed_gamma() {
        let a = Potential::zero(1.0, 10).unwrap();
        let b = Potential::zero(2.0, 10).unwrap();
        assert!(matches!(a.metric(&b), Err(Error::IncompatibleDomain(_))));
        let c10 = Potential::zero(1.0, 12).unwrap();
        assert!(matches!(a.metric(&c10), Err(Error::IncompatibleGrid(_))));
    }

    #[test]
    fn membership_cases() {
        assert!(Potential::constant(1.0, 64, c(1.0, 0.0)).unwrap().validate_membership().passed());

        let zero = Potential::zero(1.0, 64).unwrap().validate_membership();
        assert!(!zero.nonzero_norm && !zero.support_reaches_end);

        let half = Potential::from_fn(1.0, 64, |x| if x < 0.5 { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .unwrap()
            .validate_membership();
        assert!(half.nonzero_norm && !half.support_reaches_end);
        assert_eq!(half.failures.len(), 1);

        let nan = Potential::constant(1.0, 8, c(f64::NAN, 0.0)).unwrap().validate_membership();
        assert!(!nan.finite);
    }

    #[test]
    fn resample_preserves_integral() {
        let q = Potential::from_fn(1.0, 7, |x| c(x * x, -x)).unwrap();
        let r = q.resample(5).unwrap();
        let integral = |p: &Potential<f64>| p.samples().iter().fold(c(0.0, 0.0), |a, &z| a + z) * p.step();
        assert!((integral(&q) - integral(&r)).norm() < 1e-14);
        let back = Potential::constant(1.0, 3, c(2.0, 1.0)).unwrap().resample(12).unwrap();
        assert!(back.samples().iter().all(|&z| (z - c(2.0, 1.0)).norm() < 1e-14));
    }

    #[test]
    fn single_precision_metric() {
        let a = Potential::<f32>::constant(1.0, 16, Complex::new(1.0, 0.0)).unwrap();
        let b = Potential::<f32>::zero(1.0, 16).unwrap();
        assert!((a.metric(&b).unwrap() - 1.0).abs() < 1e-6);
    }

    fn samples(n: usize) -> impl Strategy<Value = Vec<C<f64>>> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b)), n)
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in samples(16), b in samples(16), d in samples(16)) {
            let (pa, pb, pd) = (
                Potential::new(1.5, a).unwrap(),
                Potential::new(1.5, b).unwrap(),
                Potential::new(1.5, d).unwrap(),
            );
            let lhs = pa.metric(&pd).unwrap();
            let rhs = pa.metric(&pb).unwrap() + pb.metric(&pd).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
        }

        #[test]
        fn unimodular_phase_invariance(a in samples(16), b in samples(16), theta in 0.0..6.3f64) {
            let phase = C::from_polar(1.0, theta);
            let pa = Potential::new(1.0, a).unwrap();
            let pb = Potential::new(1.0, b).unwrap();
            let d0 = pa.metric(&pb).unwrap();
            let d1 = pa.map(|z| z * phase).metric(&pb.map(|z| z * phase)).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
        }
    }
}
