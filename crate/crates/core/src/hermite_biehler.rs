//! Dirac-type Hermite–Biehler functions `E(k) = -i e^{-iγk} ψ(k)`, stored through `ψ`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::JostFunction;
use crate::perturbation::{perturb_multiplier, PerturbOptions, ShiftSet};
use crate::resonance::Analytic;
use crate::scalar::{lit, to_f64, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteBiehler<T> {
    jost: JostFunction<T>,
}

impl<T: Real> HermiteBiehler<T> {
    /// Requires a Jost function that passed verification.
    pub fn from_jost(f: JostFunction<T>) -> Result<Self> {
        if !f.is_verified() {
            return Err(Error::Domain("Hermite-Biehler conversion needs a verified Jost function".into()));
        }
        Ok(Self { jost: f })
    }

    /// Wraps `f` without checking it, e.g. for `ψ ≡ 1`, which has no support at `γ`.
    pub fn from_jost_unchecked(f: JostFunction<T>) -> Self {
        Self { jost: f }
    }

    pub fn jost(&self) -> &JostFunction<T> {
        &self.jost
    }

    pub fn into_jost(self) -> JostFunction<T> {
        self.jost
    }

    pub fn gamma(&self) -> T {
        self.jost.gamma()
    }

    fn prefactor(&self, k: C<T>) -> C<T> {
        let i = Complex::new(T::zero(), T::one());
        -i * (-i * self.gamma() * k).exp()
    }

    pub fn eval(&self, k: C<T>) -> Result<C<T>> {
        Ok(self.prefactor(k) * self.jost.eval(k)?)
    }
}

impl<T: Real> Analytic<T> for HermiteBiehler<T> {
    fn gamma(&self) -> T {
        self.jost.gamma()
    }

    fn value_and_derivative(&self, k: C<T>) -> Result<(C<T>, C<T>)> {
        let (v, d) = self.jost.eval_with_derivative(k)?;
        let p = self.prefactor(k);
        let i = Complex::new(T::zero(), T::one());
        Ok((p * v, p * (d - i * self.gamma() * v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HbReport {
    pub samples: usize,
    /// Smallest `|E(z)| - |E(z̄)|` over the samples.
    pub min_gap: f64,
    /// Points where `|E(z)| ≤ |E(z̄)|`.
    pub violations: Vec<[f64; 2]>,
}

impl HbReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|E(z)| > |E(z̄)|` at `n_random` seeded points with `|z| ≤ 40/γ`, `Im z ∈ (0, 10]`,
/// and at `n_near` points with `Im z = 10⁻³`.
pub fn hb_inequality_check<T: Real>(e: &HermiteBiehler<T>, n_random: usize, n_near: usize, seed: u64) -> Result<HbReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 40.0 / to_f64(e.gamma());
    let mut points = Vec::with_capacity(n_random + n_near);
    while points.len() < n_random {
        let im: f64 = rng.gen_range(1e-6..=10.0f64.min(radius));
        let re_max = (radius * radius - im * im).max(0.0).sqrt();
        let re = rng.gen_range(-re_max..=re_max);
        points.push((re, im));
    }
    for j in 0..n_near {
        let t = if n_near > 1 { j as f64 / (n_near - 1) as f64 } else { 0.5 };
        points.push((-radius + 2.0 * radius * t, 1e-3));
    }
    let mut min_gap = f64::INFINITY;
    let mut violations = Vec::new();
    for (re, im) in points.iter().copied() {
        let z = C::new(lit::<T>(re), lit::<T>(im));
        let gap = to_f64(e.eval(z)?.norm()) - to_f64(e.eval(z.conj())?.norm());
        min_gap = min_gap.min(gap);
        if !(gap > 0.0) {
            violations.push([re, im]);
        }
    }
    Ok(HbReport { samples: points.len(), min_gap, violations })
}

/// `‖ℱ⁻¹(E₁ - E₂)‖_{L²(-γ/2, γ/2)}`. The modulation `e^{-iγk}` shifts the transform variable by
/// `γ/2`, so this equals the profile distance of the underlying Jost functions.
pub fn hb_distance<T: Real>(e1: &HermiteBiehler<T>, e2: &HermiteBiehler<T>) -> Result<T> {
    e1.jost.metric(&e2.jost)
}

/// Moves the zeros of `E` by the shift set (through the multiplier route on `ψ`).
pub fn perturb_hb<T: Real>(e_o: &HermiteBiehler<T>, s: &ShiftSet<T>, opts: &PerturbOptions<T>) -> Result<HermiteBiehler<T>> {
    if s.is_empty() {
        return Ok(e_o.clone());
    }
    HermiteBiehler::from_jost(perturb_multiplier(&e_o.jost, s, opts)?)
}
