//! Relocating finitely many zeros of a Jost function.
//!
//! The multiplier route multiplies `ψ_o` by `Π (1 + ρₙ/(kₙᵒ - k))` on the real grid. The
//! log-exp route builds `F = Σ log(1 + ρₙ/(kₙᵒ - k))` in the Wiener algebra and uses `e^F`
//! instead. Both transform only the change `ψ - ψ_o` and add it to the source profile, so the
//! discretization error of the source profile itself never enters the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::TransformOptions;
use crate::jost::{JostFunction, VerifyOptions};
use crate::resonance::{growth, ResonanceList};
use crate::scalar::{is_finite_c, lit, to_f64, Real, C};
use crate::transform;
use crate::wiener::{self, WienerElement, LOG_BOUND_CONSTANT};

/// One relocation `k_old → k_old + rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPair<T> {
    pub k_old: C<T>,
    pub rho: C<T>,
}

impl<T: Real> ShiftPair<T> {
    pub fn k_new(&self) -> C<T> {
        self.k_old + self.rho
    }

    /// `|ρ| |Im k|^{-1/2} (1 + |Im k|^{-1/2})`, the algebra norm of the atom minus one.
    pub fn atom_norm(&self) -> T {
        let r = (-self.k_old.im).sqrt().recip();
        self.rho.norm() * r * (T::one() + r)
    }
}

/// Finite list of shifts; zeros not listed stay where they are.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftSet<T> {
    pub pairs: Vec<ShiftPair<T>>,
    /// `ℓ¹` mass of shifts the caller truncated away, if known.
    pub declared_tail_l1: Option<T>,
}

impl<T: Real> ShiftSet<T> {
    pub fn new(pairs: Vec<(C<T>, C<T>)>) -> Self {
        Self { pairs: pairs.into_iter().map(|(k_old, rho)| ShiftPair { k_old, rho }).collect(), declared_tail_l1: None }
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new(), declared_tail_l1: None }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn l1_norm(&self) -> T {
        self.pairs.iter().map(|p| p.rho.norm()).fold(T::zero(), |a, b| a + b)
    }

    /// `max |Im k_old|^{-1/2} (1 + |Im k_old|^{-1/2})`, zero for an empty set.
    pub fn c1(&self) -> T {
        self.pairs
            .iter()
            .map(|p| {
                let r = (-p.k_old.im).sqrt().recip();
                r * (T::one() + r)
            })
            .fold(T::zero(), T::max)
    }

    /// Every `ρₙ` multiplied by `t`.
    pub fn scaled(&self, t: T) -> Self {
        Self {
            pairs: self.pairs.iter().map(|p| ShiftPair { k_old: p.k_old, rho: p.rho * t }).collect(),
            declared_tail_l1: self.declared_tail_l1.map(|m| m * t),
        }
    }

    fn multiplier(&self, k: C<T>) -> C<T> {
        self.pairs
            .iter()
            .fold(C::new(T::one(), T::zero()), |acc, p| acc * (C::new(T::one(), T::zero()) + p.rho / (p.k_old - k)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub l1_norm: f64,
    pub c1: f64,
    /// `|ψ_o(k_old)| / e^{2γ|Im k_old|}` per pair.
    pub scaled_residuals: Vec<f64>,
}

/// Relative threshold for "`k_old` is a zero of `ψ_o`".
pub const MATCH_TOL: f64 = 1e-4;

/// Checks that every `k_old` is a zero of `f_o` and every shifted zero stays in `ℂ₋`.
pub fn validate_shifts<T: Real>(f_o: &JostFunction<T>, s: &ShiftSet<T>) -> Result<ShiftReport> {
    let gamma = f_o.gamma();
    let mut residuals = Vec::with_capacity(s.pairs.len());
    for (j, p) in s.pairs.iter().enumerate() {
        if !is_finite_c(p.k_old) || !is_finite_c(p.rho) {
            return Err(Error::InvalidInput(format!("pair {j} has non-finite entries")));
        }
        if !(p.k_old.im < T::zero()) {
            return Err(Error::ShiftRejected(format!("pair {j}: k_old = {} is not in the open lower half-plane", p.k_old)));
        }
        if !(p.k_new().im < T::zero()) {
            return Err(Error::ShiftRejected(format!(
                "pair {j}: k_old = {} moved by rho = {} lands at {}, outside the open lower half-plane",
                p.k_old,
                p.rho,
                p.k_new()
            )));
        }
        let r = f_o.eval(p.k_old)?.norm() / growth(gamma, p.k_old);
        if !(r < lit(MATCH_TOL)) {
            return Err(Error::ShiftMismatch(format!("pair {j}: |psi(k_old)| = {:.3e} (scaled) at k_old = {}", r, p.k_old)));
        }
        residuals.push(to_f64(r));
    }
    Ok(ShiftReport { l1_norm: to_f64(s.l1_norm()), c1: to_f64(s.c1()), scaled_residuals: residuals })
}

/// Settings shared by both construction routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbOptions<T> {
    pub transform: TransformOptions<T>,
    pub verify: VerifyOptions,
    /// Profile step of the Wiener-algebra elements in the log-exp route.
    pub algebra_step: T,
}

impl<T: Real> Default for PerturbOptions<T> {
    fn default() -> Self {
        Self { transform: TransformOptions::default(), verify: VerifyOptions::default(), algebra_step: lit(wiener::DEFAULT_STEP) }
    }
}

/// `g_o + ℱ⁻¹[ψ_o·(m - 1)]` on the source grid, certified as a Jost function.
fn apply_multiplier<T: Real>(
    f_o: &JostFunction<T>,
    opts: &PerturbOptions<T>,
    multiplier: impl Fn(C<T>) -> C<T> + Sync,
) -> Result<JostFunction<T>> {
    let grid = opts.transform.grid()?;
    let diff: Vec<C<T>> = (0..grid.n)
        .into_par_iter()
        .map(|m| {
            let k = C::new(grid.point(m), T::zero());
            Ok(f_o.eval(k)? * (multiplier(k) - T::one()))
        })
        .collect::<Result<_>>()?;
    let prof = transform::invert_interval(&grid, &diff, T::zero(), f_o.gamma(), f_o.n_cells(), opts.transform.edge_orders)?;
    if !(prof.leakage <= opts.transform.leak_tol) {
        return Err(Error::Resolution(format!(
            "leakage {:.3e} of the profile change exceeds {:.1e}",
            prof.leakage, opts.transform.leak_tol
        )));
    }
    let g: Vec<C<T>> = f_o.g_samples().iter().zip(&prof.samples).map(|(a, b)| a + b).collect();
    let mut f = JostFunction::new(f_o.gamma(), g, f_o.leakage().max(prof.leakage))?;
    let rep = f.certify(&opts.verify)?;
    if !rep.passed() {
        return Err(Error::Construction(format!("perturbed function is not a Jost function: {}", rep.failures.join("; "))));
    }
    Ok(f)
}

/// Multiplier route; canonical output for downstream use.
pub fn perturb_multiplier<T: Real>(f_o: &JostFunction<T>, s: &ShiftSet<T>, opts: &PerturbOptions<T>) -> Result<JostFunction<T>> {
    validate_shifts(f_o, s)?;
    if s.is_empty() {
        return Ok(f_o.clone());
    }
    apply_multiplier(f_o, opts, |k| s.multiplier(k))
}

/// Output of the log-exp route.
#[derive(Debug, Clone, PartialEq)]
pub struct LogExpResult<T> {
    pub jost: JostFunction<T>,
    /// Algebra norm of `F` built from the small shifts.
    pub f_norm: T,
    /// `2.78·C₁·Σ|ρₙ|` over the small shifts, plus the same constant times any declared tail.
    pub bound: T,
    pub bound_ok: bool,
    /// Pairs whose atom norm reached `1/4` and were applied as plain factors.
    pub split_off: usize,
}

/// Log-exp route: small shifts through `exp(Σ atom_log)`, large ones as rational factors.
pub fn perturb_logexp<T: Real>(f_o: &JostFunction<T>, s: &ShiftSet<T>, opts: &PerturbOptions<T>) -> Result<LogExpResult<T>> {
    validate_shifts(f_o, s)?;
    let (small, large): (Vec<ShiftPair<T>>, Vec<ShiftPair<T>>) = s.pairs.iter().partition(|p| p.atom_norm() < lit(0.25));
    let small_set = ShiftSet { pairs: small, declared_tail_l1: s.declared_tail_l1 };
    let large_set = ShiftSet { pairs: large, declared_tail_l1: None };
    let bound = lit::<T>(LOG_BOUND_CONSTANT) * small_set.c1() * (small_set.l1_norm() + s.declared_tail_l1.unwrap_or(T::zero()));
    if s.is_empty() {
        return Ok(LogExpResult { jost: f_o.clone(), f_norm: T::zero(), bound, bound_ok: true, split_off: 0 });
    }

    let step = opts.algebra_step;
    let mut logs = Vec::with_capacity(small_set.pairs.len());
    for p in &small_set.pairs {
        logs.push(wiener::atom_log_with(p.k_old, p.rho, step, lit(wiener::DEFAULT_TAIL_TOL))?);
    }
    let len = logs.iter().map(|w| w.samples().len()).max().unwrap_or(0);
    let mut big_f = WienerElement::zero(step).with_len(len);
    for w in &logs {
        big_f = big_f.add(&w.with_len(len))?;
    }
    let f_norm = big_f.norm();
    let e = wiener::exp_element(&big_f)?;
    let jost = apply_multiplier(f_o, opts, |k| e.eval(k) * large_set.multiplier(k))?;
    Ok(LogExpResult { jost, f_norm, bound, bound_ok: f_norm <= bound, split_off: large_set.pairs.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub t: f64,
    pub l1_norm: f64,
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `ρ_𝒥(f_t, f_o)` for the shift set scaled by each `t`; invalid scales are skipped with a note.
pub fn stability_curve<T: Real>(
    f_o: &JostFunction<T>,
    s: &ShiftSet<T>,
    scales: &[T],
    opts: &PerturbOptions<T>,
) -> Vec<StabilityPoint> {
    scales
        .iter()
        .map(|&t| {
            let st = s.scaled(t);
            let l1 = to_f64(st.l1_norm());
            let res = if t < T::zero() || t > T::one() {
                Err(Error::InvalidInput(format!("scale {t} outside [0, 1]")))
            } else {
                perturb_multiplier(f_o, &st, opts).and_then(|f| f.metric(f_o))
            };
            match res {
                Ok(d) => StabilityPoint { t: to_f64(t), l1_norm: l1, distance: Some(to_f64(d)), note: None },
                Err(e) => StabilityPoint { t: to_f64(t), l1_norm: l1, distance: None, note: Some(e.to_string()) },
            }
        })
        .collect()
}

/// How far the zeros of a perturbed function are from where the shift set puts them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelocationReport {
    /// `max |k - (k_old + rho)|` over shifted zeros.
    pub moved_error: f64,
    /// `max |k - k_o|` over zeros that were not shifted.
    pub kept_error: f64,
    /// Expected zeros with no counterpart in the perturbed list.
    pub missing: Vec<[f64; 2]>,
}

impl RelocationReport {
    pub fn within(&self, tol: f64) -> bool {
        self.missing.is_empty() && self.moved_error <= tol && self.kept_error <= tol
    }
}

/// Compares zeros found before and after a perturbation with the shift set. Only zeros inside
/// the region of `after` are checked.
pub fn relocation_report<T: Real>(before: &ResonanceList<T>, after: &ResonanceList<T>, s: &ShiftSet<T>) -> RelocationReport {
    let mut expected: Vec<(C<T>, bool)> = Vec::new();
    let mut shifted_from: Vec<C<T>> = Vec::new();
    for p in &s.pairs {
        expected.push((p.k_new(), true));
        shifted_from.push(p.k_old);
    }
    for z in before.zeros() {
        let consumed = shifted_from.iter().position(|k| (*k - z).norm() < lit::<T>(1e-6) * (T::one() + z.norm()));
        match consumed {
            Some(j) => {
                shifted_from.swap_remove(j);
            }
            None => expected.push((z, false)),
        }
    }
    let mut available = after.zeros();
    let (mut moved, mut kept) = (0.0f64, 0.0f64);
    let mut missing = Vec::new();
    for (z, is_moved) in expected {
        if !after.region.contains(z) {
            continue;
        }
        let best = available
            .iter()
            .enumerate()
            .map(|(j, a)| (j, to_f64((*a - z).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, d)) => {
                available.swap_remove(j);
                if is_moved {
                    moved = moved.max(d);
                } else {
                    kept = kept.max(d);
                }
            }
            None => missing.push([to_f64(z.re), to_f64(z.im)]),
        }
    }
    RelocationReport { moved_error: moved, kept_error: kept, missing }
}
