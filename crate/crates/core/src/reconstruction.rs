//! Recovering a potential from its Jost function by damped Gauss–Newton on the forward map.
//!
//! The misfit is measured in profile space: for a trial `q` the model profile is obtained from
//! `ψ(·, q)` on the real grid with the same inverse transform that produced the target, and
//! `R(q) = ‖g(q) - g_target‖²_{L²(0,γ)}`. A target made by the forward map with the same
//! transform settings is therefore an exact fixed point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{cell_propagator_dq, mat_vec, vec_mat, Mat2, TransformOptions};
use crate::jost::{JostFunction, VerifyOptions};
use crate::perturbation::{perturb_multiplier, PerturbOptions, ShiftPair, ShiftSet};
use crate::potential::{MembershipReport, Potential};
use crate::resonance::{find_resonances, FinderOptions, Rect};
use crate::scalar::{is_finite_c, lit, to_f64, Real, C};
use crate::transform::{self, FrequencyGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum Init<T> {
    Born,
    Zero,
    Supplied(Potential<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionOptions<T> {
    pub max_iters: usize,
    /// Initial Levenberg–Marquardt parameter, relative to the mean diagonal of `JᵀJ`.
    pub damping: T,
    /// Stop once `R(q)` falls below this.
    pub tol_residual: T,
    /// Stop once an accepted step is shorter than this in `L²(0,γ)`.
    pub tol_step: T,
    pub init: Init<T>,
    /// Cells of the recovered potential; `None` uses the target's profile grid.
    pub n_cells: Option<usize>,
    pub transform: TransformOptions<T>,
}

impl<T: Real> Default for ReconstructionOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 30,
            damping: lit(1e-3),
            tol_residual: lit(1e-24),
            tol_step: lit(1e-8),
            init: Init::Born,
            n_cells: None,
            transform: TransformOptions::default(),
        }
    }
}

const DAMPING_FLOOR: f64 = 1e-12;
const MAX_REJECTIONS: usize = 12;

impl<T: Real> ReconstructionOptions<T> {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if !(self.tol_residual > T::zero()) || !(self.tol_step > T::zero()) || !(self.damping >= T::zero()) {
            return Err(Error::InvalidInput("tolerances must be positive and damping nonnegative".into()));
        }
        Ok(())
    }
}

/// First-order inverse: `ψ ≈ 1 + ∫ q̄(t) e^{2izt} dt`, so `q₀ = ḡ`.
pub fn born_init<T: Real>(f: &JostFunction<T>) -> Result<Potential<T>> {
    Potential::new(f.gamma(), f.g_samples().iter().map(|v| v.conj()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub converged: bool,
    pub iterations: usize,
    /// `R(q)` at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    pub final_step: f64,
    pub stop_reason: String,
    pub membership: MembershipReport,
}

/// `ψ(k, q)` and `∂ψ/∂Re qⱼ`, `∂ψ/∂Im qⱼ` for every cell, from prefix rows `[1, -1]·P₀⋯Pⱼ₋₁`
/// and suffix columns `Pⱼ₊₁⋯Pₙ₋₁·(e^{ikγ}, 0)ᵀ`.
fn psi_and_gradient<T: Real>(q: &Potential<T>, k: C<T>) -> (C<T>, Vec<C<T>>, Vec<C<T>>) {
    let n = q.n_cells();
    let h = q.step();
    let mats: Vec<(Mat2<T>, Mat2<T>, Mat2<T>)> = q.samples().iter().map(|&qj| cell_propagator_dq(qj, k, h)).collect();
    let zero = C::new(T::zero(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let mut suffix = vec![[zero, zero]; n + 1];
    suffix[n] = [(i * k * q.gamma()).exp(), zero];
    for j in (0..n).rev() {
        suffix[j] = mat_vec(&mats[j].0, suffix[j + 1]);
    }
    let mut row = [C::new(T::one(), T::zero()), -C::new(T::one(), T::zero())];
    let mut d_re = Vec::with_capacity(n);
    let mut d_im = Vec::with_capacity(n);
    for j in 0..n {
        let a = mat_vec(&mats[j].1, suffix[j + 1]);
        let b = mat_vec(&mats[j].2, suffix[j + 1]);
        d_re.push(row[0] * a[0] + row[1] * a[1]);
        d_im.push(row[0] * b[0] + row[1] * b[1]);
        row = vec_mat(row, &mats[j].0);
    }
    (suffix[0][0] - suffix[0][1], d_re, d_im)
}

/// Largest relative deviation between the analytic sensitivities and central differences with
/// step `eps`, over the given frequencies and cells.
pub fn jacobian_check<T: Real>(q: &Potential<T>, ks: &[T], cells: &[usize], eps: T) -> Result<T> {
    let mut worst = T::zero();
    for &k in ks {
        let z = C::new(k, T::zero());
        let (_, d_re, d_im) = psi_and_gradient(q, z);
        for &j in cells {
            if j >= q.n_cells() {
                return Err(Error::InvalidInput(format!("cell {j} out of range")));
            }
            for (dir, analytic) in [(C::new(T::one(), T::zero()), d_re[j]), (C::new(T::zero(), T::one()), d_im[j])] {
                let mut plus = q.samples().to_vec();
                let mut minus = plus.clone();
                plus[j] = plus[j] + dir * eps;
                minus[j] = minus[j] - dir * eps;
                let fp = psi_and_gradient(&Potential::new(q.gamma(), plus)?, z).0;
                let fm = psi_and_gradient(&Potential::new(q.gamma(), minus)?, z).0;
                let fd = (fp - fm) / (eps * lit(2.0));
                let rel = (fd - analytic).norm() / analytic.norm().max(lit(1e-30));
                worst = worst.max(rel);
            }
        }
    }
    Ok(worst)
}

struct Model<'a, T: Real> {
    grid: FrequencyGrid<T>,
    target: &'a JostFunction<T>,
    orders: usize,
}

impl<T: Real> Model<'_, T> {
    fn invert(&self, values: &[C<T>]) -> Result<Vec<C<T>>> {
        let t = self.target;
        Ok(transform::invert_interval(&self.grid, values, T::zero(), t.gamma(), t.n_cells(), self.orders)?.samples)
    }

    /// Weighted residual `√h·(g(q) - g_target)`.
    fn residual(&self, q: &Potential<T>) -> Result<Vec<C<T>>> {
        let values: Vec<C<T>> = (0..self.grid.n)
            .into_par_iter()
            .map(|m| psi_value(q, C::new(self.grid.point(m), T::zero())) - T::one())
            .collect();
        let g = self.invert(&values)?;
        let w = self.target.step().sqrt();
        let r: Vec<C<T>> = g.iter().zip(self.target.g_samples()).map(|(a, b)| (a - b) * w).collect();
        if r.iter().any(|v| !is_finite_c(*v)) {
            return Err(Error::Overflow { cell: 0, z: "profile residual".into() });
        }
        Ok(r)
    }

    /// Real Jacobian of the stacked `(Re r, Im r)` with respect to `(Re q, Im q)`.
    fn jacobian(&self, q: &Potential<T>) -> Result<DMatrix<f64>> {
        let n = q.n_cells();
        let rows: Vec<(Vec<C<T>>, Vec<C<T>>)> = (0..self.grid.n)
            .into_par_iter()
            .map(|m| {
                let (_, a, b) = psi_and_gradient(q, C::new(self.grid.point(m), T::zero()));
                (a, b)
            })
            .collect();
        let w = to_f64(self.target.step().sqrt());
        let n_prof = self.target.n_cells();
        let cols: Vec<Vec<C<T>>> = (0..2 * n)
            .into_par_iter()
            .map(|c| {
                let column: Vec<C<T>> = rows.iter().map(|(a, b)| if c < n { a[c] } else { b[c - n] }).collect();
                self.invert(&column)
            })
            .collect::<Result<_>>()?;
        let mut jac = DMatrix::<f64>::zeros(2 * n_prof, 2 * n);
        for (c, col) in cols.iter().enumerate() {
            for (p, v) in col.iter().enumerate() {
                jac[(p, c)] = to_f64(v.re) * w;
                jac[(n_prof + p, c)] = to_f64(v.im) * w;
            }
        }
        Ok(jac)
    }
}

fn psi_value<T: Real>(q: &Potential<T>, k: C<T>) -> C<T> {
    crate::forward::jost_function(q, k).unwrap_or(C::new(T::nan(), T::nan()))
}

fn stack<T: Real>(r: &[C<T>]) -> DVector<f64> {
    let n = r.len();
    DVector::from_iterator(2 * n, r.iter().map(|v| to_f64(v.re)).chain(r.iter().map(|v| to_f64(v.im))))
}

fn sum_sq<T: Real>(r: &[C<T>]) -> f64 {
    r.iter().map(|v| to_f64(v.norm_sqr())).sum()
}

/// Minimizes `R(q)` by Levenberg–Marquardt. Non-convergence is reported, not raised.
pub fn reconstruct<T: Real>(
    f_target: &JostFunction<T>,
    opts: &ReconstructionOptions<T>,
) -> Result<(Potential<T>, ReconstructionReport)> {
    opts.validate()?;
    if !f_target.is_verified() {
        return Err(Error::Domain("reconstruction target must be a verified Jost function".into()));
    }
    let n = opts.n_cells.unwrap_or(f_target.n_cells());
    let mut q = match &opts.init {
        Init::Born => born_init(f_target)?.resample(n)?,
        Init::Zero => Potential::zero(f_target.gamma(), n)?,
        Init::Supplied(q0) => {
            if ((q0.gamma() - f_target.gamma()) / f_target.gamma()).abs() > lit(1e-12) {
                return Err(Error::IncompatibleDomain("initial potential and target differ in gamma".into()));
            }
            q0.resample(n)?
        }
    };
    let model = Model { grid: opts.transform.grid()?, target: f_target, orders: opts.transform.edge_orders };
    let mut r = model.residual(&q)?;
    let mut big_r = sum_sq(&r);
    let mut history = vec![big_r];
    let tol_res = to_f64(opts.tol_residual);
    let tol_step = to_f64(opts.tol_step);
    let h = to_f64(q.step());
    let mut lambda = to_f64(opts.damping).max(DAMPING_FLOOR);
    let mut iterations = 0;
    let mut last_step = f64::NAN;
    let mut reason = String::new();
    let mut converged = big_r < tol_res;
    if converged {
        reason = "initial residual below tolerance".into();
    }

    while !converged && iterations < opts.max_iters {
        iterations += 1;
        let jac = model.jacobian(&q)?;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * stack(&r);
        let scale = (jtj.trace() / jtj.nrows() as f64).max(f64::MIN_POSITIVE);
        let mut accepted = false;
        for _ in 0..MAX_REJECTIONS {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += lambda * scale;
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let delta = chol.solve(&(-&grad));
            let trial: Vec<C<T>> = q
                .samples()
                .iter()
                .enumerate()
                .map(|(j, v)| v + C::new(lit::<T>(delta[j]), lit::<T>(delta[n + j])))
                .collect();
            let trial = Potential::new(q.gamma(), trial)?;
            let r_trial = match model.residual(&trial) {
                Ok(v) => v,
                Err(_) => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let big_trial = sum_sq(&r_trial);
            if big_trial < big_r {
                last_step = (delta.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
                q = trial;
                r = r_trial;
                big_r = big_trial;
                history.push(big_r);
                lambda = (lambda * 0.5).max(DAMPING_FLOOR);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            reason = "no decreasing step found".into();
            break;
        }
        if big_r < tol_res {
            converged = true;
            reason = "residual below tolerance".into();
        } else if last_step < tol_step {
            converged = true;
            reason = "step below tolerance".into();
        }
    }
    if !converged && reason.is_empty() {
        reason = format!("iteration limit {} reached", opts.max_iters);
    }
    let membership = q.validate_membership();
    Ok((q, ReconstructionReport { converged, iterations, residual_history: history, final_step: last_step, stop_reason: reason, membership }))
}

/// Settings for [`stability_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOptions<T> {
    pub transform: TransformOptions<T>,
    pub perturb: PerturbOptions<T>,
    pub reconstruction: ReconstructionOptions<T>,
    pub finder: FinderOptions,
    pub verify: VerifyOptions,
    /// Reconstruct the largest scale a second time from the zero potential.
    pub uniqueness_witness: bool,
}

impl<T: Real> Default for StabilityOptions<T> {
    fn default() -> Self {
        Self {
            transform: TransformOptions::default(),
            perturb: PerturbOptions::default(),
            reconstruction: ReconstructionOptions::default(),
            finder: FinderOptions::default(),
            verify: VerifyOptions::default(),
            uniqueness_witness: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPoint {
    pub t: f64,
    pub l1_norm: f64,
    pub distance: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub points: Vec<ExperimentPoint>,
    /// `‖q_born - q_zero‖` for the largest scale, when requested.
    pub uniqueness_gap: Option<f64>,
    /// Residual histories of the per-scale reconstructions, in scale order.
    pub residual_histories: Vec<Vec<f64>>,
}

impl StabilityReport {
    /// `(t·‖ρ‖, ‖q_t - q_o‖)` for every scale that completed.
    pub fn curve(&self) -> Vec<[f64; 2]> {
        self.points.iter().filter_map(|p| p.distance.map(|d| [p.l1_norm, d])).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        let mut c = self.curve();
        c.sort_by(|a, b| b[0].total_cmp(&a[0]));
        c.len() == self.points.len() && c.windows(2).all(|w| w[1][1] < w[0][1])
    }
}

/// Moves every `k_old` onto the nearest zero located by the finder.
fn snap_shifts<T: Real>(f_o: &JostFunction<T>, s: &ShiftSet<T>, finder: &FinderOptions) -> Result<ShiftSet<T>> {
    if s.is_empty() {
        return Ok(s.clone());
    }
    let pad = lit::<T>(0.5);
    let re_min = s.pairs.iter().map(|p| p.k_old.re).fold(T::infinity(), T::min) - pad;
    let re_max = s.pairs.iter().map(|p| p.k_old.re).fold(T::neg_infinity(), T::max) + pad;
    let im_min = s.pairs.iter().map(|p| p.k_old.im).fold(T::infinity(), T::min) - pad;
    let im_max = (s.pairs.iter().map(|p| p.k_old.im).fold(T::neg_infinity(), T::max) + pad).min(lit(-1e-3));
    let found = find_resonances(f_o, Rect::new(re_min, re_max, im_min, im_max)?, finder)?;
    let mut pairs = Vec::with_capacity(s.pairs.len());
    for p in &s.pairs {
        let near = found
            .nearest(p.k_old)
            .filter(|r| (r.k - p.k_old).norm() < lit::<T>(1e-3) * (T::one() + p.k_old.norm()))
            .ok_or_else(|| Error::ShiftMismatch(format!("no resonance of the forward Jost function near {}", p.k_old)))?;
        pairs.push(ShiftPair { k_old: near.k, rho: p.rho });
    }
    Ok(ShiftSet { pairs, declared_tail_l1: s.declared_tail_l1 })
}

/// Forward `q_o`, locate the shifted resonances, and for each scale `t` perturb, reconstruct
/// and measure `‖q_t - q_o‖_{L²}`. Stage failures are recorded per scale.
pub fn stability_experiment<T: Real>(
    q_o: &Potential<T>,
    s: &ShiftSet<T>,
    scales: &[T],
    opts: &StabilityOptions<T>,
) -> Result<StabilityReport> {
    let mut f_o = crate::forward::jost_profile(q_o, &opts.transform)?;
    let rep = f_o.certify(&opts.verify)?;
    if !rep.passed() {
        return Err(Error::Construction(format!("forward Jost function failed verification: {}", rep.failures.join("; "))));
    }
    let s = snap_shifts(&f_o, s, &opts.finder)?;
    let mut rec = opts.reconstruction.clone();
    rec.n_cells = Some(q_o.n_cells());
    let run = |t: T| -> Result<(Potential<T>, ReconstructionReport)> {
        let f_t = perturb_multiplier(&f_o, &s.scaled(t), &opts.perturb)?;
        reconstruct(&f_t, &rec)
    };
    let mut points = Vec::with_capacity(scales.len());
    let mut histories = Vec::with_capacity(scales.len());
    for &t in scales {
        let l1 = to_f64(s.l1_norm() * t);
        match run(t).and_then(|(q, r)| Ok((q.metric(q_o)?, r))) {
            Ok((d, r)) => {
                histories.push(r.residual_history.clone());
                points.push(ExperimentPoint {
                    t: to_f64(t),
                    l1_norm: l1,
                    distance: Some(to_f64(d)),
                    iterations: r.iterations,
                    converged: r.converged,
                    note: if r.converged { None } else { Some(r.stop_reason) },
                });
            }
            Err(e) => {
                histories.push(Vec::new());
                points.push(ExperimentPoint { t: to_f64(t), l1_norm: l1, distance: None, iterations: 0, converged: false, note: Some(e.to_string()) });
            }
        }
    }
    let uniqueness_gap = match (opts.uniqueness_witness, scales.iter().copied().fold(None, |m: Option<T>, t| Some(m.map_or(t, |m| m.max(t))))) {
        (true, Some(t)) => {
            let f_t = perturb_multiplier(&f_o, &s.scaled(t), &opts.perturb)?;
            let mut born = rec.clone();
            born.init = Init::Born;
            let mut zero = rec.clone();
            zero.init = Init::Zero;
            let (qa, _) = reconstruct(&f_t, &born)?;
            let (qb, _) = reconstruct(&f_t, &zero)?;
            Some(to_f64(qa.metric(&qb)?))
        }
        _ => None,
    };
    Ok(StabilityReport { points, uniqueness_gap, residual_histories: histories })
}
