//! Jost functions represented by their time-domain profile: `ψ(z) = 1 + ∫₀^γ g(s) e^{2izs} ds`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{self, check_same_domain, MembershipReport};
use crate::resonance::{self, Analytic, ContourOptions};
use crate::scalar::{from_usize, is_finite_c, lit, to_f64, Real, C};

/// `ψ = 1 + ℱg` with `g` stored as cell-midpoint samples on `[0, γ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostFunction<T> {
    gamma: T,
    g: Vec<C<T>>,
    leakage: T,
    verified: bool,
}

impl<T: Real> JostFunction<T> {
    pub fn new(gamma: T, g_samples: Vec<C<T>>, leakage: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("support length must be positive, got {gamma}")));
        }
        if g_samples.is_empty() {
            return Err(Error::InvalidInput("profile needs at least one sample".into()));
        }
        if let Some(j) = g_samples.iter().position(|v| !is_finite_c(*v)) {
            return Err(Error::InvalidInput(format!("non-finite profile sample at index {j}")));
        }
        if !(leakage >= T::zero()) {
            return Err(Error::InvalidInput("leakage must be nonnegative".into()));
        }
        Ok(Self { gamma, g: g_samples, leakage, verified: false })
    }

    /// Profile sampled at cell midpoints from a function of `s`.
    pub fn from_fn(gamma: T, n_cells: usize, g: impl Fn(T) -> C<T>) -> Result<Self> {
        let h = gamma / from_usize(n_cells.max(1));
        Self::new(gamma, (0..n_cells).map(|j| g((from_usize::<T>(j) + lit(0.5)) * h)).collect(), T::zero())
    }

    /// `ψ ≡ 1`.
    pub fn unit(gamma: T, n_cells: usize) -> Result<Self> {
        Self::new(gamma, vec![C::new(T::zero(), T::zero()); n_cells], T::zero())
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn step(&self) -> T {
        self.gamma / from_usize(self.g.len())
    }

    pub fn n_cells(&self) -> usize {
        self.g.len()
    }

    pub fn g_samples(&self) -> &[C<T>] {
        &self.g
    }

    pub fn leakage(&self) -> T {
        self.leakage
    }

    /// Set only after [`JostFunction::certify`] passed.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        self.eval_impl(z, false).map(|(v, _)| v)
    }

    /// `ψ(z)` and `ψ'(z) = ∫ 2is g(s) e^{2izs} ds`.
    pub fn eval_with_derivative(&self, z: C<T>) -> Result<(C<T>, C<T>)> {
        self.eval_impl(z, true)
    }

    /// Midpoint rule with the Euler–Maclaurin end correction `(h²/24)[F'(γ) - F'(0)]`; endpoint
    /// values and slopes of `g` come from three-point extrapolation.
    fn eval_impl(&self, z: C<T>, derivative: bool) -> Result<(C<T>, C<T>)> {
        if !is_finite_c(z) {
            return Err(Error::InvalidInput(format!("non-finite argument {z}")));
        }
        let two = lit::<T>(2.0);
        if -two * self.gamma * z.im > T::exp_guard() {
            return Err(Error::Range(format!("2γ|Im z| too large at z = {z}")));
        }
        let n = self.g.len();
        let h = self.step();
        let i = Complex::new(T::zero(), T::one());
        let w = i * two * z;
        let rot = (w * h).exp();
        let zero = C::new(T::zero(), T::zero());
        let (mut acc0, mut acc1) = (zero, zero);
        let mut t = zero;
        for (j, &gj) in self.g.iter().enumerate() {
            if j % 256 == 0 {
                t = (w * ((from_usize::<T>(j) + lit(0.5)) * h)).exp();
            }
            let v = gj * t;
            acc0 = acc0 + v;
            if derivative {
                acc1 = acc1 + v * ((from_usize::<T>(j) + lit(0.5)) * h);
            }
            t = t * rot;
        }
        let mut psi = C::new(T::one(), T::zero()) + acc0 * h;
        let mut dpsi = acc1 * h * i * two;
        if n >= 3 {
            let g = &self.g;
            let (a0, a1, a2) = (lit::<T>(1.875), lit::<T>(-1.25), lit::<T>(0.375));
            let (d0, d1, d2) = (lit::<T>(-2.0), lit::<T>(3.0), lit::<T>(-1.0));
            let g_left = g[0] * a0 + g[1] * a1 + g[2] * a2;
            let dg_left = (g[0] * d0 + g[1] * d1 + g[2] * d2) / h;
            let g_right = g[n - 1] * a0 + g[n - 2] * a1 + g[n - 3] * a2;
            let dg_right = -(g[n - 1] * d0 + g[n - 2] * d1 + g[n - 3] * d2) / h;
            let e_right = (w * self.gamma).exp();
            let corr = h * h / lit(24.0);
            // F = g e^{2izs}: F' = (g' + 2iz g) e^{2izs}
            let f_right = (dg_right + w * g_right) * e_right;
            let f_left = dg_left + w * g_left;
            psi = psi + (f_right - f_left) * corr;
            if derivative {
                // G = 2is g e^{2izs}: G' = 2i (g + s g' + 2iz s g) e^{2izs}
                let gam = self.gamma;
                let gp_right = (g_right + dg_right * gam + w * g_right * gam) * e_right * i * two;
                let gp_left = g_left * i * two;
                dpsi = dpsi + (gp_right - gp_left) * corr;
            }
        }
        if !is_finite_c(psi) || !is_finite_c(dpsi) {
            return Err(Error::Range(format!("non-finite Jost value at z = {z}")));
        }
        Ok((psi, dpsi))
    }

    /// `ρ_𝒥(ψ₁, ψ₂) = ‖g₁ - g₂‖_{L²(0,γ)}`.
    pub fn metric(&self, other: &Self) -> Result<T> {
        check_same_domain(self.gamma, other.gamma)?;
        if self.g.len() != other.g.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{} vs {} profile cells; resample one of them first",
                self.g.len(),
                other.g.len()
            )));
        }
        Ok(potential::l2_distance(&self.g, &other.g, self.step()))
    }

    /// Profile averaged onto `n_cells` equal cells.
    pub fn resample(&self, n_cells: usize) -> Result<Self> {
        let g = potential::resample_cells(&self.g, n_cells)?;
        Self::new(self.gamma, g, self.leakage)
    }

    pub fn profile_norm(&self) -> T {
        potential::l2_norm(&self.g, self.step())
    }

    pub fn support_report(&self) -> MembershipReport {
        potential::membership(&self.g, self.step())
    }

    /// Runs [`verify_jost`] and records whether it passed.
    pub fn certify(&mut self, opts: &VerifyOptions) -> Result<VerifyReport> {
        let rep = verify_jost(self, opts)?;
        self.verified = rep.passed();
        Ok(rep)
    }
}

impl<T: Real> Analytic<T> for JostFunction<T> {
    fn gamma(&self) -> T {
        self.gamma
    }
    fn value(&self, z: C<T>) -> Result<C<T>> {
        self.eval(z)
    }
    fn value_and_derivative(&self, z: C<T>) -> Result<(C<T>, C<T>)> {
        self.eval_with_derivative(z)
    }
}

/// Settings for [`verify_jost`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Initial half-width is `r0_factor / γ`.
    pub r0_factor: f64,
    pub max_doublings: usize,
    /// Stop growing once the edges away from the real axis contribute less than this.
    pub outer_tol: f64,
    /// Required lower bound for `|ψ|` on the real grid.
    pub real_floor: f64,
    /// Real-grid points per period `π/γ` of `e^{2ikγ}`.
    pub points_per_period: usize,
    pub contour: ContourOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            r0_factor: 20.0,
            max_doublings: 5,
            outer_tol: 1e-3,
            real_floor: 1e-8,
            points_per_period: 32,
            contour: ContourOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub support: MembershipReport,
    /// Zeros counted in the closed upper half-plane rectangle (`None` if the count failed).
    pub upper_zero_count: Option<i64>,
    pub radius: f64,
    pub outer_contribution: f64,
    pub min_modulus_real: f64,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn upper_count<T: Real>(f: &JostFunction<T>, r: T, opts: &ContourOptions) -> Result<(i64, T)> {
    let c = [C::new(-r, T::zero()), C::new(r, T::zero()), C::new(r, r), C::new(-r, r)];
    let mut edges = Vec::with_capacity(4);
    for e in 0..4 {
        edges.push(resonance::log_derivative_integral(f, c[e], c[(e + 1) % 4], opts)?);
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let total = (edges[0] + edges[1] + edges[2] + edges[3]) / Complex::new(T::zero(), two_pi);
    let outer = ((edges[1] + edges[2] + edges[3]) / two_pi).norm();
    let n = total.re.round();
    if (total - n).norm() > lit(opts.max_residual) {
        return Err(Error::Contour(format!("upper half-plane count {total} not near an integer")));
    }
    Ok((to_f64(n) as i64, outer))
}

/// Checks membership in the Jost class: support reaching `γ`, no zeros in the closed upper
/// half-plane, and `|ψ|` bounded away from zero on the real line.
pub fn verify_jost<T: Real>(f: &JostFunction<T>, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let support = f.support_report();
    if !support.finite {
        failures.push("profile has non-finite samples".to_string());
    }
    if !support.support_reaches_end {
        failures.push(format!("effective support does not reach γ (tail ratio {:.3e})", support.tail_ratio));
    }

    let gamma = f.gamma();
    let mut r = lit::<T>(opts.r0_factor) / gamma;
    let mut count = None;
    let mut outer = f64::NAN;
    for step in 0..=opts.max_doublings {
        match upper_count(f, r, &opts.contour) {
            Ok((n, o)) => {
                count = Some(n);
                outer = to_f64(o);
                if outer < opts.outer_tol || n != 0 || step == opts.max_doublings {
                    break;
                }
                r = r * lit(2.0);
            }
            Err(e) => {
                failures.push(format!("argument principle in the upper half-plane failed: {e}"));
                count = None;
                break;
            }
        }
    }
    if let Some(n) = count {
        if n != 0 {
            failures.push(format!("{n} zero(s) in the closed upper half-plane"));
        }
    }

    let per = T::PI() / gamma / from_usize(opts.points_per_period);
    let m = (to_f64(r / per).ceil() as usize).max(1);
    let min_mod = (0..=2 * m)
        .into_par_iter()
        .map(|j| {
            let k = -r + from_usize::<T>(j) * per;
            f.eval(C::new(k, T::zero())).map(|v| to_f64(v.norm())).unwrap_or(f64::NAN)
        })
        .reduce(|| f64::INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.min(b) });
    if !(min_mod > opts.real_floor) {
        failures.push(format!("inf |ψ| on the real grid is {min_mod:.3e}"));
    }

    Ok(VerifyReport {
        support,
        upper_zero_count: count,
        radius: to_f64(r),
        outer_contribution: outer,
        min_modulus_real: min_mod,
        failures,
    })
}

/// On-disk form shared by Jost-function, Hermite–Biehler and S-matrix files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JostFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub gamma: f64,
    pub step: f64,
    pub g_samples: Vec<[f64; 2]>,
    pub leakage: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl<T: Real> From<&JostFunction<T>> for JostFile {
    fn from(f: &JostFunction<T>) -> Self {
        JostFile {
            kind: None,
            gamma: to_f64(f.gamma),
            step: to_f64(f.step()),
            g_samples: f.g.iter().map(|v| [to_f64(v.re), to_f64(v.im)]).collect(),
            leakage: to_f64(f.leakage),
            fingerprint: None,
        }
    }
}

impl JostFile {
    pub fn to_jost<T: Real>(&self) -> Result<JostFunction<T>> {
        let n = self.g_samples.len();
        if n == 0 || !(self.step > 0.0) || ((self.step * n as f64 - self.gamma) / self.gamma).abs() > 1e-9 {
            return Err(Error::Format(format!(
                "step {} times {} samples does not equal gamma {}",
                self.step, n, self.gamma
            )));
        }
        let g = self.g_samples.iter().map(|p| C::new(lit::<T>(p[0]), lit::<T>(p[1]))).collect();
        JostFunction::new(lit(self.gamma), g, lit(self.leakage.max(0.0)))
    }
}
