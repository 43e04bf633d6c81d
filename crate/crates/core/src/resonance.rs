//! Zero location in rectangles of the complex plane.
//!
//! Counting uses the argument principle `(1/2πi)∮ f'/f dk` with adaptive Gauss–Kronrod
//! quadrature along each edge. Location recursively subdivides a rectangle until every cell
//! holds a single zero (or a cluster too tight to separate), then polishes with Newton's method.

use std::cmp::Ordering;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, lit, to_f64, Real, C};

/// Functions that can be evaluated, with derivative, anywhere in the plane.
pub trait Analytic<T: Real>: Sync {
    /// Exponential type parameter used to scale residuals in the lower half-plane.
    fn gamma(&self) -> T;

    fn value(&self, z: C<T>) -> Result<C<T>> {
        self.value_and_derivative(z).map(|(v, _)| v)
    }

    fn value_and_derivative(&self, z: C<T>) -> Result<(C<T>, C<T>)>;
}

impl<T: Real, F: Analytic<T> + ?Sized> Analytic<T> for &F {
    fn gamma(&self) -> T {
        (**self).gamma()
    }
    fn value(&self, z: C<T>) -> Result<C<T>> {
        (**self).value(z)
    }
    fn value_and_derivative(&self, z: C<T>) -> Result<(C<T>, C<T>)> {
        (**self).value_and_derivative(z)
    }
}

/// `e^{2γ|Im z|}` for `Im z < 0`, else 1: the growth of a Jost function below the axis.
pub fn growth<T: Real>(gamma: T, z: C<T>) -> T {
    if z.im < T::zero() {
        (lit::<T>(2.0) * gamma * (-z.im)).min(T::exp_guard()).exp()
    } else {
        T::one()
    }
}

/// Axis-aligned closed rectangle `[re_min, re_max] × [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Real> Rect<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T) -> Result<Self> {
        if !(re_max > re_min && im_max > im_min) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "empty or non-finite rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn width(&self) -> T {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> T {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> C<T> {
        let two = lit::<T>(2.0);
        C::new((self.re_min + self.re_max) / two, (self.im_min + self.im_max) / two)
    }

    pub fn contains(&self, z: C<T>) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn dilate(&self, factor: T) -> Self {
        let dw = self.width() * factor / lit(2.0);
        let dh = self.height() * factor / lit(2.0);
        Self { re_min: self.re_min - dw, re_max: self.re_max + dw, im_min: self.im_min - dh, im_max: self.im_max + dh }
    }

    fn expand(&self, margin: T) -> Self {
        Self {
            re_min: self.re_min - margin,
            re_max: self.re_max + margin,
            im_min: self.im_min - margin,
            im_max: self.im_max + margin,
        }
    }

    /// Counter-clockwise corners starting at the bottom left.
    fn corners(&self) -> [C<T>; 4] {
        [
            C::new(self.re_min, self.im_min),
            C::new(self.re_max, self.im_min),
            C::new(self.re_max, self.im_max),
            C::new(self.re_min, self.im_max),
        ]
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Quadrature settings for contour integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    /// Absolute error target per edge for `∫ f'/f dk`.
    pub abs_tol: f64,
    pub max_depth: usize,
    /// `|f| ≥ floor_factor · growth` is required along the contour.
    pub floor_factor: f64,
    pub max_dilations: usize,
    /// Largest accepted distance of the count from an integer.
    pub max_residual: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-6, max_depth: 40, floor_factor: 1e-6, max_dilations: 3, max_residual: 1e-2 }
    }
}

struct Segment<T> {
    a: C<T>,
    b: C<T>,
}

fn kronrod_panel<T: Real, F: Analytic<T> + ?Sized>(f: &F, seg: &Segment<T>, opts: &ContourOptions) -> Result<(C<T>, T)> {
    let two = lit::<T>(2.0);
    let mid = (seg.a + seg.b) / two;
    let half = (seg.b - seg.a) / two;
    let gamma = f.gamma();
    let eval = |t: T| -> Result<C<T>> {
        let z = mid + half * t;
        let (v, d) = f.value_and_derivative(z)?;
        let floor = lit::<T>(opts.floor_factor) * growth(gamma, z);
        if !(v.norm() > floor) || !is_finite_c(d) {
            return Err(Error::BoundaryZero(format!("|f({z})| = {:.3e} below floor {:.3e}", v.norm(), floor)));
        }
        Ok(d / v)
    };
    let mut kron = C::new(T::zero(), T::zero());
    let mut gauss = C::new(T::zero(), T::zero());
    let centre = eval(T::zero())?;
    kron = kron + centre * lit::<T>(WGK[7]);
    gauss = gauss + centre * lit::<T>(WG[3]);
    for j in 0..7 {
        let x = lit::<T>(XGK[j]);
        let s = eval(x)? + eval(-x)?;
        kron = kron + s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * lit::<T>(WG[j / 2]);
        }
    }
    Ok((kron * half, (kron - gauss).norm() * half.norm()))
}

fn adaptive_segment<T: Real, F: Analytic<T> + ?Sized>(
    f: &F,
    seg: Segment<T>,
    tol: T,
    depth: usize,
    opts: &ContourOptions,
) -> Result<C<T>> {
    let (val, err) = kronrod_panel(f, &seg, opts)?;
    if err <= tol || depth >= opts.max_depth {
        return Ok(val);
    }
    let mid = (seg.a + seg.b) / lit::<T>(2.0);
    let half_tol = tol / lit(2.0);
    let left = adaptive_segment(f, Segment { a: seg.a, b: mid }, half_tol, depth + 1, opts)?;
    let right = adaptive_segment(f, Segment { a: mid, b: seg.b }, half_tol, depth + 1, opts)?;
    Ok(left + right)
}

/// `∫ f'/f dk` along the straight segment from `a` to `b`.
pub fn log_derivative_integral<T: Real, F: Analytic<T> + ?Sized>(f: &F, a: C<T>, b: C<T>, opts: &ContourOptions) -> Result<C<T>> {
    // Split long edges up front so oscillatory integrands start from sensible panels.
    let len = (b - a).norm();
    let scale = T::PI() / (lit::<T>(2.0) * f.gamma().max(lit(1e-3)));
    let pieces = (to_f64(len / scale).ceil() as usize).clamp(1, 100_000);
    let tol = lit::<T>(opts.abs_tol) / T::from_usize(pieces).unwrap_or(T::one());
    let mut acc = C::new(T::zero(), T::zero());
    for p in 0..pieces {
        let t0 = T::from_usize(p).unwrap() / T::from_usize(pieces).unwrap();
        let t1 = T::from_usize(p + 1).unwrap() / T::from_usize(pieces).unwrap();
        let seg = Segment { a: a + (b - a) * t0, b: a + (b - a) * t1 };
        acc = acc + adaptive_segment(f, seg, tol, 0, opts)?;
    }
    Ok(acc)
}

/// Result of an argument-principle count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCount<T> {
    /// Zeros minus poles inside `rect`.
    pub count: i64,
    /// Distance of `(1/2πi)∮ f'/f` from `count`.
    pub residual: f64,
    /// The rectangle actually used (after any dilation).
    pub rect: Rect<T>,
}

fn contour_value<T: Real, F: Analytic<T> + ?Sized>(f: &F, rect: &Rect<T>, opts: &ContourOptions) -> Result<C<T>> {
    let c = rect.corners();
    let mut total = C::new(T::zero(), T::zero());
    for e in 0..4 {
        total = total + log_derivative_integral(f, c[e], c[(e + 1) % 4], opts)?;
    }
    let two_pi_i = Complex::new(T::zero(), lit::<T>(2.0) * T::PI());
    Ok(total / two_pi_i)
}

fn count_exact<T: Real, F: Analytic<T> + ?Sized>(f: &F, rect: &Rect<T>, opts: &ContourOptions) -> Result<ZeroCount<T>> {
    let v = contour_value(f, rect, opts)?;
    let n = v.re.round();
    let residual = to_f64((v - n).norm());
    if residual > opts.max_residual {
        return Err(Error::Contour(format!(
            "argument-principle value {v} is {residual:.2e} away from an integer on {rect:?}"
        )));
    }
    Ok(ZeroCount { count: to_f64(n) as i64, residual, rect: *rect })
}

/// Number of zeros (minus poles) of `f` inside `rect`, dilating by 1% when a zero sits on the
/// contour.
pub fn count_zeros_rect<T: Real, F: Analytic<T> + ?Sized>(f: &F, rect: Rect<T>, opts: &ContourOptions) -> Result<ZeroCount<T>> {
    let mut r = rect;
    for attempt in 0..=opts.max_dilations {
        match count_exact(f, &r, opts) {
            Err(Error::BoundaryZero(msg)) => {
                if attempt == opts.max_dilations {
                    return Err(Error::BoundaryZero(format!("{msg} after {attempt} dilations of {rect:?}")));
                }
                r = r.dilate(lit(0.01));
            }
            other => return other,
        }
    }
    unreachable!()
}

/// A located zero with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance<T> {
    pub k: C<T>,
    pub multiplicity: usize,
}

/// Zeros in the open lower half-plane sorted by modulus, ties broken by ascending real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceList<T> {
    pub items: Vec<Resonance<T>>,
    pub region: Rect<T>,
}

/// Moduli are compared after rounding to this grid, so mirror-image zeros whose computed moduli
/// differ only by rounding count as ties and fall back to ascending `Re k`.
const MODULUS_GRID: f64 = 1e-9;

pub(crate) fn modulus_order<T: Real>(a: &C<T>, b: &C<T>) -> Ordering {
    let key = |z: &C<T>| (z.norm() / lit::<T>(MODULUS_GRID)).round();
    key(a)
        .partial_cmp(&key(b))
        .unwrap_or(Ordering::Equal)
        .then(a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal))
}

impl<T: Real> ResonanceList<T> {
    pub fn new(mut items: Vec<Resonance<T>>, region: Rect<T>) -> Self {
        items.sort_by(|a, b| modulus_order(&a.k, &b.k));
        Self { items, region }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total count with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.items.iter().map(|r| r.multiplicity).sum()
    }

    /// Zeros repeated according to multiplicity, in list order.
    pub fn zeros(&self) -> Vec<C<T>> {
        self.items.iter().flat_map(|r| std::iter::repeat(r.k).take(r.multiplicity)).collect()
    }

    /// Entry closest to `z`.
    pub fn nearest(&self, z: C<T>) -> Option<&Resonance<T>> {
        self.items
            .iter()
            .min_by(|a, b| (a.k - z).norm().partial_cmp(&(b.k - z).norm()).unwrap_or(Ordering::Equal))
    }

    /// Number of stored resonances with `Im k > -a`, requiring the searched region to cover the strip.
    pub fn strip_count(&self, a: T) -> Result<usize> {
        if !(a > T::zero()) {
            return Err(Error::InvalidInput("strip height must be positive".into()));
        }
        if self.region.im_min > -a && a.is_finite() {
            return Err(Error::Coverage(format!(
                "searched region reaches Im k = {} but the strip extends to {}",
                self.region.im_min, -a
            )));
        }
        Ok(self.items.iter().filter(|r| r.k.im > -a).map(|r| r.multiplicity).sum())
    }

    /// Checks the ordering and half-plane invariants.
    pub fn check_invariants(&self) -> Result<()> {
        if let Some(r) = self.items.iter().find(|r| !(r.k.im < T::zero())) {
            return Err(Error::Domain(format!("resonance {} not in the open lower half-plane", r.k)));
        }
        if self.items.windows(2).any(|w| modulus_order(&w[0].k, &w[1].k) == Ordering::Greater) {
            return Err(Error::Domain("resonances not sorted by modulus".into()));
        }
        Ok(())
    }
}

/// Settings for [`find_resonances`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinderOptions {
    /// Newton acceptance: `|f(k)| < tol · max(1, e^{2γ|Im k|})`.
    pub tol: f64,
    pub contour: ContourOptions,
    pub max_newton: usize,
    /// Cells smaller than this (relative to the top rectangle) holding several zeros are
    /// treated as one multiple zero.
    pub cluster_size: f64,
    pub max_depth: usize,
}

impl Default for FinderOptions {
    fn default() -> Self {
        Self { tol: 1e-10, contour: ContourOptions::default(), max_newton: 60, cluster_size: 1e-9, max_depth: 60 }
    }
}

fn newton<T: Real, F: Analytic<T> + ?Sized>(f: &F, start: C<T>, mult: usize, cell: &Rect<T>, opts: &FinderOptions) -> Result<Option<C<T>>> {
    let gamma = f.gamma();
    let margin = cell.width().max(cell.height()) * lit(0.25);
    let zone = cell.expand(margin);
    let m = T::from_usize(mult).unwrap_or(T::one());
    let mut z = start;
    for _ in 0..opts.max_newton {
        let (v, d) = f.value_and_derivative(z)?;
        if v.norm() == T::zero() {
            break;
        }
        if d.norm() == T::zero() || !is_finite_c(d) {
            return Ok(None);
        }
        let dz = v / d * m;
        z = z - dz;
        if !zone.contains(z) || !is_finite_c(z) {
            return Ok(None);
        }
        if dz.norm() <= T::epsilon() * lit::<T>(8.0) * z.norm().max(T::one()) {
            break;
        }
    }
    let v = f.value(z)?;
    let accept = v.norm() < lit::<T>(opts.tol) * growth(gamma, z) && cell.expand(margin * lit(0.2)).contains(z);
    Ok(if accept { Some(z) } else { None })
}

fn split<T: Real>(r: &Rect<T>, shift: T) -> Vec<Rect<T>> {
    let two = lit::<T>(2.0);
    let xm = (r.re_min + r.re_max) / two + r.width() * shift;
    let ym = (r.im_min + r.im_max) / two + r.height() * shift;
    let aspect = r.width() / r.height();
    if aspect > two {
        vec![Rect { re_max: xm, ..*r }, Rect { re_min: xm, ..*r }]
    } else if aspect < T::one() / two {
        vec![Rect { im_max: ym, ..*r }, Rect { im_min: ym, ..*r }]
    } else {
        vec![
            Rect { re_max: xm, im_max: ym, ..*r },
            Rect { re_min: xm, im_max: ym, ..*r },
            Rect { re_max: xm, im_min: ym, ..*r },
            Rect { re_min: xm, im_min: ym, ..*r },
        ]
    }
}

/// Counts on sub-cells that sum to the parent count, shifting split lines off near-zeros.
fn subdivide<T: Real, F: Analytic<T> + ?Sized>(
    f: &F,
    cell: &Rect<T>,
    parent: i64,
    opts: &FinderOptions,
) -> Result<Vec<(Rect<T>, i64)>> {
    let shifts = [0.0, 0.031, -0.047, 0.083, -0.109];
    let strict = ContourOptions { max_dilations: 0, ..opts.contour };
    let mut last_err = None;
    for s in shifts {
        let children = split(cell, lit(s));
        let counts: Vec<Result<ZeroCount<T>>> = children.par_iter().map(|c| count_exact(f, c, &strict)).collect();
        match counts.into_iter().collect::<Result<Vec<_>>>() {
            Ok(cs) => {
                let total: i64 = cs.iter().map(|c| c.count).sum();
                if total == parent {
                    return Ok(children.into_iter().zip(cs.into_iter().map(|c| c.count)).collect());
                }
                last_err = Some(Error::UnresolvedCell(format!(
                    "children of {cell:?} count {total} zeros, parent counts {parent}"
                )));
            }
            Err(e @ (Error::BoundaryZero(_) | Error::Contour(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::UnresolvedCell(format!("{cell:?}"))))
}

fn resolve_cell<T: Real, F: Analytic<T> + ?Sized>(
    f: &F,
    cell: Rect<T>,
    count: i64,
    depth: usize,
    scale: T,
    opts: &FinderOptions,
) -> Result<Vec<Resonance<T>>> {
    if count <= 0 {
        if count < 0 {
            return Err(Error::UnresolvedCell(format!("negative count {count} on {cell:?}")));
        }
        return Ok(Vec::new());
    }
    let size = cell.width().max(cell.height());
    let tiny = size < scale * lit(opts.cluster_size);
    if count == 1 || tiny {
        let mult = count as usize;
        if let Some(z) = newton(f, cell.center(), mult, &cell, opts)? {
            return Ok(vec![Resonance { k: z, multiplicity: mult }]);
        }
        if tiny {
            return Err(Error::UnresolvedCell(format!("Newton failed on cell {cell:?} holding {count} zeros")));
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::UnresolvedCell(format!("depth limit reached on cell {cell:?} holding {count} zeros")));
    }
    let children = match subdivide(f, &cell, count, opts) {
        Ok(c) => c,
        Err(e) => {
            // Split lines keep hitting small values: most likely a tight cluster or a
            // multiple zero, which modified Newton resolves directly.
            if count > 1 {
                if let Some(z) = newton(f, cell.center(), count as usize, &cell, opts)? {
                    return Ok(vec![Resonance { k: z, multiplicity: count as usize }]);
                }
            }
            return Err(e);
        }
    };
    let parts: Vec<Result<Vec<Resonance<T>>>> = children
        .into_par_iter()
        .map(|(c, n)| resolve_cell(f, c, n, depth + 1, scale, opts))
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Finds all zeros of `f` in `rect` (which must lie in the open lower half-plane).
pub fn find_resonances<T: Real, F: Analytic<T> + ?Sized>(f: &F, rect: Rect<T>, opts: &FinderOptions) -> Result<ResonanceList<T>> {
    if !(rect.im_max <= T::zero()) {
        return Err(Error::InvalidInput(format!("search rectangle {rect:?} leaves the lower half-plane")));
    }
    let top = count_zeros_rect(f, rect, &opts.contour)?;
    let scale = top.rect.width().max(top.rect.height());
    let mut items = resolve_cell(f, top.rect, top.count, 0, scale, opts)?;
    items.retain(|r| r.k.im < T::zero());
    merge_duplicates(&mut items, scale * lit(opts.cluster_size) * lit(10.0));
    let list = ResonanceList::new(items, top.rect);
    let found = list.total_multiplicity() as i64;
    if found != top.count {
        return Err(Error::UnresolvedCell(format!("located {found} zeros but the contour count is {}", top.count)));
    }
    Ok(list)
}

fn merge_duplicates<T: Real>(items: &mut Vec<Resonance<T>>, radius: T) {
    items.sort_by(|a, b| modulus_order(&a.k, &b.k));
    let mut out: Vec<Resonance<T>> = Vec::with_capacity(items.len());
    for r in items.drain(..) {
        if let Some(prev) = out.iter_mut().find(|p| (p.k - r.k).norm() < radius) {
            prev.multiplicity += r.multiplicity;
        } else {
            out.push(r);
        }
    }
    *items = out;
}

/// Fit of the forbidden-domain inequality `2γ Im kₙ ≤ ln(ε + C/|kₙ|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenDomainReport {
    pub epsilon: f64,
    /// Smallest `C ≥ 0` for which every stored resonance satisfies the inequality.
    pub c: f64,
    /// `ln(ε + C/|kₙ|) - 2γ Im kₙ` per resonance, in list order.
    pub slack: Vec<f64>,
}

pub fn forbidden_domain_check<T: Real>(list: &ResonanceList<T>, gamma: T, eps: T) -> Result<ForbiddenDomainReport> {
    if list.is_empty() {
        return Err(Error::InvalidInput("forbidden-domain fit needs at least one resonance".into()));
    }
    if !(eps > T::zero()) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let two = lit::<T>(2.0);
    let c = list
        .items
        .iter()
        .map(|r| r.k.norm() * ((two * gamma * r.k.im).exp() - eps))
        .fold(T::zero(), T::max);
    let slack = list
        .items
        .iter()
        .map(|r| to_f64((eps + c / r.k.norm()).ln() - two * gamma * r.k.im))
        .collect();
    Ok(ForbiddenDomainReport { epsilon: to_f64(eps), c: to_f64(c), slack })
}

/// `max_{|kₙ| ≥ r} Im kₙ` at each stored radius; nonincreasing for well-behaved resonance tails.
pub fn tail_maxima<T: Real>(list: &ResonanceList<T>) -> Vec<(T, T)> {
    let n = list.items.len();
    let mut out = vec![(T::zero(), T::zero()); n];
    let mut running = T::neg_infinity();
    for j in (0..n).rev() {
        running = running.max(list.items[j].k.im);
        out[j] = (list.items[j].k.norm(), running);
    }
    out
}

/// `f(k) · Π (1 + ρₙ/(kₙ - k))`: relocates the zero at `kₙ` to `kₙ + ρₙ`.
pub struct RationalMultiplier<'a, T: Real, F: Analytic<T> + ?Sized> {
    pub base: &'a F,
    pub pairs: Vec<(C<T>, C<T>)>,
}

impl<T: Real, F: Analytic<T> + ?Sized> Analytic<T> for RationalMultiplier<'_, T, F> {
    fn gamma(&self) -> T {
        self.base.gamma()
    }

    fn value_and_derivative(&self, z: C<T>) -> Result<(C<T>, C<T>)> {
        let (mut v, mut dv) = self.base.value_and_derivative(z)?;
        for &(k0, rho) in &self.pairs {
            let den = k0 - z;
            let factor = C::new(T::one(), T::zero()) + rho / den;
            dv = dv * factor + v * rho / (den * den);
            v = v * factor;
        }
        if !is_finite_c(v) || !is_finite_c(dv) {
            return Err(Error::Range(format!("rational multiplier evaluated at a pole {z}")));
        }
        Ok((v, dv))
    }
}

/// Sorts zeros by modulus with the documented tie-break.
pub fn sort_by_modulus<T: Real>(zeros: &mut [C<T>]) {
    zeros.sort_by(modulus_order);
}
