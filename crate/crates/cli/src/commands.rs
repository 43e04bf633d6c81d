use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dirac_res::entire::{counting_csv, geometric_radii, levinson_slope};
use dirac_res::forward::{jost_and_smatrix, verify_smatrix};
use dirac_res::hermite_biehler::{hb_inequality_check, HermiteBiehler};
use dirac_res::io::{self, JostFile, PotentialFile, ReconstructionFile, ResonanceFile, ShiftFile, SMatrixFile, HB_KIND};
use dirac_res::jost::{verify_jost, VerifyOptions};
use dirac_res::perturbation::{perturb_logexp, perturb_multiplier, PerturbOptions};
use dirac_res::reconstruction::{reconstruct as run_reconstruction, stability_experiment, Init, StabilityOptions};
use dirac_res::resonance::{find_resonances, FinderOptions};
use dirac_res::{JostFunction, Potential, ReconstructionOptions, Rect, ShiftSet};
use serde::Serialize;

use crate::config::{check_paths, fingerprint, parse_list, parse_rect, sibling, transform, Failure, Stage};
use crate::Global;

type Outcome = Result<(), Failure>;

fn load_potential(path: &Path) -> Result<Potential, Failure> {
    io::read_json::<PotentialFile>(path).and_then(|f| f.to_potential()).at("load potential")
}

fn load_jost(path: &Path) -> Result<JostFunction, Failure> {
    io::read_json::<JostFile>(path).and_then(|f| f.to_jost()).at("load jost")
}

/// Loads and certifies; an input that fails verification is a validation error.
fn load_verified_jost(path: &Path) -> Result<JostFunction, Failure> {
    let mut f = load_jost(path)?;
    let rep = f.certify(&VerifyOptions::default()).at("verify input")?;
    if !rep.passed() {
        return Err(Failure::validation("verify input", format!("{} is not a Jost function: {}", path.display(), rep.failures.join("; "))));
    }
    Ok(f)
}

fn load_shifts(path: &Path) -> Result<ShiftSet, Failure> {
    io::read_json::<ShiftFile>(path).map(|f| f.to_set()).at("load shifts")
}

fn write_json<S: Serialize>(path: &Path, value: &S, g: &Global) -> Outcome {
    io::write_json(path, value, g.overwrite).at("write output")
}

fn rect_arg(s: &str) -> Result<Rect, String> {
    parse_rect(s)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ForwardArgs {
    #[arg(long)]
    #[serde(skip)]
    pub potential: PathBuf,
    /// Jost-function output file.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// S-matrix output file (defaults to `<out>.smatrix.json`).
    #[arg(long)]
    #[serde(skip)]
    pub smatrix: Option<PathBuf>,
}

pub fn forward(g: &Global, a: &ForwardArgs) -> Outcome {
    let s_path = a.smatrix.clone().unwrap_or_else(|| sibling(&a.out, "smatrix"));
    check_paths(&[&a.potential], &[&a.out, &s_path], g.overwrite)?;
    let fp = fingerprint("forward", g, a, &[&a.potential])?;
    let q = load_potential(&a.potential)?;
    let m = q.validate_membership();
    if !m.passed() {
        return Err(Failure::validation("validate potential", m.failures.join("; ")));
    }
    let (f, s) = jost_and_smatrix(&q, &transform(g)).at("forward")?;
    let rep = verify_smatrix(&s, transform(g).leak_tol).at("scattering check")?;
    println!("leakage {:.3e}", f.leakage());
    println!("winding {}", rep.winding);
    if !rep.passed() {
        eprintln!("warning: {}", rep.failures.join("; "));
    }
    let mut jf = JostFile::from(&f);
    jf.fingerprint = Some(fp.clone());
    let mut sf = SMatrixFile::from_profile(&s);
    sf.fingerprint = Some(fp);
    write_json(&a.out, &jf, g)?;
    write_json(&s_path, &sf, g)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResonanceArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
    /// Search rectangle `re0,re1,im0,im1` in the lower half-plane.
    #[arg(long, value_parser = rect_arg, allow_hyphen_values = true)]
    pub rect: Rect,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn resonances(g: &Global, a: &ResonanceArgs) -> Outcome {
    check_paths(&[&a.jost], &[&a.out], g.overwrite)?;
    let fp = fingerprint("resonances", g, a, &[&a.jost])?;
    let f = load_jost(&a.jost)?;
    let mut opts = FinderOptions::default();
    if let Some(t) = g.tol {
        opts.tol = t;
    }
    let list = find_resonances(&f, a.rect, &opts).at("find resonances")?;
    println!("{} zeros (total multiplicity {})", list.len(), list.total_multiplicity());
    for r in &list.items {
        println!("{:+.12e} {:+.12e}i  x{}", r.k.re, r.k.im, r.multiplicity);
    }
    let mut file = ResonanceFile::from_list(&list);
    file.fingerprint = Some(fp);
    write_json(&a.out, &file, g)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Multiplier,
    Logexp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PerturbArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub shifts: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Route::Multiplier)]
    pub route: Route,
}

pub fn perturb(g: &Global, a: &PerturbArgs) -> Outcome {
    check_paths(&[&a.jost, &a.shifts], &[&a.out], g.overwrite)?;
    let fp = fingerprint("perturb", g, a, &[&a.jost, &a.shifts])?;
    let s = load_shifts(&a.shifts)?;
    let f = load_verified_jost(&a.jost)?;
    let opts = PerturbOptions { transform: transform(g), ..Default::default() };
    let out = match a.route {
        Route::Multiplier => perturb_multiplier(&f, &s, &opts).at("perturb")?,
        Route::Logexp => {
            let r = perturb_logexp(&f, &s, &opts).at("perturb")?;
            println!("algebra norm {:.6e}, bound {:.6e} ({})", r.f_norm, r.bound, if r.bound_ok { "holds" } else { "violated" });
            r.jost
        }
    };
    println!("shifted {} zeros, l1 norm {:.6e}, distance {:.6e}", s.pairs.len(), s.l1_norm(), out.metric(&f).at("perturb")?);
    let mut file = JostFile::from(&out);
    file.fingerprint = Some(fp);
    write_json(&a.out, &file, g)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Born,
    Zero,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
    /// Potential output file.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Report output file (defaults to `<out>.report.json`).
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InitArg::Born)]
    pub init: InitArg,
    #[arg(long, default_value_t = 30)]
    pub max_iters: usize,
    /// Cells of the recovered potential (defaults to the profile grid).
    #[arg(long)]
    pub cells: Option<usize>,
}

pub fn reconstruct(g: &Global, a: &ReconstructArgs) -> Outcome {
    let r_path = a.report.clone().unwrap_or_else(|| sibling(&a.out, "report"));
    check_paths(&[&a.jost], &[&a.out, &r_path], g.overwrite)?;
    let fp = fingerprint("reconstruct", g, a, &[&a.jost])?;
    let f = load_verified_jost(&a.jost)?;
    let mut opts = ReconstructionOptions {
        max_iters: a.max_iters,
        init: match a.init {
            InitArg::Born => Init::Born,
            InitArg::Zero => Init::Zero,
        },
        n_cells: a.cells,
        transform: transform(g),
        ..Default::default()
    };
    if let Some(t) = g.tol {
        opts.tol_step = t;
    }
    let (q, rep) = run_reconstruction(&f, &opts).at("reconstruct")?;
    println!("{} iterations, residual {:.3e}, {}", rep.iterations, rep.residual_history.last().copied().unwrap_or(f64::NAN), rep.stop_reason);
    let mut qf = PotentialFile::from_potential(&q);
    qf.fingerprint = Some(fp.clone());
    let mut rf = ReconstructionFile::from_reconstruction(&rep);
    rf.fingerprint = Some(fp);
    write_json(&a.out, &qf, g)?;
    write_json(&r_path, &rf, g)?;
    if !rep.converged {
        return Err(Failure::numerical("reconstruct", format!("did not converge: {}", rep.stop_reason)));
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
}

pub fn verify(_g: &Global, a: &VerifyArgs) -> Outcome {
    check_paths(&[&a.jost], &[], true)?;
    let f = load_jost(&a.jost)?;
    let rep = verify_jost(&f, &VerifyOptions::default()).at("verify")?;
    println!("support tail ratio {:.3e}", rep.support.tail_ratio);
    println!("zeros in the closed upper half-plane: {}", rep.upper_zero_count.map_or("unknown".into(), |c| c.to_string()));
    println!("min |psi| on the real line {:.3e}", rep.min_modulus_real);
    if rep.passed() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::validation("verify", rep.failures.join("; ")))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HbArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn hb(g: &Global, a: &HbArgs) -> Outcome {
    check_paths(&[&a.jost], &[&a.out], g.overwrite)?;
    let fp = fingerprint("hb", g, a, &[&a.jost])?;
    let e = HermiteBiehler::from_jost(load_verified_jost(&a.jost)?).at("hermite-biehler")?;
    let rep = hb_inequality_check(&e, 200, 20, g.seed).at("hermite-biehler check")?;
    println!("{} samples, min |E(z)| - |E(conj z)| = {:.3e}", rep.samples, rep.min_gap);
    let mut file = JostFile::from(e.jost());
    file.kind = Some(HB_KIND.into());
    file.fingerprint = Some(fp);
    write_json(&a.out, &file, g)?;
    if !rep.passed() {
        return Err(Failure::numerical("hermite-biehler check", format!("inequality fails at {} points, first {:?}", rep.violations.len(), rep.violations[0])));
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountingArgs {
    #[arg(long)]
    #[serde(skip)]
    pub jost: PathBuf,
    #[arg(long, value_parser = rect_arg, allow_hyphen_values = true)]
    pub rect: Rect,
    /// CSV output file.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub rmin: f64,
    /// Largest radius (defaults to the largest disc inside the rectangle).
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
}

pub fn counting(g: &Global, a: &CountingArgs) -> Outcome {
    check_paths(&[&a.jost], &[&a.out], g.overwrite)?;
    let fp = fingerprint("counting", g, a, &[&a.jost])?;
    let f = load_jost(&a.jost)?;
    let r = a.rect;
    let r_max = a.rmax.unwrap_or_else(|| r.re_max.min(-r.re_min).min(-r.im_min));
    if !(r_max > a.rmin && a.rmin > 0.0) || a.points < 2 {
        return Err(Failure::validation("arguments", format!("need 0 < rmin < rmax and at least 2 points (rmin {}, rmax {r_max})", a.rmin)));
    }
    let list = find_resonances(&f, r, &FinderOptions::default()).at("find resonances")?;
    let zeros = list.zeros();
    let radii = geometric_radii(a.rmin, r_max, a.points);
    match levinson_slope(&zeros, a.rmin, r_max) {
        Ok(fit) => println!("slope {:.6} (normalized {:.6})", fit.slope, fit.slope * std::f64::consts::PI / (2.0 * f.gamma())),
        Err(e) => eprintln!("warning: slope fit: {e}"),
    }
    let text = format!("# fingerprint={fp}\n{}", counting_csv(&zeros, f.gamma(), &radii));
    io::write_text(&a.out, &text, g.overwrite).at("write output")
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StabilityArgs {
    #[arg(long)]
    #[serde(skip)]
    pub potential: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub shifts: PathBuf,
    /// Comma-separated scale factors for the shifts.
    #[arg(long, default_value = "1,0.5,0.25")]
    pub scales: String,
    /// CSV output file with columns `l1,distance`.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// JSON report (defaults to `<out>.report.json`).
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
}

pub fn stability(g: &Global, a: &StabilityArgs) -> Outcome {
    let r_path = a.report.clone().unwrap_or_else(|| sibling(&a.out, "report").with_extension("json"));
    check_paths(&[&a.potential, &a.shifts], &[&a.out, &r_path], g.overwrite)?;
    let scales = parse_list(&a.scales).map_err(|e| Failure::validation("arguments", e))?;
    if scales.is_empty() || scales.iter().any(|t| !(*t >= 0.0)) {
        return Err(Failure::validation("arguments", "scales must be nonnegative"));
    }
    let fp = fingerprint("stability", g, a, &[&a.potential, &a.shifts])?;
    let q = load_potential(&a.potential)?;
    let s = load_shifts(&a.shifts)?;
    let tr = transform(g);
    let mut opts = StabilityOptions {
        transform: tr,
        perturb: PerturbOptions { transform: tr, ..Default::default() },
        reconstruction: ReconstructionOptions { transform: tr, max_iters: 15, ..Default::default() },
        ..Default::default()
    };
    if let Some(t) = g.tol {
        opts.reconstruction.tol_step = t;
    }
    let rep = stability_experiment(&q, &s, &scales, &opts).at("stability")?;
    let mut csv = format!("# fingerprint={fp}\nl1,distance\n");
    for p in &rep.points {
        match p.distance {
            Some(d) => csv.push_str(&format!("{},{}\n", p.l1_norm, d)),
            None => eprintln!("warning: scale {} failed: {}", p.t, p.note.as_deref().unwrap_or("")),
        }
    }
    for [l1, d] in rep.curve() {
        println!("l1 {l1:.4e}  distance {d:.6e}");
    }
    if let Some(gap) = rep.uniqueness_gap {
        println!("born/zero initialization gap {gap:.3e}");
    }
    io::write_text(&a.out, &csv, g.overwrite).at("write output")?;
    let mut rf = ReconstructionFile::from_stability(&rep);
    rf.fingerprint = Some(fp);
    write_json(&r_path, &rf, g)?;
    if rep.points.iter().any(|p| p.distance.is_none()) {
        return Err(Failure::numerical("stability", "some scales failed; see the report"));
    }
    Ok(())
}
