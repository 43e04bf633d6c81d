//! JSON file formats. Complex numbers are written as `[re, im]` pairs and every document may
//! carry the fingerprint of the configuration that produced it.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::SMatrixProfile;
use crate::perturbation::{ShiftPair, ShiftSet};
use crate::potential::Potential;
use crate::reconstruction::{ReconstructionReport, StabilityReport};
use crate::resonance::{Rect, Resonance, ResonanceList};
use crate::scalar::{lit, to_f64, Real, C};

pub use crate::jost::JostFile;

pub const HB_KIND: &str = "hermite-biehler";

fn pair<T: Real>(z: C<T>) -> [f64; 2] {
    [to_f64(z.re), to_f64(z.im)]
}

fn unpair<T: Real>(p: [f64; 2]) -> C<T> {
    C::new(lit(p[0]), lit(p[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFile {
    pub gamma: f64,
    pub step: f64,
    pub samples: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl PotentialFile {
    pub fn from_potential<T: Real>(q: &Potential<T>) -> Self {
        Self { gamma: to_f64(q.gamma()), step: to_f64(q.step()), samples: q.samples().iter().map(|&v| pair(v)).collect(), fingerprint: None }
    }

    pub fn to_potential<T: Real>(&self) -> Result<Potential<T>> {
        let n = self.samples.len();
        if n == 0 || !(self.step > 0.0) || ((self.step * n as f64 - self.gamma) / self.gamma).abs() > 1e-9 {
            return Err(Error::Format(format!("step {} times {} samples does not equal gamma {}", self.step, n, self.gamma)));
        }
        Potential::new(lit(self.gamma), self.samples.iter().map(|&p| unpair(p)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_max: f64,
    pub n_k: usize,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SMatrixFile {
    pub gamma: f64,
    pub k_grid: KGrid,
    pub values: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl SMatrixFile {
    pub fn from_profile<T: Real>(s: &SMatrixProfile<T>) -> Self {
        let k_max = to_f64(s.k_max);
        Self {
            gamma: to_f64(s.gamma),
            k_grid: KGrid { k_max, n_k: s.n_k, step: 2.0 * k_max / s.n_k as f64 },
            values: s.values.iter().map(|&v| pair(v)).collect(),
            fingerprint: None,
        }
    }

    pub fn to_profile<T: Real>(&self) -> Result<SMatrixProfile<T>> {
        if self.values.len() != self.k_grid.n_k {
            return Err(Error::Format(format!("{} values for a grid of {}", self.values.len(), self.k_grid.n_k)));
        }
        Ok(SMatrixProfile {
            gamma: lit(self.gamma),
            k_max: lit(self.k_grid.k_max),
            n_k: self.k_grid.n_k,
            values: self.values.iter().map(|&p| unpair(p)).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftEntry {
    pub k_old: [f64; 2],
    pub rho: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftFile {
    pub pairs: Vec<ShiftEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_tail_l1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl ShiftFile {
    pub fn from_set<T: Real>(s: &ShiftSet<T>) -> Self {
        Self {
            pairs: s.pairs.iter().map(|p| ShiftEntry { k_old: pair(p.k_old), rho: pair(p.rho) }).collect(),
            declared_tail_l1: s.declared_tail_l1.map(to_f64),
            fingerprint: None,
        }
    }

    pub fn to_set<T: Real>(&self) -> ShiftSet<T> {
        ShiftSet {
            pairs: self.pairs.iter().map(|e| ShiftPair { k_old: unpair(e.k_old), rho: unpair(e.rho) }).collect(),
            declared_tail_l1: self.declared_tail_l1.map(lit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub k: [f64; 2],
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFile {
    pub region: Rect<f64>,
    pub items: Vec<ResonanceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl ResonanceFile {
    pub fn from_list<T: Real>(list: &ResonanceList<T>) -> Self {
        let r = list.region;
        Self {
            region: Rect { re_min: to_f64(r.re_min), re_max: to_f64(r.re_max), im_min: to_f64(r.im_min), im_max: to_f64(r.im_max) },
            items: list.items.iter().map(|z| ResonanceEntry { k: pair(z.k), mult: z.multiplicity }).collect(),
            fingerprint: None,
        }
    }

    pub fn to_list<T: Real>(&self) -> Result<ResonanceList<T>> {
        let r = self.region;
        let region = Rect::new(lit(r.re_min), lit(r.re_max), lit(r.im_min), lit(r.im_max))?;
        let items = self.items.iter().map(|e| Resonance { k: unpair(e.k), multiplicity: e.mult }).collect();
        Ok(ResonanceList::new(items, region))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionFile {
    pub curve: Vec<[f64; 2]>,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniqueness_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl ReconstructionFile {
    pub fn from_reconstruction(r: &ReconstructionReport) -> Self {
        Self { curve: Vec::new(), residual_history: r.residual_history.clone(), converged: r.converged, uniqueness_gap: None, fingerprint: None }
    }

    /// `residual_history` holds the histories of all scales concatenated.
    pub fn from_stability(r: &StabilityReport) -> Self {
        Self {
            curve: r.curve(),
            residual_history: r.residual_histories.iter().flatten().copied().collect(),
            converged: r.points.iter().all(|p| p.converged),
            uniqueness_gap: r.uniqueness_gap,
            fingerprint: None,
        }
    }
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Pretty-printed JSON with a trailing newline. Refuses to replace an existing file unless
/// `overwrite` is set.
pub fn write_json<S: Serialize>(path: &Path, value: &S, overwrite: bool) -> Result<()> {
    let pretty = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    let mut text = inline_numeric_arrays(&pretty);
    text.push('\n');
    write_text(path, &text, overwrite)
}

/// Puts every array that holds only numbers on one line, so `[re, im]` pairs read as pairs.
fn inline_numeric_arrays(pretty: &str) -> String {
    let mut out = String::with_capacity(pretty.len());
    let mut rest = pretty;
    while let Some(open) = rest.find('[') {
        out.push_str(&rest[..=open]);
        rest = &rest[open + 1..];
        let Some(close) = rest.find(|c| c == '[' || c == ']' || c == '{' || c == '"') else { continue };
        if rest.as_bytes()[close] != b']' {
            continue;
        }
        let items: Vec<&str> = rest[..close].split(',').map(str::trim).collect();
        if items.iter().all(|s| !s.is_empty()) {
            out.push_str(&items.join(", "));
            rest = &rest[close..];
        }
    }
    out.push_str(rest);
    out
}

pub fn write_text(path: &Path, text: &str, overwrite: bool) -> Result<()> {
    if !overwrite && path.exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::AlreadyExists,
            format!("{} exists; pass --overwrite to replace it", path.display()),
        )));
    }
    fs::write(path, text)?;
    Ok(())
}
