use std::fs;
use std::path::{Path, PathBuf};

use dirac_res::{Error, ErrorClass, Rect, TransformOptions};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Global;

/// A failed command: the pipeline stage, the message, and the exit status.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn validation(stage: &'static str, message: impl Into<String>) -> Self {
        Self { stage, message: message.into(), code: 2 }
    }

    pub fn numerical(stage: &'static str, message: impl Into<String>) -> Self {
        Self { stage, message: message.into(), code: 3 }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Io => 1,
        ErrorClass::Validation => 2,
        ErrorClass::Numerical => 3,
    }
}

pub trait Stage<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for dirac_res::Result<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure { stage, message: e.to_string(), code: exit_code(&e) })
    }
}

pub fn transform(g: &Global) -> TransformOptions {
    TransformOptions::new(g.k_max, g.n_k)
}

pub fn parse_rect(s: &str) -> Result<Rect, String> {
    let v = parse_list(s)?;
    if v.len() != 4 {
        return Err(format!("expected re0,re1,im0,im1, got {} numbers", v.len()));
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))).collect()
}

/// Inputs must exist. Without `overwrite`, outputs must be new files distinct from the inputs.
pub fn check_paths(inputs: &[&Path], outputs: &[&Path], overwrite: bool) -> Result<(), Failure> {
    for p in inputs {
        if !p.is_file() {
            return Err(Failure { stage: "input", message: format!("cannot read {}", p.display()), code: 1 });
        }
    }
    if overwrite {
        return Ok(());
    }
    let canon: Vec<PathBuf> = inputs.iter().filter_map(|p| fs::canonicalize(p).ok()).collect();
    for o in outputs {
        if fs::canonicalize(o).is_ok_and(|c| canon.contains(&c)) {
            return Err(Failure::validation("arguments", format!("output {} is also an input; pass --overwrite", o.display())));
        }
        if o.exists() {
            return Err(Failure { stage: "output", message: format!("{} exists; pass --overwrite to replace it", o.display()), code: 1 });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FingerprintInput<'a, A: Serialize> {
    command: &'a str,
    global: &'a Global,
    args: &'a A,
    inputs: Vec<String>,
}

/// SHA-256 over the command, its parameters and the contents of its input files. File names
/// are left out, so the same run under different names gets the same fingerprint.
pub fn fingerprint<A: Serialize>(command: &str, global: &Global, args: &A, inputs: &[&Path]) -> Result<String, Failure> {
    let mut digests = Vec::with_capacity(inputs.len());
    for p in inputs {
        let bytes = fs::read(p).map_err(|e| Failure { stage: "input", message: format!("{}: {e}", p.display()), code: 1 })?;
        digests.push(hex::encode(Sha256::digest(&bytes)));
    }
    let doc = FingerprintInput { command, global, args, inputs: digests };
    let text = serde_json::to_string(&doc).expect("configuration serializes");
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// `psi.json` becomes `psi.smatrix.json`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "json".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}
