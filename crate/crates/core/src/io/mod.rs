//! Instance and tour file I/O.

mod native;
mod tsplib;

use std::fs;
use std::path::Path as FsPath;

pub use native::{read_hpt, write_hpt};
pub use tsplib::{nint_distance, parse_tsplib};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// What to do with an instance whose costs violate the triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricPolicy {
    #[default]
    Reject,
    /// Replace costs by their metric closure.
    Repair,
}

impl MetricPolicy {
    pub fn apply(self, inst: Instance) -> Result<Instance> {
        match inst.check_metric() {
            Ok(()) => Ok(inst),
            Err(e) => match self {
                MetricPolicy::Reject => Err(e),
                MetricPolicy::Repair => Ok(inst.metric_closure()),
            },
        }
    }
}

/// Loads `.hpt` files natively and anything ending in `.tsp` as TSPLIB.
pub fn load_instance(path: &FsPath, policy: MetricPolicy) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| with_path(e, path))?;
    let inst = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsp")) {
        parse_tsplib(&text)?
    } else {
        read_hpt(&text)?
    };
    policy.apply(inst)
}

pub fn save_instance(path: &FsPath, inst: &Instance) -> Result<()> {
    fs::write(path, write_hpt(inst)).map_err(|e| with_path(e, path))
}

/// Tour file: one line of whitespace-separated vertex indices.
pub fn parse_tour(text: &str) -> Result<Vec<usize>> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::parse(1, "tour file is empty"))?;
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(1, format!("malformed vertex index '{t}'")))
        })
        .collect()
}

pub fn load_tour(path: &FsPath) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| with_path(e, path))?;
    parse_tour(&text)
}

fn with_path(e: std::io::Error, path: &FsPath) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}
