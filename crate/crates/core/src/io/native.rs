//! Line-oriented `.hpt` instance format.
//!
//! ```text
//! # comment
//! NAME berlin-subset
//! N 3
//! START 0
//! SEED 7
//! PROB 0.1 0.25 0
//! COORDS
//! 0 0
//! 3 4
//! 6 8
//! ```
//!
//! `COORDS` may be replaced by `MATRIX FULL` followed by `N` rows of `N`
//! costs. Tokens are whitespace separated and `#` starts a comment. Reals are
//! written in their shortest round-trip decimal form so a read-back instance
//! is bit-identical to the one written.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Instance, Seed};

pub fn write_hpt(inst: &Instance) -> String {
    let mut out = String::new();
    let n = inst.n();
    out.push_str("# hpppt instance\n");
    let _ = writeln!(out, "NAME {}", inst.name());
    let _ = writeln!(out, "N {n}");
    let _ = writeln!(out, "START {}", inst.start());
    if let Some(seed) = inst.seed() {
        let _ = writeln!(out, "SEED {}", seed.0);
    }
    out.push_str("PROB");
    for &p in inst.probs() {
        let _ = write!(out, " {p}");
    }
    out.push('\n');
    match inst.coords() {
        Some(coords) if inst.is_euclidean() => {
            out.push_str("COORDS\n");
            for [x, y] in coords {
                let _ = writeln!(out, "{x} {y}");
            }
        }
        _ => {
            out.push_str("MATRIX FULL\n");
            for i in 0..n {
                let row: Vec<String> = inst.row(i).iter().map(|c| c.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments stripped, as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((idx + 1, toks));
            }
        }
        None
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} '{tok}'")))
}

fn parse_reals(toks: &[&str], line: usize) -> Result<Vec<f64>> {
    toks.iter().map(|t| parse_num(t, line, "real")).collect()
}

enum Geometry {
    Coords(Vec<[f64; 2]>),
    Matrix(Vec<Vec<f64>>),
}

pub fn read_hpt(text: &str) -> Result<Instance> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let mut name = String::from("unnamed");
    let mut n: Option<usize> = None;
    let mut start = 0usize;
    let mut seed = None;
    let mut prob: Option<Vec<f64>> = None;
    let mut geometry = None;
    let mut last_line = 0;

    while let Some((line, toks)) = lines.next_tokens() {
        last_line = line;
        let need_n = |n: Option<usize>| n.ok_or_else(|| Error::parse(line, "N must precede this record"));
        match toks[0] {
            "NAME" => name = toks[1..].join(" "),
            "N" => {
                let [_, v] = toks[..] else {
                    return Err(Error::parse(line, "expected 'N <count>'"));
                };
                n = Some(parse_num(v, line, "vertex count")?);
            }
            "START" => {
                let [_, v] = toks[..] else {
                    return Err(Error::parse(line, "expected 'START <index>'"));
                };
                start = parse_num(v, line, "start index")?;
            }
            "SEED" => {
                let [_, v] = toks[..] else {
                    return Err(Error::parse(line, "expected 'SEED <u64>'"));
                };
                seed = Some(Seed(parse_num(v, line, "seed")?));
            }
            "PROB" => {
                let n = need_n(n)?;
                let values = parse_reals(&toks[1..], line)?;
                if values.len() != n {
                    return Err(Error::parse(
                        line,
                        format!("PROB has {} values, expected {n}", values.len()),
                    ));
                }
                prob = Some(values);
            }
            "COORDS" => {
                let n = need_n(n)?;
                let mut coords = Vec::with_capacity(n);
                for _ in 0..n {
                    let (l, row) = lines
                        .next_tokens()
                        .ok_or_else(|| Error::parse(line, "COORDS section ended early"))?;
                    last_line = l;
                    let vals = parse_reals(&row, l)?;
                    let [x, y] = vals[..] else {
                        return Err(Error::parse(l, "expected 'x y'"));
                    };
                    coords.push([x, y]);
                }
                geometry = Some(Geometry::Coords(coords));
            }
            "MATRIX" => {
                let n = need_n(n)?;
                match toks.get(1) {
                    Some(&"FULL") => {}
                    other => {
                        return Err(Error::UnsupportedFormat {
                            keyword: "MATRIX".into(),
                            value: other.unwrap_or(&"").to_string(),
                        })
                    }
                }
                let mut rows = Vec::with_capacity(n);
                for _ in 0..n {
                    let (l, row) = lines
                        .next_tokens()
                        .ok_or_else(|| Error::parse(line, "MATRIX section ended early"))?;
                    last_line = l;
                    let vals = parse_reals(&row, l)?;
                    if vals.len() != n {
                        return Err(Error::parse(
                            l,
                            format!("matrix row has {} values, expected {n}", vals.len()),
                        ));
                    }
                    rows.push(vals);
                }
                geometry = Some(Geometry::Matrix(rows));
            }
            other => return Err(Error::parse(line, format!("unknown record '{other}'"))),
        }
    }

    let n = n.ok_or_else(|| Error::parse(last_line, "missing N record"))?;
    let prob = prob.unwrap_or_else(|| vec![0.0; n]);
    let inst = match geometry {
        Some(Geometry::Coords(c)) => Instance::from_coords(name, c, prob, start)?,
        Some(Geometry::Matrix(m)) => Instance::from_matrix(name, m, prob, start)?,
        None => return Err(Error::parse(last_line, "missing COORDS or MATRIX section")),
    };
    Ok(inst.with_seed(seed))
}
