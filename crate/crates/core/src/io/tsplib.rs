//! Reader for the symmetric TSPLIB subset: `EUC_2D` coordinates, and
//! `EXPLICIT` weights in `LOWER_DIAG_ROW` or `FULL_MATRIX` layout.
//!
//! TSPLIB carries no probabilities, so the returned instance has all-zero
//! probabilities and starts at vertex 0.

use crate::error::{Error, Result};
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WeightType {
    Euc2d,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WeightFormat {
    LowerDiagRow,
    FullMatrix,
}

/// TSPLIB `EUC_2D` distance: Euclidean length rounded to the nearest integer.
pub fn nint_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).hypot(a[1] - b[1]) + 0.5).floor()
}

fn unsupported(keyword: &str, value: &str) -> Error {
    Error::UnsupportedFormat {
        keyword: keyword.to_string(),
        value: value.to_string(),
    }
}

pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let lines: Vec<&str> = text.lines().collect();
    let mut name = String::from("tsplib");
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<WeightType> = None;
    let mut weight_format: Option<WeightFormat> = None;
    let mut coords: Option<Vec<[f64; 2]>> = None;
    let mut display: Option<Vec<[f64; 2]>> = None;
    let mut weights: Option<Vec<f64>> = None;

    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                let mut it = line.splitn(2, char::is_whitespace);
                (it.next().unwrap_or(""), it.next().unwrap_or("").trim())
            }
        };
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
            "TYPE" => {
                if value != "TSP" {
                    return Err(unsupported("TYPE", value));
                }
            }
            "DIMENSION" => {
                dimension = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("malformed DIMENSION '{value}'")))?,
                );
            }
            "EDGE_WEIGHT_TYPE" => {
                weight_type = Some(match value {
                    "EUC_2D" => WeightType::Euc2d,
                    "EXPLICIT" => WeightType::Explicit,
                    other => return Err(unsupported("EDGE_WEIGHT_TYPE", other)),
                });
            }
            "EDGE_WEIGHT_FORMAT" => {
                weight_format = Some(match value {
                    "LOWER_DIAG_ROW" => WeightFormat::LowerDiagRow,
                    "FULL_MATRIX" => WeightFormat::FullMatrix,
                    other => return Err(unsupported("EDGE_WEIGHT_FORMAT", other)),
                });
            }
            "NODE_COORD_SECTION" | "DISPLAY_DATA_SECTION" => {
                let n = dimension.ok_or_else(|| Error::parse(line_no, "DIMENSION must precede sections"))?;
                let mut pts = vec![[f64::NAN; 2]; n];
                for _ in 0..n {
                    let Some(raw) = lines.get(i) else {
                        return Err(Error::parse(i, format!("{key} ended early")));
                    };
                    let l = i + 1;
                    i += 1;
                    let toks: Vec<&str> = raw.split_whitespace().collect();
                    let [id, x, y] = toks[..] else {
                        return Err(Error::parse(l, "expected '<id> <x> <y>'"));
                    };
                    let id: usize = id
                        .parse()
                        .map_err(|_| Error::parse(l, format!("malformed node id '{id}'")))?;
                    if id == 0 || id > n {
                        return Err(Error::parse(l, format!("node id {id} out of range")));
                    }
                    let parse = |t: &str| {
                        t.parse::<f64>()
                            .map_err(|_| Error::parse(l, format!("malformed coordinate '{t}'")))
                    };
                    pts[id - 1] = [parse(x)?, parse(y)?];
                }
                if key == "NODE_COORD_SECTION" {
                    coords = Some(pts);
                } else {
                    display = Some(pts);
                }
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension.ok_or_else(|| Error::parse(line_no, "DIMENSION must precede sections"))?;
                let format = weight_format
                    .ok_or_else(|| Error::parse(line_no, "EDGE_WEIGHT_FORMAT must precede EDGE_WEIGHT_SECTION"))?;
                let expected = match format {
                    WeightFormat::LowerDiagRow => n * (n + 1) / 2,
                    WeightFormat::FullMatrix => n * n,
                };
                let mut values = Vec::with_capacity(expected);
                while values.len() < expected {
                    let Some(raw) = lines.get(i) else {
                        return Err(Error::parse(
                            i,
                            format!("EDGE_WEIGHT_SECTION has {} of {expected} weights", values.len()),
                        ));
                    };
                    let l = i + 1;
                    i += 1;
                    for tok in raw.split_whitespace() {
                        let w: f64 = tok
                            .parse()
                            .map_err(|_| Error::parse(l, format!("malformed weight '{tok}'")))?;
                        values.push(w);
                    }
                }
                if values.len() > expected {
                    return Err(Error::parse(i, "EDGE_WEIGHT_SECTION has trailing weights"));
                }
                weights = Some(values);
            }
            "EOF" => break,
            other => return Err(Error::parse(line_no, format!("unknown keyword '{other}'"))),
        }
    }

    let n = dimension.ok_or_else(|| Error::parse(lines.len(), "missing DIMENSION"))?;
    let weight_type = weight_type.ok_or_else(|| Error::parse(lines.len(), "missing EDGE_WEIGHT_TYPE"))?;
    let mut matrix = vec![vec![0.0; n]; n];
    let metadata = match weight_type {
        WeightType::Euc2d => {
            let pts = coords.ok_or_else(|| Error::parse(lines.len(), "missing NODE_COORD_SECTION"))?;
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        matrix[a][b] = nint_distance(pts[a], pts[b]);
                    }
                }
            }
            Some(pts)
        }
        WeightType::Explicit => {
            let w = weights.ok_or_else(|| Error::parse(lines.len(), "missing EDGE_WEIGHT_SECTION"))?;
            match weight_format {
                Some(WeightFormat::LowerDiagRow) => {
                    let mut it = w.into_iter();
                    for a in 0..n {
                        for b in 0..=a {
                            let v = it.next().unwrap_or_default();
                            matrix[a][b] = v;
                            matrix[b][a] = v;
                        }
                    }
                }
                Some(WeightFormat::FullMatrix) => {
                    for (k, v) in w.into_iter().enumerate() {
                        matrix[k / n][k % n] = v;
                    }
                    for a in 0..n {
                        for b in 0..a {
                            if matrix[a][b] != matrix[b][a] {
                                return Err(unsupported("FULL_MATRIX", "asymmetric weights"));
                            }
                        }
                    }
                }
                None => unreachable!("checked before reading weights"),
            }
            coords.or(display)
        }
    };
    let inst = Instance::from_matrix(name, matrix, vec![0.0; n], 0)?;
    Ok(inst.with_coords_metadata(metadata))
}
