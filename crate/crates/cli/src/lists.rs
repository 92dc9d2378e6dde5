//! Small value parsers shared by several subcommands.

use anyhow::{bail, Context, Result};

/// Parses a size sweep: `a..b:step` (inclusive, step defaults to 1), a
/// comma-separated list, or a mix such as `5,10..30:10`.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (hi, step),
                    None => (rest, "1"),
                };
                let lo: usize = lo.parse().with_context(|| format!("bad size range `{part}`"))?;
                let hi: usize = hi.parse().with_context(|| format!("bad size range `{part}`"))?;
                let step: usize = step.parse().with_context(|| format!("bad step in `{part}`"))?;
                if step == 0 || lo > hi {
                    bail!("empty or endless size range `{part}`");
                }
                out.extend((lo..=hi).step_by(step));
            }
            None => out.push(part.parse().with_context(|| format!("bad size `{part}`"))?),
        }
    }
    if out.contains(&0) {
        bail!("instance sizes must be positive");
    }
    Ok(out)
}

/// Splits a comma-separated list, dropping empty items.
pub fn parse_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("10..40:10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(parse_sizes("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_sizes("7, 9,20..30:5").unwrap(), vec![7, 9, 20, 25, 30]);
        assert_eq!(parse_sizes("10..200:10").unwrap().len(), 20);
        assert!(parse_sizes("5..1").is_err());
        assert!(parse_sizes("1..5:0").is_err());
        assert!(parse_sizes("x").is_err());
        assert!(parse_sizes("0").is_err());
    }
}
