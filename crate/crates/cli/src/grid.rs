//! Parameter grids: a single value, a comma list, or an inclusive range.
//!
//! Integers take `a..b`. Reals take `a..b:step`, with points computed as
//! `a + i·step` and rounded to 12 decimals so `0..1:0.1` prints cleanly.

use anyhow::{bail, Context, Result};

pub fn parse_ints(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .with_context(|| format!("bad range start in `{text}`"))?;
        let b: usize = b.trim().parse().with_context(|| format!("bad range end in `{text}`"))?;
        if a > b {
            bail!("empty range `{text}`");
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .with_context(|| format!("`{v}` is not a non-negative integer"))
        })
        .collect()
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if let Some((a, rest)) = text.split_once("..") {
        let (b, step) = rest
            .split_once(':')
            .with_context(|| format!("real range `{text}` needs a step, e.g. 0..1:0.1"))?;
        let a: f64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad range start in `{text}`"))?;
        let b: f64 = b.trim().parse().with_context(|| format!("bad range end in `{text}`"))?;
        let step: f64 = step.trim().parse().with_context(|| format!("bad step in `{text}`"))?;
        if step.is_nan() || step <= 0.0 || a > b {
            bail!("empty range `{text}`");
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| round12(a + i as f64 * step)).collect());
    }
    text.split(',')
        .map(|v| {
            let x: f64 = v.trim().parse().with_context(|| format!("`{v}` is not a number"))?;
            if !x.is_finite() {
                bail!("`{v}` is not finite");
            }
            Ok(x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_forms() {
        assert_eq!(parse_ints("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_ints("2, 5").unwrap(), vec![2, 5]);
        assert_eq!(parse_ints("4").unwrap(), vec![4]);
        assert!(parse_ints("3..1").is_err());
        assert!(parse_ints("-1").is_err());
    }

    #[test]
    fn real_forms() {
        let g = parse_reals("0..1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(parse_reals("0.1,0.25").unwrap(), vec![0.1, 0.25]);
        assert!(parse_reals("0..1").is_err());
        assert!(parse_reals("nan").is_err());
    }
}
