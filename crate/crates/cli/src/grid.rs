//! Parameter grids: `start:stop:log10`, `start:stop:linN`, comma lists, or a single value.

use anyhow::{bail, Context, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|s| parse_f64(s))
            .collect::<Result<Vec<_>>>(),
        [start, stop, kind] => {
            let (a, b) = (parse_f64(start)?, parse_f64(stop)?);
            if !(a <= b) {
                bail!("grid `{spec}`: start must not exceed stop");
            }
            if *kind == "log10" {
                if !(a > 0.0) {
                    bail!("grid `{spec}`: log10 grids need a positive start");
                }
                let mut out = Vec::new();
                let mut i = 0;
                loop {
                    let x = a * 10f64.powi(i);
                    if x > b * (1.0 + 1e-12) {
                        break;
                    }
                    out.push(x);
                    i += 1;
                }
                Ok(out)
            } else if let Some(n) = kind.strip_prefix("lin") {
                let n: usize = n.parse().with_context(|| format!("grid `{spec}`: bad point count"))?;
                match n {
                    0 => bail!("grid `{spec}`: lin0 is empty"),
                    1 => Ok(vec![a]),
                    _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
                }
            } else {
                bail!("grid `{spec}`: unknown spacing `{kind}` (use log10 or linN)")
            }
        }
        _ => bail!("grid `{spec}`: expected start:stop:log10, start:stop:linN or a comma list"),
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    t.parse::<f64>().with_context(|| format!("`{t}` is not a number"))
}

pub fn parse_list_f64(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_list_i64(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("`{t}` is not an integer")))
        .collect()
}

/// `lo:hi` inclusive integer range, or a single integer.
pub fn parse_int_range(s: &str) -> Result<(i64, i64)> {
    match s.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse_list_i64(a)?[0], parse_list_i64(b)?[0]);
            if a > b {
                bail!("range `{s}` is empty");
            }
            Ok((a, b))
        }
        None => {
            let v = parse_list_i64(s)?[0];
            Ok((v, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1e1:1e4:log10").unwrap(), vec![10.0, 100.0, 1000.0, 10000.0]);
        assert_eq!(parse_grid("0:1:lin3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("250,500").unwrap(), vec![250.0, 500.0]);
        assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
        assert!(parse_grid("1:0:lin3").is_err());
        assert!(parse_grid("1:2:cubic").is_err());
        assert!(parse_grid("0:2:log10").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_int_range("-3:3").unwrap(), (-3, 3));
        assert_eq!(parse_int_range("4").unwrap(), (4, 4));
        assert!(parse_int_range("3:-3").is_err());
    }
}
