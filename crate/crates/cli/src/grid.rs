//! Parameter grids written as `start:step:end` ranges and comma lists.

use anyhow::{bail, Context, Result};

fn parse_value(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().with_context(|| format!("cannot parse {s:?} as a number"))
}

/// Parses `"0.1:0.1:1,5,inf"` into its values, in order of appearance.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_value(v)?),
            [a, step, b] => {
                let (a, step, b) = (parse_value(a)?, parse_value(step)?, parse_value(b)?);
                if !(step > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                    bail!("bad range {item:?}");
                }
                let count = ((b - a) / step + 1e-9).floor() as usize + 1;
                out.extend((0..count).map(|i| a + i as f64 * step));
            }
            _ => bail!("bad grid item {item:?}, expected a value or start:step:end"),
        }
    }
    if out.is_empty() {
        bail!("empty grid {text:?}");
    }
    Ok(out)
}
