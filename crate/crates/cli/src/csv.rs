//! Plain CSV reading and writing for signals and segment lists.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use homs::{Partition, Segment, Signal};

/// Formats with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn is_header(line: &str) -> bool {
    line.split(',').any(|field| field.trim().parse::<f64>().is_err())
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut values = Vec::new();
    for (pos, (line_no, line)) in data_lines(&text).enumerate() {
        if pos == 0 && is_header(line) {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| anyhow!("{}: line {line_no}: cannot parse {line:?} as a number", path.display()))?;
        if !v.is_finite() {
            bail!("{}: line {line_no}: non-finite value {line:?}", path.display());
        }
        values.push(v);
    }
    Signal::new(values).with_context(|| format!("{}: no samples", path.display()))
}

pub fn write_signal(path: &Path, header: Option<&str>, s: &Signal) -> Result<()> {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(h);
        out.push('\n');
    }
    for &x in s.as_slice() {
        out.push_str(&num(x));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_segments(path: &Path, n: usize) -> Result<Partition> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut segs = Vec::new();
    for (pos, (line_no, line)) in data_lines(&text).enumerate() {
        if pos == 0 && is_header(line) {
            continue;
        }
        let bad = || anyhow!("{}: line {line_no}: expected \"left,right\", got {line:?}", path.display());
        let (l, r) = line.split_once(',').ok_or_else(bad)?;
        let left: usize = l.trim().parse().map_err(|_| bad())?;
        let right: usize = r.trim().parse().map_err(|_| bad())?;
        segs.push(Segment::new(left, right));
    }
    Partition::new(segs, n).with_context(|| format!("{}: invalid partition", path.display()))
}

pub fn write_segments(path: &Path, p: &Partition) -> Result<()> {
    let mut out = String::from("left,right\n");
    for s in p.iter() {
        writeln!(out, "{},{}", s.left, s.right).unwrap();
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_table(path: Option<&Path>, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    match path {
        Some(p) => fs::write(p, out).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}
