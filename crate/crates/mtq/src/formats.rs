//! Text formats for states and MAP binding patterns.
//!
//! State file:
//!
//! ```text
//! n=2
//! 0 7.0710678118654746e-1 0.0000000000000000e0
//! 3 7.0710678118654746e-1 0.0000000000000000e0
//! ```
//!
//! Pattern file:
//!
//! ```text
//! pf=13 rows=4 seam=3
//! bind 0 0 0 1
//! ```

use std::fmt::Write as _;

use mtq_core::lattice::{LatticeGeometry, MapBindingPattern, SiteIndex};
use mtq_core::qstate::{PureState, MAX_QUBITS};
use mtq_core::Complex64;

use crate::error::{CliError, CliResult};

fn format_err(source: &str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

/// Significant lines with their 1-based line numbers. Blank lines and `#`
/// comments are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Writes every nonzero amplitude with 17 significant digits, which
/// round-trips `f64` exactly.
pub fn write_state(state: &PureState) -> String {
    let mut out = format!("n={}\n", state.num_qubits());
    for (i, z) in state.amplitudes().iter().enumerate() {
        if z.re != 0.0 || z.im != 0.0 {
            let _ = writeln!(out, "{i} {:.16e} {:.16e}", z.re, z.im);
        }
    }
    out
}

pub fn parse_state(text: &str, source: &str) -> CliResult<PureState> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| format_err(source, 1, "missing `n=<qubits>` header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format_err(source, hl, "expected `n=<qubits>`"))?;
    if n == 0 || n > MAX_QUBITS {
        return Err(format_err(
            source,
            hl,
            format!("qubit count must be in 1..={MAX_QUBITS}"),
        ));
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut seen = vec![false; dim];
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(format_err(source, ln, "expected `index re im`"));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| format_err(source, ln, format!("bad index `{}`", fields[0])))?;
        if index >= dim {
            return Err(format_err(
                source,
                ln,
                format!("index {index} exceeds dimension {dim}"),
            ));
        }
        if std::mem::replace(&mut seen[index], true) {
            return Err(format_err(
                source,
                ln,
                format!("index {index} listed twice"),
            ));
        }
        let num = |s: &str| -> CliResult<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format_err(source, ln, format!("bad number `{s}`")))
        };
        amps[index] = Complex64::new(num(fields[1])?, num(fields[2])?);
    }
    PureState::new(n, amps).map_err(|e| format_err(source, hl, e.to_string()))
}

pub fn write_pattern(pattern: &MapBindingPattern) -> String {
    let g = pattern.geometry();
    let mut out = format!(
        "pf={} rows={} seam={}",
        g.num_protofilaments(),
        g.num_rows(),
        g.seam_shift()
    );
    if g.diagonal_neighbors() {
        out.push_str(" diagonals=1");
    }
    out.push('\n');
    for e in pattern.bound_edges() {
        let (a, b) = e.endpoints();
        let _ = writeln!(
            out,
            "bind {} {} {} {}",
            a.protofilament, a.row, b.protofilament, b.row
        );
    }
    out
}

/// Parses a pattern file. `diagonals=1` in the header enables diagonal
/// contacts; the flag defaults to off.
pub fn parse_pattern(text: &str, source: &str) -> CliResult<MapBindingPattern> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| format_err(source, 1, "missing `pf=<n> rows=<R> seam=<s>` header"))?;
    let (mut pf, mut rows, mut seam, mut diagonals) = (None, None, None, false);
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format_err(source, hl, format!("bad header field `{token}`")))?;
        let parsed: usize = value
            .parse()
            .map_err(|_| format_err(source, hl, format!("bad value for `{key}`")))?;
        match key {
            "pf" => pf = Some(parsed),
            "rows" => rows = Some(parsed),
            "seam" => seam = Some(parsed),
            "diagonals" if parsed <= 1 => diagonals = parsed == 1,
            _ => {
                return Err(format_err(
                    source,
                    hl,
                    format!("unknown header field `{key}`"),
                ))
            }
        }
    }
    let (pf, rows, seam) = match (pf, rows, seam) {
        (Some(p), Some(r), Some(s)) => (p, r, s),
        _ => return Err(format_err(source, hl, "header needs pf, rows and seam")),
    };
    let geometry = LatticeGeometry::with_params(pf, rows, seam)
        .map_err(|e| format_err(source, hl, e.to_string()))?
        .with_diagonals(diagonals);
    let mut pattern = MapBindingPattern::empty(geometry);
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "bind" {
            return Err(format_err(source, ln, "expected `bind pf1 row1 pf2 row2`"));
        }
        let mut nums = [0usize; 4];
        for (slot, f) in nums.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| format_err(source, ln, format!("bad integer `{f}`")))?;
        }
        pattern
            .bind(
                SiteIndex::new(nums[0], nums[1]),
                SiteIndex::new(nums[2], nums[3]),
            )
            .map_err(|e| format_err(source, ln, e.to_string()))?;
    }
    Ok(pattern)
}
