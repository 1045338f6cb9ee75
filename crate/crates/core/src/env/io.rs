//! Trace serialization for the analyze CLI and test fixtures.
//!
//! Format: header line `T K`, then either
//! `SEGMENTS n` followed by n lines `start_round <matrix file>` (paths
//! resolved relative to the trace file), or `EXPLICIT` followed by T inline
//! matrices in the matrix text format.

use super::EnvironmentTrace;
use crate::error::CoreError;
use crate::matrix::PreferenceMatrix;
use std::fs;
use std::path::Path;

/// Write a trace to `path`. Piecewise traces are written as SEGMENTS with
/// one sibling matrix file per segment; other providers are written EXPLICIT.
pub fn write_trace(trace: &EnvironmentTrace, path: &Path) -> Result<(), CoreError> {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", trace.horizon(), trace.k()));
    if let Some(starts) = trace.segment_starts() {
        out.push_str(&format!("SEGMENTS {}\n", starts.len()));
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("trace");
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        for (i, start) in starts.iter().enumerate() {
            let name = format!("{stem}_seg{:04}.txt", i + 1);
            fs::write(dir.join(&name), trace.matrix_at(*start).to_text())?;
            out.push_str(&format!("{start} {name}\n"));
        }
    } else {
        out.push_str("EXPLICIT\n");
        for t in 1..=trace.horizon() {
            out.push_str(&trace.matrix_at(t).to_text());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a trace written by [`write_trace`] (or assembled by hand).
pub fn read_trace(path: &Path) -> Result<EnvironmentTrace, CoreError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Parse("empty trace file".into()))?;
    let mut parts = header.split_whitespace();
    let horizon: usize = parts
        .next()
        .ok_or_else(|| CoreError::Parse("missing T in header".into()))?
        .parse()
        .map_err(|e| CoreError::Parse(format!("bad T: {e}")))?;
    let k: usize = parts
        .next()
        .ok_or_else(|| CoreError::Parse("missing K in header".into()))?
        .parse()
        .map_err(|e| CoreError::Parse(format!("bad K: {e}")))?;

    let kind = lines
        .next()
        .ok_or_else(|| CoreError::Parse("missing provider line".into()))?;
    if let Some(rest) = kind.strip_prefix("SEGMENTS") {
        let n: usize = rest
            .trim()
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad segment count: {e}")))?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let mut segments = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| CoreError::Parse("missing segment line".into()))?;
            let mut p = line.split_whitespace();
            let start: usize = p
                .next()
                .ok_or_else(|| CoreError::Parse("missing segment start".into()))?
                .parse()
                .map_err(|e| CoreError::Parse(format!("bad segment start: {e}")))?;
            let file = p
                .next()
                .ok_or_else(|| CoreError::Parse("missing segment matrix file".into()))?;
            let m = PreferenceMatrix::from_text(&fs::read_to_string(dir.join(file))?)?;
            if m.k() != k {
                return Err(CoreError::Parse(format!(
                    "segment matrix K={} does not match header K={k}",
                    m.k()
                )));
            }
            segments.push((start, m));
        }
        EnvironmentTrace::piecewise(horizon, segments)
    } else if kind.trim() == "EXPLICIT" {
        let rest: Vec<&str> = lines.collect();
        // Each matrix occupies K+1 lines: its own arm-count line plus K rows.
        let per = k + 1;
        if rest.len() < horizon * per {
            return Err(CoreError::Parse(format!(
                "expected {} lines of matrices, got {}",
                horizon * per,
                rest.len()
            )));
        }
        let mut matrices = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let chunk = rest[t * per..(t + 1) * per].join("\n");
            let m = PreferenceMatrix::from_text(&chunk)?;
            if m.k() != k {
                return Err(CoreError::Parse(format!(
                    "matrix {} has K={} but header says {k}",
                    t + 1,
                    m.k()
                )));
            }
            matrices.push(m);
        }
        EnvironmentTrace::explicit(matrices)
    } else {
        Err(CoreError::Parse(format!(
            "unknown provider kind: {kind:?}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{condorcet_lower_bound_trace, switching_btl_trace};
    use crate::rng::{Purpose, RngStream};

    #[test]
    fn segments_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = RngStream::for_trial(1, 0, Purpose::Environment);
        let tr = switching_btl_trace(4, 500, &[100, 200], &mut rng).unwrap();
        let path = dir.path().join("trace.txt");
        write_trace(&tr, &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back.horizon(), 500);
        assert_eq!(back.k(), 4);
        for t in [1, 99, 100, 150, 200, 500] {
            assert!(!tr.matrix_at(t).differs_from(back.matrix_at(t), 1e-15));
            assert_eq!(tr.winner_at(t), back.winner_at(t));
        }
    }

    #[test]
    fn explicit_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = RngStream::for_trial(2, 0, Purpose::Environment);
        let tr = condorcet_lower_bound_trace(50, 0.01, &mut rng).unwrap();
        let path = dir.path().join("mix.txt");
        write_trace(&tr, &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back.horizon(), 50);
        for t in 1..=50 {
            assert!(!tr.matrix_at(t).differs_from(back.matrix_at(t), 1e-15));
        }
    }
}
