//! Text state-file format.
//!
//! ```text
//! macrostab-state v1 n_sites=<N>
//! <index> <re> <im>        (2^N lines, increasing index)
//! ```
//!
//! Values are written with 17 significant digits, which round-trips `f64`
//! (and therefore `f32`) exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex;

use super::lattice::{Geometry, LatticeSpec};
use super::state::StateVector;
use crate::error::{bail, Result};
use crate::real::Real;

pub const STATE_HEADER: &str = "macrostab-state v1";

pub fn export_state<T: Real, W: Write>(state: &StateVector<T>, mut out: W) -> Result<()> {
    writeln!(out, "{STATE_HEADER} n_sites={}", state.n_sites())?;
    for (i, a) in state.amplitudes().iter().enumerate() {
        writeln!(out, "{i} {:.16e} {:.16e}", a.re.as_f64(), a.im.as_f64())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads only the header and returns the site count.
pub fn read_state_header<R: BufRead>(mut input: R) -> Result<usize> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    parse_header(&line)
}

fn parse_header(line: &str) -> Result<usize> {
    let rest = line
        .trim_end()
        .strip_prefix(STATE_HEADER)
        .ok_or_else(|| crate::Error::Format(format!("bad state header {line:?}")))?;
    let n = rest
        .trim()
        .strip_prefix("n_sites=")
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| crate::Error::Format(format!("bad n_sites in header {line:?}")))?;
    Ok(n)
}

/// Parses a state file onto an open chain. Amplitudes whose norm is already
/// within 1e-12 of one are kept bit-for-bit; others are renormalized.
pub fn import_state<T: Real, R: BufRead>(input: R) -> Result<StateVector<T>> {
    import_state_with(input, Geometry::OpenChain)
}

pub fn import_state_with<T: Real, R: BufRead>(
    input: R,
    geometry: Geometry,
) -> Result<StateVector<T>> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(l) => l?,
        None => bail!(Format, "empty state file"),
    };
    let n = parse_header(&header)?;
    let lattice = LatticeSpec::new(n, geometry).map_err(|e| crate::Error::Format(e.to_string()))?;
    let mut amplitudes = Vec::with_capacity(lattice.dim());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(idx), Some(re), Some(im), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            bail!(Format, "expected `<index> <re> <im>`, got {line:?}");
        };
        let idx: usize = idx
            .parse()
            .map_err(|_| crate::Error::Format(format!("bad index in {line:?}")))?;
        if idx != amplitudes.len() {
            bail!(Format, "expected index {}, found {idx}", amplitudes.len());
        }
        let parse = |s: &str| -> Result<T> {
            let v: f64 = s
                .parse()
                .map_err(|_| crate::Error::Format(format!("bad number {s:?}")))?;
            if !v.is_finite() {
                bail!(Format, "non-finite amplitude component {s:?}");
            }
            Ok(T::lit(v))
        };
        amplitudes.push(Complex::new(parse(re)?, parse(im)?));
    }
    if amplitudes.len() != lattice.dim() {
        bail!(
            Format,
            "{n} sites need {} amplitudes, file has {}",
            lattice.dim(),
            amplitudes.len()
        );
    }
    let state = StateVector::from_amplitudes(lattice, amplitudes)?;
    if state.is_normalized(T::tol(1e-12)) {
        return Ok(state);
    }
    let renormalized = state
        .normalized()
        .map_err(|e| crate::Error::Format(e.to_string()))?;
    if !renormalized.is_normalized(T::tol(1e-6)) {
        bail!(Format, "amplitudes could not be normalized");
    }
    Ok(renormalized)
}

pub fn write_state_file<T: Real>(state: &StateVector<T>, path: impl AsRef<Path>) -> Result<()> {
    export_state(state, BufWriter::new(File::create(path)?))
}

pub fn read_state_file<T: Real>(path: impl AsRef<Path>) -> Result<StateVector<T>> {
    import_state(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::make_ghz;

    #[test]
    fn ghz_round_trip_is_bit_exact() {
        let ghz = make_ghz::<f64>(LatticeSpec::open(2).unwrap()).unwrap();
        let mut buf = Vec::new();
        export_state(&ghz, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("macrostab-state v1 n_sites=2\n0 "));
        let back: StateVector<f64> = import_state(buf.as_slice()).unwrap();
        assert_eq!(back, ghz);
    }

    #[test]
    fn wrong_amplitude_count() {
        let text = "macrostab-state v1 n_sites=2\n0 1 0\n1 0 0\n2 0 0\n";
        let r: Result<StateVector<f64>> = import_state(text.as_bytes());
        assert!(matches!(r, Err(crate::Error::Format(_))));
    }

    #[test]
    fn unnormalized_input_is_renormalized() {
        let text = "macrostab-state v1 n_sites=2\n0 2 0\n1 0 0\n2 0 0\n3 0 0\n";
        let s: StateVector<f64> = import_state(text.as_bytes()).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn malformed_files() {
        for text in [
            "",
            "macrostab-state v2 n_sites=1\n0 1 0\n1 0 0\n",
            "macrostab-state v1 n_sites=x\n",
            "macrostab-state v1 n_sites=1\n1 1 0\n0 0 0\n",
            "macrostab-state v1 n_sites=1\n0 1\n1 0 0\n",
            "macrostab-state v1 n_sites=1\n0 0 0\n1 0 0\n",
            "macrostab-state v1 n_sites=1\n0 nan 0\n1 0 0\n",
        ] {
            let r: Result<StateVector<f64>> = import_state(text.as_bytes());
            assert!(matches!(r, Err(crate::Error::Format(_))), "{text:?}");
        }
    }
}
