//! PointSet files.
//!
//! Binary layout: the ASCII header
//!
//! ```text
//! MODONE1
//! alpha=<decimal|external>
//! beta=<decimal|external>
//! N=<count>
//! err_bound=<decimal>
//! bits=<working bits, 0 for external sets>
//! <empty line>
//! ```
//!
//! followed by `N` little-endian `f64` values. The text format carries the
//! same header with `# ` prefixes and then one exact decimal per line: the
//! 128-bit fixed-point fraction for generated sets (lossless), or the
//! shortest round-trip representation of the `f64` for external sets.

use std::io::{BufRead, BufReader, Read, Write};

use rug::Integer;

use super::{fixed_to_f64, PointSet, PointSource, SequenceSpec, F64_HALF_ULP};
use crate::error::{Error, Result};

pub const MAGIC: &str = "MODONE1";

struct Header {
    alpha: Option<f64>,
    beta: Option<f64>,
    n: usize,
    err_bound: f64,
    bits: u32,
}

fn header_lines(points: &PointSet) -> Vec<String> {
    let (alpha, beta, bits) = match points.source() {
        PointSource::Generated { spec, bits } => (format!("{:?}", spec.alpha), format!("{:?}", spec.beta), *bits),
        PointSource::External => ("external".to_string(), "external".to_string(), 0),
    };
    vec![
        format!("alpha={alpha}"),
        format!("beta={beta}"),
        format!("N={}", points.len()),
        format!("err_bound={:?}", points.err_bound()),
        format!("bits={bits}"),
    ]
}

fn parse_header_line(header: &mut Header, line: &str) -> Result<()> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| Error::Format(format!("malformed header line {line:?}")))?;
    let bad = |what: &str| Error::Format(format!("bad {what} value {value:?}"));
    match key.trim() {
        "alpha" => header.alpha = if value == "external" { None } else { Some(value.parse().map_err(|_| bad("alpha"))?) },
        "beta" => header.beta = if value == "external" { None } else { Some(value.parse().map_err(|_| bad("beta"))?) },
        "N" => header.n = value.parse().map_err(|_| bad("N"))?,
        "err_bound" => header.err_bound = value.parse().map_err(|_| bad("err_bound"))?,
        "bits" => header.bits = value.parse().map_err(|_| bad("bits"))?,
        other => return Err(Error::Format(format!("unknown header key {other:?}"))),
    }
    Ok(())
}

fn empty_header() -> Header {
    Header {
        alpha: None,
        beta: None,
        n: 0,
        err_bound: 0.0,
        bits: 0,
    }
}

fn source_of(header: &Header) -> Result<PointSource> {
    match (header.alpha, header.beta) {
        (Some(alpha), Some(beta)) => Ok(PointSource::Generated {
            spec: SequenceSpec::new(alpha, beta, header.n)?,
            bits: header.bits,
        }),
        _ => Ok(PointSource::External),
    }
}

pub fn write_binary<W: Write>(points: &PointSet, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    for line in header_lines(points) {
        writeln!(out, "{line}")?;
    }
    writeln!(out)?;
    for v in points.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(input: R) -> Result<PointSet> {
    let mut input = BufReader::new(input);
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.trim_end() != MAGIC {
        return Err(Error::Format(format!("missing {MAGIC} magic")));
    }
    let mut header = empty_header();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::Format("truncated header".into()));
        }
        let l = line.trim_end();
        if l.is_empty() {
            break;
        }
        parse_header_line(&mut header, l)?;
    }
    let mut values = Vec::with_capacity(header.n);
    let mut buf = [0u8; 8];
    for _ in 0..header.n {
        input
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("fewer values than the header's N".into()))?;
        values.push(f64::from_le_bytes(buf));
    }
    let source = source_of(&header)?;
    let mut ps = PointSet::external(values, header.err_bound)?;
    if let PointSource::Generated { .. } = source {
        let fixed_err = (header.err_bound - F64_HALF_ULP).max(0.0);
        ps = PointSet::from_parts(ps.values().to_vec(), None, header.err_bound, fixed_err, source);
    }
    Ok(ps)
}

/// Exact decimal expansion of `fixed / 2^128`.
fn fixed_to_decimal(fixed: u128) -> String {
    if fixed == 0 {
        return "0".into();
    }
    let scaled = Integer::from(fixed) * Integer::from(Integer::u_pow_u(5, 128));
    let digits = scaled.to_string();
    let mut frac = format!("{digits:0>128}");
    while frac.ends_with('0') {
        frac.pop();
    }
    format!("0.{frac}")
}

/// Parses a decimal in `[0, 1)` to `floor(value·2^128)`; exact for outputs of
/// [`fixed_to_decimal`].
fn decimal_to_fixed(s: &str) -> Result<u128> {
    let bad = || Error::Format(format!("bad decimal {s:?}"));
    let frac = match s.split_once('.') {
        Some(("0", f)) => f,
        None if s == "0" => return Ok(0),
        _ => return Err(bad()),
    };
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: Integer = frac.parse::<Integer>().map_err(|_| bad())? << 128u32;
    let denom = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
    let q = numer / denom;
    q.to_u128().ok_or_else(bad)
}

pub fn write_text<W: Write>(points: &PointSet, mut out: W) -> Result<()> {
    writeln!(out, "# {MAGIC}")?;
    for line in header_lines(points) {
        writeln!(out, "# {line}")?;
    }
    match points.fixed() {
        Some(fixed) => {
            for f in fixed {
                writeln!(out, "{}", fixed_to_decimal(*f))?;
            }
        }
        None => {
            for v in points.values() {
                writeln!(out, "{v:?}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_text<R: Read>(input: R) -> Result<PointSet> {
    let input = BufReader::new(input);
    let mut header = empty_header();
    let mut saw_magic = false;
    let mut raw = Vec::new();
    for line in input.lines() {
        let line = line?;
        let l = line.trim();
        if let Some(h) = l.strip_prefix('#') {
            let h = h.trim();
            if h == MAGIC {
                saw_magic = true;
            } else {
                parse_header_line(&mut header, h)?;
            }
        } else if !l.is_empty() {
            raw.push(l.to_string());
        }
    }
    if !saw_magic {
        return Err(Error::Format(format!("missing {MAGIC} magic")));
    }
    if raw.len() != header.n {
        return Err(Error::Format(format!("header says N={} but {} values follow", header.n, raw.len())));
    }
    let source = source_of(&header)?;
    match source {
        PointSource::Generated { .. } => {
            let fixed: Vec<u128> = raw.iter().map(|s| decimal_to_fixed(s)).collect::<Result<_>>()?;
            let values = fixed.iter().map(|f| fixed_to_f64(*f)).collect();
            let fixed_err = (header.err_bound - F64_HALF_ULP).max(0.0);
            Ok(PointSet::from_parts(values, Some(fixed), header.err_bound, fixed_err, source))
        }
        PointSource::External => {
            let values = raw
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Format(format!("bad value {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            PointSet::external(values, header.err_bound)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{frac_parts, PrecisionPolicy};

    #[test]
    fn decimal_round_trip() {
        for f in [0u128, 1, 1 << 127, u128::MAX, 0x1234_5678_9abc_def0_1122_3344_5566_7788] {
            assert_eq!(decimal_to_fixed(&fixed_to_decimal(f)).unwrap(), f);
        }
        assert_eq!(fixed_to_decimal(1 << 127), "0.5");
    }

    #[test]
    fn generated_set_round_trips() {
        let spec = SequenceSpec::power(2.5, 50).unwrap();
        let ps = frac_parts(&spec, &PrecisionPolicy::default()).unwrap();

        let mut bin = Vec::new();
        write_binary(&ps, &mut bin).unwrap();
        assert!(bin.starts_with(b"MODONE1\n"));
        let back = read_binary(&bin[..]).unwrap();
        assert_eq!(back.values(), ps.values());
        assert_eq!(back.spec(), ps.spec());
        assert_eq!(back.err_bound(), ps.err_bound());

        let mut txt = Vec::new();
        write_text(&ps, &mut txt).unwrap();
        let back = read_text(&txt[..]).unwrap();
        assert_eq!(back.fixed(), ps.fixed());
        assert_eq!(back.values(), ps.values());
    }

    #[test]
    fn external_set_round_trips() {
        let ps = PointSet::external(vec![0.0, 0.1, 0.75, 0.999], 1e-17).unwrap();
        let mut bin = Vec::new();
        write_binary(&ps, &mut bin).unwrap();
        assert_eq!(read_binary(&bin[..]).unwrap(), ps);
        let mut txt = Vec::new();
        write_text(&ps, &mut txt).unwrap();
        assert_eq!(read_text(&txt[..]).unwrap(), ps);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_binary(&b"NOPE\n"[..]).is_err());
        assert!(read_binary(&b"MODONE1\nN=2\n\n\x00\x00"[..]).is_err());
        assert!(read_text(&b"# MODONE1\n# N=2\n0.5\n"[..]).is_err());
        assert!(read_text(&b"# MODONE1\n# frob=2\n"[..]).is_err());
    }
}
