use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{MetricRow, SimulationTrace};
use crate::error::{Error, Result};
use crate::game::Side;
use crate::oracles::NeCertificate;

pub const METRICS_HEADER: &str =
    "t,side,agent,avg_regret,consensus_err,dist_to_ne,gap_avg,t1_bound_avg,h_bound";

/// A float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// JSON formatter writing every float through [`fmt_f64`].
struct SigFormatter;

impl serde_json::ser::Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// One JSON line, floats at 17 significant digits.
pub fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

pub fn format_metrics(rows: &[MetricRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let dist = r.dist_to_ne.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.side,
            r.agent,
            fmt_f64(r.avg_regret),
            fmt_f64(r.consensus_err),
            dist,
            fmt_f64(r.gap_avg),
            fmt_f64(r.t1_bound_avg),
            fmt_f64(r.h_bound),
        ));
    }
    out
}

/// Parses a metrics file. The header must match [`METRICS_HEADER`] exactly.
pub fn parse_metrics(text: &str) -> Result<Vec<MetricRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != METRICS_HEADER {
        return Err(Error::Config(format!("unexpected metrics header: {header:?}")));
    }
    let num = |s: &str, line: usize| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Config(format!("line {line}: bad number {s:?}")))
    };
    let int = |s: &str, line: usize| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Config(format!("line {line}: bad integer {s:?}")))
    };
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let n = k + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::Config(format!("line {n}: expected 9 fields, got {}", f.len())));
        }
        let side = u8::try_from(int(f[1], n)?)
            .ok()
            .and_then(Side::from_number)
            .ok_or_else(|| Error::Config(format!("line {n}: side must be 1 or 2")))?;
        rows.push(MetricRow {
            t: int(f[0], n)?,
            side,
            agent: int(f[2], n)?,
            avg_regret: num(f[3], n)?,
            consensus_err: num(f[4], n)?,
            dist_to_ne: if f[5].is_empty() { None } else { Some(num(f[5], n)?) },
            gap_avg: num(f[6], n)?,
            t1_bound_avg: num(f[7], n)?,
            h_bound: num(f[8], n)?,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    t: usize,
    x1: &'a [Vec<f64>],
    x2: &'a [Vec<f64>],
    v1: &'a [Vec<f64>],
    v2: &'a [Vec<f64>],
    u1: &'a [Vec<f64>],
    u2: &'a [Vec<f64>],
}

/// One record per stored snapshot. `u1` holds side one's estimates of side two.
pub fn format_trace(trace: &SimulationTrace) -> Result<String> {
    let mut out = String::new();
    for s in &trace.snapshots {
        out.push_str(&json_line(&TraceRecord {
            t: s.t,
            x1: &s.x[0],
            x2: &s.x[1],
            v1: &s.v[0],
            v2: &s.v[1],
            u1: &s.u[0],
            u2: &s.u[1],
        })?);
    }
    Ok(out)
}

/// Certificate record as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub game: String,
    #[serde(flatten)]
    pub certificate: NeCertificate,
}

pub fn write_certificate(path: &Path, record: &CertificateRecord) -> Result<()> {
    write_file(path, &json_line(record)?)
}

/// Reads the first record of a certificate file.
pub fn read_certificate(path: &Path) -> Result<CertificateRecord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Config(format!("{}: empty certificate file", path.display())))?;
    serde_json::from_str(line).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 0.0, 123456.789, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn metrics_round_trip() {
        let rows = vec![
            MetricRow {
                t: 10,
                side: Side::Two,
                agent: 3,
                avg_regret: 0.1,
                consensus_err: 1e-3,
                dist_to_ne: None,
                gap_avg: 0.25,
                t1_bound_avg: 12.0,
                h_bound: 3.5,
            },
            MetricRow {
                dist_to_ne: Some(0.02),
                side: Side::One,
                ..MetricRow {
                    t: 20,
                    side: Side::One,
                    agent: 0,
                    avg_regret: -0.0,
                    consensus_err: 0.0,
                    dist_to_ne: None,
                    gap_avg: 1.0,
                    t1_bound_avg: 2.0,
                    h_bound: 3.0,
                }
            },
        ];
        let text = format_metrics(&rows);
        assert!(text.starts_with(METRICS_HEADER));
        assert!(text.lines().nth(1).unwrap().contains(",,"));
        assert_eq!(parse_metrics(&text).unwrap(), rows);
        assert!(parse_metrics("t,side\n1,1\n").is_err());
    }

    #[test]
    fn json_floats_use_seventeen_digits() {
        let line = json_line(&vec![0.5, 1.0]).unwrap();
        assert_eq!(line, "[5.0000000000000000e-1,1.0000000000000000e0]\n");
        let back: Vec<f64> = serde_json::from_str(&line).unwrap();
        assert_eq!(back, vec![0.5, 1.0]);
    }

    #[test]
    fn certificate_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let rec = CertificateRecord {
            game: "matching-pennies".into(),
            certificate: NeCertificate {
                x1: vec![0.5, 0.5],
                x2: vec![0.5, 0.5],
                value: 0.0,
                gap: 1e-9,
                iterations: 25,
                tol: 1e-6,
                final_iterate: None,
            },
        };
        write_certificate(&path, &rec).unwrap();
        assert_eq!(read_certificate(&path).unwrap(), rec);
    }
}
