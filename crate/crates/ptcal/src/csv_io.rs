//! Score files (`score,label[,logit]`) and reliability tables.
//!
//! Lines starting with `#` before the header are comments; the tool uses them
//! to carry the run header of generated files. LF and CRLF line endings are
//! both accepted. Written files always use LF and the shortest decimal form
//! that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ptcal_core::metrics::BinStats;
use ptcal_core::{Dataset, Label, Probability, ScoredSample};

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{}: {cause}", path.display())]
    Io {
        path: PathBuf,
        cause: std::io::Error,
    },
    #[error("{}line {line}: {msg}", origin.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        origin: Option<PathBuf>,
        line: usize,
        msg: String,
    },
}

impl CsvError {
    fn at(line: usize, msg: impl Into<String>) -> Self {
        CsvError::Parse {
            origin: None,
            line,
            msg: msg.into(),
        }
    }

    fn with_origin(self, path: &Path) -> Self {
        match self {
            CsvError::Parse { line, msg, .. } => CsvError::Parse {
                origin: Some(path.to_path_buf()),
                line,
                msg,
            },
            other => other,
        }
    }
}

pub const SCORE_HEADER: &str = "score,label";
pub const SCORE_HEADER_WITH_LOGIT: &str = "score,label,logit";
pub const RELIABILITY_HEADER: &str = "bin_lo,bin_hi,count,mean_conf,accuracy";

/// Numbered lines with the line terminator removed.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

/// Leading `#` lines, without the `#` and one following space.
pub fn comments(text: &str) -> Vec<&str> {
    numbered_lines(text)
        .map(|(_, l)| l)
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            let l = &l[1..];
            l.strip_prefix(' ').unwrap_or(l)
        })
        .collect()
}

type Line<'a> = (usize, &'a str);

/// Skips comments and returns the header line and the remaining lines.
fn split_header(text: &str) -> Result<(Line<'_>, impl Iterator<Item = Line<'_>>), CsvError> {
    let mut lines = numbered_lines(text).skip_while(|(_, l)| l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CsvError::at(1, "missing header"))?;
    Ok((header, lines))
}

fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64, CsvError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CsvError::at(line, format!("{what} {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(CsvError::at(
            line,
            format!("{what} {field:?} is not finite"),
        ));
    }
    Ok(v)
}

/// Parses a score file already in memory.
pub fn parse_csv(text: &str, name: &str) -> Result<Dataset, CsvError> {
    let ((hline, header), rows) = split_header(text)?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if !matches!(
        cols.as_slice(),
        ["score", "label"] | ["score", "label", "logit"]
    ) {
        return Err(CsvError::at(
            hline,
            format!("bad header {header:?}, expected \"{SCORE_HEADER}\" or \"{SCORE_HEADER_WITH_LOGIT}\""),
        ));
    }
    let width = cols.len();

    let mut samples = Vec::new();
    for (line, row) in rows {
        if row.trim().is_empty() {
            return Err(CsvError::at(line, "empty row"));
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != width {
            return Err(CsvError::at(
                line,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        let score = parse_f64(fields[0], "score", line)?;
        let score = Probability::new(score)
            .map_err(|_| CsvError::at(line, format!("score {score} outside [0, 1]")))?;
        let label = match fields[1].trim() {
            "0" => Label::Negative,
            "1" => Label::Positive,
            other => return Err(CsvError::at(line, format!("label {other:?} is not 0 or 1"))),
        };
        let logit = match fields.get(2).map(|f| f.trim()) {
            None | Some("") => None,
            Some(f) => Some(parse_f64(f, "logit", line)?),
        };
        let sample = ScoredSample::new(score, logit, label)
            .map_err(|e| CsvError::at(line, e.to_string()))?;
        samples.push(sample);
    }
    Ok(Dataset::new(name, samples))
}

pub fn load_csv(path: &Path) -> Result<Dataset, CsvError> {
    let text = fs::read_to_string(path).map_err(|cause| CsvError::Io {
        path: path.to_path_buf(),
        cause,
    })?;
    parse_csv(&text, &path.display().to_string()).map_err(|e| e.with_origin(path))
}

/// Canonical text of a dataset: the logit column is written when any sample
/// carries a logit, left empty for those that do not.
pub fn write_csv(d: &Dataset) -> String {
    let mut out = String::new();
    write_rows(&mut out, d, None);
    out
}

/// Score rows plus one extra column per sample.
pub fn write_csv_with_column(d: &Dataset, name: &str, extra: &[f64]) -> String {
    assert_eq!(d.len(), extra.len());
    let mut out = String::new();
    write_rows(&mut out, d, Some((name, extra)));
    out
}

fn write_rows(out: &mut String, d: &Dataset, extra: Option<(&str, &[f64])>) {
    let with_logit = d.samples.iter().any(|s| s.logit().is_some());
    out.push_str(if with_logit {
        SCORE_HEADER_WITH_LOGIT
    } else {
        SCORE_HEADER
    });
    if let Some((name, _)) = extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, s) in d.samples.iter().enumerate() {
        let _ = write!(out, "{},{}", s.score().get(), s.label().is_positive() as u8);
        if with_logit {
            out.push(',');
            if let Some(z) = s.logit() {
                let _ = write!(out, "{z}");
            }
        }
        if let Some((_, values)) = extra {
            let _ = write!(out, ",{}", values[i]);
        }
        out.push('\n');
    }
}

pub fn write_reliability(bins: &[BinStats]) -> String {
    let mut out = String::from(RELIABILITY_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for b in bins {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            b.lo,
            b.hi,
            b.count,
            opt(b.mean_conf),
            opt(b.accuracy)
        );
    }
    out
}

pub fn parse_reliability(text: &str) -> Result<Vec<BinStats>, CsvError> {
    let ((hline, header), rows) = split_header(text)?;
    if header.trim() != RELIABILITY_HEADER {
        return Err(CsvError::at(
            hline,
            format!("bad header {header:?}, expected \"{RELIABILITY_HEADER}\""),
        ));
    }
    let mut bins = Vec::new();
    for (line, row) in rows {
        let f: Vec<&str> = row.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(CsvError::at(
                line,
                format!("expected 5 fields, found {}", f.len()),
            ));
        }
        let count: usize = f[2]
            .parse()
            .map_err(|_| CsvError::at(line, format!("count {:?} is not a whole number", f[2])))?;
        let opt = |s: &str, what| -> Result<Option<f64>, CsvError> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s, what, line).map(Some)
            }
        };
        bins.push(BinStats {
            lo: parse_f64(f[0], "bin_lo", line)?,
            hi: parse_f64(f[1], "bin_hi", line)?,
            count,
            mean_conf: opt(f[3], "mean_conf")?,
            accuracy: opt(f[4], "accuracy")?,
        });
    }
    Ok(bins)
}
