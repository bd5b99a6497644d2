//! Text encodings: point-pattern CSV, envelope curves and posterior tables.

use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::posterior::{ErrorEstimates, PosteriorSummary};
use crate::space::{MarkedPoint, PointPattern, Window};
use crate::summaries::EnvelopeResult;

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// One parsed row of a pattern file; `line` is 1-based and counts the header.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternRow {
    pub line: usize,
    pub x: f64,
    pub y: f64,
    pub angle: Option<f64>,
}

/// Rows of a CSV with header `x,y` or `x,y,angle`, unvalidated against any window.
pub fn read_pattern_rows<R: Read>(r: R) -> Result<Vec<PatternRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let marked = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "y"] => false,
        ["x", "y", "angle"] => true,
        _ => return invalid(format!("pattern header must be x,y or x,y,angle, got {}", header.join(","))),
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            let f = rec.get(k).unwrap_or("");
            let v: f64 =
                f.parse().map_err(|_| Error::InvalidArgument(format!("line {line}: {f:?} is not a number")))?;
            if !v.is_finite() {
                return invalid(format!("line {line}: non-finite value {f:?}"));
            }
            Ok(v)
        };
        rows.push(PatternRow { line, x: num(0)?, y: num(1)?, angle: if marked { Some(num(2)?) } else { None } });
    }
    Ok(rows)
}

/// Builds a pattern, listing every row that falls outside `window`.
pub fn pattern_from_rows(rows: &[PatternRow], window: Window) -> Result<PointPattern> {
    let bad: Vec<String> = rows.iter().filter(|r| !window.contains([r.x, r.y])).map(|r| r.line.to_string()).collect();
    if !bad.is_empty() {
        return invalid(format!("points outside the window on lines {}", bad.join(",")));
    }
    let points = rows
        .iter()
        .map(|r| match r.angle {
            Some(a) => MarkedPoint::with_angle(r.x, r.y, a),
            None => MarkedPoint::new(r.x, r.y),
        })
        .collect();
    PointPattern::new(points, window)
}

pub fn read_pattern<R: Read>(r: R, window: Window) -> Result<PointPattern> {
    pattern_from_rows(&read_pattern_rows(r)?, window)
}

pub fn write_pattern<W: Write>(pattern: &PointPattern, mut w: W) -> Result<()> {
    let marked = pattern.is_marked();
    writeln!(w, "{}", if marked { "x,y,angle" } else { "x,y" })?;
    for p in pattern.points() {
        match (marked, p.angle) {
            (true, Some(a)) => writeln!(w, "{},{},{}", fmt_f64(p.loc[0]), fmt_f64(p.loc[1]), fmt_f64(a))?,
            _ => writeln!(w, "{},{}", fmt_f64(p.loc[0]), fmt_f64(p.loc[1]))?,
        }
    }
    Ok(())
}

/// Long format: `statistic,u,observed,lower,upper,theoretical`.
pub fn write_envelope_csv<W: Write>(env: &EnvelopeResult, mut w: W) -> Result<()> {
    writeln!(w, "statistic,u,observed,lower,upper,theoretical")?;
    for c in &env.curves {
        for i in 0..c.u.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.statistic,
                fmt_f64(c.u[i]),
                fmt_f64(c.observed[i]),
                fmt_f64(c.lower[i]),
                fmt_f64(c.upper[i]),
                fmt_f64(c.theoretical[i])
            )?;
        }
    }
    Ok(())
}

fn level_label(q: f64) -> String {
    format!("q{}", fmt_f64(q * 100.0))
}

/// One row per parameter, keyed by `label` (e.g. an algorithm name or range).
pub fn write_summary_csv<W: Write>(rows: &[(String, &PosteriorSummary)], mut w: W) -> Result<()> {
    let Some((_, first)) = rows.first() else {
        return invalid("no summaries to write");
    };
    let levels: Vec<String> = first.levels.iter().map(|q| level_label(*q)).collect();
    writeln!(w, "label,parameter,n,{},mean,map,bandwidth,whisker_low,whisker_high", levels.join(","))?;
    for (label, s) in rows {
        if s.levels != first.levels {
            return invalid("summaries use different quantile levels");
        }
        for p in &s.params {
            let qs: Vec<String> = p.quantiles.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(
                w,
                "{label},{},{},{},{},{},{},{},{}",
                p.name,
                s.n_samples,
                qs.join(","),
                fmt_f64(p.mean),
                fmt_f64(p.map),
                fmt_f64(p.bandwidth),
                fmt_f64(p.whisker_low),
                fmt_f64(p.whisker_high)
            )?;
        }
    }
    Ok(())
}

pub fn write_errors_csv<W: Write>(rows: &[(String, &ErrorEstimates)], mut w: W) -> Result<()> {
    writeln!(w, "label,parameter,n_sim,asymptotic_sd,mc_sd")?;
    for (label, e) in rows {
        for (i, name) in e.names.iter().enumerate() {
            writeln!(w, "{label},{name},{},{},{}", e.n_sim, fmt_f64(e.asymptotic_sd[i]), fmt_f64(e.mc_sd[i]))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, f64::MAX] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert!(fmt_f64(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn two_row_file() {
        let p = read_pattern("x,y\n0.1,0.2\n0.3,0.4\n".as_bytes(), Window::unit_square()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(!p.is_marked());
    }

    #[test]
    fn angle_column_gives_marked_pattern() {
        let p = read_pattern("x,y,angle\n0.1,0.2,0.5\n0.3,0.4,3.0\n".as_bytes(), Window::unit_square()).unwrap();
        assert!(p.is_marked());
    }

    #[test]
    fn bad_files_are_rejected() {
        assert!(read_pattern("a,b\n1,2\n".as_bytes(), Window::unit_square()).is_err());
        assert!(read_pattern("x,y\n0.1,zz\n".as_bytes(), Window::unit_square()).is_err());
        let err = read_pattern("x,y\n0.1,0.2\n1.5,0.2\n0.2,-1\n".as_bytes(), Window::unit_square()).unwrap_err();
        assert!(err.to_string().contains("3,4"), "{err}");
    }

    #[test]
    fn pattern_round_trip_is_lossless() {
        let p = PointPattern::binomial(40, Window::unit_square(), &mut RngState::new(8, 0));
        let mut buf = Vec::new();
        write_pattern(&p, &mut buf).unwrap();
        assert_eq!(read_pattern(buf.as_slice(), Window::unit_square()).unwrap(), p);
    }
}
