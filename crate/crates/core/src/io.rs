//! CSV writers for solutions, convergence tables, comparisons, mass traces
//! and kernel profiles, plus a reader for solution snapshots.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same bits.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::diagnostics::ConvergenceRow;
use crate::error::{Error, Result};
use crate::history::SolutionHistory;
use crate::params::SolverParams;
use crate::scheme::SchemeVariant;
use crate::sources::SampledSource;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse {
        line,
        reason: format!("bad number `{}`: {e}", s.trim()),
    })
}

/// Solution snapshots at `levels`: metadata comments, then `x,t=...` columns.
pub fn write_solution<W: Write>(
    mut w: W,
    history: &SolutionHistory,
    params: &SolverParams,
    variant: SchemeVariant,
    levels: &[usize],
) -> Result<()> {
    let grid = history.grid();
    writeln!(w, "#alpha={}", params.alpha())?;
    writeln!(w, "#p={}", params.p())?;
    writeln!(w, "#h={}", grid.h())?;
    writeln!(w, "#T={}", grid.t_final())?;
    writeln!(w, "#variant={}", variant.name())?;
    let rows = levels.iter().map(|&n| history.row(n)).collect::<Result<Vec<_>>>()?;
    let mut header = String::from("x");
    for &n in levels {
        header.push_str(&format!(",t={}", fmt_f64(grid.t(n))));
    }
    writeln!(w, "{header}")?;
    for (o, i) in grid.cell_indices().enumerate() {
        let mut line = fmt_f64(grid.x(i));
        for r in &rows {
            line.push(',');
            line.push_str(&fmt_f64(r[o]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parsed solution CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub meta: BTreeMap<String, String>,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// `columns[k][o]` is the value at `times[k]`, `x[o]`.
    pub columns: Vec<Vec<f64>>,
}

pub fn read_solution<R: Read>(reader: R) -> Result<SolutionTable> {
    let mut meta = BTreeMap::new();
    let mut times = None;
    let mut x = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let no = k + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once('=') {
                meta.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &times {
            None => {
                if fields.first().map(|f| f.trim()) != Some("x") {
                    return Err(Error::Parse {
                        line: no,
                        reason: "expected header starting with `x`".into(),
                    });
                }
                let t = fields[1..]
                    .iter()
                    .map(|f| {
                        let v = f.trim().strip_prefix("t=").ok_or_else(|| Error::Parse {
                            line: no,
                            reason: format!("column `{f}` is not of the form t=<time>"),
                        })?;
                        parse_f64(v, no)
                    })
                    .collect::<Result<Vec<_>>>()?;
                columns = vec![Vec::new(); t.len()];
                times = Some(t);
            }
            Some(t) => {
                if fields.len() != t.len() + 1 {
                    return Err(Error::Parse {
                        line: no,
                        reason: format!("expected {} fields, got {}", t.len() + 1, fields.len()),
                    });
                }
                x.push(parse_f64(fields[0], no)?);
                for (c, f) in columns.iter_mut().zip(&fields[1..]) {
                    c.push(parse_f64(f, no)?);
                }
            }
        }
    }
    let times = times.ok_or_else(|| Error::Parse {
        line: 0,
        reason: "missing header".into(),
    })?;
    Ok(SolutionTable { meta, times, x, columns })
}

/// Every stored row as a sampled source `n,i,value`, zeros skipped.
pub fn history_as_source(history: &SolutionHistory) -> SampledSource {
    let grid = history.grid();
    let mut s = SampledSource::new();
    for (n, row) in history.rows().enumerate() {
        for (o, i) in grid.cell_indices().enumerate() {
            if row[o] != 0.0 {
                s.insert(n, i, row[o]);
            }
        }
    }
    s
}

pub fn write_sampled_source<W: Write>(mut w: W, source: &SampledSource) -> Result<()> {
    writeln!(w, "n,i,value")?;
    for (n, i, v) in source.iter() {
        writeln!(w, "{n},{i},{}", fmt_f64(v))?;
    }
    Ok(())
}

pub fn write_convergence<W: Write>(mut w: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(w, "alpha,h,norm_kind,error,slope")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.alpha,
            fmt_f64(r.h),
            r.norm_kind,
            fmt_f64(r.error),
            fmt_f64(r.slope)
        )?;
    }
    Ok(())
}

/// Three columns `x,numeric,analytic`.
pub fn write_comparison<W: Write>(mut w: W, x: &[f64], numeric: &[f64], analytic: &[f64]) -> Result<()> {
    writeln!(w, "x,numeric,analytic")?;
    for ((x, u), a) in x.iter().zip(numeric).zip(analytic) {
        writeln!(w, "{},{},{}", fmt_f64(*x), fmt_f64(*u), fmt_f64(*a))?;
    }
    Ok(())
}

/// `t,<variant>,...` with one mass column per variant.
pub fn write_mass<W: Write>(mut w: W, t: &[f64], series: &[(SchemeVariant, Vec<f64>)]) -> Result<()> {
    let mut header = String::from("t");
    for (v, _) in series {
        header.push(',');
        header.push_str(v.name());
    }
    writeln!(w, "{header}")?;
    for (n, t) in t.iter().enumerate() {
        let mut line = fmt_f64(*t);
        for (_, m) in series {
            line.push(',');
            line.push_str(&fmt_f64(m[n]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Two columns `x,g`.
pub fn write_kernel<W: Write>(mut w: W, x: &[f64], g: &[f64]) -> Result<()> {
    writeln!(w, "x,g")?;
    for (x, g) in x.iter().zip(g) {
        writeln!(w, "{},{}", fmt_f64(*x), fmt_f64(*g))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::NormKind;
    use crate::mesh::GridSpec;

    fn history() -> SolutionHistory {
        let g = GridSpec::symmetric(0.25, 0.5, 1.0).unwrap();
        let rows = (0..3)
            .map(|n| (0..g.n_space()).map(|o| (n * 10 + o) as f64 / 3.0).collect())
            .collect();
        SolutionHistory::from_rows(g, rows).unwrap()
    }

    #[test]
    fn solution_round_trip_is_exact() {
        let h = history();
        let params = SolverParams::new(0.5, 0.25).unwrap();
        let mut buf = Vec::new();
        write_solution(&mut buf, &h, &params, SchemeVariant::Standard, &[0, 2]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#alpha=0.5\n#p=0.25\n"));
        let t = read_solution(buf.as_slice()).unwrap();
        assert_eq!(t.meta["variant"], "standard");
        assert_eq!(t.times, vec![0.0, 0.5]);
        assert_eq!(t.x.len(), h.grid().n_space());
        assert_eq!(t.columns[1], h.row(2).unwrap());
    }

    #[test]
    fn missing_level_is_an_error() {
        let h = history();
        let params = SolverParams::new(0.5, 0.25).unwrap();
        assert!(write_solution(Vec::new(), &h, &params, SchemeVariant::Standard, &[5]).is_err());
    }

    #[test]
    fn bad_solution_csv() {
        assert!(read_solution("y,t=1\n".as_bytes()).is_err());
        assert!(read_solution("x,t=1\n0.0,1.0,2.0\n".as_bytes()).is_err());
        assert!(read_solution("#alpha=0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn history_reads_back_as_source() {
        let h = history();
        let src = history_as_source(&h);
        let mut buf = Vec::new();
        write_sampled_source(&mut buf, &src).unwrap();
        let back = SampledSource::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, src);
        assert_eq!(back.get(2, h.grid().i_max()), h.value(2, h.grid().i_max()).unwrap());
    }

    #[test]
    fn convergence_table_columns() {
        let rows = [ConvergenceRow {
            alpha: 0.5,
            h: 0.125,
            norm_kind: NormKind::L2,
            error: 1e-3,
            slope: 1.5,
        }];
        let mut buf = Vec::new();
        write_convergence(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha,h,norm_kind,error,slope"));
        assert_eq!(
            lines.next(),
            Some("0.5,1.2500000000000000e-1,l2,1.0000000000000000e-3,1.5000000000000000e0")
        );
    }

    #[test]
    fn mass_columns_follow_variants() {
        let mut buf = Vec::new();
        write_mass(
            &mut buf,
            &[0.0, 0.5],
            &[
                (SchemeVariant::Standard, vec![1.0, 0.9]),
                (SchemeVariant::AdvancedSource, vec![1.0, 1.1]),
            ],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,standard,advanced_source\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
