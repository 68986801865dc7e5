//! Text formats: graph files, piecewise nonlinearity files, numbers and CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rws::{DirichletDomain, GraphBuilder, WeightedGraph};
use crate::scalar::{Nonlinearity, Segment};

/// A graph file: the weighted graph and the labels listed on `omega` lines.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub graph: WeightedGraph,
    pub omega: Vec<String>,
}

impl GraphFile {
    pub fn into_domain(self) -> Result<DirichletDomain> {
        DirichletDomain::with_labels(self.graph, &self.omega)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # path on four vertices
/// edge 1 2 1
/// edge 2 3 1
/// edge 3 4 1
/// omega 2 3
/// ```
///
/// `vertex <label>` declares a vertex without edges.
pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut b = GraphBuilder::new();
    let mut seen_pairs = std::collections::HashSet::new();
    let mut omega: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let directive = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match directive {
            "vertex" => {
                if args.len() != 1 {
                    return Err(parse_err(line_no, "expected `vertex <label>`"));
                }
                b.vertex(args[0]);
            }
            "edge" => {
                if args.len() != 3 {
                    return Err(parse_err(line_no, "expected `edge <label> <label> <weight>`"));
                }
                let w: f64 = args[2]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("`{}` is not a number", args[2])))?;
                if !(w > 0.0) || !w.is_finite() {
                    return Err(parse_err(line_no, format!("edge weight {w} must be positive")));
                }
                let key = if args[0] <= args[1] {
                    (args[0].to_string(), args[1].to_string())
                } else {
                    (args[1].to_string(), args[0].to_string())
                };
                if !seen_pairs.insert(key) {
                    return Err(parse_err(
                        line_no,
                        format!("edge ({}, {}) is listed more than once", args[0], args[1]),
                    ));
                }
                b.edge(args[0], args[1], w);
            }
            "omega" => {
                if args.is_empty() {
                    return Err(parse_err(line_no, "expected `omega <label> [<label>...]`"));
                }
                omega.extend(args.iter().map(|a| (line_no, a.to_string())));
            }
            other => return Err(parse_err(line_no, format!("unknown directive `{other}`"))),
        }
    }
    for (line_no, label) in &omega {
        if !b.contains(label) {
            return Err(parse_err(*line_no, format!("omega references undeclared vertex `{label}`")));
        }
    }
    let graph = b.build()?;
    Ok(GraphFile {
        graph,
        omega: omega.into_iter().map(|(_, l)| l).collect(),
    })
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

/// Parses piecewise segments, one per line: `knot c0 c1 ...` with
/// coefficients ascending in `s - knot`.
pub fn parse_piecewise(text: &str) -> Result<Nonlinearity> {
    let mut segments = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| parse_err(i + 1, format!("`{t}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        if nums.len() < 2 {
            return Err(parse_err(i + 1, "expected `knot c0 [c1 ...]`"));
        }
        segments.push(Segment {
            knot: nums[0],
            coeffs: nums[1..].to_vec(),
        });
    }
    Nonlinearity::piecewise(segments)
}

/// Parses any nonlinearity spec, reading `piecewise:<file>` from disk.
pub fn parse_nonlinearity(spec: &str) -> Result<Nonlinearity> {
    match spec.trim().strip_prefix("piecewise:") {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            parse_piecewise(&text)
        }
        None => spec.parse(),
    }
}

/// `%.17g` with trailing zeros removed: `0.5` prints as `0.5`, and parsing
/// the output recovers the value exactly.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a header and rows as CSV to `path`, or to `out` when `path` is `None`.
pub fn emit_csv(
    header: &[String],
    rows: &[Vec<String>],
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    if let Some(r) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::DimensionMismatch {
            expected: header.len(),
            found: r.len(),
        });
    }
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
    }
    match path {
        Some(p) => fs::write(p, &buf).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(&buf).map_err(Error::from),
    }
}

/// Header and rows of a diagram, numbers formatted with [`fmt_num`].
pub fn diagram_table(d: &crate::branch::Diagram) -> (Vec<String>, Vec<Vec<String>>) {
    let rows = d
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.branch.clone(),
                fmt_num(r.arc),
                fmt_num(r.lambda),
                fmt_num(r.norm_inf),
                fmt_num(r.mu1),
                r.stable.to_string(),
            ];
            row.extend(r.values.iter().map(|&v| fmt_num(v)));
            row
        })
        .collect();
    (d.header(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH4: &str = "# four-point path\nedge 1 2 1\nedge 2 3 1\nedge 3 4 1  # last\nomega 2 3\n";

    #[test]
    fn parses_path_file() {
        let g = parse_graph(PATH4).unwrap();
        assert_eq!(g.graph.n_vertices(), 4);
        assert_eq!(g.omega, vec!["2", "3"]);
        let d = g.into_domain().unwrap();
        assert_eq!(d.leak(), &[0.5, 0.5]);
    }

    #[test]
    fn graph_file_errors() {
        assert_eq!(parse_graph("").unwrap_err().to_string(), "no edges");
        assert_eq!(parse_graph("# nothing\n\n").unwrap_err(), Error::NoEdges);
        let e = parse_graph("edge 1 2 1\nomega 7\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(e.to_string().contains('7'));
        assert!(matches!(
            parse_graph("edge 1 2 -1\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_graph("edge 1 2 1\nedge 2 1 3\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_graph("edge 1 2 x\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_graph("edge 1 2\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_graph("edges 1 2 1\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn piecewise_file() {
        let f = parse_piecewise("0 1 0 1\n1 2 2\n2 4 2 1\n").unwrap();
        assert_eq!(f.evaluate(1.5).unwrap(), (3.0, 2.0));
        assert!(parse_piecewise("0 1 2\n2 2 2 1\n").is_err());
        assert!(parse_piecewise("0 one\n").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1.5e20), "1.5e+20");
        assert_eq!(fmt_num(123456.0), "123456");
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, 1e-300, 0.18393972058572117] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_header_only_and_mismatch() {
        let mut out = Vec::new();
        emit_csv(&["a".into(), "b".into()], &[], None, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b\n");
        let mut out = Vec::new();
        assert!(emit_csv(&["a".into()], &[vec!["1".into(), "2".into()]], None, &mut out).is_err());
    }
}
