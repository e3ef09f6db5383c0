//! Free-format MPS: the Netlib subset (ROWS, COLUMNS, RHS, RANGES, BOUNDS)
//! plus an optional OBJSENSE section.
//!
//! Names may not contain whitespace. Whether a RHS/RANGES/BOUNDS line
//! carries a set name is decided from its token count.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{Form, LpProblem, Sense};
use crate::pattern::{PatternKind, PerturbationPattern};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    N,
    L,
    G,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Up,
    Lo,
    Fx,
    Fr,
    Mi,
    Pl,
}

impl BoundKind {
    fn parse(s: &str, line: usize) -> Result<Self> {
        Ok(match s {
            "UP" => BoundKind::Up,
            "LO" => BoundKind::Lo,
            "FX" => BoundKind::Fx,
            "FR" => BoundKind::Fr,
            "MI" => BoundKind::Mi,
            "PL" => BoundKind::Pl,
            "BV" | "LI" | "UI" | "SC" => {
                return Err(Error::UnsupportedFeature(format!(
                    "integer bound type {s} on line {line}"
                )))
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown bound type {other}"),
                })
            }
        })
    }

    fn has_value(self) -> bool {
        matches!(self, BoundKind::Up | BoundKind::Lo | BoundKind::Fx)
    }

    fn code(self) -> &'static str {
        match self {
            BoundKind::Up => "UP",
            BoundKind::Lo => "LO",
            BoundKind::Fx => "FX",
            BoundKind::Fr => "FR",
            BoundKind::Mi => "MI",
            BoundKind::Pl => "PL",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub column: String,
    pub value: Option<f64>,
}

/// Parsed MPS data, kept sparse and in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsDocument {
    pub name: String,
    pub sense: Sense,
    pub rows: Vec<(RowKind, String)>,
    /// `(column, row, value)`
    pub columns: Vec<(String, String, f64)>,
    pub rhs: Vec<(String, f64)>,
    pub ranges: Vec<(String, f64)>,
    pub bounds: Vec<BoundEntry>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, found {tok:?}"),
    })
}

fn parse_sense(tok: &str, line: usize) -> Result<Sense> {
    match tok {
        "MIN" | "MINIMIZE" => Ok(Sense::Min),
        "MAX" | "MAXIMIZE" => Ok(Sense::Max),
        other => Err(Error::Parse {
            line,
            message: format!("unknown objective sense {other}"),
        }),
    }
}

/// Pairs `name value [name value]` after an optional leading set name.
fn pairs<'a>(toks: &[&'a str], line: usize) -> Result<Vec<(&'a str, f64)>> {
    let body = if toks.len() % 2 == 1 { &toks[1..] } else { toks };
    if body.is_empty() || body.len() > 4 {
        return Err(Error::Parse {
            line,
            message: "malformed entry".into(),
        });
    }
    body.chunks(2)
        .map(|c| Ok((c[0], number(c[1], line)?)))
        .collect()
}

pub fn parse(text: &str) -> Result<MpsDocument> {
    let mut doc = MpsDocument {
        name: String::new(),
        sense: Sense::Min,
        rows: Vec::new(),
        columns: Vec::new(),
        rhs: Vec::new(),
        ranges: Vec::new(),
        bounds: Vec::new(),
    };
    let mut section = Section::None;
    let mut row_kind: HashMap<String, RowKind> = HashMap::new();
    let mut known_cols: HashMap<String, ()> = HashMap::new();
    let mut objective: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with([' ', '\t']) {
            section = match toks[0] {
                "NAME" => {
                    doc.name = toks.get(1).copied().unwrap_or("").to_string();
                    Section::None
                }
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        doc.sense = parse_sense(s, line)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => {
                    return Err(Error::UnsupportedFeature(format!(
                        "section {other} on line {line}"
                    )))
                }
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::None | Section::End => {
                return Err(Error::Parse {
                    line,
                    message: "data outside a section".into(),
                })
            }
            Section::ObjSense => doc.sense = parse_sense(toks[0], line)?,
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line,
                        message: "expected row type and name".into(),
                    });
                }
                let kind = match toks[0] {
                    "N" => RowKind::N,
                    "L" => RowKind::L,
                    "G" => RowKind::G,
                    "E" => RowKind::E,
                    other => {
                        return Err(Error::Parse {
                            line,
                            message: format!("unknown row type {other}"),
                        })
                    }
                };
                let name = toks[1].to_string();
                if row_kind.insert(name.clone(), kind).is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate row {name}"),
                    });
                }
                if kind == RowKind::N && objective.is_none() {
                    objective = Some(name.clone());
                }
                doc.rows.push((kind, name));
            }
            Section::Columns => {
                if toks.contains(&"'MARKER'") {
                    return Err(Error::UnsupportedFeature(format!(
                        "integrality marker on line {line}"
                    )));
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(Error::Parse {
                        line,
                        message: "expected column, row, value".into(),
                    });
                }
                let col = toks[0];
                known_cols.insert(col.to_string(), ());
                for (row, v) in pairs(&toks[1..], line)? {
                    if !row_kind.contains_key(row) {
                        return Err(Error::Parse {
                            line,
                            message: format!("undeclared row {row}"),
                        });
                    }
                    doc.columns.push((col.to_string(), row.to_string(), v));
                }
            }
            Section::Rhs | Section::Ranges => {
                for (row, v) in pairs(&toks, line)? {
                    let Some(&kind) = row_kind.get(row) else {
                        return Err(Error::Parse {
                            line,
                            message: format!("undeclared row {row}"),
                        });
                    };
                    if section == Section::Rhs {
                        if objective.as_deref() == Some(row) && v != 0.0 {
                            return Err(Error::UnsupportedFeature(format!(
                                "objective constant on line {line}"
                            )));
                        }
                        doc.rhs.push((row.to_string(), v));
                    } else {
                        if kind == RowKind::N {
                            return Err(Error::Parse {
                                line,
                                message: format!("range on free row {row}"),
                            });
                        }
                        doc.ranges.push((row.to_string(), v));
                    }
                }
            }
            Section::Bounds => {
                let kind = BoundKind::parse(toks[0], line)?;
                let rest = &toks[1..];
                let (col, value) = match (kind.has_value(), rest.len()) {
                    (true, 3) => (rest[1], Some(number(rest[2], line)?)),
                    (true, 2) => (rest[0], Some(number(rest[1], line)?)),
                    (false, 2) => (rest[1], None),
                    (false, 1) => (rest[0], None),
                    // some writers put a value on FR/MI/PL lines
                    (false, 3) => (rest[1], None),
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: "malformed bound".into(),
                        })
                    }
                };
                if !known_cols.contains_key(col) {
                    return Err(Error::Parse {
                        line,
                        message: format!("bound on undeclared column {col}"),
                    });
                }
                doc.bounds.push(BoundEntry {
                    kind,
                    column: col.to_string(),
                    value,
                });
            }
        }
    }
    if objective.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "no objective (N) row".into(),
        });
    }
    Ok(doc)
}

/// Writes `doc` in free format; [`parse`] reads it back unchanged.
pub fn write(doc: &MpsDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", doc.name);
    if doc.sense == Sense::Max {
        let _ = writeln!(out, "OBJSENSE\n    MAX");
    }
    out.push_str("ROWS\n");
    for (kind, name) in &doc.rows {
        let k = match kind {
            RowKind::N => "N",
            RowKind::L => "L",
            RowKind::G => "G",
            RowKind::E => "E",
        };
        let _ = writeln!(out, " {k}  {name}");
    }
    out.push_str("COLUMNS\n");
    for (col, row, v) in &doc.columns {
        let _ = writeln!(out, "    {col}  {row}  {v}");
    }
    out.push_str("RHS\n");
    for (row, v) in &doc.rhs {
        let _ = writeln!(out, "    RHS  {row}  {v}");
    }
    if !doc.ranges.is_empty() {
        out.push_str("RANGES\n");
        for (row, v) in &doc.ranges {
            let _ = writeln!(out, "    RNG  {row}  {v}");
        }
    }
    if !doc.bounds.is_empty() {
        out.push_str("BOUNDS\n");
        for b in &doc.bounds {
            match b.value {
                Some(v) => {
                    let _ = writeln!(out, " {} BND  {}  {v}", b.kind.code(), b.column);
                }
                None => {
                    let _ = writeln!(out, " {} BND  {}", b.kind.code(), b.column);
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// How `E` rows enter the problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EqualityHandling {
    /// Standard form: `E` rows stay equalities, inequality rows get a slack
    /// column each. Slack columns are listed in [`MpsModel::fixed_columns`].
    #[default]
    Direct,
    /// `Ax <= b, x >= 0`: each `E` row becomes two opposite `L` rows.
    Paired,
}

/// An MPS document converted to an [`LpProblem`].
#[derive(Clone, Debug)]
pub struct MpsModel<S> {
    pub name: String,
    pub problem: LpProblem<S>,
    /// Columns in the MPS file.
    pub n_vars: usize,
    /// Non-objective rows in the MPS file.
    pub n_constraints: usize,
    /// Slack columns, which carry no perturbation.
    pub fixed_columns: Range<usize>,
    pub column_names: Vec<String>,
}

impl<S: Scalar> MpsModel<S> {
    /// Relative or absolute pattern on the converted data, zero on slacks.
    pub fn pattern(&self, kind: PatternKind) -> PerturbationPattern<S> {
        let p = match kind {
            PatternKind::Absolute => PerturbationPattern::absolute(&self.problem),
            _ => PerturbationPattern::relative(&self.problem),
        };
        if self.fixed_columns.is_empty() {
            p
        } else {
            p.with_fixed_columns(self.fixed_columns.clone())
        }
    }
}

struct Row {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
    equality: bool,
}

fn negated(coeffs: &[(usize, f64)]) -> Vec<(usize, f64)> {
    coeffs.iter().map(|&(j, v)| (j, -v)).collect()
}

/// Converts to an LP with `x >= 0`.
///
/// `G` rows are negated into `L` rows, `RANGES` become a second opposite
/// row, and bounds other than `x >= 0` become explicit rows. Columns with a
/// negative or missing lower bound are split as `x = x⁺ - x⁻`, the `x⁻`
/// columns placed after the original ones.
pub fn to_problem<S: Scalar>(doc: &MpsDocument, handling: EqualityHandling) -> Result<MpsModel<S>> {
    let objective = doc
        .rows
        .iter()
        .find(|(k, _)| *k == RowKind::N)
        .map(|(_, n)| n.as_str())
        .ok_or_else(|| Error::Parse {
            line: 0,
            message: "no objective (N) row".into(),
        })?;

    let mut col_index: HashMap<&str, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    for (col, _, _) in &doc.columns {
        if !col_index.contains_key(col.as_str()) {
            col_index.insert(col, col_names.len());
            col_names.push(col.clone());
        }
    }
    let n = col_names.len();

    let mut lower: Vec<Option<f64>> = vec![Some(0.0); n];
    let mut upper: Vec<Option<f64>> = vec![None; n];
    for b in &doc.bounds {
        let j = col_index[b.column.as_str()];
        let v = b.value.unwrap_or(0.0);
        match b.kind {
            BoundKind::Up => {
                upper[j] = Some(v);
                if v < 0.0 && lower[j] == Some(0.0) {
                    lower[j] = None;
                }
            }
            BoundKind::Lo => lower[j] = Some(v),
            BoundKind::Fx => {
                lower[j] = Some(v);
                upper[j] = Some(v);
            }
            BoundKind::Fr => {
                lower[j] = None;
                upper[j] = None;
            }
            BoundKind::Mi => lower[j] = None,
            BoundKind::Pl => upper[j] = None,
        }
    }
    // x⁻ column for every variable that may go negative
    let mut neg: Vec<Option<usize>> = vec![None; n];
    let mut n_vars = n;
    for j in 0..n {
        if lower[j].is_none_or(|l| l < 0.0) {
            neg[j] = Some(n_vars);
            col_names.push(format!("{}-", col_names[j]));
            n_vars += 1;
        }
    }
    let expand = |entries: &[(usize, f64)]| -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(entries.len());
        for &(j, v) in entries {
            out.push((j, v));
            if let Some(k) = neg[j] {
                out.push((k, -v));
            }
        }
        out
    };

    let mut row_entries: HashMap<&str, Vec<(usize, f64)>> = HashMap::new();
    for (col, row, v) in &doc.columns {
        row_entries.entry(row).or_default().push((col_index[col.as_str()], *v));
    }
    let rhs: HashMap<&str, f64> = doc.rhs.iter().map(|(r, v)| (r.as_str(), *v)).collect();
    let ranges: HashMap<&str, f64> = doc.ranges.iter().map(|(r, v)| (r.as_str(), *v)).collect();

    let mut rows: Vec<Row> = Vec::new();
    let mut n_constraints = 0;
    for (kind, name) in &doc.rows {
        if *kind == RowKind::N {
            continue;
        }
        n_constraints += 1;
        let a = expand(row_entries.get(name.as_str()).map_or(&[][..], |v| v));
        let b = rhs.get(name.as_str()).copied().unwrap_or(0.0);
        let le = |coeffs: Vec<(usize, f64)>, rhs: f64| Row {
            coeffs,
            rhs,
            equality: false,
        };
        match (kind, ranges.get(name.as_str()).copied()) {
            (RowKind::L, None) => rows.push(le(a, b)),
            (RowKind::L, Some(r)) => {
                rows.push(le(negated(&a), -(b - r.abs())));
                rows.push(le(a, b));
            }
            (RowKind::G, None) => rows.push(le(negated(&a), -b)),
            (RowKind::G, Some(r)) => {
                rows.push(le(negated(&a), -b));
                rows.push(le(a, b + r.abs()));
            }
            (RowKind::E, None) => rows.push(Row {
                coeffs: a,
                rhs: b,
                equality: true,
            }),
            (RowKind::E, Some(r)) => {
                let (lo, hi) = if r >= 0.0 { (b, b + r) } else { (b + r, b) };
                rows.push(le(negated(&a), -lo));
                rows.push(le(a, hi));
            }
            (RowKind::N, _) => unreachable!(),
        }
    }
    for j in 0..n {
        let x = |s: f64| expand(&[(j, s)]);
        match (lower[j], upper[j]) {
            (Some(l), Some(u)) if l == u => rows.push(Row {
                coeffs: x(1.0),
                rhs: u,
                equality: true,
            }),
            (l, u) => {
                if let Some(l) = l.filter(|l| *l != 0.0) {
                    rows.push(Row {
                        coeffs: x(-1.0),
                        rhs: -l,
                        equality: false,
                    });
                }
                if let Some(u) = u {
                    rows.push(Row {
                        coeffs: x(1.0),
                        rhs: u,
                        equality: false,
                    });
                }
            }
        }
    }
    if handling == EqualityHandling::Paired {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                if r.equality {
                    vec![
                        Row {
                            coeffs: r.coeffs.clone(),
                            rhs: r.rhs,
                            equality: false,
                        },
                        Row {
                            coeffs: negated(&r.coeffs),
                            rhs: -r.rhs,
                            equality: false,
                        },
                    ]
                } else {
                    vec![r]
                }
            })
            .collect();
    }

    let mut c = vec![S::zero(); n_vars];
    if let Some(entries) = row_entries.get(objective) {
        for (j, v) in expand(entries) {
            c[j] = c[j].clone() + S::from_f64(v);
        }
    }
    let m = rows.len();
    let (width, form, n_slack) = match handling {
        EqualityHandling::Paired => (n_vars, Form::IneqNonneg, 0),
        EqualityHandling::Direct => {
            let slacks = rows.iter().filter(|r| !r.equality).count();
            (n_vars + slacks, Form::Standard, slacks)
        }
    };
    let mut a = Matrix::<S>::zeros(m, width);
    let mut slack = n_vars;
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in &r.coeffs {
            a[(i, j)] = a[(i, j)].clone() + S::from_f64(v);
        }
        if handling == EqualityHandling::Direct && !r.equality {
            a[(i, slack)] = S::one();
            col_names.push(format!("slack{}", i + 1));
            slack += 1;
        }
    }
    c.extend(std::iter::repeat_n(S::zero(), n_slack));
    let b = rows.iter().map(|r| S::from_f64(r.rhs)).collect();
    Ok(MpsModel {
        name: doc.name.clone(),
        problem: LpProblem::new(a, b, c, form, doc.sense)?,
        n_vars: n,
        n_constraints,
        fixed_columns: n_vars..n_vars + n_slack,
        column_names: col_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
NAME          TINY
ROWS
 N  COST
 L  LIM
COLUMNS
    X         COST         1.0   LIM          2.0
RHS
    RHS       LIM          4.0
ENDATA
";

    #[test]
    fn minimal_document() {
        let doc = parse(TINY).unwrap();
        assert_eq!(doc.name, "TINY");
        let m = to_problem::<f64>(&doc, EqualityHandling::Paired).unwrap();
        assert_eq!((m.problem.m(), m.problem.n()), (1, 1));
        assert_eq!(m.problem.form(), Form::IneqNonneg);
        assert_eq!(m.problem.a()[(0, 0)], 2.0);
        assert_eq!(m.problem.b(), &[4.0]);
        let d = to_problem::<f64>(&doc, EqualityHandling::Direct).unwrap();
        assert_eq!(d.problem.n(), 2);
        assert_eq!(d.fixed_columns, 1..2);
        assert_eq!((d.n_vars, d.n_constraints), (1, 1));
    }

    #[test]
    fn round_trip() {
        let text = "\
NAME T
OBJSENSE
    MAX
ROWS
 N  OBJ
 G  R1
 E  R2
COLUMNS
    X  OBJ  1.5  R1  -1
    Y  R2  3
RHS
    RHS  R1  0.25  R2  6
RANGES
    RNG  R2  -2
BOUNDS
 UP BND  X  4
 FR BND  Y
ENDATA
";
        let doc = parse(text).unwrap();
        assert_eq!(doc.sense, Sense::Max);
        assert_eq!(parse(&write(&doc)).unwrap(), doc);
    }

    #[test]
    fn ranges_and_bounds_fold_into_rows() {
        let text = "\
NAME T
ROWS
 N  OBJ
 E  R
COLUMNS
    X  OBJ  1  R  1
    Y  OBJ  1  R  1
RHS
    R  10
RANGES
    R  2
BOUNDS
 LO BND  X  1
 MI BND  Y
ENDATA
";
        let m = to_problem::<f64>(&parse(text).unwrap(), EqualityHandling::Paired).unwrap();
        // columns X, Y, Y-; rows: -(x+y) <= -10, x+y <= 12, -x <= -1
        assert_eq!(m.problem.n(), 3);
        assert_eq!(m.problem.m(), 3);
        assert_eq!(m.problem.b(), &[-10.0, 12.0, -1.0]);
        assert_eq!(m.problem.a().row(0), &[-1.0, -1.0, 1.0]);
        assert_eq!(m.problem.c(), &[1.0, 1.0, -1.0]);
        assert_eq!(m.column_names[2], "Y-");
    }

    #[test]
    fn equality_paired_or_direct() {
        let text = "NAME\nROWS\n N OBJ\n E R\n G S\nCOLUMNS\n X OBJ 1 R 1\n X S 1\nRHS\n R 1\nENDATA\n";
        let doc = parse(text).unwrap();
        let p = to_problem::<f64>(&doc, EqualityHandling::Paired).unwrap();
        assert_eq!(p.problem.m(), 3);
        let d = to_problem::<f64>(&doc, EqualityHandling::Direct).unwrap();
        assert_eq!(d.problem.m(), 2);
        assert_eq!(d.problem.form(), Form::Standard);
        assert_eq!(d.problem.a().row(1), &[-1.0, 1.0]);
        let pat = d.pattern(PatternKind::Relative);
        assert_eq!(pat.da().column(1), vec![0.0, 0.0]);
    }

    #[test]
    fn errors_carry_context() {
        let bad = "NAME\nROWS\n N OBJ\nCOLUMNS\n X NOPE 1\nENDATA\n";
        assert!(matches!(parse(bad), Err(Error::Parse { line: 5, .. })));
        let marker = "NAME\nROWS\n N OBJ\nCOLUMNS\n M 'MARKER' 'INTORG'\nENDATA\n";
        assert!(matches!(parse(marker), Err(Error::UnsupportedFeature(_))));
        let objrhs = "NAME\nROWS\n N OBJ\nCOLUMNS\n X OBJ 1\nRHS\n RHS OBJ 5\nENDATA\n";
        assert!(matches!(parse(objrhs), Err(Error::UnsupportedFeature(_))));
        let bv = "NAME\nROWS\n N OBJ\nCOLUMNS\n X OBJ 1\nBOUNDS\n BV BND X\nENDATA\n";
        assert!(matches!(parse(bv), Err(Error::UnsupportedFeature(_))));
        let num = "NAME\nROWS\n N OBJ\nCOLUMNS\n X OBJ abc\nENDATA\n";
        assert!(matches!(parse(num), Err(Error::Parse { line: 5, .. })));
        assert!(parse("NAME\nROWS\n L R\nENDATA\n").is_err());
    }
}
