//! Plain-text state files.
//!
//! ```text
//! # comments start with '#'
//! d 2
//! n 2
//! statistics bosonic        # or fermionic
//! representation pure       # or mixed
//! convention fock           # optional: fock (default) or monomial
//! label psi_b               # optional, rest of the line
//! 0,0  0.7071067811865476 0
//! 1,1  0.7071067811865476 0
//! ```
//!
//! Pure bodies list `occupation re im`; mixed bodies list
//! `row_occupation column_occupation re im`. Occupations are comma-separated
//! mode indices without spaces. Missing entries are zero.
//!
//! Under `convention fock` each line is a coefficient of a unit-norm basis
//! state and the occupation must be sorted (strictly for fermions). Under
//! `convention monomial` each line is a coefficient of the raw product
//! `a†_{k1} ⋯ a†_{kn}|vac⟩`; modes may come in any order and are sorted with
//! the permutation sign for fermions, and bosonic coefficients pick up
//! `√(∏ m_i!)`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::fock::{DensityMatrix, FockBasis, OccupationVector, StateVector, Statistics, NORM_TOL};
use crate::lift::SingleParticleUnitary;
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Fock,
    Monomial,
}

#[derive(Debug, Clone)]
pub enum StateContent {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

#[derive(Debug, Clone)]
pub struct StateFile {
    pub basis: Arc<FockBasis>,
    pub label: Option<String>,
    pub content: StateContent,
    /// Non-fatal remarks, e.g. that a pure state was renormalized.
    pub warnings: Vec<String>,
}

impl StateFile {
    pub fn representation(&self) -> Representation {
        match self.content {
            StateContent::Pure(_) => Representation::Pure,
            StateContent::Mixed(_) => Representation::Mixed,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match &self.content {
            StateContent::Pure(psi) => psi.to_density(),
            StateContent::Mixed(rho) => rho.clone(),
        }
    }
}

/// Whitespace-separated tokens with their 1-based columns; comments stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_usize(tok: &str, line: usize, col: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .or_else(|_| err(line, col, format!("expected a nonnegative integer for {what}, found '{tok}'")))
}

fn parse_f64(tok: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, col, format!("expected a finite number, found '{tok}'")),
    }
}

struct Header {
    d: Option<usize>,
    n: Option<usize>,
    statistics: Option<Statistics>,
    representation: Option<Representation>,
    convention: Convention,
    label: Option<String>,
}

struct Entry {
    line: usize,
    row: (usize, f64),
    col: Option<(usize, f64)>,
    value: C64,
}

/// Resolves an occupation token to a basis index and the factor converting the
/// written coefficient into a coefficient of the unit-norm basis vector.
fn resolve_occupation(
    tok: &str,
    line: usize,
    col: usize,
    basis: &FockBasis,
    convention: Convention,
) -> Result<(usize, f64), ParseError> {
    let mut modes = Vec::new();
    for part in tok.split(',') {
        let m = parse_usize(part, line, col, "a mode index")?;
        if m >= basis.d() {
            return err(line, col, format!("mode {m} out of range for d = {}", basis.d()));
        }
        modes.push(m);
    }
    if modes.len() != basis.n() {
        return err(
            line,
            col,
            format!("occupation '{tok}' has {} particles, expected {}", modes.len(), basis.n()),
        );
    }
    let stats = basis.statistics();
    let factor = match convention {
        Convention::Fock => {
            if !OccupationVector::new(modes.clone()).is_canonical(stats) {
                return err(
                    line,
                    col,
                    format!("occupation '{tok}' is not in canonical order for {stats} particles"),
                );
            }
            1.0
        }
        Convention::Monomial => {
            let mut sign = 1.0;
            // insertion sort, counting transpositions
            for i in 1..modes.len() {
                let mut j = i;
                while j > 0 && modes[j - 1] > modes[j] {
                    modes.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            let occ = OccupationVector::new(modes.clone());
            match stats {
                Statistics::Fermionic => {
                    if !occ.is_canonical(stats) {
                        return err(line, col, format!("monomial '{tok}' repeats a fermionic mode"));
                    }
                    sign
                }
                Statistics::Bosonic => occ.multiplicity_factorial().sqrt(),
            }
        }
    };
    let idx = basis
        .index_of(&OccupationVector::new(modes))
        .expect("canonical occupations are basis states");
    Ok((idx, factor))
}

pub fn parse_state_file(text: &str) -> Result<StateFile, ParseError> {
    let mut header = Header {
        d: None,
        n: None,
        statistics: None,
        representation: None,
        convention: Convention::Fock,
        label: None,
    };
    let mut basis: Option<Arc<FockBasis>> = None;
    let mut entries: Vec<Entry> = Vec::new();
    let mut seen = HashSet::new();
    let mut first_body_line = 0;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokens(raw);
        let Some(&(col0, key)) = toks.first() else {
            continue;
        };

        if !key.starts_with(|c: char| c.is_ascii_digit()) {
            if basis.is_some() {
                return err(line, col0, format!("header key '{key}' after the first body line"));
            }
            let value = |i: usize| -> Result<(usize, &str), ParseError> {
                toks.get(i)
                    .copied()
                    .map_or_else(|| err(line, col0, format!("missing value for '{key}'")), Ok)
            };
            match key {
                "label" => {
                    let (c, _) = value(1)?;
                    let text = raw.split('#').next().unwrap_or("")[c - 1..].trim_end();
                    header.label = Some(text.to_string());
                    continue;
                }
                "d" => {
                    let (c, v) = value(1)?;
                    header.d = Some(parse_usize(v, line, c, "d")?);
                }
                "n" => {
                    let (c, v) = value(1)?;
                    header.n = Some(parse_usize(v, line, c, "n")?);
                }
                "statistics" => {
                    let (c, v) = value(1)?;
                    header.statistics = Some(match v {
                        "fermionic" => Statistics::Fermionic,
                        "bosonic" => Statistics::Bosonic,
                        _ => return err(line, c, format!("unknown statistics '{v}'")),
                    });
                }
                "representation" => {
                    let (c, v) = value(1)?;
                    header.representation = Some(match v {
                        "pure" => Representation::Pure,
                        "mixed" => Representation::Mixed,
                        _ => return err(line, c, format!("unknown representation '{v}'")),
                    });
                }
                "convention" => {
                    let (c, v) = value(1)?;
                    header.convention = match v {
                        "fock" => Convention::Fock,
                        "monomial" => Convention::Monomial,
                        _ => return err(line, c, format!("unknown convention '{v}'")),
                    };
                }
                _ => return err(line, col0, format!("unknown header key '{key}'")),
            }
            if let Some(&(c, _)) = toks.get(2) {
                return err(line, c, "unexpected extra token");
            }
            continue;
        }

        if basis.is_none() {
            let (Some(d), Some(n), Some(stats), Some(_)) =
                (header.d, header.n, header.statistics, header.representation)
            else {
                return err(
                    line,
                    col0,
                    "body starts before the header defines d, n, statistics and representation",
                );
            };
            basis = Some(Arc::new(
                FockBasis::new(d, n, stats).or_else(|e| err(line, col0, e.to_string()))?,
            ));
            first_body_line = line;
        }
        let b = basis.as_ref().unwrap();
        let mixed = header.representation == Some(Representation::Mixed);
        let expected = if mixed { 4 } else { 3 };
        if toks.len() != expected {
            let col = toks.get(expected).map_or(col0, |t| t.0);
            return err(
                line,
                col,
                format!("expected {expected} tokens per {} entry, found {}", if mixed { "mixed" } else { "pure" }, toks.len()),
            );
        }
        let row = resolve_occupation(toks[0].1, line, toks[0].0, b, header.convention)?;
        let col = if mixed {
            Some(resolve_occupation(toks[1].1, line, toks[1].0, b, header.convention)?)
        } else {
            None
        };
        let (re_tok, im_tok) = (toks[expected - 2], toks[expected - 1]);
        let value = C64::new(
            parse_f64(re_tok.1, line, re_tok.0)?,
            parse_f64(im_tok.1, line, im_tok.0)?,
        );
        let key = (row.0, col.map(|c| c.0));
        if !seen.insert(key) {
            return err(line, col0, "duplicate entry");
        }
        entries.push(Entry { line, row, col, value });
    }

    let Some(basis) = basis else {
        return err(text.lines().count().max(1), 1, "file has no body entries");
    };
    let dim = basis.dim();
    let mut warnings = Vec::new();
    let content = match header.representation.unwrap() {
        Representation::Pure => {
            let mut amps = CVector::zeros(dim);
            for e in &entries {
                amps[e.row.0] = e.value * e.row.1;
            }
            let norm = amps.norm();
            if !(norm > 0.0) {
                return err(first_body_line, 1, "state vector has zero norm");
            }
            let psi = if (norm - 1.0).abs() > NORM_TOL {
                warnings.push(format!("state norm was {norm}; normalized to 1"));
                StateVector::normalized(Arc::clone(&basis), amps).unwrap().0
            } else {
                StateVector::new(Arc::clone(&basis), amps).unwrap()
            };
            StateContent::Pure(psi)
        }
        Representation::Mixed => {
            let mut m = CMatrix::zeros(dim, dim);
            for e in &entries {
                let (c, cf) = e.col.unwrap();
                m[(e.row.0, c)] = e.value * (e.row.1 * cf);
            }
            let rho = DensityMatrix::new(m).or_else(|e| err(first_body_line, 1, e.to_string()))?;
            let _ = entries.last().map(|e| e.line);
            StateContent::Mixed(rho)
        }
    };

    Ok(StateFile {
        basis,
        label: header.label,
        content,
        warnings,
    })
}

/// Serializes in the `fock` convention, listing every nonzero entry.
pub fn write_state_file(sf: &StateFile) -> String {
    let b = &sf.basis;
    let mut out = String::new();
    if let Some(label) = &sf.label {
        out.push_str(&format!("label {label}\n"));
    }
    out.push_str(&format!("d {}\nn {}\nstatistics {}\n", b.d(), b.n(), b.statistics()));
    let occ = |i: usize| {
        b.state(i)
            .modes()
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    match &sf.content {
        StateContent::Pure(psi) => {
            out.push_str("representation pure\n");
            for (i, z) in psi.amplitudes().iter().enumerate() {
                if z.re != 0.0 || z.im != 0.0 {
                    out.push_str(&format!("{} {} {}\n", occ(i), z.re, z.im));
                }
            }
        }
        StateContent::Mixed(rho) => {
            out.push_str("representation mixed\n");
            let m = rho.matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let z = m[(r, c)];
                    if z.re != 0.0 || z.im != 0.0 {
                        out.push_str(&format!("{} {} {} {}\n", occ(r), occ(c), z.re, z.im));
                    }
                }
            }
        }
    }
    out
}

/// Reads a d×d unitary: one row per line, each row `re im re im ...`.
pub fn parse_unitary(text: &str) -> Result<SingleParticleUnitary, ParseError> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut last_line = 1;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        last_line = line;
        if toks.len() % 2 != 0 {
            return err(line, toks[toks.len() - 1].0, "entries must come in 're im' pairs");
        }
        let mut row = Vec::with_capacity(toks.len() / 2);
        for pair in toks.chunks(2) {
            row.push(C64::new(
                parse_f64(pair[0].1, line, pair[0].0)?,
                parse_f64(pair[1].1, line, pair[1].0)?,
            ));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return err(line, 1, format!("row has {} entries, expected {}", row.len(), first.len()));
            }
        }
        rows.push(row);
    }
    let d = rows.len();
    if d == 0 || rows[0].len() != d {
        return err(last_line, 1, format!("expected a square matrix, found {d} rows"));
    }
    let m = CMatrix::from_fn(d, d, |i, j| rows[i][j]);
    SingleParticleUnitary::new(m).or_else(|e| err(last_line, 1, e.to_string()))
}

/// Inverse of [`parse_unitary`].
pub fn write_unitary(v: &SingleParticleUnitary) -> String {
    let m = v.matrix();
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{} {}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}
