//! The line-based complex file format.
//!
//! `#` starts a comment. `c v1 v2 ... vk p` declares a (k-1)-cell with
//! probability `p`; `v i p` and `e i j p` are sugar for vertices and
//! edges. `p` is either a fraction `a/b` or a decimal literal, both read
//! exactly.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::complex::{Cell, ComplexError, RandomComplex, Rat, SimplicialComplex};
use crate::pattern::Pattern;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate cell {cell}")]
    DuplicateCell { line: usize, cell: Cell },
    #[error("line {line}: probability {value} out of [0,1]")]
    ProbabilityRange { line: usize, value: String },
    #[error("complex is not face-closed: cell {cell} is missing faces {missing}")]
    MissingFaces { cell: Cell, missing: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses an exact rational from `a/b` or a decimal literal.
pub fn parse_rational(text: &str, line: usize) -> Result<Rat, ParseError> {
    if let Some((a, b)) = text.split_once('/') {
        let num: BigInt = a
            .parse()
            .map_err(|_| syntax(line, format!("bad numerator {a:?}")))?;
        let den: BigInt = b
            .parse()
            .map_err(|_| syntax(line, format!("bad denominator {b:?}")))?;
        if den.is_zero() {
            return Err(syntax(line, "zero denominator"));
        }
        return Ok(Rat::new(num, den));
    }
    // decimal literal, converted by its exact base-10 value
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(syntax(line, format!("bad probability {text:?}")));
    }
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(syntax(line, format!("bad probability {text:?}")));
    }
    let mut num: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().unwrap()
    };
    let mut den = BigInt::one();
    for d in frac_part.chars() {
        num = num * 10 + d.to_digit(10).unwrap();
        den *= 10;
    }
    Ok(Rat::new(num, den))
}

fn parse_lines(text: &str, require_prob: bool) -> Result<Vec<(usize, Cell, Rat)>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let (kind, rest) = (tokens[0], &tokens[1..]);
        let expected_vertices = match kind {
            "v" => Some(1),
            "e" => Some(2),
            "c" => None,
            other => return Err(syntax(lineno, format!("unknown directive {other:?}"))),
        };
        let (vertex_tokens, prob_token) = if require_prob {
            if rest.len() < 2 && kind == "c" || rest.is_empty() {
                return Err(syntax(lineno, "missing fields"));
            }
            (&rest[..rest.len() - 1], Some(rest[rest.len() - 1]))
        } else {
            // probability optional: for v/e the vertex count decides; for
            // c a trailing fraction or decimal is read as a probability
            let has_prob = match expected_vertices {
                Some(n) => rest.len() > n,
                None => rest.len() > 1 && looks_like_prob(rest[rest.len() - 1]),
            };
            if has_prob {
                (&rest[..rest.len() - 1], Some(rest[rest.len() - 1]))
            } else {
                (rest, None)
            }
        };
        if let Some(n) = expected_vertices {
            if vertex_tokens.len() != n {
                return Err(syntax(
                    lineno,
                    format!("directive {kind:?} takes {n} vertex id(s)"),
                ));
            }
        } else if vertex_tokens.is_empty() {
            return Err(syntax(lineno, "cell needs at least one vertex"));
        }
        let mut vertices = Vec::with_capacity(vertex_tokens.len());
        for t in vertex_tokens {
            let v: u32 = t
                .parse()
                .map_err(|_| syntax(lineno, format!("bad vertex id {t:?}")))?;
            vertices.push(v);
        }
        let cell = Cell::new(vertices)
            .map_err(|_| syntax(lineno, "cell vertices must be distinct"))?;
        let prob = match prob_token {
            Some(t) => {
                let p = parse_rational(t, lineno)?;
                if p < Rat::zero() || p > Rat::one() {
                    return Err(ParseError::ProbabilityRange {
                        line: lineno,
                        value: t.to_string(),
                    });
                }
                p
            }
            None => Rat::one(),
        };
        out.push((lineno, cell, prob));
    }
    Ok(out)
}

fn looks_like_prob(token: &str) -> bool {
    token.contains('/') || token.contains('.')
}

/// Parses the complex file format into a validated `RandomComplex`.
pub fn parse_complex(text: &str) -> Result<RandomComplex, ParseError> {
    let entries = parse_lines(text, true)?;
    let mut prob: BTreeMap<Cell, Rat> = BTreeMap::new();
    let mut cells: BTreeSet<Cell> = BTreeSet::new();
    for (lineno, cell, p) in entries {
        if !cells.insert(cell.clone()) {
            return Err(ParseError::DuplicateCell { line: lineno, cell });
        }
        prob.insert(cell, p);
    }
    for cell in &cells {
        let missing: Vec<String> = cell
            .proper_faces()
            .into_iter()
            .filter(|f| !cells.contains(f))
            .map(|f| f.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(ParseError::MissingFaces {
                cell: cell.clone(),
                missing: missing.join(","),
            });
        }
    }
    let complex = SimplicialComplex::new(cells)?;
    Ok(RandomComplex::new(complex, prob)?)
}

/// Parses a pattern file: same line syntax, probabilities optional and
/// ignored, no face-closure requirement. The pattern's cells are the cells
/// listed of dimension `k`.
pub fn parse_pattern(text: &str, k: usize) -> Result<Pattern, ParseError> {
    let entries = parse_lines(text, false)?;
    let mut cells = BTreeSet::new();
    for (lineno, cell, _) in entries {
        if cell.dimension() == k && !cells.insert(cell.clone()) {
            return Err(ParseError::DuplicateCell { line: lineno, cell });
        }
    }
    Ok(Pattern::new(cells, k))
}

/// Serializes a random complex: cells sorted by (dimension, vertex tuple),
/// probabilities as reduced fractions.
pub fn serialize_complex(rc: &RandomComplex) -> String {
    let mut out = String::new();
    for cell in rc.ordered_cells() {
        let p = rc.prob(cell);
        let vs: Vec<String> = cell.vertices().iter().map(|v| v.to_string()).collect();
        let line = match cell.dimension() {
            0 => format!("v {} {}\n", vs[0], p),
            1 => format!("e {} {} {}\n", vs[0], vs[1], p),
            _ => format!("c {} {}\n", vs.join(" "), p),
        };
        out.push_str(&line);
    }
    out
}
