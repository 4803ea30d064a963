//! Text format for recovery problems.
//!
//! ```text
//! MATRIX
//! 2 3
//! 1 0 0.7071067811865476
//! 0 1 0.7071067811865476
//! VECTOR
//! 2
//! 0.7071067811865476 0.7071067811865476
//! EPSILON
//! 0
//! WEIGHTS
//! 1 1 10
//! ```
//!
//! `WEIGHTS` is optional (all ones). `PRIOR` with a 1-based comma-separated
//! index list and `W` with a scalar may replace it. Lines starting with `#`
//! are ignored.

use std::fmt::Write as _;

use nalgebra::DVector;

use super::{prior_weights, RecoveryProblem, SolveReport};
use crate::error::{Error, Result};
use crate::matrix::{format_matrix, parse_matrix_tokens, parse_real, SensingMatrix};
use crate::support::IndexSet;

fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn next_token<'a>(tokens: &mut impl Iterator<Item = &'a str>, what: &str) -> Result<&'a str> {
    tokens
        .next()
        .ok_or_else(|| parse_error(format!("missing {what}")))
}

impl RecoveryProblem {
    pub fn parse(text: &str) -> Result<RecoveryProblem> {
        let body: String = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        let mut tokens = body.split_whitespace().peekable();
        let (mut a, mut y, mut eps, mut weights) = (None, None, None, None);
        let (mut prior, mut w) = (None, None);
        while let Some(section) = tokens.next() {
            match section {
                "MATRIX" => a = Some(parse_matrix_tokens(&mut tokens)?),
                "VECTOR" => {
                    let len: usize = next_token(&mut tokens, "vector length")?
                        .parse()
                        .map_err(|_| parse_error("bad vector length"))?;
                    let values = (0..len)
                        .map(|_| parse_real(next_token(&mut tokens, "vector entry")?))
                        .collect::<Result<Vec<_>>>()?;
                    y = Some(DVector::from_vec(values));
                }
                "EPSILON" => eps = Some(parse_real(next_token(&mut tokens, "epsilon")?)?),
                "WEIGHTS" => {
                    let mut values = Vec::new();
                    while let Some(tok) = tokens.peek() {
                        if tok.chars().all(|c| c.is_ascii_uppercase()) {
                            break;
                        }
                        values.push(parse_real(tok)?);
                        tokens.next();
                    }
                    weights = Some(values);
                }
                "PRIOR" => prior = Some(IndexSet::parse_one_based(next_token(&mut tokens, "prior")?)?),
                "W" => w = Some(parse_real(next_token(&mut tokens, "w")?)?),
                other => return Err(parse_error(format!("unknown section '{other}'"))),
            }
        }
        let a = SensingMatrix::new(a.ok_or_else(|| parse_error("missing MATRIX section"))?)?;
        let y = y.ok_or_else(|| parse_error("missing VECTOR section"))?;
        let eps = eps.unwrap_or(0.0);
        let weights = match (weights, prior, w) {
            (Some(_), Some(_), _) => return Err(parse_error("give either WEIGHTS or PRIOR, not both")),
            (Some(ws), None, None) => ws,
            (Some(_), None, Some(_)) => return Err(parse_error("W needs PRIOR, not WEIGHTS")),
            (None, Some(p), w) => prior_weights(a.cols(), &p, w.unwrap_or(0.0)),
            (None, None, Some(_)) => return Err(parse_error("W given without PRIOR")),
            (None, None, None) => vec![1.0; a.cols()],
        };
        RecoveryProblem::new(a, y, eps, weights)
    }

    /// Inverse of [`RecoveryProblem::parse`], with explicit weights.
    ///
    /// The matrix written is the column-normalized one.
    pub fn to_text(&self) -> String {
        let mut s = String::from("MATRIX\n");
        s.push_str(&format_matrix(self.a.entries()));
        let _ = writeln!(s, "VECTOR\n{}", self.y.len());
        s.push_str(&join(self.y.iter()));
        let _ = writeln!(s, "\nEPSILON\n{:?}\nWEIGHTS", self.epsilon);
        s.push_str(&join(self.weights.iter()));
        s.push('\n');
        s
    }
}

fn join<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

impl SolveReport {
    /// `key=value` lines; `x_star` is space separated.
    pub fn to_text(&self) -> String {
        format!(
            "converged={}\niterations={}\nobjective={:?}\nfeasibility_residual={:?}\nduality_gap={:?}\nx_star={}\n",
            self.converged,
            self.iterations,
            self.objective,
            self.feasibility_residual,
            self.duality_gap,
            join(self.x_star.iter())
        )
    }
}
