//! The state file format.
//!
//! ```text
//! n=3
//! parties: A=1 B=2 C=3
//! stabilizers:
//! +XXX
//! +ZZI
//! +IZZ
//! ```
//!
//! Qubit indices are 1-based. Blank lines and `#` comments are ignored.

use thiserror::Error;

use crate::clifford::{split_sign, CliffordError, Tableau};
use crate::stabilizer::{Partition, PartitionedStabilizerState, StabilizerError};
use crate::symplectic::PauliVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("generators are not linearly independent")]
    NotIndependent,
    #[error("generators {} and {} anticommute", .i + 1, .j + 1)]
    NotIsotropic { i: usize, j: usize },
    #[error("expected {expected} generators, found {found}")]
    WrongGeneratorCount { expected: usize, found: usize },
}

fn syntax(line: usize, message: impl Into<String>) -> StateFileError {
    StateFileError::Syntax { line, message: message.into() }
}

/// Significant lines with their 1-based numbers.
pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Party groups like `A=1,2 B=3 C=` over `n` qubits.
pub fn parse_parties(n: usize, groups: &str, line: usize) -> Result<Partition, StateFileError> {
    let mut blocks: Vec<(String, Vec<usize>)> = Vec::new();
    for group in groups.split_whitespace() {
        let (name, list) = group
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected <party>=<indices>, got {group:?}")))?;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, format!("bad party name {name:?}")));
        }
        let mut qubits = Vec::new();
        for idx in list.split(',').filter(|s| !s.is_empty()) {
            let q: usize = idx.parse().map_err(|_| syntax(line, format!("bad qubit index {idx:?}")))?;
            if q == 0 || q > n {
                return Err(syntax(line, format!("qubit {q} outside 1..={n}")));
            }
            qubits.push(q - 1);
        }
        blocks.push((name.to_string(), qubits));
    }
    Partition::from_blocks(n, &blocks).map_err(|e| {
        let message = match e {
            StabilizerError::QubitAssignedTwice(q) => format!("qubit {} assigned twice", q + 1),
            StabilizerError::QubitUnassigned(q) => format!("qubit {} not assigned to a party", q + 1),
            other => other.to_string(),
        };
        syntax(line, message)
    })
}

pub fn format_parties(p: &Partition) -> String {
    (0..p.num_parties())
        .map(|a| {
            let idx: Vec<String> = p.qubits_of(a).iter().map(|q| (q + 1).to_string()).collect();
            format!("{}={}", p.parties()[a], idx.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A signed Pauli string with mandatory sign, of length `n` if given.
pub(crate) fn parse_signed(s: &str, n: Option<usize>, line: usize) -> Result<(PauliVector, bool), StateFileError> {
    if !(s.starts_with('+') || s.starts_with('-') || s.starts_with('\u{2212}')) {
        return Err(syntax(line, format!("generator {s:?} needs a leading + or -")));
    }
    let (sign, body) = split_sign(s);
    let v: PauliVector = body.parse().map_err(|_| syntax(line, format!("bad Pauli string {s:?}")))?;
    if let Some(n) = n {
        if v.num_qubits() != n {
            return Err(syntax(line, format!("generator has length {}, expected {n}", v.num_qubits())));
        }
    }
    Ok((v, sign))
}

pub fn parse_state(text: &str) -> Result<PartitionedStabilizerState, StateFileError> {
    let mut lines = significant_lines(text);
    let (l1, first) = lines.next().ok_or_else(|| syntax(1, "empty state file"))?;
    let n: usize = first
        .strip_prefix("n")
        .and_then(|r| r.trim_start().strip_prefix('='))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| syntax(l1, "expected n=<int>"))?;
    let (l2, second) = lines.next().ok_or_else(|| syntax(l1 + 1, "missing parties line"))?;
    let groups = second.strip_prefix("parties:").ok_or_else(|| syntax(l2, "expected parties:"))?;
    let partition = parse_parties(n, groups, l2)?;
    let (l3, third) = lines.next().ok_or_else(|| syntax(l2 + 1, "missing stabilizers: line"))?;
    if third != "stabilizers:" {
        return Err(syntax(l3, "expected stabilizers:"));
    }
    let mut gens = Vec::new();
    let mut signs = Vec::new();
    for (line, s) in lines {
        let (v, sign) = parse_signed(s, Some(n), line)?;
        gens.push(v);
        signs.push(sign);
    }
    let tableau = Tableau::new(n, gens, signs).map_err(|e| match e {
        CliffordError::WrongGeneratorCount { expected, found } => StateFileError::WrongGeneratorCount { expected, found },
        CliffordError::NotIsotropic { i, j } => StateFileError::NotIsotropic { i, j },
        CliffordError::NotIndependent => StateFileError::NotIndependent,
        other => syntax(l3, other.to_string()),
    })?;
    Ok(PartitionedStabilizerState::new(tableau, partition).expect("sizes checked above"))
}

pub fn serialize_state(state: &PartitionedStabilizerState) -> String {
    let t = state.tableau();
    let mut out = format!("n={}\nparties: {}\nstabilizers:\n", t.num_qubits(), format_parties(state.partition()));
    for i in 0..t.num_qubits() {
        out.push_str(&t.generator_string(i));
        out.push('\n');
    }
    out
}
