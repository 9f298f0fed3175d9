//! Phase-exact stabilizer tableaus and Clifford circuits.
//!
//! Generators are Hermitian σ-operators with one sign bit each. Products are
//! accumulated with a mod-4 power of `i` so that `Y = iXZ` never leaves a
//! stray phase in a stored sign.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::gf2::{self, BinarySubspace, BitVector};
use crate::symplectic::{span_paulis, PauliVector, SymplecticError, SymplecticMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliffordError {
    #[error("gate {index} touches qubit {qubit}, register has {n} qubits")]
    QubitOutOfRange { index: usize, qubit: usize, n: usize },
    #[error("CNOT with control equal to target on qubit {0}")]
    DegenerateCnot(usize),
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("map does not preserve the symplectic form")]
    NotSymplectic,
    #[error("expected {expected} generators, found {found}")]
    WrongGeneratorCount { expected: usize, found: usize },
    #[error("generators are not linearly independent")]
    NotIndependent,
    #[error("generators {i} and {j} anticommute")]
    NotIsotropic { i: usize, j: usize },
    #[error("gate {index} of circuit for block {block} acts on qubit {qubit} outside the block")]
    Locality { block: usize, index: usize, qubit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Elementary Clifford gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    /// The phase gate S = diag(1, i).
    P(usize),
    Cnot { control: usize, target: usize },
    X(usize),
    Y(usize),
    Z(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::P(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn relabel(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(map[q]),
            Gate::P(q) => Gate::P(map[q]),
            Gate::X(q) => Gate::X(map[q]),
            Gate::Y(q) => Gate::Y(map[q]),
            Gate::Z(q) => Gate::Z(map[q]),
            Gate::Cnot { control, target } => Gate::Cnot { control: map[control], target: map[target] },
        }
    }

    /// Conjugate `v` in place (`U σ(v) U†`); returns true when the sign flips.
    #[inline]
    pub fn conjugate(&self, v: &mut PauliVector) -> bool {
        match *self {
            Gate::H(q) => {
                let (x, z) = (v.x_bit(q), v.z_bit(q));
                v.set(q, z, x);
                x & z
            }
            Gate::P(q) => {
                let (x, z) = (v.x_bit(q), v.z_bit(q));
                v.set(q, x, z ^ x);
                x & z
            }
            Gate::Cnot { control, target } => {
                let (xc, zc) = (v.x_bit(control), v.z_bit(control));
                let (xt, zt) = (v.x_bit(target), v.z_bit(target));
                v.x_mut().set(target, xt ^ xc);
                v.z_mut().set(control, zc ^ zt);
                xc & zt & !(xt ^ zc)
            }
            Gate::X(q) => v.z_bit(q),
            Gate::Y(q) => v.x_bit(q) ^ v.z_bit(q),
            Gate::Z(q) => v.x_bit(q),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::P(q) => write!(f, "P {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Y(q) => write!(f, "Y {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// An ordered gate list; the first gate acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliffordCircuit {
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &CliffordCircuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Rename qubit `q` to `map[q]`.
    pub fn relabel(&self, map: &[usize]) -> CliffordCircuit {
        Self { gates: self.gates.iter().map(|g| g.relabel(map)).collect() }
    }

    /// Pauli gates realizing `σ(p)`.
    pub fn pauli_layer(p: &PauliVector) -> CliffordCircuit {
        let gates = (0..p.num_qubits())
            .filter_map(|q| match (p.x_bit(q), p.z_bit(q)) {
                (true, false) => Some(Gate::X(q)),
                (false, true) => Some(Gate::Z(q)),
                (true, true) => Some(Gate::Y(q)),
                (false, false) => None,
            })
            .collect();
        Self { gates }
    }

    pub fn check(&self, n: usize) -> Result<(), CliffordError> {
        for (index, g) in self.gates.iter().enumerate() {
            for q in g.qubits() {
                if q >= n {
                    return Err(CliffordError::QubitOutOfRange { index, qubit: q, n });
                }
            }
            if let Gate::Cnot { control, target } = *g {
                if control == target {
                    return Err(CliffordError::DegenerateCnot(control));
                }
            }
        }
        Ok(())
    }

    /// The sign-blind action on G^n.
    pub fn symplectic_map(&self, n: usize) -> Result<SymplecticMap, CliffordError> {
        self.check(n)?;
        let images = (0..2 * n)
            .map(|i| {
                let mut v = PauliVector::standard(n, i);
                for g in &self.gates {
                    g.conjugate(&mut v);
                }
                v
            })
            .collect();
        Ok(SymplecticMap::from_images(n, images)?)
    }
}

impl fmt::Display for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for CliffordCircuit {
    type Err = CliffordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut gates = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            gates.push(parse_gate(line).map_err(|message| CliffordError::Parse { line: i + 1, message })?);
        }
        Ok(Self { gates })
    }
}

fn parse_gate(line: &str) -> Result<Gate, String> {
    let mut parts = line.split_whitespace();
    let name = parts.next().ok_or("empty gate")?;
    let args: Vec<usize> = parts
        .map(|a| a.parse::<usize>().map_err(|_| format!("bad qubit index {a:?}")))
        .collect::<Result<_, _>>()?;
    let one = |ctor: fn(usize) -> Gate| match args.as_slice() {
        [q] => Ok(ctor(*q)),
        _ => Err(format!("{name} takes one qubit")),
    };
    match name.to_ascii_uppercase().as_str() {
        "H" => one(Gate::H),
        "P" | "S" => one(Gate::P),
        "X" => one(Gate::X),
        "Y" => one(Gate::Y),
        "Z" => one(Gate::Z),
        "CNOT" | "CX" => match args.as_slice() {
            [c, t] => Ok(Gate::Cnot { control: *c, target: *t }),
            _ => Err("CNOT takes two qubits".to_string()),
        },
        other => Err(format!("unknown gate {other:?}")),
    }
}

/// Power of `i` in `σ(f)σ(g) = i^k σ(f+g)`.
pub fn product_phase(f: &PauliVector, g: &PauliVector) -> u8 {
    let sum = f.add(g);
    let k = f.x().and_count(f.z()) + g.x().and_count(g.z()) + 2 * f.z().and_count(g.x());
    let back = sum.x().and_count(sum.z());
    ((k + 4 * back - back) % 4) as u8
}

/// A stabilizer group given by `n` signed generators on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    generators: Vec<PauliVector>,
    /// `true` means the generator enters the group with sign −1.
    signs: Vec<bool>,
}

impl Tableau {
    /// Build and validate.
    pub fn new(n: usize, generators: Vec<PauliVector>, signs: Vec<bool>) -> Result<Self, CliffordError> {
        let t = Self::unchecked(n, generators, signs)?;
        t.validate()?;
        Ok(t)
    }

    /// Build with only shape checks.
    pub fn unchecked(n: usize, generators: Vec<PauliVector>, signs: Vec<bool>) -> Result<Self, CliffordError> {
        if signs.len() != generators.len() {
            return Err(CliffordError::SizeMismatch { left: generators.len(), right: signs.len() });
        }
        for g in &generators {
            if g.num_qubits() != n {
                return Err(CliffordError::SizeMismatch { left: n, right: g.num_qubits() });
            }
        }
        Ok(Self { n, generators, signs })
    }

    /// `|0…0⟩`, stabilized by `+Z_q`.
    pub fn zero_state(n: usize) -> Self {
        Self { n, generators: (0..n).map(|q| PauliVector::z_on(n, q)).collect(), signs: vec![false; n] }
    }

    /// From strings like `"+XXX"` or `"-ZZI"`; a missing sign means `+`.
    pub fn from_strings(items: &[&str]) -> Result<Self, CliffordError> {
        let mut gens = Vec::new();
        let mut signs = Vec::new();
        for (i, s) in items.iter().enumerate() {
            let (sign, body) = split_sign(s.trim());
            let v: PauliVector = body.parse().map_err(|_| CliffordError::Parse {
                line: i + 1,
                message: format!("bad Pauli string {s:?}"),
            })?;
            gens.push(v);
            signs.push(sign);
        }
        let n = gens.first().map_or(0, |g| g.num_qubits());
        Self::new(n, gens, signs)
    }

    pub fn validate(&self) -> Result<(), CliffordError> {
        if self.generators.len() != self.n {
            return Err(CliffordError::WrongGeneratorCount { expected: self.n, found: self.generators.len() });
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.generators[i].omega(&self.generators[j]) {
                    return Err(CliffordError::NotIsotropic { i, j });
                }
            }
        }
        if self.group().dim() != self.n {
            return Err(CliffordError::NotIndependent);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliVector] {
        &self.generators
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    pub fn group(&self) -> BinarySubspace {
        span_paulis(self.n, &self.generators).expect("generator lengths checked")
    }

    fn flat(&self) -> Vec<BitVector> {
        self.generators.iter().map(|g| g.to_bits()).collect()
    }

    /// The signed product of the generators selected by `combo`.
    pub fn element(&self, combo: &BitVector) -> (PauliVector, bool) {
        let mut acc = PauliVector::identity(self.n);
        let mut phase: u8 = 0;
        for i in combo.iter_ones() {
            phase = (phase + 2 * self.signs[i] as u8 + product_phase(&acc, &self.generators[i])) % 4;
            acc.add_assign(&self.generators[i]);
        }
        assert!(phase.is_multiple_of(2), "product of commuting generators picked up a factor of i");
        (acc, phase == 2)
    }

    /// The sign with which `v` belongs to the group, if it does.
    pub fn sign_of(&self, v: &PauliVector) -> Option<bool> {
        let combo = gf2::solve(&self.flat(), &v.to_bits()).ok()??;
        Some(self.element(&combo).1)
    }

    /// Signed string like `"+XZI"`.
    pub fn generator_string(&self, i: usize) -> String {
        format!("{}{}", if self.signs[i] { '-' } else { '+' }, self.generators[i])
    }

    /// Bring the generators to reduced row echelon form in the flat layout.
    pub fn canonicalize(&self) -> Tableau {
        let mut gens = self.generators.clone();
        let mut signs = self.signs.clone();
        let mut next = 0;
        for col in 0..2 * self.n {
            let bit = |v: &PauliVector| if col < self.n { v.x_bit(col) } else { v.z_bit(col - self.n) };
            let Some(found) = (next..gens.len()).find(|&r| bit(&gens[r])) else { continue };
            gens.swap(next, found);
            signs.swap(next, found);
            for r in 0..gens.len() {
                if r != next && bit(&gens[r]) {
                    let phase = (2 * signs[r] as u8 + 2 * signs[next] as u8 + product_phase(&gens[r], &gens[next])) % 4;
                    let pivot = gens[next].clone();
                    gens[r].add_assign(&pivot);
                    signs[r] = phase == 2;
                }
            }
            next += 1;
        }
        Tableau { n: self.n, generators: gens, signs }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), CliffordError> {
        CliffordCircuit::from_gates(vec![*gate]).check(self.n)?;
        for (g, s) in self.generators.iter_mut().zip(self.signs.iter_mut()) {
            *s ^= gate.conjugate(g);
        }
        Ok(())
    }

    pub fn apply_circuit(&self, circuit: &CliffordCircuit) -> Result<Tableau, CliffordError> {
        circuit.check(self.n)?;
        let mut out = self.clone();
        for gate in circuit.gates() {
            for (g, s) in out.generators.iter_mut().zip(out.signs.iter_mut()) {
                *s ^= gate.conjugate(g);
            }
        }
        Ok(out)
    }
}

pub(crate) fn split_sign(s: &str) -> (bool, &str) {
    if let Some(rest) = s.strip_prefix('+') {
        (false, rest)
    } else if let Some(rest) = s.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = s.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, s)
    }
}

pub fn apply_circuit(t: &Tableau, c: &CliffordCircuit) -> Result<Tableau, CliffordError> {
    t.apply_circuit(c)
}

/// Outcome of comparing two stabilizer states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateComparison {
    Exact,
    /// Same group; applying `σ(correction)` to the first state gives the second.
    UpToPauli(PauliVector),
    DifferentGroup,
}

pub fn states_equal(t1: &Tableau, t2: &Tableau) -> Result<StateComparison, CliffordError> {
    if t1.n != t2.n {
        return Err(CliffordError::SizeMismatch { left: t1.n, right: t2.n });
    }
    let n = t1.n;
    if t1.group() != t2.group() {
        return Ok(StateComparison::DifferentGroup);
    }
    let mut discrepancy = BitVector::zeros(t2.generators.len());
    for (i, g) in t2.generators.iter().enumerate() {
        let s1 = t1.sign_of(g).expect("groups coincide");
        discrepancy.set(i, s1 ^ t2.signs[i]);
    }
    if discrepancy.is_zero() {
        return Ok(StateComparison::Exact);
    }
    // σ(c) flips the sign of g iff ω(c, g) = 1.
    let rows: Vec<BitVector> = (0..2 * n)
        .map(|c| {
            let s = PauliVector::standard(n, c);
            BitVector::from_bools(&t2.generators.iter().map(|g| s.omega(g)).collect::<Vec<_>>())
        })
        .collect();
    let x = gf2::solve(&rows, &discrepancy)
        .expect("lengths agree")
        .expect("independent generators admit any sign pattern");
    let mut correction = PauliVector::identity(n);
    for c in x.iter_ones() {
        correction.add_assign(&PauliVector::standard(n, c));
    }
    Ok(StateComparison::UpToPauli(correction))
}

/// Elementary-gate circuit whose sign-blind action is `u`.
///
/// Gaussian elimination column by column: the images of `X_j` and `Z_j` are
/// driven to `X_j` and `Z_j` with H, P and CNOT, and the recorded gates are
/// replayed in reverse. Uses O(n²) gates.
pub fn synthesize_circuit(u: &SymplecticMap) -> Result<CliffordCircuit, CliffordError> {
    if !u.is_symplectic() {
        return Err(CliffordError::NotSymplectic);
    }
    let n = u.num_qubits();
    let mut rows: Vec<PauliVector> = u.images().to_vec();
    let mut applied: Vec<Gate> = Vec::new();
    let mut apply = |g: Gate, rows: &mut Vec<PauliVector>| {
        for r in rows.iter_mut() {
            g.conjugate(r);
        }
        applied.push(g);
    };

    for j in 0..n {
        for k in j..n {
            match (rows[j].x_bit(k), rows[j].z_bit(k)) {
                (true, true) => apply(Gate::P(k), &mut rows),
                (false, true) => apply(Gate::H(k), &mut rows),
                _ => {}
            }
        }
        if !rows[j].x_bit(j) {
            let k = (j + 1..n).find(|&k| rows[j].x_bit(k)).expect("image of X_j is nonzero");
            apply(Gate::Cnot { control: k, target: j }, &mut rows);
        }
        for k in j + 1..n {
            if rows[j].x_bit(k) {
                apply(Gate::Cnot { control: j, target: k }, &mut rows);
            }
        }

        let w = n + j;
        for k in j + 1..n {
            match (rows[w].x_bit(k), rows[w].z_bit(k)) {
                (true, false) => apply(Gate::H(k), &mut rows),
                (true, true) => {
                    apply(Gate::P(k), &mut rows);
                    apply(Gate::H(k), &mut rows);
                }
                _ => {}
            }
        }
        for k in j + 1..n {
            if rows[w].z_bit(k) {
                apply(Gate::Cnot { control: k, target: j }, &mut rows);
            }
        }
        if rows[w].x_bit(j) {
            apply(Gate::H(j), &mut rows);
            apply(Gate::P(j), &mut rows);
            apply(Gate::H(j), &mut rows);
        }
    }
    debug_assert!(rows.iter().enumerate().all(|(i, r)| *r == PauliVector::standard(n, i)));
    applied.reverse();
    Ok(CliffordCircuit::from_gates(applied))
}

/// Apply one circuit per qubit block and compare with `target`.
///
/// Every gate of `circuits[b]` must act inside `blocks[b]`.
pub fn verify_local_circuits(
    input: &Tableau,
    blocks: &[Vec<usize>],
    circuits: &[CliffordCircuit],
    target: &Tableau,
) -> Result<StateComparison, CliffordError> {
    if blocks.len() != circuits.len() {
        return Err(CliffordError::SizeMismatch { left: blocks.len(), right: circuits.len() });
    }
    let mut state = input.clone();
    for (b, (block, circuit)) in blocks.iter().zip(circuits).enumerate() {
        for (index, g) in circuit.gates().iter().enumerate() {
            if let Some(&qubit) = g.qubits().iter().find(|q| !block.contains(q)) {
                return Err(CliffordError::Locality { block: b, index, qubit });
            }
        }
        state = state.apply_circuit(circuit)?;
    }
    states_equal(&state, target)
}

/// `len` random gates from {H, P, CNOT, X, Y, Z} on the listed qubits.
pub fn random_circuit<R: Rng + ?Sized>(qubits: &[usize], len: usize, rng: &mut R) -> CliffordCircuit {
    let mut c = CliffordCircuit::new();
    if qubits.is_empty() {
        return c;
    }
    for _ in 0..len {
        let q = qubits[rng.gen_range(0..qubits.len())];
        let gate = match rng.gen_range(0..6) {
            0 => Gate::H(q),
            1 => Gate::P(q),
            2 if qubits.len() > 1 => {
                let mut t = qubits[rng.gen_range(0..qubits.len())];
                while t == q {
                    t = qubits[rng.gen_range(0..qubits.len())];
                }
                Gate::Cnot { control: q, target: t }
            }
            2 | 3 => Gate::X(q),
            4 => Gate::Y(q),
            _ => Gate::Z(q),
        };
        c.push(gate);
    }
    c
}
