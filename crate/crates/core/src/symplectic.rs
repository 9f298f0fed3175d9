//! The symplectic space G^n of n-qubit Pauli operators modulo phase.
//!
//! A [`PauliVector`] holds an x-part and a z-part; `(x, z) = (1, 1)` on a
//! qubit is σ^y. Subspaces of G^n are stored as [`BinarySubspace`]s over the
//! flat layout `x_0 .. x_{n-1} z_0 .. z_{n-1}` (see [`PauliVector::to_bits`]).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::{self, BinarySubspace, BitVector, Gf2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("length mismatch: expected {expected} qubits, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ambient length {0} is odd, not a space of Pauli vectors")]
    OddAmbient(usize),
    #[error("families have different sizes ({left} vs {right})")]
    FamilySizeMismatch { left: usize, right: usize },
    #[error("symplectic products differ at pair ({j}, {k})")]
    InnerProductMismatch { j: usize, k: usize },
    #[error("linear relations differ: combination {combination} vanishes on only one family")]
    DependencyMismatch { combination: BitVector },
    #[error("invalid Pauli string {0:?}")]
    Parse(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// An element of G^n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliVector {
    x: BitVector,
    z: BitVector,
}

impl PauliVector {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    pub fn new(x: BitVector, z: BitVector) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts must have equal length");
        Self { x, z }
    }

    pub fn x_on(n: usize, q: usize) -> Self {
        Self { x: BitVector::unit(n, q), z: BitVector::zeros(n) }
    }

    pub fn z_on(n: usize, q: usize) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::unit(n, q) }
    }

    pub fn y_on(n: usize, q: usize) -> Self {
        Self { x: BitVector::unit(n, q), z: BitVector::unit(n, q) }
    }

    /// The `i`-th standard basis vector: `X_i` for `i < n`, else `Z_{i-n}`.
    pub fn standard(n: usize, i: usize) -> Self {
        if i < n {
            Self::x_on(n, i)
        } else {
            Self::z_on(n, i - n)
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn z(&self) -> &BitVector {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x.get(q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z.get(q)
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub(crate) fn x_mut(&mut self) -> &mut BitVector {
        &mut self.x
    }

    pub(crate) fn z_mut(&mut self) -> &mut BitVector {
        &mut self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).iter_ones().collect()
    }

    pub fn add_assign(&mut self, other: &PauliVector) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn add(&self, other: &PauliVector) -> PauliVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// ω(self, other): 1 iff the σ-operators anticommute.
    #[inline]
    pub fn omega(&self, other: &PauliVector) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// Flat layout `x ++ z`, length `2n`.
    pub fn to_bits(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    pub fn from_bits(bits: &BitVector) -> Result<Self, SymplecticError> {
        if !bits.len().is_multiple_of(2) {
            return Err(SymplecticError::OddAmbient(bits.len()));
        }
        let n = bits.len() / 2;
        Ok(Self { x: bits.slice(0, n), z: bits.slice(n, n) })
    }

    /// Projection onto the listed qubits, re-indexed `0..qubits.len()`.
    pub fn restrict(&self, qubits: &[usize]) -> PauliVector {
        Self { x: self.x.select(qubits), z: self.z.select(qubits) }
    }

    /// True iff the vector is the identity on every listed qubit.
    pub fn vanishes_on(&self, qubits: &[usize]) -> bool {
        qubits.iter().all(|&q| !self.x.get(q) && !self.z.get(q))
    }

    /// Place a vector over `qubits.len()` qubits onto the listed positions of
    /// an `n`-qubit register.
    pub fn embed(n: usize, qubits: &[usize], local: &PauliVector) -> PauliVector {
        assert_eq!(qubits.len(), local.num_qubits());
        let mut out = PauliVector::identity(n);
        for (k, &q) in qubits.iter().enumerate() {
            out.set(q, local.x.get(k), local.z.get(k));
        }
        out
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }
}

impl fmt::Display for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliVector({self})")
    }
}

impl FromStr for PauliVector {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        let mut out = PauliVector::identity(n);
        for (q, c) in s.chars().enumerate() {
            let (x, z) = match c {
                'I' | '_' => (false, false),
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => return Err(SymplecticError::Parse(s.to_string())),
            };
            out.set(q, x, z);
        }
        Ok(out)
    }
}

pub fn omega(f: &PauliVector, g: &PauliVector) -> Result<bool, SymplecticError> {
    if f.num_qubits() != g.num_qubits() {
        return Err(SymplecticError::LengthMismatch {
            expected: f.num_qubits(),
            found: g.num_qubits(),
        });
    }
    Ok(f.omega(g))
}

/// Swap the x and z halves of a flat vector.
fn swap_halves(bits: &BitVector) -> BitVector {
    let n = bits.len() / 2;
    bits.slice(n, n).concat(&bits.slice(0, n))
}

fn ambient_qubits(s: &BinarySubspace) -> Result<usize, SymplecticError> {
    if !s.ambient_len().is_multiple_of(2) {
        return Err(SymplecticError::OddAmbient(s.ambient_len()));
    }
    Ok(s.ambient_len() / 2)
}

/// Span of Pauli vectors as a subspace of the flat layout.
pub fn span_paulis<'a>(
    n: usize,
    vectors: impl IntoIterator<Item = &'a PauliVector>,
) -> Result<BinarySubspace, SymplecticError> {
    let flat: Vec<BitVector> = vectors.into_iter().map(|v| v.to_bits()).collect();
    Ok(BinarySubspace::span(2 * n, &flat)?)
}

pub fn basis_paulis(s: &BinarySubspace) -> Vec<PauliVector> {
    s.basis()
        .iter()
        .map(|b| PauliVector::from_bits(b).expect("even ambient"))
        .collect()
}

/// S^⊥ with respect to ω.
pub fn dual_subspace(s: &BinarySubspace) -> Result<BinarySubspace, SymplecticError> {
    let n = ambient_qubits(s)?;
    let swapped: Vec<BitVector> = s.basis().iter().map(swap_halves).collect();
    Ok(BinarySubspace::span(2 * n, &swapped)?.orthogonal_complement())
}

pub fn is_isotropic(s: &BinarySubspace) -> bool {
    if !s.ambient_len().is_multiple_of(2) {
        return false;
    }
    let basis = basis_paulis(s);
    basis
        .iter()
        .enumerate()
        .all(|(i, a)| basis[i + 1..].iter().all(|b| !a.omega(b)))
}

pub fn is_self_dual(s: &BinarySubspace) -> bool {
    s.ambient_len().is_multiple_of(2) && s.dim() == s.ambient_len() / 2 && is_isotropic(s)
}

/// A basis `e_1, ē_1, …, e_n, ē_n` with ω(e_j,e_k) = ω(ē_j,ē_k) = 0 and
/// ω(e_j,ē_k) = δ_jk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalBasis {
    pub e: Vec<PauliVector>,
    pub ebar: Vec<PauliVector>,
}

impl CanonicalBasis {
    pub fn standard(n: usize) -> Self {
        Self {
            e: (0..n).map(|q| PauliVector::x_on(n, q)).collect(),
            ebar: (0..n).map(|q| PauliVector::z_on(n, q)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.e.len()
    }

    /// Check every relation over all index pairs.
    pub fn satisfies_relations(&self) -> bool {
        let n = self.e.len();
        if self.ebar.len() != n {
            return false;
        }
        (0..n).all(|j| {
            (0..n).all(|k| {
                !self.e[j].omega(&self.e[k])
                    && !self.ebar[j].omega(&self.ebar[k])
                    && self.e[j].omega(&self.ebar[k]) == (j == k)
            })
        })
    }

    /// Coordinates `(F, F̄)` of `v`: v = Σ F_k e_k + F̄_k ē_k.
    pub fn coordinates(&self, v: &PauliVector) -> (BitVector, BitVector) {
        let n = self.e.len();
        let mut f = BitVector::zeros(n);
        let mut fbar = BitVector::zeros(n);
        for k in 0..n {
            f.set(k, v.omega(&self.ebar[k]));
            fbar.set(k, v.omega(&self.e[k]));
        }
        (f, fbar)
    }
}

/// Output of [`symplectic_gram_schmidt`]: the canonical basis together with
/// the coordinate rows of every input vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramSchmidt {
    pub basis: CanonicalBasis,
    /// Row `j` holds the `e`-coordinates of input `j`.
    pub f: Vec<BitVector>,
    /// Row `j` holds the `ē`-coordinates of input `j`.
    pub fbar: Vec<BitVector>,
}

/// A vector produced during pairing, with its expression in the inputs.
#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub vector: PauliVector,
    pub combo: BitVector,
}

#[derive(Clone, Debug)]
pub(crate) enum Slot {
    Pair(Tracked, Tracked),
    Isotropic(Tracked),
}

/// Symplectic pairing of an independent family.
///
/// Returns the slots in discovery order and, for each input, its `e`- and
/// `ē`-coordinates over slot indices. Every decision depends only on ω values
/// between residuals, so two ω-isometric families produce identical output.
pub(crate) fn pair_up(family: &[PauliVector]) -> (Vec<Slot>, Vec<BitVector>, Vec<BitVector>) {
    let r = family.len();
    let slots_max = r;
    let mut residual: Vec<Tracked> = family
        .iter()
        .enumerate()
        .map(|(i, v)| Tracked { vector: v.clone(), combo: BitVector::unit(r, i) })
        .collect();
    let mut ce: Vec<BitVector> = vec![BitVector::zeros(slots_max); r];
    let mut cb: Vec<BitVector> = vec![BitVector::zeros(slots_max); r];
    let mut pending: Vec<usize> = (0..r).collect();
    let mut slots = Vec::new();

    while let Some(&a) = pending.first() {
        let k = slots.len();
        let partner = pending[1..]
            .iter()
            .copied()
            .find(|&l| residual[a].vector.omega(&residual[l].vector));
        match partner {
            Some(l) => {
                pending.retain(|&i| i != a && i != l);
                let e = residual[a].clone();
                let eb = residual[l].clone();
                ce[a].set(k, true);
                cb[l].set(k, true);
                for &m in &pending {
                    let on_e = residual[m].vector.omega(&eb.vector);
                    let on_eb = residual[m].vector.omega(&e.vector);
                    if on_e {
                        ce[m].set(k, true);
                        residual[m].vector.add_assign(&e.vector);
                        residual[m].combo.xor_assign(&e.combo);
                    }
                    if on_eb {
                        cb[m].set(k, true);
                        residual[m].vector.add_assign(&eb.vector);
                        residual[m].combo.xor_assign(&eb.combo);
                    }
                }
                slots.push(Slot::Pair(e, eb));
            }
            None => {
                pending.remove(0);
                ce[a].set(k, true);
                slots.push(Slot::Isotropic(residual[a].clone()));
            }
        }
    }
    let used = slots.len();
    let trim = |rows: Vec<BitVector>| -> Vec<BitVector> {
        rows.into_iter().map(|row| row.slice(0, used)).collect()
    };
    (slots, trim(ce), trim(cb))
}

/// Remove the components along a completed pair.
fn project_out(v: &mut PauliVector, e: &PauliVector, eb: &PauliVector) {
    let on_e = v.omega(eb);
    let on_eb = v.omega(e);
    if on_e {
        v.add_assign(e);
    }
    if on_eb {
        v.add_assign(eb);
    }
}

/// Extend an arbitrary family in G^n to a canonical basis.
///
/// Inputs are scanned in order; the first vector independent of its
/// predecessors joins the working family, dependent vectors only receive
/// coordinates. Working vectors are paired greedily with the first later
/// vector they anticommute with; unpaired ones become isotropic basis
/// vectors whose partners, and the rest of the basis, come from the standard
/// basis projected onto the symplectic complement, lowest index first.
pub fn symplectic_gram_schmidt(
    n: usize,
    vectors: &[PauliVector],
) -> Result<GramSchmidt, SymplecticError> {
    for v in vectors {
        if v.num_qubits() != n {
            return Err(SymplecticError::LengthMismatch { expected: n, found: v.num_qubits() });
        }
    }

    // Independent subfamily and the expression of every input in it.
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_flat: Vec<BitVector> = Vec::new();
    let mut span = BinarySubspace::zero(2 * n);
    for (j, v) in vectors.iter().enumerate() {
        let flat = v.to_bits();
        if !span.contains(&flat) {
            span = span.sum(&BinarySubspace::span(2 * n, [&flat])?)?;
            chosen.push(j);
            chosen_flat.push(flat);
        }
    }
    let family: Vec<PauliVector> = chosen.iter().map(|&j| vectors[j].clone()).collect();
    let (slots, ce, cb) = pair_up(&family);

    let mut e: Vec<PauliVector> = Vec::with_capacity(n);
    let mut ebar: Vec<Option<PauliVector>> = Vec::with_capacity(n);
    for slot in &slots {
        match slot {
            Slot::Pair(a, b) => {
                e.push(a.vector.clone());
                ebar.push(Some(b.vector.clone()));
            }
            Slot::Isotropic(a) => {
                e.push(a.vector.clone());
                ebar.push(None);
            }
        }
    }

    // Standard basis vectors projected onto the complement of completed pairs.
    let mut candidates: Vec<PauliVector> = (0..2 * n).map(|i| PauliVector::standard(n, i)).collect();
    for (k, eb) in ebar.iter().enumerate() {
        if let Some(eb) = eb {
            for c in candidates.iter_mut() {
                project_out(c, &e[k], eb);
            }
        }
    }

    // Partners for isotropic slots.
    let isotropic: Vec<usize> = (0..e.len()).filter(|&k| ebar[k].is_none()).collect();
    for (pos, &k) in isotropic.iter().enumerate() {
        let open = &isotropic[pos..];
        let rows: Vec<BitVector> = candidates
            .iter()
            .map(|c| BitVector::from_bools(&open.iter().map(|&j| c.omega(&e[j])).collect::<Vec<_>>()))
            .collect();
        let target = BitVector::unit(open.len(), 0);
        let x = gf2::solve(&rows, &target)?
            .expect("independent isotropic vectors admit a dual partner");
        let mut partner = PauliVector::identity(n);
        for i in x.iter_ones() {
            partner.add_assign(&candidates[i]);
        }
        for c in candidates.iter_mut() {
            project_out(c, &e[k], &partner);
        }
        ebar[k] = Some(partner);
    }

    // Remaining pairs.
    let mut ebar: Vec<PauliVector> = ebar.into_iter().map(|b| b.expect("completed")).collect();
    let mut next = 0;
    while e.len() < n {
        while candidates[next].is_identity() {
            next += 1;
        }
        let v = candidates[next].clone();
        let w = candidates
            .iter()
            .find(|c| v.omega(c))
            .expect("the complement is symplectic")
            .clone();
        for c in candidates.iter_mut() {
            project_out(c, &v, &w);
        }
        e.push(v);
        ebar.push(w);
    }

    // Coordinates of every input.
    let mut f = Vec::with_capacity(vectors.len());
    let mut fbar = Vec::with_capacity(vectors.len());
    for v in vectors {
        let x = gf2::solve(&chosen_flat, &v.to_bits())?.expect("input lies in its own span");
        let mut row = BitVector::zeros(n);
        let mut row_bar = BitVector::zeros(n);
        for i in x.iter_ones() {
            for k in ce[i].iter_ones() {
                row.flip(k);
            }
            for k in cb[i].iter_ones() {
                row_bar.flip(k);
            }
        }
        f.push(row);
        fbar.push(row_bar);
    }

    Ok(GramSchmidt { basis: CanonicalBasis { e, ebar }, f, fbar })
}

/// A linear map on G^n preserving ω, stored as the images of the standard
/// basis `X_0 .. X_{n-1}, Z_0 .. Z_{n-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct SymplecticMap {
    n: usize,
    images: Vec<PauliVector>,
}

impl fmt::Debug for SymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticMap").field("n", &self.n).field("images", &self.images).finish()
    }
}

impl SymplecticMap {
    pub fn identity(n: usize) -> Self {
        Self { n, images: (0..2 * n).map(|i| PauliVector::standard(n, i)).collect() }
    }

    /// Build from the images of the standard basis. The result is not
    /// checked; see [`SymplecticMap::is_symplectic`].
    pub fn from_images(n: usize, images: Vec<PauliVector>) -> Result<Self, SymplecticError> {
        if images.len() != 2 * n {
            return Err(SymplecticError::LengthMismatch { expected: 2 * n, found: images.len() });
        }
        for im in &images {
            if im.num_qubits() != n {
                return Err(SymplecticError::LengthMismatch { expected: n, found: im.num_qubits() });
            }
        }
        Ok(Self { n, images })
    }

    /// The map sending `from.e_k ↦ to.e_k` and `from.ē_k ↦ to.ē_k`.
    pub fn between_bases(from: &CanonicalBasis, to: &CanonicalBasis) -> Self {
        let n = from.num_qubits();
        let images = (0..2 * n)
            .map(|i| {
                let (f, fbar) = from.coordinates(&PauliVector::standard(n, i));
                let mut img = PauliVector::identity(n);
                for k in f.iter_ones() {
                    img.add_assign(&to.e[k]);
                }
                for k in fbar.iter_ones() {
                    img.add_assign(&to.ebar[k]);
                }
                img
            })
            .collect();
        Self { n, images }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliVector] {
        &self.images
    }

    /// The dense `2n × 2n` matrix; row `i` is the flat image of basis vector `i`.
    pub fn matrix(&self) -> Vec<BitVector> {
        self.images.iter().map(|v| v.to_bits()).collect()
    }

    pub fn apply(&self, v: &PauliVector) -> PauliVector {
        assert_eq!(v.num_qubits(), self.n);
        let mut out = PauliVector::identity(self.n);
        for q in v.x().iter_ones() {
            out.add_assign(&self.images[q]);
        }
        for q in v.z().iter_ones() {
            out.add_assign(&self.images[self.n + q]);
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SymplecticMap) -> SymplecticMap {
        assert_eq!(self.n, other.n);
        Self { n: self.n, images: self.images.iter().map(|v| other.apply(v)).collect() }
    }

    /// ω is preserved on every pair of standard basis vectors.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (i + 1..2 * n).all(|j| {
                let expected = j == i + n;
                self.images[i].omega(&self.images[j]) == expected
            })
        })
    }

    pub fn apply_subspace(&self, s: &BinarySubspace) -> Result<BinarySubspace, SymplecticError> {
        let images: Vec<PauliVector> = basis_paulis(s).iter().map(|v| self.apply(v)).collect();
        span_paulis(self.n, &images)
    }
}

/// A symplectic `u` with `u(f_j) = f'_j` for every `j`.
///
/// Requires matching ω values on every pair and identical linear relations
/// within both families; the error carries a witness when either fails.
pub fn map_between_families(
    n: usize,
    f: &[PauliVector],
    fprime: &[PauliVector],
) -> Result<SymplecticMap, SymplecticError> {
    if f.len() != fprime.len() {
        return Err(SymplecticError::FamilySizeMismatch { left: f.len(), right: fprime.len() });
    }
    for v in f.iter().chain(fprime) {
        if v.num_qubits() != n {
            return Err(SymplecticError::LengthMismatch { expected: n, found: v.num_qubits() });
        }
    }
    let left: Vec<BitVector> = f.iter().map(|v| v.to_bits()).collect();
    let right: Vec<BitVector> = fprime.iter().map(|v| v.to_bits()).collect();
    let kl = gf2::kernel(&left)?;
    let kr = gf2::kernel(&right)?;
    if kl != kr {
        let combination = kl
            .basis()
            .iter()
            .find(|x| !kr.contains(x))
            .or_else(|| kr.basis().iter().find(|x| !kl.contains(x)))
            .expect("distinct subspaces differ on a basis vector")
            .clone();
        return Err(SymplecticError::DependencyMismatch { combination });
    }
    for j in 0..f.len() {
        for k in j + 1..f.len() {
            if f[j].omega(&f[k]) != fprime[j].omega(&fprime[k]) {
                return Err(SymplecticError::InnerProductMismatch { j, k });
            }
        }
    }
    let gs = symplectic_gram_schmidt(n, f)?;
    let gs_prime = symplectic_gram_schmidt(n, fprime)?;
    debug_assert_eq!(gs.f, gs_prime.f);
    debug_assert_eq!(gs.fbar, gs_prime.fbar);
    Ok(SymplecticMap::between_bases(&gs.basis, &gs_prime.basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliVector {
        s.parse().unwrap()
    }

    fn span(vs: &[&str]) -> BinarySubspace {
        let ps: Vec<PauliVector> = vs.iter().map(|s| p(s)).collect();
        span_paulis(ps[0].num_qubits(), &ps).unwrap()
    }

    #[test]
    fn omega_examples() {
        assert!(omega(&p("X"), &p("Z")).unwrap());
        assert!(omega(&p("XX"), &p("ZI")).unwrap());
        assert!(!omega(&p("XX"), &p("ZZ")).unwrap());
        assert!(!p("YZX").omega(&p("YZX")));
        assert!(omega(&p("X"), &p("XZ")).is_err());
    }

    /// All 16 vectors of G^2 orthogonal to every element of `s`.
    fn brute_dual(s: &[PauliVector]) -> Vec<PauliVector> {
        (0..16u32)
            .map(|m| PauliVector::from_bits(&BitVector::from_indices(4, (0..4).filter(|b| m >> b & 1 == 1))).unwrap())
            .filter(|f| s.iter().all(|g| !f.omega(g)))
            .collect()
    }

    #[test]
    fn dual_subspace_examples() {
        let full = BinarySubspace::full(4);
        assert_eq!(dual_subspace(&full).unwrap().dim(), 0);
        assert_eq!(dual_subspace(&BinarySubspace::zero(4)).unwrap(), full);
        let s = span(&["XX", "ZZ"]);
        let d = dual_subspace(&s).unwrap();
        assert_eq!(d, s);
        let brute = brute_dual(&[p("XX"), p("ZZ")]);
        assert_eq!(brute.len(), 4);
        assert_eq!(span_paulis(2, &brute).unwrap(), s);
        assert!(dual_subspace(&BinarySubspace::zero(3)).is_err());
    }

    #[test]
    fn isotropy_examples() {
        let s = span(&["XX", "ZZ"]);
        assert!(is_isotropic(&s) && is_self_dual(&s));
        let t = span(&["XI", "ZI"]);
        assert!(!is_isotropic(&t));
        let z = BinarySubspace::zero(4);
        assert!(is_isotropic(&z) && !is_self_dual(&z));
    }

    #[test]
    fn gram_schmidt_empty_family_is_standard() {
        let gs = symplectic_gram_schmidt(2, &[]).unwrap();
        assert_eq!(gs.basis, CanonicalBasis::standard(2));
        assert!(gs.f.is_empty() && gs.fbar.is_empty());
    }

    #[test]
    fn gram_schmidt_single_x() {
        let gs = symplectic_gram_schmidt(1, &[p("X")]).unwrap();
        assert_eq!(gs.basis.e, vec![p("X")]);
        assert_eq!(gs.basis.ebar, vec![p("Z")]);
        assert!(gs.basis.satisfies_relations());
        assert_eq!(gs.f, vec!["1".parse().unwrap()]);
        assert_eq!(gs.fbar, vec!["0".parse().unwrap()]);
    }

    #[test]
    fn gram_schmidt_commuting_pair() {
        let gs = symplectic_gram_schmidt(2, &[p("XX"), p("ZZ")]).unwrap();
        assert!(gs.basis.satisfies_relations());
        assert_eq!(gs.basis.e[0], p("XX"));
        assert!(gs.basis.e[0].omega(&gs.basis.ebar[0]));
        for (j, v) in [p("XX"), p("ZZ")].iter().enumerate() {
            let mut rebuilt = PauliVector::identity(2);
            for k in gs.f[j].iter_ones() {
                rebuilt.add_assign(&gs.basis.e[k]);
            }
            for k in gs.fbar[j].iter_ones() {
                rebuilt.add_assign(&gs.basis.ebar[k]);
            }
            assert_eq!(&rebuilt, v);
        }
    }

    #[test]
    fn map_between_families_examples() {
        let u = map_between_families(1, &[p("X")], &[p("Z")]).unwrap();
        assert_eq!(u.apply(&p("X")), p("Z"));
        assert_eq!(u.apply(&p("Z")), p("X"));
        assert!(u.is_symplectic());

        let fam = [p("XZI"), p("IYZ")];
        let u = map_between_families(3, &fam, &fam).unwrap();
        for v in &fam {
            assert_eq!(&u.apply(v), v);
        }

        let err = map_between_families(1, &[p("X"), p("X")], &[p("X"), p("Z")]).unwrap_err();
        assert_eq!(err, SymplecticError::DependencyMismatch { combination: "11".parse().unwrap() });

        let err = map_between_families(2, &[p("XI"), p("ZI")], &[p("XI"), p("IZ")]).unwrap_err();
        assert_eq!(err, SymplecticError::InnerProductMismatch { j: 0, k: 1 });
    }

    #[test]
    fn symplectic_map_detects_non_symplectic() {
        let bad = SymplecticMap::from_images(1, vec![p("X"), p("X")]).unwrap();
        assert!(!bad.is_symplectic());
        assert!(SymplecticMap::identity(3).is_symplectic());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliVector> {
        prop::collection::vec(any::<bool>(), 2 * n)
            .prop_map(move |b| PauliVector::from_bits(&BitVector::from_bools(&b)).unwrap())
    }

    proptest! {
        #[test]
        fn gram_schmidt_relations_and_reconstruction(
            (n, fam) in (1usize..6).prop_flat_map(|n| (Just(n), prop::collection::vec(arb_pauli(n), 0..8)))
        ) {
            let gs = symplectic_gram_schmidt(n, &fam).unwrap();
            prop_assert!(gs.basis.satisfies_relations());
            for (j, v) in fam.iter().enumerate() {
                let (f, fbar) = gs.basis.coordinates(v);
                prop_assert_eq!(&f, &gs.f[j]);
                prop_assert_eq!(&fbar, &gs.fbar[j]);
            }
        }

        #[test]
        fn omega_is_bilinear(a in arb_pauli(5), b in arb_pauli(5), c in arb_pauli(5)) {
            prop_assert_eq!(a.add(&b).omega(&c), a.omega(&c) ^ b.omega(&c));
            prop_assert_eq!(a.omega(&b), b.omega(&a));
        }
    }
}
