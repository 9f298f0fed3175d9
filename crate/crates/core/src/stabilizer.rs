//! Stabilizer states split among parties: local and co-local subgroups,
//! the GHZ yield Δ, subset entropies and extraction of local |0⟩ qubits.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clifford::{random_circuit, synthesize_circuit, CliffordCircuit, CliffordError, Gate, Tableau};
use crate::gf2::{self, BinarySubspace, BitVector};
use crate::symplectic::{basis_paulis, map_between_families, span_paulis, PauliVector, SymplecticError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilizerError {
    #[error("unknown party index {0}")]
    UnknownParty(usize),
    #[error("party {0:?} listed twice")]
    DuplicateParty(String),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("qubit {0} assigned to more than one party")]
    QubitAssignedTwice(usize),
    #[error("qubit {0} not assigned to any party")]
    QubitUnassigned(usize),
    #[error("partition covers {partition} qubits but state has {state}")]
    SizeMismatch { partition: usize, state: usize },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Assignment of qubits to named parties. Parties may own no qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parties: Vec<String>,
    assignment: Vec<usize>,
}

impl Partition {
    pub fn new(parties: Vec<String>, assignment: Vec<usize>) -> Result<Self, StabilizerError> {
        let mut seen = HashSet::new();
        for p in &parties {
            if !seen.insert(p.as_str()) {
                return Err(StabilizerError::DuplicateParty(p.clone()));
            }
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= parties.len()) {
            return Err(StabilizerError::UnknownParty(bad));
        }
        Ok(Self { parties, assignment })
    }

    /// Parties given as explicit qubit lists, which must cover `0..n` exactly once.
    pub fn from_blocks<S: AsRef<str>>(n: usize, blocks: &[(S, Vec<usize>)]) -> Result<Self, StabilizerError> {
        let mut assignment = vec![usize::MAX; n];
        for (i, (_, qubits)) in blocks.iter().enumerate() {
            for &q in qubits {
                if q >= n {
                    return Err(StabilizerError::QubitOutOfRange { qubit: q, n });
                }
                if assignment[q] != usize::MAX {
                    return Err(StabilizerError::QubitAssignedTwice(q));
                }
                assignment[q] = i;
            }
        }
        if let Some(q) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(StabilizerError::QubitUnassigned(q));
        }
        Self::new(blocks.iter().map(|(name, _)| name.as_ref().to_string()).collect(), assignment)
    }

    /// One party per qubit, named A, B, C, ...
    pub fn singletons(n: usize) -> Self {
        Self { parties: (0..n).map(default_name).collect(), assignment: (0..n).collect() }
    }

    pub fn num_qubits(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.parties.iter().position(|p| p == name)
    }

    pub fn party_of(&self, qubit: usize) -> usize {
        self.assignment[qubit]
    }

    /// Qubits of `party` in increasing order.
    pub fn qubits_of(&self, party: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&q| self.assignment[q] == party).collect()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.parties.len()).map(|a| self.qubits_of(a)).collect()
    }

    /// Partition of the listed qubits, renumbered `0..kept.len()` in the given order.
    pub fn restrict(&self, kept: &[usize]) -> Partition {
        Partition { parties: self.parties.clone(), assignment: kept.iter().map(|&q| self.assignment[q]).collect() }
    }

    fn check_party(&self, party: usize) -> Result<(), StabilizerError> {
        if party >= self.parties.len() {
            return Err(StabilizerError::UnknownParty(party));
        }
        Ok(())
    }
}

pub(crate) fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("P{i}")
    }
}

/// A stabilizer state together with a partition of its qubits.
///
/// The tableau is kept in canonical echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedStabilizerState {
    tableau: Tableau,
    partition: Partition,
}

impl PartitionedStabilizerState {
    pub fn new(tableau: Tableau, partition: Partition) -> Result<Self, StabilizerError> {
        tableau.validate()?;
        if partition.num_qubits() != tableau.num_qubits() {
            return Err(StabilizerError::SizeMismatch {
                partition: partition.num_qubits(),
                state: tableau.num_qubits(),
            });
        }
        Ok(Self { tableau: tableau.canonicalize(), partition })
    }

    pub fn from_strings(items: &[&str], partition: Partition) -> Result<Self, StabilizerError> {
        Self::new(Tableau::from_strings(items)?, partition)
    }

    pub fn num_qubits(&self) -> usize {
        self.tableau.num_qubits()
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn group(&self) -> BinarySubspace {
        self.tableau.group()
    }

    pub fn apply_circuit(&self, c: &CliffordCircuit) -> Result<Self, StabilizerError> {
        Self::new(self.tableau.apply_circuit(c)?, self.partition.clone())
    }
}

/// Basis (as combinations of generators) of the elements whose restriction to
/// `qubits` is the identity.
fn vanishing_combos(t: &Tableau, qubits: &[usize]) -> Vec<BitVector> {
    let rows: Vec<BitVector> = t.generators().iter().map(|g| g.restrict(qubits).to_bits()).collect();
    gf2::kernel(&rows).expect("rows share a length").basis().to_vec()
}

/// Signed basis of the subgroup acting trivially on `qubits`.
pub fn signed_vanishing_subgroup(t: &Tableau, qubits: &[usize]) -> Vec<(PauliVector, bool)> {
    vanishing_combos(t, qubits).iter().map(|c| t.element(c)).collect()
}

fn vanishing_subgroup(t: &Tableau, qubits: &[usize]) -> BinarySubspace {
    let elems: Vec<PauliVector> = signed_vanishing_subgroup(t, qubits).into_iter().map(|(v, _)| v).collect();
    span_paulis(t.num_qubits(), &elems).expect("lengths agree")
}

fn complement(n: usize, qubits: &[usize]) -> Vec<usize> {
    let set: HashSet<usize> = qubits.iter().copied().collect();
    (0..n).filter(|q| !set.contains(q)).collect()
}

/// S_α: elements acting trivially outside `party`.
pub fn local_subgroup(state: &PartitionedStabilizerState, party: usize) -> Result<BinarySubspace, StabilizerError> {
    state.partition.check_party(party)?;
    let outside = complement(state.num_qubits(), &state.partition.qubits_of(party));
    Ok(vanishing_subgroup(&state.tableau, &outside))
}

/// S_α̂: elements acting trivially on `party`.
pub fn colocal_subgroup(state: &PartitionedStabilizerState, party: usize) -> Result<BinarySubspace, StabilizerError> {
    state.partition.check_party(party)?;
    Ok(vanishing_subgroup(&state.tableau, &state.partition.qubits_of(party)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupProfile {
    pub s_loc: BinarySubspace,
    pub colocal: Vec<BinarySubspace>,
    pub local: Vec<BinarySubspace>,
    /// dim S − dim S_loc.
    pub delta: usize,
    /// delta / 2, reported only for two parties.
    pub bipartite_pairs: Option<usize>,
}

pub fn subgroup_profile(state: &PartitionedStabilizerState) -> SubgroupProfile {
    let n = state.num_qubits();
    let m = state.partition.num_parties();
    let colocal: Vec<BinarySubspace> = (0..m).map(|a| colocal_subgroup(state, a).expect("party in range")).collect();
    let local: Vec<BinarySubspace> = (0..m).map(|a| local_subgroup(state, a).expect("party in range")).collect();
    let s_loc = colocal
        .iter()
        .try_fold(BinarySubspace::zero(2 * n), |acc, c| acc.sum(c))
        .expect("ambient lengths agree");
    let delta = n - s_loc.dim();
    let bipartite_pairs = (m == 2).then_some(delta / 2);
    SubgroupProfile { s_loc, colocal, local, delta, bipartite_pairs }
}

/// Entropy in bits of the reduced state on `subset`: |A| − dim S_A.
pub fn subset_entropy(state: &PartitionedStabilizerState, subset: &[usize]) -> Result<usize, StabilizerError> {
    let n = state.num_qubits();
    let mut qubits: Vec<usize> = subset.to_vec();
    qubits.sort_unstable();
    qubits.dedup();
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(StabilizerError::QubitOutOfRange { qubit: q, n });
    }
    let outside = complement(n, &qubits);
    Ok(qubits.len() - vanishing_combos(&state.tableau, &outside).len())
}

/// Result of splitting off local |0⟩ qubits.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// State on the kept qubits, with full local ranks.
    pub state: PartitionedStabilizerState,
    /// Extracted |0⟩ count per party; equals dim S_α of the input.
    pub zeros: Vec<usize>,
    /// The |0⟩ qubits of each party (the first `zeros[α]` of its block).
    pub zero_qubits: Vec<Vec<usize>>,
    /// Original indices of the reduced state's qubits.
    pub kept: Vec<usize>,
    /// Per-party circuits on original qubit indices.
    pub circuits: Vec<CliffordCircuit>,
    /// Input tableau after the circuits.
    pub transformed: Tableau,
}

pub fn reduce_full_local_ranks(state: &PartitionedStabilizerState) -> Result<Reduction, StabilizerError> {
    let n = state.num_qubits();
    let m = state.partition.num_parties();
    let mut tableau = state.tableau.clone();
    let mut zeros = Vec::with_capacity(m);
    let mut zero_qubits = Vec::with_capacity(m);
    let mut circuits = Vec::with_capacity(m);
    for a in 0..m {
        let block = state.partition.qubits_of(a);
        let local: Vec<PauliVector> = basis_paulis(&local_subgroup(state, a)?)
            .iter()
            .map(|v| v.restrict(&block))
            .collect();
        let k = local.len();
        let targets: Vec<PauliVector> = (0..k).map(|i| PauliVector::z_on(block.len(), i)).collect();
        let u = map_between_families(block.len(), &local, &targets)?;
        let circuit = synthesize_circuit(&u)?.relabel(&block);
        tableau = tableau.apply_circuit(&circuit)?;
        zeros.push(k);
        zero_qubits.push(block[..k].to_vec());
        circuits.push(circuit);
    }
    for (a, qs) in zero_qubits.iter().enumerate() {
        for &q in qs {
            let negative = tableau.sign_of(&PauliVector::z_on(n, q)).expect("Z on an extracted qubit stabilizes");
            if negative {
                tableau.apply_gate(&Gate::X(q))?;
                circuits[a].push(Gate::X(q));
            }
        }
    }
    let dropped: Vec<usize> = zero_qubits.iter().flatten().copied().collect();
    let kept = complement(n, &dropped);
    let residual = restricted_state(&tableau, &dropped, &kept)?;
    Ok(Reduction {
        state: PartitionedStabilizerState::new(residual, state.partition.restrict(&kept))?,
        zeros,
        zero_qubits,
        kept,
        circuits,
        transformed: tableau,
    })
}

/// The factor on `kept` of a tableau that is a product across `dropped | kept`.
pub(crate) fn restricted_state(t: &Tableau, dropped: &[usize], kept: &[usize]) -> Result<Tableau, CliffordError> {
    let (gens, signs): (Vec<PauliVector>, Vec<bool>) = signed_vanishing_subgroup(t, dropped)
        .into_iter()
        .map(|(v, s)| (v.restrict(kept), s))
        .unzip();
    Tableau::new(kept.len(), gens, signs)
}

/// Random state from a seeded random H/P/CNOT/Pauli circuit on |0…0⟩.
pub fn random_stabilizer_state(
    n: usize,
    partition: Partition,
    seed: u64,
) -> Result<PartitionedStabilizerState, StabilizerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qubits: Vec<usize> = (0..n).collect();
    let circuit = random_circuit(&qubits, 2 * n * n + 10, &mut rng);
    PartitionedStabilizerState::new(Tableau::zero_state(n).apply_circuit(&circuit)?, partition)
}

/// A random circuit per party, each confined to that party's qubits.
pub fn random_local_circuits(partition: &Partition, gates_per_qubit: usize, seed: u64) -> Vec<CliffordCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    partition
        .blocks()
        .iter()
        .map(|b| random_circuit(b, gates_per_qubit * b.len(), &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three(n_a: usize, n_b: usize, n_c: usize) -> Partition {
        let mut blocks = Vec::new();
        let mut q = 0;
        for (name, k) in [("A", n_a), ("B", n_b), ("C", n_c)] {
            blocks.push((name, (q..q + k).collect::<Vec<_>>()));
            q += k;
        }
        Partition::from_blocks(q, &blocks).unwrap()
    }

    fn ghz3() -> PartitionedStabilizerState {
        PartitionedStabilizerState::from_strings(&["+XXX", "+ZZI", "+IZZ"], Partition::singletons(3)).unwrap()
    }

    fn epr() -> PartitionedStabilizerState {
        PartitionedStabilizerState::from_strings(&["+XX", "+ZZ"], Partition::singletons(2)).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(matches!(
            Partition::new(vec!["A".into(), "A".into()], vec![0, 1]),
            Err(StabilizerError::DuplicateParty(_))
        ));
        assert!(matches!(Partition::from_blocks(2, &[("A", vec![0])]), Err(StabilizerError::QubitUnassigned(1))));
        assert!(matches!(
            Partition::from_blocks(2, &[("A", vec![0, 1]), ("B", vec![1])]),
            Err(StabilizerError::QubitAssignedTwice(1))
        ));
        let p = three(2, 0, 1);
        assert_eq!(p.qubits_of(1), Vec::<usize>::new());
        assert_eq!(p.qubits_of(2), vec![2]);
    }

    #[test]
    fn subgroup_examples() {
        let g = ghz3();
        let c = colocal_subgroup(&g, 0).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&"IZZ".parse::<PauliVector>().unwrap().to_bits()));
        let prof = subgroup_profile(&g);
        assert_eq!(prof.s_loc.dim(), 2);
        assert_eq!(prof.delta, 1);
        assert_eq!(prof.bipartite_pairs, None);

        let prod = PartitionedStabilizerState::from_strings(&["+ZI", "+IZ"], Partition::singletons(2)).unwrap();
        let l = local_subgroup(&prod, 0).unwrap();
        assert_eq!(l.dim(), 1);
        assert!(l.contains(&"ZI".parse::<PauliVector>().unwrap().to_bits()));

        let e = epr();
        assert_eq!(colocal_subgroup(&e, 0).unwrap().dim(), 0);
        let prof = subgroup_profile(&e);
        assert_eq!((prof.s_loc.dim(), prof.delta, prof.bipartite_pairs), (0, 2, Some(1)));

        let zero3 = PartitionedStabilizerState::new(Tableau::zero_state(3), Partition::singletons(3)).unwrap();
        assert_eq!(subgroup_profile(&zero3).delta, 0);
        assert!(matches!(local_subgroup(&g, 3), Err(StabilizerError::UnknownParty(3))));
    }

    #[test]
    fn empty_party_convention() {
        let s = PartitionedStabilizerState::from_strings(&["+XX", "+ZZ"], three(1, 1, 0)).unwrap();
        assert_eq!(local_subgroup(&s, 2).unwrap().dim(), 0);
        assert_eq!(colocal_subgroup(&s, 2).unwrap(), s.group());
        assert_eq!(subgroup_profile(&s).delta, 0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(subset_entropy(&epr(), &[0]).unwrap(), 1);
        let zz = PartitionedStabilizerState::new(Tableau::zero_state(2), Partition::singletons(2)).unwrap();
        assert_eq!(subset_entropy(&zz, &[0]).unwrap(), 0);
        assert_eq!(subset_entropy(&ghz3(), &[]).unwrap(), 0);
        assert_eq!(subset_entropy(&ghz3(), &[0, 1, 2]).unwrap(), 0);
        assert_eq!(subset_entropy(&ghz3(), &[1, 2]).unwrap(), 1);
        assert!(subset_entropy(&ghz3(), &[5]).is_err());
    }

    #[test]
    fn reduction_examples() {
        // |0>_A ⊗ EPR_AB with A = {0, 1}, B = {2}
        let s = PartitionedStabilizerState::from_strings(
            &["+ZII", "+IXX", "+IZZ"],
            Partition::from_blocks(3, &[("A", vec![0, 1]), ("B", vec![2])]).unwrap(),
        )
        .unwrap();
        let r = reduce_full_local_ranks(&s).unwrap();
        assert_eq!(r.zeros, vec![1, 0]);
        assert_eq!(r.state.num_qubits(), 2);
        assert_eq!(subgroup_profile(&r.state).delta, 2);

        let g = reduce_full_local_ranks(&ghz3()).unwrap();
        assert_eq!(g.zeros, vec![0, 0, 0]);
        assert_eq!(g.state.group(), ghz3().group());

        let zz = PartitionedStabilizerState::from_strings(&["-ZI", "+IZ"], Partition::singletons(2)).unwrap();
        let r = reduce_full_local_ranks(&zz).unwrap();
        assert_eq!(r.zeros, vec![1, 1]);
        assert_eq!(r.state.num_qubits(), 0);
        assert_eq!(r.transformed.canonicalize(), Tableau::zero_state(2));
    }

    #[test]
    fn random_states_are_valid_and_deterministic() {
        for seed in 0..200 {
            let n = 1 + (seed as usize % 6);
            let s = random_stabilizer_state(n, Partition::singletons(n), seed).unwrap();
            assert!(crate::symplectic::is_self_dual(&s.group()));
        }
        let a = random_stabilizer_state(5, Partition::singletons(5), 11).unwrap();
        let b = random_stabilizer_state(5, Partition::singletons(5), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reduction_preserves_delta_and_clears_local_ranks() {
        for seed in 0..100 {
            let p = three(2, 2, 2);
            let s = random_stabilizer_state(6, p, seed).unwrap();
            let r = reduce_full_local_ranks(&s).unwrap();
            let prof = subgroup_profile(&r.state);
            assert!(prof.local.iter().all(|l| l.dim() == 0));
            assert_eq!(prof.delta, subgroup_profile(&s).delta);
            let orig = subgroup_profile(&s);
            assert_eq!(r.zeros, orig.local.iter().map(|l| l.dim()).collect::<Vec<_>>());
            for (a, qs) in r.zero_qubits.iter().enumerate() {
                for &q in qs {
                    assert_eq!(s.partition().party_of(q), a);
                    assert_eq!(r.transformed.sign_of(&PauliVector::z_on(6, q)), Some(false));
                }
            }
        }
    }
}
