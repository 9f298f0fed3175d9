//! GHZ extraction, tripartite decomposition into |0⟩/EPR/GHZ, and extraction
//! witnesses.
//!
//! Every decomposition lays out each party's qubits (in increasing index
//! order) as: extracted |0⟩ qubits, EPR halves grouped by party pair in
//! lexicographic pair order, any undecomposed residual, then one qubit per
//! GHZ copy.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::clifford::{self, synthesize_circuit, CliffordCircuit, CliffordError, StateComparison, Tableau};
use crate::gf2::{self, BitVector};
use crate::stabilizer::{
    colocal_subgroup, reduce_full_local_ranks, restricted_state, subgroup_profile, Partition,
    PartitionedStabilizerState, StabilizerError,
};
use crate::symplectic::{
    basis_paulis, dual_subspace, map_between_families, pair_up, span_paulis, PauliVector, Slot, SymplecticError,
    SymplecticMap,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("party {party} has a nontrivial local subgroup")]
    NotFullLocalRank { party: usize },
    #[error("GHZ extraction needs at least three parties, got {0}")]
    TooFewParties(usize),
    #[error("expected three parties (or two), got {0}")]
    WrongPartyCount(usize),
    #[error("source has {source_parties} parties, target has {target}")]
    PartyCountMismatch { source_parties: usize, target: usize },
    #[error("party {party} has {source_size} qubits in the source and {target} in the target")]
    PartySizeMismatch { party: usize, source_size: usize, target: usize },
    #[error("witness has {sources} source vectors and {images} images")]
    WitnessShape { sources: usize, images: usize },
    #[error("image {index} is not in the target stabilizer group")]
    ImageOutsideTarget { index: usize },
    #[error("source vectors are not a basis")]
    SourceNotBasis,
    #[error("witness images are linearly dependent")]
    NotInjective,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Gf2(#[from] crate::gf2::Gf2Error),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

type Result<T> = std::result::Result<T, ExtractionError>;

/// The bases built in the GHZ extraction: `s_ent_basis[j]` is ḡ_j and
/// `l_alpha_bases[α][j]` is g_{αj}, supported on party α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntDecomposition {
    pub s_ent_basis: Vec<PauliVector>,
    pub l_alpha_bases: Vec<Vec<PauliVector>>,
    pub p: usize,
}

impl EntDecomposition {
    /// Check ω(g_αj, g_αk) = 0, ω((ḡ_j)_α, (ḡ_k)_α) = 0 and ω(g_αj, ḡ_k) = δ_jk.
    pub fn satisfies_local_rules(&self, partition: &Partition) -> bool {
        let p = self.p;
        (0..partition.num_parties()).all(|a| {
            let q = partition.qubits_of(a);
            let g = &self.l_alpha_bases[a];
            (0..p).all(|j| {
                (0..p).all(|k| {
                    !g[j].omega(&g[k])
                        && !self.s_ent_basis[j].restrict(&q).omega(&self.s_ent_basis[k].restrict(&q))
                        && g[j].omega(&self.s_ent_basis[k]) == (j == k)
                })
            })
        })
    }
}

fn paulis_of(v: &[BitVector]) -> Vec<PauliVector> {
    v.iter().map(|b| PauliVector::from_bits(b).expect("even length")).collect()
}

/// Build S_ent, the dual bases of the L_α and apply the local shift that
/// makes S_ent locally isotropic. Requires full local ranks and ≥ 3 parties.
#[allow(clippy::needless_range_loop)]
pub fn build_ent_decomposition(state: &PartitionedStabilizerState) -> Result<EntDecomposition> {
    let partition = state.partition();
    let m = partition.num_parties();
    if m < 3 {
        return Err(ExtractionError::TooFewParties(m));
    }
    let n = state.num_qubits();
    let profile = subgroup_profile(state);
    if let Some(party) = profile.local.iter().position(|l| l.dim() > 0) {
        return Err(ExtractionError::NotFullLocalRank { party });
    }
    let group = state.group();
    let mut gbar = paulis_of(&profile.s_loc.completion_within(&group));
    let p = gbar.len();
    if p != profile.delta {
        return Err(ExtractionError::Invariant(format!("complement has dim {p}, delta is {}", profile.delta)));
    }
    let s_loc = basis_paulis(&profile.s_loc);

    let mut l_alpha = Vec::with_capacity(m);
    for a in 0..m {
        let q = partition.qubits_of(a);
        let proj: Vec<PauliVector> = s_loc.iter().map(|v| v.restrict(&q)).collect();
        let l_basis = basis_paulis(&dual_subspace(&span_paulis(q.len(), &proj)?)?);
        if l_basis.len() != p {
            return Err(ExtractionError::Invariant(format!("dim L_{a} = {} but delta = {p}", l_basis.len())));
        }
        // N_ik = ω(l_i, (ḡ_k)_α); row j of N^{-1} gives g_{αj}.
        let gbar_a: Vec<PauliVector> = gbar.iter().map(|g| g.restrict(&q)).collect();
        let rows: Vec<BitVector> = l_basis
            .iter()
            .map(|l| BitVector::from_bools(&gbar_a.iter().map(|g| l.omega(g)).collect::<Vec<_>>()))
            .collect();
        let mut dual = Vec::with_capacity(p);
        for j in 0..p {
            let c = gf2::solve(&rows, &BitVector::unit(p, j))?
                .ok_or_else(|| ExtractionError::Invariant(format!("pairing on party {a} is singular")))?;
            let mut local = PauliVector::identity(q.len());
            for i in c.iter_ones() {
                local.add_assign(&l_basis[i]);
            }
            dual.push(PauliVector::embed(n, &q, &local));
        }
        l_alpha.push(dual);
    }

    let blocks = partition.blocks();
    for j in 0..p {
        let mut shift = PauliVector::identity(n);
        for (a, q) in blocks.iter().enumerate() {
            let gj = gbar[j].restrict(q);
            for l in 0..j {
                if gj.omega(&gbar[l].restrict(q)) {
                    shift.add_assign(&l_alpha[a][l]);
                }
            }
        }
        gbar[j].add_assign(&shift);
    }

    for j in 0..p {
        for a in 0..m {
            let b = (a + 1) % m;
            if !group.contains(&l_alpha[a][j].add(&l_alpha[b][j]).to_bits()) {
                return Err(ExtractionError::Invariant(format!("g_{a}{b}{j} is not a stabilizer")));
            }
        }
    }
    let dec = EntDecomposition { s_ent_basis: gbar, l_alpha_bases: l_alpha, p };
    if !dec.satisfies_local_rules(partition) {
        return Err(ExtractionError::Invariant("local GHZ relations fail after adjustment".into()));
    }
    Ok(dec)
}

/// A linear map T given on a basis of the source group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionWitness {
    pub source: Vec<PauliVector>,
    pub images: Vec<PauliVector>,
}

/// Outcome of checking the two local conditions on a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessVerdict {
    Valid,
    /// ω of the local parts of images `j` and `k` differs from the source on `party`.
    LocalCommutation { party: usize, j: usize, k: usize },
    /// `combination` of the basis vanishes on `party` on exactly one side.
    CoLocality { party: usize, combination: BitVector },
}

impl WitnessVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, WitnessVerdict::Valid)
    }
}

fn local_kernel(vectors: &[PauliVector], qubits: &[usize]) -> Result<crate::gf2::BinarySubspace> {
    let rows: Vec<BitVector> = vectors.iter().map(|v| v.restrict(qubits).to_bits()).collect();
    if rows.is_empty() {
        return Ok(crate::gf2::BinarySubspace::zero(0));
    }
    Ok(gf2::kernel(&rows)?)
}

/// Check whether `witness` maps the source group (partitioned by
/// `source_partition`) into `target` so that local commutation and
/// co-locality are preserved.
pub fn check_extraction_witness(
    witness: &ExtractionWitness,
    source_partition: &Partition,
    target: &PartitionedStabilizerState,
) -> Result<WitnessVerdict> {
    Ok(witness_conditions(witness, source_partition, target)?.verdict())
}

/// Both witness conditions evaluated separately; each holds the first
/// violation found, in party order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessConditions {
    /// Local commutation: `(party, j, k)`.
    pub local_commutation: Option<(usize, usize, usize)>,
    /// Co-locality: `(party, combination)`.
    pub co_locality: Option<(usize, BitVector)>,
}

impl WitnessConditions {
    pub fn verdict(&self) -> WitnessVerdict {
        if let Some((party, j, k)) = self.local_commutation {
            WitnessVerdict::LocalCommutation { party, j, k }
        } else if let Some((party, combination)) = &self.co_locality {
            WitnessVerdict::CoLocality { party: *party, combination: combination.clone() }
        } else {
            WitnessVerdict::Valid
        }
    }
}

pub fn witness_conditions(
    witness: &ExtractionWitness,
    source_partition: &Partition,
    target: &PartitionedStabilizerState,
) -> Result<WitnessConditions> {
    let tp = target.partition();
    if source_partition.num_parties() != tp.num_parties() {
        return Err(ExtractionError::PartyCountMismatch {
            source_parties: source_partition.num_parties(),
            target: tp.num_parties(),
        });
    }
    if witness.source.len() != witness.images.len() {
        return Err(ExtractionError::WitnessShape { sources: witness.source.len(), images: witness.images.len() });
    }
    let r = witness.source.len();
    let n_src = source_partition.num_qubits();
    for v in &witness.source {
        if v.num_qubits() != n_src {
            return Err(SymplecticError::LengthMismatch { expected: n_src, found: v.num_qubits() }.into());
        }
    }
    let group = target.group();
    for (index, img) in witness.images.iter().enumerate() {
        if img.num_qubits() != target.num_qubits() || !group.contains(&img.to_bits()) {
            return Err(ExtractionError::ImageOutsideTarget { index });
        }
    }
    if span_paulis(n_src, &witness.source)?.dim() != r {
        return Err(ExtractionError::SourceNotBasis);
    }
    if span_paulis(target.num_qubits(), &witness.images)?.dim() != r {
        return Err(ExtractionError::NotInjective);
    }
    let src_blocks = source_partition.blocks();
    let tgt_blocks = tp.blocks();
    let mut out = WitnessConditions { local_commutation: None, co_locality: None };
    'parties: for (party, (sq, tq)) in src_blocks.iter().zip(&tgt_blocks).enumerate() {
        let s: Vec<PauliVector> = witness.source.iter().map(|v| v.restrict(sq)).collect();
        let t: Vec<PauliVector> = witness.images.iter().map(|v| v.restrict(tq)).collect();
        for j in 0..r {
            for k in j + 1..r {
                if s[j].omega(&s[k]) != t[j].omega(&t[k]) {
                    out.local_commutation = Some((party, j, k));
                    break 'parties;
                }
            }
        }
    }
    for (party, (sq, tq)) in src_blocks.iter().zip(&tgt_blocks).enumerate() {
        let ks = kernel_full(&witness.source, sq, r)?;
        let kt = kernel_full(&witness.images, tq, r)?;
        if ks != kt {
            let combination = ks
                .basis()
                .iter()
                .find(|x| !kt.contains(x))
                .or_else(|| kt.basis().iter().find(|x| !ks.contains(x)))
                .expect("distinct subspaces differ on a basis vector")
                .clone();
            out.co_locality = Some((party, combination));
            break;
        }
    }
    Ok(out)
}

/// Kernel of the restrictions; all of GF(2)^r when the party is empty.
fn kernel_full(vectors: &[PauliVector], qubits: &[usize], r: usize) -> Result<crate::gf2::BinarySubspace> {
    if qubits.is_empty() {
        return Ok(crate::gf2::BinarySubspace::full(r));
    }
    local_kernel(vectors, qubits)
}

/// Per-party symplectic maps u_α with u_α(f_α) = T(f)_α for every source
/// basis vector f. Source and target parties must have equal sizes.
pub fn realize_local_symplectics(
    witness: &ExtractionWitness,
    source_partition: &Partition,
    target_partition: &Partition,
) -> Result<Vec<SymplecticMap>> {
    if source_partition.num_parties() != target_partition.num_parties() {
        return Err(ExtractionError::PartyCountMismatch {
            source_parties: source_partition.num_parties(),
            target: target_partition.num_parties(),
        });
    }
    if witness.source.len() != witness.images.len() {
        return Err(ExtractionError::WitnessShape { sources: witness.source.len(), images: witness.images.len() });
    }
    let mut maps = Vec::new();
    for (party, (sq, tq)) in source_partition.blocks().iter().zip(target_partition.blocks()).enumerate() {
        if sq.len() != tq.len() {
            return Err(ExtractionError::PartySizeMismatch { party, source_size: sq.len(), target: tq.len() });
        }
        let f: Vec<PauliVector> = witness.source.iter().map(|v| v.restrict(sq)).collect();
        let fp: Vec<PauliVector> = witness.images.iter().map(|v| v.restrict(&tq)).collect();
        maps.push(map_between_families(sq.len(), &f, &fp)?);
    }
    Ok(maps)
}

/// Counts and circuits of a decomposition. Circuits use the input's qubit
/// indices; `local_maps[α]` is the sign-blind action on party α's qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub parties: Vec<String>,
    pub zeros: Vec<usize>,
    /// EPR count per party pair (i < j), only nonzero entries.
    pub epr: BTreeMap<(usize, usize), usize>,
    pub ghz: usize,
    /// The part of the state not turned into |0⟩, EPR or GHZ, on the residual slots.
    pub residual: Tableau,
    pub local_maps: Vec<SymplecticMap>,
    pub circuits: Vec<CliffordCircuit>,
}

impl DecompositionReport {
    pub fn epr_count(&self, a: usize, b: usize) -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        self.epr.get(&key).copied().unwrap_or(0)
    }

    /// (a, b, c, p) for three parties: `a` counts EPR pairs not touching party 0, etc.
    pub fn tripartite_counts(&self) -> (usize, usize, usize, usize) {
        (self.epr_count(1, 2), self.epr_count(0, 2), self.epr_count(0, 1), self.ghz)
    }
}

/// Qubit roles implied by the counts of a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub zeros: Vec<Vec<usize>>,
    /// For each pair, the (first party, second party) qubits of each EPR copy.
    pub epr: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    pub residual: Vec<usize>,
    /// `ghz[j][α]` is party α's qubit in copy j.
    pub ghz: Vec<Vec<usize>>,
}

pub fn layout(
    partition: &Partition,
    zeros: &[usize],
    epr: &BTreeMap<(usize, usize), usize>,
    ghz: usize,
) -> Result<Layout> {
    let m = partition.num_parties();
    let blocks = partition.blocks();
    let mut cursor = vec![0usize; m];
    let mut out_zeros = Vec::with_capacity(m);
    for a in 0..m {
        if zeros[a] > blocks[a].len() {
            return Err(ExtractionError::Invariant(format!("party {a} cannot hold {} zeros", zeros[a])));
        }
        out_zeros.push(blocks[a][..zeros[a]].to_vec());
        cursor[a] = zeros[a];
    }
    let mut out_epr = BTreeMap::new();
    for (&(a, b), &count) in epr {
        let mut copies = Vec::with_capacity(count);
        for _ in 0..count {
            let (Some(&qa), Some(&qb)) = (blocks[a].get(cursor[a]), blocks[b].get(cursor[b])) else {
                return Err(ExtractionError::Invariant("EPR counts exceed party sizes".into()));
            };
            copies.push((qa, qb));
            cursor[a] += 1;
            cursor[b] += 1;
        }
        out_epr.insert((a, b), copies);
    }
    let mut residual = Vec::new();
    let mut out_ghz = vec![Vec::with_capacity(m); ghz];
    for a in 0..m {
        let len = blocks[a].len();
        if cursor[a] + ghz > len {
            return Err(ExtractionError::Invariant(format!("party {a} has no room for {ghz} GHZ qubits")));
        }
        residual.extend_from_slice(&blocks[a][cursor[a]..len - ghz]);
        for (j, copy) in out_ghz.iter_mut().enumerate() {
            copy.push(blocks[a][len - ghz + j]);
        }
    }
    residual.sort_unstable();
    Ok(Layout { zeros: out_zeros, epr: out_epr, residual, ghz: out_ghz })
}

/// The tableau of the decomposed state described by `report`.
pub fn canonical_collection(report: &DecompositionReport, partition: &Partition) -> Result<Tableau> {
    let n = partition.num_qubits();
    let lay = layout(partition, &report.zeros, &report.epr, report.ghz)?;
    if report.residual.num_qubits() != lay.residual.len() {
        return Err(ExtractionError::Invariant("residual size does not match layout".into()));
    }
    let mut gens = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for &q in lay.zeros.iter().flatten() {
        gens.push(PauliVector::z_on(n, q));
        signs.push(false);
    }
    for &(qa, qb) in lay.epr.values().flatten() {
        gens.push(PauliVector::x_on(n, qa).add(&PauliVector::x_on(n, qb)));
        gens.push(PauliVector::z_on(n, qa).add(&PauliVector::z_on(n, qb)));
        signs.extend([false, false]);
    }
    for (g, &s) in report.residual.generators().iter().zip(report.residual.signs()) {
        gens.push(PauliVector::embed(n, &lay.residual, g));
        signs.push(s);
    }
    for copy in &lay.ghz {
        let mut x = PauliVector::identity(n);
        for &q in copy {
            x.add_assign(&PauliVector::x_on(n, q));
        }
        gens.push(x);
        signs.push(false);
        for w in copy.windows(2) {
            gens.push(PauliVector::z_on(n, w[0]).add(&PauliVector::z_on(n, w[1])));
            signs.push(false);
        }
    }
    Ok(Tableau::new(n, gens, signs)?)
}

/// True iff the report's circuits take `input` exactly to its canonical collection.
pub fn verify_decomposition(input: &PartitionedStabilizerState, report: &DecompositionReport) -> Result<bool> {
    let target = canonical_collection(report, input.partition())?;
    let cmp = clifford::verify_local_circuits(input.tableau(), &input.partition().blocks(), &report.circuits, &target)?;
    Ok(cmp == StateComparison::Exact)
}

/// Intermediate state of the pipeline: circuits so far and the tableau they produce.
struct Progress {
    tableau: Tableau,
    circuits: Vec<CliffordCircuit>,
}

impl Progress {
    fn apply(&mut self, party: usize, c: CliffordCircuit) -> Result<()> {
        self.tableau = self.tableau.apply_circuit(&c)?;
        self.circuits[party].extend(&c);
        Ok(())
    }
}

/// Synthesize a local map given on party-local indices and move it to `qubits`.
fn local_circuit(n_local: usize, f: &[PauliVector], target: &[PauliVector], qubits: &[usize]) -> Result<CliffordCircuit> {
    let u = map_between_families(n_local, f, target)?;
    Ok(synthesize_circuit(&u)?.relabel(qubits))
}

struct GhzStage {
    partition: Partition,
    zeros: Vec<usize>,
    p: usize,
    /// Original indices of the qubits left after removing zeros and GHZ slots.
    residual_qubits: Vec<usize>,
    progress: Progress,
}

fn ghz_stage(state: &PartitionedStabilizerState) -> Result<GhzStage> {
    let partition = state.partition().clone();
    let m = partition.num_parties();
    let red = reduce_full_local_ranks(state)?;
    let mut progress = Progress { tableau: red.transformed.clone(), circuits: red.circuits.clone() };
    let p = if m >= 3 { subgroup_profile(&red.state).delta } else { 0 };
    let rp = red.state.partition();
    let mut residual_qubits = Vec::new();
    if p > 0 {
        let dec = build_ent_decomposition(&red.state)?;
        for a in 0..m {
            let q = rp.qubits_of(a);
            let nq = q.len();
            let mut f = Vec::with_capacity(2 * p);
            let mut target = Vec::with_capacity(2 * p);
            for j in 0..p {
                f.push(dec.s_ent_basis[j].restrict(&q));
                target.push(PauliVector::x_on(nq, nq - p + j));
                f.push(dec.l_alpha_bases[a][j].restrict(&q));
                target.push(PauliVector::z_on(nq, nq - p + j));
            }
            let original: Vec<usize> = q.iter().map(|&i| red.kept[i]).collect();
            progress.apply(a, local_circuit(nq, &f, &target, &original)?)?;
            residual_qubits.extend_from_slice(&original[..nq - p]);
        }
        residual_qubits.sort_unstable();
    } else {
        residual_qubits = red.kept.clone();
    }
    Ok(GhzStage { partition, zeros: red.zeros, p, residual_qubits, progress })
}

fn dropped_for(n: usize, keep: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &q in keep {
        mask[q] = false;
    }
    (0..n).filter(|&q| mask[q]).collect()
}

fn local_maps(partition: &Partition, circuits: &[CliffordCircuit]) -> Result<Vec<SymplecticMap>> {
    let n = partition.num_qubits();
    let mut maps = Vec::new();
    for (a, c) in circuits.iter().enumerate() {
        let block = partition.qubits_of(a);
        let mut to_local = vec![0; n];
        for (i, &q) in block.iter().enumerate() {
            to_local[q] = i;
        }
        maps.push(c.relabel(&to_local).symplectic_map(block.len())?);
    }
    Ok(maps)
}

fn finish(
    input: &PartitionedStabilizerState,
    zeros: Vec<usize>,
    epr: BTreeMap<(usize, usize), usize>,
    ghz: usize,
    residual: Tableau,
    mut progress: Progress,
) -> Result<DecompositionReport> {
    let partition = input.partition();
    let mut report = DecompositionReport {
        parties: partition.parties().to_vec(),
        zeros,
        epr,
        ghz,
        residual,
        local_maps: Vec::new(),
        circuits: Vec::new(),
    };
    let target = canonical_collection(&report, partition)?;
    match clifford::states_equal(&progress.tableau, &target)? {
        StateComparison::Exact => {}
        StateComparison::UpToPauli(c) => {
            for (a, block) in partition.blocks().iter().enumerate() {
                let local = PauliVector::embed(c.num_qubits(), block, &c.restrict(block));
                progress.apply(a, CliffordCircuit::pauli_layer(&local))?;
            }
        }
        StateComparison::DifferentGroup => {
            return Err(ExtractionError::Invariant("circuits do not reach the canonical group".into()));
        }
    }
    report.local_maps = local_maps(partition, &progress.circuits)?;
    report.circuits = progress.circuits;
    Ok(report)
}

/// Extract the maximal number of GHZ states (one qubit per party per copy).
///
/// Returns the yield, the report and the residual state, which has Δ = 0.
pub fn extract_ghz(state: &PartitionedStabilizerState) -> Result<(usize, DecompositionReport, PartitionedStabilizerState)> {
    let m = state.partition().num_parties();
    if m < 3 {
        return Err(ExtractionError::TooFewParties(m));
    }
    let stage = ghz_stage(state)?;
    let n = state.num_qubits();
    let residual = restricted_state(
        &stage.progress.tableau,
        &dropped_for(n, &stage.residual_qubits),
        &stage.residual_qubits,
    )?;
    let residual_state =
        PartitionedStabilizerState::new(residual.clone(), stage.partition.restrict(&stage.residual_qubits))?;
    let p = stage.p;
    let report = finish(state, stage.zeros, BTreeMap::new(), p, residual, stage.progress)?;
    Ok((p, report, residual_state))
}

/// Decompose a three-party state into local |0⟩, EPR pairs and GHZ states with
/// explicit local circuits. Two-party states yield only zeros and EPR pairs.
pub fn decompose_tripartite(state: &PartitionedStabilizerState) -> Result<DecompositionReport> {
    let m = state.partition().num_parties();
    if m != 2 && m != 3 {
        return Err(ExtractionError::WrongPartyCount(m));
    }
    let n = state.num_qubits();
    let GhzStage { partition, zeros, p, residual_qubits, mut progress } = ghz_stage(state)?;
    let res_tab = restricted_state(&progress.tableau, &dropped_for(n, &residual_qubits), &residual_qubits)?;
    let res = PartitionedStabilizerState::new(res_tab, partition.restrict(&residual_qubits))?;
    let rp = res.partition();

    // Pairs (α, β) with the subgroup supported on α ∪ β.
    let pairs: Vec<((usize, usize), crate::gf2::BinarySubspace)> = if m == 2 {
        vec![((0, 1), res.group())]
    } else {
        vec![((0, 1), colocal_subgroup(&res, 2)?), ((0, 2), colocal_subgroup(&res, 1)?), ((1, 2), colocal_subgroup(&res, 0)?)]
    };
    let total: usize = pairs.iter().map(|(_, r)| r.dim()).sum();
    if total != res.num_qubits() {
        return Err(ExtractionError::Invariant(format!(
            "co-local subgroups span {total} dimensions on {} qubits",
            res.num_qubits()
        )));
    }

    let blocks = rp.blocks();
    let mut families: Vec<(Vec<PauliVector>, Vec<PauliVector>)> = vec![(Vec::new(), Vec::new()); m];
    let mut offset = vec![0usize; m];
    let mut epr = BTreeMap::new();
    for ((a, b), r) in &pairs {
        let basis = basis_paulis(r);
        let proj: Vec<PauliVector> = basis.iter().map(|v| v.restrict(&blocks[*a])).collect();
        let (slots, _, _) = pair_up(&proj);
        let mut count = 0;
        for slot in slots {
            let Slot::Pair(e, eb) = slot else {
                return Err(ExtractionError::Invariant(format!("pairing on ({a},{b}) is degenerate")));
            };
            let combine = |combo: &BitVector| {
                let mut v = PauliVector::identity(res.num_qubits());
                for i in combo.iter_ones() {
                    v.add_assign(&basis[i]);
                }
                v
            };
            let (full_e, full_eb) = (combine(&e.combo), combine(&eb.combo));
            for &party in &[*a, *b] {
                let k = blocks[party].len();
                let slot_q = offset[party];
                families[party].0.push(full_e.restrict(&blocks[party]));
                families[party].1.push(PauliVector::x_on(k, slot_q));
                families[party].0.push(full_eb.restrict(&blocks[party]));
                families[party].1.push(PauliVector::z_on(k, slot_q));
                offset[party] += 1;
            }
            count += 1;
        }
        if count > 0 {
            epr.insert((*a, *b), count);
        }
    }
    for party in 0..m {
        let original: Vec<usize> = blocks[party].iter().map(|&i| residual_qubits[i]).collect();
        let (f, target) = &families[party];
        progress.apply(party, local_circuit(original.len(), f, target, &original)?)?;
    }
    finish(state, zeros, epr, p, Tableau::zero_state(0), progress)
}

/// Count tuple (zeros per party, a, b, c, p) used for LCU classification.
pub fn tripartite_signature(state: &PartitionedStabilizerState) -> Result<(Vec<usize>, usize, usize, usize, usize)> {
    let m = state.partition().num_parties();
    if m != 3 {
        return Err(ExtractionError::WrongPartyCount(m));
    }
    let red = reduce_full_local_ranks(state)?;
    let prof = subgroup_profile(&red.state);
    let p = prof.delta;
    let d: Vec<usize> = prof.colocal.iter().map(|c| c.dim()).collect();
    for &da in &d {
        if da < p || !(da - p).is_multiple_of(2) {
            return Err(ExtractionError::Invariant(format!("d = {da}, p = {p} violate parity")));
        }
    }
    Ok((red.zeros, (d[0] - p) / 2, (d[1] - p) / 2, (d[2] - p) / 2, p))
}

/// Whether two three-party states are related by local Clifford unitaries.
pub fn lcu_equivalent_tripartite(s1: &PartitionedStabilizerState, s2: &PartitionedStabilizerState) -> Result<bool> {
    Ok(tripartite_signature(s1)? == tripartite_signature(s2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{random_local_circuits, random_stabilizer_state, subset_entropy};

    fn p(s: &str) -> PauliVector {
        s.parse().unwrap()
    }

    fn part(blocks: &[(&str, Vec<usize>)]) -> Partition {
        let n = blocks.iter().map(|(_, b)| b.len()).sum();
        Partition::from_blocks(n, blocks).unwrap()
    }

    fn state(gens: &[&str], blocks: &[(&str, Vec<usize>)]) -> PartitionedStabilizerState {
        PartitionedStabilizerState::from_strings(gens, part(blocks)).unwrap()
    }

    fn ghz3() -> PartitionedStabilizerState {
        PartitionedStabilizerState::from_strings(&["+XXX", "+ZZI", "+IZZ"], Partition::singletons(3)).unwrap()
    }

    #[test]
    fn ent_decomposition_of_ghz3() {
        let d = build_ent_decomposition(&ghz3()).unwrap();
        assert_eq!(d.p, 1);
        assert_eq!(d.s_ent_basis[0], p("XXX"));
        assert_eq!(d.l_alpha_bases[0][0], p("ZII"));
        assert!(d.satisfies_local_rules(&Partition::singletons(3)));
    }

    #[test]
    fn ent_decomposition_errors_and_trivial_case() {
        let epr = PartitionedStabilizerState::from_strings(&["+XX", "+ZZ"], Partition::singletons(2)).unwrap();
        assert_eq!(build_ent_decomposition(&epr), Err(ExtractionError::TooFewParties(2)));
        let zero = PartitionedStabilizerState::new(Tableau::zero_state(3), Partition::singletons(3)).unwrap();
        assert_eq!(build_ent_decomposition(&zero), Err(ExtractionError::NotFullLocalRank { party: 0 }));
        // EPR_AB ⊗ EPR_BC
        let s = state(&["+XXII", "+ZZII", "+IIXX", "+IIZZ"], &[("A", vec![0]), ("B", vec![1, 2]), ("C", vec![3])]);
        let d = build_ent_decomposition(&s).unwrap();
        assert_eq!(d.p, 0);
        assert!(d.s_ent_basis.is_empty());
    }

    #[test]
    fn ent_decomposition_random_four_party() {
        let blocks = [("A", vec![0, 1]), ("B", vec![2, 3]), ("C", vec![4, 5]), ("D", vec![6, 7])];
        let mut seen_positive = false;
        for seed in 0..60 {
            let s = random_stabilizer_state(8, part(&blocks), seed).unwrap();
            let red = reduce_full_local_ranks(&s).unwrap();
            let d = build_ent_decomposition(&red.state).unwrap();
            assert!(d.satisfies_local_rules(red.state.partition()));
            seen_positive |= d.p > 0;
        }
        assert!(seen_positive);
    }

    #[test]
    fn extract_ghz_examples() {
        let ghz4 = PartitionedStabilizerState::from_strings(&["+XXXX", "+ZZII", "+IZZI", "+IIZZ"], Partition::singletons(4))
            .unwrap();
        let (pp, report, residual) = extract_ghz(&ghz4).unwrap();
        assert_eq!((pp, residual.num_qubits()), (1, 0));
        assert!(verify_decomposition(&ghz4, &report).unwrap());

        // GHZ_3 on qubits 0,2,4 and EPR on 1,3; A = {0,1}, B = {2,3}, C = {4}
        let s = state(
            &["+XIXIX", "+ZIZII", "+IIZIZ", "+IXIXI", "+IZIZI"],
            &[("A", vec![0, 1]), ("B", vec![2, 3]), ("C", vec![4])],
        );
        let (pp, report, residual) = extract_ghz(&s).unwrap();
        assert_eq!(pp, 1);
        assert_eq!(residual.num_qubits(), 2);
        assert_eq!(subgroup_profile(&residual).delta, 0);
        assert_eq!(subset_entropy(&residual, &[0]).unwrap(), 1);
        assert!(verify_decomposition(&s, &report).unwrap());
        assert_eq!(extract_ghz(&PartitionedStabilizerState::from_strings(&["+XX", "+ZZ"], Partition::singletons(2)).unwrap()).unwrap_err(),
            ExtractionError::TooFewParties(2));
    }

    #[test]
    fn decompose_examples() {
        let r = decompose_tripartite(&ghz3()).unwrap();
        assert_eq!(r.tripartite_counts(), (0, 0, 0, 1));
        assert!(verify_decomposition(&ghz3(), &r).unwrap());

        let epr = state(&["+XX", "+ZZ"], &[("A", vec![0]), ("B", vec![1]), ("C", vec![])]);
        let r = decompose_tripartite(&epr).unwrap();
        assert_eq!(r.tripartite_counts(), (0, 0, 1, 0));
        assert!(verify_decomposition(&epr, &r).unwrap());

        // linear cluster on 4 qubits
        let c4 = state(&["+XZII", "+ZXZI", "+IZXZ", "+IIZX"], &[("A", vec![0]), ("B", vec![1, 2]), ("C", vec![3])]);
        let r = decompose_tripartite(&c4).unwrap();
        assert_eq!(r.tripartite_counts(), (1, 0, 1, 0));
        assert!(verify_decomposition(&c4, &r).unwrap());

        let bip = PartitionedStabilizerState::from_strings(&["+XX", "+ZZ"], Partition::singletons(2)).unwrap();
        let r = decompose_tripartite(&bip).unwrap();
        assert_eq!(r.epr_count(0, 1), 1);
        assert!(verify_decomposition(&bip, &r).unwrap());

        let four = PartitionedStabilizerState::new(Tableau::zero_state(4), Partition::singletons(4)).unwrap();
        assert_eq!(decompose_tripartite(&four).unwrap_err(), ExtractionError::WrongPartyCount(4));
    }

    #[test]
    fn decompose_random_states_verify() {
        let blocks = [("A", vec![0, 1, 2]), ("B", vec![3, 4]), ("C", vec![5, 6])];
        for seed in 0..60 {
            let s = random_stabilizer_state(7, part(&blocks), seed).unwrap();
            let r = decompose_tripartite(&s).unwrap();
            assert!(verify_decomposition(&s, &r).unwrap(), "seed {seed}");
            let (a, b, c, pp) = r.tripartite_counts();
            assert_eq!(subset_entropy(&s, &blocks[0].1).unwrap(), b + c + pp);
            assert_eq!(subset_entropy(&s, &blocks[1].1).unwrap(), a + c + pp);
            assert_eq!(subset_entropy(&s, &blocks[2].1).unwrap(), a + b + pp);
            let sig = tripartite_signature(&s).unwrap();
            assert_eq!(sig, (r.zeros.clone(), a, b, c, pp));
        }
    }

    #[test]
    fn epr_to_ghz_witness_fails_colocality_at_c() {
        let src = part(&[("A", vec![0]), ("B", vec![1]), ("C", vec![])]);
        let w = ExtractionWitness { source: vec![p("XX"), p("ZZ")], images: vec![p("XXX"), p("ZZI")] };
        let v = check_extraction_witness(&w, &src, &ghz3()).unwrap();
        assert!(matches!(v, WitnessVerdict::CoLocality { party: 2, .. }));
        let c = witness_conditions(&w, &src, &ghz3()).unwrap();
        assert_eq!(c.local_commutation, None);
        assert_eq!(c.co_locality.map(|(party, _)| party), Some(2));
    }

    #[test]
    fn witness_identity_and_errors() {
        let g = ghz3();
        let gens = g.tableau().generators().to_vec();
        let id = ExtractionWitness { source: gens.clone(), images: gens.clone() };
        assert_eq!(check_extraction_witness(&id, g.partition(), &g).unwrap(), WitnessVerdict::Valid);
        let maps = realize_local_symplectics(&id, g.partition(), g.partition()).unwrap();
        for (a, u) in maps.iter().enumerate() {
            for v in &gens {
                assert_eq!(u.apply(&v.restrict(&[a])), v.restrict(&[a]));
            }
        }
        let outside = ExtractionWitness { source: vec![p("XXX")], images: vec![p("XII")] };
        assert_eq!(
            check_extraction_witness(&outside, g.partition(), &g),
            Err(ExtractionError::ImageOutsideTarget { index: 0 })
        );
        let dup = ExtractionWitness { source: vec![p("XXX"), p("ZZI")], images: vec![p("XXX"), p("XXX")] };
        assert_eq!(check_extraction_witness(&dup, g.partition(), &g), Err(ExtractionError::NotInjective));
        let bad = ExtractionWitness { source: vec![p("XXX"), p("ZZI")], images: vec![p("XXX"), p("IZZ")] };
        assert!(matches!(
            check_extraction_witness(&bad, g.partition(), &g).unwrap(),
            WitnessVerdict::LocalCommutation { party: 0, j: 0, k: 1 }
        ));
        assert!(matches!(
            realize_local_symplectics(&bad, g.partition(), g.partition()),
            Err(ExtractionError::Symplectic(
                SymplecticError::InnerProductMismatch { .. } | SymplecticError::DependencyMismatch { .. }
            ))
        ));
    }

    #[test]
    fn extraction_witness_from_construction_is_valid() {
        // GHZ_3 into GHZ_3 ⊗ EPR_AB
        let target = state(
            &["+XIXIX", "+ZIZII", "+IIZIZ", "+IXIXI", "+IZIZI"],
            &[("A", vec![0, 1]), ("B", vec![2, 3]), ("C", vec![4])],
        );
        let d = build_ent_decomposition(&target).unwrap();
        let gab = d.l_alpha_bases[0][0].add(&d.l_alpha_bases[1][0]);
        let gbc = d.l_alpha_bases[1][0].add(&d.l_alpha_bases[2][0]);
        let w = ExtractionWitness {
            source: vec![p("XXX"), p("ZZI"), p("IZZ")],
            images: vec![d.s_ent_basis[0].clone(), gab, gbc],
        };
        assert!(check_extraction_witness(&w, &Partition::singletons(3), &target).unwrap().is_valid());
    }

    #[test]
    fn lcu_equivalence_examples() {
        let g = ghz3();
        let cs = random_local_circuits(g.partition(), 8, 5);
        let mut moved = g.clone();
        for c in &cs {
            moved = moved.apply_circuit(c).unwrap();
        }
        assert!(lcu_equivalent_tripartite(&g, &moved).unwrap());
        let other = state(&["+XXI", "+ZZI", "+IIZ"], &[("A", vec![0]), ("B", vec![1]), ("C", vec![2])]);
        assert!(!lcu_equivalent_tripartite(&g, &other).unwrap());
    }
}
