//! Graph states, 2D cluster states, the planar toric code, junction
//! partitions and the saturation scan.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clifford::{CliffordError, Tableau};
use crate::stabilizer::{subgroup_profile, Partition, PartitionedStabilizerState, StabilizerError};
use crate::symplectic::{span_paulis, PauliVector, SymplecticError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("lattice must be at least 2x2, got {0}x{1}")]
    LatticeTooSmall(usize, usize),
    #[error("junction rays are not distinct modulo 2π")]
    DegenerateAngles,
    #[error("geometry has {geometry} sites, expected {expected}")]
    GeometryMismatch { geometry: usize, expected: usize },
    #[error("size {size}: delta {delta} exceeds the bound {bound}")]
    BoundViolated { size: usize, delta: usize, bound: usize },
    #[error("size {size}: generators meeting all parties do not complete S_loc")]
    DecompositionFailed { size: usize },
    #[error("unknown lattice kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(ModelError::VertexOutOfRange { vertex: v, count: vertex_count });
                }
            }
            if a == b {
                return Err(ModelError::SelfLoop(a));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(ModelError::DuplicateEdge(a, b));
            }
        }
        Ok(Self { vertex_count, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }
}

/// Generator u is X_u ∏_{v ~ u} Z_v, all signs +.
pub fn graph_state(g: &Graph) -> Tableau {
    let n = g.vertex_count;
    let mut gens: Vec<PauliVector> = (0..n).map(|u| PauliVector::x_on(n, u)).collect();
    for &(a, b) in &g.edges {
        gens[a].z_mut().set(b, true);
        gens[b].z_mut().set(a, true);
    }
    Tableau::new(n, gens, vec![false; n]).expect("graph states are valid")
}

/// Two triangles {0,1,2}, {3,4,5} joined by spokes 0-3, 1-4, 2-5.
pub fn prism_graph() -> Graph {
    Graph::new(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 4), (2, 5)]).expect("fixed edge list")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Cluster2d,
    ToricPlanar,
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Cluster2d => "cluster",
            LatticeKind::ToricPlanar => "toric",
        })
    }
}

impl FromStr for LatticeKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cluster" | "cluster2d" => Ok(LatticeKind::Cluster2d),
            "toric" | "toric_planar" | "toric-planar" => Ok(LatticeKind::ToricPlanar),
            other => Err(ModelError::UnknownKind(other.to_string())),
        }
    }
}

/// Lattice shape plus an integer coordinate per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub width: usize,
    pub height: usize,
    pub geometry: Vec<(i64, i64)>,
}

impl LatticeSpec {
    pub fn num_qubits(&self) -> usize {
        self.geometry.len()
    }

    /// Midpoint of the coordinate bounding box.
    pub fn center(&self) -> (f64, f64) {
        let xs = self.geometry.iter().map(|c| c.0);
        let ys = self.geometry.iter().map(|c| c.1);
        let (x0, x1) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
        let (y0, y1) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0));
        ((x0 + x1) as f64 / 2.0, (y0 + y1) as f64 / 2.0)
    }

    /// A junction point tied to the same lattice feature at every size: the
    /// center of the central grid cell (cluster) or of the central plaquette
    /// (toric code). The bounding-box midpoint alternates between sublattices
    /// with the parity of the size.
    pub fn junction_center(&self) -> (f64, f64) {
        let i = ((self.width - 1) / 2) as f64;
        let j = ((self.height - 1) / 2) as f64;
        match self.kind {
            LatticeKind::Cluster2d => (i + 0.5, j + 0.5),
            LatticeKind::ToricPlanar => (i + j + 0.5, i - j + 0.5),
        }
    }
}

fn check_size(w: usize, h: usize) -> Result<(), ModelError> {
    if w < 2 || h < 2 {
        return Err(ModelError::LatticeTooSmall(w, h));
    }
    Ok(())
}

/// Graph state of the w×h grid; qubit `y*w + x` sits at `(x, y)`.
pub fn cluster_state_2d(w: usize, h: usize) -> Result<(Tableau, LatticeSpec), ModelError> {
    check_size(w, h)?;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let q = y * w + x;
            if x + 1 < w {
                edges.push((q, q + 1));
            }
            if y + 1 < h {
                edges.push((q, q + w));
            }
        }
    }
    let g = Graph::new(w * h, &edges)?;
    let geometry = (0..w * h).map(|q| ((q % w) as i64, (q / w) as i64)).collect();
    Ok((graph_state(&g), LatticeSpec { kind: LatticeKind::Cluster2d, width: w, height: h, geometry }))
}

/// Planar toric code on a patch of w×h vertices with qubits on edges.
///
/// Stars (X) on every vertex but the last and plaquettes (Z) on every face
/// give a full-rank set. Qubits get coordinates in the lattice rotated by 45°,
/// where every star and plaquette fits a 2×2 block. Horizontal edges come
/// first, row by row, then vertical edges.
pub fn toric_code_planar(w: usize, h: usize) -> Result<(Tableau, LatticeSpec), ModelError> {
    check_size(w, h)?;
    let horizontal = |i: usize, j: usize| j * (w - 1) + i;
    let n_h = (w - 1) * h;
    let vertical = |i: usize, j: usize| n_h + j * w + i;
    let n = n_h + w * (h - 1);

    let mut geometry = vec![(0i64, 0i64); n];
    for j in 0..h {
        for i in 0..w - 1 {
            geometry[horizontal(i, j)] = rotated(2 * i as i64 + 1, 2 * j as i64);
        }
    }
    for j in 0..h - 1 {
        for i in 0..w {
            geometry[vertical(i, j)] = rotated(2 * i as i64, 2 * j as i64 + 1);
        }
    }

    let mut gens = Vec::with_capacity(n);
    for j in 0..h {
        for i in 0..w {
            if i == w - 1 && j == h - 1 {
                continue;
            }
            let mut star = PauliVector::identity(n);
            let mut touch = |q: usize| star.x_mut().set(q, true);
            if i + 1 < w {
                touch(horizontal(i, j));
            }
            if i > 0 {
                touch(horizontal(i - 1, j));
            }
            if j + 1 < h {
                touch(vertical(i, j));
            }
            if j > 0 {
                touch(vertical(i, j - 1));
            }
            gens.push(star);
        }
    }
    for j in 0..h - 1 {
        for i in 0..w - 1 {
            let mut plaq = PauliVector::identity(n);
            for q in [horizontal(i, j), horizontal(i, j + 1), vertical(i, j), vertical(i + 1, j)] {
                plaq.z_mut().set(q, true);
            }
            gens.push(plaq);
        }
    }
    let tableau = Tableau::new(n, gens, vec![false; n])?;
    Ok((tableau, LatticeSpec { kind: LatticeKind::ToricPlanar, width: w, height: h, geometry }))
}

/// (X, Y) on the doubled lattice to ((X+Y-1)/2, (X-Y+1)/2).
fn rotated(x: i64, y: i64) -> (i64, i64) {
    ((x + y - 1).div_euclid(2), (x - y + 1).div_euclid(2))
}

pub fn lattice_state(kind: LatticeKind, w: usize, h: usize) -> Result<(Tableau, LatticeSpec), ModelError> {
    match kind {
        LatticeKind::Cluster2d => cluster_state_2d(w, h),
        LatticeKind::ToricPlanar => toric_code_planar(w, h),
    }
}

const ANGLE_TOL: f64 = 1e-9;

/// Three parties A, B, C by angular sector around `center`.
///
/// Sector A runs counterclockwise from the first ray to the next ray, and so
/// on; a qubit on a ray belongs to the sector that starts at that ray. A
/// qubit exactly at the center goes to A.
pub fn junction_partition(spec: &LatticeSpec, center: (f64, f64), ray_angles: [f64; 3]) -> Result<Partition, ModelError> {
    let base = ray_angles[0];
    let mut offsets: Vec<(f64, usize)> = ray_angles.iter().enumerate().map(|(k, &t)| (normalize(t - base), k)).collect();
    offsets.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in offsets.windows(2) {
        if w[1].0 - w[0].0 < ANGLE_TOL {
            return Err(ModelError::DegenerateAngles);
        }
    }
    if TAU - offsets[2].0 < ANGLE_TOL {
        return Err(ModelError::DegenerateAngles);
    }
    let assignment = spec
        .geometry
        .iter()
        .map(|&(x, y)| {
            let (dx, dy) = (x as f64 - center.0, y as f64 - center.1);
            if dx.abs() < ANGLE_TOL && dy.abs() < ANGLE_TOL {
                return 0;
            }
            let mut t = normalize(dy.atan2(dx) - base);
            if TAU - t < ANGLE_TOL {
                t = 0.0;
            }
            let sector = offsets.iter().rposition(|&(o, _)| o <= t + ANGLE_TOL).unwrap_or(0);
            sector
        })
        .collect();
    Ok(Partition::new(vec!["A".into(), "B".into(), "C".into()], assignment)?)
}

fn normalize(t: f64) -> f64 {
    t.rem_euclid(TAU)
}

/// Rays used by the default junction: 90°, 210°, 330°.
pub const DEFAULT_RAYS: [f64; 3] = [std::f64::consts::FRAC_PI_2, 7.0 * std::f64::consts::PI / 6.0, 11.0 * std::f64::consts::PI / 6.0];

/// Smallest l such that every generator's support fits an l×l block.
pub fn interaction_length(generators: &[PauliVector], geometry: &[(i64, i64)]) -> Result<usize, ModelError> {
    let mut l = 0;
    for g in generators {
        if g.num_qubits() != geometry.len() {
            return Err(ModelError::GeometryMismatch { geometry: geometry.len(), expected: g.num_qubits() });
        }
        let support = g.support();
        if support.is_empty() {
            continue;
        }
        let xs = support.iter().map(|&q| geometry[q].0);
        let ys = support.iter().map(|&q| geometry[q].1);
        let span_x = xs.clone().max().unwrap() - xs.min().unwrap() + 1;
        let span_y = ys.clone().max().unwrap() - ys.min().unwrap() + 1;
        l = l.max(span_x.max(span_y) as usize);
    }
    Ok(l)
}

/// How the junction is placed for each lattice size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JunctionRule {
    /// [`LatticeSpec::junction_center`] with the default rays.
    Center,
    Explicit { center: (f64, f64), rays: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub size: usize,
    pub n: usize,
    pub delta: usize,
    pub interaction_length: usize,
    /// l⁴.
    pub bound: usize,
    /// Dimension of the span of the generators that meet all three parties.
    pub dim_s_prime: usize,
}

/// Δ for L×L instances of `kind` cut by a junction.
///
/// Fails if Δ exceeds l⁴ or if the generators meeting all three parties do
/// not complete S_loc to S.
pub fn saturation_scan(kind: LatticeKind, sizes: &[usize], rule: JunctionRule) -> Result<Vec<ScanRow>, ModelError> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let (tableau, spec) = lattice_state(kind, size, size)?;
        let (center, rays) = match rule {
            JunctionRule::Center => (spec.junction_center(), DEFAULT_RAYS),
            JunctionRule::Explicit { center, rays } => (center, rays),
        };
        let partition = junction_partition(&spec, center, rays)?;
        let n = tableau.num_qubits();
        let l = interaction_length(tableau.generators(), &spec.geometry)?;
        let blocks = partition.blocks();
        let s_prime: Vec<PauliVector> = tableau
            .generators()
            .iter()
            .filter(|g| blocks.iter().all(|b| !g.vanishes_on(b)))
            .cloned()
            .collect();
        let state = PartitionedStabilizerState::new(tableau, partition)?;
        let profile = subgroup_profile(&state);
        let s_prime_space = span_paulis(n, &s_prime)?;
        let total = profile.s_loc.sum(&s_prime_space).map_err(SymplecticError::from)?;
        if total != state.group() {
            return Err(ModelError::DecompositionFailed { size });
        }
        let bound = l.pow(4);
        if profile.delta > bound {
            return Err(ModelError::BoundViolated { size, delta: profile.delta, bound });
        }
        rows.push(ScanRow {
            size,
            n,
            delta: profile.delta,
            interaction_length: l,
            bound,
            dim_s_prime: s_prime_space.dim(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::subset_entropy;
    use crate::symplectic::is_self_dual;

    fn p(s: &str) -> PauliVector {
        s.parse().unwrap()
    }

    #[test]
    fn graph_validation() {
        assert_eq!(Graph::new(2, &[(1, 1)]), Err(ModelError::SelfLoop(1)));
        assert_eq!(Graph::new(2, &[(0, 1), (1, 0)]), Err(ModelError::DuplicateEdge(1, 0)));
        assert!(matches!(Graph::new(2, &[(0, 2)]), Err(ModelError::VertexOutOfRange { vertex: 2, .. })));
    }

    #[test]
    fn graph_state_examples() {
        let t = graph_state(&Graph::new(1, &[]).unwrap());
        assert_eq!(t.generators(), &[p("X")]);
        let t = graph_state(&Graph::new(2, &[(0, 1)]).unwrap());
        assert_eq!(t.generators(), &[p("XZ"), p("ZX")]);
        let t = graph_state(&prism_graph());
        assert_eq!(t.generators()[0], p("XZZZII"));
        assert!(t.signs().iter().all(|s| !s));
        assert!(is_self_dual(&t.group()));
    }

    #[test]
    fn prism_triples_are_maximally_mixed() {
        let s = PartitionedStabilizerState::new(graph_state(&prism_graph()), Partition::singletons(6)).unwrap();
        let mut count = 0;
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    assert_eq!(subset_entropy(&s, &[a, b, c]).unwrap(), 3);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn cluster_examples() {
        let (t, spec) = cluster_state_2d(2, 2).unwrap();
        let cycle = graph_state(&Graph::new(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap());
        assert_eq!(t, cycle);
        assert_eq!(spec.geometry, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
        let (t, spec) = cluster_state_2d(5, 4).unwrap();
        assert_eq!(interaction_length(t.generators(), &spec.geometry).unwrap(), 3);
        assert_eq!(t.generators()[6].weight(), 5);
        assert!(matches!(cluster_state_2d(1, 3), Err(ModelError::LatticeTooSmall(1, 3))));
    }

    #[test]
    fn toric_examples() {
        for (w, h) in [(2, 2), (3, 4), (5, 5)] {
            let (t, spec) = toric_code_planar(w, h).unwrap();
            assert_eq!(t.num_qubits(), 2 * w * h - w - h);
            assert!(is_self_dual(&t.group()));
            assert_eq!(interaction_length(t.generators(), &spec.geometry).unwrap(), 2);
            let distinct: BTreeSet<_> = spec.geometry.iter().collect();
            assert_eq!(distinct.len(), spec.geometry.len());
        }
    }

    #[test]
    fn interaction_length_single_sites() {
        let geometry = vec![(0, 0), (3, 1), (5, 5)];
        let gens: Vec<PauliVector> = (0..3).map(|q| PauliVector::x_on(3, q)).collect();
        assert_eq!(interaction_length(&gens, &geometry).unwrap(), 1);
    }

    #[test]
    fn junction_examples() {
        let (_, spec) = cluster_state_2d(4, 4).unwrap();
        let part = junction_partition(&spec, spec.center(), DEFAULT_RAYS).unwrap();
        assert_eq!(part.num_qubits(), 16);
        assert!((0..3).all(|a| !part.qubits_of(a).is_empty()));

        let shifted = DEFAULT_RAYS.map(|r| r + TAU);
        assert_eq!(junction_partition(&spec, spec.center(), shifted).unwrap(), part);

        // junction far away: every qubit in one sector
        let far = junction_partition(&spec, (-10.0, 1.5), [-0.5, 0.5, 3.0]).unwrap();
        assert_eq!(far.qubits_of(0).len(), 16);
        assert!(far.qubits_of(1).is_empty());

        assert_eq!(junction_partition(&spec, (0.0, 0.0), [0.0, TAU, 1.0]), Err(ModelError::DegenerateAngles));
    }

    #[test]
    fn junction_ray_ties_go_counterclockwise() {
        let spec = LatticeSpec { kind: LatticeKind::Cluster2d, width: 3, height: 3, geometry: vec![(1, 2), (0, 1), (2, 1)] };
        // ray 0 at 90° passes through (1, 2)
        let part = junction_partition(&spec, (1.0, 1.0), DEFAULT_RAYS).unwrap();
        assert_eq!(part.party_of(0), 0);
        assert_eq!(part.party_of(1), 0);
        assert_eq!(part.party_of(2), 2);
    }

    #[test]
    fn small_scans() {
        let rows = saturation_scan(LatticeKind::Cluster2d, &[4, 5, 6], JunctionRule::Center).unwrap();
        assert!(rows.iter().all(|r| r.delta <= 81 && r.interaction_length == 3));
        let rows = saturation_scan(LatticeKind::ToricPlanar, &[3, 4], JunctionRule::Center).unwrap();
        assert!(rows.iter().all(|r| r.delta <= 16 && r.interaction_length == 2));
        let (_, spec) = toric_code_planar(4, 4).unwrap();
        let bbox = junction_partition(&spec, spec.center(), DEFAULT_RAYS).unwrap();
        assert_eq!(bbox.num_qubits(), 24);
    }
}
