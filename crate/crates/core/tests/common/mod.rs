//! Shared helpers for integration tests: a dense state-vector simulator used
//! as an oracle, plus random-instance builders.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabent::clifford::{CliffordCircuit, Gate, Tableau};
use stabent::stabilizer::{random_stabilizer_state, Partition, PartitionedStabilizerState};
use stabent::symplectic::PauliVector;

pub const MAX_DENSE_QUBITS: usize = 10;

/// Amplitudes over basis states; bit `q` of the index is qubit `q`.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DENSE_QUBITS, "dense oracle capped at {MAX_DENSE_QUBITS} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn apply(&mut self, gate: &Gate) {
        let i = Complex64::new(0.0, 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *gate {
            Gate::H(q) => {
                let m = 1 << q;
                for b in 0..self.amps.len() {
                    if b & m == 0 {
                        let (a0, a1) = (self.amps[b], self.amps[b | m]);
                        self.amps[b] = (a0 + a1) * h;
                        self.amps[b | m] = (a0 - a1) * h;
                    }
                }
            }
            Gate::P(q) => {
                for (b, a) in self.amps.iter_mut().enumerate() {
                    if b >> q & 1 == 1 {
                        *a *= i;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for b in 0..self.amps.len() {
                    if b & c != 0 && b & t == 0 {
                        self.amps.swap(b, b | t);
                    }
                }
            }
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                let (x, z) = match gate {
                    Gate::X(_) => (true, false),
                    Gate::Y(_) => (true, true),
                    _ => (false, true),
                };
                let mut p = PauliVector::identity(self.n);
                p.set(q, x, z);
                *self = self.pauli(&p);
            }
        }
    }

    pub fn run(&mut self, c: &CliffordCircuit) {
        for g in c.gates() {
            self.apply(g);
        }
    }

    /// σ(p)|ψ⟩ with the single-qubit factors X, Z and Y = [[0,-i],[i,0]].
    pub fn pauli(&self, p: &PauliVector) -> StateVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let mut target = b;
            let mut phase = Complex64::new(1.0, 0.0);
            for q in 0..self.n {
                let bit = b >> q & 1 == 1;
                match (p.x_bit(q), p.z_bit(q)) {
                    (false, false) => {}
                    (true, false) => target ^= 1 << q,
                    (false, true) => {
                        if bit {
                            phase = -phase;
                        }
                    }
                    (true, true) => {
                        target ^= 1 << q;
                        phase *= if bit { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
                    }
                }
            }
            out[target] += a * phase;
        }
        StateVector { n: self.n, amps: out }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Whether `sign · σ(p)` stabilizes the state.
    pub fn stabilized_by(&self, p: &PauliVector, negative: bool) -> bool {
        let mut image = self.pauli(p);
        if negative {
            for a in &mut image.amps {
                *a = -*a;
            }
        }
        image.distance(self) < 1e-9
    }

    /// log2 of the Schmidt rank across `subset` and its complement.
    pub fn entanglement_entropy(&self, subset: &[usize]) -> usize {
        let rest: Vec<usize> = (0..self.n).filter(|q| !subset.contains(q)).collect();
        let rows = 1usize << subset.len();
        let cols = 1usize << rest.len();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); cols]; rows];
        for (b, &a) in self.amps.iter().enumerate() {
            let r = subset.iter().enumerate().fold(0, |acc, (k, &q)| acc | (b >> q & 1) << k);
            let c = rest.iter().enumerate().fold(0, |acc, (k, &q)| acc | (b >> q & 1) << k);
            m[r][c] = a;
        }
        let rank = complex_rank(m);
        assert!(rank.is_power_of_two(), "Schmidt rank {rank} of a stabilizer state");
        rank.trailing_zeros() as usize
    }
}

#[allow(clippy::needless_range_loop)]
fn complex_rank(mut m: Vec<Vec<Complex64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm())) else {
            break;
        };
        if m[pivot][c].norm() < 1e-9 {
            continue;
        }
        m.swap(rank, pivot);
        let p = m[rank][c];
        for r in 0..rows {
            if r != rank {
                let f = m[r][c] / p;
                if f.norm() > 0.0 {
                    for k in c..cols {
                        let v = m[rank][k];
                        m[r][k] -= f * v;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every signed generator of `t` stabilizes `psi`.
pub fn tableau_matches(t: &Tableau, psi: &StateVector) -> bool {
    t.generators().iter().zip(t.signs()).all(|(g, &s)| psi.stabilized_by(g, s))
}

/// A random assignment of `n` qubits to parties A, B, C (parties may be empty).
pub fn random_partition(n: usize, parties: usize, rng: &mut impl Rng) -> Partition {
    let names: Vec<String> = (0..parties).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    let assignment = (0..n).map(|_| rng.gen_range(0..parties)).collect();
    Partition::new(names, assignment).expect("valid partition")
}

/// The seeded instance family used by the tripartite checks: n in 1..=10,
/// random three-party assignment.
pub fn random_tripartite(seed: u64) -> PartitionedStabilizerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000);
    let n = rng.gen_range(1..=10);
    let partition = random_partition(n, 3, &mut rng);
    random_stabilizer_state(n, partition, seed).expect("random state")
}

/// `p` copies of the m-party GHZ state; party α holds qubits α·p .. α·p+p.
pub fn ghz_power(m: usize, p: usize) -> PartitionedStabilizerState {
    let n = m * p;
    let qubit = |party: usize, copy: usize| party * p + copy;
    let mut gens = Vec::new();
    for j in 0..p {
        let mut x = PauliVector::identity(n);
        for a in 0..m {
            x.set(qubit(a, j), true, false);
        }
        gens.push(x);
        for a in 1..m {
            let mut z = PauliVector::identity(n);
            z.set(qubit(a - 1, j), false, true);
            z.set(qubit(a, j), false, true);
            gens.push(z);
        }
    }
    let signs = vec![false; gens.len()];
    let blocks: Vec<(String, Vec<usize>)> = (0..m)
        .map(|a| (((b'A' + a as u8) as char).to_string(), (0..p).map(|j| qubit(a, j)).collect()))
        .collect();
    let t = Tableau::new(n, gens, signs).expect("GHZ tableau");
    PartitionedStabilizerState::new(t, Partition::from_blocks(n, &blocks).unwrap()).unwrap()
}
