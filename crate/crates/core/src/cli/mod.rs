//! Command-line front end. Exit codes: 0 success, 1 usage, 2 parse or
//! validation failure, 3 internal invariant violation.

pub mod report;
pub mod statefile;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::extraction::{
    decompose_tripartite, extract_ghz, tripartite_signature, verify_decomposition, witness_conditions,
    ExtractionError, ExtractionWitness,
};
use crate::models::{graph_state, saturation_scan, Graph, JunctionRule, LatticeKind, DEFAULT_RAYS};
use crate::stabilizer::{subgroup_profile, subset_entropy, Partition, PartitionedStabilizerState};
use crate::symplectic::PauliVector;

pub use report::Report;
pub use statefile::{parse_state, serialize_state, StateFileError};

#[derive(Parser, Debug)]
#[command(name = "stabent", version, about = "Entanglement structure of multipartite stabilizer states")]
struct Cli {
    /// Emit reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// GHZ yield Δ = dim S − dim S_loc and subgroup dimensions.
    Delta { state: PathBuf },
    /// Decompose a three-party state into |0⟩, EPR pairs and GHZ states.
    Decompose3 { state: PathBuf },
    /// Extract the maximal number of GHZ states.
    Ghz { state: PathBuf },
    /// Decide local Clifford equivalence of two three-party states.
    Equiv3 { first: PathBuf, second: PathBuf },
    /// Check an extraction witness against a target state.
    Witness { target: PathBuf, map: PathBuf },
    /// Δ of junction-partitioned lattice states across sizes.
    LatticeScan {
        #[arg(long)]
        kind: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// `center` or an explicit point `x,y`.
        #[arg(long, default_value = "center")]
        junction: String,
        /// Ray angles in degrees.
        #[arg(long, value_delimiter = ',')]
        rays: Option<Vec<f64>>,
    },
    /// Print the state file of a graph state.
    Graph {
        #[arg(long)]
        vertices: usize,
        /// Comma-separated 1-based edges like `1-2,2-3`.
        #[arg(long, default_value = "")]
        edges: String,
        /// Party groups like `A=1,2 B=3`; one party per vertex by default.
        #[arg(long)]
        parties: Option<String>,
    },
    /// Re-check the circuits of a decompose3 or ghz report.
    Verify { state: PathBuf, report: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<ExtractionError> for Failure {
    fn from(e: ExtractionError) -> Self {
        match e {
            ExtractionError::Invariant(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<PartitionedStabilizerState, Failure> {
    parse_state(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Run with the given arguments (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn emit(report: &Report, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let text = if json { report.to_json() + "\n" } else { report.to_text() };
    out.write_all(text.as_bytes()).map_err(|e| Failure::Internal(e.to_string()))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Delta { state } => emit(&delta_report(&load_state(state)?), cli.json, out),
        Command::Decompose3 { state } => {
            let s = load_state(state)?;
            let d = decompose_tripartite(&s)?;
            let mut r = Report::new("decompose3");
            r.field("n", s.num_qubits());
            report::add_decomposition(&mut r, &d, s.partition());
            r.field("verified", check(&s, &d)?);
            emit(&r, cli.json, out)
        }
        Command::Ghz { state } => {
            let s = load_state(state)?;
            let (p, d, _) = extract_ghz(&s)?;
            let mut r = Report::new("ghz");
            r.field("n", s.num_qubits());
            r.field("p", p);
            report::add_decomposition(&mut r, &d, s.partition());
            r.field("verified", check(&s, &d)?);
            emit(&r, cli.json, out)
        }
        Command::Equiv3 { first, second } => {
            let (s1, s2) = (load_state(first)?, load_state(second)?);
            let sig1 = tripartite_signature(&s1)?;
            let sig2 = tripartite_signature(&s2)?;
            let fmt = |s: &PartitionedStabilizerState, sig: &(Vec<usize>, usize, usize, usize, usize)| {
                format!(
                    "zeros=[{}] a={} b={} c={} p={}",
                    report::per_party(s.partition(), &sig.0),
                    sig.1,
                    sig.2,
                    sig.3,
                    sig.4
                )
            };
            let mut r = Report::new("equiv3");
            r.field("first", fmt(&s1, &sig1));
            r.field("second", fmt(&s2, &sig2));
            r.field("equivalent", sig1 == sig2);
            emit(&r, cli.json, out)
        }
        Command::Witness { target, map } => {
            let t = load_state(target)?;
            emit(&witness_report(&t, &read(map)?)?, cli.json, out)
        }
        Command::LatticeScan { kind, sizes, junction, rays } => {
            emit(&scan_report(kind, sizes, junction, rays.as_deref())?, cli.json, out)
        }
        Command::Graph { vertices, edges, parties } => {
            let mut list = Vec::new();
            for e in edges.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let parsed = e.split_once('-').and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
                match parsed {
                    Some((a, b)) if a >= 1 && b >= 1 => list.push((a - 1, b - 1)),
                    _ => return Err(Failure::Usage(format!("bad edge {e:?}"))),
                }
            }
            let g = Graph::new(*vertices, &list).map_err(|e| Failure::Input(e.to_string()))?;
            let partition = match parties {
                Some(p) => statefile::parse_parties(*vertices, p, 0).map_err(|e| Failure::Usage(e.to_string()))?,
                None => Partition::singletons(*vertices),
            };
            let s = PartitionedStabilizerState::new(graph_state(&g), partition)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            out.write_all(serialize_state(&s).as_bytes()).map_err(|e| Failure::Internal(e.to_string()))
        }
        Command::Verify { state, report: path } => {
            let s = load_state(state)?;
            let r = Report::parse(&read(path)?).map_err(Failure::Input)?;
            let d = report::decomposition_from_report(&r, s.partition()).map_err(Failure::Input)?;
            let ok = verify_decomposition(&s, &d)?;
            let mut v = Report::new("verify");
            v.field("verified", ok);
            emit(&v, cli.json, out)?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Input("circuits do not produce the reported decomposition".into()))
            }
        }
    }
}

fn check(s: &PartitionedStabilizerState, d: &crate::extraction::DecompositionReport) -> Result<bool, Failure> {
    if verify_decomposition(s, d)? {
        Ok(true)
    } else {
        Err(Failure::Internal("synthesized circuits failed verification".into()))
    }
}

fn delta_report(s: &PartitionedStabilizerState) -> Report {
    let prof = subgroup_profile(s);
    let p = s.partition();
    let mut r = Report::new("delta");
    r.field("n", s.num_qubits());
    r.field("parties", p.parties().join(" "));
    r.field("delta", prof.delta);
    r.field("s_loc_dim", prof.s_loc.dim());
    r.field("colocal_dims", report::per_party(p, &prof.colocal.iter().map(|c| c.dim()).collect::<Vec<_>>()));
    r.field("local_dims", report::per_party(p, &prof.local.iter().map(|c| c.dim()).collect::<Vec<_>>()));
    let entropies: Vec<usize> =
        p.blocks().iter().map(|b| subset_entropy(s, b).expect("party qubits are in range")).collect();
    r.field("entropies", report::per_party(p, &entropies));
    if let Some(pairs) = prof.bipartite_pairs {
        r.field("bipartite_pairs", pairs);
    }
    r
}

/// Map file: a `parties:` line for the source, then `map:` and lines `XX -> XXX`.
fn witness_report(target: &PartitionedStabilizerState, text: &str) -> Result<Report, Failure> {
    let bad = |line: usize, m: &str| Failure::Input(format!("map file line {line}: {m}"));
    let mut lines = statefile::significant_lines(text);
    let (l1, first) = lines.next().ok_or_else(|| bad(1, "empty map file"))?;
    let groups = first.strip_prefix("parties:").ok_or_else(|| bad(l1, "expected parties:"))?;
    let (l2, second) = lines.next().ok_or_else(|| bad(l1 + 1, "missing map:"))?;
    if second != "map:" {
        return Err(bad(l2, "expected map:"));
    }
    let mut source = Vec::new();
    let mut images = Vec::new();
    for (line, l) in lines {
        let (a, b) = l.split_once("->").ok_or_else(|| bad(line, "expected <source> -> <image>"))?;
        let a: PauliVector = a.trim().parse().map_err(|_| bad(line, "bad source string"))?;
        let b: PauliVector = b.trim().parse().map_err(|_| bad(line, "bad image string"))?;
        source.push(a);
        images.push(b);
    }
    let n_src = source.first().map_or(0, |v| v.num_qubits());
    let src_partition = statefile::parse_parties(n_src, groups, l1).map_err(|e| Failure::Input(e.to_string()))?;
    if src_partition.parties() != target.partition().parties() {
        return Err(Failure::Input("source and target name different parties".into()));
    }
    let w = ExtractionWitness { source, images };
    let c = witness_conditions(&w, &src_partition, target)?;
    let names = target.partition().parties();
    let mut r = Report::new("witness");
    r.field("source_n", n_src);
    r.field("target_n", target.num_qubits());
    r.field(
        "local_commutation",
        match c.local_commutation {
            None => "pass".to_string(),
            Some((a, j, k)) => format!("fail party={} pair={},{}", names[a], j + 1, k + 1),
        },
    );
    r.field(
        "co_locality",
        match &c.co_locality {
            None => "pass".to_string(),
            Some((a, combo)) => format!("fail party={} combination={combo}", names[*a]),
        },
    );
    r.field("valid", c.verdict().is_valid());
    Ok(r)
}

fn scan_report(kind: &str, sizes: &[usize], junction: &str, rays: Option<&[f64]>) -> Result<Report, Failure> {
    let kind: LatticeKind = kind.parse().map_err(|e: crate::models::ModelError| Failure::Usage(e.to_string()))?;
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage("sizes must be increasing".into()));
    }
    let rays_rad = match rays {
        None => DEFAULT_RAYS,
        Some([a, b, c]) => [a.to_radians(), b.to_radians(), c.to_radians()],
        Some(_) => return Err(Failure::Usage("--rays takes three angles".into())),
    };
    let rule = if junction == "center" && rays.is_none() {
        JunctionRule::Center
    } else if junction == "center" {
        return Err(Failure::Usage("--rays needs an explicit --junction x,y".into()));
    } else {
        let (x, y) = junction
            .split_once(',')
            .and_then(|(x, y)| Some((x.trim().parse::<f64>().ok()?, y.trim().parse::<f64>().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("bad junction {junction:?}")))?;
        JunctionRule::Explicit { center: (x, y), rays: rays_rad }
    };
    let rows = saturation_scan(kind, sizes, rule).map_err(|e| match e {
        crate::models::ModelError::BoundViolated { .. } | crate::models::ModelError::DecompositionFailed { .. } => {
            Failure::Internal(e.to_string())
        }
        other => Failure::Input(other.to_string()),
    })?;
    let mut r = Report::new("lattice-scan");
    r.field("kind", kind);
    r.field("junction", junction);
    if let Some(first) = rows.first() {
        r.field("interaction_length", first.interaction_length);
        r.field("bound", first.bound);
    }
    for row in &rows {
        r.field(
            &format!("size {}", row.size),
            format!(
                "n={} delta={} l={} bound={} dim_s_prime={}",
                row.n, row.delta, row.interaction_length, row.bound, row.dim_s_prime
            ),
        );
    }
    r.field("constant", rows.windows(2).all(|w| w[0].delta == w[1].delta));
    Ok(r)
}
