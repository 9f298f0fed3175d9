//! Line-oriented reports (`key: value`, then `circuit <party>:` ... `end`
//! blocks) with a JSON twin.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordCircuit, Tableau};
use crate::extraction::DecompositionReport;
use crate::stabilizer::Partition;

use super::statefile::{parse_signed, significant_lines};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub fields: IndexMap<String, String>,
    /// Party name to gate lines.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub circuits: IndexMap<String, Vec<String>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Self::default() }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for (party, gates) in &self.circuits {
            out.push_str(&format!("circuit {party}:\n"));
            for g in gates {
                out.push_str(g);
                out.push('\n');
            }
            out.push_str("end\n");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parse either form; JSON is recognized by a leading `{`.
    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| e.to_string());
        }
        let mut report = Report::default();
        let mut block: Option<(String, Vec<String>)> = None;
        for (line, l) in significant_lines(text) {
            if let Some((party, gates)) = block.as_mut() {
                if l == "end" {
                    report.circuits.insert(std::mem::take(party), std::mem::take(gates));
                    block = None;
                } else {
                    gates.push(l.to_string());
                }
                continue;
            }
            if let Some(party) = l.strip_prefix("circuit ").and_then(|r| r.strip_suffix(':')) {
                block = Some((party.trim().to_string(), Vec::new()));
                continue;
            }
            let (k, v) = l.split_once(':').ok_or_else(|| format!("line {line}: expected key: value"))?;
            if k == "command" {
                report.command = v.trim().to_string();
            } else {
                report.fields.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        if block.is_some() {
            return Err("unterminated circuit block".into());
        }
        Ok(report)
    }
}

pub(crate) fn per_party(p: &Partition, values: &[usize]) -> String {
    p.parties().iter().zip(values).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(" ")
}

/// Fields and circuits describing a decomposition.
pub fn add_decomposition(report: &mut Report, d: &DecompositionReport, partition: &Partition) {
    let names = partition.parties();
    report.field("parties", names.join(" "));
    report.field("zeros", per_party(partition, &d.zeros));
    let mut epr = Vec::new();
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            epr.push(format!("{}-{}={}", names[a], names[b], d.epr_count(a, b)));
        }
    }
    report.field("epr", epr.join(" "));
    report.field("ghz", d.ghz);
    if names.len() == 3 {
        let (a, b, c, p) = d.tripartite_counts();
        report.field("counts", format!("a={a} b={b} c={c} p={p}"));
    }
    report.field("residual_n", d.residual.num_qubits());
    let residual: Vec<String> = (0..d.residual.num_qubits()).map(|i| d.residual.generator_string(i)).collect();
    report.field("residual", residual.join(" "));
    for (a, map) in d.local_maps.iter().enumerate() {
        let images: Vec<String> = map.images().iter().map(|v| v.to_string()).collect();
        report.field(&format!("map {}", names[a]), images.join(" "));
    }
    for (a, c) in d.circuits.iter().enumerate() {
        report.circuits.insert(names[a].clone(), c.gates().iter().map(|g| g.to_string()).collect());
    }
}

/// Rebuild the counts and circuits of a decomposition report.
pub fn decomposition_from_report(report: &Report, partition: &Partition) -> Result<DecompositionReport, String> {
    let names = partition.parties();
    let need = |k: &str| report.get(k).ok_or_else(|| format!("report lacks {k:?}"));
    let mut zeros = vec![0; names.len()];
    for item in need("zeros")?.split_whitespace() {
        let (name, v) = item.split_once('=').ok_or_else(|| format!("bad zeros entry {item:?}"))?;
        let a = partition.index_of(name).ok_or_else(|| format!("unknown party {name:?}"))?;
        zeros[a] = v.parse().map_err(|_| format!("bad count {v:?}"))?;
    }
    let mut epr = BTreeMap::new();
    for item in need("epr")?.split_whitespace() {
        let (pair, v) = item.split_once('=').ok_or_else(|| format!("bad epr entry {item:?}"))?;
        let (x, y) = pair.split_once('-').ok_or_else(|| format!("bad pair {pair:?}"))?;
        let (a, b) = (
            partition.index_of(x).ok_or_else(|| format!("unknown party {x:?}"))?,
            partition.index_of(y).ok_or_else(|| format!("unknown party {y:?}"))?,
        );
        let count: usize = v.parse().map_err(|_| format!("bad count {v:?}"))?;
        if count > 0 {
            epr.insert((a.min(b), a.max(b)), count);
        }
    }
    let ghz: usize = need("ghz")?.parse().map_err(|_| "bad ghz count".to_string())?;
    let residual_n: usize = need("residual_n")?.parse().map_err(|_| "bad residual_n".to_string())?;
    let mut gens = Vec::new();
    let mut signs = Vec::new();
    for g in need("residual")?.split_whitespace() {
        let (v, s) = parse_signed(g, Some(residual_n), 0).map_err(|e| e.to_string())?;
        gens.push(v);
        signs.push(s);
    }
    let residual = Tableau::new(residual_n, gens, signs).map_err(|e| e.to_string())?;
    let mut circuits = vec![CliffordCircuit::new(); names.len()];
    for (party, gates) in &report.circuits {
        let a = partition.index_of(party).ok_or_else(|| format!("circuit for unknown party {party:?}"))?;
        circuits[a] = gates.join("\n").parse().map_err(|e: crate::clifford::CliffordError| e.to_string())?;
    }
    Ok(DecompositionReport {
        parties: names.to_vec(),
        zeros,
        epr,
        ghz,
        residual,
        local_maps: Vec::new(),
        circuits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_round_trip() {
        let mut r = Report::new("ghz");
        r.field("p", 1).field("residual", "");
        r.circuits.insert("A".into(), vec!["H 0".into(), "CNOT 0 1".into()]);
        r.circuits.insert("B".into(), vec![]);
        assert_eq!(Report::parse(&r.to_text()).unwrap(), r);
        assert_eq!(Report::parse(&r.to_json()).unwrap(), r);
        assert!(Report::parse("command: x\ncircuit A:\nH 0\n").is_err());
    }
}
