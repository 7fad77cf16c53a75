//! Qubit/classical-bit efficiency figures and the cross-protocol
//! comparison table.

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisError;

/// Per-key-bit resource counts and the two efficiency measures:
/// `eta1 = b_s/(q_t + b_t)` (secret bits over qubits plus classical bits)
/// and `eta2 = b_s/q_t`. Decoy qubits are excluded from `q_t` — they verify
/// the channel and contribute nothing to the key.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyFigures {
    pub secret_bits: u64,
    pub qubits_transmitted: u64,
    pub classical_bits: u64,
    pub eta1: f64,
    pub eta2: f64,
}

/// Efficiency of the two protocol variants, per key bit.
///
/// Variant 1 transmits both pair halves (q_t = 2) and announces three bit
/// sequences (b_t = 3): η₁ = 1/5 = 0.2, η₂ = 1/2. Variant 2 transmits one
/// half (q_t = 1) and announces two sequences (b_t = 2): η₁ = 1/3, η₂ = 1.
pub fn efficiency_for(protocol: u8) -> Result<EfficiencyFigures, AnalysisError> {
    let (secret_bits, qubits_transmitted, classical_bits) = match protocol {
        1 => (1u64, 2u64, 3u64),
        2 => (1, 1, 2),
        other => return Err(AnalysisError::UnknownProtocol(other)),
    };
    Ok(EfficiencyFigures {
        secret_bits,
        qubits_transmitted,
        classical_bits,
        eta1: secret_bits as f64 / (qubits_transmitted + classical_bits) as f64,
        eta2: secret_bits as f64 / qubits_transmitted as f64,
    })
}

/// One row of the comparison table. Literature rows are hard-coded
/// reference constants, not simulated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub protocol: &'static str,
    pub parties: u8,
    pub resources: &'static str,
    pub channel: &'static str,
    pub quantum_memory: bool,
    pub third_party: bool,
    pub eta1: String,
    pub eta2: String,
    pub reference_only: bool,
}

/// The comparison table: six literature rows plus the two protocols
/// implemented here (computed from [`efficiency_for`]).
pub fn comparison_table() -> Vec<ComparisonRow> {
    let lit = |protocol, parties, resources, channel, qm, tp, e1: &str, e2: &str| ComparisonRow {
        protocol,
        parties,
        resources,
        channel,
        quantum_memory: qm,
        third_party: tp,
        eta1: e1.to_string(),
        eta2: e2.to_string(),
        reference_only: true,
    };
    let ours = |protocol: &'static str, tp: bool, fig: EfficiencyFigures| ComparisonRow {
        protocol,
        parties: 2,
        resources: "EPR pair, single qubit",
        channel: "one-way",
        quantum_memory: false,
        third_party: tp,
        eta1: format!("{:.2}", fig.eta1),
        eta2: format!("{:.2}", fig.eta2),
        reference_only: false,
    };
    vec![
        lit("Huang et al.", 2, "EPR pair", "one-way", true, false, "0.5", "1"),
        lit("Xu et al.", 3, "GHZ state", "one-way", true, false, "<0.5", "<0.5"),
        lit("Shukla et al.", 2, "EPR pair", "two-way", true, false, "0.33", "0.5"),
        lit("He et al.", 2, "four-qubit cluster state", "two-way", true, false, "0.5", "1"),
        lit("Yang et al.", 2, "four-qubit cluster state", "one-way", true, false, "<0.5", "<1"),
        lit("Tang et al.", 2, "GHZ state", "two-way", true, true, "0.285", "0.33"),
        ours("Protocol 1 (controlled)", true, efficiency_for(1).expect("protocol 1 exists")),
        ours("Protocol 2 (two-party)", false, efficiency_for(2).expect("protocol 2 exists")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_figures_are_exact() {
        let p1 = efficiency_for(1).unwrap();
        assert_eq!(p1.eta1, 0.2);
        assert_eq!(p1.eta2, 0.5);
        let p2 = efficiency_for(2).unwrap();
        assert!((p2.eta1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p2.eta2, 1.0);
    }

    #[test]
    fn eta2_dominates_eta1() {
        for protocol in [1u8, 2] {
            let f = efficiency_for(protocol).unwrap();
            assert!(f.eta2 >= f.eta1);
        }
    }

    #[test]
    fn unknown_protocol_is_rejected() {
        assert!(efficiency_for(3).is_err());
    }

    #[test]
    fn table_has_six_reference_rows_and_two_simulated() {
        let table = comparison_table();
        assert_eq!(table.iter().filter(|r| r.reference_only).count(), 6);
        let ours: Vec<_> = table.iter().filter(|r| !r.reference_only).collect();
        assert_eq!(ours.len(), 2);
        assert!(ours.iter().all(|r| !r.quantum_memory));
        assert_eq!(ours[0].eta1, "0.20");
        assert_eq!(ours[0].eta2, "0.50");
        assert!(ours[0].third_party);
        assert!(!ours[1].third_party);
        assert_eq!(ours[1].eta1, "0.33");
        assert_eq!(ours[1].eta2, "1.00");
    }
}
