//! JSON and text reports for `roundtrip-check` and `eval`.

use geo2seq_core::metrics::MetricsReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub molecules: usize,
    pub failed: usize,
    pub atoms: usize,
    pub mean_error: f64,
    pub max_error: f64,
    /// Atoms whose aligned error exceeded Δ_d + d(Δ_θ + sinθ·Δ_φ).
    pub bound_violations: usize,
    pub decimals_dist: u32,
    pub decimals_angle: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub generated_total: usize,
    /// Generated items that decoded/parsed into molecules.
    pub generated_used: usize,
    pub decode_failures: usize,
    pub reference_total: usize,
    #[serde(flatten)]
    pub metrics: MetricsReport,
}

impl EvalReport {
    /// Two-column aligned table of the metric values.
    pub fn text_table(&self) -> String {
        let m = &self.metrics;
        let rows: [(&str, f64); 9] = [
            ("atom_stability", m.atom_stability),
            ("mol_stability", m.mol_stability),
            ("valid", m.valid),
            ("valid_unique", m.valid_unique),
            ("valid_unique_novel", m.valid_unique_novel),
            ("complete", m.complete),
            ("bond_length_mmd", m.bond_length_mmd),
            ("bond_angle_mmd", m.bond_angle_mmd),
            ("dihedral_mmd", m.dihedral_mmd),
        ];
        let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (name, value) in rows {
            out.push_str(&format!("{name:<width$}  {value:.4}\n"));
        }
        out.push_str(&format!(
            "{:<width$}  {} of {} ({} decode failures)\n",
            "generated_used", self.generated_used, self.generated_total, self.decode_failures
        ));
        out
    }
}
