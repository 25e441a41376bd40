//! Reference applications: algorithm counts where known, plus reference
//! ISA-level requirements.

use serde::{Deserialize, Serialize};

use crate::error::CountsError;
use crate::psspc::{
    count, ising_counts, logical_counts, AlgorithmCounts, BudgetSplit, ErrorBudget,
    LogicalRequirements, SynthesisModel,
};

pub const APP_NAMES: [&str; 3] = ["dynamics", "chemistry", "factoring"];

/// ISA-level requirements given directly rather than derived from counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredRequirements {
    #[serde(rename = "Q", deserialize_with = "count::deserialize")]
    pub logical_qubits: u64,
    #[serde(rename = "C_min", deserialize_with = "count::deserialize")]
    pub min_logical_steps: u64,
    #[serde(rename = "M", deserialize_with = "count::deserialize")]
    pub t_states: u64,
    pub epsilon: f64,
}

impl StoredRequirements {
    pub fn resolve(&self, split: BudgetSplit) -> Result<LogicalRequirements, CountsError> {
        if self.logical_qubits == 0 || self.min_logical_steps == 0 {
            return Err(CountsError::InvalidCounts(
                "Q and C_min must be at least 1".into(),
            ));
        }
        let budget = ErrorBudget::from_split(self.epsilon, split)?;
        Ok(LogicalRequirements::new(
            self.logical_qubits,
            self.min_logical_steps,
            self.t_states,
            budget,
        ))
    }
}

/// Which description of a preset feeds the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequirementSource {
    /// counts through the PSSPC formulas when the preset has counts
    #[default]
    Counts,
    Stored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub counts: Option<AlgorithmCounts>,
    pub stored: StoredRequirements,
    /// provenance notes attached to every report using the preset
    pub notes: Vec<&'static str>,
}

impl AppPreset {
    pub fn requirements(
        &self,
        source: RequirementSource,
        model: &SynthesisModel,
        split: BudgetSplit,
    ) -> Result<LogicalRequirements, CountsError> {
        match (&self.counts, source) {
            (Some(counts), RequirementSource::Counts) => {
                let budget = ErrorBudget::from_split(counts.epsilon, split)?;
                logical_counts(counts, model, &budget)
            }
            _ => self.stored.resolve(split),
        }
    }
}

pub fn app_preset(name: &str) -> Result<AppPreset, CountsError> {
    let preset = match name {
        "dynamics" => AppPreset {
            name: "dynamics",
            description:
                "2D transverse-field Ising model, 10x10 lattice, 20 fourth-order Trotter steps",
            counts: None,
            stored: StoredRequirements {
                logical_qubits: 230,
                min_logical_steps: 150_000,
                t_states: 2_400_000,
                epsilon: 1e-3,
            },
            notes: vec![
                "dynamics: the reference ISA-level requirements are used as stored; the Ising \
                 generator with N=100, T=20 gives different C_min and M, so it is not used here",
            ],
        },
        "chemistry" => AppPreset {
            name: "chemistry",
            description:
                "ruthenium carbon-fixation catalyst energy, double-factorized qubitization",
            counts: Some(AlgorithmCounts {
                qubits: 1318,
                measurements: 1_370_000_000,
                rotations: 206_000_000,
                t_gates: 55_300_000,
                toffolis: 135_000_000_000,
                rotation_depth: 205_000_000,
                epsilon: 0.01,
            }),
            stored: StoredRequirements {
                logical_qubits: 2740,
                min_logical_steps: 410_000_000_000,
                t_states: 544_000_000_000,
                epsilon: 0.01,
            },
            notes: vec![],
        },
        "factoring" => AppPreset {
            name: "factoring",
            description: "2048-bit integer factoring, windowed Shor",
            counts: Some(AlgorithmCounts {
                qubits: 12581,
                measurements: 1_080_000_000,
                rotations: 12,
                t_gates: 12,
                toffolis: 3_730_000_000,
                rotation_depth: 12,
                epsilon: 1.0 / 3.0,
            }),
            stored: StoredRequirements {
                logical_qubits: 25481,
                min_logical_steps: 12_300_000_000,
                t_states: 14_900_000_000,
                epsilon: 1.0 / 3.0,
            },
            notes: vec![
                "factoring: M_Tof = 3.73e9 is a corrected value; the reference count of 3.73e10 \
                 is inconsistent with the reference C_min = 1.23e10 and M = 1.49e10",
            ],
        },
        _ => {
            return Err(CountsError::UnknownPreset {
                name: name.to_string(),
                valid: APP_NAMES.to_vec(),
            })
        }
    };
    Ok(preset)
}

pub fn app_presets() -> Vec<AppPreset> {
    APP_NAMES
        .iter()
        .map(|n| app_preset(n).expect("app table is complete"))
        .collect()
}

/// Ising generator parameters as written in job files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingParams {
    #[serde(rename = "N")]
    pub sites: u64,
    #[serde(rename = "T")]
    pub steps: u64,
    #[serde(
        default,
        rename = "M_meas_override",
        deserialize_with = "count::option::deserialize",
        skip_serializing_if = "Option::is_none"
    )]
    pub measurements: Option<u64>,
    #[serde(default = "default_ising_epsilon")]
    pub epsilon: f64,
}

fn default_ising_epsilon() -> f64 {
    1e-3
}

impl IsingParams {
    pub fn counts(&self) -> Result<AlgorithmCounts, CountsError> {
        ising_counts(self.sites, self.steps, self.measurements, self.epsilon)
    }
}
