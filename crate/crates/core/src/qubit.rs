//! Physical qubit parameter sets and the six reference presets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::QubitError;
use crate::units::{time_value, Nanos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstructionSet {
    /// CNOT/CZ entangling gates and single-qubit measurements.
    GateBased,
    /// Non-destructive two-qubit Pauli measurements.
    Majorana,
}

impl fmt::Display for InstructionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstructionSet::GateBased => "gate-based",
            InstructionSet::Majorana => "majorana",
        })
    }
}

/// Operation times and error rates of one physical qubit technology.
///
/// A single Clifford error rate `p_clifford` applies to every Clifford
/// operation, idling included; `p_t` is the error rate of physical T-state
/// preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalQubitParams {
    pub name: String,
    pub instruction_set: InstructionSet,
    #[serde(
        default,
        with = "time_value::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub t_gate: Option<Nanos>,
    #[serde(with = "time_value")]
    pub t_meas: Nanos,
    pub p_clifford: f64,
    pub p_t: f64,
}

pub const PRESET_NAMES: [&str; 6] = ["us-e3", "us-e4", "ns-e3", "ns-e4", "maj-ns-e4", "maj-ns-e6"];

impl PhysicalQubitParams {
    /// Checks the parameter invariants, returning the params unchanged.
    pub fn validate(self) -> Result<Self, QubitError> {
        for (field, value) in [("p_clifford", self.p_clifford), ("p_t", self.p_t)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(QubitError::ProbabilityOutOfRange { field, value });
            }
        }
        if self.t_meas.is_zero() {
            return Err(QubitError::NonPositiveDuration { field: "t_meas" });
        }
        match (self.instruction_set, self.t_gate) {
            (InstructionSet::GateBased, None) => return Err(QubitError::MissingGateTime),
            (_, Some(t)) if t.is_zero() => {
                return Err(QubitError::NonPositiveDuration { field: "t_gate" })
            }
            _ => {}
        }
        Ok(self)
    }

    /// Gate time, or zero when the instruction set has no gates.
    pub fn gate_time(&self) -> Nanos {
        self.t_gate.unwrap_or(Nanos::ZERO)
    }
}

fn gate_based(name: &str, t_gate: Nanos, t_meas: Nanos, p: f64, p_t: f64) -> PhysicalQubitParams {
    PhysicalQubitParams {
        name: name.to_string(),
        instruction_set: InstructionSet::GateBased,
        t_gate: Some(t_gate),
        t_meas,
        p_clifford: p,
        p_t,
    }
}

fn majorana(name: &str, t_meas: Nanos, p: f64, p_t: f64) -> PhysicalQubitParams {
    PhysicalQubitParams {
        name: name.to_string(),
        instruction_set: InstructionSet::Majorana,
        // the physical T gate takes as long as a measurement
        t_gate: Some(t_meas),
        t_meas,
        p_clifford: p,
        p_t,
    }
}

/// Looks up one of the reference parameter sets by identifier.
pub fn preset(name: &str) -> Result<PhysicalQubitParams, QubitError> {
    let params = match name {
        "us-e3" => gate_based(name, Nanos::from_us(100), Nanos::from_us(100), 1e-3, 1e-6),
        "us-e4" => gate_based(name, Nanos::from_us(100), Nanos::from_us(100), 1e-4, 1e-6),
        "ns-e3" => gate_based(name, Nanos::from_ns(50), Nanos::from_ns(100), 1e-3, 1e-3),
        "ns-e4" => gate_based(name, Nanos::from_ns(50), Nanos::from_ns(100), 1e-4, 1e-4),
        "maj-ns-e4" => majorana(name, Nanos::from_ns(100), 1e-4, 0.05),
        "maj-ns-e6" => majorana(name, Nanos::from_ns(100), 1e-6, 0.01),
        _ => {
            return Err(QubitError::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.to_vec(),
            })
        }
    };
    Ok(params)
}

pub fn presets() -> Vec<PhysicalQubitParams> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n).expect("preset table is complete"))
        .collect()
}
