//! QEC code families: logical error rate, tile size and logical time step as
//! functions of the code distance, and the distance/code selection on top.

use serde::{Deserialize, Serialize};

use crate::error::QecError;
use crate::qubit::{InstructionSet, PhysicalQubitParams};
use crate::units::Nanos;

pub const MIN_DISTANCE: u32 = 3;
pub const DEFAULT_MAX_DISTANCE: u32 = 51;

/// Physical qubits per tile, `d2·d² + d1·d + d0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileQubits {
    pub d2: i64,
    #[serde(default)]
    pub d1: i64,
    #[serde(default)]
    pub d0: i64,
}

/// Logical time step, `(t_gate·gates + t_meas·measurements)·d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepTime {
    #[serde(default)]
    pub t_gate: u64,
    #[serde(default)]
    pub t_meas: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecCodeModel {
    pub name: String,
    pub instruction_set: InstructionSet,
    pub prefactor_a: f64,
    pub threshold_pstar: f64,
    pub qubits_per_tile: TileQubits,
    pub timestep: StepTime,
}

impl QecCodeModel {
    pub fn surface_gate() -> Self {
        QecCodeModel {
            name: "surface-gate".into(),
            instruction_set: InstructionSet::GateBased,
            prefactor_a: 0.03,
            threshold_pstar: 0.01,
            qubits_per_tile: TileQubits {
                d2: 2,
                d1: 0,
                d0: 0,
            },
            timestep: StepTime {
                t_gate: 4,
                t_meas: 2,
            },
        }
    }

    pub fn surface_meas() -> Self {
        QecCodeModel {
            name: "surface-meas".into(),
            instruction_set: InstructionSet::Majorana,
            prefactor_a: 0.08,
            threshold_pstar: 0.0015,
            qubits_per_tile: TileQubits {
                d2: 2,
                d1: 0,
                d0: 0,
            },
            timestep: StepTime {
                t_gate: 0,
                t_meas: 20,
            },
        }
    }

    pub fn hastings_haah() -> Self {
        QecCodeModel {
            name: "hastings-haah".into(),
            instruction_set: InstructionSet::Majorana,
            prefactor_a: 0.07,
            threshold_pstar: 0.01,
            qubits_per_tile: TileQubits {
                d2: 4,
                d1: 8,
                d0: -8,
            },
            timestep: StepTime {
                t_gate: 0,
                t_meas: 3,
            },
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "surface-gate" => Some(Self::surface_gate()),
            "surface-meas" => Some(Self::surface_meas()),
            "hastings-haah" => Some(Self::hastings_haah()),
            _ => None,
        }
    }

    /// Checks the model constants and that n(d) grows with d from d = 3 on.
    pub fn validate(self) -> Result<Self, QecError> {
        let invalid = |reason: &str| QecError::InvalidModel {
            code: self.name.clone(),
            reason: reason.to_string(),
        };
        if !(self.prefactor_a > 0.0 && self.prefactor_a.is_finite()) {
            return Err(invalid("prefactor_a must be positive"));
        }
        if !(self.threshold_pstar > 0.0 && self.threshold_pstar < 1.0) {
            return Err(invalid("threshold_pstar must lie in (0, 1)"));
        }
        let TileQubits { d2, d1, .. } = self.qubits_per_tile;
        // n(d+2) - n(d) = d2·(4d + 4) + 2·d1 must stay positive for d >= 3
        if d2 < 0 || 16 * d2 + 2 * d1 <= 0 || self.raw_qubits(MIN_DISTANCE) <= 0 {
            return Err(invalid(
                "qubits_per_tile must be positive and increasing in d",
            ));
        }
        if self.timestep.t_gate == 0 && self.timestep.t_meas == 0 {
            return Err(invalid("timestep must have a positive coefficient"));
        }
        Ok(self)
    }

    fn raw_qubits(&self, d: u32) -> i64 {
        let d = d as i64;
        let TileQubits { d2, d1, d0 } = self.qubits_per_tile;
        d2 * d * d + d1 * d + d0
    }

    /// n(d), physical qubits in one tile.
    pub fn qubits(&self, d: u32) -> u64 {
        self.raw_qubits(d).max(0) as u64
    }

    /// τ(d), the duration of one logical time step.
    pub fn step_time(&self, qubit: &PhysicalQubitParams, d: u32) -> Nanos {
        let per_round = self.timestep.t_gate * qubit.gate_time().as_ns()
            + self.timestep.t_meas * qubit.t_meas.as_ns();
        Nanos(per_round * d as u64)
    }

    pub fn is_compatible(&self, qubit: &PhysicalQubitParams) -> bool {
        self.instruction_set == qubit.instruction_set
    }

    fn check_below_threshold(&self, p: f64) -> Result<(), QecError> {
        if p >= self.threshold_pstar {
            return Err(QecError::AboveThreshold {
                code: self.name.clone(),
                p,
                threshold: self.threshold_pstar,
            });
        }
        Ok(())
    }
}

/// The built-in code families in selection tie-break order.
pub fn builtin_codes() -> Vec<QecCodeModel> {
    vec![
        QecCodeModel::surface_gate(),
        QecCodeModel::surface_meas(),
        QecCodeModel::hastings_haah(),
    ]
}

/// P(d) = a·(p/p*)^((d+1)/2).
///
/// At p = p* this is exactly `a`; only p > p* is rejected here. Distance
/// selection rejects p >= p* since no distance suppresses errors there.
pub fn logical_error_rate(code: &QecCodeModel, p: f64, d: u32) -> Result<f64, QecError> {
    if p > code.threshold_pstar {
        return Err(QecError::AboveThreshold {
            code: code.name.clone(),
            p,
            threshold: code.threshold_pstar,
        });
    }
    Ok(error_rate_unchecked(code, p, d))
}

fn error_rate_unchecked(code: &QecCodeModel, p: f64, d: u32) -> f64 {
    code.prefactor_a * (p / code.threshold_pstar).powf((d as f64 + 1.0) / 2.0)
}

/// A code patch at a fixed distance, evaluated for one qubit model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalPatch {
    pub code: String,
    pub distance: u32,
    /// n(d)
    pub qubits: u64,
    /// τ(d)
    pub step_time: Nanos,
    /// P(d), per tile per logical time step
    pub error_rate: f64,
}

impl LogicalPatch {
    /// Failure probability of an operation spanning `steps` logical time
    /// steps and `tiles` tiles.
    pub fn operation_failure(&self, steps: u64, tiles: u64) -> f64 {
        steps as f64 * tiles as f64 * self.error_rate
    }
}

pub fn patch(
    code: &QecCodeModel,
    qubit: &PhysicalQubitParams,
    d: u32,
) -> Result<LogicalPatch, QecError> {
    if !code.is_compatible(qubit) {
        return Err(QecError::IncompatibleInstructionSet {
            code: code.name.clone(),
            instruction_set: qubit.instruction_set.to_string(),
        });
    }
    if d < MIN_DISTANCE || d.is_multiple_of(2) {
        return Err(QecError::InvalidDistance(d));
    }
    Ok(LogicalPatch {
        code: code.name.clone(),
        distance: d,
        qubits: code.qubits(d),
        step_time: code.step_time(qubit, d),
        error_rate: logical_error_rate(code, qubit.p_clifford, d)?,
    })
}

/// Smallest odd integer >= x.
pub fn ceil_to_odd(x: f64) -> i64 {
    let c = x.ceil() as i64;
    if c % 2 == 0 {
        c + 1
    } else {
        c
    }
}

/// Smallest odd d >= 3 with P(d) <= `target`.
pub fn required_distance(
    code: &QecCodeModel,
    qubit: &PhysicalQubitParams,
    target: f64,
    max_distance: u32,
) -> Result<u32, QecError> {
    if !(target > 0.0) {
        return Err(QecError::InvalidTarget(target));
    }
    let p = qubit.p_clifford;
    code.check_below_threshold(p)?;
    let cap_err = || QecError::DistanceCapExceeded {
        code: code.name.clone(),
        cap: max_distance,
        target,
    };

    // closed form d = 2·ln(a/P)/ln(p*/p) - 1, then nudged so the result is
    // exactly minimal under floating evaluation of P(d)
    let estimate = 2.0 * (code.prefactor_a / target).ln() / (code.threshold_pstar / p).ln() - 1.0;
    let d = ceil_to_odd(estimate).max(MIN_DISTANCE as i64);
    if d > max_distance as i64 + 2 {
        return Err(cap_err());
    }
    let mut d = d as u32;
    while d > MIN_DISTANCE && error_rate_unchecked(code, p, d - 2) <= target {
        d -= 2;
    }
    while error_rate_unchecked(code, p, d) > target {
        d += 2;
        if d > max_distance {
            return Err(cap_err());
        }
    }
    if d > max_distance {
        return Err(cap_err());
    }
    Ok(d)
}

/// Among compatible codes, the patch meeting `target` with the smallest
/// n(d)·τ(d); ties go to the smaller n(d), then to the earlier code.
pub fn select_code(
    qubit: &PhysicalQubitParams,
    target: f64,
    codes: &[QecCodeModel],
    max_distance: u32,
) -> Result<(QecCodeModel, LogicalPatch), QecError> {
    let mut best: Option<((u128, u64, usize), QecCodeModel, LogicalPatch)> = None;
    let mut failures = Vec::new();
    for (idx, code) in codes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_compatible(qubit))
    {
        if qubit.p_clifford > code.threshold_pstar / 10.0 && qubit.p_clifford < code.threshold_pstar
        {
            log::warn!(
                "p = {} is within a factor of ten of the {} threshold {}; estimates may be unreliable",
                qubit.p_clifford,
                code.name,
                code.threshold_pstar
            );
        }
        match required_distance(code, qubit, target, max_distance)
            .and_then(|d| patch(code, qubit, d))
        {
            Ok(p) => {
                let key = (
                    p.qubits as u128 * p.step_time.as_ns() as u128,
                    p.qubits,
                    idx,
                );
                if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                    best = Some((key, code.clone(), p));
                }
            }
            Err(e) => failures.push(e),
        }
    }
    match best {
        Some((_, code, p)) => Ok((code, p)),
        None if failures.len() == 1 => Err(failures.pop().unwrap()),
        None => {
            let mut reasons: Vec<String> = failures.iter().map(|e| e.to_string()).collect();
            if reasons.is_empty() {
                reasons.push(format!(
                    "no code supports the {} instruction set",
                    qubit.instruction_set
                ));
            }
            Err(QecError::NoFeasibleCode { target, reasons })
        }
    }
}
