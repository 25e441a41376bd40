//! Parallel Synthesis Sequential Pauli Computation counting: algorithm-level
//! counts in, ISA-level requirements (tiles, logical depth, T states, error
//! targets) out.

use serde::{Deserialize, Serialize};

use crate::error::CountsError;

/// Serde helper for counts that may be written as `1.35e11` in JSON.
pub mod count {
    use serde::de::{self, Deserializer, Visitor};
    use std::fmt;

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<u64, D::Error> {
        struct CountVisitor;
        impl Visitor<'_> for CountVisitor {
            type Value = u64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative whole number")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<u64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<u64, E> {
                u64::try_from(v).map_err(|_| E::custom(format!("count {v} is negative")))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<u64, E> {
                if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
                    Ok(v as u64)
                } else {
                    Err(E::custom(format!(
                        "count {v} is not a non-negative whole number"
                    )))
                }
            }
        }
        deserializer.deserialize_any(CountVisitor)
    }

    pub mod option {
        use super::*;
        use serde::Deserialize;

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<u64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(deserialize_with = "super::deserialize")] u64);
            Ok(Option::<Wrap>::deserialize(deserializer)?.map(|w| w.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmCounts {
    /// algorithm logical qubits
    #[serde(rename = "Q_alg", deserialize_with = "count::deserialize")]
    pub qubits: u64,
    /// Pauli measurements
    #[serde(rename = "M_meas", deserialize_with = "count::deserialize")]
    pub measurements: u64,
    /// arbitrary-angle single-qubit rotations
    #[serde(rename = "M_R", deserialize_with = "count::deserialize")]
    pub rotations: u64,
    #[serde(rename = "M_T", deserialize_with = "count::deserialize")]
    pub t_gates: u64,
    #[serde(rename = "M_Tof", deserialize_with = "count::deserialize")]
    pub toffolis: u64,
    /// non-Clifford layers containing at least one rotation
    #[serde(rename = "D_R", deserialize_with = "count::deserialize")]
    pub rotation_depth: u64,
    pub epsilon: f64,
}

impl AlgorithmCounts {
    pub fn validate(&self) -> Result<(), CountsError> {
        if self.qubits == 0 {
            return Err(CountsError::InvalidCounts(
                "Q_alg must be at least 1".into(),
            ));
        }
        if self.rotation_depth > self.rotations {
            return Err(CountsError::InvalidCounts(format!(
                "D_R = {} exceeds M_R = {}",
                self.rotation_depth, self.rotations
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CountsError::InvalidCounts(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Rotation synthesis cost `R_T(ε') = ceil(A·log2(1/ε') + B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisModel {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl Default for SynthesisModel {
    fn default() -> Self {
        SynthesisModel { a: 0.53, b: 5.3 }
    }
}

impl SynthesisModel {
    pub fn validate(self) -> Result<Self, CountsError> {
        if !(self.a > 0.0 && self.b >= 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(CountsError::InvalidSynthesisModel(format!(
                "need A > 0 and B >= 0, got A = {}, B = {}",
                self.a, self.b
            )));
        }
        Ok(self)
    }
}

pub fn rotation_t_count(model: &SynthesisModel, eps_prime: f64) -> Result<u64, CountsError> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(CountsError::InvalidSynthesisAccuracy(eps_prime));
    }
    Ok((model.a * (1.0 / eps_prime).log2() + model.b).ceil() as u64)
}

/// Fractions of ε given to logical errors, distillation and synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSplit {
    pub logical: f64,
    pub distillation: f64,
    pub synthesis: f64,
}

impl Default for BudgetSplit {
    fn default() -> Self {
        BudgetSplit {
            logical: 1.0 / 3.0,
            distillation: 1.0 / 3.0,
            synthesis: 1.0 / 3.0,
        }
    }
}

/// Absolute shares of the total error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    #[serde(rename = "eps_log")]
    pub logical: f64,
    #[serde(rename = "eps_dis")]
    pub distillation: f64,
    #[serde(rename = "eps_syn")]
    pub synthesis: f64,
}

impl ErrorBudget {
    pub fn from_split(epsilon: f64, split: BudgetSplit) -> Result<Self, CountsError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(CountsError::InvalidBudget(format!(
                "epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        let budget = ErrorBudget {
            logical: epsilon * split.logical,
            distillation: epsilon * split.distillation,
            synthesis: epsilon * split.synthesis,
        };
        budget.check(epsilon)?;
        Ok(budget)
    }

    pub fn total(&self) -> f64 {
        self.logical + self.distillation + self.synthesis
    }

    /// Every share positive and the sum within `epsilon` (up to rounding
    /// of the fractions themselves).
    pub fn check(&self, epsilon: f64) -> Result<(), CountsError> {
        for (share, value) in [
            ("eps_log", self.logical),
            ("eps_dis", self.distillation),
            ("eps_syn", self.synthesis),
        ] {
            if !(value > 0.0) {
                return Err(CountsError::NonPositiveShare { share, value });
            }
        }
        let sum = self.total();
        if sum > epsilon * (1.0 + 1e-12) {
            return Err(CountsError::BudgetExhausted { sum, epsilon });
        }
        Ok(())
    }
}

/// ISA-level executable parameters and quality requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalRequirements {
    /// Q, tiles including routing ancillas
    #[serde(rename = "Q")]
    pub logical_qubits: u64,
    #[serde(rename = "C_min")]
    pub min_logical_steps: u64,
    /// M, T states consumed
    #[serde(rename = "M")]
    pub t_states: u64,
    #[serde(flatten)]
    pub budget: ErrorBudget,
    /// eps_dis / M; absent when no T states are needed
    #[serde(rename = "P_T_max")]
    pub t_error_max: Option<f64>,
}

impl LogicalRequirements {
    pub fn new(
        logical_qubits: u64,
        min_logical_steps: u64,
        t_states: u64,
        budget: ErrorBudget,
    ) -> Self {
        let t_error_max = (t_states > 0).then(|| budget.distillation / t_states as f64);
        LogicalRequirements {
            logical_qubits,
            min_logical_steps,
            t_states,
            budget,
            t_error_max,
        }
    }

    /// Max per-tile per-step logical error when running `steps` steps.
    pub fn logical_error_max(&self, steps: u64) -> f64 {
        self.budget.logical / (self.logical_qubits as f64 * steps as f64)
    }
}

/// Tiles of the PSSPC fast block layout: `2·Q_alg + ceil(sqrt(8·Q_alg)) + 1`.
pub fn layout_qubits(algorithm_qubits: u64) -> u64 {
    2 * algorithm_qubits + ceil_sqrt(8 * algorithm_qubits) + 1
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

pub fn logical_counts(
    counts: &AlgorithmCounts,
    model: &SynthesisModel,
    budget: &ErrorBudget,
) -> Result<LogicalRequirements, CountsError> {
    counts.validate()?;
    budget.check(counts.epsilon)?;
    let rotation_ts = if counts.rotations == 0 {
        0
    } else {
        rotation_t_count(model, budget.synthesis / counts.rotations as f64)?
    };
    let overflow = || CountsError::InvalidCounts("counts overflow 64 bits".into());
    let mul = |a: u64, b: u64| a.checked_mul(b).ok_or_else(overflow);
    let sum = |xs: &[u64]| {
        xs.iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or_else(overflow)
    };

    let min_steps = sum(&[
        counts.measurements,
        counts.rotations,
        counts.t_gates,
        mul(rotation_ts, counts.rotation_depth)?,
        mul(3, counts.toffolis)?,
    ])?;
    let t_states = sum(&[
        mul(rotation_ts, counts.rotations)?,
        mul(4, counts.toffolis)?,
        counts.t_gates,
    ])?;
    Ok(LogicalRequirements::new(
        layout_qubits(counts.qubits),
        min_steps,
        t_states,
        *budget,
    ))
}

/// Counts for fourth-order Trotter evolution of the 2D transverse-field
/// Ising model on a `sqrt(N) x sqrt(N)` lattice for `T` steps.
pub fn ising_counts(
    sites: u64,
    steps: u64,
    measurements: Option<u64>,
    epsilon: f64,
) -> Result<AlgorithmCounts, CountsError> {
    let side = sites.isqrt();
    if sites < 4 || side * side != sites {
        return Err(CountsError::NonSquareLattice(sites));
    }
    if steps == 0 {
        return Err(CountsError::InvalidTrotterSteps(steps));
    }
    let counts = AlgorithmCounts {
        qubits: sites,
        // default to a final readout of every site
        measurements: measurements.unwrap_or(sites),
        rotations: (15 * steps + 1) * sites,
        t_gates: 0,
        toffolis: 0,
        rotation_depth: 25 * steps + 1,
        epsilon,
    };
    counts.validate()?;
    Ok(counts)
}
