//! T-state distillation factories built from 15-to-1 units.
//!
//! A factory is a sequence of rounds; every round runs `copies` identical
//! units in parallel and feeds its accepted outputs into the next round.
//! Footprint is the largest round (rounds reuse space), duration is the sum
//! of the round durations, and transfer between rounds is free.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::FactoryError;
use crate::qec::{self, QecCodeModel};
use crate::qubit::{InstructionSet, PhysicalQubitParams};
use crate::units::Nanos;

/// Inputs consumed and outputs produced by one 15-to-1 unit.
pub const UNIT_INPUTS: u64 = 15;
pub const UNIT_OUTPUTS: u64 = 1;

/// Required probability that a factory run yields its advertised outputs.
pub const OUTPUT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitKind {
    SpaceEfficient,
    RmPrep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitLevel {
    Physical,
    Logical,
}

impl UnitKind {
    /// Physical qubits of a physical unit, or tiles of a logical unit.
    pub fn footprint(self, level: UnitLevel) -> u64 {
        match (self, level) {
            (UnitKind::SpaceEfficient, UnitLevel::Physical) => 12,
            (UnitKind::SpaceEfficient, UnitLevel::Logical) => 20,
            (UnitKind::RmPrep, _) => 31,
        }
    }

    /// Physical measurement rounds of a physical unit, or logical time steps
    /// of a logical unit.
    pub fn steps(self, level: UnitLevel) -> u64 {
        match (self, level) {
            (UnitKind::SpaceEfficient, UnitLevel::Physical) => 46,
            (UnitKind::SpaceEfficient, UnitLevel::Logical) => 13,
            (UnitKind::RmPrep, UnitLevel::Physical) => 23,
            (UnitKind::RmPrep, UnitLevel::Logical) => 11,
        }
    }

    /// Lowest-order 15-to-1 output error and acceptance probability for
    /// input T error `q_in` and unit Clifford error `p_clifford`.
    pub fn output_error(self, q_in: f64, p_clifford: f64) -> Result<(f64, f64), FactoryError> {
        unit_output_error(q_in, p_clifford)
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitKind::SpaceEfficient => "15-to-1 space-efficient",
            UnitKind::RmPrep => "15-to-1 RM prep",
        })
    }
}

/// `Q_out = 35·Q_in³ + 7.1·P`, `P_acc = 1 − 15·Q_in − 356·P`.
pub fn unit_output_error(q_in: f64, p_clifford: f64) -> Result<(f64, f64), FactoryError> {
    let q_out = 35.0 * q_in.powi(3) + 7.1 * p_clifford;
    let acceptance = 1.0 - 15.0 * q_in - 356.0 * p_clifford;
    if !(acceptance > 0.0) {
        return Err(FactoryError::OutOfValidityRange {
            round: 0,
            acceptance,
        });
    }
    Ok((q_out, acceptance))
}

/// How many units a round needs so the next round gets enough inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provisioning {
    /// `ceil(needed / P_acc)`
    ExpectedYield,
    /// Smallest count whose binomial yield reaches `needed` with 99%
    /// probability.
    #[default]
    Binomial99,
}

impl Provisioning {
    pub fn required_copies(self, needed: u64, acceptance: f64) -> u64 {
        match self {
            Provisioning::ExpectedYield => (needed as f64 / acceptance).ceil() as u64,
            Provisioning::Binomial99 => {
                if needed == 0 {
                    return 0;
                }
                let ok = |n: u64| binomial_tail(n, needed, acceptance) >= OUTPUT_CONFIDENCE;
                let mut hi = ((needed as f64 / acceptance).ceil() as u64).max(needed);
                while !ok(hi) {
                    hi *= 2;
                }
                let mut lo = needed;
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if ok(mid) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
        }
    }
}

/// P(X >= k) for X ~ Binomial(n, p).
pub fn binomial_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    Binomial::new(p, n).map(|b| b.sf(k - 1)).unwrap_or(0.0)
}

/// T states a final round of `copies` units delivers in at least 99% of
/// runs: the largest m with P(at least m units accepted) >= 0.99.
pub fn reliable_outputs(copies: u64, acceptance: f64) -> u64 {
    (0..=copies)
        .rev()
        .find(|&m| binomial_tail(copies, m, acceptance) >= OUTPUT_CONFIDENCE)
        .unwrap_or(0)
        * UNIT_OUTPUTS
}

/// One round as written in factory JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundSpec {
    pub kind: UnitKind,
    pub level: UnitLevel,
    pub distance: Option<u32>,
    pub copies: u64,
}

/// A round together with its evaluated unit properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoryRound {
    #[serde(flatten)]
    pub spec: RoundSpec,
    /// physical qubits of one unit
    pub unit_qubits: u64,
    pub unit_duration: Nanos,
    /// p for physical units, P(d) for logical ones
    pub clifford_error: f64,
    pub input_error: f64,
    pub output_error: f64,
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TFactory {
    pub rounds: Vec<FactoryRound>,
    /// n(D) = max over rounds of copies·unit qubits
    pub qubits: u64,
    /// τ(D) = sum of round durations
    pub duration: Nanos,
    /// P_T(D), the error rate of the final round's outputs
    pub output_error: f64,
    /// M(D), T states delivered in at least 99% of runs
    pub output_states: u64,
}

impl TFactory {
    pub fn specs(&self) -> Vec<RoundSpec> {
        self.rounds.iter().map(|r| r.spec.clone()).collect()
    }

    pub fn describe(&self) -> String {
        self.rounds
            .iter()
            .map(|r| {
                let level = match r.spec.distance {
                    Some(d) => format!("d={d}"),
                    None => "physical".to_string(),
                };
                format!("{}x {} ({level})", r.spec.copies, r.spec.kind)
            })
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

#[derive(Clone)]
struct UnitProps {
    qubits: u64,
    duration: Nanos,
    clifford_error: f64,
}

fn unit_props(
    round: usize,
    kind: UnitKind,
    level: UnitLevel,
    distance: Option<u32>,
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
) -> Result<UnitProps, FactoryError> {
    let invalid = |reason: String| FactoryError::InvalidRound { round, reason };
    match (level, distance) {
        (UnitLevel::Physical, None) => {
            if qubit.instruction_set != InstructionSet::Majorana {
                return Err(invalid(
                    "physical distillation requires a Majorana instruction set".into(),
                ));
            }
            Ok(UnitProps {
                qubits: kind.footprint(level),
                duration: Nanos(kind.steps(level) * qubit.t_meas.as_ns()),
                clifford_error: qubit.p_clifford,
            })
        }
        (UnitLevel::Logical, Some(d)) => {
            let patch = qec::patch(code, qubit, d).map_err(|e| invalid(e.to_string()))?;
            Ok(UnitProps {
                qubits: kind.footprint(level) * patch.qubits,
                duration: Nanos(kind.steps(level) * patch.step_time.as_ns()),
                clifford_error: patch.error_rate,
            })
        }
        (UnitLevel::Physical, Some(_)) => Err(invalid("physical units take no distance".into())),
        (UnitLevel::Logical, None) => Err(invalid("logical units need a distance".into())),
    }
}

/// Per-round (props, input error, output error, acceptance).
type Evaluated = (UnitProps, f64, f64, f64);

type CandidateKey = (u128, u64, u64, Vec<(UnitLevel, u32, UnitKind, u64)>);

/// Runs the error recurrence over unit designs (copies ignored).
fn run_recurrence(
    designs: &[(UnitKind, UnitLevel, Option<u32>)],
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
) -> Result<Vec<Evaluated>, FactoryError> {
    if designs.is_empty() {
        return Err(FactoryError::Empty);
    }
    let mut out = Vec::with_capacity(designs.len());
    let mut q = qubit.p_t;
    let mut last_distance = 0;
    for (idx, &(kind, level, distance)) in designs.iter().enumerate() {
        let round = idx + 1;
        if level == UnitLevel::Physical && idx > 0 {
            return Err(FactoryError::InvalidRound {
                round,
                reason: "only the first round may be physical".into(),
            });
        }
        if let Some(d) = distance {
            if d < last_distance {
                return Err(FactoryError::InvalidRound {
                    round,
                    reason: format!("distance {d} shrinks from {last_distance}"),
                });
            }
            last_distance = d;
        }
        let props = unit_props(round, kind, level, distance, qubit, code)?;
        let (q_out, acceptance) =
            kind.output_error(q, props.clifford_error)
                .map_err(|e| match e {
                    FactoryError::OutOfValidityRange { acceptance, .. } => {
                        FactoryError::OutOfValidityRange { round, acceptance }
                    }
                    other => other,
                })?;
        out.push((props, q, q_out, acceptance));
        q = q_out;
    }
    if designs.last().map(|d| d.1) == Some(UnitLevel::Physical) {
        return Err(FactoryError::InvalidRound {
            round: designs.len(),
            reason: "the last round must produce encoded T states".into(),
        });
    }
    Ok(out)
}

fn assemble(specs: Vec<RoundSpec>, evaluated: Vec<Evaluated>) -> Result<TFactory, FactoryError> {
    let rounds: Vec<FactoryRound> = specs
        .into_iter()
        .zip(evaluated)
        .map(
            |(spec, (props, input_error, output_error, acceptance))| FactoryRound {
                spec,
                unit_qubits: props.qubits,
                unit_duration: props.duration,
                clifford_error: props.clifford_error,
                input_error,
                output_error,
                acceptance,
            },
        )
        .collect();
    let qubits = rounds
        .iter()
        .map(|r| r.spec.copies * r.unit_qubits)
        .max()
        .unwrap_or(0);
    let duration = Nanos(rounds.iter().map(|r| r.unit_duration.as_ns()).sum());
    let last = rounds.last().ok_or(FactoryError::Empty)?;
    let output_states = reliable_outputs(last.spec.copies, last.acceptance);
    if output_states == 0 {
        return Err(FactoryError::NoReliableOutput);
    }
    Ok(TFactory {
        output_error: last.output_error,
        rounds,
        qubits,
        duration,
        output_states,
    })
}

/// Evaluates a fully specified factory, checking that every round is
/// provisioned for the round after it.
pub fn evaluate_factory(
    rounds: &[RoundSpec],
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
    provisioning: Provisioning,
) -> Result<TFactory, FactoryError> {
    let designs: Vec<_> = rounds
        .iter()
        .map(|r| (r.kind, r.level, r.distance))
        .collect();
    let evaluated = run_recurrence(&designs, qubit, code)?;
    for (idx, r) in rounds.iter().enumerate() {
        if r.copies == 0 {
            return Err(FactoryError::InvalidRound {
                round: idx + 1,
                reason: "copies must be positive".into(),
            });
        }
        if let Some(next) = rounds.get(idx + 1) {
            let required =
                provisioning.required_copies(UNIT_INPUTS * next.copies, evaluated[idx].3);
            if r.copies < required {
                return Err(FactoryError::UnderProvisioned {
                    round: idx + 1,
                    copies: r.copies,
                    required,
                });
            }
        }
    }
    assemble(rounds.to_vec(), evaluated)
}

/// Builds a factory from unit designs, provisioning each round for the next
/// so that the final round runs `final_copies` units.
pub fn provision_factory(
    designs: &[(UnitKind, UnitLevel, Option<u32>)],
    final_copies: u64,
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
    provisioning: Provisioning,
) -> Result<TFactory, FactoryError> {
    let evaluated = run_recurrence(designs, qubit, code)?;
    provision_evaluated(designs, evaluated, final_copies, provisioning)
}

fn provision_evaluated(
    designs: &[(UnitKind, UnitLevel, Option<u32>)],
    evaluated: Vec<Evaluated>,
    final_copies: u64,
    provisioning: Provisioning,
) -> Result<TFactory, FactoryError> {
    let mut copies = vec![0u64; designs.len()];
    let last = designs.len() - 1;
    copies[last] = final_copies.max(1);
    for r in (0..last).rev() {
        copies[r] = provisioning.required_copies(UNIT_INPUTS * copies[r + 1], evaluated[r].3);
    }
    let specs = designs
        .iter()
        .zip(&copies)
        .map(|(&(kind, level, distance), &c)| RoundSpec {
            kind,
            level,
            distance,
            copies: c,
        })
        .collect();
    assemble(specs, evaluated)
}

/// Bounds of the enumerated factory design space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorySearch {
    pub max_rounds: usize,
    pub min_distance: u32,
    pub max_distance: u32,
    pub max_final_copies: u64,
    pub provisioning: Provisioning,
}

impl Default for FactorySearch {
    fn default() -> Self {
        FactorySearch {
            max_rounds: 3,
            min_distance: 3,
            max_distance: qec::DEFAULT_MAX_DISTANCE,
            max_final_copies: 2,
            provisioning: Provisioning::default(),
        }
    }
}

type Design = Vec<(UnitKind, UnitLevel, Option<u32>)>;

impl FactorySearch {
    /// Every unit sequence in the search space, in canonical order.
    pub fn designs(&self, instruction_set: InstructionSet) -> Vec<Design> {
        let lo = self.min_distance.max(qec::MIN_DISTANCE) | 1;
        let distances: Vec<u32> = (lo..=self.max_distance).step_by(2).collect();
        let kinds = [UnitKind::SpaceEfficient, UnitKind::RmPrep];
        let mut out = Vec::new();
        let mut stack: Vec<(Design, u32)> = vec![(Vec::new(), 0)];
        if instruction_set == InstructionSet::Majorana {
            for kind in kinds {
                stack.push((vec![(kind, UnitLevel::Physical, None)], 0));
            }
        }
        while let Some((prefix, min_d)) = stack.pop() {
            if prefix.last().is_some_and(|r| r.1 == UnitLevel::Logical) {
                out.push(prefix.clone());
            }
            if prefix.len() >= self.max_rounds {
                continue;
            }
            for &d in distances.iter().filter(|&&d| d >= min_d) {
                for kind in kinds {
                    let mut next = prefix.clone();
                    next.push((kind, UnitLevel::Logical, Some(d)));
                    stack.push((next, d));
                }
            }
        }
        out.sort();
        out
    }
}

/// Key ordering candidates: space-time footprint, then qubits, then duration,
/// then the canonical order of the round specs.
fn candidate_key(f: &TFactory) -> CandidateKey {
    (
        f.qubits as u128 * f.duration.as_ns() as u128,
        f.qubits,
        f.duration.as_ns(),
        f.rounds
            .iter()
            .map(|r| {
                (
                    r.spec.level,
                    r.spec.distance.unwrap_or(0),
                    r.spec.kind,
                    r.spec.copies,
                )
            })
            .collect(),
    )
}

fn compare(a: &TFactory, b: &TFactory) -> Ordering {
    candidate_key(a).cmp(&candidate_key(b))
}

/// The factory with the smallest n(D)·τ(D) among those with P_T(D) <=
/// `target` and M(D) >= 1.
///
/// Output errors do not depend on copy counts, so designs are screened on
/// error first. Every round needs at least 15 times the copies of the round
/// after it, which bounds n(D) from below; candidates are provisioned in
/// order of that bound until it exceeds the best footprint found.
pub fn search_factory(
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
    target: f64,
    search: &FactorySearch,
) -> Result<TFactory, FactoryError> {
    if !(target > 0.0) {
        return Err(FactoryError::InvalidTarget(target));
    }
    let designs = search.designs(qubit.instruction_set);
    let screened: Vec<(usize, Vec<Evaluated>)> = designs
        .par_iter()
        .enumerate()
        .filter_map(|(i, design)| run_recurrence(design, qubit, code).ok().map(|ev| (i, ev)))
        .collect();

    let mut candidates: Vec<(u128, usize, u64)> = Vec::new();
    for (slot, (_, ev)) in screened.iter().enumerate() {
        if ev.last().is_none_or(|r| r.2 > target) {
            continue;
        }
        let duration: u128 = ev.iter().map(|r| r.0.duration.as_ns() as u128).sum();
        for c in 1..=search.max_final_copies.max(1) {
            let mut per_unit = c as u128;
            let mut lower = 0u128;
            for r in ev.iter().rev() {
                lower = lower.max(per_unit.saturating_mul(r.0.qubits as u128));
                per_unit = per_unit.saturating_mul(UNIT_INPUTS as u128);
            }
            candidates.push((lower.saturating_mul(duration), slot, c));
        }
    }
    candidates.sort_unstable();

    let mut best: Option<TFactory> = None;
    for &(bound, slot, c) in &candidates {
        let best_area = best
            .as_ref()
            .map(|f| f.qubits as u128 * f.duration.as_ns() as u128);
        if best_area.is_some_and(|a| bound > a) {
            break;
        }
        let (idx, ev) = &screened[slot];
        let Ok(f) = provision_evaluated(&designs[*idx], ev.clone(), c, search.provisioning) else {
            continue;
        };
        if f.output_error <= target
            && f.output_states >= 1
            && best
                .as_ref()
                .is_none_or(|b| compare(&f, b) == Ordering::Less)
        {
            best = Some(f);
        }
    }

    best.ok_or_else(|| {
        let best = screened
            .iter()
            .min_by(|a, b| a.1.last().unwrap().2.total_cmp(&b.1.last().unwrap().2))
            .map(|(idx, ev)| {
                let steps = designs[*idx]
                    .iter()
                    .map(|(kind, _, d)| match d {
                        Some(d) => format!("{kind} (d={d})"),
                        None => format!("{kind} (physical)"),
                    })
                    .collect::<Vec<_>>()
                    .join(" -> ");
                format!("{:e} with {steps}", ev.last().unwrap().2)
            })
            .unwrap_or_else(|| "no valid factory in the search space".into());
        FactoryError::NoFactoryReachesTarget { target, best }
    })
}
