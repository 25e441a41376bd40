//! End-to-end physical estimates and the space-time frontier.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EstimateError;
use crate::factory::{search_factory, FactorySearch, TFactory};
use crate::psspc::LogicalRequirements;
use crate::qec::{builtin_codes, select_code, QecCodeModel, DEFAULT_MAX_DISTANCE};
use crate::qubit::PhysicalQubitParams;
use crate::units::Nanos;

const MAX_PASSES: usize = 5;

/// How F relates to the factory's output accounting, surfaced in results.
pub const F_ACCOUNTING: &str = "per-final-round-99pct";

/// Rational multiplier on C_min, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CFactor {
    num: u64,
    den: u64,
}

impl CFactor {
    pub const ONE: CFactor = CFactor { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, EstimateError> {
        if den == 0 || num < den {
            return Err(EstimateError::InvalidCFactor(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(CFactor {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(k: u64) -> Result<Self, EstimateError> {
        CFactor::new(k, 1)
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn denom(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ceil(self · x)
    pub fn apply(self, x: u64) -> Option<u64> {
        let scaled = x as u128 * self.num as u128;
        u64::try_from(scaled.div_ceil(self.den as u128)).ok()
    }
}

impl Default for CFactor {
    fn default() -> Self {
        CFactor::ONE
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for CFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parses `10`, `3/2` or a terminating decimal such as `1.25`.
impl FromStr for CFactor {
    type Err = EstimateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EstimateError::InvalidCFactor(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return CFactor::new(n, d).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let num = format!("{int}{frac}").parse::<u64>().map_err(|_| bad())?;
        CFactor::new(num, den).map_err(|_| bad())
    }
}

impl Serialize for CFactor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.den == 1 {
            s.serialize_u64(self.num)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for CFactor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Float(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Int(k) => CFactor::integer(k),
            // shortest decimal form of the float
            Repr::Float(x) => format!("{x}").parse(),
            Repr::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Code candidates, distance cap and factory search bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub codes: Vec<QecCodeModel>,
    pub max_distance: u32,
    pub factory_search: FactorySearch,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            codes: builtin_codes(),
            max_distance: DEFAULT_MAX_DISTANCE,
            factory_search: FactorySearch::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub algorithm_qubits: u64,
    pub factory_qubits: u64,
    pub factory_fraction: f64,
    /// Q·C·P(d)
    pub logical_error_used: f64,
    /// M·P_T(D)
    pub t_error_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalEstimate {
    pub qubit: String,
    pub c_factor: CFactor,
    pub code: String,
    pub d: u32,
    pub n_d: u64,
    pub tau_d: Nanos,
    /// P(d) at the chosen distance
    pub logical_error_rate: f64,
    pub factory: Option<TFactory>,
    #[serde(rename = "F")]
    pub f: u64,
    pub factory_fraction: f64,
    #[serde(rename = "C")]
    pub c: u64,
    pub t: Nanos,
    pub q: u64,
    pub requirements: LogicalRequirements,
    pub breakdown: Breakdown,
    pub f_accounting: String,
}

fn check_requirements(reqs: &LogicalRequirements) -> Result<(), EstimateError> {
    let bad = |m: &str| Err(EstimateError::InvalidRequirements(m.to_string()));
    if reqs.logical_qubits == 0 {
        return bad("Q must be at least 1");
    }
    if reqs.min_logical_steps == 0 {
        return bad("C_min must be at least 1");
    }
    if !(reqs.budget.logical > 0.0) {
        return bad("eps_log must be positive");
    }
    if reqs.t_states > 0 && !reqs.t_error_max.is_some_and(|p| p > 0.0) {
        return bad("P_T_max must be positive when T states are consumed");
    }
    Ok(())
}

/// F = ceil(M·τ_D / (M_D·t)), exact in integers.
pub fn factory_count(t_states: u64, factory: &TFactory, runtime: Nanos) -> Option<u64> {
    let num = t_states as u128 * factory.duration.as_ns() as u128;
    let den = factory.output_states as u128 * runtime.as_ns() as u128;
    if den == 0 {
        return None;
    }
    u64::try_from(num.div_ceil(den)).ok()
}

/// Estimate at one point of the space-time tradeoff.
pub fn estimate(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    c_factor: CFactor,
    opts: &EstimateOptions,
) -> Result<PhysicalEstimate, EstimateError> {
    check_requirements(reqs)?;
    let overflow = EstimateError::Overflow;
    let mut c = c_factor
        .apply(reqs.min_logical_steps)
        .ok_or(overflow("C"))?;
    let mut factories: HashMap<String, TFactory> = HashMap::new();

    for _ in 0..MAX_PASSES {
        let p_req = reqs.logical_error_max(c);
        let (code, patch) = select_code(qubit, p_req, &opts.codes, opts.max_distance)?;
        let t = patch.step_time.checked_mul(c).ok_or(overflow("t"))?;

        let factory = match reqs.t_error_max {
            Some(target) if reqs.t_states > 0 => {
                if !factories.contains_key(&code.name) {
                    let f = search_factory(qubit, &code, target, &opts.factory_search)?;
                    factories.insert(code.name.clone(), f);
                }
                Some(factories[&code.name].clone())
            }
            _ => None,
        };

        if let Some(f) = &factory {
            if t < f.duration {
                // the factory must finish within the algorithm's runtime
                let raised = f.duration.as_ns().div_ceil(patch.step_time.as_ns());
                log::debug!("raising C from {c} to {raised} to fit one factory run");
                c = raised;
                continue;
            }
        }

        let f_count = match &factory {
            Some(f) => factory_count(reqs.t_states, f, t).ok_or(overflow("F"))?,
            None => 0,
        };
        let factory_qubits = factory
            .as_ref()
            .map_or(Some(0), |f| f.qubits.checked_mul(f_count))
            .ok_or(overflow("factory qubits"))?;
        let algorithm_qubits = reqs
            .logical_qubits
            .checked_mul(patch.qubits)
            .ok_or(overflow("algorithm qubits"))?;
        let q = factory_qubits
            .checked_add(algorithm_qubits)
            .ok_or(overflow("q"))?;
        let factory_fraction = factory_qubits as f64 / q as f64;
        let t_error_used = factory
            .as_ref()
            .map_or(0.0, |f| reqs.t_states as f64 * f.output_error);

        return Ok(PhysicalEstimate {
            qubit: qubit.name.clone(),
            c_factor,
            code: code.name.clone(),
            d: patch.distance,
            n_d: patch.qubits,
            tau_d: patch.step_time,
            logical_error_rate: patch.error_rate,
            factory,
            f: f_count,
            factory_fraction,
            c,
            t,
            q,
            requirements: reqs.clone(),
            breakdown: Breakdown {
                algorithm_qubits,
                factory_qubits,
                factory_fraction,
                logical_error_used: patch.operation_failure(c, reqs.logical_qubits),
                t_error_used,
            },
            f_accounting: F_ACCOUNTING.to_string(),
        });
    }
    Err(EstimateError::FixedPointNotReached { passes: MAX_PASSES })
}

/// One estimate per factor, computed in parallel and sorted by C.
pub fn frontier(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    c_factors: &[CFactor],
    opts: &EstimateOptions,
) -> Result<Vec<PhysicalEstimate>, EstimateError> {
    if c_factors.is_empty() {
        return Err(EstimateError::EmptyFactors);
    }
    let mut out = c_factors
        .par_iter()
        .map(|&k| estimate(qubit, reqs, k, opts))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| {
        a.c.cmp(&b.c).then_with(|| {
            (a.c_factor.num as u128 * b.c_factor.den as u128)
                .cmp(&(b.c_factor.num as u128 * a.c_factor.den as u128))
        })
    });
    Ok(out)
}

/// Qubits and runtime if every logical operation were perfect and took
/// `step_time`.
pub fn perfect_qubit_estimate(
    reqs: &LogicalRequirements,
    step_time: Nanos,
) -> Result<(u64, Nanos), EstimateError> {
    if step_time.is_zero() {
        return Err(EstimateError::InvalidRequirements(
            "step time must be positive".into(),
        ));
    }
    let runtime = step_time
        .checked_mul(reqs.min_logical_steps)
        .ok_or(EstimateError::Overflow("runtime"))?;
    Ok((reqs.logical_qubits, runtime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psspc::{BudgetSplit, ErrorBudget};
    use crate::qubit::preset;

    fn reqs(q: u64, c_min: u64, m: u64, eps: f64) -> LogicalRequirements {
        let budget = ErrorBudget::from_split(eps, BudgetSplit::default()).unwrap();
        LogicalRequirements::new(q, c_min, m, budget)
    }

    #[test]
    fn c_factor_parsing() {
        assert_eq!(
            "10".parse::<CFactor>().unwrap(),
            CFactor::integer(10).unwrap()
        );
        assert_eq!(
            "3/2".parse::<CFactor>().unwrap(),
            CFactor::new(3, 2).unwrap()
        );
        assert_eq!(
            "1.5".parse::<CFactor>().unwrap(),
            CFactor::new(3, 2).unwrap()
        );
        assert_eq!("6/4".parse::<CFactor>().unwrap().to_string(), "3/2");
        for bad in ["0.5", "1/0", "", "-2", "x", "1e3"] {
            assert!(bad.parse::<CFactor>().is_err(), "{bad}");
        }
        let k: CFactor = serde_json::from_str("2.5").unwrap();
        assert_eq!(k, CFactor::new(5, 2).unwrap());
        assert_eq!(serde_json::to_string(&k).unwrap(), "\"5/2\"");
        assert_eq!(CFactor::new(3, 2).unwrap().apply(5), Some(8));
    }

    #[test]
    fn perfect_qubits() {
        let r = reqs(25481, 12_270_000_132, 14_920_000_120, 1.0 / 3.0);
        let (q, t) = perfect_qubit_estimate(&r, Nanos(100)).unwrap();
        assert_eq!(q, 25481);
        // within 5% of 20 minutes
        assert!((t.as_secs_f64() / 1200.0 - 1.0).abs() < 0.05);
        let (_, t) = perfect_qubit_estimate(&r, Nanos(1)).unwrap();
        assert_eq!(t.as_ns(), r.min_logical_steps);
        assert!(perfect_qubit_estimate(&r, Nanos(0)).is_err());
    }

    #[test]
    fn no_t_states_means_no_factory() {
        let r = reqs(10, 1000, 0, 0.01);
        let e = estimate(
            &preset("ns-e4").unwrap(),
            &r,
            CFactor::ONE,
            &EstimateOptions::default(),
        )
        .unwrap();
        assert!(e.factory.is_none());
        assert_eq!(e.f, 0);
        assert_eq!(e.q, 10 * e.n_d);
        assert_eq!(e.factory_fraction, 0.0);
    }

    #[test]
    fn short_programs_raise_c_to_fit_a_factory() {
        let r = reqs(4, 1, 1, 0.01);
        let e = estimate(
            &preset("ns-e4").unwrap(),
            &r,
            CFactor::ONE,
            &EstimateOptions::default(),
        )
        .unwrap();
        let f = e.factory.as_ref().unwrap();
        assert!(e.c > 1);
        assert!(e.t >= f.duration);
        assert!(e.tau_d.as_ns() * (e.c - 1) < f.duration.as_ns());
    }

    #[test]
    fn frontier_rejects_empty_factor_list() {
        let r = reqs(10, 1000, 100, 0.01);
        assert_eq!(
            frontier(
                &preset("ns-e4").unwrap(),
                &r,
                &[],
                &EstimateOptions::default()
            ),
            Err(EstimateError::EmptyFactors)
        );
    }
}
