//! Oracles, strategies and property checks shared by the property suite and
//! the acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use qre::error::QecError;
use qre::estimator::{estimate, frontier, CFactor, EstimateOptions, PhysicalEstimate};
use qre::factory::{provision_factory, FactorySearch, Provisioning, TFactory, UnitKind, UnitLevel};
use qre::psspc::{BudgetSplit, ErrorBudget, LogicalRequirements};
use qre::qec::{builtin_codes, required_distance, QecCodeModel};
use qre::qubit::{preset, InstructionSet, PhysicalQubitParams, PRESET_NAMES};
use qre::units::Nanos;

pub type Design = Vec<(UnitKind, UnitLevel, Option<u32>)>;

// ---------------------------------------------------------------------------
// oracles

/// a·(p/p*)^((d+1)/2)
pub fn oracle_p(code: &QecCodeModel, p: f64, d: u32) -> f64 {
    code.prefactor_a * (p / code.threshold_pstar).powf((d as f64 + 1.0) / 2.0)
}

pub fn oracle_n(code: &QecCodeModel, d: u32) -> u64 {
    let d = d as i64;
    let t = code.qubits_per_tile;
    (t.d2 * d * d + t.d1 * d + t.d0) as u64
}

pub fn oracle_tau(code: &QecCodeModel, qubit: &PhysicalQubitParams, d: u32) -> u64 {
    let gate = qubit.t_gate.map_or(0, |t| t.as_ns());
    (code.timestep.t_gate * gate + code.timestep.t_meas * qubit.t_meas.as_ns()) * d as u64
}

/// (qubits, duration in ns) of one unit.
pub fn oracle_unit(
    kind: UnitKind,
    level: UnitLevel,
    d: Option<u32>,
    code: &QecCodeModel,
    qubit: &PhysicalQubitParams,
) -> (u64, u64) {
    let t_meas = qubit.t_meas.as_ns();
    match (kind, level) {
        (UnitKind::SpaceEfficient, UnitLevel::Physical) => (12, 46 * t_meas),
        (UnitKind::RmPrep, UnitLevel::Physical) => (31, 23 * t_meas),
        (UnitKind::SpaceEfficient, UnitLevel::Logical) => {
            let d = d.unwrap();
            (20 * oracle_n(code, d), 13 * oracle_tau(code, qubit, d))
        }
        (UnitKind::RmPrep, UnitLevel::Logical) => {
            let d = d.unwrap();
            (31 * oracle_n(code, d), 11 * oracle_tau(code, qubit, d))
        }
    }
}

/// P(X >= k) for X ~ Binomial(n, p), summing the pmf built up term by
/// term in log space.
pub fn oracle_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let mut ln_term = n as f64 * (1.0 - p).ln();
    let ratio = (p / (1.0 - p)).ln();
    let mut below = 0.0;
    let mut above = 0.0;
    for i in 0..=n {
        if i < k {
            below += ln_term.exp();
        } else {
            above += ln_term.exp();
        }
        ln_term += ((n - i) as f64).ln() - ((i + 1) as f64).ln() + ratio;
    }
    // the smaller side carries less cancellation error
    if above < below {
        above.min(1.0)
    } else {
        (1.0 - below).max(0.0)
    }
}

pub fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Every unit sequence allowed by `search`, built independently of the
/// library's enumeration.
pub fn oracle_designs(search: &FactorySearch, instruction_set: InstructionSet) -> Vec<Design> {
    let lo = search.min_distance.max(3);
    let ds: Vec<u32> = (lo..=search.max_distance).filter(|d| d % 2 == 1).collect();
    let kinds = [UnitKind::SpaceEfficient, UnitKind::RmPrep];
    let mut out = Vec::new();
    fn grow(
        prefix: Design,
        min_d: u32,
        ds: &[u32],
        kinds: &[UnitKind; 2],
        max_rounds: usize,
        out: &mut Vec<Design>,
    ) {
        if prefix.last().is_some_and(|u| u.1 == UnitLevel::Logical) {
            out.push(prefix.clone());
        }
        if prefix.len() == max_rounds {
            return;
        }
        for &d in ds.iter().filter(|&&d| d >= min_d) {
            for &k in kinds {
                let mut next = prefix.clone();
                next.push((k, UnitLevel::Logical, Some(d)));
                grow(next, d, ds, kinds, max_rounds, out);
            }
        }
    }
    grow(Vec::new(), 0, &ds, &kinds, search.max_rounds, &mut out);
    if instruction_set == InstructionSet::Majorana {
        for k in kinds {
            grow(
                vec![(k, UnitLevel::Physical, None)],
                0,
                &ds,
                &kinds,
                search.max_rounds,
                &mut out,
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub code: String,
    pub d: u32,
    pub n_d: u64,
    pub tau_d: u64,
    pub factory: Option<(u64, u64, u64)>,
    pub f: u64,
    pub c: u64,
    pub q: u64,
    pub t: u64,
}

/// Brute force over every (code, d) pair and every factory in the search
/// space, following the fixed-point rule for C.
pub fn oracle_estimate(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    k: CFactor,
    opts: &EstimateOptions,
) -> Option<OracleEstimate> {
    let p = qubit.p_clifford;
    let mut c = ceil_div(
        reqs.min_logical_steps as u128 * k.numer() as u128,
        k.denom() as u128,
    ) as u64;
    let mut factory_cache: Option<(String, Option<TFactory>)> = None;
    for _ in 0..5 {
        let p_req = reqs.budget.logical / (reqs.logical_qubits as f64 * c as f64);
        let mut best: Option<((u128, u64, usize), u32)> = None;
        for (i, code) in opts.codes.iter().enumerate() {
            if code.instruction_set != qubit.instruction_set || p >= code.threshold_pstar {
                continue;
            }
            for d in (3..=opts.max_distance).filter(|d| d % 2 == 1) {
                if oracle_p(code, p, d) <= p_req {
                    let n = oracle_n(code, d);
                    let key = (n as u128 * oracle_tau(code, qubit, d) as u128, n, i);
                    if best.is_none_or(|(b, _)| key < b) {
                        best = Some((key, d));
                    }
                }
            }
        }
        let ((_, n_d, idx), d) = best?;
        let code = &opts.codes[idx];
        let tau = oracle_tau(code, qubit, d);
        let t = tau * c;

        let fac = if reqs.t_states == 0 {
            None
        } else {
            let cached = factory_cache
                .as_ref()
                .filter(|(name, _)| *name == code.name);
            let f = match cached {
                Some((_, f)) => f.clone(),
                None => {
                    let f = oracle_factory(
                        qubit,
                        code,
                        reqs.t_error_max.unwrap(),
                        &opts.factory_search,
                    );
                    factory_cache = Some((code.name.clone(), f.clone()));
                    f
                }
            };
            Some(f?)
        };
        if let Some(f) = &fac {
            if (t as u128) < f.duration.as_ns() as u128 {
                c = ceil_div(f.duration.as_ns() as u128, tau as u128) as u64;
                continue;
            }
        }
        let (f_count, factory) = match &fac {
            None => (0, None),
            Some(f) => {
                let num = reqs.t_states as u128 * f.duration.as_ns() as u128;
                let den = f.output_states as u128 * t as u128;
                (
                    ceil_div(num, den) as u64,
                    Some((f.qubits, f.duration.as_ns(), f.output_states)),
                )
            }
        };
        let factory_qubits = factory.map_or(0, |(n, _, _)| n * f_count);
        return Some(OracleEstimate {
            code: code.name.clone(),
            d,
            n_d,
            tau_d: tau,
            factory,
            f: f_count,
            c,
            q: factory_qubits + reqs.logical_qubits * n_d,
            t,
        });
    }
    None
}

/// The feasible factory with the smallest n·τ (then n, then τ).
pub fn oracle_factory(
    qubit: &PhysicalQubitParams,
    code: &QecCodeModel,
    target: f64,
    search: &FactorySearch,
) -> Option<TFactory> {
    let mut best: Option<((u128, u64, u64), TFactory)> = None;
    for design in oracle_designs(search, qubit.instruction_set) {
        for fc in 1..=search.max_final_copies.max(1) {
            let Ok(f) = provision_factory(&design, fc, qubit, code, search.provisioning) else {
                continue;
            };
            if f.output_error > target || f.output_states == 0 {
                continue;
            }
            let key = (
                f.qubits as u128 * f.duration.as_ns() as u128,
                f.qubits,
                f.duration.as_ns(),
            );
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, f));
            }
        }
    }
    best.map(|(_, f)| f)
}

// ---------------------------------------------------------------------------
// strategies

pub fn small_search() -> FactorySearch {
    FactorySearch {
        max_rounds: 2,
        min_distance: 3,
        max_distance: 13,
        max_final_copies: 2,
        provisioning: Provisioning::Binomial99,
    }
}

pub fn small_options() -> EstimateOptions {
    EstimateOptions {
        codes: builtin_codes(),
        max_distance: 31,
        factory_search: small_search(),
    }
}

pub fn qubit_strategy() -> impl Strategy<Value = PhysicalQubitParams> {
    let presets = prop::sample::select(PRESET_NAMES.to_vec()).prop_map(|n| preset(n).unwrap());
    let gate =
        (-5.0f64..-3.3, -5.0f64..-3.0, 10u64..500, 10u64..1000).prop_map(|(lp, lpt, tg, tm)| {
            PhysicalQubitParams {
                name: "synthetic-gate".into(),
                instruction_set: InstructionSet::GateBased,
                t_gate: Some(Nanos(tg)),
                t_meas: Nanos(tm),
                p_clifford: 10f64.powf(lp),
                p_t: 10f64.powf(lpt),
            }
        });
    let majorana =
        (-6.5f64..-4.0, -3.0f64..-1.3, 10u64..1000).prop_map(|(lp, lpt, tm)| PhysicalQubitParams {
            name: "synthetic-majorana".into(),
            instruction_set: InstructionSet::Majorana,
            t_gate: Some(Nanos(tm)),
            t_meas: Nanos(tm),
            p_clifford: 10f64.powf(lp),
            p_t: 10f64.powf(lpt),
        });
    prop_oneof![presets, gate, majorana]
}

pub fn reqs_strategy() -> impl Strategy<Value = LogicalRequirements> {
    (
        1u64..500,
        1u64..100_000_000,
        0u64..1_000_000_000,
        -3.0f64..-0.5,
    )
        .prop_map(|(q, c, m, leps)| {
            let budget = ErrorBudget::from_split(10f64.powf(leps), BudgetSplit::default()).unwrap();
            LogicalRequirements::new(q, c, m, budget)
        })
}

pub fn c_factor_strategy() -> impl Strategy<Value = CFactor> {
    (1u64..40, 1u64..5).prop_filter_map("c_factor >= 1", |(n, d)| CFactor::new(n, d).ok())
}

pub fn design_strategy() -> impl Strategy<Value = (Design, u64)> {
    let logical = (prop::bool::ANY, 1u32..13).prop_map(|(rm, h)| {
        let kind = if rm {
            UnitKind::RmPrep
        } else {
            UnitKind::SpaceEfficient
        };
        (kind, 2 * h + 1)
    });
    (
        prop::option::of(prop::bool::ANY),
        prop::collection::vec(logical, 1..=3),
        1u64..4,
    )
        .prop_map(|(physical, mut rounds, copies)| {
            rounds.sort_by_key(|r| r.1);
            let mut design: Design = Vec::new();
            if let Some(rm) = physical {
                let kind = if rm {
                    UnitKind::RmPrep
                } else {
                    UnitKind::SpaceEfficient
                };
                design.push((kind, UnitLevel::Physical, None));
            }
            design.extend(
                rounds
                    .into_iter()
                    .map(|(k, d)| (k, UnitLevel::Logical, Some(d))),
            );
            (design, copies)
        })
}

// ---------------------------------------------------------------------------
// property checks

fn fail(msg: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(msg.to_string())
}

/// Minimality and parity of the required distance for every compatible
/// code.
pub fn check_distance(p: f64, majorana: bool, target: f64, cap: u32) -> Result<(), TestCaseError> {
    let mut qubit = preset(if majorana { "maj-ns-e4" } else { "ns-e4" }).unwrap();
    qubit.p_clifford = p;
    for code in builtin_codes().iter().filter(|c| c.is_compatible(&qubit)) {
        match required_distance(code, &qubit, target, cap) {
            Ok(d) => {
                prop_assert!(d % 2 == 1 && d >= 3, "d = {d}");
                prop_assert!(d <= cap);
                prop_assert!(oracle_p(code, p, d) <= target);
                if d > 3 {
                    prop_assert!(oracle_p(code, p, d - 2) > target, "d = {d} is not minimal");
                }
            }
            Err(QecError::AboveThreshold { .. }) => prop_assert!(p >= code.threshold_pstar),
            Err(QecError::DistanceCapExceeded { .. }) => {
                let top = if cap % 2 == 1 { cap } else { cap - 1 };
                prop_assert!(p < code.threshold_pstar);
                prop_assert!(oracle_p(code, p, top) > target, "cap {cap} was reachable");
            }
            Err(e) => return Err(fail(e)),
        }
    }
    Ok(())
}

/// Error budget shares are respected and the totals add up.
pub fn check_budget(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    k: CFactor,
) -> Result<(), TestCaseError> {
    let Ok(e) = estimate(qubit, reqs, k, &small_options()) else {
        return Ok(());
    };
    let eps = reqs.budget.total();
    let code = builtin_codes()
        .into_iter()
        .find(|c| c.name == e.code)
        .unwrap();
    let used = reqs.logical_qubits as f64 * e.c as f64 * oracle_p(&code, qubit.p_clifford, e.d);
    prop_assert!(
        used <= reqs.budget.logical * (1.0 + 1e-12),
        "logical {used}"
    );
    prop_assert!(reqs.budget.logical <= eps / 3.0 * (1.0 + 1e-12));
    if let Some(f) = &e.factory {
        let t_used = reqs.t_states as f64 * f.output_error;
        prop_assert!(
            t_used <= reqs.budget.distillation * (1.0 + 1e-12),
            "T {t_used}"
        );
        prop_assert!(e.t >= f.duration, "factory outlasts the algorithm");
        prop_assert_eq!(e.q, e.f * f.qubits + reqs.logical_qubits * e.n_d);
    } else {
        prop_assert_eq!(reqs.t_states, 0);
        prop_assert_eq!(e.q, reqs.logical_qubits * e.n_d);
    }
    prop_assert!(
        e.c >= ceil_div(
            reqs.min_logical_steps as u128 * k.numer() as u128,
            k.denom() as u128
        ) as u64
    );
    prop_assert_eq!(e.t.as_ns(), e.tau_d.as_ns() * e.c);
    Ok(())
}

/// Footprint is the largest round, duration the sum of rounds, and the
/// unit constants, error recurrence and provisioning match the oracles.
pub fn check_factory(
    qubit: &PhysicalQubitParams,
    design: &Design,
    copies: u64,
) -> Result<(), TestCaseError> {
    let code = if qubit.instruction_set == InstructionSet::Majorana {
        QecCodeModel::hastings_haah()
    } else {
        QecCodeModel::surface_gate()
    };
    let Ok(f) = provision_factory(design, copies, qubit, &code, Provisioning::Binomial99) else {
        return Ok(());
    };
    let mut q_in = qubit.p_t;
    let mut max_q = 0;
    let mut sum_t = 0;
    for (r, &(kind, level, d)) in f.rounds.iter().zip(design) {
        let (n, t) = oracle_unit(kind, level, d, &code, qubit);
        prop_assert_eq!(r.unit_qubits, n);
        prop_assert_eq!(r.unit_duration.as_ns(), t);
        let clifford = match d {
            Some(d) => oracle_p(&code, qubit.p_clifford, d),
            None => qubit.p_clifford,
        };
        let q_out = 35.0 * q_in.powi(3) + 7.1 * clifford;
        let acc = 1.0 - 15.0 * q_in - 356.0 * clifford;
        prop_assert!((r.output_error - q_out).abs() <= 1e-12 * q_out);
        prop_assert!((r.acceptance - acc).abs() <= 1e-12);
        q_in = q_out;
        max_q = max_q.max(n * r.spec.copies);
        sum_t += t;
    }
    prop_assert_eq!(f.qubits, max_q);
    prop_assert_eq!(f.duration.as_ns(), sum_t);
    prop_assert!((f.output_error - q_in).abs() <= 1e-12 * q_in);

    // binomial provisioning: enough with 99% probability, and minimal
    let near = |x: f64| (x - 0.99).abs() < 1e-9;
    for w in f.rounds.windows(2) {
        let need = 15 * w[1].spec.copies;
        let (c, acc) = (w[0].spec.copies, w[0].acceptance);
        let at = oracle_tail(c, need, acc);
        let below = oracle_tail(c - 1, need, acc);
        if !near(at) {
            prop_assert!(at >= 0.99, "round under-provisioned: {c} copies, P = {at}");
        }
        if !near(below) {
            prop_assert!(below < 0.99, "round over-provisioned: {c} copies");
        }
    }
    let last = f.rounds.last().unwrap();
    let m = f.output_states;
    let at = oracle_tail(last.spec.copies, m, last.acceptance);
    let above = oracle_tail(last.spec.copies, m + 1, last.acceptance);
    if !near(at) {
        prop_assert!(at >= 0.99);
    }
    if !near(above) {
        prop_assert!(m == last.spec.copies || above < 0.99);
    }
    Ok(())
}

/// Doubling c_factor never raises F; d never drops while the code stays.
pub fn check_f_monotone(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
) -> Result<(), TestCaseError> {
    let opts = small_options();
    let mut prev: Option<PhysicalEstimate> = None;
    for k in [1, 2, 4, 8] {
        let Ok(e) = estimate(qubit, reqs, CFactor::integer(k).unwrap(), &opts) else {
            return Ok(());
        };
        if let Some(p) = &prev {
            prop_assert!(e.f <= p.f, "F rose from {} to {} at c_factor {k}", p.f, e.f);
            if p.code == e.code {
                prop_assert!(e.d >= p.d);
            }
        }
        prev = Some(e);
    }
    Ok(())
}

/// The parallel frontier equals estimates run one by one, sorted by C.
pub fn check_frontier(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    factors: &[CFactor],
) -> Result<(), TestCaseError> {
    let opts = small_options();
    let parallel = frontier(qubit, reqs, factors, &opts);
    let sequential: Result<Vec<_>, _> = factors
        .iter()
        .map(|&k| estimate(qubit, reqs, k, &opts))
        .collect();
    match (parallel, sequential) {
        (Ok(par), Ok(mut seq)) => {
            seq.sort_by(|a, b| {
                a.c.cmp(&b.c).then(
                    (a.c_factor.numer() as u128 * b.c_factor.denom() as u128)
                        .cmp(&(b.c_factor.numer() as u128 * a.c_factor.denom() as u128)),
                )
            });
            prop_assert_eq!(par, seq);
        }
        (Err(_), Err(_)) => {}
        (par, seq) => {
            return Err(fail(format!(
                "paths disagree: {:?} vs {:?}",
                par.is_ok(),
                seq.is_ok()
            )))
        }
    }
    Ok(())
}

/// The estimator agrees with brute-force enumeration.
pub fn check_oracle(
    qubit: &PhysicalQubitParams,
    reqs: &LogicalRequirements,
    k: CFactor,
) -> Result<(), TestCaseError> {
    let opts = small_options();
    let got = estimate(qubit, reqs, k, &opts);
    let want = oracle_estimate(qubit, reqs, k, &opts);
    match (got, want) {
        (Ok(e), Some(o)) => {
            prop_assert_eq!(&e.code, &o.code);
            prop_assert_eq!(e.d, o.d);
            prop_assert_eq!(e.n_d, o.n_d);
            prop_assert_eq!(e.tau_d.as_ns(), o.tau_d);
            prop_assert_eq!(
                e.factory
                    .as_ref()
                    .map(|f| (f.qubits, f.duration.as_ns(), f.output_states)),
                o.factory
            );
            prop_assert_eq!(e.f, o.f);
            prop_assert_eq!(e.c, o.c);
            prop_assert_eq!(e.q, o.q);
            prop_assert_eq!(e.t.as_ns(), o.t);
        }
        (Err(_), None) => {}
        (got, want) => {
            return Err(fail(format!(
                "estimator {:?} vs oracle {:?}",
                got.map(|e| (e.d, e.f, e.q)),
                want.map(|o| (o.d, o.f, o.q))
            )))
        }
    }
    Ok(())
}
