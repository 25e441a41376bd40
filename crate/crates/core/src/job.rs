//! Job files: parsing with JSON-pointer errors, resolution of presets and
//! overrides, and the driver producing a report.

use std::fmt;

use serde::de::{self, value::MapAccessDeserializer, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::apps::{app_preset, IsingParams, RequirementSource, StoredRequirements};
use crate::error::{Error, EstimateError, QecError, Result};
use crate::estimator::{estimate, frontier, CFactor, EstimateOptions};
use crate::factory::FactorySearch;
use crate::psspc::{
    logical_counts, AlgorithmCounts, BudgetSplit, ErrorBudget, LogicalRequirements, SynthesisModel,
};
use crate::qec::{builtin_codes, QecCodeModel, DEFAULT_MAX_DISTANCE};
use crate::qubit::{preset, PhysicalQubitParams};
use crate::report::Report;

/// Environment variable overriding the default distance cap.
pub const DMAX_ENV: &str = "QRE_DMAX";

/// Implements string-or-object deserialization: a string goes through
/// `from_name`, an object through `T`'s own derive.
macro_rules! string_or_object {
    ($ty:ident, $inline:ident, $expecting:literal, $from_name:expr) => {
        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $ty;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str($expecting)
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<$ty, E> {
                        Ok($from_name(v.to_string()))
                    }
                    fn visit_map<A: MapAccess<'de>>(
                        self,
                        map: A,
                    ) -> std::result::Result<$ty, A::Error> {
                        Deserialize::deserialize(MapAccessDeserializer::new(map)).map($ty::$inline)
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum QubitSpec {
    Preset(String),
    Inline(PhysicalQubitParams),
}

string_or_object!(
    QubitSpec,
    Inline,
    "a qubit preset name or inline qubit parameters",
    QubitSpec::Preset
);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CodeSpec {
    Builtin(String),
    Inline(QecCodeModel),
}

string_or_object!(
    CodeSpec,
    Inline,
    "a code name or an inline code model",
    CodeSpec::Builtin
);

/// The object form of an application; exactly one field other than
/// `source` may be present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplicationFields {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<RequirementSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<AlgorithmCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requirements: Option<StoredRequirements>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ising: Option<IsingParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ApplicationSpec {
    Preset(String),
    Inline(ApplicationFields),
}

string_or_object!(
    ApplicationSpec,
    Inline,
    "an application preset name or an object with one of preset, counts, requirements, ising",
    ApplicationSpec::Preset
);

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factory_search: Option<FactorySearch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub qubit: QubitSpec,
    pub application: ApplicationSpec,
    #[serde(default)]
    pub c_factor: CFactor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontier_factors: Option<Vec<CFactor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_split: Option<BudgetSplit>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
    /// code candidates; the built-in families when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codes: Option<Vec<CodeSpec>>,
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

/// A job with every preset and default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedJob {
    pub qubit: PhysicalQubitParams,
    pub application: String,
    pub requirements: LogicalRequirements,
    pub options: EstimateOptions,
    pub factors: Vec<CFactor>,
    pub notes: Vec<String>,
}

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses and validates a job file.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    let mut de = serde_json::Deserializer::from_str(text);
    let job: JobSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = json_pointer(e.path());
        schema(&pointer, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| schema("", e.to_string()))?;
    resolve_job(&job, None)?;
    Ok(job)
}

fn resolve_requirements(
    app: &ApplicationSpec,
    model: &SynthesisModel,
    split: BudgetSplit,
    notes: &mut Vec<String>,
) -> Result<(String, LogicalRequirements)> {
    let from_counts = |counts: &AlgorithmCounts| -> Result<LogicalRequirements> {
        let budget = ErrorBudget::from_split(counts.epsilon, split)?;
        Ok(logical_counts(counts, model, &budget)?)
    };
    let fields = match app {
        ApplicationSpec::Preset(name) => ApplicationFields {
            preset: Some(name.clone()),
            ..Default::default()
        },
        ApplicationSpec::Inline(fields) => fields.clone(),
    };
    let given: Vec<&str> = [
        ("preset", fields.preset.is_some()),
        ("counts", fields.counts.is_some()),
        ("requirements", fields.requirements.is_some()),
        ("ising", fields.ising.is_some()),
    ]
    .iter()
    .filter(|(_, set)| *set)
    .map(|(name, _)| *name)
    .collect();
    if given.len() != 1 {
        return Err(schema(
            "/application",
            format!(
                "exactly one of preset, counts, requirements, ising is required (got {})",
                if given.is_empty() {
                    "none".to_string()
                } else {
                    given.join(", ")
                }
            ),
        ));
    }
    if fields.source.is_some() && fields.preset.is_none() {
        return Err(schema(
            "/application/source",
            "source applies to presets only",
        ));
    }
    if let Some(name) = &fields.preset {
        let app = app_preset(name)?;
        let source = fields.source.unwrap_or_default();
        if source == RequirementSource::Counts || app.counts.is_none() {
            notes.extend(app.notes.iter().map(|n| n.to_string()));
        }
        return Ok((name.clone(), app.requirements(source, model, split)?));
    }
    if let Some(counts) = &fields.counts {
        return Ok(("counts".into(), from_counts(counts)?));
    }
    if let Some(stored) = &fields.requirements {
        return Ok(("requirements".into(), stored.resolve(split)?));
    }
    let ising = fields.ising.as_ref().expect("one source is present");
    let label = format!("ising(N={}, T={})", ising.sites, ising.steps);
    Ok((label, from_counts(&ising.counts()?)?))
}

fn distance_cap(job: &JobSpec, env: Option<&str>) -> Result<u32> {
    if let Some(cap) = job.overrides.distance_cap {
        return Ok(cap);
    }
    match env {
        Some(raw) => raw.trim().parse().map_err(|_| {
            schema(
                "",
                format!("{DMAX_ENV} must be a positive integer, got '{raw}'"),
            )
        }),
        None => Ok(DEFAULT_MAX_DISTANCE),
    }
}

/// Resolves presets and defaults. `env_dmax` is the value of QRE_DMAX, if
/// set; a job's own `distance_cap` takes precedence over it.
pub fn resolve_job(job: &JobSpec, env_dmax: Option<&str>) -> Result<ResolvedJob> {
    let qubit = match &job.qubit {
        QubitSpec::Preset(name) => preset(name)?,
        QubitSpec::Inline(q) => q.clone().validate()?,
    };
    let model = job.overrides.synthesis.unwrap_or_default().validate()?;
    let split = job.budget_split.unwrap_or_default();
    let mut notes = Vec::new();
    let (application, requirements) =
        resolve_requirements(&job.application, &model, split, &mut notes)?;

    let codes = match &job.codes {
        None => builtin_codes(),
        Some(specs) => {
            if specs.is_empty() {
                return Err(schema("/codes", "at least one code is required"));
            }
            specs
                .iter()
                .enumerate()
                .map(|(i, spec)| match spec {
                    CodeSpec::Builtin(name) => QecCodeModel::by_name(name).ok_or_else(|| {
                        schema(
                            &format!("/codes/{i}"),
                            format!(
                                "unknown code '{name}' (valid: surface-gate, surface-meas, hastings-haah)"
                            ),
                        )
                    }),
                    CodeSpec::Inline(code) => Ok(code.clone().validate()?),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let max_distance = distance_cap(job, env_dmax)?;
    if max_distance < 3 {
        return Err(Error::Qec(QecError::InvalidDistance(max_distance)));
    }
    let mut factory_search = job.overrides.factory_search.unwrap_or_default();
    factory_search.max_distance = factory_search.max_distance.min(max_distance);

    let factors = match &job.frontier_factors {
        Some(list) if list.is_empty() => return Err(EstimateError::EmptyFactors.into()),
        Some(list) => list.clone(),
        None => vec![job.c_factor],
    };
    Ok(ResolvedJob {
        qubit,
        application,
        requirements,
        options: EstimateOptions {
            codes,
            max_distance,
            factory_search,
        },
        factors,
        notes,
    })
}

/// Runs a job, reading the distance cap override from the environment.
pub fn run(job: &JobSpec) -> Result<Report> {
    let env = std::env::var(DMAX_ENV).ok();
    run_with_env(job, env.as_deref())
}

pub fn run_with_env(job: &JobSpec, env_dmax: Option<&str>) -> Result<Report> {
    let resolved = resolve_job(job, env_dmax)?;
    let estimates = if resolved.factors.len() == 1 {
        vec![estimate(
            &resolved.qubit,
            &resolved.requirements,
            resolved.factors[0],
            &resolved.options,
        )?]
    } else {
        frontier(
            &resolved.qubit,
            &resolved.requirements,
            &resolved.factors,
            &resolved.options,
        )?
    };
    Ok(Report::new(
        job.clone(),
        resolved.application,
        estimates,
        resolved.notes,
    ))
}
