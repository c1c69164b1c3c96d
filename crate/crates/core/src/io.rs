//! Problem files, built-in examples and canonical JSON output.
//!
//! A problem file fixes `order` and `dim` and gives the random data either
//! as explicit weighted samples or as a generator:
//!
//! ```json
//! {
//!   "order": 3, "dim": 2,
//!   "samples": [
//!     { "weight": 1.0, "entries": [[[0, 0, 0], 1.0], [[1, 1, 1], 1.0]], "q": [-1.0, -4.0] }
//!   ],
//!   "metadata": { "name": "identity", "claims": { "stochastic_r0": true } }
//! }
//! ```
//!
//! Tensor entries are sparse `[[i1, .., iN], value]` pairs with 0-based
//! indices. A generator has a `base` entry list, `terms` (each
//! `{coordinate, transform, entries}` with `transform` `linear` or `abs`),
//! `q_base`, one `q_coefficients` vector per omega coordinate, the `omega`
//! distributions, and either `num_samples` (plus optional `seed`) or
//! explicit `omega_values`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::stochastic::{
    materialize, materialize_at, CoefficientTerm, EntryTransform, GeneratorSpec, OmegaDist, Realization, SampleSpace,
    WEIGHT_SUM_TOL,
};
use crate::structure::Verdict;
use crate::tensor::Tensor;

pub type EntryList = Vec<(Vec<usize>, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub order: usize,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SampleFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub weight: f64,
    pub entries: EntryList,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub coordinate: usize,
    #[serde(default)]
    pub transform: EntryTransform,
    pub entries: EntryList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub base: EntryList,
    #[serde(default)]
    pub terms: Vec<TermFile>,
    pub q_base: Vec<f64>,
    #[serde(default)]
    pub q_coefficients: Vec<Vec<f64>>,
    pub omega: Vec<OmegaDist>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_values: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub claims: Claims,
}

/// Structural statements made by an external reference, compared against
/// the checker's verdicts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stochastic_r0: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

pub fn claim_verdict(claim: bool) -> Verdict {
    if claim {
        Verdict::IsR0
    } else {
        Verdict::NotR0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub file: ProblemFile,
    pub space: SampleSpace,
}

impl Problem {
    pub fn metadata(&self) -> Metadata {
        self.file.metadata.clone().unwrap_or_default()
    }
}

fn schema(field: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.to_string(),
    }
}

fn tensor(order: usize, dim: usize, entries: &EntryList, field: &str) -> Result<Tensor> {
    Tensor::new(order, dim, entries.clone()).map_err(|e| schema(field, e))
}

fn check_vec(v: &[f64], dim: usize, field: &str) -> Result<()> {
    if v.len() != dim {
        return Err(schema(field, format!("expected {dim} components, got {}", v.len())));
    }
    if let Some(i) = v.iter().position(|c| !c.is_finite()) {
        return Err(schema(format!("{field}[{i}]"), "value must be finite"));
    }
    Ok(())
}

impl ProblemFile {
    /// Builds and validates the sample space described by the file.
    pub fn to_space(&self) -> Result<SampleSpace> {
        let (order, dim) = (self.order, self.dim);
        if order < 2 {
            return Err(schema("order", format!("must be at least 2, got {order}")));
        }
        if dim < 1 {
            return Err(schema("dim", "must be at least 1"));
        }
        match (&self.samples, &self.generator) {
            (Some(_), Some(_)) => Err(schema("samples", "give either samples or generator, not both")),
            (None, None) => Err(schema("samples", "one of samples or generator is required")),
            (Some(samples), None) => samples_space(order, dim, samples),
            (None, Some(g)) => generator_space(order, dim, g),
        }
    }

    pub fn generator_spec(&self) -> Result<Option<GeneratorSpec>> {
        self.generator
            .as_ref()
            .map(|g| generator_spec(self.order, self.dim, g))
            .transpose()
    }
}

fn samples_space(order: usize, dim: usize, samples: &[SampleFile]) -> Result<SampleSpace> {
    if samples.is_empty() {
        return Err(schema("samples", "at least one sample is required"));
    }
    let mut rs = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        if !(s.weight > 0.0 && s.weight <= 1.0) {
            return Err(schema(
                format!("samples[{k}].weight"),
                format!("must lie in (0, 1], got {}", s.weight),
            ));
        }
        let t = tensor(order, dim, &s.entries, &format!("samples[{k}].entries"))?;
        check_vec(&s.q, dim, &format!("samples[{k}].q"))?;
        rs.push(Realization::new(s.weight, t, s.q.clone())?);
    }
    let total: f64 = samples.iter().map(|s| s.weight).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(schema(
            "samples[*].weight",
            format!("weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL:e}"),
        ));
    }
    SampleSpace::new(rs)
}

fn generator_spec(order: usize, dim: usize, g: &GeneratorFile) -> Result<GeneratorSpec> {
    let base = tensor(order, dim, &g.base, "generator.base")?;
    let mut terms = Vec::with_capacity(g.terms.len());
    for (t, term) in g.terms.iter().enumerate() {
        if term.coordinate >= g.omega.len() {
            return Err(schema(
                format!("generator.terms[{t}].coordinate"),
                format!("omega has {} coordinates", g.omega.len()),
            ));
        }
        terms.push(CoefficientTerm {
            coordinate: term.coordinate,
            transform: term.transform,
            tensor: tensor(order, dim, &term.entries, &format!("generator.terms[{t}].entries"))?,
        });
    }
    check_vec(&g.q_base, dim, "generator.q_base")?;
    if g.q_coefficients.len() != g.omega.len() {
        return Err(schema(
            "generator.q_coefficients",
            format!(
                "expected one vector per omega coordinate ({}), got {}",
                g.omega.len(),
                g.q_coefficients.len()
            ),
        ));
    }
    for (j, c) in g.q_coefficients.iter().enumerate() {
        check_vec(c, dim, &format!("generator.q_coefficients[{j}]"))?;
    }
    let spec = GeneratorSpec {
        base,
        terms,
        q_base: g.q_base.clone(),
        q_coefficients: g.q_coefficients.clone(),
        omega: g.omega.clone(),
    };
    for (j, dist) in g.omega.iter().enumerate() {
        dist.validate()
            .map_err(|e| schema(format!("generator.omega[{j}]"), e))?;
    }
    spec.validate().map_err(|e| schema("generator", e))?;
    Ok(spec)
}

fn generator_space(order: usize, dim: usize, g: &GeneratorFile) -> Result<SampleSpace> {
    let spec = generator_spec(order, dim, g)?;
    match (&g.omega_values, g.num_samples) {
        (Some(_), Some(_)) => Err(schema(
            "generator.num_samples",
            "give either num_samples or omega_values",
        )),
        (Some(values), None) => {
            if values.is_empty() {
                return Err(schema("generator.omega_values", "at least one value is required"));
            }
            for (k, w) in values.iter().enumerate() {
                check_vec(w, spec.omega_dim(), &format!("generator.omega_values[{k}]"))?;
            }
            materialize_at(&spec, values)
        }
        (None, Some(0)) => Err(schema("generator.num_samples", "must be at least 1")),
        (None, Some(n)) => materialize(&spec, n, g.seed.unwrap_or(0)),
        (None, None) => Err(schema("generator.num_samples", "required unless omega_values is given")),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    schema(format!("line {} column {}", e.line(), e.column()), e)
}

pub fn parse_problem_str(text: &str) -> Result<Problem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(json_error)?;
    let space = file.to_space()?;
    Ok(Problem { file, space })
}

pub fn parse_problem_value(value: &Value) -> Result<Problem> {
    let file = ProblemFile::deserialize(value).map_err(|e| schema("problem", e))?;
    let space = file.to_space()?;
    Ok(Problem { file, space })
}

pub fn parse_problem_path(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_problem_str(&text)
}

/// Names accepted by [`builtin_example`].
pub const BUILTIN_NAMES: [&str; 5] = ["example4_1", "example4_2", "example4_2_perturbed", "identity", "zero"];

/// 0-based entries of the order-3, dimension-5 tensor with degenerate sets
/// `{(0,0,l,a,b)}` and `{(a,b,0,0,0)}`.
pub fn example4_2_entries() -> EntryList {
    vec![
        (vec![0, 2, 2], 1.0),
        (vec![0, 3, 3], -2.0),
        (vec![0, 4, 4], -3.0),
        (vec![1, 2, 2], 1.0),
        (vec![1, 3, 3], -6.0),
        (vec![1, 4, 4], -3.0),
        (vec![2, 0, 2], -1.0),
        (vec![2, 1, 2], -1.0),
        (vec![3, 0, 3], 2.0),
        (vec![3, 1, 3], 6.0),
        (vec![4, 0, 4], 3.0),
        (vec![4, 1, 4], 3.0),
    ]
}

/// `A(w) = w * C_lin + |w| * C_abs`, the order-3, dimension-3 family whose
/// slices are `[[-2w, w-|w|, 0], [w-|w|, -2w, 0], [0, 0, w+|w|]]`,
/// `[[0, 0, 0], [0, w+|w|, -2w], [0, -2w, w+|w|]]` and zero.
pub fn example4_1_generator() -> GeneratorFile {
    let lin = vec![
        (vec![0, 0, 0], -2.0),
        (vec![0, 0, 1], 1.0),
        (vec![0, 1, 0], 1.0),
        (vec![0, 1, 1], -2.0),
        (vec![0, 2, 2], 1.0),
        (vec![1, 1, 1], 1.0),
        (vec![1, 1, 2], -2.0),
        (vec![1, 2, 1], -2.0),
        (vec![1, 2, 2], 1.0),
    ];
    let abs = vec![
        (vec![0, 0, 1], -1.0),
        (vec![0, 1, 0], -1.0),
        (vec![0, 2, 2], 1.0),
        (vec![1, 1, 1], 1.0),
        (vec![1, 2, 2], 1.0),
    ];
    GeneratorFile {
        base: vec![],
        terms: vec![
            TermFile {
                coordinate: 0,
                transform: EntryTransform::Linear,
                entries: lin,
            },
            TermFile {
                coordinate: 0,
                transform: EntryTransform::Abs,
                entries: abs,
            },
        ],
        q_base: vec![0.0; 3],
        q_coefficients: vec![vec![0.0; 3]],
        omega: vec![OmegaDist::Uniform { lo: -0.5, hi: 0.5 }],
        num_samples: None,
        seed: None,
        omega_values: Some(vec![vec![-0.25], vec![0.25]]),
    }
}

fn diagonal_entries(order: usize, dim: usize) -> EntryList {
    (0..dim).map(|i| (vec![i; order], 1.0)).collect()
}

fn meta(name: &str, description: &str, claims: Claims) -> Option<Metadata> {
    Some(Metadata {
        name: Some(name.into()),
        description: Some(description.into()),
        claims,
    })
}

/// Built-in problem files. `order` and `dim` apply to `identity` and
/// `zero` only; the named examples have fixed shapes.
pub fn builtin_example(name: &str, order: usize, dim: usize) -> Result<ProblemFile> {
    let single = |entries: EntryList, dim: usize| {
        Some(vec![SampleFile {
            weight: 1.0,
            entries,
            q: vec![0.0; dim],
        }])
    };
    let file = match name {
        "example4_1" => ProblemFile {
            order: 3,
            dim: 3,
            samples: None,
            generator: Some(example4_1_generator()),
            metadata: meta(
                name,
                "order-3 dimension-3 family with entries in w and |w|, w uniform on [-0.5, 0.5], evaluated at w = -0.25 and w = 0.25",
                Claims {
                    stochastic_r0: Some(true),
                    source: Some("Example 4.1 states the family is stochastic R0".into()),
                    ..Claims::default()
                },
            ),
        },
        "example4_2" => ProblemFile {
            order: 3,
            dim: 5,
            samples: single(example4_2_entries(), 5),
            generator: None,
            metadata: meta(
                name,
                "order-3 dimension-5 tensor with twelve nonzero entries",
                Claims {
                    r0: Some(false),
                    stochastic_r0: Some(false),
                    source: Some("Example 4.2 states the tensor is not R0".into()),
                },
            ),
        },
        "example4_2_perturbed" => ProblemFile {
            order: 3,
            dim: 5,
            samples: None,
            generator: Some(GeneratorFile {
                base: example4_2_entries(),
                terms: vec![TermFile {
                    coordinate: 0,
                    transform: EntryTransform::Linear,
                    entries: vec![(vec![0, 2, 2], 0.5), (vec![2, 0, 2], -0.5), (vec![2, 2, 0], -0.5)],
                }],
                q_base: vec![0.0; 5],
                q_coefficients: vec![vec![0.0; 5]],
                omega: vec![OmegaDist::Normal { mean: 0.0, stddev: 1.0 }],
                num_samples: Some(200),
                seed: Some(0),
                omega_values: None,
            }),
            metadata: meta(
                name,
                "the dimension-5 tensor plus a standard-normal mean-zero perturbation on three entries",
                Claims {
                    stochastic_r0: Some(true),
                    source: Some("Example 4.2 concludes the perturbed tensor is stochastic R0".into()),
                    ..Claims::default()
                },
            ),
        },
        "identity" => ProblemFile {
            order,
            dim,
            samples: single(diagonal_entries(order, dim), dim),
            generator: None,
            metadata: meta(name, "diagonal identity tensor, q = 0", Claims::default()),
        },
        "zero" => ProblemFile {
            order,
            dim,
            samples: single(vec![], dim),
            generator: None,
            metadata: meta(name, "zero tensor, q = 0", Claims::default()),
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown example {other:?}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(file)
}

/// Canonical JSON: sorted keys, two-space indentation, floats with 17
/// significant digits, integers verbatim. Non-finite floats become `null`.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let f = n.as_f64().expect("json number");
                let _ = write!(out, "{f:.16e}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, depth + 1);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let sorted: BTreeMap<&String, &Value> = map.iter().collect();
            out.push_str("{\n");
            for (k, (key, item)) in sorted.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < sorted.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// Output of one CLI run. `config` holds everything needed to reproduce
/// `payload`, including the problem itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub payload: Value,
    pub seed: u64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

pub fn emit_report(report: &RunReport) -> Result<String> {
    to_canonical_json(report)
}

pub fn parse_report(text: &str) -> Result<RunReport> {
    serde_json::from_str(text).map_err(json_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLETON: &str = r#"{
        "order": 3, "dim": 2,
        "samples": [{"weight": 1.0, "entries": [[[0,0,0], 1.0], [[1,1,1], 1.0]], "q": [-1.0, -4.0]}]
    }"#;

    #[test]
    fn minimal_singleton() {
        let p = parse_problem_str(SINGLETON).unwrap();
        assert_eq!(p.space.len(), 1);
        assert_eq!(p.space.realizations()[0].tensor, Tensor::identity(3, 2).unwrap());
    }

    #[test]
    fn weight_sum_error_names_the_field() {
        let text = r#"{"order": 2, "dim": 1, "samples": [
            {"weight": 0.5, "entries": [], "q": [0.0]},
            {"weight": 0.4, "entries": [], "q": [0.0]}]}"#;
        match parse_problem_str(text) {
            Err(Error::Schema { field, message }) => {
                assert_eq!(field, "samples[*].weight");
                assert!(message.contains("0.9"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_precise_errors() {
        let dup = r#"{"order": 2, "dim": 2, "samples": [
            {"weight": 1.0, "entries": [[[0,1], 1.0], [[0,1], 2.0]], "q": [0.0, 0.0]}]}"#;
        assert!(matches!(parse_problem_str(dup), Err(Error::Schema { field, .. }) if field == "samples[0].entries"));
        let range = r#"{"order": 2, "dim": 2, "samples": [
            {"weight": 1.0, "entries": [[[0,2], 1.0]], "q": [0.0, 0.0]}]}"#;
        assert!(matches!(parse_problem_str(range), Err(Error::Schema { field, .. }) if field == "samples[0].entries"));
        let q = r#"{"order": 2, "dim": 2, "samples": [{"weight": 1.0, "entries": [], "q": [0.0]}]}"#;
        assert!(matches!(parse_problem_str(q), Err(Error::Schema { field, .. }) if field == "samples[0].q"));
        let syntax = "{\"order\": 2,\n \"dim\": }";
        assert!(matches!(parse_problem_str(syntax), Err(Error::Schema { field, .. }) if field.starts_with("line 2")));
        let unknown = r#"{"order": 2, "dim": 1, "sample": []}"#;
        assert!(parse_problem_str(unknown).is_err());
    }

    #[test]
    fn builtins() {
        let f = builtin_example("example4_2", 0, 0).unwrap();
        let s = f.to_space().unwrap();
        assert_eq!(s.realizations()[0].tensor.nnz(), 12);
        let s = builtin_example("example4_1", 0, 0).unwrap().to_space().unwrap();
        assert_eq!(s.len(), 2);
        let x = [1.0, 1.0, 0.0];
        let y = s.realizations()[0].tensor.contract_to_vector(&x).unwrap();
        assert!(y.iter().all(|v| v.abs() <= 1e-14));
        let id = builtin_example("identity", 4, 3).unwrap().to_space().unwrap();
        assert_eq!(id.realizations()[0].tensor, Tensor::identity(4, 3).unwrap());
        let z = builtin_example("zero", 3, 2).unwrap().to_space().unwrap();
        assert_eq!(z.realizations()[0].tensor.nnz(), 0);
        assert!(builtin_example("example9", 3, 2).is_err());
    }

    #[test]
    fn canonical_output_is_stable_and_round_trips() {
        for name in BUILTIN_NAMES {
            let f = builtin_example(name, 3, 2).unwrap();
            let a = to_canonical_json(&f).unwrap();
            assert_eq!(a, to_canonical_json(&f).unwrap());
            let p = parse_problem_str(&a).unwrap();
            assert_eq!(p.file, f);
            assert_eq!(p.space, f.to_space().unwrap());
        }
        let s = to_canonical_json(&serde_json::json!({"b": 0.1, "a": [1, 2.5]})).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [1, 2.5000000000000000e0],\n  \"b\": 1.0000000000000001e-1\n}\n"
        );
    }
}
