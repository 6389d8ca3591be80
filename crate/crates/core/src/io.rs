//! Shared file formats: the measure JSON document, the potential-samples CSV,
//! and report JSON lines. All numeric fields are serialized with 17
//! significant digits so identical inputs produce byte-identical output.

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, SpherePoint};
use crate::potential::PotentialSamples;
use crate::rigidity::PropertyReport;
use serde::Deserialize;
use serde_json::{Map, Value};
use std::f64::consts::PI;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "wsl-1";

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x:.16e}")
}

/// A JSON number node carrying exactly the 17-digit literal.
pub fn json_num(x: f64) -> Value {
    let literal = fmt_f64(x);
    Value::Number(
        serde_json::from_str(&literal).expect("formatted float is a valid JSON number"),
    )
}

/// Serialize a measure as the shared document
/// `{"schema":"wsl-1","dim":n,"points":[[..]],"weights":[..]}`
/// with `dim` the sphere dimension (ambient dimension minus one).
pub fn measure_to_json(mu: &DiscreteMeasure) -> String {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::String(SCHEMA.into()));
    doc.insert("dim".into(), Value::from(mu.ambient_dim() - 1));
    doc.insert(
        "points".into(),
        Value::Array(
            mu.points()
                .iter()
                .map(|p| Value::Array(p.iter().map(|&x| json_num(x)).collect()))
                .collect(),
        ),
    );
    doc.insert(
        "weights".into(),
        Value::Array(mu.weights().iter().map(|&w| json_num(w)).collect()),
    );
    Value::Object(doc).to_string()
}

#[derive(Deserialize)]
struct MeasureDoc {
    schema: Option<String>,
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Parse and validate the measure document. Weights must sum to 1 within
/// 1e-9 on ingestion; they are then normalized exactly.
pub fn measure_from_json(text: &str) -> Result<DiscreteMeasure> {
    let doc: MeasureDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
    if let Some(schema) = &doc.schema {
        if schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {schema:?}, expected {SCHEMA:?}"
            )));
        }
    }
    if doc.dim < 1 {
        return Err(Error::Parse("dim must be >= 1".into()));
    }
    for (i, p) in doc.points.iter().enumerate() {
        if p.len() != doc.dim + 1 {
            return Err(Error::Parse(format!(
                "point {i} has {} coordinates, expected dim + 1 = {}",
                p.len(),
                doc.dim + 1
            )));
        }
    }
    if doc.points.len() != doc.weights.len() {
        return Err(Error::Parse(format!(
            "{} points vs {} weights",
            doc.points.len(),
            doc.weights.len()
        )));
    }
    let total: f64 = doc.weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parse(format!(
            "weights sum to {total:.17}, expected 1 within 1e-9"
        )));
    }
    DiscreteMeasure::normalized(doc.points, doc.weights)
}

/// Angle of a circle point in [0, 2 pi).
fn circle_angle(p: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), 2);
    p[1].atan2(p[0]).rem_euclid(2.0 * PI)
}

/// Potential CSV: `theta,value` lines for circle sites, otherwise
/// `x1,..,xk,value` with ambient coordinates.
pub fn potential_to_csv(samples: &PotentialSamples) -> String {
    let ambient = samples.sites()[0].coords().len();
    let mut out = String::new();
    if ambient == 2 {
        out.push_str("theta,value\n");
        for (site, &v) in samples.sites().iter().zip(samples.values()) {
            out.push_str(&format!(
                "{},{}\n",
                fmt_f64(circle_angle(site.coords())),
                fmt_f64(v)
            ));
        }
    } else {
        let header: Vec<String> = (1..=ambient).map(|i| format!("x{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",value\n");
        for (site, &v) in samples.sites().iter().zip(samples.values()) {
            let coords: Vec<String> = site.coords().iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&coords.join(","));
            out.push(',');
            out.push_str(&fmt_f64(v));
            out.push('\n');
        }
    }
    out
}

/// Parse a potential CSV (either header form). The order `p` is not stored in
/// the file and must be supplied; values are range-checked against [0, 2^p].
pub fn potential_from_csv(text: &str, p: f64) -> Result<PotentialSamples> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty potential CSV".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let is_theta = columns == ["theta", "value"];
    if !is_theta {
        let k = columns.len() - 1;
        let expect: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
        if k < 2
            || columns.last() != Some(&"value")
            || columns[..k] != expect.iter().map(String::as_str).collect::<Vec<_>>()[..]
        {
            return Err(Error::Parse(format!(
                "unrecognized potential CSV header {header:?}"
            )));
        }
    }
    let mut sites = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse(format!(
                "line {}: {} fields, expected {}",
                lineno + 2,
                fields.len(),
                columns.len()
            )));
        }
        let nums: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            })
            .collect::<Result<_>>()?;
        let (site, value) = if is_theta {
            let theta = nums[0];
            (
                SpherePoint::new(vec![theta.cos(), theta.sin()])
                    .expect("angles map to unit vectors"),
                nums[1],
            )
        } else {
            let coords = nums[..nums.len() - 1].to_vec();
            (
                SpherePoint::new(coords).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?,
                nums[nums.len() - 1],
            )
        };
        sites.push(site);
        values.push(value);
    }
    PotentialSamples::ingest(sites, values, p)
}

/// One report as a JSON line:
/// `{"name":..,"inputs_digest":..,"residual":..,"tolerance":..,"passed":..,"notes":..}`.
pub fn report_to_json_line(report: &PropertyReport) -> String {
    let mut doc = Map::new();
    doc.insert("name".into(), Value::String(report.name.clone()));
    doc.insert(
        "inputs_digest".into(),
        Value::String(report.inputs_digest.clone()),
    );
    doc.insert("residual".into(), json_num(report.residual));
    doc.insert("tolerance".into(), json_num(report.tolerance));
    doc.insert("passed".into(), Value::Bool(report.passed));
    doc.insert("notes".into(), Value::String(report.notes.clone()));
    Value::Object(doc).to_string()
}

/// Canonical measure serialization used for digests: atoms sorted
/// lexicographically by coordinates, every number with 17 significant digits.
pub fn canonical_measure_string(mu: &DiscreteMeasure) -> String {
    let mut atoms: Vec<(Vec<f64>, f64)> = mu
        .points()
        .iter()
        .cloned()
        .zip(mu.weights().iter().copied())
        .collect();
    atoms.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    atoms
        .iter()
        .map(|(p, w)| {
            let coords: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
            format!("[{}]:{}", coords.join(","), fmt_f64(*w))
        })
        .collect::<Vec<_>>()
        .join(";")
}
