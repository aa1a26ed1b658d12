use std::fmt::{self, Write};

use serde_json::{Map, Value};

use super::{Instance, Knowledge, Request, Variant};
use crate::metric::{DistanceMatrix, MetricSpace, Point};
use crate::numfmt::g17;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeError {
    /// JSON path of the offending entry, empty at top level.
    pub path: String,
    pub message: String,
}

impl DecodeError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{} (at {})", self.message, self.path)
        }
    }
}

impl std::error::Error for DecodeError {}

/// Canonical text for `inst`. Field order is fixed and numbers use 17
/// significant digits, so equal instances encode to equal bytes.
pub fn encode(inst: &Instance) -> String {
    let mut s = String::new();
    s.push_str("{\n  \"space\": ");
    s.push_str(&encode_space(&inst.space));
    let _ = write!(s, ",\n  \"variant\": \"{}\"", inst.variant.name());
    let _ = write!(s, ",\n  \"knowledge\": \"{}\"", inst.knowledge.name());
    s.push_str(",\n  \"requests\": [");
    for (i, r) in inst.requests.iter().enumerate() {
        s.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            s,
            "    {{\"id\": {}, \"point\": {}, \"release\": {}}}",
            r.id,
            encode_point(&r.point),
            g17(r.release)
        );
    }
    if !inst.requests.is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}

fn encode_space(space: &MetricSpace) -> String {
    match space {
        MetricSpace::SemiLine => "{\"kind\": \"semiline\"}".into(),
        MetricSpace::Line => "{\"kind\": \"line\"}".into(),
        MetricSpace::Ring { circumference } => {
            format!("{{\"kind\": \"ring\", \"circumference\": {}}}", g17(*circumference))
        }
        MetricSpace::Star { rays } => format!("{{\"kind\": \"star\", \"rayCount\": {rays}}}"),
        MetricSpace::General(m) => {
            let rows: Vec<String> = m
                .rows()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|d| g17(*d)).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            format!(
                "{{\"kind\": \"general\", \"matrix\": [{}], \"symmetric\": {}}}",
                rows.join(", "),
                m.is_symmetric()
            )
        }
    }
}

/// JSON text for a single point, in the shape the instance format uses.
pub fn encode_point(p: &Point) -> String {
    match *p {
        Point::Coord(x) | Point::Arc(x) => g17(x),
        Point::Ray { ray, depth } => format!("{{\"ray\": {ray}, \"depth\": {}}}", g17(depth)),
        Point::Node(v) => v.to_string(),
        Point::Edge { from, to, traveled } => {
            format!("{{\"from\": {from}, \"to\": {to}, \"traveled\": {}}}", g17(traveled))
        }
    }
}

/// Parses an instance document. Structural problems are reported with the
/// path of the first bad entry; semantic checks are left to
/// [`super::validate_instance`].
pub fn decode(text: &str) -> Result<Instance, DecodeError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        DecodeError::new("", format!("syntax error at line {} column {}: {e}", e.line(), e.column()))
    })?;
    let top = as_object(&doc, "")?;
    let space = decode_space(field(top, "space", "")?)?;
    let variant_text = as_str(field(top, "variant", "")?, "variant")?;
    let variant = Variant::from_name(variant_text)
        .ok_or_else(|| DecodeError::new("variant", format!("unknown variant: {variant_text}")))?;
    let knowledge = match top.get("knowledge") {
        None => Knowledge::LocationsKnown,
        Some(v) => {
            let k = as_str(v, "knowledge")?;
            Knowledge::from_name(k)
                .ok_or_else(|| DecodeError::new("knowledge", format!("unknown knowledge model: {k}")))?
        }
    };
    let list = field(top, "requests", "")?
        .as_array()
        .ok_or_else(|| DecodeError::new("requests", "expected an array"))?;
    let mut requests = Vec::with_capacity(list.len());
    for (i, entry) in list.iter().enumerate() {
        let path = format!("requests[{i}]");
        let obj = as_object(entry, &path)?;
        let id = as_index(field(obj, "id", &path)?, &format!("{path}.id"))?;
        let point = decode_point(&space, field(obj, "point", &path)?, &format!("{path}.point"))?;
        let release = as_f64(field(obj, "release", &path)?, &format!("{path}.release"))?;
        requests.push(Request { id, point, release });
    }
    Ok(Instance { space, variant, knowledge, requests })
}

fn decode_space(v: &Value) -> Result<MetricSpace, DecodeError> {
    let obj = as_object(v, "space")?;
    let kind = as_str(field(obj, "kind", "space")?, "space.kind")?;
    match kind {
        "semiline" => Ok(MetricSpace::SemiLine),
        "line" => Ok(MetricSpace::Line),
        "ring" => Ok(MetricSpace::Ring {
            circumference: as_f64(field(obj, "circumference", "space")?, "space.circumference")?,
        }),
        "star" => Ok(MetricSpace::Star { rays: as_index(field(obj, "rayCount", "space")?, "space.rayCount")? }),
        "general" => {
            let rows = field(obj, "matrix", "space")?
                .as_array()
                .ok_or_else(|| DecodeError::new("space.matrix", "expected an array of rows"))?;
            let mut matrix = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let path = format!("space.matrix[{i}]");
                let cells = row.as_array().ok_or_else(|| DecodeError::new(&path, "expected an array"))?;
                let mut out = Vec::with_capacity(cells.len());
                for (j, c) in cells.iter().enumerate() {
                    out.push(as_f64(c, &format!("{path}[{j}]"))?);
                }
                matrix.push(out);
            }
            let symmetric = match obj.get("symmetric") {
                None => true,
                Some(s) => s
                    .as_bool()
                    .ok_or_else(|| DecodeError::new("space.symmetric", "expected a boolean"))?,
            };
            DistanceMatrix::from_rows(matrix, symmetric)
                .map(MetricSpace::General)
                .map_err(|e| DecodeError::new("space.matrix", e.to_string()))
        }
        other => Err(DecodeError::new("space.kind", format!("unknown space kind: {other}"))),
    }
}

fn decode_point(space: &MetricSpace, v: &Value, path: &str) -> Result<Point, DecodeError> {
    match space {
        MetricSpace::SemiLine | MetricSpace::Line => Ok(Point::Coord(as_f64(v, path)?)),
        MetricSpace::Ring { .. } => Ok(Point::Arc(as_f64(v, path)?)),
        MetricSpace::Star { .. } => {
            let obj = as_object(v, path)?;
            Ok(Point::Ray {
                ray: as_index(field(obj, "ray", path)?, &format!("{path}.ray"))?,
                depth: as_f64(field(obj, "depth", path)?, &format!("{path}.depth"))?,
            })
        }
        MetricSpace::General(_) => Ok(Point::Node(as_index(v, path)?)),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value, DecodeError> {
    obj.get(name).ok_or_else(|| DecodeError::new(path, format!("missing field: {name}")))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, DecodeError> {
    v.as_object().ok_or_else(|| DecodeError::new(path, "expected an object"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, DecodeError> {
    v.as_str().ok_or_else(|| DecodeError::new(path, "expected a string"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64, DecodeError> {
    v.as_f64().ok_or_else(|| DecodeError::new(path, "expected a number"))
}

fn as_index(v: &Value, path: &str) -> Result<usize, DecodeError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| DecodeError::new(path, "expected a non-negative integer"))
}
