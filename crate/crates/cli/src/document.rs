//! Instance and decomposition documents.
//!
//! Both are JSON with every number written as a string, either a finite
//! decimal (`"0.25"`) or a fraction (`"1/3"`), so nothing is rounded on the
//! way in or out. Maps are emitted in vertex order, which makes the output of
//! a given input byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use ucat_core::rational::{format_rational, parse_rational};
use ucat_core::sweep::SweepResult;
use ucat_core::tree::TreeError;
use ucat_core::verify::check::refine_onto;
use ucat_core::verify::CheckError;
use ucat_core::{
    Component, Decomposition, EdgeLinearDensity, MetricTree, Rational, TraceEvent, VertexId,
};

use crate::locate::{line_of, Segment};
use crate::path;

pub const TOOL: &str = "ucat";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl DocError {
    fn at(text: &str, path: &[Segment], message: impl Into<String>) -> Self {
        DocError {
            line: Some(line_of(text, path)),
            column: None,
            message: message.into(),
        }
    }

    fn syntax(e: serde_json::Error) -> Self {
        // serde_json appends " at line L column C"; we report those separately.
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        DocError {
            line: Some(e.line()),
            column: Some(e.column()),
            message,
        }
    }

    /// `file:line:column: message`, in the style compilers use.
    pub fn located(&self, file: &str) -> String {
        match (self.line, self.column) {
            (Some(l), Some(c)) => format!("{file}:{l}:{c}: {}", self.message),
            (Some(l), None) => format!("{file}:{l}: {}", self.message),
            _ => format!("{file}: {}", self.message),
        }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for DocError {}

/// A JSON object of string values that keeps file order and rejects
/// repeated keys instead of silently keeping the last one.
#[derive(Debug, Default)]
struct StrictMap(Vec<(String, String)>);

impl<'de> Deserialize<'de> for StrictMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = StrictMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping vertex ids to number strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<StrictMap, A::Error> {
                let mut out: Vec<(String, String)> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    if out.iter().any(|(seen, _)| *seen == k) {
                        return Err(serde::de::Error::custom(format!("duplicate key {k:?}")));
                    }
                    out.push((k, v));
                }
                Ok(StrictMap(out))
            }
        }
        d.deserialize_map(V)
    }
}

impl Serialize for StrictMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl StrictMap {
    fn from_values(values: &BTreeMap<VertexId, Rational>) -> Self {
        StrictMap(
            values
                .iter()
                .map(|(v, x)| (v.to_string(), format_rational(x)))
                .collect(),
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: String,
    w: String,
    length: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    vertices: Vec<String>,
    edges: Vec<RawEdge>,
    density: StrictMap,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTree {
    vertices: Vec<String>,
    edges: Vec<RawEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    mode: String,
    values: StrictMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// `sha256:` followed by the hex digest of the canonical input document.
    pub input_digest: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecomposition {
    tree: RawTree,
    components: Vec<RawComponent>,
    ucat: usize,
    provenance: Provenance,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IdRule {
    /// `[A-Za-z0-9][A-Za-z0-9_-]*`
    User,
    /// User ids plus the `_s<N>` ids that subdivision creates.
    Refined,
}

fn user_id_ok(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn id_ok(s: &str, rule: IdRule) -> bool {
    user_id_ok(s) || (rule == IdRule::Refined && VertexId::new(s).is_synthetic())
}

fn join(prefix: &[Segment], rest: impl IntoIterator<Item = Segment>) -> Vec<Segment> {
    prefix.iter().cloned().chain(rest).collect()
}

fn number(text: &str, at: &[Segment], raw: &str) -> Result<Rational, DocError> {
    parse_rational(raw)
        .map_err(|e| DocError::at(text, at, format!("{raw:?} is not an exact number: {e}")))
}

fn build_tree(
    text: &str,
    prefix: &[Segment],
    vertices: &[String],
    edges: &[RawEdge],
    rule: IdRule,
) -> Result<MetricTree, DocError> {
    for (i, v) in vertices.iter().enumerate() {
        if !id_ok(v, rule) {
            let why = if v.starts_with('_') {
                "ids starting with '_' are reserved for generated vertices"
            } else {
                "ids must match [A-Za-z0-9][A-Za-z0-9_-]*"
            };
            return Err(DocError::at(
                text,
                &join(prefix, path!["vertices", i]),
                format!("invalid vertex id {v:?}: {why}"),
            ));
        }
    }
    let mut parsed = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let len = number(text, &join(prefix, path!["edges", i, "length"]), &e.length)?;
        parsed.push((
            VertexId::new(e.u.as_str()),
            VertexId::new(e.w.as_str()),
            len,
        ));
    }
    MetricTree::new(vertices.iter().map(|v| VertexId::new(v.as_str())), parsed).map_err(|err| {
        let vertex_index = |v: &VertexId| vertices.iter().rposition(|s| s == v.as_str());
        let edge_index = |u: &VertexId, w: &VertexId| {
            edges
                .iter()
                .position(|e| e.u == u.as_str() && e.w == w.as_str())
        };
        let rest = match &err {
            TreeError::InvalidVertexId(s) => {
                vertex_index(&VertexId::new(s.as_str())).map(|i| path!["vertices", i].to_vec())
            }
            TreeError::DuplicateVertexId(v) | TreeError::Disconnected(v, _) => {
                vertex_index(v).map(|i| path!["vertices", i].to_vec())
            }
            TreeError::UnknownEndpoint(u, w, end) => {
                let field = if end == u { "u" } else { "w" };
                edge_index(u, w).map(|i| path!["edges", i, field].to_vec())
            }
            TreeError::NonPositiveLength(u, w, _) => {
                edge_index(u, w).map(|i| path!["edges", i, "length"].to_vec())
            }
            TreeError::CycleDetected(u, w) => edge_index(u, w).map(|i| path!["edges", i].to_vec()),
            _ => None,
        };
        let at = join(prefix, rest.unwrap_or_else(|| path!["vertices"].to_vec()));
        DocError::at(text, &at, err.to_string())
    })
}

fn build_values(
    text: &str,
    at: &[Segment],
    tree: &MetricTree,
    raw: &StrictMap,
) -> Result<BTreeMap<VertexId, Rational>, DocError> {
    let mut values = BTreeMap::new();
    for (k, v) in &raw.0 {
        let here = join(at, path![k.as_str()]);
        let id = VertexId::new(k.as_str());
        if !tree.contains(&id) {
            return Err(DocError::at(
                text,
                &here,
                format!("{k:?} is not a vertex of the tree"),
            ));
        }
        values.insert(id, number(text, &here, v)?);
    }
    Ok(values)
}

fn raw_tree(tree: &MetricTree) -> RawTree {
    RawTree {
        vertices: tree.vertices().map(|v| v.to_string()).collect(),
        edges: tree
            .edges()
            .map(|(u, w, l)| RawEdge {
                u: u.to_string(),
                w: w.to_string(),
                length: format_rational(l),
            })
            .collect(),
    }
}

fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn parse_instance(text: &str) -> Result<EdgeLinearDensity, DocError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(DocError::syntax)?;
    let tree = Arc::new(build_tree(
        text,
        &[],
        &raw.vertices,
        &raw.edges,
        IdRule::User,
    )?);
    let values = build_values(text, &path!["density"], &tree, &raw.density)?;
    if let Some(v) = tree.vertices().find(|v| !values.contains_key(*v)) {
        return Err(DocError::at(
            text,
            &path!["density"],
            format!("no density value for vertex {v}"),
        ));
    }
    EdgeLinearDensity::new(tree, values).map_err(|e| {
        let at = match &e {
            ucat_core::density::DensityError::NegativeValue(v, _) => {
                path!["density", v.as_str()].to_vec()
            }
            _ => path!["density"].to_vec(),
        };
        DocError::at(text, &at, e.to_string())
    })
}

pub fn serialize_instance(f: &EdgeLinearDensity) -> String {
    let tree = raw_tree(f.tree());
    to_text(&RawInstance {
        vertices: tree.vertices,
        edges: tree.edges,
        density: StrictMap::from_values(f.values()),
    })
}

/// Digest of the canonical form, so formatting changes do not alter it.
pub fn input_digest(f: &EdgeLinearDensity) -> String {
    let hash = Sha256::digest(serialize_instance(f).as_bytes());
    format!("sha256:{}", hex::encode(hash))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionDocument {
    pub tree: Arc<MetricTree>,
    pub components: Vec<Component>,
    pub provenance: Provenance,
}

impl DecompositionDocument {
    pub fn new(input: &EdgeLinearDensity, d: &Decomposition) -> Self {
        DecompositionDocument {
            tree: d.refined_tree.clone(),
            components: d.components.clone(),
            provenance: Provenance {
                tool: TOOL.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                input_digest: input_digest(input),
            },
        }
    }

    pub fn ucat(&self) -> usize {
        self.components.len()
    }

    /// Rebuilds the library type against `input`, which must be the density
    /// this document was computed from.
    pub fn to_decomposition(&self, input: &EdgeLinearDensity) -> Result<Decomposition, CheckError> {
        let values = refine_onto(input, &self.tree)?;
        let input_on_refined = EdgeLinearDensity::new(self.tree.clone(), values)
            .map_err(|e| CheckError::TreeMismatch(e.to_string()))?;
        Ok(Decomposition {
            refined_tree: self.tree.clone(),
            components: self.components.clone(),
            input_on_refined,
        })
    }
}

pub fn parse_decomposition(text: &str) -> Result<DecompositionDocument, DocError> {
    let raw: RawDecomposition = serde_json::from_str(text).map_err(DocError::syntax)?;
    let tree = Arc::new(build_tree(
        text,
        &path!["tree"],
        &raw.tree.vertices,
        &raw.tree.edges,
        IdRule::Refined,
    )?);
    let mut components = Vec::with_capacity(raw.components.len());
    for (i, c) in raw.components.iter().enumerate() {
        let mode = VertexId::new(c.mode.as_str());
        if !tree.contains(&mode) {
            return Err(DocError::at(
                text,
                &path!["components", i, "mode"],
                format!("mode {mode} is not a vertex of the tree"),
            ));
        }
        let values = build_values(text, &path!["components", i, "values"], &tree, &c.values)?;
        components.push(Component { mode, values });
    }
    if raw.ucat != components.len() {
        return Err(DocError::at(
            text,
            &path!["ucat"],
            format!(
                "ucat is {} but {} components are listed",
                raw.ucat,
                components.len()
            ),
        ));
    }
    Ok(DecompositionDocument {
        tree,
        components,
        provenance: raw.provenance,
    })
}

pub fn serialize_decomposition(doc: &DecompositionDocument) -> String {
    to_text(&RawDecomposition {
        tree: raw_tree(&doc.tree),
        components: doc
            .components
            .iter()
            .map(|c| RawComponent {
                mode: c.mode.to_string(),
                values: StrictMap::from_values(&c.values),
            })
            .collect(),
        ucat: doc.ucat(),
        provenance: doc.provenance.clone(),
    })
}

#[derive(Serialize)]
struct RawSubdivision {
    vertex: String,
    from: String,
    to: String,
    t: String,
}

#[derive(Serialize)]
struct RawSweep {
    tree: RawTree,
    origin: String,
    density: StrictMap,
    h: StrictMap,
    remainder: StrictMap,
    subdivisions: Vec<RawSubdivision>,
}

pub fn serialize_sweep(r: &SweepResult) -> String {
    to_text(&RawSweep {
        tree: raw_tree(r.refined_tree()),
        origin: r.origin.to_string(),
        density: StrictMap::from_values(r.f_refined.values()),
        h: StrictMap::from_values(r.h.values()),
        remainder: StrictMap::from_values(r.remainder.values()),
        subdivisions: r
            .subdivisions
            .iter()
            .map(|s| RawSubdivision {
                vertex: s.vertex.to_string(),
                from: s.from.to_string(),
                to: s.to.to_string(),
                t: format_rational(&s.t),
            })
            .collect(),
    })
}

/// One compact JSON object per line.
pub fn trace_line(e: &TraceEvent) -> String {
    serde_json::json!({
        "iteration": e.iteration,
        "forced": e.forced.as_str(),
        "subdivided": e.subdivided.iter().map(VertexId::as_str).collect::<Vec<_>>(),
        "remaining_mass": format_rational(&e.remaining_mass),
    })
    .to_string()
}
