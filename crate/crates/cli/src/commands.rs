//! The subcommands, written against plain writers so tests can drive them
//! without spawning a process.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use ucat_core::sweep::sweep;
use ucat_core::verify::oracle::OracleError;
use ucat_core::verify::{check_decomposition, gen_instance, ucat_oracle};
use ucat_core::{decompose, EdgeLinearDensity, VertexId};

use crate::document::{
    input_digest, parse_decomposition, parse_instance, serialize_decomposition, serialize_instance,
    serialize_sweep, trace_line, DecompositionDocument,
};
use crate::render::render_dot;

/// Oracle enumeration grows quickly past this many vertices.
pub const ORACLE_COMFORT_VERTICES: usize = 8;

#[derive(Debug, Error)]
pub enum Failure {
    /// Unreadable, malformed or inconsistent input.
    #[error("{0}")]
    Input(String),
    /// A decomposition that does not check out. The report is already printed.
    #[error("the decomposition failed the check")]
    Check,
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{0}")]
    Bound(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check | Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Bound(_) => 3,
        }
    }
}

fn io_failure(what: &str, e: io::Error) -> Failure {
    Failure::Input(format!("{what}: {e}"))
}

fn internal<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Internal(e.to_string())
}

/// Reads a file, or standard input for `-`.
fn read_source(path: &Path) -> Result<String, Failure> {
    let name = path.display().to_string();
    if name == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_failure("<stdin>", e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(&name, e))
    }
}

fn load_instance(path: &Path) -> Result<EdgeLinearDensity, Failure> {
    let text = read_source(path)?;
    parse_instance(&text).map_err(|e| Failure::Input(e.located(&path.display().to_string())))
}

fn load_decomposition(path: &Path) -> Result<DecompositionDocument, Failure> {
    let text = read_source(path)?;
    parse_decomposition(&text).map_err(|e| Failure::Input(e.located(&path.display().to_string())))
}

pub fn decompose_cmd(
    input: &Path,
    output: Option<&Path>,
    render: Option<&Path>,
    trace: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let f = load_instance(input)?;
    let (d, events) = decompose(&f).map_err(internal)?;
    if trace {
        for e in &events {
            writeln!(err, "{}", trace_line(e)).map_err(internal)?;
        }
    }
    let report = check_decomposition(&f, &d).map_err(internal)?;
    if !report.overall {
        return Err(Failure::Internal(format!(
            "produced decomposition does not check out:\n{report}"
        )));
    }
    let text = serialize_decomposition(&DecompositionDocument::new(&f, &d));
    match output {
        Some(p) => fs::write(p, &text).map_err(|e| io_failure(&p.display().to_string(), e))?,
        None => out.write_all(text.as_bytes()).map_err(internal)?,
    }
    if let Some(p) = render {
        fs::write(p, render_dot(&d)).map_err(|e| io_failure(&p.display().to_string(), e))?;
    }
    Ok(())
}

pub fn ucat_cmd(input: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let f = load_instance(input)?;
    let k = ucat_core::ucat(&f).map_err(internal)?;
    writeln!(out, "{k}").map_err(internal)
}

pub fn check_cmd(
    input: &Path,
    decomposition: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let f = load_instance(input)?;
    let doc = load_decomposition(decomposition)?;
    let d = doc
        .to_decomposition(&f)
        .map_err(|e| Failure::Input(format!("{}: {e}", decomposition.display())))?;
    if doc.provenance.input_digest != input_digest(&f) {
        writeln!(
            err,
            "warning: the decomposition was computed from a different input document"
        )
        .map_err(internal)?;
    }
    let report = check_decomposition(&f, &d).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(out, "{report}").map_err(internal)?;
    if report.overall {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

pub fn oracle_cmd(
    input: &Path,
    max_k: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let f = load_instance(input)?;
    let n = f.tree().vertex_count();
    if n > ORACLE_COMFORT_VERTICES {
        writeln!(
            err,
            "warning: {n} vertices; the oracle enumerates mode multisets and may take a long time beyond {ORACLE_COMFORT_VERTICES}"
        )
        .map_err(internal)?;
    }
    match ucat_oracle(&f, max_k) {
        Ok(k) => writeln!(out, "{k}").map_err(internal),
        Err(e @ OracleError::ExceedsKMax(_)) => Err(Failure::Bound(e.to_string())),
        Err(e) => Err(internal(e)),
    }
}

pub fn sweep_cmd(input: &Path, vertex: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let f = load_instance(input)?;
    let v = VertexId::new(vertex);
    if !f.tree().contains(&v) {
        return Err(Failure::Input(format!("unknown vertex {vertex}")));
    }
    let r = sweep(&f, &v).map_err(internal)?;
    out.write_all(serialize_sweep(&r).as_bytes())
        .map_err(internal)
}

pub fn gen_cmd(
    seed: u64,
    vertices: usize,
    max_value: u64,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if vertices == 0 {
        return Err(Failure::Input("--vertices must be at least 1".to_string()));
    }
    let (_, f) = gen_instance(seed, vertices, max_value);
    out.write_all(serialize_instance(&f).as_bytes())
        .map_err(internal)
}
