//! JSON interchange: quadruple files, pencil files and structure reports.
//!
//! Matrices are row-major arrays of `[re, im]` pairs; each block `X(λ)` is
//! stored by its coefficients `X0`, `X1` with `X(λ) = λ·X1 − X0`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::mcmillan::{analyze, degree_sum_check, McMillanStructure, MinimalityPolicy};
use crate::minreal::{is_strongly_minimal, MinimalityReport, ReductionRecord, Side};
use crate::pencil::{system_pencil, Pencil, SystemQuadruple};
use crate::staircase::kronecker_structure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleFile {
    pub schema: u32,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A0")]
    pub a0: Vec<[f64; 2]>,
    #[serde(rename = "A1")]
    pub a1: Vec<[f64; 2]>,
    #[serde(rename = "B0")]
    pub b0: Vec<[f64; 2]>,
    #[serde(rename = "B1")]
    pub b1: Vec<[f64; 2]>,
    #[serde(rename = "C0")]
    pub c0: Vec<[f64; 2]>,
    #[serde(rename = "C1")]
    pub c1: Vec<[f64; 2]>,
    #[serde(rename = "D0")]
    pub d0: Vec<[f64; 2]>,
    #[serde(rename = "D1")]
    pub d1: Vec<[f64; 2]>,
    /// Output factors of a reduction: `R_min = W_left·R·W_right`.
    #[serde(rename = "W_left", default, skip_serializing_if = "Option::is_none")]
    pub w_left: Option<MatrixData>,
    #[serde(rename = "W_right", default, skip_serializing_if = "Option::is_none")]
    pub w_right: Option<MatrixData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixData {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixData { rows: m.nrows(), cols: m.ncols(), data: flatten(m) }
    }

    pub fn to_matrix(&self, name: &str) -> Result<ComplexMatrix> {
        unflatten(name, &self.data, self.rows, self.cols)
    }
}

fn flatten(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn unflatten(name: &str, data: &[[f64; 2]], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if data.len() != rows * cols {
        return Err(Error::Input(format!(
            "field {name}: expected {} entries ({rows}x{cols}), found {}",
            rows * cols,
            data.len()
        )));
    }
    if let Some(k) = data.iter().position(|v| !v[0].is_finite() || !v[1].is_finite()) {
        return Err(Error::Input(format!("field {name}: entry {k} is not finite")));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        let v = data[i * cols + j];
        C64::new(v[0], v[1])
    }))
}

impl QuadrupleFile {
    pub fn from_quadruple(q: &SystemQuadruple) -> Self {
        QuadrupleFile {
            schema: SCHEMA_VERSION,
            d: q.order(),
            m: q.outputs(),
            n: q.inputs(),
            a0: flatten(&q.a.l0),
            a1: flatten(&q.a.l1),
            b0: flatten(&q.b.l0),
            b1: flatten(&q.b.l1),
            c0: flatten(&q.c.l0),
            c1: flatten(&q.c.l1),
            d0: flatten(&q.d.l0),
            d1: flatten(&q.d.l1),
            w_left: None,
            w_right: None,
        }
    }

    pub fn to_quadruple(&self) -> Result<SystemQuadruple> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Input(format!("field schema: unsupported version {}", self.schema)));
        }
        let (d, m, n) = (self.d, self.m, self.n);
        let block = |n0: &str, c0: &[[f64; 2]], n1: &str, c1: &[[f64; 2]], r: usize, c: usize| -> Result<Pencil> {
            Pencil::new(unflatten(n0, c0, r, c)?, unflatten(n1, c1, r, c)?)
        };
        SystemQuadruple::new(
            block("A0", &self.a0, "A1", &self.a1, d, d)?,
            block("B0", &self.b0, "B1", &self.b1, d, n)?,
            block("C0", &self.c0, "C1", &self.c1, m, d)?,
            block("D0", &self.d0, "D1", &self.d1, m, n)?,
        )
    }
}

/// Parses a quadruple file; errors carry the line/column or field name.
pub fn parse_quadruple_str(text: &str) -> Result<SystemQuadruple> {
    let file: QuadrupleFile =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("parse error at line {}, column {}: {e}", e.line(), e.column())))?;
    file.to_quadruple()
}

pub fn parse_quadruple(path: &Path) -> Result<SystemQuadruple> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_quadruple_str(&text)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

pub fn write_quadruple(q: &SystemQuadruple) -> String {
    to_json(&QuadrupleFile::from_quadruple(q))
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilFile {
    pub schema: u32,
    pub rows: usize,
    pub cols: usize,
    #[serde(rename = "L0")]
    pub l0: Vec<[f64; 2]>,
    #[serde(rename = "L1")]
    pub l1: Vec<[f64; 2]>,
}

impl PencilFile {
    pub fn from_pencil(p: &Pencil) -> Self {
        PencilFile { schema: SCHEMA_VERSION, rows: p.nrows(), cols: p.ncols(), l0: flatten(&p.l0), l1: flatten(&p.l1) }
    }

    pub fn to_pencil(&self) -> Result<Pencil> {
        Pencil::new(unflatten("L0", &self.l0, self.rows, self.cols)?, unflatten("L1", &self.l1, self.rows, self.cols)?)
    }
}

/// Parses either a pencil file or a quadruple file; a quadruple becomes its system pencil.
pub fn parse_pencil_str(text: &str) -> Result<Pencil> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("parse error at line {}, column {}: {e}", e.line(), e.column())))?;
    if value.get("L0").is_some() {
        let file: PencilFile = serde_json::from_value(value).map_err(|e| Error::Input(e.to_string()))?;
        file.to_pencil()
    } else {
        Ok(system_pencil(&parse_quadruple_str(text)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub side: Side,
    pub deflated: usize,
    pub infinite: usize,
    pub finite: usize,
}

impl RecordSummary {
    pub fn new(rec: &ReductionRecord, tol: f64, seed: u64) -> Self {
        let (infinite, finite) = match kronecker_structure(&rec.deflated, tol, seed) {
            Ok(k) => (k.infinite_count(), k.finite_count()),
            Err(_) => (0, 0),
        };
        RecordSummary { side: rec.side, deflated: rec.d_deflated(), infinite, finite }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSum {
    pub polar: usize,
    pub zero: usize,
    pub minimal_indices: usize,
    pub holds: bool,
}

impl DegreeSum {
    pub fn of(s: &McMillanStructure) -> Self {
        DegreeSum {
            polar: s.polar_degree(),
            zero: s.zero_degree(),
            minimal_indices: s.minimal_index_sum(),
            holds: degree_sum_check(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    pub tol: f64,
    pub seed: u64,
    pub reduced: bool,
    pub minimality: MinimalityReport,
    pub reductions: Vec<RecordSummary>,
    pub order: usize,
    pub reduced_order: usize,
    pub structure: McMillanStructure,
    pub degree_sum: DegreeSum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// Runs the structure pipeline on `q`; with `reduce` false the input is
/// taken as strongly minimal.
pub fn structure_report(q: &SystemQuadruple, input: &[u8], tol: f64, seed: u64, reduce: bool) -> Result<StructureReport> {
    let policy = if reduce { MinimalityPolicy::Reduce } else { MinimalityPolicy::Assume };
    let analysis = analyze(q, tol, seed, policy)?;
    let minimality = match analysis.minimality {
        Some(m) => m,
        None => is_strongly_minimal(q, tol, seed)?,
    };
    let reductions: Vec<RecordSummary> = analysis
        .reduction
        .as_ref()
        .map(|r| r.records.iter().map(|rec| RecordSummary::new(rec, tol, seed)).collect())
        .unwrap_or_default();
    let reduced_order = analysis.reduction.as_ref().map_or(q.order(), |r| r.system.order());
    Ok(StructureReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input_sha256: digest(input),
        tol,
        seed,
        reduced: reduce,
        minimality,
        reductions,
        order: q.order(),
        reduced_order,
        degree_sum: DegreeSum::of(&analysis.structure),
        structure: analysis.structure,
        timing_ms: None,
    })
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.10e}", z.re)
    } else {
        format!("{:.10e}{:+.10e}i", z.re, z.im)
    }
}

impl StructureReport {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let s = &self.structure;
        let mut out = String::new();
        out += &format!("{} {}  input sha256 {}\n", self.tool, self.version, self.input_sha256);
        out += &format!("tol {:e}  seed {}\n", self.tol, self.seed);
        out += &format!(
            "strongly minimal: {} (controllable {}, observable {})\n",
            yn(self.minimality.strongly_minimal()),
            yn(self.minimality.strongly_controllable),
            yn(self.minimality.strongly_observable)
        );
        for r in &self.reductions {
            let side = match r.side {
                Side::Controllable => "controllable",
                Side::Observable => "observable",
            };
            out += &format!("deflated ({side}): {} ({} infinite, {} finite)\n", r.deflated, r.infinite, r.finite);
        }
        out += &format!("order {} -> {}\n", self.order, self.reduced_order);
        out += &format!("normal rank {}\n", s.normal_rank);
        let list = |v: Vec<C64>| if v.is_empty() { "none".to_string() } else { v.into_iter().map(fmt_c).collect::<Vec<_>>().join(", ") };
        out += &format!("finite poles ({}): {}\n", s.finite_pole_degree(), list(s.finite_poles()));
        out += &format!("finite zeros ({}): {}\n", s.finite_zero_degree(), list(s.finite_zeros()));
        for p in &s.finite {
            out += &format!("  at {}: {:?}\n", fmt_c(p.value), p.indices);
        }
        out += &format!("infinity: {:?}\n", s.infinity);
        out += &format!("minimal indices: right {:?}, left {:?}\n", s.right_minimal, s.left_minimal);
        let d = &self.degree_sum;
        out += &format!(
            "degree sum: polar {} = zero {} + minimal {}: {}\n",
            d.polar,
            d.zero,
            d.minimal_indices,
            if d.holds { "holds" } else { "VIOLATED" }
        );
        if s.ambiguous {
            out += "warning: some rank decision was close to its threshold\n";
        }
        if let Some(t) = self.timing_ms {
            out += &format!("time {t:.3} ms\n");
        }
        out
    }
}
