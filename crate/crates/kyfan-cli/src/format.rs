//! On-disk format for states, operators, vectors, POVMs, and Kraus channels.
//!
//! One JSON document per file, tagged by `kind`, holding dimensions and
//! separate real/imaginary arrays. Emission is canonical: fixed key order,
//! two-space indent, one matrix row per line, every number printed with 17
//! significant digits so values round-trip bit-exactly and re-emitting a
//! parsed canonical file reproduces it byte for byte.

use num_complex::Complex64;
use serde::Deserialize;

use kyfan::matrix::ComplexMatrix;
use kyfan::measurement::Povm;
use kyfan::state::DensityMatrix;
use kyfan::KrausChannel;

/// 17 significant digits: enough to reconstruct any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Deserialize)]
struct ReIm {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Document {
    State {
        dim: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Operator {
        dim: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Vector {
        values: Vec<f64>,
    },
    Povm {
        dim: usize,
        elements: Vec<ReIm>,
    },
    KrausList {
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ReIm>,
    },
}

#[derive(Debug)]
pub enum FormatError {
    /// Malformed JSON or wrong shape; exit code 1 territory.
    Parse(String),
    /// Well-formed file whose content fails domain validation; exit code 2.
    Validation(String),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Parse(m) => write!(f, "parse error: {m}"),
            FormatError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl std::error::Error for FormatError {}

fn matrix_from_arrays(
    rows: usize,
    cols: usize,
    re: &[Vec<f64>],
    im: &[Vec<f64>],
    what: &str,
) -> Result<ComplexMatrix, FormatError> {
    let shape_ok = re.len() == rows
        && im.len() == rows
        && re.iter().all(|r| r.len() == cols)
        && im.iter().all(|r| r.len() == cols);
    if !shape_ok {
        return Err(FormatError::Parse(format!(
            "{what}: re/im arrays do not match declared {rows}x{cols} shape"
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            entries.push(Complex64::new(re[i][j], im[i][j]));
        }
    }
    ComplexMatrix::new(rows, cols, entries).map_err(|e| FormatError::Parse(format!("{what}: {e}")))
}

fn parse_document(text: &str) -> Result<Document, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
}

/// Parse a `state` file and validate it as a density matrix. An explicit
/// tolerance overrides the library default.
pub fn parse_state(text: &str, tol: Option<f64>) -> Result<DensityMatrix, FormatError> {
    match parse_document(text)? {
        Document::State { dim, re, im } => {
            let m = matrix_from_arrays(dim, dim, &re, &im, "state")?;
            let result = match tol {
                Some(t) => DensityMatrix::new_with_tol(m, t),
                None => DensityMatrix::new(m),
            };
            result.map_err(|e| FormatError::Validation(e.to_string()))
        }
        other => Err(FormatError::Parse(format!(
            "expected kind \"state\", found {}",
            kind_name(&other)
        ))),
    }
}

/// Parse an `operator` file (square matrix, no state validation).
pub fn parse_operator(text: &str) -> Result<ComplexMatrix, FormatError> {
    match parse_document(text)? {
        Document::Operator { dim, re, im } => matrix_from_arrays(dim, dim, &re, &im, "operator"),
        other => Err(FormatError::Parse(format!(
            "expected kind \"operator\", found {}",
            kind_name(&other)
        ))),
    }
}

/// Parse a `vector` file.
pub fn parse_vector(text: &str) -> Result<Vec<f64>, FormatError> {
    match parse_document(text)? {
        Document::Vector { values } => {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(FormatError::Parse("vector: non-finite entry".into()));
            }
            Ok(values)
        }
        other => Err(FormatError::Parse(format!(
            "expected kind \"vector\", found {}",
            kind_name(&other)
        ))),
    }
}

/// Parse and validate a `povm` file.
pub fn parse_povm(text: &str, tol: Option<f64>) -> Result<Povm, FormatError> {
    match parse_document(text)? {
        Document::Povm { dim, elements } => {
            let mats: Result<Vec<ComplexMatrix>, FormatError> = elements
                .iter()
                .enumerate()
                .map(|(i, e)| matrix_from_arrays(dim, dim, &e.re, &e.im, &format!("element {i}")))
                .collect();
            let result = match tol {
                Some(t) => Povm::new_with_tol(mats?, t, t),
                None => Povm::new(mats?),
            };
            result.map_err(|e| FormatError::Validation(e.to_string()))
        }
        other => Err(FormatError::Parse(format!(
            "expected kind \"povm\", found {}",
            kind_name(&other)
        ))),
    }
}

/// Parse and validate a `kraus_list` file into a channel.
pub fn parse_channel(text: &str) -> Result<KrausChannel, FormatError> {
    match parse_document(text)? {
        Document::KrausList {
            dim_in,
            dim_out,
            kraus,
        } => {
            let mats: Result<Vec<ComplexMatrix>, FormatError> = kraus
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    matrix_from_arrays(dim_out, dim_in, &e.re, &e.im, &format!("kraus {i}"))
                })
                .collect();
            KrausChannel::new(mats?).map_err(|e| FormatError::Validation(e.to_string()))
        }
        other => Err(FormatError::Parse(format!(
            "expected kind \"kraus_list\", found {}",
            kind_name(&other)
        ))),
    }
}

fn kind_name(doc: &Document) -> &'static str {
    match doc {
        Document::State { .. } => "\"state\"",
        Document::Operator { .. } => "\"operator\"",
        Document::Vector { .. } => "\"vector\"",
        Document::Povm { .. } => "\"povm\"",
        Document::KrausList { .. } => "\"kraus_list\"",
    }
}

// ---- canonical emission ----

fn push_rows(out: &mut String, indent: &str, values: &ComplexMatrix, imaginary: bool) {
    for i in 0..values.rows() {
        out.push_str(indent);
        out.push('[');
        for j in 0..values.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            let z = values[(i, j)];
            out.push_str(&fmt_f64(if imaginary { z.im } else { z.re }));
        }
        out.push(']');
        if i + 1 < values.rows() {
            out.push(',');
        }
        out.push('\n');
    }
}

fn push_matrix_fields(out: &mut String, indent: usize, m: &ComplexMatrix) {
    let pad = "  ".repeat(indent);
    let inner = "  ".repeat(indent + 1);
    out.push_str(&format!("{pad}\"re\": [\n"));
    push_rows(out, &inner, m, false);
    out.push_str(&format!("{pad}],\n"));
    out.push_str(&format!("{pad}\"im\": [\n"));
    push_rows(out, &inner, m, true);
    out.push_str(&format!("{pad}]\n"));
}

fn emit_square(kind: &str, m: &ComplexMatrix) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"kind\": \"{kind}\",\n"));
    out.push_str(&format!("  \"dim\": {},\n", m.rows()));
    push_matrix_fields(&mut out, 1, m);
    out.push_str("}\n");
    out
}

pub fn emit_state(rho: &DensityMatrix) -> String {
    emit_square("state", rho.matrix())
}

pub fn emit_operator(m: &ComplexMatrix) -> String {
    emit_square("operator", m)
}

pub fn emit_vector(values: &[f64]) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str("  \"kind\": \"vector\",\n");
    out.push_str("  \"values\": [");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(*v));
    }
    out.push_str("]\n}\n");
    out
}

fn emit_matrix_list(out: &mut String, mats: &[ComplexMatrix]) {
    for (i, m) in mats.iter().enumerate() {
        out.push_str("    {\n");
        push_matrix_fields(out, 3, m);
        out.push_str("    }");
        if i + 1 < mats.len() {
            out.push(',');
        }
        out.push('\n');
    }
}

pub fn emit_povm(povm: &Povm) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str("  \"kind\": \"povm\",\n");
    out.push_str(&format!("  \"dim\": {},\n", povm.dim()));
    out.push_str("  \"elements\": [\n");
    emit_matrix_list(&mut out, povm.elements());
    out.push_str("  ]\n}\n");
    out
}

pub fn emit_channel(channel: &KrausChannel) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str("  \"kind\": \"kraus_list\",\n");
    out.push_str(&format!("  \"dim_in\": {},\n", channel.dim_in()));
    out.push_str(&format!("  \"dim_out\": {},\n", channel.dim_out()));
    out.push_str("  \"kraus\": [\n");
    emit_matrix_list(&mut out, channel.kraus());
    out.push_str("  ]\n}\n");
    out
}
