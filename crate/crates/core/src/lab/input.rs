//! Element files, inline element expressions and input digests.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::element::{CMatrix, SpaceDescriptor, TripleElement};
use crate::error::{Result, TripleError};

/// On-disk element: `{"space": [[m,n],…], "blocks": [[[re,im],…],…]}`, each block a
/// row-major list of entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementFile {
    pub space: Vec<(usize, usize)>,
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl From<&TripleElement> for ElementFile {
    fn from(a: &TripleElement) -> Self {
        let blocks = a
            .blocks()
            .iter()
            .map(|b| {
                (0..b.nrows())
                    .flat_map(|i| (0..b.ncols()).map(move |j| [b[(i, j)].re, b[(i, j)].im]))
                    .collect()
            })
            .collect();
        Self {
            space: a.space().factors().to_vec(),
            blocks,
        }
    }
}

impl TryFrom<ElementFile> for TripleElement {
    type Error = TripleError;
    fn try_from(f: ElementFile) -> Result<Self> {
        let space = SpaceDescriptor::new(f.space)?;
        if f.blocks.len() != space.num_blocks() {
            return Err(TripleError::Parse(format!(
                "{} blocks for {} factors",
                f.blocks.len(),
                space.num_blocks()
            )));
        }
        let mut entries = Vec::with_capacity(space.dim());
        for (k, (block, &(m, n))) in f.blocks.iter().zip(space.factors()).enumerate() {
            if block.len() != m * n {
                return Err(TripleError::Parse(format!(
                    "block {k} has {} entries, expected {m}x{n} = {}",
                    block.len(),
                    m * n
                )));
            }
            entries.extend(block.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        TripleElement::from_row_major(&space, &entries)
    }
}

pub fn read_element_file(path: &Path) -> Result<TripleElement> {
    let text = std::fs::read_to_string(path).map_err(|e| TripleError::Io(format!("{}: {e}", path.display())))?;
    let file: ElementFile = serde_json::from_str(&text).map_err(|e| TripleError::Parse(e.to_string()))?;
    file.try_into()
}

pub fn write_element_file(path: &Path, a: &TripleElement) -> Result<()> {
    let text = serde_json::to_string_pretty(&ElementFile::from(a)).expect("element file is serializable");
    std::fs::write(path, text).map_err(|e| TripleError::Io(format!("{}: {e}", path.display())))
}

/// Parses blocks separated by `;`, each one of
/// `diag(v1, v2, …)`, `eye(n)`, `zeros(m x n)` / `zeros(n)`, or a JSON matrix
/// such as `[[1, 0], [0, [0, 2]]]` whose entries are numbers or `[re, im]` pairs.
pub fn parse_inline(expr: &str) -> Result<TripleElement> {
    let blocks = expr
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_block)
        .collect::<Result<Vec<_>>>()?;
    if blocks.is_empty() {
        return Err(TripleError::Parse("empty expression".into()));
    }
    TripleElement::from_blocks(blocks)
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| TripleError::Parse(format!("not a number: '{}'", s.trim())))
}

fn parse_dim(s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(TripleError::Parse(format!("not a positive dimension: '{}'", s.trim()))),
    }
}

fn parse_block(s: &str) -> Result<CMatrix> {
    if let Some(args) = call_args(s, "diag") {
        let values = args.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
        let n = values.len();
        return Ok(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0)
        }));
    }
    if let Some(args) = call_args(s, "eye") {
        let n = parse_dim(args)?;
        return Ok(CMatrix::identity(n, n));
    }
    if let Some(args) = call_args(s, "zeros") {
        let (m, n) = match args.split_once(['x', 'X', ',']) {
            Some((m, n)) => (parse_dim(m)?, parse_dim(n)?),
            None => {
                let n = parse_dim(args)?;
                (n, n)
            }
        };
        return Ok(CMatrix::zeros(m, n));
    }
    if s.starts_with('[') {
        let value: serde_json::Value = serde_json::from_str(s).map_err(|e| TripleError::Parse(e.to_string()))?;
        return json_matrix(&value);
    }
    Err(TripleError::Parse(format!("unrecognized block '{s}'")))
}

fn json_entry(v: &serde_json::Value) -> Result<Complex64> {
    match v {
        serde_json::Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        serde_json::Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(TripleError::Parse(format!("bad complex entry {v}"))),
        },
        _ => Err(TripleError::Parse(format!("bad matrix entry {v}"))),
    }
}

fn json_matrix(v: &serde_json::Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| TripleError::Parse("matrix must be a non-empty array of rows".into()))?;
    let parsed = rows
        .iter()
        .map(|row| {
            row.as_array()
                .filter(|r| !r.is_empty())
                .ok_or_else(|| TripleError::Parse("each row must be a non-empty array".into()))?
                .iter()
                .map(json_entry)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = parsed[0].len();
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(TripleError::Parse("rows have different lengths".into()));
    }
    Ok(CMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

/// Hex SHA-256 over the descriptors and little-endian entries of the inputs.
pub fn digest(inputs: &[&TripleElement]) -> String {
    let mut h = Sha256::new();
    for a in inputs {
        h.update(a.space().to_string().as_bytes());
        h.update(b"|");
        for z in a.row_major_entries() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
