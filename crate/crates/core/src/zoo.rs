//! Test matrices and matrix file input.
//!
//! Two file formats are read: Matrix Market (`array` or `coordinate`,
//! fields `real`, `integer`, `complex`, symmetries `general`, `symmetric`,
//! `hermitian`, `skew-symmetric`) and JSON
//! `{"n": 4, "split": 2, "entries": [[re, im], ...]}` with the entries in
//! row-major order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BlockMatrix, ComplexMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn tridiag(n: usize, sub: C64, diag: C64, sup: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if i == j + 1 {
            sub
        } else if j == i + 1 {
            sup
        } else {
            c(0.0, 0.0)
        }
    })
}

fn need(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(msg.into()))
    }
}

/// Four tridiagonal `h x h` blocks: `A = tridiag(i, 2, i)`,
/// `B = C = tridiag(3+i, 1, 3+i)`, `D = tridiag(i, -2, i)`.
pub fn gen_a1(h: usize) -> Result<BlockMatrix> {
    need(h >= 2, "a1 needs half dimension at least 2")?;
    let b = tridiag(h, c(3.0, 1.0), c(1.0, 0.0), c(3.0, 1.0));
    BlockMatrix::new(
        tridiag(h, c(0.0, 1.0), c(2.0, 0.0), c(0.0, 1.0)),
        b.clone(),
        b,
        tridiag(h, c(0.0, 1.0), c(-2.0, 0.0), c(0.0, 1.0)),
    )
}

/// 8x8 split 4: `A = 0`, `B = I`, `C = tridiag(-1, -2, -1)`,
/// `D = tridiag(-5i, i, 5i)`.
pub fn gen_a2() -> BlockMatrix {
    BlockMatrix::new(
        ComplexMatrix::zeros(4, 4),
        ComplexMatrix::identity(4),
        tridiag(4, c(-1.0, 0.0), c(-2.0, 0.0), c(-1.0, 0.0)),
        tridiag(4, c(0.0, -5.0), c(0.0, 1.0), c(0.0, 5.0)),
    )
    .expect("fixed shapes")
}

/// 4x4 split 2.
pub fn gen_a3() -> BlockMatrix {
    let m = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 1.0, 2.0, 3.0],
        &[0.0, -2.0, -1.0, 0.0],
        &[-1.0, -3.0, 0.0, 0.0],
    ])
    .expect("fixed shape");
    BlockMatrix::from_assembled(&m, 2).expect("fixed split")
}

/// 5x5 split 3, with `B = 0`.
pub fn gen_a4() -> BlockMatrix {
    let z = (0.0, 0.0);
    let m = ComplexMatrix::from_rows(&[
        &[z, z, z, z, z],
        &[z, z, (1.0, 1.0), z, z],
        &[z, (0.0, 2.0), z, z, z],
        &[z, z, z, z, z],
        &[(-1.0, 0.0), (2.0, 0.0), (-2.0, 0.0), (0.0, 1.0), z],
    ])
    .expect("fixed shape");
    BlockMatrix::from_assembled(&m, 3).expect("fixed split")
}

/// `h x h` blocks, `h` even: `A = diag(2, .., 2, -2, .., -2)`,
/// `D = diag(1+i, .., 1+i, 1-i, .., 1-i)`, `B` and `C` zero except
/// `B[0][0] = 1` and `C[h-1][h-1] = 1`. Its norm is about 2.36 for every
/// `h`.
pub fn gen_a5(h: usize) -> Result<BlockMatrix> {
    need(h >= 2 && h % 2 == 0, "a5 needs an even half dimension of at least 2")?;
    let half = |first: C64, second: C64| -> Vec<C64> { (0..h).map(|i| if i < h / 2 { first } else { second }).collect() };
    let mut b = ComplexMatrix::zeros(h, h);
    b[(0, 0)] = c(1.0, 0.0);
    let mut cm = ComplexMatrix::zeros(h, h);
    cm[(h - 1, h - 1)] = c(1.0, 0.0);
    BlockMatrix::new(
        ComplexMatrix::from_diagonal(&half(c(2.0, 0.0), c(-2.0, 0.0))),
        b,
        cm,
        ComplexMatrix::from_diagonal(&half(c(1.0, 1.0), c(1.0, -1.0))),
    )
}

/// Generator by name; `dim` is the total dimension for the sized
/// families and must be `None` or match for the fixed ones.
pub fn generate(name: &str, dim: Option<usize>) -> Result<BlockMatrix> {
    let half = |d: Option<usize>, default: usize| -> Result<usize> {
        let d = d.unwrap_or(default);
        need(d % 2 == 0, "dimension must be even")?;
        Ok(d / 2)
    };
    let fixed = |m: BlockMatrix| -> Result<BlockMatrix> {
        match dim {
            Some(d) if d != m.dim() => Err(Error::InvalidConfig(format!("{name} has fixed dimension {}", m.dim()))),
            _ => Ok(m),
        }
    };
    match name.to_ascii_lowercase().as_str() {
        "a1" => gen_a1(half(dim, 40)?),
        "a2" => fixed(gen_a2()),
        "a3" => fixed(gen_a3()),
        "a4" => fixed(gen_a4()),
        "a5" => gen_a5(half(dim, 16)?),
        other => Err(Error::InvalidConfig(format!("unknown matrix {other:?}; expected a1..a5"))),
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    split: usize,
    entries: Vec<[f64; 2]>,
}

/// JSON text for `block` in the format read by [`load_block_matrix`].
pub fn block_matrix_to_json(block: &BlockMatrix) -> String {
    let m = block.assemble();
    let doc = JsonMatrix { n: m.rows(), split: block.n1(), entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect() };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn save_block_matrix_json(block: &BlockMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, block_matrix_to_json(block)).map_err(|e| Error::io(path, e))
}

/// Read a matrix file and split it after `split` rows and columns.
/// JSON files carry their own split, which `split` overrides when given;
/// Matrix Market files need `split`.
pub fn load_block_matrix(path: &Path, split: Option<usize>) -> Result<BlockMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_block_matrix(&text, path, split)
}

/// [`load_block_matrix`] on text already in memory; `path` is only used
/// in error messages.
pub fn parse_block_matrix(text: &str, path: &Path, split: Option<usize>) -> Result<BlockMatrix> {
    let (m, own_split) = if text.trim_start().starts_with('{') {
        let (m, s) = parse_json(text, path)?;
        (m, Some(s))
    } else {
        (parse_matrix_market(text, path)?, None)
    };
    let split = split.or(own_split).ok_or_else(|| Error::InvalidConfig("a split index is required for Matrix Market input".into()))?;
    BlockMatrix::from_assembled(&m, split)
}

fn parse_json(text: &str, path: &Path) -> Result<(ComplexMatrix, usize)> {
    let doc: JsonMatrix = serde_json::from_str(text)
        .map_err(|e| Error::Parse { path: path.into(), line: e.line(), message: e.to_string() })?;
    let err = |message: String| Error::Parse { path: path.into(), line: 1, message };
    if doc.entries.len() != doc.n * doc.n {
        return Err(err(format!("expected {} entries for n = {}, found {}", doc.n * doc.n, doc.n, doc.entries.len())));
    }
    let data = doc.entries.iter().map(|[re, im]| c(*re, *im)).collect();
    let m = ComplexMatrix::new(doc.n, doc.n, data).map_err(|e| err(e.to_string()))?;
    Ok((m, doc.split))
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn parse_matrix_market(text: &str, path: &Path) -> Result<ComplexMatrix> {
    let err = |line: usize, message: String| Error::Parse { path: path.into(), line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into()));
    }
    let array = match words[2].as_str() {
        "array" => true,
        "coordinate" => false,
        f => return Err(err(1, format!("unsupported format {f:?}"))),
    };
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        f => return Err(err(1, format!("unsupported field {f:?}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        s => return Err(err(1, format!("unsupported symmetry {s:?}"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let number = |line: usize, tok: &str| -> Result<f64> {
        tok.parse::<f64>().map_err(|_| err(line, format!("cannot parse number {tok:?}")))
    };
    let index = |line: usize, tok: &str| -> Result<usize> {
        tok.parse::<usize>().map_err(|_| err(line, format!("cannot parse index {tok:?}")))
    };

    let (size_line, size) = body.next().ok_or_else(|| err(1, "missing size line".into()))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if array { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(size_line, format!("size line needs {want} integers")));
    }
    let (rows, cols) = (index(size_line, dims[0])?, index(size_line, dims[1])?);
    if rows != cols {
        return Err(err(size_line, format!("matrix must be square, got {rows}x{cols}")));
    }
    let n = rows;
    if n == 0 {
        return Err(err(size_line, "matrix is empty".into()));
    }
    let value = |line: usize, toks: &[&str]| -> Result<C64> {
        let need = if field == Field::Complex { 2 } else { 1 };
        if toks.len() != need {
            return Err(err(line, format!("expected {need} value(s), found {}", toks.len())));
        }
        let re = number(line, toks[0])?;
        let im = if need == 2 { number(line, toks[1])? } else { 0.0 };
        if !re.is_finite() || !im.is_finite() {
            return Err(err(line, "entry is not finite".into()));
        }
        Ok(c(re, im))
    };

    let mut m = ComplexMatrix::zeros(n, n);
    let mut place = |line: usize, i: usize, j: usize, v: C64| -> Result<()> {
        if i >= n || j >= n {
            return Err(err(line, format!("entry ({}, {}) outside a {n}x{n} matrix", i + 1, j + 1)));
        }
        if symmetry != Symmetry::General && j > i {
            return Err(err(line, "symmetric storage holds the lower triangle only".into()));
        }
        if symmetry == Symmetry::Skew && i == j && v != c(0.0, 0.0) {
            return Err(err(line, "skew-symmetric diagonal must be zero".into()));
        }
        m[(i, j)] = v;
        if i != j {
            m[(j, i)] = match symmetry {
                Symmetry::General => m[(j, i)],
                Symmetry::Symmetric => v,
                Symmetry::Hermitian => v.conj(),
                Symmetry::Skew => -v,
            };
        }
        Ok(())
    };

    if array {
        // column-major; symmetric variants list the lower triangle
        let mut slots = Vec::new();
        for j in 0..n {
            let start = match symmetry {
                Symmetry::General => 0,
                Symmetry::Skew => j + 1,
                _ => j,
            };
            slots.extend((start..n).map(|i| (i, j)));
        }
        let mut slots = slots.into_iter();
        for (line, l) in body {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let (i, j) = slots.next().ok_or_else(|| err(line, "more entries than the size line allows".into()))?;
            place(line, i, j, value(line, &toks)?)?;
        }
        if slots.next().is_some() {
            return Err(err(text.lines().count(), "fewer entries than the size line requires".into()));
        }
    } else {
        let nnz = index(size_line, dims[2])?;
        let mut seen = 0;
        for (line, l) in body {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(err(line, "expected row, column and value".into()));
            }
            let (i, j) = (index(line, toks[0])?, index(line, toks[1])?);
            if i == 0 || j == 0 {
                return Err(err(line, "indices are 1-based".into()));
            }
            place(line, i - 1, j - 1, value(line, &toks[2..])?)?;
            seen += 1;
        }
        if seen != nnz {
            return Err(err(size_line, format!("size line promises {nnz} entries, found {seen}")));
        }
    }
    Ok(m)
}
