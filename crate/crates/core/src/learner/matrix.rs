//! Non-adaptive query matrices for sparse parity learning.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::gf::{build_field, FieldTables, MAX_DEGREE, MIN_DEGREE};
use crate::boolfn::{BitVector, ParitySupport};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Bch,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatrixMeta {
    pub m: usize,
    pub k: usize,
    pub construction: Construction,
    pub primitive_poly: u32,
}

#[derive(Debug, Clone)]
pub struct QueryMatrix {
    n_cols: usize,
    rows: Vec<BitVector>,
    meta: MatrixMeta,
    field: Option<Arc<FieldTables>>,
}

/// `ceil(log2(n + 1))`, the bit length of `n`.
pub fn degree_for(n_cols: usize) -> usize {
    (usize::BITS - n_cols.leading_zeros()) as usize
}

/// Rows `(i, b)` hold bit `b` of `α^{(2i-1)j}` at column `j + 1`, for
/// `i = 1..=K` and `b = 0..m`, followed by one all-ones row.
pub fn build_bch_matrix(n_cols: usize, k_sparse: usize) -> Result<QueryMatrix> {
    if k_sparse == 0 {
        return Err(Error::param("sparsity K must be at least 1"));
    }
    if n_cols == 0 {
        return Err(Error::param("matrix needs at least one column"));
    }
    let m = degree_for(n_cols);
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
        return Err(Error::param(format!(
            "N = {n_cols} needs field degree {m}, supported range is {MIN_DEGREE}..={MAX_DEGREE}"
        )));
    }
    let field = build_field(m)?;
    let order = field.order();
    let mut rows = vec![BitVector::zeros(n_cols); k_sparse * m];
    for j in 0..n_cols {
        for i in 0..k_sparse {
            let e = ((2 * i + 1) * j) % order;
            let v = field.antilog()[e];
            for b in 0..m {
                if v >> b & 1 == 1 {
                    rows[i * m + b].set(j + 1, true);
                }
            }
        }
    }
    rows.push(BitVector::ones(n_cols));
    let q = rows.len();
    assert!(q <= k_sparse * m + 1, "query bound exceeded");
    Ok(QueryMatrix {
        n_cols,
        rows,
        meta: MatrixMeta {
            m,
            k: k_sparse,
            construction: Construction::Bch,
            primitive_poly: field.primitive_poly(),
        },
        field: Some(Arc::new(field)),
    })
}

type Cache = Mutex<HashMap<(usize, usize), Arc<QueryMatrix>>>;

/// Memoised [`build_bch_matrix`]; the matrix depends only on `(N, K)`.
pub fn bch_matrix(n_cols: usize, k_sparse: usize) -> Result<Arc<QueryMatrix>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache
        .lock()
        .expect("matrix cache poisoned")
        .get(&(n_cols, k_sparse))
    {
        return Ok(hit.clone());
    }
    let built = Arc::new(build_bch_matrix(n_cols, k_sparse)?);
    let mut guard = cache.lock().expect("matrix cache poisoned");
    Ok(guard.entry((n_cols, k_sparse)).or_insert(built).clone())
}

impl QueryMatrix {
    /// A matrix given row by row. It can be used with the brute-force decoder
    /// but not with [`super::decode`].
    pub fn explicit(n_cols: usize, k_sparse: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                found: bad.len(),
            });
        }
        Ok(QueryMatrix {
            n_cols,
            rows,
            meta: MatrixMeta {
                m: 0,
                k: k_sparse,
                construction: Construction::Explicit,
                primitive_poly: 0,
            },
            field: None,
        })
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn meta(&self) -> MatrixMeta {
        self.meta
    }

    pub fn field(&self) -> Option<&FieldTables> {
        self.field.as_deref()
    }

    /// Column `c` (1-based) as a vector over the `q` rows.
    pub fn column(&self, c: usize) -> BitVector {
        let bits: Vec<bool> = self.rows.iter().map(|r| r.get(c)).collect();
        BitVector::from_bools(&bits)
    }

    /// Header line `N K q m poly=<hex>` then one line of `N` characters per row.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.q() * (self.n_cols + 1) + 64);
        let _ = writeln!(
            out,
            "{} {} {} {} poly={:#x}",
            self.n_cols,
            self.meta.k,
            self.q(),
            self.meta.m,
            self.meta.primitive_poly
        );
        for r in &self.rows {
            let _ = writeln!(out, "{r}");
        }
        out
    }
}

/// `M·x` over GF(2): one answer bit per row.
pub fn syndrome(m: &QueryMatrix, x: &ParitySupport) -> Result<BitVector> {
    if x.n() != m.n_cols {
        return Err(Error::DimensionMismatch {
            expected: m.n_cols,
            found: x.n(),
        });
    }
    let bits: Vec<bool> = m.rows.iter().map(|r| r.dot(x.mask())).collect();
    Ok(BitVector::from_bools(&bits))
}
