//! The general linear retrieval scheme object.
//!
//! A scheme is the full enumeration of query realizations: for every target
//! message m in [1:M] and every key f in [0:K), one stacked query matrix that
//! assigns each server its rows. Responses are exact matrix-vector products
//! over the field, so every checker in this crate can reason about the scheme
//! by looking at the table alone.

use std::collections::HashMap;

use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::matrix::{FpMatrix, MatrixError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("no realization for message {m}, key {f}")]
    KeyNotFound { m: usize, f: usize },
    #[error("keys {f1} and {f2} produce the same queries for message {m}")]
    DuplicateRealization { m: usize, f1: usize, f2: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("enumeration budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// Shape of a scheme: field, server count, message count, sub-symbols per
/// message, and the number of answer symbols each server returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    field: FieldSpec,
    servers: usize,
    messages: usize,
    sub_length: usize,
    rows_per_server: Vec<usize>,
}

impl SchemeParams {
    pub fn new(
        field: FieldSpec,
        servers: usize,
        messages: usize,
        sub_length: usize,
        rows_per_server: Vec<usize>,
    ) -> Result<Self, SchemeError> {
        if servers < 2 {
            return Err(SchemeError::InvalidParams(format!(
                "need at least 2 servers, got {servers}"
            )));
        }
        if messages < 2 {
            return Err(SchemeError::InvalidParams(format!(
                "need at least 2 messages, got {messages}"
            )));
        }
        if sub_length == 0 {
            return Err(SchemeError::InvalidParams(
                "sublength must be positive".into(),
            ));
        }
        if rows_per_server.len() != servers {
            return Err(SchemeError::InvalidParams(format!(
                "expected {} per-server row counts, got {}",
                servers,
                rows_per_server.len()
            )));
        }
        if rows_per_server.contains(&0) {
            return Err(SchemeError::InvalidParams(
                "every server must answer with at least one symbol".into(),
            ));
        }
        Ok(SchemeParams {
            field,
            servers,
            messages,
            sub_length,
            rows_per_server,
        })
    }

    /// The common case: one answer symbol per server.
    pub fn uniform(
        field: FieldSpec,
        servers: usize,
        messages: usize,
        sub_length: usize,
    ) -> Result<Self, SchemeError> {
        Self::new(field, servers, messages, sub_length, vec![1; servers])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn sub_length(&self) -> usize {
        self.sub_length
    }

    pub fn rows_per_server(&self) -> &[usize] {
        &self.rows_per_server
    }

    /// Total width of a query matrix: messages × sublength.
    pub fn width(&self) -> usize {
        self.messages * self.sub_length
    }

    /// Total height of a stacked query matrix.
    pub fn total_rows(&self) -> usize {
        self.rows_per_server.iter().sum()
    }

    /// Row range of server `j` (1-based) inside the stacked matrix.
    pub fn row_range(&self, server: usize) -> std::ops::Range<usize> {
        assert!(
            (1..=self.servers).contains(&server),
            "server index out of range"
        );
        let start: usize = self.rows_per_server[..server - 1].iter().sum();
        start..start + self.rows_per_server[server - 1]
    }
}

/// A full scheme: every (message, key) realization of the stacked queries.
///
/// Keys are identified by their index 0..key_count. The map key → query is
/// injective for each message; a table violating that is rejected at
/// construction, as such a table cannot describe a well-defined key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeTable {
    params: SchemeParams,
    key_count: usize,
    // Realizations in message-major order: index (m-1)*key_count + f.
    queries: Vec<FpMatrix>,
}

impl SchemeTable {
    pub fn new(
        params: SchemeParams,
        key_count: usize,
        queries: Vec<FpMatrix>,
    ) -> Result<Self, SchemeError> {
        if key_count == 0 {
            return Err(SchemeError::InvalidParams("need at least one key".into()));
        }
        if queries.len() != params.messages * key_count {
            return Err(SchemeError::Shape(format!(
                "expected {} realizations ({} messages x {} keys), got {}",
                params.messages * key_count,
                params.messages,
                key_count,
                queries.len()
            )));
        }
        for (idx, q) in queries.iter().enumerate() {
            if q.field() != params.field
                || q.rows() != params.total_rows()
                || q.cols() != params.width()
            {
                return Err(SchemeError::Shape(format!(
                    "realization {} must be a {}x{} matrix over F_{}",
                    idx,
                    params.total_rows(),
                    params.width(),
                    params.field.modulus()
                )));
            }
        }
        // The key must be recoverable from the queries it produces.
        for m in 1..=params.messages {
            let mut seen: HashMap<&[u32], usize> = HashMap::new();
            for f in 0..key_count {
                let q = &queries[(m - 1) * key_count + f];
                if let Some(&f1) = seen.get(q.entries()) {
                    return Err(SchemeError::DuplicateRealization { m, f1, f2: f });
                }
                seen.insert(q.entries(), f);
            }
        }
        Ok(SchemeTable {
            params,
            key_count,
            queries,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    fn index(&self, m: usize, f: usize) -> Result<usize, SchemeError> {
        if !(1..=self.params.messages).contains(&m) || f >= self.key_count {
            return Err(SchemeError::KeyNotFound { m, f });
        }
        Ok((m - 1) * self.key_count + f)
    }

    /// The stacked query matrix for (message m, key f).
    pub fn query(&self, m: usize, f: usize) -> Result<&FpMatrix, SchemeError> {
        Ok(&self.queries[self.index(m, f)?])
    }

    /// Server j's rows of the (m, f) realization.
    pub fn server_rows(&self, m: usize, f: usize, server: usize) -> Result<FpMatrix, SchemeError> {
        let q = self.query(m, f)?;
        Ok(q.row_slice(self.params.row_range(server)))
    }

    /// Exact responses: the stacked query applied to the message vector,
    /// split back into per-server symbol lists.
    pub fn respond(
        &self,
        m: usize,
        f: usize,
        w: &MessageVector,
    ) -> Result<ResponseVector, SchemeError> {
        let q = self.query(m, f)?;
        if w.column.field() != self.params.field || w.column.rows() != self.params.width() {
            return Err(SchemeError::Shape(format!(
                "message vector must be {}x1 over F_{}",
                self.params.width(),
                self.params.field.modulus()
            )));
        }
        let stacked = q.mul(&w.column)?;
        let per_server = (1..=self.params.servers)
            .map(|j| {
                self.params
                    .row_range(j)
                    .map(|r| stacked.entry(r, 0))
                    .collect()
            })
            .collect();
        Ok(ResponseVector {
            field: self.params.field,
            per_server,
        })
    }

    /// Applies a decoding matrix to the responses for (m, f).
    ///
    /// Returns `decoder · responses`, a sublength × 1 column. When the
    /// decoder satisfies the correctness condition this equals block m of the
    /// message vector exactly; the caller owns that claim.
    pub fn retrieve(
        &self,
        m: usize,
        f: usize,
        w: &MessageVector,
        decoder: &FpMatrix,
    ) -> Result<FpMatrix, SchemeError> {
        if decoder.rows() != self.params.sub_length || decoder.cols() != self.params.total_rows() {
            return Err(SchemeError::Shape(format!(
                "decoder must be {}x{}, got {}x{}",
                self.params.sub_length,
                self.params.total_rows(),
                decoder.rows(),
                decoder.cols()
            )));
        }
        let responses = self.respond(m, f, w)?;
        Ok(decoder.mul(&responses.stacked_column())?)
    }
}

/// Concatenated message symbols w_{1,1..Lw}, ..., w_{M,1..Lw} as a column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageVector {
    column: FpMatrix,
}

impl MessageVector {
    pub fn from_symbols(field: FieldSpec, symbols: &[u32]) -> Result<Self, SchemeError> {
        Ok(MessageVector {
            column: FpMatrix::column(field, symbols)?,
        })
    }

    pub fn column(&self) -> &FpMatrix {
        &self.column
    }

    pub fn len(&self) -> usize {
        self.column.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Block m (1-based) of the vector: sub-symbols of one message.
    pub fn block(&self, m: usize, sub_length: usize) -> FpMatrix {
        self.column.row_slice((m - 1) * sub_length..m * sub_length)
    }
}

/// Per-server response symbols X_1..X_S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseVector {
    field: FieldSpec,
    per_server: Vec<Vec<u32>>,
}

impl ResponseVector {
    pub fn server(&self, j: usize) -> &[u32] {
        &self.per_server[j - 1]
    }

    pub fn servers(&self) -> usize {
        self.per_server.len()
    }

    /// All responses as one column, in server order.
    pub fn stacked_column(&self) -> FpMatrix {
        let flat: Vec<u32> = self.per_server.iter().flatten().copied().collect();
        FpMatrix::column(self.field, &flat).expect("entries already reduced")
    }
}

/// Every length-`len` vector over the field, in odometer order (first symbol
/// fastest). The backbone of the exhaustive entropy oracle.
pub fn enumerate_vectors(field: FieldSpec, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let p = u64::from(field.modulus());
    let total = p.checked_pow(len as u32).expect("enumeration too large");
    (0..total).map(move |mut code| {
        (0..len)
            .map(|_| {
                let v = (code % p) as u32;
                code /= p;
                v
            })
            .collect()
    })
}
