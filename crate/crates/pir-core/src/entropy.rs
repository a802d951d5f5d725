//! Exhaustive entropy oracle for linear schemes.
//!
//! Every entropy here is computed by literally enumerating the uniform key
//! and the uniform message space and counting outcomes — no rank shortcut.
//! For a linear scheme each conditional distribution is uniform on a coset,
//! so the support size is a power of p and the entropy is an exact number of
//! log-p units. The enumeration asserts that uniformity instead of assuming
//! it; a table that breaks it is malformed and is reported as such.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::field::FieldSpec;
use crate::matrix::FpMatrix;
use crate::rate::Rational;
use crate::scheme::{enumerate_vectors, SchemeTable};

/// Default cap on |keys| * p^(M*Lw) enumeration work.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("enumeration budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("conditional distribution is not uniform on a coset; table is not linear")]
    NonUniformConditional,
    #[error("message {m} has zero download entropy; rate is undefined")]
    ZeroDownload { m: usize },
    #[error("collusion size {collusion} is not in [1, {servers})")]
    InvalidCollusion { collusion: usize, servers: usize },
}

/// What a conditional entropy is conditioned on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conditioning {
    /// Only the server's own query: the rate denominator H(X_j | Q_j).
    OwnQuery,
    /// The full query realization plus the message blocks named here
    /// (1-based indices): H(X_j | Q_{1:S}, W_known).
    AllQueriesAndMessages { known: BTreeSet<usize> },
}

/// H(target·w | given·w) in log-p units, for w uniform on F_p^n.
///
/// Enumerates all p^n vectors, histograms the target value within each group
/// of the given value, and checks that every conditional is uniform with a
/// power-of-p support. `budget` caps p^n.
pub fn enumerated_entropy(
    target: &FpMatrix,
    given: &FpMatrix,
    budget: u64,
) -> Result<Rational, EntropyError> {
    assert_eq!(target.field(), given.field(), "operands share a field");
    assert_eq!(target.cols(), given.cols(), "operands share a domain");
    let field = target.field();
    let n = target.cols();
    let total = checked_power(field.modulus(), n);
    if total > u128::from(budget) {
        return Err(EntropyError::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    let mut groups: HashMap<Vec<u32>, HashMap<Vec<u32>, u64>> = HashMap::new();
    for w in enumerate_vectors(field, n) {
        let key = apply(given, &w);
        let value = apply(target, &w);
        *groups.entry(key).or_default().entry(value).or_insert(0) += 1;
    }
    let mut weighted = 0i64;
    for histogram in groups.values() {
        let first = *histogram.values().next().expect("non-empty group");
        if histogram.values().any(|&c| c != first) {
            return Err(EntropyError::NonUniformConditional);
        }
        let exponent = power_of_p_exponent(field.modulus(), histogram.len())?;
        let group_total = first * histogram.len() as u64;
        weighted += group_total as i64 * exponent as i64;
    }
    Ok(Rational::new(weighted, total as i64))
}

/// H(X_server | conditioning) for target message `m`, in log-p units.
///
/// The key is uniform on [0:K) and the messages are uniform i.i.d. symbols,
/// so the entropy is an average of per-realization coset entropies. The
/// enumeration cost |keys| * p^(M*Lw) must fit in `budget`.
pub fn conditional_entropy(
    table: &SchemeTable,
    m: usize,
    server: usize,
    conditioning: &Conditioning,
    budget: u64,
) -> Result<Rational, EntropyError> {
    let params = table.params();
    let keys = table.key_count();
    let needed =
        checked_power(params.field().modulus(), params.width()).saturating_mul(keys as u128);
    if needed > u128::from(budget) {
        return Err(EntropyError::BudgetExceeded { needed, budget });
    }
    match conditioning {
        Conditioning::OwnQuery => {
            // Group keys by the query value this server actually sees; the
            // response distribution depends on nothing else.
            let mut seen: HashMap<Vec<u32>, (FpMatrix, usize)> = HashMap::new();
            for f in 0..keys {
                let rows = table
                    .server_rows(m, f, server)
                    .expect("indices are in range");
                seen.entry(rows.entries().to_vec()).or_insert((rows, 0)).1 += 1;
            }
            let empty = FpMatrix::zeros(params.field(), 0, params.width());
            let mut acc = Rational::new(0, 1);
            for (rows, count) in seen.values() {
                let h = enumerated_entropy(rows, &empty, budget)?;
                acc += Rational::new(*count as i64, keys as i64) * h;
            }
            Ok(acc)
        }
        Conditioning::AllQueriesAndMessages { known } => {
            // Conditioning on the full realization singles out one key (the
            // key-to-query map is injective), so average over keys directly.
            let selector = block_selector(
                params.field(),
                params.messages(),
                params.sub_length(),
                known,
            );
            let mut acc = Rational::new(0, 1);
            for f in 0..keys {
                let rows = table
                    .server_rows(m, f, server)
                    .expect("indices are in range");
                let h = enumerated_entropy(&rows, &selector, budget)?;
                acc += Rational::new(1, keys as i64) * h;
            }
            Ok(acc)
        }
    }
}

/// The 0/1 matrix that reads off the sub-symbols of the given message blocks
/// (ascending), i.e. w ↦ w[blocks].
pub fn block_selector(
    field: FieldSpec,
    messages: usize,
    sub_length: usize,
    blocks: &BTreeSet<usize>,
) -> FpMatrix {
    assert!(
        blocks.iter().all(|&b| (1..=messages).contains(&b)),
        "block out of range"
    );
    let width = messages * sub_length;
    let mut rows = Vec::with_capacity(blocks.len() * sub_length);
    for &block in blocks {
        for s in 0..sub_length {
            let mut row = vec![0u32; width];
            row[(block - 1) * sub_length + s] = 1;
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return FpMatrix::zeros(field, 0, width);
    }
    FpMatrix::from_rows(field, rows).expect("selector entries are 0/1")
}

fn apply(matrix: &FpMatrix, w: &[u32]) -> Vec<u32> {
    let field = matrix.field();
    (0..matrix.rows())
        .map(|i| {
            let mut acc = 0u32;
            for (j, &wj) in w.iter().enumerate() {
                acc = field.add(acc, field.mul(matrix.entry(i, j), wj));
            }
            acc
        })
        .collect()
}

fn power_of_p_exponent(p: u32, support: usize) -> Result<u32, EntropyError> {
    let p = support_base(p);
    let mut size = support as u64;
    let mut exponent = 0;
    while size > 1 {
        if !size.is_multiple_of(p) {
            return Err(EntropyError::NonUniformConditional);
        }
        size /= p;
        exponent += 1;
    }
    Ok(exponent)
}

fn support_base(p: u32) -> u64 {
    u64::from(p)
}

pub(crate) fn checked_power(p: u32, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(u128::from(p));
    }
    acc
}
