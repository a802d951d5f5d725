//! The power-block reference scheme and its Vandermonde decoder.
//!
//! With S prime servers the field is F_S, each message splits into S-1
//! sub-symbols, and a query row is a concatenation of power blocks
//! (v, v^2, ..., v^(S-1)): shared interference values Z_k for the messages
//! the user does not want, and a distinct evaluation point z_j per server for
//! the one it does. Every server's answer is then one evaluation of a
//! polynomial whose non-constant coefficients are the wanted sub-symbols, so
//! inverting the Vandermonde matrix of the evaluation points and dropping the
//! constant coordinate decodes the message.

use crate::field::{FieldElement, FieldSpec};
use crate::matrix::FpMatrix;
use crate::scheme::{SchemeError, SchemeParams, SchemeTable};

/// Cap on the number of keys enumerated per message.
pub const REFERENCE_KEY_BUDGET: u64 = 1_000_000;

/// One key of the reference scheme.
///
/// The key space is shared by all target messages: `interference` holds the
/// M-1 shared values assigned to the unwanted message blocks in ascending
/// block order, and `evaluation_points` assigns each server its distinct
/// point — a full permutation of the field, so every server's query value is
/// equally likely whatever the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceKey {
    pub interference: Vec<FieldElement>,
    pub evaluation_points: Vec<FieldElement>,
}

/// All keys in their canonical order: interference vectors lexicographically
/// (leftmost digit most significant), and for each, the evaluation-point
/// permutations lexicographically.
pub fn reference_keys(field: FieldSpec, messages: usize) -> Vec<ReferenceKey> {
    let permutations = lexicographic_permutations(field.modulus() as usize);
    let mut keys = Vec::new();
    for interference in lexicographic_vectors(field, messages - 1) {
        for perm in &permutations {
            keys.push(ReferenceKey {
                interference: interference.clone(),
                evaluation_points: perm.iter().map(|&v| field.element(v as u64)).collect(),
            });
        }
    }
    keys
}

/// Number of keys: p^(M-1) * S!.
pub fn reference_key_count(servers: u64, messages: usize) -> u128 {
    let mut count: u128 = 1;
    for _ in 0..messages - 1 {
        count = count.saturating_mul(u128::from(servers));
    }
    for s in 2..=servers as u128 {
        count = count.saturating_mul(s);
    }
    count
}

/// Builds the full scheme table for `servers` (must be prime) and `messages`.
pub fn build_reference_table(servers: u64, messages: usize) -> Result<SchemeTable, SchemeError> {
    let field = FieldSpec::new(servers)?;
    let servers = servers as usize;
    let params = SchemeParams::uniform(field, servers, messages, servers - 1)?;
    let key_total = reference_key_count(servers as u64, messages);
    if key_total > u128::from(REFERENCE_KEY_BUDGET) {
        return Err(SchemeError::BudgetExceeded {
            needed: key_total,
            budget: REFERENCE_KEY_BUDGET,
        });
    }
    let keys = reference_keys(field, messages);
    let width = params.sub_length();
    let mut queries = Vec::with_capacity(messages * keys.len());
    for m in 1..=messages {
        for key in &keys {
            let mut rows = Vec::with_capacity(servers);
            for j in 0..servers {
                let mut row = Vec::with_capacity(params.width());
                let mut z_index = 0;
                for k in 1..=messages {
                    let value = if k == m {
                        key.evaluation_points[j]
                    } else {
                        let v = key.interference[z_index];
                        z_index += 1;
                        v
                    };
                    row.extend(power_block(value, width));
                }
                rows.push(row);
            }
            queries.push(FpMatrix::from_rows(field, rows)?);
        }
    }
    SchemeTable::new(params, keys.len(), queries)
}

/// The power block (v, v^2, ..., v^width).
pub fn power_block(v: FieldElement, width: usize) -> Vec<u32> {
    (1..=width as u64).map(|e| v.pow(e).value()).collect()
}

/// Decoding matrix for realization (m, f): drop-first-row projector times the
/// inverse Vandermonde of the evaluation points.
///
/// The evaluation points are read back out of block m of the stored queries
/// (the first coordinate of a power block is the point itself), so this works
/// on any table that puts power blocks there and fails with `Singular` on one
/// that repeats a point.
pub fn reference_decoder(table: &SchemeTable, m: usize, f: usize) -> Result<FpMatrix, SchemeError> {
    let params = table.params();
    let field = params.field();
    let servers = params.servers();
    let nodes: Vec<FieldElement> = (1..=servers)
        .map(|j| {
            let rows = table.server_rows(m, f, j)?;
            Ok(rows.get(0, (m - 1) * params.sub_length()))
        })
        .collect::<Result<_, SchemeError>>()?;
    let vandermonde = FpMatrix::vandermonde(&nodes, servers)?;
    let inverse = vandermonde.invert()?;
    let projector = drop_first_row_projector(field, servers);
    Ok(projector.mul(&inverse)?)
}

/// The (n-1) x n matrix that deletes the first coordinate of a column.
fn drop_first_row_projector(field: FieldSpec, n: usize) -> FpMatrix {
    let mut rows = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let mut row = vec![0u32; n];
        row[i + 1] = 1;
        rows.push(row);
    }
    FpMatrix::from_rows(field, rows).expect("projector entries are 0/1")
}

/// Length-`len` vectors over the field in lexicographic order, leftmost
/// coordinate most significant.
fn lexicographic_vectors(field: FieldSpec, len: usize) -> Vec<Vec<FieldElement>> {
    let p = u64::from(field.modulus());
    let total = p.pow(len as u32);
    (0..total)
        .map(|code| {
            (0..len)
                .map(|i| {
                    let shift = p.pow((len - 1 - i) as u32);
                    field.element(code / shift % p)
                })
                .collect()
        })
        .collect()
}

/// Permutations of 0..n in lexicographic order.
fn lexicographic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(values: &mut [usize]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let mut i = values.len() - 1;
    while i > 0 && values[i - 1] >= values[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = values.len() - 1;
    while values[j] <= values[i - 1] {
        j -= 1;
    }
    values.swap(i - 1, j);
    values[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_counts() {
        assert_eq!(reference_key_count(2, 2), 4);
        assert_eq!(reference_key_count(3, 2), 18);
        assert_eq!(reference_key_count(3, 3), 54);
        let table = build_reference_table(2, 2).unwrap();
        assert_eq!(table.key_count(), 4);
    }

    #[test]
    fn budget_guard() {
        // 13 servers, 6 messages: 13^5 * 13! keys is far beyond the budget.
        let err = build_reference_table(13, 6).unwrap_err();
        assert!(matches!(err, SchemeError::BudgetExceeded { .. }));
    }

    #[test]
    fn rejects_composite_server_counts() {
        assert!(matches!(
            build_reference_table(4, 2),
            Err(SchemeError::Field(crate::field::FieldError::NotPrime(4)))
        ));
    }

    #[test]
    fn hand_built_realization() {
        // Two servers, two messages: the key with interference 1 and points
        // (0, 1) queries (0, 1) and (1, 1) for message 1.
        let table = build_reference_table(2, 2).unwrap();
        let keys = reference_keys(table.params().field(), 2);
        let wanted = keys
            .iter()
            .position(|k| {
                k.interference[0].value() == 1
                    && k.evaluation_points[0].value() == 0
                    && k.evaluation_points[1].value() == 1
            })
            .unwrap();
        let q = table.query(1, wanted).unwrap();
        assert_eq!(q.row(0), &[0, 1]);
        assert_eq!(q.row(1), &[1, 1]);
    }

    #[test]
    fn block_structure() {
        // Block m varies across servers; every other block is constant.
        for (s, m_count) in [(2u64, 2usize), (3, 2), (3, 3)] {
            let table = build_reference_table(s, m_count).unwrap();
            let params = table.params();
            let lw = params.sub_length();
            for m in 1..=m_count {
                for f in 0..table.key_count() {
                    let q = table.query(m, f).unwrap();
                    for k in 1..=m_count {
                        let block: Vec<&[u32]> = (0..params.servers())
                            .map(|j| &q.row(j)[(k - 1) * lw..k * lw])
                            .collect();
                        let constant = block.windows(2).all(|w| w[0] == w[1]);
                        if k == m {
                            assert!(!constant, "target block must differ across servers");
                        } else {
                            assert!(constant, "interference blocks are shared");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decoder_hand_example() {
        // S=2 with points (0, 1) over F_2: V = [[1,0],[1,1]] is self-inverse
        // and the projector leaves (1, 1).
        let table = build_reference_table(2, 2).unwrap();
        let keys = reference_keys(table.params().field(), 2);
        let f = keys
            .iter()
            .position(|k| {
                k.evaluation_points[0].value() == 0 && k.evaluation_points[1].value() == 1
            })
            .unwrap();
        let d = reference_decoder(&table, 1, f).unwrap();
        let field = table.params().field();
        assert_eq!(d, FpMatrix::from_rows(field, vec![vec![1, 1]]).unwrap());
    }

    #[test]
    fn projector_times_inverse_recovers_projector() {
        let field = FieldSpec::new(5).unwrap();
        let nodes: Vec<_> = field.elements().collect();
        let v = FpMatrix::vandermonde(&nodes, 5).unwrap();
        let p = drop_first_row_projector(field, 5);
        let pv = p.mul(&v.invert().unwrap()).unwrap().mul(&v).unwrap();
        assert_eq!(pv, p);
    }

    #[test]
    fn decoder_times_query_is_block_selector() {
        // D * Q must be zero outside block m and the identity inside it.
        let table = build_reference_table(3, 2).unwrap();
        let params = table.params();
        let lw = params.sub_length();
        for m in 1..=2 {
            for f in 0..table.key_count() {
                let d = reference_decoder(&table, m, f).unwrap();
                let product = d.mul(table.query(m, f).unwrap()).unwrap();
                for r in 0..lw {
                    for c in 0..params.width() {
                        let expected = if c == (m - 1) * lw + r { 1 } else { 0 };
                        assert_eq!(product.entry(r, c), expected, "m={m} f={f} r={r} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn realizations_are_disjoint_across_messages() {
        for (s, m_count) in [(2u64, 2usize), (3, 2), (2, 3)] {
            let table = build_reference_table(s, m_count).unwrap();
            let mut seen = std::collections::HashMap::new();
            for m in 1..=m_count {
                for f in 0..table.key_count() {
                    let q = table.query(m, f).unwrap();
                    if let Some(other) = seen.insert(q.entries().to_vec(), m) {
                        assert_eq!(other, m, "realization shared between messages");
                    }
                }
            }
        }
    }

    #[test]
    fn per_server_query_counts_are_factorial() {
        // Every realized per-server query arises from exactly (S-1)! keys,
        // for every target message.
        let table = build_reference_table(3, 2).unwrap();
        let params = table.params();
        for j in 1..=params.servers() {
            let mut counts: std::collections::HashMap<Vec<u32>, Vec<usize>> =
                std::collections::HashMap::new();
            for m in 1..=params.messages() {
                for f in 0..table.key_count() {
                    let rows = table.server_rows(m, f, j).unwrap();
                    counts
                        .entry(rows.entries().to_vec())
                        .or_insert_with(|| vec![0; params.messages()])[m - 1] += 1;
                }
            }
            for per_m in counts.values() {
                for &c in per_m {
                    assert_eq!(c, 2); // (S-1)! = 2 at S=3
                }
            }
        }
    }
}
