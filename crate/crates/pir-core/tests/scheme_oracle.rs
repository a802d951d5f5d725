//! Round trips and entropy facts established by exhaustive enumeration.

mod common;

use std::collections::BTreeSet;

use common::download_everything;
use pir_core::scheme::enumerate_vectors;
use pir_core::verifier::CorrectnessOutcome;
use pir_core::{
    capacity_formula, check_correctness, conditional_entropy, rate_exact, reference_decoder,
    Conditioning, MessageVector, Rational, SchemeTable,
};

const INSTANCES: [(u64, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];
const BUDGET: u64 = 1_000_000;

fn reference(servers: u64, messages: usize) -> SchemeTable {
    pir_core::build_reference_table(servers, messages).unwrap()
}

fn solved_decoders(
    table: &SchemeTable,
) -> std::collections::BTreeMap<(usize, usize), pir_core::FpMatrix> {
    match check_correctness(table) {
        CorrectnessOutcome::Pass { decoders } => decoders,
        CorrectnessOutcome::Fail { witness } => panic!("not decodable: {witness:?}"),
    }
}

#[test]
fn solved_decoders_recover_every_block() {
    for (s, m_count) in INSTANCES {
        let table = reference(s, m_count);
        let params = table.params();
        let decoders = solved_decoders(&table);
        for m in 1..=m_count {
            for f in 0..table.key_count() {
                let decoder = &decoders[&(m, f)];
                for symbols in enumerate_vectors(params.field(), params.width()) {
                    let w = MessageVector::from_symbols(params.field(), &symbols).unwrap();
                    let decoded = table.retrieve(m, f, &w, decoder).unwrap();
                    assert_eq!(
                        decoded,
                        w.block(m, params.sub_length()),
                        "S={s} M={m_count} m={m} f={f}"
                    );
                }
            }
        }
    }
}

#[test]
fn vandermonde_decoder_recovers_every_block() {
    for (s, m_count) in [(2, 2), (2, 3), (3, 2)] {
        let table = reference(s, m_count);
        let params = table.params();
        for m in 1..=m_count {
            for f in 0..table.key_count() {
                let decoder = reference_decoder(&table, m, f).unwrap();
                for symbols in enumerate_vectors(params.field(), params.width()) {
                    let w = MessageVector::from_symbols(params.field(), &symbols).unwrap();
                    let decoded = table.retrieve(m, f, &w, &decoder).unwrap();
                    assert_eq!(decoded, w.block(m, params.sub_length()));
                }
            }
        }
    }
}

#[test]
fn retrieve_hand_example() {
    // Interference 1, points (0, 1), message vector (1, 1): responses (1, 0)
    // and the decoded symbol is 1.
    let table = reference(2, 2);
    let field = table.params().field();
    let keys = pir_core::reference::reference_keys(field, 2);
    let f = keys
        .iter()
        .position(|k| {
            k.interference[0].value() == 1
                && k.evaluation_points[0].value() == 0
                && k.evaluation_points[1].value() == 1
        })
        .unwrap();
    let w = MessageVector::from_symbols(field, &[1, 1]).unwrap();
    let responses = table.respond(1, f, &w).unwrap();
    assert_eq!(responses.server(1), &[1]);
    assert_eq!(responses.server(2), &[0]);
    let decoder = reference_decoder(&table, 1, f).unwrap();
    let decoded = table.retrieve(1, f, &w, &decoder).unwrap();
    assert_eq!(decoded.entry(0, 0), 1);
}

#[test]
fn own_query_entropy_closed_form() {
    // H(X_j | Q_j) = 1 - p^{-M} log-p units: the query is zero with
    // probability p^{-M} and otherwise pins one symbol.
    for (s, m_count) in INSTANCES {
        let table = reference(s, m_count);
        let params = table.params();
        let p = i64::from(params.field().modulus());
        let total = p.pow(m_count as u32);
        let expected = Rational::new(total - 1, total);
        for m in 1..=m_count {
            for server in 1..=params.servers() {
                let h = conditional_entropy(&table, m, server, &Conditioning::OwnQuery, BUDGET)
                    .unwrap();
                assert_eq!(h, expected, "S={s} M={m_count} m={m} j={server}");
            }
        }
    }
}

#[test]
fn full_conditioning_entropy_averages_block_ranks() {
    let table = reference(3, 2);
    let keep_all = Conditioning::AllQueriesAndMessages {
        known: BTreeSet::new(),
    };
    for m in 1..=2 {
        for server in 1..=3 {
            let h = conditional_entropy(&table, m, server, &keep_all, BUDGET).unwrap();
            let mut rank_sum = 0usize;
            for f in 0..table.key_count() {
                rank_sum += table.server_rows(m, f, server).unwrap().rank();
            }
            assert_eq!(h, Rational::new(rank_sum as i64, table.key_count() as i64));
        }
    }
}

#[test]
fn rate_equals_capacity_on_reference_instances() {
    let expected = [
        ((2, 2), Rational::new(2, 3)),
        ((2, 3), Rational::new(4, 7)),
        ((3, 2), Rational::new(3, 4)),
        ((3, 3), Rational::new(9, 13)),
    ];
    for ((s, m_count), rate) in expected {
        let table = reference(s, m_count);
        let result = rate_exact(&table, BUDGET).unwrap();
        assert_eq!(result.rate, rate, "S={s} M={m_count}");
        assert_eq!(
            result.capacity,
            capacity_formula(s as usize, m_count, 1).unwrap()
        );
        assert!(result.achieves_capacity);
        // Symmetric construction: every message costs the same download.
        let first = result.per_message_download[0];
        assert!(result.per_message_download.iter().all(|d| *d == first));
    }
}

#[test]
fn responses_are_linear_exhaustively_over_f2() {
    // Every pair of message vectors, every key, width up to 4.
    for m_count in [2usize, 3, 4] {
        let table = reference(2, m_count);
        let params = table.params();
        let f2 = params.field();
        for a in enumerate_vectors(f2, params.width()) {
            for b in enumerate_vectors(f2, params.width()) {
                let sum: Vec<u32> = a.iter().zip(&b).map(|(&x, &y)| f2.add(x, y)).collect();
                let wa = MessageVector::from_symbols(f2, &a).unwrap();
                let wb = MessageVector::from_symbols(f2, &b).unwrap();
                let ws = MessageVector::from_symbols(f2, &sum).unwrap();
                for m in 1..=m_count {
                    for f in 0..table.key_count() {
                        let xa = table.respond(m, f, &wa).unwrap();
                        let xb = table.respond(m, f, &wb).unwrap();
                        let xs = table.respond(m, f, &ws).unwrap();
                        for j in 1..=params.servers() {
                            let combined: Vec<u32> = xa
                                .server(j)
                                .iter()
                                .zip(xb.server(j))
                                .map(|(&x, &y)| f2.add(x, y))
                                .collect();
                            assert_eq!(combined, xs.server(j));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn download_everything_is_below_capacity() {
    let table = download_everything(2, 2, 2, 1);
    let result = rate_exact(&table, BUDGET).unwrap();
    // Each of the two servers downloads both symbols in full.
    assert_eq!(result.rate, Rational::new(1, 4));
    assert!(result.rate < result.capacity);
    assert!(!result.achieves_capacity);
    assert!(check_correctness(&table).passed());
    assert!(pir_core::check_privacy_standard(&table).passed());
}
