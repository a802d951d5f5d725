//! Shared table fixtures for the integration suites.
// Each test binary uses its own subset of the fixtures.
#![allow(dead_code)]

use pir_core::{FieldSpec, FpMatrix, SchemeParams, SchemeTable};

pub fn field(p: u64) -> FieldSpec {
    FieldSpec::new(p).unwrap()
}

pub fn mat(p: u64, rows: Vec<Vec<u32>>) -> FpMatrix {
    FpMatrix::from_rows(field(p), rows).unwrap()
}

/// Every server answers with all M*Lw symbols whatever the target: private
/// and decodable by construction, but far below capacity.
pub fn download_everything(
    p: u64,
    servers: usize,
    messages: usize,
    sub_length: usize,
) -> SchemeTable {
    let f = field(p);
    let width = messages * sub_length;
    let params = SchemeParams::new(f, servers, messages, sub_length, vec![width; servers]).unwrap();
    let id = FpMatrix::identity(f, width);
    let stack: Vec<&FpMatrix> = (0..servers).map(|_| &id).collect();
    let full = FpMatrix::vstack(&stack).unwrap();
    SchemeTable::new(params, 1, (0..messages).map(|_| full.clone()).collect()).unwrap()
}

/// Single-key scheme whose query is the plaintext selector of the wanted
/// message: decodes trivially and leaks the index completely.
pub fn plaintext_selector(p: u64) -> SchemeTable {
    let f = field(p);
    let params = SchemeParams::uniform(f, 2, 2, 1).unwrap();
    let q1 = mat(p, vec![vec![1, 0], vec![1, 0]]);
    let q2 = mat(p, vec![vec![0, 1], vec![0, 1]]);
    SchemeTable::new(params, 1, vec![q1, q2]).unwrap()
}

/// Both servers send the same mixed row for message 1: nothing isolates it.
pub fn mirrored_servers() -> SchemeTable {
    let params = SchemeParams::uniform(field(2), 2, 2, 1).unwrap();
    let q1 = mat(2, vec![vec![1, 1], vec![1, 1]]);
    let q2 = mat(2, vec![vec![1, 0], vec![0, 1]]);
    SchemeTable::new(params, 1, vec![q1, q2]).unwrap()
}

/// Server 2 never sees the interference block that server 1 mixes in.
pub fn unbalanced_interference() -> SchemeTable {
    let params = SchemeParams::uniform(field(2), 2, 2, 1).unwrap();
    let q1 = mat(2, vec![vec![1, 1], vec![1, 0]]);
    let q2 = mat(2, vec![vec![1, 0], vec![0, 1]]);
    SchemeTable::new(params, 1, vec![q1, q2]).unwrap()
}

/// The stacked queries form the identity: sums ranks on every subset but
/// fails the per-server interference equality.
pub fn identity_stack() -> SchemeTable {
    let f = field(2);
    let params = SchemeParams::uniform(f, 2, 2, 1).unwrap();
    let id = FpMatrix::identity(f, 2);
    SchemeTable::new(params, 1, vec![id.clone(), id]).unwrap()
}
