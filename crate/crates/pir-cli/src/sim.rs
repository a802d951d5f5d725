//! Seeded retrieval and adversary simulations with replayable traces.
//!
//! Draw order is part of the contract. A retrieval draws the key first and
//! then the message symbols in index order; an adversary run draws the
//! target message and then the key. Rendering is plain text with one line
//! per event so replays can be compared byte-for-byte.

use std::collections::BTreeSet;

use pir_core::verifier::CorrectnessOutcome;
use pir_core::{adversary_posterior, FpMatrix, MessageVector, Rational, SchemeTable};

use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    QuerySent { server: usize, rows: FpMatrix },
    ResponseReceived { server: usize, symbols: Vec<u32> },
    Decoded { block: Vec<u32> },
}

/// One full retrieval exchange: S queries out, S responses back, one decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub seed: u64,
    pub target: usize,
    pub key: usize,
    pub message: Vec<u32>,
    pub events: Vec<TraceEvent>,
    pub decoded_matches: bool,
}

#[derive(Debug)]
pub enum RetrieveError {
    /// The scheme fails the correctness check, so no decoder exists.
    CorrectnessUnavailable(String),
}

/// Runs one seeded retrieval of message `target` against the table.
pub fn run_retrieve(
    table: &SchemeTable,
    target: usize,
    seed: u64,
) -> Result<SimulationTrace, RetrieveError> {
    let params = table.params();
    let decoders = match pir_core::check_correctness(table) {
        CorrectnessOutcome::Pass { decoders } => decoders,
        CorrectnessOutcome::Fail { witness } => {
            return Err(RetrieveError::CorrectnessUnavailable(format!(
                "no decoding matrix: message {} key {} selector row {} is not decodable",
                witness.m, witness.f, witness.selector_row
            )));
        }
    };
    let mut rng = SplitMix64::new(seed);
    let key = rng.below(table.key_count() as u64) as usize;
    let symbols: Vec<u32> = (0..params.width())
        .map(|_| rng.below(u64::from(params.field().modulus())) as u32)
        .collect();
    let w = MessageVector::from_symbols(params.field(), &symbols).expect("symbols are reduced");

    let mut events = Vec::with_capacity(2 * params.servers() + 1);
    for server in 1..=params.servers() {
        events.push(TraceEvent::QuerySent {
            server,
            rows: table.server_rows(target, key, server).expect("in range"),
        });
    }
    let responses = table.respond(target, key, &w).expect("in range");
    for server in 1..=params.servers() {
        events.push(TraceEvent::ResponseReceived {
            server,
            symbols: responses.server(server).to_vec(),
        });
    }
    let decoder = &decoders[&(target, key)];
    let decoded = table.retrieve(target, key, &w, decoder).expect("in range");
    let block: Vec<u32> = (0..decoded.rows()).map(|r| decoded.entry(r, 0)).collect();
    let expected = w.block(target, params.sub_length());
    let expected: Vec<u32> = (0..expected.rows()).map(|r| expected.entry(r, 0)).collect();
    let decoded_matches = block == expected;
    events.push(TraceEvent::Decoded { block });
    Ok(SimulationTrace {
        seed,
        target,
        key,
        message: symbols,
        events,
        decoded_matches,
    })
}

impl SimulationTrace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("target message: {}\n", self.target));
        out.push_str(&format!("key: {}\n", self.key));
        out.push_str(&format!(
            "message vector: {}\n",
            render_symbols(&self.message)
        ));
        for event in &self.events {
            match event {
                TraceEvent::QuerySent { server, rows } => {
                    out.push_str(&format!("query -> server {server}: {rows}\n"));
                }
                TraceEvent::ResponseReceived { server, symbols } => {
                    out.push_str(&format!(
                        "response <- server {server}: {}\n",
                        render_symbols(symbols)
                    ));
                }
                TraceEvent::Decoded { block } => {
                    out.push_str(&format!("decoded block: {}\n", render_symbols(block)));
                }
            }
        }
        if self.decoded_matches {
            out.push_str(&format!("Decoded: matches W_{}\n", self.target));
        } else {
            out.push_str(&format!("Decoded: MISMATCH against W_{}\n", self.target));
        }
        out
    }
}

/// What a coalition sees in one seeded run, and what it can infer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryView {
    pub target: usize,
    pub servers: BTreeSet<usize>,
    pub observed: FpMatrix,
    pub posterior: Vec<Rational>,
}

/// Runs one seeded retrieval and computes the coalition's exact posterior
/// over the target message by key counting on the public table.
pub fn run_adversary(table: &SchemeTable, servers: &BTreeSet<usize>, seed: u64) -> AdversaryView {
    let params = table.params();
    let mut rng = SplitMix64::new(seed);
    let target = 1 + rng.below(params.messages() as u64) as usize;
    let key = rng.below(table.key_count() as u64) as usize;
    let rows: Vec<FpMatrix> = servers
        .iter()
        .map(|&j| table.server_rows(target, key, j).expect("in range"))
        .collect();
    let refs: Vec<&FpMatrix> = rows.iter().collect();
    let observed = FpMatrix::vstack(&refs).expect("shapes agree");
    let posterior =
        adversary_posterior(table, servers, &observed).expect("observation was just realized");
    let total: Rational = posterior.iter().copied().sum();
    debug_assert_eq!(total, Rational::new(1, 1));
    AdversaryView {
        target,
        servers: servers.clone(),
        observed,
        posterior,
    }
}

impl AdversaryView {
    pub fn render(&self, messages: usize) -> String {
        let mut out = String::new();
        let servers: Vec<String> = self.servers.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("target message: {}\n", self.target));
        out.push_str(&format!("colluding servers: {{{}}}\n", servers.join(",")));
        out.push_str(&format!("observed query: {}\n", self.observed));
        let posterior: Vec<String> = self.posterior.iter().map(|p| p.to_string()).collect();
        out.push_str(&format!(
            "posterior over 1..={messages}: [{}]\n",
            posterior.join(" ")
        ));
        out
    }
}

fn render_symbols(symbols: &[u32]) -> String {
    let rendered: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
    format!("[{}]", rendered.join(" "))
}
