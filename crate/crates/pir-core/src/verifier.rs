//! Mechanical verification of correctness, privacy and capacity conditions
//! on any scheme table, with concrete witnesses for every failure.
//!
//! Each checker decides one property family:
//!
//! * correctness — a decoding matrix exists for every realization;
//! * privacy — for every set of colluding servers and every query tuple they
//!   can observe, the number of keys producing that tuple is the same
//!   whatever the target message (so the observation carries no information);
//! * capacity — the rank conditions on query sub-blocks that hold exactly
//!   when the download meets the capacity benchmark.
//!
//! A failed check always carries a witness small enough to re-verify in
//! isolation: the indices involved and the numbers that disagree.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::entropy::{block_selector, checked_power, enumerated_entropy, EntropyError};
use crate::matrix::{block_set, FpMatrix};
use crate::rate::{rate_exact, RateResult, Rational};
use crate::scheme::{SchemeParams, SchemeTable};

/// Subset enumeration is 2^(M-1) per message; refuse beyond this.
pub const MAX_MESSAGES_FOR_SUBSETS: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifierError {
    #[error("{messages} messages need 2^{} interference subsets; the limit is {limit}", messages - 1)]
    SubsetBudgetExceeded { messages: usize, limit: usize },
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("the observed query tuple is never realized by this table")]
    UnrealizedQuery,
}

/// First realization whose block selector falls outside the query row space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectnessWitness {
    pub m: usize,
    pub f: usize,
    pub selector_row: usize,
}

impl CorrectnessWitness {
    /// Re-derives the failure: the decoding system for (m, f) really has no
    /// solution at this selector row.
    pub fn recheck(&self, table: &SchemeTable) -> bool {
        let q = match table.query(self.m, self.f) {
            Ok(q) => q,
            Err(_) => return false,
        };
        matches!(
            q.solve_left_factor(&selector_target(table.params(), self.m)),
            Err(crate::matrix::MatrixError::NoSolution { row }) if row == self.selector_row
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrectnessOutcome {
    /// Every realization is decodable; the solved matrices are kept so
    /// callers can decode without re-solving.
    Pass {
        decoders: BTreeMap<(usize, usize), FpMatrix>,
    },
    Fail {
        witness: CorrectnessWitness,
    },
}

impl CorrectnessOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CorrectnessOutcome::Pass { .. })
    }
}

/// A query observation whose key count differs between target messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyWitness {
    /// The colluding servers (a single server for the standard check).
    pub servers: BTreeSet<usize>,
    /// The observed stacked query rows of those servers.
    pub observed: FpMatrix,
    /// Keys producing this observation, per target message.
    pub counts: Vec<usize>,
}

impl PrivacyWitness {
    /// Recounts the keys for this observation and confirms the imbalance.
    pub fn recheck(&self, table: &SchemeTable) -> bool {
        let counts = observation_counts(table, &self.servers, &self.observed);
        counts == self.counts && counts.iter().any(|&c| c != counts[0])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacyOutcome {
    Pass {
        /// Distinct observations checked, summed over the server sets.
        observations: usize,
    },
    Fail {
        witness: PrivacyWitness,
    },
}

impl PrivacyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, PrivacyOutcome::Pass { .. })
    }
}

/// A rank equality that fails for one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacityWitness {
    /// rank of the stacked queries outside block m differs from one server's.
    ServerRank {
        m: usize,
        f: usize,
        server: usize,
        stacked_rank: usize,
        server_rank: usize,
    },
    /// rank of the stacked queries on the kept blocks is not the sum of the
    /// per-server ranks there.
    SubsetRankSum {
        m: usize,
        f: usize,
        kept: BTreeSet<usize>,
        stacked_rank: usize,
        rank_sum: usize,
    },
    /// rank of the stacked queries outside block m is not the sum over the
    /// colluding servers' ranks there.
    ColluderRankSum {
        m: usize,
        f: usize,
        servers: BTreeSet<usize>,
        stacked_rank: usize,
        rank_sum: usize,
    },
}

impl CapacityWitness {
    /// Recomputes the two sides of the failed equality.
    pub fn recheck(&self, table: &SchemeTable) -> bool {
        let params = table.params();
        let lw = params.sub_length();
        match self {
            CapacityWitness::ServerRank {
                m,
                f,
                server,
                stacked_rank,
                server_rank,
            } => {
                let rest = rest_blocks(params, *m);
                let q = table.query(*m, *f).expect("witness indices are valid");
                let stacked = q.select_columns(&rest).expect("blocks in range").rank();
                let per_server = table
                    .server_rows(*m, *f, *server)
                    .expect("witness indices are valid")
                    .select_columns(&rest)
                    .expect("blocks in range")
                    .rank();
                stacked == *stacked_rank && per_server == *server_rank && stacked != per_server
            }
            CapacityWitness::SubsetRankSum {
                m,
                f,
                kept,
                stacked_rank,
                rank_sum,
            } => {
                let blocks = block_set(kept.iter().copied(), lw);
                let q = table.query(*m, *f).expect("witness indices are valid");
                let stacked = q.select_columns(&blocks).expect("blocks in range").rank();
                let sum: usize = (1..=params.servers())
                    .map(|j| {
                        table
                            .server_rows(*m, *f, j)
                            .expect("witness indices are valid")
                            .select_columns(&blocks)
                            .expect("blocks in range")
                            .rank()
                    })
                    .sum();
                stacked == *stacked_rank && sum == *rank_sum && stacked != sum
            }
            CapacityWitness::ColluderRankSum {
                m,
                f,
                servers,
                stacked_rank,
                rank_sum,
            } => {
                let rest = rest_blocks(params, *m);
                let q = table.query(*m, *f).expect("witness indices are valid");
                let stacked = q.select_columns(&rest).expect("blocks in range").rank();
                let sum: usize = servers
                    .iter()
                    .map(|&j| {
                        table
                            .server_rows(*m, *f, j)
                            .expect("witness indices are valid")
                            .select_columns(&rest)
                            .expect("blocks in range")
                            .rank()
                    })
                    .sum();
                stacked == *stacked_rank && sum == *rank_sum && stacked != sum
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacityOutcome {
    Pass,
    Fail { witness: CapacityWitness },
}

impl CapacityOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CapacityOutcome::Pass)
    }
}

/// A cell where the enumerated conditional entropy disagrees with the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckWitness {
    pub m: usize,
    pub f: usize,
    pub server: usize,
    /// Message blocks given to the conditioning (the known side).
    pub known: BTreeSet<usize>,
    pub entropy: Rational,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrosscheckOutcome {
    Pass { cells: usize },
    Fail { witness: CrosscheckWitness },
}

impl CrosscheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CrosscheckOutcome::Pass { .. })
    }
}

/// The identity target of the decoding equation: zero outside block m,
/// identity inside it.
fn selector_target(params: &SchemeParams, m: usize) -> FpMatrix {
    block_selector(
        params.field(),
        params.messages(),
        params.sub_length(),
        &BTreeSet::from([m]),
    )
}

/// For every realization, solve the decoding equation and keep the factor.
pub fn check_correctness(table: &SchemeTable) -> CorrectnessOutcome {
    let params = table.params();
    let mut decoders = BTreeMap::new();
    for m in 1..=params.messages() {
        let target = selector_target(params, m);
        for f in 0..table.key_count() {
            let q = table.query(m, f).expect("indices are in range");
            match q.solve_left_factor(&target) {
                Ok(decoder) => {
                    decoders.insert((m, f), decoder);
                }
                Err(crate::matrix::MatrixError::NoSolution { row }) => {
                    return CorrectnessOutcome::Fail {
                        witness: CorrectnessWitness {
                            m,
                            f,
                            selector_row: row,
                        },
                    };
                }
                Err(other) => unreachable!("table invariants rule out {other}"),
            }
        }
    }
    CorrectnessOutcome::Pass { decoders }
}

/// Key counts per target message for one observation by `servers`.
fn observation_counts(
    table: &SchemeTable,
    servers: &BTreeSet<usize>,
    observed: &FpMatrix,
) -> Vec<usize> {
    let params = table.params();
    let mut counts = vec![0usize; params.messages()];
    for m in 1..=params.messages() {
        for f in 0..table.key_count() {
            if stacked_observation(table, m, f, servers).entries() == observed.entries() {
                counts[m - 1] += 1;
            }
        }
    }
    counts
}

fn stacked_observation(
    table: &SchemeTable,
    m: usize,
    f: usize,
    servers: &BTreeSet<usize>,
) -> FpMatrix {
    let rows: Vec<FpMatrix> = servers
        .iter()
        .map(|&j| table.server_rows(m, f, j).expect("indices are in range"))
        .collect();
    let refs: Vec<&FpMatrix> = rows.iter().collect();
    FpMatrix::vstack(&refs).expect("shapes agree")
}

/// Privacy against each single server: every realized per-server query value
/// must be produced by the same number of keys for every target message.
/// Equivalently (the reported set form), the number of realizations showing
/// that value across all targets is M times the per-target count.
pub fn check_privacy_standard(table: &SchemeTable) -> PrivacyOutcome {
    check_privacy_colluding(table, 1)
}

/// Privacy against every coalition of `collusion` servers, by the same key
/// counting applied to the stacked tuple the coalition observes.
pub fn check_privacy_colluding(table: &SchemeTable, collusion: usize) -> PrivacyOutcome {
    let params = table.params();
    assert!(
        (1..=params.servers()).contains(&collusion),
        "collusion size must be in [1, servers]"
    );
    let mut observations = 0;
    for coalition in combinations(params.servers(), collusion) {
        let servers: BTreeSet<usize> = coalition.into_iter().collect();
        // Group realizations by observed tuple; BTreeMap keeps the scan order
        // (and therefore the first reported witness) deterministic.
        let mut groups: BTreeMap<Vec<u32>, (FpMatrix, Vec<usize>)> = BTreeMap::new();
        for m in 1..=params.messages() {
            for f in 0..table.key_count() {
                let observed = stacked_observation(table, m, f, &servers);
                groups
                    .entry(observed.entries().to_vec())
                    .or_insert_with(|| (observed, vec![0; params.messages()]))
                    .1[m - 1] += 1;
            }
        }
        observations += groups.len();
        for (observed, counts) in groups.into_values() {
            let per_target = counts[0];
            let total: usize = counts.iter().sum();
            // Count equality across targets, and the equivalent set-form
            // identity total = M * per-target count.
            if counts.iter().any(|&c| c != per_target) || total != params.messages() * per_target {
                return PrivacyOutcome::Fail {
                    witness: PrivacyWitness {
                        servers,
                        observed,
                        counts,
                    },
                };
            }
        }
    }
    PrivacyOutcome::Pass { observations }
}

/// All blocks except message m.
fn rest_blocks(params: &SchemeParams, m: usize) -> BTreeSet<crate::matrix::ColumnBlock> {
    block_set(
        (1..=params.messages()).filter(|&k| k != m),
        params.sub_length(),
    )
}

fn guard_subsets(params: &SchemeParams) -> Result<(), VerifierError> {
    if params.messages() > MAX_MESSAGES_FOR_SUBSETS {
        return Err(VerifierError::SubsetBudgetExceeded {
            messages: params.messages(),
            limit: MAX_MESSAGES_FOR_SUBSETS,
        });
    }
    Ok(())
}

/// Capacity conditions for non-communicating servers, per realization:
/// (a) outside block m the stacked rank equals every single server's rank;
/// (b) for every kept block set containing m, the stacked rank equals the
/// sum of the per-server ranks.
pub fn check_capacity_standard(table: &SchemeTable) -> Result<CapacityOutcome, VerifierError> {
    let params = table.params();
    guard_subsets(params)?;
    for m in 1..=params.messages() {
        let rest = rest_blocks(params, m);
        for f in 0..table.key_count() {
            let q = table.query(m, f).expect("indices are in range");
            let stacked_rest = q.select_columns(&rest).expect("blocks in range").rank();
            for server in 1..=params.servers() {
                let server_rank = table
                    .server_rows(m, f, server)
                    .expect("indices are in range")
                    .select_columns(&rest)
                    .expect("blocks in range")
                    .rank();
                if server_rank != stacked_rest {
                    return Ok(CapacityOutcome::Fail {
                        witness: CapacityWitness::ServerRank {
                            m,
                            f,
                            server,
                            stacked_rank: stacked_rest,
                            server_rank,
                        },
                    });
                }
            }
            if let Some(witness) = subset_rank_violation(table, m, f) {
                return Ok(CapacityOutcome::Fail { witness });
            }
        }
    }
    Ok(CapacityOutcome::Pass)
}

/// Scans every interference subset for (m, f) and returns the first kept
/// block set whose stacked rank is not the per-server rank sum.
fn subset_rank_violation(table: &SchemeTable, m: usize, f: usize) -> Option<CapacityWitness> {
    let params = table.params();
    let others: Vec<usize> = (1..=params.messages()).filter(|&k| k != m).collect();
    let q = table.query(m, f).expect("indices are in range");
    let server_rows: Vec<FpMatrix> = (1..=params.servers())
        .map(|j| table.server_rows(m, f, j).expect("indices are in range"))
        .collect();
    for mask in 0u64..(1 << others.len()) {
        let interference: BTreeSet<usize> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &k)| k)
            .collect();
        let kept: BTreeSet<usize> = (1..=params.messages())
            .filter(|k| !interference.contains(k))
            .collect();
        let blocks = block_set(kept.iter().copied(), params.sub_length());
        let stacked_rank = q.select_columns(&blocks).expect("blocks in range").rank();
        let rank_sum: usize = server_rows
            .iter()
            .map(|rows| {
                rows.select_columns(&blocks)
                    .expect("blocks in range")
                    .rank()
            })
            .sum();
        if stacked_rank != rank_sum {
            return Some(CapacityWitness::SubsetRankSum {
                m,
                f,
                kept,
                stacked_rank,
                rank_sum,
            });
        }
    }
    None
}

/// Capacity conditions against coalitions of `collusion` servers: the subset
/// rank sums of the standard check, plus — outside block m — the stacked
/// rank equaling the rank sum over every coalition.
pub fn check_capacity_colluding(
    table: &SchemeTable,
    collusion: usize,
) -> Result<CapacityOutcome, VerifierError> {
    let params = table.params();
    assert!(
        (1..params.servers()).contains(&collusion),
        "collusion size must be in [1, servers)"
    );
    guard_subsets(params)?;
    let coalitions: Vec<BTreeSet<usize>> = combinations(params.servers(), collusion)
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    for m in 1..=params.messages() {
        let rest = rest_blocks(params, m);
        for f in 0..table.key_count() {
            if let Some(witness) = subset_rank_violation(table, m, f) {
                return Ok(CapacityOutcome::Fail { witness });
            }
            let q = table.query(m, f).expect("indices are in range");
            let stacked_rest = q.select_columns(&rest).expect("blocks in range").rank();
            for coalition in &coalitions {
                let rank_sum: usize = coalition
                    .iter()
                    .map(|&j| {
                        table
                            .server_rows(m, f, j)
                            .expect("indices are in range")
                            .select_columns(&rest)
                            .expect("blocks in range")
                            .rank()
                    })
                    .sum();
                if rank_sum != stacked_rest {
                    return Ok(CapacityOutcome::Fail {
                        witness: CapacityWitness::ColluderRankSum {
                            m,
                            f,
                            servers: coalition.clone(),
                            stacked_rank: stacked_rest,
                            rank_sum,
                        },
                    });
                }
            }
        }
    }
    Ok(CapacityOutcome::Pass)
}

/// Validates the rank shortcut against the enumeration oracle: for every
/// realization, server and known block set, the enumerated conditional
/// entropy of the response must equal the rank of the query on the kept
/// blocks, in log-p units.
pub fn rank_entropy_crosscheck(
    table: &SchemeTable,
    budget: u64,
) -> Result<CrosscheckOutcome, VerifierError> {
    let params = table.params();
    guard_subsets(params)?;
    let needed = checked_power(params.field().modulus(), params.width())
        .saturating_mul(table.key_count() as u128);
    if needed > u128::from(budget) {
        return Err(EntropyError::BudgetExceeded { needed, budget }.into());
    }
    let mut cells = 0;
    for m in 1..=params.messages() {
        let others: Vec<usize> = (1..=params.messages()).filter(|&k| k != m).collect();
        for f in 0..table.key_count() {
            for server in 1..=params.servers() {
                let rows = table
                    .server_rows(m, f, server)
                    .expect("indices are in range");
                for mask in 0u64..(1 << others.len()) {
                    let known: BTreeSet<usize> = others
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &k)| k)
                        .collect();
                    let selector = block_selector(
                        params.field(),
                        params.messages(),
                        params.sub_length(),
                        &known,
                    );
                    let entropy = enumerated_entropy(&rows, &selector, budget)
                        .map_err(VerifierError::Entropy)?;
                    let kept: BTreeSet<usize> = (1..=params.messages())
                        .filter(|k| !known.contains(k))
                        .collect();
                    let blocks = block_set(kept.iter().copied(), params.sub_length());
                    let rank = rows
                        .select_columns(&blocks)
                        .expect("blocks in range")
                        .rank();
                    if entropy != Rational::new(rank as i64, 1) {
                        return Ok(CrosscheckOutcome::Fail {
                            witness: CrosscheckWitness {
                                m,
                                f,
                                server,
                                known,
                                entropy,
                                rank,
                            },
                        });
                    }
                    cells += 1;
                }
            }
        }
    }
    Ok(CrosscheckOutcome::Pass { cells })
}

/// Exact posterior over the target message given what a coalition observed,
/// by key counting on the public table.
pub fn adversary_posterior(
    table: &SchemeTable,
    servers: &BTreeSet<usize>,
    observed: &FpMatrix,
) -> Result<Vec<Rational>, VerifierError> {
    let counts = observation_counts(table, servers, observed);
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(VerifierError::UnrealizedQuery);
    }
    Ok(counts
        .iter()
        .map(|&c| Rational::new(c as i64, total as i64))
        .collect())
}

/// Size-k subsets of [1:n] in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn extend(
        out: &mut Vec<Vec<usize>>,
        current: &mut Vec<usize>,
        next: usize,
        n: usize,
        k: usize,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in next..=n {
            current.push(v);
            extend(out, current, v + 1, n, k);
            current.pop();
        }
    }
    extend(&mut out, &mut current, 1, n, k);
    out
}

/// One verification section: the outcome, or why it was not produced.
///
/// `NotApplicable` marks a check that has no meaning for the request (and
/// does not count against the verdict); `Skipped` marks one that could not
/// be run (and does).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Section<T> {
    Computed(T),
    NotApplicable { reason: String },
    Skipped { reason: String },
}

impl<T> Section<T> {
    fn from_result<E: std::fmt::Display>(result: Result<T, E>) -> Self {
        match result {
            Ok(value) => Section::Computed(value),
            Err(err) => Section::Skipped {
                reason: err.to_string(),
            },
        }
    }
}

/// Verification requested for one collusion size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColludingSection {
    pub collusion: usize,
    pub privacy: Section<PrivacyOutcome>,
    pub capacity: Section<CapacityOutcome>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub budget: u64,
    pub crosscheck: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            budget: crate::entropy::DEFAULT_ENUMERATION_BUDGET,
            crosscheck: false,
        }
    }
}

/// Everything the verifier can say about one table, in a stable order.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub params: SchemeParams,
    pub key_count: usize,
    pub correctness: CorrectnessOutcome,
    pub privacy_standard: PrivacyOutcome,
    pub capacity_standard: Section<CapacityOutcome>,
    pub colluding: Vec<ColludingSection>,
    pub crosscheck: Option<Section<CrosscheckOutcome>>,
    pub rate: Section<RateResult>,
}

/// Runs every requested check. Section errors (budget, size guards) are
/// recorded in place instead of aborting the rest of the report.
pub fn full_report(
    table: &SchemeTable,
    collusion_sizes: &[usize],
    options: &ReportOptions,
) -> VerificationReport {
    let params = table.params().clone();
    let correctness = check_correctness(table);
    let privacy_standard = check_privacy_standard(table);
    let capacity_standard = Section::from_result(check_capacity_standard(table));
    let mut sizes: Vec<usize> = collusion_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let colluding = sizes
        .into_iter()
        .map(|collusion| {
            let privacy = if (1..=params.servers()).contains(&collusion) {
                Section::Computed(check_privacy_colluding(table, collusion))
            } else {
                Section::NotApplicable {
                    reason: format!(
                        "no coalition of {collusion} among {} servers",
                        params.servers()
                    ),
                }
            };
            let capacity = if (1..params.servers()).contains(&collusion) {
                Section::from_result(check_capacity_colluding(table, collusion))
            } else if collusion == params.servers() {
                Section::NotApplicable {
                    reason: format!(
                        "capacity is undefined when all {} servers collude",
                        params.servers()
                    ),
                }
            } else {
                Section::NotApplicable {
                    reason: format!(
                        "no coalition of {collusion} among {} servers",
                        params.servers()
                    ),
                }
            };
            ColludingSection {
                collusion,
                privacy,
                capacity,
            }
        })
        .collect();
    let crosscheck = options
        .crosscheck
        .then(|| Section::from_result(rank_entropy_crosscheck(table, options.budget)));
    let rate = Section::from_result(rate_exact(table, options.budget));
    VerificationReport {
        params,
        key_count: table.key_count(),
        correctness,
        privacy_standard,
        capacity_standard,
        colluding,
        crosscheck,
        rate,
    }
}

impl VerificationReport {
    /// True when every property check ran and passed. The rate line is
    /// informational and never gates; a `NotApplicable` section does not
    /// gate either, but a `Skipped` one does — an unchecked property is not
    /// a verified one.
    pub fn all_pass(&self) -> bool {
        fn section_ok<T>(section: &Section<T>, passed: impl Fn(&T) -> bool) -> bool {
            match section {
                Section::Computed(outcome) => passed(outcome),
                Section::NotApplicable { .. } => true,
                Section::Skipped { .. } => false,
            }
        }
        self.correctness.passed()
            && self.privacy_standard.passed()
            && section_ok(&self.capacity_standard, CapacityOutcome::passed)
            && self.colluding.iter().all(|section| {
                section_ok(&section.privacy, PrivacyOutcome::passed)
                    && section_ok(&section.capacity, CapacityOutcome::passed)
            })
            && self
                .crosscheck
                .as_ref()
                .is_none_or(|section| section_ok(section, CrosscheckOutcome::passed))
    }

    /// Plain-text report: one line per property, witnesses indented beneath
    /// their verdicts. The layout is stable so reports can be diffed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let rows: Vec<String> = self
            .params
            .rows_per_server()
            .iter()
            .map(|r| r.to_string())
            .collect();
        out.push_str(&format!(
            "scheme: p={} servers={} messages={} sublength={} rows=[{}] keys={}\n",
            self.params.field().modulus(),
            self.params.servers(),
            self.params.messages(),
            self.params.sub_length(),
            rows.join(" "),
            self.key_count
        ));
        match &self.correctness {
            CorrectnessOutcome::Pass { decoders } => {
                out.push_str(&format!(
                    "correctness: PASS ({} decoding matrices)\n",
                    decoders.len()
                ));
            }
            CorrectnessOutcome::Fail { witness } => {
                out.push_str("correctness: FAIL\n");
                out.push_str(&format!(
                    "  witness: m={} f={} selector-row={} outside query row space\n",
                    witness.m, witness.f, witness.selector_row
                ));
            }
        }
        render_privacy(&mut out, "privacy standard", &self.privacy_standard);
        render_capacity(&mut out, "capacity standard", &self.capacity_standard);
        for section in &self.colluding {
            let label = format!("privacy colluding T={}", section.collusion);
            match &section.privacy {
                Section::Computed(outcome) => render_privacy(&mut out, &label, outcome),
                Section::NotApplicable { reason } => {
                    out.push_str(&format!("{label}: not applicable ({reason})\n"));
                }
                Section::Skipped { reason } => {
                    out.push_str(&format!("{label}: skipped ({reason})\n"));
                }
            }
            render_capacity(
                &mut out,
                &format!("capacity colluding T={}", section.collusion),
                &section.capacity,
            );
        }
        if let Some(section) = &self.crosscheck {
            match section {
                Section::Computed(CrosscheckOutcome::Pass { cells }) => {
                    out.push_str(&format!("rank-entropy crosscheck: PASS ({cells} cells)\n"));
                }
                Section::Computed(CrosscheckOutcome::Fail { witness }) => {
                    out.push_str("rank-entropy crosscheck: FAIL\n");
                    out.push_str(&format!(
                        "  witness: m={} f={} server={} known={} entropy={} rank={}\n",
                        witness.m,
                        witness.f,
                        witness.server,
                        render_set(&witness.known),
                        witness.entropy,
                        witness.rank
                    ));
                }
                Section::NotApplicable { reason } | Section::Skipped { reason } => {
                    out.push_str(&format!("rank-entropy crosscheck: skipped ({reason})\n"));
                }
            }
        }
        match &self.rate {
            Section::Computed(rate) => {
                out.push_str(&format!(
                    "rate: {} (capacity {}, {})\n",
                    rate.rate,
                    rate.capacity,
                    if rate.achieves_capacity {
                        "achieved"
                    } else {
                        "not achieved"
                    }
                ));
            }
            Section::NotApplicable { reason } | Section::Skipped { reason } => {
                out.push_str(&format!("rate: skipped ({reason})\n"));
            }
        }
        out
    }
}

fn render_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn render_privacy(out: &mut String, label: &str, outcome: &PrivacyOutcome) {
    match outcome {
        PrivacyOutcome::Pass { observations } => {
            out.push_str(&format!(
                "{label}: PASS ({observations} distinct observations)\n"
            ));
        }
        PrivacyOutcome::Fail { witness } => {
            out.push_str(&format!("{label}: FAIL\n"));
            let counts: Vec<String> = witness.counts.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(
                "  witness: servers={} counts=[{}] query={}\n",
                render_set(&witness.servers),
                counts.join(" "),
                witness.observed
            ));
        }
    }
}

fn render_capacity(out: &mut String, label: &str, section: &Section<CapacityOutcome>) {
    match section {
        Section::Computed(CapacityOutcome::Pass) => {
            out.push_str(&format!("{label}: PASS\n"));
        }
        Section::Computed(CapacityOutcome::Fail { witness }) => {
            out.push_str(&format!("{label}: FAIL\n"));
            match witness {
                CapacityWitness::ServerRank {
                    m,
                    f,
                    server,
                    stacked_rank,
                    server_rank,
                } => {
                    out.push_str(&format!(
                        "  witness: m={m} f={f} server={server} rank(stacked[rest])={stacked_rank} rank(server[rest])={server_rank}\n"
                    ));
                }
                CapacityWitness::SubsetRankSum {
                    m,
                    f,
                    kept,
                    stacked_rank,
                    rank_sum,
                } => {
                    out.push_str(&format!(
                        "  witness: m={m} f={f} kept={} rank(stacked[kept])={stacked_rank} server-rank-sum={rank_sum}\n",
                        render_set(kept)
                    ));
                }
                CapacityWitness::ColluderRankSum {
                    m,
                    f,
                    servers,
                    stacked_rank,
                    rank_sum,
                } => {
                    out.push_str(&format!(
                        "  witness: m={m} f={f} servers={} rank(stacked[rest])={stacked_rank} colluder-rank-sum={rank_sum}\n",
                        render_set(servers)
                    ));
                }
            }
        }
        Section::NotApplicable { reason } => {
            out.push_str(&format!("{label}: not applicable ({reason})\n"));
        }
        Section::Skipped { reason } => {
            out.push_str(&format!("{label}: skipped ({reason})\n"));
        }
    }
}
