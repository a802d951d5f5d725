//! Exact rate and capacity arithmetic.
//!
//! Rates and capacities are ratios of entropies measured in log-p units, and
//! "achieves capacity" is an exact equality claim, so everything here is a
//! rational number. No floating point.

use crate::entropy::{conditional_entropy, Conditioning, EntropyError};
use crate::scheme::SchemeTable;

pub type Rational = num_rational::Ratio<i64>;

/// Download rate of a scheme next to its capacity benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateResult {
    /// min over m of sublength / (total download entropy for m).
    pub rate: Rational,
    /// Per-message total download entropy, in log-p units.
    pub per_message_download: Vec<Rational>,
    /// Capacity benchmark for a single curious server.
    pub capacity: Rational,
    /// Exact equality of rate and capacity.
    pub achieves_capacity: bool,
}

/// Capacity of retrieval with `collusion` cooperating servers out of
/// `servers`, with `messages` stored messages: (1 - T/S) / (1 - (T/S)^M).
pub fn capacity_formula(
    servers: usize,
    messages: usize,
    collusion: usize,
) -> Result<Rational, EntropyError> {
    if collusion == 0 || collusion >= servers {
        return Err(EntropyError::InvalidCollusion { collusion, servers });
    }
    let ratio = Rational::new(collusion as i64, servers as i64);
    let one = Rational::new(1, 1);
    let mut power = one;
    for _ in 0..messages {
        power *= ratio;
    }
    Ok((one - ratio) / (one - power))
}

/// Exact rate of the scheme, from the exhaustive entropy oracle.
pub fn rate_exact(table: &SchemeTable, budget: u64) -> Result<RateResult, EntropyError> {
    let params = table.params();
    let mut per_message_download = Vec::with_capacity(params.messages());
    for m in 1..=params.messages() {
        let mut download = Rational::new(0, 1);
        for server in 1..=params.servers() {
            download += conditional_entropy(table, m, server, &Conditioning::OwnQuery, budget)?;
        }
        per_message_download.push(download);
    }
    let sub_length = Rational::new(params.sub_length() as i64, 1);
    let mut rate: Option<Rational> = None;
    for (i, download) in per_message_download.iter().enumerate() {
        if *download.numer() == 0 {
            return Err(EntropyError::ZeroDownload { m: i + 1 });
        }
        let r = sub_length / *download;
        rate = Some(match rate {
            None => r,
            Some(best) => best.min(r),
        });
    }
    let rate = rate.expect("schemes have at least two messages");
    let capacity = capacity_formula(params.servers(), params.messages(), 1)?;
    Ok(RateResult {
        rate,
        per_message_download,
        capacity,
        achieves_capacity: rate == capacity,
    })
}
