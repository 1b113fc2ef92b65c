use serde::Serialize;

use crate::codec::{parse_container, read_payload};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlBudget {
    pub baseline_bits: f64,
    pub baseline_bytes: f64,
}

/// Cost of sending `k` (index, f32 value) pairs: `k (log2 n + 32)` bits.
pub fn fl_budget(n: usize, k: usize) -> Result<FlBudget> {
    if n == 0 || k > n {
        return Err(Error::param(format!("need 0 <= k <= n and n >= 1, got n={n}, k={k}")));
    }
    let bits = k as f64 * ((n as f64).log2() + 32.0);
    Ok(FlBudget {
        baseline_bits: bits,
        baseline_bytes: bits / 8.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurpBudget {
    pub header_bytes: u64,
    /// Record bits, excluding the final padding.
    pub payload_bits: u64,
    pub record_count: u64,
    pub total_bytes: u64,
}

pub fn surp_budget(container: &[u8]) -> Result<SurpBudget> {
    let (header, payload) = parse_container(container)?;
    let records = read_payload(&header, payload)?;
    Ok(SurpBudget {
        header_bytes: (container.len() - payload.len()) as u64,
        payload_bits: records.iter().map(|r| r.bits).sum(),
        record_count: header.record_count,
        total_bytes: container.len() as u64,
    })
}
