//! Exhaustive start-or-reject enumeration.
//!
//! Every assignment is rebuilt and checked from scratch; nothing is shared
//! with the branch-and-bound search so the two can cross-check each other.

use super::SolveMode;
use crate::model::{Instance, Slot};

/// Largest assignment space [`enumerate_all`] accepts.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("search space of {size} assignments exceeds the limit of {limit}")]
    SpaceTooLarge { size: u64, limit: u64 },
}

/// Maximum welfare over every start-or-reject assignment feasible under
/// `mode`.
pub fn enumerate_all(instance: &Instance, mode: SolveMode) -> Result<u64, EnumerateError> {
    let size = instance.search_space();
    if size > ENUMERATION_LIMIT {
        return Err(EnumerateError::SpaceTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }

    // Choice 0 rejects; choice i > 0 starts at the i-th admissible slot.
    let options: Vec<Vec<Slot>> = instance
        .requests
        .iter()
        .map(|r| r.start_window(instance.horizon).collect())
        .collect();
    let mut digits = vec![0usize; options.len()];
    let slots = instance.horizon as usize + 1;
    let mut best = 0u64;

    loop {
        let mut usage = vec![0u64; slots];
        let mut tenant_usage = vec![vec![0u64; slots]; instance.tenants.len()];
        let mut value = 0u64;
        let mut ok = true;
        'requests: for (k, request) in instance.requests.iter().enumerate() {
            if digits[k] == 0 {
                continue;
            }
            let start = options[k][digits[k] - 1];
            let tenant = instance
                .tenants
                .iter()
                .position(|t| t.id == request.tenant)
                .expect("request tenant exists");
            for slot in start..start + request.duration {
                let n = slot as usize;
                if n >= slots {
                    ok = false;
                    break 'requests;
                }
                usage[n] += u64::from(request.demand);
                tenant_usage[tenant][n] += u64::from(request.demand);
            }
            value += u64::from(request.utility(start, instance.horizon));
        }
        if ok {
            ok = usage.iter().all(|&u| u <= u64::from(instance.capacity));
        }
        if ok && mode == SolveMode::Dedicated {
            ok = instance
                .tenants
                .iter()
                .zip(&tenant_usage)
                .all(|(t, per_slot)| per_slot.iter().all(|&u| u <= u64::from(t.reserved)));
        }
        if ok {
            best = best.max(value);
        }

        // Advance the mixed-radix counter.
        let mut position = 0;
        loop {
            if position == digits.len() {
                return Ok(best);
            }
            digits[position] += 1;
            if digits[position] <= options[position].len() {
                break;
            }
            digits[position] = 0;
            position += 1;
        }
    }
}
