//! Seeded random instance generation.
//!
//! The defaults reproduce the reference evaluation setting: 10 slots,
//! 20 units per slot, three tenants holding 20/20/60 percent of capacity,
//! half of all requests EMBB, and arrival, demand and duration each drawn
//! uniformly from `1..=5`.

use crate::model::{Instance, Request, SliceType, Tenant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifier of the generator algorithm; stored next to sweep results.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Inclusive integer range, written `[lo, hi]` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub const fn new(lo: u32, hi: u32) -> Self {
        IntRange { lo, hi }
    }
}

impl From<[u32; 2]> for IntRange {
    fn from([lo, hi]: [u32; 2]) -> Self {
        IntRange { lo, hi }
    }
}

impl From<IntRange> for [u32; 2] {
    fn from(r: IntRange) -> Self {
        [r.lo, r.hi]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub horizon: u32,
    pub capacity: u32,
    pub num_requests: u32,
    pub tenant_shares: Vec<f64>,
    pub embb_fraction: f64,
    pub arrival_range: IntRange,
    pub demand_range: IntRange,
    pub duration_range: IntRange,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            horizon: 10,
            capacity: 20,
            num_requests: 50,
            tenant_shares: vec![0.2, 0.2, 0.6],
            embb_fraction: 0.5,
            arrival_range: IntRange::new(1, 5),
            demand_range: IntRange::new(1, 5),
            duration_range: IntRange::new(1, 5),
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon < 1 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.tenant_shares.is_empty() {
            return Err(invalid("tenant_shares", "at least one tenant is required"));
        }
        if let Some(bad) = self.tenant_shares.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(invalid("tenant_shares", format!("share {bad} is negative or not finite")));
        }
        let total: f64 = self.tenant_shares.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("tenant_shares", format!("shares sum to {total}, expected 1")));
        }
        if !(0.0..=1.0).contains(&self.embb_fraction) {
            return Err(invalid("embb_fraction", format!("{} is outside [0, 1]", self.embb_fraction)));
        }
        for (field, range) in [
            ("arrival_range", self.arrival_range),
            ("demand_range", self.demand_range),
            ("duration_range", self.duration_range),
        ] {
            if range.lo < 1 || range.lo > range.hi {
                return Err(invalid(
                    field,
                    format!("[{}, {}] must be non-empty with bounds >= 1", range.lo, range.hi),
                ));
            }
        }
        if self.arrival_range.hi > self.horizon {
            return Err(invalid(
                "arrival_range",
                format!("upper bound {} exceeds horizon {}", self.arrival_range.hi, self.horizon),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, crate::model::ModelError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Splits `capacity` by `shares`: each tenant gets the floor of its share,
/// and the units lost to rounding go to the largest share (first on ties).
pub fn reservations(shares: &[f64], capacity: u32) -> Vec<u32> {
    // The epsilon keeps e.g. 0.6 * 20 from flooring to 11.
    let mut reserved: Vec<u32> = shares
        .iter()
        .map(|s| ((s * f64::from(capacity)) + 1e-9).floor() as u32)
        .collect();
    let assigned: u32 = reserved.iter().sum();
    if let Some(largest) = shares
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, &s)| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((i, s)),
        })
        .map(|(i, _)| i)
    {
        if assigned <= capacity {
            reserved[largest] += capacity - assigned;
        } else {
            reserved[largest] -= assigned - capacity;
        }
    }
    reserved
}

/// Draws a random instance. Identical configs give identical instances.
pub fn generate(config: &GenConfig) -> Result<Instance, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let tenants: Vec<Tenant> = reservations(&config.tenant_shares, config.capacity)
        .into_iter()
        .zip(&config.tenant_shares)
        .enumerate()
        .map(|(i, (reserved, &share))| Tenant {
            id: i as u32,
            reserved,
            share,
        })
        .collect();

    let tenant_count = tenants.len() as u32;
    let requests = (0..config.num_requests)
        .map(|id| {
            let tenant = rng.gen_range(0..tenant_count);
            let slice = if rng.gen_bool(config.embb_fraction) {
                SliceType::Embb
            } else {
                SliceType::EmbbRllc
            };
            let arrival = rng.gen_range(config.arrival_range.lo..=config.arrival_range.hi);
            let demand = rng.gen_range(config.demand_range.lo..=config.demand_range.hi);
            let duration = rng.gen_range(config.duration_range.lo..=config.duration_range.hi);
            Request {
                id,
                tenant,
                slice,
                arrival,
                demand,
                duration,
            }
        })
        .collect();

    let instance = Instance {
        horizon: config.horizon,
        capacity: config.capacity,
        tenants,
        requests,
    };
    debug_assert!(instance.check().is_ok());
    Ok(instance)
}
