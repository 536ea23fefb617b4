#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicecal::workload::{generate, GenConfig, IntRange};
use slicecal::Instance;

/// Random instance with K <= 6, N <= 5, R <= 4, T <= 3. Demands and
/// durations may exceed capacity or horizon so unplaceable requests show up.
pub fn oracle_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let horizon = rng.gen_range(1..=5);
    let capacity = rng.gen_range(0..=4);
    let tenants = rng.gen_range(1..=3);
    let weights: Vec<f64> = (0..tenants).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let config = GenConfig {
        horizon,
        capacity,
        num_requests: rng.gen_range(0..=6),
        tenant_shares: weights.iter().map(|w| w / total).collect(),
        embb_fraction: 0.5,
        arrival_range: IntRange::new(1, horizon),
        demand_range: IntRange::new(1, capacity.max(1) + 1),
        duration_range: IntRange::new(1, horizon + 1),
        seed,
    };
    generate(&config).expect("oracle config is valid")
}

/// Default-setting instance with K and R spread over the sweep ranges.
pub fn reference_instance(seed: u64) -> Instance {
    let config = GenConfig {
        num_requests: 10 * (1 + (seed % 10) as u32),
        capacity: 10 * (1 + ((seed / 10) % 10) as u32),
        seed,
        ..GenConfig::default()
    };
    generate(&config).expect("default config is valid")
}
