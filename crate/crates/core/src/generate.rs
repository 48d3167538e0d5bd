//! Seeded generators for the three built-in problem families.
//!
//! Every instance carries trivial objective bounds:
//!
//! | class       | objective_lb          | objective_ub            |
//! |-------------|-----------------------|-------------------------|
//! | bin-packing | 1                     | number of items         |
//! | knapsack    | 0                     | sum of values           |
//! | jobshop     | longest job (sum of its operations) | sum of all durations |

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, ParamValue, ProblemClass};

pub const BIN_PACKING_ITEMS: RangeInclusive<usize> = 4..=60;
pub const JOBSHOP_JOBS: RangeInclusive<usize> = 2..=6;
pub const JOBSHOP_MACHINES: RangeInclusive<usize> = 2..=6;
pub const KNAPSACK_ITEMS: RangeInclusive<usize> = 4..=40;

pub const BIN_CAPACITY: i64 = 100;

pub fn size_range(class: ProblemClass) -> RangeInclusive<usize> {
    match class {
        ProblemClass::BinPacking => BIN_PACKING_ITEMS,
        ProblemClass::Jobshop => JOBSHOP_JOBS,
        ProblemClass::Knapsack => KNAPSACK_ITEMS,
    }
}

/// Sizes used for training datasets: small enough that the built-in solver
/// proves optimality for nearly every instance.
pub fn dataset_sizes(class: ProblemClass) -> RangeInclusive<usize> {
    match class {
        ProblemClass::BinPacking => 6..=14,
        ProblemClass::Jobshop => 2..=4,
        ProblemClass::Knapsack => 8..=22,
    }
}

/// `count` instances cycling through `sizes`; instance `i` uses seed
/// `seed * 1_000_000 + i`, so batches from different base seeds do not
/// share ids.
pub fn generate_batch(
    class: ProblemClass,
    count: usize,
    sizes: RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<Instance>> {
    generate_indexed(class, 0..count, sizes, seed)
}

/// Instances `indices` of the batch sequence for `seed`; a batch split into
/// consecutive index ranges equals the whole batch.
pub fn generate_indexed(
    class: ProblemClass,
    indices: core::ops::Range<usize>,
    sizes: RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<Instance>> {
    let (lo, hi) = (*sizes.start(), *sizes.end());
    if lo > hi {
        return Err(Error::Range { what: "sizes", detail: format!("empty range {lo}..={hi}") });
    }
    indices
        .map(|i| {
            let size = lo + i % (hi - lo + 1);
            generate_instance(class, size, seed.wrapping_mul(1_000_000).wrapping_add(i as u64))
        })
        .collect()
}

fn rng_for(class: ProblemClass, size: usize, seed: u64) -> ChaCha8Rng {
    let salt = match class {
        ProblemClass::BinPacking => 0x6269_6e70,
        ProblemClass::Jobshop => 0x6a6f_6273,
        ProblemClass::Knapsack => 0x6b6e_6170,
    };
    ChaCha8Rng::seed_from_u64(seed ^ (salt << 16) ^ ((size as u64) << 48))
}

fn check_size(what: &'static str, size: usize, range: RangeInclusive<usize>) -> Result<()> {
    if range.contains(&size) {
        Ok(())
    } else {
        Err(Error::Range { what, detail: format!("{size} not in {}..={}", range.start(), range.end()) })
    }
}

/// Deterministic instance of `class` with `size` items (jobs for jobshop).
///
/// Jobshop draws its machine count from the seed; use [`jobshop`] to pick
/// both dimensions.
pub fn generate_instance(class: ProblemClass, size: usize, seed: u64) -> Result<Instance> {
    check_size(class.name(), size, size_range(class))?;
    let mut rng = rng_for(class, size, seed);
    let id = format!("{}-{}-{}", class.name(), size, seed);
    match class {
        ProblemClass::BinPacking => {
            // Item weights are drawn from a per-instance band so that the
            // fill ratio (and hence the optimum's position in 1..n) varies.
            let lo = rng.random_range(5..=40);
            let hi = rng.random_range(lo + 10..=(lo + 60).min(BIN_CAPACITY));
            let weights: Vec<i64> = (0..size).map(|_| rng.random_range(lo..=hi)).collect();
            Ok(bin_packing(id, weights, BIN_CAPACITY))
        }
        ProblemClass::Knapsack => {
            let values: Vec<i64> = (0..size).map(|_| rng.random_range(1..=60)).collect();
            let weights: Vec<i64> = (0..size).map(|_| rng.random_range(1..=40)).collect();
            let total: i64 = weights.iter().sum();
            let ratio = rng.random_range(20..=70);
            let capacity = (total * ratio / 100).max(1);
            Ok(knapsack(id, values, weights, capacity))
        }
        ProblemClass::Jobshop => {
            let machines = rng.random_range(JOBSHOP_MACHINES);
            Ok(jobshop_with(&mut rng, id, size, machines))
        }
    }
}

/// Jobshop with explicit dimensions; every job visits every machine once.
pub fn jobshop(jobs: usize, machines: usize, seed: u64) -> Result<Instance> {
    check_size("jobshop jobs", jobs, JOBSHOP_JOBS)?;
    check_size("jobshop machines", machines, JOBSHOP_MACHINES)?;
    let mut rng = rng_for(ProblemClass::Jobshop, jobs * 16 + machines, seed);
    let id = format!("jobshop-{jobs}x{machines}-{seed}");
    Ok(jobshop_with(&mut rng, id, jobs, machines))
}

fn jobshop_with(rng: &mut ChaCha8Rng, id: String, jobs: usize, machines: usize) -> Instance {
    let mut durations = Vec::with_capacity(jobs);
    let mut routing = Vec::with_capacity(jobs);
    for _ in 0..jobs {
        let mut order: Vec<i64> = (0..machines as i64).collect();
        order.shuffle(rng);
        routing.push(order);
        durations.push((0..machines).map(|_| rng.random_range(1..=9)).collect());
    }
    jobshop_from(id, durations, routing)
}

pub fn bin_packing(id: impl ToString, weights: Vec<i64>, capacity: i64) -> Instance {
    let n = weights.len() as i64;
    let mut params = BTreeMap::new();
    params.insert("capacity".to_string(), ParamValue::Int(capacity));
    params.insert("weights".to_string(), ParamValue::List(weights));
    Instance {
        id: id.to_string(),
        class: ProblemClass::BinPacking,
        params,
        objective_lb: 1,
        objective_ub: n.max(1),
        known_optimum: None,
    }
}

pub fn knapsack(id: impl ToString, values: Vec<i64>, weights: Vec<i64>, capacity: i64) -> Instance {
    let total: i64 = values.iter().sum();
    let mut params = BTreeMap::new();
    params.insert("capacity".to_string(), ParamValue::Int(capacity));
    params.insert("values".to_string(), ParamValue::List(values));
    params.insert("weights".to_string(), ParamValue::List(weights));
    Instance {
        id: id.to_string(),
        class: ProblemClass::Knapsack,
        params,
        objective_lb: 0,
        objective_ub: total,
        known_optimum: None,
    }
}

/// `durations[j][k]` is the processing time of job `j`'s `k`-th operation,
/// which runs on machine `machines[j][k]`.
pub fn jobshop_from(id: impl ToString, durations: Vec<Vec<i64>>, machines: Vec<Vec<i64>>) -> Instance {
    let n_machines = machines.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let longest_job = durations.iter().map(|j| j.iter().sum::<i64>()).max().unwrap_or(0);
    let total: i64 = durations.iter().flatten().sum();
    let mut params = BTreeMap::new();
    params.insert("durations".to_string(), ParamValue::Nested(durations));
    params.insert("machines".to_string(), ParamValue::Nested(machines));
    params.insert("n_machines".to_string(), ParamValue::Int(n_machines));
    Instance {
        id: id.to_string(),
        class: ProblemClass::Jobshop,
        params,
        objective_lb: longest_job,
        objective_ub: total,
        known_optimum: None,
    }
}
