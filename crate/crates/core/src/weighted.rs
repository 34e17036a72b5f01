//! Weighted distances over measurement partitions.
//!
//! A measurement partition splits the `n` qubits into disjoint blocks. Its
//! weighted sum adds the Bures length of every block's marginals divided by the
//! block size; the weighted distance is the largest weighted sum over all
//! partitions. [`weighted_distance`] finds it exactly with a dynamic program
//! over subset masks (`O(3^n)` block visits); [`weighted_distance_bruteforce`]
//! walks every partition and is kept as an independent check.

use crate::distances::{bures_length, FidelityConvention};
use crate::error::{Error, Result};
pub use crate::mask::SubsetMask;
use crate::par::{map_indexed, Execution};
use crate::states::{DensityMatrix, DEFAULT_MAX_QUBITS};
use serde::Serialize;
use std::cmp::Ordering;

/// Largest `n` accepted by [`enumerate_partitions`].
pub const ENUMERATION_MAX_QUBITS: usize = 10;
/// Largest `n` accepted by [`weighted_distance_bruteforce`].
pub const BRUTEFORCE_MAX_QUBITS: usize = 8;

/// Disjoint blocks covering all qubits, ordered by their lowest qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Partition {
    blocks: Vec<SubsetMask>,
}

impl Partition {
    /// Checks disjointness and coverage of `0..n`; blocks are re-sorted.
    pub fn new(mut blocks: Vec<SubsetMask>, n: usize) -> Result<Self> {
        let full = SubsetMask::full(n);
        let mut seen = SubsetMask::from_bits(0);
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !b.is_subset_of(full) {
                return Err(Error::InvalidPartition(format!("block {b} outside {n} qubits")));
            }
            if b.intersects(seen) {
                return Err(Error::InvalidPartition(format!("block {b} overlaps another block")));
            }
            seen = seen.union(*b);
        }
        if seen != full {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {seen}, expected all {n} qubits"
            )));
        }
        blocks.sort_by_key(|b| b.lowest());
        Ok(Partition { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|q| SubsetMask::from_qubits([q])).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            blocks: vec![SubsetMask::full(n)],
        }
    }

    pub fn blocks(&self) -> &[SubsetMask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Qubit count covered by the partition.
    pub fn qubits(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    /// Tie-break order: fewer blocks first, then lexicographic block masks.
    fn tie_order(&self, other: &Partition) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let a: Vec<u32> = self.blocks.iter().map(|b| b.bits()).collect();
            let b: Vec<u32> = other.blocks.iter().map(|b| b.bits()).collect();
            a.cmp(&b)
        })
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

/// Bures length of the marginals on every nonempty qubit subset, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistanceCache {
    n: usize,
    values: Vec<f64>,
}

impl BlockDistanceCache {
    /// Builds a cache from explicit values; `values[mask]` for every mask in
    /// `0..2^n` (entry 0 is ignored).
    pub fn from_values(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch(1 << n, values.len()));
        }
        values[0] = 0.0;
        Ok(BlockDistanceCache { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: SubsetMask) -> f64 {
        self.values[mask.bits() as usize]
    }

    /// Bures length of the full states.
    pub fn global(&self) -> f64 {
        self.get(SubsetMask::full(self.n))
    }

    /// `(mask, value)` for every nonempty subset in increasing mask order.
    pub fn entries(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &v)| (SubsetMask::from_bits(m as u32), v))
    }

    fn weight(&self, mask: SubsetMask) -> f64 {
        self.get(mask) / mask.size() as f64
    }
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix, max: usize) -> Result<usize> {
    if rho.n() != sigma.n() {
        return Err(Error::DimensionMismatch(rho.n(), sigma.n()));
    }
    if rho.n() > max {
        return Err(Error::DimensionTooLarge { qubits: rho.n(), max });
    }
    Ok(rho.n())
}

pub fn subset_distance_cache(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BlockDistanceCache> {
    subset_distance_cache_with(rho, sigma, Execution::Parallel)
}

/// Same as [`subset_distance_cache`] with explicit control over threading.
/// Entries are independent and collected by mask, so the result does not
/// depend on `exec`.
pub fn subset_distance_cache_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    exec: Execution,
) -> Result<BlockDistanceCache> {
    subset_distance_cache_convention(rho, sigma, exec, FidelityConvention::Root)
}

/// Cache whose entries use `convention` to turn block fidelities into lengths.
pub fn subset_distance_cache_convention(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    exec: Execution,
    convention: FidelityConvention,
) -> Result<BlockDistanceCache> {
    let n = check_pair(rho, sigma, DEFAULT_MAX_QUBITS)?;
    let entries = map_indexed(1 << n, exec, |m| {
        if m == 0 {
            return Ok(0.0);
        }
        let mask = SubsetMask::from_bits(m as u32);
        let v = bures_length(&rho.marginal(mask)?, &sigma.marginal(mask)?)?;
        Ok(convention.length_of(&v))
    });
    let values = entries.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(BlockDistanceCache { n, values })
}

/// `sum_alpha cache[B_alpha] / |B_alpha|`.
pub fn weighted_sum(p: &Partition, cache: &BlockDistanceCache) -> Result<f64> {
    if p.qubits() != cache.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} qubits, cache has {}",
            p.qubits(),
            cache.n()
        )));
    }
    Partition::new(p.blocks.clone(), cache.n())?;
    Ok(sum_right_nested(p, cache))
}

// Summation order matches the DP recursion f(S) = w(B) + f(S \ B), so both
// routes produce bit-identical values for the same partition.
fn sum_right_nested(p: &Partition, cache: &BlockDistanceCache) -> f64 {
    p.blocks.iter().rev().fold(0.0, |acc, &b| cache.weight(b) + acc)
}

/// One block of the maximizing partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockContribution {
    pub mask: SubsetMask,
    pub size: usize,
    pub bures: f64,
    pub contribution: f64,
}

/// Weighted distance with its maximizing partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedResult {
    pub value: f64,
    #[serde(rename = "blocks")]
    pub per_block: Vec<BlockContribution>,
    #[serde(rename = "partition")]
    pub argmax_partition: Partition,
}

impl WeightedResult {
    fn from_partition(value: f64, partition: Partition, cache: &BlockDistanceCache) -> Self {
        let per_block = partition
            .blocks()
            .iter()
            .map(|&mask| BlockContribution {
                mask,
                size: mask.size(),
                bures: cache.get(mask),
                contribution: cache.weight(mask),
            })
            .collect();
        WeightedResult {
            value,
            per_block,
            argmax_partition: partition,
        }
    }
}

pub fn weighted_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<WeightedResult> {
    let cache = subset_distance_cache(rho, sigma)?;
    Ok(weighted_distance_from_cache(&cache))
}

/// Exact maximization over set partitions by subset DP.
///
/// `f(S)` is the best weighted sum over partitions of `S`; every candidate first
/// block contains the lowest qubit of `S`, so each partition is generated once.
/// Among equal values the partition with fewer blocks wins, then the one whose
/// block list (ordered by lowest qubit) is lexicographically smallest.
pub fn weighted_distance_from_cache(cache: &BlockDistanceCache) -> WeightedResult {
    let n = cache.n();
    let size = 1usize << n;
    let weights: Vec<f64> = (0..size)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                cache.weight(SubsetMask::from_bits(m as u32))
            }
        })
        .collect();
    let mut best = vec![0.0f64; size];
    let mut count = vec![0u32; size];
    let mut first = vec![0u32; size];

    for s in 1..size as u32 {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut have = false;
        let (mut bv, mut bc, mut bb) = (0.0f64, 0u32, 0u32);
        let mut sub = rest;
        loop {
            let block = sub | low;
            let remainder = (s ^ block) as usize;
            let v = weights[block as usize] + best[remainder];
            let c = 1 + count[remainder];
            // the first block decides lexicographic order: remainders of equal
            // first blocks are identical
            let better = !have || v > bv || (v == bv && (c < bc || (c == bc && block < bb)));
            if better {
                have = true;
                bv = v;
                bc = c;
                bb = block;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[s as usize] = bv;
        count[s as usize] = bc;
        first[s as usize] = bb;
    }

    let mut blocks = Vec::new();
    let mut s = size as u32 - 1;
    while s != 0 {
        let b = first[s as usize];
        blocks.push(SubsetMask::from_bits(b));
        s ^= b;
    }
    let partition = Partition { blocks };
    WeightedResult::from_partition(best[size - 1], partition, cache)
}

/// Set partitions of `{0..n-1}` as restricted growth strings in lexicographic order.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    labels: Vec<usize>,
    prefix_max: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.labels.len();
        let blocks_len = self.labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0u32; blocks_len];
        for (q, &l) in self.labels.iter().enumerate() {
            blocks[l] |= 1 << q;
        }
        let out = Partition {
            blocks: blocks.into_iter().map(SubsetMask::from_bits).collect(),
        };

        // advance: rightmost position that can still grow
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn enumerate_partitions(n: usize) -> Result<PartitionIter> {
    if n > ENUMERATION_MAX_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: ENUMERATION_MAX_QUBITS,
        });
    }
    Ok(PartitionIter {
        labels: vec![0; n],
        prefix_max: vec![0; n],
        done: false,
    })
}

pub fn weighted_distance_bruteforce(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<WeightedResult> {
    let n = check_pair(rho, sigma, usize::MAX)?;
    if n > BRUTEFORCE_MAX_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: BRUTEFORCE_MAX_QUBITS,
        });
    }
    let cache = subset_distance_cache(rho, sigma)?;
    bruteforce_from_cache(&cache)
}

/// Maximum of [`weighted_sum`] over every partition, same tie rule as the DP.
pub fn bruteforce_from_cache(cache: &BlockDistanceCache) -> Result<WeightedResult> {
    let n = cache.n();
    if n > BRUTEFORCE_MAX_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: BRUTEFORCE_MAX_QUBITS,
        });
    }
    let mut best: Option<(f64, Partition)> = None;
    for p in enumerate_partitions(n)? {
        let v = sum_right_nested(&p, cache);
        let take = match &best {
            None => true,
            Some((bv, bp)) => v > *bv || (v == *bv && p.tie_order(bp) == Ordering::Less),
        };
        if take {
            best = Some((v, p));
        }
    }
    let (value, partition) = best.expect("at least one partition");
    Ok(WeightedResult::from_partition(value, partition, cache))
}

/// `(B / n, n * B)` with `B` the global Bures length; the weighted distance
/// always lies in between.
pub fn sandwich_bounds(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64)> {
    let n = check_pair(rho, sigma, DEFAULT_MAX_QUBITS)?;
    let b = bures_length(rho, sigma)?.length;
    Ok((b / n as f64, n as f64 * b))
}
