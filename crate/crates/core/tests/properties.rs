use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weighted_bures::random::{random_density, random_pure};
use weighted_bures::weighted::{
    bruteforce_from_cache, subset_distance_cache_with, weighted_distance_from_cache, weighted_sum,
};
use weighted_bures::{bures_length, Execution, SubsetMask};

fn pair(seed: u64, n: usize, pure: bool) -> (weighted_bures::DensityMatrix, weighted_bures::DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if pure {
        (random_pure(n, &mut rng), random_pure(n, &mut rng))
    } else {
        (random_density(n, &mut rng), random_density(n, &mut rng))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_matches_bruteforce(seed in any::<u64>(), n in 1usize..=5, pure in any::<bool>()) {
        let (rho, sigma) = pair(seed, n, pure);
        let cache = subset_distance_cache_with(&rho, &sigma, Execution::Sequential).unwrap();
        let dp = weighted_distance_from_cache(&cache);
        let bf = bruteforce_from_cache(&cache).unwrap();
        prop_assert_eq!(dp.value, bf.value);
        prop_assert_eq!(&dp.argmax_partition, &bf.argmax_partition);
        prop_assert_eq!(weighted_sum(&dp.argmax_partition, &cache).unwrap(), dp.value);
    }

    #[test]
    fn parallel_cache_is_identical(seed in any::<u64>(), n in 1usize..=4) {
        let (rho, sigma) = pair(seed, n, false);
        let a = subset_distance_cache_with(&rho, &sigma, Execution::Sequential).unwrap();
        let b = subset_distance_cache_with(&rho, &sigma, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn weighted_dominates_every_block(seed in any::<u64>(), n in 1usize..=4) {
        let (rho, sigma) = pair(seed, n, false);
        let cache = subset_distance_cache_with(&rho, &sigma, Execution::Sequential).unwrap();
        let value = weighted_distance_from_cache(&cache).value;
        // any single block plus singletons elsewhere is a candidate partition
        for (mask, b) in cache.entries() {
            let rest: f64 = SubsetMask::full(n).without(mask).qubits()
                .map(|q| cache.get(SubsetMask::from_qubits([q])))
                .sum();
            prop_assert!(value >= b / mask.size() as f64 + rest - 1e-12);
        }
        let global = bures_length(&rho, &sigma).unwrap().length;
        prop_assert!(value >= global / n as f64 - 1e-12);
        prop_assert!(value <= n as f64 * global + 1e-12);
    }

    #[test]
    fn bures_is_bounded_and_symmetric(seed in any::<u64>(), n in 1usize..=3, pure in any::<bool>()) {
        let (rho, sigma) = pair(seed, n, pure);
        let ab = bures_length(&rho, &sigma).unwrap();
        let ba = bures_length(&sigma, &rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab.fidelity));
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&ab.length));
        prop_assert!((ab.length - ba.length).abs() < 1e-10);
    }
}
