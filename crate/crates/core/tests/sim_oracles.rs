mod common;

use common::{brute_force_peel, small_graph_strategy};
use corr_ldpc_core::construct::{rng_from_seed, stream_rng, TannerGraph};
use corr_ldpc_core::sim::{ErasurePattern, PeelingDecoder};
use proptest::prelude::*;

fn still_erased(dec: &PeelingDecoder, erased: &[bool]) -> Vec<bool> {
    let recovered = dec.peel_mask(&ErasurePattern::from_mask(erased.to_vec()));
    erased
        .iter()
        .zip(recovered)
        .map(|(&e, r)| e && !r)
        .collect()
}

/// All vectors in the null space of the parity checks, by enumeration.
fn codewords(g: &TannerGraph) -> Vec<u32> {
    (0u32..1 << g.n)
        .filter(|&w| {
            let mut parity = vec![0u32; g.m];
            for &(v, c) in &g.edges {
                parity[c as usize] ^= (w >> v) & 1;
            }
            parity.iter().all(|&p| p == 0)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn peel_is_the_order_free_fixed_point(g in small_graph_strategy(10, 7), seed in any::<u64>()) {
        let dec = PeelingDecoder::new(&g);
        let mut rng = rng_from_seed(seed);
        for bits in 0u32..1 << g.n {
            let erased: Vec<bool> = (0..g.n).map(|v| bits >> v & 1 == 1).collect();
            let left = brute_force_peel(&g, &erased);
            prop_assert_eq!(&still_erased(&dec, &erased), &left);
            let expect: Vec<bool> = erased.iter().zip(&left).map(|(&e, &l)| e && !l).collect();
            let pattern = ErasurePattern::from_mask(erased);
            for _ in 0..3 {
                prop_assert_eq!(&dec.peel_mask_randomized(&pattern, &mut rng), &expect);
            }
        }
    }

    #[test]
    fn fewer_erasures_never_hurt(g in small_graph_strategy(12, 8), a in any::<u32>(), b in any::<u32>()) {
        let dec = PeelingDecoder::new(&g);
        let mask = (1u32 << g.n) - 1;
        let (small, big) = (a & b & mask, (a | b) & mask);
        let to_mask = |bits: u32| (0..g.n).map(|v| bits >> v & 1 == 1).collect::<Vec<_>>();
        let left_small = still_erased(&dec, &to_mask(small));
        let left_big = still_erased(&dec, &to_mask(big));
        for v in 0..g.n {
            prop_assert!(!left_small[v] || left_big[v]);
        }
    }

    #[test]
    fn recovered_bits_are_determined(g in small_graph_strategy(9, 6), seed in any::<u64>()) {
        // every codeword agreeing on the unerased bits agrees on the recovered ones
        let dec = PeelingDecoder::new(&g);
        let words = codewords(&g);
        let mut rng = stream_rng(seed, 0);
        use rand::Rng;
        for _ in 0..32 {
            let truth = words[rng.gen_range(0..words.len())];
            let bits: u32 = rng.gen::<u32>() & ((1 << g.n) - 1);
            let erased: Vec<bool> = (0..g.n).map(|v| bits >> v & 1 == 1).collect();
            let left = still_erased(&dec, &erased);
            let recovered: u32 = (0..g.n).filter(|&v| erased[v] && !left[v]).map(|v| 1 << v).sum();
            let known = !bits & ((1 << g.n) - 1);
            for &w in &words {
                if (w ^ truth) & known == 0 {
                    prop_assert_eq!((w ^ truth) & recovered, 0);
                }
            }
        }
    }
}
