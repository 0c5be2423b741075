use std::collections::HashMap;

use proptest::prelude::*;
use shiftlcs::digits::{apply_f, check_membership, remove_positions, sample_member, sample_uniform, splice_prefix};
use shiftlcs::sft::admissible_count;
use shiftlcs::{Alpha, ConstructionSchedule, DigitSeq, SetDescriptor};

fn alpha() -> impl Strategy<Value = Alpha> {
    prop_oneof![
        prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 3.7]).prop_map(Alpha::Finite),
        Just(Alpha::Infinity),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn removal_inverts_insertion(p in 2u32..4, base in 2u32..5, a in alpha(), n in 1usize..3000, seed: u64) {
        let s = ConstructionSchedule::covering(p, base, a, n).unwrap();
        let x = sample_uniform(base, s.originals_needed(n), seed).unwrap();
        let fx = apply_f(&x, &s, n).unwrap();
        prop_assert_eq!(fx.len(), n);
        let inserted = s.inserted_positions(n);
        prop_assert!(inserted.iter().all(|&i| fx.digit(i) == Some(1)));
        prop_assert_eq!(remove_positions(&fx, &inserted).unwrap(), x);
        let image = SetDescriptor::FImage { schedule: s, inner: Box::new(SetDescriptor::Uniform { base }) };
        prop_assert!(check_membership(&fx, &image));
    }

    #[test]
    fn members_are_members(p in 2u32..5, base in 2u32..6, n in 1usize..1200, seed: u64) {
        for desc in [SetDescriptor::Ep { base, p }, SetDescriptor::Fp { base, p }] {
            let x = sample_member(&desc, n, seed).unwrap();
            prop_assert_eq!(x.len(), n);
            prop_assert!(check_membership(&x, &desc));
        }
    }

    #[test]
    fn splice_keeps_both_parts(n in 1usize..200, k in 0usize..200, seed: u64) {
        let k = k.min(n);
        let head = sample_uniform(3, n, seed).unwrap();
        let tail = sample_uniform(3, n, seed.wrapping_add(1)).unwrap();
        let s = splice_prefix(&head, &tail, k).unwrap();
        prop_assert_eq!(&s.digits()[..k], &head.digits()[..k]);
        prop_assert_eq!(&s.digits()[k..], &tail.digits()[k..]);
    }
}

#[test]
fn runs_of_ones_end_at_t_k() {
    for a in [Alpha::Finite(0.5), Alpha::Finite(1.0), Alpha::Finite(2.0), Alpha::Infinity] {
        let s = ConstructionSchedule::build(2, 2, a, 8).unwrap();
        let n = s.horizon() as usize;
        let x = DigitSeq::new(2, vec![0; s.originals_needed(n)]).unwrap();
        let fx = apply_f(&x, &s, n).unwrap();
        for (&t, &l) in s.t().iter().zip(s.ell()) {
            let (t, l) = (t as usize, l as usize);
            assert!((t - l + 1..=t).all(|i| fx.digit(i) == Some(1)), "{a}: run before t = {t}");
            assert_eq!(fx.digit(t - l), Some(0));
            if t < n {
                assert_eq!(fx.digit(t + 1), Some(0));
            }
        }
    }
}

#[test]
fn insertion_density_vanishes() {
    for a in [Alpha::Finite(0.5), Alpha::Finite(1.0), Alpha::Finite(2.0)] {
        let s = ConstructionSchedule::build(3, 2, a, 14).unwrap();
        let density: Vec<f64> = s.t().iter().map(|&t| s.inserted_count(t as usize) as f64 / t as f64).collect();
        assert!(density.windows(2).all(|w| w[1] < w[0]), "{a}: {density:?}");
    }
    let s = ConstructionSchedule::build(2, 2, Alpha::Infinity, 14).unwrap();
    let d = |k: usize| s.inserted_count(s.t()[k] as usize) as f64 / s.t()[k] as f64;
    assert!(d(13) < d(7) && d(13) < 0.01);
}

#[test]
fn fp_sampler_is_uniform_on_admissible_words() {
    let (base, p, n) = (2u32, 2u32, 6usize);
    let words: u64 = admissible_count(base, p, n).unwrap().try_into().unwrap();
    let draws = 24_000u64;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for seed in 0..draws {
        let x = sample_member(&SetDescriptor::Fp { base, p }, n, seed).unwrap();
        *counts.entry(x.into_digits()).or_default() += 1;
    }
    assert_eq!(counts.len() as u64, words);
    let expected = draws as f64 / words as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let df = (words - 1) as f64;
    // Mean df, sd sqrt(2 df); six sd is far outside sampling noise.
    assert!(chi2 < df + 6.0 * (2.0 * df).sqrt(), "chi2 = {chi2}, df = {df}");
}

#[test]
fn long_fp_samples_use_the_ratio_plan() {
    for base in [2u32, 3, 10] {
        let desc = SetDescriptor::Fp { base, p: 2 };
        let x = sample_member(&desc, 5000, 11).unwrap();
        assert!(check_membership(&x, &desc));
        let zeros = x.digits().iter().filter(|&&d| d == 0).count();
        assert!(zeros > 0);
    }
}
