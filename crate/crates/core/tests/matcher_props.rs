use proptest::prelude::*;
use shiftlcs::matcher::{aligned_match, shifted_match, shifted_match_oracle};
use shiftlcs::DigitSeq;

fn pair() -> impl Strategy<Value = (DigitSeq, DigitSeq)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=200).prop_flat_map(|(b, n)| {
        (prop::collection::vec(0..b, n), prop::collection::vec(0..b, n)).prop_map(move |(x, y)| {
            (DigitSeq::new(b, x).unwrap(), DigitSeq::new(b, y).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn fast_matches_oracle((x, y) in pair()) {
        let n = x.len();
        let fast = shifted_match(&x, &y, n).unwrap();
        prop_assert_eq!(fast, shifted_match_oracle(&x, &y, n).unwrap());
        prop_assert!(fast.is_witness(&x, &y, n));
    }

    #[test]
    fn symmetric_and_bounded((x, y) in pair()) {
        let n = x.len();
        let s = shifted_match(&x, &y, n).unwrap().length;
        let l = aligned_match(&x, &y, n).unwrap();
        prop_assert_eq!(s, shifted_match(&y, &x, n).unwrap().length);
        prop_assert!(l.is_witness(&x, &y, n));
        prop_assert_eq!(l.offset_x, l.offset_y);
        prop_assert!(l.length <= s && s <= n);
        prop_assert_eq!(shifted_match(&x, &x, n).unwrap().length, n);
    }

    #[test]
    fn nondecreasing_in_n((x, y) in pair()) {
        let mut prev = 0;
        for n in 1..=x.len() {
            let s = shifted_match(&x, &y, n).unwrap().length;
            prop_assert!(s >= prev);
            prop_assert!(s <= prev + 1);
            prev = s;
        }
    }

    #[test]
    fn relabel_invariant((x, y) in pair(), shift in 1u32..5) {
        let b = x.base();
        let relabel = |s: &DigitSeq| DigitSeq::new(b, s.digits().iter().map(|d| (d + shift) % b).collect()).unwrap();
        let n = x.len();
        prop_assert_eq!(
            shifted_match(&x, &y, n).unwrap().length,
            shifted_match(&relabel(&x), &relabel(&y), n).unwrap().length
        );
        prop_assert_eq!(
            aligned_match(&x, &y, n).unwrap().length,
            aligned_match(&relabel(&x), &relabel(&y), n).unwrap().length
        );
    }
}

#[test]
fn large_base_uses_sparse_transitions() {
    let x = DigitSeq::new(1000, (0..300).map(|i| (i * 7) % 1000).collect()).unwrap();
    let y = DigitSeq::new(1000, (0..300).map(|i| (i * 7 + 21) % 1000).collect()).unwrap();
    assert_eq!(shifted_match(&x, &y, 300).unwrap(), shifted_match_oracle(&x, &y, 300).unwrap());
    assert_eq!(shifted_match(&x, &y, 300).unwrap().length, 297);
}
