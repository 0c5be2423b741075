use num_bigint::BigUint;
use shiftlcs::sft::{admissible_count, forbidden_pairs, forbidden_pairs_by_runs, spectral_radius, DEFAULT_TOL};

fn word_count_from_matrix(base: u32, p: u32, k: u32) -> BigUint {
    let a = forbidden_pairs(base, p).unwrap();
    let size = a.size();
    let mut v = vec![BigUint::from(1u32); size];
    for _ in 1..k {
        v = (0..size)
            .map(|u| (0..size).filter(|&w| a.entry(u, w) == 1).map(|w| v[w].clone()).sum())
            .collect();
    }
    v.into_iter().sum()
}

#[test]
fn block_words_are_counted_by_the_transfer_matrix() {
    for (base, p) in [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)] {
        for k in 1..=6 {
            assert_eq!(
                word_count_from_matrix(base, p, k),
                admissible_count(base, p, (k * p) as usize).unwrap(),
                "b={base} p={p} k={k}"
            );
        }
    }
}

#[test]
fn both_constructions_agree() {
    for base in [2u32, 3, 4] {
        for p in 2..=4 {
            if u64::from(base).pow(2 * p) > 1 << 22 {
                continue;
            }
            let direct = forbidden_pairs(base, p).unwrap();
            let runs = forbidden_pairs_by_runs(base, p).unwrap();
            assert_eq!(direct.zeros().collect::<Vec<_>>(), runs.zeros().collect::<Vec<_>>(), "b={base} p={p}");
        }
    }
}

#[test]
fn word_counts_grow_like_rho_to_the_k() {
    for (base, p) in [(2u32, 2u32), (3, 2), (2, 3)] {
        let rho = spectral_radius(&forbidden_pairs(base, p).unwrap(), DEFAULT_TOL).unwrap().estimate;
        let constant = |k: u32| {
            let n = admissible_count(base, p, (k * p) as usize).unwrap();
            shiftlcs::dimension::ln_big(&n) - f64::from(k) * rho.ln()
        };
        let (c40, c80) = (constant(40), constant(80));
        assert!((c40 - c80).abs() < 1e-6, "b={base} p={p}: {c40} vs {c80}");
    }
}
