mod common;

use std::collections::HashMap;

use common::*;
use proptest::prelude::*;
use proxdist::metrics::*;
use rand::Rng;

/// Hubert–Arabie ARI by counting every sample pair.
fn ari_pairs(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let (sa, sb) = (a[i] == a[j], b[i] == b[j]);
            total += 1.0;
            if sa && sb {
                both += 1.0;
            }
            if sa {
                only_a += 1.0;
            }
            if sb {
                only_b += 1.0;
            }
        }
    }
    let expected = only_a * only_b / total;
    let max = 0.5 * (only_a + only_b);
    if max == expected {
        return if partitions_equal(a, b) { 1.0 } else { 0.0 };
    }
    (both - expected) / (max - expected)
}

fn partitions_equal(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// NMI from its definition with sqrt normalization.
fn nmi_direct(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    let mut pab: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
        *pab.entry((x, y)).or_default() += 1.0;
    }
    for m in [&mut pa, &mut pb] {
        m.values_mut().for_each(|v| *v /= n);
    }
    pab.values_mut().for_each(|v| *v /= n);
    let h = |m: &HashMap<usize, f64>| -m.values().map(|p| p * p.ln()).sum::<f64>();
    let (ha, hb) = (h(&pa), h(&pb));
    let mi: f64 = pab.iter().map(|(&(x, y), &p)| p * (p / (pa[&x] * pb[&y])).ln()).sum();
    if ha == 0.0 || hb == 0.0 {
        return if ha == hb { 1.0 } else { 0.0 };
    }
    (mi / (ha * hb).sqrt()).clamp(0.0, 1.0)
}

fn labels(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(0..k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ari_matches_pair_counting(ka in 1usize..5, kb in 1usize..5, seed in any::<u64>()) {
        let a = labels(8, ka, seed);
        let b = labels(8, kb, seed ^ 7);
        let got = adjusted_rand_index(&a, &b).unwrap();
        prop_assert!((got - ari_pairs(&a, &b)).abs() <= 1e-12);
        prop_assert!((got - adjusted_rand_index(&b, &a).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn nmi_matches_direct_sum(n in 2usize..40, ka in 1usize..6, kb in 1usize..6, seed in any::<u64>()) {
        let a = labels(n, ka, seed);
        let b = labels(n, kb, seed ^ 11);
        let got = normalized_mutual_information(&a, &b).unwrap();
        prop_assert!((got - nmi_direct(&a, &b)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&got));
    }

    #[test]
    fn indices_ignore_label_names(n in 2usize..30, seed in any::<u64>()) {
        let a = labels(n, 4, seed);
        let b = labels(n, 3, seed ^ 5);
        let renamed: Vec<String> = a.iter().map(|l| format!("c{}", (l * 7 + 3) % 11)).collect();
        prop_assert!((adjusted_rand_index(&a, &b).unwrap() - adjusted_rand_index(&renamed, &b).unwrap()).abs() < 1e-15);
        prop_assert!((normalized_mutual_information(&a, &b).unwrap() - normalized_mutual_information(&renamed, &b).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn psnr_falls_as_error_grows(n in 1usize..50, s1 in 0.01f64..1.0, s2 in 1.01f64..3.0, seed in any::<u64>()) {
        let a = gaussian_vec(n, &mut rng(seed));
        let e = gaussian_vec(n, &mut rng(seed ^ 1));
        let b1: Vec<f64> = a.iter().zip(&e).map(|(x, d)| x + s1 * d).collect();
        let b2: Vec<f64> = a.iter().zip(&e).map(|(x, d)| x + s1 * s2 * d).collect();
        prop_assume!(e.iter().any(|d| *d != 0.0));
        prop_assert!(psnr(&a, &b1, 1.0).unwrap() > psnr(&a, &b2, 1.0).unwrap());
    }
}

#[test]
fn identical_partitions_score_one() {
    let a = [0, 0, 1, 1, 2];
    let b = ["x", "x", "y", "y", "z"];
    assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);
    assert!((normalized_mutual_information(&a, &b).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn single_cluster_edge_cases() {
    assert_eq!(adjusted_rand_index(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
    assert_eq!(normalized_mutual_information(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
    assert_eq!(normalized_mutual_information(&[0, 0, 0], &[1, 2, 3]).unwrap(), 0.0);
}

#[test]
fn image_measures() {
    assert_eq!(mse(&[1.0, 2.0], &[1.0, 4.0]).unwrap(), 2.0);
    assert_eq!(psnr(&[0.5; 4], &[0.5; 4], 1.0).unwrap(), f64::INFINITY);
    assert!((psnr(&[0.0], &[0.1], 1.0).unwrap() - 20.0).abs() < 1e-12);
    assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
}
