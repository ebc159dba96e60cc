use lossylab_core::crypto::restricted_supports;
use lossylab_core::disguise::{delta_of, game_value, ly_sparsify, PayoffMatrix, Player};
use lossylab_core::information::{
    entropy, kl_divergence, mutual_information, mutual_information_by_entropies, reverse_pinsker_bound, statistical_distance,
    FiniteDistribution, JointDistribution, LOG_TOL,
};
use lossylab_core::params::theta_report;
use lossylab_core::problems::BitString;
use lossylab_core::rational::{int, rat};
use lossylab_core::reductions::{multiset_count, multisets};
use lossylab_core::szk::{product_pair, xor_pair};
use lossylab_core::Rational;
use num::{One, Signed, Zero};
use proptest::prelude::*;

fn law(weights: &[u32]) -> FiniteDistribution<usize> {
    let total: u32 = weights.iter().sum();
    FiniteDistribution::new(weights.iter().enumerate().map(|(i, &w)| (i, rat(w as i64, total as i64)))).unwrap()
}

fn weights(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..12, len).prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
}

fn pair(max: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (1..=max).prop_flat_map(|k| (weights(k..=k), weights(k..=k)))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn payoff(rows: &[Vec<i64>]) -> PayoffMatrix {
    PayoffMatrix::new(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric((a, b) in pair(6), c in weights(6..=6)) {
        let (p, q) = (law(&a), law(&b));
        let d = statistical_distance(&p, &q);
        prop_assert!(!d.is_negative() && d <= Rational::one());
        prop_assert_eq!(&d, &statistical_distance(&q, &p));
        prop_assert!(statistical_distance(&p, &p).is_zero());
        if a.len() == 6 {
            let r = law(&c);
            prop_assert!(d <= statistical_distance(&p, &r) + statistical_distance(&r, &q));
        }
    }

    #[test]
    fn kl_is_nonnegative_and_reverse_pinsker_holds((a, b) in pair(8)) {
        let (p, q) = (law(&a), law(&b));
        if b.iter().all(|&w| w > 0) {
            let kl = kl_divergence(&p, &q);
            prop_assert!(kl >= -LOG_TOL);
            prop_assert!(kl <= reverse_pinsker_bound(&p, &q).unwrap() + LOG_TOL);
        } else {
            prop_assert!(reverse_pinsker_bound(&p, &q).is_err());
        }
    }

    #[test]
    fn mutual_information_routes_agree(rows in prop::collection::vec(weights(3..=3), 1..=4), input in weights(4..=4)) {
        let x = law(&input[..rows.len()].iter().map(|&w| w + 1).collect::<Vec<_>>());
        let j = JointDistribution::from_channel(&x, |&i| law(&rows[i]));
        let i1 = mutual_information(&j);
        let i2 = mutual_information_by_entropies(&j);
        prop_assert!((i1 - i2).abs() < 1e-9);
        prop_assert!(i1 >= -LOG_TOL);
        prop_assert!(i1 <= entropy(&j.left()).min(entropy(&j.right())) + 1e-9);
    }

    #[test]
    fn delta_is_monotone(a in 0.0f64..40.0, b in 0.0f64..40.0, m in 1u32..6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(delta_of(lo, m) <= delta_of(hi, m));
        prop_assert!((0.0..1.0).contains(&delta_of(hi, m)));
        prop_assert!(delta_of(hi, m + 1) <= delta_of(hi, m));
    }

    #[test]
    fn theta_owf_is_nonincreasing(mu in 0.0f64..0.49, lambda in 0.0f64..20.0, gamma in 0.0f64..1.0, bump in 0.0f64..0.5) {
        let base = theta_report(mu, lambda, gamma, 1).unwrap();
        let more_mu = theta_report((mu + bump / 100.0).min(0.499), lambda, gamma, 1).unwrap();
        let more_lambda = theta_report(mu, lambda + bump, gamma, 1).unwrap();
        let more_gamma = theta_report(mu, lambda, gamma + bump, 1).unwrap();
        prop_assert!(more_mu.theta_owf <= base.theta_owf);
        prop_assert!(more_lambda.theta_owf <= base.theta_owf);
        prop_assert!(more_gamma.theta_owf <= base.theta_owf);
        prop_assert_eq!(base.k_owf.is_some(), base.theta_owf > 0.0);
    }

    #[test]
    fn game_value_is_exact(rows in matrix(), shift in -5i64..5) {
        let m = payoff(&rows);
        let sol = game_value(&m).unwrap();
        prop_assert!(&sol.value >= m.min() && &sol.value <= m.max());
        prop_assert_eq!(m.best_column_response(&sol.row.distribution), sol.value.clone());
        prop_assert_eq!(m.best_row_response(&sol.col.distribution), sol.value.clone());
        let shifted: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x + shift).collect()).collect();
        prop_assert_eq!(game_value(&payoff(&shifted)).unwrap().value, &sol.value + int(shift));
        prop_assert_eq!(game_value(&m.swapped()).unwrap().value, -sol.value);
    }

    #[test]
    fn sparsified_strategies_are_certified(rows in matrix(), eps in prop::sample::select(vec![0.25, 0.5, 1.0]), seed in any::<u64>()) {
        let m = payoff(&rows);
        for player in [Player::One, Player::Two] {
            let s = ly_sparsify(&m, player, eps, seed).unwrap();
            prop_assert!(s.gap <= s.allowed);
            let witness = s.strategy.witness.clone().unwrap();
            prop_assert_eq!(witness.len(), s.s);
            let exact = match player {
                Player::One => m.best_column_response(&s.strategy.distribution),
                Player::Two => m.best_row_response(&s.strategy.distribution),
            };
            prop_assert_eq!(exact, s.guarantee);
        }
    }

    #[test]
    fn xor_step_powers_the_distance((a, b) in pair(3), j in 1u32..=3) {
        let (p, q) = (law(&a), law(&b));
        let d = statistical_distance(&p, &q);
        let (x0, x1) = xor_pair(&p, &q, j).unwrap();
        prop_assert_eq!(statistical_distance(&x0, &x1), num::pow(d.clone(), j as usize));
        let (y0, y1) = product_pair(&p, &q, j).unwrap();
        prop_assert!(statistical_distance(&y0, &y1) >= d);
    }

    #[test]
    fn restricted_supports_are_disjoint((a, b) in pair(6), mu_num in 0i64..50) {
        let (p, q) = (law(&a), law(&b));
        let mu = rat(mu_num, 100);
        match restricted_supports(&p, &q, &mu) {
            Ok(r) => {
                prop_assert!(r.law0.support().all(|o| r.law1.mass(o).is_zero()));
                prop_assert!(r.contract_holds);
                prop_assert!(statistical_distance(&r.law0, &r.law1) == Rational::one());
            }
            Err(_) => prop_assert!(statistical_distance(&p, &q) < Rational::one() - &mu * int(2)),
        }
    }

    #[test]
    fn multisets_are_counted(k in 1usize..6, size in 0usize..5) {
        let all: Vec<Vec<usize>> = multisets(k, size).collect();
        prop_assert_eq!(all.len() as u128, multiset_count(k, size));
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bit_strings_round_trip(len in 1u8..=16, raw in any::<u32>()) {
        let v = raw & ((1u32 << len) - 1);
        let x = BitString::new(v, len).unwrap();
        prop_assert_eq!(BitString::from_bits(&x.to_string()).unwrap(), x);
        prop_assert_eq!(BitString::from_hex(&x.to_hex(), len).unwrap(), x);
        prop_assert_eq!(x.bits().iter().filter(|&&b| b).count() as u32, x.weight());
    }

    #[test]
    fn distributions_round_trip_through_json(a in weights(1..=6)) {
        let p = law(&a);
        let back: FiniteDistribution<usize> = lossylab_core::information::from_json(&lossylab_core::information::to_json(&p)).unwrap();
        prop_assert!(statistical_distance(&p, &back).is_zero());
    }
}
