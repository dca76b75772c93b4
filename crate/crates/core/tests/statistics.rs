use proptest::prelude::*;
use rand::Rng;
use tailstat_core::exec::stream_rng;
use tailstat_core::tail_gof::{
    ad_classical, ad_stat, cvm_stat, lower_tail_stat, quadrature_oracle, upper_tail_stat, weight,
    Branch,
};
use tailstat_core::{to_ordered_unit, Error, ModelCdf, OrderedUnitSample, Sample, StatSpec};

fn ous(v: &[f64]) -> OrderedUnitSample {
    OrderedUnitSample::new(v.to_vec()).unwrap()
}

/// Tanh-sinh quadrature on (lo, hi); copes with integrable endpoint singularities.
fn tanh_sinh<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let h = 1.0 / 64.0;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut sum = 0.0;
    for k in -400i32..=400 {
        let t = k as f64 * h;
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let x = s.tanh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (s.cosh() * s.cosh());
        let y = mid + half * x;
        if y <= lo || y >= hi || w < 1e-300 {
            continue;
        }
        sum += w * f(y);
    }
    sum * h * half
}

/// n ∫ (F_n(t) − t)² t^(−a) dt by quadrature over the EDF steps.
fn quadrature_by_hand(u: &[f64], a: f64) -> f64 {
    let n = u.len() as f64;
    let mut knots = vec![0.0];
    knots.extend_from_slice(u);
    knots.push(1.0);
    let mut total = 0.0;
    for (k, w) in knots.windows(2).enumerate() {
        if w[1] > w[0] {
            let c = k as f64 / n;
            total += tanh_sinh(|t| (c - t) * (c - t) * t.powf(-a), w[0], w[1]);
        }
    }
    n * total
}

#[test]
fn listed_values() {
    let mid = ous(&[0.5]);
    assert!((lower_tail_stat(&mid, 0.0).unwrap().value - 1.0 / 12.0).abs() < 1e-15);
    let al = -1.5 + 1.0 - 0.5f64.ln();
    assert!((lower_tail_stat(&mid, 1.0).unwrap().value - al).abs() < 1e-15);
    assert!((upper_tail_stat(&mid, 1.0).unwrap().value - al).abs() < 1e-15);
    assert!((al - 0.193_147_180_559_945_3).abs() < 1e-15);
    assert!((ad_stat(&mid).unwrap().value - (-1.0 + 2.0 * 2f64.ln())).abs() < 1e-15);
    assert!((cvm_stat(&mid).value - 1.0 / 12.0).abs() < 1e-15);

    let three = ous(&[0.1, 0.5, 0.9]);
    let by_hand = 1.0 / 36.0 + (1.0f64 / 6.0 - 0.1).powi(2) + (5.0f64 / 6.0 - 0.9).powi(2);
    assert!((cvm_stat(&three).value - by_hand).abs() < 1e-15);

    let n = 7;
    let centred: Vec<f64> = (1..=n)
        .map(|i| (2 * i - 1) as f64 / (2 * n) as f64)
        .collect();
    assert!((cvm_stat(&ous(&centred)).value - 1.0 / (12.0 * n as f64)).abs() < 1e-15);

    let up = upper_tail_stat(&ous(&[0.2, 0.9]), 1.0).unwrap().value;
    let low = lower_tail_stat(&ous(&[0.1, 0.8]), 1.0).unwrap().value;
    assert!((up - low).abs() < 1e-15);

    assert_eq!(weight(0.5, 0.0, 0.0).unwrap(), 1.0);
    assert_eq!(weight(0.5, 1.0, 1.0).unwrap(), 4.0);
    assert!((weight(0.1, 2.0, 0.0).unwrap() - 100.0).abs() < 1e-12);
    assert!(weight(0.0, 1.0, 0.0).is_err());
    assert!(weight(1.0, 0.0, 0.0).is_err());
}

#[test]
fn two_point_general_branch_against_quadrature() {
    let u = [0.25, 0.75];
    let r = lower_tail_stat(&ous(&u), 0.5).unwrap();
    assert_eq!(r.branch, Branch::General);
    assert!((r.value - quadrature_by_hand(&u, 0.5)).abs() < 1e-10);
    let ad = ad_stat(&ous(&u)).unwrap().value;
    let classical =
        -2.0 - 0.5 * (1.0 * (0.25f64.ln() + 0.25f64.ln()) + 3.0 * (0.75f64.ln() + 0.75f64.ln()));
    assert!((ad - classical).abs() < 1e-12);
}

#[test]
fn hand_quadrature_agrees_on_random_samples() {
    for seed in 0..20u64 {
        let mut rng = stream_rng(seed, 1);
        let n = 1 + (seed as usize % 8);
        let mut u: Vec<f64> = (0..n).map(|_| 0.02 + 0.96 * rng.random::<f64>()).collect();
        u.sort_by(f64::total_cmp);
        for a in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5] {
            let closed = lower_tail_stat(&ous(&u), a).unwrap().value;
            let numeric = quadrature_by_hand(&u, a);
            assert!(
                (closed - numeric).abs() < 1e-8 * numeric.max(1.0),
                "a={a} {u:?}"
            );
        }
    }
}

#[test]
fn stress_three_is_refused() {
    let u = ous(&[0.3, 0.6]);
    assert!(matches!(
        lower_tail_stat(&u, 3.0),
        Err(Error::DivergentStatistic(_))
    ));
    assert!(matches!(
        upper_tail_stat(&u, 3.0),
        Err(Error::DivergentStatistic(_))
    ));
    assert!(matches!(
        StatSpec::lower(3.0 + 1e-12).evaluate(&u),
        Err(Error::DivergentStatistic(_))
    ));
    assert!(matches!(
        StatSpec {
            side: tailstat_core::TailSide::Both,
            stress: 0.5
        }
        .evaluate(&u),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn stress_two_blows_up_at_zero() {
    let v = |e: f64| lower_tail_stat(&ous(&[e]), 2.0).unwrap().value;
    assert!((v(1e-6) - (1e6 + 2.0 * 1e-6f64.ln())).abs() < 1e-6);
    assert!(v(1e-6) > 1e5);
    assert!(v(1e-9) > v(1e-6));
    assert!(v(1e-9) > 1e8);
}

#[test]
fn exact_zero_is_clamped_and_reported() {
    let r = lower_tail_stat(&ous(&[0.0, 0.5]), 1.0).unwrap();
    assert_eq!(r.clamped, 1);
    assert!(r.value.is_finite());
    let r = lower_tail_stat(&ous(&[0.0, 0.5]), 0.5).unwrap();
    assert_eq!(r.clamped, 0);
    let r = upper_tail_stat(&ous(&[0.5, 1.0]), 2.0).unwrap();
    assert_eq!(r.clamped, 1);
}

#[test]
fn continuity_around_unit_stress() {
    for seed in 0..30u64 {
        let mut rng = stream_rng(seed, 2);
        let n = 1 + (seed as usize * 7) % 50;
        let mut u: Vec<f64> = (0..n).map(|_| 0.01 + 0.99 * rng.random::<f64>()).collect();
        u.sort_by(f64::total_cmp);
        let u = ous(&u);
        let at = lower_tail_stat(&u, 1.0).unwrap().value;
        for a in [1.0 - 1e-6, 1.0 + 1e-6] {
            let near = lower_tail_stat(&u, a).unwrap();
            assert_eq!(near.branch, Branch::General);
            assert!((near.value - at).abs() <= 1e-4, "seed={seed} a={a}");
        }
    }
}

#[test]
fn pit_of_true_model_is_uniform() {
    let model = ModelCdf::Exponential { rate: 2.0 };
    let mut pooled = Vec::with_capacity(10_000);
    for draw in 0..1000u64 {
        let mut rng = stream_rng(99, draw);
        let x: Vec<f64> = (0..10)
            .map(|_| -(-rng.random::<f64>()).ln_1p() / 2.0)
            .collect();
        let u = to_ordered_unit(&Sample::new(x).unwrap(), &model).unwrap();
        pooled.extend_from_slice(u.values());
    }
    pooled.sort_by(f64::total_cmp);
    let m = pooled.len() as f64;
    let d = pooled
        .iter()
        .enumerate()
        .map(|(i, &p)| ((i as f64 + 1.0) / m - p).max(p - i as f64 / m))
        .fold(0.0, f64::max);
    assert!(d < 1.628 / m.sqrt(), "KS distance {d}");
}

fn unit_sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..0.999, 1..=max_len).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #[test]
    fn reflection_duality(u in unit_sample(30), c in 0.0f64..5.0) {
        prop_assume!((c - 3.0).abs() > 1e-6);
        let u = ous(&u);
        let up = upper_tail_stat(&u, c).unwrap().value;
        prop_assert_eq!(up, lower_tail_stat(&u.reflect(), c).unwrap().value);
        let lo = lower_tail_stat(&u, c).unwrap().value;
        let mirrored = upper_tail_stat(&u.reflect(), c).unwrap().value;
        prop_assert!((lo - mirrored).abs() <= 1e-9 * lo.abs().max(1.0));
    }

    #[test]
    fn reflection_duality_on_dyadic_samples(k in prop::collection::vec(1u32..1023, 1..30), c in 0.0f64..5.0) {
        prop_assume!((c - 3.0).abs() > 1e-6);
        // 1 − x is exact for multiples of 2^-10, so reflection is an involution
        let mut v: Vec<f64> = k.iter().map(|&j| j as f64 / 1024.0).collect();
        v.sort_by(f64::total_cmp);
        let u = ous(&v);
        prop_assert_eq!(u.reflect().reflect(), u.clone());
        let lo = lower_tail_stat(&u, c).unwrap().value;
        prop_assert_eq!(lo, upper_tail_stat(&u.reflect(), c).unwrap().value);
    }

    #[test]
    fn statistics_are_nonnegative(u in unit_sample(30), c in 0.0f64..2.9) {
        let u = ous(&u);
        let scale = u.len() as f64 * 1e-9;
        prop_assert!(lower_tail_stat(&u, c).unwrap().value >= -scale);
        prop_assert!(upper_tail_stat(&u, c).unwrap().value >= -scale);
        prop_assert!(ad_stat(&u).unwrap().value >= -scale);
        prop_assert!(cvm_stat(&u).value >= 0.0);
    }

    #[test]
    fn oracle_equivalence(u in unit_sample(20), k in 0usize..7) {
        let a = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5][k];
        let u = ous(&u);
        let closed = lower_tail_stat(&u, a).unwrap().value;
        let oracle = quadrature_oracle(&u, a, 0.0).unwrap();
        prop_assert!((closed - oracle).abs() <= 1e-8, "a={} {} vs {}", a, closed, oracle);
        let upper = upper_tail_stat(&u, a).unwrap().value;
        let upper_oracle = quadrature_oracle(&u, 0.0, a).unwrap();
        prop_assert!((upper - upper_oracle).abs() <= 1e-8);
    }

    #[test]
    fn cvm_and_ad_forms(u in unit_sample(50)) {
        let n = u.len() as f64;
        // general expansion at a = 0: n/3 + Σ [u² − ((2i−1)/n) u]
        let expanded = n / 3.0
            + u.iter().enumerate().map(|(i, v)| v * v - (2 * i + 1) as f64 / n * v).sum::<f64>();
        let u = ous(&u);
        let cvm = cvm_stat(&u).value;
        prop_assert_eq!(cvm, lower_tail_stat(&u, 0.0).unwrap().value);
        prop_assert!((cvm - expanded).abs() <= 1e-12);
        prop_assert!((ad_stat(&u).unwrap().value - ad_classical(&u)).abs() <= 1e-10);
        prop_assert!((quadrature_oracle(&u, 1.0, 1.0).unwrap() - ad_classical(&u)).abs() <= 1e-8);
        prop_assert!((quadrature_oracle(&u, 0.0, 0.0).unwrap() - cvm).abs() <= 1e-10);
    }

    #[test]
    fn permutation_invariance(mut x in prop::collection::vec(-5.0f64..5.0, 1..40), rot in 0usize..40) {
        let model = ModelCdf::Normal { mean: 0.3, sd: 1.7 };
        let a = to_ordered_unit(&Sample::new(x.clone()).unwrap(), &model).unwrap();
        let len = x.len();
        x.rotate_left(rot % len);
        x.reverse();
        let b = to_ordered_unit(&Sample::new(x).unwrap(), &model).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn edf_steps(x in prop::collection::vec(-5.0f64..5.0, 1..40), probes in prop::collection::vec(-6.0f64..6.0, 2..10)) {
        let s = Sample::new(x).unwrap();
        let n = s.len() as f64;
        let mut probes = probes;
        probes.sort_by(f64::total_cmp);
        let vals: Vec<f64> = probes.iter().map(|&p| s.edf(p)).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for v in vals {
            prop_assert!(((v * n).round() - v * n).abs() < 1e-9);
        }
    }
}
