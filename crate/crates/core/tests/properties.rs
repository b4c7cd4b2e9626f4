//! Randomized invariants across modules.

use bchdtp::channel::{joint_ue_distribution, quantize, sigma_from_ebn0, uncoded_ber};
use bchdtp::code::{CodeSpec, WeightEnumerator};
use bchdtp::dtp::{
    bdd_a_dtp, bdd_dtp, eaed_a_dtp, AnchorWeights, BddDtp, CorrectDecodeCheck, EaedDtp, EaedParams,
};
use bchdtp::metrics::{sweep, SweepSpec};
use bchdtp::numerics::{binomial, log_binomial, q_function, rational_to_f64};
use bchdtp::par::Exec;
use bchdtp::sim::{
    candidates, select, simulate_frame, BchCode, BinaryWord, DecoderKind, Selection, SimConfig,
    TernaryWord,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

fn ln_big(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(64);
    let top: BigUint = x >> shift;
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pascal_and_symmetry(n in 1i64..=300, k in 1i64..=300) {
        prop_assume!(k <= n);
        prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        prop_assert_eq!(binomial(n, k), binomial(n, n - k));
    }

    #[test]
    fn log_binomial_matches_exact(n in 0i64..=4096, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).round() as i64;
        let exact = ln_big(&binomial(n, k));
        let l = log_binomial(n, k).unwrap().ln();
        // relative accuracy of the value is the absolute accuracy of its log
        prop_assert!((l - exact).abs() <= 1e-10 * exact.abs().max(1.0), "{n} {k}: {l} vs {exact}");
    }

    #[test]
    fn q_function_shape(x in -8.0f64..8.0, dx in 1e-3f64..1.0) {
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() <= 1e-14);
        prop_assert!(q_function(x + dx) <= q_function(x));
        // near 1 the steps fall below one ulp
        if x >= 0.0 {
            prop_assert!(q_function(x + dx) < q_function(x));
        }
    }

    #[test]
    fn quantize_is_monotone_in_threshold(db in 0.0f64..12.0, t in 0.0f64..0.9, dt in 0.0f64..0.1) {
        let sigma = sigma_from_ebn0(db, 239.0 / 255.0);
        let a = quantize(sigma, t).unwrap();
        let b = quantize(sigma, t + dt).unwrap();
        prop_assert!(b.delta <= a.delta);
        prop_assert!(b.epsilon >= a.epsilon);
    }

    #[test]
    fn joint_truncation_is_bounded(db in 3.0f64..10.0, t in 0.0f64..0.3, eta_exp in 6i32..16) {
        let eta = 10f64.powi(-eta_exp);
        let ch = quantize(sigma_from_ebn0(db, 239.0 / 255.0), t).unwrap();
        let j = joint_ue_distribution(255, &ch, eta);
        prop_assert!(j.dropped_mass <= eta);
        prop_assert!((j.kept_mass() + j.dropped_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anchored_bdd_is_monotone(pc in 0.0f64..1.0, pw in 0.0f64..1.0, dc in 0.0f64..0.5, dw in 0.0f64..0.5) {
        let spec = CodeSpec::new(255, 239, 5).unwrap();
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        let lo = AnchorWeights { keep_correct: 1.0 - pc, keep_wrong: 1.0 - pw };
        let hi = AnchorWeights { keep_correct: (1.0 - pc - dc).max(0.0), keep_wrong: (1.0 - pw - dw).max(0.0) };
        let x = bdd_a_dtp(&spec, &a, &lo, 8, CorrectDecodeCheck::AnchorChecked).unwrap();
        let y = bdd_a_dtp(&spec, &a, &hi, 8, CorrectDecodeCheck::AnchorChecked).unwrap();
        for (cx, cy) in x.cells.iter().zip(&y.cells) {
            for (r, p) in &cy.mc {
                prop_assert!(*p <= cx.mc[r] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn anchored_eaed_is_normalized(pc in 0.0f64..1.0, pw in 0.0f64..1.0, u in 0usize..5, e in 0usize..9) {
        let spec = CodeSpec::new(255, 239, 5).unwrap();
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        let w = AnchorWeights { keep_correct: 1.0 - pc, keep_wrong: 1.0 - pw };
        let x: EaedDtp<f64> = eaed_a_dtp(&spec, &a, &w, &EaedParams::new(u, e)).unwrap();
        let c = x.cell(u, e).unwrap();
        prop_assert!((c.total() - 1.0).abs() <= 1e-9);
        prop_assert!(c.succ >= -1e-15 && c.fail >= -1e-12 && c.mc.values().all(|p| *p >= 0.0));
    }

    #[test]
    fn bdd_output_is_within_t(seed in any::<u64>(), weight in 0usize..8) {
        let spec = CodeSpec::new(31, 21, 5).unwrap();
        let code = BchCode::new(spec).unwrap();
        let positions = scatter(seed, 31, weight);
        let y = BinaryWord::from_positions(31, positions);
        if let Some(c) = code.bdd(&y) {
            prop_assert!(c.xor(&y).weight() <= spec.t);
            prop_assert!(code.bdd(&c).is_some_and(|d| d == c));
        }
    }

    #[test]
    fn selection_never_prefers_the_farther_codeword(seed in any::<u64>(), u in 0usize..5, e in 1usize..7) {
        let spec = CodeSpec::new(15, 7, 5).unwrap();
        let code = BchCode::new(spec).unwrap();
        let pos = scatter(seed, 15, u + e);
        let hard = BinaryWord::from_positions(15, pos[..u].iter().copied());
        let erased = BinaryWord::from_positions(15, pos[u..].iter().copied());
        let y = TernaryWord::new(hard, erased, None).unwrap();
        let fill: Vec<bool> = (0..e).map(|i| (seed >> i) & 1 == 1).collect();
        let [w1, w2] = candidates(&code, &y, &fill, false);
        let s = select(&y, w1.as_ref(), w2.as_ref());
        if let (Some(a), Some(b)) = (&w1, &w2) {
            let (da, db) = (y.distance(a), y.distance(b));
            match s {
                Selection::First => prop_assert!(da < db),
                Selection::Second => prop_assert!(db < da),
                Selection::Tie => prop_assert_eq!(da, db),
                Selection::Fail => prop_assert!(false),
            }
        }
    }

    #[test]
    fn miscorrection_tally_is_consistent(seed in any::<u64>(), index in 0u64..1_000_000, db in 3.0f64..6.0) {
        let spec = CodeSpec::new(255, 239, 5).unwrap();
        let code = BchCode::new(spec).unwrap();
        let cfg = SimConfig::new(spec, DecoderKind::Eaed, db, 1, seed).thresholds(0.16, None);
        let t = simulate_frame(&cfg, &code, sigma_from_ebn0(db, spec.rate()), index);
        if t.mc_frames == 0 {
            prop_assert_eq!(t.mc_bit_errors, 0);
        } else {
            prop_assert_eq!(t.mc_bit_errors, t.bit_errors);
            prop_assert!(t.bit_errors > 0);
        }
        prop_assert!(t.mc_frames + t.fail_frames <= 1);
    }

    #[test]
    fn fer_bounds_ber(db in 4.0f64..9.0, which in 0usize..4) {
        let spec = CodeSpec::new(255, 239, 5).unwrap();
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        let (dec, t, ta) = [
            (DecoderKind::Bdd, 0.0, None),
            (DecoderKind::BddA, 0.0, Some(0.75)),
            (DecoderKind::Eaed, 0.16, None),
            (DecoderKind::EaedA, 0.13, Some(0.75)),
        ][which];
        let p = sweep(&spec, &a, &SweepSpec::new(dec, t, ta), &[db]).unwrap()[0];
        prop_assert!(p.mc_ber <= p.ber && p.ber <= p.fer);
    }
}

/// `count` distinct positions below n drawn from a splitmix sequence.
fn scatter(seed: u64, n: usize, count: usize) -> Vec<usize> {
    let mut s = seed;
    let mut out = Vec::new();
    while out.len() < count {
        s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        let p = ((z ^ (z >> 31)) % n as u64) as usize;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

#[test]
fn uncoded_reference_value() {
    let p = uncoded_ber(7.0, 239.0 / 255.0);
    assert!((p - 1.088006e-3).abs() < 1e-8, "{p}");
    let ch = quantize(sigma_from_ebn0(7.0, 239.0 / 255.0), 0.0).unwrap();
    assert!((ch.delta - p).abs() < 1e-15);
}

#[test]
fn approximate_enumerator_is_within_factor_three() {
    let spec = CodeSpec::new(15, 7, 5).unwrap();
    let exact = WeightEnumerator::bundled(15, 7).unwrap();
    let approx = WeightEnumerator::approx(&spec).unwrap();
    for w in 0..=15 {
        let (x, y) = (exact.a_f64(w), approx.a_f64(w));
        if x > 0.0 && y > 0.0 {
            assert!(x / y < 3.0 && y / x < 3.0, "w={w}: {x} vs {y}");
        }
    }
    for e in [&exact, &approx] {
        assert!(e.weights().iter().all(|a| rational_to_f64(a) >= 0.0));
        assert!((1..5).all(|w| e.a_f64(w) == 0.0));
    }
}

#[test]
fn rational_and_float_paths_agree() {
    let spec = CodeSpec::new(15, 7, 5).unwrap();
    let a = WeightEnumerator::bundled(15, 7).unwrap();
    let r: BddDtp<BigRational> = bdd_dtp(&spec, &a, 15).unwrap();
    let f: BddDtp<f64> = bdd_dtp(&spec, &a, 15).unwrap();
    for (x, y) in r.to_f64().cells.iter().zip(&f.cells) {
        for ((_, rx, px), (_, ry, py)) in x.entries().iter().zip(y.entries()) {
            assert_eq!(*rx, ry);
            assert!((px - py).abs() <= 1e-12 * px.abs());
        }
    }
}

#[test]
fn success_falls_with_errors() {
    let spec = CodeSpec::new(255, 239, 5).unwrap();
    let a = WeightEnumerator::bundled(255, 239).unwrap();
    let x: EaedDtp<f64> = bchdtp::dtp::eaed_dtp(&spec, &a, &EaedParams::new(2, 8)).unwrap();
    for e in 0..=8 {
        assert!(x.cell(1, e).unwrap().succ <= x.cell(0, e).unwrap().succ);
        assert!(x.cell(2, e).unwrap().succ <= x.cell(1, e).unwrap().succ);
    }
    let s = x.cell(0, 5).unwrap().succ;
    assert!(s > 0.0 && s < 1.0);
}

#[test]
fn tallies_do_not_depend_on_thread_count() {
    let spec = CodeSpec::new(255, 239, 5).unwrap();
    let mut cfg =
        SimConfig::new(spec, DecoderKind::EaedA, 4.5, 5000, 31).thresholds(0.13, Some(0.75));
    cfg.exec = Exec::Parallel;
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| bchdtp::sim::simulate_frames(&cfg).unwrap().tally)
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    cfg.exec = Exec::Sequential;
    assert_eq!(one, bchdtp::sim::simulate_frames(&cfg).unwrap().tally);
}
