//! Bound-evaluator tests: deviation-term identities, the Lemma-5
//! inequality with both sides computed, classical reductions with scalar
//! oracles, limit consistency, dominance, and soundness properties.

use qgb_core::bounds::{
    bound_caro_old, bound_iid_individual, bound_kl, bound_l1, bound_renyi, classical_bounds,
    classical_gamma_term, default_alpha_grid_above, default_alpha_grid_below, deviation_terms,
    mutual_information, renyi_mutual_information, BoundKind, QuantumDivKind,
};
use qgb_core::divergence::Magnitude;
use qgb_core::learning::{
    classical_embedding_instance, expected_gen, expected_gen_old, independent_instance, induce,
    random_iid_pair_instance, random_instance, resolved_cert, RandomInstanceConfig,
};
use qgb_core::learning::{empirical_loss, product_te_hyp};
use qgb_core::operator::{permute_density, trace_pair};

fn full_grid() -> Vec<f64> {
    let mut g = default_alpha_grid_below();
    g.extend(default_alpha_grid_above());
    g
}

#[test]
fn deviation_terms_vanish_for_product_and_constant_structure() {
    // Product data states kill d1.
    let instance = random_instance(&RandomInstanceConfig {
        entangled: false,
        seed: 51,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let cert = resolved_cert(&joint, &instance).unwrap();
    for pr in &joint.pairs {
        let (d1, _) = deviation_terms(
            &joint,
            cert.mu,
            pr.w,
            pr.s_idx,
            QuantumDivKind::Modified,
            Some(0.7),
        )
        .unwrap();
        assert!(d1.expect_finite("d1") < 1e-5, "d1 should vanish");
    }

    // Sample-independent hypothesis states kill d2.
    let instance = independent_instance(2, 2, 53).unwrap();
    let joint = induce(&instance).unwrap();
    let cert = resolved_cert(&joint, &instance).unwrap();
    for pr in &joint.pairs {
        for kind in [QuantumDivKind::Modified, QuantumDivKind::Petz, QuantumDivKind::Kl] {
            let alpha = if kind == QuantumDivKind::Kl { None } else { Some(0.7) };
            let (d1, d2) = deviation_terms(&joint, cert.mu, pr.w, pr.s_idx, kind, alpha).unwrap();
            assert!(d1.expect_finite("d1") < 1e-5);
            assert!(d2.expect_finite("d2") < 1e-5);
        }
    }
}

#[test]
fn deviation_terms_dominate_the_trace_deviations() {
    // Lemma-5 style inequality, both sides computed exactly.
    let instance = random_instance(&RandomInstanceConfig {
        seed: 57,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let cert = resolved_cert(&joint, &instance).unwrap();
    for pr in &joint.pairs {
        let loss = instance
            .loss(pr.w, &joint.samples[pr.s_idx], &joint.loss_space)
            .unwrap();
        let emp = empirical_loss(&joint, &instance, pr.w, pr.s_idx).unwrap();
        let ref1 = permute_density(
            &product_te_hyp(&joint.rho_te[pr.s_idx], &pr.sigma_hyp).unwrap(),
            pr.sigma.space(),
        )
        .unwrap();
        let mid = trace_pair(&loss, &ref1).unwrap();
        let sigma_w = joint.sigma_hyp_w[pr.w].as_ref().unwrap();
        let ref2 = permute_density(
            &product_te_hyp(&joint.rho_te[pr.s_idx], sigma_w).unwrap(),
            pr.sigma.space(),
        )
        .unwrap();
        let far = trace_pair(&loss, &ref2).unwrap();

        for alpha in [0.3, 0.7, 1.5, 2.5] {
            let (d1, d2) = deviation_terms(
                &joint,
                cert.mu,
                pr.w,
                pr.s_idx,
                QuantumDivKind::Modified,
                Some(alpha),
            )
            .unwrap();
            assert!(
                (emp - mid).abs() <= d1.expect_finite("d1") + 1e-9,
                "alpha {}: |{} - {}| > {}",
                alpha,
                emp,
                mid,
                d1.expect_finite("d1")
            );
            assert!(
                (mid - far).abs() <= d2.expect_finite("d2") + 1e-9,
                "alpha {}: |{} - {}| > {}",
                alpha,
                mid,
                far,
                d2.expect_finite("d2")
            );
        }
        // KL variant.
        let (d1, d2) =
            deviation_terms(&joint, cert.mu, pr.w, pr.s_idx, QuantumDivKind::Kl, None).unwrap();
        assert!((emp - mid).abs() <= d1.expect_finite("d1") + 1e-9);
        assert!((mid - far).abs() <= d2.expect_finite("d2") + 1e-9);
    }
}

#[test]
fn classical_gamma_term_identities() {
    // Independent joint: zero for every order.
    let instance = independent_instance(2, 2, 61).unwrap();
    let joint = induce(&instance).unwrap();
    for gamma in [0.3, 0.7, 1.5, 3.0] {
        let v = classical_gamma_term(&joint, 0.8, gamma).unwrap();
        assert!(v.expect_finite("term").abs() < 1e-7, "gamma {}", gamma);
    }

    // gamma -> 1 bracket against the KL-form term.
    let instance = random_instance(&RandomInstanceConfig {
        seed: 63,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let cert = resolved_cert(&joint, &instance).unwrap();
    let kl_term = {
        // E_W[sqrt(2 tau^2 KL(P_{S|W} || P_S))] computed directly.
        let prior = joint.prior_s_dist();
        let mut acc = 0.0;
        for w in 0..joint.w_count() {
            if joint.marginal_w[w] <= 0.0 {
                continue;
            }
            let post = joint.posterior_dist(w).unwrap();
            let d = qgb_core::divergence::classical_kl(&post, &prior)
                .unwrap()
                .value
                .expect_finite("kl");
            acc += joint.marginal_w[w] * (2.0 * cert.tau * cert.tau * d.max(0.0)).sqrt();
        }
        acc
    };
    for gamma in [1.0 - 1e-4, 1.0 + 1e-4] {
        let v = classical_gamma_term(&joint, cert.tau, gamma)
            .unwrap()
            .expect_finite("term");
        assert!((v - kl_term).abs() < 5e-3, "gamma {}: {} vs {}", gamma, v, kl_term);
    }

    // Two-atom joint against a scalar oracle.
    let embed = classical_embedding_instance(2, 2, 67).unwrap();
    let joint = induce(&embed).unwrap();
    let gamma = 2.0;
    let prior = joint.prior_s_dist();
    let mut oracle = 0.0;
    for w in 0..joint.w_count() {
        let post = joint.posterior_dist(w).unwrap();
        let sum: f64 = post
            .probs()
            .iter()
            .zip(prior.probs())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, q)| p.powf(gamma) * q.powf(1.0 - gamma))
            .sum();
        oracle += joint.marginal_w[w] * (2.0 * 0.5 * 0.5 * sum.ln()).sqrt();
    }
    let v = classical_gamma_term(&joint, 0.5, gamma).unwrap().expect_finite("term");
    assert!((v - oracle).abs() < 1e-12);
}

#[test]
fn renyi_bound_soundness_and_dominance() {
    let alphas = full_grid();
    let gammas = full_grid();
    for seed in 0..8u64 {
        let instance = random_instance(&RandomInstanceConfig {
            w_count: 2,
            seed: 7000 + seed,
            ..Default::default()
        })
        .unwrap();
        let joint = induce(&instance).unwrap();
        let modified = bound_renyi(&joint, &instance, &alphas, &gammas, BoundKind::RenyiMod).unwrap();
        let petz = bound_renyi(&joint, &instance, &alphas, &gammas, BoundKind::RenyiPetz).unwrap();
        assert!(modified.sound, "modified bound unsound at seed {}", seed);
        assert!(petz.sound, "Petz bound unsound at seed {}", seed);
        assert!(!modified.vacuous && !petz.vacuous);
        // Pointwise dominance on the shared grid (Fact-29 consequence).
        for (m, p) in modified.grid.iter().zip(&petz.grid) {
            if let (Some(mv), Some(pv)) = (m.value, p.value) {
                assert!(mv <= pv + 1e-6, "dominance broke at alpha {}", m.param);
            }
        }
        assert!(
            modified.optimum_value.unwrap() <= petz.optimum_value.unwrap() + 1e-6,
            "optimum dominance at seed {}",
            seed
        );
    }
}

#[test]
fn kl_bound_soundness_and_renyi_limit_bracket() {
    let instance = random_instance(&RandomInstanceConfig {
        seed: 71,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let kl = bound_kl(&joint, &instance).unwrap();
    assert!(kl.sound && !kl.vacuous);

    // bound_renyi evaluated only at alpha = gamma = 1 +- 1e-4 brackets the
    // KL value within 5e-3.
    for eps in [-1e-4, 1e-4] {
        let order = [1.0 + eps];
        let near = bound_renyi(&joint, &instance, &order, &order, BoundKind::RenyiMod).unwrap();
        let v = near.optimum_value.unwrap();
        assert!(
            (v - kl.optimum_value.unwrap()).abs() < 5e-3,
            "order {}: {} vs {}",
            1.0 + eps,
            v,
            kl.optimum_value.unwrap()
        );
    }

    // Trivial-learner zero: the independent instance gives a zero bound.
    let instance = independent_instance(2, 2, 73).unwrap();
    let joint = induce(&instance).unwrap();
    let kl = bound_kl(&joint, &instance).unwrap();
    assert!(kl.optimum_value.unwrap() < 1e-6);
    assert!(kl.realized_abs_gen < 1e-10);
}

#[test]
fn caro_old_bound_properties() {
    // Product data states: the quantum term vanishes entirely.
    let instance = random_instance(&RandomInstanceConfig {
        entangled: false,
        seed: 77,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let alphas = full_grid();
    let report = bound_caro_old(&joint, &instance, &alphas, &alphas).unwrap();
    assert!(report.sound);
    // Quantum part ~ 0, so the bound is essentially the classical term at
    // its optimum; sanity: it is below the two-term modified bound.
    let full = bound_renyi(&joint, &instance, &alphas, &alphas, BoundKind::RenyiMod).unwrap();
    assert!(report.optimum_value.unwrap() <= full.optimum_value.unwrap() + 1e-9);

    // At alpha, gamma -> 1 the old-form bound equals bound_kl minus its d2
    // term within 5e-3.
    let instance = random_instance(&RandomInstanceConfig {
        seed: 79,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let cert = resolved_cert(&joint, &instance).unwrap();
    let order = [1.0 + 1e-4];
    let old_near = bound_caro_old(&joint, &instance, &order, &order).unwrap();
    let kl = bound_kl(&joint, &instance).unwrap();
    let d2_term: f64 = joint
        .pairs
        .iter()
        .map(|pr| {
            let (_, d2) = deviation_terms(
                &joint,
                cert.mu,
                pr.w,
                pr.s_idx,
                QuantumDivKind::Kl,
                None,
            )
            .unwrap();
            pr.joint * d2.expect_finite("d2")
        })
        .sum();
    let expected = kl.optimum_value.unwrap() - d2_term;
    assert!(
        (old_near.optimum_value.unwrap() - expected).abs() < 5e-3,
        "{} vs {}",
        old_near.optimum_value.unwrap(),
        expected
    );

    // Soundness against the old-definition generalization error.
    assert!((old_near.realized_abs_gen - expected_gen_old(&joint, &instance).unwrap().abs()).abs() < 1e-14);
}

#[test]
fn l1_bound_properties() {
    // Independent instance: both terms zero.
    let instance = independent_instance(2, 2, 81).unwrap();
    let joint = induce(&instance).unwrap();
    let report = bound_l1(&joint, &instance, 1.0, None).unwrap();
    assert!(report.optimum_value.unwrap() < 1e-7);
    assert!(report.sound);

    // Norm monotonicity with shared constants: the p = 2 value is below
    // p = 1.
    let instance = random_instance(&RandomInstanceConfig {
        seed: 83,
        ..Default::default()
    })
    .unwrap();
    let joint = induce(&instance).unwrap();
    let l1 = bound_l1(&joint, &instance, 1.0, Some((1.0, 1.0))).unwrap();
    let l2 = bound_l1(&joint, &instance, 2.0, Some((1.0, 1.0))).unwrap();
    assert!(l2.optimum_value.unwrap() <= l1.optimum_value.unwrap() + 1e-12);
    assert_eq!(l1.bound_kind, BoundKind::L1);
    assert_eq!(l2.bound_kind, BoundKind::Lp);

    // Derived constants keep the old-definition soundness.
    for seed in 0..6u64 {
        let instance = random_instance(&RandomInstanceConfig {
            seed: 8500 + seed,
            ..Default::default()
        })
        .unwrap();
        let joint = induce(&instance).unwrap();
        let r1 = bound_l1(&joint, &instance, 1.0, None).unwrap();
        assert!(r1.sound, "L1 unsound at seed {}", seed);
        let r2 = bound_l1(&joint, &instance, 2.0, None).unwrap();
        assert!(r2.sound, "Lp unsound at seed {}", seed);
        let old_gen = expected_gen_old(&joint, &instance).unwrap().abs();
        assert!((r1.realized_abs_gen - old_gen).abs() < 1e-14);
    }
}

#[test]
fn iid_bound_reduces_and_stays_sound() {
    // n = 1: the individual-sample bound coincides with the whole-sample
    // machinery up to the Jensen step (expectation inside the radical),
    // so it is bounded by the per-pair version and stays sound.
    let alphas = full_grid();
    for seed in 0..5u64 {
        let instance = random_instance(&RandomInstanceConfig {
            seed: 8700 + seed,
            ..Default::default()
        })
        .unwrap();
        let joint = induce(&instance).unwrap();
        let iid = bound_iid_individual(&joint, &instance, &alphas, &alphas, BoundKind::IidMod)
            .unwrap();
        assert!(iid.sound, "iid bound unsound at seed {}", seed);
        let whole = bound_renyi(&joint, &instance, &alphas, &alphas, BoundKind::RenyiMod).unwrap();
        // The expectation sits inside the radical here, so by Jensen the
        // n = 1 individual-sample value is at least the whole-sample one
        // and shares its classical term.
        assert!(
            iid.optimum_value.unwrap() >= whole.optimum_value.unwrap() - 1e-9,
            "seed {}: {} vs {}",
            seed,
            iid.optimum_value.unwrap(),
            whole.optimum_value.unwrap()
        );
    }

    // n = 2 with an uncorrelated learner: classical terms vanish.
    let instance = independent_instance(2, 2, 89).unwrap();
    let joint = induce(&instance).unwrap();
    let iid = bound_iid_individual(&joint, &instance, &alphas, &alphas, BoundKind::IidMod).unwrap();
    assert!(iid.optimum_value.unwrap() < 1e-6);

    // n = 2 random instances: soundness.
    for seed in 0..4u64 {
        let instance = random_iid_pair_instance(9100 + seed).unwrap();
        let joint = induce(&instance).unwrap();
        for kind in [BoundKind::IidMod, BoundKind::IidPetz] {
            let iid = bound_iid_individual(&joint, &instance, &alphas, &alphas, kind).unwrap();
            assert!(iid.sound, "n=2 iid bound unsound at seed {}", seed);
            assert!(!iid.vacuous);
        }
    }

    // Wrong mode is rejected.
    let cfg = Fig2ModeProbe::general_mode_instance();
    if let Some((joint, instance)) = cfg {
        assert!(bound_iid_individual(&joint, &instance, &alphas, &alphas, BoundKind::IidMod)
            .is_err());
    }
}

/// Helper to build a general-mode instance for the mode check.
struct Fig2ModeProbe;
impl Fig2ModeProbe {
    fn general_mode_instance() -> Option<(qgb_core::learning::InducedJoint, qgb_core::learning::LearningInstance)> {
        use qgb_core::divergence::ClassicalDist;
        use qgb_core::learning::{LearningInstance, LearningMode};
        use qgb_core::operator::{random_density, HermitianObservable, HilbertSpace, Povm};
        use std::collections::BTreeMap;

        let te = HilbertSpace::single("te", 2).ok()?;
        let tr = HilbertSpace::single("tr", 2).ok()?;
        let mut data_states = BTreeMap::new();
        data_states.insert(
            "z0".to_string(),
            random_density(&te.tensor(&tr).ok()?, 4, 3).ok()?,
        );
        let mut povms = BTreeMap::new();
        povms.insert(
            "z0".to_string(),
            Povm::new(
                tr.clone(),
                vec![("w0".to_string(), HermitianObservable::identity(tr.clone()))],
            )
            .ok()?,
        );
        let mut losses = BTreeMap::new();
        losses.insert(
            "w0|z0".to_string(),
            HermitianObservable::identity(te.tensor(&tr).ok()?),
        );
        let instance = LearningInstance::new(
            vec!["z0".into()],
            ClassicalDist::new(vec!["z0".into()], vec![1.0]).ok()?,
            1,
            LearningMode::General,
            te,
            tr.clone(),
            tr,
            data_states,
            povms,
            BTreeMap::new(),
            losses,
            None,
        )
        .ok()?;
        let joint = induce(&instance).ok()?;
        Some((joint, instance))
    }
}

#[test]
fn classical_reduction_matches_propositions() {
    for seed in [91u64, 92, 93] {
        let instance = classical_embedding_instance(2, 2, seed).unwrap();
        let joint = induce(&instance).unwrap();
        let gammas = [0.5, 2.0];
        let classical = classical_bounds(&joint, &instance, &gammas).unwrap();

        // Quantum KL evaluator reproduces the classical machinery exactly
        // (n = 1 and vanishing quantum terms).
        let kl = bound_kl(&joint, &instance).unwrap();
        assert!(
            (kl.optimum_value.unwrap() - classical.xu_raginsky.unwrap()).abs() < 1e-9,
            "seed {}",
            seed
        );
        // n = 1: the individual-sample classical bound equals the joint one.
        assert!((classical.bu.unwrap() - classical.xu_raginsky.unwrap()).abs() < 1e-9);
        // Quantum Renyi evaluator matches the modak values per order.
        for &(gamma, value) in &classical.modak {
            let quantum = bound_renyi(&joint, &instance, &[gamma], &[gamma], BoundKind::RenyiMod)
                .unwrap();
            assert!(
                (quantum.optimum_value.unwrap() - value.unwrap()).abs() < 1e-9,
                "seed {} gamma {}",
                seed,
                gamma
            );
        }
        // modak at gamma -> 1: the per-hypothesis expectation sits outside
        // the radical, so the limit is the Jensen-tightened version of bu
        // (below it) and brackets the explicit KL-radical expectation.
        let near = classical_bounds(&joint, &instance, &[1.0 + 1e-4]).unwrap();
        let modak_limit = near.modak[0].1.unwrap();
        assert!(modak_limit <= classical.bu.unwrap() + 1e-9);
        let prior = joint.prior_s_dist();
        let cert = resolved_cert(&joint, &instance).unwrap();
        let mut kl_radical = 0.0;
        for w in 0..joint.w_count() {
            if joint.marginal_w[w] <= 0.0 {
                continue;
            }
            let post = joint.posterior_dist(w).unwrap();
            let d = qgb_core::divergence::classical_kl(&post, &prior)
                .unwrap()
                .value
                .expect_finite("kl");
            kl_radical += joint.marginal_w[w] * (2.0 * cert.tau * cert.tau * d.max(0.0)).sqrt();
        }
        assert!(
            (modak_limit - kl_radical).abs() < 5e-3,
            "seed {}: {} vs {}",
            seed,
            modak_limit,
            kl_radical
        );
        // Realized |gen| is sound against everything.
        let gen = expected_gen(&joint, &instance).unwrap().abs();
        assert!(gen <= classical.xu_raginsky.unwrap() + 1e-9);
    }

    // Independent data: everything is zero.
    let instance = independent_instance(2, 2, 97).unwrap();
    let joint = induce(&instance).unwrap();
    let classical = classical_bounds(&joint, &instance, &[0.5, 2.0]).unwrap();
    assert!(classical.xu_raginsky.unwrap() < 1e-7);
    assert!(classical.bu.unwrap() < 1e-7);
    for (_, v) in classical.modak {
        assert!(v.unwrap() < 1e-7);
    }
}

#[test]
fn hand_joint_mutual_information_oracle() {
    // 2x2 hand-computed joint through an embedding instance is overkill;
    // check the information helpers directly on a constructed joint by
    // using an embedding whose conditional we can read off.
    let instance = classical_embedding_instance(2, 2, 101).unwrap();
    let joint = induce(&instance).unwrap();
    // Scalar oracle: I = sum_ws j log(j / (w_marg * s_marg)).
    let j = joint.joint_dist();
    let p = joint.product_dist();
    let mut oracle = 0.0;
    for (a, b) in j.probs().iter().zip(p.probs()) {
        if *a > 0.0 {
            oracle += a * (a / b).ln();
        }
    }
    let i = mutual_information(&joint).unwrap().expect_finite("I");
    assert!((i - oracle).abs() < 1e-12);

    // Renyi mutual information at gamma = 2 against the direct formula.
    let mut sum = 0.0;
    for (a, b) in j.probs().iter().zip(p.probs()) {
        if *a > 0.0 && *b > 0.0 {
            sum += a * a / b;
        }
    }
    let i2 = renyi_mutual_information(&joint, 2.0)
        .unwrap()
        .expect_finite("I2");
    assert!((i2 - sum.ln()).abs() < 1e-12);

    // Independent joint: zero at every order.
    let ind = independent_instance(2, 2, 103).unwrap();
    let joint = induce(&ind).unwrap();
    for gamma in [0.5, 1.0, 2.0] {
        let v = if (gamma - 1.0f64).abs() < 1e-12 {
            mutual_information(&joint).unwrap()
        } else {
            renyi_mutual_information(&joint, gamma).unwrap()
        };
        match v {
            Magnitude::Finite(x) => assert!(x.abs() < 1e-9),
            Magnitude::Infinite => panic!("independent joint gave infinite information"),
        }
    }
}

