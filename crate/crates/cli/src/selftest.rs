//! Built-in property suite: one pass/fail line per check plus a summary.

use std::path::Path;

use qgb_core::bounds::{bound_caro_old, bound_kl, bound_l1, bound_renyi, BoundKind};
use qgb_core::divergence::{
    classical_renyi, measured_renyi, modified_sandwiched, petz_renyi, quantum_relative_entropy,
    sandwiched_renyi, ClassicalDist, MeasuredOptConfig,
};
use qgb_core::learning::{
    classical_embedding_instance, induce, instance_from_json, random_instance,
    RandomInstanceConfig,
};
use qgb_core::operator::{
    herm_eig, random_commuting_pair, random_cptp, random_density, random_hermitian, ComplexMatrix,
    HilbertSpace, OperatorWire,
};
use qgb_core::subgaussian::{check_quantum_hoeffding, default_lambda_grid};
use qgb_core::tail::{verify_coverage, TailKind, TailParams};
use qgb_core::Error;

struct Tally {
    passed: usize,
    failed: usize,
}

impl Tally {
    fn record(&mut self, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => {
                self.passed += 1;
                println!("[pass] {}", name);
            }
            Err(msg) => {
                self.failed += 1;
                println!("[FAIL] {}: {}", name, msg);
            }
        }
    }
}

fn qd(d: usize) -> HilbertSpace {
    HilbertSpace::single("q", d).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn eig_reconstruction(count: usize) -> Result<(), String> {
    for seed in 0..count as u64 {
        let dim = 2 + (seed % 7) as usize;
        let h = random_hermitian(&qd(dim), 1.0, seed);
        let (vals, vecs) = herm_eig(&h).map_err(|e| e.to_string())?;
        let mut rebuilt = ComplexMatrix::zeros(dim, dim);
        for (k, &lam) in vals.iter().enumerate() {
            for i in 0..dim {
                for j in 0..dim {
                    let t = vecs[(i, k)] * lam * vecs[(j, k)].conj();
                    rebuilt[(i, j)] += t;
                }
            }
        }
        check(
            rebuilt.sub(h.matrix()).max_abs() <= 1e-9,
            format!("reconstruction failed at seed {}", seed),
        )?;
    }
    Ok(())
}

fn ordering_sweep(pairs: usize, seed_base: u64, nm: &MeasuredOptConfig) -> Result<(), String> {
    for k in 0..pairs as u64 {
        let dim = 2 + (k % 2) as usize;
        let rho = random_density(&qd(dim), dim, seed_base + k).map_err(|e| e.to_string())?;
        let sigma =
            random_density(&qd(dim), dim, seed_base + 1000 + k).map_err(|e| e.to_string())?;
        for alpha in [0.3, 0.7, 1.5, 2.0] {
            let petz = petz_renyi(&rho, &sigma, alpha)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite Petz value")?;
            let sand = sandwiched_renyi(&rho, &sigma, alpha)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite sandwiched value")?;
            let modified = modified_sandwiched(&rho, &sigma, alpha)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite modified value")?;
            let measured = measured_renyi(&rho, &sigma, alpha, nm)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite measured value")?;
            check(sand <= petz + 1e-9, format!("ALT ordering broke at {}", alpha))?;
            check(
                measured <= modified + 1e-6 && modified <= petz + 1e-6,
                format!("measured/modified/Petz ordering broke at {}", alpha),
            )?;
        }
    }
    Ok(())
}

fn dpi_sweep(cases: usize, seed_base: u64) -> Result<(), String> {
    for k in 0..cases as u64 {
        let rho = random_density(&qd(3), 3, seed_base + k).map_err(|e| e.to_string())?;
        let sigma = random_density(&qd(3), 3, seed_base + 500 + k).map_err(|e| e.to_string())?;
        let ch = random_cptp(&qd(3), &HilbertSpace::single("r", 2).unwrap(), 2, seed_base + 900 + k)
            .map_err(|e| e.to_string())?;
        let r2 = ch.apply(&rho).map_err(|e| e.to_string())?;
        let s2 = ch.apply(&sigma).map_err(|e| e.to_string())?;
        for alpha in [0.3, 0.7, 1.5, 2.0] {
            let before = modified_sandwiched(&rho, &sigma, alpha)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite value")?;
            let after = modified_sandwiched(&r2, &s2, alpha)
                .map_err(|e| e.to_string())?
                .value
                .finite()
                .ok_or("infinite value")?;
            check(after <= before + 1e-8, format!("DPI broke at {}", alpha))?;
        }
    }
    Ok(())
}

fn limits_and_commuting(seed: u64, nm: &MeasuredOptConfig) -> Result<(), String> {
    let rho = random_density(&qd(3), 3, seed).map_err(|e| e.to_string())?;
    let sigma = random_density(&qd(3), 3, seed + 1).map_err(|e| e.to_string())?;
    let rel = quantum_relative_entropy(&rho, &sigma)
        .map_err(|e| e.to_string())?
        .value
        .finite()
        .ok_or("infinite relative entropy")?;
    for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
        let p = petz_renyi(&rho, &sigma, alpha)
            .map_err(|e| e.to_string())?
            .value
            .finite()
            .ok_or("infinite Petz value")?;
        check((p - rel).abs() < 5e-3, "Petz limit bracket failed")?;
    }
    // Commuting reduction including the measured estimate.
    let (a, b) = random_commuting_pair(&qd(2), seed + 7).map_err(|e| e.to_string())?;
    let ea = herm_eig(a.as_observable()).map_err(|e| e.to_string())?;
    let eb = herm_eig(b.as_observable()).map_err(|e| e.to_string())?;
    let pa = ClassicalDist::from_weights(
        (0..2).map(|i| i.to_string()).collect(),
        ea.0.clone(),
    )
    .map_err(|e| e.to_string())?;
    // The shared eigenbasis sorts differently per state; pinch b in a's
    // basis instead of reusing eb directly.
    let mut qb = vec![0.0; 2];
    #[allow(clippy::needless_range_loop)]
    for k in 0..2 {
        let mut acc = qgb_core::C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += ea.1[(i, k)].conj() * b.matrix()[(i, j)] * ea.1[(j, k)];
            }
        }
        qb[k] = acc.re;
    }
    let _ = eb;
    let qb = ClassicalDist::from_weights((0..2).map(|i| i.to_string()).collect(), qb)
        .map_err(|e| e.to_string())?;
    for alpha in [0.6, 2.0] {
        let classical = classical_renyi(&pa, &qb, alpha)
            .map_err(|e| e.to_string())?
            .value
            .finite()
            .ok_or("infinite classical value")?;
        let quantum = petz_renyi(&a, &b, alpha)
            .map_err(|e| e.to_string())?
            .value
            .finite()
            .ok_or("infinite Petz value")?;
        check(
            (classical - quantum).abs() < 1e-10,
            "commuting reduction failed",
        )?;
        let measured = measured_renyi(&a, &b, alpha, nm)
            .map_err(|e| e.to_string())?
            .value
            .finite()
            .ok_or("infinite measured value")?;
        check(
            (measured - classical).abs() < 1e-6,
            "measured commuting reduction failed",
        )?;
    }
    Ok(())
}

fn hoeffding_sweep(cases: usize, seed_base: u64) -> Result<(), String> {
    let lambdas = default_lambda_grid();
    for k in 0..cases as u64 {
        let dim = 2 + (k % 3) as usize;
        let l = random_hermitian(&qd(dim), 0.3, seed_base + k);
        let rho = random_density(&qd(dim), dim, seed_base + 2000 + k).map_err(|e| e.to_string())?;
        let eig = l.eig().map_err(|e| e.to_string())?;
        let a = *eig.eigenvalues.last().unwrap();
        let b = *eig.eigenvalues.first().unwrap();
        let out = check_quantum_hoeffding(&l, &rho, a, b, &lambdas).map_err(|e| e.to_string())?;
        check(out.holds, format!("Hoeffding violated at seed {}", k))?;
    }
    Ok(())
}

fn bound_soundness(cases: usize, seed_base: u64) -> Result<(), String> {
    let mut alphas = qgb_core::bounds::log_spaced(0.1, 0.95, 9);
    alphas.extend(qgb_core::bounds::log_spaced(1.05, 4.0, 9));
    for k in 0..cases as u64 {
        let instance = random_instance(&RandomInstanceConfig {
            seed: seed_base + k,
            ..Default::default()
        })
        .map_err(|e| e.to_string())?;
        let joint = induce(&instance).map_err(|e| e.to_string())?;
        let reports = [
            bound_kl(&joint, &instance).map_err(|e| e.to_string())?,
            bound_renyi(&joint, &instance, &alphas, &alphas, BoundKind::RenyiMod)
                .map_err(|e| e.to_string())?,
            bound_renyi(&joint, &instance, &alphas, &alphas, BoundKind::RenyiPetz)
                .map_err(|e| e.to_string())?,
            bound_caro_old(&joint, &instance, &alphas, &alphas).map_err(|e| e.to_string())?,
            bound_l1(&joint, &instance, 1.0, None).map_err(|e| e.to_string())?,
        ];
        for r in &reports {
            check(
                r.sound,
                format!("{} unsound at seed {}", r.bound_kind.as_str(), seed_base + k),
            )?;
        }
    }
    Ok(())
}

fn fig2_orderings() -> Result<(), String> {
    let cfg = qgb_core::experiment::Fig2Config {
        p_grid: vec![0.5, 0.65, 0.8],
        ..Default::default()
    };
    let rows = qgb_core::experiment::sweep_p(&cfg).map_err(|e| e.to_string())?;
    for r in &rows {
        let (kl, m, p) = (
            r.b_kl.ok_or("vacuous KL bound")?,
            r.b_mod.ok_or("vacuous modified bound")?,
            r.b_petz.ok_or("vacuous Petz bound")?,
        );
        check(m <= p + 1e-9 && m <= kl + 1e-9, format!("ordering broke at p {}", r.p))?;
        check(r.abs_gen <= m + 1e-9, format!("soundness broke at p {}", r.p))?;
    }
    Ok(())
}

fn tail_coverage(draws: usize, seed: u64) -> Result<(), String> {
    let grid = qgb_core::bounds::log_spaced(0.2, 0.95, 7);
    let instance = random_instance(&RandomInstanceConfig {
        seed,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let joint = induce(&instance).map_err(|e| e.to_string())?;
    let delta = 0.1;
    let sigma3 = 3.0 * (delta * (1.0 - delta) / draws as f64).sqrt();
    for kind in [TailKind::QuantumRenyi, TailKind::QuantumSmoothMax] {
        let report = verify_coverage(
            &joint,
            &instance,
            kind,
            &TailParams {
                delta,
                nu: Some(delta / 2.0),
                gamma: Some(2.0),
                alpha_grid: grid.clone(),
            },
            draws,
            seed,
        )
        .map_err(|e| e.to_string())?;
        check(
            report.empirical_coverage >= 1.0 - delta - sigma3,
            format!("{:?} coverage {}", kind, report.empirical_coverage),
        )?;
    }
    let embedding = classical_embedding_instance(2, 2, seed + 5).map_err(|e| e.to_string())?;
    let joint = induce(&embedding).map_err(|e| e.to_string())?;
    for kind in [TailKind::ClassicalRenyi, TailKind::ClassicalSmoothMax] {
        let report = verify_coverage(
            &joint,
            &embedding,
            kind,
            &TailParams {
                delta,
                nu: Some(delta / 2.0),
                gamma: Some(2.0),
                alpha_grid: grid.clone(),
            },
            draws,
            seed,
        )
        .map_err(|e| e.to_string())?;
        check(
            report.empirical_coverage >= 1.0 - delta - sigma3,
            format!("{:?} coverage {}", kind, report.empirical_coverage),
        )?;
    }
    Ok(())
}

fn docs_examples(docs_dir: &Path) -> Result<(), String> {
    let examples = docs_dir.join("examples");
    let entries = std::fs::read_dir(&examples)
        .map_err(|e| format!("{}: {}", examples.display(), e))?;
    let mut seen = 0;
    for entry in entries {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name.starts_with("instance") {
            let instance = instance_from_json(&text).map_err(|e| format!("{}: {}", name, e))?;
            let joint = induce(&instance).map_err(|e| format!("{}: {}", name, e))?;
            bound_kl(&joint, &instance).map_err(|e| format!("{}: {}", name, e))?;
        } else if name.starts_with("state") || name.starts_with("observable") {
            let wire: OperatorWire =
                serde_json::from_str(&text).map_err(|e| format!("{}: {}", name, e))?;
            if name.starts_with("state") {
                wire.into_density().map_err(|e| format!("{}: {}", name, e))?;
            } else {
                wire.into_observable()
                    .map_err(|e| format!("{}: {}", name, e))?;
            }
        } else {
            return Err(format!("unrecognized docs example '{}'", name));
        }
    }
    check(seen >= 4, format!("expected at least 4 example files, found {}", seen))
}

pub fn run(quick: bool, docs_dir: &Path, seed: u64) -> Result<u8, Error> {
    let scale = if quick { 1 } else { 4 };
    let nm = MeasuredOptConfig::fast(seed);
    let mut tally = Tally {
        passed: 0,
        failed: 0,
    };

    tally.record("eigendecomposition reconstruction", eig_reconstruction(25 * scale));
    tally.record(
        "divergence orderings (sandwiched/Petz, measured/modified)",
        ordering_sweep(3 * scale, seed, &nm),
    );
    tally.record("data-processing contraction", dpi_sweep(3 * scale, seed + 100));
    tally.record("order limits and commuting reductions", limits_and_commuting(seed + 200, &nm));
    tally.record("operator Hoeffding sweep", hoeffding_sweep(25 * scale, seed + 300));
    tally.record("bound soundness", bound_soundness(2 * scale, seed + 400));
    tally.record("worked-example orderings", fig2_orderings());
    tally.record("tail coverage", tail_coverage(if quick { 2000 } else { 5000 }, seed + 500));
    tally.record("documented examples parse and run", docs_examples(docs_dir));

    println!(
        "selftest: {} passed, {} failed, {} total",
        tally.passed,
        tally.failed,
        tally.passed + tally.failed
    );
    if tally.failed == 0 {
        Ok(0)
    } else {
        Err(Error::Numerical(format!("{} selftest checks failed", tally.failed)))
    }
}
