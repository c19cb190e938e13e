//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 2-5, 7 and 9 pin the quantitative targets (table rows, gap
//! values, verdict counts, integrator order, noise trends); the rest are
//! exactness and determinism properties. Every tolerance is fixed here.

use hpqa_core::anneal::{
    evolve_observed, AnnealSchedule, Driver, IntegratorConfig,
};
use hpqa_core::design::{design, sa_minimize, SaParams, SolverChoice, Verdict};
use hpqa_core::enumerate::{min_ehp_oracle, most_designable, structure_set};
use hpqa_core::ising::{qubo_to_ising, spectrum, to_qubo};
use hpqa_core::lattice::{
    design_energy, hp_energy, ContactMap, DesignEnergyModel, HpSequence, LatticeStructure,
};
use hpqa_core::noise::{ground_state_overlap_rate, jcs_sweep, n_sweep, NSweepSystem, NoiseSpec};
use hpqa_core::rational::{parse_rat, Rat};
use rand::prelude::*;
use rayon::prelude::*;
use std::process::Command;

fn report(criterion: usize, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn lambda_11() -> Rat {
    parse_rat("1.1").unwrap()
}

fn system(n: usize, n_h: usize) -> (LatticeStructure, DesignEnergyModel) {
    let target = most_designable(n, 16).expect("designability within override limit");
    let model = DesignEnergyModel::new(target.contact_map(), lambda_11(), n_h).unwrap();
    (target, model)
}

// Criterion 1: design energy, QUBO and Ising agree exactly on all states of
// 200 random contact maps with random (lambda, N_H).
#[test]
fn criterion_01_encoding_equivalence() {
    let mut rng = StdRng::seed_from_u64(20240811);
    let mut checked_states = 0u64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10usize);
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 2..n {
                if rng.gen_bool(0.3) {
                    pairs.push((i, j));
                }
            }
        }
        let cmap = ContactMap::new(n, &pairs).unwrap();
        let lambda = Rat::new(rng.gen_range(0..=40), rng.gen_range(1..=10));
        let n_h = rng.gen_range(0..=n);
        let model = DesignEnergyModel::new(cmap, lambda, n_h).unwrap();
        let qubo = to_qubo(&model);
        let ising = qubo_to_ising(&qubo);
        for bits in 0..1u64 << n {
            let seq = HpSequence::from_bits(n, bits);
            let e = design_energy(&model, &seq).unwrap();
            assert_eq!(qubo.energy(bits), e, "qubo mismatch n={n} bits={bits:b}");
            assert_eq!(ising.energy(bits), e, "ising mismatch n={n} bits={bits:b}");
            checked_states += 1;
        }
    }
    report(1, true, &format!("200 random maps, {checked_states} states, exact"));
}

// Criterion 2: derived targets reproduce the reference table rows exactly.
#[test]
fn criterion_02_reference_rows() {
    let rows: &[(usize, usize, i64, u128)] = &[
        (10, 4, -4, 1),
        (12, 4, -4, 1),
        (12, 6, -5, 1),
        (13, 6, -4, 18),
        (13, 8, -6, 1),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for &(n, n_h, want_min, want_deg) in rows {
        let (target, _) = system(n, n_h);
        let sol = min_ehp_oracle(&target.contact_map(), n_h, false).unwrap();
        let row_ok = sol.min_ehp == want_min && sol.degeneracy == want_deg;
        if n == 13 && n_h == 6 {
            let rep = design(&target, n_h, lambda_11(), SolverChoice::Exact, 1, 0, 16).unwrap();
            let uniq = rep.count_verdict(Verdict::UniqueGs);
            ok &= row_ok && uniq == 1;
            detail.push_str(&format!(
                "T{n}/{n_h}: ({}, {}, unique {uniq}) ",
                sol.min_ehp, sol.degeneracy
            ));
        } else {
            ok &= row_ok;
            detail.push_str(&format!("T{n}/{n_h}: ({}, {}) ", sol.min_ehp, sol.degeneracy));
        }
    }
    report(2, ok, detail.trim());
}

// Criterion 3: lambda = 1.1 gaps match the table rows exactly.
#[test]
fn criterion_03_gap_values() {
    let rows: &[(usize, usize, &str)] = &[
        (10, 4, "1.1"),
        (12, 4, "1.1"),
        (12, 6, "1"),
        (13, 6, "0.1"),
        (13, 8, "1"),
    ];
    let allowed: Vec<Rat> =
        ["0.1", "1", "1.1"].iter().map(|s| parse_rat(s).unwrap()).collect();
    let mut ok = true;
    let mut detail = String::new();
    for &(n, n_h, want) in rows {
        let (_, model) = system(n, n_h);
        let gap = spectrum(&qubo_to_ising(&to_qubo(&model))).unwrap().gap;
        let want = parse_rat(want).unwrap();
        ok &= gap == want && allowed.contains(&gap);
        detail.push_str(&format!("T{n}/{n_h}: gap {} ", hpqa_core::rational::format_rat(&gap)));
    }
    report(3, ok, detail.trim());
}

// Criterion 4: T_13, N_H = 6 verdict census. Implemented as stated (1 unique
// ground state, 5 better elsewhere among the 18 minimizers). Exhaustive
// enumeration, cross-checked against an independent brute-force fold,
// yields 4 better-elsewhere rather than 5 for every admissible 13-bead
// target, so the 5 is expected to fail; the measured values are printed.
#[test]
fn criterion_04_pipeline_classification() {
    let (target, _) = system(13, 6);
    let rep = design(&target, 6, lambda_11(), SolverChoice::Exact, 1, 0, 16).unwrap();
    let total = rep.candidates.len();
    let uniq = rep.count_verdict(Verdict::UniqueGs);
    let better = rep.count_verdict(Verdict::BetterElsewhere);
    let ok = total == 18 && uniq == 1 && better == 5;
    report(
        4,
        ok,
        &format!("T13/6: {total} minimizers, {uniq} unique-GS, {better} better-elsewhere (stated: 18, 1, 5)"),
    );
}

// Criterion 5: integrator order and annealing-time behavior on the 8-qubit
// verification system.
#[test]
fn criterion_05_integrator_order() {
    let (_, model) = system(8, 4);
    let problem = qubo_to_ising(&to_qubo(&model));
    let ground = spectrum(&problem).unwrap().ground_states;
    let pg = |t_f: f64, eps: f64| -> f64 {
        hpqa_core::anneal::final_ground_probability(
            &problem,
            &Driver::x(),
            &AnnealSchedule::new(t_f).unwrap(),
            &IntegratorConfig { eps, ..Default::default() },
            Some(4),
            &ground,
        )
        .unwrap()
    };
    let eps_list = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    let smallest = *eps_list.last().unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for t_f in [10.0, 50.0] {
        let chi = hpqa_core::anneal::chi_with_ground_set(
            &problem,
            &Driver::x(),
            t_f,
            smallest,
            Some(4),
            &ground,
        )
        .unwrap();
        ok &= (0.2..=0.3).contains(&chi);
        detail.push_str(&format!("chi(tf={t_f}, eps={smallest}) = {chi:.4} "));
    }
    let p50 = pg(50.0, 0.01);
    let p10 = pg(10.0, 0.01);
    ok &= p50 >= 0.9 && p50 > p10;
    detail.push_str(&format!("P_g(50) = {p50:.4}, P_g(10) = {p10:.4}"));
    report(5, ok, &detail);
}

// Criterion 6: unitarity over 10^4 steps and XY weight conservation
// throughout the evolution.
#[test]
fn criterion_06_unitarity_and_constraint() {
    let (_, model) = system(8, 4);
    let problem = qubo_to_ising(&to_qubo(&model));
    let schedule = AnnealSchedule::new(100.0).unwrap();
    let config = IntegratorConfig { eps: 0.01, ..Default::default() };
    let mut steps = 0usize;
    let mut drift: f64 = 0.0;
    evolve_observed(&problem, &Driver::x(), &schedule, &config, Some(4), |s| {
        steps = s.step;
        drift = drift.max((s.norm() - 1.0).abs());
    })
    .unwrap();
    let mut leak: f64 = 0.0;
    evolve_observed(&problem, &Driver::xy(), &schedule, &config, Some(4), |s| {
        leak = leak.max(s.weight_leak(4));
    })
    .unwrap();
    let ok = steps >= 10_000 && drift <= 1e-10 && leak <= 1e-8;
    report(
        6,
        ok,
        &format!("{steps} steps, norm drift {drift:.2e} (<= 1e-10), XY leak {leak:.2e} (<= 1e-8)"),
    );
}

// Criterion 7: control-noise trends at x = 0.015 with 10,000 samples per
// ensemble (5-sigma binomial tolerances on orderings).
#[test]
fn criterion_07_noise_trends() {
    let samples = 10_000u64;
    let seed = 1u64;
    let sigma = |p: f64| (p * (1.0 - p) / samples as f64).sqrt();
    let (_, model10) = system(10, 4);
    let p10 = qubo_to_ising(&to_qubo(&model10));

    // J_cs sweep on the N = 10 system (k = 2): non-increasing.
    let jcs_values = [2.25, 2.75, 3.25, 3.75, 4.25];
    let rows = jcs_sweep(&p10, 0.015, 2, &jcs_values, samples, seed).unwrap();
    let mut ok = true;
    for w in rows.windows(2) {
        let tol = 5.0 * (sigma(w[0].p_g).powi(2) + sigma(w[1].p_g).powi(2)).sqrt();
        ok &= w[1].p_g <= w[0].p_g + tol;
    }
    let jcs_detail: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.p_g)).collect();

    // Noise-strength monotonicity on the same system.
    let mut x_rates = Vec::new();
    for x in [0.003, 0.015, 0.030] {
        let spec = NoiseSpec::new(x, 2, 2.25).unwrap();
        x_rates.push(ground_state_overlap_rate(&p10, &spec, samples, seed).unwrap().p_g);
    }
    for w in x_rates.windows(2) {
        let tol = 5.0 * (sigma(w[0]).powi(2) + sigma(w[1]).powi(2)).sqrt();
        ok &= w[1] <= w[0] + tol;
    }

    // Size sweep over the gap >= 1.0 systems; fitted log-slope negative.
    let configs: &[(usize, usize, u32, f64)] = &[
        (10, 4, 2, 2.25),
        (12, 4, 3, 2.25),
        (12, 6, 3, 2.75),
        (13, 8, 3, 2.75),
        (14, 8, 3, 3.00),
        (16, 7, 3, 3.00),
    ];
    let systems: Vec<NSweepSystem> = configs
        .iter()
        .map(|&(n, n_h, k, j_cs)| {
            let (_, model) = system(n, n_h);
            NSweepSystem {
                id: format!("T{n}_nh{n_h}"),
                n,
                problem: qubo_to_ising(&to_qubo(&model)),
                spec: NoiseSpec::new(0.015, k, j_cs).unwrap(),
            }
        })
        .collect();
    let (n_rows, slope) = n_sweep(&systems, samples, seed).unwrap();
    let slope = slope.expect("more than one usable point");
    ok &= slope < 0.0;
    let n_detail: Vec<String> =
        n_rows.iter().map(|r| format!("{:.4}", r.p_g)).collect();
    report(
        7,
        ok,
        &format!(
            "jcs sweep p_g = [{}], x sweep p_g = [{:.4}, {:.4}, {:.4}], n sweep p_g = [{}], slope = {slope:.4}",
            jcs_detail.join(", "),
            x_rates[0],
            x_rates[1],
            x_rates[2],
            n_detail.join(", ")
        ),
    );
}

// Criterion 8: the component-knapsack oracle equals brute-force composition
// enumeration for every structure with N <= 12 and every N_H.
#[test]
fn criterion_08_oracle_equivalence() {
    let mut total = 0u64;
    for n in 1..=12usize {
        let set = structure_set(n, 16).unwrap();
        let failures: u64 = (0..set.count() as u32)
            .into_par_iter()
            .map(|idx| {
                let cmap = set.structure(idx).contact_map();
                // One pass over all masks, bucketed by composition.
                let mut best = vec![i64::MAX; n + 1];
                let mut count = vec![0u128; n + 1];
                for mask in 0u64..1 << n {
                    let k = mask.count_ones() as usize;
                    let e = hp_energy(&cmap, &HpSequence::from_bits(n, mask)).unwrap();
                    if e < best[k] {
                        best[k] = e;
                        count[k] = 1;
                    } else if e == best[k] {
                        count[k] += 1;
                    }
                }
                let mut bad = 0u64;
                for n_h in 0..=n {
                    let sol = min_ehp_oracle(&cmap, n_h, false).unwrap();
                    if sol.min_ehp != best[n_h] || sol.degeneracy != count[n_h] {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        assert_eq!(failures, 0, "oracle mismatch at n={n}");
        total += set.count() as u64 * (n as u64 + 1);
    }
    report(8, true, &format!("{total} (structure, composition) cases, exact"));
}

// Criterion 9: hybrid-scale runs are out of scope; substituted by SA-vs-exact
// ground-energy agreement (>= 9/10 restarts at 1e5 steps) on every N <= 16
// system, plus SA determinism per seed.
#[test]
fn criterion_09_sa_agreement() {
    let rows: &[(usize, usize)] = &[
        (8, 4),
        (10, 4),
        (11, 5),
        (12, 4),
        (12, 6),
        (13, 6),
        (13, 8),
        (14, 6),
        (14, 8),
        (15, 5),
        (15, 6),
        (16, 6),
        (16, 7),
        (16, 8),
    ];
    let params = SaParams::default(); // 10 restarts, 1e5 steps
    let mut ok = true;
    let mut worst = 10usize;
    for &(n, n_h) in rows {
        let (_, model) = system(n, n_h);
        let exact = spectrum(&qubo_to_ising(&to_qubo(&model))).unwrap().ground_energy;
        let out = sa_minimize(&model, &params, 2024);
        let hits = out.restart_bests.iter().filter(|(_, e)| *e == exact).count();
        ok &= hits >= 9 && out.best_energy == exact;
        worst = worst.min(hits);
        // determinism per seed
        let again = sa_minimize(&model, &params, 2024);
        ok &= again == out;
    }
    report(9, ok, &format!("14 systems, worst hit count {worst}/10, reruns identical"));
}

// Criterion 10: seeded commands are byte-reproducible at any thread count.
#[test]
fn criterion_10_cli_determinism() {
    let dir = std::env::temp_dir().join(format!("hpqa_acceptance_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_hpqa");
    let run = |name: &str, threads: &str, args: &[&str]| -> Vec<u8> {
        let out = dir.join(name);
        let status = Command::new(bin)
            .args(args)
            .arg("--threads")
            .arg(threads)
            .arg("--out")
            .arg(&out)
            .status()
            .expect("spawn hpqa");
        assert!(status.success(), "command failed: {args:?}");
        std::fs::read(&out).unwrap()
    };
    let design_args =
        ["design", "--target-n", "10", "--nh", "4", "--lambda", "1.1", "--solver", "sa", "--budget", "5", "--seed", "11"];
    let noise_args = [
        "noise", "--target-n", "10", "--nh", "4", "--lambda", "1.1", "--x", "0.015", "--k", "2",
        "--jcs", "2.25", "--samples", "2000", "--seed", "7",
    ];
    let sim_args = [
        "simulate", "--target-n", "8", "--nh", "4", "--lambda", "1.1", "--tf", "10", "--eps",
        "0.02", "--reads", "50", "--seed", "3",
    ];
    let enum_args = ["enumerate", "--n", "10", "--designability"];
    let mut ok = true;
    for (name, args) in [
        ("design.json", &design_args[..]),
        ("noise.csv", &noise_args[..]),
        ("sim.json", &sim_args[..]),
        ("databank.csv", &enum_args[..]),
    ] {
        let a = run(name, "1", args);
        let b = run(name, "2", args);
        let c = run(name, "1", args); // rerun with the manifest's parameters
        ok &= a == b && a == c;
    }
    std::fs::remove_dir_all(&dir).ok();
    report(10, ok, "design/noise/simulate/enumerate byte-identical across threads and reruns");
}
