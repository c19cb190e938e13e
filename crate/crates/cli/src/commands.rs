//! Subcommand implementations.

use crate::output::{self, CsvWriter, ManifestBuilder};
use crate::{ChiArgs, Cli, DesignArgs, EnumerateArgs, NoiseArgs, SimulateArgs, TargetArgs};
use hpqa_core::anneal::{
    evolve, evolve_observed, ground_state_probability, sample_bitstrings, AnnealSchedule, Driver,
    DriverSign, IntegratorConfig,
};
use hpqa_core::design::{design, SolverChoice};
use hpqa_core::enumerate::{
    designability, most_designable, structure_set, DEFAULT_DESIGNABILITY_LIMIT, DEFAULT_ENUM_LIMIT,
};
use hpqa_core::error::{Error, Result};
use hpqa_core::io;
use hpqa_core::ising::{qubo_to_ising, spectrum, to_qubo, IsingProblem};
use hpqa_core::lattice::{DesignEnergyModel, HpSequence, LatticeStructure};
use hpqa_core::noise::{ground_state_overlap_rate, log_slope, NoiseSpec};
use hpqa_core::rational::{format_rat, parse_rat, Rat};
use serde::Serialize;
use std::collections::HashMap;
use std::process::ExitCode;

type CmdResult = Result<ExitCode>;

fn load_target(t: &TargetArgs) -> Result<(LatticeStructure, String)> {
    if let Some(path) = &t.structure {
        let (s, _) = io::read_structure_file(path)?;
        Ok((s.canonicalize(), path.display().to_string()))
    } else if let Some(n) = t.target_n {
        Ok((most_designable(n, t.designability_limit)?, format!("T{n}")))
    } else {
        Err(Error::Parse("need --structure or --target-n".into()))
    }
}

fn parse_solver(text: &str) -> Result<SolverChoice> {
    match text {
        "exact" => Ok(SolverChoice::Exact),
        "sa" => Ok(SolverChoice::Sa),
        "schrodinger" => Ok(SolverChoice::Schrodinger),
        _ => Err(Error::Parse(format!("unknown solver '{text}'"))),
    }
}

fn parse_driver(kind: &str, sign: Option<&str>) -> Result<Driver> {
    let driver = match kind {
        "x" => Driver::x(),
        "xy" => Driver::xy(),
        _ => return Err(Error::Parse(format!("unknown driver '{kind}'"))),
    };
    match sign {
        None => Ok(driver),
        Some("plus") => Ok(driver.with_sign(DriverSign::Plus)),
        Some("minus") => Ok(driver.with_sign(DriverSign::Minus)),
        Some(other) => Err(Error::Parse(format!("unknown driver sign '{other}'"))),
    }
}

fn ising_for(target: &LatticeStructure, n_h: usize, lambda: Rat) -> Result<IsingProblem> {
    let model = DesignEnergyModel::new(target.contact_map(), lambda, n_h)?;
    Ok(qubo_to_ising(&to_qubo(&model)))
}

pub(crate) fn cmd_enumerate(cli: &Cli, args: &EnumerateArgs) -> CmdResult {
    let limit = args.limit.unwrap_or(if args.designability {
        DEFAULT_DESIGNABILITY_LIMIT
    } else {
        DEFAULT_ENUM_LIMIT
    });
    let mut manifest = ManifestBuilder::new("enumerate", cli.threads);
    manifest
        .param("n", args.n)
        .param("designability", args.designability)
        .param("limit", limit)
        .output(&args.out);
    let mut csv = CsvWriter::new(&["canonical_moves", "designability_count"]);
    if args.designability {
        for rec in designability(args.n, limit)? {
            csv.row(&[rec.moves, rec.count.to_string()]);
        }
    } else {
        let set = structure_set(args.n, limit)?;
        for moves in set.iter_moves() {
            csv.row(&[moves, String::new()]);
        }
    }
    csv.finish(&args.out)?;
    manifest.write()?;
    Ok(ExitCode::SUCCESS)
}

pub(crate) fn cmd_design(cli: &Cli, args: &DesignArgs) -> CmdResult {
    let seed = output::resolve_seed(args.seed);
    let lambda = parse_rat(&args.lambda)?;
    let solver = parse_solver(&args.solver)?;
    let (target, target_desc) = load_target(&args.target)?;
    let report = design(&target, args.nh, lambda, solver, args.budget, seed, args.fold_limit)?;
    io::write_string(&args.out, &report.to_json_string())?;
    let mut manifest = ManifestBuilder::new("design", cli.threads);
    manifest
        .seed(seed)
        .param("target", &target_desc)
        .param("target_moves", report.target_moves.clone())
        .param("nh", args.nh)
        .param("lambda", format_rat(&lambda))
        .param("solver", solver.as_str())
        .param("budget", args.budget)
        .param("fold_limit", args.fold_limit)
        .output(&args.out);
    manifest.write()?;
    if report.candidates.is_empty() {
        eprintln!(
            "no sequence reached the oracle minimum E_HP = {} (budget exhausted)",
            report.oracle_min_ehp
        );
        return Ok(ExitCode::from(3));
    }
    println!(
        "{}: {} candidate(s) at E_HP = {}; verdicts written to {}",
        target_desc,
        report.candidates.len(),
        report.oracle_min_ehp,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SimulateReport {
    target_moves: String,
    n: usize,
    n_h: usize,
    lambda: String,
    driver: String,
    t_f: f64,
    eps_requested: f64,
    eps_effective: f64,
    steps: usize,
    p_g: f64,
    final_norm: f64,
    subspace_leak: f64,
    ground_energy: String,
    ground_states: Vec<String>,
    reads: Option<Vec<String>>,
}

pub(crate) fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> CmdResult {
    let seed = output::resolve_seed(args.seed);
    let lambda = parse_rat(&args.lambda)?;
    let (problem, target_desc, target_moves) = if let Some(path) = &args.ising {
        (io::read_ising_file(path)?, path.display().to_string(), String::new())
    } else {
        let (target, desc) = load_target(&args.target)?;
        let moves = target.moves_string();
        (ising_for(&target, args.nh, lambda)?, desc, moves)
    };
    let n = problem.n();
    let driver = parse_driver(&args.driver, args.driver_sign.as_deref())?;
    let spec = spectrum(&problem)?;
    let ground = spec.ground_states.clone();
    let schedule = AnnealSchedule::new(args.tf)?;
    let config = IntegratorConfig { eps: args.eps, ..Default::default() };
    let steps = (args.tf / args.eps).ceil().max(1.0) as usize;
    let eps_effective = args.tf / steps as f64;

    let mut trace: Option<CsvWriter> = args
        .trace
        .as_ref()
        .map(|_| CsvWriter::new(&["t", "norm", "p_g", "subspace_leak"]));
    let n_h = args.nh;
    let state = if let Some(csv) = trace.as_mut() {
        evolve_observed(&problem, &driver, &schedule, &config, Some(n_h), |s| {
            csv.row(&[
                s.t.to_string(),
                s.norm().to_string(),
                s.probability_of(&ground).to_string(),
                s.weight_leak(n_h).to_string(),
            ]);
        })?
    } else {
        evolve(&problem, &driver, &schedule, &config, Some(n_h))?
    };
    let p_g = ground_state_probability(&state, &ground)?;
    let reads = args.reads.map(|count| {
        sample_bitstrings(&state, count, seed)
            .into_iter()
            .map(|b| HpSequence::from_bits(n, b).to_string())
            .collect::<Vec<_>>()
    });
    let report = SimulateReport {
        target_moves: target_moves.clone(),
        n,
        n_h,
        lambda: format_rat(&lambda),
        driver: args.driver.clone(),
        t_f: args.tf,
        eps_requested: args.eps,
        eps_effective,
        steps,
        p_g,
        final_norm: state.norm(),
        subspace_leak: state.weight_leak(n_h),
        ground_energy: format_rat(&spec.ground_energy),
        ground_states: spec
            .ground_states
            .iter()
            .map(|&b| HpSequence::from_bits(n, b).to_string())
            .collect(),
        reads,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    io::write_string(&args.out, &text)?;
    let mut manifest = ManifestBuilder::new("simulate", cli.threads);
    manifest
        .seed(seed)
        .param("target", &target_desc)
        .param("target_moves", &target_moves)
        .param("nh", args.nh)
        .param("lambda", format_rat(&lambda))
        .param("driver", &args.driver)
        .param("tf", args.tf)
        .param("eps", args.eps)
        .output(&args.out);
    if let (Some(csv), Some(path)) = (trace, args.trace.as_ref()) {
        csv.finish(path)?;
        manifest.output(path);
    }
    if let Some(r) = args.reads {
        manifest.param("reads", r);
    }
    manifest.write()?;
    println!("P_g({}) = {}", args.tf, p_g);
    Ok(ExitCode::SUCCESS)
}

pub(crate) fn cmd_chi(cli: &Cli, args: &ChiArgs) -> CmdResult {
    let eps_list = output::parse_f64_list(&args.eps_list)?;
    if eps_list.len() < 3 {
        return Err(Error::InsufficientResolutions { got: eps_list.len() });
    }
    let lambda = parse_rat(&args.lambda)?;
    let (problem, target_desc, target_moves) = if let Some(path) = &args.ising {
        (io::read_ising_file(path)?, path.display().to_string(), String::new())
    } else {
        let (target, desc) = load_target(&args.target)?;
        let moves = target.moves_string();
        (ising_for(&target, args.nh, lambda)?, desc, moves)
    };
    let driver = parse_driver(&args.driver, None)?;
    let ground = spectrum(&problem)?.ground_states;
    let schedule = AnnealSchedule::new(args.tf)?;
    // P_g depends on eps only through the step count; cache on it.
    let mut cache: HashMap<usize, f64> = HashMap::new();
    let mut pg_for = |eps: f64| -> Result<f64> {
        let steps = (args.tf / eps).ceil().max(1.0) as usize;
        if let Some(&p) = cache.get(&steps) {
            return Ok(p);
        }
        let state = evolve(
            &problem,
            &driver,
            &schedule,
            &IntegratorConfig { eps, ..Default::default() },
            Some(args.nh),
        )?;
        let p = ground_state_probability(&state, &ground)?;
        cache.insert(steps, p);
        Ok(p)
    };
    let mut csv = CsvWriter::new(&["eps", "p_g", "chi"]);
    for &eps in &eps_list {
        let p_mid = pg_for(eps)?;
        let p_half = pg_for(eps / 2.0)?;
        let p_double = pg_for(2.0 * eps)?;
        let denom = p_double - p_mid;
        if denom.abs() < 1e-14 {
            return Err(Error::DegenerateDifference);
        }
        let chi = (p_mid - p_half) / denom;
        csv.row(&[eps.to_string(), p_mid.to_string(), chi.to_string()]);
    }
    csv.finish(&args.out)?;
    let mut manifest = ManifestBuilder::new("chi", cli.threads);
    manifest
        .param("target", &target_desc)
        .param("target_moves", &target_moves)
        .param("nh", args.nh)
        .param("lambda", format_rat(&lambda))
        .param("driver", &args.driver)
        .param("tf", args.tf)
        .param("eps_list", &args.eps_list)
        .output(&args.out);
    manifest.write()?;
    Ok(ExitCode::SUCCESS)
}

struct NoiseSystem {
    id: String,
    n: usize,
    n_h: usize,
    problem: IsingProblem,
    k: u32,
    j_cs: f64,
}

fn broadcast<T: Clone>(values: &[T], len: usize, name: &str) -> Result<Vec<T>> {
    if values.len() == len {
        Ok(values.to_vec())
    } else if values.len() == 1 {
        Ok(vec![values[0].clone(); len])
    } else {
        Err(Error::Parse(format!(
            "--{name} expects 1 or {len} comma-separated values, got {}",
            values.len()
        )))
    }
}

pub(crate) fn cmd_noise(cli: &Cli, args: &NoiseArgs) -> CmdResult {
    let seed = output::resolve_seed(args.seed);
    let lambda = parse_rat(&args.lambda)?;
    let nh_list = output::parse_usize_list(&args.nh)?;
    let k_list = output::parse_usize_list(&args.k)?;
    let jcs_list = output::parse_f64_list(&args.jcs)?;
    let sweep = args.sweep.as_deref();
    if !matches!(sweep, None | Some("jcs") | Some("n")) {
        return Err(Error::Parse(format!("unknown sweep '{}'", sweep.unwrap_or_default())));
    }

    // Resolve the system list: ising file > structure file > derived targets.
    let resolved: Vec<(IsingProblem, usize, String)> = if let Some(path) = &args.ising {
        let p = io::read_ising_file(path)?;
        let n = p.n();
        vec![(p, n, path.display().to_string())]
    } else if let Some(path) = &args.structure {
        let (s, _) = io::read_structure_file(path)?;
        let s = s.canonicalize();
        let nh0 = *output::parse_usize_list(&args.nh)?.first().unwrap_or(&0);
        vec![(ising_for(&s, nh0, lambda)?, s.n(), path.display().to_string())]
    } else if let Some(list) = &args.target_n {
        let mut out = Vec::new();
        let ns = output::parse_usize_list(list)?;
        let nhs = broadcast(&output::parse_usize_list(&args.nh)?, ns.len(), "nh")?;
        for (i, &n) in ns.iter().enumerate() {
            let t = most_designable(n, args.designability_limit)?;
            out.push((ising_for(&t, nhs[i], lambda)?, t.n(), format!("T{n}")));
        }
        out
    } else {
        return Err(Error::Parse("need --structure, --target-n or --ising".into()));
    };
    let count = resolved.len();
    let nh_list = broadcast(&nh_list, count, "nh")?;
    let k_list = broadcast(&k_list, count, "k")?;
    let jcs_per_system = if sweep == Some("jcs") {
        if count != 1 {
            return Err(Error::Parse("--sweep jcs expects a single system".into()));
        }
        vec![jcs_list[0]; count]
    } else {
        broadcast(&jcs_list, count, "jcs")?[..].to_vec()
    };

    let mut systems = Vec::with_capacity(count);
    for (i, (problem, n, desc)) in resolved.into_iter().enumerate() {
        systems.push(NoiseSystem {
            id: format!("{}_nh{}", desc, nh_list[i]),
            n,
            n_h: nh_list[i],
            problem,
            k: k_list[i] as u32,
            j_cs: jcs_per_system[i],
        });
    }

    let mut csv = CsvWriter::new(&[
        "system_id", "n", "n_h", "lambda", "x", "k", "j_cs", "samples", "successes", "p_g", "ci95",
    ]);
    let mut manifest = ManifestBuilder::new("noise", cli.threads);
    manifest
        .seed(seed)
        .param("lambda", format_rat(&lambda))
        .param("x", args.x)
        .param("k", &args.k)
        .param("jcs", &args.jcs)
        .param("nh", &args.nh)
        .param("samples", args.samples)
        .param("sweep", args.sweep.clone().unwrap_or_default())
        .output(&args.out);

    let row = |sys: &NoiseSystem, j_cs: f64, r: &hpqa_core::noise::NoiseEnsembleResult,
                   csv: &mut CsvWriter| {
        csv.row(&[
            sys.id.clone(),
            sys.n.to_string(),
            sys.n_h.to_string(),
            format_rat(&lambda),
            args.x.to_string(),
            sys.k.to_string(),
            j_cs.to_string(),
            r.samples.to_string(),
            r.successes.to_string(),
            r.p_g.to_string(),
            r.ci95().to_string(),
        ]);
    };

    match sweep {
        Some("jcs") => {
            let sys = &systems[0];
            for &j_cs in &jcs_list {
                let spec = NoiseSpec::new(args.x, sys.k, j_cs)?;
                let r = ground_state_overlap_rate(&sys.problem, &spec, args.samples, seed)?;
                row(sys, j_cs, &r, &mut csv);
            }
        }
        _ => {
            let mut points = Vec::new();
            for sys in &systems {
                let spec = NoiseSpec::new(args.x, sys.k, sys.j_cs)?;
                let r = ground_state_overlap_rate(&sys.problem, &spec, args.samples, seed)?;
                if r.p_g > 0.0 {
                    points.push((sys.n as f64, r.p_g.ln()));
                }
                row(sys, sys.j_cs, &r, &mut csv);
            }
            if sweep == Some("n") {
                match log_slope(&points) {
                    Some(slope) => {
                        println!("log_slope={slope}");
                        manifest.extra("log_slope", slope);
                    }
                    None => {
                        println!("log_slope=undefined");
                        manifest.extra("log_slope", "undefined");
                    }
                }
            }
        }
    }
    csv.finish(&args.out)?;
    manifest.write()?;
    Ok(ExitCode::SUCCESS)
}
