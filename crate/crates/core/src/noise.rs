//! Control-error model: Gaussian perturbations of the logical problem
//! Hamiltonian, the fraction of perturbations that preserve its ground
//! state, and the chain-strength / system-size sweeps built on it.
//!
//! Noise is applied to the unrescaled logical fields and couplers with
//! `sigma_h = x max|h_i| / sqrt(k)` and `sigma_J = x J_cs`, where `k` is the
//! number of physical qubits per logical qubit and `J_cs` the chain
//! strength; the chain strength enters the simulation only through
//! `sigma_J`. Every field and every pair coupler receives an independent
//! draw. Sampling is counter-based: sample `m` of an ensemble reads stream
//! `m` of a ChaCha generator seeded with the ensemble seed, so results do
//! not depend on scheduling or thread count.

use crate::error::{Error, Result};
use crate::ising::{spectrum, IsingProblem};
use crate::rational::rat_to_f64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

/// Exhaustive perturbed-minimizer scans refuse above this many spins.
pub const NOISE_MAX_N: usize = 24;
/// Default relative noise strength.
pub const DEFAULT_NOISE_X: f64 = 0.015;
/// Energy tolerance for collecting ties in the perturbed scan.
const TIE_TOL: f64 = 1e-12;
/// Direct energy recomputation interval of the Gray-code scan.
const RESYNC: u64 = 1 << 12;

/// Control-noise parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    /// Relative noise strength.
    pub x: f64,
    /// Physical qubits per logical qubit.
    pub k: u32,
    /// Chain strength.
    pub j_cs: f64,
}

impl NoiseSpec {
    pub fn new(x: f64, k: u32, j_cs: f64) -> Result<NoiseSpec> {
        if !(x >= 0.0) {
            return Err(Error::NonpositiveParameter { name: "x" });
        }
        if k < 1 {
            return Err(Error::NonpositiveParameter { name: "k" });
        }
        if !(j_cs > 0.0) {
            return Err(Error::NonpositiveParameter { name: "j_cs" });
        }
        Ok(NoiseSpec { x, k, j_cs })
    }
}

/// `(sigma_h, sigma_J)` for a problem whose largest absolute field is `max_abs_h`.
pub fn noise_sigmas(spec: &NoiseSpec, max_abs_h: f64) -> (f64, f64) {
    (spec.x * max_abs_h / (spec.k as f64).sqrt(), spec.x * spec.j_cs)
}

/// A perturbed Hamiltonian. Floating point by construction; the offset is
/// untouched and irrelevant for minimizer identity.
#[derive(Clone, Debug)]
pub struct PerturbedHamiltonian {
    pub n: usize,
    pub h: Vec<f64>,
    /// Upper-triangular couplers in row-major `(i, j)` order, `i < j`.
    pub j: Vec<f64>,
}

fn base_f64(problem: &IsingProblem) -> (Vec<f64>, Vec<f64>) {
    let h: Vec<f64> = problem.fields().iter().map(rat_to_f64).collect();
    let j: Vec<f64> = problem.couplers().iter().map(rat_to_f64).collect();
    (h, j)
}

fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

/// Draw one perturbed Hamiltonian: i.i.d. Gaussian `delta h_i`, `delta J_ij`
/// added to every logical field and pair coupler. Deterministic per
/// `(seed, sample)`.
pub fn perturb(
    problem: &IsingProblem,
    spec: &NoiseSpec,
    seed: u64,
    sample: u64,
) -> PerturbedHamiltonian {
    let (mut h, mut j) = base_f64(problem);
    let (sigma_h, sigma_j) = noise_sigmas(spec, rat_to_f64(&problem.max_abs_field()));
    let mut rng = sample_rng(seed, sample);
    if sigma_h > 0.0 {
        let normal = Normal::new(0.0, sigma_h).expect("sigma_h finite");
        for v in &mut h {
            *v += normal.sample(&mut rng);
        }
    } else {
        // Keep the draw order stable so sigma_h = 0 consumes the same stream.
        for _ in &h {
            let _: f64 = Normal::new(0.0, 1.0).unwrap().sample(&mut rng);
        }
    }
    if sigma_j > 0.0 {
        let normal = Normal::new(0.0, sigma_j).expect("sigma_j finite");
        for v in &mut j {
            *v += normal.sample(&mut rng);
        }
    }
    PerturbedHamiltonian { n: problem.n(), h, j }
}

/// All minimizers of the perturbed energy within an absolute tie tolerance,
/// by exhaustive scan (Gray-code deltas, periodically resynchronized).
pub fn perturbed_minimizers(p: &PerturbedHamiltonian) -> Vec<u64> {
    let n = p.n;
    let mut jm = vec![0.0f64; n * n];
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            jm[i * n + j] = p.j[idx];
            jm[j * n + i] = p.j[idx];
            idx += 1;
        }
    }
    let mut sigma = vec![-1.0f64; n];
    let energy_of = |sigma: &[f64]| {
        let mut e = 0.0;
        for i in 0..n {
            e += p.h[i] * sigma[i];
            for j in i + 1..n {
                e += jm[i * n + j] * sigma[i] * sigma[j];
            }
        }
        e
    };
    let mut e = energy_of(&sigma);
    let mut state = 0u64;
    let mut best = e;
    let mut candidates: Vec<(u64, f64)> = vec![(0, e)];
    for t in 1u64..1u64 << n {
        let b = t.trailing_zeros() as usize;
        state ^= 1 << b;
        if t % RESYNC == 0 {
            for i in 0..n {
                sigma[i] = if (state >> i) & 1 == 1 { 1.0 } else { -1.0 };
            }
            e = energy_of(&sigma);
        } else {
            let mut local = p.h[b];
            let row = &jm[b * n..(b + 1) * n];
            for j in 0..n {
                local += row[j] * sigma[j];
            }
            e -= 2.0 * sigma[b] * local;
            sigma[b] = -sigma[b];
        }
        if e < best + TIE_TOL {
            best = best.min(e);
            candidates.push((state, e));
            if candidates.len() > 64 {
                candidates.retain(|&(_, ce)| ce <= best + TIE_TOL);
            }
        }
    }
    let mut out: Vec<u64> = candidates
        .into_iter()
        .filter(|&(_, ce)| ce <= best + TIE_TOL)
        .map(|(s, _)| s)
        .collect();
    out.sort_unstable();
    out
}

/// Outcome of one control-noise ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseEnsembleResult {
    pub samples: u64,
    pub successes: u64,
    pub p_g: f64,
    pub seed: u64,
    pub spec: NoiseSpec,
}

impl NoiseEnsembleResult {
    /// Half-width of the 95% binomial confidence interval.
    pub fn ci95(&self) -> f64 {
        1.96 * (self.p_g * (1.0 - self.p_g) / self.samples as f64).sqrt()
    }
}

/// Fraction of perturbed Hamiltonians whose minimizer set is contained in
/// the unperturbed ground set. The unperturbed set comes from the exact
/// rational spectrum; the perturbed scans run in floating point.
pub fn ground_state_overlap_rate(
    problem: &IsingProblem,
    spec: &NoiseSpec,
    samples: u64,
    seed: u64,
) -> Result<NoiseEnsembleResult> {
    if problem.n() > NOISE_MAX_N {
        return Err(Error::TooLarge { n: problem.n(), limit: NOISE_MAX_N });
    }
    if samples < 1 {
        return Err(Error::NonpositiveParameter { name: "samples" });
    }
    let ground = spectrum(problem)?.ground_states;
    let successes: u64 = (0..samples)
        .into_par_iter()
        .map(|m| {
            let perturbed = perturb(problem, spec, seed, m);
            let minimizers = perturbed_minimizers(&perturbed);
            let ok = minimizers.iter().all(|s| ground.binary_search(s).is_ok());
            ok as u64
        })
        .sum();
    Ok(NoiseEnsembleResult {
        samples,
        successes,
        p_g: successes as f64 / samples as f64,
        seed,
        spec: *spec,
    })
}

/// One ensemble per chain strength; `sigma_J = x J_cs` grows along the list.
pub fn jcs_sweep(
    problem: &IsingProblem,
    x: f64,
    k: u32,
    jcs_list: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<NoiseEnsembleResult>> {
    jcs_list
        .iter()
        .map(|&j_cs| {
            let spec = NoiseSpec::new(x, k, j_cs)?;
            ground_state_overlap_rate(problem, &spec, samples, seed)
        })
        .collect()
}

/// One system of a size sweep.
pub struct NSweepSystem {
    pub id: String,
    pub n: usize,
    pub problem: IsingProblem,
    pub spec: NoiseSpec,
}

/// Overlap rate per system plus the least-squares slope of `ln p_g` against
/// `n` over systems with `p_g > 0`; `None` with fewer than two usable points.
pub fn n_sweep(
    systems: &[NSweepSystem],
    samples: u64,
    seed: u64,
) -> Result<(Vec<NoiseEnsembleResult>, Option<f64>)> {
    let mut rows = Vec::with_capacity(systems.len());
    for sys in systems {
        rows.push(ground_state_overlap_rate(&sys.problem, &sys.spec, samples, seed)?);
    }
    let points: Vec<(f64, f64)> = systems
        .iter()
        .zip(&rows)
        .filter(|(_, r)| r.p_g > 0.0)
        .map(|(s, r)| (s.n as f64, r.p_g.ln()))
        .collect();
    Ok((rows, log_slope(&points)))
}

/// Least-squares slope of `y` against `x`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
