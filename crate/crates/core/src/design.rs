//! The end-to-end two-step design procedure: minimize the design energy over
//! sequences at fixed composition, then filter the minimizers by their
//! ability to fold to the target.
//!
//! Three interchangeable sequence optimizers are provided: an exact spectrum
//! scan, classical simulated annealing (the stand-in for a hybrid
//! quantum-classical solver at sizes beyond the exact cap), and sampling a
//! simulated quantum anneal. Every candidate an optimizer returns is checked
//! against the composition oracle; candidates above the oracle minimum are
//! reported separately, never as solutions.

use crate::anneal::{evolve, sample_bitstrings, AnnealSchedule, Driver, IntegratorConfig, SIM_MAX_N};
use crate::enumerate::{fold_sequence, min_ehp_oracle, FoldResult, MinEhpSolution};
use crate::error::{Error, Result};
use crate::ising::{qubo_to_ising, spectrum, to_qubo, SPECTRUM_MAX_N};
use crate::lattice::{hp_energy, DesignEnergyModel, HpSequence, LatticeStructure};
use crate::rational::{format_rat, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::Serializer;
use serde::Serialize;

/// Which engine performs the sequence-space minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Exhaustive exact scan of all `2^n` sequences (n <= 24).
    Exact,
    /// Classical simulated annealing restarts.
    Sa,
    /// Simulated quantum anneal plus sampling (n <= 20).
    Schrodinger,
}

impl SolverChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverChoice::Exact => "exact",
            SolverChoice::Sa => "sa",
            SolverChoice::Schrodinger => "schrodinger",
        }
    }
}

impl Serialize for SolverChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Classification of one candidate after exact folding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Folds uniquely, and the ground state is the target.
    UniqueGs,
    /// The target shares the minimum with other structures.
    DegenerateGs,
    /// Some other structure has strictly lower energy.
    BetterElsewhere,
    /// Folding exceeded the enumeration limit; no verdict guessed.
    Unverified,
}

/// One classified candidate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignVerdict {
    pub sequence: HpSequence,
    #[serde(rename = "ehp")]
    pub ehp_in_target: i64,
    pub verdict: Verdict,
    /// Folding evidence (not serialized into reports).
    #[serde(skip)]
    pub fold: Option<FoldResult>,
}

/// A sequence returned by a solver but rejected by the oracle check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectedSequence {
    pub sequence: HpSequence,
    pub ehp: i64,
}

fn ser_rat<S: Serializer>(v: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(v))
}

/// Full outcome of a design run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub target_moves: String,
    pub n: usize,
    pub n_h: usize,
    #[serde(serialize_with = "ser_rat")]
    pub lambda: Rat,
    pub solver: SolverChoice,
    pub oracle_min_ehp: i64,
    pub oracle_degeneracy: u128,
    pub candidates: Vec<DesignVerdict>,
    pub rejected: Vec<RejectedSequence>,
}

impl DesignReport {
    pub fn count_verdict(&self, v: Verdict) -> usize {
        self.candidates.iter().filter(|c| c.verdict == v).count()
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Simulated-annealing controls: single-bit flips and composition-preserving
/// H/P swaps in equal proportion, geometric cooling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaParams {
    pub restarts: u64,
    pub steps: u64,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { restarts: 10, steps: 100_000, t_start: 2.0, t_end: 0.02 }
    }
}

/// Outcome of a set of annealing restarts.
#[derive(Clone, Debug, PartialEq)]
pub struct SaOutcome {
    pub best_energy: Rat,
    /// Distinct sequences attaining the best energy, ascending by text.
    pub best_sequences: Vec<HpSequence>,
    /// Best sequence and energy of each restart, in restart order.
    pub restart_bests: Vec<(HpSequence, Rat)>,
}

struct SaInstance {
    n: usize,
    n_h_target: i64,
    /// integer scale: energies are stored as `denom(lambda) * E`
    scale: i64,
    lambda_num: i64,
    neighbors: Vec<Vec<u8>>,
}

impl SaInstance {
    fn new(model: &DesignEnergyModel) -> SaInstance {
        let n = model.n();
        let mut neighbors: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &(i, j) in model.cmap().contacts() {
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        SaInstance {
            n,
            n_h_target: model.n_h() as i64,
            scale: *model.lambda().denom(),
            lambda_num: *model.lambda().numer(),
            neighbors,
        }
    }

    fn h_neighbors(&self, bits: u64, site: usize) -> i64 {
        self.neighbors[site].iter().filter(|&&j| (bits >> j) & 1 == 1).count() as i64
    }

    fn energy_scaled(&self, bits: u64) -> i64 {
        let mut hh = 0i64;
        for i in 0..self.n {
            if (bits >> i) & 1 == 1 {
                hh += self.neighbors[i].iter().filter(|&&j| j as usize > i && (bits >> j) & 1 == 1).count() as i64;
            }
        }
        let dev = bits.count_ones() as i64 - self.n_h_target;
        -self.scale * hh + self.lambda_num * dev * dev
    }

    /// Energy change of flipping `site`, scaled.
    fn flip_delta(&self, bits: u64, site: usize) -> i64 {
        let d_hh = self.h_neighbors(bits, site);
        let nh = bits.count_ones() as i64;
        let (contact, nh_new) = if (bits >> site) & 1 == 1 {
            (self.scale * d_hh, nh - 1)
        } else {
            (-self.scale * d_hh, nh + 1)
        };
        let dev_old = nh - self.n_h_target;
        let dev_new = nh_new - self.n_h_target;
        contact + self.lambda_num * (dev_new * dev_new - dev_old * dev_old)
    }

    /// Energy change of swapping H at `i` with P at `j`, scaled.
    fn swap_delta(&self, bits: u64, i: usize, j: usize) -> i64 {
        let remove = self.scale * self.h_neighbors(bits, i);
        let adjust = if self.neighbors[j].contains(&(i as u8)) { 1 } else { 0 };
        let add = -self.scale * (self.h_neighbors(bits, j) - adjust);
        remove + add
    }
}

/// Positions of H and P beads with O(1) flips, for uniform move proposals.
struct SiteLists {
    h: Vec<u8>,
    p: Vec<u8>,
    /// (is_h, index within its list) per site
    loc: Vec<(bool, u32)>,
}

impl SiteLists {
    fn new(n: usize, bits: u64) -> SiteLists {
        let mut lists = SiteLists { h: Vec::new(), p: Vec::new(), loc: vec![(false, 0); n] };
        for site in 0..n {
            if (bits >> site) & 1 == 1 {
                lists.loc[site] = (true, lists.h.len() as u32);
                lists.h.push(site as u8);
            } else {
                lists.loc[site] = (false, lists.p.len() as u32);
                lists.p.push(site as u8);
            }
        }
        lists
    }

    fn flip(&mut self, site: usize) {
        let (was_h, idx) = self.loc[site];
        let (from, to) = if was_h {
            (&mut self.h, &mut self.p)
        } else {
            (&mut self.p, &mut self.h)
        };
        let moved = *from.last().unwrap();
        from.swap_remove(idx as usize);
        if (moved as usize) != site {
            self.loc[moved as usize].1 = idx;
        }
        self.loc[site] = (!was_h, to.len() as u32);
        to.push(site as u8);
    }
}

fn sa_restart(inst: &SaInstance, params: &SaParams, seed: u64, restart: u64) -> (u64, i64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    let n = inst.n;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut bits: u64 = rng.gen::<u64>() & mask;
    let mut lists = SiteLists::new(n, bits);
    let mut e = inst.energy_scaled(bits);
    let mut best_bits = bits;
    let mut best_e = e;
    let cooling = (params.t_end / params.t_start).powf(1.0 / (params.steps.max(2) - 1) as f64);
    let mut temp = params.t_start;
    for _ in 0..params.steps {
        let use_swap = rng.gen_bool(0.5) && !lists.h.is_empty() && !lists.p.is_empty();
        if use_swap {
            let i = lists.h[rng.gen_range(0..lists.h.len())] as usize;
            let j = lists.p[rng.gen_range(0..lists.p.len())] as usize;
            let delta = inst.swap_delta(bits, i, j);
            if delta <= 0
                || rng.gen::<f64>() < (-(delta as f64) / (inst.scale as f64 * temp)).exp()
            {
                bits ^= (1 << i) | (1 << j);
                lists.flip(i);
                lists.flip(j);
                e += delta;
            }
        } else {
            let site = rng.gen_range(0..n);
            let delta = inst.flip_delta(bits, site);
            if delta <= 0
                || rng.gen::<f64>() < (-(delta as f64) / (inst.scale as f64 * temp)).exp()
            {
                bits ^= 1 << site;
                lists.flip(site);
                e += delta;
            }
        }
        if e < best_e {
            best_e = e;
            best_bits = bits;
        }
        temp *= cooling;
    }
    (best_bits, best_e)
}

/// Metropolis annealing over sequences; deterministic per seed, restarts are
/// independent counter-seeded streams.
pub fn sa_minimize(model: &DesignEnergyModel, params: &SaParams, seed: u64) -> SaOutcome {
    let inst = SaInstance::new(model);
    let bests: Vec<(u64, i64)> = (0..params.restarts)
        .into_par_iter()
        .map(|r| sa_restart(&inst, params, seed, r))
        .collect();
    let scale = inst.scale;
    let to_rat = |e: i64| Rat::new(e, scale);
    let global = bests.iter().map(|&(_, e)| e).min().expect("at least one restart");
    let mut best_sequences: Vec<HpSequence> = bests
        .iter()
        .filter(|&&(_, e)| e == global)
        .map(|&(b, _)| HpSequence::from_bits(inst.n, b))
        .collect();
    best_sequences.sort_by_key(|s| s.to_string());
    best_sequences.dedup();
    SaOutcome {
        best_energy: to_rat(global),
        best_sequences,
        restart_bests: bests
            .into_iter()
            .map(|(b, e)| (HpSequence::from_bits(inst.n, b), to_rat(e)))
            .collect(),
    }
}

/// Raw solver output split by the oracle check.
#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub oracle: MinEhpSolution,
    /// Sequences at the oracle minimum with the requested composition.
    pub candidates: Vec<HpSequence>,
    /// Solver output above the oracle minimum (or off-composition), flagged.
    pub rejected: Vec<RejectedSequence>,
}

/// Minimize the design energy over sequences for `target` at composition
/// `n_h`, with the chosen solver and budget (restarts for SA, reads for the
/// Schrödinger sampler; ignored by the exact scan).
pub fn optimize_sequences(
    target: &LatticeStructure,
    n_h: usize,
    lambda: Rat,
    solver: SolverChoice,
    budget: u64,
    seed: u64,
) -> Result<OptimizeOutcome> {
    let cmap = target.contact_map();
    let n = cmap.n();
    let oracle = min_ehp_oracle(&cmap, n_h, false)?;
    let model = DesignEnergyModel::new(cmap.clone(), lambda, n_h)?;
    let raw: Vec<HpSequence> = match solver {
        SolverChoice::Exact => {
            if n > SPECTRUM_MAX_N {
                return Err(Error::SolverCapExceeded { n, cap: SPECTRUM_MAX_N, solver: "exact" });
            }
            let spec = spectrum(&qubo_to_ising(&to_qubo(&model)))?;
            spec.ground_states.iter().map(|&b| HpSequence::from_bits(n, b)).collect()
        }
        SolverChoice::Sa => {
            let params = SaParams { restarts: budget.max(1), ..SaParams::default() };
            sa_minimize(&model, &params, seed).best_sequences
        }
        SolverChoice::Schrodinger => {
            if n > SIM_MAX_N {
                return Err(Error::SolverCapExceeded { n, cap: SIM_MAX_N, solver: "schrodinger" });
            }
            let state = evolve(
                &qubo_to_ising(&to_qubo(&model)),
                &Driver::x(),
                &AnnealSchedule::default(),
                &IntegratorConfig::default(),
                Some(n_h),
            )?;
            let mut reads = sample_bitstrings(&state, budget.max(1) as usize, seed);
            reads.sort_unstable();
            reads.dedup();
            reads.into_iter().map(|b| HpSequence::from_bits(n, b)).collect()
        }
    };
    let mut candidates = Vec::new();
    let mut rejected = Vec::new();
    for seq in raw {
        let ehp = hp_energy(&cmap, &seq)?;
        if seq.n_h() == n_h && ehp == oracle.min_ehp {
            candidates.push(seq);
        } else {
            rejected.push(RejectedSequence { sequence: seq, ehp });
        }
    }
    candidates.sort_by_key(|s| s.to_string());
    candidates.dedup();
    rejected.sort_by_key(|r| r.sequence.to_string());
    rejected.dedup();
    Ok(OptimizeOutcome { oracle, candidates, rejected })
}

/// Fold every candidate exactly and classify it against the target.
pub fn filter_by_folding(
    candidates: &[HpSequence],
    target: &LatticeStructure,
    fold_limit: usize,
) -> Result<Vec<DesignVerdict>> {
    let target_canonical = target.canonicalize().moves_string();
    let cmap = target.contact_map();
    let verdicts: Result<Vec<DesignVerdict>> = candidates
        .par_iter()
        .map(|seq| {
            let ehp_in_target = hp_energy(&cmap, seq)?;
            match fold_sequence(seq, fold_limit) {
                Ok(fold) => {
                    let verdict = if fold.min_ehp < ehp_in_target {
                        Verdict::BetterElsewhere
                    } else if fold.unique && fold.ground_states[0] == target_canonical {
                        Verdict::UniqueGs
                    } else {
                        Verdict::DegenerateGs
                    };
                    Ok(DesignVerdict { sequence: *seq, ehp_in_target, verdict, fold: Some(fold) })
                }
                Err(Error::LimitExceeded { .. }) => Ok(DesignVerdict {
                    sequence: *seq,
                    ehp_in_target,
                    verdict: Verdict::Unverified,
                    fold: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect();
    verdicts
}

/// The full two-step pipeline with oracle annotations.
pub fn design(
    target: &LatticeStructure,
    n_h: usize,
    lambda: Rat,
    solver: SolverChoice,
    budget: u64,
    seed: u64,
    fold_limit: usize,
) -> Result<DesignReport> {
    let target = target.canonicalize();
    let outcome = optimize_sequences(&target, n_h, lambda, solver, budget, seed)?;
    let candidates = filter_by_folding(&outcome.candidates, &target, fold_limit)?;
    Ok(DesignReport {
        target_moves: target.moves_string(),
        n: target.n(),
        n_h,
        lambda,
        solver,
        oracle_min_ehp: outcome.oracle.min_ehp,
        oracle_degeneracy: outcome.oracle.degeneracy,
        candidates,
        rejected: outcome.rejected,
    })
}
