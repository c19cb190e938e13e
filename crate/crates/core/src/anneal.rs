//! Time-dependent Schrödinger simulation of the annealing Hamiltonian
//! `H(t) = a(t) H_D + b(t) H_P` with a linear schedule (hbar = 1).
//!
//! Each step applies the Crank-Nicolson propagator `(T^dag)^{-1} T` with
//! `T = 1 - (i eps / 2) H_m`, where `H_m` is the midpoint Hamiltonian of the
//! step. The implicit half is solved as `A v = u` with `A = T T^dag` and
//! `u = T^2 psi` by conjugate gradients; `A = 1 + (eps^2/4) H_m^2` is
//! Hermitian positive definite and extremely well conditioned at the step
//! sizes in scope, so a handful of iterations suffices. The propagator is
//! exactly unitary up to the linear-solve tolerance.
//!
//! All Hamiltonian applications are matrix-free: the problem term is a
//! precomputed diagonal of classical Ising energies, the X driver gathers the
//! n single-bit-flip neighbors, and the XY driver gathers the states reached
//! by swapping a pair of unequal bits (which conserves Hamming weight).

use crate::error::{Error, Result};
use crate::ising::{spectrum, IsingProblem};
use crate::rational::rat_to_f64;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// State vectors refuse above this many qubits (2^20 amplitudes).
pub const SIM_MAX_N: usize = 20;

/// Below this dimension the element-wise kernels run serially.
const PAR_MIN_DIM: usize = 1 << 13;
/// Fixed chunk size for deterministic parallel reductions.
const REDUCE_CHUNK: usize = 1 << 12;

/// Which mixer generates transitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriverKind {
    /// `sum_i sigma^x_i`
    X,
    /// `(1/2) sum_{i<j} (sigma^x_i sigma^x_j + sigma^y_i sigma^y_j)`
    Xy,
}

/// Overall sign in front of the driver term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriverSign {
    Plus,
    Minus,
}

/// Driver Hamiltonian specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Driver {
    pub kind: DriverKind,
    pub sign: DriverSign,
}

impl Driver {
    /// Transverse-field driver `+sum sigma^x`; its ground state is the
    /// tensor product of `(|0> - |1>)/sqrt(2)`.
    pub fn x() -> Driver {
        Driver { kind: DriverKind::X, sign: DriverSign::Plus }
    }

    /// XY mixer with a negative overall sign: the uniform superposition of
    /// fixed-weight states is the mixer's sector ground state only under
    /// this sign, so the anneal tracks minima of the problem Hamiltonian.
    pub fn xy() -> Driver {
        Driver { kind: DriverKind::Xy, sign: DriverSign::Minus }
    }

    pub fn with_sign(mut self, sign: DriverSign) -> Driver {
        self.sign = sign;
        self
    }

    fn sign_factor(&self) -> f64 {
        match self.sign {
            DriverSign::Plus => 1.0,
            DriverSign::Minus => -1.0,
        }
    }
}

/// Linear annealing schedule `a(t) = 1 - t/t_f`, `b(t) = t/t_f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub t_f: f64,
}

impl AnnealSchedule {
    pub fn new(t_f: f64) -> Result<AnnealSchedule> {
        if !(t_f > 0.0) {
            return Err(Error::NonpositiveParameter { name: "t_f" });
        }
        Ok(AnnealSchedule { t_f })
    }

    pub fn a(&self, t: f64) -> f64 {
        1.0 - t / self.t_f
    }

    pub fn b(&self, t: f64) -> f64 {
        t / self.t_f
    }
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule { t_f: 20.0 }
    }
}

/// Crank-Nicolson step size and conjugate-gradient controls.
///
/// `t_f` is split into `M = ceil(t_f / eps)` steps with the step size
/// adjusted down to `t_f / M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub eps: f64,
    /// Relative residual target for each linear solve.
    pub cg_tol: f64,
    /// Iteration cap; `None` selects `10 * 2^(n/2) + 100`.
    pub cg_max_iter: Option<usize>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { eps: 0.01, cg_tol: 1e-10, cg_max_iter: None }
    }
}

impl IntegratorConfig {
    pub fn with_eps(eps: f64) -> IntegratorConfig {
        IntegratorConfig { eps, ..Default::default() }
    }

    fn steps_for(&self, t_f: f64) -> Result<(usize, f64)> {
        if !(self.eps > 0.0) {
            return Err(Error::NonpositiveParameter { name: "eps" });
        }
        let m = (t_f / self.eps).ceil().max(1.0) as usize;
        Ok((m, t_f / m as f64))
    }

    fn max_iter(&self, n: usize) -> usize {
        self.cg_max_iter.unwrap_or(10 * (1usize << (n / 2)) + 100)
    }
}

/// Vector of `2^n` complex amplitudes. Bit `i` of a basis index is `s_i`
/// (1 = H), matching the Ising convention `sigma = 2 s - 1`. Evolution
/// preserves unit norm; a bare Hamiltonian application does not.
#[derive(Clone, Debug)]
pub struct QuantumState {
    n: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<QuantumState> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(QuantumState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, basis: u64) -> Complex64 {
        self.amps[basis as usize]
    }

    pub fn norm(&self) -> f64 {
        par_norm_sqr(&self.amps).sqrt()
    }

    /// Total probability of the given basis states.
    pub fn probability_of(&self, states: &[u64]) -> f64 {
        slice_probability_of(&self.amps, states)
    }

    /// Probability mass outside the Hamming-weight-`n_h` subspace.
    pub fn weight_leak(&self, n_h: usize) -> f64 {
        slice_weight_leak(&self.amps, n_h)
    }
}

fn slice_probability_of(amps: &[Complex64], states: &[u64]) -> f64 {
    states.iter().map(|&s| amps[s as usize].norm_sqr()).sum()
}

fn slice_weight_leak(amps: &[Complex64], n_h: usize) -> f64 {
    let mut inside = 0.0;
    for (x, amp) in amps.iter().enumerate() {
        if x.count_ones() as usize == n_h {
            inside += amp.norm_sqr();
        }
    }
    (par_norm_sqr(amps) - inside).max(0.0)
}

/// Measurement view passed to evolution observers at every step.
pub struct StepSample<'a> {
    pub step: usize,
    pub t: f64,
    amps: &'a [Complex64],
}

impl StepSample<'_> {
    pub fn norm(&self) -> f64 {
        par_norm_sqr(self.amps).sqrt()
    }

    pub fn probability_of(&self, states: &[u64]) -> f64 {
        slice_probability_of(self.amps, states)
    }

    pub fn weight_leak(&self, n_h: usize) -> f64 {
        slice_weight_leak(self.amps, n_h)
    }
}

/// Probability of the ground manifold: the summed `|amplitude|^2` over every
/// state in `ground_set`.
pub fn ground_state_probability(state: &QuantumState, ground_set: &[u64]) -> Result<f64> {
    if ground_set.is_empty() {
        return Err(Error::EmptyGroundSet);
    }
    Ok(state.probability_of(ground_set))
}

/// All n-bit states of Hamming weight `k`, ascending.
pub fn hamming_weight_states(n: usize, k: usize) -> Vec<u64> {
    (0..1u64 << n).filter(|x| x.count_ones() as usize == k).collect()
}

/// Driver ground state (X) or the uniform fixed-composition superposition (XY).
pub fn initial_state(n: usize, driver: &Driver, n_h: Option<usize>) -> Result<QuantumState> {
    if n > SIM_MAX_N {
        return Err(Error::StateTooLarge { n, limit: SIM_MAX_N });
    }
    let dim = 1usize << n;
    match driver.kind {
        DriverKind::X => {
            let amp = (dim as f64).sqrt().recip();
            let amps: Vec<Complex64> = (0..dim)
                .map(|x| {
                    let phase = match driver.sign {
                        // Ground state of +sum sigma^x: each qubit (|0> - |1>)/sqrt(2).
                        DriverSign::Plus => {
                            if (x.count_ones() & 1) == 1 {
                                -amp
                            } else {
                                amp
                            }
                        }
                        DriverSign::Minus => amp,
                    };
                    Complex64::new(phase, 0.0)
                })
                .collect();
            QuantumState::new(n, amps)
        }
        DriverKind::Xy => {
            let n_h = n_h.ok_or(Error::MissingComposition)?;
            if n_h > n {
                return Err(Error::CompositionOutOfRange { n_h, n });
            }
            let states = hamming_weight_states(n, n_h);
            let amp = (states.len() as f64).sqrt().recip();
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for s in states {
                amps[s as usize] = Complex64::new(amp, 0.0);
            }
            QuantumState::new(n, amps)
        }
    }
}

// ---------------------------------------------------------------------------
// Matrix-free Hamiltonians
// ---------------------------------------------------------------------------

trait Ham: Sync {
    fn dim(&self) -> usize;
    /// `dst = (a H_D + b H_P) src`.
    fn apply(&self, a: f64, b: f64, src: &[Complex64], dst: &mut [Complex64]);
}

/// Classical Ising energies per basis state (offset excluded; a constant
/// term only contributes a global phase).
fn diagonal_energies(p: &IsingProblem) -> Vec<f64> {
    let n = p.n();
    let h: Vec<f64> = p.fields().iter().map(rat_to_f64).collect();
    let mut jm = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rat_to_f64(&p.coupler(i, j));
            jm[i * n + j] = v;
        }
    }
    (0..1usize << n)
        .into_par_iter()
        .map(|x| {
            let sigma = |i: usize| if (x >> i) & 1 == 1 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..n {
                let si = sigma(i);
                e += h[i] * si;
                for j in i + 1..n {
                    e += jm[i * n + j] * si * sigma(j);
                }
            }
            e
        })
        .collect()
}

struct FullSpaceHam {
    n: usize,
    diag: Vec<f64>,
    kind: DriverKind,
    sign: f64,
}

impl FullSpaceHam {
    fn new(p: &IsingProblem, driver: &Driver) -> FullSpaceHam {
        FullSpaceHam {
            n: p.n(),
            diag: diagonal_energies(p),
            kind: driver.kind,
            sign: driver.sign_factor(),
        }
    }
}

impl Ham for FullSpaceHam {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply(&self, a: f64, b: f64, src: &[Complex64], dst: &mut [Complex64]) {
        let n = self.n;
        let sa = self.sign * a;
        let diag = &self.diag;
        let element = |x: usize, out: &mut Complex64| {
            let mut acc = src[x] * (b * diag[x]);
            match self.kind {
                DriverKind::X => {
                    for i in 0..n {
                        acc += src[x ^ (1 << i)] * sa;
                    }
                }
                DriverKind::Xy => {
                    for i in 0..n {
                        for j in i + 1..n {
                            if ((x >> i) ^ (x >> j)) & 1 == 1 {
                                acc += src[x ^ (1 << i) ^ (1 << j)] * sa;
                            }
                        }
                    }
                }
            }
            *out = acc;
        };
        if dst.len() < PAR_MIN_DIM {
            for (x, out) in dst.iter_mut().enumerate() {
                element(x, out);
            }
        } else {
            dst.par_iter_mut().enumerate().for_each(|(x, out)| element(x, out));
        }
    }
}

/// XY evolution restricted to the `C(n, n_h)`-dimensional fixed-weight basis.
struct SubspaceXyHam {
    n: usize,
    basis: Vec<u64>,
    index: HashMap<u64, u32>,
    diag: Vec<f64>,
    sign: f64,
}

impl SubspaceXyHam {
    fn new(p: &IsingProblem, n_h: usize, sign: DriverSign) -> SubspaceXyHam {
        let n = p.n();
        let basis = hamming_weight_states(n, n_h);
        let index: HashMap<u64, u32> =
            basis.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        let h: Vec<f64> = p.fields().iter().map(rat_to_f64).collect();
        let diag: Vec<f64> = basis
            .iter()
            .map(|&x| {
                let sigma = |i: usize| if (x >> i) & 1 == 1 { 1.0 } else { -1.0 };
                let mut e = 0.0;
                for i in 0..n {
                    e += h[i] * sigma(i);
                    for j in i + 1..n {
                        e += rat_to_f64(&p.coupler(i, j)) * sigma(i) * sigma(j);
                    }
                }
                e
            })
            .collect();
        let sign = match sign {
            DriverSign::Plus => 1.0,
            DriverSign::Minus => -1.0,
        };
        SubspaceXyHam { n, basis, index, diag, sign }
    }
}

impl Ham for SubspaceXyHam {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply(&self, a: f64, b: f64, src: &[Complex64], dst: &mut [Complex64]) {
        let n = self.n;
        let sa = self.sign * a;
        let element = |idx: usize, out: &mut Complex64| {
            let x = self.basis[idx];
            let mut acc = src[idx] * (b * self.diag[idx]);
            for i in 0..n {
                for j in i + 1..n {
                    if ((x >> i) ^ (x >> j)) & 1 == 1 {
                        let y = x ^ (1 << i) ^ (1 << j);
                        acc += src[self.index[&y] as usize] * sa;
                    }
                }
            }
            *out = acc;
        };
        if dst.len() < PAR_MIN_DIM {
            for (idx, out) in dst.iter_mut().enumerate() {
                element(idx, out);
            }
        } else {
            dst.par_iter_mut().enumerate().for_each(|(idx, out)| element(idx, out));
        }
    }
}

/// `(a H_D + b H_P) psi` as a standalone operation (unnormalized result).
pub fn apply_hamiltonian(
    state: &QuantumState,
    problem: &IsingProblem,
    driver: &Driver,
    a: f64,
    b: f64,
) -> Result<QuantumState> {
    if problem.n() != state.n() {
        return Err(Error::DimensionMismatch { expected: 1 << problem.n(), got: state.dim() });
    }
    let ham = FullSpaceHam::new(problem, driver);
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    ham.apply(a, b, state.amplitudes(), &mut out);
    QuantumState::new(state.n(), out)
}

// ---------------------------------------------------------------------------
// Deterministic vector kernels
// ---------------------------------------------------------------------------

fn par_norm_sqr(v: &[Complex64]) -> f64 {
    if v.len() < PAR_MIN_DIM {
        return v.iter().map(|z| z.norm_sqr()).sum();
    }
    let partials: Vec<f64> = v
        .par_chunks(REDUCE_CHUNK)
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .collect();
    partials.iter().sum()
}

fn par_dot_re(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() < PAR_MIN_DIM {
        return a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| (x.conj() * y).re).sum::<f64>())
        .collect();
    partials.iter().sum()
}

/// `out = x + alpha * y`, element-wise.
fn set_axpy(out: &mut [Complex64], x: &[Complex64], alpha: Complex64, y: &[Complex64]) {
    if out.len() < PAR_MIN_DIM {
        for i in 0..out.len() {
            out[i] = x[i] + alpha * y[i];
        }
    } else {
        out.par_iter_mut()
            .zip(x.par_iter().zip(y.par_iter()))
            .for_each(|(o, (xv, yv))| *o = *xv + alpha * *yv);
    }
}

/// `y += alpha * x`.
fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    if y.len() < PAR_MIN_DIM {
        for i in 0..y.len() {
            y[i] += alpha * x[i];
        }
    } else {
        y.par_iter_mut().zip(x.par_iter()).for_each(|(yv, xv)| *yv += alpha * *xv);
    }
}

// ---------------------------------------------------------------------------
// Crank-Nicolson + conjugate gradients
// ---------------------------------------------------------------------------

struct CnBuffers {
    t1: Vec<Complex64>,
    rhs: Vec<Complex64>,
    r: Vec<Complex64>,
    p: Vec<Complex64>,
    ap: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl CnBuffers {
    fn new(dim: usize) -> CnBuffers {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        CnBuffers { t1: z.clone(), rhs: z.clone(), r: z.clone(), p: z.clone(), ap: z.clone(), tmp: z }
    }
}

/// `out = (1 + (eps^2/4) H^2) x`.
fn apply_cn_matrix<H: Ham>(
    ham: &H,
    a: f64,
    b: f64,
    eps: f64,
    x: &[Complex64],
    tmp: &mut [Complex64],
    out: &mut [Complex64],
) {
    ham.apply(a, b, x, tmp);
    ham.apply(a, b, tmp, out);
    let c = eps * eps / 4.0;
    if out.len() < PAR_MIN_DIM {
        for i in 0..out.len() {
            out[i] = x[i] + out[i] * c;
        }
    } else {
        out.par_iter_mut().zip(x.par_iter()).for_each(|(o, xv)| *o = *xv + *o * c);
    }
}

fn cn_step<H: Ham>(
    ham: &H,
    a: f64,
    b: f64,
    eps: f64,
    psi: &mut Vec<Complex64>,
    buf: &mut CnBuffers,
    tol: f64,
    max_iter: usize,
) -> Result<()> {
    let half = Complex64::new(0.0, -eps / 2.0);
    // rhs = T^2 psi with T = 1 - (i eps/2) H.
    ham.apply(a, b, psi, &mut buf.t1);
    set_axpy(&mut buf.tmp, psi, half, &buf.t1); // tmp = T psi
    ham.apply(a, b, &buf.tmp, &mut buf.t1);
    set_axpy(&mut buf.rhs, &buf.tmp, half, &buf.t1); // rhs = T (T psi)

    // Solve (1 + (eps^2/4) H^2) psi_next = rhs, warm-started at rhs.
    psi.copy_from_slice(&buf.rhs);
    apply_cn_matrix(ham, a, b, eps, psi, &mut buf.tmp, &mut buf.ap);
    set_axpy(&mut buf.r, &buf.rhs, Complex64::new(-1.0, 0.0), &buf.ap);
    buf.p.copy_from_slice(&buf.r);
    let rhs_norm = par_norm_sqr(&buf.rhs);
    let threshold = tol * tol * rhs_norm;
    let mut rr = par_norm_sqr(&buf.r);
    let mut iterations = 0;
    while rr > threshold {
        if iterations >= max_iter {
            return Err(Error::CgNoConvergence {
                iterations,
                residual: (rr / rhs_norm).sqrt(),
            });
        }
        apply_cn_matrix(ham, a, b, eps, &buf.p, &mut buf.tmp, &mut buf.ap);
        let alpha = rr / par_dot_re(&buf.p, &buf.ap);
        axpy(psi, Complex64::new(alpha, 0.0), &buf.p);
        axpy(&mut buf.r, Complex64::new(-alpha, 0.0), &buf.ap);
        let rr_new = par_norm_sqr(&buf.r);
        let beta = rr_new / rr;
        // p = r + beta p
        if buf.p.len() < PAR_MIN_DIM {
            for i in 0..buf.p.len() {
                buf.p[i] = buf.r[i] + buf.p[i] * beta;
            }
        } else {
            buf.p
                .par_iter_mut()
                .zip(buf.r.par_iter())
                .for_each(|(pv, rv)| *pv = *rv + *pv * beta);
        }
        rr = rr_new;
        iterations += 1;
    }
    Ok(())
}

fn cn_evolve<H: Ham>(
    ham: &H,
    schedule: &AnnealSchedule,
    config: &IntegratorConfig,
    mut psi: Vec<Complex64>,
    mut observer: impl FnMut(usize, f64, &[Complex64]),
) -> Result<Vec<Complex64>> {
    let (steps, eps) = config.steps_for(schedule.t_f)?;
    let max_iter = config.max_iter((ham.dim() as f64).log2().ceil() as usize);
    let mut buf = CnBuffers::new(ham.dim());
    observer(0, 0.0, &psi);
    for m in 0..steps {
        let t_mid = (m as f64 + 0.5) * eps;
        let a = schedule.a(t_mid);
        let b = schedule.b(t_mid);
        cn_step(ham, a, b, eps, &mut psi, &mut buf, config.cg_tol, max_iter)?;
        observer(m + 1, (m + 1) as f64 * eps, &psi);
    }
    Ok(psi)
}

/// Integrate the annealing Hamiltonian from the driver initial state to
/// `t_f` and return the final state.
pub fn evolve(
    problem: &IsingProblem,
    driver: &Driver,
    schedule: &AnnealSchedule,
    config: &IntegratorConfig,
    n_h: Option<usize>,
) -> Result<QuantumState> {
    evolve_observed(problem, driver, schedule, config, n_h, |_| {})
}

/// As [`evolve`], invoking the observer at `t = 0` and after every step.
pub fn evolve_observed(
    problem: &IsingProblem,
    driver: &Driver,
    schedule: &AnnealSchedule,
    config: &IntegratorConfig,
    n_h: Option<usize>,
    mut observer: impl FnMut(StepSample),
) -> Result<QuantumState> {
    let n = problem.n();
    if n > SIM_MAX_N {
        return Err(Error::StateTooLarge { n, limit: SIM_MAX_N });
    }
    let psi0 = initial_state(n, driver, n_h)?;
    let ham = FullSpaceHam::new(problem, driver);
    let amps = cn_evolve(&ham, schedule, config, psi0.amps, |step, t, amps| {
        observer(StepSample { step, t, amps });
    })?;
    QuantumState::new(n, amps)
}

/// XY evolution restricted to the fixed-weight subspace, embedded back into
/// the full `2^n` basis on return. Must agree with the full-space run.
pub fn evolve_xy_subspace(
    problem: &IsingProblem,
    schedule: &AnnealSchedule,
    config: &IntegratorConfig,
    n_h: usize,
    sign: DriverSign,
) -> Result<QuantumState> {
    let n = problem.n();
    if n > SIM_MAX_N {
        return Err(Error::StateTooLarge { n, limit: SIM_MAX_N });
    }
    if n_h > n {
        return Err(Error::CompositionOutOfRange { n_h, n });
    }
    let ham = SubspaceXyHam::new(problem, n_h, sign);
    let dim = ham.dim();
    let amp = (dim as f64).sqrt().recip();
    let psi0 = vec![Complex64::new(amp, 0.0); dim];
    let amps = cn_evolve(&ham, schedule, config, psi0, |_, _, _| {})?;
    let mut full = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (idx, &basis) in ham.basis.iter().enumerate() {
        full[basis as usize] = amps[idx];
    }
    QuantumState::new(n, full)
}

/// Evolve and return the ground-manifold probability at `t_f`.
pub fn final_ground_probability(
    problem: &IsingProblem,
    driver: &Driver,
    schedule: &AnnealSchedule,
    config: &IntegratorConfig,
    n_h: Option<usize>,
    ground_set: &[u64],
) -> Result<f64> {
    let state = evolve(problem, driver, schedule, config, n_h)?;
    ground_state_probability(&state, ground_set)
}

/// Finite-difference order diagnostic
/// `chi(eps) = [P_g(eps) - P_g(eps/2)] / [P_g(2 eps) - P_g(eps)]`;
/// approaches 1/4 for a second-order integrator. The ground set is taken
/// from the exact spectrum.
pub fn chi_diagnostic(
    problem: &IsingProblem,
    driver: &Driver,
    t_f: f64,
    eps: f64,
    n_h: Option<usize>,
) -> Result<f64> {
    let ground = spectrum(problem)?.ground_states;
    chi_with_ground_set(problem, driver, t_f, eps, n_h, &ground)
}

/// As [`chi_diagnostic`] with an explicit ground set.
pub fn chi_with_ground_set(
    problem: &IsingProblem,
    driver: &Driver,
    t_f: f64,
    eps: f64,
    n_h: Option<usize>,
    ground_set: &[u64],
) -> Result<f64> {
    let schedule = AnnealSchedule::new(t_f)?;
    let pg = |e: f64| -> Result<f64> {
        final_ground_probability(
            problem,
            driver,
            &schedule,
            &IntegratorConfig::with_eps(e),
            n_h,
            ground_set,
        )
    };
    let p_half = pg(eps / 2.0)?;
    let p_mid = pg(eps)?;
    let p_double = pg(2.0 * eps)?;
    let denom = p_double - p_mid;
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateDifference);
    }
    Ok((p_mid - p_half) / denom)
}

/// I.i.d. basis-state samples from `|psi|^2`; deterministic per seed.
pub fn sample_bitstrings(state: &QuantumState, count: usize, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for amp in &state.amps {
        acc += amp.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen_range(0.0..total);
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64
        })
        .collect()
}
