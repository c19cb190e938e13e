//! QUBO and Ising forms of the design energy, device-style rescaling and
//! exact spectra.
//!
//! Spin convention, used everywhere: `s_i = (1 + sigma_i) / 2`, so H maps to
//! `sigma = +1` and bit `i` of a basis-state index equals `s_i`. All
//! coefficients are exact rationals; the spectrum scan runs on integers
//! after clearing denominators, so gaps of 0.1 compare exactly.

use crate::error::{Error, Result};
use crate::lattice::DesignEnergyModel;
use crate::rational::{lcm_i64, Rat};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// Exhaustive spectrum scans refuse above this many spins.
pub const SPECTRUM_MAX_N: usize = 24;

fn tri_len(n: usize) -> usize {
    n * (n - 1) / 2
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Quadratic unconstrained binary optimization problem over `s in {0,1}^n`:
/// `E(s) = sum_i linear_i s_i + sum_{i<j} quad_ij s_i s_j + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    n: usize,
    linear: Vec<Rat>,
    quad: Vec<Rat>,
    offset: Rat,
}

impl QuboProblem {
    pub fn new(n: usize, linear: Vec<Rat>, quad: Vec<Rat>, offset: Rat) -> Result<Self> {
        if linear.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: linear.len() });
        }
        if quad.len() != tri_len(n) {
            return Err(Error::DimensionMismatch { expected: tri_len(n), got: quad.len() });
        }
        Ok(QuboProblem { n, linear, quad, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self, i: usize) -> Rat {
        self.linear[i]
    }

    pub fn quad(&self, i: usize, j: usize) -> Rat {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.quad[tri_index(self.n, i, j)]
    }

    pub fn offset(&self) -> Rat {
        self.offset
    }

    /// Energy of a bitstring (bit `i` = `s_i`).
    pub fn energy(&self, bits: u64) -> Rat {
        let mut e = self.offset;
        for i in 0..self.n {
            if (bits >> i) & 1 == 0 {
                continue;
            }
            e += self.linear[i];
            for j in i + 1..self.n {
                if (bits >> j) & 1 == 1 {
                    e += self.quad[tri_index(self.n, i, j)];
                }
            }
        }
        e
    }
}

/// Ising problem over `sigma in {-1,+1}^n`:
/// `E(sigma) = sum_i h_i sigma_i + sum_{i<j} J_ij sigma_i sigma_j + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingProblem {
    n: usize,
    h: Vec<Rat>,
    j: Vec<Rat>,
    offset: Rat,
}

impl IsingProblem {
    pub fn new(n: usize, h: Vec<Rat>, j: Vec<Rat>, offset: Rat) -> Result<Self> {
        if h.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.len() });
        }
        if j.len() != tri_len(n) {
            return Err(Error::DimensionMismatch { expected: tri_len(n), got: j.len() });
        }
        Ok(IsingProblem { n, h, j, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self, i: usize) -> Rat {
        self.h[i]
    }

    pub fn fields(&self) -> &[Rat] {
        &self.h
    }

    pub fn coupler(&self, i: usize, j: usize) -> Rat {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.j[tri_index(self.n, i, j)]
    }

    /// Upper-triangular couplers in row-major `(i, j)` order with `i < j`.
    pub fn couplers(&self) -> &[Rat] {
        &self.j
    }

    pub fn offset(&self) -> Rat {
        self.offset
    }

    pub fn max_abs_field(&self) -> Rat {
        self.h.iter().map(|v| v.abs()).max().unwrap_or_else(Rat::zero)
    }

    pub fn max_abs_coupler(&self) -> Rat {
        self.j.iter().map(|v| v.abs()).max().unwrap_or_else(Rat::zero)
    }

    /// Energy of the basis state whose bit `i` encodes `s_i` (`sigma = 2 s - 1`).
    pub fn energy(&self, bits: u64) -> Rat {
        let sigma = |i: usize| {
            if (bits >> i) & 1 == 1 {
                Rat::from_integer(1)
            } else {
                Rat::from_integer(-1)
            }
        };
        let mut e = self.offset;
        for i in 0..self.n {
            e += self.h[i] * sigma(i);
            for j in i + 1..self.n {
                e += self.j[tri_index(self.n, i, j)] * sigma(i) * sigma(j);
            }
        }
        e
    }
}

/// Exact ground data of an Ising problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSummary {
    pub ground_energy: Rat,
    /// Every ground basis state (bit `i` = `s_i`), ascending.
    pub ground_states: Vec<u64>,
    /// Second-lowest distinct energy minus the lowest; always positive.
    pub gap: Rat,
}

/// Expand the design energy into QUBO form. On every bitstring the QUBO
/// energy equals the design energy of the corresponding sequence.
pub fn to_qubo(model: &DesignEnergyModel) -> QuboProblem {
    let n = model.n();
    let lambda = model.lambda();
    let n_h = Rat::from_integer(model.n_h() as i64);
    let linear = vec![lambda * (Rat::from_integer(1) - Rat::from_integer(2) * n_h); n];
    let mut quad = vec![Rat::from_integer(2) * lambda; tri_len(n)];
    for &(i, j) in model.cmap().contacts() {
        quad[tri_index(n, i as usize, j as usize)] -= Rat::from_integer(1);
    }
    let offset = lambda * n_h * n_h;
    QuboProblem { n, linear, quad, offset }
}

/// Substitute `s_i = (1 + sigma_i) / 2`; energies agree state by state.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingProblem {
    let n = q.n;
    let half = Rat::new(1, 2);
    let quarter = Rat::new(1, 4);
    let mut h: Vec<Rat> = (0..n).map(|i| q.linear[i] * half).collect();
    let mut j = vec![Rat::zero(); tri_len(n)];
    let mut offset = q.offset;
    for i in 0..n {
        offset += q.linear[i] * half;
    }
    for a in 0..n {
        for b in a + 1..n {
            let qab = q.quad[tri_index(n, a, b)];
            let quarter_q = qab * quarter;
            j[tri_index(n, a, b)] = quarter_q;
            h[a] += quarter_q;
            h[b] += quarter_q;
            offset += quarter_q;
        }
    }
    IsingProblem { n, h, j, offset }
}

/// [`rescale`] with the usual `j_max = 1`.
pub fn rescale_by_chain_strength(p: &IsingProblem, j_cs: Rat) -> Result<(IsingProblem, Rat)> {
    rescale(p, j_cs, Rat::from_integer(1))
}

/// Divide all fields, couplers and the offset by `r = j_cs / j_max`.
/// The minimizer set and the level ordering are unchanged.
pub fn rescale(p: &IsingProblem, j_cs: Rat, j_max: Rat) -> Result<(IsingProblem, Rat)> {
    if j_cs <= Rat::zero() {
        return Err(Error::NonpositiveParameter { name: "j_cs" });
    }
    if j_max <= Rat::zero() {
        return Err(Error::NonpositiveParameter { name: "j_max" });
    }
    let r = j_cs / j_max;
    let scaled = IsingProblem {
        n: p.n,
        h: p.h.iter().map(|v| v / r).collect(),
        j: p.j.iter().map(|v| v / r).collect(),
        offset: p.offset / r,
    };
    Ok((scaled, r))
}

/// Clear denominators: returns (scale D, h*D, full symmetric J*D, offset*D).
fn integerize(p: &IsingProblem) -> Result<(i64, Vec<i64>, Vec<i64>, i64)> {
    let mut d: i64 = 1;
    for v in p.h.iter().chain(p.j.iter()).chain(std::iter::once(&p.offset)) {
        d = lcm_i64(d, *v.denom())?;
    }
    let to_int = |v: &Rat| -> i64 { v.numer() * (d / v.denom()) };
    let h: Vec<i64> = p.h.iter().map(to_int).collect();
    let mut jm = vec![0i64; p.n * p.n];
    for i in 0..p.n {
        for j in i + 1..p.n {
            let v = to_int(&p.j[tri_index(p.n, i, j)]);
            jm[i * p.n + j] = v;
            jm[j * p.n + i] = v;
        }
    }
    Ok((d, h, jm, to_int(&p.offset)))
}

struct BlockScan {
    min_e: i64,
    ties: Vec<u64>,
    second: Option<i64>,
}

/// Exact exhaustive spectrum: ground energy, all ground states, and the gap
/// to the second-lowest distinct level.
pub fn spectrum(p: &IsingProblem) -> Result<SpectrumSummary> {
    if p.n > SPECTRUM_MAX_N {
        return Err(Error::TooLarge { n: p.n, limit: SPECTRUM_MAX_N });
    }
    let n = p.n;
    let (d, h, jm, offset) = integerize(p)?;
    let low_bits = n.min(14);
    let high_bits = n - low_bits;
    let blocks: Vec<BlockScan> = (0u64..1u64 << high_bits)
        .into_par_iter()
        .map(|block| scan_block(n, &h, &jm, offset, block << low_bits, low_bits))
        .collect();
    // Deterministic sequential merge in block order.
    let mut min_e = i64::MAX;
    let mut ties: Vec<u64> = Vec::new();
    let mut second: Option<i64> = None;
    let push_level = |e: i64, min_e: &mut i64, second: &mut Option<i64>| {
        if e < *min_e {
            if *min_e != i64::MAX {
                *second = Some(second.map_or(*min_e, |s| s.min(*min_e)));
            }
            *min_e = e;
        } else if e > *min_e {
            *second = Some(second.map_or(e, |s| s.min(e)));
        }
    };
    for b in blocks {
        if b.min_e < min_e {
            let old = min_e;
            min_e = b.min_e;
            ties.clear();
            ties.extend_from_slice(&b.ties);
            if old != i64::MAX {
                second = Some(second.map_or(old, |s| s.min(old)));
            }
        } else if b.min_e == min_e {
            ties.extend_from_slice(&b.ties);
        } else {
            push_level(b.min_e, &mut min_e, &mut second);
        }
        if let Some(s) = b.second {
            push_level(s, &mut min_e, &mut second);
        }
    }
    let Some(second) = second else {
        return Err(Error::DegenerateSpectrum);
    };
    ties.sort_unstable();
    Ok(SpectrumSummary {
        ground_energy: Rat::new(min_e, d),
        ground_states: ties,
        gap: Rat::new(second - min_e, d),
    })
}

/// Gray-code walk over the low bits of one block, tracking the two lowest
/// distinct energies and all minimizers.
fn scan_block(n: usize, h: &[i64], jm: &[i64], offset: i64, base: u64, low_bits: usize) -> BlockScan {
    let mut sigma = vec![0i64; n];
    for i in 0..n {
        sigma[i] = if (base >> i) & 1 == 1 { 1 } else { -1 };
    }
    let mut e = offset;
    for i in 0..n {
        e += h[i] * sigma[i];
        for j in i + 1..n {
            e += jm[i * n + j] * sigma[i] * sigma[j];
        }
    }
    let mut state = base;
    let mut min_e = e;
    let mut ties = vec![state];
    let mut second: Option<i64> = None;
    let note = |e: i64, state: u64, min_e: &mut i64, ties: &mut Vec<u64>, second: &mut Option<i64>| {
        if e < *min_e {
            let old = *min_e;
            *min_e = e;
            ties.clear();
            ties.push(state);
            *second = Some(second.map_or(old, |s| s.min(old)));
        } else if e == *min_e {
            ties.push(state);
        } else {
            *second = Some(second.map_or(e, |s| s.min(e)));
        }
    };
    for t in 1u64..1u64 << low_bits {
        let b = t.trailing_zeros() as usize;
        // Flip spin b: delta = -2 sigma_b (h_b + sum_j J_bj sigma_j).
        let mut local = h[b];
        let row = &jm[b * n..(b + 1) * n];
        for j in 0..n {
            local += row[j] * sigma[j];
        }
        e -= 2 * sigma[b] * local;
        sigma[b] = -sigma[b];
        state ^= 1 << b;
        note(e, state, &mut min_e, &mut ties, &mut second);
    }
    BlockScan { min_e, ties, second }
}
