//! Exhaustive ground-truth engines: self-avoiding-walk enumeration, exact
//! folding, designability ranking, Boltzmann target populations and the
//! fixed-composition minimum-energy oracle.
//!
//! Enumeration fixes the first move to `R` and the first turn, if any, to
//! `U`; under the move order `R < U < D < L` that normal form coincides with
//! the canonical (lexicographically smallest) representative of each
//! symmetry class, so the depth-first search emits canonical walks directly,
//! in ascending order. Folding groups structures by contact map, since the
//! HP energy is a function of the contact map alone; minimizer structures
//! are still reported individually.

use crate::error::{Error, Result};
use crate::lattice::{hh_contacts, hp_energy, ContactMap, HpSequence, LatticeStructure, Move};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

/// Default cap for exhaustive structure enumeration (bead count).
pub const DEFAULT_ENUM_LIMIT: usize = 16;
/// Default cap for full designability scans (bead count).
pub const DEFAULT_DESIGNABILITY_LIMIT: usize = 14;
/// Largest contact-graph component the composition oracle will enumerate.
pub const MAX_COMPONENT: usize = 24;

/// Result of exactly folding one sequence over every canonical structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    /// Minimum HP energy over all canonical structures.
    pub min_ehp: i64,
    /// `true` iff exactly one structure attains the minimum.
    pub unique: bool,
    /// Canonical move strings of every minimizer, ascending.
    #[serde(rename = "ground_state_moves")]
    pub ground_states: Vec<String>,
}

/// One row of the designability ranking.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignabilityRecord {
    /// Canonical move string.
    pub moves: String,
    /// Number of sequences having this structure as their unique ground state.
    pub count: u64,
}

/// Output of the fixed-composition minimum-energy oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct MinEhpSolution {
    pub n_h: usize,
    pub min_ehp: i64,
    /// Exact number of optimal H-placements.
    pub degeneracy: u128,
    /// All optimal sequences, when requested.
    pub witnesses: Option<Vec<HpSequence>>,
}

// ---------------------------------------------------------------------------
// Canonical walk enumeration
// ---------------------------------------------------------------------------

fn pack_moves(moves: &[Move]) -> u64 {
    let mut packed = 0u64;
    for (i, &m) in moves.iter().enumerate() {
        packed |= (m as u64) << (2 * i);
    }
    packed
}

fn unpack_moves(packed: u64, len: usize) -> Vec<Move> {
    (0..len)
        .map(|i| Move::from_ordinal(((packed >> (2 * i)) & 3) as u8))
        .collect()
}

struct Dfs {
    side: i32,
    grid: Vec<bool>,
    path: Vec<(i32, i32)>,
    moves: Vec<Move>,
    turned: bool,
    out: Vec<u64>,
}

impl Dfs {
    fn new(n: usize) -> Self {
        let side = (2 * n - 1) as i32;
        let origin = (n as i32 - 1, n as i32 - 1);
        let mut grid = vec![false; (side * side) as usize];
        grid[(origin.0 * side + origin.1) as usize] = true;
        Dfs {
            side,
            grid,
            path: vec![origin],
            moves: Vec::with_capacity(n - 1),
            turned: false,
            out: Vec::new(),
        }
    }

    fn replay(mut self, prefix: &[Move]) -> Option<Self> {
        for &m in prefix {
            let (dx, dy) = m.delta();
            let last = *self.path.last().unwrap();
            let next = (last.0 + dx, last.1 + dy);
            let idx = (next.0 * self.side + next.1) as usize;
            if self.grid[idx] {
                return None;
            }
            self.grid[idx] = true;
            self.path.push(next);
            if m != Move::R {
                self.turned = true;
            }
            self.moves.push(m);
        }
        Some(self)
    }

    fn candidates(&self) -> &'static [Move] {
        const FIRST: &[Move] = &[Move::R];
        const STRAIGHT: &[Move] = &[Move::R, Move::U];
        const FREE: &[Move] = &[Move::R, Move::U, Move::D, Move::L];
        if self.moves.is_empty() {
            FIRST
        } else if !self.turned {
            STRAIGHT
        } else {
            FREE
        }
    }

    fn run(&mut self, stop_depth: usize) {
        if self.moves.len() == stop_depth {
            self.out.push(pack_moves(&self.moves));
            return;
        }
        let last = *self.path.last().unwrap();
        for &m in self.candidates() {
            let (dx, dy) = m.delta();
            let next = (last.0 + dx, last.1 + dy);
            let idx = (next.0 * self.side + next.1) as usize;
            if self.grid[idx] {
                continue;
            }
            self.grid[idx] = true;
            self.path.push(next);
            self.moves.push(m);
            let was_turned = self.turned;
            if m != Move::R {
                self.turned = true;
            }
            self.run(stop_depth);
            self.turned = was_turned;
            self.moves.pop();
            self.path.pop();
            self.grid[idx] = false;
        }
    }
}

/// All canonical n-bead walks, packed two bits per move, ascending lex order.
fn enumerate_packed(n: usize) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let n_moves = n - 1;
    let prefix_depth = n_moves.min(6);
    let mut prefix_dfs = Dfs::new(n);
    prefix_dfs.run(prefix_depth);
    let prefixes = prefix_dfs.out;
    if prefix_depth == n_moves {
        return prefixes;
    }
    // Extend each prefix independently; ordered collection keeps the result
    // identical for any thread count.
    let chunks: Vec<Vec<u64>> = prefixes
        .par_iter()
        .map(|&packed| {
            let prefix = unpack_moves(packed, prefix_depth);
            let mut dfs = Dfs::new(n)
                .replay(&prefix)
                .expect("prefix emitted by the search is self-avoiding");
            dfs.run(n_moves);
            dfs.out
        })
        .collect();
    chunks.concat()
}

fn packed_contacts(packed: u64, n: usize, scratch: &mut Vec<(u8, u8)>) {
    scratch.clear();
    let mut coords = [(0i16, 0i16); 64];
    let mut pos = (0i16, 0i16);
    for i in 0..n - 1 {
        let m = Move::from_ordinal(((packed >> (2 * i)) & 3) as u8);
        let (dx, dy) = m.delta();
        pos = (pos.0 + dx as i16, pos.1 + dy as i16);
        coords[i + 1] = pos;
    }
    for i in 0..n {
        for j in i + 3..n {
            let d = (coords[i].0 - coords[j].0).abs() + (coords[i].1 - coords[j].1).abs();
            if d == 1 {
                scratch.push((i as u8, j as u8));
            }
        }
    }
}

/// The full census of canonical n-bead structures plus their contact-map
/// classes. Built once per `n` and shared behind an `Arc`.
pub struct StructureSet {
    n: usize,
    walks: Vec<u64>,
    // Classes sorted by descending contact count, then by pair list; flat
    // layout for the fold/designability scans.
    pair_off: Vec<u32>,
    pairs_flat: Vec<(u8, u8)>,
    member_count: Vec<u32>,
    lone_member: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl StructureSet {
    fn build(n: usize) -> StructureSet {
        let walks = enumerate_packed(n);
        let mut groups: HashMap<Vec<(u8, u8)>, Vec<u32>> = HashMap::new();
        let mut scratch = Vec::new();
        for (idx, &w) in walks.iter().enumerate() {
            if n >= 4 {
                packed_contacts(w, n, &mut scratch);
            } else {
                scratch.clear();
            }
            if let Some(v) = groups.get_mut(&scratch) {
                v.push(idx as u32);
            } else {
                groups.insert(scratch.clone(), vec![idx as u32]);
            }
        }
        let mut classes: Vec<(Vec<(u8, u8)>, Vec<u32>)> = groups.into_iter().collect();
        classes.sort_unstable_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

        let mut pair_off = Vec::with_capacity(classes.len() + 1);
        let mut pairs_flat = Vec::new();
        let mut member_count = Vec::with_capacity(classes.len());
        let mut lone_member = Vec::with_capacity(classes.len());
        let mut members = Vec::with_capacity(classes.len());
        pair_off.push(0u32);
        for (pairs, ids) in classes {
            pairs_flat.extend_from_slice(&pairs);
            pair_off.push(pairs_flat.len() as u32);
            member_count.push(ids.len() as u32);
            lone_member.push(if ids.len() == 1 { ids[0] } else { u32::MAX });
            members.push(ids);
        }
        StructureSet { n, walks, pair_off, pairs_flat, member_count, lone_member, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of canonical structures.
    pub fn count(&self) -> usize {
        self.walks.len()
    }

    /// Number of distinct contact maps.
    pub fn class_count(&self) -> usize {
        self.member_count.len()
    }

    pub fn moves_string(&self, idx: u32) -> String {
        unpack_moves(self.walks[idx as usize], self.n - 1)
            .iter()
            .map(|m| m.to_char())
            .collect()
    }

    pub fn structure(&self, idx: u32) -> LatticeStructure {
        LatticeStructure::from_move_vec(unpack_moves(self.walks[idx as usize], self.n - 1))
            .expect("stored walks are self-avoiding")
    }

    /// Canonical move strings in enumeration (ascending) order.
    pub fn iter_moves(&self) -> impl Iterator<Item = String> + '_ {
        (0..self.walks.len() as u32).map(move |i| self.moves_string(i))
    }

    fn class_pairs(&self, c: usize) -> &[(u8, u8)] {
        &self.pairs_flat[self.pair_off[c] as usize..self.pair_off[c + 1] as usize]
    }

    /// Minimum energy of `bits` over all classes, the total number of
    /// minimizer structures, and the single minimizer when unique.
    fn scan_min(&self, bits: u64) -> (i64, u64, u32) {
        let k = self.member_count.len();
        let mut min_e: i64 = 1; // sentinel above any reachable energy
        let mut total: u64 = 0;
        let mut lone = u32::MAX;
        for c in 0..k {
            let pairs = self.class_pairs(c);
            if (pairs.len() as i64) < -min_e {
                break; // sorted by pair count: nothing below can tie or beat
            }
            let e = -(hh_contacts(pairs, bits) as i64);
            if e < min_e {
                min_e = e;
                total = self.member_count[c] as u64;
                lone = if total == 1 { self.lone_member[c] } else { u32::MAX };
            } else if e == min_e {
                total += self.member_count[c] as u64;
                lone = u32::MAX;
            }
        }
        (min_e, total, lone)
    }

    fn scan_min_classes(&self, bits: u64) -> (i64, Vec<u32>) {
        let k = self.member_count.len();
        let mut min_e: i64 = 1;
        let mut ties: Vec<u32> = Vec::new();
        for c in 0..k {
            let pairs = self.class_pairs(c);
            if (pairs.len() as i64) < -min_e {
                break;
            }
            let e = -(hh_contacts(pairs, bits) as i64);
            if e < min_e {
                min_e = e;
                ties.clear();
                ties.push(c as u32);
            } else if e == min_e {
                ties.push(c as u32);
            }
        }
        (min_e, ties)
    }
}

fn set_cache() -> &'static Mutex<HashMap<usize, Arc<OnceLock<Arc<StructureSet>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OnceLock<Arc<StructureSet>>>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

type Ranking = Vec<(u32, u32)>; // (walk index, count), sorted for the ranking

fn rank_cache() -> &'static Mutex<HashMap<usize, Arc<OnceLock<Arc<Ranking>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OnceLock<Arc<Ranking>>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared census for `n` beads, built on first use.
pub fn structure_set(n: usize, limit: usize) -> Result<Arc<StructureSet>> {
    if n < 1 || n > limit {
        return Err(Error::LimitExceeded { requested: n, limit });
    }
    let cell = {
        let mut map = set_cache().lock().unwrap();
        map.entry(n).or_insert_with(|| Arc::new(OnceLock::new())).clone()
    };
    Ok(cell.get_or_init(|| Arc::new(StructureSet::build(n))).clone())
}

/// Every canonical n-bead structure, ascending by canonical move string.
///
/// Materializes full structures; for large `n` prefer iterating
/// [`StructureSet::iter_moves`].
pub fn enumerate_structures(n: usize, limit: usize) -> Result<Vec<LatticeStructure>> {
    let set = structure_set(n, limit)?;
    Ok((0..set.count() as u32).map(|i| set.structure(i)).collect())
}

/// Exact fold: minimum HP energy over every canonical structure, with all
/// minimizers listed individually.
pub fn fold_sequence(seq: &HpSequence, limit: usize) -> Result<FoldResult> {
    let set = structure_set(seq.n(), limit)?;
    let (min_e, tie_classes) = set.scan_min_classes(seq.bits());
    let mut ids: Vec<u32> = tie_classes
        .iter()
        .flat_map(|&c| set.members[c as usize].iter().copied())
        .collect();
    ids.sort_unstable();
    let unique = ids.len() == 1;
    let ground_states = ids.into_iter().map(|i| set.moves_string(i)).collect();
    Ok(FoldResult { min_ehp: min_e, unique, ground_states })
}

fn designability_ranking(n: usize, limit: usize) -> Result<(Arc<StructureSet>, Arc<Ranking>)> {
    if n > limit {
        return Err(Error::LimitExceeded { requested: n, limit });
    }
    let set = structure_set(n, limit)?;
    let cell = {
        let mut map = rank_cache().lock().unwrap();
        map.entry(n).or_insert_with(|| Arc::new(OnceLock::new())).clone()
    };
    let ranking = cell
        .get_or_init(|| {
            let counts: Vec<AtomicU32> = (0..set.count()).map(|_| AtomicU32::new(0)).collect();
            let many_structures = set.count() > 1;
            (0u64..1u64 << n).into_par_iter().for_each(|bits| {
                if many_structures && !has_possible_contact(bits, n) {
                    return;
                }
                let (_, total, lone) = set.scan_min(bits);
                if total == 1 {
                    counts[lone as usize].fetch_add(1, Ordering::Relaxed);
                }
            });
            let mut ranking: Ranking = counts
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i as u32, c.into_inner()))
                .collect();
            ranking.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            Arc::new(ranking)
        })
        .clone();
    Ok((set, ranking))
}

/// `true` if the sequence admits any HH contact on the square lattice:
/// an H pair with odd chain separation of at least 3.
fn has_possible_contact(bits: u64, n: usize) -> bool {
    let mut d = 3;
    while d < n {
        if bits & (bits >> d) != 0 {
            return true;
        }
        d += 2;
    }
    false
}

/// Full designability ranking: for every sequence, decide whether it has a
/// unique ground state and credit that structure. Descending by count, ties
/// by canonical move string.
pub fn designability(n: usize, limit: usize) -> Result<Vec<DesignabilityRecord>> {
    let (set, ranking) = designability_ranking(n, limit)?;
    Ok(ranking
        .iter()
        .map(|&(idx, count)| DesignabilityRecord {
            moves: set.moves_string(idx),
            count: count as u64,
        })
        .collect())
}

/// Head of the designability ranking.
pub fn most_designable(n: usize, limit: usize) -> Result<LatticeStructure> {
    let (set, ranking) = designability_ranking(n, limit)?;
    Ok(set.structure(ranking[0].0))
}

/// Fraction of length-n sequences with a unique ground state.
pub fn unique_ground_state_fraction(n: usize, limit: usize) -> Result<f64> {
    let (_, ranking) = designability_ranking(n, limit)?;
    let total: u64 = ranking.iter().map(|&(_, c)| c as u64).sum();
    Ok(total as f64 / (1u64 << n) as f64)
}

/// Boltzmann probability of finding `seq` in `target` at inverse temperature
/// `beta`, the partition sum running over one representative per canonical
/// structure class.
pub fn target_population(
    seq: &HpSequence,
    target: &LatticeStructure,
    beta: f64,
    limit: usize,
) -> Result<f64> {
    if target.n() != seq.n() {
        return Err(Error::LengthMismatch { expected: target.n(), got: seq.n() });
    }
    if !(beta >= 0.0) {
        return Err(Error::NonpositiveParameter { name: "beta" });
    }
    let set = structure_set(seq.n(), limit)?;
    let bits = seq.bits();
    let e_target = hp_energy(&target.contact_map(), seq)? as f64;
    let mut e_min = e_target;
    let mut energies = Vec::with_capacity(set.member_count.len());
    for c in 0..set.member_count.len() {
        let e = -(hh_contacts(set.class_pairs(c), bits) as f64);
        e_min = e_min.min(e);
        energies.push(e);
    }
    let mut z = 0.0;
    for (c, &e) in energies.iter().enumerate() {
        z += set.member_count[c] as f64 * (-beta * (e - e_min)).exp();
    }
    Ok((-beta * (e_target - e_min)).exp() / z)
}

// ---------------------------------------------------------------------------
// Fixed-composition minimum-energy oracle (component decomposition + knapsack)
// ---------------------------------------------------------------------------

fn binom_u128(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::CountOverflow)?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

struct Component {
    verts: Vec<u8>,
    /// local pairs, indices into `verts`
    pairs: Vec<(u8, u8)>,
    /// best[k] = max contacts with k selected vertices; count[k] = multiplicity
    best: Vec<i64>,
    count: Vec<u128>,
}

impl Component {
    fn profile(verts: Vec<u8>, pairs: Vec<(u8, u8)>) -> Result<Component> {
        let size = verts.len();
        if size > MAX_COMPONENT {
            return Err(Error::ComponentTooLarge { size, limit: MAX_COMPONENT });
        }
        let mut best = vec![-1i64; size + 1];
        let mut count = vec![0u128; size + 1];
        for mask in 0u64..1u64 << size {
            let k = mask.count_ones() as usize;
            let hh = hh_contacts(&pairs, mask) as i64;
            if hh > best[k] {
                best[k] = hh;
                count[k] = 1;
            } else if hh == best[k] {
                count[k] += 1;
            }
        }
        Ok(Component { verts, pairs, best, count })
    }

    /// Local selection masks of `k` vertices achieving the optimum.
    fn optimal_masks(&self, k: usize) -> Vec<u64> {
        let size = self.verts.len();
        (0u64..1u64 << size)
            .filter(|&m| m.count_ones() as usize == k && hh_contacts(&self.pairs, m) as i64 == self.best[k])
            .collect()
    }
}

/// Exact minimum HP energy and degeneracy over all placements of `n_h` H
/// beads on the contact map. Decomposes the contact graph into connected
/// components, profiles each exhaustively and combines with a counting
/// knapsack; isolated beads form a free pool.
pub fn min_ehp_oracle(cmap: &ContactMap, n_h: usize, want_witnesses: bool) -> Result<MinEhpSolution> {
    let n = cmap.n();
    if n_h > n {
        return Err(Error::CompositionOutOfRange { n_h, n });
    }
    let mut adj: Vec<Vec<u8>> = vec![Vec::new(); n];
    for &(i, j) in cmap.contacts() {
        adj[i as usize].push(j);
        adj[j as usize].push(i);
    }
    let mut seen = vec![false; n];
    let mut components: Vec<Component> = Vec::new();
    for start in 0..n {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        let mut verts = Vec::new();
        let mut stack = vec![start as u8];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            verts.push(v);
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        verts.sort_unstable();
        let local: HashMap<u8, u8> =
            verts.iter().enumerate().map(|(i, &v)| (v, i as u8)).collect();
        let pairs: Vec<(u8, u8)> = cmap
            .contacts()
            .iter()
            .filter(|(a, b)| local.contains_key(a) && local.contains_key(b))
            .map(|&(a, b)| (local[&a], local[&b]))
            .collect();
        components.push(Component::profile(verts, pairs)?);
    }
    let free: Vec<u8> =
        (0..n as u8).filter(|&v| adj[v as usize].is_empty()).collect();

    // dp[k] = (max contacts using k selected vertices so far, multiplicity)
    let mut dp: Vec<Option<(i64, u128)>> = vec![None; n + 1];
    dp[0] = Some((0, 1));
    let mut layers: Vec<Vec<Option<(i64, u128)>>> = Vec::with_capacity(components.len());
    for comp in &components {
        let size = comp.verts.len();
        let mut next: Vec<Option<(i64, u128)>> = vec![None; n + 1];
        for k in 0..=n {
            let Some((b, c)) = dp[k] else { continue };
            for kc in 0..=size {
                if k + kc > n {
                    break;
                }
                let nb = b + comp.best[kc];
                let nc = c.checked_mul(comp.count[kc]).ok_or(Error::CountOverflow)?;
                match &mut next[k + kc] {
                    slot @ None => *slot = Some((nb, nc)),
                    Some((eb, ec)) => {
                        if nb > *eb {
                            *eb = nb;
                            *ec = nc;
                        } else if nb == *eb {
                            *ec = ec.checked_add(nc).ok_or(Error::CountOverflow)?;
                        }
                    }
                }
            }
        }
        layers.push(dp.clone());
        dp = next;
    }
    // Free beads contribute no contacts, only combinatorics.
    let mut fin: Vec<Option<(i64, u128)>> = vec![None; n + 1];
    for k in 0..=n {
        let Some((b, c)) = dp[k] else { continue };
        for f in 0..=free.len() {
            if k + f > n {
                break;
            }
            let nc = c
                .checked_mul(binom_u128(free.len(), f)?)
                .ok_or(Error::CountOverflow)?;
            match &mut fin[k + f] {
                slot @ None => *slot = Some((b, nc)),
                Some((eb, ec)) => {
                    if b > *eb {
                        *eb = b;
                        *ec = nc;
                    } else if b == *eb {
                        *ec = ec.checked_add(nc).ok_or(Error::CountOverflow)?;
                    }
                }
            }
        }
    }
    let (best, degeneracy) = fin[n_h].expect("every composition 0..=n is reachable");

    let witnesses = if want_witnesses {
        let mut masks: Vec<u64> = Vec::new();
        collect_witnesses(&components, &layers, &dp, &free, n_h, best, &mut masks);
        masks.sort_unstable();
        Some(masks.into_iter().map(|m| HpSequence::from_bits(n, m)).collect())
    } else {
        None
    };

    Ok(MinEhpSolution { n_h, min_ehp: -best, degeneracy, witnesses })
}

/// Enumerate all global H-placements achieving `best` contacts with `n_h`
/// selected beads, walking the knapsack layers backwards.
fn collect_witnesses(
    components: &[Component],
    layers: &[Vec<Option<(i64, u128)>>],
    dp_after: &[Option<(i64, u128)>],
    free: &[u8],
    n_h: usize,
    best: i64,
    out: &mut Vec<u64>,
) {
    // Split n_h between the component part and the free pool.
    for k in 0..=n_h {
        let f = n_h - k;
        if f > free.len() || k >= dp_after.len() {
            continue;
        }
        let Some((b, _)) = dp_after[k] else { continue };
        if b != best {
            continue;
        }
        let mut comp_masks: Vec<u64> = Vec::new();
        backtrack_components(components, layers, components.len(), k, b, 0, &mut comp_masks);
        let free_masks = subsets_of(free, f);
        for cm in &comp_masks {
            for fm in &free_masks {
                out.push(cm | fm);
            }
        }
    }
}

fn backtrack_components(
    components: &[Component],
    layers: &[Vec<Option<(i64, u128)>>],
    m: usize,
    k: usize,
    target_best: i64,
    acc: u64,
    out: &mut Vec<u64>,
) {
    if m == 0 {
        if k == 0 && target_best == 0 {
            out.push(acc);
        }
        return;
    }
    let comp = &components[m - 1];
    let prev = &layers[m - 1];
    for kc in 0..=comp.verts.len().min(k) {
        let Some((pb, _)) = prev[k - kc] else { continue };
        if pb + comp.best[kc] != target_best {
            continue;
        }
        for local in comp.optimal_masks(kc) {
            let mut global = acc;
            for (bit, &v) in comp.verts.iter().enumerate() {
                if (local >> bit) & 1 == 1 {
                    global |= 1u64 << v;
                }
            }
            backtrack_components(components, layers, m - 1, k - kc, pb, global, out);
        }
    }
}

fn subsets_of(verts: &[u8], k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut current = 0u64;
    fn rec(verts: &[u8], k: usize, start: usize, current: &mut u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(*current);
            return;
        }
        if verts.len() - start < k {
            return;
        }
        for i in start..verts.len() {
            *current |= 1u64 << verts[i];
            rec(verts, k - 1, i + 1, current, out);
            *current &= !(1u64 << verts[i]);
        }
    }
    rec(verts, k, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    #[test]
    fn three_beads_two_classes() {
        let moves: Vec<String> =
            enumerate_structures(3, DEFAULT_ENUM_LIMIT).unwrap().iter().map(|s| s.moves_string()).collect();
        assert_eq!(moves, vec!["RR".to_string(), "RU".to_string()]);
    }

    #[test]
    fn four_beads_five_classes() {
        assert_eq!(enumerate_structures(4, DEFAULT_ENUM_LIMIT).unwrap().len(), 5);
    }

    #[test]
    fn one_bead_single_empty_walk() {
        let s = enumerate_structures(1, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].moves_string(), "");
    }

    #[test]
    fn refuses_beyond_limit() {
        assert!(matches!(
            enumerate_structures(17, DEFAULT_ENUM_LIMIT),
            Err(Error::LimitExceeded { requested: 17, limit: 16 })
        ));
    }

    /// Oracle: brute force over all 4^(n-1) move strings, canonicalize, dedup.
    fn brute_canonical(n: usize) -> Vec<String> {
        let n_moves = n - 1;
        let mut out: Vec<String> = Vec::new();
        for code in 0u64..4u64.pow(n_moves as u32) {
            let moves: Vec<Move> =
                (0..n_moves).map(|i| Move::from_ordinal(((code >> (2 * i)) & 3) as u8)).collect();
            if let Ok(s) = LatticeStructure::from_move_vec(moves) {
                out.push(s.canonicalize().moves_string());
            }
        }
        // Lexicographic in the move order R < U < D < L, not ASCII.
        out.sort_by_key(|m| LatticeStructure::from_moves(m).unwrap().moves().to_vec());
        out.dedup();
        out
    }

    #[test]
    fn matches_brute_force_census_small_n() {
        for n in 2..=6 {
            let ours: Vec<String> = structure_set(n, DEFAULT_ENUM_LIMIT)
                .unwrap()
                .iter_moves()
                .collect();
            assert_eq!(ours, brute_canonical(n), "census mismatch at n={n}");
        }
    }

    #[test]
    fn emitted_walks_are_canonical_and_sorted() {
        let set = structure_set(9, DEFAULT_ENUM_LIMIT).unwrap();
        let moves: Vec<String> = set.iter_moves().collect();
        let mut sorted = moves.clone();
        // Lexicographic in the move order R < U < D < L.
        sorted.sort_by_key(|s| LatticeStructure::from_moves(s).unwrap().moves().to_vec());
        assert_eq!(moves, sorted);
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..100 {
            let idx = rng.gen_range(0..set.count() as u32);
            let s = set.structure(idx);
            assert!(s.is_canonical());
        }
    }

    #[test]
    fn folds_hpph_to_unit_square() {
        let seq = HpSequence::from_text("HPPH").unwrap();
        let fold = fold_sequence(&seq, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(fold.min_ehp, -1);
        assert!(fold.unique);
        assert_eq!(fold.ground_states, vec!["RUL".to_string()]);
    }

    #[test]
    fn all_p_ties_every_structure() {
        let seq = HpSequence::all_p(5);
        let fold = fold_sequence(&seq, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(fold.min_ehp, 0);
        assert!(!fold.unique);
        assert_eq!(fold.ground_states.len(), structure_set(5, 16).unwrap().count());
    }

    #[test]
    fn fold_minimum_bounds_every_structure() {
        let mut rng = StdRng::seed_from_u64(5);
        let set = structure_set(9, DEFAULT_ENUM_LIMIT).unwrap();
        for _ in 0..20 {
            let seq = HpSequence::from_bits(9, rng.gen_range(0..1 << 9));
            let fold = fold_sequence(&seq, DEFAULT_ENUM_LIMIT).unwrap();
            for _ in 0..50 {
                let s = set.structure(rng.gen_range(0..set.count() as u32));
                assert!(fold.min_ehp <= hp_energy(&s.contact_map(), &seq).unwrap());
            }
        }
    }

    /// Oracle: designability from first principles for tiny n, folding every
    /// sequence over the brute-force census with direct energy evaluation.
    fn brute_designability(n: usize) -> HashMap<String, u64> {
        let census = brute_canonical(n);
        let cmaps: Vec<ContactMap> = census
            .iter()
            .map(|m| LatticeStructure::from_moves(m).unwrap().contact_map())
            .collect();
        let mut counts: HashMap<String, u64> = HashMap::new();
        for bits in 0..1u64 << n {
            let seq = HpSequence::from_bits(n, bits);
            let energies: Vec<i64> =
                cmaps.iter().map(|c| hp_energy(c, &seq).unwrap()).collect();
            let min = *energies.iter().min().unwrap();
            let winners: Vec<usize> =
                (0..census.len()).filter(|&i| energies[i] == min).collect();
            if winners.len() == 1 {
                *counts.entry(census[winners[0]].clone()).or_default() += 1;
            }
        }
        counts
    }

    #[test]
    fn designability_matches_brute_force() {
        for n in [4usize, 6] {
            let oracle = brute_designability(n);
            let ranking = designability(n, DEFAULT_DESIGNABILITY_LIMIT).unwrap();
            for rec in &ranking {
                assert_eq!(
                    rec.count,
                    oracle.get(&rec.moves).copied().unwrap_or(0),
                    "count mismatch for {} at n={n}",
                    rec.moves
                );
            }
        }
    }

    #[test]
    fn unit_square_tops_designability_at_n4() {
        let ranking = designability(4, DEFAULT_DESIGNABILITY_LIMIT).unwrap();
        assert_eq!(ranking[0].moves, "RUL");
        assert_eq!(ranking[0].count, 4); // HxxH patterns
        assert!(most_designable(4, DEFAULT_DESIGNABILITY_LIMIT).unwrap().moves_string() == "RUL");
    }

    #[test]
    fn designability_ranking_is_descending_with_move_tiebreak() {
        let ranking = designability(6, DEFAULT_DESIGNABILITY_LIMIT).unwrap();
        for w in ranking.windows(2) {
            let a = LatticeStructure::from_moves(&w[0].moves).unwrap().moves().to_vec();
            let b = LatticeStructure::from_moves(&w[1].moves).unwrap().moves().to_vec();
            assert!(w[0].count > w[1].count || (w[0].count == w[1].count && a < b));
        }
    }

    #[test]
    fn unique_fraction_sane_at_n10_to_n12() {
        for n in 10..=12 {
            let f = unique_ground_state_fraction(n, DEFAULT_DESIGNABILITY_LIMIT).unwrap();
            assert!(f > 0.005 && f < 0.10, "fraction {f} at n={n} outside sanity band");
        }
    }

    #[test]
    fn fold_result_serializes_with_stable_schema() {
        let fold = fold_sequence(&HpSequence::from_text("HPPH").unwrap(), 16).unwrap();
        let v = serde_json::to_value(&fold).unwrap();
        assert_eq!(v["min_ehp"], -1);
        assert_eq!(v["unique"], true);
        assert_eq!(v["ground_state_moves"][0], "RUL");
    }

    #[test]
    fn min_ehp_oracle_forced_placement() {
        let cmap = ContactMap::new(4, &[(0, 3)]).unwrap();
        let sol = min_ehp_oracle(&cmap, 2, true).unwrap();
        assert_eq!(sol.min_ehp, -1);
        assert_eq!(sol.degeneracy, 1);
        assert_eq!(
            sol.witnesses.unwrap(),
            vec![HpSequence::from_text("HPPH").unwrap()]
        );
    }

    #[test]
    fn min_ehp_oracle_all_h() {
        let s = LatticeStructure::from_moves("RULLDLDRDRUR").unwrap();
        let cmap = s.contact_map();
        let sol = min_ehp_oracle(&cmap, cmap.n(), false).unwrap();
        assert_eq!(sol.min_ehp, -(cmap.len() as i64));
        assert_eq!(sol.degeneracy, 1);
    }

    #[test]
    fn min_ehp_oracle_rejects_bad_composition() {
        let cmap = ContactMap::new(4, &[(0, 3)]).unwrap();
        assert!(matches!(
            min_ehp_oracle(&cmap, 5, false),
            Err(Error::CompositionOutOfRange { n_h: 5, n: 4 })
        ));
    }

    /// Oracle: direct enumeration of all C(n, n_h) placements.
    fn brute_min_ehp(cmap: &ContactMap, n_h: usize) -> (i64, u128, Vec<u64>) {
        let n = cmap.n();
        let mut best = i64::MAX;
        let mut count = 0u128;
        let mut wits = Vec::new();
        for mask in 0u64..1 << n {
            if mask.count_ones() as usize != n_h {
                continue;
            }
            let e = -(hh_contacts(cmap.contacts(), mask) as i64);
            if e < best {
                best = e;
                count = 1;
                wits.clear();
                wits.push(mask);
            } else if e == best {
                count += 1;
                wits.push(mask);
            }
        }
        (best, count, wits)
    }

    #[test]
    fn oracle_matches_brute_force_on_random_structures() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let s = crate::lattice::tests::random_saw(12, &mut rng);
            let cmap = s.contact_map();
            for n_h in 0..=12 {
                let sol = min_ehp_oracle(&cmap, n_h, true).unwrap();
                let (be, bc, bw) = brute_min_ehp(&cmap, n_h);
                assert_eq!(sol.min_ehp, be);
                assert_eq!(sol.degeneracy, bc);
                let wits: Vec<u64> =
                    sol.witnesses.as_ref().unwrap().iter().map(|w| w.bits()).collect();
                assert_eq!(wits, bw);
                assert_eq!(sol.degeneracy as usize, sol.witnesses.unwrap().len());
            }
        }
    }

    #[test]
    fn witnesses_evaluate_to_min() {
        let s = LatticeStructure::from_moves("RULURULLDDL").unwrap();
        let cmap = s.contact_map();
        for n_h in 0..=cmap.n() {
            let sol = min_ehp_oracle(&cmap, n_h, true).unwrap();
            for w in sol.witnesses.unwrap() {
                assert_eq!(w.n_h(), n_h);
                assert_eq!(hp_energy(&cmap, &w).unwrap(), sol.min_ehp);
            }
        }
    }

    #[test]
    fn population_uniform_at_beta_zero() {
        let seq = HpSequence::from_text("HPPH").unwrap();
        let target = LatticeStructure::from_moves("RUL").unwrap();
        let p = target_population(&seq, &target, 0.0, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((p - 0.2).abs() < 1e-12); // five 4-bead structures
    }

    #[test]
    fn population_unit_square_beta_one() {
        let seq = HpSequence::from_text("HPPH").unwrap();
        let target = LatticeStructure::from_moves("RUL").unwrap();
        let p = target_population(&seq, &target, 1.0, DEFAULT_ENUM_LIMIT).unwrap();
        let e = std::f64::consts::E;
        assert!((p - e / (e + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn population_approaches_one_for_unique_ground_state() {
        let seq = HpSequence::from_text("HPPH").unwrap();
        let target = LatticeStructure::from_moves("RUL").unwrap();
        let p = target_population(&seq, &target, 40.0, DEFAULT_ENUM_LIMIT).unwrap();
        assert!(p > 0.999);
    }
}
