//! 2D HP lattice structures, sequences, contact maps and energies.
//!
//! A structure is a self-avoiding walk on the square lattice, stored as a
//! move string over `{U, D, L, R}`; coordinates are derived from `(0, 0)`.
//! Structure identity is taken modulo translation, rotation and reflection;
//! [`LatticeStructure::canonicalize`] picks the lexicographically smallest
//! move string over the eight dihedral images (move order `R < U < D < L`),
//! which is exactly the walk whose first move is `R` and whose first turn,
//! if any, is `U`.

use crate::error::{Error, Result};
use crate::rational::Rat;
use std::collections::HashSet;
use std::fmt;

/// Maximum bead count accepted for structures and sequences.
pub const MAX_BEADS: usize = 64;

/// One step of a walk. The declaration order defines the lexicographic
/// order used for canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    R = 0,
    U = 1,
    D = 2,
    L = 3,
}

impl Move {
    pub fn from_char(c: char) -> Option<Move> {
        match c {
            'R' => Some(Move::R),
            'U' => Some(Move::U),
            'D' => Some(Move::D),
            'L' => Some(Move::L),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Move::R => 'R',
            Move::U => 'U',
            Move::D => 'D',
            Move::L => 'L',
        }
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Move::R => (1, 0),
            Move::U => (0, 1),
            Move::D => (0, -1),
            Move::L => (-1, 0),
        }
    }

    pub(crate) fn from_ordinal(v: u8) -> Move {
        match v & 3 {
            0 => Move::R,
            1 => Move::U,
            2 => Move::D,
            _ => Move::L,
        }
    }
}

/// The eight dihedral symmetries of the square lattice, each given as a
/// permutation of move directions indexed by `Move as usize`.
pub const DIHEDRAL: [[Move; 4]; 8] = [
    // identity
    [Move::R, Move::U, Move::D, Move::L],
    // rotations by 90, 180, 270 degrees (counterclockwise)
    [Move::U, Move::L, Move::R, Move::D],
    [Move::L, Move::D, Move::U, Move::R],
    [Move::D, Move::R, Move::L, Move::U],
    // mirror about the x-axis, then the same three rotations
    [Move::R, Move::D, Move::U, Move::L],
    [Move::U, Move::R, Move::L, Move::D],
    [Move::L, Move::U, Move::D, Move::R],
    [Move::D, Move::L, Move::R, Move::U],
];

/// A self-avoiding walk on the square lattice (the target conformation).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeStructure {
    moves: Vec<Move>,
    coords: Vec<(i32, i32)>,
}

impl LatticeStructure {
    /// Parse a move string such as `"RUL"`. A single bead is the empty string.
    pub fn from_moves(text: &str) -> Result<Self> {
        let mut moves = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            moves.push(Move::from_char(c).ok_or(Error::InvalidCharacter { index: i, ch: c })?);
        }
        Self::from_move_vec(moves)
    }

    pub fn from_move_vec(moves: Vec<Move>) -> Result<Self> {
        if moves.len() + 1 > MAX_BEADS {
            return Err(Error::TooLarge { n: moves.len() + 1, limit: MAX_BEADS });
        }
        let coords = walk_coords(&moves)?;
        Ok(LatticeStructure { moves, coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn moves_string(&self) -> String {
        self.moves.iter().map(|m| m.to_char()).collect()
    }

    pub fn coords(&self) -> &[(i32, i32)] {
        &self.coords
    }

    /// Lexicographically smallest move string over the eight dihedral images.
    /// Idempotent; two walks have equal canonical forms iff they are related
    /// by translation, rotation or reflection.
    pub fn canonicalize(&self) -> LatticeStructure {
        let mut best: Option<Vec<Move>> = None;
        for table in &DIHEDRAL {
            let image: Vec<Move> = self.moves.iter().map(|&m| table[m as usize]).collect();
            if best.as_ref().map_or(true, |b| image < *b) {
                best = Some(image);
            }
        }
        let moves = best.unwrap_or_default();
        let coords = walk_coords(&moves).expect("symmetry image of a valid walk is valid");
        LatticeStructure { moves, coords }
    }

    pub fn is_canonical(&self) -> bool {
        self.moves == self.canonicalize().moves
    }

    /// Non-consecutive lattice nearest-neighbor pairs.
    pub fn contact_map(&self) -> ContactMap {
        ContactMap::from_structure(self)
    }
}

impl fmt::Display for LatticeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.moves_string())
    }
}

fn walk_coords(moves: &[Move]) -> Result<Vec<(i32, i32)>> {
    let mut coords = Vec::with_capacity(moves.len() + 1);
    let mut seen = HashSet::with_capacity(moves.len() + 1);
    let mut pos = (0i32, 0i32);
    coords.push(pos);
    seen.insert(pos);
    for (i, m) in moves.iter().enumerate() {
        let (dx, dy) = m.delta();
        pos = (pos.0 + dx, pos.1 + dy);
        if !seen.insert(pos) {
            return Err(Error::SelfIntersection { bead: i + 1 });
        }
        coords.push(pos);
    }
    Ok(coords)
}

/// Symmetric binary relation of non-consecutive lattice-adjacent bead pairs.
///
/// The map also accepts hand-written pair sets that do not arise from a
/// lattice walk; only `j > i + 1` is required, lattice parity is not assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactMap {
    n: usize,
    contacts: Vec<(u8, u8)>,
}

impl ContactMap {
    /// Build from explicit pairs. Pairs are normalized to `i < j`, sorted and
    /// deduplicated; every pair must satisfy `j > i + 1` and `j < n`.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_BEADS * 4 {
            return Err(Error::TooLarge { n, limit: MAX_BEADS * 4 });
        }
        let mut contacts = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i + 1 >= j || j >= n {
                return Err(Error::InvalidContact { i: a, j: b });
            }
            contacts.push((i as u8, j as u8));
        }
        contacts.sort_unstable();
        contacts.dedup();
        Ok(ContactMap { n, contacts })
    }

    pub fn from_structure(s: &LatticeStructure) -> ContactMap {
        let coords = s.coords();
        let mut contacts = Vec::new();
        for i in 0..coords.len() {
            for j in i + 2..coords.len() {
                let dx = (coords[i].0 - coords[j].0).abs();
                let dy = (coords[i].1 - coords[j].1).abs();
                if dx + dy == 1 {
                    contacts.push((i as u8, j as u8));
                }
            }
        }
        contacts.sort_unstable();
        ContactMap { n: s.n(), contacts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    pub fn contacts(&self) -> &[(u8, u8)] {
        &self.contacts
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.contacts.binary_search(&(i as u8, j as u8)).is_ok()
    }
}

/// An HP sequence: bit `i` set means bead `i` is hydrophobic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HpSequence {
    n: usize,
    bits: u64,
}

impl HpSequence {
    pub fn from_text(text: &str) -> Result<Self> {
        if text.len() > MAX_BEADS {
            return Err(Error::TooLarge { n: text.len(), limit: MAX_BEADS });
        }
        let mut bits = 0u64;
        for (i, c) in text.chars().enumerate() {
            match c {
                'H' => bits |= 1 << i,
                'P' => {}
                _ => return Err(Error::InvalidCharacter { index: i, ch: c }),
            }
        }
        Ok(HpSequence { n: text.len(), bits })
    }

    /// Interpret the low `n` bits of `bits` as a sequence (1 = H).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        debug_assert!(n <= MAX_BEADS);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        HpSequence { n, bits: bits & mask }
    }

    pub fn all_p(n: usize) -> Self {
        HpSequence::from_bits(n, 0)
    }

    pub fn all_h(n: usize) -> Self {
        HpSequence::from_bits(n, u64::MAX)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of H beads.
    pub fn n_h(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_h(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn with_flipped(&self, i: usize) -> Self {
        HpSequence { n: self.n, bits: self.bits ^ (1 << i) }
    }
}

impl fmt::Display for HpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.is_h(i) { "H" } else { "P" })?;
        }
        Ok(())
    }
}

impl serde::Serialize for HpSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The design energy `-sum w_ij s_i s_j + lambda (sum s_i - n_h)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignEnergyModel {
    cmap: ContactMap,
    lambda: Rat,
    n_h: usize,
}

impl DesignEnergyModel {
    pub fn new(cmap: ContactMap, lambda: Rat, n_h: usize) -> Result<Self> {
        if n_h > cmap.n() {
            return Err(Error::CompositionOutOfRange { n_h, n: cmap.n() });
        }
        if lambda < Rat::from_integer(0) {
            return Err(Error::NonpositiveParameter { name: "lambda" });
        }
        Ok(DesignEnergyModel { cmap, lambda, n_h })
    }

    pub fn cmap(&self) -> &ContactMap {
        &self.cmap
    }

    pub fn lambda(&self) -> Rat {
        self.lambda
    }

    pub fn n_h(&self) -> usize {
        self.n_h
    }

    pub fn n(&self) -> usize {
        self.cmap.n()
    }
}

/// HH-contact energy: minus the number of contacts whose beads are both H.
pub fn hp_energy(cmap: &ContactMap, seq: &HpSequence) -> Result<i64> {
    if cmap.n() != seq.n() {
        return Err(Error::LengthMismatch { expected: cmap.n(), got: seq.n() });
    }
    Ok(-(hh_contacts(cmap.contacts(), seq.bits()) as i64))
}

pub(crate) fn hh_contacts(contacts: &[(u8, u8)], bits: u64) -> u32 {
    let mut hh = 0u32;
    for &(i, j) in contacts {
        hh += ((bits >> i) & (bits >> j) & 1) as u32;
    }
    hh
}

/// Exact design energy, Lagrange term included.
pub fn design_energy(model: &DesignEnergyModel, seq: &HpSequence) -> Result<Rat> {
    let contact_term = hp_energy(&model.cmap, seq)?;
    let dev = seq.n_h() as i64 - model.n_h as i64;
    Ok(Rat::from_integer(contact_term) + model.lambda * Rat::from_integer(dev * dev))
}
