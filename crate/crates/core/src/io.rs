//! Text formats: structure files, contact-map files and the Ising export
//! consumed by the simulation and noise tools.
//!
//! Structure file: line 1 is the move string, an optional line 2 is an HP
//! sequence. Contact-map file: line 1 is the bead count, every following
//! line one `i j` pair (0-based). Ising export: `h i value` and `J i j
//! value` lines plus one `offset value` line; values are exact decimals or
//! `p/q` fractions, zero couplers may be omitted.

use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::lattice::{ContactMap, HpSequence, LatticeStructure};
use crate::rational::{format_rat, parse_rat, Rat};
use std::fs;
use std::path::Path;

pub fn structure_to_string(s: &LatticeStructure, seq: Option<&HpSequence>) -> String {
    match seq {
        Some(seq) => format!("{}\n{}\n", s.moves_string(), seq),
        None => format!("{}\n", s.moves_string()),
    }
}

pub fn structure_from_str(text: &str) -> Result<(LatticeStructure, Option<HpSequence>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let moves = lines.next().ok_or_else(|| Error::Parse("empty structure file".into()))?;
    let structure = LatticeStructure::from_moves(moves)?;
    let seq = match lines.next() {
        Some(line) => {
            let seq = HpSequence::from_text(line)?;
            if seq.n() != structure.n() {
                return Err(Error::LengthMismatch { expected: structure.n(), got: seq.n() });
            }
            Some(seq)
        }
        None => None,
    };
    Ok((structure, seq))
}

pub fn read_structure_file(path: &Path) -> Result<(LatticeStructure, Option<HpSequence>)> {
    structure_from_str(&fs::read_to_string(path)?)
}

pub fn contact_map_to_string(cmap: &ContactMap) -> String {
    let mut out = format!("{}\n", cmap.n());
    for &(i, j) in cmap.contacts() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

pub fn contact_map_from_str(text: &str) -> Result<ContactMap> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty contact-map file".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad bead count".into()))?;
    let mut pairs = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad contact line '{line}'")))?;
        let j: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad contact line '{line}'")))?;
        pairs.push((i, j));
    }
    ContactMap::new(n, &pairs)
}

pub fn read_contact_map_file(path: &Path) -> Result<ContactMap> {
    contact_map_from_str(&fs::read_to_string(path)?)
}

pub fn ising_to_string(p: &IsingProblem) -> String {
    let mut out = String::new();
    for i in 0..p.n() {
        out.push_str(&format!("h {} {}\n", i, format_rat(&p.field(i))));
    }
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            let v = p.coupler(i, j);
            if v != Rat::from_integer(0) {
                out.push_str(&format!("J {} {} {}\n", i, j, format_rat(&v)));
            }
        }
    }
    out.push_str(&format!("offset {}\n", format_rat(&p.offset())));
    out
}

pub fn ising_from_str(text: &str) -> Result<IsingProblem> {
    let mut h_entries: Vec<(usize, Rat)> = Vec::new();
    let mut j_entries: Vec<(usize, usize, Rat)> = Vec::new();
    let mut offset = Rat::from_integer(0);
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("h") => {
                let i: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad field line '{line}'")))?;
                let v = parse_rat(
                    it.next().ok_or_else(|| Error::Parse(format!("bad field line '{line}'")))?,
                )?;
                h_entries.push((i, v));
            }
            Some("J") => {
                let i: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad coupler line '{line}'")))?;
                let j: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad coupler line '{line}'")))?;
                let v = parse_rat(
                    it.next().ok_or_else(|| Error::Parse(format!("bad coupler line '{line}'")))?,
                )?;
                j_entries.push((i, j, v));
            }
            Some("offset") => {
                offset = parse_rat(
                    it.next().ok_or_else(|| Error::Parse(format!("bad offset line '{line}'")))?,
                )?;
            }
            Some(tok) => return Err(Error::Parse(format!("unknown record '{tok}'"))),
            None => {}
        }
    }
    if h_entries.is_empty() {
        return Err(Error::Parse("no field lines".into()));
    }
    let n = h_entries.iter().map(|&(i, _)| i).max().unwrap() + 1;
    let mut h = vec![Rat::from_integer(0); n];
    for (i, v) in h_entries {
        h[i] = v;
    }
    let mut j = vec![Rat::from_integer(0); n * (n - 1) / 2];
    for (a, b, v) in j_entries {
        if a >= n || b >= n || a == b {
            return Err(Error::Parse(format!("coupler ({a}, {b}) out of range")));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        j[a * (2 * n - a - 1) / 2 + (b - a - 1)] = v;
    }
    IsingProblem::new(n, h, j, offset)
}

pub fn read_ising_file(path: &Path) -> Result<IsingProblem> {
    ising_from_str(&fs::read_to_string(path)?)
}

pub fn write_string(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, content)?;
    Ok(())
}
