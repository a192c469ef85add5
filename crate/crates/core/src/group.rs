//! Finite groups stored as dense multiplication tables, symmetric generating
//! sets, and the Cayley graph they define.
//!
//! Elements are `0..n`. The built-in families always place the identity at
//! index 0; loaded tables may put it anywhere.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Axiom, Error, Result};
use crate::rng::seeded;

/// Largest group order accepted anywhere in the crate.
pub const MAX_ORDER: usize = 4096;

/// Orders up to this are checked for associativity exhaustively.
pub const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 100_000;
const ASSOC_SEED: u64 = 0x0A55_0C1A_7E5E_ED00;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    id: usize,
}

impl GroupTable {
    /// Validates a row-major multiplication table and derives the identity
    /// and inverse tables from it.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty group table".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::SizeLimitExceeded(n));
        }
        let mut mul = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n || row.iter().any(|&e| e >= n) {
                return Err(Error::InvariantViolation(Axiom::Closure));
            }
            mul.extend(row.iter().map(|&e| e as u32));
        }
        Self::from_flat(n, mul)
    }

    fn from_flat(n: usize, mul: Vec<u32>) -> Result<Self> {
        let id = (0..n)
            .find(|&e| (0..n).all(|b| mul[e * n + b] as usize == b))
            .ok_or(Error::InvariantViolation(Axiom::Identity))?;
        if (0..n).any(|a| mul[a * n + id] as usize != a) {
            return Err(Error::InvariantViolation(Axiom::Identity));
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul[a * n + b] as usize == id)
                .ok_or(Error::InvariantViolation(Axiom::Inverse))?;
            if mul[b * n + a] as usize != id {
                return Err(Error::InvariantViolation(Axiom::Inverse));
            }
            inv[a] = b as u32;
        }
        let table = GroupTable { n, mul, inv, id };
        table.check_associativity()?;
        Ok(table)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.n;
        let assoc = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        let ok = if n <= EXHAUSTIVE_ASSOC_LIMIT {
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| assoc(a, b, c))))
        } else {
            let mut rng = seeded(ASSOC_SEED);
            (0..SAMPLED_ASSOC_TRIPLES).all(|_| {
                assoc(
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )
            })
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvariantViolation(Axiom::Associativity))
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.id
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.mul[a * self.n..(a + 1) * self.n]
    }
}

/// A symmetric generating set `R` with `id ∉ R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<usize>,
    member: Vec<bool>,
}

impl GeneratorSet {
    pub fn new(group: &GroupTable, gens: &[usize]) -> Result<Self> {
        let n = group.order();
        if gens.is_empty() {
            return Err(Error::InvariantViolation(Axiom::EmptyGenerators));
        }
        let mut member = vec![false; n];
        for &g in gens {
            if g >= n {
                return Err(Error::InvariantViolation(Axiom::Closure));
            }
            if g == group.identity() {
                return Err(Error::InvariantViolation(Axiom::ContainsIdentity));
            }
            if member[g] {
                return Err(Error::InvariantViolation(Axiom::DuplicateGenerator));
            }
            member[g] = true;
        }
        if gens.iter().any(|&g| !member[group.inv(g)]) {
            return Err(Error::InvariantViolation(Axiom::NotSymmetric));
        }
        let set = GeneratorSet {
            gens: gens.to_vec(),
            member,
        };
        if !set.generates(group) {
            return Err(Error::InvariantViolation(Axiom::NotGenerating));
        }
        Ok(set)
    }

    fn generates(&self, group: &GroupTable) -> bool {
        let n = group.order();
        let mut seen = vec![false; n];
        let mut stack = vec![group.identity()];
        seen[group.identity()] = true;
        let mut count = 1;
        while let Some(g) = stack.pop() {
            for &r in &self.gens {
                let h = group.mul(g, r);
                if !seen[h] {
                    seen[h] = true;
                    count += 1;
                    stack.push(h);
                }
            }
        }
        count == n
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.gens
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.gens.iter().copied()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.member.get(g).copied().unwrap_or(false)
    }
}

/// A validated group together with its generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cayley {
    group: GroupTable,
    gens: GeneratorSet,
}

impl Cayley {
    pub fn new(group: GroupTable, gens: &[usize]) -> Result<Self> {
        let gens = GeneratorSet::new(&group, gens)?;
        Ok(Cayley { group, gens })
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    /// `n = |G|`.
    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// `m = |R|`.
    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn into_parts(self) -> (GroupTable, GeneratorSet) {
        (self.group, self.gens)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::SizeLimitExceeded(n))
    } else {
        Ok(())
    }
}

/// `Z_n` with the given residues (reduced mod `n`) as generators.
pub fn build_cyclic(n: usize, residues: &[i64]) -> Result<Cayley> {
    if n == 0 {
        return Err(Error::InvalidParameter("cyclic group needs n >= 1".into()));
    }
    check_order(n)?;
    let mul = (0..n)
        .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
        .collect();
    let group = GroupTable::from_flat(n, mul)?;
    let gens: Vec<usize> = residues
        .iter()
        .map(|&r| r.rem_euclid(n as i64) as usize)
        .collect();
    Cayley::new(group, &gens)
}

/// `Z_n` with `R = Z_n \ {0}`.
pub fn build_complete_cyclic(n: usize) -> Result<Cayley> {
    let gens: Vec<i64> = (1..n as i64).collect();
    build_cyclic(n, &gens)
}

/// `Z_2^k` with the standard basis as generators. Elements are bit masks.
pub fn build_hypercube(k: usize) -> Result<Cayley> {
    if k == 0 {
        return Err(Error::InvalidParameter("hypercube dimension must be >= 1".into()));
    }
    if k > 12 {
        return Err(Error::SizeLimitExceeded(1usize.checked_shl(k as u32).unwrap_or(usize::MAX)));
    }
    let n = 1usize << k;
    let mul = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a ^ b) as u32))
        .collect();
    let group = GroupTable::from_flat(n, mul)?;
    let gens: Vec<usize> = (0..k).map(|i| 1 << i).collect();
    Cayley::new(group, &gens)
}

/// Dihedral group of order `2k`, generated by a rotation, its inverse and
/// one reflection. Element `f * k + i` is `rot^i · refl^f`.
pub fn build_dihedral(k: usize) -> Result<Cayley> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("dihedral group needs k >= 3, got {k}")));
    }
    let n = 2 * k;
    check_order(n)?;
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        let (ai, af) = (a % k, a / k);
        for b in 0..n {
            let (bi, bf) = (b % k, b / k);
            // refl · rot^i = rot^{-i} · refl
            let rot = if af == 0 { (ai + bi) % k } else { (ai + k - bi) % k };
            mul.push(((af ^ bf) * k + rot) as u32);
        }
    }
    let group = GroupTable::from_flat(n, mul)?;
    Cayley::new(group, &[1, k - 1, k])
}

/// Parses the plain-text group format: `n`, then `n` table rows, then one
/// line of generator indices.
pub fn parse_group(text: &str) -> Result<Cayley> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_line = |line: usize, l: &str| -> Result<Vec<usize>> {
        l.split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("{tok:?}: {e}"),
                })
            })
            .collect()
    };
    let (line, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing group order".into(),
    })?;
    let n = match parse_line(line, head)?.as_slice() {
        [n] => *n,
        _ => {
            return Err(Error::Parse {
                line,
                msg: "first line must hold exactly the group order".into(),
            })
        }
    };
    check_order(n)?;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let (line, l) = lines.next().ok_or(Error::Parse {
            line: line + k + 1,
            msg: format!("expected {n} table rows, found {k}"),
        })?;
        let row = parse_line(line, l)?;
        if row.len() != n {
            return Err(Error::Parse {
                line,
                msg: format!("row has {} entries, expected {n}", row.len()),
            });
        }
        rows.push(row);
    }
    let (gline, gl) = lines.next().ok_or(Error::Parse {
        line: line + n + 1,
        msg: "missing generator line".into(),
    })?;
    let gens = parse_line(gline, gl)?;
    if let Some((extra, _)) = lines.next() {
        return Err(Error::Parse {
            line: extra,
            msg: "unexpected trailing content".into(),
        });
    }
    let group = GroupTable::from_rows(&rows)?;
    Cayley::new(group, &gens)
}

pub fn load_group(path: impl AsRef<Path>) -> Result<Cayley> {
    let text = std::fs::read_to_string(path)?;
    parse_group(&text)
}

/// Inverse of [`parse_group`].
pub fn format_group(cayley: &Cayley) -> String {
    let g = cayley.group();
    let mut out = format!("{}\n", g.order());
    for a in 0..g.order() {
        let row: Vec<String> = g.row(a).iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let gens: Vec<String> = cayley.gens().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "{}", gens.join(" "));
    out
}

pub fn save_group(cayley: &Cayley, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_group(cayley))?;
    Ok(())
}

/// Undirected edges `{g, g·r}`, deduplicated, each as `(min, max)`, sorted.
pub fn cayley_edges(cayley: &Cayley) -> Vec<(usize, usize)> {
    let g = cayley.group();
    let mut edges = BTreeSet::new();
    for a in 0..g.order() {
        for r in cayley.gens().iter() {
            let b = g.mul(a, r);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}
