//! Update schedules and the backward partition process they induce.

use serde::Serialize;

use crate::error::{Error, Result};

/// Coordinate pairs updated at times `start, start + 1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpdateSchedule {
    start: usize,
    pairs: Vec<(usize, usize)>,
}

impl UpdateSchedule {
    pub fn new(start: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(k) = pairs.iter().position(|(a, b)| a == b) {
            return Err(Error::InvalidParameter(format!(
                "schedule entry at time {} updates a single coordinate",
                start + k
            )));
        }
        Ok(UpdateSchedule { start, pairs })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// One past the last scheduled time.
    pub fn end(&self) -> usize {
        self.start + self.pairs.len()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn at(&self, t: usize) -> (usize, usize) {
        self.pairs[t - self.start]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Disjoint sets with explicit member lists and smallest elements.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    members: Vec<Vec<usize>>,
    min: Vec<usize>,
    blocks: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            members: (0..n).map(|i| vec![i]).collect(),
            min: (0..n).collect(),
            blocks: n,
        }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn members(&mut self, a: usize) -> &[usize] {
        let r = self.find(a);
        &self.members[r]
    }

    /// Merges the blocks of `a` and `b`. When they were distinct, returns
    /// them as `(smaller, other)`, ties going to the block holding the
    /// smaller element, each sorted.
    pub fn union(&mut self, a: usize, b: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let a_first = match self.members[ra].len().cmp(&self.members[rb].len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.min[ra] < self.min[rb],
        };
        let (small, big) = if a_first { (ra, rb) } else { (rb, ra) };
        let mut s1 = self.members[small].clone();
        let mut s2 = self.members[big].clone();
        s1.sort_unstable();
        s2.sort_unstable();
        // Attach the shorter member list under the longer one.
        let (child, root) = if self.members[small].len() <= self.members[big].len() {
            (small, big)
        } else {
            (big, small)
        };
        let moved = std::mem::take(&mut self.members[child]);
        self.members[root].extend(moved);
        self.min[root] = self.min[root].min(self.min[child]);
        self.parent[child] = root;
        self.blocks -= 1;
        Some((s1, s2))
    }
}

/// A time at which two blocks of `P_{t+1}` merge into one block of `P_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedTime {
    pub t: usize,
    /// The smaller merged block.
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

/// `P_t` is the set of connected components of the graph on `0..n` whose
/// edges are the pairs updated at times `≥ t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionProcess {
    pub n: usize,
    pub start: usize,
    pub end: usize,
    /// Merge times, latest first.
    pub marked: Vec<MarkedTime>,
    /// Smallest `τ` with `P_{end−τ}` a single block.
    pub tau: Option<usize>,
}

impl PartitionProcess {
    pub fn build(sched: &UpdateSchedule, n: usize) -> Self {
        let mut uf = UnionFind::new(n);
        let mut marked = Vec::with_capacity(n.saturating_sub(1));
        let mut tau = if n <= 1 { Some(0) } else { None };
        for t in (sched.start()..sched.end()).rev() {
            let (a, b) = sched.at(t);
            if let Some((s1, s2)) = uf.union(a, b) {
                marked.push(MarkedTime { t, s1, s2 });
                if uf.blocks() == 1 {
                    tau = Some(sched.end() - t);
                    break;
                }
            }
        }
        PartitionProcess {
            n,
            start: sched.start(),
            end: sched.end(),
            marked,
            tau,
        }
    }

    /// `P_start` is a single block.
    pub fn connected(&self) -> bool {
        self.tau.is_some()
    }

    /// Blocks of `P_t`, each sorted, ordered by smallest element.
    pub fn partition_at(&self, t: usize) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for m in self.marked.iter().take_while(|m| m.t >= t) {
            uf.union(m.s1[0], m.s2[0]);
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; self.n];
        for a in 0..self.n {
            let r = uf.find(a);
            if !seen[r] {
                seen[r] = true;
                let mut b = uf.members(a).to_vec();
                b.sort_unstable();
                blocks.push(b);
            }
        }
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// Marked times in increasing order.
    pub fn marked_ascending(&self) -> impl Iterator<Item = &MarkedTime> {
        self.marked.iter().rev()
    }
}
