//! Simple cycles up to rotation, abundance vectors, and decomposition of
//! closed walks into simple cycles.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::Digraph;

/// A simple cycle `a_1 → … → a_k → a_1`, stored as its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleClass {
    vertices: Vec<usize>,
}

impl CycleClass {
    /// Canonicalizes `vertices` to the lexicographically least rotation.
    /// Returns `None` for an empty sequence or one with a repeated vertex.
    pub fn new(vertices: Vec<usize>) -> Option<Self> {
        if vertices.is_empty() {
            return None;
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(CycleClass {
            vertices: least_rotation(&vertices),
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when every step, including the closing one, is an edge of `graph`.
    pub fn is_cycle_of(&self, graph: &Digraph) -> bool {
        let k = self.vertices.len();
        (0..k).all(|i| {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
            a < graph.vertex_count() && b < graph.vertex_count() && graph.has_edge(a, b)
        })
    }
}

fn least_rotation(seq: &[usize]) -> Vec<usize> {
    (0..seq.len())
        .map(|r| {
            seq[r..]
                .iter()
                .chain(&seq[..r])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .expect("nonempty")
}

/// Per-letter occurrence counts `|w|_a`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbundanceVector {
    counts: BTreeMap<usize, usize>,
}

impl AbundanceVector {
    pub fn of(letters: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &a in letters {
            *counts.entry(a).or_insert(0) += 1;
        }
        AbundanceVector { counts }
    }

    pub fn get(&self, letter: usize) -> usize {
        self.counts.get(&letter).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&a, &c)| (a, c))
    }
}

pub fn abundance(cycle: &CycleClass) -> AbundanceVector {
    AbundanceVector::of(&cycle.vertices)
}

/// All simple cycles of `graph`, one per rotation class, sorted.
///
/// Johnson's algorithm: for each start vertex `s` in increasing order, search
/// the strongly connected component of `s` within the subgraph induced by
/// vertices `>= s`, using blocked sets to avoid fruitless re-exploration.
pub fn enumerate_simple_cycles(graph: &Digraph) -> Vec<CycleClass> {
    let n = graph.vertex_count();
    let mut out = Vec::new();
    for s in 0..n {
        let component = component_of(graph, s);
        if component.iter().filter(|&&in_c| in_c).count() == 1 && !graph.has_edge(s, s) {
            continue;
        }
        let mut search = Johnson {
            graph,
            allowed: component,
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            start: s,
            out: &mut out,
        };
        search.circuit(s);
    }
    // each cycle is emitted from its least vertex, which is already its least rotation
    out.sort();
    out
}

struct Johnson<'a> {
    graph: &'a Digraph,
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    start: usize,
    out: &'a mut Vec<CycleClass>,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in self.graph.successors(v) {
            if !self.allowed[w] {
                continue;
            }
            if w == self.start {
                self.out.push(CycleClass {
                    vertices: self.stack.clone(),
                });
                found = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in self.graph.successors(v) {
                if self.allowed[w] && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }

    fn unblock(&mut self, v: usize) {
        let mut pending = vec![v];
        while let Some(u) = pending.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            pending.extend(std::mem::take(&mut self.blocked_by[u]));
        }
    }
}

/// Membership mask of the SCC containing `s` in the subgraph induced by `s..n`.
fn component_of(graph: &Digraph, s: usize) -> Vec<bool> {
    let n = graph.vertex_count();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let next = if forward {
                graph.successors(v)
            } else {
                graph.predecessors(v)
            };
            for &w in next {
                if w >= s && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(&a, &b)| a && b).collect()
}

/// Decomposes a closed walk into simple cycles with multiplicities.
///
/// `walk` lists the visited vertices with the start repeated at the end
/// (`0, 1, 2, 0`). The simple cycle between the closest pair of equal
/// vertices is excised repeatedly, leftmost pair first, until the residue
/// is itself simple.
pub fn decompose_cycle(walk: &[usize], graph: &Digraph) -> Result<BTreeMap<CycleClass, usize>> {
    if walk.len() < 2 {
        return Err(Error::InvalidWalk(
            "a closed walk needs at least one step".into(),
        ));
    }
    if walk.first() != walk.last() {
        return Err(Error::InvalidWalk(format!(
            "walk starts at {} but ends at {}",
            walk[0],
            walk[walk.len() - 1]
        )));
    }
    for pair in walk.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= graph.vertex_count() || b >= graph.vertex_count() || !graph.has_edge(a, b) {
            return Err(Error::InvalidWalk(format!("{a} -> {b} is not an edge")));
        }
    }

    let mut residue: Vec<usize> = walk[..walk.len() - 1].to_vec();
    let mut out = BTreeMap::new();
    while let Some((i, j)) = closest_repetition(&residue) {
        let cycle = CycleClass::new(residue[i..j].to_vec())
            .expect("closest repetition spans distinct vertices");
        *out.entry(cycle).or_insert(0) += 1;
        residue.drain(i..j);
    }
    let cycle = CycleClass::new(residue).expect("residue is nonempty and simple");
    *out.entry(cycle).or_insert(0) += 1;
    Ok(out)
}

/// Pair `(i, j)`, `i < j`, with `seq[i] == seq[j]` minimizing `j - i`, then `i`.
fn closest_repetition(seq: &[usize]) -> Option<(usize, usize)> {
    let mut last_seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut best: Option<(usize, usize)> = None;
    for (j, &v) in seq.iter().enumerate() {
        if let Some(&i) = last_seen.get(&v) {
            let better = match best {
                None => true,
                Some((bi, bj)) => j - i < bj - bi || (j - i == bj - bi && i < bi),
            };
            if better {
                best = Some((i, j));
            }
        }
        last_seen.insert(v, j);
    }
    best
}
