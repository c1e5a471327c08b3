//! Balls of reduced words in the free group `F_d`.

use crate::model::{GraphFamily, Side};

/// All reduced words of length `<= radius`, breadth-first, each node
/// referring to its parent (the word with the last letter removed).
#[derive(Clone, Debug)]
pub struct FreeBall {
    generators: usize,
    radius: usize,
    nodes: Vec<BallNode>,
}

#[derive(Clone, Copy, Debug)]
pub struct BallNode {
    /// `None` for the identity.
    pub parent: Option<usize>,
    /// Last letter of the word; the node is `parent · side`.
    pub side: Option<Side>,
    pub depth: usize,
}

impl FreeBall {
    /// Number of reduced words of length `<= radius`, saturating.
    pub fn size(generators: usize, radius: usize) -> u64 {
        let branch = (2 * generators as u64).saturating_sub(1);
        let mut layer = 2 * generators as u64;
        let mut total = 1u64;
        for _ in 0..radius {
            total = total.saturating_add(layer);
            layer = layer.saturating_mul(branch);
        }
        total
    }

    pub fn new(generators: usize, radius: usize) -> Self {
        let mut nodes = vec![BallNode {
            parent: None,
            side: None,
            depth: 0,
        }];
        let mut frontier = 0..1;
        for depth in 1..=radius {
            let start = nodes.len();
            for p in frontier.clone() {
                let incoming = nodes[p].side;
                for side in Side::all(generators) {
                    if Some(side.inv()) == incoming {
                        continue;
                    }
                    nodes.push(BallNode {
                        parent: Some(p),
                        side: Some(side),
                        depth,
                    });
                }
            }
            frontier = start..nodes.len();
        }
        FreeBall {
            generators,
            radius,
            nodes,
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The word spelled by `node`.
    pub fn word(&self, mut node: usize) -> Vec<Side> {
        let mut out = Vec::new();
        while let (Some(p), Some(s)) = (self.nodes[node].parent, self.nodes[node].side) {
            out.push(s);
            node = p;
        }
        out.reverse();
        out
    }
}

/// A letter for every node of a [`FreeBall`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallLabeling {
    pub generators: usize,
    pub radius: usize,
    pub labels: Vec<usize>,
}

impl BallLabeling {
    /// Checks every edge of the ball: for `v = u · g_i` the pair
    /// `label(u) → label(v)` must be an edge of `Γ_i`, and for
    /// `v = u · g_i^{-1}` the pair `label(v) → label(u)`.
    pub fn is_valid(&self, graphs: &GraphFamily) -> bool {
        if graphs.generators() != self.generators {
            return false;
        }
        let ball = FreeBall::new(self.generators, self.radius);
        if ball.len() != self.labels.len()
            || self.labels.iter().any(|&a| a >= graphs.letter_count())
        {
            return false;
        }
        ball.nodes()
            .iter()
            .enumerate()
            .all(|(v, node)| match (node.parent, node.side) {
                (Some(u), Some(side)) => graphs.compatible(self.labels[u], side, self.labels[v]),
                _ => true,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        for d in 1..=3 {
            for r in 0..=4 {
                assert_eq!(FreeBall::new(d, r).len() as u64, FreeBall::size(d, r));
            }
        }
        assert_eq!(FreeBall::size(2, 2), 1 + 4 + 12);
    }

    #[test]
    fn words_are_reduced() {
        let ball = FreeBall::new(2, 3);
        for v in 0..ball.len() {
            let w = ball.word(v);
            assert_eq!(w.len(), ball.nodes()[v].depth);
            assert!(crate::model::first_cancellation(&w).is_none());
        }
    }
}
