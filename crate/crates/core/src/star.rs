//! The free-group emptiness criterion.
//!
//! A family satisfies it when some nonempty subalphabet gives every letter a
//! successor in every graph without leaving the subalphabet. The canonical
//! subalphabet is the greatest set closed in both directions, computed by
//! synchronous pruning rounds.

use std::collections::BTreeMap;

use crate::ball::{BallLabeling, FreeBall};
use crate::model::{GraphFamily, Side};

/// Result of pruning: the surviving letters and, for each removed letter,
/// the round (1-based) in which it was removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruningTrace {
    pub kept: Vec<usize>,
    pub removed_in_round: Vec<Option<usize>>,
}

impl PruningTrace {
    pub fn rounds(&self) -> usize {
        self.removed_in_round
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Greatest subalphabet in which every letter has an in- and an out-neighbor
/// in every graph.
pub fn prune_star(graphs: &GraphFamily) -> Vec<usize> {
    prune_traced(graphs, true).kept
}

/// Greatest subalphabet in which every letter has an out-neighbor in every graph.
pub fn prune_star_forward(graphs: &GraphFamily) -> Vec<usize> {
    prune_traced(graphs, false).kept
}

pub fn prune_traced(graphs: &GraphFamily, bidirectional: bool) -> PruningTrace {
    let n = graphs.letter_count();
    let mut alive = vec![true; n];
    let mut removed_in_round = vec![None; n];
    let mut round = 0;
    loop {
        round += 1;
        let deficient: Vec<usize> = (0..n)
            .filter(|&a| alive[a])
            .filter(|&a| {
                graphs.graphs().iter().any(|g| {
                    let no_out = !g.successors(a).iter().any(|&b| alive[b]);
                    let no_in = bidirectional && !g.predecessors(a).iter().any(|&b| alive[b]);
                    no_out || no_in
                })
            })
            .collect();
        if deficient.is_empty() {
            break;
        }
        for a in deficient {
            alive[a] = false;
            removed_in_round[a] = Some(round);
        }
    }
    PruningTrace {
        kept: (0..n).filter(|&a| alive[a]).collect(),
        removed_in_round,
    }
}

/// Choice functions over a closed subalphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    pub subalphabet: Vec<usize>,
    /// `forward[(a, i)]`: least out-neighbor of `a` in `Γ_i` within the subalphabet.
    pub forward: BTreeMap<(usize, usize), usize>,
    /// `backward[(a, i)]`: least in-neighbor of `a` in `Γ_i` within the subalphabet.
    pub backward: BTreeMap<(usize, usize), usize>,
}

impl StarWitness {
    pub fn is_valid(&self, graphs: &GraphFamily) -> bool {
        if self.subalphabet.is_empty() {
            return false;
        }
        let inside = |b: &usize| self.subalphabet.binary_search(b).is_ok();
        self.subalphabet.iter().all(|&a| {
            (0..graphs.generators()).all(|i| {
                let g = graphs.graph(i);
                let f = self.forward.get(&(a, i));
                let b = self.backward.get(&(a, i));
                matches!(f, Some(f) if inside(f) && g.has_edge(a, *f))
                    && matches!(b, Some(b) if inside(b) && g.has_edge(*b, a))
            })
        })
    }

    /// The letter placed across `side` from a cell labeled `a`.
    pub fn neighbor(&self, a: usize, side: Side) -> usize {
        let map = if side.inverse {
            &self.backward
        } else {
            &self.forward
        };
        map[&(a, side.generator)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarOutcome {
    Holds(StarWitness),
    Fails(PruningTrace),
}

impl StarOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, StarOutcome::Holds(_))
    }
}

pub fn check_star(graphs: &GraphFamily) -> StarOutcome {
    let trace = prune_traced(graphs, true);
    if trace.kept.is_empty() {
        return StarOutcome::Fails(trace);
    }
    let sub = trace.kept;
    let mut alive = vec![false; graphs.letter_count()];
    for &a in &sub {
        alive[a] = true;
    }
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for &a in &sub {
        for (i, g) in graphs.graphs().iter().enumerate() {
            let f = g
                .successors(a)
                .iter()
                .copied()
                .find(|&b| alive[b])
                .expect("pruned set is closed");
            let b = g
                .predecessors(a)
                .iter()
                .copied()
                .find(|&b| alive[b])
                .expect("pruned set is closed");
            forward.insert((a, i), f);
            backward.insert((a, i), b);
        }
    }
    StarOutcome::Holds(StarWitness {
        subalphabet: sub,
        forward,
        backward,
    })
}

/// Labels the radius-`radius` ball of `F_d` outward from the least letter of
/// the subalphabet using the witness's choice functions.
pub fn build_free_ball(witness: &StarWitness, graphs: &GraphFamily, radius: usize) -> BallLabeling {
    let ball = FreeBall::new(graphs.generators(), radius);
    let mut labels = vec![0; ball.len()];
    labels[0] = witness.subalphabet[0];
    for (v, node) in ball.nodes().iter().enumerate().skip(1) {
        let (p, side) = (node.parent.expect("non-root"), node.side.expect("non-root"));
        labels[v] = witness.neighbor(labels[p], side);
    }
    BallLabeling {
        generators: graphs.generators(),
        radius,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::three_letter_family;
    use crate::model::Digraph;
    use proptest::prelude::*;

    fn family(n: usize, edges: Vec<Vec<(usize, usize)>>) -> GraphFamily {
        GraphFamily::from_indexed_edges(n, &edges)
    }

    fn is_closed(graphs: &GraphFamily, set: &[usize]) -> bool {
        !set.is_empty()
            && set.iter().all(|&a| {
                graphs.graphs().iter().all(|g| {
                    g.successors(a).iter().any(|b| set.contains(b))
                        && g.predecessors(a).iter().any(|b| set.contains(b))
                })
            })
    }

    /// Largest closed subset by trying all `2^n` subsets.
    fn brute_force_greatest(graphs: &GraphFamily) -> Vec<usize> {
        let n = graphs.letter_count();
        let mut best: Vec<usize> = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|a| mask >> a & 1 == 1).collect();
            if set.len() > best.len() && is_closed(graphs, &set) {
                best = set;
            }
        }
        best
    }

    #[test]
    fn three_letter_family_holds_on_full_alphabet() {
        let graphs = three_letter_family();
        assert_eq!(prune_star(&graphs), vec![0, 1, 2]);
        let StarOutcome::Holds(w) = check_star(&graphs) else {
            panic!()
        };
        assert_eq!(w.subalphabet, vec![0, 1, 2]);
        for a in 0..3 {
            assert_eq!(w.forward[&(a, 0)], (a + 1) % 3);
        }
        assert!(w.is_valid(&graphs));
    }

    #[test]
    fn lone_edge_fails() {
        let graphs = family(2, vec![vec![(0, 1)]]);
        assert!(prune_star(&graphs).is_empty());
        let StarOutcome::Fails(trace) = check_star(&graphs) else {
            panic!()
        };
        assert_eq!(trace.removed_in_round, vec![Some(1), Some(1)]);
    }

    #[test]
    fn forward_closure_alone_is_weaker() {
        // every letter has a successor in both graphs, but only 1 has a
        // Γ_1-predecessor and only 0 has a Γ_2-predecessor
        let graphs = family(2, vec![vec![(0, 1), (1, 1)], vec![(0, 0), (1, 0)]]);
        assert_eq!(prune_star_forward(&graphs), vec![0, 1]);
        assert!(prune_star(&graphs).is_empty());
        assert_eq!(
            crate::oracle::tile_free_ball(&graphs, 1, 1000).unwrap(),
            None
        );
    }

    #[test]
    fn pruning_rounds_are_recorded() {
        // chain 0→1→2→2: 0 lacks a predecessor, then 1 does
        let graphs = family(3, vec![vec![(0, 1), (1, 2), (2, 2)]]);
        let trace = prune_traced(&graphs, true);
        assert_eq!(trace.kept, vec![2]);
        assert_eq!(trace.removed_in_round, vec![Some(1), Some(2), None]);
        assert_eq!(trace.rounds(), 2);
    }

    #[test]
    fn complete_graphs_hold_everywhere() {
        let all: Vec<(usize, usize)> = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        let graphs = family(4, vec![all.clone(), all]);
        let StarOutcome::Holds(w) = check_star(&graphs) else {
            panic!()
        };
        assert_eq!(w.subalphabet, vec![0, 1, 2, 3]);
        for r in 0..4 {
            let lab = build_free_ball(&w, &graphs, r);
            assert!(lab.is_valid(&graphs));
            assert!(lab.labels.iter().all(|&a| a == 0));
        }
    }

    #[test]
    fn radius_zero_ball_is_root() {
        let graphs = three_letter_family();
        let StarOutcome::Holds(w) = check_star(&graphs) else {
            panic!()
        };
        let lab = build_free_ball(&w, &graphs, 0);
        assert_eq!(lab.labels, vec![0]);
    }

    #[test]
    fn three_letter_ball_radius_three() {
        let graphs = three_letter_family();
        let StarOutcome::Holds(w) = check_star(&graphs) else {
            panic!()
        };
        let lab = build_free_ball(&w, &graphs, 3);
        assert_eq!(lab.labels.len(), 1 + 4 + 12 + 36);
        assert!(lab.is_valid(&graphs));
    }

    fn family_strategy(max_letters: usize) -> impl Strategy<Value = GraphFamily> {
        (1..=max_letters, 1usize..=3).prop_flat_map(|(n, d)| {
            prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.3), n * n), d)
                .prop_map(move |masks| {
                    let graphs = masks
                        .iter()
                        .map(|m| {
                            Digraph::from_edges(
                                n,
                                (0..n * n).filter(|&k| m[k]).map(|k| (k / n, k % n)),
                            )
                        })
                        .collect();
                    GraphFamily::new((0..n).map(|i| i.to_string()).collect(), graphs).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn pruning_is_greatest_closed_set(graphs in family_strategy(8)) {
            let kept = prune_star(&graphs);
            if !kept.is_empty() {
                prop_assert!(is_closed(&graphs, &kept));
            }
            prop_assert_eq!(kept, brute_force_greatest(&graphs));
        }

        #[test]
        fn bidirectional_set_lies_in_forward_set(graphs in family_strategy(8)) {
            let forward = prune_star_forward(&graphs);
            prop_assert!(prune_star(&graphs).iter().all(|a| forward.contains(a)));
        }

        #[test]
        fn adding_edges_never_shrinks(graphs in family_strategy(6), extra in (0usize..36, 0usize..3)) {
            let n = graphs.letter_count();
            let (k, i) = (extra.0 % (n * n), extra.1 % graphs.generators());
            let mut gs = graphs.graphs().to_vec();
            let edges: Vec<_> = gs[i].edges().chain([(k / n, k % n)]).collect();
            gs[i] = Digraph::from_edges(n, edges);
            let bigger = GraphFamily::new(graphs.alphabet().to_vec(), gs).unwrap();
            let before = prune_star(&graphs);
            let after = prune_star(&bigger);
            prop_assert!(before.iter().all(|a| after.contains(a)));
        }

        #[test]
        fn witnesses_build_valid_balls(graphs in family_strategy(6), radius in 0usize..=6) {
            if let StarOutcome::Holds(w) = check_star(&graphs) {
                prop_assert!(w.is_valid(&graphs));
                prop_assert!(build_free_ball(&w, &graphs, radius).is_valid(&graphs));
            }
        }
    }
}
