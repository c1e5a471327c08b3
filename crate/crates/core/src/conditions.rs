//! The two balance conditions and the translations between their solutions.
//!
//! On a graph family the unknowns are weights on the simple cycles of each
//! graph, and for every letter the weighted abundance must agree across all
//! generators. On a tile set the unknowns are tile weights, and for every
//! generator `g` and color `c` the weight showing `c` on side `g` must equal
//! the weight showing `c` on side `g^{-1}`. The two conditions are
//! equivalent on conjugate instances; [`ss_to_ssp`] and [`ssp_to_ss`] carry
//! solutions across, and [`check_equivalence`] runs both ends.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cycles::{abundance, decompose_cycle, enumerate_simple_cycles, CycleClass};
use crate::error::{Error, Result};
use crate::feasible::{
    integer_scale, solve_nonneg_nontrivial, Certificate, Feasibility, LinearSystem, RationalVector,
};
use crate::model::{color_class, wang_to_graphs, GraphFamily, Side, WangTileSet};

/// Weights on the simple cycles of every graph of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsSolution {
    /// Simple cycles of `Γ_i`, in enumeration order.
    pub cycles: Vec<Vec<CycleClass>>,
    /// `weights[i][j]` is the weight of `cycles[i][j]`.
    pub weights: Vec<Vec<BigRational>>,
}

impl SsSolution {
    /// `Σ_j x_{i,j} |ω_i^j|_a`.
    pub fn abundance_of(&self, generator: usize, letter: usize) -> BigRational {
        self.cycles[generator]
            .iter()
            .zip(&self.weights[generator])
            .fold(BigRational::zero(), |acc, (c, w)| {
                acc + w * BigRational::from_integer(abundance(c).get(letter).into())
            })
    }

    pub fn is_valid(&self, graphs: &GraphFamily) -> bool {
        let d = graphs.generators();
        if self.cycles.len() != d || self.weights.len() != d {
            return false;
        }
        for i in 0..d {
            if self.cycles[i].len() != self.weights[i].len()
                || !self.cycles[i]
                    .iter()
                    .all(|c| c.is_cycle_of(graphs.graph(i)))
                || self.weights[i].iter().any(Signed::is_negative)
            {
                return false;
            }
        }
        if self.weights.iter().flatten().all(Zero::is_zero) {
            return false;
        }
        (0..graphs.letter_count()).all(|a| {
            let first = self.abundance_of(0, a);
            (1..d).all(|i| self.abundance_of(i, a) == first)
        })
    }
}

/// Weights on the tiles of a tile set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SspSolution {
    pub weights: Vec<BigRational>,
}

impl SspSolution {
    pub fn is_valid(&self, tiles: &WangTileSet) -> bool {
        self.weights.len() == tiles.len()
            && starstar_prime_system(tiles).is_nontrivial_solution(&self.weights)
    }
}

/// The per-letter balance system over variables `x{i}_{j}` (generator `i`,
/// cycle `j`, both 1-based), or `None` when some graph has no cycle.
///
/// For `d >= 2` there is one equation per letter and per generator `i >= 2`,
/// stating that the `Γ_1` abundance equals the `Γ_i` abundance; equations
/// with no nonzero coefficient are left out.
pub fn starstar_system(graphs: &GraphFamily) -> (Vec<Vec<CycleClass>>, Option<LinearSystem>) {
    let cycles: Vec<Vec<CycleClass>> = graphs
        .graphs()
        .iter()
        .map(enumerate_simple_cycles)
        .collect();
    if cycles.iter().any(Vec::is_empty) {
        return (cycles, None);
    }
    let mut offsets = Vec::new();
    let mut names = Vec::new();
    for (i, cs) in cycles.iter().enumerate() {
        offsets.push(names.len());
        names.extend((0..cs.len()).map(|j| format!("x{}_{}", i + 1, j + 1)));
    }
    let mut sys = LinearSystem::new(names);
    let terms = |i: usize, a: usize, sign: i64| {
        let off = offsets[i];
        cycles[i].iter().enumerate().filter_map(move |(j, c)| {
            let k = abundance(c).get(a) as i64;
            (k != 0).then_some((off + j, sign * k))
        })
    };
    for a in 0..graphs.letter_count() {
        for i in 1..graphs.generators() {
            let row: Vec<(usize, i64)> = terms(0, a, 1).chain(terms(i, a, -1)).collect();
            if row.is_empty() {
                continue;
            }
            sys.push_terms(format!("a={} (g1 = g{})", graphs.letter(a), i + 1), row);
        }
    }
    (cycles, Some(sys))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SsOutcome {
    Holds(SsSolution),
    /// Some graph has no cycle at all, so the system is empty.
    NoCycle {
        generator: usize,
    },
    Infeasible {
        system: LinearSystem,
        certificate: Certificate,
    },
}

impl SsOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SsOutcome::Holds(_))
    }
}

pub fn check_starstar(graphs: &GraphFamily) -> SsOutcome {
    let (cycles, system) = starstar_system(graphs);
    let Some(system) = system else {
        let generator = cycles
            .iter()
            .position(Vec::is_empty)
            .expect("some graph is acyclic");
        return SsOutcome::NoCycle { generator };
    };
    match solve_nonneg_nontrivial(&system) {
        Feasibility::Feasible(x) => {
            let mut entries = x.entries.into_iter();
            let weights = cycles
                .iter()
                .map(|cs| entries.by_ref().take(cs.len()).collect())
                .collect();
            let sol = SsSolution { cycles, weights };
            debug_assert!(sol.is_valid(graphs));
            SsOutcome::Holds(sol)
        }
        Feasibility::Infeasible(certificate) => SsOutcome::Infeasible {
            system,
            certificate,
        },
    }
}

/// The color balance system over one variable per tile (named by tile id).
/// Pairs `(g, c)` where neither side shows `c` are left out.
pub fn starstar_prime_system(tiles: &WangTileSet) -> LinearSystem {
    let mut sys = LinearSystem::new(tiles.tiles().iter().map(|t| t.id.clone()).collect());
    for i in 0..tiles.generators() {
        for (c, name) in tiles.colors().iter().enumerate() {
            let out = color_class(tiles, c, Side::forward(i)).expect("in range");
            let back = color_class(tiles, c, Side::backward(i)).expect("in range");
            if out.is_empty() && back.is_empty() {
                continue;
            }
            let row = out
                .into_iter()
                .map(|t| (t, 1))
                .chain(back.into_iter().map(|t| (t, -1)));
            sys.push_terms(format!("(g{}, {name})", i + 1), row);
        }
    }
    sys
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SspOutcome {
    Holds(SspSolution),
    Infeasible {
        system: LinearSystem,
        certificate: Certificate,
    },
}

impl SspOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SspOutcome::Holds(_))
    }
}

pub fn check_starstar_prime(tiles: &WangTileSet) -> SspOutcome {
    let system = starstar_prime_system(tiles);
    match solve_nonneg_nontrivial(&system) {
        Feasibility::Feasible(x) => SspOutcome::Holds(SspSolution { weights: x.entries }),
        Feasibility::Infeasible(certificate) => SspOutcome::Infeasible {
            system,
            certificate,
        },
    }
}

/// Tile weights from cycle weights: `x_τ = Σ_j x_{1,j} |ω_1^j|_τ`.
pub fn ss_to_ssp(
    sol: &SsSolution,
    graphs: &GraphFamily,
    tiles: &WangTileSet,
) -> Result<SspSolution> {
    let conjugate = wang_to_graphs(tiles);
    if conjugate.graphs() != graphs.graphs() || conjugate.letter_count() != graphs.letter_count() {
        return Err(Error::MismatchedInstance(
            "graph family is not the conjugate of the tile set".into(),
        ));
    }
    if !sol.is_valid(graphs) {
        return Err(Error::MismatchedInstance(
            "cycle weights do not solve the balance system of this family".into(),
        ));
    }
    let out = SspSolution {
        weights: (0..tiles.len()).map(|t| sol.abundance_of(0, t)).collect(),
    };
    if !out.is_valid(tiles) {
        return Err(Error::VerificationFailed(
            "translated tile weights do not balance".into(),
        ));
    }
    Ok(out)
}

/// Cycle weights from integer tile weights.
///
/// For each generator `g_n`: take `x_τ` copies of every tile, join each copy
/// showing color `c` on side `g_n` to a copy showing `c` on side `g_n^{-1}`
/// (both lists sorted by tile then copy, matched in order), split the
/// resulting in/out-degree-one graph into cycles starting from the least
/// unvisited copy, project each onto `Γ_n` and decompose into simple cycles.
pub fn ssp_to_ss(sol: &SspSolution, tiles: &WangTileSet) -> Result<SsSolution> {
    let counts = sol
        .weights
        .iter()
        .zip(tiles.tiles())
        .map(|(w, t)| {
            if !w.is_integer() || w.is_negative() {
                return Err(Error::NonIntegerSolution(t.id.clone()));
            }
            w.to_integer()
                .to_usize()
                .ok_or_else(|| Error::NonIntegerSolution(t.id.clone()))
        })
        .collect::<Result<Vec<usize>>>()?;
    if counts.len() != tiles.len() {
        return Err(Error::MismatchedInstance(
            "weight vector length differs from tile count".into(),
        ));
    }
    if !sol.is_valid(tiles) {
        return Err(Error::MismatchedInstance(
            "tile weights do not solve the color balance system".into(),
        ));
    }

    let graphs = wang_to_graphs(tiles);
    // copy k of tile t has index first_copy[t] + k
    let mut first_copy = Vec::with_capacity(counts.len());
    let mut owner = Vec::new();
    for (t, &c) in counts.iter().enumerate() {
        first_copy.push(owner.len());
        owner.extend(std::iter::repeat_n(t, c));
    }

    let mut cycles = Vec::new();
    let mut weights = Vec::new();
    for n in 0..tiles.generators() {
        let classes = enumerate_simple_cycles(graphs.graph(n));
        let mut multiplicity: BTreeMap<CycleClass, usize> = BTreeMap::new();
        let next = copy_matching(tiles, &counts, &first_copy, n)?;
        let mut visited = vec![false; owner.len()];
        for start in 0..owner.len() {
            if visited[start] {
                continue;
            }
            let mut walk = vec![owner[start]];
            let mut v = start;
            loop {
                visited[v] = true;
                v = next[v];
                walk.push(owner[v]);
                if v == start {
                    break;
                }
            }
            for (class, m) in decompose_cycle(&walk, graphs.graph(n))? {
                *multiplicity.entry(class).or_insert(0) += m;
            }
        }
        let w: Vec<BigRational> = classes
            .iter()
            .map(|c| BigRational::from_integer(BigInt::from(multiplicity.remove(c).unwrap_or(0))))
            .collect();
        if !multiplicity.is_empty() {
            return Err(Error::VerificationFailed(
                "decomposition produced a cycle outside the enumeration".into(),
            ));
        }
        // reconstruction identity: Σ_j x_{n,j} |ω_n^j|_τ = x_τ
        for (t, &c) in counts.iter().enumerate() {
            let total: usize = classes
                .iter()
                .zip(&w)
                .map(|(cl, x)| abundance(cl).get(t) * x.to_integer().to_usize().unwrap())
                .sum();
            if total != c {
                return Err(Error::VerificationFailed(format!(
                    "generator g{}: tile `{}` covered {total} times, expected {c}",
                    n + 1,
                    tiles.tile(t).id
                )));
            }
        }
        cycles.push(classes);
        weights.push(w);
    }
    let out = SsSolution { cycles, weights };
    if !out.is_valid(&graphs) {
        return Err(Error::VerificationFailed(
            "translated cycle weights do not balance".into(),
        ));
    }
    Ok(out)
}

/// Successor of every copy in the auxiliary graph for generator `n`.
fn copy_matching(
    tiles: &WangTileSet,
    counts: &[usize],
    first_copy: &[usize],
    n: usize,
) -> Result<Vec<usize>> {
    let total: usize = counts.iter().sum();
    let mut next = vec![usize::MAX; total];
    for c in 0..tiles.colors().len() {
        let copies = |side: Side| -> Vec<usize> {
            color_class(tiles, c, side)
                .expect("in range")
                .into_iter()
                .flat_map(|t| first_copy[t]..first_copy[t] + counts[t])
                .collect()
        };
        let out = copies(Side::forward(n));
        let back = copies(Side::backward(n));
        if out.len() != back.len() {
            return Err(Error::MismatchedInstance(format!(
                "color `{}` on g{}: {} copies out, {} in",
                tiles.colors()[c],
                n + 1,
                out.len(),
                back.len()
            )));
        }
        for (a, b) in out.into_iter().zip(back) {
            next[a] = b;
        }
    }
    Ok(next)
}

/// Both verdicts on one tile set and, when feasible, both translations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub graphs: GraphFamily,
    pub ss: SsOutcome,
    pub ssp: SspOutcome,
    pub ss_from_ssp: Option<SsSolution>,
    pub ssp_from_ss: Option<SspSolution>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.ss.holds()
    }
}

pub fn check_equivalence(tiles: &WangTileSet) -> Result<EquivalenceReport> {
    let graphs = wang_to_graphs(tiles);
    let ss = check_starstar(&graphs);
    let ssp = check_starstar_prime(tiles);
    if ss.holds() != ssp.holds() {
        return Err(Error::EquivalenceViolation(format!(
            "cycle balance {} but color balance {}",
            verdict(ss.holds()),
            verdict(ssp.holds())
        )));
    }
    let (mut ss_from_ssp, mut ssp_from_ss) = (None, None);
    if let (SsOutcome::Holds(ss_sol), SspOutcome::Holds(ssp_sol)) = (&ss, &ssp) {
        let translated = ss_to_ssp(ss_sol, &graphs, tiles)
            .map_err(|e| Error::EquivalenceViolation(e.to_string()))?;
        let scaled = SspSolution {
            weights: integer_scale(&RationalVector {
                entries: ssp_sol.weights.clone(),
            })
            .into_iter()
            .map(BigRational::from_integer)
            .collect(),
        };
        let back =
            ssp_to_ss(&scaled, tiles).map_err(|e| Error::EquivalenceViolation(e.to_string()))?;
        ssp_from_ss = Some(translated);
        ss_from_ssp = Some(back);
    }
    Ok(EquivalenceReport {
        graphs,
        ss,
        ssp,
        ss_from_ssp,
        ssp_from_ss,
    })
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{three_letter_family, three_tiles};
    use crate::model::graphs_to_wang_functional;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_tiles(rng: &mut impl Rng, d: usize, n: usize, colors: usize) -> WangTileSet {
        let names = (0..colors).map(|c| format!("c{c}")).collect();
        let rows = (0..n)
            .map(|i| {
                (
                    format!("t{i}"),
                    (0..2 * d).map(|_| rng.gen_range(0..colors)).collect(),
                )
            })
            .collect();
        WangTileSet::new(d, names, rows).unwrap()
    }

    #[test]
    fn three_letter_balance_system() {
        let (cycles, sys) = starstar_system(&three_letter_family());
        let sys = sys.unwrap();
        assert_eq!(cycles[0].len(), 1);
        assert_eq!(cycles[1].len(), 2);
        assert_eq!(sys.variables(), &["x1_1", "x2_1", "x2_2"]);
        let rows: Vec<Vec<i64>> = sys
            .equations()
            .iter()
            .map(|e| e.coefficients.clone())
            .collect();
        assert_eq!(rows, vec![vec![1, 0, 0], vec![1, -1, 0], vec![1, 0, -1]]);
        assert!(matches!(
            check_starstar(&three_letter_family()),
            SsOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn three_tile_color_system() {
        let tiles = three_tiles();
        let sys = starstar_prime_system(&tiles);
        let labels: Vec<&str> = sys.equations().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(
            labels,
            vec!["(g1, a)", "(g1, b)", "(g1, c)", "(g2, a)", "(g2, b)"]
        );
        let rows: Vec<Vec<i64>> = sys
            .equations()
            .iter()
            .map(|e| e.coefficients.clone())
            .collect();
        // x2 = x0; x0 = x1; x1 = x2; x1 = x0 + x1; x0 + x2 = x2
        assert_eq!(
            rows,
            vec![
                vec![-1, 0, 1],
                vec![1, -1, 0],
                vec![0, 1, -1],
                vec![-1, 0, 0],
                vec![1, 0, 0]
            ]
        );
        assert!(!check_starstar_prime(&tiles).holds());
    }

    #[test]
    fn shared_cycle_gives_weight_one() {
        // both graphs contain 0→1→0, Γ_2 also has a loop at 2
        let graphs = GraphFamily::from_indexed_edges(
            3,
            &[vec![(0, 1), (1, 0)], vec![(0, 1), (1, 0), (2, 2)]],
        );
        let SsOutcome::Holds(sol) = check_starstar(&graphs) else {
            panic!()
        };
        assert!(sol.is_valid(&graphs));
        let shared = CycleClass::new(vec![0, 1]).unwrap();
        let manual = SsSolution {
            cycles: sol.cycles.clone(),
            weights: sol
                .cycles
                .iter()
                .map(|cs| {
                    cs.iter()
                        .map(|c| BigRational::from_integer((c == &shared).into()))
                        .collect()
                })
                .collect(),
        };
        assert!(manual.is_valid(&graphs));
    }

    #[test]
    fn self_loops_everywhere_give_uniform_weights() {
        let loops: Vec<(usize, usize)> = (0..3).map(|a| (a, a)).collect();
        let graphs = GraphFamily::from_indexed_edges(3, &[loops.clone(), loops]);
        let SsOutcome::Holds(sol) = check_starstar(&graphs) else {
            panic!()
        };
        assert!(sol.is_valid(&graphs));
        let uniform = SsSolution {
            cycles: sol.cycles.clone(),
            weights: vec![vec![q(1, 6); 3]; 2],
        };
        assert!(uniform.is_valid(&graphs));
    }

    #[test]
    fn acyclic_graph_fails_immediately() {
        let graphs = GraphFamily::from_indexed_edges(2, &[vec![(0, 0), (1, 1)], vec![(0, 1)]]);
        assert_eq!(check_starstar(&graphs), SsOutcome::NoCycle { generator: 1 });
    }

    #[test]
    fn five_cycle_tiles_get_uniform_weights() {
        let graphs = GraphFamily::from_indexed_edges(
            5,
            &[
                vec![(0, 1), (1, 4), (4, 3), (3, 2), (2, 0)],
                vec![(0, 1), (1, 2), (2, 4), (4, 3), (3, 0)],
            ],
        );
        let tiles = graphs_to_wang_functional(&graphs).unwrap();
        let SspOutcome::Holds(sol) = check_starstar_prime(&tiles) else {
            panic!()
        };
        assert!(sol.weights.iter().all(|w| *w == q(1, 5)));

        let ints = SspSolution {
            weights: vec![q(1, 1); 5],
        };
        let ss = ssp_to_ss(&ints, &tiles).unwrap();
        for n in 0..2 {
            assert_eq!(ss.cycles[n].len(), 1);
            assert_eq!(ss.cycles[n][0].len(), 5);
            assert_eq!(ss.weights[n], vec![q(1, 1)]);
        }
    }

    #[test]
    fn single_tile() {
        let tiles = WangTileSet::new(2, vec!["c".into()], vec![("t".into(), vec![0; 4])]).unwrap();
        let SspOutcome::Holds(sol) = check_starstar_prime(&tiles) else {
            panic!()
        };
        assert_eq!(sol.weights, vec![q(1, 1)]);
        let ss = ssp_to_ss(&sol, &tiles).unwrap();
        assert_eq!(ss.weights, vec![vec![q(1, 1)], vec![q(1, 1)]]);
    }

    #[test]
    fn ss_to_ssp_on_shared_cycle_counts_multiplicity() {
        // tiles a, b alternate horizontally and vertically: both graphs are a↔b
        let tiles =
            WangTileSet::square(&[("a", ["p", "q", "p", "q"]), ("b", ["q", "p", "q", "p"])])
                .unwrap();
        let graphs = wang_to_graphs(&tiles);
        let cycles: Vec<Vec<CycleClass>> = graphs
            .graphs()
            .iter()
            .map(enumerate_simple_cycles)
            .collect();
        let shared = CycleClass::new(vec![0, 1]).unwrap();
        let weights = cycles
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| BigRational::from_integer((c == &shared).into()))
                    .collect()
            })
            .collect();
        let sol = SsSolution { cycles, weights };
        let ssp = ss_to_ssp(&sol, &graphs, &tiles).unwrap();
        assert_eq!(ssp.weights, vec![q(1, 1), q(1, 1)]);
    }

    #[test]
    fn ss_to_ssp_rejects_foreign_family() {
        let tiles = three_tiles();
        let graphs = GraphFamily::from_indexed_edges(3, &[vec![(0, 0)], vec![(0, 0)]]);
        let sol = SsSolution {
            cycles: vec![vec![], vec![]],
            weights: vec![vec![], vec![]],
        };
        assert!(matches!(
            ss_to_ssp(&sol, &graphs, &tiles),
            Err(Error::MismatchedInstance(_))
        ));
    }

    #[test]
    fn ssp_to_ss_rejects_fractions() {
        let tiles = WangTileSet::new(1, vec!["c".into()], vec![("t".into(), vec![0; 2])]).unwrap();
        let sol = SspSolution {
            weights: vec![q(1, 2)],
        };
        assert!(matches!(
            ssp_to_ss(&sol, &tiles),
            Err(Error::NonIntegerSolution(_))
        ));
    }

    #[test]
    fn ssp_to_ss_with_repeated_copies() {
        // 0→1→0 in Γ_1, loops in Γ_2, weights (3, 3)
        let graphs =
            GraphFamily::from_indexed_edges(2, &[vec![(0, 1), (1, 0)], vec![(0, 0), (1, 1)]]);
        let tiles = graphs_to_wang_functional(&graphs).unwrap();
        let sol = SspSolution {
            weights: vec![q(3, 1), q(3, 1)],
        };
        let ss = ssp_to_ss(&sol, &tiles).unwrap();
        assert_eq!(ss.weights[0], vec![q(3, 1)]);
        assert_eq!(ss.weights[1], vec![q(3, 1), q(3, 1)]);
    }

    #[test]
    fn three_tile_equivalence_report() {
        let report = check_equivalence(&three_tiles()).unwrap();
        assert!(!report.ss.holds() && !report.ssp.holds());
        assert!(report.ss_from_ssp.is_none());
    }

    #[test]
    fn random_equivalence_and_translations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut feasible = 0;
        for _ in 0..200 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=5);
            let colors = rng.gen_range(1..=3);
            let tiles = random_tiles(&mut rng, d, n, colors);
            let report = check_equivalence(&tiles).unwrap();
            if let Some(ss) = &report.ss_from_ssp {
                feasible += 1;
                assert!(ss.is_valid(&report.graphs));
                assert!(report.ssp_from_ss.as_ref().unwrap().is_valid(&tiles));
            }
        }
        assert!(feasible > 20, "only {feasible} feasible instances");
    }

    #[test]
    fn acyclic_graph_implies_color_balance_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut seen = 0;
        for _ in 0..400 {
            let count = rng.gen_range(1..=4);
            let tiles = random_tiles(&mut rng, 2, count, 3);
            if let SsOutcome::NoCycle { .. } = check_starstar(&wang_to_graphs(&tiles)) {
                seen += 1;
                assert!(!check_starstar_prime(&tiles).holds());
            }
        }
        assert!(seen > 0);
    }
}
