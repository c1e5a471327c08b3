//! Tile sets that pass every condition but cannot tile a group with a given
//! relator.
//!
//! For a reduced relator `w_1 … w_n` the letters are `0..=n`. Each step
//! `w_i = g_j` puts `i-1 → i` into `Γ_j`, each `w_i = g_j^{-1}` puts
//! `i → i-1`. Every `Γ_j` is then closed into a Hamiltonian cycle and turned
//! into tiles. Walking the relator from tile `0` is forced letter by letter
//! and ends on tile `n`, while the relator returns to the starting element.

use serde::Serialize;

use crate::conditions::{check_starstar, check_starstar_prime, SsOutcome, SspOutcome};
use crate::cycles::enumerate_simple_cycles;
use crate::error::{Error, Result};
use crate::feasible::{fraction, RationalVector};
use crate::model::{
    first_cancellation, format_word, graphs_to_wang_functional, GraphFamily, Presentation, Side,
    WangTileSet, Word,
};
use crate::oracle::{tile_rectangle, tile_torus, DEFAULT_NODE_BUDGET};
use crate::star::{check_star, StarOutcome};

/// Largest torus side probed for commutator relators.
pub const TORUS_PROBE: usize = 4;

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub relator: Word,
    /// Edges forced by the relator, per generator.
    pub partial: Vec<Vec<(usize, usize)>>,
    pub graphs: GraphFamily,
    pub tiles: WangTileSet,
}

/// Edges forced by `word` on the vertices `0..=word.len()`.
pub fn partial_edges(generators: usize, word: &[Side]) -> Vec<Vec<(usize, usize)>> {
    let mut edges = vec![Vec::new(); generators];
    for (k, side) in word.iter().enumerate() {
        let i = k + 1;
        edges[side.generator].push(if side.inverse { (i, i - 1) } else { (i - 1, i) });
    }
    edges
}

/// Closes a partial graph into one directed Hamiltonian cycle.
///
/// The maximal paths of the partial graph are chained in order of their
/// least vertex and the last path is joined back to the first. Returns the
/// successor of every vertex.
pub fn complete_to_hamiltonian(vertices: usize, partial: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut succ = vec![None; vertices];
    let mut pred = vec![None; vertices];
    for &(a, b) in partial {
        if a >= vertices || b >= vertices {
            return Err(Error::CannotComplete(format!(
                "edge {a}→{b} leaves the vertex range"
            )));
        }
        if succ[a].replace(b).is_some() || pred[b].replace(a).is_some() {
            return Err(Error::CannotComplete(format!(
                "edge {a}→{b} exceeds degree 1"
            )));
        }
    }
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; vertices];
    for start in (0..vertices).filter(|&v| pred[v].is_none()) {
        let mut path = vec![start];
        seen[start] = true;
        let mut v = start;
        while let Some(w) = succ[v] {
            path.push(w);
            seen[w] = true;
            v = w;
        }
        paths.push(path);
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::CannotComplete(format!(
            "vertex {v} lies on a cycle of the partial graph"
        )));
    }
    paths.sort_by_key(|p| *p.iter().min().expect("paths are nonempty"));
    let order: Vec<usize> = paths.concat();
    let mut out = vec![0; vertices];
    for (k, &v) in order.iter().enumerate() {
        out[v] = order[(k + 1) % vertices];
    }
    Ok(out)
}

fn relator_at(pres: &Presentation, index: usize) -> Result<&Word> {
    pres.relators().get(index).ok_or_else(|| {
        Error::Unsupported(format!(
            "relator index {index} out of range ({} relators)",
            pres.relators().len()
        ))
    })
}

fn check_word(generators: usize, word: &[Side]) -> Result<()> {
    if word.is_empty() {
        return Err(Error::Unsupported("relator must be nonempty".into()));
    }
    if let Some(s) = word.iter().find(|s| s.generator >= generators) {
        return Err(Error::UnknownSide(s.to_string()));
    }
    if let Some(position) = first_cancellation(word) {
        return Err(Error::NotReduced { position });
    }
    Ok(())
}

fn assemble(
    generators: usize,
    word: &[Side],
    successors: Vec<Vec<usize>>,
) -> Result<Counterexample> {
    let n = word.len() + 1;
    let edges: Vec<Vec<(usize, usize)>> = successors
        .iter()
        .map(|s| s.iter().enumerate().map(|(a, &b)| (a, b)).collect())
        .collect();
    let graphs = GraphFamily::from_indexed_edges(n, &edges);
    let tiles = graphs_to_wang_functional(&graphs)?;
    Ok(Counterexample {
        relator: word.to_vec(),
        partial: partial_edges(generators, word),
        graphs,
        tiles,
    })
}

/// Builds the counterexample for a single relator word with the canonical
/// completion.
pub fn counterexample_for_word(generators: usize, word: &[Side]) -> Result<Counterexample> {
    check_word(generators, word)?;
    let n = word.len() + 1;
    let successors = partial_edges(generators, word)
        .iter()
        .map(|p| complete_to_hamiltonian(n, p))
        .collect::<Result<Vec<_>>>()?;
    assemble(generators, word, successors)
}

pub fn build_counterexample(pres: &Presentation, relator: usize) -> Result<Counterexample> {
    counterexample_for_word(pres.generators(), relator_at(pres, relator)?)
}

/// Builds the counterexample with caller-chosen Hamiltonian cycles, one per
/// generator, each listed as a vertex order.
pub fn build_counterexample_with_completion(
    pres: &Presentation,
    relator: usize,
    cycles: &[Vec<usize>],
) -> Result<Counterexample> {
    let d = pres.generators();
    let word = relator_at(pres, relator)?;
    check_word(d, word)?;
    let n = word.len() + 1;
    if cycles.len() != d {
        return Err(Error::CannotComplete(format!(
            "expected {d} cycles, got {}",
            cycles.len()
        )));
    }
    let partial = partial_edges(d, word);
    let mut successors = Vec::new();
    for (j, cycle) in cycles.iter().enumerate() {
        let mut sorted = cycle.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::CannotComplete(format!(
                "cycle for g{} is not Hamiltonian on 0..={}",
                j + 1,
                n - 1
            )));
        }
        let mut succ = vec![0; n];
        for (k, &v) in cycle.iter().enumerate() {
            succ[v] = cycle[(k + 1) % n];
        }
        if let Some(&(a, b)) = partial[j].iter().find(|&&(a, b)| succ[a] != b) {
            return Err(Error::CannotComplete(format!(
                "cycle for g{} omits forced edge {a}→{b}",
                j + 1
            )));
        }
        successors.push(succ);
    }
    assemble(d, word, successors)
}

/// Follows `word` from `start`, requiring exactly one matching neighbor at
/// every step. Returns the visited tiles, `start` included.
pub fn forced_walk(tiles: &WangTileSet, start: usize, word: &[Side]) -> Result<Vec<usize>> {
    let mut walk = vec![start];
    let mut here = start;
    for (k, &side) in word.iter().enumerate() {
        let color = tiles.tile(here).color(side);
        let options: Vec<usize> = (0..tiles.len())
            .filter(|&t| tiles.tile(t).color(side.inv()) == color)
            .collect();
        let [next] = options[..] else {
            return Err(Error::VerificationFailed(format!(
                "step {} ({side}) from tile {} has {} matching neighbors",
                k + 1,
                tiles.tile(here).id,
                options.len()
            )));
        };
        walk.push(next);
        here = next;
    }
    Ok(walk)
}

/// `a b a^{-1} b^{-1}` for two distinct generators.
pub fn is_commutator(word: &[Side]) -> bool {
    word.len() == 4
        && word[0].generator != word[1].generator
        && word[2] == word[0].inv()
        && word[3] == word[1].inv()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleProbe {
    pub rectangle_2x2: bool,
    /// Largest `w = h` checked; every torus up to `torus_max × torus_max` was searched.
    pub torus_max: usize,
    pub torus_found: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub relator: String,
    pub tiles: usize,
    pub star_full_alphabet: bool,
    pub ss: bool,
    pub ssp: bool,
    pub uniform_weight: String,
    pub hamiltonian: bool,
    pub forced_walk: Vec<String>,
    pub oracle: Option<OracleProbe>,
}

pub fn verify_counterexample(ce: &Counterexample) -> Result<VerificationReport> {
    let fail = |msg: String| Err(Error::VerificationFailed(msg));
    let n = ce.tiles.len();
    let d = ce.graphs.generators();

    let star_full_alphabet =
        matches!(check_star(&ce.graphs), StarOutcome::Holds(w) if w.subalphabet.len() == n);
    if !star_full_alphabet {
        return fail("star condition does not hold on the full alphabet".into());
    }
    let ss = matches!(check_starstar(&ce.graphs), SsOutcome::Holds(_));
    let ssp = matches!(check_starstar_prime(&ce.tiles), SspOutcome::Holds(_));
    if !ss || !ssp {
        return fail(format!("cycle balance {ss}, color balance {ssp}"));
    }
    let uniform = RationalVector::uniform(n);
    if !crate::conditions::starstar_prime_system(&ce.tiles).is_nontrivial_solution(&uniform.entries)
    {
        return fail("uniform tile weights do not balance colors".into());
    }
    let hamiltonian = (0..d).all(|j| {
        let cycles = enumerate_simple_cycles(ce.graphs.graph(j));
        cycles.len() == 1 && cycles[0].len() == n
    });
    if !hamiltonian {
        return fail("some generator graph is not a single Hamiltonian cycle".into());
    }
    if (0..n).any(|i| (0..d).any(|j| ce.tiles.tile(i).color(Side::backward(j)) != i)) {
        return fail("tile i does not show color i on every inverse side".into());
    }
    let walk = forced_walk(&ce.tiles, 0, &ce.relator)?;
    if walk.iter().enumerate().any(|(k, &t)| t != k) {
        return fail(format!("forced walk visits {walk:?}"));
    }
    if walk.last() == walk.first() {
        return fail("relator walk returns to its starting tile".into());
    }

    let oracle = if d == 2 && is_commutator(&ce.relator) {
        let rectangle_2x2 = tile_rectangle(&ce.tiles, 2, 2, DEFAULT_NODE_BUDGET)?.is_some();
        let mut torus_found = false;
        for w in 1..=TORUS_PROBE {
            for h in 1..=TORUS_PROBE {
                torus_found |= tile_torus(&ce.tiles, w, h, DEFAULT_NODE_BUDGET)?.is_some();
            }
        }
        if rectangle_2x2 || torus_found {
            return fail(format!(
                "oracle found a tiling (2x2 rectangle {rectangle_2x2}, torus {torus_found})"
            ));
        }
        Some(OracleProbe {
            rectangle_2x2,
            torus_max: TORUS_PROBE,
            torus_found,
        })
    } else {
        None
    };

    Ok(VerificationReport {
        relator: format_word(&ce.relator),
        tiles: n,
        star_full_alphabet,
        ss,
        ssp,
        uniform_weight: fraction(&uniform.entries[0]),
        hamiltonian,
        forced_walk: walk.iter().map(|&t| ce.tiles.tile(t).id.clone()).collect(),
        oracle,
    })
}
