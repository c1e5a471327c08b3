//! Domain types: sides, Wang tile sets, graph families and presentations,
//! together with their JSON file forms and the letter-to-letter conversions
//! between tiles and graphs.
//!
//! Generators are stored 0-based (`g1` is generator `0`); every textual form
//! uses the 1-based names `g1`, `g1_inv`, `g2`, ...

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One side of a tile: a generator `g_i` or its inverse `g_i^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub generator: usize,
    pub inverse: bool,
}

impl Side {
    pub fn forward(generator: usize) -> Self {
        Side {
            generator,
            inverse: false,
        }
    }

    pub fn backward(generator: usize) -> Self {
        Side {
            generator,
            inverse: true,
        }
    }

    pub fn inv(self) -> Self {
        Side {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Position in a `2d`-slot side array: `g_i` at `2i`, `g_i^{-1}` at `2i + 1`.
    pub fn slot(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }

    pub fn from_slot(slot: usize) -> Self {
        Side {
            generator: slot / 2,
            inverse: slot % 2 == 1,
        }
    }

    /// All `2d` sides in slot order.
    pub fn all(generators: usize) -> impl Iterator<Item = Side> {
        (0..2 * generators).map(Side::from_slot)
    }

    /// Parses `g<i>` / `g<i>_inv`, plus `right`/`left`/`top`/`bottom` when `generators == 2`.
    pub fn parse(name: &str, generators: usize) -> Result<Side> {
        let side = match name {
            "right" if generators == 2 => Side::forward(0),
            "left" if generators == 2 => Side::backward(0),
            "top" if generators == 2 => Side::forward(1),
            "bottom" if generators == 2 => Side::backward(1),
            _ => name.parse::<Side>()?,
        };
        if side.generator >= generators {
            return Err(Error::UnknownSide(name.to_string()));
        }
        Ok(side)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}_inv", self.generator + 1)
        } else {
            write!(f, "g{}", self.generator + 1)
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownSide(s.to_string());
        let body = s.strip_prefix('g').ok_or_else(bad)?;
        let (digits, inverse) = match body.strip_suffix("_inv") {
            Some(d) => (d, true),
            None => (body, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: usize = digits.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Side {
            generator: index - 1,
            inverse,
        })
    }
}

/// A word over `{g_i, g_i^{-1}}`.
pub type Word = Vec<Side>;

/// First position `i` such that `word[i-1]` and `word[i]` cancel, if any.
pub fn first_cancellation(word: &[Side]) -> Option<usize> {
    word.windows(2)
        .position(|w| w[0] == w[1].inv())
        .map(|p| p + 1)
}

pub fn format_word(word: &[Side]) -> String {
    word.iter()
        .map(Side::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// A directed graph on `0..n` with self-loops allowed and parallel edges collapsed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn empty(vertices: usize) -> Self {
        Digraph {
            succ: vec![Vec::new(); vertices],
            pred: vec![Vec::new(); vertices],
        }
    }

    /// Builds a graph from an edge list. Panics if an endpoint is out of range.
    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut succ = vec![BTreeSet::new(); vertices];
        let mut pred = vec![BTreeSet::new(); vertices];
        for (a, b) in edges {
            assert!(a < vertices && b < vertices, "edge ({a}, {b}) out of range");
            succ[a].insert(b);
            pred[b].insert(a);
        }
        Digraph {
            succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
            pred: pred.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Out-neighbors of `v`, sorted ascending.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    /// In-neighbors of `v`, sorted ascending.
    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, out)| out.iter().map(move |&b| (a, b)))
    }

    /// `Some(succ)` when every vertex has in- and out-degree exactly one.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.succ.iter().all(|s| s.len() == 1) && self.pred.iter().all(|p| p.len() == 1) {
            Some(self.succ.iter().map(|s| s[0]).collect())
        } else {
            None
        }
    }
}

/// `d` directed graphs over a shared alphabet, one per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFamily {
    alphabet: Vec<String>,
    graphs: Vec<Digraph>,
}

impl GraphFamily {
    pub fn new(alphabet: Vec<String>, graphs: Vec<Digraph>) -> Result<Self> {
        let mut violations = Vec::new();
        check_unique(&alphabet, "duplicate letter", &mut violations);
        if graphs.is_empty() {
            violations.push(Violation::new("generator count", "family has no graphs"));
        }
        for (i, g) in graphs.iter().enumerate() {
            if g.vertex_count() != alphabet.len() {
                violations.push(Violation::new(
                    "shared vertex set",
                    format!(
                        "graph g{} has {} vertices, alphabet has {}",
                        i + 1,
                        g.vertex_count(),
                        alphabet.len()
                    ),
                ));
            }
        }
        if violations.is_empty() {
            Ok(GraphFamily { alphabet, graphs })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Family over letters `"0".."n-1"` given per-generator edge lists.
    pub fn from_indexed_edges(letters: usize, edges: &[Vec<(usize, usize)>]) -> Self {
        let alphabet = (0..letters).map(|i| i.to_string()).collect();
        let graphs = edges
            .iter()
            .map(|e| Digraph::from_edges(letters, e.iter().copied()))
            .collect();
        GraphFamily { alphabet, graphs }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter(&self, index: usize) -> &str {
        &self.alphabet[index]
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn generators(&self) -> usize {
        self.graphs.len()
    }

    pub fn graph(&self, generator: usize) -> &Digraph {
        &self.graphs[generator]
    }

    pub fn graphs(&self) -> &[Digraph] {
        &self.graphs
    }

    /// Is `a -> b` allowed when moving from a cell to its neighbor across `side`?
    ///
    /// Across `g_i` this is the edge `a -> b` of `Γ_i`; across `g_i^{-1}` the
    /// neighbor is the predecessor, so it is the edge `b -> a`.
    pub fn compatible(&self, a: usize, side: Side, b: usize) -> bool {
        let g = &self.graphs[side.generator];
        if side.inverse {
            g.has_edge(b, a)
        } else {
            g.has_edge(a, b)
        }
    }

    pub fn to_file(&self) -> GraphFamilyFile {
        GraphFamilyFile {
            alphabet: self.alphabet.clone(),
            graphs: self
                .graphs
                .iter()
                .enumerate()
                .map(|(i, g)| GraphEntry {
                    generator: i + 1,
                    edges: g
                        .edges()
                        .map(|(a, b)| (self.alphabet[a].clone(), self.alphabet[b].clone()))
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTile {
    pub id: String,
    /// Color index per side slot (see [`Side::slot`]).
    colors: Vec<usize>,
}

impl WangTile {
    pub fn color(&self, side: Side) -> usize {
        self.colors[side.slot()]
    }
}

/// A finite set of Wang tiles over `d` generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTileSet {
    generators: usize,
    colors: Vec<String>,
    tiles: Vec<WangTile>,
}

impl WangTileSet {
    /// `tiles` holds `(id, colors by slot)` with color indices into `colors`.
    pub fn new(
        generators: usize,
        colors: Vec<String>,
        tiles: Vec<(String, Vec<usize>)>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        if generators == 0 {
            violations.push(Violation::new("generator count", "d must be at least 1"));
        }
        check_unique(&colors, "duplicate color", &mut violations);
        let ids: Vec<String> = tiles.iter().map(|(id, _)| id.clone()).collect();
        check_unique(&ids, "duplicate tile id", &mut violations);
        for (id, sides) in &tiles {
            if sides.len() != 2 * generators {
                violations.push(Violation::new(
                    "incomplete side map",
                    format!(
                        "tile `{id}` has {} sides, expected {}",
                        sides.len(),
                        2 * generators
                    ),
                ));
            }
            if let Some(c) = sides.iter().find(|&&c| c >= colors.len()) {
                violations.push(Violation::new(
                    "unknown color",
                    format!("tile `{id}` uses color index {c}"),
                ));
            }
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Ok(WangTileSet {
            generators,
            colors,
            tiles: tiles
                .into_iter()
                .map(|(id, colors)| WangTile { id, colors })
                .collect(),
        })
    }

    /// Square tiles for `d = 2` given as `(left, right, bottom, top)` color names.
    pub fn square(tiles: &[(&str, [&str; 4])]) -> Result<Self> {
        let colors: BTreeSet<&str> = tiles.iter().flat_map(|(_, c)| c.iter().copied()).collect();
        let colors: Vec<String> = colors.into_iter().map(String::from).collect();
        let index = |c: &str| colors.iter().position(|x| x == c).expect("collected above");
        let rows = tiles
            .iter()
            .map(|(id, [left, right, bottom, top])| {
                // slot order: g1, g1_inv, g2, g2_inv
                (
                    id.to_string(),
                    vec![index(right), index(left), index(top), index(bottom)],
                )
            })
            .collect();
        WangTileSet::new(2, colors.clone(), rows)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn tiles(&self) -> &[WangTile] {
        &self.tiles
    }

    pub fn tile(&self, index: usize) -> &WangTile {
        &self.tiles[index]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == name)
    }

    pub fn to_file(&self) -> TileSetFile {
        TileSetFile {
            generators: self.generators,
            colors: self.colors.clone(),
            tiles: self
                .tiles
                .iter()
                .map(|t| TileEntry {
                    id: t.id.clone(),
                    sides: Side::all(self.generators)
                        .map(|s| (s.to_string(), self.colors[t.color(s)].clone()))
                        .collect(),
                })
                .collect(),
            involutions: Vec::new(),
        }
    }
}

/// `c_g`: indices of the tiles whose side `g` carries color `color`.
pub fn color_class(tiles: &WangTileSet, color: usize, side: Side) -> Result<Vec<usize>> {
    if color >= tiles.colors.len() {
        return Err(Error::UnknownColor(color.to_string()));
    }
    if side.generator >= tiles.generators {
        return Err(Error::UnknownSide(side.to_string()));
    }
    Ok(tiles
        .tiles
        .iter()
        .enumerate()
        .filter(|(_, t)| t.color(side) == color)
        .map(|(i, _)| i)
        .collect())
}

/// Color class addressed by names, e.g. `("a", "right")`.
pub fn color_class_by_name(tiles: &WangTileSet, color: &str, side: &str) -> Result<Vec<usize>> {
    let c = tiles
        .color_index(color)
        .ok_or_else(|| Error::UnknownColor(color.to_string()))?;
    let s = Side::parse(side, tiles.generators)?;
    color_class(tiles, c, s)
}

/// Letter-to-letter conjugacy: `τ → τ'` in `Γ_i` iff `τ(g_i) = τ'(g_i^{-1})`.
pub fn wang_to_graphs(tiles: &WangTileSet) -> GraphFamily {
    let n = tiles.len();
    let graphs = (0..tiles.generators)
        .map(|i| {
            let (fwd, bwd) = (Side::forward(i), Side::backward(i));
            let edges = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| tiles.tiles[a].color(fwd) == tiles.tiles[b].color(bwd));
            Digraph::from_edges(n, edges)
        })
        .collect();
    GraphFamily {
        alphabet: tiles.tiles.iter().map(|t| t.id.clone()).collect(),
        graphs,
    }
}

/// Tiles for a family of permutation graphs: the tile of letter `i` shows `i`
/// on every `g_j^{-1}` side and the `Γ_j`-successor of `i` on side `g_j`.
pub fn graphs_to_wang_functional(graphs: &GraphFamily) -> Result<WangTileSet> {
    let succs = graphs
        .graphs
        .iter()
        .enumerate()
        .map(|(j, g)| {
            g.as_permutation().ok_or_else(|| {
                let bad = (0..g.vertex_count())
                    .find(|&v| g.successors(v).len() != 1 || g.predecessors(v).len() != 1)
                    .unwrap_or(0);
                Error::NotFunctional {
                    generator: j + 1,
                    letter: graphs.alphabet.get(bad).cloned().unwrap_or_default(),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = graphs.generators();
    let tiles = (0..graphs.letter_count())
        .map(|i| {
            let mut sides = vec![0; 2 * d];
            for (j, succ) in succs.iter().enumerate() {
                sides[Side::forward(j).slot()] = succ[i];
                sides[Side::backward(j).slot()] = i;
            }
            (graphs.alphabet[i].clone(), sides)
        })
        .collect();
    WangTileSet::new(d, graphs.alphabet.clone(), tiles)
}

/// A group presentation with finitely many relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self> {
        let mut violations = Vec::new();
        if generators == 0 {
            violations.push(Violation::new("generator count", "d must be at least 1"));
        }
        for (k, r) in relators.iter().enumerate() {
            if r.is_empty() {
                violations.push(Violation::new("empty relator", format!("relator {k}")));
            }
            if let Some(s) = r.iter().find(|s| s.generator >= generators) {
                violations.push(Violation::new(
                    "unknown side",
                    format!("relator {k} uses {s}"),
                ));
            }
            if let Some(p) = first_cancellation(r) {
                violations.push(Violation::new(
                    "relator not reduced",
                    format!("relator {k} at position {p}"),
                ));
            }
        }
        if violations.is_empty() {
            Ok(Presentation {
                generators,
                relators,
            })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }
}

/// A broken invariant, naming the offending element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub element: String,
}

impl Violation {
    pub fn new(invariant: impl Into<String>, element: impl Into<String>) -> Self {
        Violation {
            invariant: invariant.into(),
            element: element.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.element)
    }
}

fn check_unique(items: &[String], invariant: &str, out: &mut Vec<Violation>) {
    let mut seen = HashSet::new();
    for item in items {
        if !seen.insert(item) {
            out.push(Violation::new(invariant, item.clone()));
        }
    }
}

// ---------------------------------------------------------------------------
// File formats

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileEntry {
    pub id: String,
    pub sides: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSetFile {
    pub generators: usize,
    pub colors: Vec<String>,
    pub tiles: Vec<TileEntry>,
    /// Generators declared to be their own inverse. Always rejected.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub involutions: Vec<String>,
}

impl TileSetFile {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let d = self.generators;
        if d == 0 {
            out.push(Violation::new("generator count", "d must be at least 1"));
        }
        for g in &self.involutions {
            out.push(Violation::new("generator equals its inverse", g.clone()));
        }
        check_unique(&self.colors, "duplicate color", &mut out);
        let ids: Vec<String> = self.tiles.iter().map(|t| t.id.clone()).collect();
        check_unique(&ids, "duplicate tile id", &mut out);
        let colors: HashSet<&String> = self.colors.iter().collect();
        for tile in &self.tiles {
            let mut seen = BTreeSet::new();
            for (name, color) in &tile.sides {
                match Side::parse(name, d) {
                    Ok(side) => {
                        if !seen.insert(side) {
                            out.push(Violation::new(
                                "duplicate side",
                                format!("tile `{}` side {name}", tile.id),
                            ));
                        }
                    }
                    Err(_) => out.push(Violation::new(
                        "unknown side",
                        format!("tile `{}` side {name}", tile.id),
                    )),
                }
                if !colors.contains(color) {
                    out.push(Violation::new(
                        "unknown color",
                        format!("tile `{}` side {name} color `{color}`", tile.id),
                    ));
                }
            }
            for side in Side::all(d) {
                if !seen.contains(&side) {
                    out.push(Violation::new(
                        "incomplete side map",
                        format!("tile `{}` missing {side}", tile.id),
                    ));
                }
            }
        }
        out
    }

    pub fn into_tile_set(self) -> Result<WangTileSet> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let index: HashMap<&String, usize> = self
            .colors
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let d = self.generators;
        let tiles = self
            .tiles
            .iter()
            .map(|t| {
                let mut sides = vec![0; 2 * d];
                for (name, color) in &t.sides {
                    let side = Side::parse(name, d).expect("validated");
                    sides[side.slot()] = index[color];
                }
                (t.id.clone(), sides)
            })
            .collect();
        WangTileSet::new(d, self.colors, tiles)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEntry {
    pub generator: usize,
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFamilyFile {
    pub alphabet: Vec<String>,
    pub graphs: Vec<GraphEntry>,
}

impl GraphFamilyFile {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_unique(&self.alphabet, "duplicate letter", &mut out);
        let d = self.graphs.len();
        if d == 0 {
            out.push(Violation::new("generator count", "family has no graphs"));
        }
        let mut declared = BTreeSet::new();
        for entry in &self.graphs {
            if entry.generator == 0 || entry.generator > d {
                out.push(Violation::new(
                    "generator out of range",
                    format!("g{}", entry.generator),
                ));
            } else if !declared.insert(entry.generator) {
                out.push(Violation::new(
                    "duplicate generator",
                    format!("g{}", entry.generator),
                ));
            }
        }
        let letters: HashSet<&String> = self.alphabet.iter().collect();
        for entry in &self.graphs {
            for (a, b) in &entry.edges {
                for v in [a, b] {
                    if !letters.contains(v) {
                        out.push(Violation::new(
                            "unknown vertex",
                            format!("edge {a} -> {b} of g{} uses `{v}`", entry.generator),
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn into_family(self) -> Result<GraphFamily> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let index: HashMap<&String, usize> = self
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let n = self.alphabet.len();
        let mut graphs = vec![Digraph::empty(n); self.graphs.len()];
        for entry in &self.graphs {
            graphs[entry.generator - 1] =
                Digraph::from_edges(n, entry.edges.iter().map(|(a, b)| (index[a], index[b])));
        }
        GraphFamily::new(self.alphabet, graphs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub generators: usize,
    pub relators: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub involutions: Vec<String>,
}

impl PresentationFile {
    pub fn into_presentation(self) -> Result<Presentation> {
        let mut violations: Vec<Violation> = self
            .involutions
            .iter()
            .map(|g| Violation::new("generator equals its inverse", g.clone()))
            .collect();
        let mut relators = Vec::new();
        for (k, r) in self.relators.iter().enumerate() {
            let mut word = Vec::new();
            for s in r {
                match Side::parse(s, self.generators) {
                    Ok(side) => word.push(side),
                    Err(_) => violations.push(Violation::new(
                        "unknown side",
                        format!("relator {k}: `{s}`"),
                    )),
                }
            }
            relators.push(word);
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Presentation::new(self.generators, relators)
    }
}

/// Either kind of input accepted by commands that work on graphs.
#[derive(Clone, Debug)]
pub enum Instance {
    Tiles(WangTileSet),
    Graphs(GraphFamily),
}

impl Instance {
    pub fn graphs(&self) -> GraphFamily {
        match self {
            Instance::Tiles(t) => wang_to_graphs(t),
            Instance::Graphs(g) => g.clone(),
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "{what} file, line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

pub fn parse_tile_set(text: &str) -> Result<WangTileSet> {
    parse_json::<TileSetFile>(text, "tile set")?.into_tile_set()
}

pub fn parse_graph_family(text: &str) -> Result<GraphFamily> {
    parse_json::<GraphFamilyFile>(text, "graph family")?.into_family()
}

pub fn parse_presentation(text: &str) -> Result<Presentation> {
    parse_json::<PresentationFile>(text, "presentation")?.into_presentation()
}

/// Dispatches on the top-level keys: `tiles` for a tile set, `graphs` for a family.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: serde_json::Value = parse_json(text, "input")?;
    match &value {
        serde_json::Value::Object(map) if map.contains_key("tiles") => {
            parse_tile_set(text).map(Instance::Tiles)
        }
        serde_json::Value::Object(map) if map.contains_key("graphs") => {
            parse_graph_family(text).map(Instance::Graphs)
        }
        _ => Err(Error::Parse(
            "input file has neither a `tiles` nor a `graphs` field".into(),
        )),
    }
}

/// Validates any input document without converting it.
pub fn validate_document(text: &str) -> Result<Vec<Violation>> {
    let value: serde_json::Value = parse_json(text, "input")?;
    match &value {
        serde_json::Value::Object(map) if map.contains_key("tiles") => {
            Ok(parse_json::<TileSetFile>(text, "tile set")?.validate())
        }
        serde_json::Value::Object(map) if map.contains_key("graphs") => {
            Ok(parse_json::<GraphFamilyFile>(text, "graph family")?.validate())
        }
        _ => Err(Error::Parse(
            "input file has neither a `tiles` nor a `graphs` field".into(),
        )),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The 3-letter family: `Γ_1` the cycle `0→1→2→0`, `Γ_2 = {1→0, 0→2, 1→1, 2→2}`.
    pub fn three_letter_family() -> GraphFamily {
        GraphFamily::from_indexed_edges(
            3,
            &[
                vec![(0, 1), (1, 2), (2, 0)],
                vec![(1, 0), (0, 2), (1, 1), (2, 2)],
            ],
        )
    }

    /// The conjugate 3-tile set on colors a, b, c.
    pub fn three_tiles() -> WangTileSet {
        WangTileSet::square(&[
            ("0", ["a", "b", "a", "b"]),
            ("1", ["b", "c", "a", "a"]),
            ("2", ["c", "a", "b", "b"]),
        ])
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn side_names_round_trip() {
        for s in Side::all(3) {
            assert_eq!(s.to_string().parse::<Side>().unwrap(), s);
        }
        assert_eq!(Side::parse("left", 2).unwrap(), Side::backward(0));
        assert_eq!(Side::parse("top", 2).unwrap(), Side::forward(1));
        assert!(Side::parse("top", 3).is_err());
        assert!(Side::parse("g3", 2).is_err());
        assert!(Side::parse("g0", 2).is_err());
        assert!(Side::parse("g1_in", 2).is_err());
    }

    #[test]
    fn three_tiles_conjugate_to_three_letter_family() {
        let graphs = wang_to_graphs(&three_tiles());
        let expected = three_letter_family();
        assert_eq!(graphs.graphs(), expected.graphs());
    }

    #[test]
    fn single_uniform_tile_gives_self_loops() {
        let tiles = WangTileSet::new(3, vec!["c".into()], vec![("t".into(), vec![0; 6])]).unwrap();
        let graphs = wang_to_graphs(&tiles);
        for g in graphs.graphs() {
            assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0)]);
        }
    }

    fn random_tiles(rng: &mut impl Rng, d: usize, n: usize, colors: usize) -> WangTileSet {
        let colors_v = (0..colors).map(|c| format!("c{c}")).collect();
        let tiles = (0..n)
            .map(|i| {
                (
                    format!("t{i}"),
                    (0..2 * d).map(|_| rng.gen_range(0..colors)).collect(),
                )
            })
            .collect();
        WangTileSet::new(d, colors_v, tiles).unwrap()
    }

    #[test]
    fn wang_to_graphs_matches_pairwise_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let tiles = random_tiles(&mut rng, 2, 4, 2);
            let graphs = wang_to_graphs(&tiles);
            for i in 0..2 {
                for a in 0..4 {
                    for b in 0..4 {
                        let expect = tiles.tile(a).color(Side::forward(i))
                            == tiles.tile(b).color(Side::backward(i));
                        assert_eq!(graphs.graph(i).has_edge(a, b), expect);
                    }
                }
            }
            assert_eq!(wang_to_graphs(&tiles), graphs);
        }
    }

    #[test]
    fn functional_tiles_for_two_five_cycles() {
        // Γ_1 = (0 1 4 3 2), Γ_2 = (0 1 2 4 3)
        let graphs = GraphFamily::from_indexed_edges(
            5,
            &[
                vec![(0, 1), (1, 4), (4, 3), (3, 2), (2, 0)],
                vec![(0, 1), (1, 2), (2, 4), (4, 3), (3, 0)],
            ],
        );
        let tiles = graphs_to_wang_functional(&graphs).unwrap();
        // (left, right, top, bottom) per tile
        let table = [
            (0, 1, 1, 0),
            (1, 4, 2, 1),
            (2, 0, 4, 2),
            (3, 2, 0, 3),
            (4, 3, 3, 4),
        ];
        for (i, (l, r, t, b)) in table.into_iter().enumerate() {
            let tile = tiles.tile(i);
            let name = |s| tiles.colors()[tile.color(s)].parse::<usize>().unwrap();
            assert_eq!(name(Side::backward(0)), l);
            assert_eq!(name(Side::forward(0)), r);
            assert_eq!(name(Side::forward(1)), t);
            assert_eq!(name(Side::backward(1)), b);
        }
        assert_eq!(wang_to_graphs(&tiles).graphs(), graphs.graphs());
    }

    #[test]
    fn functional_one_letter() {
        let graphs = GraphFamily::from_indexed_edges(1, &[vec![(0, 0)], vec![(0, 0)]]);
        let tiles = graphs_to_wang_functional(&graphs).unwrap();
        assert_eq!(tiles.len(), 1);
        assert!(Side::all(2).all(|s| tiles.tile(0).color(s) == 0));
    }

    #[test]
    fn functional_rejects_non_permutation() {
        let graphs = three_letter_family();
        assert!(matches!(
            graphs_to_wang_functional(&graphs),
            Err(Error::NotFunctional { generator: 2, .. })
        ));
    }

    #[test]
    fn functional_round_trip_on_random_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=8);
            let d = rng.gen_range(1..=3);
            let edges: Vec<Vec<(usize, usize)>> = (0..d)
                .map(|_| {
                    let mut perm: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        perm.swap(i, rng.gen_range(0..=i));
                    }
                    perm.into_iter().enumerate().collect()
                })
                .collect();
            let graphs = GraphFamily::from_indexed_edges(n, &edges);
            let tiles = graphs_to_wang_functional(&graphs).unwrap();
            assert_eq!(wang_to_graphs(&tiles), graphs);
        }
    }

    #[test]
    fn color_class_examples() {
        let tiles = three_tiles();
        assert_eq!(color_class_by_name(&tiles, "a", "g1").unwrap(), vec![2]);
        assert_eq!(color_class_by_name(&tiles, "a", "left").unwrap(), vec![0]);
        // nobody shows c on top
        assert_eq!(
            color_class_by_name(&tiles, "c", "top").unwrap(),
            Vec::<usize>::new()
        );
        assert!(matches!(
            color_class_by_name(&tiles, "z", "top"),
            Err(Error::UnknownColor(_))
        ));
        assert!(matches!(
            color_class_by_name(&tiles, "a", "g3"),
            Err(Error::UnknownSide(_))
        ));
    }

    #[test]
    fn color_classes_partition_tiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let tiles = random_tiles(&mut rng, 3, 5, 3);
            for side in Side::all(3) {
                let mut all: Vec<usize> = (0..3)
                    .flat_map(|c| color_class(&tiles, c, side).unwrap())
                    .collect();
                all.sort();
                assert_eq!(all, (0..5).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn validate_reports_missing_side() {
        let doc = r#"{"generators": 2, "colors": ["a"], "tiles": [
            {"id": "t", "sides": {"g1": "a", "g1_inv": "a", "g2": "a"}}]}"#;
        let file: TileSetFile = serde_json::from_str(doc).unwrap();
        let v = file.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].invariant, "incomplete side map");
        assert!(v[0].element.contains("g2_inv"));
    }

    #[test]
    fn validate_reports_unknown_vertex() {
        let doc =
            r#"{"alphabet": ["a", "b"], "graphs": [{"generator": 1, "edges": [["a", "z"]]}]}"#;
        let v = validate_document(doc).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].invariant, "unknown vertex");
    }

    #[test]
    fn validate_accepts_three_tiles() {
        let text = serde_json::to_string(&three_tiles().to_file()).unwrap();
        assert!(validate_document(&text).unwrap().is_empty());
        assert_eq!(parse_tile_set(&text).unwrap(), three_tiles());
    }

    #[test]
    fn validate_flags_unknown_color_and_duplicates() {
        let doc = r#"{"generators": 1, "colors": ["a"], "tiles": [
            {"id": "t", "sides": {"g1": "a", "g1_inv": "q"}},
            {"id": "t", "sides": {"g1": "a", "g1_inv": "a"}}]}"#;
        let v = validate_document(doc).unwrap();
        let kinds: Vec<&str> = v.iter().map(|v| v.invariant.as_str()).collect();
        assert!(kinds.contains(&"unknown color"));
        assert!(kinds.contains(&"duplicate tile id"));
    }

    #[test]
    fn involutions_are_rejected() {
        let doc = r#"{"generators": 1, "relators": [["g1", "g1"]], "involutions": ["g1"]}"#;
        assert!(matches!(parse_presentation(doc), Err(Error::Invalid(_))));
        let doc = r#"{"generators": 1, "relators": [["g1", "g1"]]}"#;
        assert!(parse_presentation(doc).is_ok());
    }

    #[test]
    fn presentation_rejects_unreduced() {
        let doc = r#"{"generators": 2, "relators": [["g1", "g2", "g2_inv"]]}"#;
        let err = parse_presentation(doc).unwrap_err();
        assert!(err.to_string().contains("not reduced"));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_tile_set("{\n \"generators\": 2,\n \"colors\": [1]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn graph_file_round_trip_collapses_parallel_edges() {
        let doc = r#"{"alphabet": ["x", "y"], "graphs": [{"generator": 1, "edges": [["x", "y"], ["x", "y"]]}]}"#;
        let family = parse_graph_family(doc).unwrap();
        assert_eq!(family.graph(0).edge_count(), 1);
        let back = serde_json::to_string(&family.to_file()).unwrap();
        assert_eq!(parse_graph_family(&back).unwrap(), family);
    }
}
