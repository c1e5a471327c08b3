//! Brute-force ground truth at desk scale.
//!
//! `Z²` tilings use `g1` as the horizontal step (column + 1) and `g2` as the
//! vertical step (row + 1). Row 0 is the bottom row.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::ball::{BallLabeling, FreeBall};
use crate::error::{Error, Result};
use crate::model::{color_class, GraphFamily, Side, WangTileSet};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Rectangle,
    Torus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingGrid {
    pub width: usize,
    pub height: usize,
    pub topology: Topology,
    /// Tile index per cell, row-major from the bottom row.
    pub cells: Vec<usize>,
}

impl TilingGrid {
    pub fn at(&self, col: usize, row: usize) -> usize {
        self.cells[row * self.width + col]
    }

    /// Tile at an arbitrary `Z²` position of the periodic configuration.
    pub fn at_periodic(&self, col: i64, row: i64) -> usize {
        let c = col.rem_euclid(self.width as i64) as usize;
        let r = row.rem_euclid(self.height as i64) as usize;
        self.at(c, r)
    }

    /// Every adjacency whose shared sides disagree, as `((col, row), side)`.
    pub fn violations(&self, tiles: &WangTileSet) -> Vec<((usize, usize), Side)> {
        let mut out = Vec::new();
        let wrap = self.topology == Topology::Torus;
        for row in 0..self.height {
            for col in 0..self.width {
                let here = tiles.tile(self.at(col, row));
                let right = if col + 1 < self.width {
                    Some(col + 1)
                } else if wrap {
                    Some(0)
                } else {
                    None
                };
                if let Some(c) = right {
                    if here.color(Side::forward(0))
                        != tiles.tile(self.at(c, row)).color(Side::backward(0))
                    {
                        out.push(((col, row), Side::forward(0)));
                    }
                }
                let up = if row + 1 < self.height {
                    Some(row + 1)
                } else if wrap {
                    Some(0)
                } else {
                    None
                };
                if let Some(r) = up {
                    if here.color(Side::forward(1))
                        != tiles.tile(self.at(col, r)).color(Side::backward(1))
                    {
                        out.push(((col, row), Side::forward(1)));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self, tiles: &WangTileSet) -> bool {
        self.cells.len() == self.width * self.height
            && self.cells.iter().all(|&t| t < tiles.len())
            && self.violations(tiles).is_empty()
    }

    /// Rows of tile ids, bottom row first.
    pub fn rows(&self, tiles: &WangTileSet) -> Vec<Vec<String>> {
        self.cells
            .chunks(self.width)
            .map(|r| r.iter().map(|&t| tiles.tile(t).id.clone()).collect())
            .collect()
    }

    /// Smallest horizontal and vertical periods of the periodic configuration.
    pub fn minimal_periods(&self) -> (usize, usize) {
        let horizontal = (1..=self.width)
            .find(|&p| {
                self.width.is_multiple_of(p)
                    && (0..self.height).all(|r| {
                        (0..self.width).all(|c| self.at(c, r) == self.at((c + p) % self.width, r))
                    })
            })
            .expect("width is a period");
        let vertical = (1..=self.height)
            .find(|&p| {
                self.height.is_multiple_of(p)
                    && (0..self.height).all(|r| {
                        (0..self.width).all(|c| self.at(c, r) == self.at(c, (r + p) % self.height))
                    })
            })
            .expect("height is a period");
        (horizontal, vertical)
    }

    /// Repeats a torus tiling `m` times in each direction.
    pub fn tiled(&self, m: usize, topology: Topology) -> TilingGrid {
        let (w, h) = (self.width * m, self.height * m);
        let cells = (0..h)
            .flat_map(|r| (0..w).map(move |c| (c, r)))
            .map(|(c, r)| self.at(c % self.width, r % self.height))
            .collect();
        TilingGrid {
            width: w,
            height: h,
            topology,
            cells,
        }
    }
}

fn require_square_tiles(tiles: &WangTileSet) -> Result<()> {
    if tiles.generators() != 2 {
        return Err(Error::Unsupported(format!(
            "Z² tilings need 2 generators, tile set has {}",
            tiles.generators()
        )));
    }
    Ok(())
}

/// Exhaustive search for a `w × h` tiling with free boundary.
pub fn tile_rectangle(
    tiles: &WangTileSet,
    w: usize,
    h: usize,
    budget: u64,
) -> Result<Option<TilingGrid>> {
    search_grid(tiles, w, h, Topology::Rectangle, budget)
}

/// Exhaustive search for a `w × h` tiling with wrap-around adjacency.
pub fn tile_torus(
    tiles: &WangTileSet,
    w: usize,
    h: usize,
    budget: u64,
) -> Result<Option<TilingGrid>> {
    search_grid(tiles, w, h, Topology::Torus, budget)
}

/// Row-major backtracking. Each cell is checked against its left and lower
/// neighbors and, on a torus, against the wrapped right/upper neighbor once
/// that neighbor is placed. Every candidate tried counts as one node.
fn search_grid(
    tiles: &WangTileSet,
    w: usize,
    h: usize,
    topology: Topology,
    budget: u64,
) -> Result<Option<TilingGrid>> {
    require_square_tiles(tiles)?;
    if w == 0 || h == 0 {
        return Err(Error::Unsupported(
            "grid dimensions must be positive".into(),
        ));
    }
    if tiles.is_empty() {
        return Ok(None);
    }
    let (right, left, top, bottom) = (
        Side::forward(0),
        Side::backward(0),
        Side::forward(1),
        Side::backward(1),
    );
    let color = |t: usize, s: Side| tiles.tile(t).color(s);
    let cells = w * h;
    let mut grid = vec![0usize; cells];
    let mut next_choice = vec![0usize; cells];
    let mut nodes = 0u64;
    let wrap = topology == Topology::Torus;

    let fits = |grid: &[usize], pos: usize, t: usize| -> bool {
        let (col, row) = (pos % w, pos / w);
        if col > 0 && color(grid[pos - 1], right) != color(t, left) {
            return false;
        }
        if row > 0 && color(grid[pos - w], top) != color(t, bottom) {
            return false;
        }
        if wrap {
            // the first cell of the row is already placed (or is this cell)
            if col == w - 1 {
                let first = if w == 1 { t } else { grid[row * w] };
                if color(t, right) != color(first, left) {
                    return false;
                }
            }
            if row == h - 1 {
                let below = if h == 1 { t } else { grid[col] };
                if color(t, top) != color(below, bottom) {
                    return false;
                }
            }
        }
        true
    };

    let mut pos = 0usize;
    loop {
        let mut placed = false;
        while next_choice[pos] < tiles.len() {
            let t = next_choice[pos];
            next_choice[pos] += 1;
            nodes += 1;
            if nodes > budget {
                return Err(Error::ResourceLimit { budget });
            }
            if fits(&grid, pos, t) {
                grid[pos] = t;
                placed = true;
                break;
            }
        }
        if placed {
            if pos + 1 == cells {
                let out = TilingGrid {
                    width: w,
                    height: h,
                    topology,
                    cells: grid,
                };
                debug_assert!(out.is_valid(tiles));
                return Ok(Some(out));
            }
            pos += 1;
            next_choice[pos] = 0;
        } else {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
        }
    }
}

/// Exhaustive search for a valid labeling of the radius-`radius` ball of `F_d`.
///
/// Subtrees hanging below nodes of equal depth entered through the same side
/// are isomorphic, so feasibility is computed once per `(depth, side)` from
/// the leaves up, then a labeling is read off from the root down taking the
/// least feasible letter at each node.
pub fn tile_free_ball(
    graphs: &GraphFamily,
    radius: usize,
    budget: u64,
) -> Result<Option<BallLabeling>> {
    let d = graphs.generators();
    let n = graphs.letter_count();
    let size = FreeBall::size(d, radius);
    if size > budget {
        return Err(Error::ResourceLimit { budget });
    }
    if n == 0 {
        return Ok(None);
    }
    let sides: Vec<Side> = Side::all(d).collect();
    // feasible[t][s][a]: letter a can sit at depth t entered through sides[s]
    let mut feasible = vec![vec![vec![true; n]; sides.len()]; radius + 1];
    let supported = |a: usize, child: Side, below: &[bool]| {
        (0..n).any(|b| below[b] && graphs.compatible(a, child, b))
    };
    for t in (0..radius).rev() {
        for (s, &incoming) in sides.iter().enumerate() {
            for a in 0..n {
                feasible[t][s][a] = sides.iter().enumerate().all(|(cs, &child)| {
                    child == incoming.inv() || supported(a, child, &feasible[t + 1][cs])
                });
            }
        }
    }
    let root_ok: Vec<bool> = (0..n)
        .map(|a| {
            radius == 0
                || sides
                    .iter()
                    .enumerate()
                    .all(|(cs, &child)| supported(a, child, &feasible[1][cs]))
        })
        .collect();
    let Some(root) = (0..n).find(|&a| root_ok[a]) else {
        return Ok(None);
    };

    let ball = FreeBall::new(d, radius);
    let mut labels = vec![0; ball.len()];
    labels[0] = root;
    for (v, node) in ball.nodes().iter().enumerate().skip(1) {
        let (p, side) = (node.parent.expect("non-root"), node.side.expect("non-root"));
        let row = &feasible[node.depth][side.slot()];
        labels[v] = (0..n)
            .find(|&b| row[b] && graphs.compatible(labels[p], side, b))
            .expect("parent was feasible");
    }
    let out = BallLabeling {
        generators: d,
        radius,
        labels,
    };
    debug_assert!(out.is_valid(graphs));
    Ok(Some(out))
}

/// Frequencies and defects over the box `[-k, k]²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxAudit {
    pub radius: usize,
    pub box_size: usize,
    /// `#{h ∈ S_k : x_h = τ_i} / #S_k` per tile.
    pub frequencies: Vec<BigRational>,
    pub defects: Vec<Defect>,
    /// `(#(S_k + g)△S_k + #(S_k − g)△S_k) / #S_k` per generator.
    pub bounds: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub generator: usize,
    pub color: usize,
    /// `|Σ_{c_g} x^k − Σ_{c_{g^{-1}}} x^k|`.
    pub value: BigRational,
    pub bound: BigRational,
    /// The box side `2k + 1` is a multiple of the configuration's minimal
    /// period along this generator, so the defect must vanish.
    pub period_aligned: bool,
}

impl Defect {
    pub fn within_bound(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyReport {
    pub width: usize,
    pub height: usize,
    pub periods: (usize, usize),
    pub boxes: Vec<BoxAudit>,
}

impl FrequencyReport {
    pub fn all_within_bound(&self) -> bool {
        self.boxes
            .iter()
            .flat_map(|b| &b.defects)
            .all(Defect::within_bound)
    }

    pub fn aligned_defects_vanish(&self) -> bool {
        self.boxes
            .iter()
            .flat_map(|b| &b.defects)
            .filter(|d| d.period_aligned)
            .all(|d| d.value.is_zero())
    }

    pub fn frequencies_sum_to_one(&self) -> bool {
        self.boxes.iter().all(|b| {
            b.frequencies.iter().fold(BigRational::zero(), |a, f| a + f)
                == BigRational::from_integer(1.into())
        })
    }
}

/// `(#S, #(S + e_axis)△S)` for the box `[-k, k]^dims`, by direct counting.
pub fn box_boundary(k: usize, dims: usize, axis: usize) -> (usize, usize) {
    let side = 2 * k as i64 + 1;
    let total = (side as usize).pow(dims as u32);
    let inside = |p: &[i64]| p.iter().all(|&x| x.abs() <= k as i64);
    let mut moved_out = 0;
    for idx in 0..total {
        let mut p: Vec<i64> = (0..dims)
            .map(|j| (idx / (side as usize).pow(j as u32)) as i64 % side - k as i64)
            .collect();
        p[axis] += 1;
        if !inside(&p) {
            moved_out += 1;
        }
    }
    // translation is a bijection, so |S+g \ S| = |S \ S+g|
    (total, 2 * moved_out)
}

/// Tile frequencies of a torus tiling over centered boxes, read as a
/// periodic configuration of `Z²`, with the color-balance defects and the
/// boundary bound that controls them.
pub fn folner_audit(
    tiles: &WangTileSet,
    tiling: &TilingGrid,
    radii: &[usize],
) -> Result<FrequencyReport> {
    require_square_tiles(tiles)?;
    if tiling.topology != Topology::Torus || !tiling.is_valid(tiles) {
        return Err(Error::Unsupported(
            "frequency audit needs a valid torus tiling".into(),
        ));
    }
    let periods = tiling.minimal_periods();
    let mut boxes = Vec::new();
    for &k in radii {
        let ki = k as i64;
        let side = 2 * k + 1;
        let area = side * side;
        let mut counts = vec![0usize; tiles.len()];
        for row in -ki..=ki {
            for col in -ki..=ki {
                counts[tiling.at_periodic(col, row)] += 1;
            }
        }
        let frequencies: Vec<BigRational> = counts
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(area)))
            .collect();
        let bounds: Vec<BigRational> = (0..2)
            .map(|axis| {
                let (size, sym) = box_boundary(k, 2, axis);
                BigRational::new(BigInt::from(2 * sym), BigInt::from(size))
            })
            .collect();
        let mut defects = Vec::new();
        for (g, bound) in bounds.iter().enumerate() {
            let period = if g == 0 { periods.0 } else { periods.1 };
            for c in 0..tiles.colors().len() {
                let sum = |s: Side| {
                    color_class(tiles, c, s)
                        .expect("in range")
                        .iter()
                        .fold(BigRational::zero(), |a, &t| a + &frequencies[t])
                };
                let diff = sum(Side::forward(g)) - sum(Side::backward(g));
                defects.push(Defect {
                    generator: g,
                    color: c,
                    value: if diff < BigRational::zero() {
                        -diff
                    } else {
                        diff
                    },
                    bound: bound.clone(),
                    period_aligned: side % period == 0,
                });
            }
        }
        boxes.push(BoxAudit {
            radius: k,
            box_size: area,
            frequencies,
            defects,
            bounds,
        });
    }
    Ok(FrequencyReport {
        width: tiling.width,
        height: tiling.height,
        periods,
        boxes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{three_letter_family, three_tiles};
    use crate::model::graphs_to_wang_functional;
    use crate::star::prune_star;

    fn uniform_tile() -> WangTileSet {
        WangTileSet::new(2, vec!["c".into()], vec![("t".into(), vec![0; 4])]).unwrap()
    }

    fn commutator_tiles() -> WangTileSet {
        let graphs = GraphFamily::from_indexed_edges(
            5,
            &[
                vec![(0, 1), (1, 4), (4, 3), (3, 2), (2, 0)],
                vec![(0, 1), (1, 2), (2, 4), (4, 3), (3, 0)],
            ],
        );
        graphs_to_wang_functional(&graphs).unwrap()
    }

    #[test]
    fn uniform_tile_fills_everything() {
        let t = uniform_tile();
        let g = tile_rectangle(&t, 3, 2, DEFAULT_NODE_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(g.cells, vec![0; 6]);
        let g = tile_torus(&t, 1, 1, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert!(g.is_valid(&t));
    }

    #[test]
    fn commutator_tiles_have_no_square() {
        let t = commutator_tiles();
        assert_eq!(tile_rectangle(&t, 2, 2, DEFAULT_NODE_BUDGET).unwrap(), None);
        assert!(tile_rectangle(&t, 2, 1, DEFAULT_NODE_BUDGET)
            .unwrap()
            .is_some());
        for w in 1..=4 {
            for h in 1..=4 {
                assert_eq!(
                    tile_torus(&t, w, h, DEFAULT_NODE_BUDGET).unwrap(),
                    None,
                    "{w}x{h}"
                );
            }
        }
    }

    #[test]
    fn three_tiles_rectangle() {
        // width-3 rows are cyclic shifts of 0 1 2 and no shift stacks on another
        let t = three_tiles();
        let found = tile_rectangle(&t, 3, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(found, None);
        assert!(tile_rectangle(&t, 3, 1, DEFAULT_NODE_BUDGET)
            .unwrap()
            .is_some());
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let t = commutator_tiles();
        assert!(matches!(
            tile_torus(&t, 4, 4, 10),
            Err(Error::ResourceLimit { budget: 10 })
        ));
    }

    #[test]
    fn wrong_generator_count_is_rejected() {
        let t = WangTileSet::new(1, vec!["c".into()], vec![("t".into(), vec![0; 2])]).unwrap();
        assert!(matches!(
            tile_rectangle(&t, 1, 1, 100),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn torus_wraps_width_one() {
        // right = b, left = a: no 1-wide torus, but a 1-wide rectangle exists
        let t = WangTileSet::square(&[("t", ["a", "b", "c", "c"])]).unwrap();
        assert_eq!(tile_torus(&t, 1, 1, 100).unwrap(), None);
        assert!(tile_rectangle(&t, 1, 3, 100).unwrap().is_some());
    }

    #[test]
    fn torus_extends_to_rectangles() {
        let t = WangTileSet::square(&[("a", ["p", "q", "r", "r"]), ("b", ["q", "p", "r", "r"])])
            .unwrap();
        let torus = tile_torus(&t, 2, 1, 100).unwrap().unwrap();
        for m in 1..=3 {
            assert!(torus.tiled(m, Topology::Rectangle).is_valid(&t));
            assert!(tile_rectangle(&t, 2 * m, m, DEFAULT_NODE_BUDGET)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn free_ball_search() {
        let graphs = three_letter_family();
        let lab = tile_free_ball(&graphs, 2, DEFAULT_NODE_BUDGET)
            .unwrap()
            .unwrap();
        assert!(lab.is_valid(&graphs));
        let lab0 = tile_free_ball(&graphs, 0, DEFAULT_NODE_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(lab0.labels.len(), 1);
        // a lone edge cannot be extended
        let bad = GraphFamily::from_indexed_edges(2, &[vec![(0, 1)]]);
        assert!(prune_star(&bad).is_empty());
        assert_eq!(tile_free_ball(&bad, 2, DEFAULT_NODE_BUDGET).unwrap(), None);
        assert!(tile_free_ball(&bad, 0, DEFAULT_NODE_BUDGET)
            .unwrap()
            .is_some());
    }

    #[test]
    fn free_ball_budget() {
        let graphs = three_letter_family();
        assert!(matches!(
            tile_free_ball(&graphs, 10, 1000),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn box_boundary_matches_formula() {
        for k in 0..6 {
            for dims in 1..=3 {
                for axis in 0..dims {
                    let (size, sym) = box_boundary(k, dims, axis);
                    assert_eq!(size, (2 * k + 1).pow(dims as u32));
                    assert_eq!(sym, 2 * (2 * k + 1).pow(dims as u32 - 1));
                }
            }
        }
    }

    #[test]
    fn single_tile_audit_has_no_defect() {
        let t = uniform_tile();
        let g = tile_torus(&t, 1, 1, 100).unwrap().unwrap();
        let report = folner_audit(&t, &g, &(1..=5).collect::<Vec<_>>()).unwrap();
        assert!(report
            .boxes
            .iter()
            .flat_map(|b| &b.defects)
            .all(|d| d.value.is_zero()));
        assert!(report.frequencies_sum_to_one());
    }

    #[test]
    fn audit_bound_is_four_over_side() {
        let t = WangTileSet::square(&[("a", ["p", "q", "r", "s"]), ("b", ["q", "p", "s", "r"])])
            .unwrap();
        let g = tile_torus(&t, 2, 2, 1000).unwrap().unwrap();
        let report = folner_audit(&t, &g, &[1, 2, 3]).unwrap();
        for b in &report.boxes {
            for bound in &b.bounds {
                assert_eq!(
                    *bound,
                    BigRational::new(4.into(), BigInt::from(2 * b.radius + 1))
                );
            }
        }
        assert!(report.all_within_bound());
        // the checkerboard has period 2, so odd boxes are never aligned and some defect is nonzero
        assert!(report
            .boxes
            .iter()
            .flat_map(|b| &b.defects)
            .any(|d| !d.value.is_zero()));
    }

    #[test]
    fn aligned_boxes_have_zero_defect() {
        // period 3 horizontally: a b c a b c ...
        let t = WangTileSet::square(&[
            ("a", ["z", "x", "r", "r"]),
            ("b", ["x", "y", "r", "r"]),
            ("c", ["y", "z", "r", "r"]),
        ])
        .unwrap();
        let g = tile_torus(&t, 3, 1, 1000).unwrap().unwrap();
        assert_eq!(g.minimal_periods(), (3, 1));
        let report = folner_audit(&t, &g, &(1..=10).collect::<Vec<_>>()).unwrap();
        let aligned: Vec<_> = report
            .boxes
            .iter()
            .flat_map(|b| &b.defects)
            .filter(|d| d.period_aligned)
            .collect();
        assert!(aligned.iter().any(|d| d.generator == 0));
        assert!(report.aligned_defects_vanish());
        assert!(report.all_within_bound());
    }

    #[test]
    fn audit_rejects_rectangles() {
        let t = uniform_tile();
        let g = tile_rectangle(&t, 1, 1, 100).unwrap().unwrap();
        assert!(folner_audit(&t, &g, &[1]).is_err());
    }
}
