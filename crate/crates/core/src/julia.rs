//! Approximations of the semigroup Julia set: the inverse-iteration chaos
//! game, word-tree grid classification, component extraction and the
//! surrounding order.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::min_distance;
use crate::grid::{GridSpec, Window};
use crate::poly::{Polynomial, C64};
use crate::semigroup::{Disk, GeneratorSet};

pub const DEFAULT_BURN_IN: usize = 100;
pub const DEFAULT_BUDGET: usize = 1_000_000;
/// Independent chaos-game trajectories. Fixed so output does not depend on
/// the worker count.
const TRAJECTORIES: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CloudSource {
    ChaosGame,
    InverseTree,
    GridBoundary,
    Postcritical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<C64>,
    pub source: CloudSource,
}

/// How the chaos game picks the next inverse branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchWeighting {
    /// Generator with probability proportional to degree, then a uniform root.
    #[default]
    Degree,
    /// Uniform generator, then a uniform root.
    Uniform,
}

/// A repelling fixed point of the first generator that has one.
pub fn repelling_fixed_point(gs: &GeneratorSet) -> Result<C64> {
    for h in gs.gens() {
        let dh = h.derivative()?;
        let best = h
            .fixed_points()?
            .into_iter()
            .map(|z| (z, dh.apply(z).norm()))
            .filter(|(_, m)| *m > 1.0)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((z, _)) = best {
            return Ok(z);
        }
    }
    Err(Error::Seed)
}

/// Samples `J(G)` as the attractor of the inverse branches of all
/// generators, starting from a repelling fixed point. Returns
/// `iterations - burn_in` points.
pub fn chaos_game_julia(gs: &GeneratorSet, iterations: usize, burn_in: usize, seed: u64) -> Result<PointCloud> {
    chaos_game_with(gs, iterations, burn_in, seed, BranchWeighting::Degree)
}

pub fn chaos_game_with(
    gs: &GeneratorSet,
    iterations: usize,
    burn_in: usize,
    seed: u64,
    weighting: BranchWeighting,
) -> Result<PointCloud> {
    if burn_in < 100 || iterations <= burn_in {
        return Err(Error::Precondition("need iterations > burn_in >= 100".into()));
    }
    let start = repelling_fixed_point(gs)?;
    let weights: Vec<f64> = match weighting {
        BranchWeighting::Degree => gs.gens().iter().map(|h| h.degree() as f64).collect(),
        BranchWeighting::Uniform => vec![1.0; gs.len()],
    };
    let total: f64 = weights.iter().sum();
    let keep = iterations - burn_in;
    let per = keep.div_ceil(TRAJECTORIES as usize);
    let chunks: Vec<Result<Vec<C64>>> = (0..TRAJECTORIES)
        .into_par_iter()
        .map(|t| {
            let n = per.min(keep.saturating_sub(t as usize * per));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let mut z = start;
            let mut out = Vec::with_capacity(n);
            for step in 0..burn_in + n {
                let mut u = rng.random::<f64>() * total;
                let mut k = 0;
                while k + 1 < weights.len() && u >= weights[k] {
                    u -= weights[k];
                    k += 1;
                }
                let roots = gs.gens()[k].shifted(z).roots()?;
                z = roots[rng.random_range(0..roots.len())];
                if step >= burn_in {
                    out.push(z);
                }
            }
            Ok(out)
        })
        .collect();
    let mut points = Vec::with_capacity(keep);
    for c in chunks {
        points.extend(c?);
    }
    Ok(PointCloud { points, source: CloudSource::ChaosGame })
}

/// Breadth-first walk of the backward orbit tree of a repelling fixed point
/// that stops expanding a node once its cell of side `cell` already holds
/// `cap` points. Unlike the chaos game this reaches parts of `J(G)` with tiny
/// harmonic measure, such as pinch points. Stops after `max_points` points.
pub fn inverse_tree_cloud(gs: &GeneratorSet, max_points: usize, cell: f64, cap: u32) -> Result<PointCloud> {
    if !(cell.is_finite() && cell > 0.0) || cap == 0 {
        return Err(Error::Precondition("need cell > 0 and cap >= 1".into()));
    }
    let key = |w: C64| ((w.re / cell).floor() as i64, (w.im / cell).floor() as i64);
    let mut visits: HashMap<(i64, i64), u32> = HashMap::new();
    let mut queue = VecDeque::from([repelling_fixed_point(gs)?]);
    let mut points = Vec::new();
    while let Some(z) = queue.pop_front() {
        if points.len() >= max_points {
            break;
        }
        for h in gs.gens() {
            for w in h.shifted(z).roots()? {
                let count = visits.entry(key(w)).or_insert(0);
                if *count < cap {
                    *count += 1;
                    points.push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    points.truncate(max_points);
    Ok(PointCloud { points, source: CloudSource::InverseTree })
}

/// `n` points of `J(G)`: the largest complete capped inverse tree (cap
/// doubling from 1) that fits, topped up with chaos-game points.
pub fn julia_cloud(gs: &GeneratorSet, n: usize, cell: f64, seed: u64) -> Result<PointCloud> {
    let mut tree = Vec::new();
    let mut cap = 1u32;
    while cap <= 1 << 16 {
        let t = inverse_tree_cloud(gs, n + 1, cell, cap)?;
        if t.points.len() > n {
            break;
        }
        let exhausted = t.points.len() == tree.len();
        tree = t.points;
        if exhausted {
            break;
        }
        cap *= 2;
    }
    if tree.len() < n {
        let fill = chaos_game_julia(gs, n - tree.len() + DEFAULT_BURN_IN, DEFAULT_BURN_IN, seed)?;
        tree.extend(fill.points);
    }
    Ok(PointCloud { points: tree, source: CloudSource::InverseTree })
}

/// Every preimage of every cloud point under every generator.
pub fn preimage_cloud(gs: &GeneratorSet, cloud: &[C64]) -> Result<Vec<C64>> {
    let parts: Vec<Result<Vec<C64>>> = cloud
        .par_iter()
        .map(|&z| {
            let mut v = Vec::new();
            for h in gs.gens() {
                v.extend(h.shifted(z).roots()?);
            }
            Ok(v)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellLabel {
    BoundedAll,
    EscapedAll,
    Mixed,
    Undecided,
}

/// Per-cell word-tree labels plus the fate-split Julia mask.
#[derive(Debug, Clone)]
pub struct GridRegion {
    pub grid: GridSpec,
    pub depth: usize,
    pub budget: usize,
    pub escape_radius: f64,
    pub labels: Vec<CellLabel>,
    /// Shortest escaping word per cell, `u16::MAX` if none escaped.
    pub min_escape_depth: Vec<u16>,
    /// Cells adjacent to a neighbour whose fate differs under some word.
    pub julia: Vec<bool>,
}

struct Dynamics<'a> {
    gens: &'a [Polynomial],
    radius: f64,
    trap: Option<Disk>,
}

impl Dynamics<'_> {
    #[inline]
    fn escaped(&self, z: C64) -> bool {
        !(z.norm_sqr() <= self.radius * self.radius)
    }

    #[inline]
    fn trapped(&self, z: C64) -> bool {
        self.trap.map_or(false, |d| d.contains(z))
    }

    /// DFS over all words up to `depth`, pruning escaped and trapped branches.
    fn classify(&self, z: C64, depth: usize, budget: usize) -> (CellLabel, u16) {
        let mut stack = vec![(z, 0usize)];
        let (mut saw_escape, mut saw_bounded) = (false, false);
        let mut min_escape = u16::MAX;
        let mut nodes = 0usize;
        while let Some((w, level)) = stack.pop() {
            nodes += 1;
            if nodes > budget {
                return (CellLabel::Undecided, min_escape);
            }
            if self.escaped(w) {
                saw_escape = true;
                min_escape = min_escape.min(level as u16);
                if saw_bounded {
                    return (CellLabel::Mixed, min_escape);
                }
                continue;
            }
            if self.trapped(w) || level == depth {
                saw_bounded = true;
                if saw_escape {
                    return (CellLabel::Mixed, min_escape);
                }
                continue;
            }
            // the child popped first heads toward the fate not yet seen
            let mut kids: Vec<C64> = self.gens.iter().map(|h| h.apply(w)).collect();
            kids.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()));
            if saw_escape {
                kids.reverse();
            }
            stack.extend(kids.into_iter().map(|k| (k, level + 1)));
        }
        let label = if saw_escape { CellLabel::EscapedAll } else { CellLabel::BoundedAll };
        (label, min_escape)
    }

    /// Some continuation of length `rem` avoids escape.
    fn exists_bounded(&self, z: C64, rem: usize, nodes: &mut usize, budget: usize) -> bool {
        let mut stack = vec![(z, 0usize)];
        while let Some((w, level)) = stack.pop() {
            *nodes += 1;
            if *nodes > budget {
                return false;
            }
            if self.escaped(w) {
                continue;
            }
            if self.trapped(w) || level == rem {
                return true;
            }
            stack.extend(self.gens.iter().map(|h| (h.apply(w), level + 1)));
        }
        false
    }

    /// Some continuation of length `rem` escapes.
    fn exists_escape(&self, z: C64, rem: usize, nodes: &mut usize, budget: usize) -> bool {
        let mut stack = vec![(z, 0usize)];
        while let Some((w, level)) = stack.pop() {
            *nodes += 1;
            if *nodes > budget {
                return false;
            }
            if self.escaped(w) {
                return true;
            }
            if self.trapped(w) || level == rem {
                continue;
            }
            stack.extend(self.gens.iter().map(|h| (h.apply(w), level + 1)));
        }
        false
    }

    /// True if some word of length at most `depth` sends exactly one of the
    /// two points past the escape radius while the other survives it.
    fn fates_split(&self, a: C64, b: C64, depth: usize, budget: usize) -> bool {
        let mut stack = vec![(a, b, 0usize)];
        let mut nodes = 0usize;
        while let Some((wa, wb, level)) = stack.pop() {
            nodes += 1;
            if nodes > budget {
                return false;
            }
            let rem = depth - level;
            match (self.escaped(wa), self.escaped(wb)) {
                (true, true) => continue,
                (true, false) => {
                    if self.exists_bounded(wb, rem, &mut nodes, budget) {
                        return true;
                    }
                    continue;
                }
                (false, true) => {
                    if self.exists_bounded(wa, rem, &mut nodes, budget) {
                        return true;
                    }
                    continue;
                }
                (false, false) => {}
            }
            match (self.trapped(wa), self.trapped(wb)) {
                (true, true) => continue,
                (true, false) => {
                    if self.exists_escape(wb, rem, &mut nodes, budget) {
                        return true;
                    }
                    continue;
                }
                (false, true) => {
                    if self.exists_escape(wa, rem, &mut nodes, budget) {
                        return true;
                    }
                    continue;
                }
                (false, false) => {}
            }
            if level == depth {
                continue;
            }
            for h in self.gens {
                stack.push((h.apply(wa), h.apply(wb), level + 1));
            }
        }
        false
    }
}

/// Labels every cell centre by the fate of all words of length at most
/// `depth` and computes the fate-split Julia mask.
pub fn word_tree_classify(gs: &GeneratorSet, grid: GridSpec, depth: usize, budget: usize) -> Result<GridRegion> {
    if depth < 1 {
        return Err(Error::Precondition("depth must be >= 1".into()));
    }
    if depth >= u16::MAX as usize {
        return Err(Error::Precondition("depth too large".into()));
    }
    let dynamics = Dynamics { gens: gs.gens(), radius: gs.escape_radius(), trap: gs.trapping_disk() };
    let (nx, ny) = (grid.nx, grid.ny);
    let rows: Vec<Vec<(CellLabel, u16)>> = (0..ny)
        .into_par_iter()
        .map(|j| (0..nx).map(|i| dynamics.classify(grid.center(i, j), depth, budget)).collect())
        .collect();
    let (labels, min_escape_depth): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();

    // (right split, down split) per cell
    let splits: Vec<Vec<(bool, bool)>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let idx = grid.index(i, j);
                    let z = grid.center(i, j);
                    let check = |other: usize, zo: C64| {
                        let (la, lb) = (labels[idx], labels[other]);
                        // identical all-bounded or all-escaped cells can still
                        // be separated by a word, but never when both are
                        // single-fate on the same side of a one-map system
                        if gs.len() == 1 && la == lb && la != CellLabel::Undecided {
                            return false;
                        }
                        dynamics.fates_split(z, zo, depth, budget)
                    };
                    let right = i + 1 < nx && check(idx + 1, grid.center(i + 1, j));
                    let down = j + 1 < ny && check(idx + nx, grid.center(i, j + 1));
                    (right, down)
                })
                .collect()
        })
        .collect();
    let mut julia = vec![false; grid.len()];
    for (j, row) in splits.iter().enumerate() {
        for (i, &(right, down)) in row.iter().enumerate() {
            let idx = grid.index(i, j);
            if right {
                julia[idx] = true;
                julia[idx + 1] = true;
            }
            if down {
                julia[idx] = true;
                julia[idx + nx] = true;
            }
        }
    }
    Ok(GridRegion {
        grid,
        depth,
        budget,
        escape_radius: gs.escape_radius(),
        labels,
        min_escape_depth,
        julia,
    })
}

/// Which cells of a [`GridRegion`] to treat as the set of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Label(CellLabel),
    /// The fate-split mask.
    Julia,
    /// MIXED cells plus BOUNDED_ALL cells touching ESCAPED_ALL cells.
    MixedBoundary,
}

impl GridRegion {
    pub fn histogram(&self) -> BTreeMap<CellLabel, usize> {
        let mut h = BTreeMap::new();
        for l in &self.labels {
            *h.entry(*l).or_insert(0) += 1;
        }
        h
    }

    pub fn mask(&self, sel: Selection) -> Vec<bool> {
        match sel {
            Selection::Label(l) => self.labels.iter().map(|x| *x == l).collect(),
            Selection::Julia => self.julia.clone(),
            Selection::MixedBoundary => (0..self.grid.len())
                .map(|idx| match self.labels[idx] {
                    CellLabel::Mixed => true,
                    CellLabel::BoundedAll => {
                        self.grid.neighbors4(idx).any(|n| self.labels[n] == CellLabel::EscapedAll)
                    }
                    _ => false,
                })
                .collect(),
        }
    }

    /// Centres of the selected cells.
    pub fn cell_points(&self, sel: Selection) -> Vec<C64> {
        self.mask(sel)
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(idx, _)| self.grid.center_of(idx))
            .collect()
    }

    /// BOUNDED_ALL cells whose 4-neighbours are all BOUNDED_ALL.
    pub fn eroded_bounded(&self) -> Vec<bool> {
        erode(&self.grid, &self.mask(Selection::Label(CellLabel::BoundedAll)))
    }
}

/// Cells of `mask` whose four neighbours are also in `mask` (cells on the
/// window edge are dropped).
pub fn erode(grid: &GridSpec, mask: &[bool]) -> Vec<bool> {
    (0..grid.len())
        .map(|idx| {
            let (i, j) = grid.coords(idx);
            mask[idx] && !grid.on_edge(i, j) && grid.neighbors4(idx).all(|n| mask[n])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Order {
    Less,
    Greater,
    Incomparable,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRecord {
    pub id: usize,
    /// Cell indices, ascending.
    pub cells: Vec<usize>,
    pub grid: GridSpec,
    /// Plane-coordinate bounding box of the cell centres.
    pub bbox: Window,
    pub order_relations: BTreeMap<usize, Order>,
}

impl ComponentRecord {
    pub fn touches_edge(&self) -> bool {
        self.cells.iter().any(|&c| {
            let (i, j) = self.grid.coords(c);
            self.grid.on_edge(i, j)
        })
    }

    pub fn points(&self) -> Vec<C64> {
        self.cells.iter().map(|&c| self.grid.center_of(c)).collect()
    }
}

/// 4-connected components of a boolean mask, ids in scanline order of each
/// component's first cell.
pub fn components_of_mask(grid: &GridSpec, mask: &[bool]) -> Vec<ComponentRecord> {
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut cells = Vec::new();
        while let Some(c) = queue.pop_front() {
            cells.push(c);
            for n in grid.neighbors4(c) {
                if mask[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        cells.sort_unstable();
        let pts = cells.iter().map(|&c| grid.center_of(c));
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        out.push(ComponentRecord {
            id: out.len(),
            cells,
            grid: *grid,
            bbox: Window { re_min: lo.re, re_max: hi.re, im_min: lo.im, im_max: hi.im },
            order_relations: BTreeMap::new(),
        });
    }
    out
}

pub fn extract_components(region: &GridRegion, sel: Selection) -> Vec<ComponentRecord> {
    components_of_mask(&region.grid, &region.mask(sel))
}

/// Cells reachable from the window border without crossing `blocker`
/// (8-connected background against a 4-connected foreground).
fn outside_of(grid: &GridSpec, blocker: &[usize]) -> Vec<bool> {
    let mut blocked = vec![false; grid.len()];
    for &c in blocker {
        blocked[c] = true;
    }
    let mut reach = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for idx in 0..grid.len() {
        let (i, j) = grid.coords(idx);
        if grid.on_edge(i, j) && !blocked[idx] {
            reach[idx] = true;
            queue.push_back(idx);
        }
    }
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    while let Some(c) = queue.pop_front() {
        let (i, j) = grid.coords(c);
        for di in -1isize..=1 {
            for dj in -1isize..=1 {
                let (a, b) = (i as isize + di, j as isize + dj);
                if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= nx || b >= ny {
                    continue;
                }
                let n = grid.index(a as usize, b as usize);
                if !blocked[n] && !reach[n] {
                    reach[n] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    reach
}

fn check_comparable(a: &ComponentRecord, b: &ComponentRecord) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::Precondition("components from different grids".into()));
    }
    if a.touches_edge() || b.touches_edge() {
        return Err(Error::Indeterminate(format!(
            "component {} or {} touches the window edge; enlarge the window",
            a.id, b.id
        )));
    }
    Ok(())
}

/// Surrounding order: `a < b` when `a` lies in a bounded complementary
/// component of `b`.
pub fn surrounding_compare(a: &ComponentRecord, b: &ComponentRecord) -> Result<Order> {
    if a.id == b.id && a.cells == b.cells {
        return Ok(Order::Equal);
    }
    check_comparable(a, b)?;
    let a_inside_b = !outside_of(&a.grid, &b.cells)[a.cells[0]];
    let b_inside_a = !outside_of(&b.grid, &a.cells)[b.cells[0]];
    Ok(match (a_inside_b, b_inside_a) {
        (true, false) => Order::Less,
        (false, true) => Order::Greater,
        (false, false) => Order::Incomparable,
        (true, true) => Order::Incomparable,
    })
}

/// Fills `order_relations` for every pair (one flood fill per component).
pub fn order_components(comps: &mut [ComponentRecord]) -> Result<()> {
    for (k, a) in comps.iter().enumerate() {
        for b in &comps[k + 1..] {
            check_comparable(a, b)?;
        }
    }
    let outside: Vec<Vec<bool>> = comps.par_iter().map(|b| outside_of(&b.grid, &b.cells)).collect();
    let n = comps.len();
    for ai in 0..n {
        let mut rel = BTreeMap::new();
        for bi in 0..n {
            let order = if ai == bi {
                Order::Equal
            } else {
                let a_in_b = !outside[bi][comps[ai].cells[0]];
                let b_in_a = !outside[ai][comps[bi].cells[0]];
                match (a_in_b, b_in_a) {
                    (true, false) => Order::Less,
                    (false, true) => Order::Greater,
                    _ => Order::Incomparable,
                }
            };
            rel.insert(comps[bi].id, order);
        }
        comps[ai].order_relations = rel;
    }
    Ok(())
}

/// `(min_id, max_id)`: the component below all others and the one above all
/// others in the surrounding order.
pub fn identify_extremes(comps: &[ComponentRecord]) -> Result<(usize, usize)> {
    if comps.is_empty() {
        return Err(Error::Precondition("no components".into()));
    }
    let below_all = |c: &ComponentRecord, want: Order| {
        comps.iter().all(|o| {
            o.id == c.id || matches!(c.order_relations.get(&o.id), Some(r) if *r == want || *r == Order::Equal)
        })
    };
    let min = comps.iter().find(|c| below_all(c, Order::Less));
    let max = comps.iter().find(|c| below_all(c, Order::Greater));
    match (min, max) {
        (Some(a), Some(b)) => Ok((a.id, b.id)),
        _ => {
            let incomparable = comps
                .iter()
                .flat_map(|c| c.order_relations.iter().filter(|(_, r)| **r == Order::Incomparable).map(move |(o, _)| (c.id, *o)))
                .filter(|(a, b)| a < b)
                .count();
            Err(Error::Classification(format!(
                "surrounding order has no minimum/maximum ({incomparable} incomparable pairs)"
            )))
        }
    }
}

/// Generators whose own Julia set (chaos game, 10^4 points) lies within two
/// cells of the minimal component.
pub fn gamma_min(gs: &GeneratorSet, comps: &[ComponentRecord], min_id: usize, seed: u64) -> Result<Vec<usize>> {
    let min = comps
        .iter()
        .find(|c| c.id == min_id)
        .ok_or_else(|| Error::Precondition(format!("no component {min_id}")))?;
    let grid = min.grid;
    let near = dilate(&grid, &min.cells, 2);
    let mut out = Vec::new();
    for k in 0..gs.len() {
        let cloud = chaos_game_julia(&gs.single(k)?, 10_000, DEFAULT_BURN_IN, seed)?;
        let hits = cloud
            .points
            .iter()
            .filter(|z| grid.locate(**z).map_or(false, |(i, j)| near[grid.index(i, j)]))
            .count();
        let frac = hits as f64 / cloud.points.len() as f64;
        if frac >= 0.9 {
            out.push(k);
        } else if frac > 0.1 {
            return Err(Error::Classification(format!(
                "generator {} ambiguous: {:.1}% of its Julia set near the minimal component",
                gs.labels()[k],
                100.0 * frac
            )));
        }
    }
    Ok(out)
}

/// Cells within Chebyshev distance `r` of `cells`.
pub fn dilate(grid: &GridSpec, cells: &[usize], r: usize) -> Vec<bool> {
    let mut out = vec![false; grid.len()];
    let r = r as isize;
    for &c in cells {
        let (i, j) = grid.coords(c);
        for di in -r..=r {
            for dj in -r..=r {
                let (a, b) = (i as isize + di, j as isize + dj);
                if a >= 0 && b >= 0 && (a as usize) < grid.nx && (b as usize) < grid.ny {
                    out[grid.index(a as usize, b as usize)] = true;
                }
            }
        }
    }
    out
}

/// A region `U` for the two-generator separation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Annulus { center: C64, r_in: f64, r_out: f64 },
    Rects { rects: Vec<Window> },
}

impl Region {
    /// Signed distance-like margin: positive inside, negative outside.
    pub fn margin(&self, z: C64) -> f64 {
        match self {
            Region::Annulus { center, r_in, r_out } => {
                let m = (z - center).norm();
                (m - r_in).min(r_out - m)
            }
            Region::Rects { rects } => rects
                .iter()
                .map(|w| (z.re - w.re_min).min(w.re_max - z.re).min(z.im - w.im_min).min(w.im_max - z.im))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn boundary_samples(&self, n: usize) -> Vec<C64> {
        match self {
            Region::Annulus { center, r_in, r_out } => {
                let half = n / 2;
                let mut v = Vec::with_capacity(n);
                for r in [r_in, r_out] {
                    v.extend((0..half).map(|k| center + C64::from_polar(*r, std::f64::consts::TAU * k as f64 / half as f64)));
                }
                v
            }
            Region::Rects { rects } => {
                let per = (n / rects.len().max(1)).max(4);
                let mut v = Vec::new();
                for w in rects {
                    let side = per / 4;
                    for k in 0..side {
                        let t = k as f64 / side as f64;
                        v.push(C64::new(w.re_min + t * w.width(), w.im_min));
                        v.push(C64::new(w.re_max, w.im_min + t * w.height()));
                        v.push(C64::new(w.re_max - t * w.width(), w.im_max));
                        v.push(C64::new(w.re_min, w.im_max - t * w.height()));
                    }
                }
                v
            }
        }
    }

    fn bbox(&self) -> Window {
        match self {
            Region::Annulus { center, r_out, .. } => Window {
                re_min: center.re - r_out,
                re_max: center.re + r_out,
                im_min: center.im - r_out,
                im_max: center.im + r_out,
            },
            Region::Rects { rects } => rects.iter().fold(
                Window {
                    re_min: f64::INFINITY,
                    re_max: f64::NEG_INFINITY,
                    im_min: f64::INFINITY,
                    im_max: f64::NEG_INFINITY,
                },
                |a, w| Window {
                    re_min: a.re_min.min(w.re_min),
                    re_max: a.re_max.max(w.re_max),
                    im_min: a.im_min.min(w.im_min),
                    im_max: a.im_max.max(w.im_max),
                },
            ),
        }
    }

    fn interior_samples(&self, side: usize) -> Vec<C64> {
        let b = self.bbox();
        (0..side * side)
            .map(|k| {
                let (i, j) = (k % side, k / side);
                C64::new(
                    b.re_min + (i as f64 + 0.5) / side as f64 * b.width(),
                    b.im_min + (j as f64 + 0.5) / side as f64 * b.height(),
                )
            })
            .filter(|z| self.margin(*z) >= 0.0)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorReport {
    /// Smallest margin of any sampled preimage inside `U` (negative: outside).
    pub containment_margin: f64,
    pub containment_holds: bool,
    /// Smallest distance between preimages under the two generators.
    pub separation: f64,
    pub separation_holds: bool,
    pub samples: usize,
}

/// Sampled check that both generators pull `U` back inside itself and that
/// the two pullbacks are disjoint.
pub fn cantor_family_verify(gs: &GeneratorSet, region: &Region) -> Result<CantorReport> {
    if gs.len() != 2 {
        return Err(Error::Precondition("cantor family check needs exactly two generators".into()));
    }
    let mut samples = region.boundary_samples(4096);
    samples.extend(region.interior_samples(64));
    let pre = |h: &Polynomial| -> Result<Vec<C64>> {
        let parts: Vec<Result<Vec<C64>>> = samples.par_iter().map(|&w| h.shifted(w).roots()).collect();
        let mut v = Vec::new();
        for p in parts {
            v.extend(p?);
        }
        Ok(v)
    };
    let p1 = pre(&gs.gens()[0])?;
    let p2 = pre(&gs.gens()[1])?;
    let containment_margin = p1.iter().chain(&p2).map(|z| region.margin(*z)).fold(f64::INFINITY, f64::min);
    let scale = region.bbox().width().max(region.bbox().height()) / 512.0;
    let separation = min_distance(&p1, &p2, scale);
    Ok(CantorReport {
        containment_margin,
        containment_holds: containment_margin >= -1e-9,
        separation,
        separation_holds: separation > 1e-9,
        samples: samples.len(),
    })
}

/// Summary written next to a rendered grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub window: Window,
    pub resolution: (usize, usize),
    pub depth: usize,
    pub escape_radius: f64,
    pub histogram: BTreeMap<CellLabel, usize>,
    pub julia_cells: usize,
    pub component_count: usize,
    pub order_matrix: Vec<Vec<Order>>,
}

impl GridRegion {
    pub fn report(&self, comps: &[ComponentRecord]) -> GridReport {
        let order_matrix = comps
            .iter()
            .map(|a| comps.iter().map(|b| a.order_relations.get(&b.id).copied().unwrap_or(Order::Incomparable)).collect())
            .collect();
        GridReport {
            window: self.grid.window,
            resolution: (self.grid.nx, self.grid.ny),
            depth: self.depth,
            escape_radius: self.escape_radius,
            histogram: self.histogram(),
            julia_cells: self.julia.iter().filter(|b| **b).count(),
            component_count: comps.len(),
            order_matrix,
        }
    }
}
