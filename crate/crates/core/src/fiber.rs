//! Sequences of generators, fiberwise escape grids, boundary curves and the
//! Jordan/quasicircle diagnostics.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::PointIndex;
use crate::grid::GridSpec;
use crate::julia::GridRegion;
use crate::poly::C64;
use crate::semigroup::{validate_weights, GeneratorSet};

pub const NOT_ESCAPED: u32 = u32::MAX;
pub const DEFAULT_MAX_ITER: usize = 512;
/// Spatial neighbour radius (in cells) for turning-constant pairs.
const NEIGHBOR_CELLS: f64 = 8.0;

/// An infinite word over the generator indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `word` followed by `tail` forever.
    Prefix { word: Vec<usize>, tail: usize },
    /// `pre` followed by `period` repeated.
    Periodic {
        #[serde(default)]
        pre: Vec<usize>,
        period: Vec<usize>,
    },
    /// Blocks `special^k, separator` for k = 1, 2, 3, ...
    Growing { special: usize, separator: usize },
    /// i.i.d. letters drawn with `weights`.
    Random { weights: Vec<f64>, seed: u64 },
}

impl SequenceSpec {
    pub fn constant(k: usize) -> Self {
        SequenceSpec::Periodic { pre: vec![], period: vec![k] }
    }

    pub fn validate(&self, generators: usize) -> Result<()> {
        let check = |k: usize| {
            if k < generators {
                Ok(())
            } else {
                Err(Error::Config(format!("letter {k} out of range for {generators} generators")))
            }
        };
        match self {
            SequenceSpec::Prefix { word, tail } => {
                word.iter().try_for_each(|k| check(*k))?;
                check(*tail)
            }
            SequenceSpec::Periodic { pre, period } => {
                if period.is_empty() {
                    return Err(Error::Config("period must be nonempty".into()));
                }
                pre.iter().chain(period).try_for_each(|k| check(*k))
            }
            SequenceSpec::Growing { special, separator } => {
                check(*special)?;
                check(*separator)?;
                if special == separator {
                    return Err(Error::Config("separator must differ from the special letter".into()));
                }
                Ok(())
            }
            SequenceSpec::Random { weights, .. } => {
                if weights.len() != generators {
                    return Err(Error::Config(format!(
                        "{} weights for {generators} generators",
                        weights.len()
                    )));
                }
                validate_weights(weights, generators)
            }
        }
    }

    /// Generator index of the `n`-th letter, `n >= 1`.
    pub fn letter_at(&self, n: usize) -> usize {
        assert!(n >= 1, "letters are indexed from 1");
        match self {
            SequenceSpec::Prefix { word, tail } => word.get(n - 1).copied().unwrap_or(*tail),
            SequenceSpec::Periodic { pre, period } => {
                if n <= pre.len() {
                    pre[n - 1]
                } else {
                    period[(n - 1 - pre.len()) % period.len()]
                }
            }
            SequenceSpec::Growing { special, separator } => {
                // block k has length k + 1 and ends at letter k(k+3)/2
                let end = |k: usize| k * (k + 3) / 2;
                let mut k = ((((8 * n + 9) as f64).sqrt() - 3.0) / 2.0).ceil().max(1.0) as usize;
                while k > 1 && end(k - 1) >= n {
                    k -= 1;
                }
                while end(k) < n {
                    k += 1;
                }
                if n - end(k - 1) <= k {
                    *special
                } else {
                    *separator
                }
            }
            SequenceSpec::Random { weights, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(2 * (n as u128 - 1));
                let mut u = rng.random::<f64>();
                let mut k = 0;
                while k + 1 < weights.len() && (u >= weights[k] || weights[k] == 0.0) {
                    u -= weights[k];
                    k += 1;
                }
                while weights[k] == 0.0 && k > 0 {
                    k -= 1;
                }
                k
            }
        }
    }

    /// Letters `1..=n`.
    pub fn prefix(&self, n: usize) -> Vec<usize> {
        (1..=n).map(|i| self.letter_at(i)).collect()
    }

    /// The shifted sequence `σγ`.
    pub fn shift(&self) -> SequenceSpec {
        match self {
            SequenceSpec::Periodic { pre, period } if pre.is_empty() => {
                let mut p = period.clone();
                p.rotate_left(1);
                SequenceSpec::Periodic { pre: vec![], period: p }
            }
            SequenceSpec::Periodic { pre, period } => {
                SequenceSpec::Periodic { pre: pre[1..].to_vec(), period: period.clone() }
            }
            SequenceSpec::Prefix { word, tail } if !word.is_empty() => {
                SequenceSpec::Prefix { word: word[1..].to_vec(), tail: *tail }
            }
            SequenceSpec::Prefix { .. } => self.clone(),
            SequenceSpec::Growing { .. } | SequenceSpec::Random { .. } => {
                // realize a long prefix; callers iterate at most this deep
                let word: Vec<usize> = (2..=1 << 16).map(|i| self.letter_at(i)).collect();
                SequenceSpec::Prefix { word, tail: self.letter_at((1 << 16) + 1) }
            }
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        match self {
            SequenceSpec::Prefix { word, tail } => write!(f, "prefix:{};{tail}", join(word)),
            SequenceSpec::Periodic { pre, period } if pre.is_empty() => write!(f, "periodic:{}", join(period)),
            SequenceSpec::Periodic { pre, period } => write!(f, "periodic:{};{}", join(pre), join(period)),
            SequenceSpec::Growing { special, separator } => write!(f, "growing:{special},{separator}"),
            SequenceSpec::Random { weights, seed } => {
                let w: Vec<String> = weights.iter().map(|x| x.to_string()).collect();
                write!(f, "random:{}@{seed}", w.join(","))
            }
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// `periodic:V`, `periodic:U;V`, `prefix:W;t`, `growing:j,x` or
    /// `random:w1,w2,...@seed`, letters as comma-separated indices.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("sequence '{s}': {msg}"));
        let (kind, body) = s.split_once(':').ok_or_else(|| bad("expected kind:body"))?;
        let letters = |t: &str| -> Result<Vec<usize>> {
            if t.trim().is_empty() {
                return Ok(vec![]);
            }
            t.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad("bad letter"))).collect()
        };
        match kind {
            "periodic" => {
                let (pre, period) = match body.split_once(';') {
                    Some((u, v)) => (letters(u)?, letters(v)?),
                    None => (vec![], letters(body)?),
                };
                if period.is_empty() {
                    return Err(bad("empty period"));
                }
                Ok(SequenceSpec::Periodic { pre, period })
            }
            "prefix" => {
                let (w, t) = body.split_once(';').ok_or_else(|| bad("expected word;tail"))?;
                let tail = t.trim().parse().map_err(|_| bad("bad tail"))?;
                Ok(SequenceSpec::Prefix { word: letters(w)?, tail })
            }
            "growing" => match letters(body)?.as_slice() {
                [j, x] => Ok(SequenceSpec::Growing { special: *j, separator: *x }),
                _ => Err(bad("expected special,separator")),
            },
            "random" => {
                let (w, seed) = body.split_once('@').ok_or_else(|| bad("expected weights@seed"))?;
                let weights = w
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| bad("bad weight")))
                    .collect::<Result<Vec<_>>>()?;
                let seed = seed.trim().parse().map_err(|_| bad("bad seed"))?;
                Ok(SequenceSpec::Random { weights, seed })
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberOrbit {
    /// `f_{γ,1}(y0), f_{γ,2}(y0), ...` up to and including the first point
    /// beyond the escape radius.
    pub points: Vec<C64>,
    /// Index `n` of the first escaping iterate.
    pub escaped_at: Option<usize>,
}

pub fn fiber_orbit(gs: &GeneratorSet, spec: &SequenceSpec, y0: C64, max_n: usize) -> Result<FiberOrbit> {
    if max_n < 1 {
        return Err(Error::Precondition("max_n must be >= 1".into()));
    }
    spec.validate(gs.len())?;
    let r = gs.escape_radius();
    let mut points = Vec::new();
    let mut z = y0;
    for n in 1..=max_n {
        z = gs.gens()[spec.letter_at(n)].apply(z);
        points.push(z);
        if !(z.norm() <= r) {
            return Ok(FiberOrbit { points, escaped_at: Some(n) });
        }
    }
    Ok(FiberOrbit { points, escaped_at: None })
}

/// Escape iterations of the nonautonomous orbit over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberGrid {
    pub grid: GridSpec,
    pub max_iter: usize,
    pub escape_radius: f64,
    /// First `n` with `|f_{γ,n}(y)| > R`, or [`NOT_ESCAPED`].
    pub escape: Vec<u32>,
}

pub fn fiber_grid(gs: &GeneratorSet, spec: &SequenceSpec, grid: GridSpec, max_iter: usize) -> Result<FiberGrid> {
    if max_iter < 1 {
        return Err(Error::Precondition("max_iter must be >= 1".into()));
    }
    spec.validate(gs.len())?;
    let letters = spec.prefix(max_iter);
    Ok(fiber_grid_word(gs, &letters, grid))
}

/// Escape grid for the finite word `letters` (one iteration per letter).
pub fn fiber_grid_word(gs: &GeneratorSet, letters: &[usize], grid: GridSpec) -> FiberGrid {
    let r2 = gs.escape_radius() * gs.escape_radius();
    let trap = gs.trapping_disk();
    let maps: Vec<_> = letters.iter().map(|k| &gs.gens()[*k]).collect();
    let escape: Vec<u32> = (0..grid.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let maps = &maps;
            (0..grid.nx).map(move |i| {
                let mut z = grid.center(i, j);
                if !(z.norm_sqr() <= r2) {
                    return 0;
                }
                for (n, h) in maps.iter().enumerate() {
                    if trap.is_some_and(|d| d.contains(z)) {
                        return NOT_ESCAPED;
                    }
                    z = h.apply(z);
                    if !(z.norm_sqr() <= r2) {
                        return n as u32 + 1;
                    }
                }
                NOT_ESCAPED
            })
        })
        .collect();
    FiberGrid { grid, max_iter: letters.len(), escape_radius: gs.escape_radius(), escape }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberDiagnostics {
    pub jordan: bool,
    pub turning_constant: Option<f64>,
    pub bounded_components: Option<usize>,
    pub area_estimate: f64,
    pub cell_size: f64,
}

impl FiberGrid {
    pub fn bounded_mask(&self) -> Vec<bool> {
        self.escape.iter().map(|e| *e == NOT_ESCAPED).collect()
    }

    pub fn escaped_mask(&self) -> Vec<bool> {
        self.escape.iter().map(|e| *e != NOT_ESCAPED).collect()
    }

    /// Cells with a 4-neighbour of the opposite fate.
    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.grid.len())
            .map(|idx| {
                let b = self.escape[idx] == NOT_ESCAPED;
                self.grid.neighbors4(idx).any(|n| (self.escape[n] == NOT_ESCAPED) != b)
            })
            .collect()
    }

    pub fn boundary_points(&self) -> Vec<C64> {
        self.boundary_mask()
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(idx, _)| self.grid.center_of(idx))
            .collect()
    }

    pub fn area_estimate(&self) -> f64 {
        area_estimate(self.boundary_mask().iter().filter(|b| **b).count(), self.grid.cell_size())
    }

    pub fn diagnostics(&self, sample_pairs: usize, seed: u64) -> FiberDiagnostics {
        let mut curve = trace_boundary(self);
        let turning = if curve.is_single_loop {
            turning_constant(&mut curve, sample_pairs, seed).ok()
        } else {
            None
        };
        FiberDiagnostics {
            jordan: curve.is_single_loop,
            turning_constant: turning,
            bounded_components: bounded_components_count(self).ok(),
            area_estimate: self.area_estimate(),
            cell_size: self.grid.cell_size(),
        }
    }
}

/// Upper-bound proxy for the area of a set covered by `cells` cells.
pub fn area_estimate(cells: usize, cell_size: f64) -> f64 {
    cells as f64 * cell_size * cell_size
}

fn mask_touches_edge(grid: &GridSpec, mask: &[bool]) -> bool {
    (0..grid.len()).any(|idx| {
        let (i, j) = grid.coords(idx);
        mask[idx] && grid.on_edge(i, j)
    })
}

/// Components of the one-cell erosion of the bounded mask.
pub fn bounded_components_count(fg: &FiberGrid) -> Result<usize> {
    let mask = fg.bounded_mask();
    if !mask.iter().any(|b| *b) {
        return Err(Error::Precondition("no bounded cells".into()));
    }
    if mask_touches_edge(&fg.grid, &mask) {
        return Err(Error::Indeterminate("bounded set touches the window edge; enlarge the window".into()));
    }
    let eroded = crate::julia::erode(&fg.grid, &mask);
    Ok(crate::julia::components_of_mask(&fg.grid, &eroded).len())
}

/// A traced interface between a mask and its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveApprox {
    /// Vertices of the longest contour, in order; closed implicitly.
    pub vertices: Vec<C64>,
    pub contours: usize,
    pub is_single_loop: bool,
    /// Some grid vertex has four alternating labels around it.
    pub self_intersection_found: bool,
    pub turning_constant: Option<f64>,
    pub cell_size: f64,
}

/// Traces the bounded mask after [`despeckle`].
pub fn trace_boundary(fg: &FiberGrid) -> CurveApprox {
    let (mask, _) = despeckle(&fg.grid, &fg.bounded_mask());
    trace_mask(&fg.grid, &mask)
}

/// Flips every cell whose four neighbours all carry the opposite value
/// (structure below the grid scale). Returns the new mask and the number of
/// flipped cells.
pub fn despeckle(grid: &GridSpec, mask: &[bool]) -> (Vec<bool>, usize) {
    let mut out = mask.to_vec();
    let mut flipped = 0;
    for idx in 0..grid.len() {
        let (i, j) = grid.coords(idx);
        if !grid.on_edge(i, j) && grid.neighbors4(idx).all(|n| mask[n] != mask[idx]) {
            out[idx] = !mask[idx];
            flipped += 1;
        }
    }
    (out, flipped)
}

/// Edge of the cell-centre lattice: horizontal from (i, j) to (i+1, j) or
/// vertical from (i, j) to (i, j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Edge(i32, i32, bool);

/// Marching squares on the cell-centre lattice with the mask 4-connected.
pub fn trace_mask(grid: &GridSpec, mask: &[bool]) -> CurveApprox {
    let (nx, ny) = (grid.nx as i32, grid.ny as i32);
    let at = |i: i32, j: i32| i >= 0 && j >= 0 && i < nx && j < ny && mask[grid.index(i as usize, j as usize)];
    let mut links: HashMap<Edge, Vec<Edge>> = HashMap::new();
    let mut saddle = false;
    let mut link = |a: Edge, b: Edge| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for j in -1..ny {
        for i in -1..nx {
            let (c00, c10, c01, c11) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
            let top = Edge(i, j, true);
            let bottom = Edge(i, j + 1, true);
            let left = Edge(i, j, false);
            let right = Edge(i + 1, j, false);
            let mut crossed = Vec::with_capacity(4);
            if c00 != c10 {
                crossed.push(top);
            }
            if c10 != c11 {
                crossed.push(right);
            }
            if c01 != c11 {
                crossed.push(bottom);
            }
            if c00 != c01 {
                crossed.push(left);
            }
            match crossed.len() {
                2 => link(crossed[0], crossed[1]),
                4 => {
                    saddle = true;
                    if c00 {
                        link(top, left);
                        link(right, bottom);
                    } else {
                        link(top, right);
                        link(left, bottom);
                    }
                }
                _ => {}
            }
        }
    }
    let point = |e: Edge| {
        let (x, y) = if e.2 { (e.0 as f64 + 0.5, e.1 as f64) } else { (e.0 as f64, e.1 as f64 + 0.5) };
        let w = &grid.window;
        C64::new(w.re_min + (x + 0.5) * grid.dx(), w.im_max - (y + 0.5) * grid.dy())
    };
    let mut keys: Vec<Edge> = links.keys().copied().collect();
    keys.sort_unstable_by_key(|e| (e.1, e.0, e.2));
    let mut seen: HashSet<Edge> = HashSet::new();
    let mut loops: Vec<Vec<C64>> = Vec::new();
    for start in keys {
        if seen.contains(&start) {
            continue;
        }
        let mut verts = Vec::new();
        let (mut prev, mut cur) = (start, start);
        loop {
            seen.insert(cur);
            verts.push(point(cur));
            let next = links[&cur].iter().copied().find(|n| *n != prev && !seen.contains(n));
            match next {
                Some(n) => {
                    prev = cur;
                    cur = n;
                }
                None => break,
            }
        }
        loops.push(verts);
    }
    let contours = loops.len();
    let vertices = loops.into_iter().max_by_key(|l| l.len()).unwrap_or_default();
    CurveApprox {
        vertices,
        contours,
        is_single_loop: contours == 1 && !saddle,
        self_intersection_found: saddle,
        turning_constant: None,
        cell_size: grid.cell_size(),
    }
}

/// Sparse tables of projection extremes in 8 directions over a cyclic
/// vertex list.
struct ArcExtents {
    n: usize,
    dirs: Vec<C64>,
    /// `[dir][level][i]` = (min, max) over `i .. i + 2^level` (doubled list).
    tables: Vec<Vec<Vec<(f32, f32)>>>,
}

impl ArcExtents {
    fn new(v: &[C64]) -> Self {
        let n = v.len();
        let dirs: Vec<C64> = (0..8).map(|k| C64::from_polar(1.0, std::f64::consts::PI * k as f64 / 8.0)).collect();
        let tables = dirs
            .iter()
            .map(|u| {
                let base: Vec<(f32, f32)> = (0..2 * n)
                    .map(|i| {
                        let p = v[i % n];
                        let x = (p.re * u.re + p.im * u.im) as f32;
                        (x, x)
                    })
                    .collect();
                let mut levels = vec![base];
                let mut len = 1;
                while 2 * len <= 2 * n {
                    let prev = levels.last().unwrap();
                    let next: Vec<(f32, f32)> = (0..=2 * n - 2 * len)
                        .map(|i| {
                            let (a, b) = (prev[i], prev[i + len]);
                            (a.0.min(b.0), a.1.max(b.1))
                        })
                        .collect();
                    levels.push(next);
                    len *= 2;
                }
                levels
            })
            .collect();
        ArcExtents { n, dirs, tables }
    }

    /// Approximate diameter of the cyclic arc from `i` through `j` (`i <= j < i + n`).
    fn diameter(&self, i: usize, j: usize) -> f64 {
        let len = j - i + 1;
        let level = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let span = 1 << level;
        let mut best = 0f64;
        for t in &self.tables {
            let (a, b) = (t[level][i], t[level][j + 1 - span]);
            best = best.max((a.1.max(b.1) - a.0.min(b.0)) as f64);
        }
        debug_assert_eq!(self.dirs.len(), 8);
        debug_assert!(j < i + self.n);
        best
    }
}

/// Bounded-turning constant: the largest observed
/// `min(diam arc_1, diam arc_2) / |p_i - p_j|` over seeded random vertex
/// pairs and all pairs within a few cells of each other.
pub fn turning_constant(curve: &mut CurveApprox, sample_pairs: usize, seed: u64) -> Result<f64> {
    let k = turning_constant_of(&curve.vertices, curve.cell_size, sample_pairs, seed, curve.is_single_loop)?;
    curve.turning_constant = Some(k);
    Ok(k)
}

pub fn turning_constant_of(v: &[C64], cell_size: f64, sample_pairs: usize, seed: u64, single_loop: bool) -> Result<f64> {
    if !single_loop {
        return Err(Error::Precondition("turning constant needs a single loop".into()));
    }
    let n = v.len();
    if n < 16 {
        return Err(Error::Precondition("turning constant needs at least 16 vertices".into()));
    }
    let ext = ArcExtents::new(v);
    let ratio = |a: usize, b: usize| -> Option<f64> {
        let (i, j) = (a.min(b), a.max(b));
        let gap = (j - i).min(n - (j - i));
        let chord = (v[i] - v[j]).norm();
        if gap < 3 || chord < cell_size {
            return None;
        }
        let d1 = ext.diameter(i, j);
        let d2 = ext.diameter(j, i + n);
        Some(d1.min(d2) / chord)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 1f64;
    for _ in 0..sample_pairs {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if let Some(r) = ratio(a, b) {
            best = best.max(r);
        }
    }
    let index = PointIndex::new(v, NEIGHBOR_CELLS * cell_size);
    let near = (0..n)
        .into_par_iter()
        .map(|i| {
            index
                .within(v[i], NEIGHBOR_CELLS * cell_size)
                .into_iter()
                .filter(|j| (*j as usize) > i)
                .filter_map(|j| ratio(i, j as usize))
                .fold(1f64, f64::max)
        })
        .reduce(|| 1f64, f64::max);
    Ok(best.max(near))
}

/// True if every window of `p` consecutive letters meets `s`. Exact for
/// periodic and constant-tail specs; otherwise checked up to `horizon`.
pub fn wsp_check(spec: &SequenceSpec, s: &[usize], p: usize, horizon: usize) -> Result<bool> {
    if p < 1 {
        return Err(Error::Precondition("p must be >= 1".into()));
    }
    let horizon = match spec {
        SequenceSpec::Periodic { pre, period } => pre.len() + period.len() + p - 1,
        SequenceSpec::Prefix { word, .. } => word.len() + p,
        _ => horizon,
    };
    if horizon < p {
        return Ok(true);
    }
    let letters = spec.prefix(horizon);
    Ok(letters.windows(p).all(|w| w.iter().any(|k| s.contains(k))))
}

/// Membership verdict; `almost_sure` marks a statement that holds with
/// probability one rather than for the realized sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub almost_sure: bool,
}

/// Does the sequence meet `s` infinitely often.
pub fn rgs_check(spec: &SequenceSpec, s: &[usize]) -> Verdict {
    let holds = match spec {
        SequenceSpec::Prefix { tail, .. } => s.contains(tail),
        SequenceSpec::Periodic { period, .. } => period.iter().any(|k| s.contains(k)),
        SequenceSpec::Growing { special, separator } => s.contains(special) || s.contains(separator),
        SequenceSpec::Random { weights, .. } => {
            let holds = s.iter().any(|k| weights.get(*k).is_some_and(|w| *w > 0.0));
            return Verdict { holds, almost_sure: true };
        }
    };
    Verdict { holds, almost_sure: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TghypCase {
    /// Runs of the special letter are bounded.
    CaseA,
    /// Infinitely many other letters and unbounded runs.
    CaseB,
    /// Eventually constant at the special letter.
    CaseC,
}

pub fn tghyp_classify(gs: &GeneratorSet, spec: &SequenceSpec, j: usize) -> Result<TghypCase> {
    if gs.len() != 2 {
        return Err(Error::Precondition("classification needs exactly two generators".into()));
    }
    if j >= gs.len() {
        return Err(Error::Precondition(format!("no generator {j}")));
    }
    spec.validate(gs.len())?;
    Ok(match spec {
        SequenceSpec::Prefix { tail, .. } if *tail == j => TghypCase::CaseC,
        SequenceSpec::Prefix { .. } => TghypCase::CaseA,
        SequenceSpec::Periodic { period, .. } if period.iter().all(|k| *k == j) => TghypCase::CaseC,
        SequenceSpec::Periodic { .. } => TghypCase::CaseA,
        SequenceSpec::Growing { special, .. } if *special == j => TghypCase::CaseB,
        SequenceSpec::Growing { .. } => TghypCase::CaseA,
        SequenceSpec::Random { .. } => {
            return Err(Error::UnsupportedKind(
                "random sequences are classified only almost surely (case A for positive weights)".into(),
            ))
        }
    })
}

/// Least `n <= max_n` with `f_{γ,n}(y0)` in the eroded all-bounded mask of
/// `region`.
pub fn orbit_enters_khat(
    gs: &GeneratorSet,
    spec: &SequenceSpec,
    y0: C64,
    region: &GridRegion,
    max_n: usize,
) -> Result<Option<usize>> {
    spec.validate(gs.len())?;
    let inner = region.eroded_bounded();
    let inside = |z: C64| region.grid.locate(z).is_some_and(|(i, j)| inner[region.grid.index(i, j)]);
    let r = gs.escape_radius();
    let mut z = y0;
    for n in 0..=max_n {
        if !(z.norm() <= r) {
            return Err(Error::Contradiction(format!("orbit of {y0} escapes at step {n}")));
        }
        if inside(z) {
            return Ok(Some(n));
        }
        if n < max_n {
            z = gs.gens()[spec.letter_at(n + 1)].apply(z);
        }
    }
    Ok(None)
}

/// Barycentre of the largest component of the eroded bounded mask.
pub fn bounded_barycenter(fg: &FiberGrid) -> Option<C64> {
    let eroded = crate::julia::erode(&fg.grid, &fg.bounded_mask());
    let comps = crate::julia::components_of_mask(&fg.grid, &eroded);
    let big = comps.into_iter().max_by_key(|c| c.cells.len())?;
    let pts = big.points();
    let mean = pts.iter().sum::<C64>() / pts.len() as f64;
    // the barycentre of a non-convex component may fall outside it
    let inside = fg.grid.locate(mean).is_some_and(|(i, j)| eroded[fg.grid.index(i, j)]);
    if inside {
        Some(mean)
    } else {
        pts.into_iter().min_by(|a, b| (a - mean).norm().total_cmp(&(b - mean).norm()))
    }
}

/// Breadth-first distance (in cells) from each cell to the nearest set cell.
pub fn distance_to_mask(grid: &GridSpec, mask: &[bool]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; grid.len()];
    let mut queue = VecDeque::new();
    for (idx, m) in mask.iter().enumerate() {
        if *m {
            dist[idx] = 0;
            queue.push_back(idx);
        }
    }
    while let Some(c) = queue.pop_front() {
        for n in grid.neighbors4(c) {
            if dist[n] == u32::MAX {
                dist[n] = dist[c] + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::hausdorff;
    use crate::grid::Window;
    use crate::julia::{word_tree_classify, DEFAULT_BUDGET};
    use crate::semigroup::{example_jbnq, quadratic};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn periodic(pre: &[usize], period: &[usize]) -> SequenceSpec {
        SequenceSpec::Periodic { pre: pre.to_vec(), period: period.to_vec() }
    }

    fn disk_mask(grid: &GridSpec, center: C64, r: f64) -> Vec<bool> {
        (0..grid.len()).map(|idx| (grid.center_of(idx) - center).norm() <= r).collect()
    }

    #[test]
    fn letter_examples() {
        assert_eq!(periodic(&[], &[0, 1]).letter_at(3), 0);
        let alpha = periodic(&[], &[0, 1, 2]);
        for k in 0..5 {
            for l in 1..=3 {
                assert_eq!(alpha.letter_at(3 * k + l), l - 1);
            }
        }
        let beta = periodic(&[2], &[0, 1, 2]);
        assert_eq!(beta.letter_at(1), 2);
        for n in 2..20 {
            assert_eq!(beta.letter_at(n), alpha.letter_at(n - 1));
        }
        let p = SequenceSpec::Prefix { word: vec![1, 1, 0], tail: 1 };
        assert_eq!(p.prefix(6), vec![1, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn growing_blocks_layout() {
        let g = SequenceSpec::Growing { special: 0, separator: 1 };
        let mut oracle = Vec::new();
        for k in 1..=30 {
            oracle.extend(std::iter::repeat(0).take(k));
            oracle.push(1);
        }
        assert_eq!(g.prefix(oracle.len()), oracle);
    }

    #[test]
    fn random_letters() {
        let r = SequenceSpec::Random { weights: vec![0.5, 0.5], seed: 9 };
        let a = r.prefix(10_000);
        assert_eq!(a, r.prefix(10_000));
        let ones = a.iter().filter(|k| **k == 1).count() as f64 / 1e4;
        assert!((0.47..=0.53).contains(&ones), "{ones}");
        let d = SequenceSpec::Random { weights: vec![1.0, 0.0], seed: 9 };
        assert!(d.prefix(5000).iter().all(|k| *k == 0));
        let d = SequenceSpec::Random { weights: vec![0.0, 1.0], seed: 9 };
        assert!(d.prefix(5000).iter().all(|k| *k == 1));
        assert_eq!(r.letter_at(77), r.prefix(77)[76]);
    }

    #[test]
    fn spec_text_round_trip() {
        for s in ["periodic:1", "periodic:0,0;1,0", "prefix:0,1;1", "growing:0,1", "random:0.5,0.5@3"] {
            let spec: SequenceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["periodic:", "growing:0", "prefix:0,1", "random:0.5", "loop:1", "periodic:a"] {
            assert!(s.parse::<SequenceSpec>().is_err(), "{s}");
        }
        let json = serde_json::to_string(&periodic(&[], &[1])).unwrap();
        assert_eq!(json, r#"{"kind":"periodic","pre":[],"period":[1]}"#);
        let back: SequenceSpec = serde_json::from_str(r#"{"kind":"periodic","period":[0,1]}"#).unwrap();
        assert_eq!(back, periodic(&[], &[0, 1]));
    }

    #[test]
    fn validation() {
        assert!(periodic(&[], &[]).validate(2).is_err());
        assert!(periodic(&[], &[2]).validate(2).is_err());
        assert!(SequenceSpec::Growing { special: 0, separator: 0 }.validate(2).is_err());
        assert!(SequenceSpec::Random { weights: vec![0.7, 0.7], seed: 0 }.validate(2).is_err());
        assert!(SequenceSpec::Random { weights: vec![1.0], seed: 0 }.validate(2).is_err());
    }

    #[test]
    fn orbit_examples() {
        let gs = GeneratorSet::new(vec![quadratic(c(0.0, 0.0))]).unwrap();
        let o = fiber_orbit(&gs, &SequenceSpec::constant(0), c(0.5, 0.0), 4).unwrap();
        assert_eq!(o.points, vec![c(0.25, 0.0), c(0.0625, 0.0), c(0.00390625, 0.0), c(0.0000152587890625, 0.0)]);
        let ex = example_jbnq();
        let o = fiber_orbit(&ex, &SequenceSpec::constant(1), c(5.0, 0.0), 100).unwrap();
        assert!((o.points[0].re - 625.0 / 64.0).abs() < 1e-12);
        assert_eq!(o.escaped_at, Some(1));
        let o = fiber_orbit(&ex, &SequenceSpec::Random { weights: vec![0.5, 0.5], seed: 1 }, c(0.39, 0.0), 1000).unwrap();
        assert_eq!(o.escaped_at, None);
        assert!(fiber_orbit(&ex, &SequenceSpec::constant(0), c(0.0, 0.0), 0).is_err());
    }

    #[test]
    fn unit_disk_fiber() {
        let gs = GeneratorSet::new(vec![quadratic(c(0.0, 0.0))]).unwrap();
        let grid = GridSpec::square(Window::square(1.5), 128).unwrap();
        let fg = fiber_grid(&gs, &SequenceSpec::constant(0), grid, 64).unwrap();
        let h = grid.cell_size();
        for idx in 0..grid.len() {
            let m = grid.center_of(idx).norm();
            if m < 1.0 - h {
                assert_eq!(fg.escape[idx], NOT_ESCAPED);
            }
            if m > 1.0 + h {
                assert_ne!(fg.escape[idx], NOT_ESCAPED);
            }
        }
        assert_eq!(bounded_components_count(&fg).unwrap(), 1);
        let mut curve = trace_boundary(&fg);
        assert!(curve.is_single_loop);
        let expected = 2.0 * std::f64::consts::PI / h;
        let n = curve.vertices.len() as f64;
        assert!(n > 0.8 * expected && n < 1.6 * expected, "{n} vs {expected}");
        let k = turning_constant(&mut curve, 4000, 1).unwrap();
        assert!((1.0..1.5).contains(&k), "{k}");
    }

    #[test]
    fn example_constant_fibers() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(4.5), 256).unwrap();
        let h = grid.cell_size();
        let outer = fiber_grid(&gs, &SequenceSpec::constant(1), grid, 256).unwrap();
        for idx in 0..grid.len() {
            let m = grid.center_of(idx).norm();
            if m < 4.0 - h {
                assert_eq!(outer.escape[idx], NOT_ESCAPED);
            }
            if m > 4.0 + h {
                assert_ne!(outer.escape[idx], NOT_ESCAPED);
            }
        }
        let curve = trace_boundary(&outer);
        assert!(curve.is_single_loop);

        let inner = fiber_grid(&gs, &SequenceSpec::constant(0), grid, 256).unwrap();
        let curve = trace_boundary(&inner);
        assert!(!curve.is_single_loop);
        assert!(bounded_components_count(&inner).unwrap() > 1);
    }

    #[test]
    fn constant_sequence_matches_single_map() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(4.5), 64).unwrap();
        for k in 0..2 {
            let fg = fiber_grid(&gs, &SequenceSpec::constant(k), grid, 100).unwrap();
            let h = &gs.gens()[k];
            let r = gs.escape_radius();
            for idx in 0..grid.len() {
                let mut z = grid.center_of(idx);
                let mut e = if z.norm() > r { 0 } else { NOT_ESCAPED };
                if e != 0 {
                    for n in 1..=100u32 {
                        z = h.apply(z);
                        if z.norm() > r {
                            e = n;
                            break;
                        }
                    }
                }
                assert_eq!(fg.escape[idx], e);
            }
        }
    }

    #[test]
    fn pullback_relation() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(4.5), 256).unwrap();
        let h = grid.cell_size();
        let spec = periodic(&[], &[0, 1]);
        let jg = fiber_grid(&gs, &spec, grid, 200).unwrap().boundary_points();
        let js = fiber_grid(&gs, &spec.shift(), grid, 200).unwrap().boundary_points();
        let mut pre = Vec::new();
        for w in &js {
            pre.extend(gs.gens()[spec.letter_at(1)].shifted(*w).roots().unwrap());
        }
        let d = hausdorff(&jg, &pre, h, 100);
        assert!(d <= 2.0 * h, "{} cells", d / h);
    }

    #[test]
    fn continuity_in_agreement_length() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(4.5), 256).unwrap();
        let h = grid.cell_size();
        let target = periodic(&[], &[0, 1]);
        let base = fiber_grid(&gs, &target, grid, 200).unwrap().boundary_points();
        let mut last = f64::INFINITY;
        for n in [1usize, 2, 4, 8] {
            let mut pre = target.prefix(n);
            pre.push(0);
            let other = periodic(&pre, &[0]);
            let pts = fiber_grid(&gs, &other, grid, 200).unwrap().boundary_points();
            let d = hausdorff(&base, &pts, h, 1000);
            assert!(d <= last + 1e-12, "n={n}: {d} > {last}");
            last = d;
        }
        assert!(last <= 2.0 * h);
    }

    #[test]
    fn square_mask_is_not_a_small_set() {
        let grid = GridSpec::square(Window::square(1.0), 100).unwrap();
        let mask: Vec<bool> = (0..grid.len())
            .map(|idx| {
                let z = grid.center_of(idx);
                z.re.abs() < 0.5 && z.im.abs() < 0.5
            })
            .collect();
        let curve = trace_mask(&grid, &mask);
        assert!(curve.is_single_loop);
        assert_eq!(curve.vertices.len(), 4 * 50);
        let h = grid.cell_size();
        let cells = (0..grid.len())
            .filter(|&idx| mask[idx] && grid.neighbors4(idx).any(|n| !mask[n]))
            .count();
        assert!((area_estimate(cells, h) - 4.0 * 1.0 * h).abs() < 4.0 * h * h + 1e-12);
    }

    #[test]
    fn pinched_and_split_masks() {
        let grid = GridSpec::square(Window::square(2.0), 80).unwrap();
        let mut two = disk_mask(&grid, c(-1.0, 0.0), 0.6);
        for (a, b) in two.iter_mut().zip(disk_mask(&grid, c(1.0, 0.0), 0.6)) {
            *a |= b;
        }
        let curve = trace_mask(&grid, &two);
        assert_eq!(curve.contours, 2);
        assert!(!curve.is_single_loop);

        // two squares touching at a corner
        let grid = GridSpec::square(Window::square(1.0), 20).unwrap();
        let mut mask = vec![false; grid.len()];
        for j in 4..10 {
            for i in 4..10 {
                mask[grid.index(i, j)] = true;
                mask[grid.index(i + 6, j + 6)] = true;
            }
        }
        let curve = trace_mask(&grid, &mask);
        assert!(curve.self_intersection_found);
        assert!(!curve.is_single_loop);

        // annulus: two contours
        let grid = GridSpec::square(Window::square(2.0), 80).unwrap();
        let ring: Vec<bool> = (0..grid.len())
            .map(|idx| (0.5..1.5).contains(&grid.center_of(idx).norm()))
            .collect();
        assert_eq!(trace_mask(&grid, &ring).contours, 2);
    }

    #[test]
    fn turning_constant_on_analytic_curves() {
        let n = 4000;
        let circle: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)).collect();
        let k = turning_constant_of(&circle, 1e-3, 20_000, 3, true).unwrap();
        assert!((1.0..=1.1).contains(&k), "{k}");

        let ellipse: Vec<C64> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                c(2.0 * t.cos(), t.sin())
            })
            .collect();
        // brute-force oracle on a subsample with exact arc diameters
        let sub: Vec<usize> = (0..n).step_by(40).collect();
        let mut brute = 1f64;
        for &i in &sub {
            for &j in &sub {
                if j <= i {
                    continue;
                }
                let chord = (ellipse[i] - ellipse[j]).norm();
                let diam = |idx: Vec<usize>| {
                    let mut d = 0f64;
                    for a in idx.iter().step_by(10) {
                        for b in idx.iter().step_by(10) {
                            d = d.max((ellipse[*a] - ellipse[*b]).norm());
                        }
                    }
                    d
                };
                let a1 = diam((i..=j).collect());
                let a2 = diam((j..i + n + 1).map(|x| x % n).collect());
                brute = brute.max(a1.min(a2) / chord);
            }
        }
        let k = turning_constant_of(&ellipse, 1e-3, 50_000, 3, true).unwrap();
        assert!((1.0..=2.5).contains(&k), "{k}");
        assert!((k - brute).abs() / brute < 0.1, "{k} vs {brute}");
        let coarse: Vec<C64> = ellipse.iter().step_by(2).copied().collect();
        let k2 = turning_constant_of(&coarse, 1e-3, 50_000, 3, true).unwrap();
        assert!((k - k2).abs() / k < 0.05);

        assert!(turning_constant_of(&circle[..10], 1e-3, 10, 0, true).is_err());
        assert!(turning_constant_of(&circle, 1e-3, 10, 0, false).is_err());
    }

    #[test]
    fn wsp_examples() {
        assert!(wsp_check(&periodic(&[], &[1, 0]), &[1], 2, 0).unwrap());
        for p in 1..6 {
            assert!(!wsp_check(&SequenceSpec::constant(0), &[1], p, 100).unwrap());
        }
        let alpha = periodic(&[], &[0, 0, 1, 0]);
        assert!(wsp_check(&alpha, &[1], 4, 0).unwrap());
        assert!(!wsp_check(&alpha, &[1], 3, 0).unwrap());
        assert!(!wsp_check(&periodic(&[0, 0, 0], &[1]), &[1], 3, 0).unwrap());
        assert!(wsp_check(&periodic(&[0, 0, 0], &[1]), &[1], 4, 0).unwrap());
        assert!(wsp_check(&SequenceSpec::constant(0), &[1], 0, 0).is_err());
    }

    #[test]
    fn rgs_examples() {
        assert!(rgs_check(&periodic(&[0], &[0, 1]), &[1]).holds);
        assert!(!rgs_check(&periodic(&[1], &[0]), &[1]).holds);
        assert!(rgs_check(&SequenceSpec::Growing { special: 0, separator: 1 }, &[1]).holds);
        let v = rgs_check(&SequenceSpec::Random { weights: vec![0.5, 0.5], seed: 0 }, &[1]);
        assert!(v.holds && v.almost_sure);
        assert!(!rgs_check(&SequenceSpec::Random { weights: vec![1.0, 0.0], seed: 0 }, &[1]).holds);
    }

    #[test]
    fn tghyp_examples() {
        let gs = example_jbnq();
        assert_eq!(tghyp_classify(&gs, &SequenceSpec::constant(0), 0).unwrap(), TghypCase::CaseC);
        assert_eq!(tghyp_classify(&gs, &periodic(&[], &[0, 1]), 0).unwrap(), TghypCase::CaseA);
        assert_eq!(
            tghyp_classify(&gs, &SequenceSpec::Growing { special: 0, separator: 1 }, 0).unwrap(),
            TghypCase::CaseB
        );
        assert_eq!(
            tghyp_classify(&gs, &SequenceSpec::Prefix { word: vec![1, 1], tail: 0 }, 0).unwrap(),
            TghypCase::CaseC
        );
        let r = tghyp_classify(&gs, &SequenceSpec::Random { weights: vec![0.5, 0.5], seed: 0 }, 0);
        assert!(matches!(r, Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn khat_entry() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(4.5), 200).unwrap();
        let region = word_tree_classify(&gs, grid, 16, DEFAULT_BUDGET).unwrap();
        let spec = periodic(&[], &[0, 1]);
        assert_eq!(orbit_enters_khat(&gs, &spec, c(0.1, 0.0), &region, 10).unwrap(), Some(0));
        let r = orbit_enters_khat(&gs, &spec, c(4.9, 0.0), &region, 10);
        assert!(matches!(r, Err(Error::Contradiction(_))));

        let z2 = GeneratorSet::new(vec![quadratic(c(0.0, 0.0))]).unwrap();
        let grid = GridSpec::square(Window::square(1.5), 150).unwrap();
        let region = word_tree_classify(&z2, grid, 16, DEFAULT_BUDGET).unwrap();
        let n = orbit_enters_khat(&z2, &SequenceSpec::constant(0), c(0.9, 0.0), &region, 20).unwrap();
        assert!(matches!(n, Some(k) if k <= 4), "{n:?}");
    }

    #[test]
    fn edge_touching_count_is_indeterminate() {
        let gs = example_jbnq();
        let grid = GridSpec::square(Window::square(3.0), 32).unwrap();
        let fg = fiber_grid(&gs, &SequenceSpec::constant(1), grid, 50).unwrap();
        assert!(matches!(bounded_components_count(&fg), Err(Error::Indeterminate(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn escape_monotone_in_max_iter(seed in 0u64..1000, a in 2usize..40, b in 2usize..40) {
            let gs = example_jbnq();
            let grid = GridSpec::square(Window::square(4.5), 48).unwrap();
            let spec = SequenceSpec::Random { weights: vec![0.5, 0.5], seed };
            let (lo, hi) = (a.min(b), a.max(b));
            let f1 = fiber_grid(&gs, &spec, grid, lo).unwrap();
            let f2 = fiber_grid(&gs, &spec, grid, hi).unwrap();
            for (e1, e2) in f1.escape.iter().zip(&f2.escape) {
                if *e1 != NOT_ESCAPED {
                    prop_assert_eq!(e1, e2);
                }
            }
        }

        #[test]
        fn periodic_window_check_is_exact(pre in proptest::collection::vec(0usize..2, 0..5),
                                          period in proptest::collection::vec(0usize..2, 1..5),
                                          p in 1usize..6) {
            let spec = SequenceSpec::Periodic { pre, period };
            let letters = spec.prefix(200);
            let brute = letters.windows(p).all(|w| w.contains(&1));
            prop_assert_eq!(wsp_check(&spec, &[1], p, 0).unwrap(), brute);
        }
    }
}
