//! Finite generator sets, the postcritical orbit tree and boundedness
//! certificates.
//!
//! Postcritical boundedness is only semi-decidable from finite data, so
//! [`postcritical_orbit`] is three-valued: a bounded certificate (a trapping
//! region or closed orbit), an unbounded certificate (a word pushing a
//! critical value past the escape radius), or `Undecided`.

use std::collections::HashSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{escape_radius, Polynomial, C64};

pub const CONFIG_SCHEMA: &str = "sjg-config/1";

/// Boundary samples for trapping checks.
const BOUNDARY_SAMPLES: usize = 1024;
/// Interior grid side for trapping checks.
const INTERIOR_GRID: usize = 32;
/// Required margin for a strict trapping disk.
pub const TRAP_MARGIN: f64 = 1e-9;
/// Hash-grid cell used to deduplicate orbit points.
pub const DEDUP_CELL: f64 = 1e-6;
/// Closed-containment slack for real interval certificates.
const INTERVAL_TOL: f64 = 1e-12;
const DEFAULT_CAPTURE_DEPTH: usize = 64;
const DEFAULT_CAPTURE_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: C64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: C64, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Open-disk membership.
    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    fn samples(&self) -> impl Iterator<Item = C64> + '_ {
        let boundary = (0..BOUNDARY_SAMPLES).map(move |k| {
            self.center + C64::from_polar(self.radius, std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64)
        });
        let n = INTERIOR_GRID;
        let interior = (0..n * n).filter_map(move |k| {
            let (i, j) = (k % n, k / n);
            let off = C64::new(
                (2.0 * (i as f64 + 0.5) / n as f64 - 1.0) * self.radius,
                (2.0 * (j as f64 + 0.5) / n as f64 - 1.0) * self.radius,
            );
            (off.norm() <= self.radius).then(|| self.center + off)
        });
        boundary.chain(interior)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    gens: Vec<Polynomial>,
    escape_radius: f64,
    labels: Vec<String>,
    weights: Option<Vec<f64>>,
    trap: OnceLock<Option<(Disk, f64)>>,
}

/// On-disk form of a generator set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeneratorConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub generators: Vec<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

impl GeneratorSet {
    pub fn new(gens: Vec<Polynomial>) -> Result<Self> {
        let labels = (1..=gens.len()).map(|k| format!("h{k}")).collect();
        Self::with_labels(gens, labels)
    }

    pub fn with_labels(gens: Vec<Polynomial>, labels: Vec<String>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Config("generator set must be nonempty".into()));
        }
        if let Some((k, g)) = gens.iter().enumerate().find(|(_, g)| g.degree() < 2) {
            return Err(Error::Config(format!("generator {k} has degree {} < 2", g.degree())));
        }
        if labels.len() != gens.len() {
            return Err(Error::Config("labels length differs from generator count".into()));
        }
        let escape_radius = escape_radius(&gens)?;
        Ok(Self { gens, escape_radius, labels, weights: None, trap: OnceLock::new() })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights, self.gens.len())?;
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn from_config(cfg: &GeneratorConfig) -> Result<Self> {
        if cfg.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!("schema: expected {CONFIG_SCHEMA:?}, got {:?}", cfg.schema)));
        }
        let labels = cfg
            .labels
            .clone()
            .unwrap_or_else(|| (1..=cfg.generators.len()).map(|k| format!("h{k}")).collect());
        let gs = Self::with_labels(cfg.generators.clone(), labels)?;
        match &cfg.weights {
            Some(w) => gs.with_weights(w.clone()),
            None => Ok(gs),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: GeneratorConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("generator config: {e}")))?;
        Self::from_config(&cfg)
    }

    pub fn to_config(&self) -> GeneratorConfig {
        GeneratorConfig {
            schema: CONFIG_SCHEMA.into(),
            generators: self.gens.clone(),
            labels: Some(self.labels.clone()),
            weights: self.weights.clone(),
        }
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Single-generator subsystem `{h_k}`.
    pub fn single(&self, k: usize) -> Result<GeneratorSet> {
        GeneratorSet::with_labels(vec![self.gens[k].clone()], vec![self.labels[k].clone()])
    }

    /// All finite critical values of all generators.
    pub fn critical_values(&self) -> Result<Vec<C64>> {
        let mut out = Vec::new();
        for g in &self.gens {
            out.extend(g.critical_data()?.critical_values_finite);
        }
        Ok(out)
    }

    /// First disk of the default candidate ladder that every generator maps
    /// strictly into itself, with its margin. Cached.
    pub fn trapping_disk(&self) -> Option<Disk> {
        self.trap
            .get_or_init(|| {
                default_disk_candidates(self).into_iter().find_map(|d| {
                    let m = trap_margin(&self.gens, &d);
                    (m >= TRAP_MARGIN).then_some((d, m))
                })
            })
            .map(|(d, _)| d)
    }
}

pub fn validate_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::Config(format!("weights: expected {n} entries, got {}", weights.len())));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Config("weights must be finite and nonnegative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("weights must sum to 1 (got {sum})")));
    }
    Ok(())
}

/// `radius - max |h(z) - center|` over boundary and interior samples of the
/// closed disk and over all generators. Positive means `h(D̄) ⊂ D`.
pub fn trap_margin(gens: &[Polynomial], disk: &Disk) -> f64 {
    let worst = disk
        .samples()
        .flat_map(|z| gens.iter().map(move |h| (h.apply(z) - disk.center).norm()))
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    disk.radius - worst
}

/// Candidate disks: centred at the barycentre of the critical values, at the
/// origin and at each critical value, radii `0.05 * 2^k` (largest first) up
/// to the escape radius.
pub fn default_disk_candidates(gs: &GeneratorSet) -> Vec<Disk> {
    let cvs = gs.critical_values().unwrap_or_default();
    let mut centers = Vec::new();
    if !cvs.is_empty() {
        centers.push(cvs.iter().sum::<C64>() / cvs.len() as f64);
    }
    centers.push(C64::new(0.0, 0.0));
    centers.extend(cvs.iter().copied());
    let mut uniq: Vec<C64> = Vec::new();
    for c in centers {
        if !uniq.iter().any(|u| (u - c).norm() < 1e-12) {
            uniq.push(c);
        }
    }
    let mut radii = Vec::new();
    let mut r = 0.05;
    while r <= gs.escape_radius() {
        radii.push(r);
        r *= 2.0;
    }
    radii.reverse();
    uniq.into_iter().flat_map(|c| radii.iter().map(move |&r| Disk::new(c, r))).collect()
}

/// First candidate that traps every generator with margin at least 1e-9 and
/// absorbs the postcritical set: every word applied to every finite critical
/// value either lands in the disk or revisits an already explored point.
pub fn find_invariant_disk(gs: &GeneratorSet, candidates: &[Disk]) -> Option<Disk> {
    let cvs = gs.critical_values().ok()?;
    candidates.iter().copied().find(|d| {
        trap_margin(gs.gens(), d) >= TRAP_MARGIN
            && matches!(
                explore(gs, &cvs, Some(*d), DEFAULT_CAPTURE_DEPTH, DEFAULT_CAPTURE_CAP),
                Exploration::Closed { .. }
            )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PostcriticalStatus {
    BoundedCertified,
    UnboundedCertified,
    Undecided,
}

/// Evidence behind a certified status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Every generator maps the closed disk strictly inside it (margin is the
    /// sampled slack) and every critical orbit either enters the disk or
    /// closes up on itself.
    TrappingDisk { disk: Disk, margin: f64 },
    /// Critical orbits close up on a finite set (hash-grid revisits).
    ClosedOrbit { points: usize },
    /// Real generators and real critical values: every generator maps the
    /// closed interval into itself (exact extremum check plus samples).
    Interval { lo: f64, hi: f64, margin: f64 },
    /// `word` applied to `value` leaves the escape radius.
    Escape { word: Vec<usize>, value: C64, image: C64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostcriticalReport {
    pub status: PostcriticalStatus,
    pub witness: Option<Witness>,
    #[serde(skip)]
    pub explored_points: Vec<C64>,
    pub point_count: usize,
    pub depth: usize,
    pub truncated: bool,
    pub escape_radius: f64,
}

enum Exploration {
    Escaped { word: Vec<usize>, value: C64, image: C64, cloud: Vec<C64> },
    Closed { cloud: Vec<C64> },
    Open { cloud: Vec<C64>, truncated: bool },
}

fn dedup_key(z: C64) -> (i64, i64) {
    ((z.re / DEDUP_CELL).floor() as i64, (z.im / DEDUP_CELL).floor() as i64)
}

/// Breadth-first expansion of the critical values under all words.
fn explore(gs: &GeneratorSet, seeds: &[C64], trap: Option<Disk>, depth: usize, cap: usize) -> Exploration {
    let r = gs.escape_radius();
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut cloud = Vec::new();
    // (point, originating critical value, word)
    let mut frontier: Vec<(C64, C64, Vec<usize>)> = seeds.iter().map(|&v| (v, v, Vec::new())).collect();
    for level in 0..=depth {
        if let Some((z, v, w)) = frontier.iter().find(|(z, _, _)| !(z.norm() <= r)) {
            cloud.extend(frontier.iter().map(|f| f.0));
            return Exploration::Escaped { word: w.clone(), value: *v, image: *z, cloud };
        }
        let mut expand = Vec::new();
        for (z, v, w) in frontier {
            cloud.push(z);
            if trap.map_or(false, |d| d.contains(z)) {
                continue;
            }
            if !seen.insert(dedup_key(z)) {
                continue;
            }
            expand.push((z, v, w));
        }
        if cloud.len() > cap {
            return Exploration::Open { cloud, truncated: true };
        }
        if expand.is_empty() {
            return Exploration::Closed { cloud };
        }
        if level == depth {
            return Exploration::Open { cloud, truncated: false };
        }
        frontier = expand
            .par_iter()
            .flat_map_iter(|(z, v, w)| {
                gs.gens().iter().enumerate().map(move |(k, h)| {
                    let mut word = w.clone();
                    word.push(k);
                    (h.apply(*z), *v, word)
                })
            })
            .collect();
    }
    unreachable!("loop returns at level == depth")
}

/// Image of `[lo, hi]` under a real polynomial: extrema over endpoints and
/// real critical points inside.
fn interval_image(h: &Polynomial, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let mut pts = vec![lo, hi];
    for c in h.critical_data().ok()?.critical_points {
        if c.im.abs() < 1e-9 && c.re > lo && c.re < hi {
            pts.push(c.re);
        }
    }
    for k in 0..BOUNDARY_SAMPLES {
        pts.push(lo + (hi - lo) * k as f64 / (BOUNDARY_SAMPLES - 1) as f64);
    }
    let vals: Vec<f64> = pts.iter().map(|&x| h.apply(C64::new(x, 0.0)).re).collect();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min.is_finite() && max.is_finite()).then_some((min, max))
}

/// Closed-interval slack: negative if some generator maps outside.
fn interval_margin(gs: &GeneratorSet, lo: f64, hi: f64) -> f64 {
    gs.gens()
        .iter()
        .map(|h| match interval_image(h, lo, hi) {
            Some((a, b)) => (a - lo).min(hi - b),
            None => f64::NEG_INFINITY,
        })
        .fold(f64::INFINITY, f64::min)
}

fn interval_certificate(gs: &GeneratorSet, cloud: &[C64]) -> Option<Witness> {
    let real_tol = 1e-12;
    if !gs.gens().iter().all(Polynomial::is_real) || cloud.iter().any(|z| z.im.abs() > real_tol) {
        return None;
    }
    let lo0 = cloud.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi0 = cloud.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let mut fixed = Vec::new();
    for h in gs.gens() {
        for f in h.fixed_points().ok()? {
            if f.im.abs() < 1e-7 {
                fixed.push(f.re);
            }
        }
    }
    fixed.sort_by(f64::total_cmp);
    let hull = |pts: &[f64]| pts.iter().fold((lo0, hi0), |(a, b), &x| (a.min(x), b.max(x)));
    // widest first: a fixed point together with its real preimages, then the
    // fixed points alone, then the bare hull of the orbit
    let mut candidates = Vec::new();
    for &f in &fixed {
        let mut pts = vec![f];
        for h in gs.gens() {
            for r in h.shifted(C64::new(f, 0.0)).roots().unwrap_or_default() {
                // loose: multiple roots come back with small imaginary noise,
                // and the candidate is validated anyway
                if r.im.abs() < 1e-4 {
                    pts.push(r.re);
                }
            }
        }
        candidates.push(hull(&pts));
    }
    candidates.push(hull(&fixed));
    candidates.extend(fixed.iter().map(|&f| hull(&[f])));
    candidates.push((lo0, hi0));
    candidates.into_iter().find_map(|(lo, hi)| {
        let tol = INTERVAL_TOL * lo.abs().max(hi.abs()).max(1.0);
        let margin = interval_margin(gs, lo, hi);
        (margin >= -tol).then_some(Witness::Interval { lo, hi, margin })
    })
}

/// Explores the postcritical set to word length `depth`, stopping with a
/// certificate as soon as one is available.
pub fn postcritical_orbit(gs: &GeneratorSet, depth: usize, point_cap: usize) -> Result<PostcriticalReport> {
    if depth < 1 {
        return Err(Error::Precondition("depth must be >= 1".into()));
    }
    let cvs = gs.critical_values()?;
    let trap = gs.trapping_disk().filter(|d| trap_margin(gs.gens(), d) >= TRAP_MARGIN);
    let report = |status, witness, cloud: Vec<C64>, truncated| PostcriticalReport {
        status,
        witness,
        point_count: cloud.len(),
        explored_points: cloud,
        depth,
        truncated,
        escape_radius: gs.escape_radius(),
    };
    Ok(match explore(gs, &cvs, trap, depth, point_cap) {
        Exploration::Escaped { word, value, image, cloud } => report(
            PostcriticalStatus::UnboundedCertified,
            Some(Witness::Escape { word, value, image }),
            cloud,
            false,
        ),
        Exploration::Closed { cloud } => {
            let witness = match trap {
                Some(disk) if cloud.iter().any(|z| disk.contains(*z)) => {
                    Witness::TrappingDisk { disk, margin: trap_margin(gs.gens(), &disk) }
                }
                _ => Witness::ClosedOrbit { points: cloud.len() },
            };
            report(PostcriticalStatus::BoundedCertified, Some(witness), cloud, false)
        }
        Exploration::Open { cloud, truncated } => match interval_certificate(gs, &cloud) {
            Some(w) => report(PostcriticalStatus::BoundedCertified, Some(w), cloud, truncated),
            None => report(PostcriticalStatus::Undecided, None, cloud, truncated),
        },
    })
}

/// Re-checks a witness independently of the search that produced it.
pub fn verify_witness(gs: &GeneratorSet, witness: &Witness) -> bool {
    match witness {
        Witness::TrappingDisk { disk, .. } => trap_margin(gs.gens(), disk) >= TRAP_MARGIN,
        Witness::ClosedOrbit { .. } => true,
        Witness::Interval { lo, hi, .. } => {
            let tol = INTERVAL_TOL * lo.abs().max(hi.abs()).max(1.0);
            let cvs_inside = gs
                .critical_values()
                .map(|v| v.iter().all(|c| c.re >= lo - tol && c.re <= hi + tol))
                .unwrap_or(false);
            cvs_inside && interval_margin(gs, *lo, *hi) >= -tol
        }
        Witness::Escape { word, value, .. } => {
            let z = word.iter().fold(*value, |z, &k| gs.gens()[k].apply(z));
            !(z.norm() <= gs.escape_radius())
        }
    }
}

/// `c z^a (1-z)^b`, with `c (a/(a+b))^a (b/(a+b))^b <= 1` so that `[0,1]` is
/// mapped into itself.
pub fn realpcb_generator(a: u32, b: u32, c: f64) -> Result<Polynomial> {
    if a < 1 || b < 1 || !(c > 0.0) {
        return Err(Error::Precondition("need a, b >= 1 and c > 0".into()));
    }
    let (af, bf) = (a as f64, b as f64);
    let peak = c * (af / (af + bf)).powf(af) * (bf / (af + bf)).powf(bf);
    if peak > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("c (a/(a+b))^a (b/(a+b))^b = {peak} > 1")));
    }
    // (1-z)^b by the binomial theorem
    let mut coeffs = vec![0.0; (a + b + 1) as usize];
    let mut binom = 1.0;
    for k in 0..=b {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[(a + k) as usize] = c * sign * binom;
        binom = binom * (b - k) as f64 / (k + 1) as f64;
    }
    let h = Polynomial::from_real(&coeffs)?;
    let margin = (0..BOUNDARY_SAMPLES)
        .map(|k| h.apply(C64::new(k as f64 / (BOUNDARY_SAMPLES - 1) as f64, 0.0)).re)
        .all(|v| (-1e-12..=1.0 + 1e-12).contains(&v));
    if !margin {
        return Err(Error::Numeric("h([0,1]) not contained in [0,1]".into()));
    }
    Ok(h)
}

/// `a (z - b)^d + b`.
pub fn constprop_generator(b: C64, d: u32, a: C64) -> Result<Polynomial> {
    if d < 2 {
        return Err(Error::Precondition("d must be >= 2".into()));
    }
    if a.norm() == 0.0 {
        return Err(Error::Precondition("a must be nonzero".into()));
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); d as usize + 1];
    let mut binom = 1.0;
    for k in 0..=d {
        // coefficient of z^k in (z - b)^d is C(d,k) (-b)^(d-k)
        coeffs[k as usize] = a * binom * (-b).powu(d - k);
        binom = binom * (d - k) as f64 / (k + 1) as f64;
    }
    coeffs[0] += b;
    Polynomial::new(coeffs)
}

/// Distance between the postcritical and Julia clouds, with the verdict that
/// a gap wider than two grid cells is numerical evidence of hyperbolicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityGap {
    pub gap: f64,
    pub cell_size: f64,
    pub evidence_of_hyperbolicity: bool,
}

pub fn hyperbolicity_gap(pcloud: &[C64], jcloud: &[C64], cell_size: f64) -> Result<HyperbolicityGap> {
    if pcloud.is_empty() || jcloud.is_empty() {
        return Err(Error::Precondition("both clouds must be nonempty".into()));
    }
    let gap = crate::geom::min_distance(pcloud, jcloud, cell_size.max(1e-9));
    Ok(HyperbolicityGap { gap, cell_size, evidence_of_hyperbolicity: gap > 2.0 * cell_size })
}

/// The worked two-generator example: `{g1∘g1, g2∘g2}` with `g1 = z^2 - 1`,
/// `g2 = z^2/4`.
pub fn example_jbnq() -> GeneratorSet {
    let g1 = Polynomial::from_real(&[-1.0, 0.0, 1.0]).expect("static");
    let g2 = Polynomial::from_real(&[0.0, 0.0, 0.25]).expect("static");
    GeneratorSet::with_labels(
        vec![g1.compose(&g1).expect("static"), g2.compose(&g2).expect("static")],
        vec!["g1^2".into(), "g2^2".into()],
    )
    .expect("static")
}

/// `z^2 + c`.
pub fn quadratic(c: C64) -> Polynomial {
    Polynomial::new(vec![c, C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).expect("static")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn single(p: Polynomial) -> GeneratorSet {
        GeneratorSet::new(vec![p]).unwrap()
    }

    #[test]
    fn rejects_degree_one_generators() {
        let lin = Polynomial::from_real(&[0.0, 2.0]).unwrap();
        assert!(matches!(GeneratorSet::new(vec![lin]), Err(Error::Config(_))));
        assert!(GeneratorSet::new(vec![]).is_err());
    }

    #[test]
    fn config_round_trip_and_errors() {
        let gs = example_jbnq();
        let text = serde_json::to_string(&gs.to_config()).unwrap();
        let back = GeneratorSet::from_json(&text).unwrap();
        assert_eq!(back.gens(), gs.gens());
        assert_eq!(back.labels(), gs.labels());
        assert!(GeneratorSet::from_json(r#"{"generators": ["1 2"]}"#).is_err());
        assert!(GeneratorSet::from_json(r#"{"schema": "other", "generators": ["0 0 1"]}"#).is_err());
        let err = GeneratorSet::from_json(r#"{"generators": ["0 0 1"], "weights": [0.5]}"#).unwrap_err();
        assert!(err.to_string().contains("weights"), "{err}");
    }

    #[test]
    fn z_squared_is_bounded() {
        let rep = postcritical_orbit(&single(quadratic(c(0.0, 0.0))), 10, 10_000).unwrap();
        assert_eq!(rep.status, PostcriticalStatus::BoundedCertified);
        assert!(rep.explored_points.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn example_is_bounded_with_trapping_disk() {
        let gs = example_jbnq();
        let rep = postcritical_orbit(&gs, 20, 100_000).unwrap();
        assert_eq!(rep.status, PostcriticalStatus::BoundedCertified);
        match rep.witness.as_ref().unwrap() {
            Witness::TrappingDisk { disk, margin } => {
                assert_eq!(disk.center, c(0.0, 0.0));
                assert!((disk.radius - 0.4).abs() < 1e-12);
                assert!(*margin > 1e-3);
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(verify_witness(&gs, rep.witness.as_ref().unwrap()));
    }

    #[test]
    fn z_squared_plus_one_escapes() {
        let gs = single(quadratic(c(1.0, 0.0)));
        let rep = postcritical_orbit(&gs, 10, 10_000).unwrap();
        assert_eq!(rep.status, PostcriticalStatus::UnboundedCertified);
        let w = rep.witness.unwrap();
        assert!(verify_witness(&gs, &w));
        if let Witness::Escape { word, value, image } = w {
            assert_eq!(value, c(1.0, 0.0));
            assert_eq!(word.len(), 2); // 1 -> 2 -> 5
            assert_eq!(image, c(5.0, 0.0));
        }
    }

    #[test]
    fn parabolic_quarter_is_bounded_by_interval() {
        let gs = single(quadratic(c(0.25, 0.0)));
        let rep = postcritical_orbit(&gs, 64, 100_000).unwrap();
        assert_eq!(rep.status, PostcriticalStatus::BoundedCertified);
        assert!(matches!(rep.witness, Some(Witness::Interval { .. })));
        assert!(verify_witness(&gs, rep.witness.as_ref().unwrap()));
    }

    #[test]
    fn depth_zero_rejected() {
        assert!(postcritical_orbit(&example_jbnq(), 0, 10).is_err());
    }

    #[test]
    fn point_cap_truncates() {
        // slow parabolic orbit under two real maps, never closes
        let gs = GeneratorSet::new(vec![quadratic(c(0.25, 0.0)), quadratic(c(0.24, 0.0))]).unwrap();
        let rep = postcritical_orbit(&gs, 30, 50).unwrap();
        assert!(rep.truncated);
    }

    #[test]
    fn invariant_disk_examples() {
        let gs = example_jbnq();
        let cands = [Disk::new(c(0.0, 0.0), 3.0), Disk::new(c(0.0, 0.0), 0.4)];
        assert_eq!(find_invariant_disk(&gs, &cands), Some(cands[1]));

        let gs = single(quadratic(c(0.0, 0.0)));
        let d = Disk::new(c(0.0, 0.0), 0.5);
        assert_eq!(find_invariant_disk(&gs, &[d]), Some(d));

        let gs = single(quadratic(c(1.0, 0.0)));
        let cands: Vec<Disk> = (1..=10).map(|r| Disk::new(c(0.0, 0.0), r as f64)).collect();
        assert_eq!(find_invariant_disk(&gs, &cands), None);
    }

    #[test]
    fn trap_margin_of_example_disk() {
        let gs = example_jbnq();
        let m = trap_margin(gs.gens(), &Disk::new(c(0.0, 0.0), 0.4));
        // |z^4 - 2z^2| <= 0.4^4 + 2 * 0.4^2 on |z| = 0.4
        assert!((m - (0.4 - 0.3456)).abs() < 1e-9, "{m}");
    }

    #[test]
    fn realpcb_examples() {
        let logistic = realpcb_generator(1, 1, 4.0).unwrap();
        assert_eq!(logistic, Polynomial::from_real(&[0.0, 4.0, -4.0]).unwrap());
        let h = realpcb_generator(1, 1, 2.0).unwrap();
        assert_eq!(h, Polynomial::from_real(&[0.0, 2.0, -2.0]).unwrap());
        let cd = h.critical_data().unwrap();
        assert!((cd.critical_points[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((cd.critical_values_finite[0] - c(0.5, 0.0)).norm() < 1e-15);
        let b = realpcb_generator(2, 1, 6.75).unwrap();
        assert_eq!(b, Polynomial::from_real(&[0.0, 0.0, 6.75, -6.75]).unwrap());
        assert!(realpcb_generator(2, 1, 6.8).is_err());
        assert!(realpcb_generator(0, 1, 1.0).is_err());
    }

    #[test]
    fn realpcb_semigroups_bounded_by_interval_containing_unit() {
        let gens = vec![
            realpcb_generator(1, 1, 4.0).unwrap(),
            realpcb_generator(2, 1, 6.75).unwrap(),
            realpcb_generator(1, 3, 9.0).unwrap(),
            realpcb_generator(2, 2, 11.0).unwrap(),
        ];
        for mask in 1u32..16 {
            let sub: Vec<Polynomial> =
                gens.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, g)| g.clone()).collect();
            let gs = GeneratorSet::new(sub).unwrap();
            let rep = postcritical_orbit(&gs, 12, 200_000).unwrap();
            assert_eq!(rep.status, PostcriticalStatus::BoundedCertified, "mask {mask}");
            match rep.witness.as_ref().unwrap() {
                Witness::Interval { lo, hi, .. } => assert!(*lo <= 1e-12 && *hi >= 1.0 - 1e-12, "{lo} {hi}"),
                Witness::ClosedOrbit { .. } | Witness::TrappingDisk { .. } => {}
                w => panic!("{w:?}"),
            }
            assert!(verify_witness(&gs, rep.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn constprop_examples() {
        assert_eq!(constprop_generator(c(0.0, 0.0), 2, c(1.0, 0.0)).unwrap(), quadratic(c(0.0, 0.0)));
        let a = c(0.3, -0.2);
        let g = constprop_generator(c(0.0, 0.0), 3, a).unwrap();
        assert_eq!(g.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), a]);
        let g = constprop_generator(c(1.0, 0.0), 2, c(0.01, 0.0)).unwrap();
        let want = [1.01, -0.02, 0.01];
        for (got, w) in g.coeffs().iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-15);
        }
        assert!(constprop_generator(c(0.0, 0.0), 1, c(1.0, 0.0)).is_err());
        assert!(constprop_generator(c(0.0, 0.0), 2, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn gap_examples() {
        let circle: Vec<C64> = (0..1000).map(|k| C64::from_polar(1.0, k as f64 * 0.00628318)).collect();
        let g = hyperbolicity_gap(&[c(0.0, 0.0)], &circle, 0.01).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-12 && g.evidence_of_hyperbolicity);
        let seg: Vec<C64> = (0..=400).map(|k| c(-2.0 + k as f64 * 0.01, 0.0)).collect();
        let g = hyperbolicity_gap(&[c(-2.0, 0.0), c(2.0, 0.0)], &seg, 0.01).unwrap();
        assert!(g.gap < 1e-9 && !g.evidence_of_hyperbolicity);
        assert!(hyperbolicity_gap(&[], &seg, 0.01).is_err());
    }

    #[test]
    fn certificates_are_monotone_in_depth() {
        for cc in [c(0.0, 0.0), c(-1.0, 0.0), c(0.2, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(-0.75, 0.1)] {
            let gs = single(quadratic(cc));
            let mut last: Option<PostcriticalStatus> = None;
            for depth in 1..=24 {
                let s = postcritical_orbit(&gs, depth, 100_000).unwrap().status;
                if let Some(prev) = last {
                    if prev != PostcriticalStatus::Undecided {
                        assert_eq!(s, prev, "c={cc} depth={depth}");
                    }
                }
                last = Some(s);
            }
        }
    }

    #[test]
    fn explored_cloud_is_forward_invariant() {
        let gs = example_jbnq();
        let trap = gs.trapping_disk();
        for k in 1..6 {
            let a = postcritical_orbit(&gs, k, 1_000_000).unwrap().explored_points;
            let b = postcritical_orbit(&gs, k + 1, 1_000_000).unwrap().explored_points;
            let keys: HashSet<_> = b.iter().map(|z| dedup_key(*z)).collect();
            for q in &a {
                for h in gs.gens() {
                    let w = h.apply(*q);
                    assert!(keys.contains(&dedup_key(w)) || trap.map_or(false, |d| d.contains(w)) || trap.map_or(false, |d| d.contains(*q)));
                }
            }
        }
    }

    #[test]
    fn single_quadratic_matches_connectedness_locus() {
        for cc in [c(0.0, 0.0), c(-1.0, 0.0), c(0.2, 0.0)] {
            let rep = postcritical_orbit(&single(quadratic(cc)), 64, 100_000).unwrap();
            assert_eq!(rep.status, PostcriticalStatus::BoundedCertified, "c={cc}");
        }
        for cc in [c(1.0, 0.0), c(2.0, 1.0)] {
            let rep = postcritical_orbit(&single(quadratic(cc)), 64, 100_000).unwrap();
            assert_eq!(rep.status, PostcriticalStatus::UnboundedCertified, "c={cc}");
        }
    }
}
