//! i.i.d. random sequences and Monte Carlo statistics of their fibers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::{bounded_barycenter, bounded_components_count, fiber_grid_word, orbit_enters_khat, trace_boundary, turning_constant, SequenceSpec};
use crate::grid::{GridSpec, Window};
use crate::julia::{word_tree_classify, DEFAULT_BUDGET};
use crate::semigroup::{postcritical_orbit, validate_weights, GeneratorSet, PostcriticalStatus};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IidModel {
    pub weights: Vec<f64>,
    pub master_seed: u64,
}

impl IidModel {
    pub fn new(weights: Vec<f64>, master_seed: u64) -> Result<Self> {
        validate_weights(&weights, weights.len())?;
        Ok(IidModel { weights, master_seed })
    }

    /// Generators the model never draws.
    pub fn support_warnings(&self, gs: &GeneratorSet) -> Vec<String> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == 0.0)
            .map(|(k, _)| {
                format!(
                    "generator {} has zero weight: samples live on a smaller semigroup than the one configured",
                    gs.labels().get(k).map(String::as_str).unwrap_or("?")
                )
            })
            .collect()
    }

    /// The letters of trial `trial`, drawn from its own ChaCha stream.
    pub fn letters(&self, trial: u64, length: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        (0..length)
            .map(|_| {
                let mut u = rng.random::<f64>();
                let mut last = 0;
                for (k, w) in self.weights.iter().enumerate() {
                    if *w > 0.0 {
                        last = k;
                        if u < *w {
                            return k;
                        }
                        u -= w;
                    }
                }
                last
            })
            .collect()
    }

    fn most_likely(&self) -> usize {
        (0..self.weights.len()).max_by(|a, b| self.weights[*a].total_cmp(&self.weights[*b]).then(b.cmp(a))).unwrap_or(0)
    }
}

/// `count` sampled prefixes of length `length`, realized as explicit words.
pub fn sample_sequences(model: &IidModel, gs: &GeneratorSet, count: usize, length: usize) -> Result<Vec<SequenceSpec>> {
    if count < 1 || length < 1 {
        return Err(Error::Precondition("count and length must be >= 1".into()));
    }
    if model.weights.len() != gs.len() {
        return Err(Error::Config(format!("{} weights for {} generators", model.weights.len(), gs.len())));
    }
    Ok((0..count as u64)
        .map(|t| SequenceSpec::Prefix { word: model.letters(t, length), tail: model.most_likely() })
        .collect())
}

/// Grid settings shared by every trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    pub window: Window,
    pub resolution: usize,
    /// Prefix length; also the iteration count.
    pub length: usize,
    /// Resolution and word depth of the grid approximating the interior of
    /// the smallest filled-in Julia set.
    pub khat_resolution: usize,
    pub khat_depth: usize,
    /// Random pairs for each trial's turning constant (0 skips it).
    pub turning_pairs: usize,
}

impl FiberParams {
    pub fn new(window: Window, resolution: usize, length: usize) -> Self {
        FiberParams { window, resolution, length, khat_resolution: 256, khat_depth: 16, turning_pairs: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub value: f64,
    /// Wilson 95% interval.
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn wilson(successes: usize, n: usize) -> Self {
        if n == 0 {
            return Proportion { value: 0.0, lo: 0.0, hi: 1.0 };
        }
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        Proportion { value: p, lo: (center - half).max(0.0), hi: (center + half).min(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub bounded_components: Option<usize>,
    pub jordan: bool,
    pub entered_khat_at: Option<usize>,
    pub turning_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    /// Trials whose bounded set touched the window edge.
    pub excluded: usize,
    pub frac_single_bounded_component: Proportion,
    pub frac_jordan: Proportion,
    pub frac_entered_khat: Proportion,
    pub area_ratio_by_resolution: Vec<f64>,
    pub warnings: Vec<String>,
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` independent fibers and aggregates the fractions over the
/// trials that were not excluded.
pub fn monte_carlo_fiber_stats(model: &IidModel, gs: &GeneratorSet, trials: usize, params: &FiberParams) -> Result<TrialStats> {
    if trials < 10 {
        return Err(Error::Precondition("need at least 10 trials".into()));
    }
    if model.weights.len() != gs.len() {
        return Err(Error::Config(format!("{} weights for {} generators", model.weights.len(), gs.len())));
    }
    let pc = postcritical_orbit(gs, 64, 100_000)?;
    if pc.status != PostcriticalStatus::BoundedCertified {
        return Err(Error::Precondition(format!("postcritical set not certified bounded ({:?})", pc.status)));
    }
    let grid = GridSpec::square(params.window, params.resolution)?;
    let khat = word_tree_classify(gs, GridSpec::square(params.window, params.khat_resolution)?, params.khat_depth, DEFAULT_BUDGET)?;
    let records: Vec<Result<TrialRecord>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let letters = model.letters(t, params.length);
            let fg = fiber_grid_word(gs, &letters, grid);
            let bounded_components = match bounded_components_count(&fg) {
                Ok(n) => Some(n),
                Err(Error::Indeterminate(_)) | Err(Error::Precondition(_)) => None,
                Err(e) => return Err(e),
            };
            let mut curve = trace_boundary(&fg);
            let jordan = curve.is_single_loop;
            let turning = if jordan && params.turning_pairs > 0 {
                turning_constant(&mut curve, params.turning_pairs, t).ok()
            } else {
                None
            };
            let spec = SequenceSpec::Prefix { word: letters, tail: model.most_likely() };
            let entered = match bounded_barycenter(&fg) {
                Some(y0) => match orbit_enters_khat(gs, &spec, y0, &khat, params.length) {
                    Ok(n) => n,
                    Err(Error::Contradiction(_)) => None,
                    Err(e) => return Err(e),
                },
                None => None,
            };
            Ok(TrialRecord { trial: t, bounded_components, jordan, entered_khat_at: entered, turning_constant: turning })
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let kept: Vec<&TrialRecord> = records.iter().filter(|r| r.bounded_components.is_some()).collect();
    let n = kept.len();
    let count = |f: &dyn Fn(&TrialRecord) -> bool| kept.iter().filter(|r| f(r)).count();
    Ok(TrialStats {
        trials,
        excluded: trials - n,
        frac_single_bounded_component: Proportion::wilson(count(&|r| r.bounded_components == Some(1)), n),
        frac_jordan: Proportion::wilson(count(&|r| r.jordan), n),
        frac_entered_khat: Proportion::wilson(count(&|r| r.entered_khat_at.is_some()), n),
        area_ratio_by_resolution: Vec::new(),
        warnings: model.support_warnings(gs),
        records,
    })
}

/// Boundary-cell area of one trial's fiber at each resolution.
pub fn area_resolution_ladder(
    model: &IidModel,
    gs: &GeneratorSet,
    trial: u64,
    window: Window,
    length: usize,
    resolutions: &[usize],
) -> Result<Vec<f64>> {
    check_ladder(resolutions)?;
    let letters = model.letters(trial, length);
    resolutions
        .iter()
        .map(|n| Ok(fiber_grid_word(gs, &letters, GridSpec::square(window, *n)?).area_estimate()))
        .collect()
}

pub fn check_ladder(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 2 || resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Precondition("need >= 2 resolutions, each double the previous".into()));
    }
    Ok(())
}

/// Successive ratios `a[k+1] / a[k]`.
pub fn ladder_ratios(areas: &[f64]) -> Vec<f64> {
    areas.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Area ladder of a synthetic set given by a membership test on cell
/// centres, with every member cell counted.
pub fn synthetic_area_ladder(window: Window, resolutions: &[usize], member: impl Fn(crate::poly::C64) -> bool) -> Result<Vec<f64>> {
    check_ladder(resolutions)?;
    resolutions
        .iter()
        .map(|n| {
            let g = GridSpec::square(window, *n)?;
            let cells = (0..g.len()).filter(|idx| member(g.center_of(*idx))).count();
            Ok(crate::fiber::area_estimate(cells, g.cell_size()))
        })
        .collect()
}
