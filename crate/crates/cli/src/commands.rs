use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map};
use sjg_core::fiber::{self, FiberDiagnostics, SequenceSpec, TghypCase, Verdict};
use sjg_core::julia::{self, CantorReport, CellLabel, GridReport, Region, Selection};
use sjg_core::random_dyn::{self, FiberParams, IidModel, TrialStats};
use sjg_core::render;
use sjg_core::semigroup::{self, PostcriticalReport, PostcriticalStatus};
use sjg_core::{GeneratorSet, GridSpec, Window, C64};
use thiserror::Error;

use crate::args::{Cli, Command, Common, GridArgs};
use crate::report::{Check, Report, RunConfig};

pub const BUNDLED_CONFIG_NAME: &str = "example_jbnq.json";
const BUNDLED_CONFIG: &str = include_str!("../data/example_jbnq.json");

pub const EXIT_OK: u8 = 0;
pub const EXIT_INDETERMINATE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sjg_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(sjg_core::Error::Indeterminate(_)) => EXIT_INDETERMINATE,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Postcritical { common, depth, point_cap } => postcritical(&common, depth, point_cap),
        Command::Julia { common, grid, depth, points } => julia_cmd(&common, &grid, depth, points),
        Command::Fiber { common, grid, seq, max_iter, pairs } => fiber_cmd(&common, &grid, &seq, max_iter, pairs),
        Command::Classify { common, seq, special, subset, window_len, horizon } => {
            classify(&common, &seq, special, &subset, window_len, horizon)
        }
        Command::RandomStats { common, grid, weights, trials, length, ladder } => {
            random_stats(&common, &grid, &weights, trials, length, &ladder)
        }
        Command::CantorVerify { common, annulus, rects } => cantor(&common, annulus.as_deref(), rects.as_deref()),
        Command::Reproduce { name, res, out, threads, deterministic, no_png } => {
            let common = Common { gens: PathBuf::from(BUNDLED_CONFIG_NAME), out, seed: 0, threads, deterministic, no_png };
            match name.as_str() {
                "dcgraph" => dcgraph(&common, res),
                other => Err(CliError::Usage(format!("unknown figure {other:?} (known: dcgraph)"))),
            }
        }
    }
}

/// Reads a generator config, falling back to the bundled example when the
/// path does not exist and names it.
pub fn load_generators(path: &Path) -> Result<GeneratorSet> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound
            && path.file_name().is_some_and(|n| n == BUNDLED_CONFIG_NAME) =>
        {
            BUNDLED_CONFIG.to_string()
        }
        Err(e) => return Err(CliError::Usage(format!("cannot read {}: {e}", path.display()))),
    };
    Ok(GeneratorSet::from_json(&text)?)
}

pub fn parse_window(s: &str) -> Result<Window> {
    let v = parse_floats(s, 4)?;
    Ok(Window::new(v[0], v[1], v[2], v[3])?)
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {t:?} in {s:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(CliError::Usage(format!("expected {n} comma-separated numbers, got {s:?}")));
    }
    Ok(v)
}

struct Session {
    gs: GeneratorSet,
    config: RunConfig,
    out: PathBuf,
    start: Instant,
    deterministic: bool,
    png: bool,
}

impl Session {
    fn open(common: &Common, command: &str) -> Result<Self> {
        if let Some(n) = common.threads {
            // A second build in the same process fails; the first pool stays.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        let gs = load_generators(&common.gens)?;
        std::fs::create_dir_all(&common.out)?;
        let generators = serde_json::to_value(gs.to_config()).expect("config serializes");
        let config = RunConfig {
            command: command.into(),
            gens_path: Some(common.gens.display().to_string()),
            generators,
            seed: common.seed,
            params: Map::new(),
        };
        Ok(Session {
            gs,
            config,
            out: common.out.clone(),
            start: Instant::now(),
            deterministic: common.deterministic,
            png: !common.no_png,
        })
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.config.params.insert(key.into(), serde_json::to_value(value).expect("param serializes"));
    }

    fn window(&mut self, grid: &GridArgs) -> Result<GridSpec> {
        let window = match &grid.window {
            Some(s) => parse_window(s)?,
            None => Window::square(self.gs.escape_radius()),
        };
        self.param("window", window);
        self.param("res", grid.res);
        Ok(GridSpec::square(window, grid.res)?)
    }

    fn image(&self, stem: &str, img: &render::Image) -> Result<()> {
        img.write_ppm(&self.out.join(format!("{stem}.ppm")))?;
        if self.png {
            img.write_png(&self.out.join(format!("{stem}.png")))?;
        }
        Ok(())
    }

    fn finish<T: Serialize>(self, stem: &str, result: T, checks: Vec<Check>) -> Result<()> {
        let wall = (!self.deterministic).then(|| self.start.elapsed().as_secs_f64());
        let report = Report::new(self.config, result, checks, wall);
        let path = self.out.join(format!("{stem}.json"));
        render::write_json(&report, &path)?;
        println!("{}", path.display());
        Ok(())
    }
}

fn exit_for(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_INDETERMINATE
    }
}

fn postcritical(common: &Common, depth: usize, point_cap: usize) -> Result<u8> {
    let mut s = Session::open(common, "postcritical")?;
    s.param("depth", depth);
    s.param("point_cap", point_cap);
    let rep: PostcriticalReport = semigroup::postcritical_orbit(&s.gs, depth, point_cap)?;
    let witness_ok = rep.witness.as_ref().is_some_and(|w| semigroup::verify_witness(&s.gs, w));
    let decided = rep.status != PostcriticalStatus::Undecided;
    println!("status: {:?}", rep.status);
    let checks = vec![Check::new("postcritical_decided", decided), Check::new("witness_verified", witness_ok)];
    s.finish("postcritical", &rep, checks)?;
    Ok(exit_for(decided))
}

#[derive(Serialize)]
struct JuliaResult {
    grid: GridReport,
    ordering: String,
    extremes: Option<(usize, usize)>,
    gamma_min: Option<Vec<String>>,
    cloud_points: Option<usize>,
}

struct JuliaRun {
    result: JuliaResult,
    checks: Vec<Check>,
    decided: bool,
}

fn julia_run(s: &Session, stem: &str, grid: GridSpec, depth: usize, points: usize, seed: u64) -> Result<JuliaRun> {
    let region = julia::word_tree_classify(&s.gs, grid, depth, julia::DEFAULT_BUDGET)?;
    s.image(stem, &render::render_region(&region))?;
    let mut comps = julia::extract_components(&region, Selection::Julia);
    let ordering = julia::order_components(&mut comps);
    let undecided = region.histogram().get(&CellLabel::Undecided).copied().unwrap_or(0);
    let ordered = ordering.is_ok();
    let (extremes, gamma_min) = match julia::identify_extremes(&comps) {
        Ok((lo, hi)) if ordered => {
            let labels = julia::gamma_min(&s.gs, &comps, lo, seed)
                .ok()
                .map(|ks| ks.into_iter().map(|k| s.gs.labels()[k].clone()).collect());
            (Some((lo, hi)), labels)
        }
        _ => (None, None),
    };
    let cloud_points = if points > 0 {
        let cloud = julia::julia_cloud(&s.gs, points, grid.cell_size(), seed)?;
        render::write_csv(&cloud.points, &s.out.join("cloud.csv"))?;
        Some(cloud.points.len())
    } else {
        None
    };
    let checks = vec![
        Check::new("no_undecided_cells", undecided == 0),
        Check::new("surrounding_order_decided", ordered),
        Check::new("extremes_found", extremes.is_some()),
        Check::new("gamma_min_found", gamma_min.is_some()),
    ];
    let result = JuliaResult {
        grid: region.report(&comps),
        ordering: match &ordering {
            Ok(()) => "decided".into(),
            Err(e) => e.to_string(),
        },
        extremes,
        gamma_min,
        cloud_points,
    };
    println!("components: {}, undecided cells: {undecided}", comps.len());
    Ok(JuliaRun { result, checks, decided: undecided == 0 && ordered })
}

fn julia_cmd(common: &Common, grid: &GridArgs, depth: usize, points: usize) -> Result<u8> {
    let mut s = Session::open(common, "julia")?;
    let spec = s.window(grid)?;
    s.param("depth", depth);
    s.param("budget", julia::DEFAULT_BUDGET);
    s.param("points", points);
    let run = julia_run(&s, "julia", spec, depth, points, common.seed)?;
    s.finish("julia", run.result, run.checks)?;
    Ok(exit_for(run.decided))
}

fn dcgraph(common: &Common, res: usize) -> Result<u8> {
    let mut s = Session::open(common, "reproduce dcgraph")?;
    let depth = 24;
    let window = Window::square(4.5);
    s.param("window", window);
    s.param("res", res);
    s.param("depth", depth);
    let mut run = julia_run(&s, "dcgraph", GridSpec::square(window, res)?, depth, 0, common.seed)?;
    let comps_ok = run.result.grid.component_count >= 2;
    let gmin_ok = run.result.gamma_min.as_deref() == Some(&["g1^2".to_string()][..]);
    run.checks.push(Check::new("at_least_two_components", comps_ok));
    run.checks.push(Check::new("gamma_min_is_g1_squared", gmin_ok));
    let ok = run.decided && comps_ok && gmin_ok;
    println!("dcgraph: {}", if ok { "PASS" } else { "FAIL" });
    s.finish("dcgraph", run.result, run.checks)?;
    Ok(exit_for(ok))
}

#[derive(Serialize)]
struct FiberResult {
    sequence: String,
    max_iter: usize,
    diagnostics: FiberDiagnostics,
}

fn fiber_cmd(common: &Common, grid: &GridArgs, seq: &str, max_iter: usize, pairs: usize) -> Result<u8> {
    let mut s = Session::open(common, "fiber")?;
    let spec: SequenceSpec = seq.parse()?;
    let g = s.window(grid)?;
    s.param("seq", spec.to_string());
    s.param("max_iter", max_iter);
    s.param("pairs", pairs);
    let fg = fiber::fiber_grid(&s.gs, &spec, g, max_iter)?;
    s.image("fiber", &render::render_fiber(&fg))?;
    render::write_csv(&fg.boundary_points(), &s.out.join("boundary.csv"))?;
    let d = fg.diagnostics(pairs, common.seed);
    let decided = d.bounded_components.is_some();
    println!(
        "jordan: {}, bounded components: {}, turning constant: {}",
        d.jordan,
        d.bounded_components.map_or("indeterminate".into(), |c| c.to_string()),
        d.turning_constant.map_or("n/a".into(), |k| format!("{k:.4}")),
    );
    let checks = vec![
        Check::new("bounded_set_inside_window", decided),
        Check::new("single_bounded_component", d.bounded_components == Some(1)),
        Check::new("digital_jordan", d.jordan),
    ];
    s.finish("fiber", FiberResult { sequence: spec.to_string(), max_iter, diagnostics: d }, checks)?;
    Ok(exit_for(decided))
}

#[derive(Serialize)]
struct ClassifyResult {
    sequence: String,
    special: usize,
    case: Option<TghypCase>,
    case_error: Option<String>,
    recurrence: Option<Verdict>,
    window: Option<bool>,
}

fn classify(
    common: &Common,
    seq: &str,
    special: usize,
    subset: &[usize],
    window_len: Option<usize>,
    horizon: usize,
) -> Result<u8> {
    let mut s = Session::open(common, "classify")?;
    let spec: SequenceSpec = seq.parse()?;
    spec.validate(s.gs.len())?;
    s.param("seq", spec.to_string());
    s.param("special", special);
    s.param("subset", subset);
    s.param("window_len", window_len);
    s.param("horizon", horizon);
    let (case, case_error) = match fiber::tghyp_classify(&s.gs, &spec, special) {
        Ok(c) => (Some(c), None),
        Err(e @ sjg_core::Error::UnsupportedKind(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let recurrence = (!subset.is_empty()).then(|| fiber::rgs_check(&spec, subset));
    let window = match window_len {
        Some(p) if !subset.is_empty() => Some(fiber::wsp_check(&spec, subset, p, horizon)?),
        Some(_) => return Err(CliError::Usage("--window-len needs --subset".into())),
        None => None,
    };
    match case {
        Some(c) => println!("case: {c:?}"),
        None => println!("case: undetermined"),
    }
    let decided = case.is_some();
    let checks = vec![Check::new("case_determined", decided)];
    let result = ClassifyResult { sequence: spec.to_string(), special, case, case_error, recurrence, window };
    s.finish("classify", result, checks)?;
    Ok(exit_for(decided))
}

#[derive(Serialize)]
struct RandomStatsResult {
    stats: TrialStats,
    ladder: Option<Vec<(usize, f64)>>,
    ladder_ratios: Option<Vec<f64>>,
}

fn random_stats(
    common: &Common,
    grid: &GridArgs,
    weights: &[f64],
    trials: usize,
    length: usize,
    ladder: &[usize],
) -> Result<u8> {
    let mut s = Session::open(common, "random-stats")?;
    let weights = if weights.is_empty() {
        s.gs.weights().map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0 / s.gs.len() as f64; s.gs.len()])
    } else {
        weights.to_vec()
    };
    let g = s.window(grid)?;
    s.param("weights", &weights);
    s.param("trials", trials);
    s.param("length", length);
    s.param("ladder", ladder);
    let model = IidModel::new(weights, common.seed)?;
    let params = FiberParams::new(g.window, grid.res, length);
    let stats = random_dyn::monte_carlo_fiber_stats(&model, &s.gs, trials, &params)?;
    let (ladder_areas, ratios) = if ladder.is_empty() {
        (None, None)
    } else {
        let areas = random_dyn::area_resolution_ladder(&model, &s.gs, 0, g.window, length, ladder)?;
        let ratios = random_dyn::ladder_ratios(&areas);
        (Some(ladder.iter().copied().zip(areas).collect()), Some(ratios))
    };
    for w in &stats.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "trials: {}, excluded: {}, single component: {:.3}, jordan: {:.3}",
        stats.trials, stats.excluded, stats.frac_single_bounded_component.value, stats.frac_jordan.value
    );
    let used = stats.trials - stats.excluded;
    let checks = vec![Check::new("no_trial_excluded", stats.excluded == 0), Check::new("trials_used", used > 0)];
    let ok = used > 0;
    s.finish("random_stats", RandomStatsResult { stats, ladder: ladder_areas, ladder_ratios: ratios }, checks)?;
    Ok(exit_for(ok))
}

fn parse_region(annulus: Option<&str>, rects: Option<&str>) -> Result<Region> {
    match (annulus, rects) {
        (Some(a), None) => {
            let v = parse_floats(a, 4)?;
            if !(0.0 <= v[2] && v[2] < v[3]) {
                return Err(CliError::Usage("annulus needs 0 <= r_in < r_out".into()));
            }
            Ok(Region::Annulus { center: C64::new(v[0], v[1]), r_in: v[2], r_out: v[3] })
        }
        (None, Some(r)) => {
            let rects = r.split(';').filter(|t| !t.trim().is_empty()).map(parse_window).collect::<Result<Vec<_>>>()?;
            if rects.is_empty() {
                return Err(CliError::Usage("--rects needs at least one rectangle".into()));
            }
            Ok(Region::Rects { rects })
        }
        _ => Err(CliError::Usage("give exactly one of --annulus or --rects".into())),
    }
}

fn cantor(common: &Common, annulus: Option<&str>, rects: Option<&str>) -> Result<u8> {
    let mut s = Session::open(common, "cantor-verify")?;
    let region = parse_region(annulus, rects)?;
    s.param("region", &region);
    let rep: CantorReport = julia::cantor_family_verify(&s.gs, &region)?;
    let ok = rep.containment_holds && rep.separation_holds;
    println!(
        "containment margin: {:.3e}, separation: {:.3e}: {}",
        rep.containment_margin,
        rep.separation,
        if ok { "holds" } else { "fails" }
    );
    let checks = vec![
        Check::new("preimages_inside_region", rep.containment_holds),
        Check::new("preimages_disjoint", rep.separation_holds),
    ];
    s.finish("cantor", json!({ "region": region, "report": rep }), checks)?;
    Ok(exit_for(ok))
}
