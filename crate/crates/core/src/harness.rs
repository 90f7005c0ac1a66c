//! Benchmark front end: run specifications, config parsing, convergence
//! studies and artifact emission (CSV tables, binary snapshots, SVG log-log
//! plots). All file writes are whole-file and atomic (write then rename) and
//! every artifact is byte-identical across repeated runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Field, GridSpec, State};
use crate::integrators::{integrate, observed_orders, Scheme, StepperConfig};
use crate::models::{
    caginalp_initial, grayscott_initial, CaginalpParams, CaginalpProblem, GrayScottParams,
    GrayScottProblem, SplitProblem,
};
use crate::norms::{self, NormKind};

/// Environment variable supplying the default output directory.
pub const OUT_DIR_ENV: &str = "SPLITPDE_OUT";

pub const SNAPSHOT_MAGIC: &[u8; 10] = b"SPLITSNAP1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Caginalp,
    GrayScott,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormTag {
    L2,
    Weighted,
    Graph,
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub model: ModelKind,
    pub scheme: Scheme,
    pub n: usize,
    pub t_final: f64,
    pub n_steps: usize,
    pub norm: Option<NormTag>,
    pub out_dir: PathBuf,
    pub enforce_stability: bool,
    /// Enables the heavyweight protocols: finer-grid reference solutions and
    /// long pattern-formation runs.
    pub long: bool,
    /// Step sizes of a convergence study, descending.
    pub h_list: Vec<f64>,
    /// Step count of the reference integration in a convergence study.
    pub ref_steps: usize,
}

impl RunSpec {
    pub fn step_size(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn build_problem(&self) -> Result<(Box<dyn SplitProblem>, State)> {
        let grid = make_grid(self.n, std::f64::consts::PI)?;
        build_problem_on(self.model, grid)
    }

    pub fn norm_kind(&self, problem: &dyn SplitProblem) -> NormKind {
        match self.norm {
            None => problem.norm_kind(),
            Some(NormTag::L2) => NormKind::L2,
            Some(NormTag::Weighted) => NormKind::WeightedCaginalp { ell: 0.5 },
            Some(NormTag::Graph) => {
                let p = GrayScottParams::benchmark();
                NormKind::GraphGrayScott { d1: p.d1, d2: p.d2 }
            }
        }
    }
}

fn build_problem_on(
    model: ModelKind,
    grid: Arc<GridSpec>,
) -> Result<(Box<dyn SplitProblem>, State)> {
    match model {
        ModelKind::Caginalp => {
            let params = CaginalpParams::new(0.5)?;
            let u0 = caginalp_initial(&grid, &params);
            Ok((Box::new(CaginalpProblem::new(grid, params)), u0))
        }
        ModelKind::GrayScott => {
            let u0 = grayscott_initial(&grid);
            Ok((
                Box::new(GrayScottProblem::new(grid, GrayScottParams::benchmark())),
                u0,
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

const VALID_KEYS: &[&str] = &[
    "model",
    "scheme",
    "n",
    "t_final",
    "n_steps",
    "norm",
    "out",
    "enforce_stability",
    "long",
    "h_list",
    "ref_steps",
];

/// Parses the line-oriented `key = value` config format. `#` starts a
/// comment; unknown keys are errors naming the nearest valid key.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !VALID_KEYS.contains(&key.as_str()) {
            let nearest = VALID_KEYS
                .iter()
                .min_by_key(|k| levenshtein(&key, k))
                .unwrap();
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}` (did you mean `{nearest}`?)",
                lineno + 1
            )));
        }
        map.insert(key, value);
    }
    Ok(map)
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Builds a [`RunSpec`] from an optional config file plus CLI overrides
/// (flags win). `need_steps`/`need_study` select which keys are required for
/// the `run` and `converge` entry points.
pub fn parse_config(
    config_path: Option<&Path>,
    overrides: &[(String, String)],
    need_steps: bool,
    need_study: bool,
) -> Result<RunSpec> {
    let mut map = match config_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        if !VALID_KEYS.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown option `{k}`")));
        }
        map.insert(k.clone(), v.clone());
    }

    let mut required = vec!["model", "scheme", "n", "t_final"];
    if need_steps {
        required.push("n_steps");
    }
    if need_study {
        required.push("h_list");
        required.push("ref_steps");
    }
    let missing: Vec<&str> = required
        .iter()
        .filter(|k| !map.contains_key(**k))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "missing required keys: {}",
            missing.join(", ")
        )));
    }

    let model = match map["model"].as_str() {
        "caginalp" => ModelKind::Caginalp,
        "gray-scott" | "grayscott" => ModelKind::GrayScott,
        other => {
            return Err(Error::Config(format!(
                "unknown model `{other}` (expected caginalp or gray-scott)"
            )))
        }
    };
    let scheme = match map["scheme"].as_str() {
        "pr" => Scheme::PeacemanRachford,
        "lie" => Scheme::Lie,
        other => {
            return Err(Error::Config(format!(
                "unknown scheme `{other}` (expected pr or lie)"
            )))
        }
    };
    let n: usize = parse_num(&map, "n")?;
    let t_final: f64 = parse_num(&map, "t_final")?;
    if !(t_final > 0.0) {
        return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
    }
    let n_steps: usize = if map.contains_key("n_steps") {
        parse_num(&map, "n_steps")?
    } else {
        0
    };
    let norm = match map.get("norm").map(|s| s.as_str()) {
        None => None,
        Some("l2") => Some(NormTag::L2),
        Some("weighted") => Some(NormTag::Weighted),
        Some("graph") => Some(NormTag::Graph),
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown norm `{other}` (expected l2, weighted or graph)"
            )))
        }
    };
    let out_dir = map
        .get("out")
        .cloned()
        .or_else(|| std::env::var(OUT_DIR_ENV).ok())
        .unwrap_or_else(|| "out".to_string());
    let enforce_stability = parse_bool(&map, "enforce_stability")?;
    let long = parse_bool(&map, "long")?;
    let h_list = match map.get("h_list") {
        None => Vec::new(),
        Some(s) => {
            let mut hs = Vec::new();
            for part in s.split(',') {
                let h: f64 = part.trim().parse().map_err(|_| {
                    Error::Config(format!("h_list entry `{part}` is not a number"))
                })?;
                if !(h > 0.0) {
                    return Err(Error::Config(format!("h_list entries must be positive, got {h}")));
                }
                hs.push(h);
            }
            if hs.windows(2).any(|w| w[0] <= w[1]) {
                return Err(Error::Config("h_list must be strictly decreasing".into()));
            }
            hs
        }
    };
    let ref_steps: usize = if map.contains_key("ref_steps") {
        parse_num(&map, "ref_steps")?
    } else {
        0
    };

    Ok(RunSpec {
        model,
        scheme,
        n,
        t_final,
        n_steps,
        norm,
        out_dir: PathBuf::from(out_dir),
        enforce_stability,
        long,
        h_list,
        ref_steps,
    })
}

fn parse_num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    map[key]
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{}`", map[key])))
}

fn parse_bool(map: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match map.get(key).map(|s| s.as_str()) {
        None => Ok(false),
        Some("true") | Some("1") => Ok(true),
        Some("false") | Some("0") => Ok(false),
        Some(other) => Err(Error::Config(format!(
            "key `{key}`: expected true/false, got `{other}`"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

/// Whole-file atomic write: write to a sibling temp file, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Binary snapshot: 32-byte header (magic `SPLITSNAP1`, grid size, component
/// count, time), then the components concatenated row-major as little-endian
/// f64.
pub fn write_snapshot(path: &Path, state: &State, time: f64) -> Result<()> {
    let n = state.grid.n;
    let mut bytes = Vec::with_capacity(32 + 16 * n * n);
    bytes.extend_from_slice(SNAPSHOT_MAGIC);
    bytes.extend_from_slice(&[0u8; 2]);
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    bytes.extend_from_slice(&2u32.to_le_bytes());
    bytes.extend_from_slice(&time.to_le_bytes());
    bytes.extend_from_slice(&[0u8; 4]);
    debug_assert_eq!(bytes.len(), 32);
    for field in [&state.c0, &state.c1] {
        for v in &field.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    atomic_write(path, &bytes)
}

/// Reads back a snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path, grid: &Arc<GridSpec>) -> Result<(State, f64)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 32 || &bytes[..10] != SNAPSHOT_MAGIC {
        return Err(Error::Config(format!("{}: not a snapshot file", path.display())));
    }
    let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let ncomp = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as usize;
    let time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    if n != grid.n || ncomp != 2 || bytes.len() != 32 + 8 * ncomp * n * n {
        return Err(Error::Config(format!("{}: snapshot layout mismatch", path.display())));
    }
    let mut state = State::zeros(grid.clone());
    let read_field = |off: usize, data: &mut [f64]| {
        for (k, v) in data.iter_mut().enumerate() {
            *v = f64::from_le_bytes(bytes[off + 8 * k..off + 8 * k + 8].try_into().unwrap());
        }
    };
    read_field(32, &mut state.c0.data);
    read_field(32 + 8 * n * n, &mut state.c1.data);
    Ok((state, time))
}

/// Contour-friendly CSV export: one `x1,x2,c0,c1` row per grid point.
pub fn write_state_csv(path: &Path, state: &State) -> Result<()> {
    let grid = &state.grid;
    let n = grid.n;
    let mut out = String::from("x1,x2,c0,c1\n");
    for iy in 0..n {
        for ix in 0..n {
            let k = iy * n + ix;
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                grid.coord(ix),
                grid.coord(iy),
                state.c0.data[k],
                state.c1.data[k]
            )
            .unwrap();
        }
    }
    atomic_write(path, out.as_bytes())
}

// ---------------------------------------------------------------------------
// Simulation and convergence study
// ---------------------------------------------------------------------------

fn warn_stability(spec_scheme: Scheme, cfg: &StepperConfig, problem: &dyn SplitProblem) {
    let margin = cfg.stability_margin(problem);
    let limit = spec_scheme.stability_limit();
    if margin > limit && !cfg.enforce_stability {
        eprintln!(
            "warning: stability condition violated: h*max(M[A], M[F]) = {margin:.6} > {limit} \
             (model {}, M[F] = {})",
            problem.name(),
            problem.m_nonlinear()
        );
    }
}

#[derive(Debug)]
pub struct SimulationOutput {
    pub final_state: State,
    pub files: Vec<PathBuf>,
}

/// Integrates the spec's model, writing initial and final snapshots plus a
/// contour CSV of the final state.
pub fn run_simulation(spec: &RunSpec) -> Result<SimulationOutput> {
    let (problem, u0) = spec.build_problem()?;
    let cfg = StepperConfig {
        scheme: spec.scheme,
        h: if spec.n_steps == 0 { 1.0 } else { spec.step_size() },
        n_steps: spec.n_steps,
        enforce_stability: spec.enforce_stability,
    };
    warn_stability(spec.scheme, &cfg, problem.as_ref());

    let (final_state, _) = integrate(problem.as_ref(), &cfg, &u0, &[])?;

    if spec.model == ModelKind::Caginalp {
        let drift = (final_state.c0.mean() - u0.c0.mean()).abs() / u0.c0.mean().abs().max(1e-300);
        eprintln!("mean(psi) relative drift: {drift:.3e}");
    }

    let tag = format!(
        "{}_{}_n{}",
        problem.name().replace('-', ""),
        scheme_name(spec.scheme),
        spec.n
    );
    let snap0 = spec.out_dir.join(format!("{tag}_t0.snap"));
    let snap1 = spec.out_dir.join(format!("{tag}_tfinal.snap"));
    let csv = spec.out_dir.join(format!("{tag}_tfinal.csv"));
    write_snapshot(&snap0, &u0, 0.0)?;
    write_snapshot(&snap1, &final_state, spec.t_final)?;
    write_state_csv(&csv, &final_state)?;

    Ok(SimulationOutput {
        final_state,
        files: vec![snap0, snap1, csv],
    })
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::PeacemanRachford => "pr",
        Scheme::Lie => "lie",
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// `(h, n_steps, error)` per study run, h strictly decreasing.
    pub entries: Vec<(f64, usize, f64)>,
    pub orders: Vec<f64>,
    pub reference: String,
    pub norm_name: String,
    pub model: String,
    pub scheme: String,
    pub wall_times: Vec<f64>,
}

/// Runs a temporal convergence study: a reference solution with `ref_steps`
/// steps of the same scheme, then one integration per entry of `h_list`,
/// errors measured at `t_final` in the model norm. With `long` set the
/// reference additionally uses a grid refined by a factor of two, matching
/// the published protocol.
pub fn run_convergence_study(spec: &RunSpec) -> Result<(ConvergenceReport, Vec<PathBuf>)> {
    if spec.h_list.len() < 2 {
        return Err(Error::Config("h_list needs at least two step sizes".into()));
    }
    let finest_steps = (spec.t_final / spec.h_list.last().unwrap()).round() as usize;
    for &h in &spec.h_list {
        let steps = (spec.t_final / h).round() as usize;
        if spec.ref_steps <= steps {
            return Err(Error::Config(format!(
                "ref_steps = {} must exceed every study step count (found {steps})",
                spec.ref_steps
            )));
        }
    }
    if spec.ref_steps < 8 * finest_steps {
        return Err(Error::Config(format!(
            "ref_steps = {} must be at least 8x the finest study step count {finest_steps}",
            spec.ref_steps
        )));
    }

    let (problem, u0) = spec.build_problem()?;
    let kind = spec.norm_kind(problem.as_ref());

    // Reference: same scheme, finest step. Temporal refinement only by
    // default; the finer spatial grid sits behind `long`.
    let reference = if spec.long {
        let fine_grid = make_grid(2 * spec.n, std::f64::consts::PI)?;
        let (fine_problem, fine_u0) = build_problem_on(spec.model, fine_grid)?;
        let cfg = StepperConfig {
            scheme: spec.scheme,
            h: spec.t_final / spec.ref_steps as f64,
            n_steps: spec.ref_steps,
            enforce_stability: spec.enforce_stability,
        };
        warn_stability(spec.scheme, &cfg, fine_problem.as_ref());
        let (fine, _) = integrate(fine_problem.as_ref(), &cfg, &fine_u0, &[])?;
        restrict_to_coarse(&fine, problem.grid())
    } else {
        let cfg = StepperConfig {
            scheme: spec.scheme,
            h: spec.t_final / spec.ref_steps as f64,
            n_steps: spec.ref_steps,
            enforce_stability: spec.enforce_stability,
        };
        warn_stability(spec.scheme, &cfg, problem.as_ref());
        integrate(problem.as_ref(), &cfg, &u0, &[])?.0
    };

    let mut entries = Vec::new();
    let mut wall_times = Vec::new();
    for &h in &spec.h_list {
        let n_steps = (spec.t_final / h).round() as usize;
        let cfg = StepperConfig {
            scheme: spec.scheme,
            h: spec.t_final / n_steps as f64,
            n_steps,
            enforce_stability: spec.enforce_stability,
        };
        warn_stability(spec.scheme, &cfg, problem.as_ref());
        let start = Instant::now();
        let (u, _) = integrate(problem.as_ref(), &cfg, &u0, &[])?;
        wall_times.push(start.elapsed().as_secs_f64());
        let err = norms::error_norm(kind, &u, &reference)?;
        if !(err > 0.0) {
            return Err(Error::Degenerate(format!(
                "zero error at h = {h}; study cannot resolve an order"
            )));
        }
        entries.push((cfg.h, n_steps, err));
    }

    let hs: Vec<f64> = entries.iter().map(|e| e.0).collect();
    let errs: Vec<f64> = entries.iter().map(|e| e.2).collect();
    let orders = observed_orders(&hs, &errs)?;

    let report = ConvergenceReport {
        entries,
        orders,
        reference: format!(
            "same scheme, {} steps{}",
            spec.ref_steps,
            if spec.long { ", grid refined 2x" } else { "" }
        ),
        norm_name: norm_label(kind),
        model: problem.name().to_string(),
        scheme: scheme_name(spec.scheme).to_string(),
        wall_times,
    };

    let tag = format!(
        "{}_{}_n{}_converge",
        report.model.replace('-', ""),
        report.scheme,
        spec.n
    );
    let csv_path = spec.out_dir.join(format!("{tag}.csv"));
    let svg_path = spec.out_dir.join(format!("{tag}.svg"));
    atomic_write(&csv_path, report.to_csv().as_bytes())?;
    emit_loglog_svg(&report, &svg_path)?;
    Ok((report, vec![csv_path, svg_path]))
}

fn norm_label(kind: NormKind) -> String {
    match kind {
        NormKind::L2 => "L2".into(),
        NormKind::WeightedCaginalp { ell } => format!("weighted(l={ell})"),
        NormKind::GraphGrayScott { .. } => "graph".into(),
    }
}

/// Pointwise restriction of a state on a grid refined by 2x onto the coarse
/// grid; the coarse points are a subset of the fine ones.
fn restrict_to_coarse(fine: &State, coarse: &Arc<GridSpec>) -> State {
    let nf = fine.grid.n;
    let nc = coarse.n;
    assert_eq!(nf, 2 * nc);
    let mut out = State::zeros(coarse.clone());
    for iy in 0..nc {
        for ix in 0..nc {
            out.c0.data[iy * nc + ix] = fine.c0.data[2 * iy * nf + 2 * ix];
            out.c1.data[iy * nc + ix] = fine.c1.data[2 * iy * nf + 2 * ix];
        }
    }
    out
}

impl ConvergenceReport {
    /// CSV schema: `h,n_steps,error,observed_order`, order empty on the first
    /// row. Deterministic formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,n_steps,error,observed_order\n");
        for (i, (h, n_steps, err)) in self.entries.iter().enumerate() {
            let order = if i == 0 {
                String::new()
            } else {
                format!("{:.6}", self.orders[i - 1])
            };
            writeln!(out, "{h:.17e},{n_steps},{err:.17e},{order}").unwrap();
        }
        out
    }
}

/// Standalone log-log SVG: error against `1/n_steps` with markers, a dashed
/// guide line of the scheme's theoretical slope, and a legend.
pub fn emit_loglog_svg(report: &ConvergenceReport, path: &Path) -> Result<()> {
    if report.entries.is_empty() {
        return Err(Error::Argument("refusing to plot an empty report".into()));
    }
    let (width, height) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);

    let xs: Vec<f64> = report
        .entries
        .iter()
        .map(|(_, n, _)| (1.0 / *n as f64).log10())
        .collect();
    let ys: Vec<f64> = report.entries.iter().map(|(_, _, e)| e.log10()).collect();
    let (xmin, xmax) = bounds(&xs);
    let guide_slope = if report.scheme == "lie" { 1.0 } else { 2.0 };
    // guide line anchored at the last (finest) data point, shifted down a bit
    let gy: Vec<f64> = xs
        .iter()
        .map(|x| ys[xs.len() - 1] - 0.3 + guide_slope * (x - xs[xs.len() - 1]))
        .collect();
    let (ymin, ymax) = bounds(&ys.iter().chain(&gy).copied().collect::<Vec<_>>());

    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin).max(1e-12) * (width - ml - mr);
    let sy = |y: f64| height - mb - (y - ymin) / (ymax - ymin).max(1e-12) * (height - mt - mb);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    // axes
    writeln!(
        svg,
        r#"<line x1="{ml}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{ml}" y1="{mt}" x2="{ml}" y2="{y0}" stroke="black"/>"#,
        y0 = height - mb,
        x1 = width - mr
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="14" text-anchor="middle">1/n (log)</text>"#,
        x = width / 2.0,
        y = height - 12.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{y}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {y})">error (log)</text>"#,
        y = height / 2.0
    )
    .unwrap();

    // data polyline with markers
    let pts: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y)))
        .collect();
    writeln!(
        svg,
        r#"<polyline class="data" fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        pts.join(" ")
    )
    .unwrap();
    for (x, y) in xs.iter().zip(&ys) {
        writeln!(
            svg,
            r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="steelblue"/>"#,
            sx(*x),
            sy(*y)
        )
        .unwrap();
    }
    // guide line
    let gpts: Vec<String> = xs
        .iter()
        .zip(&gy)
        .map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y)))
        .collect();
    writeln!(
        svg,
        r#"<polyline class="guide" fill="none" stroke="gray" stroke-width="1.5" stroke-dasharray="6,4" points="{}"/>"#,
        gpts.join(" ")
    )
    .unwrap();
    // legend
    writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="13">{model} / {scheme} / {norm} norm (guide slope {slope})</text>"#,
        x = ml + 10.0,
        y = mt + 4.0,
        model = report.model,
        scheme = report.scheme,
        norm = report.norm_name,
        slope = guide_slope
    )
    .unwrap();
    writeln!(svg, "</svg>").unwrap();
    atomic_write(path, svg.as_bytes())
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Strict 8-neighbor local maxima of a field above a threshold, with
/// periodic wrap-around. Used for the spot-replication check.
pub fn count_local_maxima(field: &Field, threshold: f64) -> usize {
    let n = field.n;
    let mut count = 0;
    for iy in 0..n {
        for ix in 0..n {
            let v = field.data[iy * n + ix];
            if v <= threshold {
                continue;
            }
            let mut is_max = true;
            'outer: for dy in [n - 1, 0, 1] {
                for dx in [n - 1, 0, 1] {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let jx = (ix + dx) % n;
                    let jy = (iy + dy) % n;
                    if field.data[jy * n + jx] >= v {
                        is_max = false;
                        break 'outer;
                    }
                }
            }
            if is_max {
                count += 1;
            }
        }
    }
    count
}
