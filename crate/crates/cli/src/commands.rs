use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use wigner_path::validate::{run_suite, CheckOptions, CheckReport, Suite};
use wigner_path::{
    solve_saddle, wigner_montecarlo, wigner_number, wigner_poisson, wigner_quadrature, wigner_saddle, wigner_spectral,
    wigner_wkb, Branch, ComplexPoint, Execution, FamilyParams, MonteCarloSpec, Normalization, PartitionRoute,
    QuadratureSpec, Slices, WignerError,
};

use crate::args::{
    CheckArgs, Cli, Command, Figure2Args, Format, McDiagArgs, MethodArg, NormArg, ProfileArgs, SaddleTableArgs, State,
    SuiteArg,
};
use crate::output::{config_hash, fmt_num, pretty, resolve_path, write_file, write_sidecar, Cell, Table};
use crate::settings::{load_config_file, output_dir, CliError, CliResult, Resolver, SliceList, SlicesArg};

pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => load_config_file(p)?,
        None => BTreeMap::new(),
    };
    let res = Resolver::new(file);
    let out_dir = output_dir(cli.out_dir, &res);
    match cli.command {
        Command::Profile(a) => profile(a, res, &out_dir),
        Command::Figure2(a) => figure2(a, res, &out_dir),
        Command::Check(a) => check(a, res, &out_dir),
        Command::SaddleTable(a) => saddle_table(a, res, &out_dir),
        Command::McDiag(a) => mc_diag(a, res, &out_dir),
    }
}

const PROFILE_KEYS: &[&str] = &[
    "out-dir", "state", "n", "N", "L", "method", "rmin", "rmax", "points", "M", "samples", "seed", "workers",
    "saddle-L", "normalization", "interpolate", "output", "format",
];

/// One way of evaluating W along the radial grid.
enum Evaluator {
    Poisson(f64),
    Number(usize),
    Spectral(FamilyParams),
    Quadrature(FamilyParams, QuadratureSpec),
    MonteCarlo(FamilyParams, MonteCarloSpec),
    Saddle { n: usize, slices: usize, normalization: Normalization },
    Wkb(usize),
}

struct Point {
    w: Option<f64>,
    stderr: Option<f64>,
    region: Option<String>,
}

impl Evaluator {
    fn tag(&self) -> &'static str {
        match self {
            Evaluator::Poisson(_) => "exact-poisson",
            Evaluator::Number(_) => "exact-number",
            Evaluator::Spectral(_) => "spectral",
            Evaluator::Quadrature(..) => "quadrature",
            Evaluator::MonteCarlo(..) => "monte-carlo",
            Evaluator::Saddle { .. } => "saddle",
            Evaluator::Wkb(_) => "wkb",
        }
    }

    fn has_region_column(&self) -> bool {
        matches!(self, Evaluator::Saddle { .. } | Evaluator::Wkb(_))
    }

    fn radius(&self) -> f64 {
        match self {
            Evaluator::Poisson(n) => n.sqrt(),
            Evaluator::Number(n) | Evaluator::Wkb(n) | Evaluator::Saddle { n, .. } => (*n as f64 + 0.5).sqrt(),
            Evaluator::Spectral(p) | Evaluator::Quadrature(p, _) | Evaluator::MonteCarlo(p, _) => p.radius(),
        }
    }

    fn eval(&self, r: f64) -> CliResult<Point> {
        let alpha = ComplexPoint::real(r);
        let exact = |w| Point { w: Some(w), stderr: None, region: None };
        let asymptotic = |v: Result<f64, WignerError>| match v {
            Ok(w) => Ok(exact(w)),
            Err(e) => match region_name(&e, r > self.radius()) {
                Some(region) => Ok(Point { w: None, stderr: None, region: Some(region.to_string()) }),
                None => Err(CliError::from(e)),
            },
        };
        match self {
            Evaluator::Poisson(n) => Ok(exact(wigner_poisson(alpha, *n))),
            Evaluator::Number(n) => Ok(exact(wigner_number(alpha, *n))),
            Evaluator::Spectral(p) => Ok(exact(wigner_spectral(alpha, p))),
            Evaluator::Quadrature(p, spec) => Ok(exact(wigner_quadrature(alpha, p, spec)?.value)),
            Evaluator::MonteCarlo(p, spec) => {
                let mc = wigner_montecarlo(alpha, p, spec)?;
                Ok(Point { w: Some(mc.estimate), stderr: Some(mc.standard_error), region: None })
            }
            Evaluator::Saddle { n, slices, normalization } => {
                asymptotic(wigner_saddle(alpha, *n, *slices, *normalization).map(|s| s.value))
            }
            Evaluator::Wkb(n) => asymptotic(wigner_wkb(alpha, *n).map(|s| s.value)),
        }
    }
}

fn region_name(e: &WignerError, outside: bool) -> Option<&'static str> {
    match e {
        WignerError::OriginRegion { .. } => Some("origin"),
        WignerError::TurningRegion { .. } => Some("turning"),
        WignerError::Domain(_) if outside => Some("exterior"),
        _ => None,
    }
}

fn number_state_hint(occupation: f64) -> String {
    let n = occupation - 0.5;
    if n >= 0.0 && n.fract() == 0.0 {
        format!("use --state number --n {n} --method saddle")
    } else {
        "use --state number --n <n>; the family reaches |n> only at N = n + 1/2".to_string()
    }
}

fn build_evaluator(state: State, method: MethodArg, a: &ProfileArgs, res: &mut Resolver) -> CliResult<Evaluator> {
    let family_route = |res: &mut Resolver, params: FamilyParams, method: MethodArg| -> CliResult<Evaluator> {
        Ok(match method {
            MethodArg::Spectral => Evaluator::Spectral(params),
            MethodArg::Quadrature => {
                let m = res.value("M", a.quad_points, 128usize)?;
                let spec = QuadratureSpec { execution: Execution::Sequential, ..QuadratureSpec::with_points(m) };
                Evaluator::Quadrature(params, spec)
            }
            MethodArg::Mc => {
                let samples = res.value("samples", a.samples, 1_000_000u64)?;
                let seed = res.value("seed", a.seed, 42u64)?;
                let spec = MonteCarloSpec { workers: 1, ..MonteCarloSpec::new(samples, seed) };
                Evaluator::MonteCarlo(params, spec)
            }
            _ => unreachable!("filtered by caller"),
        })
    };
    match state {
        State::Number => {
            let n = res.required("n", a.n, "for --state number")?;
            match method {
                MethodArg::Exact => Ok(Evaluator::Number(n)),
                MethodArg::Saddle => {
                    let slices = res.value("saddle-L", a.saddle_slices, 512usize)?;
                    let norm = res.choice("normalization", a.normalization, NormArg::WkbMatched)?;
                    let normalization = match norm {
                        NormArg::Raw => Normalization::Raw,
                        NormArg::WkbMatched => Normalization::WkbMatched,
                    };
                    Ok(Evaluator::Saddle { n, slices, normalization })
                }
                MethodArg::Wkb => Ok(Evaluator::Wkb(n)),
                other => Err(CliError::Config(format!(
                    "--method {} is not available for --state number; use exact, saddle or wkb, or --state family --N {} --L <L> for the path-integral methods",
                    method_name(other),
                    n as f64 + 0.5
                ))),
            }
        }
        State::Poisson => {
            let n: f64 = res.required("N", a.occupation, "for --state poisson")?;
            match method {
                MethodArg::Exact => {
                    if n.is_nan() || n <= 0.0 {
                        return Err(CliError::Config(format!("--N must be positive, got {n}")));
                    }
                    Ok(Evaluator::Poisson(n))
                }
                MethodArg::Saddle | MethodArg::Wkb => Err(CliError::Config(format!(
                    "--method {} describes number states; {}",
                    method_name(method),
                    number_state_hint(n)
                ))),
                m => family_route(res, FamilyParams::new(1, n)?, m),
            }
        }
        State::Family => {
            let n: f64 = res.required("N", a.occupation, "for --state family")?;
            let l: usize = res.required("L", a.slices, "for --state family")?;
            match method {
                MethodArg::Exact if l == 1 => Ok(Evaluator::Poisson(n)),
                MethodArg::Exact => Err(CliError::Config(format!(
                    "the family at L={l} has no closed form; --method spectral gives the exact number-basis sum"
                ))),
                MethodArg::Saddle | MethodArg::Wkb => Err(CliError::Config(format!(
                    "--method {} applies to number states, not the family; {}",
                    method_name(method),
                    number_state_hint(n)
                ))),
                m => family_route(res, FamilyParams::new(l, n)?, m),
            }
        }
    }
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Exact => "exact",
        MethodArg::Spectral => "spectral",
        MethodArg::Quadrature => "quadrature",
        MethodArg::Mc => "mc",
        MethodArg::Saddle => "saddle",
        MethodArg::Wkb => "wkb",
    }
}

fn radial_grid(rmin: f64, rmax: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    if !(rmin >= 0.0 && rmin.is_finite() && rmax.is_finite() && (rmax > rmin || points == 1 && rmax >= rmin)) {
        return Err(CliError::Config(format!("need 0 <= rmin < rmax, got rmin={rmin}, rmax={rmax}")));
    }
    if points == 1 {
        return Ok(vec![rmin]);
    }
    Ok((0..points).map(|k| rmin + (rmax - rmin) * k as f64 / (points - 1) as f64).collect())
}

/// Linear fill across region gaps, labelled in the region column.
fn interpolate_gaps(grid: &[f64], points: &mut [Point]) {
    let valid: Vec<usize> = (0..points.len()).filter(|&i| points[i].w.is_some()).collect();
    for i in 0..points.len() {
        if points[i].w.is_some() {
            continue;
        }
        let lo = valid.iter().rev().find(|&&j| j < i).copied();
        let hi = valid.iter().find(|&&j| j > i).copied();
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let t = (grid[i] - grid[lo]) / (grid[hi] - grid[lo]);
            let (a, b) = (points[lo].w.unwrap(), points[hi].w.unwrap());
            points[i].w = Some(a + t * (b - a));
            let region = points[i].region.take().unwrap_or_default();
            points[i].region = Some(format!("{region}-interpolated"));
        }
    }
}

fn profile_table(eval: &Evaluator, grid: &[f64], workers: usize, interpolate: bool) -> CliResult<Table> {
    let mut points = Execution::from_workers(workers)
        .map_collect(grid.len(), |k| eval.eval(grid[k]))
        .into_iter()
        .collect::<CliResult<Vec<Point>>>()?;
    if interpolate {
        interpolate_gaps(grid, &mut points);
    }
    let region = eval.has_region_column();
    let mut table =
        if region { Table::new(&["r", "W", "method", "stderr", "region"]) } else { Table::new(&["r", "W", "method", "stderr"]) };
    for (r, p) in grid.iter().zip(points) {
        let mut row = vec![
            Cell::Num(*r),
            p.w.map_or(Cell::Empty, Cell::Num),
            Cell::Text(eval.tag().into()),
            p.stderr.map_or(Cell::Empty, Cell::Num),
        ];
        if region {
            row.push(p.region.map_or(Cell::Empty, Cell::Text));
        }
        table.push(row);
    }
    Ok(table)
}

fn emit(
    out_dir: &Path,
    file: &str,
    contents: &str,
    command: &str,
    positional: &[&str],
    config: &BTreeMap<String, String>,
    start: Instant,
) -> CliResult<std::path::PathBuf> {
    let path = resolve_path(out_dir, Path::new(file));
    write_file(&path, contents)?;
    write_sidecar(&path, command, positional, config, start.elapsed())?;
    Ok(path)
}

fn output_name(res: &mut Resolver, flag: Option<&Path>, stem: &str, format: Format) -> CliResult<String> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    res.value("output", flag.map(|p| p.display().to_string()), format!("{stem}.{ext}"))
}

fn profile(a: ProfileArgs, mut res: Resolver, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let state = res.choice("state", a.state, State::Number)?;
    let default_method = if state == State::Family { MethodArg::Spectral } else { MethodArg::Exact };
    let method = res.choice("method", a.method, default_method)?;
    let eval = build_evaluator(state, method, &a, &mut res)?;
    let rmin = res.value("rmin", a.rmin, 0.0)?;
    let rmax = res.value("rmax", a.rmax, eval.radius() + 2.0)?;
    let points = res.value("points", a.points, 200usize)?;
    let workers = res.value("workers", a.workers, 0usize)?;
    let interpolate = res.switch("interpolate", a.interpolate)?;
    let format = res.choice("format", a.out.format, Format::Csv)?;
    let output = output_name(&mut res, a.out.output.as_deref(), "profile", format)?;
    let config = res.finish(PROFILE_KEYS)?;
    let grid = radial_grid(rmin, rmax, points)?;
    let table = profile_table(&eval, &grid, workers, interpolate)?;
    let path = emit(out_dir, &output, &table.render(format), "profile", &[], &config, start)?;
    eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(())
}

const FIGURE2_KEYS: &[&str] = &["out-dir", "n", "points", "rmax", "saddle-L", "interpolate"];

fn figure2(a: Figure2Args, mut res: Resolver, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let ns = res.value("n", a.n.map(|s| s.parse::<SliceList>()).transpose().map_err(CliError::Config)?, SliceList(vec![1, 10]))?;
    let points = res.value("points", a.points, 400usize)?;
    let rmax = res.optional("rmax", a.rmax)?;
    let slices = res.value("saddle-L", a.saddle_slices, 512usize)?;
    let interpolate = res.switch("interpolate", a.interpolate)?;
    let config = res.finish(FIGURE2_KEYS)?;
    let hash = config_hash(&config);
    for &n in &ns.0 {
        let occupation = n as f64 + 0.5;
        let grid = radial_grid(0.0, rmax.unwrap_or(occupation.sqrt() + 2.0), points)?;
        let curves = [
            ("exact", Evaluator::Number(n)),
            ("saddle", Evaluator::Saddle { n, slices, normalization: Normalization::WkbMatched }),
            ("poisson", Evaluator::Poisson(occupation)),
        ];
        let mut files = Vec::new();
        for (name, eval) in &curves {
            let table = profile_table(eval, &grid, 0, interpolate)?;
            let file = format!("figure2_n{n}_{name}.csv");
            emit(out_dir, &file, &table.to_csv(), "figure2", &[], &config, start)?;
            files.push(file);
        }
        let manifest = json!({
            "n": n.to_string(),
            "occupation": fmt_num(occupation),
            "files": files,
            "config_hash": hash,
            "config": config,
        });
        let file = format!("figure2_n{n}_manifest.json");
        let path = emit(out_dir, &file, &pretty(&manifest), "figure2", &[], &config, start)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

const CHECK_KEYS: &[&str] = &["out-dir", "L", "samples", "seed", "workers", "M", "output"];

fn report_json(r: &CheckReport) -> Value {
    let items: Vec<Value> = r
        .items
        .iter()
        .map(|i| {
            json!({
                "name": i.name,
                "passed": i.passed,
                "value": fmt_num(i.value),
                "tolerance": fmt_num(i.tolerance),
                "detail": i.detail,
            })
        })
        .collect();
    json!({ "suite": r.suite.tag(), "passed": r.passed, "items": items })
}

fn check(a: CheckArgs, mut res: Resolver, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let slices = res.value("L", a.slices.map(|s| s.parse::<SliceList>()).transpose().map_err(CliError::Config)?, SliceList((1..=5).collect()))?;
    let opts = CheckOptions {
        points_per_dim: res.value("M", a.quad_points, 128usize)?,
        samples: res.value("samples", a.samples, 1_000_000u64)?,
        seed: res.value("seed", a.seed, 42u64)?,
        workers: res.value("workers", a.workers, 0usize)?,
        sign_slices: slices.0,
    };
    let (tag, suites): (&str, Vec<Suite>) = match a.suite {
        SuiteArg::Oracle => ("oracle", vec![Suite::Oracle]),
        SuiteArg::Normalization => ("normalization", vec![Suite::Normalization]),
        SuiteArg::Determinant => ("determinant", vec![Suite::Determinant]),
        SuiteArg::Sign => ("sign", vec![Suite::Sign]),
        SuiteArg::All => ("all", Suite::ALL.to_vec()),
    };
    let output = res.value("output", a.output.map(|p| p.display().to_string()), format!("check_{tag}.json"))?;
    let config = res.finish(CHECK_KEYS)?;
    let reports = suites.iter().map(|&s| run_suite(s, &opts)).collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({
        "suite": tag,
        "passed": passed,
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    let text = pretty(&doc);
    print!("{text}");
    emit(out_dir, &output, &text, "check", &[tag], &config, start)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed(tag.to_string()))
    }
}

const SADDLE_KEYS: &[&str] = &["out-dir", "n", "r", "L", "smin", "smax", "points", "output", "format", "workers"];

fn complex_cells(z: Option<(f64, f64)>) -> [Cell; 2] {
    match z {
        Some((re, im)) => [Cell::Num(re), Cell::Num(im)],
        None => [Cell::Empty, Cell::Empty],
    }
}

fn saddle_table(a: SaddleTableArgs, mut res: Resolver, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let r = match res.optional("r", a.r)? {
        Some(r) => r,
        None => (res.value("n", a.n, 10usize)? as f64 + 0.5).sqrt(),
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Config(format!("--r must be positive, got {r}")));
    }
    let slices = res.value("L", a.slices.map(|s| s.parse::<SlicesArg>()).transpose().map_err(CliError::Config)?, SlicesArg(Slices::Finite(512)))?;
    if let Slices::Finite(l) = slices.0 {
        if l < 2 {
            return Err(CliError::Config(format!("--L must be at least 2 or 'inf', got {l}")));
        }
    }
    let smin = res.value("smin", a.smin, 0.0)?;
    let smax = res.value("smax", a.smax, 2.0 * r)?;
    let points = res.value("points", a.points, 101usize)?;
    let format = res.choice("format", a.out.format, Format::Csv)?;
    let output = output_name(&mut res, a.out.output.as_deref(), "saddle_table", format)?;
    let config = res.finish(SADDLE_KEYS)?;
    let grid = radial_grid(smin, smax, points)?;
    let mut table = Table::new(&[
        "s", "u", "branch", "theta_re", "theta_im", "action_re", "action_im", "log_det_re", "log_det_im", "t_re", "t_im",
        "residual", "iterations", "note",
    ]);
    for &s in &grid {
        let branch = Branch::classify(s, r);
        let mut row = vec![Cell::Num(s), Cell::Num(s / r), Cell::Text(branch.tag().into())];
        match solve_saddle(s, r, slices.0) {
            Ok(sol) => {
                row.extend(complex_cells(Some((sol.theta.re, sol.theta.im))));
                row.extend(complex_cells(Some((sol.stationary_action.re, sol.stationary_action.im))));
                row.extend(complex_cells(sol.log_det_hessian.map(|z| (z.re, z.im))));
                row.extend(complex_cells(sol.t.map(|z| (z.re, z.im))));
                row.push(Cell::Num(sol.residual));
                row.push(Cell::Int(sol.iterations as u64));
                row.push(Cell::Empty);
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Cell::Empty, 10));
                row.push(Cell::Text(e.to_string()));
            }
        }
        table.push(row);
    }
    let path = emit(out_dir, &output, &table.render(format), "saddle-table", &[], &config, start)?;
    eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(())
}

const MC_KEYS: &[&str] = &["out-dir", "N", "L", "alpha", "samples", "seed", "workers", "batch-size", "output", "format"];

fn mc_diag(a: McDiagArgs, mut res: Resolver, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let occupation = res.value("N", a.occupation, 1.5)?;
    let slices = res.value("L", a.slices.map(|s| s.parse::<SliceList>()).transpose().map_err(CliError::Config)?, SliceList((1..=6).collect()))?;
    let alpha = ComplexPoint::real(res.value("alpha", a.alpha, 0.8)?);
    let samples = res.value("samples", a.samples, 1_000_000u64)?;
    let seed = res.value("seed", a.seed, 42u64)?;
    let workers = res.value("workers", a.workers, 0usize)?;
    let batch_size = res.value("batch-size", a.batch_size, 10_000u64)?;
    let format = res.choice("format", a.out.format, Format::Csv)?;
    let output = output_name(&mut res, a.out.output.as_deref(), "mc_diag", format)?;
    let config = res.finish(MC_KEYS)?;
    let mut table = Table::new(&[
        "L", "estimate", "stderr", "mean_phase", "mean_phase_stderr", "ess", "angular_estimate", "angular_stderr",
        "angular_Z", "exact_Z", "spectral_W", "samples",
    ]);
    for &l in &slices.0 {
        let params = FamilyParams::new(l, occupation)?;
        let spec = MonteCarloSpec { workers, batch_size, partition: PartitionRoute::Exact, ..MonteCarloSpec::new(samples, seed) };
        let mc = wigner_montecarlo(alpha, &params, &spec)?;
        table.push(vec![
            Cell::Int(l as u64),
            Cell::Num(mc.estimate),
            Cell::Num(mc.standard_error),
            Cell::Num(mc.mean_phase_magnitude),
            Cell::Num(mc.mean_phase_stderr),
            Cell::Num(mc.effective_sample_size),
            Cell::Num(mc.angular_estimate),
            Cell::Num(mc.angular_standard_error),
            Cell::Num(mc.angular_partition),
            Cell::Num(params.log_partition().exp()),
            Cell::Num(wigner_spectral(alpha, &params)),
            Cell::Int(mc.samples),
        ]);
    }
    let path = emit(out_dir, &output, &table.render(format), "mc-diag", &[], &config, start)?;
    eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(())
}
