use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use isorigid::degenerate::solve_all_patterns;
use isorigid::isopar::{cot_sum_identity, sin_product_identity, sweep, GridPoint, SweepSummary};
use isorigid::pointwise::{assertion_scan, compare_gradients, l_value, AssertionReport};
use isorigid::poly::LocalExtrema;
use isorigid::spectrum::{classify_point, DoubledPair, Eigenvalue};
use isorigid::symfunc::power_sums_of;
use isorigid::{
    Classification, ConstraintModel, Endpoint, IsoparametricFamily, Poly, Sampler,
};
use serde::Serialize;

use crate::plot::{Level, Plot};
use crate::report::{emit, format_float, json_bytes, Report, Table};
use crate::{
    CliError, Command, Common, EndArg, Format, IdentityArgs, IsoparArgs, ModelArgs, PlotArgs,
    SpectrumArgs, VerifyArgs, VerifyMode,
};

/// Tolerance of the gradient check in `verify --mode gradients`.
pub const GRADIENT_TOL: f64 = 1e-9;
/// Relative tolerance between extrapolated and closed-form boundary limits.
pub const LIMIT_REL_TOL: f64 = 1e-6;
const SPECTRUM_RANGE: (f64, f64) = (-2.0, 2.0);
const SPECTRUM_MIN_GAP: f64 = 1e-3;

struct Output<R: Serialize> {
    results: R,
    table: Table,
    diagnostics: Vec<String>,
    passed: bool,
    svg: Option<(String, Option<PathBuf>)>,
}

impl<R: Serialize> Output<R> {
    fn new(results: R, table: Table) -> Self {
        Self {
            results,
            table,
            diagnostics: Vec::new(),
            passed: true,
            svg: None,
        }
    }
}

#[derive(Serialize)]
struct Inputs<'a, A: Serialize> {
    #[serde(flatten)]
    args: &'a A,
    tol: f64,
    seed: u64,
}

fn g(x: f64) -> String {
    format_float(x)
}

pub fn execute(common: &Common, command: &Command) -> Result<bool, CliError> {
    let start = Instant::now();
    let tol = common.tol;
    if !(tol > 0.0) {
        return Err(CliError::Invalid("--tol must be positive".into()));
    }
    match command {
        Command::Analyze(a) => finish(common, command, a, analyze(a, tol)?, start),
        Command::Spectrum(a) => finish(common, command, a, spectrum(a, tol)?, start),
        Command::Degenerate(a) => finish(common, command, a, degenerate(a, tol)?, start),
        Command::Verify(a) => match a.mode {
            VerifyMode::Lsign => finish(common, command, a, verify_lsign(a, common.seed)?, start),
            VerifyMode::Gradients => {
                finish(common, command, a, verify_gradients(a, common.seed, tol)?, start)
            }
            VerifyMode::Assertion => {
                finish(common, command, a, verify_assertion(a, tol)?, start)
            }
        },
        Command::Isopar(a) => finish(common, command, a, isopar(a)?, start),
        Command::Identities(a) => finish(common, command, a, identities(a)?, start),
        Command::Plot(a) => {
            let wants_svg = common.format.unwrap_or(Format::Svg) == Format::Svg;
            finish(common, command, a, plot(a, tol, wants_svg, common.out.as_ref())?, start)
        }
        Command::Job { .. } => Err(CliError::Invalid("nested job".into())),
    }
}

fn finish<A: Serialize, R: Serialize>(
    common: &Common,
    command: &Command,
    args: &A,
    output: Output<R>,
    start: Instant,
) -> Result<bool, CliError> {
    let default = if matches!(command, Command::Plot(_)) {
        Format::Svg
    } else {
        Format::Json
    };
    let out = common.out.as_deref();
    match common.format.unwrap_or(default) {
        Format::Json => {
            let report = Report {
                command: command.name().into(),
                inputs: Inputs {
                    args,
                    tol: common.tol,
                    seed: common.seed,
                },
                results: &output.results,
                diagnostics: output.diagnostics.clone(),
                version: env!("CARGO_PKG_VERSION").into(),
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            emit(out, &json_bytes(&report)?)?;
        }
        Format::Csv => emit(out, &output.table.to_bytes()?)?,
        Format::Svg => {
            let Some((svg, companion)) = &output.svg else {
                return Err(CliError::Invalid(format!(
                    "svg output is only available for plot, not {}",
                    command.name()
                )));
            };
            if let Some(path) = companion {
                emit(Some(path), &output.table.to_bytes()?)?;
            }
            emit(out, svg.as_bytes())?;
        }
    }
    for d in &output.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(output.passed)
}

fn model(m: &ModelArgs) -> Result<ConstraintModel, CliError> {
    Ok(ConstraintModel::build(m.n, &m.c)?)
}

#[derive(Serialize)]
struct BoundarySummary {
    f: f64,
    spectrum: Vec<Eigenvalue>,
    multiplicities: Vec<usize>,
    doubled: Vec<DoubledPair>,
    doubled_indices: Vec<usize>,
    pattern_check: &'static str,
}

#[derive(Serialize)]
struct Boundaries {
    lower: Option<BoundarySummary>,
    upper: Option<BoundarySummary>,
}

#[derive(Serialize)]
struct AnalyzeResults {
    n: usize,
    c: Vec<f64>,
    elementary: Vec<f64>,
    offset_c: f64,
    f0_coefficients: Vec<f64>,
    critical_points: LocalExtrema,
    a_prime: f64,
    b_prime: f64,
    a: f64,
    b: f64,
    boundary: Boundaries,
}

fn analyze(m: &ModelArgs, tol: f64) -> Result<Output<AnalyzeResults>, CliError> {
    let model = model(m)?;
    let extrema = model.extrema(tol)?;
    let iv = model.feasible_interval_with_tol(tol)?;
    let mut diagnostics = Vec::new();
    let mut table = Table::new(["endpoint", "f", "eigenvalue", "multiplicity"]);
    let mut summary = |end: Endpoint| -> Result<Option<BoundarySummary>, CliError> {
        let f = iv.endpoint(end);
        if !f.is_finite() {
            diagnostics.push(format!("{end:?} endpoint is {}", g(f)));
            return Ok(None);
        }
        let bp = model.boundary_pattern(end, tol)?;
        for e in bp.spectrum.entries() {
            table.push(vec![
                format!("{end:?}").to_lowercase(),
                g(bp.f),
                g(e.value),
                e.multiplicity.to_string(),
            ]);
        }
        Ok(Some(BoundarySummary {
            f: bp.f,
            spectrum: bp.spectrum.entries().to_vec(),
            multiplicities: bp.spectrum.multiplicities(),
            doubled_indices: bp.doubled_indices(),
            doubled: bp.doubled,
            pattern_check: "passed",
        }))
    };
    let boundary = Boundaries {
        lower: summary(Endpoint::Lower)?,
        upper: summary(Endpoint::Upper)?,
    };
    let results = AnalyzeResults {
        n: model.n(),
        c: model.constraints().values().to_vec(),
        elementary: model.elementary().values().to_vec(),
        offset_c: model.offset(),
        f0_coefficients: model.f0().coeffs().to_vec(),
        critical_points: extrema,
        a_prime: iv.a_prime,
        b_prime: iv.b_prime,
        a: iv.a,
        b: iv.b,
        boundary,
    };
    let mut out = Output::new(results, table);
    out.diagnostics = diagnostics;
    Ok(out)
}

#[derive(Serialize)]
struct SpectrumResults {
    f: f64,
    a: f64,
    b: f64,
    spectrum: Vec<Eigenvalue>,
    simple: bool,
    classification: Option<Classification>,
    power_sum_residuals: Vec<f64>,
}

fn spectrum(args: &SpectrumArgs, tol: f64) -> Result<Output<SpectrumResults>, CliError> {
    let model = model(&args.model)?;
    let iv = model.feasible_interval_with_tol(tol)?;
    let s = model.spectrum_at(args.f, tol)?;
    let classification = match args.eps {
        Some(eps) => Some(classify_point(&iv, args.f, eps)?),
        None => None,
    };
    let n = model.n();
    let p = power_sums_of(&s, n);
    let residuals = (1..=n)
        .map(|k| {
            let want = if k < n { model.constraints().get(k) } else { args.f };
            p.get(k) - want
        })
        .collect();
    let mut table = Table::new(["index", "eigenvalue", "multiplicity"]);
    for (i, e) in s.entries().iter().enumerate() {
        table.push(vec![i.to_string(), g(e.value), e.multiplicity.to_string()]);
    }
    Ok(Output::new(
        SpectrumResults {
            f: args.f,
            a: iv.a,
            b: iv.b,
            simple: s.is_simple(),
            spectrum: s.entries().to_vec(),
            classification,
            power_sum_residuals: residuals,
        },
        table,
    ))
}

#[derive(Serialize)]
struct PatternRow {
    pattern: Vec<usize>,
    solved: bool,
    f: Option<f64>,
    spectrum: Option<Vec<Eigenvalue>>,
    reason: String,
}

#[derive(Serialize)]
struct DegenerateResults {
    patterns: Vec<PatternRow>,
    solved: usize,
    rejected: usize,
}

fn degenerate(m: &ModelArgs, tol: f64) -> Result<Output<DegenerateResults>, CliError> {
    let model = model(m)?;
    let outcomes = solve_all_patterns(&model, tol)?;
    let mut table = Table::new(["pattern", "solved", "f", "eigenvalues", "reason"]);
    let rows: Vec<PatternRow> = outcomes
        .iter()
        .map(|(p, o)| {
            let sol = o.solution();
            let row = PatternRow {
                pattern: p.parts().to_vec(),
                solved: sol.is_some(),
                f: sol.map(|s| s.f_value),
                spectrum: sol.map(|s| s.spectrum.entries().to_vec()),
                reason: o.reason(),
            };
            table.push(vec![
                p.to_string(),
                row.solved.to_string(),
                row.f.map(g).unwrap_or_default(),
                sol.map(|s| {
                    s.spectrum
                        .eigenvalues()
                        .into_iter()
                        .map(g)
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default(),
                row.reason.clone(),
            ]);
            row
        })
        .collect();
    let solved = rows.iter().filter(|r| r.solved).count();
    Ok(Output::new(
        DegenerateResults {
            rejected: rows.len() - solved,
            solved,
            patterns: rows,
        },
        table,
    ))
}

#[derive(Serialize)]
struct Sampling {
    generator: &'static str,
    eigenvalue_range: (f64, f64),
    min_gap: f64,
}

const SAMPLING: Sampling = Sampling {
    generator: "xoshiro256** seeded by SplitMix64; f64 from the top 53 bits",
    eigenvalue_range: SPECTRUM_RANGE,
    min_gap: SPECTRUM_MIN_GAP,
};

#[derive(Serialize)]
struct LsignResults {
    n: usize,
    samples: usize,
    sampling: Sampling,
    values_checked: usize,
    failures: usize,
    max_l: f64,
    max_l_spectrum: Vec<f64>,
}

fn verify_lsign(a: &VerifyArgs, seed: u64) -> Result<Output<LsignResults>, CliError> {
    let samples = a.samples.unwrap_or(1000);
    let mut rng = Sampler::new(seed);
    let mut table = Table::new(["sample", "r", "L"]);
    let (mut checked, mut failures) = (0, 0);
    let mut max_l = f64::NEG_INFINITY;
    let mut max_l_spectrum = Vec::new();
    for k in 0..samples {
        let v = rng.distinct_spectrum(a.n, SPECTRUM_RANGE.0, SPECTRUM_RANGE.1, SPECTRUM_MIN_GAP);
        for r in 0..a.n {
            let l = l_value(&v, r)?;
            checked += 1;
            if !(l < 0.0) {
                failures += 1;
            }
            if l > max_l {
                max_l = l;
                max_l_spectrum = v.clone();
            }
            table.push(vec![k.to_string(), r.to_string(), g(l)]);
        }
    }
    let mut out = Output::new(
        LsignResults {
            n: a.n,
            samples,
            sampling: SAMPLING,
            values_checked: checked,
            failures,
            max_l,
            max_l_spectrum,
        },
        table,
    );
    out.passed = failures == 0;
    Ok(out)
}

#[derive(Serialize)]
struct GradientResults {
    n: usize,
    samples: usize,
    sampling: Sampling,
    tolerance: f64,
    failures: usize,
    max_relative_discrepancy: f64,
    max_residual_closed: f64,
    max_residual_solve: f64,
}

fn verify_gradients(
    a: &VerifyArgs,
    seed: u64,
    tol: f64,
) -> Result<Output<GradientResults>, CliError> {
    if a.n == 0 {
        return Err(CliError::Invalid("n must be positive".into()));
    }
    let samples = a.samples.unwrap_or(1000);
    let mut rng = Sampler::new(seed);
    let mut table = Table::new([
        "sample",
        "relative_discrepancy",
        "residual_closed",
        "residual_solve",
    ]);
    let mut failures = 0;
    let (mut disc, mut rc, mut rs) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..samples {
        let v = rng.distinct_spectrum(a.n, SPECTRUM_RANGE.0, SPECTRUM_RANGE.1, SPECTRUM_MIN_GAP);
        let grad: Vec<f64> = (0..a.n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let c = compare_gradients(&v, &grad, tol)?;
        if !(c.max_relative_discrepancy < GRADIENT_TOL
            && c.max_residual_closed < GRADIENT_TOL
            && c.max_residual_solve < GRADIENT_TOL)
        {
            failures += 1;
        }
        disc = disc.max(c.max_relative_discrepancy);
        rc = rc.max(c.max_residual_closed);
        rs = rs.max(c.max_residual_solve);
        table.push(vec![
            k.to_string(),
            g(c.max_relative_discrepancy),
            g(c.max_residual_closed),
            g(c.max_residual_solve),
        ]);
    }
    let mut out = Output::new(
        GradientResults {
            n: a.n,
            samples,
            sampling: SAMPLING,
            tolerance: GRADIENT_TOL,
            failures,
            max_relative_discrepancy: disc,
            max_residual_closed: rc,
            max_residual_solve: rs,
        },
        table,
    );
    out.passed = failures == 0;
    Ok(out)
}

#[derive(Serialize)]
struct EndResult {
    passed: bool,
    report: AssertionReport,
}

#[derive(Serialize)]
struct AssertionResults {
    n: usize,
    limit_relative_tolerance: f64,
    failures: usize,
    ends: Vec<EndResult>,
}

fn verify_assertion(a: &VerifyArgs, tol: f64) -> Result<Output<AssertionResults>, CliError> {
    let model = ConstraintModel::build(a.n, &a.c)?;
    let iv = model.feasible_interval_with_tol(tol)?;
    let samples = a.samples.unwrap_or(50);
    let ends: Vec<Endpoint> = match a.end {
        EndArg::Lower => vec![Endpoint::Lower],
        EndArg::Upper => vec![Endpoint::Upper],
        EndArg::Both => vec![Endpoint::Lower, Endpoint::Upper],
    };
    let mut header = vec!["endpoint".to_string(), "f".into(), "offset".into()];
    header.extend((0..a.n).map(|p| format!("u_{p}")));
    let mut table = Table::new(header);
    let mut diagnostics = Vec::new();
    let mut results = Vec::new();
    for end in ends {
        if !iv.endpoint(end).is_finite() {
            if a.end == EndArg::Both {
                diagnostics.push(format!("{end:?} endpoint is infinite; skipped"));
                continue;
            }
            return Err(CliError::Invalid(format!("{end:?} endpoint is infinite")));
        }
        let report = assertion_scan(&model, end, a.eps, samples, tol)?;
        if let Some(why) = &report.stopped_early {
            diagnostics.push(format!("{end:?}: scan stopped early: {why}"));
        }
        for s in &report.samples {
            let mut row = vec![format!("{end:?}").to_lowercase(), g(s.f), g(s.offset)];
            row.extend(s.values.iter().map(|&v| g(v)));
            table.push(row);
        }
        results.push(EndResult {
            passed: report.passes(LIMIT_REL_TOL),
            report,
        });
    }
    if results.is_empty() {
        return Err(CliError::Invalid("no finite endpoint to scan".into()));
    }
    let failures = results.iter().filter(|r| !r.passed).count();
    let mut out = Output::new(
        AssertionResults {
            n: a.n,
            limit_relative_tolerance: LIMIT_REL_TOL,
            failures,
            ends: results,
        },
        table,
    );
    out.diagnostics = diagnostics;
    out.passed = failures == 0;
    Ok(out)
}

#[derive(Serialize)]
struct IsoparResults {
    summary: SweepSummary,
    grid: Vec<GridPoint>,
}

fn isopar(a: &IsoparArgs) -> Result<Output<IsoparResults>, CliError> {
    let fam = IsoparametricFamily::new(a.g, a.m1, a.m2.unwrap_or(a.m1))?;
    let (grid, summary) = sweep(&fam, a.points)?;
    let mut table = Table::new(["theta", "h", "s", "r_m", "r_closed", "residual"]);
    for p in &grid {
        table.push(vec![
            g(p.theta),
            g(p.h),
            g(p.s),
            g(p.r_m),
            g(p.r_closed),
            g(p.residual()),
        ]);
    }
    let mut diagnostics = Vec::new();
    if summary.equality_found {
        diagnostics.push(format!(
            "R_M reaches 0 on the grid (min {})",
            g(summary.min_r_m)
        ));
    }
    let mut out = Output::new(IsoparResults { summary, grid }, table);
    out.diagnostics = diagnostics;
    Ok(out)
}

#[derive(Serialize)]
struct IdentityRow {
    n: usize,
    checks: usize,
    worst_cot_sum: f64,
    worst_cot_square_sum: f64,
    worst_sin_product: f64,
}

#[derive(Serialize)]
struct IdentityResults {
    per_n: Vec<IdentityRow>,
    worst_relative_error: f64,
}

fn identities(a: &IdentityArgs) -> Result<Output<IdentityResults>, CliError> {
    if a.points == 0 {
        return Err(CliError::Invalid("--points must be positive".into()));
    }
    let ns: Vec<usize> = match a.n {
        Some(n) => vec![n],
        None => (1..=a.n_max).collect(),
    };
    let mut table = Table::new([
        "n",
        "theta",
        "cot_sum_lhs",
        "cot_sum_rhs",
        "cot_square_sum_lhs",
        "cot_square_sum_rhs",
        "sin_product_lhs",
        "sin_product_rhs",
    ]);
    let mut rows = Vec::new();
    for n in ns {
        let mut row = IdentityRow {
            n,
            checks: 0,
            worst_cot_sum: 0.0,
            worst_cot_square_sum: 0.0,
            worst_sin_product: 0.0,
        };
        for j in 0..a.points {
            let theta = (j as f64 + 0.5) * PI / (a.points as f64 * n as f64);
            let (sum, sq) = cot_sum_identity(n, theta)?;
            let prod = sin_product_identity(n, theta)?;
            row.worst_cot_sum = row.worst_cot_sum.max(sum.relative_error());
            row.worst_cot_square_sum = row.worst_cot_square_sum.max(sq.relative_error());
            row.worst_sin_product = row.worst_sin_product.max(prod.relative_error());
            row.checks += 3;
            table.push(vec![
                n.to_string(),
                g(theta),
                g(sum.lhs),
                g(sum.rhs),
                g(sq.lhs),
                g(sq.rhs),
                g(prod.lhs),
                g(prod.rhs),
            ]);
        }
        rows.push(row);
    }
    let worst = rows
        .iter()
        .map(|r| r.worst_cot_sum.max(r.worst_cot_square_sum).max(r.worst_sin_product))
        .fold(0.0, f64::max);
    Ok(Output::new(
        IdentityResults {
            per_n: rows,
            worst_relative_error: worst,
        },
        table,
    ))
}

#[derive(Serialize)]
struct LevelInfo {
    label: String,
    f: f64,
    height: f64,
}

#[derive(Serialize)]
struct PlotResults {
    f0_coefficients: Vec<f64>,
    levels: Vec<LevelInfo>,
    critical_points: LocalExtrema,
    x_range: (f64, f64),
    samples: Vec<(f64, f64)>,
}

fn shifted(f0: &Poly, h: f64) -> Poly {
    let mut c = f0.coeffs().to_vec();
    c[0] -= h;
    Poly::new(c)
}

fn plot(
    a: &PlotArgs,
    tol: f64,
    wants_svg: bool,
    out: Option<&PathBuf>,
) -> Result<Output<PlotResults>, CliError> {
    if a.points < 2 {
        return Err(CliError::Invalid("--points must be at least 2".into()));
    }
    let model = model(&a.model)?;
    let iv = model.feasible_interval_with_tol(tol)?;
    let extrema = model.extrema(tol)?;
    let f0 = model.f0();

    let mut marks: Vec<(String, f64)> = Vec::new();
    if iv.a.is_finite() {
        marks.push((format!("f = a = {:.6}", iv.a), iv.a));
    }
    if iv.b.is_finite() {
        marks.push((format!("f = b = {:.6}", iv.b), iv.b));
    }
    marks.extend(a.f.iter().map(|&f| (format!("f = {f:.6}"), f)));
    let levels: Vec<LevelInfo> = marks
        .into_iter()
        .map(|(label, f)| LevelInfo {
            label,
            f,
            height: 0.0 - model.shift(f),
        })
        .collect();

    let mut xs: Vec<f64> = extrema
        .maxima
        .iter()
        .chain(&extrema.minima)
        .map(|e| e.x)
        .chain(extrema.inflections.iter().copied())
        .collect();
    for l in &levels {
        if let Ok(roots) = shifted(f0, l.height).real_roots(tol) {
            xs.extend(roots.values());
        }
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let (lo, hi) = if lo.is_finite() && hi > lo {
        let pad = 0.15 * (hi - lo);
        (lo - pad, hi + pad)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (-1.0, 1.0)
    };
    let samples: Vec<(f64, f64)> = (0..a.points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (a.points - 1) as f64;
            (x, f0.eval(x))
        })
        .collect();
    let mut table = Table::new(["x", "F0"]);
    for &(x, y) in &samples {
        table.push(vec![g(x), g(y)]);
    }

    let critical: Vec<_> = extrema.maxima.iter().chain(&extrema.minima).copied().collect();
    let svg = wants_svg.then(|| {
        let plot_levels: Vec<Level> = levels
            .iter()
            .map(|l| Level {
                label: l.label.clone(),
                height: l.height,
            })
            .collect();
        let c: Vec<String> = model
            .constraints()
            .values()
            .iter()
            .map(|x| format!("{x}"))
            .collect();
        let svg = Plot {
            title: format!("F0 for n = {}, c = ({})", model.n(), c.join(", ")),
            samples: &samples,
            levels: &plot_levels,
            critical: &critical,
        }
        .render();
        let companion = a
            .csv
            .clone()
            .or_else(|| out.map(|p| p.with_extension("csv")));
        (svg, companion)
    });

    let mut output = Output::new(
        PlotResults {
            f0_coefficients: f0.coeffs().to_vec(),
            levels,
            critical_points: extrema,
            x_range: (lo, hi),
            samples,
        },
        table,
    );
    output.svg = svg;
    Ok(output)
}
