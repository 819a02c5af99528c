use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use feigen_core::artifacts::{coefficients_tsv, spectrum_csv, spectrum_json, to_json, SolutionFile};
use feigen_core::bases::{build_basis, Basis, BasisKind, BasisSpec};
use feigen_core::chebyshev::{ChebGrid, ChebSeries};
use feigen_core::families::{family_spectrum_check, solve_branch};
use feigen_core::numerics::{PrecisionCtx, Real};
use feigen_core::operators::{ExplicitKind, Linearization, OperatorSpec, Variant};
use feigen_core::solver::{
    assemble_jacobian, default_seed, newton_solve, residual, JacobianMode, NewtonConfig, NewtonResult, Pin,
};
use feigen_core::spectrum::{
    compute_spectrum, eigenfunction_values, explicit_eigenvalue, spectrum_at, verify_explicit, SpectrumReport,
};
use feigen_core::Error as CoreError;

use crate::args::{Format, JacobianArg, PlotArgs, RunArgs, VerifyArgs};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub struct Solved {
    pub ctx: PrecisionCtx,
    pub basis: Basis,
    pub result: NewtonResult,
}

fn basis_spec(args: &RunArgs) -> Result<BasisSpec> {
    let spec = match args.basis {
        BasisKind::ChebGrid => {
            if args.dim.is_some_and(|d| d != args.nodes) {
                return Err(CliError::config("the Chebyshev grid is sized with --nodes, not --dim"));
            }
            BasisSpec::cheb(args.nodes)
        }
        kind => {
            let dim = args.dim.ok_or_else(|| CliError::Config {
                message: format!("--basis {kind} needs --dim"),
                hint: Some("e.g. --basis lanford --dim 15".into()),
            })?;
            BasisSpec { kind, dim, constraints: args.constraints.clone() }
        }
    };
    if args.basis == BasisKind::ChebGrid && !args.constraints.is_empty() {
        return Err(CliError::Config {
            message: "--constrain applies to the monomial bases".into(),
            hint: Some("pin g(0) on the grid with --pin g0=V".into()),
        });
    }
    spec.validate()?;
    Ok(spec)
}

fn warn(message: &str) {
    let _ = writeln!(std::io::stderr(), "warning: {message}");
}

pub fn solve(args: &RunArgs) -> Result<Solved> {
    let ctx = PrecisionCtx::new(args.digits)?;
    let spec = OperatorSpec::new(args.operator, args.linearization);
    let bspec = basis_spec(args)?;
    if args.operator.scales_at_origin() && args.pins.is_empty() && bspec.kind != BasisKind::Lanford {
        warn(&format!("{} fixes a whole family of functions; without --pin g0=V Newton's method will fail", args.operator));
    }
    let basis = build_basis(&bspec, &ctx)?;
    let mut config = NewtonConfig {
        jacobian_mode: match args.jacobian {
            JacobianArg::Fd => JacobianMode::FiniteDifference,
            JacobianArg::Exact => JacobianMode::Exact,
        },
        ..NewtonConfig::default()
    };
    for v in &args.pins {
        config = config.with_pin(Pin::Point { x: ctx.zero(), value: ctx.parse(v)? });
    }
    let seed = match &args.seed_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read seed file {}: {e}", path.display())))?;
            ChebSeries::parse_dump(&text, &ctx)?
        }
        None => default_seed(args.extremum_order, args.nodes, &ctx),
    };
    let result = if args.extremum_order != 1 {
        if args.operator != Variant::T || bspec.kind != BasisKind::ChebGrid {
            return Err(CliError::config("--extremum-order is supported for --operator T on the Chebyshev grid"));
        }
        solve_branch(args.extremum_order, &basis, &seed, &config)?
    } else {
        newton_solve(spec, &basis, &seed, &config)?
    };
    Ok(Solved { ctx, basis, result })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn write_solution(s: &Solved, out: &Path) -> Result<SolutionFile> {
    let file = SolutionFile::new(&s.result, &s.basis)?;
    write_file(out, "solution.json", &file.to_json()?)?;
    write_file(out, "coefficients.tsv", &coefficients_tsv(&file))?;
    Ok(file)
}

pub fn cmd_solve(args: &RunArgs) -> Result<()> {
    let s = solve(args)?;
    let file = write_solution(&s, &args.out)?;
    say!("operator     {}", file.operator);
    say!("scaling      {}", file.scaling);
    say!("iterations   {}", file.history.len());
    if let Some(p) = file.convergence_exponent {
        say!("order        {p:.3}");
    }
    say!("decay tail   {:.3e}", file.decay.tail);
    say!("written      {}", args.out.join("solution.json").display());
    Ok(())
}

fn eig_tolerance(ctx: &PrecisionCtx) -> Real {
    ctx.pow10(-(ctx.digits() as i32) / 3)
}

pub fn cmd_spectrum(args: &RunArgs) -> Result<()> {
    let s = solve(args)?;
    write_solution(&s, &args.out)?;
    let report = compute_spectrum(&s.result, &s.basis, &eig_tolerance(&s.ctx))?;
    match args.format {
        Format::Json => write_file(&args.out, "spectrum.json", &spectrum_json(&report)?)?,
        Format::Csv => write_file(&args.out, "spectrum.csv", &spectrum_csv(&report.to_json()))?,
    }
    print_spectrum(&report);
    Ok(())
}

fn print_spectrum(report: &SpectrumReport) {
    say!("{:>3}  {:>22}  {:<14} parity", "i", "lambda", "tag");
    for (i, e) in report.eigenvalues.iter().take(report.trusted().min(11)).enumerate() {
        let tag = match e.tag.k() {
            Some(k) => format!("b^{}", 1 - k),
            None => e.tag.name().to_string(),
        };
        let value = if e.value.is_real() {
            e.value.re.to_decimal(16)
        } else {
            format!("{} {:+.3e}i", e.value.re.to_decimal(10), e.value.im.to_f64())
        };
        say!("{:>3}  {value:>22}  {tag:<14} {:?}", i + 1, e.parity);
    }
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    value: Option<f64>,
    threshold: f64,
    pass: bool,
    note: Option<String>,
}

#[derive(Default)]
struct Table {
    rows: Vec<CheckRow>,
}

impl Table {
    fn measure(&mut self, check: impl Into<String>, value: f64, threshold: f64) {
        self.rows.push(CheckRow { check: check.into(), value: Some(value), threshold, pass: value <= threshold, note: None });
    }

    fn skip(&mut self, check: impl Into<String>, note: String) {
        self.rows.push(CheckRow { check: check.into(), value: None, threshold: 0.0, pass: true, note: Some(note) });
    }

    fn fail(&mut self, check: impl Into<String>, note: String) {
        self.rows.push(CheckRow { check: check.into(), value: None, threshold: 0.0, pass: false, note: Some(note) });
    }
}

/// Solution to check: read from `--solution` or solved afresh.
struct Candidate {
    ctx: PrecisionCtx,
    basis: Basis,
    spec: OperatorSpec,
    g: ChebSeries,
    values: Vec<Real>,
    pinned_rows: Vec<usize>,
}

fn load_or_solve(args: &VerifyArgs) -> Result<Candidate> {
    match &args.solution {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read solution {}: {e}", path.display())))?;
            let file = SolutionFile::from_json(&text)?;
            let ctx = PrecisionCtx::new(file.digits)?;
            let basis = build_basis(&file.basis.spec, &ctx)?;
            let (g, values) = if file.basis.spec.kind == BasisKind::ChebGrid {
                let g = file.series(&ctx)?;
                let values = basis.values_of(&g);
                (g, values)
            } else {
                let values = file.node_values.iter().map(|v| ctx.parse(v)).collect::<std::result::Result<Vec<_>, _>>()?;
                (basis.series(&values)?, values)
            };
            Ok(Candidate { ctx, basis, spec: file.spec(), g, values, pinned_rows: file.pinned_rows })
        }
        None => {
            let s = solve(&args.run)?;
            let r = s.result;
            Ok(Candidate { ctx: s.ctx, basis: s.basis, spec: r.spec, g: r.series, values: r.values, pinned_rows: r.pinned_rows })
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let Candidate { ctx, basis, spec, g, values, pinned_rows } = load_or_solve(args)?;
    let v = spec.variant;
    let n = basis.dim();
    let grid = ChebGrid::new(g.len().max(n), &ctx)?;
    let mut table = Table::default();

    let phi = residual(v, &g, basis.nodes())?;
    let worst = phi
        .iter()
        .enumerate()
        .filter(|(i, _)| !pinned_rows.contains(i))
        .map(|(_, r)| r.abs().to_f64())
        .fold(0.0, f64::max);
    let scale = values.iter().map(|r| r.abs().to_f64()).fold(1.0, f64::max);
    table.measure("fixed-point residual", worst, ctx.pow10(-(ctx.digits() as i32) + 12).to_f64() * scale);

    for (lin, kind) in [(Linearization::FullDerivative, ExplicitKind::Full), (Linearization::FrozenAlpha, ExplicitKind::Frozen)] {
        for k in [0, 2, 3, 4, 5] {
            let name = format!("{lin} eigenfunction k={k}");
            match explicit_eigenvalue(v, &g, kind, k)
                .and_then(|lambda| verify_explicit(&g, OperatorSpec::new(v, lin), kind, k, &lambda, &grid))
            {
                Ok(r) => table.measure(name, r.to_f64(), 1e-15),
                Err(e @ CoreError::NoExplicitForm { .. }) => table.skip(name, e.to_string()),
                Err(e) => table.fail(name, e.to_string()),
            }
        }
    }
    match explicit_eigenvalue(v, &g, ExplicitKind::Dilation, 1)
        .and_then(|lambda| verify_explicit(&g, OperatorSpec::full(v), ExplicitKind::Dilation, 1, &lambda, &grid))
    {
        Ok(r) => table.measure("dilation eigenfunction g - x g'", r.to_f64(), 1e-15),
        Err(e) => table.fail("dilation eigenfunction g - x g'", e.to_string()),
    }

    let one = ctx.one();
    let identity = (g.derivative().eval(&one) - g.eval(&one).recip()).abs();
    table.measure("g'(1) = 1/g(1)", identity.to_f64(), 1e-20);

    if matches!(v, Variant::T | Variant::T2) {
        let report = spectrum_at(OperatorSpec::full(v), &basis, &g, &eig_tolerance(&ctx))?;
        let alpha2 = report.tag_base.square();
        let xs = feigen_core::spectrum::parity_points(&ctx);
        let mut worst = 0.0f64;
        for e in report.eigenvalues.iter().take(report.trusted()) {
            if (&e.value.re - &alpha2).abs() < 1e-6 {
                continue;
            }
            let h = eigenfunction_values(&e.vector, &basis, &xs);
            let norm = h.iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max);
            let h0 = eigenfunction_values(&e.vector, &basis, &[ctx.zero()])[0].abs().to_f64();
            worst = worst.max(h0 / norm);
        }
        table.measure("h(0) = 0 unless lambda = alpha^2", worst, 1e-10);
    } else {
        table.skip("h(0) = 0 unless lambda = alpha^2", format!("{v} has the eigenvalue 1 with h(0) = g(0)"));
    }

    let step = NewtonConfig::default().step(&ctx);
    let fd = assemble_jacobian(OperatorSpec::full(v), &basis, &values, JacobianMode::FiniteDifference, &step)?;
    let ex = assemble_jacobian(OperatorSpec::full(v), &basis, &values, JacobianMode::Exact, &step)?;
    let mut gap = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            gap = gap.max((&fd[(i, j)] - &ex[(i, j)]).abs().to_f64());
        }
    }
    table.measure("finite-difference vs exact Jacobian", gap, 10.0 * step.to_f64());

    if !args.mus.is_empty() {
        let mus = args.mus.iter().map(|m| ctx.parse(m)).collect::<std::result::Result<Vec<_>, _>>()?;
        let family = if v.scales_at_origin() { v } else { Variant::T4 };
        let c = family_spectrum_check(&g, &mus, family, 8, &ctx)?;
        table.measure(format!("{family} spectrum along the family (top 8)"), c.max_pairwise(), 1e-8);
        table.measure("family dilation eigenfunction", c.max_dilation_residual(), 1e-12);
    }

    say!("{:<44} {:>11} {:>9}  result", "check", "value", "bound");
    for r in &table.rows {
        let value = r.value.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
        let bound = if r.value.is_some() { format!("{:.0e}", r.threshold) } else { "-".into() };
        let verdict = match (&r.note, r.pass) {
            (Some(note), true) => format!("skipped ({note})"),
            (Some(note), false) => format!("FAIL ({note})"),
            (None, true) => "ok".into(),
            (None, false) => "FAIL".into(),
        };
        say!("{:<44} {value:>11} {bound:>9}  {verdict}", r.check);
    }
    write_file(&args.run.out, "verification.json", &to_json(&table.rows)?)?;

    let failed: Vec<&str> = table.rows.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification { message: format!("{} check(s) failed: {}", failed.len(), failed.join(", ")) })
    }
}

pub fn cmd_plotdata(args: &PlotArgs) -> Result<()> {
    let path = args.out.join("solution.json");
    let text = fs::read_to_string(&path).map_err(|_| CliError::Config {
        message: format!("no solution found at {}", path.display()),
        hint: Some(format!("run `feigen solve --out {}` first", args.out.display())),
    })?;
    let file = SolutionFile::from_json(&text)?;

    let mut decay = String::from("# k\tlog10(1/|a_k|)\n");
    for (k, m) in file.decay.magnitudes.iter().enumerate() {
        match m {
            Some(x) => decay.push_str(&format!("{k}\t{x:.6}\n")),
            None => decay.push_str(&format!("{k}\tinf\n")),
        }
    }
    write_file(&args.out, "decay.tsv", &decay)?;

    let ctx = PrecisionCtx::new(file.digits)?;
    let basis = build_basis(&file.basis.spec, &ctx)?;
    let values = file.node_values.iter().map(|v| ctx.parse(v)).collect::<std::result::Result<Vec<_>, _>>()?;
    let g = basis.series(&values)?;
    let report = spectrum_at(OperatorSpec::full(file.operator), &basis, &g, &eig_tolerance(&ctx))?;
    let e = report.eigenvalues.get(args.eigen.wrapping_sub(1)).ok_or_else(|| {
        CliError::config(format!("--eigen must lie in 1..={}", report.eigenvalues.len()))
    })?;
    let xs: Vec<Real> = (0..=200).map(|i| ctx.int(i - 100) / 100).collect();
    let h = eigenfunction_values(&e.vector, &basis, &xs);
    let norm = h.iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut samples = format!("# x\th(x), lambda_{} = {}\n", args.eigen, e.value.re.to_decimal(20));
    for (x, hx) in xs.iter().zip(&h) {
        samples.push_str(&format!("{:.2}\t{:.15e}\n", x.to_f64(), hx.re.to_f64() / norm));
    }
    write_file(&args.out, "eigenfunction.tsv", &samples)?;
    say!("written      {}", args.out.join("decay.tsv").display());
    say!("written      {}", args.out.join("eigenfunction.tsv").display());
    Ok(())
}
