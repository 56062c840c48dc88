use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use urel::bench::{
    entropy_experiment, interp, reference_for, run_benchmark, table2, BenchmarkSpec, EntropyData, EntropyExperiment,
    Example, Solver,
};
use urel::config::merge_config_args;
use urel::io;
use urel::{BenchError, Result};
use urel_core::dgsem::Boundary;
use urel_core::fluxes::NumericalFlux;

/// Ultra-relativistic Euler benchmarks.
///
/// Any flag may also come from `--config FILE` (`key = value` lines, `#`
/// comments); flags given on the command line win.
#[derive(Parser, Debug)]
#[command(name = "urel", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one example with one solver.
    Run(RunArgs),
    /// Write a reference radial profile.
    Reference(ReferenceArgs),
    /// Reproduce the Example 1 shock table.
    Table2 {
        /// RK4 step in theta.
        #[arg(long, default_value_t = 1e-6)]
        h: f64,
    },
    /// Semidiscrete entropy-rate experiment on a periodic mesh.
    EntropyTest(EntropyArgs),
    /// Compare two radial profile CSVs.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RunArgs {
    /// 1-5 or entropy_test.
    #[arg(long)]
    example: Example,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// dgsem, radial or selfsim.
    #[arg(long, default_value = "dgsem")]
    solver: Solver,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// rusanov or ec.
    #[arg(long, value_parser = parse_flux)]
    flux: Option<NumericalFlux>,
    /// dirichlet_initial, outflow or periodic.
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long)]
    blending: Option<bool>,
    #[arg(long)]
    positivity: Option<bool>,
    /// Half-width L of the DG domain [-L, L]^d.
    #[arg(long)]
    half_width: Option<f64>,
    /// Radial solver cells.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    tend: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    output_times: Option<Vec<f64>>,
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long)]
    compare_lo: Option<f64>,
    #[arg(long)]
    compare_hi: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ReferenceArgs {
    #[arg(long)]
    example: Example,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// `start:step:stop`.
    #[arg(long, default_value = "0:0.01:2")]
    xgrid: String,
    /// RK4 step of the self-similar solution.
    #[arg(long, default_value_t = 1e-6)]
    h: f64,
    /// Radial cells for examples without a self-similar solution.
    #[arg(long, default_value_t = 5000)]
    cells: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct EntropyArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 1.0)]
    half_width: f64,
    #[arg(long, default_value_t = 200)]
    evaluations: usize,
    /// Interface flux: ec or rusanov.
    #[arg(long, value_parser = parse_flux, default_value = "ec")]
    flux: NumericalFlux,
    /// entropy_test (mollified) or 3.
    #[arg(long, default_value = "entropy_test")]
    data: String,
    /// Bound on |dS/dt| / |S| (ec) or on -dS/dt / |S| (rusanov).
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
}

fn parse_flux(s: &str) -> std::result::Result<NumericalFlux, String> {
    match s {
        "ec" | "entropy_conservative" => Ok(NumericalFlux::EntropyConservative),
        "rusanov" => Ok(NumericalFlux::Rusanov),
        other => Err(format!("unknown flux '{other}'")),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| BenchError::Invalid(format!("bad grid '{s}': {e}")))?;
    let [a, h, b] = parts[..] else {
        return Err(BenchError::Invalid(format!("grid '{s}' is not start:step:stop")));
    };
    if !(h > 0.0) || b < a {
        return Err(BenchError::Invalid(format!("grid '{s}' needs step > 0 and stop >= start")));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + h * i as f64).collect())
}

fn print_lines(lines: &[(String, f64)]) {
    for (k, v) in lines {
        println!("{k} = {}", io::fmt(*v));
    }
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let mut spec = BenchmarkSpec::new(a.example, a.dim, a.solver);
    if let Some(l) = a.half_width {
        spec.half_width = l;
        spec.x_max = l.max(spec.x_max);
        spec.compare_range.1 = spec.compare_range.1.min(l);
    }
    macro_rules! set {
        ($($field:ident <- $opt:expr),* $(,)?) => { $(if let Some(v) = $opt { spec.$field = v; })* };
    }
    set!(
        elements <- a.elements,
        order <- a.order,
        cfl <- a.cfl,
        interface_flux <- a.flux,
        boundary <- a.boundary,
        blending <- a.blending,
        positivity <- a.positivity,
        cells <- a.cells,
        x_max <- a.x_max,
        t_end <- a.tend,
        output_times <- a.output_times,
        rays <- a.rays,
    );
    if let Some(lo) = a.compare_lo {
        spec.compare_range.0 = lo;
    }
    if let Some(hi) = a.compare_hi {
        spec.compare_range.1 = hi;
    }
    spec.out_dir = a.out;
    let outcome = run_benchmark(&spec)?;
    print_lines(&outcome.summary);
    if let Some(report) = &outcome.report {
        print_lines(&report.to_lines());
    }
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reference(a: ReferenceArgs) -> Result<ExitCode> {
    let mut spec = BenchmarkSpec::new(a.example, a.dim, Solver::Selfsim);
    spec.selfsim_h = a.h;
    spec.reference_cells = a.cells;
    if !(2..=3).contains(&a.dim) {
        return Err(BenchError::Invalid(format!("dimension {} must be 2 or 3", a.dim)));
    }
    let x = parse_grid(&a.xgrid)?;
    spec.x_max = spec.x_max.max(x.last().copied().unwrap_or(0.0));
    let reference = reference_for(&spec, a.t)?;
    let (p, v): (Vec<f64>, Vec<f64>) = x.iter().map(|&x| reference.eval(x)).unzip();
    io::write_reference(&a.out, &x, &p, &v)?;
    eprintln!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_table2(h: f64) -> Result<ExitCode> {
    let rows = table2(h)?;
    println!("{:>2} {:>12} {:>12} {:>12} {:>12}   max|diff|", "d", "s", "p-", "p+", "v+");
    let mut ok = true;
    for r in &rows {
        let c = r.computed;
        let diff = r.max_abs_diff();
        ok &= diff <= 1e-4;
        println!(
            "{:>2} {:>12.5} {:>12.5} {:>12.5} {:>12.5}   {diff:.1e}",
            r.d, c[0], c[1], c[2], c[3]
        );
        let q = r.paper;
        println!("   {:>12.5} {:>12.5} {:>12.5} {:>12.5}   (published)", q[0], q[1], q[2], q[3]);
    }
    println!("table2 {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_entropy(a: EntropyArgs) -> Result<ExitCode> {
    let mut exp = EntropyExperiment::new(a.dim);
    if let Some(n) = a.elements {
        exp.elements = n;
    }
    exp.order = a.order;
    exp.half_width = a.half_width;
    exp.rhs_evaluations = a.evaluations;
    exp.interface_flux = a.flux;
    exp.data = match a.data.as_str() {
        "entropy_test" | "entropy-test" => EntropyData::MollifiedEntropyTest,
        "3" => EntropyData::Example3,
        other => return Err(BenchError::Invalid(format!("unknown data '{other}'"))),
    };
    exp.out = a.out;
    let r = entropy_experiment(&exp)?;
    println!("evaluations = {}", r.log.len());
    println!("min_relative_rate = {}", io::fmt(r.min_relative_rate));
    println!("max_relative_rate = {}", io::fmt(r.max_relative_rate));
    let ok = match exp.interface_flux {
        NumericalFlux::EntropyConservative => r.max_abs_relative_rate() <= a.tol,
        NumericalFlux::Rusanov => r.min_relative_rate >= -a.tol,
    };
    println!("entropy-test {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_compare(a: CompareArgs) -> Result<ExitCode> {
    let pa = io::read_profile(&a.a)?;
    let pb = io::read_profile(&a.b)?;
    if pa.x.len() < 2 || pb.x.len() < 2 {
        return Err(BenchError::Invalid("profiles need at least two points".into()));
    }
    let lo = a.lo.unwrap_or(f64::NEG_INFINITY).max(pa.x[0]).max(pb.x[0]);
    let hi = a.hi.unwrap_or(f64::INFINITY).min(pa.x[pa.x.len() - 1]).min(pb.x[pb.x.len() - 1]);
    let idx: Vec<usize> = (0..pa.x.len()).filter(|&i| pa.x[i] >= lo && pa.x[i] <= hi).collect();
    let err = |ya: &[f64], yb: &[f64]| -> (f64, f64) {
        let e: Vec<f64> = idx.iter().map(|&i| (ya[i] - interp(&pb.x, yb, pa.x[i])).abs()).collect();
        let l1 = (1..idx.len())
            .map(|k| 0.5 * (e[k] + e[k - 1]) * (pa.x[idx[k]] - pa.x[idx[k - 1]]))
            .sum();
        (l1, e.iter().copied().fold(0.0, f64::max))
    };
    let (l1_p, linf_p) = err(&pa.p, &pb.p);
    let (l1_v, linf_v) = err(&pa.v, &pb.v);
    print_lines(&[
        ("range_lo".into(), lo),
        ("range_hi".into(), hi),
        ("l1_p".into(), l1_p),
        ("l1_v".into(), l1_v),
        ("linf_p".into(), linf_p),
        ("linf_v".into(), linf_v),
    ]);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let argv = match merge_config_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Reference(a) => cmd_reference(a),
        Command::Table2 { h } => cmd_table2(h),
        Command::EntropyTest(a) => cmd_entropy(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
