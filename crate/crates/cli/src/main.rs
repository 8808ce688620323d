mod io;

use cip_core::derandomize::derandomized_round;
use cip_core::instance::{gen_gap_example, gen_random, serialize_instance, CoveringInstance, GenParams, Mult, NormMode};
use cip_core::kclp::{solve_kclp_with, BackendKind, KcLpOptions, KcLpResult};
use cip_core::rounding::{
    choose_alpha, contract_round_fix, round_and_fix, AlphaChoice, Regime, RoundingOutcome, ThresholdMode,
};
use cip_core::verify::{exact_ilp, kc_separation, trial_harness, TrialAlgorithm};
use cip_core::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use io::{read_instance, read_vector, write_json, write_text, Fractional, Integral};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cip", version, about = "Covering integer programs: KC-LP solver, rounding and oracles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated instance in CIP format.
    Gen(GenArgs),
    /// Sparsity statistics of an instance.
    Stats(Common),
    /// Solve the knapsack-cover LP; writes the fractional solution.
    SolveLp(SolveLpArgs),
    /// Round a fractional solution to an integral one.
    Round(RoundArgs),
    /// LP solve followed by rounding with alteration.
    Solve(SolveArgs),
    /// Exact optimum by enumeration (at most 12 columns).
    Exact(Common),
    /// Check a solution: knapsack-cover separation or integral cover.
    Verify(VerifyArgs),
    /// Paired naive/accelerated timings over a range of instance sizes.
    Bench(BenchArgs),
    /// Repeated rounding trials with cost-ratio statistics.
    Trials(TrialsArgs),
}

#[derive(Args)]
struct Common {
    /// Instance file in CIP format; standard input when omitted or `-`.
    instance: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("kind").required(true).args(["gap", "random"]))]
struct GenArgs {
    /// Two-column gap example with parameter B.
    #[arg(long, value_name = "B")]
    gap: Option<f64>,
    #[arg(long, requires = "seed")]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0.1)]
    coeff_min: f64,
    #[arg(long, default_value_t = 1.0)]
    coeff_max: f64,
    #[arg(long, default_value_t = 1.0)]
    cost_min: f64,
    #[arg(long, default_value_t = 10.0)]
    cost_max: f64,
    /// Multiplicity cap for every column: an integer or `inf`.
    #[arg(long, default_value = "1", value_parser = parse_mult)]
    d_max: Mult,
    #[arg(long, default_value_t = 1.0)]
    demand: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_mult(s: &str) -> std::result::Result<Mult, String> {
    match s {
        "inf" => Ok(Mult::Unbounded),
        _ => match s.parse::<u64>() {
            Ok(v) if v > 0 => Ok(Mult::Finite(v)),
            _ => Err(format!("expected a positive integer or 'inf', got '{s}'")),
        },
    }
}

#[derive(Args)]
struct LpArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value = "accelerated")]
    backend: BackendKind,
    /// Run the naive backend in lockstep and fail on any divergence.
    #[arg(long)]
    audit: bool,
    /// Run report (timings, iteration counts) as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SolveLpArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lp: LpArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    L0,
    L1,
    L1Bmin,
    L1Small,
    Bicriteria,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::L0 => Regime::L0,
            RegimeArg::L1 => Regime::L1,
            RegimeArg::L1Bmin => Regime::L1Bmin,
            RegimeArg::L1Small => Regime::L1Small,
            RegimeArg::Bicriteria => Regime::Bicriteria,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    /// Randomized rounding with alteration; ignores multiplicity caps.
    Fix,
    /// Contraction first, so that z ≤ d.
    Contract,
    /// Conditional expectations; no seed needed.
    Derand,
}

#[derive(Args)]
struct RoundingArgs {
    /// Fractional solution: a JSON array or a document with an `x` field.
    #[arg(long)]
    x: PathBuf,
    #[arg(long, value_enum, default_value = "fix")]
    method: Method,
    #[arg(long, value_enum, default_value = "l0")]
    regime: RegimeArg,
    /// Use this α instead of the regime's choice.
    #[arg(long)]
    alpha: Option<f64>,
    /// Coverage relaxation for the contraction and bicriteria regimes.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Accuracy the LP was solved at: x is first scaled to min(x/(1−ε), d).
    #[arg(long, default_value_t = 0.0)]
    lp_eps: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RoundArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    rounding: RoundingArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lp: LpArgs,
    #[arg(long, value_enum, default_value = "l0")]
    regime: RegimeArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("check").required(true).args(["kc", "cover"]))]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Solution file: a JSON array or a solution document.
    #[arg(long)]
    solution: PathBuf,
    /// Every knapsack-cover inequality at (1−ε) (at most 22 columns).
    #[arg(long)]
    kc: bool,
    /// Az ≥ b and z ≤ d for an integral solution.
    #[arg(long)]
    cover: bool,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Target nonzero counts.
    #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 20_000, 40_000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrialsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    rounding: RoundingArgs,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CIP_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cip: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Stats(a) => {
            let inst = read_instance(a.instance.as_deref())?;
            write_json(a.output.as_deref(), &InstanceStats::of(&inst)?)?;
            Ok(0)
        }
        Cmd::SolveLp(a) => solve_lp(a),
        Cmd::Round(a) => round(a),
        Cmd::Solve(a) => solve(a),
        Cmd::Exact(a) => {
            let inst = read_instance(a.instance.as_deref())?;
            let sol = exact_ilp(&inst)?;
            let stats = inst.sparsity_stats();
            write_json(a.output.as_deref(), &Integral { cost: sol.cost, z: &sol.z, feasible: true, stats: &stats })?;
            Ok(0)
        }
        Cmd::Verify(a) => verify(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Trials(a) => trials(a),
    }
}

#[derive(Serialize)]
struct InstanceStats {
    m: usize,
    n: usize,
    raw: cip_core::instance::SparsityStats,
    normalized: cip_core::instance::SparsityStats,
}

impl InstanceStats {
    fn of(inst: &CoveringInstance) -> Result<Self> {
        Ok(InstanceStats {
            m: inst.m(),
            n: inst.n(),
            raw: inst.sparsity_stats(),
            normalized: inst.normalize(NormMode::Unit)?.sparsity_stats(),
        })
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    let inst = match (a.gap, a.seed) {
        (Some(b), _) => gen_gap_example(b)?,
        (None, Some(seed)) => gen_random(&GenParams {
            seed,
            m: a.m,
            n: a.n,
            density: a.density,
            coeff_range: (a.coeff_min, a.coeff_max),
            d_max: a.d_max.finite(),
            cost_range: (a.cost_min, a.cost_max),
            demand: a.demand,
        })?,
        (None, None) => unreachable!("clap requires --gap or --random --seed"),
    };
    write_text(a.output.as_deref(), &serialize_instance(&inst))?;
    Ok(0)
}

fn lp_solve(inst: &CoveringInstance, lp: &LpArgs) -> Result<KcLpResult> {
    let opts = KcLpOptions { audit: lp.audit, ..KcLpOptions::new(lp.eps, lp.backend) };
    let r = solve_kclp_with(inst, &opts)?;
    log::info!(
        "kc-lp: cost {:.6} dual {:.6} after {} picks, {} threshold bumps",
        r.primal_cost,
        r.dual_value,
        r.iterations,
        r.lambda_bumps
    );
    if let Some(path) = &lp.report {
        write_json(Some(path), &r.report(lp.eps))?;
    }
    Ok(r)
}

fn solve_lp(a: SolveLpArgs) -> Result<u8> {
    let inst = read_instance(a.common.instance.as_deref())?;
    let r = lp_solve(&inst, &a.lp)?;
    let caps = inst.effective_caps();
    let feasible = r.x.iter().zip(&caps).all(|(&v, &d)| v <= d as f64)
        && (0..inst.m()).all(|i| inst.row_dot(i, &r.x) >= (1.0 - a.lp.eps) * inst.b()[i] * (1.0 - 1e-9));
    let stats = inst.sparsity_stats();
    write_json(a.common.output.as_deref(), &Fractional { cost: r.primal_cost, x: &r.x, feasible, stats: &stats })?;
    Ok(0)
}

/// `min(x/(1−ε), d)`: a point meeting the knapsack-cover inequalities at
/// (1−ε) meets them exactly after this scaling.
fn unshrink(inst: &CoveringInstance, x: &[f64], eps: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("LP accuracy must lie in [0, 1), got {eps}")));
    }
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    let caps = inst.effective_caps();
    Ok(x.iter().zip(&caps).map(|(&v, &d)| (v / (1.0 - eps)).min(d as f64)).collect())
}

fn alpha_choice(inst: &CoveringInstance, regime: Regime, alpha: Option<f64>, eps: f64) -> Result<AlphaChoice> {
    let mut stats = inst.normalize(NormMode::Unit)?.sparsity_stats();
    if let Some(a) = alpha {
        return AlphaChoice::fixed(regime, a, 0.0, eps);
    }
    if regime == Regime::L0 {
        // a single nonzero per column still rounds correctly at the Δ0 = 2 value
        stats.delta0 = stats.delta0.max(2);
    }
    choose_alpha(&stats, regime, eps)
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Domain(format!("{what} is randomized; pass --seed")))
}

fn round_once(inst: &CoveringInstance, x: &[f64], a: &RoundingArgs) -> Result<RoundingOutcome> {
    let choice = alpha_choice(inst, a.regime.into(), a.alpha, a.eps)?;
    log::info!("rounding with alpha {:.6} ({:?})", choice.alpha, choice.regime);
    match a.method {
        Method::Fix => round_and_fix(inst, x, &choice, need_seed(a.seed, "rounding")?),
        Method::Contract => contract_round_fix(inst, x, &choice, a.eps, need_seed(a.seed, "rounding")?),
        Method::Derand => derandomized_round(inst, x, choice.alpha).map(|(o, _)| o),
    }
}

fn emit_integral(inst: &CoveringInstance, z: &[u64], output: Option<&Path>) -> Result<bool> {
    let rep = inst.check_cover(z)?;
    let stats = inst.sparsity_stats();
    write_json(output, &Integral { cost: rep.cost, z, feasible: rep.feasible, stats: &stats })?;
    Ok(rep.feasible)
}

fn round(a: RoundArgs) -> Result<u8> {
    let inst = read_instance(a.common.instance.as_deref())?;
    let x = unshrink(&inst, &read_vector(&a.rounding.x)?, a.rounding.lp_eps)?;
    let out = round_once(&inst, &x, &a.rounding)?;
    emit_integral(&inst, &out.z, a.common.output.as_deref())?;
    Ok(0)
}

fn solve(a: SolveArgs) -> Result<u8> {
    let inst = read_instance(a.common.instance.as_deref())?;
    let r = lp_solve(&inst, &a.lp)?;
    let x = unshrink(&inst, &r.x, a.lp.eps)?;
    let regime = Regime::from(a.regime);
    let choice = alpha_choice(&inst, regime, a.alpha, 0.0)?;
    let out = if regime == Regime::L0 {
        contract_round_fix(&inst, &x, &choice, 0.0, a.seed)?
    } else if inst.d().iter().all(|d| d.is_unbounded()) {
        round_and_fix(&inst, &x, &choice, a.seed)?
    } else {
        return Err(Error::Regime(format!(
            "{regime:?} rounding cannot respect multiplicity caps; use --regime l0 or an instance without caps"
        )));
    };
    let rep = inst.check_cover(&out.z)?;
    if !rep.feasible {
        return Err(Error::Certificate(format!(
            "rounded solution misses {} rows and {} caps",
            rep.violated_rows.len(),
            rep.multiplicity_violations.len()
        )));
    }
    log::info!("lp cost {:.6}, integral cost {:.6}", r.primal_cost, rep.cost);
    emit_integral(&inst, &out.z, a.common.output.as_deref())?;
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let inst = read_instance(a.common.instance.as_deref())?;
    let out = a.common.output.as_deref();
    let pass = if a.kc {
        let x: Vec<f64> = read_vector(&a.solution)?;
        let rep = kc_separation(&inst, &x, a.eps)?;
        write_json(out, &rep)?;
        rep.pass
    } else {
        let z: Vec<u64> = read_vector(&a.solution)?;
        let rep = inst.check_cover(&z)?;
        write_json(out, &rep)?;
        rep.feasible
    };
    if !pass {
        eprintln!("cip: verification failed");
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct BenchRun {
    backend: BackendKind,
    wall_ms: f64,
    iterations: u64,
    lambda_bumps: u64,
    primal_cost: f64,
}

#[derive(Serialize)]
struct BenchRow {
    target_nnz: usize,
    nnz: usize,
    m: usize,
    n: usize,
    naive: BenchRun,
    accelerated: BenchRun,
    same_bumps: bool,
}

#[derive(Serialize)]
struct BenchReport {
    eps: f64,
    seed: u64,
    rows: Vec<BenchRow>,
    /// Wall-time ratio between consecutive sizes.
    naive_growth: Vec<f64>,
    accelerated_growth: Vec<f64>,
}

fn growth(rows: &[BenchRow], pick: impl Fn(&BenchRow) -> f64) -> Vec<f64> {
    rows.windows(2).map(|w| pick(&w[1]) / pick(&w[0])).collect()
}

fn bench(a: BenchArgs) -> Result<u8> {
    let mut rows = Vec::new();
    for &target in &a.sizes {
        let n = ((target as f64 / (a.m as f64 * a.density)).round() as usize).max(1);
        let mut p = GenParams::new(a.seed, a.m, n, a.density);
        p.cost_range = (1.0, 100.0);
        let inst = gen_random(&p)?;
        let run = |backend| -> Result<(BenchRun, Vec<u64>)> {
            let r = solve_kclp_with(&inst, &KcLpOptions::new(a.eps, backend))?;
            log::info!("nnz {}: {backend} {:.0} ms", inst.nnz(), r.wall_ms);
            let run = BenchRun {
                backend,
                wall_ms: r.wall_ms,
                iterations: r.iterations,
                lambda_bumps: r.lambda_bumps,
                primal_cost: r.primal_cost,
            };
            Ok((run, r.bump_iterations))
        };
        let (naive, nb) = run(BackendKind::Naive)?;
        let (accelerated, ab) = run(BackendKind::Accelerated)?;
        rows.push(BenchRow { target_nnz: target, nnz: inst.nnz(), m: inst.m(), n, naive, accelerated, same_bumps: nb == ab });
    }
    let report = BenchReport {
        eps: a.eps,
        seed: a.seed,
        naive_growth: growth(&rows, |r| r.naive.wall_ms),
        accelerated_growth: growth(&rows, |r| r.accelerated.wall_ms),
        rows,
    };
    write_json(a.output.as_deref(), &report)?;
    Ok(0)
}

fn trials(a: TrialsArgs) -> Result<u8> {
    let inst = read_instance(a.common.instance.as_deref())?;
    let r = &a.rounding;
    let x = unshrink(&inst, &read_vector(&r.x)?, r.lp_eps)?;
    let choice = alpha_choice(&inst, r.regime.into(), r.alpha, r.eps)?;
    let algo = match r.method {
        Method::Fix => TrialAlgorithm::RoundAndFix {
            alpha: choice.alpha,
            mode: match choice.regime {
                Regime::L1Small => ThresholdMode::RankDelta(choice.delta_small),
                _ => ThresholdMode::Median,
            },
        },
        Method::Contract => TrialAlgorithm::ContractRoundFix { alpha: choice.alpha, eps: r.eps },
        Method::Derand => TrialAlgorithm::Derandomized { alpha: choice.alpha },
    };
    let seed = match r.method {
        Method::Derand => r.seed.unwrap_or(0),
        _ => need_seed(r.seed, "trials")?,
    };
    let stats = trial_harness(&inst, &x, algo, a.trials, seed)?;
    write_json(a.common.output.as_deref(), &stats)?;
    Ok(0)
}
