//! Command-line front end: argument definitions, table builders for every
//! subcommand, and CSV/JSON writers.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::asymptotics::{fit_rate, linear_grid, log_grid, sweep_tvd};
use crate::covert_power::{p_exact, p_nec, p_suf};
use crate::divergences::{tvd_bounds, ChannelPoint};
use crate::mc_oracle::{simulate_test, tvd_quadrature};
use crate::throughput::{
    achievability_full, achievability_na, converse_na, covert_throughput_bounds, ThroughputReport,
};
use crate::tvd::{effective_tau, tvd_exact, tvd_series, TvdEvaluation};
use crate::Error;

/// Environment variable naming the default output directory of `figures`.
pub const OUT_DIR_ENV: &str = "COVERT_TVD_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "covert-tvd",
    version,
    about = "TVD, covert power and throughput for covert AWGN communication"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of stdout (ignored by `figures`).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// TVD at one point.
    Tvd(TvdArgs),
    /// Divergences and TVD bounds at one point.
    Bounds(PointArgs),
    /// Covert power interval for a TVD budget.
    Power(PowerArgs),
    /// Throughput bounds at a given power or TVD budget.
    Throughput(ThroughputArgs),
    /// Exact TVD along θ = n^-τ.
    Sweep(SweepArgs),
    /// Monte Carlo likelihood-ratio test.
    Mc(McArgs),
    /// Fit the rate at which the TVD approaches 0 or 1.
    FitRate(FitArgs),
    /// Write the data behind every figure into a directory.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Blocklength.
    #[arg(long)]
    pub n: u64,
    /// snr θ = p/σ².
    #[arg(long, required_unless_present = "tau", conflicts_with = "tau")]
    pub theta: Option<f64>,
    /// Scaling exponent, θ = n^-τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

impl PointArgs {
    fn point(&self) -> crate::Result<ChannelPoint> {
        match (self.theta, self.tau) {
            (Some(theta), _) => ChannelPoint::new(self.n, self.sigma2, theta),
            (None, Some(tau)) => ChannelPoint::from_tau(self.n, self.sigma2, tau),
            (None, None) => unreachable!("clap enforces one of --theta/--tau"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TvdMethodArg {
    Exact,
    Series,
    Quadrature,
    All,
}

#[derive(Debug, Args)]
pub struct TvdArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value_t = TvdMethodArg::Exact)]
    pub method: TvdMethodArg,
    /// Truncation order of the series.
    #[arg(long, default_value_t = crate::gamma_expansions::DEFAULT_ORDER)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Blocklength.
    #[arg(long)]
    pub n: u64,
    /// TVD budget δ.
    #[arg(long)]
    pub delta: f64,
    /// Noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Args)]
pub struct ThroughputArgs {
    /// Blocklength.
    #[arg(long)]
    pub n: u64,
    /// Decoding error probability.
    #[arg(long)]
    pub eps: f64,
    /// Power constraint P (noise variance 1).
    #[arg(long, required_unless_present = "delta", conflicts_with = "delta")]
    pub power: Option<f64>,
    /// TVD budget δ; evaluates the covert bounds.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Codebook shell parameter.
    #[arg(long, default_value_t = 0.8)]
    pub mu: f64,
    /// τ₀ of the normal-approximation achievability bound (default ε/10).
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Also evaluate the full achievability bound.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Log,
    Linear,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Smallest blocklength.
    #[arg(long, default_value_t = 1000)]
    pub n_min: u64,
    /// Largest blocklength.
    #[arg(long, default_value_t = 100_000)]
    pub n_max: u64,
    /// Number of grid points.
    #[arg(long, default_value_t = 12)]
    pub points: usize,
    /// Grid spacing.
    #[arg(long, value_enum, default_value_t = GridArg::Log)]
    pub grid: GridArg,
}

impl GridArgs {
    fn build(&self) -> crate::Result<Vec<u64>> {
        match self.grid {
            GridArg::Log => log_grid(self.n_min, self.n_max, self.points),
            GridArg::Linear => linear_grid(self.n_min, self.n_max, self.points),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Scaling exponent, θ = n^-τ.
    #[arg(long)]
    pub tau: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Samples per hypothesis.
    #[arg(long, default_value_t = 1_000_000)]
    pub m: u64,
    /// Master seed; the same seed gives identical counts.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Scaling exponent, θ = n^-τ.
    #[arg(long)]
    pub tau: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Output directory; defaults to $COVERT_TVD_OUT_DIR, then ./figures.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Seed for the Monte Carlo validation table (omitted without it).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per hypothesis for the Monte Carlo table.
    #[arg(long, default_value_t = 200_000)]
    pub m: u64,
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl CliError {
    /// 2 for usage, 3 for domain violations, 4 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_internal() => 4,
            CliError::Lib(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // Debug gives the shortest string that parses back to the same bits
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        // avoid printing -0.0
        Cell::Float(v + 0.0)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// A header plus rows, rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv_text))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let records: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect::<serde_json::Map<_, _>>();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &records).map_err(io::Error::other)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn eval_row(p: &ChannelPoint, e: &TvdEvaluation) -> Vec<Cell> {
    vec![
        p.n.into(),
        p.sigma2.into(),
        p.theta.into(),
        effective_tau(p).into(),
        e.method.as_str().into(),
        e.value.into(),
        e.terms_used.into(),
        e.err_estimate.into(),
    ]
}

pub fn tvd_table(args: &TvdArgs) -> crate::Result<Table> {
    let p = args.point.point()?;
    let mut t = Table::new(&[
        "n",
        "sigma2",
        "theta",
        "tau",
        "method",
        "tvd",
        "terms_used",
        "err_estimate",
    ]);
    let m = args.method;
    if matches!(m, TvdMethodArg::Exact | TvdMethodArg::All) {
        t.push(eval_row(&p, &tvd_exact(&p)?));
    }
    if matches!(m, TvdMethodArg::Series | TvdMethodArg::All) {
        t.push(eval_row(&p, &tvd_series(&p, args.order)?));
    }
    if matches!(m, TvdMethodArg::Quadrature | TvdMethodArg::All) {
        t.push(eval_row(&p, &tvd_quadrature(&p)?));
    }
    Ok(t)
}

const BOUNDS_COLUMNS: [&str; 11] = [
    "n",
    "sigma2",
    "theta",
    "tvd_exact",
    "hellinger_sq",
    "sason_upper",
    "sqrt2h_upper",
    "pinsker_upper",
    "kl_exp_upper",
    "kl_fwd_bits",
    "kl_rev_bits",
];

fn bounds_row(p: &ChannelPoint) -> crate::Result<Vec<Cell>> {
    let b = tvd_bounds(p);
    Ok(vec![
        p.n.into(),
        p.sigma2.into(),
        p.theta.into(),
        tvd_exact(p)?.value.into(),
        b.hellinger_sq.into(),
        b.sason_upper.into(),
        b.sqrt2h_upper.into(),
        b.pinsker_upper.into(),
        b.kl_exp_upper.into(),
        b.kl_fwd.into(),
        b.kl_rev.into(),
    ])
}

pub fn bounds_table(args: &PointArgs) -> crate::Result<Table> {
    let mut t = Table::new(&BOUNDS_COLUMNS);
    t.push(bounds_row(&args.point()?)?);
    Ok(t)
}

const POWER_COLUMNS: [&str; 6] = ["n", "delta", "sigma2", "p_suf", "p_exact", "p_nec"];

fn power_row(n: u64, delta: f64, sigma2: f64) -> crate::Result<Vec<Cell>> {
    let iv = p_exact(n, delta, sigma2)?;
    Ok(vec![
        n.into(),
        delta.into(),
        sigma2.into(),
        iv.p_suf.into(),
        iv.p_exact.into(),
        iv.p_nec.into(),
    ])
}

pub fn power_table(args: &PowerArgs) -> crate::Result<Table> {
    let mut t = Table::new(&POWER_COLUMNS);
    t.push(power_row(args.n, args.delta, args.sigma2)?);
    Ok(t)
}

const THROUGHPUT_COLUMNS: [&str; 14] = [
    "n",
    "eps",
    "delta",
    "power",
    "mu",
    "tau0",
    "kind",
    "bits",
    "term_first",
    "term_second",
    "term_logn",
    "term_other",
    "berry_esseen_margin",
    "r_star",
];

pub fn throughput_table(args: &ThroughputArgs) -> crate::Result<Table> {
    let mut t = Table::new(&THROUGHPUT_COLUMNS);
    let tau0 = args.tau0.unwrap_or(args.eps / 10.0);
    let delta = args.delta.unwrap_or(f64::NAN);
    let mut push = |power: f64, tau0: f64, r: &ThroughputReport| {
        t.push(vec![
            args.n.into(),
            args.eps.into(),
            delta.into(),
            power.into(),
            args.mu.into(),
            tau0.into(),
            r.kind.as_str().into(),
            r.bits.into(),
            r.term_first.into(),
            r.term_second.into(),
            r.term_logn.into(),
            r.term_other.into(),
            r.berry_esseen_margin.unwrap_or(f64::NAN).into(),
            r.r_star.unwrap_or(f64::NAN).into(),
        ]);
    };
    // with a TVD budget the converse uses P_NEC and the achievability P_SUF
    let (p_conv, p_ach) = match (args.power, args.delta) {
        (Some(p), _) => (p, p),
        (None, Some(d)) => {
            let (suf, nec) = covert_throughput_bounds(args.n, args.eps, d)?;
            push(f64::NAN, f64::NAN, &suf);
            push(f64::NAN, f64::NAN, &nec);
            (p_nec(args.n, d, 1.0)?, p_suf(args.n, d, 1.0)?)
        }
        (None, None) => unreachable!("clap enforces one of --power/--delta"),
    };
    push(p_conv, f64::NAN, &converse_na(args.n, args.eps, p_conv)?);
    push(p_ach, tau0, &achievability_na(args.n, args.eps, p_ach, args.mu, tau0)?);
    if args.full {
        let r = achievability_full(args.n, args.eps, p_ach, args.mu)?;
        push(p_ach, r.tau0.unwrap_or(f64::NAN), &r);
    }
    Ok(t)
}

pub fn sweep_table(args: &SweepArgs) -> crate::Result<Table> {
    let series = sweep_tvd(args.tau, &args.grid.build()?)?;
    let mut t = Table::new(&["n", "theta", "tvd_exact"]);
    for p in &series.points {
        t.push(vec![p.n.into(), p.theta.into(), p.tvd.into()]);
    }
    Ok(t)
}

const MC_COLUMNS: [&str; 12] = [
    "n",
    "sigma2",
    "theta",
    "samples",
    "seed",
    "threshold",
    "alpha_hat",
    "beta_hat",
    "tvd_mc",
    "std_err",
    "tvd_exact",
    "tvd_quadrature",
];

fn mc_row(p: &ChannelPoint, m: u64, seed: u64) -> crate::Result<Vec<Cell>> {
    let est = simulate_test(p, m, seed)?;
    Ok(vec![
        p.n.into(),
        p.sigma2.into(),
        p.theta.into(),
        m.into(),
        seed.into(),
        est.threshold.into(),
        est.alpha_hat.into(),
        est.beta_hat.into(),
        est.tvd_estimate().into(),
        est.std_err.into(),
        tvd_exact(p)?.value.into(),
        tvd_quadrature(p)?.value.into(),
    ])
}

pub fn mc_table(args: &McArgs) -> crate::Result<Table> {
    let mut t = Table::new(&MC_COLUMNS);
    t.push(mc_row(&args.point.point()?, args.m, args.seed)?);
    Ok(t)
}

pub fn fit_table(args: &FitArgs) -> crate::Result<Table> {
    let series = sweep_tvd(args.tau, &args.grid.build()?)?;
    let fit = fit_rate(&series)?;
    let transform = match fit.transform {
        crate::asymptotics::FitTransform::LogNegLogComplement => "log-neg-log-complement",
        crate::asymptotics::FitTransform::LogLog => "log-log",
    };
    let mut t = Table::new(&[
        "tau",
        "n_min",
        "n_max",
        "points",
        "transform",
        "exponent",
        "prefactor",
        "r_squared",
        "conclusive",
        "expected_low",
        "expected_high",
    ]);
    t.push(vec![
        args.tau.into(),
        args.grid.n_min.into(),
        args.grid.n_max.into(),
        series.points.len().into(),
        transform.into(),
        fit.exponent.into(),
        fit.prefactor.into(),
        fit.r_squared.into(),
        fit.conclusive.into(),
        fit.expected_low.into(),
        fit.expected_high.into(),
    ]);
    Ok(t)
}

fn power_vs_n(delta: f64) -> crate::Result<Table> {
    let mut t = Table::new(&POWER_COLUMNS);
    for n in log_grid(100, 10_000, 25)? {
        t.push(power_row(n, delta, 1.0)?);
    }
    Ok(t)
}

fn power_vs_delta(n: u64) -> crate::Result<Table> {
    let mut t = Table::new(&POWER_COLUMNS);
    for k in 1..=50 {
        t.push(power_row(n, 0.01 * k as f64, 1.0)?);
    }
    Ok(t)
}

fn tvd_vs_n() -> crate::Result<Table> {
    let mut t = Table::new(&["tau", "n", "theta", "tvd_exact"]);
    let grid = log_grid(100, 100_000, 30)?;
    for tau in [0.3, 0.4, 0.5, 0.6, 0.7] {
        for p in sweep_tvd(tau, &grid)?.points {
            t.push(vec![tau.into(), p.n.into(), p.theta.into(), p.tvd.into()]);
        }
    }
    Ok(t)
}

fn bounds_vs_n(tau: f64, series_column: &'static str) -> crate::Result<Table> {
    let mut t = Table::new(&[
        "tau",
        "n",
        "theta",
        "tvd_exact",
        "hellinger_sq",
        "sason_upper",
        "pinsker_upper",
        series_column,
        "series_terms",
    ]);
    for n in log_grid(200, 20_000, 25)? {
        let p = ChannelPoint::from_tau(n, 1.0, tau)?;
        let b = tvd_bounds(&p);
        let s = tvd_series(&p, crate::gamma_expansions::DEFAULT_ORDER)?;
        t.push(vec![
            tau.into(),
            n.into(),
            p.theta.into(),
            tvd_exact(&p)?.value.into(),
            b.hellinger_sq.into(),
            b.sason_upper.into(),
            b.pinsker_upper.into(),
            s.value.into(),
            s.terms_used.into(),
        ]);
    }
    Ok(t)
}

fn mc_validation(seed: u64, m: u64) -> crate::Result<Table> {
    let mut t = Table::new(&MC_COLUMNS);
    for n in [100, 500, 1000, 2000] {
        for theta in [0.05, 0.1] {
            t.push(mc_row(&ChannelPoint::new(n, 1.0, theta)?, m, seed)?);
        }
    }
    Ok(t)
}

/// Every figure table, keyed by file stem.
pub fn figure_tables(seed: Option<u64>, m: u64) -> crate::Result<Vec<(&'static str, Table)>> {
    let mut out = vec![
        ("fig2", power_vs_n(0.1)?),
        ("fig3", power_vs_n(0.01)?),
        ("fig6", power_vs_delta(2000)?),
        ("fig7", tvd_vs_n()?),
        ("fig8", bounds_vs_n(0.3, "series_low_tau")?),
        ("fig9", bounds_vs_n(0.7, "series_high_tau")?),
    ];
    if let Some(seed) = seed {
        out.push(("mc_validation", mc_validation(seed, m)?));
    }
    Ok(out)
}

fn figures_dir(args: &FiguresArgs) -> PathBuf {
    args.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("figures"))
}

fn write_table(table: &Table, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => table.write(format, io::BufWriter::new(fs::File::create(path)?)),
        None => table.write(format, io::stdout().lock()),
    }
}

/// Execute one parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let table = match &cli.command {
        Command::Tvd(a) => tvd_table(a)?,
        Command::Bounds(a) => bounds_table(a)?,
        Command::Power(a) => power_table(a)?,
        Command::Throughput(a) => throughput_table(a)?,
        Command::Sweep(a) => sweep_table(a)?,
        Command::Mc(a) => mc_table(a)?,
        Command::FitRate(a) => fit_table(a)?,
        Command::Figures(a) => {
            if a.m == 0 {
                return Err(CliError::Usage("--m must be positive".into()));
            }
            let dir = figures_dir(a);
            fs::create_dir_all(&dir)?;
            for (stem, table) in figure_tables(a.seed, a.m)? {
                let path = dir.join(format!("{stem}.{}", cli.format.extension()));
                write_table(&table, cli.format, Some(&path))?;
                println!("{}", path.display());
            }
            return Ok(());
        }
    };
    write_table(&table, cli.format, cli.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("covert-tvd").chain(args.iter().copied()))
    }

    fn render(t: &Table, f: Format) -> String {
        let mut buf = Vec::new();
        t.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn tvd_prints_quarter() {
        let cli = parse(&["tvd", "--n", "2", "--theta", "1"]).unwrap();
        let Command::Tvd(a) = &cli.command else { panic!() };
        let text = render(&tvd_table(a).unwrap(), Format::Csv);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row.split(',').nth(5), Some("0.25"));
    }

    #[test]
    fn theta_and_tau_are_exclusive() {
        let err = parse(&["tvd", "--n", "2", "--theta", "1", "--tau", "0.5"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(parse(&["tvd", "--n", "2"]).is_err());
        assert!(parse(&["throughput", "--n", "2", "--eps", "0.1"]).is_err());
    }

    #[test]
    fn domain_violation_maps_to_three() {
        let cli = parse(&["tvd", "--n", "0", "--theta", "1"]).unwrap();
        assert_eq!(run(&cli).unwrap_err().exit_code(), 3);
        assert_eq!(CliError::Lib(Error::Bracket("x".into())).exit_code(), 4);
    }

    #[test]
    fn sweep_schema() {
        let cli = parse(&[
            "sweep", "--tau", "0.5", "--n-min", "1000", "--n-max", "100000", "--points", "12",
        ])
        .unwrap();
        let Command::Sweep(a) = &cli.command else { panic!() };
        let t = sweep_table(a).unwrap();
        assert_eq!(t.columns, vec!["n", "theta", "tvd_exact"]);
        assert_eq!(t.rows.len(), 12);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut t = Table::new(&["x"]);
        let values = [0.1 + 0.2, 1.0 / 3.0, 1e-300, 123_456.789_012_345_67];
        for v in values {
            t.push(vec![v.into()]);
        }
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&render(&t, Format::Json)).unwrap();
        for (p, v) in parsed.iter().zip(values) {
            assert_eq!(p["x"].as_f64().unwrap().to_bits(), v.to_bits());
        }
        let csv = render(&t, Format::Csv);
        for (line, v) in csv.lines().skip(1).zip(values) {
            assert_eq!(line.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn throughput_rows_by_budget() {
        let cli = parse(&["throughput", "--n", "2000", "--eps", "0.001", "--delta", "0.1"]).unwrap();
        let Command::Throughput(a) = &cli.command else { panic!() };
        let t = throughput_table(a).unwrap();
        let kinds: Vec<_> = t.rows.iter().map(|r| r[6].clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Cell::from("covert-suf"),
                Cell::from("covert-nec"),
                Cell::from("converse-na"),
                Cell::from("achievability-na")
            ]
        );
    }
}
