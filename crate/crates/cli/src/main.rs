//! Command-line driver: builds spaces and block-sum triples, runs the
//! analyses, and emits reproducible report files.
//!
//! Exit status: 0 when every enabled check passes, 1 when a check found
//! violations, 2 for usage or configuration errors.

// validation guards are written `!(x > 0.0)` so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod funcs;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{
    AnalysesConfig, ConstructionConfig, DixmierConfig, IntervalExampleConfig, OutputConfig,
    RunConfig, SpaceConfig, SweepConfig, ZetaConfig,
};
use diracsum_core::interval::{build_interval_st9, example_report, NamedFunction};
use diracsum_core::*;

#[derive(Parser)]
#[command(name = "diracsum", version, about = "Two-point Dirac block sums over finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the space and construction, print a summary.
    Build(CommonArgs),
    /// Induced-metric recovery report.
    Metric(CommonArgs),
    /// Eigenvalue histogram of |D|.
    Spectrum(CommonArgs),
    /// Counting function N(Lambda) over a window.
    Sweep(SweepArgs),
    /// Zeta traces tr |D|^-s or tr (I+D^2)^(-s/2).
    Zeta(ZetaArgs),
    /// Logarithmic-average trace estimates.
    Dixmier(DixmierArgs),
    /// The unit-interval construction at delta = 9: items (a)-(e).
    IntervalExample(ExampleArgs),
    /// Run a full configuration file.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Space: interval:M | cantor:LEVEL | cloud:NxDIM | file:PATH
    #[arg(long)]
    space: Option<String>,
    /// File-space format.
    #[arg(long, value_parser = ["matrix", "cloud"])]
    space_format: Option<String>,
    /// File space has a header row.
    #[arg(long)]
    header: bool,
    /// Construction: st-d | st-delta
    #[arg(long, value_parser = ["st-d", "st-delta"])]
    construction: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long)]
    n_max: Option<u32>,
    /// Covering net: greedy | structured
    #[arg(long, default_value = "greedy", value_parser = ["greedy", "structured"])]
    net: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for report files.
    #[arg(long, default_value = ".")]
    out: String,
    /// Report file format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "tsv"])]
    format: String,
    /// Also write the module list (level, x, y, d, diag).
    #[arg(long)]
    dump_triple: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    lambda_min: f64,
    #[arg(long)]
    lambda_max: f64,
    #[arg(long, default_value_t = 16)]
    points_per_octave: u32,
}

#[derive(Args)]
struct ZetaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<f64>,
    #[arg(long, default_value = "abs", value_parser = ["abs", "resolvent"])]
    zeta_form: String,
}

#[derive(Args)]
struct DixmierArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Test functions, comma separated (see --list).
    #[arg(long, value_delimiter = ',')]
    functions: Vec<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// (x, f(x)) CSV backing the user-table function.
    #[arg(long)]
    table: Option<PathBuf>,
    /// List the available test functions and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(long, default_value_t = 16)]
    n_max: u32,
    #[arg(long, default_value_t = 512.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 8192.0)]
    lambda_max: f64,
    #[arg(long, value_delimiter = ',', default_values_t = ["const1".to_string(), "linear".to_string(), "square".to_string()])]
    functions: Vec<String>,
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: String,
    #[arg(long, default_value = "csv", value_parser = ["csv", "tsv"])]
    format: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Configuration file (TOML, key = value sections).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<String>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(violations) => {
            if violations {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Ok(true) means the run completed but a check found violations.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build(args) => execute(args.to_config(Enable::none())?),
        Command::Metric(args) => execute(args.to_config(Enable::metric())?),
        Command::Spectrum(args) => execute(args.to_config(Enable::spectrum())?),
        Command::Sweep(args) => {
            let mut enable = Enable::none();
            enable.sweep = Some(SweepConfig {
                lambda_min: args.lambda_min,
                lambda_max: args.lambda_max,
                points_per_octave: args.points_per_octave,
            });
            execute(args.common.to_config(enable)?)
        }
        Command::Zeta(args) => {
            let mut enable = Enable::none();
            enable.zeta = Some(ZetaConfig {
                s: args.s.clone(),
                form: args.zeta_form.clone(),
            });
            execute(args.common.to_config(enable)?)
        }
        Command::Dixmier(args) => {
            if args.list {
                println!("{}", funcs::list());
                return Ok(false);
            }
            let lambda = args
                .lambda
                .ok_or_else(|| anyhow!("--lambda is required (or use --list)"))?;
            if args.functions.is_empty() {
                bail!("--functions is required (or use --list)");
            }
            let mut enable = Enable::none();
            enable.dixmier = Some(DixmierConfig {
                functions: args.functions.clone(),
                lambda,
                table: args.table.as_ref().map(|p| p.display().to_string()),
            });
            execute(args.common.to_config(enable)?)
        }
        Command::IntervalExample(args) => {
            let config = RunConfig {
                seed: 0,
                space: None,
                construction: None,
                analyses: AnalysesConfig {
                    interval_example: Some(IntervalExampleConfig {
                        n_max: args.n_max,
                        lambda_min: args.lambda_min,
                        lambda_max: args.lambda_max,
                        functions: args.functions.clone(),
                    }),
                    ..Default::default()
                },
                output: OutputConfig {
                    dir: args.out.clone(),
                    format: args.format.clone(),
                    ..Default::default()
                },
            };
            config.validate()?;
            execute_with_table(config, args.table.as_deref())
        }
        Command::Report(args) => {
            let mut config = RunConfig::load(&args.config)?;
            if let Some(out) = args.out {
                config.output.dir = out;
            }
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            config.validate()?;
            execute(config)
        }
    }
}

/// Which analyses a subcommand turns on.
struct Enable {
    metric: bool,
    spectrum: bool,
    sweep: Option<SweepConfig>,
    zeta: Option<ZetaConfig>,
    dixmier: Option<DixmierConfig>,
}

impl Enable {
    fn none() -> Self {
        Self {
            metric: false,
            spectrum: false,
            sweep: None,
            zeta: None,
            dixmier: None,
        }
    }
    fn metric() -> Self {
        Self {
            metric: true,
            ..Self::none()
        }
    }
    fn spectrum() -> Self {
        Self {
            spectrum: true,
            ..Self::none()
        }
    }
}

impl CommonArgs {
    fn to_config(&self, enable: Enable) -> Result<RunConfig> {
        let space_spec = self
            .space
            .as_deref()
            .ok_or_else(|| anyhow!("--space is required"))?;
        let space = parse_space_spec(space_spec, self.space_format.as_deref(), self.header)?;
        let construction = self.construction.as_deref().map(|kind| ConstructionConfig {
            kind: kind.to_string(),
            theta: self.theta,
            rho: self.rho,
            delta: self.delta,
            n_min: self.n_min,
            n_max: self.n_max,
            net: self.net.clone(),
        });
        let config = RunConfig {
            seed: self.seed,
            space: Some(space),
            construction,
            analyses: AnalysesConfig {
                metric: enable.metric,
                spectrum: enable.spectrum,
                sweep: enable.sweep,
                zeta: enable.zeta,
                dixmier: enable.dixmier,
                interval_example: None,
            },
            output: OutputConfig {
                dir: self.out.clone(),
                format: self.format.clone(),
                dump_triple: self.dump_triple,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_space_spec(spec: &str, format: Option<&str>, header: bool) -> Result<SpaceConfig> {
    let mut out = SpaceConfig {
        kind: String::new(),
        m: None,
        level: None,
        n: None,
        dim: None,
        path: None,
        format: None,
        header,
    };
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("space spec {spec:?} must be kind:params"))?;
    match kind {
        "interval" | "interval-grid" => {
            out.kind = "interval-grid".into();
            out.m = Some(rest.parse().context("interval point count")?);
        }
        "cantor" => {
            out.kind = "cantor".into();
            out.level = Some(rest.parse().context("cantor level")?);
        }
        "cloud" => {
            out.kind = "cloud".into();
            let (n, dim) = rest.split_once('x').unwrap_or((rest, "2"));
            out.n = Some(n.parse().context("cloud point count")?);
            out.dim = Some(dim.parse().context("cloud dimension")?);
        }
        "file" => {
            out.kind = "file".into();
            out.path = Some(rest.to_string());
            out.format = Some(format.unwrap_or("matrix").to_string());
        }
        other => bail!("unknown space kind {other:?}"),
    }
    Ok(out)
}

fn execute(config: RunConfig) -> Result<bool> {
    execute_with_table(config, None)
}

/// Runs every enabled analysis; returns whether any check found
/// violations. File outputs carry the hash of the effective config so a
/// report is traceable to its run.
fn execute_with_table(config: RunConfig, table: Option<&Path>) -> Result<bool> {
    let emitter = Emitter::new(&config)?;
    let mut violations = false;

    // a configured space is always built and validated, even when the
    // enabled analyses do not consume it
    let mut space = None;
    if config.space.is_some() {
        let s = build_space(&config)?;
        println!(
            "space: {} ({} points, diameter {})",
            s.label(),
            s.len(),
            s.diameter()
        );
        space = Some(s);
    }

    let triple = match (&config.construction, &space) {
        (Some(c), Some(s)) => Some(build_triple(c, s)?),
        _ => None,
    };
    if let Some(st) = &triple {
        let c = config.construction.as_ref().unwrap();
        match st.params() {
            Some(p) => println!(
                "construction: {} with theta={}, rho={}, delta={}, k0={}, l={}, levels {}..{}: {} modules",
                c.kind, p.theta, p.rho, p.delta, p.k0, p.interaction_length, p.n_min, p.n_max,
                st.modules().len()
            ),
            None => println!("construction: {} with {} modules", c.kind, st.modules().len()),
        }
        if config.output.dump_triple {
            let mut body = String::new();
            for line in st.dump_lines() {
                body.push_str(&line);
                body.push('\n');
            }
            emitter.write_raw("triple", "level\tx\ty\td\tdiag", &body)?;
        }
    }

    if config.analyses.metric {
        let st = triple
            .as_ref()
            .ok_or_else(|| anyhow!("analyses.metric requires a construction"))?;
        let space = space.as_ref().expect("construction implies a space");
        let mode = match st.params() {
            Some(p) => ReportMode::Sandwich { delta: p.delta },
            None => ReportMode::Exact,
        };
        let report = metric_report(st, mode)?;
        let mut body = String::new();
        for (s, t, d, ind, ratio) in report.table_rows(space) {
            writeln!(
                body,
                "{s}{d0}{t}{d0}{d1}{d0}{d2}{d0}{d3}",
                d0 = emitter.delim,
                d1 = fmt_f(d),
                d2 = fmt_f(ind),
                d3 = fmt_f(ratio)
            )?;
        }
        writeln!(body, "# min_ratio{}{}", emitter.delim, fmt_f(report.min_ratio))?;
        writeln!(body, "# max_ratio{}{}", emitter.delim, fmt_f(report.max_ratio))?;
        writeln!(body, "# violations{}{}", emitter.delim, report.violations.len())?;
        emitter.write_rows("metric", &["s-id", "t-id", "d", "d_induced", "ratio"], &body)?;
        println!(
            "metric: ratios [{:.9}, {:.9}], {} violations",
            report.min_ratio,
            report.max_ratio,
            report.violations.len()
        );
        violations |= !report.passed();
    }

    if config.analyses.spectrum {
        let st = triple
            .as_ref()
            .ok_or_else(|| anyhow!("analyses.spectrum requires a construction"))?;
        let hist = spectrum(st)?;
        let mut body = String::new();
        for (v, mult) in hist.entries() {
            writeln!(body, "{}{}{}", fmt_f(v.value()), emitter.delim, mult)?;
        }
        emitter.write_rows("spectrum", &["value", "multiplicity"], &body)?;
        println!(
            "spectrum: {} distinct |D| eigenvalues, total multiplicity {} (symmetric +/- pairs in D)",
            hist.entries().len(),
            hist.total_multiplicity()
        );
    }

    if let Some(sweep_cfg) = &config.analyses.sweep {
        let st = triple
            .as_ref()
            .ok_or_else(|| anyhow!("analyses.sweep requires a construction"))?;
        let hist = spectrum(st)?;
        let sweep = counting_sweep(
            &hist,
            sweep_cfg.lambda_min,
            sweep_cfg.lambda_max,
            sweep_cfg.points_per_octave,
        )?;
        let mut body = String::new();
        for s in &sweep.samples {
            writeln!(
                body,
                "{}{d}{}{d}{}",
                fmt_f(s.lambda),
                s.count,
                fmt_f(s.ratio),
                d = emitter.delim
            )?;
        }
        writeln!(body, "# min_ratio{}{}", emitter.delim, fmt_f(sweep.min_ratio))?;
        writeln!(body, "# max_ratio{}{}", emitter.delim, fmt_f(sweep.max_ratio))?;
        emitter.write_rows("sweep", &["lambda", "count", "ratio"], &body)?;
        println!(
            "sweep: N(Lambda)/Lambda in [{:.4}, {:.4}] over [{}, {}]",
            sweep.min_ratio, sweep.max_ratio, sweep_cfg.lambda_min, sweep_cfg.lambda_max
        );
    }

    if let Some(zeta_cfg) = &config.analyses.zeta {
        let st = triple
            .as_ref()
            .ok_or_else(|| anyhow!("analyses.zeta requires a construction"))?;
        let hist = spectrum(st)?;
        let form = match zeta_cfg.form.as_str() {
            "abs" => ZetaForm::Abs,
            _ => ZetaForm::Resolvent,
        };
        let probes = summability_probe(st, &zeta_cfg.s).ok();
        let mut body = String::new();
        for (idx, &s) in zeta_cfg.s.iter().enumerate() {
            let value = zeta(&hist, s, form)?;
            let tail = probes
                .as_ref()
                .map(|p| fmt_f(p[idx].tail_ratio))
                .unwrap_or_default();
            writeln!(
                body,
                "{}{d}{}{d}{}{d}{}",
                fmt_f(s),
                zeta_cfg.form,
                fmt_f(value),
                tail,
                d = emitter.delim
            )?;
            println!("zeta: s={s} {} = {}", zeta_cfg.form, value);
        }
        emitter.write_rows("zeta", &["s", "form", "value", "tail_ratio"], &body)?;
    }

    if let Some(dix) = &config.analyses.dixmier {
        let st = triple
            .as_ref()
            .ok_or_else(|| anyhow!("analyses.dixmier requires a construction"))?;
        let space = space.as_ref().expect("construction implies a space");
        let table_path = table
            .map(Path::to_path_buf)
            .or_else(|| dix.table.as_ref().map(PathBuf::from));
        let mut body = String::new();
        for name in &dix.functions {
            let nf = funcs::resolve(name, table_path.as_deref())?;
            let values = one_d_values(space, &nf)?;
            let estimate = dixmier_estimate(st, &values, dix.lambda)?;
            writeln!(
                body,
                "{}{d}{}{d}{}",
                nf.name,
                fmt_f(dix.lambda),
                fmt_f(estimate),
                d = emitter.delim
            )?;
            println!("dixmier: {} at lambda={}: {}", nf.name, dix.lambda, estimate);
        }
        emitter.write_rows("dixmier", &["function", "lambda", "estimate"], &body)?;
    }

    if let Some(ex) = &config.analyses.interval_example {
        let functions: Vec<NamedFunction> = ex
            .functions
            .iter()
            .map(|name| funcs::resolve(name, table))
            .collect::<Result<_>>()?;
        let report = example_report(ex.n_max, (ex.lambda_min, ex.lambda_max), &functions)?;
        let mut summary = String::new();
        for item in &report.items {
            let status = match item.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "info",
            };
            writeln!(summary, "{}{}{}", item.key, emitter.delim, status)?;
            let mut body = String::new();
            for line in &item.lines {
                writeln!(body, "{line}")?;
            }
            emitter.write_raw(
                &format!("item_{}", item.key),
                &format!("# item ({}): {status}", item.key),
                &body,
            )?;
            println!("item ({}): {status}", item.key);
            for line in &item.lines {
                println!("  {line}");
            }
        }
        emitter.write_rows("example_summary", &["item", "status"], &summary)?;
        violations |= !report.all_pass();

        let t = build_interval_st9(ex.n_max)?;
        let hist = t.histogram();
        let mut body = String::new();
        for (v, mult) in hist.entries() {
            writeln!(body, "{}{}{}", fmt_f(v.value()), emitter.delim, mult)?;
        }
        emitter.write_rows("spectrum", &["value", "multiplicity"], &body)?;
    }

    Ok(violations)
}

fn build_space(config: &RunConfig) -> Result<Arc<FiniteMetricSpace>> {
    let s = config
        .space
        .as_ref()
        .ok_or_else(|| anyhow!("space section required by the enabled analyses"))?;
    let space = match s.kind.as_str() {
        "interval-grid" => FiniteMetricSpace::interval_grid(s.m.unwrap())?,
        "cantor" => FiniteMetricSpace::cantor(s.level.unwrap())?,
        "cloud" => FiniteMetricSpace::random_cloud(s.n.unwrap(), s.dim.unwrap_or(2), config.seed)?,
        "file" => {
            let format = match s.format.as_deref() {
                Some("cloud") => InputFormat::PointCloud,
                _ => InputFormat::DistanceMatrix,
            };
            FiniteMetricSpace::load(Path::new(s.path.as_ref().unwrap()), format, s.header)?
        }
        _ => unreachable!("validated"),
    };
    Ok(Arc::new(space))
}

fn build_triple(c: &ConstructionConfig, space: &Arc<FiniteMetricSpace>) -> Result<SpectralTripleSum> {
    match c.kind.as_str() {
        "st-d" => Ok(build_st_d(space.clone())?),
        "st-delta" => {
            let n_max = c.n_max.unwrap();
            let strategy = match c.net.as_str() {
                "structured" => NetStrategy::Structured,
                _ => NetStrategy::Greedy,
            };
            let chain = covering_chain(space, c.theta, c.rho, n_max + 1, strategy)?;
            Ok(build_st_delta(
                space.clone(),
                &chain,
                c.delta.unwrap(),
                c.n_min,
                n_max,
            )?)
        }
        _ => unreachable!("validated"),
    }
}

/// f evaluated at every point of a 1-D space.
fn one_d_values(space: &FiniteMetricSpace, nf: &NamedFunction) -> Result<Vec<f64>> {
    (0..space.len())
        .map(|i| {
            if let Some(x) = space.position(i) {
                Ok((nf.f)(x))
            } else if let Some(coords) = space.coords(i) {
                if coords.len() == 1 {
                    Ok((nf.f)(coords[0]))
                } else {
                    bail!(
                        "test functions are defined on [0,1]; space is {}-dimensional",
                        coords.len()
                    )
                }
            } else {
                bail!("space carries no coordinates; test functions need 1-D positions")
            }
        })
        .collect()
}

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else {
        format!("{v}")
    }
}

struct Emitter {
    dir: PathBuf,
    delim: char,
    extension: &'static str,
    config_hash: String,
}

impl Emitter {
    fn new(config: &RunConfig) -> Result<Self> {
        let dir = PathBuf::from(&config.output.dir);
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("creating output dir {}", dir.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(config.analysis_toml().as_bytes());
        let config_hash = format!("{:x}", hasher.finalize());
        let (delim, extension) = match config.output.format.as_str() {
            "tsv" => ('\t', "tsv"),
            _ => (',', "csv"),
        };
        Ok(Self {
            dir,
            delim,
            extension,
            config_hash,
        })
    }

    fn header(&self, columns: &str) -> String {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!(
            "# config-hash: {}\n# generated: {now}\n{columns}\n",
            self.config_hash
        )
    }

    fn write_rows(&self, name: &str, columns: &[&str], body: &str) -> Result<()> {
        let cols = columns.join(&self.delim.to_string());
        self.write_raw(name, &cols, body)
    }

    fn write_raw(&self, name: &str, columns: &str, body: &str) -> Result<()> {
        let path = self.dir.join(format!("{name}.{}", self.extension));
        let content = format!("{}{body}", self.header(columns));
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
