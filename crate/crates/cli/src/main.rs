use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use blockmass::exactnum::{parse_rational, rational_to_string};
use blockmass::genfun::ClosedForms;
use blockmass::kempner::{
    check_limit_bound, enclose_sum, histogram_csv, measure_histogram, measure_interval,
    BimalInterval, EncloseOptions, LimitVerdict,
};
use blockmass::words::{admissible_counts, CAP_ENV_VAR};
use blockmass::{
    autocorrelation, prefix_mass, stratified_gf, verify_block, Block, DigitString, EnumerationCap,
    VerifyConfig,
};

#[derive(Parser)]
#[command(
    name = "blockmass",
    version,
    about = "Exact block-occurrence generating functions, masses and harmonic sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Autocorrelation coefficients c_0 .. c_(p-1).
    Autocorr(Common),
    /// Closed-form generating function.
    Genfun(GenfunArgs),
    /// Series coefficients N_w(k, l) for l = 0 .. maxlen.
    Coeffs(CoeffsArgs),
    /// Total mass M_w(k), or the mass of strings with a given prefix.
    Mass(MassArgs),
    /// mu_k of a b-imal interval, or the histogram at a resolution as CSV.
    Measure(MeasureArgs),
    /// Certified enclosure of S_w(k).
    Sum(SumArgs),
    /// Distance between S_w(k) and b^p log(b) against the limit bound.
    Limit(SumArgs),
    /// All exact checks for one block; exit 1 on failure.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    base: u32,
    /// Digits, compact (`942`) for b <= 10 or comma-separated (`4,11,0`).
    #[arg(long)]
    block: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest number of strings an enumeration may visit.
    #[arg(long, env = CAP_ENV_VAR)]
    cap: Option<u64>,
}

impl Common {
    fn block(&self) -> anyhow::Result<Block> {
        Block::parse(self.base, &self.block)
            .with_context(|| format!("invalid block {:?}", self.block))
    }

    fn cap(&self) -> EnumerationCap {
        self.cap.map(EnumerationCap).unwrap_or_default()
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    /// Z_w(k).
    K,
    /// Z_w(v, 0).
    V0,
    /// t^(2-p) Z_w(v, 0, u).
    Loop,
}

#[derive(Args)]
struct GenfunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, value_enum, default_value = "k")]
    series: Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Closed,
    Automaton,
    Enumeration,
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long)]
    maxlen: usize,
    #[arg(long, value_enum, default_value = "closed")]
    source: Source,
}

#[derive(Args)]
struct MassArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: u32,
    /// Restrict to strings starting with these digits.
    #[arg(long)]
    prefix: Option<String>,
    /// Exit 1 unless the mass equals this rational.
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: u32,
    /// Left endpoint, `n/d` or `n/b^l`.
    #[arg(long, requires = "to", conflicts_with = "resolution")]
    from: Option<String>,
    #[arg(long, requires = "from")]
    to: Option<String>,
    /// Emit every cell `[i/b^l, (i+1)/b^l)` instead of one interval.
    #[arg(long)]
    resolution: Option<u32>,
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct SumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    depth: usize,
    /// Fractional bits of the bounds.
    #[arg(long, default_value_t = 128)]
    precision: u32,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Exit 1 unless the enclosure contains this rational.
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    #[arg(long, default_value_t = 10)]
    maxlen: usize,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = 128)]
    precision: u32,
    #[arg(long)]
    threads: Option<usize>,
    /// Flip this autocorrelation coefficient before building the closed forms.
    #[arg(long)]
    mutate_correlation: Option<usize>,
}

enum Outcome {
    Ok,
    Failed,
}

fn print_value(format: Format, value: serde_json::Value, text: String) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text | Format::Csv => println!("{text}"),
    }
}

fn check_expect(
    expect: &Option<String>,
    ok: impl Fn(&blockmass::BigRational) -> bool,
) -> anyhow::Result<Outcome> {
    let Some(text) = expect else {
        return Ok(Outcome::Ok);
    };
    let target = parse_rational(text).with_context(|| format!("invalid --expect {text:?}"))?;
    if ok(&target) {
        Ok(Outcome::Ok)
    } else {
        eprintln!("expectation {text} not met");
        Ok(Outcome::Failed)
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> anyhow::Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(f)),
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Autocorr(c) => {
            let corr = autocorrelation(&c.block()?);
            let bits: Vec<u8> = corr.coefficients().iter().map(|&x| x as u8).collect();
            print_value(
                c.format(Format::Json),
                json!(bits),
                corr.polynomial().to_string(),
            );
        }
        Command::Genfun(a) => {
            let closed = ClosedForms::for_block(&a.common.block()?);
            let f = match a.series {
                Series::K => closed.k(a.k)?,
                Series::V0 => closed.v0()?,
                Series::Loop => closed.loop_factor()?,
            };
            print_value(a.common.format(Format::Json), f.to_json(), f.to_string());
        }
        Command::Coeffs(a) => {
            let w = a.common.block()?;
            let counts: Vec<String> = match a.source {
                Source::Closed => ClosedForms::for_block(&w)
                    .k(a.k)?
                    .series(a.maxlen)?
                    .iter()
                    .map(rational_to_integer_text)
                    .collect(),
                Source::Automaton => stratified_gf(&w, a.k)?
                    .series(a.maxlen)?
                    .iter()
                    .map(rational_to_integer_text)
                    .collect(),
                Source::Enumeration => admissible_counts(&w, a.maxlen, a.common.cap())?
                    .series(a.k as usize)
                    .iter()
                    .map(u64::to_string)
                    .collect(),
            };
            print_value(
                a.common.format(Format::Text),
                json!(counts),
                counts.join(","),
            );
        }
        Command::Mass(a) => {
            let w = a.common.block()?;
            let m = match &a.prefix {
                None => ClosedForms::for_block(&w).mass(a.k)?,
                Some(s) => prefix_mass(&w, &DigitString::parse(w.base(), s)?, a.k)?,
            };
            let text = rational_to_string(&m);
            print_value(a.common.format(Format::Text), json!(text), text.clone());
            return check_expect(&a.expect, |t| *t == m);
        }
        Command::Measure(a) => {
            let w = a.common.block()?;
            let cap = a.common.cap();
            if let Some(l) = a.resolution {
                let cells = measure_histogram(&w, a.k, l, cap)?;
                print!("{}", histogram_csv(&cells, w.base(), l));
                return Ok(Outcome::Ok);
            }
            let (Some(from), Some(to)) = (&a.from, &a.to) else {
                bail!("give either --from and --to, or --resolution");
            };
            let interval = BimalInterval::parse(w.base(), from, to)?;
            let m = measure_interval(&w, a.k, &interval, cap)?;
            let text = rational_to_string(&m);
            print_value(
                a.common.format(Format::Text),
                json!({ "interval": interval.to_string(), "mass": text }),
                text.clone(),
            );
            return check_expect(&a.expect, |t| *t == m);
        }
        Command::Sum(a) => {
            let w = a.common.block()?;
            let options = EncloseOptions {
                frac_bits: a.precision,
                cap: a.common.cap(),
            };
            let e = with_threads(a.threads, || enclose_sum(&w, a.k, a.depth, &options))??;
            print_value(a.common.format(Format::Json), e.to_json(), e.to_string());
            return check_expect(&a.expect, |t| e.contains(t));
        }
        Command::Limit(a) => {
            let w = a.common.block()?;
            let options = EncloseOptions {
                frac_bits: a.precision,
                cap: a.common.cap(),
            };
            let r = with_threads(a.threads, || check_limit_bound(&w, a.k, a.depth, &options))??;
            let text = format!(
                "{}: gap in [{}, {}], bound {}",
                r.verdict.name(),
                r.gap_lower,
                r.gap_upper,
                r.bound
            );
            print_value(a.common.format(Format::Json), r.to_json(), text);
            if r.verdict == LimitVerdict::Violated {
                return Ok(Outcome::Failed);
            }
        }
        Command::Verify(a) => {
            let w = a.common.block()?;
            let config = VerifyConfig {
                kmax: a.kmax,
                max_len: a.maxlen,
                depth: a.depth,
                frac_bits: a.precision,
                cap: a.common.cap(),
                mutate: a.mutate_correlation,
            };
            let report = with_threads(a.threads, || verify_block(&w, &config))??;
            let text = report
                .checks
                .iter()
                .map(|c| {
                    format!("{:?} {} {}", c.status, c.name, c.detail)
                        .trim_end()
                        .to_string()
                })
                .collect::<Vec<_>>()
                .join("\n");
            print_value(a.common.format(Format::Json), report.to_json(), text);
            if !report.passed {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn rational_to_integer_text(q: &blockmass::BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        rational_to_string(q)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
