use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use thetal::harness::{self, format_f64, format_real, GridPoint, OutputFormat, RunConfig, Status, REGISTRY};
use thetal::hyper::{kdf, parse_param, pfq, KdfSpec, KdfStrategy, PfqSpec};
use thetal::lvalues::{dirichlet_sum, l_value, FormId, LValueMethod};
use thetal::theta::{
    alpha, coeffs_convolution, coeffs_lambert, eisenstein_m, form_value, theta, Nome, ThetaKind,
};
use thetal::{PrecisionContext, Real};

#[derive(Parser)]
#[command(name = "thetal", version, about = "Theta products, hypergeometric series and L-value verification")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Decimal digits of the result.
    #[arg(long, global = true, env = "THETAL_DIGITS", default_value_t = 20)]
    digits: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for `verify`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Term budget for series and sums.
    #[arg(long, global = true)]
    max_terms: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaFn {
    Theta2,
    Theta3,
    Theta4,
    F,
    G,
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Convolution,
    Lambert,
}

#[derive(Subcommand)]
enum Command {
    /// A theta series, one of the forms f, g, or M(q).
    Theta {
        #[arg(long = "fn", value_enum)]
        function: ThetaFn,
        /// Nome in (0,1), a decimal or `e^-pi`.
        #[arg(long)]
        q: GridPoint,
    },
    /// α = θ2⁴/θ3⁴ at q.
    Alpha {
        #[arg(long)]
        q: GridPoint,
    },
    /// p+1Fp(upper; lower; z).
    Pfq {
        /// Comma-separated upper parameters, e.g. `1/2,1/2`.
        #[arg(long, allow_hyphen_values = true)]
        upper: String,
        #[arg(long, allow_hyphen_values = true)]
        lower: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Kampé de Fériet series F(a;c | b;d | b';d' ; x, y).
    Kdf {
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        bp: String,
        #[arg(long)]
        dp: String,
        #[arg(long, default_value = "1")]
        x: String,
        #[arg(long, default_value = "1")]
        y: String,
        /// integral_reduction, iterated, double_truncate or double_truncate:<M>.
        #[arg(long, default_value = "integral_reduction")]
        strategy: KdfStrategy,
    },
    /// L(form, s) for s = 3, 4.
    Lvalue {
        #[arg(long)]
        form: FormId,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "mellin")]
        method: LValueMethod,
        /// Fixed number of Dirichlet terms (dirichlet_sum only).
        #[arg(long)]
        terms: Option<usize>,
    },
    /// q-expansion coefficients a_1..a_N.
    Coeffs {
        #[arg(long)]
        form: FormId,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Oracle::Convolution)]
        oracle: Oracle,
    },
    /// Check identities from the registry.
    Verify {
        /// Comma-separated identity ids.
        #[arg(long, value_delimiter = ',', conflicts_with = "all")]
        id: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Comma-separated nomes for the pointwise identities.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<GridPoint>,
        /// Override every identity's target digits.
        #[arg(long)]
        target: Option<u32>,
        #[arg(long, default_value = "integral_reduction")]
        kdf_strategy: KdfStrategy,
        /// Report zero wall time so output is reproducible.
        #[arg(long)]
        no_timings: bool,
    },
    /// List the registered identities.
    List,
}

/// `println!` that returns the write error instead of panicking, so a closed pipe ends the run quietly.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(io::stdout().lock(), $($arg)*)?
    };
}

fn context(common: &Common) -> Result<PrecisionContext> {
    let ctx = PrecisionContext::new(common.digits)?;
    Ok(match common.max_terms {
        Some(m) => ctx.with_max_terms(m)?,
        None => ctx,
    })
}

fn param_list(s: &str) -> Result<Vec<rug::Rational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(s.split(',').map(parse_param).collect::<thetal::Result<_>>()?)
}

fn emit_value(common: &Common, value: &Real, extra: Value) -> io::Result<()> {
    let text = format_real(value, common.digits);
    match common.format {
        Format::Text => out!("{text}"),
        Format::Json => {
            let mut obj = json!({ "value": text, "digits": common.digits });
            if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
                o.extend(e);
            }
            out!("{obj}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match cli.command {
        Command::Theta { function, q } => {
            let ctx = context(common)?;
            let nome = Nome::new(&q.to_real(&ctx)?, &ctx)?;
            let v = match function {
                ThetaFn::Theta2 => theta(&nome, ThetaKind::Theta2, &ctx)?,
                ThetaFn::Theta3 => theta(&nome, ThetaKind::Theta3, &ctx)?,
                ThetaFn::Theta4 => theta(&nome, ThetaKind::Theta4, &ctx)?,
                ThetaFn::F => form_value(FormId::F, &nome, &ctx)?,
                ThetaFn::G => form_value(FormId::G, &nome, &ctx)?,
                ThetaFn::M => eisenstein_m(&nome, &ctx)?,
            };
            emit_value(common, &v, json!({ "q": q.to_string() }))?;
        }
        Command::Alpha { q } => {
            let ctx = context(common)?;
            let nome = Nome::new(&q.to_real(&ctx)?, &ctx)?;
            emit_value(common, &alpha(&nome, &ctx)?, json!({ "q": q.to_string() }))?;
        }
        Command::Pfq { upper, lower, z } => {
            let ctx = context(common)?;
            let spec = PfqSpec::parse(&upper, &lower)?;
            let z = Real::with_val(ctx.prec(), &parse_param(&z)?);
            let r = pfq(&spec, &z, &ctx)?;
            emit_value(common, &r.value, json!({ "error_estimate": format_f64(r.error), "terms": r.terms }))?;
        }
        Command::Kdf { a, c, b, d, bp, dp, x, y, strategy } => {
            let ctx = context(common)?;
            let spec = KdfSpec::new(
                param_list(&a)?,
                param_list(&c)?,
                param_list(&b)?,
                param_list(&d)?,
                param_list(&bp)?,
                param_list(&dp)?,
            )?;
            let x = Real::with_val(ctx.prec(), &parse_param(&x)?);
            let y = Real::with_val(ctx.prec(), &parse_param(&y)?);
            let r = kdf(&spec, &x, &y, strategy, &ctx)?;
            let extra = json!({
                "error_estimate": format_f64(r.error),
                "terms": r.terms,
                "strategy": strategy.to_string(),
            });
            emit_value(common, &r.value, extra)?;
        }
        Command::Lvalue { form, s, method, terms } => {
            let ctx = context(common)?;
            let r = match (method, terms) {
                (LValueMethod::DirichletSum, Some(n)) => dirichlet_sum(form, &ctx.real(s), Some(n), &ctx)?,
                (_, Some(_)) => bail!("--terms applies to dirichlet_sum only"),
                (_, None) => l_value(form, s, method, &ctx)?,
            };
            let extra = json!({
                "error_estimate": format_f64(r.error_estimate),
                "method": r.method,
                "terms_or_levels_used": r.terms_or_levels_used,
            });
            emit_value(common, &r.value, extra)?;
        }
        Command::Coeffs { form, n, oracle } => {
            let stream = match oracle {
                Oracle::Convolution => coeffs_convolution(form, n)?,
                Oracle::Lambert => coeffs_lambert(form, n)?,
            };
            let coeffs = &stream.coefficients()[..n];
            match common.format {
                Format::Text => {
                    for (i, a) in coeffs.iter().enumerate() {
                        out!("{} {a}", i + 1);
                    }
                }
                Format::Json => {
                    let list: Vec<String> = coeffs.iter().map(|a| a.to_string()).collect();
                    out!("{}", json!({ "form": form, "coefficients": list }));
                }
            }
        }
        Command::Verify { id, all, grid, target, kdf_strategy, no_timings } => {
            if id.is_empty() && !all {
                bail!("pass --id <ids> or --all");
            }
            let config = RunConfig {
                digits: common.digits,
                filter: if all { None } else { Some(id) },
                grid: if grid.is_empty() { harness::default_grid() } else { grid },
                format: match common.format {
                    Format::Text => OutputFormat::Text,
                    Format::Json => OutputFormat::Json,
                },
                jobs: common.jobs,
                max_terms: common.max_terms,
                target,
                kdf_strategy,
                timings: !no_timings,
            };
            let reports = harness::verify_all(&config)?;
            match config.format {
                OutputFormat::Json => out!("{}", serde_json::to_string_pretty(&reports)?),
                OutputFormat::Text => {
                    for r in &reports {
                        let status = match r.status {
                            Status::Pass => "PASS",
                            Status::Fail => "FAIL",
                            Status::Skipped => "SKIP",
                        };
                        write!(
                            io::stdout().lock(),
                            "{status} {:<5} digits {:>3}/{:<3} rel_err {:<13} {:>8.3}s  {} vs {}",
                            r.id,
                            r.digits_agreed,
                            r.target_digits,
                            format_f64(r.rel_err),
                            r.wall_time_s,
                            r.lhs_method,
                            r.rhs_method
                        )?;
                        match &r.message {
                            Some(m) => out!("  ({m})"),
                            None => out!(""),
                        }
                    }
                    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
                    out!("{} identities, {failed} failed", reports.len());
                }
            }
            return Ok(ExitCode::from(harness::exit_code(&reports) as u8));
        }
        Command::List => match common.format {
            Format::Text => {
                for i in REGISTRY {
                    out!("{:<5} {:<22} {} vs {}", i.id, i.name, i.lhs_method, i.rhs_method);
                }
            }
            Format::Json => {
                let list: Vec<Value> = REGISTRY
                    .iter()
                    .map(|i| json!({ "id": i.id, "name": i.name, "lhs_method": i.lhs_method, "rhs_method": i.rhs_method }))
                    .collect();
                out!("{}", Value::Array(list));
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("thetal") {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
