//! Identity registry and verification driver.

pub mod registry;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use registry::{lookup, Comparison, Eval, Identity, Target, REGISTRY};

use crate::error::{Error, Result};
use crate::hyper::KdfStrategy;
use crate::numerics::{PrecisionContext, Real};
use crate::theta::Nome;

/// A nome sample point; `e^-pi` is kept symbolic so it is formed at each run's precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridPoint {
    Decimal(String),
    ExpMinusPi,
}

impl GridPoint {
    pub fn to_real(&self, ctx: &PrecisionContext) -> Result<Real> {
        match self {
            GridPoint::ExpMinusPi => Ok(Real::with_val(ctx.prec(), -ctx.pi()).exp()),
            GridPoint::Decimal(s) => {
                let parsed = Real::parse(s).map_err(|e| Error::Invalid(format!("grid point `{s}`: {e}")))?;
                Ok(Real::with_val(ctx.prec(), parsed))
            }
        }
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridPoint::Decimal(s) => f.write_str(s),
            GridPoint::ExpMinusPi => f.write_str("e^-pi"),
        }
    }
}

impl FromStr for GridPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "e^-pi" | "exp(-pi)") {
            return Ok(GridPoint::ExpMinusPi);
        }
        let v: f64 = s.parse().map_err(|_| Error::Invalid(format!("grid point `{s}` is not a decimal")))?;
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("grid point {s} must lie in (0,1)")));
        }
        Ok(GridPoint::Decimal(s.to_string()))
    }
}

pub fn default_grid() -> Vec<GridPoint> {
    ["0.02", "0.05", "0.1", "0.2", "0.3"]
        .into_iter()
        .map(|s| GridPoint::Decimal(s.into()))
        .chain([GridPoint::ExpMinusPi])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Invalid(format!("unknown format `{s}` (expected text or json)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub digits: u32,
    /// Identity ids to run; `None` runs the whole registry.
    pub filter: Option<Vec<String>>,
    pub grid: Vec<GridPoint>,
    pub format: OutputFormat,
    pub jobs: usize,
    pub max_terms: Option<usize>,
    /// Overrides every identity's target digits.
    pub target: Option<u32>,
    pub kdf_strategy: KdfStrategy,
    /// When false, `wall_time_s` is reported as zero so reports are reproducible byte for byte.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            digits: 20,
            filter: None,
            grid: default_grid(),
            format: OutputFormat::Text,
            jobs: 1,
            max_terms: None,
            target: None,
            kdf_strategy: KdfStrategy::IntegralReduction,
            timings: true,
        }
    }
}

impl RunConfig {
    pub fn context(&self) -> Result<PrecisionContext> {
        let ctx = PrecisionContext::new(self.digits)?;
        match self.max_terms {
            Some(m) => ctx.with_max_terms(m),
            None => Ok(ctx),
        }
    }

    /// The selected identities in registry order; unknown ids are an error.
    pub fn selection(&self) -> Result<Vec<&'static Identity>> {
        match &self.filter {
            None => Ok(REGISTRY.iter().collect()),
            Some(ids) => {
                for id in ids {
                    if lookup(id).is_none() {
                        return Err(Error::Invalid(format!("unknown identity `{id}`")));
                    }
                }
                Ok(REGISTRY.iter().filter(|i| ids.iter().any(|id| id.eq_ignore_ascii_case(i.id))).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

fn decimal<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_f64(*x))
}

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.6e}")
    }
}

/// A real printed to `digits` significant decimal digits.
pub fn format_real(x: &Real, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits.max(1) as usize));
    let exp = exp.unwrap_or(1) - 1;
    let (head, tail) = mantissa.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(serialize_with = "decimal")]
    pub abs_err: f64,
    #[serde(serialize_with = "decimal")]
    pub rel_err: f64,
    pub digits_agreed: u32,
    pub lhs_method: String,
    pub rhs_method: String,
    pub sample_points: Vec<String>,
    #[serde(serialize_with = "time")]
    pub wall_time_s: f64,
    pub precision_digits: u32,
    pub status: Status,
    #[serde(skip)]
    pub target_digits: u32,
    /// The grid point with the largest error, for pointwise identities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

fn time<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:.3}"))
}

pub fn digits_agreed(rel_err: f64, precision_digits: u32) -> u32 {
    if rel_err == 0.0 {
        precision_digits
    } else if rel_err.is_finite() && rel_err < 1.0 {
        (-rel_err.log10()).floor() as u32
    } else {
        0
    }
}

fn evaluate(identity: &Identity, config: &RunConfig) -> Result<(Comparison, Option<String>)> {
    let ctx = config.context()?;
    match identity.eval {
        Eval::Value(f) => Ok((f(&ctx, config)?, None)),
        Eval::Pointwise(f) => {
            let mut worst: Option<(Comparison, String)> = None;
            for point in &config.grid {
                let nome = Nome::new(&point.to_real(&ctx)?, &ctx)?;
                let cmp = f(&nome, &ctx).map_err(|e| Error::Invalid(format!("at q = {point}: {e}")))?;
                if worst.as_ref().is_none_or(|(w, _)| cmp.rel_err() > w.rel_err()) {
                    worst = Some((cmp, point.to_string()));
                }
            }
            let (cmp, point) = worst.ok_or_else(|| Error::Invalid("empty sample grid".into()))?;
            Ok((cmp, Some(point)))
        }
    }
}

/// Evaluates both sides of one identity. Evaluation failures become a failed
/// report carrying the error message.
pub fn verify(identity: &Identity, config: &RunConfig) -> VerificationReport {
    let start = Instant::now();
    let target_digits = identity.target.digits(config);
    let mut report = VerificationReport {
        id: identity.id.to_string(),
        lhs: String::new(),
        rhs: String::new(),
        abs_err: f64::NAN,
        rel_err: f64::NAN,
        digits_agreed: 0,
        lhs_method: identity.lhs_method.to_string(),
        rhs_method: identity.rhs_method.to_string(),
        sample_points: Vec::new(),
        wall_time_s: 0.0,
        precision_digits: config.digits,
        status: Status::Fail,
        target_digits,
        worst_point: None,
        message: None,
    };
    if matches!(identity.eval, Eval::Pointwise(_)) && config.grid.is_empty() {
        report.status = Status::Skipped;
        report.message = Some("empty sample grid".into());
        return report;
    }
    match evaluate(identity, config) {
        Ok((cmp, worst_point)) => {
            let rel = cmp.rel_err();
            let prec = cmp.lhs.prec().max(cmp.rhs.prec());
            report.abs_err = Real::with_val(prec, &cmp.lhs - &cmp.rhs).abs().to_f64();
            report.rel_err = rel;
            report.digits_agreed = digits_agreed(rel, config.digits);
            report.lhs = format_real(&cmp.lhs, config.digits);
            report.rhs = format_real(&cmp.rhs, config.digits);
            if worst_point.is_some() {
                report.sample_points = config.grid.iter().map(|p| p.to_string()).collect();
            }
            report.worst_point = worst_point;
            report.status = if report.digits_agreed >= target_digits { Status::Pass } else { Status::Fail };
        }
        Err(e) => report.message = Some(e.to_string()),
    }
    if config.timings {
        report.wall_time_s = start.elapsed().as_secs_f64();
    }
    report
}

/// Runs the selected identities on `config.jobs` workers; reports come back in registry order.
pub fn verify_all(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    let selection = config.selection()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("worker pool: {e}")))?;
    Ok(pool.install(|| selection.par_iter().map(|i| verify(i, config)).collect()))
}

/// 0 when every non-skipped report passed, 1 otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    i32::from(reports.iter().any(|r| r.status == Status::Fail))
}
