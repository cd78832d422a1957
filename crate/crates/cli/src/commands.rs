use std::fs;

use rug::Float;
use xitaylor::classical::{szego_distance_scaling, table1, table1_csv};
use xitaylor::completed::Completed;
use xitaylor::curves::{szego_exp_curves, trace, CurveKind};
use xitaylor::hurwitz::{convergence_sweep, table2, table2_csv, TABLE2_MIN_DIGITS};
use xitaylor::lfunc::{lambda_of_n_l, LFunctionDescriptor, LRepresentation};
use xitaylor::phase::{lambda_of_n, PhaseContext};
use xitaylor::precision::{cplx, float_to_string, ComplexAP};
use xitaylor::xi::{taylor_coeffs, Xi};
use xitaylor::zeros::{census, census_digits};
use xitaylor::{Error, PrecisionContext};

use crate::output::Output;
use crate::plot::{self, Series};
use crate::{Command, RunConfig, SweepKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                Error::PrecisionInsufficient { .. } => 3,
                Error::Invalid(_) | Error::Unsupported(_) | Error::Io(_) | Error::Json(_) => 1,
                _ => 2,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn context(cfg: &RunConfig, default: u32) -> Res<PrecisionContext> {
    let digits = cfg.digits.unwrap_or(default);
    if digits < 16 {
        return Err(CliError::Usage(format!("--digits must be at least 16, got {digits}")));
    }
    Ok(PrecisionContext::new(digits)?)
}

fn check(cfg: &RunConfig) -> Res<()> {
    if !(cfg.delta > 0.0 && cfg.delta <= 0.5) {
        return Err(CliError::Usage(format!("--delta must lie in (0, 0.5], got {}", cfg.delta)));
    }
    Ok(())
}

pub fn execute(cfg: &RunConfig, cmd: &Command) -> Res<Vec<Output>> {
    check(cfg)?;
    let n = cfg.n;
    match cmd {
        Command::Lambda => {
            let ctx = context(cfg, 40)?;
            let sc = lambda_of_n(n, &ctx)?;
            Ok(vec![Output::json("lambda.json", sc.to_json()? + "\n")])
        }
        Command::Coeffs { degree } => {
            let degree = degree.unwrap_or(2 * n as usize - 2);
            let ctx = context(cfg, census_digits(n))?;
            let ctx = PrecisionContext::for_degree(ctx.digits, degree)?;
            let t = taylor_coeffs(degree, &ctx)?;
            Ok(vec![Output::json("coeffs.json", t.to_json()? + "\n")])
        }
        Command::Zeros => {
            let digits = context(cfg, census_digits(n))?.digits;
            let c = census(n, digits, cfg.delta)?;
            Ok(vec![
                Output::csv("roots.csv", c.zeros.to_csv()),
                Output::csv("alphas.csv", c.approx.to_csv()),
                Output::json("count.json", pretty(&c.report)?),
            ])
        }
        Command::Count => {
            let digits = context(cfg, census_digits(n))?.digits;
            let c = census(n, digits, cfg.delta)?;
            Ok(vec![Output::json("count.json", pretty(&c.report)?)])
        }
        Command::Curve { kind, samples } => {
            let kind = CurveKind::parse(kind)?;
            let curve = match kind {
                CurveKind::ExpDinf | CurveKind::ExpD1 => szego_exp_curves(n, kind, *samples)?,
                CurveKind::D0 | CurveKind::D1 => {
                    let ctx = context(cfg, 30)?;
                    let pc = PhaseContext::for_xi(n, &ctx)?.with_delta(cfg.delta)?;
                    trace(kind, &pc, *samples)?
                }
            };
            let name = format!("curve-{}.csv", kind.label());
            Ok(vec![Output::csv(&name, curve.to_csv())])
        }
        Command::Table1 => {
            let ctx = context(cfg, 420)?;
            Ok(vec![Output::csv("table1.csv", table1_csv(&table1(&ctx)?))])
        }
        Command::Table2 => {
            let ctx = context(cfg, TABLE2_MIN_DIGITS)?;
            Ok(vec![Output::csv("table2.csv", table2_csv(&table2(&ctx)?))])
        }
        Command::Sweep {
            kind,
            n_list,
            j,
            exclusion,
        } => sweep(cfg, *kind, n_list, *j, *exclusion),
        Command::Lfunc { descriptor, at } => lfunc(cfg, descriptor, at),
        Command::Plot {
            roots,
            curves,
            width,
        } => {
            let mut series = Vec::new();
            if let Some(p) = roots {
                series.push(Series::from_csv(p, true)?);
            }
            for p in curves {
                series.push(Series::from_csv(p, false)?);
            }
            if series.is_empty() {
                return Err(CliError::Usage("plot needs --roots or --curves".into()));
            }
            Ok(vec![Output::svg("plot.svg", plot::render(&series, *width))])
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::from)? + "\n")
}

fn f64s(v: f64) -> String {
    float_to_string(&Float::with_val(53, v))
}

fn sweep(cfg: &RunConfig, kind: SweepKind, n_list: &[u32], j: usize, exclusion: f64) -> Res<Vec<Output>> {
    if n_list.is_empty() {
        return Err(CliError::Usage("--n-list is empty".into()));
    }
    match kind {
        SweepKind::Exp => {
            let ctx = context(cfg, 30)?;
            let ds = szego_distance_scaling(n_list, exclusion, &ctx)?;
            let mut s = String::from("n,roots_used,max_dist_dinf,max_dist_d1,max_re\n");
            for r in &ds.rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    r.roots_used,
                    f64s(r.max_dist_dinf),
                    f64s(r.max_dist_d1),
                    f64s(r.max_re)
                ));
            }
            let fit = serde_json::json!({
                "exclusion": f64s(ds.exclusion),
                "dinf_exponent": f64s(ds.dinf_exponent),
                "d1_exponent": f64s(ds.d1_exponent),
            });
            Ok(vec![
                Output::csv("sweep-exp.csv", s),
                Output::json("sweep-exp-fit.json", pretty(&fit)?),
            ])
        }
        SweepKind::Lambda => {
            let ctx = context(cfg, 30)?;
            let mut s = String::from("n,lambda,seed,n_residual_asymptotic,n_seed_relative\n");
            for &n in n_list {
                let sc = lambda_of_n(n, &ctx)?;
                let lam = sc.lambda.to_f64();
                let seed = Xi.scaling_seed(n);
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    n,
                    float_to_string(&sc.lambda),
                    f64s(seed),
                    f64s(sc.residual_asymp.to_f64().abs() * n as f64),
                    f64s((lam - seed).abs() / lam * n as f64)
                ));
            }
            Ok(vec![Output::csv("sweep-lambda.csv", s)])
        }
        SweepKind::Hurwitz => {
            let top = *n_list.iter().max().expect("non-empty");
            let ctx = context(cfg, (1.5 * top as f64 + 40.0) as u32)?;
            let rep = convergence_sweep(j, n_list, &ctx)?;
            Ok(vec![Output::csv("sweep-hurwitz.csv", rep.to_csv())])
        }
    }
}

fn parse_point(s: &str) -> Res<(f64, f64)> {
    let bad = || CliError::Usage(format!("--at expects RE,IM, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let re = a.trim().parse().map_err(|_| bad())?;
    let im = b.trim().parse().map_err(|_| bad())?;
    Ok((re, im))
}

fn lfunc(cfg: &RunConfig, descriptor: &str, at: &[String]) -> Res<Vec<Output>> {
    let d = match descriptor {
        "beta" => LFunctionDescriptor::dirichlet_beta(),
        "zeta" => LFunctionDescriptor::riemann_zeta(),
        path => LFunctionDescriptor::from_json(&fs::read_to_string(path).map_err(Error::from)?)?,
    };
    let ctx = context(cfg, 30)?;
    let sol = lambda_of_n_l(cfg.n, &d, &ctx)?;
    let mut out = serde_json::json!({ "scaling": sol.to_json() });
    if !at.is_empty() {
        let points = at.iter().map(|s| parse_point(s)).collect::<Res<Vec<_>>>()?;
        let rep = LRepresentation::new(cfg.n, &d, &ctx)?;
        let mut rows = Vec::new();
        for (re, im) in points {
            let v = rep.evaluate(&cplx(ctx.bits(), re, im))?;
            rows.push(serde_json::json!({
                "z": ComplexAP::from_complex(&v.z),
                "in_ball": v.in_ball,
                "t_value": ComplexAP::from_complex(&v.t_value),
                "model_value": ComplexAP::from_complex(&v.model_value),
                "relative_error": f64s(v.relative_error()),
            }));
        }
        out["representation"] = serde_json::Value::Array(rows);
    }
    Ok(vec![Output::json("lfunc.json", pretty(&out)?)])
}
