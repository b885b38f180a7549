//! Subcommand adapters: parse flags into library options, call the library,
//! wrap the result in a [`RunReport`].

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use depcorr::{
    ace, dcov::CenteredDistances, first_canonical_correlation, covariance_triple, kl_correlation, pearson,
    permutation_test, power_study, spearman, AceOptions, Generator, KlOptions, Law, Measure, ModelConfig,
    PowerSettings,
};
use serde_json::{json, Value};

use crate::args::{AceParams, Command, KlParams, Model, ModelParams, SmootherArg, StatArg};
use crate::csvio::{ingest_csv, write_csv, write_csv_file, InputDescriptor};
use crate::report::{params, Usage};
use crate::svg;

/// What a subcommand produced, before timing and bookkeeping are attached.
pub struct Outcome {
    pub command: &'static str,
    pub input: Option<InputDescriptor>,
    pub parameters: std::collections::BTreeMap<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    /// Destination for the JSON report; `None` means stdout.
    pub report_to: Option<PathBuf>,
    /// `simulate` without `--out` writes CSV to stdout and no report.
    pub suppress_report: bool,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

pub fn kl_options(p: &KlParams) -> Result<KlOptions> {
    if p.k == 0 || p.l == 0 {
        return Err(usage(format!("--K and --L must be >= 1 (got K = {}, L = {})", p.k, p.l)));
    }
    if !(p.ridge >= 0.0) {
        return Err(usage(format!("--ridge must be >= 0, got {}", p.ridge)));
    }
    if !(0.0..1.0).contains(&p.rank_tol) {
        return Err(usage(format!("--rank-tol must lie in [0, 1), got {}", p.rank_tol)));
    }
    Ok(KlOptions {
        start_index: p.start_index,
        normalize: !p.no_normalize,
        standardize_input: !p.no_standardize,
        ridge: p.ridge,
        rank_tol: p.rank_tol,
    })
}

pub fn ace_options(p: &AceParams) -> Result<AceOptions> {
    let opts = AceOptions {
        span: p.span,
        max_iterations: p.max_iterations,
        tolerance: p.tolerance,
        smoother: match p.smoother {
            SmootherArg::LinearSpline => depcorr::renyi::SmootherKind::LinearSpline,
            SmootherArg::RunningMean => depcorr::renyi::SmootherKind::RunningMean,
        },
    };
    opts.validate().map_err(|e| usage(e.to_string()))?;
    Ok(opts)
}

pub fn parse_law(s: &str) -> Result<Law> {
    let bad = || usage(format!("cannot parse law {s:?}; expected uniform:A,B or normal:MU,SIGMA"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let law = match kind.trim() {
        "uniform" => Law::Uniform { a, b },
        "normal" => Law::Normal { mu: a, sigma: b },
        _ => return Err(bad()),
    };
    law.validate().map_err(|e| usage(e.to_string()))?;
    Ok(law)
}

/// `n` and `seed` are recorded in the bump config for the report; sampling
/// always takes them as explicit arguments.
pub fn generator(model: Model, p: &ModelParams, n: usize, seed: u64) -> Result<Generator> {
    Ok(match model {
        Model::Bump => {
            let config = ModelConfig {
                beta1: p.beta1,
                beta2: p.beta2,
                beta3: p.beta3,
                noise_sd: p.noise_sd.unwrap_or(0.02 * (p.beta1 / p.beta2)),
                x_law: parse_law(&p.x_law)?,
                n,
                seed,
            };
            config.validate().map_err(|e| usage(e.to_string()))?;
            Generator::Bump { config }
        }
        Model::Gaussian => {
            if !(p.rho > -1.0 && p.rho < 1.0) {
                return Err(usage(format!("--rho must lie in (-1, 1), got {}", p.rho)));
            }
            Generator::Gaussian { rho: p.rho }
        }
        Model::Independent => Generator::Independent {
            x_law: parse_law(&p.x_law)?,
            y_law: parse_law(&p.y_law)?,
        },
    })
}

pub fn measure(stat: StatArg, kl: &KlParams, ace: &AceParams) -> Result<Measure> {
    Ok(match stat {
        StatArg::Pearson => Measure::Pearson,
        StatArg::Spearman => Measure::Spearman,
        StatArg::Dcov2 => Measure::Dcov2,
        StatArg::Dcor => Measure::Dcor,
        StatArg::Cca => Measure::Cca {
            ridge: kl.ridge,
            rank_tol: kl.rank_tol,
        },
        StatArg::Kl => Measure::Kl {
            k: kl.k,
            l: kl.l,
            options: kl_options(kl)?,
        },
        StatArg::Ace => Measure::Ace {
            options: ace_options(ace)?,
        },
    })
}

fn parse_stats(list: &str) -> Result<Vec<StatArg>> {
    use clap::ValueEnum;
    list.split(',')
        .map(str::trim)
        .map(|t| StatArg::from_str(t, true).map_err(|_| usage(format!("unknown statistic {t:?} in --stats"))))
        .collect()
}

fn outcome(command: &'static str, parameters: std::collections::BTreeMap<String, Value>, results: Value) -> Outcome {
    Outcome {
        command,
        input: None,
        parameters,
        results,
        seed: None,
        report_to: None,
        suppress_report: false,
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Pearson(a) => {
            let (s, desc) = ingest_csv(&a.input)?;
            let (x, y) = s.univariate()?;
            let r = pearson(x, y)?;
            Ok(Outcome {
                input: Some(desc),
                report_to: a.out.clone(),
                ..outcome("pearson", params(a), json!({ "pearson": r }))
            })
        }
        Command::Spearman(a) => {
            let (s, desc) = ingest_csv(&a.input)?;
            let (x, y) = s.univariate()?;
            let r = spearman(x, y)?;
            Ok(Outcome {
                input: Some(desc),
                report_to: a.out.clone(),
                ..outcome("spearman", params(a), json!({ "spearman": r }))
            })
        }
        Command::Dcor(a) => {
            let (s, desc) = ingest_csv(&a.input)?;
            let cd = CenteredDistances::new(&s);
            let results = json!({
                "dcor": cd.dcor()?,
                "dcov2": cd.dcov2()?,
                "dvar2_x": cd.dvar2_x(),
                "dvar2_y": cd.dvar2_y(),
            });
            Ok(Outcome {
                input: Some(desc),
                report_to: a.out.clone(),
                ..outcome("dcor", params(a), results)
            })
        }
        Command::Cca(a) => {
            let (s, desc) = ingest_csv(&a.common.input)?;
            let c = covariance_triple(s.x(), s.y())?;
            let r = first_canonical_correlation(&c, a.ridge, a.rank_tol)?;
            Ok(Outcome {
                input: Some(desc),
                report_to: a.common.out.clone(),
                ..outcome("cca", params(a), serde_json::to_value(r)?)
            })
        }
        Command::RenyiKl(a) => {
            let opts = kl_options(&a.kl)?;
            let (s, desc) = ingest_csv(&a.common.input)?;
            let r = kl_correlation(&s, a.kl.k, a.kl.l, &opts)?;
            Ok(Outcome {
                input: Some(desc),
                report_to: a.common.out.clone(),
                ..outcome("renyi-kl", params(a), serde_json::to_value(r)?)
            })
        }
        Command::Ace(a) => {
            let opts = ace_options(&a.ace)?;
            let (s, desc) = ingest_csv(&a.common.input)?;
            let r = ace(&s, &opts)?;
            let mut v = serde_json::to_value(r)?;
            if a.no_transforms {
                if let Value::Object(m) = &mut v {
                    m.remove("fx");
                    m.remove("gy");
                }
            }
            Ok(Outcome {
                input: Some(desc),
                report_to: a.common.out.clone(),
                ..outcome("ace", params(a), v)
            })
        }
        Command::Permtest(a) => {
            if a.b == 0 {
                return Err(usage("--b must be >= 1"));
            }
            let m = measure(a.stat, &a.kl, &a.ace)?;
            let (s, desc) = ingest_csv(&a.common.input)?;
            let r = permutation_test(&s, &m, a.b, a.seed)?;
            Ok(Outcome {
                input: Some(desc),
                report_to: a.common.out.clone(),
                seed: Some(a.seed),
                ..outcome("permtest", params(a), serde_json::to_value(r)?)
            })
        }
        Command::Power(a) => {
            if !(a.alpha > 0.0 && a.alpha < 1.0) {
                return Err(usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
            }
            if a.nsim == 0 || a.b == 0 {
                return Err(usage("--nsim and --b must be >= 1"));
            }
            let g = generator(a.alt, &a.model, a.n, a.seed)?;
            let stats = parse_stats(&a.stats)?
                .into_iter()
                .map(|s| measure(s, &a.kl, &a.ace))
                .collect::<Result<Vec<_>>>()?;
            let settings = PowerSettings {
                n: a.n,
                alpha: a.alpha,
                nsim: a.nsim,
                b: a.b,
                seed: a.seed,
            };
            let table = power_study(&g, &stats, &settings)?;
            Ok(Outcome {
                report_to: a.out.clone(),
                seed: Some(a.seed),
                ..outcome("power", params(a), serde_json::to_value(table)?)
            })
        }
        Command::Simulate(a) => {
            let g = generator(a.model, &a.params, a.n, a.seed)?;
            let s = g.sample(a.n, a.seed)?;
            let results = json!({
                "generator": g,
                "n": s.n(),
                "csv": a.out.as_ref().map(|p| p.display().to_string()),
            });
            match &a.out {
                Some(path) => write_csv_file(path, &s)?,
                None => write_csv(std::io::stdout().lock(), &s)?,
            }
            Ok(Outcome {
                seed: Some(a.seed),
                suppress_report: a.out.is_none(),
                ..outcome("simulate", params(a), results)
            })
        }
        Command::Plot(a) => {
            let (s, desc) = ingest_csv(&a.input)?;
            let (x, y) = s.univariate()?;
            let mut results = json!({ "svg": a.out.display().to_string(), "points": s.n() });
            let fitted = if a.ace {
                let r = ace(&s, &ace_options(&a.params)?)?;
                results["ace"] = json!({ "r_hat": r.r_hat, "iterations": r.iterations, "converged": r.converged });
                Some(r)
            } else {
                None
            };
            let mut panels = vec![svg::Panel {
                title: "data",
                x_label: "x",
                y_label: "y",
                x,
                y,
            }];
            if let Some(r) = &fitted {
                panels.push(svg::Panel {
                    title: "ACE transformations",
                    x_label: "f̂(x)",
                    y_label: "ĝ(y)",
                    x: &r.fx,
                    y: &r.gy,
                });
            }
            results["panels"] = json!(panels.len());
            std::fs::write(&a.out, svg::scatter(&panels))
                .map_err(|e| anyhow!("cannot write {}: {e}", a.out.display()))?;
            Ok(Outcome {
                input: Some(desc),
                ..outcome("plot", params(a), results)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_parse() {
        assert_eq!(parse_law("uniform:0,1").unwrap(), Law::Uniform { a: 0.0, b: 1.0 });
        assert_eq!(parse_law("normal: -1, 2").unwrap(), Law::Normal { mu: -1.0, sigma: 2.0 });
        for bad in ["uniform:1,0", "beta:1,2", "normal:0", "normal:0,-1"] {
            assert!(parse_law(bad).unwrap_err().downcast_ref::<Usage>().is_some(), "{bad}");
        }
    }

    #[test]
    fn stat_list() {
        assert_eq!(parse_stats("dcor, kl,ACE").unwrap(), vec![StatArg::Dcor, StatArg::Kl, StatArg::Ace]);
        assert!(parse_stats("dcor,foo").is_err());
    }
}
