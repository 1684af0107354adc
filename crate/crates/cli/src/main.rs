use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use d2dcast::combinatorics::{
    enumerate_size_vectors, exact_count, exact_count_for, paper_count, paper_count_for, SelectionMode,
};
use d2dcast::harness::{load_config, render_csv, run_experiment};
use d2dcast::outage::{mc_outage, outage_cu, outage_mg, ArctanForm, OutageGeometry};
use d2dcast::power::{compute_p_high, compute_p_low, p_high_by_bisection, p_low_by_bisection, PLowForm};
use d2dcast::scalar::db_to_linear;
use d2dcast::OutageInputs;
use rand::{Rng, SeedableRng};

#[derive(Parser)]
#[command(name = "d2dcast", version, about = "D2D multicast channel allocation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file and write the CSV summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_path`. Without either, the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides `parallelism`.
        #[arg(long)]
        parallel: Option<usize>,
        /// Scenarios per sweep point; overrides `n_scenarios`.
        #[arg(long)]
        scenarios: Option<usize>,
    },
    /// Print subset-combination counts for G groups on C channels.
    Count {
        groups: usize,
        channels: usize,
        /// all | almost_equal | equal | fixed(n)
        #[arg(default_value = "all")]
        mode: SelectionMode,
    },
    /// Compare the outage closed forms and power bounds against numerical oracles.
    ValidateLemmas {
        /// Monte Carlo realisations per test point.
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Exit with status 1 when any check fails.
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    match try_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn try_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            out,
            parallel,
            scenarios,
        } => {
            let mut cfg = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.base.master_seed = s;
            }
            if let Some(p) = parallel {
                cfg.parallelism = p;
            }
            if let Some(n) = scenarios {
                cfg.n_scenarios = n;
            }
            if out.is_some() {
                cfg.output_path = out;
            }
            let rows = run_experiment(&cfg)?;
            let csv = render_csv(&rows);
            match &cfg.output_path {
                Some(path) => {
                    std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => std::io::stdout().write_all(csv.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Count { groups, channels, mode } => {
            count(groups, channels, mode)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateLemmas { trials, seed, strict } => {
            let all_pass = validate_lemmas(trials, seed)?;
            Ok(if strict && !all_pass {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn count(groups: usize, channels: usize, mode: SelectionMode) -> Result<()> {
    let svs = enumerate_size_vectors(groups, channels, mode)?;
    println!("G={groups} C={channels} mode={mode}");
    println!("{:<16} {:>4} {:>14} {:>14}", "size_vector", "q", "formula", "distinct");
    for sv in &svs {
        println!(
            "{:<16} {:>4} {:>14} {:>14}",
            sv.to_string(),
            sv.q(),
            paper_count_for(groups, sv)?,
            exact_count_for(groups, sv)?
        );
    }
    println!(
        "{:<16} {:>4} {:>14} {:>14}",
        "total",
        "",
        paper_count(groups, channels, mode)?,
        exact_count(groups, channels, mode)?
    );
    Ok(())
}

struct Check {
    name: String,
    value: String,
    tolerance: String,
    pass: bool,
}

fn validate_lemmas(trials: usize, seed: u64) -> Result<bool> {
    let mut checks = Vec::new();
    let mg = OutageInputs {
        lambda_c: 2e-5,
        lambda_g: 2e-5,
        p_c: 1.0,
        p_g: 1.0,
        exclusion_radius_m: 50.0,
        link_distance_m: 25.0,
        sir_threshold: db_to_linear(25.0),
        alpha: 4.0,
    };
    let cu = OutageInputs {
        lambda_c: 0.0,
        link_distance_m: 200.0,
        sir_threshold: db_to_linear(6.0),
        ..mg
    };
    let field_radius_m = 2000.0;

    let cf = outage_mg(&mg, ArctanForm::Statement)?;
    let est = mc_outage(
        &OutageGeometry::MgReceiver {
            inputs: mg,
            field_radius_m,
        },
        trials,
        seed,
    )?;
    let diff = (cf - est.probability).abs();
    checks.push(Check {
        name: "MG outage vs Monte Carlo".into(),
        value: format!("cf {cf:.4} mc {:.4} |diff| {diff:.4}", est.probability),
        tolerance: "<= 0.10".into(),
        pass: diff <= 0.10,
    });

    let cf = outage_cu(&cu)?;
    let est = mc_outage(
        &OutageGeometry::CuAtBs {
            inputs: cu,
            field_radius_m,
        },
        trials,
        seed,
    )?;
    let diff = (cf - est.probability).abs();
    checks.push(Check {
        name: "CU outage vs Monte Carlo".into(),
        value: format!("cf {cf:.4} mc {:.4} |diff| {diff:.4}", est.probability),
        tolerance: "<= 0.05".into(),
        pass: diff <= 0.05,
    });

    // A CU point away from saturation, where the comparison is more telling.
    let cu_mid = OutageInputs { lambda_g: 1e-6, ..cu };
    let cf = outage_cu(&cu_mid)?;
    let est = mc_outage(
        &OutageGeometry::CuAtBs {
            inputs: cu_mid,
            field_radius_m,
        },
        trials,
        seed,
    )?;
    let diff = (cf - est.probability).abs();
    checks.push(Check {
        name: "CU outage vs Monte Carlo (lambda_g 1e-6)".into(),
        value: format!("cf {cf:.4} mc {:.4} |diff| {diff:.4}", est.probability),
        tolerance: "<= 0.05".into(),
        pass: diff <= 0.05,
    });

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lambda_g = 10f64.powf(rng.random_range(-7.0..-4.0));
        let p_c = 10f64.powf(rng.random_range(-2.0..1.0));
        let d_cb = rng.random_range(10.0..500.0);
        let th = db_to_linear(rng.random_range(-5.0..20.0));
        let theta = rng.random_range(0.01..0.9);
        let p = compute_p_high(lambda_g, p_c, d_cb, th, theta, 4.0)?;
        let o = outage_cu(&OutageInputs {
            lambda_c: 0.0,
            lambda_g,
            p_c,
            p_g: p,
            exclusion_radius_m: 50.0,
            link_distance_m: d_cb,
            sir_threshold: th,
            alpha: 4.0,
        })?;
        worst = worst.max((o - theta).abs() / theta);
    }
    checks.push(Check {
        name: "p_high inverts CU outage (100 points)".into(),
        value: format!("max rel err {worst:.2e}"),
        tolerance: "<= 1e-9".into(),
        pass: worst <= 1e-9,
    });

    let theta_c = 0.1;
    let closed = compute_p_high(cu.lambda_g, cu.p_c, cu.link_distance_m, cu.sir_threshold, theta_c, 4.0)?;
    let bis = p_high_by_bisection(&cu, theta_c)?;
    let rel = bis.map(|b| (b - closed).abs() / closed);
    checks.push(Check {
        name: "p_high vs bisection".into(),
        value: match rel {
            Some(r) => format!("closed {closed:.4e} rel err {r:.2e}"),
            None => "no root".into(),
        },
        tolerance: "<= 1e-9".into(),
        pass: rel.is_some_and(|r| r <= 1e-9),
    });

    let theta_g = 0.1;
    for form in [PLowForm::Appendix, PLowForm::Lemma] {
        let closed = compute_p_low(
            mg.lambda_c,
            mg.lambda_g,
            mg.p_c,
            mg.exclusion_radius_m,
            mg.link_distance_m,
            mg.sir_threshold,
            theta_g,
            4.0,
            form,
        )?;
        let bis = p_low_by_bisection(&mg, theta_g, ArctanForm::Statement)?;
        let (value, pass) = match (closed, bis) {
            (Some(c), Some(b)) => {
                let r = (c - b).abs() / b;
                (format!("closed {c:.4e} bisection {b:.4e} rel {r:.3}"), r <= 0.10)
            }
            (c, None) => (
                format!(
                    "closed {} bisection: no root (1 - L0 = {:.3} > {theta_g})",
                    c.map_or("unreachable".to_string(), |c| format!("{c:.4e}")),
                    outage_mg(&OutageInputs { p_g: 1e30, ..mg }, ArctanForm::Statement)?
                ),
                false,
            ),
            (None, Some(b)) => (format!("closed unreachable, bisection {b:.4e}"), false),
        };
        checks.push(Check {
            name: format!("p_low ({form:?}) vs bisection"),
            value,
            tolerance: "<= 10%".into(),
            pass,
        });
    }

    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{}  {:<width$}  {:<10}  {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.tolerance,
            c.value
        );
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    println!("{passed}/{} checks passed", checks.len());
    Ok(passed == checks.len())
}
