//! Command-line front end: scalar coherence reports, cascade inspection,
//! optimality sweeps, and the figure data grids as CSV.

mod figures;
mod report;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use beamsplit::{
    coherent_input_state, config1, config2, l1_pure, l1_pure_bound, max_coherent_approx,
    max_coherent_coherence, max_number_coherence, mixed_coherence, number_coherence,
    optimal_split, perturbation_test, propagate, supremum_coherence, tau_vector,
    thermal_coherence_approx, thermal_coherence_approx_check, tol, Cascade, InputKind,
    PhotonDistribution, SplitVector, TruncatedState,
};
use report::{emit, Format, Report};

#[derive(Parser)]
#[command(
    name = "beamsplit",
    version,
    about = "Coherence generated by lossless beam-splitter cascades",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format for scalar reports
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum output coherence for a coherent input of mean photon number n̄
    Coherent {
        /// Mean photon number of the input coherent state
        #[arg(long)]
        nbar: f64,
        /// Number of beam splitters (output modes = N+1)
        #[arg(long = "N", default_value_t = 0)]
        splitters: u32,
        /// Certified truncation budget for the amplitude series
        #[arg(long = "tail-epsilon", default_value_t = tol::DEFAULT_TAIL_EPSILON)]
        tail_epsilon: f64,
        /// Also propagate through the equal-split chain with the
        /// brute-force Fock-space oracle and report the difference
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Maximum output coherence for a number-state input |n⟩
    Number {
        /// Photon number of the input state
        #[arg(long)]
        n: u32,
        /// Number of beam splitters (output modes = N+1)
        #[arg(long = "N", default_value_t = 1)]
        splitters: u32,
        /// Also propagate with the brute-force oracle and report the difference
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Sector-averaged coherence for incoherent mixed inputs
    Mixed {
        /// Phase-averaged coherent input (Poissonian photon statistics)
        #[arg(long = "phase-averaged", group = "kind", required = true)]
        phase_averaged: bool,
        /// Thermal input (geometric photon statistics)
        #[arg(long, group = "kind")]
        thermal: bool,
        /// Mean photon number of the input
        #[arg(long)]
        nbar: f64,
        /// Number of beam splitters (output modes = N+1)
        #[arg(long = "N", default_value_t = 1)]
        splitters: u32,
        /// Truncation budget for the photon-number distribution
        #[arg(long = "tail-epsilon", default_value_t = tol::DEFAULT_TAIL_EPSILON)]
        tail_epsilon: f64,
        /// Override the photon-number cutoff (refused when it cannot
        /// certify the tail)
        #[arg(long)]
        cutoff: Option<u32>,
        /// For thermal inputs: also print the large-mean closed form and
        /// its quadrature cross-check
        #[arg(long)]
        asymptotic: bool,
        /// Quadrature nodes for the asymptotic cross-check
        #[arg(long, default_value_t = 32)]
        nodes: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Inspect a cascade: split vector, uniformity, optional output coherence
    Cascade {
        /// Use the linear-chain layout with N splitters
        #[arg(long, group = "source", required = true)]
        config2: bool,
        /// Use the balanced binary-tree layout
        #[arg(long, group = "source")]
        config1: bool,
        /// Read the cascade from a description file (`j: mode_a mode_b theta`)
        #[arg(long, group = "source", value_name = "PATH")]
        file: Option<PathBuf>,
        /// Splitter count for --config2
        #[arg(long = "N", default_value_t = 1)]
        splitters: u32,
        /// Tree depth for --config1
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Report the output coherence for a coherent input of this mean
        #[arg(long, group = "input")]
        nbar: Option<f64>,
        /// Report the output coherence for a number-state input |n⟩
        #[arg(long, group = "input")]
        n: Option<u32>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Confirm equal-split optimality by grid search and perturbation
    Optimize {
        /// Coherent input of this mean photon number
        #[arg(long, group = "input", required = true)]
        nbar: Option<f64>,
        /// Number-state input |n⟩
        #[arg(long, group = "input")]
        n: Option<u32>,
        /// Grid points over [0, π/2]; odd so π/4 lies on the grid
        #[arg(long, default_value_t = 181)]
        resolution: usize,
        /// Splitter count for the perturbation test
        #[arg(long = "N", default_value_t = 1)]
        splitters: u32,
        /// Random tangent perturbations of the uniform split
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Perturbation magnitude (must stay below 1/(N+1))
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Seed for the perturbation directions
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the swept (theta, coherence) grid as CSV to this path
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Output format for the summary report
        #[arg(long, value_enum, default_value = "plain")]
        format: Format,
    },
    /// Emit the data grid behind one of the published figures as CSV
    Figure {
        /// Figure id: 1, 2, 5, 6 or 7
        id: u8,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Coherent {
            nbar,
            splitters,
            tail_epsilon,
            oracle,
            output,
        } => cmd_coherent(nbar, splitters, tail_epsilon, oracle, &output),
        Command::Number {
            n,
            splitters,
            oracle,
            output,
        } => cmd_number(n, splitters, oracle, &output),
        Command::Mixed {
            phase_averaged,
            thermal,
            nbar,
            splitters,
            tail_epsilon,
            cutoff,
            asymptotic,
            nodes,
            output,
        } => cmd_mixed(
            phase_averaged,
            thermal,
            nbar,
            splitters,
            tail_epsilon,
            cutoff,
            asymptotic,
            nodes,
            &output,
        ),
        Command::Cascade {
            config2: use_config2,
            config1: use_config1,
            file,
            splitters,
            depth,
            nbar,
            n,
            output,
        } => cmd_cascade(
            use_config2,
            use_config1,
            file,
            splitters,
            depth,
            nbar,
            n,
            &output,
        ),
        Command::Optimize {
            nbar,
            n,
            resolution,
            splitters,
            trials,
            delta,
            seed,
            out,
            format,
        } => cmd_optimize(nbar, n, resolution, splitters, trials, delta, seed, out, format),
        Command::Figure { id, out } => emit(&figures::figure_csv(id)?, out.as_deref()),
    }
}

fn cmd_coherent(
    nbar: f64,
    splitters: u32,
    tail_epsilon: f64,
    oracle: bool,
    output: &OutputOpts,
) -> Result<()> {
    let exact = max_coherent_coherence(nbar, splitters, tail_epsilon)?;
    let mut report = Report::new(&format!(
        "coherent --nbar {nbar} --N {splitters} --tail-epsilon {tail_epsilon:e}"
    ));
    report
        .value("per_mode_mean", nbar / f64::from(splitters + 1))
        .value("exact_max_coherence", exact)
        .value("certified_series_bound", tail_epsilon);
    match max_coherent_approx(nbar, splitters) {
        Ok(approx) => {
            report.value("gaussian_approximation", approx);
            if exact > 0.0 {
                report.value("approximation_rel_error", (approx - exact).abs() / exact);
            }
        }
        Err(_) => {
            // the approximation needs n̄ > 0; the exact value is still 0
            report.text("gaussian_approximation", "undefined for nbar = 0");
        }
    }
    if oracle {
        let input = coherent_input_state(nbar, splitters as usize + 1, tail_epsilon)?;
        let out_state = propagate(&config2(splitters)?, &input)?;
        let pure = out_state.to_pure_state()?;
        let value = l1_pure(&pure)?;
        let bound = l1_pure_bound(&pure);
        report
            .value("oracle_coherence", value)
            .value("oracle_abs_difference", (value - exact).abs())
            .value("certified_truncation_bound", bound);
        if (value - exact).abs() > bound + 1e-9 {
            bail!(
                "oracle disagrees with the closed form beyond the certified bound: \
                 |{value} - {exact}| > {bound}"
            );
        }
    }
    emit(&report.render(output.format), output.out.as_deref())
}

fn cmd_number(n: u32, splitters: u32, oracle: bool, output: &OutputOpts) -> Result<()> {
    let max = max_number_coherence(n, splitters)?;
    let sup = supremum_coherence(n, splitters)?;
    let mut report = Report::new(&format!("number --n {n} --N {splitters}"));
    report
        .value("max_coherence", max)
        .value("supremum_coherence", sup);
    if sup > 0.0 {
        report.value("supremum_fraction", max / sup);
    }
    if oracle {
        let input = TruncatedState::number_input(n, splitters as usize + 1)?;
        let out_state = propagate(&config2(splitters)?, &input)?;
        let value = l1_pure(&out_state.to_pure_state()?)?;
        report
            .value("oracle_coherence", value)
            .value("oracle_abs_difference", (value - max).abs());
        if (value - max).abs() > 1e-9 {
            bail!("oracle disagrees with the closed form: |{value} - {max}| > 1e-9");
        }
    }
    emit(&report.render(output.format), output.out.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn cmd_mixed(
    phase_averaged: bool,
    thermal: bool,
    nbar: f64,
    splitters: u32,
    tail_epsilon: f64,
    cutoff: Option<u32>,
    asymptotic: bool,
    nodes: usize,
    output: &OutputOpts,
) -> Result<()> {
    let (kind, mut dist) = if phase_averaged {
        (
            "phase-averaged",
            PhotonDistribution::poisson(nbar, tail_epsilon)?,
        )
    } else if thermal {
        ("thermal", PhotonDistribution::thermal(nbar, tail_epsilon)?)
    } else {
        unreachable!("clap enforces the kind group");
    };
    if let Some(k) = cutoff {
        dist = dist.with_cutoff(k);
    }
    let tau = optimal_split(splitters);
    let averaged = mixed_coherence(&dist, &tau)?;
    let mut report = Report::new(&format!(
        "mixed --{kind} --nbar {nbar} --N {splitters} --tail-epsilon {tail_epsilon:e}"
    ));
    report
        .text("kind", kind)
        .text("cutoff", dist.cutoff().to_string())
        .value("sector_average_coherence", averaged.value)
        .value("certified_tail_bound", averaged.tail_bound);
    if phase_averaged {
        // the pure-coherent route keeps inter-sector terms; report both
        let pure = max_coherent_coherence(nbar, splitters, tail_epsilon)?;
        report
            .value("pure_coherent_coherence", pure)
            .value("difference", averaged.value - pure);
    }
    if asymptotic {
        if !thermal {
            bail!("--asymptotic applies to thermal inputs only");
        }
        let closed = thermal_coherence_approx(nbar, splitters)?;
        let check = thermal_coherence_approx_check(nbar, splitters, nodes)?;
        report
            .value("asymptotic_coherence", closed)
            .value("quadrature_value", check.value)
            .value("quadrature_rel_change", check.rel_change);
        if !check.converged {
            eprintln!(
                "warning: quadrature not converged at {nodes} nodes \
                 (relative change {:.3e})",
                check.rel_change
            );
        }
    }
    emit(&report.render(output.format), output.out.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cascade(
    use_config2: bool,
    use_config1: bool,
    file: Option<PathBuf>,
    splitters: u32,
    depth: u32,
    nbar: Option<f64>,
    n: Option<u32>,
    output: &OutputOpts,
) -> Result<()> {
    let (cascade, source): (Cascade, String) = if let Some(path) = file {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read cascade file {}", path.display()))?;
        (Cascade::from_text(&text)?, format!("file {}", path.display()))
    } else if use_config1 {
        (config1(depth)?, format!("config1 --depth {depth}"))
    } else if use_config2 {
        (config2(splitters)?, format!("config2 --N {splitters}"))
    } else {
        unreachable!("clap enforces the source group");
    };
    let tau = tau_vector(&cascade)?;
    let mut report = Report::new(&format!("cascade {source}"));
    report
        .text("modes", cascade.mode_count().to_string())
        .text("splitters", cascade.splitters().len().to_string());
    for (j, value) in tau.values().iter().enumerate() {
        report.value(&format!("tau_{j}"), *value);
    }
    let norm: f64 = tau.values().iter().map(|v| v * v).sum();
    report
        .value("sum_tau_sq", norm)
        .value("max_deviation_from_uniform", tau.deviation_from_uniform());
    if let Some(nbar) = nbar {
        report.value("coherent_coherence", coherent_objective(nbar, &tau)?);
    }
    if let Some(n) = n {
        report.value("number_coherence", number_coherence(n, &tau)?);
    }
    emit(&report.render(output.format), output.out.as_deref())
}

fn coherent_objective(nbar: f64, tau: &SplitVector) -> Result<f64> {
    let means: Vec<f64> = tau.values().iter().map(|t| nbar * t * t).collect();
    Ok(beamsplit::product_coherence(
        &means,
        tol::DEFAULT_TAIL_EPSILON,
    )?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    nbar: Option<f64>,
    n: Option<u32>,
    resolution: usize,
    splitters: u32,
    trials: usize,
    delta: f64,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<()> {
    let input = match (nbar, n) {
        (Some(nbar), None) => InputKind::Coherent { nbar },
        (None, Some(n)) => InputKind::Number { n },
        _ => unreachable!("clap enforces the input group"),
    };
    let sweep = beamsplit::grid_search_single_splitter(input, resolution)?;
    let mut report = Report::new(&format!(
        "optimize {input} --resolution {resolution} --N {splitters} \
         --trials {trials} --delta {delta} --seed {seed}"
    ));
    report
        .text("input", input.to_string())
        .text("resolution", resolution.to_string())
        .value("argmax_theta", sweep.argmax_theta())
        .value("argmax_coherence", sweep.max_value())
        .value(
            "argmax_offset_from_quarter_pi",
            (sweep.argmax_theta() - std::f64::consts::FRAC_PI_4).abs(),
        );
    if trials > 0 {
        let pert = perturbation_test(input, splitters, trials, delta, seed)?;
        report
            .text("perturbation_trials", trials.to_string())
            .value("perturbation_delta", delta)
            .value("perturbation_worst_increase", pert.worst_increase)
            .text("perturbation_passed", pert.passed.to_string());
    }
    if let Some(path) = &out {
        let mut csv = report::provenance(&format!(
            "optimize sweep {input} --resolution {resolution}"
        ));
        csv.push_str("\ntheta,coherence\n");
        for row in sweep.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
        std::fs::write(path, csv)
            .with_context(|| format!("cannot write sweep to {}", path.display()))?;
    }
    emit(&report.render(format), None)
}
