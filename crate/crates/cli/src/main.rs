//! `glpin` — scenario runner for the pinned Ginzburg-Landau toolkit.
//!
//! Every computation of the library is exposed as a subcommand with
//! reproducible CSV/JSON outputs and a JSON manifest (config hash, seed,
//! version, wall time). Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure, 4 acceptance failure.

mod manifest;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use glpin_core::acceptance::{run_criterion, SuiteContext, CRITERION_COUNT};
use glpin_core::asympt::{
    compare_energy, homogenized_leading, leading_energy, psi4_prediction, HomogenizedKind,
};
use glpin_core::cell::{fhat_estimate, minimize_cell, Bc, CellProblem, FhatTable, MinimizeOptions};
use glpin_core::critical::{
    breakdown_scan, gamma_extract, hc3_empirical_local, hc3_formula, SpectralConstants, ThetaTable,
};
use glpin_core::gauge::vector_potential_from_field;
use glpin_core::solver::{minimize_coupled, minimize_frozen, SolverOptions};
use glpin_core::spectral::{halfplane_lambda, lambda0, montgomery_lambda, mu1, theta0};
use glpin_core::{Error, Result};

use manifest::ManifestBuilder;
use scenario::Scenario;

#[derive(Parser)]
#[command(name = "glpin", version, about = "Pinned Ginzburg-Landau numerics")]
struct Cli {
    /// Scenario file with key = value defaults.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "runs")]
    out_dir: PathBuf,
    /// Domain spec: square | square:SIDE[:OX:OY] | disk:[CX:CY:]R
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Nodes per side.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Pinning spec, e.g. constant:1.0, linear:1:-2:0, periodic:1:0.5:1:1
    #[arg(long, global = true)]
    pinning: Option<String>,
    /// Applied field spec, e.g. constant:1.0, linear-x1:1, ring:0:0:0.5
    #[arg(long, global = true)]
    field: Option<String>,
    /// RNG seed recorded in outputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rayon worker count (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the universal bulk function fhat on a log-spaced b grid.
    Fhat {
        /// `default` for 40 points on [0.02, 1], or B_MIN:POINTS.
        #[arg(long, default_value = "default")]
        b_grid: String,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 2)]
        seeds: usize,
        /// Reuse (or create) a cached table at this path.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Evaluate a single b instead of building the table.
        #[arg(long)]
        b: Option<f64>,
    },
    /// Minimize the frozen-coefficient cell problem on Q_R.
    Cell {
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value = "dirichlet")]
        bc: String,
        #[arg(long, default_value_t = 4)]
        seeds: usize,
        #[arg(long)]
        cell_resolution: Option<usize>,
    },
    /// Minimize the full functional at (kappa, H).
    Minimize {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        h: Option<f64>,
        /// H = sigma * kappa when --h is absent.
        #[arg(long)]
        sigma: Option<f64>,
        /// Alternate psi descent with potential updates.
        #[arg(long, default_value_t = false)]
        coupled: bool,
        #[arg(long, default_value_t = 6000)]
        max_iter: usize,
        /// Write a binary checkpoint of the final state.
        #[arg(long, default_value_t = true)]
        save_state: bool,
    },
    /// Solver energy vs the leading-order formula over a kappa sweep.
    EnergyCompare {
        #[arg(long, value_delimiter = ',')]
        kappas: Vec<f64>,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        fhat_cache: Option<PathBuf>,
    },
    /// Solver psi^4 integral vs the closed-form prediction.
    Psi4 {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        fhat_cache: Option<PathBuf>,
    },
    /// Lowest eigenvalue of the covariant Schroedinger operator.
    Mu1 {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        residual_tol: f64,
    },
    /// The de Gennes constant Theta0 with its minimizer.
    Theta0 {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The Montgomery constant lambda0 (or lambda(tau) at a given tau).
    Montgomery {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau: Option<f64>,
    },
    /// Half-plane eigenvalue lambda(R^2_+, theta).
    Halfplane {
        #[arg(long)]
        theta: Option<f64>,
        /// Build the 11-point theta table instead of a single angle.
        #[arg(long, default_value_t = false)]
        table: bool,
        #[arg(long, default_value_t = 12.0)]
        l: f64,
        #[arg(long, default_value_t = 84)]
        n: usize,
    },
    /// Third-critical-field formula and empirical bracket.
    Hc3 {
        /// `vanishing` (Gamma nonempty) or `constant` (Gamma empty).
        #[arg(long)]
        case: String,
        #[arg(long)]
        kappa: f64,
        /// Bracket lo,hi for the mu1 sign bisection (in units of H).
        #[arg(long, value_delimiter = ',')]
        bracket: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Skip the bisection and report only the formula value.
        #[arg(long, default_value_t = false)]
        formula_only: bool,
    },
    /// Scan an H grid for the first normal frozen-potential minimizer.
    Breakdown {
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_delimiter = ',')]
        h_grid: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Homogenized leading-order formula vs direct evaluation.
    Homogenize {
        /// `oscillating` or `shifted`.
        #[arg(long, default_value = "oscillating")]
        kind: String,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        fhat_cache: Option<PathBuf>,
    },
    /// Extract the zero set of the applied field with crossing angles.
    Gamma,
    /// Run the acceptance suite (nonzero exit on any failure).
    Verify {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<usize>,
        #[arg(long)]
        fhat_cache: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global()
        {
            eprintln!("config error: rayon pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Parse(_) | Error::GridMismatch(_) => {
                    ExitCode::from(2)
                }
                Error::Numerical(_) | Error::Io(_) => ExitCode::from(3),
            }
        }
    }
}

fn scenario_of(cli: &Cli) -> Result<Scenario> {
    scenario::resolve(
        cli.scenario.as_deref(),
        cli.domain.as_deref(),
        cli.resolution,
        cli.pinning.as_deref(),
        cli.field.as_deref(),
        cli.seed,
    )
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap_or_default())?;
    Ok(path)
}

fn load_fhat(cache: Option<&Path>, seeds: usize, seed: u64) -> Result<FhatTable> {
    if let Some(p) = cache {
        if p.exists() {
            return FhatTable::read_csv(p);
        }
    }
    let opts =
        MinimizeOptions { seeds, rng_seed: seed, ..SuiteContext::table_build_options() };
    let table = FhatTable::build_default(&opts)?;
    if let Some(p) = cache {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        table.write_csv(p)?;
    }
    Ok(table)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let sc = scenario_of(cli)?;
    let out = &cli.out_dir;
    let workers = if cli.workers == 0 { rayon::current_num_threads() } else { cli.workers };
    match &cli.cmd {
        Cmd::Fhat { b_grid, tol, seeds, cache, b } => {
            let mut mf = ManifestBuilder::new("fhat", sc.seed, workers);
            mf.set("b_grid", b_grid);
            mf.set("tol", tol);
            mf.set("seeds", seeds);
            let opts = MinimizeOptions { seeds: *seeds, rng_seed: sc.seed, ..Default::default() };
            if let Some(b) = b {
                let p = fhat_estimate(*b, *tol, &opts)?;
                let path = write_json(
                    out,
                    "fhat_point.json",
                    &serde_json::json!({
                        "b": p.b, "fhat": p.value, "r_used": p.r_used,
                        "bound": p.bound, "capped": p.capped,
                    }),
                )?;
                println!("fhat({b}) = {:.6} (R = {:.1}, bound {:.2e})", p.value, p.r_used, p.bound);
                mf.output(&path);
            } else {
                let table = if b_grid == "default" {
                    load_fhat(cache.as_deref(), *seeds, sc.seed)?
                } else {
                    let (bmin, npts) = b_grid
                        .split_once(':')
                        .ok_or_else(|| Error::invalid("b-grid: expected `default` or B_MIN:POINTS"))?;
                    let bmin: f64 =
                        bmin.parse().map_err(|e| Error::invalid(format!("b-grid: {e}")))?;
                    let npts: usize =
                        npts.parse().map_err(|e| Error::invalid(format!("b-grid: {e}")))?;
                    FhatTable::build(bmin, npts, *tol, &opts)?
                };
                std::fs::create_dir_all(out)?;
                let path = out.join("fhat_table.csv");
                table.write_csv(&path)?;
                println!("wrote {} points to {}", table.points.len(), path.display());
                mf.output(&path);
            }
            mf.extend(&sc.resolved);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cell { b, alpha, r, bc, seeds, cell_resolution } => {
            let mut mf = ManifestBuilder::new("cell", sc.seed, workers);
            let bc = match bc.as_str() {
                "dirichlet" => Bc::Dirichlet,
                "neumann" => Bc::Neumann,
                other => return Err(Error::invalid(format!("bc `{other}`"))),
            };
            let resolution =
                cell_resolution.unwrap_or_else(|| (((r / 0.25).ceil() as usize).div_ceil(4) * 4).max(64));
            let p = CellProblem::new(*b, *alpha, 1, *r, bc, resolution)?;
            let opts = MinimizeOptions { seeds: *seeds, rng_seed: sc.seed, ..Default::default() };
            let (u, e) = minimize_cell(&p, &opts)?;
            let path = write_json(
                out,
                "cell.json",
                &serde_json::json!({
                    "b": b, "alpha": alpha, "r": r, "resolution": resolution,
                    "energy": e, "density": e / (r * r), "sup_u": u.sup_abs(),
                }),
            )?;
            println!("e = {e:.6}, e/R^2 = {:.6}", e / (r * r));
            mf.set("b", b);
            mf.set("alpha", alpha);
            mf.set("r", r);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Minimize { kappa, h, sigma, coupled, max_iter, save_state } => {
            let mut mf = ManifestBuilder::new("minimize", sc.seed, workers);
            let h_ext = resolve_h(*h, *sigma, *kappa)?;
            let grid = sc.domain.build(sc.resolution)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let b0 = sc.field.sample(&grid)?;
            let opts = SolverOptions {
                max_iter: *max_iter,
                rng_seed: sc.seed,
                trace_every: 50,
                ..Default::default()
            };
            let rep = if *coupled {
                minimize_coupled(&a, &b0, *kappa, h_ext, &opts)?
            } else {
                minimize_frozen(&a, &b0, *kappa, h_ext, &opts)?
            };
            std::fs::create_dir_all(out)?;
            let trace_path = out.join("minimize_trace.csv");
            let mut w = String::from("iteration,energy,residual\n");
            for (it, e, r) in &rep.trace {
                w.push_str(&format!("{it},{e:.17e},{r:.17e}\n"));
            }
            std::fs::write(&trace_path, w)?;
            let json = serde_json::json!({
                "kappa": kappa, "h": h_ext, "coupled": coupled,
                "energy": rep.state.energy,
                "iterations": rep.iterations,
                "converged": rep.converged,
                "residuals": rep.state.residuals,
                "sup_psi_sq": rep.state.psi.sup_abs().powi(2),
                "l2_psi": rep.state.psi.l2_norm(),
            });
            let json_path = write_json(out, "minimize.json", &json)?;
            if *save_state {
                let ck = out.join("state.gls");
                rep.state.save(&ck)?;
                mf.output(&ck);
            }
            println!(
                "E = {:.6} ({} iterations, converged = {})",
                rep.state.energy, rep.iterations, rep.converged
            );
            mf.set("kappa", kappa);
            mf.set("h", h_ext);
            mf.set("coupled", coupled);
            mf.extend(&sc.resolved);
            mf.output(&trace_path);
            mf.output(&json_path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::EnergyCompare { kappas, sigma, fhat_cache } => {
            let mut mf = ManifestBuilder::new("energy-compare", sc.seed, workers);
            if kappas.is_empty() {
                return Err(Error::invalid("need at least one kappa"));
            }
            let table = load_fhat(fhat_cache.as_deref(), 2, sc.seed)?;
            let grid = sc.domain.build(sc.resolution)?;
            let b0 = sc.field.sample(&grid)?;
            let opts = SolverOptions { rng_seed: sc.seed, ..Default::default() };
            let rows = compare_energy(&sc.pinning, &b0, kappas, *sigma, &table, &opts)?;
            std::fs::create_dir_all(out)?;
            let path = out.join("energy_compare.csv");
            let mut w = String::from("kappa,H,E_min,E_leading,rel_dev\n");
            for r in &rows {
                w.push_str(&format!(
                    "{},{},{:.17e},{:.17e},{:.17e}\n",
                    r.kappa, r.h_ext, r.e_min, r.e_leading, r.rel_dev
                ));
                println!(
                    "kappa = {:>6}: E_min = {:.4}, leading = {:.4}, rel dev = {:.4}",
                    r.kappa, r.e_min, r.e_leading, r.rel_dev
                );
            }
            std::fs::write(&path, w)?;
            mf.set("sigma", sigma);
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Psi4 { kappa, sigma, fhat_cache } => {
            let mut mf = ManifestBuilder::new("psi4", sc.seed, workers);
            let table = load_fhat(fhat_cache.as_deref(), 2, sc.seed)?;
            let grid = sc.domain.build(sc.resolution)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let b0 = sc.field.sample(&grid)?;
            let opts = SolverOptions { rng_seed: sc.seed, ..Default::default() };
            let rep = minimize_frozen(&a, &b0, *kappa, sigma * kappa, &opts)?;
            let solver = rep.state.psi.l4_norm().powi(4);
            let predicted =
                psi4_prediction(grid.inside(), &a, &b0, *kappa, sigma * kappa, &table)?;
            let path = write_json(
                out,
                "psi4.json",
                &serde_json::json!({
                    "kappa": kappa, "sigma": sigma,
                    "solver": solver, "predicted": predicted,
                    "rel_dev": (solver - predicted).abs() / predicted.abs().max(1e-300),
                }),
            )?;
            println!("int |psi|^4: solver {solver:.6}, predicted {predicted:.6}");
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mu1 { kappa, h, residual_tol } => {
            let mut mf = ManifestBuilder::new("mu1", sc.seed, workers);
            let grid = sc.domain.build(sc.resolution)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let b0 = sc.field.sample(&grid)?;
            let bundle = vector_potential_from_field(&b0, &grid, 1e-10)?;
            let (r, _) = mu1(*kappa, *h, &a, &bundle.f, *residual_tol, None)?;
            let path = write_json(
                out,
                "mu1.json",
                &serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?,
            )?;
            println!("mu1({kappa}, {h}) = {:.6} (residual {:.2e})", r.value, r.residual);
            mf.set("kappa", kappa);
            mf.set("h", h);
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Theta0 { tol } => {
            let mut mf = ManifestBuilder::new("theta0", sc.seed, workers);
            let r = theta0(*tol)?;
            let path = write_json(
                out,
                "theta0.json",
                &serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?,
            )?;
            println!(
                "Theta0 = {:.8} at xi0 = {:.8} (residual {:.2e})",
                r.value,
                r.minimizer_param.unwrap_or(f64::NAN),
                r.residual
            );
            mf.set("tol", tol);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Montgomery { tol, tau } => {
            let mut mf = ManifestBuilder::new("montgomery", sc.seed, workers);
            let (name, value) = match tau {
                Some(tau) => {
                    let v = montgomery_lambda(*tau, 12.0, 4000)?;
                    println!("lambda({tau}) = {v:.8}");
                    ("montgomery_lambda_tau.json", serde_json::json!({"tau": tau, "value": v}))
                }
                None => {
                    let r = lambda0(*tol)?;
                    println!(
                        "lambda0 = {:.8} at tau0 = {:.8} (residual {:.2e})",
                        r.value,
                        r.minimizer_param.unwrap_or(f64::NAN),
                        r.residual
                    );
                    (
                        "montgomery.json",
                        serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?,
                    )
                }
            };
            let path = write_json(out, name, &value)?;
            mf.set("tol", tol);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Halfplane { theta, table, l, n } => {
            let mut mf = ManifestBuilder::new("halfplane", sc.seed, workers);
            if *table {
                let t = ThetaTable::build(*l, *n, 1e-7)?;
                std::fs::create_dir_all(out)?;
                let path = out.join("halfplane_table.csv");
                let mut w = String::from("theta,lambda\n");
                for (th, v) in t.thetas.iter().zip(&t.values) {
                    w.push_str(&format!("{th:.17e},{v:.17e}\n"));
                    println!("lambda({th:.4}) = {v:.6}");
                }
                std::fs::write(&path, w)?;
                mf.output(&path);
            } else {
                let theta = theta.ok_or_else(|| Error::invalid("need --theta or --table"))?;
                let r = halfplane_lambda(theta, *l, *n, 1e-8)?;
                let path = write_json(
                    out,
                    "halfplane.json",
                    &serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?,
                )?;
                println!(
                    "lambda(R^2_+, {theta:.4}) = {:.6} (residual {:.2e}, truncation flag {})",
                    r.value, r.residual, r.truncation_flag
                );
                mf.output(&path);
            }
            mf.set("l", l);
            mf.set("n", n);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Hc3 { case, kappa, bracket, tol, formula_only } => {
            let mut mf = ManifestBuilder::new("hc3", sc.seed, workers);
            let grid = sc.domain.build(sc.resolution)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let b0 = match case.as_str() {
                // the scenario default field is constant; the vanishing case
                // needs a sign change, so default to linear-x1
                "vanishing" if cli.field.is_none() => {
                    scenario::parse_field("linear-x1:1.0")?.sample(&grid)?
                }
                _ => sc.field.sample(&grid)?,
            };
            let ctx = SuiteContext::global();
            let consts = SpectralConstants {
                theta0: ctx.theta0().value,
                lambda0: ctx.lambda0().value,
                thetas: ctx.theta_table().clone(),
            };
            let gamma = gamma_extract(&b0)?;
            let gamma_opt = match case.as_str() {
                "vanishing" => {
                    if gamma.is_empty() {
                        return Err(Error::invalid("case `vanishing` needs a vanishing field"));
                    }
                    Some(&gamma)
                }
                "constant" => None,
                other => return Err(Error::invalid(format!("case `{other}`"))),
            };
            let mut report = hc3_formula(&a, &b0, *kappa, gamma_opt, &consts)?;
            if !*formula_only && !report.no_superconductivity {
                let (lo, hi) = match bracket.as_slice() {
                    [lo, hi] => (*lo, *hi),
                    [] => {
                        let f = report.formula_value;
                        (0.6 * f, 1.6 * f)
                    }
                    _ => return Err(Error::invalid("bracket must be LO,HI")),
                };
                let br = hc3_empirical_local(*kappa, &a, &b0, (lo, hi), *tol, 1e-5)?;
                report.empirical_bracket = Some((br.h_lo, br.h_hi));
                println!(
                    "bracket [{:.4}, {:.4}] after {} eigensolves",
                    br.h_lo, br.h_hi, br.eigensolves
                );
            }
            println!("formula H_C3 = {:.6} (case {})", report.formula_value, report.case);
            let path = write_json(
                out,
                "hc3.json",
                &serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?,
            )?;
            mf.set("case", case);
            mf.set("kappa", kappa);
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Breakdown { kappa, h_grid, tol } => {
            let mut mf = ManifestBuilder::new("breakdown", sc.seed, workers);
            let grid = sc.domain.build(sc.resolution)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let b0 = sc.field.sample(&grid)?;
            let opts = SolverOptions { rng_seed: sc.seed, max_iter: 3000, ..Default::default() };
            let (h, found) = breakdown_scan(*kappa, &a, &b0, h_grid, *tol, &opts)?;
            let path = write_json(
                out,
                "breakdown.json",
                &serde_json::json!({
                    "kappa": kappa, "h_break": h, "found": found,
                    "h_over_kappa": h / kappa, "h_over_kappa2": h / (kappa * kappa),
                }),
            )?;
            println!("breakdown at H = {h} (found = {found})");
            mf.set("kappa", kappa);
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Homogenize { kind, kappa, sigma, fhat_cache } => {
            let mut mf = ManifestBuilder::new("homogenize", sc.seed, workers);
            let table = load_fhat(fhat_cache.as_deref(), 2, sc.seed)?;
            let kind = match kind.as_str() {
                "oscillating" => HomogenizedKind::Oscillating,
                "shifted" => HomogenizedKind::ShiftedPeriodic,
                "plain" => HomogenizedKind::KappaIndependent,
                other => return Err(Error::invalid(format!("kind `{other}`"))),
            };
            let grid = sc.domain.build(sc.resolution)?;
            let b0 = sc.field.sample(&grid)?;
            let hom = homogenized_leading(kind, &sc.pinning, &b0, *sigma, &table)?;
            let a = sc.pinning.sample(&grid, *kappa)?;
            let direct =
                leading_energy(&a, &b0, *kappa, sigma * kappa, &table)?.leading / (kappa * kappa);
            let path = write_json(
                out,
                "homogenize.json",
                &serde_json::json!({
                    "kappa": kappa, "sigma": sigma,
                    "homogenized_per_kappa2": hom,
                    "direct_per_kappa2": direct,
                    "rel_dev": (hom - direct).abs() / hom.abs().max(1e-300),
                }),
            )?;
            println!("homogenized {hom:.6} vs direct {direct:.6}");
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gamma => {
            let mut mf = ManifestBuilder::new("gamma", sc.seed, workers);
            let grid = sc.domain.build(sc.resolution)?;
            let b0 = sc.field.sample(&grid)?;
            let gd = gamma_extract(&b0)?;
            std::fs::create_dir_all(out)?;
            let path = out.join("gamma.csv");
            let mut w = String::from("x,y,grad_norm,kind,theta\n");
            for p in &gd.interior {
                w.push_str(&format!("{:.17e},{:.17e},{:.17e},interior,\n", p.pos.0, p.pos.1, p.grad_norm));
            }
            for c in &gd.crossings {
                w.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},crossing,{:.17e}\n",
                    c.pos.0, c.pos.1, c.grad_norm, c.theta
                ));
            }
            std::fs::write(&path, w)?;
            println!(
                "{} interior samples, {} boundary crossings",
                gd.interior.len(),
                gd.crossings.len()
            );
            mf.extend(&sc.resolved);
            mf.output(&path);
            mf.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { only, fhat_cache } => {
            let mut mf = ManifestBuilder::new("verify", sc.seed, workers);
            let ctx: &SuiteContext = match fhat_cache {
                Some(p) => {
                    // a leaked context carries the cache path for this run
                    let mut c = SuiteContext::new();
                    c.fhat_cache_path = Some(p.clone());
                    Box::leak(Box::new(c))
                }
                None => SuiteContext::global(),
            };
            let ids: Vec<usize> = match only {
                Some(id) => {
                    if *id == 0 || *id > CRITERION_COUNT {
                        return Err(Error::invalid(format!("criterion {id} out of range")));
                    }
                    vec![*id]
                }
                None => (1..=CRITERION_COUNT).collect(),
            };
            let mut all_pass = true;
            let mut lines = Vec::new();
            for id in ids {
                let rep = run_criterion(id, ctx);
                println!("{}", rep.line());
                all_pass &= rep.pass;
                lines.push(serde_json::json!({
                    "id": rep.id, "name": rep.name, "pass": rep.pass, "detail": rep.detail,
                }));
            }
            let path = write_json(out, "verify.json", &serde_json::json!({ "criteria": lines }))?;
            mf.output(&path);
            mf.write(out)?;
            if all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }
    }
}

fn resolve_h(h: Option<f64>, sigma: Option<f64>, kappa: f64) -> Result<f64> {
    match (h, sigma) {
        (Some(h), None) => Ok(h),
        (None, Some(s)) => Ok(s * kappa),
        _ => Err(Error::invalid("give exactly one of --h or --sigma")),
    }
}
