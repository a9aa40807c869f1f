//! Command-line front end: load built-in or expression-defined
//! configurations, run verification suites, and emit machine- or
//! human-readable reports.
//!
//! Exit codes are a stable contract: 0 all applicable checks pass,
//! 1 at least one verification failure, 2 usage or configuration error.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::builtins::{
    example1_structure, example2_map, example3_map, interval, ken7, ken7_map,
    planar_projection_r4,
};
use crate::check::CheckRecord;
use crate::config::Config;
use crate::contact::AlmostContactStructure;
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::geometry::{ChartManifold, Point};
use crate::submersion::{
    conformal_dilation, is_riemannian_submersion, mu_space, xi_position, SmoothMap,
    XiPosition,
};
use crate::suite::{
    run_all, ReportContext, RunOptions, ToleranceSummary, VerificationReport,
};
use crate::warped::{
    composition_dilation_check, compose_with_submersion, make_warped, verify_oneill_proposition,
    wpc_obstruction, WarpedProduct,
};

#[derive(Parser)]
#[command(
    name = "subgeom",
    about = "Numerical verification of Riemannian-submersion geometry on chart manifolds",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a short profile of a built-in configuration.
    Describe {
        /// One of: example1, example2, example3, ken7
        source: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full verification report for one configuration.
    Verify {
        /// One of: example1, example2, example3, ken7
        source: String,
        /// Fail (exit 1) if the map is not a Riemannian submersion, even
        /// where the theory predicts that failure.
        #[arg(long)]
        require_riemannian: bool,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build I ×_f (flat fiber), compose the second projection with a
    /// fiber submersion, and report the dilation profile.
    Warp {
        /// Warping function of the interval variable t, e.g. "exp(t)".
        #[arg(allow_hyphen_values = true)]
        warp_expr: String,
        /// Fiber chart: flat2 or flat4.
        #[arg(long, default_value = "flat4")]
        fiber: String,
        /// Fiber submersion: planar (flat4 -> flat2) or identity.
        #[arg(long, default_value = "planar")]
        submersion: String,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Verify every built-in configuration (alias for verify over all).
    Suite {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// RNG seed for point sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance for first-derivative identities.
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for second-derivative identities.
    #[arg(long)]
    tol2: Option<f64>,
    /// Report format.
    #[arg(long, default_value = "json", value_parser = ["json", "text"])]
    format: String,
}

impl Common {
    fn config(&self) -> Config {
        let mut cfg = Config::default();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(samples) = self.samples {
            cfg.samples = samples;
        }
        if let Some(tol) = self.tol {
            cfg.tol_first = tol;
        }
        if let Some(tol2) = self.tol2 {
            cfg.tol_second = tol2;
        }
        cfg
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // --help/--version are not errors
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Describe { source, common } => {
            let cfg = common.config();
            let loaded = load_source(&source, &cfg)?;
            println!("{}", describe(&loaded, &cfg)?);
            Ok(0)
        }
        Command::Verify { source, require_riemannian, out, common } => {
            let cfg = common.config();
            let loaded = load_source(&source, &cfg)?;
            let opts = RunOptions { require_riemannian };
            let report = run_all(
                &loaded.name,
                &loaded.map_name,
                Some(&loaded.structure),
                loaded.map.as_ref(),
                &cfg,
                &opts,
            )?;
            emit(&report, &common.format, out.as_deref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Warp { warp_expr, fiber, submersion, out, common } => {
            let cfg = common.config();
            let report = run_warp(&warp_expr, &fiber, &submersion, &cfg)?;
            emit(&report, &common.format, out.as_deref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Suite { out, common } => {
            let cfg = common.config();
            let mut all_pass = true;
            let mut bodies = Vec::new();
            for source in ["example1", "example2", "example3", "ken7"] {
                let loaded = load_source(source, &cfg)?;
                let report = run_all(
                    &loaded.name,
                    &loaded.map_name,
                    Some(&loaded.structure),
                    loaded.map.as_ref(),
                    &cfg,
                    &RunOptions::default(),
                )?;
                all_pass = all_pass && report.passed();
                bodies.push(render(&report, &common.format));
            }
            let joined = bodies.join("\n");
            write_out(&joined, out.as_deref())?;
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

struct LoadedSource {
    name: String,
    map_name: String,
    structure: AlmostContactStructure,
    map: Option<SmoothMap>,
    /// Coordinate names of the source chart, for describe output.
    coord_names: Vec<&'static str>,
}

fn load_source(name: &str, cfg: &Config) -> Result<LoadedSource> {
    match name {
        "example1" => Ok(LoadedSource {
            name: "example1".into(),
            map_name: "none".into(),
            structure: example1_structure(),
            map: None,
            coord_names: vec!["x1", "x2", "y1", "y2", "z"],
        }),
        "example2" => {
            let s = example1_structure();
            let f = example2_map(&s.manifold);
            Ok(LoadedSource {
                name: "example1".into(),
                map_name: "example2".into(),
                structure: s,
                map: Some(f),
                coord_names: vec!["x1", "x2", "y1", "y2", "z"],
            })
        }
        "example3" => {
            let s = example1_structure();
            let f = example3_map(&s.manifold);
            Ok(LoadedSource {
                name: "example1".into(),
                map_name: "example3".into(),
                structure: s,
                map: Some(f),
                coord_names: vec!["x1", "x2", "y1", "y2", "z"],
            })
        }
        "ken7" => {
            let k = ken7(cfg)?;
            let f = ken7_map(&k.structure.manifold);
            Ok(LoadedSource {
                name: "ken7".into(),
                map_name: "ken7-map".into(),
                structure: k.structure,
                map: Some(f),
                coord_names: vec!["t", "x1", "y1", "x2", "y2", "x3", "y3"],
            })
        }
        other => Err(GeomError::Config(format!(
            "unknown source `{other}` (expected example1, example2, example3 or ken7)"
        ))),
    }
}

fn describe(loaded: &LoadedSource, cfg: &Config) -> Result<String> {
    let s = &loaded.structure;
    let m = &s.manifold;
    let mut parts = vec![format!("dim M={}", m.dim)];
    if let Some(f) = &loaded.map {
        parts.push(format!("dim N={}", f.target.dim));
        let pos = xi_position(f, s, cfg);
        parts.push(format!("ξ {pos}"));
        let mut sampler = cfg.sampler();
        let p = Point::new(sampler.point(m));
        let mu = mu_space(f, s, &p, cfg)?;
        let g = m.metric.at(&p);
        let xi = s.xi_at(&p);
        if mu.len() == 1
            && (crate::geometry::inner(&g, &mu.vectors[0], &xi).abs() - 1.0).abs() < 1e-6
        {
            parts.push("μ=span{ξ}".to_string());
        } else if !mu.is_empty() {
            parts.push(format!("dim μ={}", mu.len()));
        }
        if is_riemannian_submersion(f, cfg).passed() {
            parts.push("Riemannian submersion".to_string());
        } else if pos != XiPosition::Mixed {
            parts.push(format!("conformal {}", dilation_profile(f, loaded, cfg)?));
        }
    }
    Ok(parts.join(", "))
}

/// Describe the dilation: if λ(p) coincides with one source coordinate at
/// samples, name that coordinate; otherwise report the value at a probe.
fn dilation_profile(f: &SmoothMap, loaded: &LoadedSource, cfg: &Config) -> Result<String> {
    let mut sampler = cfg.sampler();
    let n = f.source.dim;
    let mut matches = vec![true; n];
    let mut probe = None;
    for _ in 0..cfg.samples.min(20) {
        let p = Point::new(sampler.point(&f.source));
        let lambda = conformal_dilation(f, &p, cfg)?;
        for i in 0..n {
            matches[i] = matches[i] && (lambda - p.coords[i]).abs() < 1e-6;
        }
        probe = Some((p, lambda));
    }
    if let Some(i) = matches.iter().position(|&m| m) {
        let name = loaded.coord_names.get(i).copied().unwrap_or("coordinate");
        return Ok(format!("λ={name}"));
    }
    let (p, lambda) = probe.expect("at least one sample");
    Ok(format!("λ({:.3?})={lambda:.6}", p.coords.as_slice()))
}

fn run_warp(warp_expr: &str, fiber: &str, submersion: &str, cfg: &Config) -> Result<VerificationReport> {
    let expr = Expr::parse(warp_expr)?;
    let warp = expr.to_scalar_field(&["t".to_string()]);
    // surface unknown-variable errors as config errors before sampling
    expr.eval(&[("t", crate::dual::Dual::constant(0.0))])?;

    let fiber_chart: Arc<ChartManifold> = match fiber {
        "flat2" => ChartManifold::euclidean(2, 1.0, "flat-R2"),
        "flat4" => ChartManifold::euclidean(4, 1.0, "flat-R4"),
        other => return Err(GeomError::Config(format!("unknown fiber `{other}`"))),
    };
    let w = make_warped(&interval(1.0), &fiber_chart, &warp)?;

    let f1 = match submersion {
        "planar" => {
            if fiber_chart.dim != 4 {
                return Err(GeomError::Config(
                    "the planar projection needs the flat4 fiber".into(),
                ));
            }
            let model = planar_projection_r4();
            let r = std::f64::consts::FRAC_1_SQRT_2;
            SmoothMap::new(
                fiber_chart.clone(),
                model.target.clone(),
                Arc::new(move |p: &[crate::dual::Dual]| {
                    vec![
                        (p[0].clone() + p[3].clone()) * r,
                        (p[1].clone() + p[2].clone()) * r,
                    ]
                }),
            )
        }
        "identity" => SmoothMap::identity(&fiber_chart),
        other => return Err(GeomError::Config(format!("unknown submersion `{other}`"))),
    };

    let mut checks: Vec<CheckRecord> = Vec::new();
    checks.push(verify_oneill_proposition(&w, cfg)?);

    // fundamental-tensor identity suites in the second-projection context
    let pi2_ctx = crate::oneill::ONeillContext::new(w.second_projection(), None, cfg.clone())?;
    checks.push(crate::oneill::verify_lemma_identities(&pi2_ctx)?);
    checks.push(crate::oneill::verify_skew_symmetry(&pi2_ctx)?);
    checks.push(crate::oneill::verify_fundamental_equations(&pi2_ctx)?);

    let f2 = compose_with_submersion(&w, &f1, cfg)?;
    let riem_index = checks.len();
    checks.push(is_riemannian_submersion(&f2, cfg));
    checks.push(composition_dilation_check(&w, &f2, cfg)?);
    checks.extend(wpc_obstruction(&w, &f2, cfg)?);

    // a constant warp makes the composition itself Riemannian; otherwise
    // the Riemannian record is informational, not a failure
    let constant_warp = warp_is_constant(&w, cfg);
    if !constant_warp {
        checks[riem_index].applicable = false;
    }

    let report = VerificationReport {
        source: format!("warped({warp_expr})"),
        map: format!("pi2 . {submersion}"),
        samples: cfg.samples,
        seed: cfg.seed,
        tolerances: ToleranceSummary {
            first: cfg.tol_first,
            second: cfg.tol_second,
            algebraic: cfg.tol_algebraic,
            anti_invariant: cfg.tol_anti_invariant,
        },
        context: ReportContext {
            source_dim: w.product.dim,
            target_dim: Some(f2.target.dim),
            xi_position: None,
            mu_dim: None,
            conformal: Some(!constant_warp),
        },
        checks,
        summary: crate::check::Verdict::Pass,
    };
    Ok(report.summarize())
}

fn warp_is_constant(w: &WarpedProduct, cfg: &Config) -> bool {
    let mut sampler = cfg.sampler();
    let p0 = Point::new(sampler.point(&w.base));
    let v0 = w.warp.at(&p0);
    (0..20).all(|_| {
        let p = Point::new(sampler.point(&w.base));
        (w.warp.at(&p) - v0).abs() < 1e-12
    })
}

fn render(report: &VerificationReport, format: &str) -> String {
    match format {
        "text" => report.to_text(),
        _ => report.to_json(),
    }
}

fn emit(report: &VerificationReport, format: &str, out: Option<&std::path::Path>) -> Result<()> {
    write_out(&render(report, format), out)
}

fn write_out(body: &str, out: Option<&std::path::Path>) -> Result<()> {
    let body = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| GeomError::Config(format!("cannot write report: {e}"))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
