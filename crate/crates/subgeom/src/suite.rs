//! Named verification procedures for the structural results on
//! anti-invariant submersions, plus the aggregated report runner.
//!
//! Every procedure gates itself on the hypotheses of the result it checks
//! (ξ position, Riemannian-submersion certificate, Kenmotsu certificate)
//! and returns inapplicable records, distinct from failures, when those
//! hypotheses do not hold.

use serde::{Deserialize, Serialize};

use crate::check::{CheckRecord, Verdict};
use crate::config::Config;
use crate::contact::{kenmotsu_check, structure_report, AlmostContactStructure};
use crate::error::Result;
use crate::geometry::{
    covariant_derivative_at, inner, lie_bracket, norm_g, Point, VectorField,
};
use crate::oneill::{
    is_harmonic, mean_curvature, second_form_suite, second_fundamental_form, tensor_a,
    tensor_a_vec, tensor_t_vec, verify_fundamental_equations, verify_lemma_identities,
    verify_skew_symmetry, ONeillContext,
};
use crate::submersion::{
    conformal_dilation, check_dim_theorem, horizontal_part_field, is_anti_invariant,
    is_riemannian_submersion, mu_space, split, vertical_part_field, vertical_projector,
    xi_position, SmoothMap, XiPosition,
};

/// Lemma identities for a horizontal characteristic field:
/// A_Xξ = 0, T_Uξ = U, and g(∇_Y CX, φU) = −g(CX, φ A_Y U).
pub fn run_lemma_horat(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<Vec<CheckRecord>> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal {
        return Ok(vec![
            CheckRecord::inapplicable("lemma-ike1", "Eq.(IKE1)", cfg.tol_first),
            CheckRecord::inapplicable("lemma-ike2", "Eq.(IKE2)", cfg.tol_first),
            CheckRecord::inapplicable("lemma-ike4", "Eq.(IKE4)", cfg.tol_second),
        ]);
    }
    let f = &ctx.map;
    let m = &f.source;
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(30);
    let mut worst_ike1: f64 = 0.0;
    let mut worst_ike2: f64 = 0.0;
    let mut worst_ike4: f64 = 0.0;
    for _ in 0..samples {
        let p = Point::new(sampler.point(m));
        let g = m.metric.at(&p);
        let sp = split(f, &p, cfg)?;
        let phi = s.phi_at(&p);

        for x in &sp.horizontal_frame.vectors {
            let a = tensor_a_vec(ctx, x, &s.xi_at(&p), &p)?;
            worst_ike1 = worst_ike1.max(norm_g(&g, &a));
        }
        for u in &sp.vertical_frame.vectors {
            let t = tensor_t_vec(ctx, u, &s.xi_at(&p), &p)?;
            worst_ike2 = worst_ike2.max(norm_g(&g, &(t - u)));
        }

        // IKE4 with a horizontal field X and its mu-part C X
        let x_field = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let y_field = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let cx_field = horizontal_part_field(f, &s.phi.apply(&x_field));
        let yv = y_field.at(&p);
        let d_cx = covariant_derivative_at(m, &yv, &cx_field, &p, cfg)?;
        for u in &sp.vertical_frame.vectors {
            let phi_u = &phi * u;
            let ayu = tensor_a(ctx, &y_field, &VectorField::constant(u.clone()), &p)?;
            let phi_ayu = &phi * ayu;
            let res = inner(&g, &d_cx, &phi_u) + inner(&g, &cx_field.at(&p), &phi_ayu);
            worst_ike4 = worst_ike4.max(res.abs());
        }
    }
    Ok(vec![
        CheckRecord::from_residual("lemma-ike1", "Eq.(IKE1)", worst_ike1, cfg.tol_first, samples),
        CheckRecord::from_residual("lemma-ike2", "Eq.(IKE2)", worst_ike2, cfg.tol_first, samples),
        CheckRecord::from_residual("lemma-ike4", "Eq.(IKE4)", worst_ike4, cfg.tol_second, samples),
    ])
}

/// The pivot identity behind the integrability equivalence:
/// g([X,Y],V) = g(A_X BY − A_Y BX, φV) + g(CX, φA_Y V) − g(CY, φA_X V),
/// plus the C = 0 specialization A_X φY = A_Y φX when μ = span{ξ}.
pub fn run_integrability_equivalence(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<Vec<CheckRecord>> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal {
        return Ok(vec![CheckRecord::inapplicable(
            "integrability-pivot",
            "Theorem 2",
            cfg.tol_second,
        )]);
    }
    let f = &ctx.map;
    let m = &f.source;
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(20);
    let mut worst: f64 = 0.0;
    let mut worst_cor: f64 = 0.0;
    let mut mu_is_xi = true;
    for _ in 0..samples {
        let p = Point::new(sampler.point(m));
        let g = m.metric.at(&p);
        let phi = s.phi_at(&p);
        let sp = split(f, &p, cfg)?;

        let x = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let y = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let bx = vertical_part_field(f, &s.phi.apply(&x));
        let by = vertical_part_field(f, &s.phi.apply(&y));
        let cx = horizontal_part_field(f, &s.phi.apply(&x));
        let cy = horizontal_part_field(f, &s.phi.apply(&y));

        let bracket = lie_bracket(&x, &y, &p, cfg).components;
        let ax_by = tensor_a(ctx, &x, &by, &p)?;
        let ay_bx = tensor_a(ctx, &y, &bx, &p)?;

        for v in &sp.vertical_frame.vectors {
            let phi_v = &phi * v;
            let axv = tensor_a(ctx, &x, &VectorField::constant(v.clone()), &p)?;
            let ayv = tensor_a(ctx, &y, &VectorField::constant(v.clone()), &p)?;
            let lhs = inner(&g, &bracket, v);
            let rhs = inner(&g, &(&ax_by - &ay_bx), &phi_v)
                + inner(&g, &cx.at(&p), &(&phi * &ayv))
                - inner(&g, &cy.at(&p), &(&phi * &axv));
            worst = worst.max((lhs - rhs).abs());
        }

        let mu = mu_space(f, s, &p, cfg)?;
        let xi = s.xi_at(&p);
        mu_is_xi = mu_is_xi
            && mu.len() == 1
            && (inner(&g, &mu.vectors[0], &xi).abs() - 1.0).abs() < 1e-6;
        if mu_is_xi {
            let phi_x = s.phi.apply(&x);
            let phi_y = s.phi.apply(&y);
            let ax_phiy = tensor_a(ctx, &x, &phi_y, &p)?;
            let ay_phix = tensor_a(ctx, &y, &phi_x, &p)?;
            worst_cor = worst_cor.max(norm_g(&g, &(ax_phiy - ay_phix)));
        }
    }
    let mut out = vec![CheckRecord::from_residual(
        "integrability-pivot",
        "Theorem 2",
        worst,
        cfg.tol_second,
        samples,
    )];
    if mu_is_xi {
        out.push(CheckRecord::from_residual(
            "integrability-corollary",
            "Corollary 1",
            worst_cor,
            cfg.tol_second,
            samples,
        ));
    }
    Ok(out)
}

/// Totally geodesic horizontal foliation: the condition residual
/// g(A_X BY, φV) − g(CY, φA_X V) must agree in verdict with the direct
/// witness ‖V(∇_X Y)‖ at samples.
pub fn run_totally_geodesic_horizontal(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<Vec<CheckRecord>> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal {
        return Ok(vec![CheckRecord::inapplicable(
            "tg-horizontal-consistency",
            "Theorem 3",
            cfg.tol_second,
        )]);
    }
    let f = &ctx.map;
    let m = &f.source;
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(20);
    let mut worst_cond: f64 = 0.0;
    let mut worst_direct: f64 = 0.0;
    for _ in 0..samples {
        let p = Point::new(sampler.point(m));
        let g = m.metric.at(&p);
        let phi = s.phi_at(&p);
        let sp = split(f, &p, cfg)?;
        let pv = vertical_projector(f, &p.coords);

        let x = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let y = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let by = vertical_part_field(f, &s.phi.apply(&y));
        let cy = horizontal_part_field(f, &s.phi.apply(&y));

        let ax_by = tensor_a(ctx, &x, &by, &p)?;
        for v in &sp.vertical_frame.vectors {
            let phi_v = &phi * v;
            let axv = tensor_a(ctx, &x, &VectorField::constant(v.clone()), &p)?;
            let res = inner(&g, &ax_by, &phi_v) - inner(&g, &cy.at(&p), &(&phi * &axv));
            worst_cond = worst_cond.max(res.abs());
        }
        let dxy = covariant_derivative_at(m, &x.at(&p), &y, &p, cfg)?;
        worst_direct = worst_direct.max(norm_g(&g, &(&pv * dxy)));
    }
    let cond_tg = worst_cond < cfg.tol_second;
    let direct_tg = worst_direct < cfg.tol_second;
    Ok(vec![CheckRecord::boolean(
        "tg-horizontal-consistency",
        "Theorem 3",
        cond_tg == direct_tg,
        samples,
    )])
}

/// Fibers are never totally geodesic: T_Vξ = V exhibits a unit witness,
/// and the map-level witness (∇F_*)(V,V) = −F_*(T_V V) is bounded away
/// from zero.
pub fn run_fibers_not_geodesic(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<Vec<CheckRecord>> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal {
        return Ok(vec![
            CheckRecord::inapplicable("fibers-not-geodesic", "Theorem 4", cfg.tol_first),
            CheckRecord::inapplicable("map-not-geodesic", "Theorem 5", cfg.tol_second),
        ]);
    }
    if ctx.fiber_dim == 0 {
        return Ok(vec![
            CheckRecord::inapplicable("fibers-not-geodesic", "Theorem 4", cfg.tol_first),
            CheckRecord::inapplicable("map-not-geodesic", "Theorem 5", cfg.tol_second),
        ]);
    }
    let f = &ctx.map;
    let m = &f.source;
    let mut sampler = cfg.sampler();
    let p = Point::new(sampler.point(m));
    let g = m.metric.at(&p);
    let sp = split(f, &p, cfg)?;
    let v = &sp.vertical_frame.vectors[0];

    // T ≠ 0 witness: T_Vξ = V with ‖V‖ = 1
    let t = tensor_t_vec(ctx, v, &s.xi_at(&p), &p)?;
    let witness = norm_g(&g, &(t - v)) < cfg.tol_first && (norm_g(&g, v) - 1.0).abs() < 1e-8;

    // map-level: ‖(∇F_*)(V,V)‖ = ‖F_*(T_V V)‖ ≥ ~1 since g(T_V V, ξ) = −1
    let term = second_fundamental_form(ctx, &VectorField::constant(v.clone()), &VectorField::constant(v.clone()), &p)?;
    let gn = f.target.metric.at(&term.base);
    let map_witness = norm_g(&gn, &term.components) > 0.5;

    Ok(vec![
        CheckRecord::boolean("fibers-not-geodesic", "Theorem 4", witness, 1),
        CheckRecord::boolean("map-not-geodesic", "Theorem 5", map_witness, 1),
    ])
}

/// |g(H,ξ) + 1| at sampled points (fibers are not minimal).
pub fn run_mean_curvature_remark(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal || ctx.fiber_dim == 0 {
        return Ok(CheckRecord::inapplicable("mean-curvature", "Remark 4", cfg.tol_first));
    }
    let f = &ctx.map;
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(25);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let g = f.source.metric.at(&p);
        let h = mean_curvature(ctx, &p)?.components;
        worst = worst.max((inner(&g, &h, &s.xi_at(&p)) + 1.0).abs());
    }
    Ok(CheckRecord::from_residual("mean-curvature", "Remark 4", worst, cfg.tol_first, samples))
}

/// With ξ vertical on a certified Kenmotsu source, no Riemannian
/// submersion exists: the record passes when the Riemannian-submersion
/// predicate indeed fails on the given map.
pub fn run_nonexistence_wpk(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    if !kenmotsu_check(s, cfg).passed() {
        return Ok(CheckRecord::inapplicable("wpk-nonexistence", "Theorem 8", cfg.tol_first));
    }
    if xi_position(&ctx.map, s, cfg) != XiPosition::Vertical {
        return Ok(CheckRecord::inapplicable("wpk-nonexistence", "Theorem 8", cfg.tol_first));
    }
    let riemannian = is_riemannian_submersion(&ctx.map, cfg).passed();
    Ok(CheckRecord::boolean("wpk-nonexistence", "Theorem 8", !riemannian, cfg.samples))
}

/// Non-harmonicity for the ξ-horizontal case: the tension field is
/// bounded away from zero, so the harmonicity check must fail.
pub fn run_non_harmonic(
    ctx: &ONeillContext,
    s: &AlmostContactStructure,
) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    if xi_position(&ctx.map, s, cfg) != XiPosition::Horizontal || ctx.fiber_dim == 0 {
        return Ok(CheckRecord::inapplicable("non-harmonic", "Theorem 6", cfg.tol_second));
    }
    let harmonic = is_harmonic(ctx)?;
    Ok(CheckRecord::boolean("non-harmonic", "Theorem 6", !harmonic.passed(), harmonic.points_sampled))
}

/// Summary of run-wide context, carried in the report for reproducibility.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportContext {
    pub source_dim: usize,
    pub target_dim: Option<usize>,
    pub xi_position: Option<String>,
    pub mu_dim: Option<usize>,
    pub conformal: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToleranceSummary {
    pub first: f64,
    pub second: f64,
    pub algebraic: f64,
    pub anti_invariant: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub source: String,
    pub map: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: ToleranceSummary,
    pub context: ReportContext,
    pub checks: Vec<CheckRecord>,
    pub summary: Verdict,
}

impl VerificationReport {
    pub fn summarize(mut self) -> Self {
        let pass = self
            .checks
            .iter()
            .filter(|c| c.applicable)
            .all(CheckRecord::passed);
        self.summary = if pass { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn passed(&self) -> bool {
        self.summary == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable mirror of the JSON body: one check per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "source: {}\nmap: {}\nsamples: {}  seed: {}\n",
            self.source, self.map, self.samples, self.seed
        ));
        if let Some(xi) = &self.context.xi_position {
            out.push_str(&format!("xi: {xi}"));
            if let Some(mu) = self.context.mu_dim {
                out.push_str(&format!("  mu-dim: {mu}"));
            }
            out.push('\n');
        }
        for c in &self.checks {
            let status = if !c.applicable {
                "SKIP"
            } else if c.passed() {
                "PASS"
            } else {
                "FAIL"
            };
            out.push_str(&format!(
                "{status:4}  {:<32} {:<18} residual {:>12.3e}  tol {:>9.1e}\n",
                c.name, c.paper_anchor, c.max_residual, c.tolerance
            ));
        }
        out.push_str(&format!(
            "summary: {}\n",
            if self.passed() { "pass" } else { "fail" }
        ));
        out
    }
}

/// Options for a full suite run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Treat the Riemannian-submersion predicate as a hard requirement
    /// even where the theory predicts failure (ξ vertical).
    pub require_riemannian: bool,
}

/// Executes structure checks, submersion predicates, the fundamental
/// tensor identity suites and every applicable named procedure for a
/// (structure, map) configuration. Deterministic given seed.
pub fn run_all(
    source_label: &str,
    map_label: &str,
    s: Option<&AlmostContactStructure>,
    map: Option<&SmoothMap>,
    cfg: &Config,
    opts: &RunOptions,
) -> Result<VerificationReport> {
    let mut checks: Vec<CheckRecord> = Vec::new();
    let mut context = ReportContext {
        source_dim: 0,
        target_dim: None,
        xi_position: None,
        mu_dim: None,
        conformal: None,
    };

    if let Some(s) = s {
        context.source_dim = s.manifold.dim;
        checks.extend(structure_report(s, cfg));
    }

    if let Some(f) = map {
        context.source_dim = f.source.dim;
        context.target_dim = Some(f.target.dim);

        let riem = is_riemannian_submersion(f, cfg);
        let mut sampler = cfg.sampler();
        let p0 = Point::new(sampler.point(&f.source));
        let conformal_ok = conformal_dilation(f, &p0, cfg).is_ok();
        context.conformal = Some(conformal_ok && !riem.passed());
        checks.push(CheckRecord::boolean(
            "horizontally-conformal",
            "Eq.(9)",
            conformal_ok,
            1,
        ));

        let xi_pos = s.map(|s| xi_position(f, s, cfg));
        context.xi_position = xi_pos.map(|x| x.to_string());

        let mut riem_record = riem.clone();
        if !opts.require_riemannian && xi_pos == Some(XiPosition::Vertical) {
            // Theorem 8 predicts failure here; the prediction itself is
            // checked by wpk-nonexistence below.
            riem_record.applicable = false;
        }
        checks.push(riem_record);

        if let Some(s) = s {
            checks.push(is_anti_invariant(f, s, cfg));
            let mu = mu_space(f, s, &p0, cfg)?;
            context.mu_dim = Some(mu.len());
            checks.push(check_dim_theorem(f, s, cfg)?);
        }

        let ctx = ONeillContext::new(f.clone(), s.cloned(), cfg.clone())?;
        checks.push(verify_lemma_identities(&ctx)?);
        checks.push(verify_skew_symmetry(&ctx)?);
        checks.push(verify_fundamental_equations(&ctx)?);
        checks.extend(second_form_suite(&ctx)?);

        if let Some(s) = s {
            checks.extend(run_lemma_horat(&ctx, s)?);
            checks.extend(run_integrability_equivalence(&ctx, s)?);
            checks.extend(run_totally_geodesic_horizontal(&ctx, s)?);
            checks.extend(run_fibers_not_geodesic(&ctx, s)?);
            checks.push(run_mean_curvature_remark(&ctx, s)?);
            checks.push(run_non_harmonic(&ctx, s)?);
            checks.push(run_nonexistence_wpk(&ctx, s)?);
        }
    }

    let report = VerificationReport {
        source: source_label.to_string(),
        map: map_label.to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        tolerances: ToleranceSummary {
            first: cfg.tol_first,
            second: cfg.tol_second,
            algebraic: cfg.tol_algebraic,
            anti_invariant: cfg.tol_anti_invariant,
        },
        context,
        checks,
        summary: Verdict::Pass,
    };
    Ok(report.summarize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{example1_structure, example2_map, example3_map};

    fn cfg() -> Config {
        Config { samples: 10, ..Config::default() }
    }

    #[test]
    fn full_report_passes_on_the_horizontal_example() {
        let s = example1_structure();
        let f = example2_map(&s.manifold);
        let r = run_all("example1", "example2", Some(&s), Some(&f), &cfg(), &RunOptions::default())
            .unwrap();
        assert!(r.passed(), "\n{}", r.to_text());
        assert_eq!(r.context.xi_position.as_deref(), Some("horizontal"));
        assert_eq!(r.context.mu_dim, Some(1));
        assert_eq!(r.context.conformal, Some(false));
        for want in ["kenmotsu-condition", "riemannian-submersion", "anti-invariant",
                     "lemma-ike1", "integrability-pivot", "wpk-nonexistence"] {
            assert!(r.checks.iter().any(|c| c.name == want), "missing check {want}");
        }
    }

    #[test]
    fn vertical_xi_gates_and_require_riemannian() {
        let s = example1_structure();
        let f = example3_map(&s.manifold);
        let c = cfg();
        let r = run_all("example1", "example3", Some(&s), Some(&f), &c, &RunOptions::default())
            .unwrap();
        assert!(r.passed(), "\n{}", r.to_text());
        assert_eq!(r.context.xi_position.as_deref(), Some("vertical"));
        assert_eq!(r.context.conformal, Some(true));
        let riem = r.checks.iter().find(|c| c.name == "riemannian-submersion").unwrap();
        assert!(!riem.applicable, "predicted failure is skipped, not failed");
        let wpk = r.checks.iter().find(|c| c.name == "wpk-nonexistence").unwrap();
        assert!(wpk.applicable && wpk.passed());

        let strict = run_all("example1", "example3", Some(&s), Some(&f), &c,
                             &RunOptions { require_riemannian: true }).unwrap();
        assert!(!strict.passed());
    }

    #[test]
    fn reports_are_deterministic_and_round_trip() {
        let s = example1_structure();
        let f = example2_map(&s.manifold);
        let c = cfg();
        let a = run_all("e1", "e2", Some(&s), Some(&f), &c, &RunOptions::default()).unwrap();
        let b = run_all("e1", "e2", Some(&s), Some(&f), &c, &RunOptions::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "same config and seed gives an identical body");

        let parsed: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(parsed.to_json(), a.to_json());
        assert!(a.to_json().chars().all(|ch| ch.is_ascii()), "no NaN/Inf tokens");
        assert!(!a.to_json().to_lowercase().contains("nan"));
        assert!(!a.to_json().to_lowercase().contains("inf"));

        let other = run_all("e1", "e2", Some(&s), Some(&f),
                            &Config { seed: 7, ..c }, &RunOptions::default()).unwrap();
        assert_ne!(a.to_json(), other.to_json(), "seed is part of the body");
    }

    #[test]
    fn structure_only_report() {
        let s = example1_structure();
        let r = run_all("example1", "-", Some(&s), None, &cfg(), &RunOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.context.target_dim, None);
        assert_eq!(r.checks.len(), 4);
    }
}
