//! Warped products M₁ ×_f M₂ with metric g₁ ⊕ f²g₂: construction, the
//! warped-connection identities, the canonical second projection (a
//! horizontally conformal submersion), composition with a Riemannian
//! submersion of the fiber, and the constancy obstruction for Riemannian
//! submersions with vertical ∂t.

use std::sync::Arc;

use nalgebra::DVector;

use crate::check::CheckRecord;
use crate::config::Config;
use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::geometry::{
    covariant_derivative, gradient, inner, norm_g, ChartManifold, MetricField, Point, ScalarField,
    VectorField,
};
use crate::oneill::{tensor_a_vec, ONeillContext};
use crate::submersion::{
    horizontal_projector, is_riemannian_submersion, split, SmoothMap,
};

/// A single-chart realization of M₁ ×_f M₂.
#[derive(Clone)]
pub struct WarpedProduct {
    pub base: Arc<ChartManifold>,
    pub fiber: Arc<ChartManifold>,
    pub warp: ScalarField,
    pub product: Arc<ChartManifold>,
}

/// Builds the product chart with metric g₁ ⊕ f²g₂. The warping function
/// must be closed-form (dual-capable) and positive on the base domain.
pub fn make_warped(
    base: &Arc<ChartManifold>,
    fiber: &Arc<ChartManifold>,
    warp: &ScalarField,
) -> Result<WarpedProduct> {
    let warp_dual = warp
        .dual_fn()
        .ok_or_else(|| GeomError::Precondition("warping function must be closed-form".into()))?;

    let cfg = Config::default();
    let mut sampler = cfg.sampler();
    for _ in 0..cfg.samples.min(100) {
        let p = Point::new(sampler.point(base));
        let v = warp.at(&p);
        if v <= 0.0 {
            return Err(GeomError::Precondition(format!(
                "warping function is nonpositive ({v}) inside the base domain"
            )));
        }
    }

    let n1 = base.dim;
    let n2 = fiber.dim;
    let dim = n1 + n2;
    let g1 = base.metric.field.dual_fn();
    let g2 = fiber.metric.field.dual_fn();
    let metric = MetricField::new(
        dim,
        Arc::new(move |p: &[Dual]| {
            let gb = g1(&p[..n1]);
            let gf = g2(&p[n1..]);
            let f = warp_dual(&p[..n1]).remove(0);
            let f2 = f.clone() * f;
            let mut out = vec![Dual::constant(0.0); dim * dim];
            for i in 0..n1 {
                for j in 0..n1 {
                    out[i * dim + j] = gb[i * n1 + j].clone();
                }
            }
            for i in 0..n2 {
                for j in 0..n2 {
                    out[(n1 + i) * dim + (n1 + j)] = f2.clone() * gf[i * n2 + j].clone();
                }
            }
            out
        }),
    );
    let label = format!("{} x_f {}", base.label, fiber.label);
    let product = ChartManifold::new(dim, base.domain.product(&fiber.domain), metric, &label);
    Ok(WarpedProduct {
        base: base.clone(),
        fiber: fiber.clone(),
        warp: warp.clone(),
        product,
    })
}

impl WarpedProduct {
    /// Lift a field on the base to the product (fiber components zero).
    pub fn lift_base(&self, x: &VectorField) -> VectorField {
        lift(x, self.base.dim, self.fiber.dim, true)
    }

    /// Lift a field on the fiber to the product (base components zero).
    pub fn lift_fiber(&self, x: &VectorField) -> VectorField {
        lift(x, self.base.dim, self.fiber.dim, false)
    }

    fn base_point(&self, p: &Point) -> Point {
        Point::new(p.coords.rows(0, self.base.dim).into())
    }

    fn fiber_point(&self, p: &Point) -> Point {
        Point::new(p.coords.rows(self.base.dim, self.fiber.dim).into())
    }

    /// π₂(p,q) = q, horizontally conformal with e^{2λ} = f²(p).
    pub fn second_projection(&self) -> SmoothMap {
        let n1 = self.base.dim;
        SmoothMap::new(
            self.product.clone(),
            self.fiber.clone(),
            Arc::new(move |p: &[Dual]| p[n1..].to_vec()),
        )
    }
}

fn lift(x: &VectorField, n1: usize, n2: usize, base_side: bool) -> VectorField {
    let dim = n1 + n2;
    match x.dual_fn() {
        Some(f) => VectorField::analytic(
            dim,
            Arc::new(move |p: &[Dual]| {
                let vals = if base_side { f(&p[..n1]) } else { f(&p[n1..]) };
                let mut out = vec![Dual::constant(0.0); dim];
                let offset = if base_side { 0 } else { n1 };
                for (i, v) in vals.into_iter().enumerate() {
                    out[offset + i] = v;
                }
                out
            }),
        ),
        None => {
            let x = x.clone();
            VectorField::numeric(
                dim,
                Arc::new(move |p: &DVector<f64>| {
                    let vals = if base_side {
                        x.eval(&p.rows(0, n1).into())
                    } else {
                        x.eval(&p.rows(n1, n2).into())
                    };
                    let mut out = DVector::zeros(dim);
                    let offset = if base_side { 0 } else { n1 };
                    for (i, v) in vals.iter().enumerate() {
                        out[offset + i] = *v;
                    }
                    out
                }),
            )
        }
    }
}

/// The four warped-connection identities over lifted coordinate fields:
///   (i)   ∇_{X₁}Y₁ is the lift of ∇¹_{X₁}Y₁
///   (ii)  ∇_{X₁}X₂ = ∇_{X₂}X₁ = (X₁f/f) X₂
///   (iii) nor ∇_{X₂}Y₂ = −(g(X₂,Y₂)/f) grad f
///   (iv)  tan ∇_{X₂}Y₂ is the lift of ∇²_{X₂}Y₂
pub fn verify_oneill_proposition(w: &WarpedProduct, cfg: &Config) -> Result<CheckRecord> {
    let n1 = w.base.dim;
    let n2 = w.fiber.dim;
    let m = &w.product;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(25);
    for _ in 0..samples {
        let p = Point::new(sampler.point(m));
        let pb = w.base_point(&p);
        let pf = w.fiber_point(&p);
        let g = m.metric.at(&p);

        let grad_f = gradient(&w.base, &w.warp, &pb, cfg)?.components;
        let f_val = w.warp.at(&pb);
        let df = w.warp.differential(&pb, cfg);

        for i in 0..n1 {
            let x1 = VectorField::coordinate(n1, i);
            let lx1 = w.lift_base(&x1);
            for jdx in 0..n1 {
                // (i)
                let y1 = VectorField::coordinate(n1, jdx);
                let ly1 = w.lift_base(&y1);
                let full = covariant_derivative(m, &lx1, &ly1, &p, cfg)?.components;
                let on_base = covariant_derivative(&w.base, &x1, &y1, &pb, cfg)?.components;
                let mut lifted = DVector::zeros(n1 + n2);
                for k in 0..n1 {
                    lifted[k] = on_base[k];
                }
                worst = worst.max(norm_g(&g, &(full - lifted)));
            }
            for jdx in 0..n2 {
                // (ii) both orders
                let x2 = VectorField::coordinate(n2, jdx);
                let lx2 = w.lift_fiber(&x2);
                let factor = df[i] / f_val;
                let expected = lx2.at(&p) * factor;
                let d12 = covariant_derivative(m, &lx1, &lx2, &p, cfg)?.components;
                let d21 = covariant_derivative(m, &lx2, &lx1, &p, cfg)?.components;
                worst = worst.max(norm_g(&g, &(d12 - &expected)));
                worst = worst.max(norm_g(&g, &(d21 - expected)));
            }
        }
        for i in 0..n2 {
            let x2 = VectorField::coordinate(n2, i);
            let lx2 = w.lift_fiber(&x2);
            for jdx in 0..n2 {
                let y2 = VectorField::coordinate(n2, jdx);
                let ly2 = w.lift_fiber(&y2);
                let full = covariant_derivative(m, &lx2, &ly2, &p, cfg)?.components;

                // (iii): base-block component against the lifted gradient
                let nor: DVector<f64> = full.rows(0, n1).into();
                let coeff = -inner(&g, &lx2.at(&p), &ly2.at(&p)) / f_val;
                worst = worst.max((nor - &grad_f * coeff).norm());

                // (iv): fiber-block component against the fiber connection
                let tan: DVector<f64> = full.rows(n1, n2).into();
                let on_fiber = covariant_derivative(&w.fiber, &x2, &y2, &pf, cfg)?.components;
                let gf = w.fiber.metric.at(&pf);
                worst = worst.max(norm_g(&gf, &(tan - on_fiber)));
            }
        }
    }
    Ok(CheckRecord::from_residual(
        "warped-connection",
        "Proposition 1",
        worst,
        cfg.tol_second,
        samples,
    ))
}

/// f₂ = f1 ∘ π₂ for a Riemannian submersion f1 of the fiber. The result is
/// horizontally conformal with e^{2λ(p,q)} = f²(p).
pub fn compose_with_submersion(
    w: &WarpedProduct,
    f1: &SmoothMap,
    cfg: &Config,
) -> Result<SmoothMap> {
    if f1.source.dim != w.fiber.dim {
        return Err(GeomError::Dimension { expected: w.fiber.dim, got: f1.source.dim });
    }
    if !is_riemannian_submersion(f1, cfg).passed() {
        return Err(GeomError::Precondition(
            "composition requires a Riemannian submersion of the fiber".into(),
        ));
    }
    Ok(w.second_projection().then(f1))
}

/// Relative residual of e^{2λ(p,q)} = f²(p) for a horizontally conformal
/// map out of the warped product (the dilation inherited from the warp).
pub fn composition_dilation_check(
    w: &WarpedProduct,
    f: &SmoothMap,
    cfg: &Config,
) -> Result<CheckRecord> {
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(50);
    for _ in 0..samples {
        let p = Point::new(sampler.point(&w.product));
        let lambda = crate::submersion::conformal_dilation(f, &p, cfg)?;
        let fv = w.warp.at(&w.base_point(&p));
        let f2 = fv * fv;
        worst = worst.max(((2.0 * lambda).exp() - f2).abs() / f2);
    }
    Ok(CheckRecord::from_residual(
        "composition-dilation",
        "Theorem 9",
        worst,
        1e-6,
        samples,
    ))
}

/// Obstruction of a warped product against Riemannian submersions with
/// vertical ∂t: A_X ∂t = (f′/f) X forces f′ = 0 whenever the submersion
/// preserves horizontal lengths. Returns the identity residual plus the
/// derived consistency verdict. Requires a one-dimensional base.
pub fn wpc_obstruction(
    w: &WarpedProduct,
    f: &SmoothMap,
    cfg: &Config,
) -> Result<Vec<CheckRecord>> {
    let anchor_a = "Eq.(RIE2)";
    let anchor_c = "Theorem 7";
    if w.base.dim != 1 {
        return Err(GeomError::Precondition("obstruction requires an interval base".into()));
    }
    let dim = w.product.dim;
    let mut dt = DVector::zeros(dim);
    dt[0] = 1.0;

    // ∂t must be vertical for F at samples, else the theorem does not apply
    let mut sampler = cfg.sampler();
    let probe = Point::new(sampler.point(&w.product));
    let ph = horizontal_projector(f, &probe.coords);
    if (&ph * &dt).norm() > 1e-8 {
        return Ok(vec![
            CheckRecord::inapplicable("wpc-a-tensor", anchor_a, cfg.tol_second),
            CheckRecord::inapplicable("wpc-consistency", anchor_c, cfg.tol_second),
        ]);
    }

    let ctx = ONeillContext::new(f.clone(), None, cfg.clone())?;
    let mut worst: f64 = 0.0;
    let mut max_log_deriv: f64 = 0.0;
    let samples = cfg.samples.min(25);
    let mut sampler = cfg.sampler();
    for _ in 0..samples {
        let p = Point::new(sampler.point(&w.product));
        let pb = w.base_point(&p);
        let fp = w.warp.at(&pb);
        let dfp = w.warp.differential(&pb, cfg)[0];
        max_log_deriv = max_log_deriv.max((dfp / fp).abs());
        let g = w.product.metric.at(&p);
        let sp = split(f, &p, cfg)?;
        for x in &sp.horizontal_frame.vectors {
            let a = tensor_a_vec(&ctx, x, &dt, &p)?;
            worst = worst.max(norm_g(&g, &(a - x * (dfp / fp))));
        }
    }
    let rie2 = CheckRecord::from_residual("wpc-a-tensor", anchor_a, worst, cfg.tol_second, samples);

    let riemannian = is_riemannian_submersion(f, cfg).passed();
    let consistent = !riemannian || max_log_deriv < cfg.tol_first;
    let consistency = CheckRecord::boolean("wpc-consistency", anchor_c, consistent, samples);
    Ok(vec![rie2, consistency])
}
