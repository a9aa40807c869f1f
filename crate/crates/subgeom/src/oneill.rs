//! The fundamental tensors T and A of a submersion, their identities,
//! mean curvature of the fibers, the second fundamental form of the map,
//! the tension field and the harmonicity check.
//!
//! T and A are tensorial in both slots, so pointwise arguments are
//! extended as constant coordinate fields and split into exactly
//! vertical/horizontal fields by the projector of the map; the covariant
//! derivatives of those projected fields are taken by central finite
//! differences (the projectors are smooth where the rank is constant).

use nalgebra::{DMatrix, DVector};

use crate::check::CheckRecord;
use crate::config::Config;
use crate::contact::AlmostContactStructure;
use crate::error::{GeomError, Result};
use crate::geometry::{
    covariant_derivative_at, gram_schmidt, inner, lie_bracket, norm_g, Point, TangentVector,
    VectorField,
};
use crate::submersion::{
    conformal_dilation, horizontal_part_field, horizontal_projector, is_riemannian_submersion,
    jacobian_rank, split, vertical_part_field, vertical_projector, SmoothMap,
};

/// Evaluation context for the fundamental tensors of one map.
/// `conformal` flags a map that is horizontally conformal but not
/// Riemannian; T and A are still defined by their formulas, but theorems
/// assuming a Riemannian submersion must not be applied silently.
pub struct ONeillContext {
    pub map: SmoothMap,
    pub structure: Option<AlmostContactStructure>,
    pub conformal: bool,
    pub fiber_dim: usize,
    pub config: Config,
}

impl ONeillContext {
    pub fn new(
        map: SmoothMap,
        structure: Option<AlmostContactStructure>,
        config: Config,
    ) -> Result<Self> {
        let mut sampler = config.sampler();
        let p0 = Point::new(sampler.point(&map.source));
        let rank = jacobian_rank(&map, &p0, config.rank_rel_threshold);
        for _ in 0..8 {
            let p = Point::new(sampler.point(&map.source));
            let r = jacobian_rank(&map, &p, config.rank_rel_threshold);
            if r != rank {
                return Err(GeomError::RankJump { first: rank, other: r });
            }
        }
        let fiber_dim = map.source.dim - rank;
        let riemannian = is_riemannian_submersion(&map, &config).passed();
        let conformal = if riemannian {
            false
        } else {
            // must at least be horizontally conformal for the split to be
            // geometrically meaningful
            conformal_dilation(&map, &p0, &config)?;
            true
        };
        Ok(ONeillContext { map, structure, conformal, fiber_dim, config })
    }

    fn manifold(&self) -> &SmoothMap {
        &self.map
    }
}

/// T_E G = H ∇_{VE}(VG) + V ∇_{VE}(HG) at p.
pub fn tensor_t(
    ctx: &ONeillContext,
    e: &VectorField,
    g: &VectorField,
    p: &Point,
) -> Result<DVector<f64>> {
    let f = ctx.manifold();
    let cfg = &ctx.config;
    let m = &f.source;
    let ve = vertical_part_field(f, e);
    let vg = vertical_part_field(f, g);
    let hg = horizontal_part_field(f, g);
    let ve_p = ve.at(p);
    let d1 = covariant_derivative_at(m, &ve_p, &vg, p, cfg)?;
    let d2 = covariant_derivative_at(m, &ve_p, &hg, p, cfg)?;
    let ph = horizontal_projector(f, &p.coords);
    let pv = vertical_projector(f, &p.coords);
    Ok(&ph * d1 + &pv * d2)
}

/// A_E G = V ∇_{HE}(HG) + H ∇_{HE}(VG) at p.
pub fn tensor_a(
    ctx: &ONeillContext,
    e: &VectorField,
    g: &VectorField,
    p: &Point,
) -> Result<DVector<f64>> {
    let f = ctx.manifold();
    let cfg = &ctx.config;
    let m = &f.source;
    let he = horizontal_part_field(f, e);
    let vg = vertical_part_field(f, g);
    let hg = horizontal_part_field(f, g);
    let he_p = he.at(p);
    let d1 = covariant_derivative_at(m, &he_p, &hg, p, cfg)?;
    let d2 = covariant_derivative_at(m, &he_p, &vg, p, cfg)?;
    let ph = horizontal_projector(f, &p.coords);
    let pv = vertical_projector(f, &p.coords);
    Ok(&pv * d1 + &ph * d2)
}

/// T with pointwise arguments (constant coordinate extensions).
pub fn tensor_t_vec(
    ctx: &ONeillContext,
    e: &DVector<f64>,
    g: &DVector<f64>,
    p: &Point,
) -> Result<DVector<f64>> {
    tensor_t(ctx, &VectorField::constant(e.clone()), &VectorField::constant(g.clone()), p)
}

pub fn tensor_a_vec(
    ctx: &ONeillContext,
    e: &DVector<f64>,
    g: &DVector<f64>,
    p: &Point,
) -> Result<DVector<f64>> {
    tensor_a(ctx, &VectorField::constant(e.clone()), &VectorField::constant(g.clone()), p)
}

/// T_U W = T_W U for vertical U,W and A_X Y = −A_Y X = ½ V[X,Y] for
/// horizontal X,Y, at sampled points with random arguments.
///
/// For a horizontally conformal (non-Riemannian) context, the A-identity
/// carries its correction term: A_X Y = ½V[X,Y] − g(X,Y) V(grad λ), which
/// reduces to the plain form when the dilation λ is constant.
pub fn verify_lemma_identities(ctx: &ONeillContext) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(40);
    let dilation = ctx.conformal.then(|| dilation_field(ctx));
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let g = f.source.metric.at(&p);

        let u = vertical_part_field(f, &VectorField::constant(sampler.vector(f.source.dim)));
        let w = vertical_part_field(f, &VectorField::constant(sampler.vector(f.source.dim)));
        let tuw = tensor_t(ctx, &u, &w, &p)?;
        let twu = tensor_t(ctx, &w, &u, &p)?;
        worst = worst.max(norm_g(&g, &(tuw - twu)));

        let x = horizontal_part_field(f, &VectorField::constant(sampler.vector(f.source.dim)));
        let y = horizontal_part_field(f, &VectorField::constant(sampler.vector(f.source.dim)));
        let axy = tensor_a(ctx, &x, &y, &p)?;
        let ayx = tensor_a(ctx, &y, &x, &p)?;
        let pv = vertical_projector(f, &p.coords);
        let mut expected = &pv * lie_bracket(&x, &y, &p, cfg).components * 0.5;
        let mut sym_expected = DVector::zeros(f.source.dim);
        if let Some(lambda) = &dilation {
            let grad_l = crate::geometry::gradient(&f.source, lambda, &p, cfg)?.components;
            let corr = (&pv * grad_l) * inner(&g, &x.at(&p), &y.at(&p));
            expected -= &corr;
            sym_expected = corr * -2.0;
        }
        worst = worst.max(norm_g(&g, &(axy.clone() - &expected)));
        worst = worst.max(norm_g(&g, &(axy + ayx - sym_expected)));
    }
    Ok(CheckRecord::from_residual(
        "oneill-lemma-1",
        "Eqs.(11)-(12)",
        worst,
        cfg.tol_first,
        samples,
    ))
}

/// λ as a pointwise-computable scalar field, for differentiating the
/// dilation of a conformal context.
fn dilation_field(ctx: &ONeillContext) -> crate::geometry::ScalarField {
    let f = ctx.map.clone();
    let cfg = ctx.config.clone();
    crate::geometry::ScalarField::numeric(
        f.source.dim,
        std::sync::Arc::new(move |q| {
            conformal_dilation(&f, &Point::new(q.clone()), &cfg)
                .expect("dilation defined near sampled points")
        }),
    )
}

/// g(T_D E, G) + g(T_D G, E) = 0 and the same for A, random D,E,G.
pub fn verify_skew_symmetry(ctx: &ONeillContext) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(40);
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let g = f.source.metric.at(&p);
        let d = sampler.vector(f.source.dim);
        let e = sampler.vector(f.source.dim);
        let h = sampler.vector(f.source.dim);
        let tde = tensor_t_vec(ctx, &d, &e, &p)?;
        let tdh = tensor_t_vec(ctx, &d, &h, &p)?;
        worst = worst.max((inner(&g, &tde, &h) + inner(&g, &tdh, &e)).abs());
        let ade = tensor_a_vec(ctx, &d, &e, &p)?;
        let adh = tensor_a_vec(ctx, &d, &h, &p)?;
        worst = worst.max((inner(&g, &ade, &h) + inner(&g, &adh, &e)).abs());
    }
    Ok(CheckRecord::from_residual(
        "skew-symmetry",
        "Eqs.(19)-(20)",
        worst,
        cfg.tol_first,
        samples,
    ))
}

/// The four decomposition identities of ∇ against T and A with random
/// vertical/horizontal arguments.
pub fn verify_fundamental_equations(ctx: &ONeillContext) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let m = &f.source;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(40);
    for _ in 0..samples {
        let p = Point::new(sampler.point(m));
        let g = m.metric.at(&p);
        let pv = vertical_projector(f, &p.coords);
        let ph = horizontal_projector(f, &p.coords);

        let v = vertical_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let w = vertical_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let x = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));
        let y = horizontal_part_field(f, &VectorField::constant(sampler.vector(m.dim)));

        // (13) ∇_V W = T_V W + V∇_V W
        let dvw = covariant_derivative_at(m, &v.at(&p), &w, &p, cfg)?;
        let tvw = tensor_t(ctx, &v, &w, &p)?;
        worst = worst.max(norm_g(&g, &(&dvw - (&tvw + &pv * &dvw))));

        // (14) ∇_V X = H∇_V X + T_V X
        let dvx = covariant_derivative_at(m, &v.at(&p), &x, &p, cfg)?;
        let tvx = tensor_t(ctx, &v, &x, &p)?;
        worst = worst.max(norm_g(&g, &(&dvx - (&ph * &dvx + &tvx))));

        // (15) ∇_X V = A_X V + V∇_X V
        let dxv = covariant_derivative_at(m, &x.at(&p), &v, &p, cfg)?;
        let axv = tensor_a(ctx, &x, &v, &p)?;
        worst = worst.max(norm_g(&g, &(&dxv - (&axv + &pv * &dxv))));

        // (16) ∇_X Y = H∇_X Y + A_X Y
        let dxy = covariant_derivative_at(m, &x.at(&p), &y, &p, cfg)?;
        let axy = tensor_a(ctx, &x, &y, &p)?;
        worst = worst.max(norm_g(&g, &(&dxy - (&ph * &dxy + &axy))));
    }
    Ok(CheckRecord::from_residual(
        "fundamental-equations",
        "Eqs.(13)-(16)",
        worst,
        cfg.tol_first,
        samples,
    ))
}

/// Mean curvature vector of the fiber: H = (1/k) Σ_j T_{U_j} U_j over an
/// orthonormal vertical frame.
pub fn mean_curvature(ctx: &ONeillContext, p: &Point) -> Result<TangentVector> {
    if ctx.fiber_dim == 0 {
        return Err(GeomError::EmptyFiber);
    }
    let f = ctx.manifold();
    let sp = split(f, p, &ctx.config)?;
    let mut h = DVector::zeros(f.source.dim);
    for u in &sp.vertical_frame.vectors {
        h += tensor_t_vec(ctx, u, u, p)?;
    }
    Ok(TangentVector::new(p.clone(), h / ctx.fiber_dim as f64))
}

/// Residual of T_U W = g(U,W) H over random vertical pairs.
pub fn is_totally_umbilical(ctx: &ONeillContext) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(40);
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let g = f.source.metric.at(&p);
        let pv = vertical_projector(f, &p.coords);
        let u = &pv * sampler.vector(f.source.dim);
        let w = &pv * sampler.vector(f.source.dim);
        let tuw = tensor_t_vec(ctx, &u, &w, &p)?;
        let h = mean_curvature(ctx, &p)?.components;
        worst = worst.max(norm_g(&g, &(tuw - h * inner(&g, &u, &w))));
    }
    Ok(CheckRecord::from_residual(
        "totally-umbilical-fibers",
        "Eq.(17)",
        worst,
        cfg.tol_second,
        samples,
    ))
}

/// (∇F_*)(X,Y) = ∇^F_X(F_*Y) − F_*(∇^M_X Y) at p, a tangent vector at
/// F(p). The pullback-connection term is evaluated along the coordinate
/// curve c(t) = p + t X(p) with a 4-point central stencil.
pub fn second_fundamental_form(
    ctx: &ONeillContext,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
) -> Result<TangentVector> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let m = &f.source;
    let n = &f.target;
    let xv = x.at(p);
    let h = cfg.curve_step;

    let pushed = |t: f64| -> DVector<f64> {
        let q = &p.coords + &xv * t;
        f.jacobian_coords(&q) * y.eval(&q)
    };
    let w0 = pushed(0.0);
    let dw = (pushed(-2.0 * h) * (1.0 / 12.0) - pushed(-h) * (8.0 / 12.0)
        + pushed(h) * (8.0 / 12.0)
        - pushed(2.0 * h) * (1.0 / 12.0))
        / h;

    let fp = f.eval(p);
    let gamma_n = crate::geometry::christoffel(n, &fp, cfg)?;
    let u = f.jacobian(p) * &xv; // (F∘c)'(0)
    let mut correction = DVector::zeros(n.dim);
    for k in 0..n.dim {
        let mut s = 0.0;
        for a in 0..n.dim {
            for b in 0..n.dim {
                s += gamma_n.get(k, a, b) * u[a] * w0[b];
            }
        }
        correction[k] = s;
    }

    let d_m = covariant_derivative_at(m, &xv, y, p, cfg)?;
    let value = dw + correction - f.jacobian(p) * d_m;
    Ok(TangentVector::new(fp, value))
}

/// τ(F) = Σ_i (∇F_*)(e_i, e_i) over a g-orthonormal frame of T_pM.
pub fn tension_field(ctx: &ONeillContext, p: &Point) -> Result<TangentVector> {
    let f = ctx.manifold();
    let m = &f.source;
    let g = m.metric.at(p);
    let coords: Vec<DVector<f64>> = (0..m.dim)
        .map(|i| {
            let mut v = DVector::zeros(m.dim);
            v[i] = 1.0;
            v
        })
        .collect();
    let frame = gram_schmidt(&coords, &g)?;
    let mut tau = DVector::zeros(f.target.dim);
    let mut base = None;
    for e in &frame {
        let field = VectorField::constant(e.clone());
        let term = second_fundamental_form(ctx, &field, &field, p)?;
        tau += &term.components;
        base = Some(term.base);
    }
    Ok(TangentVector::new(base.expect("nonzero dimension"), tau))
}

/// Pass iff max ‖τ‖_{g_N} over samples is below the second-derivative
/// tolerance.
pub fn is_harmonic(ctx: &ONeillContext) -> Result<CheckRecord> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(25);
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let tau = tension_field(ctx, &p)?;
        let gn = f.target.metric.at(&tau.base);
        worst = worst.max(norm_g(&gn, &tau.components));
    }
    Ok(CheckRecord::from_residual("harmonic", "tau(F) = 0", worst, cfg.tol_second, samples))
}

/// Max |g_N((∇F_*)(X,Y) − (∇F_*)(Y,X))| and the horizontal-horizontal
/// vanishing of the second fundamental form for a Riemannian submersion.
pub fn second_form_suite(ctx: &ONeillContext) -> Result<Vec<CheckRecord>> {
    let cfg = &ctx.config;
    let f = ctx.manifold();
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(25);
    let mut worst_sym: f64 = 0.0;
    let mut worst_hh: f64 = 0.0;
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let x = VectorField::constant(sampler.vector(f.source.dim));
        let y = VectorField::constant(sampler.vector(f.source.dim));
        let fxy = second_fundamental_form(ctx, &x, &y, &p)?;
        let fyx = second_fundamental_form(ctx, &y, &x, &p)?;
        let gn = f.target.metric.at(&fxy.base);
        worst_sym = worst_sym.max(norm_g(&gn, &(&fxy.components - &fyx.components)));

        let sp = split(f, &p, cfg)?;
        for a in &sp.horizontal_frame.vectors {
            for b in &sp.horizontal_frame.vectors {
                let term = second_fundamental_form(
                    ctx,
                    &VectorField::constant(a.clone()),
                    &VectorField::constant(b.clone()),
                    &p,
                )?;
                worst_hh = worst_hh.max(norm_g(&gn, &term.components));
            }
        }
    }
    let mut hh = CheckRecord::from_residual(
        "second-form-horizontal-vanishing",
        "Eq.(22)",
        worst_hh,
        cfg.tol_second,
        samples,
    );
    if ctx.conformal {
        // Eq.(22) assumes a Riemannian submersion
        hh.applicable = false;
    }
    Ok(vec![
        CheckRecord::from_residual(
            "second-form-symmetry",
            "symmetry of (nabla F_*)",
            worst_sym,
            cfg.tol_second,
            samples,
        ),
        hh,
    ])
}

/// Self-adjointness of the projector split: random full vectors decompose
/// orthogonally, and pushed-forward vertical vectors vanish.
pub fn verify_split_invariants(f: &SmoothMap, cfg: &Config) -> CheckRecord {
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    let samples = cfg.samples.min(50);
    for _ in 0..samples {
        let p = Point::new(sampler.point(&f.source));
        let Ok(sp) = split(f, &p, cfg) else { continue };
        let g = f.source.metric.at(&p);
        for v in &sp.vertical_frame.vectors {
            worst = worst.max((&sp.jacobian * v).norm());
        }
        let x = sampler.vector(f.source.dim);
        let y = sampler.vector(f.source.dim);
        let pv = vertical_projector(f, &p.coords);
        let ph = horizontal_projector(f, &p.coords);
        let total = inner(&g, &x, &y);
        let split_sum = inner(&g, &(&pv * &x), &(&pv * &y)) + inner(&g, &(&ph * &x), &(&ph * &y));
        worst = worst.max((total - split_sum).abs());
    }
    CheckRecord::from_residual("split-orthogonality", "V/H split", worst, 1e-8, samples)
}

/// Helper: g_N-norm of the pushforward of the matrix product, used by
/// callers checking images span the target.
pub fn pushforward_span_rank(f: &SmoothMap, p: &Point, vectors: &[DVector<f64>], cfg: &Config) -> usize {
    let j = f.jacobian(p);
    let cols: Vec<DVector<f64>> = vectors.iter().map(|v| &j * v).collect();
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(&cols);
    let sv = m.svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cfg.rank_rel_threshold * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{example1_structure, example2_map, planar_projection_r4};
    use crate::geometry::ChartManifold;

    fn cfg() -> Config {
        Config { samples: 15, ..Config::default() }
    }

    fn example2_ctx() -> (ONeillContext, crate::contact::AlmostContactStructure) {
        let s = example1_structure();
        let f = example2_map(&s.manifold);
        let ctx = ONeillContext::new(f, Some(s.clone()), cfg()).unwrap();
        (ctx, s)
    }

    #[test]
    fn t_of_vertical_and_xi_reproduces_the_argument() {
        let (ctx, s) = example2_ctx();
        let p = ctx.map.source.point(&[0.2, -0.1, 0.3, 0.1, 0.2]).unwrap();
        let g = ctx.map.source.metric.at(&p);
        let sp = split(&ctx.map, &p, &ctx.config).unwrap();
        for u in &sp.vertical_frame.vectors {
            let t = tensor_t_vec(&ctx, u, &s.xi_at(&p), &p).unwrap();
            assert!(norm_g(&g, &(t - u)) < 1e-10);
        }
    }

    #[test]
    fn a_annihilates_xi_and_vanishes_on_vertical_input() {
        let (ctx, s) = example2_ctx();
        let p = ctx.map.source.point(&[0.0, 0.1, -0.2, 0.3, -0.1]).unwrap();
        let g = ctx.map.source.metric.at(&p);
        let sp = split(&ctx.map, &p, &ctx.config).unwrap();
        for x in &sp.horizontal_frame.vectors {
            let a = tensor_a_vec(&ctx, x, &s.xi_at(&p), &p).unwrap();
            assert!(norm_g(&g, &a) < 1e-10, "A_X xi = {}", norm_g(&g, &a));
            // alternation on the diagonal
            let axx = tensor_a_vec(&ctx, x, x, &p).unwrap();
            assert!(norm_g(&g, &axx) < 1e-10);
        }
        for u in &sp.vertical_frame.vectors {
            let any = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, 0.7]);
            let a = tensor_a_vec(&ctx, u, &any, &p).unwrap();
            assert!(norm_g(&g, &a) < 1e-10, "A with vertical first slot");
        }
    }

    #[test]
    fn t_vanishes_on_horizontal_input_and_is_horizontal_on_vertical_pairs() {
        let (ctx, _) = example2_ctx();
        let p = ctx.map.source.point(&[0.1, 0.1, 0.1, 0.1, 0.1]).unwrap();
        let g = ctx.map.source.metric.at(&p);
        let sp = split(&ctx.map, &p, &ctx.config).unwrap();
        let any = DVector::from_vec(vec![-0.4, 0.2, 0.1, 0.6, -0.3]);
        for x in &sp.horizontal_frame.vectors {
            let t = tensor_t_vec(&ctx, x, &any, &p).unwrap();
            assert!(norm_g(&g, &t) < 1e-10);
        }
        let v = &sp.vertical_frame.vectors[0];
        let tvv = tensor_t_vec(&ctx, v, v, &p).unwrap();
        let pv = vertical_projector(&ctx.map, &p.coords);
        assert!(norm_g(&g, &(&pv * &tvv)) < 1e-8, "T_VV must be horizontal");
    }

    #[test]
    fn flat_projection_has_vanishing_fundamental_tensors() {
        let f = planar_projection_r4();
        let ctx = ONeillContext::new(f, None, cfg()).unwrap();
        let p = Point::from_slice(&[0.2, -0.3, 0.1, 0.4]);
        let g = ctx.map.source.metric.at(&p);
        for i in 0..4 {
            for j in 0..4 {
                let e = DVector::from_fn(4, |k, _| if k == i { 1.0 } else { 0.0 });
                let h = DVector::from_fn(4, |k, _| if k == j { 1.0 } else { 0.0 });
                let t = tensor_t_vec(&ctx, &e, &h, &p).unwrap();
                let a = tensor_a_vec(&ctx, &e, &h, &p).unwrap();
                assert!(norm_g(&g, &t) < 1e-10);
                assert!(norm_g(&g, &a) < 1e-10);
            }
        }
    }

    #[test]
    fn mean_curvature_pairs_to_minus_one_with_xi() {
        let (ctx, s) = example2_ctx();
        let p = ctx.map.source.point(&[0.25, -0.15, 0.1, 0.2, 0.3]).unwrap();
        let g = ctx.map.source.metric.at(&p);
        let h = mean_curvature(&ctx, &p).unwrap().components;
        assert!((inner(&g, &h, &s.xi_at(&p)) + 1.0).abs() < 1e-10);
        let pv = vertical_projector(&ctx.map, &p.coords);
        assert!(norm_g(&g, &(&pv * &h)) < 1e-8, "H must be horizontal");
    }

    #[test]
    fn mean_curvature_requires_a_fiber() {
        let m = ChartManifold::euclidean(2, 1.0, "R2");
        let f = SmoothMap::identity(&m);
        let ctx = ONeillContext::new(f, None, cfg()).unwrap();
        let p = Point::from_slice(&[0.1, 0.1]);
        assert!(matches!(mean_curvature(&ctx, &p), Err(GeomError::EmptyFiber)));
    }

    #[test]
    fn the_riemannian_example_is_not_harmonic() {
        let (ctx, _) = example2_ctx();
        let rec = is_harmonic(&ctx).unwrap();
        assert!(!rec.passed());
        // ‖τ‖ = 2‖F_*H‖ stays near 2
        let p = ctx.map.source.point(&[0.1, 0.2, -0.3, 0.0, 0.4]).unwrap();
        let tau = tension_field(&ctx, &p).unwrap();
        let gn = ctx.map.target.metric.at(&tau.base);
        assert!(norm_g(&gn, &tau.components) >= 1.9);
    }

    #[test]
    fn second_form_is_symmetric_and_relates_to_t() {
        let (ctx, _) = example2_ctx();
        let p = ctx.map.source.point(&[0.0, 0.0, 0.0, 0.0, 0.1]).unwrap();
        let sp = split(&ctx.map, &p, &ctx.config).unwrap();
        let v = VectorField::constant(sp.vertical_frame.vectors[0].clone());

        // (∇F_*)(V,V) = −F_*(T_V V)
        let form = second_fundamental_form(&ctx, &v, &v, &p).unwrap();
        let tvv = tensor_t_vec(
            &ctx,
            &sp.vertical_frame.vectors[0],
            &sp.vertical_frame.vectors[0],
            &p,
        )
        .unwrap();
        let pushed = ctx.map.jacobian(&p) * tvv;
        assert!((form.components + pushed).norm() < 1e-6);

        let x = VectorField::constant(DVector::from_vec(vec![0.2, -0.1, 0.4, 0.3, 0.5]));
        let fxy = second_fundamental_form(&ctx, &x, &v, &p).unwrap();
        let fyx = second_fundamental_form(&ctx, &v, &x, &p).unwrap();
        assert!((fxy.components - fyx.components).norm() < 1e-7);
    }

    #[test]
    fn totally_geodesic_fibers_of_a_product_projection() {
        // constant warp ⟹ T = 0 ⟹ H = 0
        let w = crate::warped::make_warped(
            &crate::builtins::interval(1.0),
            &ChartManifold::euclidean(2, 1.0, "R2"),
            &crate::geometry::ScalarField::constant(1, 1.0),
        )
        .unwrap();
        let ctx = ONeillContext::new(w.second_projection(), None, cfg()).unwrap();
        let p = Point::from_slice(&[0.2, 0.1, -0.3]);
        let h = mean_curvature(&ctx, &p).unwrap().components;
        assert!(h.norm() < 1e-10);
    }

    #[test]
    fn identity_suites_pass_on_the_riemannian_example() {
        let (ctx, _) = example2_ctx();
        assert!(verify_lemma_identities(&ctx).unwrap().passed());
        assert!(verify_skew_symmetry(&ctx).unwrap().passed());
        assert!(verify_fundamental_equations(&ctx).unwrap().passed());
        assert!(is_totally_umbilical(&ctx).unwrap().passed());
        assert!(verify_split_invariants(&ctx.map, &ctx.config).passed());
    }
}
