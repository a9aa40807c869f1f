//! Smooth maps between chart manifolds, their differentials, the
//! vertical/horizontal splitting, Riemannian/conformal submersion
//! predicates, anti-invariance and the B/C decomposition of φ on the
//! horizontal distribution.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::check::CheckRecord;
use crate::config::Config;
use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::geometry::{
    gram_schmidt, inner, norm_g, ChartManifold, DualFn, Frame, Point, TangentVector, VectorField,
};
use crate::contact::AlmostContactStructure;

/// A smooth coordinate map between two charts.
#[derive(Clone)]
pub struct SmoothMap {
    pub source: Arc<ChartManifold>,
    pub target: Arc<ChartManifold>,
    f: DualFn,
}

impl SmoothMap {
    pub fn new(source: Arc<ChartManifold>, target: Arc<ChartManifold>, f: DualFn) -> Self {
        SmoothMap { source, target, f }
    }

    pub fn identity(m: &Arc<ChartManifold>) -> Self {
        SmoothMap::new(
            m.clone(),
            m.clone(),
            Arc::new(|p: &[Dual]| p.to_vec()),
        )
    }

    /// g ∘ self (apply `self` first).
    pub fn then(&self, g: &SmoothMap) -> SmoothMap {
        let (f1, f2) = (self.f.clone(), g.f.clone());
        SmoothMap::new(
            self.source.clone(),
            g.target.clone(),
            Arc::new(move |p| f2(&f1(p))),
        )
    }

    pub fn eval(&self, p: &Point) -> Point {
        let lifted = Dual::lift_point(p.coords.as_slice());
        let vals = (self.f)(&lifted);
        Point::new(DVector::from_iterator(vals.len(), vals.into_iter().map(|d| d.re)))
    }

    pub fn eval_coords(&self, coords: &DVector<f64>) -> DVector<f64> {
        let lifted = Dual::lift_point(coords.as_slice());
        let vals = (self.f)(&lifted);
        DVector::from_iterator(vals.len(), vals.into_iter().map(|d| d.re))
    }

    /// Jacobian at p: rows = target components, cols = source coordinates.
    pub fn jacobian(&self, p: &Point) -> DMatrix<f64> {
        self.jacobian_coords(&p.coords)
    }

    pub fn jacobian_coords(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let seeded = Dual::seed_point(coords.as_slice());
        let vals = (self.f)(&seeded);
        DMatrix::from_fn(self.target.dim, coords.len(), |k, i| vals[k].grad(i))
    }

    /// Pushforward F_* v, a tangent vector at F(p).
    pub fn differential(&self, p: &Point, v: &TangentVector) -> TangentVector {
        let j = self.jacobian(p);
        TangentVector::new(self.eval(p), j * &v.components)
    }
}

/// Count of singular values above `rel_threshold` times the largest.
pub fn jacobian_rank(f: &SmoothMap, p: &Point, rel_threshold: f64) -> usize {
    let j = f.jacobian(p);
    let sv = j.svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_threshold * smax).count()
}

/// Per-point orthonormal vertical and horizontal frames plus the Jacobian.
#[derive(Clone)]
pub struct SubmersionSplit {
    pub base: Point,
    pub vertical_frame: Frame,
    pub horizontal_frame: Frame,
    pub jacobian: DMatrix<f64>,
}

impl SubmersionSplit {
    pub fn vertical_dim(&self) -> usize {
        self.vertical_frame.len()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.horizontal_frame.len()
    }
}

fn sign_fix(mut v: DVector<f64>) -> DVector<f64> {
    if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            v = -v;
        }
    }
    v
}

/// Vertical/horizontal splitting of T_pM induced by F and g_M.
///
/// The Euclidean kernel of the Jacobian comes from the spectral
/// decomposition of JᵀJ (eigenvalues ascending, signs normalized), then
/// both frames are g-orthonormalized by Gram-Schmidt in that order.
pub fn split(f: &SmoothMap, p: &Point, cfg: &Config) -> Result<SubmersionSplit> {
    let j = f.jacobian(p);
    let n = f.source.dim;
    let g = f.source.metric.at(p);
    let rank = jacobian_rank(f, p, cfg.rank_rel_threshold);
    let kernel_dim = n - rank;

    // kernel candidates: eigenvectors of J^T J with smallest eigenvalues
    let jtj = j.transpose() * &j;
    let eig = jtj.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let kernel_raw: Vec<DVector<f64>> = order[..kernel_dim]
        .iter()
        .map(|&i| sign_fix(eig.eigenvectors.column(i).into()))
        .collect();
    let vertical = gram_schmidt(&kernel_raw, &g)?;

    // horizontal = g^{-1} rowspace(J), in row order
    let ginv = f.source.metric.inverse_at(p, cfg)?;
    let horiz_raw: Vec<DVector<f64>> = (0..f.target.dim)
        .map(|a| &ginv * j.row(a).transpose())
        .collect();
    let horizontal = gram_schmidt(&horiz_raw, &g)?;

    Ok(SubmersionSplit {
        base: p.clone(),
        vertical_frame: Frame::new(p.clone(), vertical),
        horizontal_frame: Frame::new(p.clone(), horizontal),
        jacobian: j,
    })
}

/// g-orthogonal projector onto the horizontal distribution at arbitrary
/// coordinates: P_H = g⁻¹ Jᵀ (J g⁻¹ Jᵀ)⁻¹ J.
pub fn horizontal_projector(f: &SmoothMap, coords: &DVector<f64>) -> DMatrix<f64> {
    let j = f.jacobian_coords(coords);
    let g = f.source.metric.field.eval(coords);
    let ginv = g.try_inverse().expect("metric invertible");
    let gram = &j * &ginv * j.transpose();
    let gram_inv = gram.try_inverse().expect("maximal rank");
    ginv * j.transpose() * gram_inv * j
}

pub fn vertical_projector(f: &SmoothMap, coords: &DVector<f64>) -> DMatrix<f64> {
    let n = f.source.dim;
    DMatrix::identity(n, n) - horizontal_projector(f, coords)
}

/// The field q ↦ P_V(q) X(q) (exactly vertical at every point).
pub fn vertical_part_field(f: &SmoothMap, x: &VectorField) -> VectorField {
    let fm = f.clone();
    let x = x.clone();
    VectorField::numeric(
        f.source.dim,
        Arc::new(move |q| vertical_projector(&fm, q) * x.eval(q)),
    )
}

/// The field q ↦ P_H(q) X(q).
pub fn horizontal_part_field(f: &SmoothMap, x: &VectorField) -> VectorField {
    let fm = f.clone();
    let x = x.clone();
    VectorField::numeric(
        f.source.dim,
        Arc::new(move |q| horizontal_projector(&fm, q) * x.eval(q)),
    )
}

/// Residual of |g_M(X,Y) − g_N(F_*X, F_*Y)| over horizontal pairs at
/// sampled points.
pub fn is_riemannian_submersion(f: &SmoothMap, cfg: &Config) -> CheckRecord {
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = Point::new(sampler.point(&f.source));
        let sp = match split(f, &p, cfg) {
            Ok(s) => s,
            Err(_) => {
                // degenerate split; report an off-scale residual
                return CheckRecord::from_residual(
                    "riemannian-submersion",
                    "S2",
                    1e300,
                    1e-6,
                    cfg.samples,
                )
            }
        };
        let gn = f.target.metric.at(&f.eval(&p));
        for (a, x) in sp.horizontal_frame.vectors.iter().enumerate() {
            for (b, y) in sp.horizontal_frame.vectors.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                let pushed = inner(&gn, &(&sp.jacobian * x), &(&sp.jacobian * y));
                worst = worst.max((pushed - target).abs());
            }
        }
    }
    CheckRecord::from_residual("riemannian-submersion", "S2", worst, 1e-6, cfg.samples)
}

/// The dilation exponent λ(p) of a horizontally conformal map:
/// g_M(X,Y) = e^{2λ} g_N(F_*X, F_*Y) on the horizontal distribution.
pub fn conformal_dilation(f: &SmoothMap, p: &Point, cfg: &Config) -> Result<f64> {
    let sp = split(f, p, cfg)?;
    if sp.horizontal_dim() == 0 {
        return Err(GeomError::Precondition("map has rank zero".into()));
    }
    let gn = f.target.metric.at(&f.eval(p));
    let mut lambdas = Vec::new();
    let mut spread: f64 = 0.0;
    for (a, x) in sp.horizontal_frame.vectors.iter().enumerate() {
        for (b, y) in sp.horizontal_frame.vectors.iter().enumerate() {
            let pushed = inner(&gn, &(&sp.jacobian * x), &(&sp.jacobian * y));
            if a == b {
                if pushed <= 0.0 {
                    return Err(GeomError::Precondition("degenerate pushforward norm".into()));
                }
                lambdas.push(0.5 * (1.0 / pushed).ln());
            } else {
                spread = spread.max(pushed.abs());
            }
        }
    }
    let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    for l in &lambdas {
        spread = spread.max((l - mean).abs());
    }
    if spread > cfg.tol_first {
        return Err(GeomError::Anisotropic { spread });
    }
    Ok(mean)
}

/// Max g-norm of the vertical projection of φv over vertical frame vectors
/// at sampled points: φ(ker F_*) ⊆ (ker F_*)^⊥.
pub fn is_anti_invariant(
    f: &SmoothMap,
    s: &AlmostContactStructure,
    cfg: &Config,
) -> CheckRecord {
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = Point::new(sampler.point(&f.source));
        let Ok(sp) = split(f, &p, cfg) else { continue };
        let g = f.source.metric.at(&p);
        let phi = s.phi_at(&p);
        let pv = vertical_projector(f, &p.coords);
        for v in &sp.vertical_frame.vectors {
            let pvphi = &pv * (&phi * v);
            worst = worst.max(norm_g(&g, &pvphi));
        }
    }
    CheckRecord::from_residual(
        "anti-invariant",
        "Definition 1",
        worst,
        cfg.tol_anti_invariant,
        cfg.samples,
    )
}

/// The split of φX for horizontal X: B = vertical part, C = the rest
/// (lies in μ).
#[derive(Clone, Debug)]
pub struct PhiDecomposition {
    pub b: TangentVector,
    pub c: TangentVector,
}

pub fn phi_decompose(
    f: &SmoothMap,
    s: &AlmostContactStructure,
    x: &TangentVector,
    cfg: &Config,
) -> Result<PhiDecomposition> {
    let p = &x.base;
    let g = f.source.metric.at(p);
    let pv = vertical_projector(f, &p.coords);
    let vertical_part = &pv * &x.components;
    let scale = norm_g(&g, &x.components).max(1.0);
    if norm_g(&g, &vertical_part) > cfg.tol_anti_invariant.max(1e-7) * scale {
        return Err(GeomError::Precondition("phi_decompose input is not horizontal".into()));
    }
    let phi_x = s.phi_at(p) * &x.components;
    let b = &pv * &phi_x;
    let c = phi_x - &b;
    Ok(PhiDecomposition {
        b: TangentVector::new(p.clone(), b),
        c: TangentVector::new(p.clone(), c),
    })
}

/// Orthonormal basis of μ, the horizontal complement of φ(ker F_*).
pub fn mu_space(
    f: &SmoothMap,
    s: &AlmostContactStructure,
    p: &Point,
    cfg: &Config,
) -> Result<Frame> {
    let sp = split(f, p, cfg)?;
    let g = f.source.metric.at(p);
    let phi = s.phi_at(p);

    let phi_kernel_raw: Vec<DVector<f64>> = sp
        .vertical_frame
        .vectors
        .iter()
        .map(|v| &phi * v)
        .filter(|w| norm_g(&g, w) > 1e-8)
        .collect();
    let phi_kernel = gram_schmidt(&phi_kernel_raw, &g)?;

    let mut mu: Vec<DVector<f64>> = Vec::new();
    for h in &sp.horizontal_frame.vectors {
        let mut r = h.clone();
        for u in &phi_kernel {
            let c = inner(&g, u, &r);
            r -= u * c;
        }
        for u in &mu {
            let c = inner(&g, u, &r);
            r -= u * c;
        }
        let nrm = norm_g(&g, &r);
        if nrm > 1e-6 {
            mu.push(r / nrm);
        }
    }
    Ok(Frame::new(p.clone(), mu))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiPosition {
    Vertical,
    Horizontal,
    Mixed,
}

impl std::fmt::Display for XiPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            XiPosition::Vertical => write!(f, "vertical"),
            XiPosition::Horizontal => write!(f, "horizontal"),
            XiPosition::Mixed => write!(f, "mixed"),
        }
    }
}

/// Classifies ξ by the g-norms of its two projections at sampled points.
pub fn xi_position(f: &SmoothMap, s: &AlmostContactStructure, cfg: &Config) -> XiPosition {
    let mut sampler = cfg.sampler();
    let tol = cfg.tol_first;
    let mut max_vert: f64 = 0.0;
    let mut max_horiz: f64 = 0.0;
    for _ in 0..cfg.samples.min(50) {
        let p = Point::new(sampler.point(&f.source));
        let g = f.source.metric.at(&p);
        let xi = s.xi_at(&p);
        let pv = vertical_projector(f, &p.coords);
        let vert = &pv * &xi;
        let horiz = &xi - &vert;
        max_vert = max_vert.max(norm_g(&g, &vert));
        max_horiz = max_horiz.max(norm_g(&g, &horiz));
    }
    if max_horiz < tol {
        XiPosition::Vertical
    } else if max_vert < tol {
        XiPosition::Horizontal
    } else {
        XiPosition::Mixed
    }
}

/// Dimension count m+1 = n for anti-invariant submersions whose horizontal
/// space is φ(ker F_*) ⊕ span{ξ} (detected via μ = span{ξ}).
pub fn check_dim_theorem(
    f: &SmoothMap,
    s: &AlmostContactStructure,
    cfg: &Config,
) -> Result<CheckRecord> {
    let anchor = "Theorem 1";
    if !is_anti_invariant(f, s, cfg).passed() {
        return Ok(CheckRecord::inapplicable("dimension-theorem", anchor, cfg.tol_first));
    }
    let mut sampler = cfg.sampler();
    let p = Point::new(sampler.point(&f.source));
    let mu = mu_space(f, s, &p, cfg)?;
    let g = f.source.metric.at(&p);
    let xi = s.xi_at(&p);
    let mu_is_span_xi =
        mu.len() == 1 && (inner(&g, &mu.vectors[0], &xi).abs() - 1.0).abs() < 1e-6;
    if !mu_is_span_xi {
        return Ok(CheckRecord::inapplicable("dimension-theorem", anchor, cfg.tol_first));
    }
    let sp = split(f, &p, cfg)?;
    let ok = sp.vertical_dim() + 1 == f.target.dim;
    Ok(CheckRecord::boolean("dimension-theorem", anchor, ok, 1))
}
