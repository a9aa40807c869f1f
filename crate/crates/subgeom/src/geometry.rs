//! Chart-based Riemannian manifolds and the differentiation machinery:
//! metric evaluation, Christoffel symbols, covariant derivatives, Lie
//! brackets, metric Gram-Schmidt, divergence and gradient.
//!
//! A manifold here is a single coordinate chart: a dimension, an
//! axis-aligned domain box and a smooth metric-component function. First
//! derivatives of analytic fields go through dual numbers; fields that are
//! only pointwise-computable (projections of frames, pushforwards) fall
//! back to central finite differences.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::config::Config;
use crate::dual::Dual;
use crate::error::{GeomError, Result};

pub type DualFn = Arc<dyn Fn(&[Dual]) -> Vec<Dual> + Send + Sync>;
pub type NumericFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Coordinates of a point in a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: DVector<f64>) -> Self {
        Point { coords }
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Point { coords: DVector::from_row_slice(coords) }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A tangent vector in the coordinate frame at a base point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub base: Point,
    pub components: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: Point, components: DVector<f64>) -> Self {
        TangentVector { base, components }
    }
}

/// Axis-aligned coordinate domain.
#[derive(Clone, Debug)]
pub struct DomainBox {
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "empty domain box");
        DomainBox { lo: DVector::from_vec(lo), hi: DVector::from_vec(hi) }
    }

    /// Symmetric cube [-r, r]^dim.
    pub fn cube(dim: usize, r: f64) -> Self {
        DomainBox::new(vec![-r; dim], vec![r; dim])
    }

    pub fn contains(&self, coords: &DVector<f64>) -> bool {
        coords.len() == self.lo.len()
            && coords
                .iter()
                .enumerate()
                .all(|(i, &x)| x >= self.lo[i] && x <= self.hi[i])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Concatenate two boxes (product chart).
    pub fn product(&self, other: &DomainBox) -> DomainBox {
        let lo = self.lo.iter().chain(other.lo.iter()).copied().collect();
        let hi = self.hi.iter().chain(other.hi.iter()).copied().collect();
        DomainBox::new(lo, hi)
    }
}

fn eval_dual_at(f: &DualFn, coords: &DVector<f64>) -> Vec<f64> {
    let lifted = Dual::lift_point(coords.as_slice());
    f(&lifted).into_iter().map(|d| d.re).collect()
}

/// Jacobian of an analytic map: rows = output components, cols = ∂_i.
fn jacobian_dual(f: &DualFn, coords: &DVector<f64>, out_dim: usize) -> DMatrix<f64> {
    let seeded = Dual::seed_point(coords.as_slice());
    let vals = f(&seeded);
    debug_assert_eq!(vals.len(), out_dim);
    DMatrix::from_fn(out_dim, coords.len(), |k, i| vals[k].grad(i))
}

fn jacobian_fd(
    f: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    coords: &DVector<f64>,
    out_dim: usize,
    cfg: &Config,
) -> DMatrix<f64> {
    let n = coords.len();
    let mut jac = DMatrix::zeros(out_dim, n);
    for i in 0..n {
        let h = cfg.step_at(coords[i]);
        let mut plus = coords.clone();
        let mut minus = coords.clone();
        plus[i] += h;
        minus[i] -= h;
        let d = (f(&plus) - f(&minus)) / (2.0 * h);
        jac.set_column(i, &d.column(0));
    }
    jac
}

/// A smooth vector field given by coordinate components. Fields built
/// from closed-form expressions carry a dual-capable evaluator; derived
/// fields (projections, pushforwards) are numeric-only and are
/// differentiated by central differences.
#[derive(Clone)]
pub struct VectorField {
    pub dim: usize,
    analytic: Option<DualFn>,
    numeric: NumericFn,
}

impl VectorField {
    pub fn analytic(dim: usize, f: DualFn) -> Self {
        let g = f.clone();
        let numeric: NumericFn =
            Arc::new(move |p| DVector::from_vec(eval_dual_at(&g, p)));
        VectorField { dim, analytic: Some(f), numeric }
    }

    pub fn numeric(dim: usize, f: NumericFn) -> Self {
        VectorField { dim, analytic: None, numeric: f }
    }

    pub fn constant(components: DVector<f64>) -> Self {
        let dim = components.len();
        let c = components.clone();
        VectorField::analytic(
            dim,
            Arc::new(move |_| c.iter().map(|&x| Dual::constant(x)).collect()),
        )
    }

    /// The coordinate field ∂_i.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut c = DVector::zeros(dim);
        c[i] = 1.0;
        VectorField::constant(c)
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::constant(DVector::zeros(dim))
    }

    pub fn at(&self, p: &Point) -> DVector<f64> {
        (self.numeric)(&p.coords)
    }

    pub fn eval(&self, coords: &DVector<f64>) -> DVector<f64> {
        (self.numeric)(coords)
    }

    /// ∂_i X^k as a (dim_out × dim_in) matrix.
    pub fn jacobian(&self, p: &Point, cfg: &Config) -> DMatrix<f64> {
        match &self.analytic {
            Some(f) => jacobian_dual(f, &p.coords, self.dim),
            None => {
                let f = self.numeric.clone();
                jacobian_fd(&move |x| f(x), &p.coords, self.dim, cfg)
            }
        }
    }

    /// Finite-difference Jacobian regardless of the analytic path; used to
    /// cross-check dual-number derivatives.
    pub fn jacobian_fd(&self, p: &Point, cfg: &Config) -> DMatrix<f64> {
        let f = self.numeric.clone();
        jacobian_fd(&move |x| f(x), &p.coords, self.dim, cfg)
    }

    pub fn dual_fn(&self) -> Option<DualFn> {
        self.analytic.clone()
    }

    /// Pointwise linear combination a·X + b·Y.
    pub fn combine(a: f64, x: &VectorField, b: f64, y: &VectorField) -> VectorField {
        let dim = x.dim;
        match (&x.analytic, &y.analytic) {
            (Some(fx), Some(fy)) => {
                let (fx, fy) = (fx.clone(), fy.clone());
                VectorField::analytic(
                    dim,
                    Arc::new(move |p| {
                        let u = fx(p);
                        let v = fy(p);
                        u.into_iter()
                            .zip(v)
                            .map(|(ui, vi)| ui * a + vi * b)
                            .collect()
                    }),
                )
            }
            _ => {
                let (nx, ny) = (x.numeric.clone(), y.numeric.clone());
                VectorField::numeric(dim, Arc::new(move |p| nx(p) * a + ny(p) * b))
            }
        }
    }
}

/// A smooth scalar function on a chart.
#[derive(Clone)]
pub struct ScalarField {
    pub dim: usize,
    analytic: Option<DualFn>,
    numeric: Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>,
}

impl ScalarField {
    pub fn analytic(dim: usize, f: DualFn) -> Self {
        let g = f.clone();
        let numeric = Arc::new(move |p: &DVector<f64>| eval_dual_at(&g, p)[0]);
        ScalarField { dim, analytic: Some(f), numeric }
    }

    pub fn numeric(dim: usize, f: Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>) -> Self {
        ScalarField { dim, analytic: None, numeric: f }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        ScalarField::analytic(dim, Arc::new(move |_| vec![Dual::constant(c)]))
    }

    pub fn at(&self, p: &Point) -> f64 {
        (self.numeric)(&p.coords)
    }

    pub fn eval(&self, coords: &DVector<f64>) -> f64 {
        (self.numeric)(coords)
    }

    pub fn dual_fn(&self) -> Option<DualFn> {
        self.analytic.clone()
    }

    /// Partial derivatives ∂_i f.
    pub fn differential(&self, p: &Point, cfg: &Config) -> DVector<f64> {
        match &self.analytic {
            Some(f) => jacobian_dual(f, &p.coords, 1).transpose().column(0).into(),
            None => {
                let f = self.numeric.clone();
                jacobian_fd(
                    &move |x| DVector::from_element(1, f(x)),
                    &p.coords,
                    1,
                    cfg,
                )
                .transpose()
                .column(0)
                .into()
            }
        }
    }
}

/// A smooth matrix-valued function (row-major components); used for the
/// metric tensor and for the (1,1)-tensor field of a contact structure.
#[derive(Clone)]
pub struct MatrixField {
    pub dim: usize,
    analytic: DualFn,
}

impl MatrixField {
    pub fn new(dim: usize, f: DualFn) -> Self {
        MatrixField { dim, analytic: f }
    }

    pub fn constant(m: DMatrix<f64>) -> Self {
        let dim = m.nrows();
        MatrixField::new(
            dim,
            Arc::new(move |_| m.iter_rows().map(Dual::constant).collect()),
        )
    }

    pub fn at(&self, p: &Point) -> DMatrix<f64> {
        self.eval(&p.coords)
    }

    pub fn eval(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let vals = eval_dual_at(&self.analytic, coords);
        DMatrix::from_fn(self.dim, self.dim, |i, j| vals[i * self.dim + j])
    }

    pub fn dual_fn(&self) -> DualFn {
        self.analytic.clone()
    }

    /// The composed field q ↦ M(q) · Y(q).
    pub fn apply(&self, y: &VectorField) -> VectorField {
        let dim = self.dim;
        match &y.analytic {
            Some(fy) => {
                let (fm, fy) = (self.analytic.clone(), fy.clone());
                VectorField::analytic(
                    dim,
                    Arc::new(move |p| {
                        let m = fm(p);
                        let v = fy(p);
                        (0..dim)
                            .map(|i| {
                                (0..dim)
                                    .map(|j| m[i * dim + j].clone() * v[j].clone())
                                    .fold(Dual::constant(0.0), |a, b| a + b)
                            })
                            .collect()
                    }),
                )
            }
            None => {
                let fm = self.clone();
                let ny = y.numeric.clone();
                VectorField::numeric(dim, Arc::new(move |p| fm.eval(p) * ny(p)))
            }
        }
    }

    /// ∂_k of every component: returns one matrix per coordinate direction.
    pub fn partials(&self, p: &Point) -> Vec<DMatrix<f64>> {
        let seeded = Dual::seed_point(p.coords.as_slice());
        let vals = (self.analytic)(&seeded);
        let n = p.dim();
        (0..n)
            .map(|k| {
                DMatrix::from_fn(self.dim, self.dim, |i, j| {
                    vals[i * self.dim + j].grad(k)
                })
            })
            .collect()
    }
}

// small helper: iterate a DMatrix row-major
trait RowMajor {
    fn iter_rows(&self) -> Box<dyn Iterator<Item = f64> + '_>;
}
impl RowMajor for DMatrix<f64> {
    fn iter_rows(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        let n = self.ncols();
        Box::new((0..self.nrows()).flat_map(move |i| (0..n).map(move |j| self[(i, j)])))
    }
}

/// Riemannian metric as a smooth field of symmetric matrices.
#[derive(Clone)]
pub struct MetricField {
    pub field: MatrixField,
}

impl MetricField {
    pub fn new(dim: usize, f: DualFn) -> Self {
        MetricField { field: MatrixField::new(dim, f) }
    }

    pub fn euclidean(dim: usize) -> Self {
        let eye = DMatrix::identity(dim, dim);
        MetricField { field: MatrixField::constant(eye) }
    }

    /// Diagonal metric from per-axis scalar expressions.
    pub fn diagonal(dim: usize, f: DualFn) -> Self {
        MetricField::new(
            dim,
            Arc::new(move |p| {
                let d = f(p);
                let mut out = vec![Dual::constant(0.0); dim * dim];
                for (i, di) in d.into_iter().enumerate() {
                    out[i * dim + i] = di;
                }
                out
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.field.dim
    }

    pub fn at(&self, p: &Point) -> DMatrix<f64> {
        self.field.at(p)
    }

    pub fn partials(&self, p: &Point) -> Vec<DMatrix<f64>> {
        self.field.partials(p)
    }

    /// Inverse metric with a condition-number guard.
    pub fn inverse_at(&self, p: &Point, cfg: &Config) -> Result<DMatrix<f64>> {
        let g = self.at(p);
        let svd = g.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = smax / smin;
        if !cond.is_finite() || cond > cfg.cond_max {
            return Err(GeomError::IllConditioned { cond });
        }
        g.try_inverse().ok_or(GeomError::IllConditioned { cond })
    }
}

/// A single-chart Riemannian manifold.
#[derive(Clone)]
pub struct ChartManifold {
    pub dim: usize,
    pub domain: DomainBox,
    pub metric: MetricField,
    pub label: String,
}

impl ChartManifold {
    pub fn new(dim: usize, domain: DomainBox, metric: MetricField, label: &str) -> Arc<Self> {
        assert_eq!(domain.dim(), dim);
        assert_eq!(metric.dim(), dim);
        Arc::new(ChartManifold { dim, domain, metric, label: label.to_string() })
    }

    /// Flat Euclidean chart on [-r, r]^dim.
    pub fn euclidean(dim: usize, r: f64, label: &str) -> Arc<Self> {
        ChartManifold::new(dim, DomainBox::cube(dim, r), MetricField::euclidean(dim), label)
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.dim {
            return Err(GeomError::Dimension { expected: self.dim, got: coords.len() });
        }
        let v = DVector::from_row_slice(coords);
        if !self.domain.contains(&v) {
            return Err(GeomError::OutsideDomain { label: self.label.clone() });
        }
        Ok(Point::new(v))
    }

    pub fn metric_at(&self, p: &Point) -> Result<DMatrix<f64>> {
        if !self.domain.contains(&p.coords) {
            return Err(GeomError::OutsideDomain { label: self.label.clone() });
        }
        Ok(self.metric.at(p))
    }
}

/// Metric inner product of two coordinate-component vectors.
pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}

pub fn norm_g(g: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    inner(g, u, u).max(0.0).sqrt()
}

/// Christoffel symbols Γ^k_{ij} at a point, stored k-major.
pub struct Christoffel {
    pub dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }
}

/// Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}).
pub fn christoffel(m: &ChartManifold, p: &Point, cfg: &Config) -> Result<Christoffel> {
    let n = m.dim;
    let ginv = m.metric.inverse_at(p, cfg)?;
    let dg = m.metric.partials(p);
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)]
                        * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                data[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { dim: n, data })
}

/// (∇_X Y)^k at p for a pointwise vector X (the connection is tensorial in
/// its lower slot).
pub fn covariant_derivative_at(
    m: &ChartManifold,
    xv: &DVector<f64>,
    y: &VectorField,
    p: &Point,
    cfg: &Config,
) -> Result<DVector<f64>> {
    let gamma = christoffel(m, p, cfg)?;
    let jy = y.jacobian(p, cfg);
    let yv = y.at(p);
    let n = m.dim;
    let mut out = DVector::zeros(n);
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            s += xv[i] * jy[(k, i)];
            for j in 0..n {
                s += gamma.get(k, i, j) * xv[i] * yv[j];
            }
        }
        out[k] = s;
    }
    Ok(out)
}

pub fn covariant_derivative(
    m: &ChartManifold,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
    cfg: &Config,
) -> Result<TangentVector> {
    let xv = x.at(p);
    let comps = covariant_derivative_at(m, &xv, y, p, cfg)?;
    Ok(TangentVector::new(p.clone(), comps))
}

/// [X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &Point, cfg: &Config) -> TangentVector {
    let jx = x.jacobian(p, cfg);
    let jy = y.jacobian(p, cfg);
    let comps = jy * x.at(p) - jx * y.at(p);
    TangentVector::new(p.clone(), comps)
}

/// Modified Gram-Schmidt with respect to a metric at a point.
/// Deterministic given input order; errors on rank-deficient input.
pub fn gram_schmidt(vectors: &[DVector<f64>], g: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut u = v.clone();
        for e in &out {
            let c = inner(g, e, &u);
            u -= e * c;
        }
        let n = norm_g(g, &u);
        let original = norm_g(g, v).max(1.0);
        if n < 1e-9 * original {
            return Err(GeomError::Degenerate { index });
        }
        out.push(u / n);
    }
    Ok(out)
}

/// div X = trace of v ↦ ∇_v X = ∂_k X^k + Γ^k_{ki} X^i.
pub fn divergence(m: &ChartManifold, x: &VectorField, p: &Point, cfg: &Config) -> Result<f64> {
    let gamma = christoffel(m, p, cfg)?;
    let jx = x.jacobian(p, cfg);
    let xv = x.at(p);
    let n = m.dim;
    let mut s = 0.0;
    for k in 0..n {
        s += jx[(k, k)];
        for i in 0..n {
            s += gamma.get(k, k, i) * xv[i];
        }
    }
    Ok(s)
}

/// (grad f)^k = g^{kl} ∂_l f.
pub fn gradient(m: &ChartManifold, f: &ScalarField, p: &Point, cfg: &Config) -> Result<TangentVector> {
    let ginv = m.metric.inverse_at(p, cfg)?;
    let df = f.differential(p, cfg);
    Ok(TangentVector::new(p.clone(), ginv * df))
}

/// The scalar function q ↦ Σ_i a_i(q) b_i(q) (pairing of a covector field,
/// given by components, with a vector field).
pub fn pair(a: &VectorField, b: &VectorField) -> ScalarField {
    let dim = a.dim;
    match (&a.analytic, &b.analytic) {
        (Some(fa), Some(fb)) => {
            let (fa, fb) = (fa.clone(), fb.clone());
            ScalarField::analytic(
                dim,
                Arc::new(move |p| {
                    let u = fa(p);
                    let v = fb(p);
                    vec![u
                        .into_iter()
                        .zip(v)
                        .map(|(ui, vi)| ui * vi)
                        .fold(Dual::constant(0.0), |acc, x| acc + x)]
                }),
            )
        }
        _ => {
            let (na, nb) = (a.numeric.clone(), b.numeric.clone());
            ScalarField::numeric(dim, Arc::new(move |p| na(p).dot(&nb(p))))
        }
    }
}

/// A list of tangent vectors at a common base point.
#[derive(Clone, Debug)]
pub struct Frame {
    pub base: Point,
    pub vectors: Vec<DVector<f64>>,
}

impl Frame {
    pub fn new(base: Point, vectors: Vec<DVector<f64>>) -> Self {
        Frame { base, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Max |g(v_i, v_j) − δ_ij| over the frame.
    pub fn orthonormality_residual(&self, g: &DMatrix<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(g, u, v) - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::example1_structure;
    use proptest::prelude::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn christoffel_of_the_warped_metric() {
        // g = e^{2z}(dx² + dy²) + dz² on (x1,x2,y1,y2,z)
        let m = example1_structure().manifold;
        let p = m.point(&[0.1, -0.2, 0.3, 0.0, 0.4]).unwrap();
        let gamma = christoffel(&m, &p, &cfg()).unwrap();
        let e2z = (2.0 * 0.4f64).exp();
        // Γ^z_{x1 x1} = −e^{2z}, Γ^{x1}_{x1 z} = 1
        assert!((gamma.get(4, 0, 0) + e2z).abs() < 1e-10);
        assert!((gamma.get(0, 0, 4) - 1.0).abs() < 1e-10);
        assert!((gamma.get(0, 4, 0) - 1.0).abs() < 1e-10);
        // flat direction pairs vanish
        assert!(gamma.get(4, 0, 1).abs() < 1e-12);
    }

    #[test]
    fn covariant_derivative_of_xi_is_the_argument() {
        // ∇_X ξ = X − η(X)ξ, so ∇_{∂x1} ∂z = ∂x1
        let s = example1_structure();
        let m = &s.manifold;
        let p = m.point(&[0.0, 0.0, 0.0, 0.0, 0.2]).unwrap();
        let x = VectorField::coordinate(5, 0);
        let d = covariant_derivative(m, &x, &s.xi, &p, &cfg()).unwrap();
        let expected = x.at(&p);
        assert!((d.components - expected).norm() < 1e-10);
    }

    #[test]
    fn bracket_of_frame_field_with_xi() {
        // E1 = e^{-z} ∂x1, [E1, ∂z] = e^{-z} ∂x1 = E1
        let m = example1_structure().manifold;
        let p = m.point(&[0.3, 0.0, -0.1, 0.0, 0.25]).unwrap();
        let e1 = VectorField::analytic(
            5,
            Arc::new(|q: &[Dual]| {
                let s = (-q[4].clone()).exp();
                vec![s, Dual::constant(0.0), Dual::constant(0.0),
                     Dual::constant(0.0), Dual::constant(0.0)]
            }),
        );
        let xi = VectorField::coordinate(5, 4);
        let b = lie_bracket(&e1, &xi, &p, &cfg());
        assert!((b.components - e1.at(&p)).norm() < 1e-12);
    }

    #[test]
    fn divergence_of_xi_and_of_flat_fields() {
        let m = example1_structure().manifold;
        let p = m.point(&[0.1, 0.2, 0.3, -0.4, 0.5]).unwrap();
        let xi = VectorField::coordinate(5, 4);
        let div = divergence(&m, &xi, &p, &cfg()).unwrap();
        assert!((div - 4.0).abs() < 1e-10);
        let dx1 = VectorField::coordinate(5, 0);
        assert!(divergence(&m, &dx1, &p, &cfg()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn gradient_on_euclidean_chart() {
        let m = ChartManifold::euclidean(2, 2.0, "plane");
        let f = ScalarField::analytic(
            2,
            Arc::new(|p: &[Dual]| vec![p[0].clone() * p[0].clone() + p[1].clone() * p[1].clone()]),
        );
        let p = m.point(&[0.5, -0.75]).unwrap();
        let g = gradient(&m, &f, &p, &cfg()).unwrap();
        assert!((g.components[0] - 1.0).abs() < 1e-12);
        assert!((g.components[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_input() {
        let g = DMatrix::identity(3, 3);
        let v1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let v2 = DVector::from_vec(vec![2.0, 0.0, 0.0]);
        assert!(matches!(
            gram_schmidt(&[v1, v2], &g),
            Err(GeomError::Degenerate { index: 1 })
        ));
    }

    #[test]
    fn gram_schmidt_orthonormalizes_in_the_metric() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let out = gram_schmidt(
            &[DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![1.0, 1.0])],
            &g,
        )
        .unwrap();
        let frame = Frame::new(Point::from_slice(&[0.0, 0.0]), out);
        assert!(frame.orthonormality_residual(&g) < 1e-12);
    }

    #[test]
    fn metric_inverse_guards_conditioning() {
        let cfgv = Config { cond_max: 1.0, ..Config::default() };
        let m = example1_structure().manifold;
        let p = m.point(&[0.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(
            m.metric.inverse_at(&p, &cfgv),
            Err(GeomError::IllConditioned { .. })
        ));
    }

    #[test]
    fn chart_rejects_outside_points() {
        let m = ChartManifold::euclidean(2, 1.0, "unit");
        assert!(m.point(&[0.5, 0.5]).is_ok());
        assert!(matches!(m.point(&[2.0, 0.0]), Err(GeomError::OutsideDomain { .. })));
        assert!(matches!(m.point(&[0.0]), Err(GeomError::Dimension { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// AD and FD Jacobians of an analytic field agree to 1e-6.
        #[test]
        fn dual_jacobian_matches_finite_differences(
            x in -0.9f64..0.9, y in -0.9f64..0.9, z in -0.9f64..0.9,
        ) {
            let f = VectorField::analytic(3, Arc::new(|p: &[Dual]| {
                vec![
                    (p[0].clone() * p[1].clone()).sin(),
                    p[2].exp() * p[0].clone(),
                    p[1].clone() * p[1].clone() * p[2].clone(),
                ]
            }));
            let p = Point::from_slice(&[x, y, z]);
            let exact = f.jacobian(&p, &cfg());
            let approx = f.jacobian_fd(&p, &cfg());
            prop_assert!((exact - approx).abs().max() < 1e-6);
        }

        /// Metric compatibility: X g(Y,Z) = g(∇_X Y, Z) + g(Y, ∇_X Z).
        #[test]
        fn connection_is_metric(
            px in -0.8f64..0.8, pz in -0.8f64..0.8,
            x0 in -1.0f64..1.0, x4 in -1.0f64..1.0,
            y0 in -1.0f64..1.0, y2 in -1.0f64..1.0,
            z1 in -1.0f64..1.0, z4 in -1.0f64..1.0,
        ) {
            let m = example1_structure().manifold;
            let p = Point::from_slice(&[px, 0.1, -0.2, 0.0, pz]);
            let x = VectorField::constant(DVector::from_vec(vec![x0, 0.0, 0.3, 0.0, x4]));
            let y = VectorField::constant(DVector::from_vec(vec![y0, 0.0, y2, 0.1, 0.0]));
            let z = VectorField::constant(DVector::from_vec(vec![0.0, z1, 0.0, 0.2, z4]));
            let c = cfg();

            // X g(Y,Z) via duals on the metric components
            let (yv, zv) = (y.at(&p), z.at(&p));
            let gf = m.metric.field.dual_fn();
            let dim = m.dim;
            let gyz = ScalarField::analytic(dim, Arc::new(move |q: &[Dual]| {
                let gm = gf(q);
                let mut acc = Dual::constant(0.0);
                for i in 0..dim {
                    for j in 0..dim {
                        acc = acc + gm[i * dim + j].clone() * (yv[i] * zv[j]);
                    }
                }
                vec![acc]
            }));
            let lhs = gyz.differential(&p, &c).dot(&x.at(&p));

            let g = m.metric.at(&p);
            let dxy = covariant_derivative(&m, &x, &y, &p, &c).unwrap().components;
            let dxz = covariant_derivative(&m, &x, &z, &p, &c).unwrap().components;
            let rhs = inner(&g, &dxy, &z.at(&p)) + inner(&g, &y.at(&p), &dxz);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        /// Torsion-freeness: ∇_X Y − ∇_Y X = [X,Y] for analytic fields.
        #[test]
        fn connection_is_torsion_free(px in -0.8f64..0.8, pz in -0.8f64..0.8) {
            let m = example1_structure().manifold;
            let p = Point::from_slice(&[px, 0.0, 0.1, -0.1, pz]);
            let x = VectorField::analytic(5, Arc::new(|q: &[Dual]| {
                vec![q[4].sin(), Dual::constant(0.2), q[0].clone(),
                     Dual::constant(0.0), q[1].clone()]
            }));
            let y = VectorField::analytic(5, Arc::new(|q: &[Dual]| {
                vec![Dual::constant(1.0), q[4].exp(), Dual::constant(0.0),
                     q[2].clone(), Dual::constant(-0.3)]
            }));
            let c = cfg();
            let dxy = covariant_derivative(&m, &x, &y, &p, &c).unwrap().components;
            let dyx = covariant_derivative(&m, &y, &x, &p, &c).unwrap().components;
            let bracket = lie_bracket(&x, &y, &p, &c).components;
            prop_assert!((dxy - dyx - bracket).norm() < 1e-9);
        }

        /// Bracket antisymmetry on analytic fields.
        #[test]
        fn bracket_is_antisymmetric(px in -0.8f64..0.8, py in -0.8f64..0.8) {
            let p = Point::from_slice(&[px, py]);
            let x = VectorField::analytic(2, Arc::new(|q: &[Dual]| {
                vec![q[1].clone() * q[1].clone(), q[0].sin()]
            }));
            let y = VectorField::analytic(2, Arc::new(|q: &[Dual]| {
                vec![q[0].exp(), q[0].clone() * q[1].clone()]
            }));
            let c = cfg();
            let xy = lie_bracket(&x, &y, &p, &c).components;
            let yx = lie_bracket(&y, &x, &p, &c).components;
            prop_assert!((xy + yx).norm() < 1e-12);
        }
    }
}
