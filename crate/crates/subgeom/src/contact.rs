//! Almost contact metric structures (φ, ξ, η, g), verification of their
//! defining identities, the Kenmotsu condition, and construction of
//! Kenmotsu manifolds as exponentially warped products over Kaehler data.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::check::CheckRecord;
use crate::config::Config;
use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::geometry::{
    self, covariant_derivative, inner, norm_g, pair, ChartManifold, DomainBox, MatrixField,
    MetricField, Point, ScalarField, TangentVector, VectorField,
};

/// The quadruple (φ, ξ, η, g) on a chart manifold. η is stored by its
/// covector components in the coordinate frame.
#[derive(Clone)]
pub struct AlmostContactStructure {
    pub manifold: Arc<ChartManifold>,
    pub phi: MatrixField,
    pub xi: VectorField,
    pub eta: VectorField,
}

impl AlmostContactStructure {
    pub fn new(
        manifold: Arc<ChartManifold>,
        phi: MatrixField,
        xi: VectorField,
        eta: VectorField,
    ) -> Result<Self> {
        let dim = manifold.dim;
        if phi.dim != dim || xi.dim != dim || eta.dim != dim {
            return Err(GeomError::Dimension { expected: dim, got: phi.dim.min(xi.dim).min(eta.dim) });
        }
        Ok(AlmostContactStructure { manifold, phi, xi, eta })
    }

    pub fn phi_at(&self, p: &Point) -> DMatrix<f64> {
        self.phi.at(p)
    }

    pub fn xi_at(&self, p: &Point) -> DVector<f64> {
        self.xi.at(p)
    }

    pub fn eta_at(&self, p: &Point) -> DVector<f64> {
        self.eta.at(p)
    }

    /// η(v) for a pointwise vector.
    pub fn eta_apply(&self, p: &Point, v: &DVector<f64>) -> f64 {
        self.eta_at(p).dot(v)
    }
}

/// Max residual of the structure identities
///   φ² = −I + η⊗ξ,  φξ = 0,  η∘φ = 0,  η(ξ) = 1,
///   g(φX,φY) = g(X,Y) − η(X)η(Y),  η(X) = g(X,ξ)
/// over sampled points and random vectors.
pub fn verify_almost_contact(s: &AlmostContactStructure, cfg: &Config) -> CheckRecord {
    let m = &s.manifold;
    let n = m.dim;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = Point::new(sampler.point(m));
        let g = m.metric.at(&p);
        let phi = s.phi_at(&p);
        let xi = s.xi_at(&p);
        let eta = s.eta_at(&p);

        let phi2 = &phi * &phi;
        let target = -DMatrix::identity(n, n) + &xi * eta.transpose();
        worst = worst.max((phi2 - target).abs().max());
        worst = worst.max((&phi * &xi).abs().max());
        worst = worst.max((eta.transpose() * &phi).abs().max());
        worst = worst.max((eta.dot(&xi) - 1.0).abs());

        let x = sampler.vector(n);
        let y = sampler.vector(n);
        let ex = eta.dot(&x);
        let ey = eta.dot(&y);
        let lhs = inner(&g, &(&phi * &x), &(&phi * &y));
        worst = worst.max((lhs - inner(&g, &x, &y) + ex * ey).abs());
        worst = worst.max((ex - inner(&g, &x, &xi)).abs());
    }
    CheckRecord::from_residual(
        "almost-contact-structure",
        "Eqs.(1)-(3)",
        worst,
        cfg.tol_algebraic,
        cfg.samples,
    )
}

/// Φ(X,Y) = g(X, φY) at a common base point.
pub fn fundamental_two_form(
    s: &AlmostContactStructure,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    if x.base != y.base {
        return Err(GeomError::Precondition("two-form arguments have different base points".into()));
    }
    let g = s.manifold.metric.at(&x.base);
    let phi = s.phi_at(&x.base);
    Ok(inner(&g, &x.components, &(phi * &y.components)))
}

/// g-norm of (∇_X φ)Y − g(φX,Y)ξ + η(Y)φX at p, where
/// (∇_X φ)Y = ∇_X(φY) − φ(∇_X Y).
pub fn kenmotsu_defect(
    s: &AlmostContactStructure,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
    cfg: &Config,
) -> Result<f64> {
    let m = &s.manifold;
    let g = m.metric.at(p);
    let phi = s.phi_at(p);
    let xi = s.xi_at(p);
    let xv = x.at(p);
    let yv = y.at(p);

    let phi_y = s.phi.apply(y);
    let d_phi_y = covariant_derivative(m, x, &phi_y, p, cfg)?.components;
    let d_y = covariant_derivative(m, x, y, p, cfg)?.components;
    let nabla_phi = d_phi_y - &phi * d_y;

    let rhs = &xi * inner(&g, &(&phi * &xv), &yv) - (&phi * &xv) * s.eta_apply(p, &yv);
    Ok(norm_g(&g, &(nabla_phi - rhs)))
}

/// |X·(η(Y)) − η(∇_X Y) − g(X,Y) + η(X)η(Y)| at p.
pub fn nabla_eta_check(
    s: &AlmostContactStructure,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
    cfg: &Config,
) -> Result<f64> {
    let m = &s.manifold;
    let g = m.metric.at(p);
    let xv = x.at(p);
    let yv = y.at(p);

    let eta_y: ScalarField = pair(&s.eta, y);
    let x_eta_y = eta_y.differential(p, cfg).dot(&xv);
    let d_y = covariant_derivative(m, x, y, p, cfg)?.components;
    let res = x_eta_y
        - s.eta_apply(p, &d_y)
        - inner(&g, &xv, &yv)
        + s.eta_apply(p, &xv) * s.eta_apply(p, &yv);
    Ok(res.abs())
}

/// An almost contact metric manifold whose Kenmotsu defect vanishes.
#[derive(Clone)]
pub struct KenmotsuManifold {
    pub structure: AlmostContactStructure,
}

impl KenmotsuManifold {
    /// Wrap a structure after checking the defining condition at sampled
    /// points with random constant argument fields.
    pub fn certify(structure: AlmostContactStructure, cfg: &Config) -> Result<Self> {
        let record = kenmotsu_check(&structure, cfg);
        if !record.passed() {
            return Err(GeomError::Precondition(format!(
                "Kenmotsu condition fails: residual {:.3e} >= {:.3e}",
                record.max_residual, record.tolerance
            )));
        }
        Ok(KenmotsuManifold { structure })
    }
}

/// Max Kenmotsu defect over sampled points and random constant fields.
pub fn kenmotsu_check(s: &AlmostContactStructure, cfg: &Config) -> CheckRecord {
    let m = &s.manifold;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = Point::new(sampler.point(m));
        let x = VectorField::constant(sampler.vector(m.dim));
        let y = VectorField::constant(sampler.vector(m.dim));
        if let Ok(d) = kenmotsu_defect(s, &x, &y, &p, cfg) {
            worst = worst.max(d);
        }
    }
    CheckRecord::from_residual("kenmotsu-condition", "Eq.(4)", worst, cfg.tol_first, cfg.samples)
}

/// Max residual of (∇_X η)Y = g(X,Y) − η(X)η(Y) over samples.
pub fn nabla_eta_suite(s: &AlmostContactStructure, cfg: &Config) -> CheckRecord {
    let m = &s.manifold;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = Point::new(sampler.point(m));
        let x = VectorField::constant(sampler.vector(m.dim));
        let y = VectorField::constant(sampler.vector(m.dim));
        if let Ok(d) = nabla_eta_check(s, &x, &y, &p, cfg) {
            worst = worst.max(d);
        }
    }
    CheckRecord::from_residual("nabla-eta", "Eq.(6)", worst, cfg.tol_first, cfg.samples)
}

/// Builds the warped product I ×_f L with f(t) = s·e^t over Kaehler data
/// (J, g_L): metric dt² + f²g_L, ξ = ∂t, η = dt, φ the lift of J that
/// annihilates ∂t. The Kaehler preconditions (J² = −I, compatibility,
/// ∇J = 0) are checked numerically before construction.
pub fn kenmotsu_from_kaehler(
    l: &Arc<ChartManifold>,
    j: &MatrixField,
    s: f64,
    interval: (f64, f64),
    cfg: &Config,
) -> Result<KenmotsuManifold> {
    if s <= 0.0 {
        return Err(GeomError::Precondition("warping constant s must be positive".into()));
    }
    check_kaehler(l, j, cfg)?;

    let nl = l.dim;
    let dim = nl + 1;
    let interval_box = DomainBox::new(vec![interval.0], vec![interval.1]);
    let domain = interval_box.product(&l.domain);

    let lg = l.metric.clone();
    let lg_dual = move |p: &[Dual]| -> Vec<Dual> {
        // evaluate g_L at the fiber coordinates, keeping dual parts
        (lg.field.dual_fn())(p)
    };
    let metric = MetricField::new(
        dim,
        Arc::new(move |p: &[Dual]| {
            let t = p[0].clone();
            let f2 = (t * 2.0).exp() * (s * s);
            let gl = lg_dual(&p[1..]);
            let mut out = vec![Dual::constant(0.0); dim * dim];
            out[0] = Dual::constant(1.0);
            for i in 0..nl {
                for k in 0..nl {
                    out[(i + 1) * dim + (k + 1)] = f2.clone() * gl[i * nl + k].clone();
                }
            }
            out
        }),
    );
    let label = format!("I x_{{{}e^t}} {}", s, l.label);
    let m = ChartManifold::new(dim, domain, metric, &label);

    let xi = VectorField::coordinate(dim, 0);
    let eta = VectorField::coordinate(dim, 0);
    let jf = j.dual_fn();
    let phi = MatrixField::new(
        dim,
        Arc::new(move |p: &[Dual]| {
            let jm = jf(&p[1..]);
            let mut out = vec![Dual::constant(0.0); dim * dim];
            for i in 0..nl {
                for k in 0..nl {
                    out[(i + 1) * dim + (k + 1)] = jm[i * nl + k].clone();
                }
            }
            out
        }),
    );
    let structure = AlmostContactStructure::new(m, phi, xi, eta)?;
    KenmotsuManifold::certify(structure, cfg)
}

/// Numerical Kaehler check: J² = −I, g(JX,JY) = g(X,Y), ∇J = 0.
fn check_kaehler(l: &Arc<ChartManifold>, j: &MatrixField, cfg: &Config) -> Result<()> {
    let n = l.dim;
    let mut sampler = cfg.sampler();
    let samples = cfg.samples.min(40);
    for _ in 0..samples {
        let p = Point::new(sampler.point(l));
        let g = l.metric.at(&p);
        let jm = j.at(&p);
        let alg = ((&jm * &jm) + DMatrix::identity(n, n)).abs().max();
        let x = sampler.vector(n);
        let y = sampler.vector(n);
        let compat = (inner(&g, &(&jm * &x), &(&jm * &y)) - inner(&g, &x, &y)).abs();

        let xf = VectorField::constant(x.clone());
        let yf = VectorField::constant(y.clone());
        let jy = j.apply(&yf);
        let d_jy = covariant_derivative(l, &xf, &jy, &p, cfg)?.components;
        let d_y = covariant_derivative(l, &xf, &yf, &p, cfg)?.components;
        let parallel = norm_g(&g, &(d_jy - &jm * d_y));

        if alg.max(compat) > cfg.tol_algebraic.max(1e-7) || parallel > cfg.tol_first {
            return Err(GeomError::Precondition(format!(
                "input is not Kaehler (residuals: alg {:.2e}, compat {:.2e}, nabla-J {:.2e})",
                alg, compat, parallel
            )));
        }
    }
    Ok(())
}

/// Records the algebraic structure checks plus the Kenmotsu defect and
/// div ξ on a given structure.
pub fn structure_report(s: &AlmostContactStructure, cfg: &Config) -> Vec<CheckRecord> {
    let mut records = vec![
        verify_almost_contact(s, cfg),
        kenmotsu_check(s, cfg),
        nabla_eta_suite(s, cfg),
    ];
    // div ξ = 2m on a (2m+1)-dimensional Kenmotsu manifold
    let expected = (s.manifold.dim - 1) as f64;
    let mut sampler = cfg.sampler();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples.min(50) {
        let p = Point::new(sampler.point(&s.manifold));
        if let Ok(d) = geometry::divergence(&s.manifold, &s.xi, &p, cfg) {
            worst = worst.max((d - expected).abs());
        }
    }
    records.push(CheckRecord::from_residual(
        "div-xi",
        "div xi = 2m",
        worst,
        cfg.tol_first,
        cfg.samples.min(50),
    ));
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{example1_structure, flat_complex};

    fn cfg() -> Config {
        Config { samples: 40, ..Config::default() }
    }

    #[test]
    fn example_structure_satisfies_the_algebraic_identities() {
        let rec = verify_almost_contact(&example1_structure(), &cfg());
        assert!(rec.passed(), "residual {}", rec.max_residual);
    }

    #[test]
    fn scaled_phi_breaks_the_structure() {
        let s = example1_structure();
        let dim = s.manifold.dim;
        let f = s.phi.dual_fn();
        let scaled = MatrixField::new(
            dim,
            Arc::new(move |p| f(p).into_iter().map(|d| d * 1.01).collect()),
        );
        let bad = AlmostContactStructure::new(s.manifold.clone(), scaled, s.xi, s.eta).unwrap();
        assert!(!verify_almost_contact(&bad, &cfg()).passed());
    }

    #[test]
    fn kenmotsu_condition_holds_on_the_warped_metric_only() {
        let s = example1_structure();
        let rec = kenmotsu_check(&s, &cfg());
        assert!(rec.passed(), "residual {}", rec.max_residual);

        // the same (φ, ξ, η) over the flat metric is almost contact but
        // not Kenmotsu: the defect stays bounded away from zero
        let flat = ChartManifold::new(
            5,
            s.manifold.domain.clone(),
            MetricField::euclidean(5),
            "flat5",
        );
        let bad = AlmostContactStructure::new(flat, s.phi.clone(), s.xi.clone(), s.eta.clone())
            .unwrap();
        let rec = kenmotsu_check(&bad, &cfg());
        assert!(rec.max_residual > 0.1, "defect {}", rec.max_residual);
    }

    #[test]
    fn nabla_eta_identity_holds() {
        assert!(nabla_eta_suite(&example1_structure(), &cfg()).passed());
    }

    #[test]
    fn two_form_values_on_the_orthonormal_frame() {
        // E1 = e^{-z}∂x1, E3 = e^{-z}∂y1: Φ(E1,E3) = g(E1, φE3) = −1
        let s = example1_structure();
        let p = s.manifold.point(&[0.1, 0.0, -0.2, 0.0, 0.3]).unwrap();
        let sc = (-0.3f64).exp();
        let e1 = TangentVector::new(p.clone(), DVector::from_vec(vec![sc, 0.0, 0.0, 0.0, 0.0]));
        let e3 = TangentVector::new(p.clone(), DVector::from_vec(vec![0.0, 0.0, sc, 0.0, 0.0]));
        assert!((fundamental_two_form(&s, &e1, &e3).unwrap() + 1.0).abs() < 1e-12);
        assert!((fundamental_two_form(&s, &e3, &e1).unwrap() - 1.0).abs() < 1e-12);

        let q = s.manifold.point(&[0.0; 5]).unwrap();
        let at_q = TangentVector::new(q, DVector::zeros(5));
        assert!(fundamental_two_form(&s, &e1, &at_q).is_err());
    }

    #[test]
    fn warped_construction_requires_positive_scale_and_kaehler_input() {
        let c = cfg();
        let (l, j) = flat_complex(2, 1.0);
        assert!(matches!(
            kenmotsu_from_kaehler(&l, &j, -1.0, (-1.0, 1.0), &c),
            Err(GeomError::Precondition(_))
        ));
        assert!(matches!(
            kenmotsu_from_kaehler(&l, &j, 0.0, (-1.0, 1.0), &c),
            Err(GeomError::Precondition(_))
        ));
        // a symmetric involution is not a complex structure
        let not_j = MatrixField::constant(DMatrix::identity(4, 4));
        assert!(kenmotsu_from_kaehler(&l, &not_j, 1.0, (-1.0, 1.0), &c).is_err());
    }

    #[test]
    fn warped_construction_gives_a_certified_structure() {
        let c = cfg();
        let (l, j) = flat_complex(2, 1.0);
        let k = kenmotsu_from_kaehler(&l, &j, 2.0, (-1.0, 1.0), &c).unwrap();
        let m = &k.structure.manifold;
        assert_eq!(m.dim, 5);
        // metric at t: diag(1, (2e^t)² I₄)
        let p = m.point(&[0.25, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let g = m.metric.at(&p);
        let f2 = (2.0 * 0.25f64.exp()).powi(2);
        assert!((g[(0, 0)] - 1.0).abs() < 1e-12);
        for i in 1..5 {
            assert!((g[(i, i)] - f2).abs() < 1e-12);
        }
        assert!(verify_almost_contact(&k.structure, &c).passed());
    }

    #[test]
    fn structure_report_covers_div_xi() {
        let recs = structure_report(&example1_structure(), &cfg());
        let div = recs.iter().find(|r| r.name == "div-xi").unwrap();
        assert!(div.passed());
        assert_eq!(recs.len(), 4);
    }
}
