//! The built-in manifolds and maps: the exponentially warped contact
//! structure on R^5, the two canonical submersions from it (horizontal
//! and vertical characteristic field), a 7-dimensional analogue with a
//! nontrivial invariant horizontal complement, and flat helpers.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::config::Config;
use crate::contact::{kenmotsu_from_kaehler, AlmostContactStructure, KenmotsuManifold};
use crate::dual::Dual;
use crate::error::Result;
use crate::geometry::{ChartManifold, DomainBox, MatrixField, MetricField, ScalarField, VectorField};
use crate::submersion::SmoothMap;

/// The R^5 structure: g = e^{2z} Σ (dx_i² + dy_i²) + dz², η = dz, ξ = ∂z,
/// with coordinates ordered (x1, x2, y1, y2, z).
pub fn example1_structure() -> AlmostContactStructure {
    let dim = 5;
    let metric = MetricField::diagonal(
        dim,
        Arc::new(|p: &[Dual]| {
            let s = (p[4].clone() * 2.0).exp();
            vec![s.clone(), s.clone(), s.clone(), s, Dual::constant(1.0)]
        }),
    );
    let m = ChartManifold::new(dim, DomainBox::cube(dim, 1.0), metric, "example1");
    // phi dx1 = dy1, phi dy1 = -dx1 (same for the second pair), phi dz = 0
    let phi = MatrixField::constant(DMatrix::from_row_slice(
        dim,
        dim,
        &[
            0.0, 0.0, -1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0,
        ],
    ));
    let xi = VectorField::coordinate(dim, 4);
    let eta = VectorField::coordinate(dim, 4);
    AlmostContactStructure::new(m, phi, xi, eta).expect("dimensions consistent")
}

pub fn example1(cfg: &Config) -> Result<KenmotsuManifold> {
    KenmotsuManifold::certify(example1_structure(), cfg)
}

/// Target of the horizontal-ξ submersion: coordinates (u, v, w) with
/// metric e^{2w}(du² + dv²) + dw².
pub fn example2_target() -> Arc<ChartManifold> {
    let metric = MetricField::diagonal(
        3,
        Arc::new(|p: &[Dual]| {
            let s = (p[2].clone() * 2.0).exp();
            vec![s.clone(), s, Dual::constant(1.0)]
        }),
    );
    ChartManifold::new(
        3,
        DomainBox::new(vec![-1.6, -1.6, -1.0], vec![1.6, 1.6, 1.0]),
        metric,
        "example2-target",
    )
}

/// F(x1,x2,y1,y2,z) = ((x1+y2)/√2, (x2+y1)/√2, z): an anti-invariant
/// Riemannian submersion with horizontal ξ.
pub fn example2_map(source: &Arc<ChartManifold>) -> SmoothMap {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    SmoothMap::new(
        source.clone(),
        example2_target(),
        Arc::new(move |p: &[Dual]| {
            vec![
                (p[0].clone() + p[3].clone()) * r,
                (p[1].clone() + p[2].clone()) * r,
                p[4].clone(),
            ]
        }),
    )
}

/// Target of the vertical-ξ map: flat R², following the convention that
/// the conformal factor is carried by the dilation λ(p) = z.
pub fn example3_target() -> Arc<ChartManifold> {
    ChartManifold::euclidean(2, 1.6, "example3-target")
}

/// F(x1,x2,y1,y2,z) = ((x1+y2)/√2, (x2+y1)/√2): an anti-invariant
/// horizontally conformal submersion with vertical ξ.
pub fn example3_map(source: &Arc<ChartManifold>) -> SmoothMap {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    SmoothMap::new(
        source.clone(),
        example3_target(),
        Arc::new(move |p: &[Dual]| {
            vec![
                (p[0].clone() + p[3].clone()) * r,
                (p[1].clone() + p[2].clone()) * r,
            ]
        }),
    )
}

/// Flat R^{2k} with the standard complex structure J(∂x_i) = ∂y_i, in
/// coordinate order (x1, y1, x2, y2, ...).
pub fn flat_complex(k: usize, r: f64) -> (Arc<ChartManifold>, MatrixField) {
    let dim = 2 * k;
    let m = ChartManifold::euclidean(dim, r, &format!("flat-C{k}"));
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..k {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    (m, MatrixField::constant(j))
}

/// 7-dimensional warped structure over flat C³ (coordinates
/// (t, x1, y1, x2, y2, x3, y3)) built through the Kaehler constructor.
pub fn ken7(cfg: &Config) -> Result<KenmotsuManifold> {
    let (l, j) = flat_complex(3, 1.0);
    kenmotsu_from_kaehler(&l, &j, 1.0, (-1.0, 1.0), cfg)
}

/// Submersion from the 7-dimensional structure with one-dimensional
/// kernel span{∂x1}: horizontal ξ and a nontrivial invariant complement
/// μ (so the C-part of φ on the horizontal space is nonzero).
pub fn ken7_map(source: &Arc<ChartManifold>) -> SmoothMap {
    let metric = MetricField::diagonal(
        6,
        Arc::new(|p: &[Dual]| {
            let s = (p[5].clone() * 2.0).exp();
            vec![s.clone(), s.clone(), s.clone(), s.clone(), s, Dual::constant(1.0)]
        }),
    );
    let target = ChartManifold::new(
        6,
        DomainBox::new(vec![-1.0; 6], vec![1.0; 6]),
        metric,
        "ken7-target",
    );
    // source order (t, x1, y1, x2, y2, x3, y3) -> (y1, x2, y2, x3, y3, t)
    SmoothMap::new(
        source.clone(),
        target,
        Arc::new(|p: &[Dual]| {
            vec![
                p[2].clone(),
                p[3].clone(),
                p[4].clone(),
                p[5].clone(),
                p[6].clone(),
                p[0].clone(),
            ]
        }),
    )
}

/// The flat projection R⁴ → R², (a,b,c,d) ↦ ((a+d)/√2, (b+c)/√2); a
/// Riemannian submersion between Euclidean charts.
pub fn planar_projection_r4() -> SmoothMap {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    SmoothMap::new(
        ChartManifold::euclidean(4, 1.0, "flat-R4"),
        ChartManifold::euclidean(2, 1.6, "flat-R2"),
        Arc::new(move |p: &[Dual]| {
            vec![(p[0].clone() + p[3].clone()) * r, (p[1].clone() + p[2].clone()) * r]
        }),
    )
}

/// An interval chart (-r, r) with the line metric.
pub fn interval(r: f64) -> Arc<ChartManifold> {
    ChartManifold::euclidean(1, r, "I")
}

/// The warp t ↦ s·e^t as a closed-form scalar field on the interval.
pub fn exp_warp(s: f64) -> ScalarField {
    ScalarField::analytic(1, Arc::new(move |p: &[Dual]| vec![p[0].exp() * s]))
}
