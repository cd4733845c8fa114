//! Lorentzian geometry on a single 2d chart (t, x), signature (+,-):
//! covector classification, geodesics (initial and boundary value problems),
//! parallel transport, the lightlike-geodesic relation between covector
//! points, and exponential-map scaling of neighborhoods.

pub mod bvp;
pub mod expr;
pub mod geodesic;
pub mod neighborhood;
pub mod tilde;
pub mod transport;

use crate::scalar::Real;
use expr::Expr;
use std::sync::Arc;
use thiserror::Error;

pub use bvp::{geodesic_bvp, BvpOutcome};
pub use geodesic::{geodesic_ivp, geodesic_residual, CausalClass, GeodesicSegment};
pub use neighborhood::{scaled_neighborhood, Ball};
pub use tilde::related_by_tilde;
pub use transport::parallel_transport;

/// Chart point (t, x).
pub type Point<T> = [T; 2];

/// A base point together with a cotangent vector in the chart cobasis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovectorPoint<T> {
    pub base: Point<T>,
    pub xi: [T; 2],
}

impl<T: Real> CovectorPoint<T> {
    pub fn new(base: Point<T>, xi: [T; 2]) -> Self {
        CovectorPoint { base, xi }
    }
}

/// Symmetric 2x2 metric at a point, components (g_tt, g_tx, g_xx).
#[derive(Clone, Copy, Debug)]
pub struct Metric2<T> {
    pub tt: T,
    pub tx: T,
    pub xx: T,
}

impl<T: Real> Metric2<T> {
    pub fn minkowski() -> Self {
        Metric2 {
            tt: T::one(),
            tx: T::zero(),
            xx: -T::one(),
        }
    }

    pub fn det(&self) -> T {
        self.tt * self.xx - self.tx * self.tx
    }

    pub fn inverse(&self) -> Metric2<T> {
        let d = self.det();
        Metric2 {
            tt: self.xx / d,
            tx: -self.tx / d,
            xx: self.tt / d,
        }
    }

    /// g(v, w) for vectors (or g^{-1}(xi, eta) if this is an inverse metric).
    pub fn pair(&self, v: [T; 2], w: [T; 2]) -> T {
        self.tt * v[0] * w[0] + self.tx * (v[0] * w[1] + v[1] * w[0]) + self.xx * v[1] * w[1]
    }

    /// Contraction with a (co)vector: (g v)_mu or (g^{-1} xi)^mu.
    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [
            self.tt * v[0] + self.tx * v[1],
            self.tx * v[0] + self.xx * v[1],
        ]
    }
}

/// Open coordinate rectangle.
#[derive(Clone, Copy, Debug)]
pub struct ChartDomain<T> {
    pub t_range: (T, T),
    pub x_range: (T, T),
}

impl<T: Real> ChartDomain<T> {
    pub fn new(t_range: (T, T), x_range: (T, T)) -> Self {
        ChartDomain { t_range, x_range }
    }

    pub fn symmetric(half_t: T, half_x: T) -> Self {
        ChartDomain {
            t_range: (-half_t, half_t),
            x_range: (-half_x, half_x),
        }
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        p[0] > self.t_range.0 && p[0] < self.t_range.1 && p[1] > self.x_range.0 && p[1] < self.x_range.1
    }

    pub fn diameter(&self) -> T {
        let dt = self.t_range.1 - self.t_range.0;
        let dx = self.x_range.1 - self.x_range.0;
        (dt * dt + dx * dx).sqrt()
    }
}

/// Metric prescription.
#[derive(Clone)]
pub enum ModelKind<T> {
    Minkowski,
    /// g = Omega^2(t,x) diag(1,-1); the factor must be positive on the chart.
    ConformallyFlat { omega_sq: Expr },
    /// Arbitrary smooth metric components; Christoffels by finite differences.
    General {
        metric: Arc<dyn Fn(Point<T>) -> Metric2<T> + Send + Sync>,
    },
}

impl<T> std::fmt::Debug for ModelKind<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Minkowski => write!(f, "Minkowski"),
            ModelKind::ConformallyFlat { omega_sq } => {
                write!(f, "ConformallyFlat({omega_sq})")
            }
            ModelKind::General { .. } => write!(f, "General(..)"),
        }
    }
}

/// Numerical tolerances for the geometry layer.
#[derive(Clone, Copy, Debug)]
pub struct GeoTolerances {
    pub null_tol: f64,
    pub geo_tol: f64,
    pub bvp_tol: f64,
    pub transport_tol: f64,
    pub tilde_tol: f64,
    /// Integrator step target in chart units.
    pub step: f64,
}

impl Default for GeoTolerances {
    fn default() -> Self {
        GeoTolerances {
            null_tol: 1e-9,
            geo_tol: 1e-8,
            bvp_tol: 1e-6,
            transport_tol: 1e-8,
            tilde_tol: 1e-6,
            step: 4e-3,
        }
    }
}

/// A 2d chart with Lorentzian metric, time orientation and tolerances.
#[derive(Clone, Debug)]
pub struct SpacetimeModel<T> {
    pub kind: ModelKind<T>,
    /// Time-orientation field, constant in chart coordinates.
    pub orientation: [T; 2],
    pub domain: ChartDomain<T>,
    pub tol: GeoTolerances,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("covector is degenerate at the null cone and cannot be oriented")]
    DegenerateDirection,
    #[error("geodesic integration failed: {0}")]
    IntegrationFailure(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("metric is not Lorentzian at ({0}, {1})")]
    NonLorentzian(f64, f64),
}

/// Causal type of a covector, future/past-tagged when causal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovectorClass {
    NullFuture,
    NullPast,
    TimelikeFuture,
    TimelikePast,
    Spacelike,
}

impl CovectorClass {
    pub fn is_null(self) -> bool {
        matches!(self, CovectorClass::NullFuture | CovectorClass::NullPast)
    }

    pub fn is_future(self) -> bool {
        matches!(self, CovectorClass::NullFuture | CovectorClass::TimelikeFuture)
    }

    pub fn is_causal(self) -> bool {
        !matches!(self, CovectorClass::Spacelike)
    }
}

impl<T: Real> SpacetimeModel<T> {
    pub fn minkowski(domain: ChartDomain<T>) -> Self {
        SpacetimeModel {
            kind: ModelKind::Minkowski,
            orientation: [T::one(), T::zero()],
            domain,
            tol: GeoTolerances::default(),
        }
    }

    pub fn conformally_flat(omega_sq: Expr, domain: ChartDomain<T>) -> Self {
        SpacetimeModel {
            kind: ModelKind::ConformallyFlat { omega_sq },
            orientation: [T::one(), T::zero()],
            domain,
            tol: GeoTolerances::default(),
        }
    }

    pub fn general(
        metric: Arc<dyn Fn(Point<T>) -> Metric2<T> + Send + Sync>,
        domain: ChartDomain<T>,
    ) -> Self {
        SpacetimeModel {
            kind: ModelKind::General { metric },
            orientation: [T::one(), T::zero()],
            domain,
            tol: GeoTolerances::default(),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, ModelKind::Minkowski)
    }

    pub fn metric(&self, p: Point<T>) -> Metric2<T> {
        match &self.kind {
            ModelKind::Minkowski => Metric2::minkowski(),
            ModelKind::ConformallyFlat { omega_sq } => {
                let o2 = omega_sq.eval(p[0], p[1]);
                Metric2 {
                    tt: o2,
                    tx: T::zero(),
                    xx: -o2,
                }
            }
            ModelKind::General { metric } => metric(p),
        }
    }

    pub fn inverse_metric(&self, p: Point<T>) -> Metric2<T> {
        self.metric(p).inverse()
    }

    /// Christoffel symbols Gamma^lam_{mu nu}; index order [lam][mu][nu].
    pub fn christoffel(&self, p: Point<T>) -> [[[T; 2]; 2]; 2] {
        match &self.kind {
            ModelKind::Minkowski => [[[T::zero(); 2]; 2]; 2],
            ModelKind::ConformallyFlat { omega_sq } => {
                // g = e^{2 phi} eta: Gamma^l_{mn} =
                //   d_m phi delta^l_n + d_n phi delta^l_m - eta^{ls} d_s phi eta_{mn}
                let o2 = omega_sq.eval(p[0], p[1]);
                let dphi = [
                    omega_sq.diff(expr::Var::T).eval(p[0], p[1]) / (T::lit(2.0) * o2),
                    omega_sq.diff(expr::Var::X).eval(p[0], p[1]) / (T::lit(2.0) * o2),
                ];
                let eta = [T::one(), -T::one()];
                let mut out = [[[T::zero(); 2]; 2]; 2];
                for l in 0..2 {
                    for m in 0..2 {
                        for n in 0..2 {
                            let mut v = T::zero();
                            if l == n {
                                v = v + dphi[m];
                            }
                            if l == m {
                                v = v + dphi[n];
                            }
                            if m == n {
                                // eta^{ll} d_l phi eta_{mm}
                                v = v - (T::one() / eta[l]) * dphi[l] * eta[m];
                            }
                            out[l][m][n] = v;
                        }
                    }
                }
                out
            }
            ModelKind::General { metric } => {
                let h = T::epsilon().cbrt();
                let d = |mu: usize| -> Metric2<T> {
                    let mut pp = p;
                    let mut pm = p;
                    pp[mu] = pp[mu] + h;
                    pm[mu] = pm[mu] - h;
                    let gp = metric(pp);
                    let gm = metric(pm);
                    let two_h = T::lit(2.0) * h;
                    Metric2 {
                        tt: (gp.tt - gm.tt) / two_h,
                        tx: (gp.tx - gm.tx) / two_h,
                        xx: (gp.xx - gm.xx) / two_h,
                    }
                };
                let dg = [d(0), d(1)];
                let ginv = self.inverse_metric(p);
                let comp = |m: &Metric2<T>, a: usize, b: usize| -> T {
                    match (a, b) {
                        (0, 0) => m.tt,
                        (1, 1) => m.xx,
                        _ => m.tx,
                    }
                };
                let ginv_arr = [[ginv.tt, ginv.tx], [ginv.tx, ginv.xx]];
                let mut out = [[[T::zero(); 2]; 2]; 2];
                for l in 0..2 {
                    for m in 0..2 {
                        for n in 0..2 {
                            let mut v = T::zero();
                            for s in 0..2 {
                                let grad = comp(&dg[m], s, n) + comp(&dg[n], s, m)
                                    - comp(&dg[s], m, n);
                                v = v + ginv_arr[l][s] * grad * T::lit(0.5);
                            }
                            out[l][m][n] = v;
                        }
                    }
                }
                out
            }
        }
    }

    /// Metric dual of a covector, u^mu = g^{mu nu} xi_nu.
    pub fn raise(&self, p: Point<T>, xi: [T; 2]) -> [T; 2] {
        self.inverse_metric(p).apply(xi)
    }

    /// Metric dual of a vector, xi_mu = g_{mu nu} v^nu.
    pub fn lower(&self, p: Point<T>, v: [T; 2]) -> [T; 2] {
        self.metric(p).apply(v)
    }

    /// Causal class of a covector by the sign of g^{mu nu} xi_mu xi_nu and
    /// the sign of xi(w).
    pub fn classify_covector(&self, cp: &CovectorPoint<T>) -> Result<CovectorClass, GeoError> {
        if !self.domain.contains(cp.base) {
            return Err(GeoError::Domain(format!(
                "base point ({}, {}) outside chart",
                cp.base[0].as_f64(),
                cp.base[1].as_f64()
            )));
        }
        let xi = cp.xi;
        if xi[0] == T::zero() && xi[1] == T::zero() {
            return Err(GeoError::DegenerateDirection);
        }
        // Scale-invariant classification: normalize by |xi|^2.
        let ginv = self.inverse_metric(cp.base);
        let norm2 = xi[0] * xi[0] + xi[1] * xi[1];
        let q = ginv.pair(xi, xi) / norm2;
        let xw = (xi[0] * self.orientation[0] + xi[1] * self.orientation[1]) / norm2.sqrt();
        let null_tol = T::lit(self.tol.null_tol);
        if q.abs() <= null_tol {
            if xw.abs() <= null_tol {
                return Err(GeoError::DegenerateDirection);
            }
            Ok(if xw > T::zero() {
                CovectorClass::NullFuture
            } else {
                CovectorClass::NullPast
            })
        } else if q > T::zero() {
            if xw.abs() <= null_tol {
                return Err(GeoError::DegenerateDirection);
            }
            Ok(if xw > T::zero() {
                CovectorClass::TimelikeFuture
            } else {
                CovectorClass::TimelikePast
            })
        } else {
            Ok(CovectorClass::Spacelike)
        }
    }

    /// The two null slopes w at p: null vectors are spanned by (1, w+-).
    pub fn null_slopes(&self, p: Point<T>) -> Result<(T, T), GeoError> {
        let g = self.metric(p);
        // g_tt + 2 g_tx w + g_xx w^2 = 0
        let disc = g.tx * g.tx - g.tt * g.xx;
        if disc <= T::zero() || g.xx == T::zero() {
            return Err(GeoError::NonLorentzian(p[0].as_f64(), p[1].as_f64()));
        }
        let sq = disc.sqrt();
        Ok(((-g.tx + sq) / g.xx, (-g.tx - sq) / g.xx))
    }

    /// Validate the Lorentzian-signature and orientation invariants on a
    /// coarse sample grid of the chart.
    pub fn validate(&self, samples_per_axis: usize) -> Result<(), GeoError> {
        let n = samples_per_axis.max(2);
        for i in 0..n {
            for j in 0..n {
                let fi = T::lit((i as f64 + 0.5) / n as f64);
                let fj = T::lit((j as f64 + 0.5) / n as f64);
                let p = [
                    self.domain.t_range.0 + (self.domain.t_range.1 - self.domain.t_range.0) * fi,
                    self.domain.x_range.0 + (self.domain.x_range.1 - self.domain.x_range.0) * fj,
                ];
                let g = self.metric(p);
                if !(g.det() < T::zero()) {
                    return Err(GeoError::NonLorentzian(p[0].as_f64(), p[1].as_f64()));
                }
                if !(g.pair(self.orientation, self.orientation) > T::zero()) {
                    return Err(GeoError::NonLorentzian(p[0].as_f64(), p[1].as_f64()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mink() -> SpacetimeModel<f64> {
        SpacetimeModel::minkowski(ChartDomain::symmetric(2.0, 2.0))
    }

    #[test]
    fn classify_covector_signature_arithmetic() {
        let m = mink();
        let c = |xi| m.classify_covector(&CovectorPoint::new([0.0, 0.0], xi)).unwrap();
        assert_eq!(c([1.0, 1.0]), CovectorClass::NullFuture);
        assert_eq!(c([1.0, 0.0]), CovectorClass::TimelikeFuture);
        assert_eq!(c([0.0, 1.0]), CovectorClass::Spacelike);
        assert_eq!(c([-2.0, 2.0]), CovectorClass::NullPast);
        assert_eq!(c([-3.0, 1.0]), CovectorClass::TimelikePast);
    }

    #[test]
    fn classify_rejects_zero_and_outside() {
        let m = mink();
        assert_eq!(
            m.classify_covector(&CovectorPoint::new([0.0, 0.0], [0.0, 0.0])),
            Err(GeoError::DegenerateDirection)
        );
        assert!(matches!(
            m.classify_covector(&CovectorPoint::new([5.0, 0.0], [1.0, 0.0])),
            Err(GeoError::Domain(_))
        ));
    }

    #[test]
    fn classification_is_scale_invariant() {
        let m = mink();
        for &xi in &[[1.0, 1.0], [1.0, 0.3], [0.2, 1.0], [-1.0, 0.9]] {
            let a = m.classify_covector(&CovectorPoint::new([0.0, 0.0], xi)).unwrap();
            let big = m
                .classify_covector(&CovectorPoint::new([0.0, 0.0], [xi[0] * 1e7, xi[1] * 1e7]))
                .unwrap();
            assert_eq!(a, big);
        }
    }

    #[test]
    fn conformal_christoffels_match_general_fd() {
        let o2 = Expr::parse("exp(2*t)").unwrap();
        let cm = SpacetimeModel::conformally_flat(o2.clone(), ChartDomain::symmetric(2.0, 2.0));
        let gm = SpacetimeModel::general(
            Arc::new(move |p: [f64; 2]| {
                let v = o2.eval(p[0], p[1]);
                Metric2 {
                    tt: v,
                    tx: 0.0,
                    xx: -v,
                }
            }),
            ChartDomain::symmetric(2.0, 2.0),
        );
        let p = [0.3, -0.4];
        let a = cm.christoffel(p);
        let b = gm.christoffel(p);
        for l in 0..2 {
            for m in 0..2 {
                for n in 0..2 {
                    assert!(
                        (a[l][m][n] - b[l][m][n]).abs() < 1e-8,
                        "Gamma^{l}_{m}{n}: {} vs {}",
                        a[l][m][n],
                        b[l][m][n]
                    );
                }
            }
        }
    }

    #[test]
    fn null_slopes_minkowski() {
        let m = mink();
        let (a, b) = m.null_slopes([0.0, 0.0]).unwrap();
        let mut s = [a, b];
        s.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert!((s[0] + 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validate_accepts_standard_models() {
        assert!(mink().validate(5).is_ok());
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(1.5, 1.5),
        );
        assert!(cm.validate(5).is_ok());
    }
}
