//! Geodesic initial value problem: fixed-step RK4 on the first-order system
//! (gamma, gamma') with gamma'' = -Gamma(gamma)(gamma', gamma'), plus the
//! finite-difference residual check used by the segment invariant.

use super::{GeoError, Point, SpacetimeModel};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
    Mixed,
}

/// A sampled affine geodesic.
#[derive(Clone, Debug)]
pub struct GeodesicSegment<T> {
    /// Affine parameter of the first sample.
    pub s_start: T,
    /// Uniform parameter step between samples.
    pub step: T,
    pub points: Vec<Point<T>>,
    pub tangents: Vec<[T; 2]>,
    pub affine: bool,
    pub causal_class: CausalClass,
    /// True when the curve left the chart domain and was cut short.
    pub truncated: bool,
}

impl<T: Real> GeodesicSegment<T> {
    pub fn s_end(&self) -> T {
        self.s_start + self.step * T::lit((self.points.len() - 1) as f64)
    }

    pub fn start(&self) -> Point<T> {
        self.points[0]
    }

    pub fn end(&self) -> Point<T> {
        *self.points.last().unwrap()
    }

    pub fn start_tangent(&self) -> [T; 2] {
        self.tangents[0]
    }

    pub fn end_tangent(&self) -> [T; 2] {
        *self.tangents.last().unwrap()
    }

    /// Cubic Hermite interpolation of the curve and its tangent at
    /// parameter fraction `u` within sample interval `i`.
    pub fn hermite(&self, i: usize, u: T) -> (Point<T>, [T; 2]) {
        let h = self.step;
        let p0 = self.points[i];
        let p1 = self.points[i + 1];
        let v0 = self.tangents[i];
        let v1 = self.tangents[i + 1];
        let u2 = u * u;
        let u3 = u2 * u;
        let c3 = T::lit(3.0);
        let c2 = T::lit(2.0);
        let mut pos = [T::zero(); 2];
        let mut tan = [T::zero(); 2];
        for d in 0..2 {
            let h00 = c2 * u3 - c3 * u2 + T::one();
            let h10 = u3 - c2 * u2 + u;
            let h01 = -c2 * u3 + c3 * u2;
            let h11 = u3 - u2;
            pos[d] = h00 * p0[d] + h10 * h * v0[d] + h01 * p1[d] + h11 * h * v1[d];
            let d00 = (T::lit(6.0) * u2 - T::lit(6.0) * u) / h;
            let d10 = c3 * u2 - T::lit(4.0) * u + T::one();
            let d01 = (-T::lit(6.0) * u2 + T::lit(6.0) * u) / h;
            let d11 = c3 * u2 - c2 * u;
            tan[d] = d00 * p0[d] + d10 * v0[d] + d01 * p1[d] + d11 * v1[d];
        }
        (pos, tan)
    }

    /// Reversed orientation: same point set, parameter and tangents flipped.
    pub fn reversed(&self) -> GeodesicSegment<T> {
        let mut points = self.points.clone();
        points.reverse();
        let mut tangents: Vec<[T; 2]> = self
            .tangents
            .iter()
            .map(|v| [-v[0], -v[1]])
            .collect();
        tangents.reverse();
        GeodesicSegment {
            s_start: -self.s_end(),
            step: self.step,
            points,
            tangents,
            affine: self.affine,
            causal_class: self.causal_class,
            truncated: self.truncated,
        }
    }
}

fn acceleration<T: Real>(model: &SpacetimeModel<T>, p: Point<T>, v: [T; 2]) -> [T; 2] {
    if model.is_flat() {
        return [T::zero(), T::zero()];
    }
    let gamma = model.christoffel(p);
    let mut a = [T::zero(); 2];
    for l in 0..2 {
        let mut s = T::zero();
        for m in 0..2 {
            for n in 0..2 {
                s = s + gamma[l][m][n] * v[m] * v[n];
            }
        }
        a[l] = -s;
    }
    a
}

/// Integrate the geodesic with initial data (start, velocity) over
/// `interval` in the affine parameter. The segment is truncated (with flag)
/// where the curve exits the chart domain.
pub fn geodesic_ivp<T: Real>(
    model: &SpacetimeModel<T>,
    start: Point<T>,
    velocity: [T; 2],
    interval: (T, T),
) -> Result<GeodesicSegment<T>, GeoError> {
    let (s0, s1) = interval;
    if !(s1 > s0) {
        return Err(GeoError::IntegrationFailure(
            "empty parameter interval".into(),
        ));
    }
    if !model.domain.contains(start) {
        return Err(GeoError::Domain("start point outside chart".into()));
    }
    let len = s1 - s0;
    let speed = (velocity[0] * velocity[0] + velocity[1] * velocity[1])
        .sqrt()
        .max(T::one());
    let n_steps = ((len * speed).as_f64() / model.tol.step).ceil().max(4.0) as usize;
    let h = len / T::lit(n_steps as f64);
    if h.as_f64() < 1e-12 {
        return Err(GeoError::IntegrationFailure("step-size underflow".into()));
    }

    let mut points = Vec::with_capacity(n_steps + 1);
    let mut tangents = Vec::with_capacity(n_steps + 1);
    let mut p = start;
    let mut v = velocity;
    points.push(p);
    tangents.push(v);
    let mut truncated = false;
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    let two = T::lit(2.0);
    for _ in 0..n_steps {
        let k1p = v;
        let k1v = acceleration(model, p, v);
        let p2 = [p[0] + half * h * k1p[0], p[1] + half * h * k1p[1]];
        let v2 = [v[0] + half * h * k1v[0], v[1] + half * h * k1v[1]];
        let k2p = v2;
        let k2v = acceleration(model, p2, v2);
        let p3 = [p[0] + half * h * k2p[0], p[1] + half * h * k2p[1]];
        let v3 = [v[0] + half * h * k2v[0], v[1] + half * h * k2v[1]];
        let k3p = v3;
        let k3v = acceleration(model, p3, v3);
        let p4 = [p[0] + h * k3p[0], p[1] + h * k3p[1]];
        let v4 = [v[0] + h * k3v[0], v[1] + h * k3v[1]];
        let k4p = v4;
        let k4v = acceleration(model, p4, v4);
        let mut pn = p;
        let mut vn = v;
        for d in 0..2 {
            pn[d] = p[d] + h * sixth * (k1p[d] + two * k2p[d] + two * k3p[d] + k4p[d]);
            vn[d] = v[d] + h * sixth * (k1v[d] + two * k2v[d] + two * k3v[d] + k4v[d]);
        }
        if !pn[0].is_finite() || !pn[1].is_finite() {
            return Err(GeoError::IntegrationFailure("state became non-finite".into()));
        }
        if !model.domain.contains(pn) {
            truncated = true;
            break;
        }
        p = pn;
        v = vn;
        points.push(p);
        tangents.push(v);
    }

    if points.len() < 2 {
        return Err(GeoError::IntegrationFailure(
            "curve exits chart within one step".into(),
        ));
    }

    let causal_class = classify_curve(model, &points, &tangents, model.tol.null_tol);
    Ok(GeodesicSegment {
        s_start: s0,
        step: h,
        points,
        tangents,
        affine: true,
        causal_class,
        truncated,
    })
}

fn classify_curve<T: Real>(
    model: &SpacetimeModel<T>,
    points: &[Point<T>],
    tangents: &[[T; 2]],
    null_tol: f64,
) -> CausalClass {
    let mut seen_t = false;
    let mut seen_n = false;
    let mut seen_s = false;
    for (p, v) in points.iter().zip(tangents.iter()) {
        let q = model.metric(*p).pair(*v, *v);
        let n2 = v[0] * v[0] + v[1] * v[1];
        let qn = q / n2.max(T::lit(1e-300));
        if qn.abs().as_f64() <= null_tol * 10.0 {
            seen_n = true;
        } else if qn > T::zero() {
            seen_t = true;
        } else {
            seen_s = true;
        }
    }
    match (seen_t, seen_n, seen_s) {
        (true, false, false) => CausalClass::Timelike,
        (false, true, false) => CausalClass::Null,
        (false, false, true) => CausalClass::Spacelike,
        _ => CausalClass::Mixed,
    }
}

/// Max geodesic-equation residual over interior samples: 4th-order central
/// finite-difference acceleration plus the Christoffel contraction.
pub fn geodesic_residual<T: Real>(model: &SpacetimeModel<T>, seg: &GeodesicSegment<T>) -> T {
    let n = seg.points.len();
    if n < 5 {
        return T::zero();
    }
    let h2 = seg.step * seg.step;
    let mut worst = T::zero();
    for i in 2..n - 2 {
        let acc_true = acceleration(model, seg.points[i], seg.tangents[i]);
        for d in 0..2 {
            let fd = (-seg.points[i - 2][d] + T::lit(16.0) * seg.points[i - 1][d]
                - T::lit(30.0) * seg.points[i][d]
                + T::lit(16.0) * seg.points[i + 1][d]
                - seg.points[i + 2][d])
                / (T::lit(12.0) * h2);
            let r = (fd - acc_true[d]).abs();
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::Expr;
    use crate::geometry::ChartDomain;

    fn mink() -> SpacetimeModel<f64> {
        SpacetimeModel::minkowski(ChartDomain::symmetric(3.0, 3.0))
    }

    #[test]
    fn flat_geodesics_are_straight_lines() {
        let m = mink();
        let seg = geodesic_ivp(&m, [0.0, 0.0], [1.0, 1.0], (0.0, 1.0)).unwrap();
        assert!(!seg.truncated);
        let end = seg.end();
        assert!((end[0] - 1.0).abs() < 1e-12 && (end[1] - 1.0).abs() < 1e-12);
        assert_eq!(seg.causal_class, CausalClass::Null);
        assert!(geodesic_residual(&m, &seg) < 1e-10);
    }

    #[test]
    fn trivial_conformal_factor_reduces_to_flat() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::constant(1.0),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let seg = geodesic_ivp(&cm, [0.1, -0.2], [1.0, 0.5], (0.0, 1.5)).unwrap();
        let end = seg.end();
        assert!((end[0] - 1.6).abs() < 1e-8 && (end[1] - 0.55).abs() < 1e-8);
        assert!(geodesic_residual(&cm, &seg) < 1e-8);
    }

    #[test]
    fn desitter_patch_null_geodesic_stays_null() {
        // Omega^2 = e^{2t}: null geodesics are straight as point sets; the
        // affine parametrization changes but g(gamma', gamma') stays ~0.
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let seg = geodesic_ivp(&cm, [-0.5, -0.5], [1.0, 1.0], (0.0, 2.0)).unwrap();
        assert!(geodesic_residual(&cm, &seg) < 1e-8, "residual too large");
        for (p, v) in seg.points.iter().zip(seg.tangents.iter()) {
            let q = cm.metric(*p).pair(*v, *v) / (v[0] * v[0] + v[1] * v[1]);
            assert!(q.abs() < 1e-8, "null norm drifted: {q}");
            assert!((p[0] - p[1] - 0.0).abs() < 1e-8, "left the null line");
        }
        assert_eq!(seg.causal_class, CausalClass::Null);
    }

    #[test]
    fn truncation_at_chart_boundary_is_flagged() {
        let m = mink();
        let seg = geodesic_ivp(&m, [0.0, 0.0], [0.0, 1.0], (0.0, 10.0)).unwrap();
        assert!(seg.truncated);
        assert!(seg.end()[1] <= 3.0);
    }

    #[test]
    fn hermite_interpolation_matches_curve() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let coarse = geodesic_ivp(&cm, [0.0, 0.0], [1.0, 0.3], (0.0, 1.0)).unwrap();
        // Compare mid-interval Hermite values against a fine re-integration.
        let i = coarse.points.len() / 2;
        let (pos, _) = coarse.hermite(i, 0.5);
        let s_mid = coarse.step * (i as f64 + 0.5);
        let fine = {
            let mut m2 = cm.clone();
            m2.tol.step /= 16.0;
            geodesic_ivp(&m2, [0.0, 0.0], [1.0, 0.3], (0.0, s_mid)).unwrap()
        };
        let end = fine.end();
        assert!(
            (pos[0] - end[0]).abs() < 1e-9 && (pos[1] - end[1]).abs() < 1e-9,
            "hermite {pos:?} vs fine {end:?}"
        );
    }
}
