//! Parallel transport of covectors along sampled geodesics:
//! d xi_mu / ds = Gamma^lam_{mu nu} gamma'^nu xi_lam, integrated by RK4 with
//! Hermite interpolation of the carrier curve at half steps.

use super::geodesic::GeodesicSegment;
use super::{GeoError, SpacetimeModel};
use crate::scalar::Real;

fn transport_rhs<T: Real>(
    model: &SpacetimeModel<T>,
    p: [T; 2],
    v: [T; 2],
    xi: [T; 2],
) -> [T; 2] {
    let gamma = model.christoffel(p);
    let mut out = [T::zero(); 2];
    for mu in 0..2 {
        let mut s = T::zero();
        for l in 0..2 {
            for n in 0..2 {
                s = s + gamma[l][mu][n] * v[n] * xi[l];
            }
        }
        out[mu] = s;
    }
    out
}

/// Transport `xi` from the start of `segment` to its end.
pub fn parallel_transport<T: Real>(
    model: &SpacetimeModel<T>,
    segment: &GeodesicSegment<T>,
    xi: [T; 2],
) -> Result<[T; 2], GeoError> {
    if model.is_flat() {
        return Ok(xi);
    }
    let n = segment.points.len();
    let h = segment.step;
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    let two = T::lit(2.0);
    let mut cur = xi;
    for i in 0..n - 1 {
        let p0 = segment.points[i];
        let v0 = segment.tangents[i];
        let (pm, vm) = segment.hermite(i, half);
        let p1 = segment.points[i + 1];
        let v1 = segment.tangents[i + 1];
        let k1 = transport_rhs(model, p0, v0, cur);
        let y2 = [cur[0] + half * h * k1[0], cur[1] + half * h * k1[1]];
        let k2 = transport_rhs(model, pm, vm, y2);
        let y3 = [cur[0] + half * h * k2[0], cur[1] + half * h * k2[1]];
        let k3 = transport_rhs(model, pm, vm, y3);
        let y4 = [cur[0] + h * k3[0], cur[1] + h * k3[1]];
        let k4 = transport_rhs(model, p1, v1, y4);
        for d in 0..2 {
            cur[d] = cur[d] + h * sixth * (k1[d] + two * k2[d] + two * k3[d] + k4[d]);
        }
        if !cur[0].is_finite() || !cur[1].is_finite() {
            return Err(GeoError::IntegrationFailure(
                "transport state became non-finite".into(),
            ));
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::Expr;
    use crate::geometry::{geodesic_ivp, ChartDomain, SpacetimeModel};

    #[test]
    fn flat_transport_is_identity() {
        let m = SpacetimeModel::<f64>::minkowski(ChartDomain::symmetric(3.0, 3.0));
        let seg = geodesic_ivp(&m, [0.0, 0.0], [1.0, 0.2], (0.0, 1.0)).unwrap();
        let out = parallel_transport(&m, &seg, [1.0, 1.0]).unwrap();
        assert_eq!(out, [1.0, 1.0]);
    }

    #[test]
    fn transport_preserves_covector_norm() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let seg = geodesic_ivp(&cm, [-0.3, 0.1], [1.0, 0.4], (0.0, 1.2)).unwrap();
        for &xi in &[[1.0, -1.0], [0.5, 0.25], [0.0, 1.0]] {
            let start_norm = cm.inverse_metric(seg.start()).pair(xi, xi);
            let out = parallel_transport(&cm, &seg, xi).unwrap();
            let end_norm = cm.inverse_metric(seg.end()).pair(out, out);
            assert!(
                (start_norm - end_norm).abs() < 1e-8,
                "norm drift {start_norm} -> {end_norm}"
            );
        }
    }

    #[test]
    fn round_trip_returns_original() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t) + 0.3*x*x").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let seg = geodesic_ivp(&cm, [0.2, -0.1], [1.0, 0.7], (0.0, 0.9)).unwrap();
        let xi = [0.8, -0.35];
        let there = parallel_transport(&cm, &seg, xi).unwrap();
        let back = parallel_transport(&cm, &seg.reversed(), there).unwrap();
        assert!(
            (back[0] - xi[0]).abs() < 2e-8 && (back[1] - xi[1]).abs() < 2e-8,
            "round trip {back:?}"
        );
    }

    #[test]
    fn null_covector_stays_null_vs_fine_reintegration() {
        // Oracle: transport on a 10x finer sampling of the same geodesic.
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let coarse = geodesic_ivp(&cm, [-0.5, -0.5], [1.0, 1.0], (0.0, 1.4)).unwrap();
        let mut fine_model = cm.clone();
        fine_model.tol.step /= 10.0;
        let fine = geodesic_ivp(&fine_model, [-0.5, -0.5], [1.0, 1.0], (0.0, 1.4)).unwrap();
        // Start covector: dual of the null tangent.
        let xi = cm.lower([-0.5, -0.5], [1.0, 1.0]);
        let a = parallel_transport(&cm, &coarse, xi).unwrap();
        let b = parallel_transport(&fine_model, &fine, xi).unwrap();
        assert!(
            (a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8,
            "coarse {a:?} vs fine {b:?}"
        );
        let q = cm.inverse_metric(coarse.end()).pair(a, a);
        assert!(q.abs() < 1e-8, "transported covector not null: {q}");
    }
}
