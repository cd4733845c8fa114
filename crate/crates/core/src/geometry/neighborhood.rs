//! Exponential-map scaling of neighborhoods: the image of a ball descriptor
//! under exp_p( lambda^mu exp_p^{-1}(.) ).

use super::bvp::geodesic_bvp;
use super::geodesic::geodesic_ivp;
use super::{GeoError, Point, SpacetimeModel};
use crate::scalar::Real;

/// Neighborhood descriptor: for flat models an ordinary coordinate ball;
/// for curved models the radius is measured in the exponential chart of the
/// scaling point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball<T> {
    pub center: Point<T>,
    pub radius: T,
}

impl<T: Real> Ball<T> {
    pub fn new(center: Point<T>, radius: T) -> Self {
        Ball { center, radius }
    }
}

/// Shrink `ball` by lambda^mu through the exponential chart at `p`. For the
/// flat model this is exactly p + lambda^mu (ball - p).
pub fn scaled_neighborhood<T: Real>(
    model: &SpacetimeModel<T>,
    p: Point<T>,
    ball: &Ball<T>,
    lambda: T,
    mu: T,
) -> Result<Ball<T>, GeoError> {
    if !model.domain.contains(p) || !model.domain.contains(ball.center) {
        return Err(GeoError::Domain("neighborhood outside chart".into()));
    }
    if lambda <= T::zero() {
        return Err(GeoError::Domain("scale must be positive".into()));
    }
    // mu = 0 leaves the neighborhood untouched for every lambda.
    if mu == T::zero() || lambda == T::one() {
        return Ok(*ball);
    }
    let factor = lambda.powf(mu);

    if model.is_flat() {
        return Ok(Ball {
            center: [
                p[0] + factor * (ball.center[0] - p[0]),
                p[1] + factor * (ball.center[1] - p[1]),
            ],
            radius: factor * ball.radius,
        });
    }

    // Curved model: pull the center back through exp_p, scale, push forward.
    let d2 = (ball.center[0] - p[0]) * (ball.center[0] - p[0])
        + (ball.center[1] - p[1]) * (ball.center[1] - p[1]);
    if d2.sqrt() <= T::lit(model.tol.bvp_tol) {
        return Ok(Ball {
            center: p,
            radius: factor * ball.radius,
        });
    }
    let out = geodesic_bvp(model, p, ball.center, None)?;
    if out.connectors.is_empty() {
        return Err(GeoError::Domain(format!(
            "center not reachable through exp_p ({} warnings)",
            out.warnings.len()
        )));
    }
    if out.connectors.len() > 1 {
        return Err(GeoError::Domain(
            "neighborhood escapes the injectivity domain of exp_p".into(),
        ));
    }
    let conn = &out.connectors[0];
    let v = conn.start_tangent();
    let s_len = conn.s_end() - conn.s_start;
    let scaled = geodesic_ivp(model, p, v, (T::zero(), factor * s_len))?;
    if scaled.truncated {
        return Err(GeoError::Domain("scaled image leaves the chart".into()));
    }
    Ok(Ball {
        center: scaled.end(),
        radius: factor * ball.radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::Expr;
    use crate::geometry::{ChartDomain, SpacetimeModel};

    fn mink() -> SpacetimeModel<f64> {
        SpacetimeModel::minkowski(ChartDomain::symmetric(3.0, 3.0))
    }

    #[test]
    fn flat_scaling_is_affine() {
        let m = mink();
        let ball = Ball::new([0.0, 0.0], 1.0);
        let out = scaled_neighborhood(&m, [0.0, 0.0], &ball, 0.25, 1.0).unwrap();
        assert_eq!(out, Ball::new([0.0, 0.0], 0.25));
        let off = Ball::new([1.0, 0.5], 0.3);
        let out2 = scaled_neighborhood(&m, [0.0, 0.0], &off, 0.5, 1.0).unwrap();
        assert_eq!(out2, Ball::new([0.5, 0.25], 0.15));
    }

    #[test]
    fn lambda_one_is_identity() {
        let m = mink();
        let ball = Ball::new([0.4, -0.2], 0.7);
        let out = scaled_neighborhood(&m, [0.0, 0.0], &ball, 1.0, 1.0).unwrap();
        assert_eq!(out, ball);
    }

    #[test]
    fn mu_zero_never_shrinks() {
        let m = mink();
        let ball = Ball::new([0.4, -0.2], 0.7);
        for lambda in [0.03125, 0.125, 0.5, 2.0] {
            let out = scaled_neighborhood(&m, [0.0, 0.0], &ball, lambda, 0.0).unwrap();
            assert_eq!(out, ball);
        }
    }

    #[test]
    fn fractional_degree_partial_shrink() {
        let m = mink();
        let ball = Ball::new([0.0, 0.0], 1.0);
        let out = scaled_neighborhood(&m, [0.0, 0.0], &ball, 0.25, 0.5).unwrap();
        assert!((out.radius - 0.5).abs() < 1e-14);
    }

    #[test]
    fn curved_model_scales_along_geodesic() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let ball = Ball::new([0.8, 0.0], 0.2);
        let out = scaled_neighborhood(&cm, [0.0, 0.0], &ball, 0.25, 1.0).unwrap();
        assert!((out.radius - 0.05).abs() < 1e-12);
        // The scaled center lies on the geodesic toward the original center,
        // between p and the center.
        assert!(out.center[0] > 0.0 && out.center[0] < 0.8);
        assert!(out.center[1].abs() < 1e-6);
    }
}
