//! Geodesic boundary value problem by shooting: null connectors via the two
//! null rays (and their reverses) at the start point, free connectors via an
//! angle scan with bisection on the signed miss distance.

use super::geodesic::{geodesic_ivp, CausalClass, GeodesicSegment};
use super::{GeoError, Point, SpacetimeModel};
use crate::scalar::Real;

/// Connectors found by the shooting search, plus non-convergence warnings.
/// Empty-with-warning distinguishes "search failed" from "no connector".
#[derive(Clone, Debug)]
pub struct BvpOutcome<T> {
    pub connectors: Vec<GeodesicSegment<T>>,
    pub warnings: Vec<String>,
}

/// Closest approach of the (Hermite-interpolated) segment to `q`:
/// returns (parameter offset from segment start, squared distance).
fn closest_approach<T: Real>(seg: &GeodesicSegment<T>, q: Point<T>) -> (T, T) {
    let d2 = |p: Point<T>| {
        let dt = p[0] - q[0];
        let dx = p[1] - q[1];
        dt * dt + dx * dx
    };
    let mut best_i = 0usize;
    let mut best = d2(seg.points[0]);
    for (i, p) in seg.points.iter().enumerate() {
        let v = d2(*p);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement on the bracketing intervals around best_i.
    let lo_i = best_i.saturating_sub(1);
    let hi_i = (best_i + 1).min(seg.points.len() - 1);
    let mut a = T::zero();
    let mut b = T::lit((hi_i - lo_i) as f64);
    let eval = |u: T| -> T {
        let iu = u.as_f64().floor().min((hi_i - lo_i) as f64 - 1.0).max(0.0);
        let (pos, _) = seg.hermite(lo_i + iu as usize, u - T::lit(iu));
        d2(pos)
    };
    let phi = T::lit(0.618_033_988_749_894_9);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
        }
    }
    let u = (a + b) * T::lit(0.5);
    let s = seg.step * (T::lit(lo_i as f64) + u);
    (s, eval(u))
}

fn unit<T: Real>(v: [T; 2]) -> [T; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}

/// Shooting search for geodesics from `p` to `q`.
///
/// With `constraint = Some(Null)` only the (up to four) null rays at `p` are
/// integrated; other constraints filter the free angle-scan results by
/// causal class.
pub fn geodesic_bvp<T: Real>(
    model: &SpacetimeModel<T>,
    p: Point<T>,
    q: Point<T>,
    constraint: Option<CausalClass>,
) -> Result<BvpOutcome<T>, GeoError> {
    if !model.domain.contains(p) || !model.domain.contains(q) {
        return Err(GeoError::Domain("endpoint outside chart".into()));
    }
    let mut out = BvpOutcome {
        connectors: Vec::new(),
        warnings: Vec::new(),
    };
    let sep = ((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1])).sqrt();
    if sep.as_f64() < 1e-14 {
        out.warnings
            .push("coincident endpoints: degenerate connector not searched".into());
        return Ok(out);
    }
    let s_max = model.domain.diameter() * T::lit(2.5);
    let bvp_tol = T::lit(model.tol.bvp_tol);

    if constraint == Some(CausalClass::Null) {
        let (w_plus, w_minus) = model.null_slopes(p)?;
        let rays = [
            unit([T::one(), w_plus]),
            unit([T::one(), w_minus]),
            unit([-T::one(), -w_plus]),
            unit([-T::one(), -w_minus]),
        ];
        for ray in rays {
            match try_ray(model, p, q, ray, s_max, bvp_tol) {
                Ok(Some(seg)) => out.connectors.push(seg),
                Ok(None) => {}
                Err(w) => out.warnings.push(w),
            }
        }
        return Ok(out);
    }

    // Free search: coarse angle grid; candidate roots come from sign changes
    // of the signed miss and from local minima of the plain distance (which
    // catch roots landing exactly on a grid angle).
    let n_angles = 96usize;
    let miss = |phi: T| -> (T, T) {
        let v = [phi.cos(), phi.sin()];
        match geodesic_ivp(model, p, v, (T::zero(), s_max)) {
            Ok(seg) => {
                let (s_star, d2) = closest_approach(&seg, q);
                let dist = d2.sqrt();
                // Closest approach essentially at the start point means the
                // ray points away from q; its side sign is meaningless.
                if s_star <= seg.step * T::lit(0.5) && dist > bvp_tol * T::lit(10.0) {
                    return (T::nan(), T::nan());
                }
                let i = ((s_star / seg.step).as_f64().floor() as usize)
                    .min(seg.points.len() - 2);
                let u = s_star / seg.step - T::lit(i as f64);
                let (pos, tan) = seg.hermite(i, u);
                let cross = tan[0] * (q[1] - pos[1]) - tan[1] * (q[0] - pos[0]);
                (
                    if cross >= T::zero() { dist } else { -dist },
                    dist,
                )
            }
            Err(_) => (T::nan(), T::nan()),
        }
    };
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let grid: Vec<(T, T, T)> = (0..n_angles)
        .map(|i| {
            let phi = two_pi * T::lit(i as f64 / n_angles as f64);
            let (signed, dist) = miss(phi);
            (phi, signed, dist)
        })
        .collect();

    let mut candidates: Vec<T> = Vec::new();
    for i in 0..n_angles {
        let (phi_a, sa, da) = grid[i];
        let (phi_b, sb, _) = grid[(i + 1) % n_angles];
        let phi_b = if i + 1 == n_angles { phi_b + two_pi } else { phi_b };
        if !sa.is_nan() && !sb.is_nan() && (sa <= T::zero()) != (sb <= T::zero()) {
            // Bisection on the signed miss.
            let mut lo = phi_a;
            let mut hi = phi_b;
            let mut flo = sa;
            for _ in 0..64 {
                let mid = (lo + hi) * T::lit(0.5);
                let (fm, _) = miss(mid);
                if fm.is_nan() {
                    break;
                }
                if (flo <= T::zero()) == (fm <= T::zero()) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            candidates.push((lo + hi) * T::lit(0.5));
        }
        // Local distance minimum below a coarse threshold.
        let d_prev = grid[(i + n_angles - 1) % n_angles].2;
        let d_next = grid[(i + 1) % n_angles].2;
        let coarse = model.domain.diameter() * T::lit(0.05);
        if !da.is_nan() && da < coarse && da <= d_prev && da <= d_next {
            // Golden-section refinement of dist(phi) around the minimum.
            let phi_lo = phi_a - two_pi / T::lit(n_angles as f64);
            let phi_hi = phi_a + two_pi / T::lit(n_angles as f64);
            let gold = T::lit(0.618_033_988_749_894_9);
            let mut a = phi_lo;
            let mut b = phi_hi;
            let mut c = b - gold * (b - a);
            let mut d = a + gold * (b - a);
            let mut fc = miss(c).1;
            let mut fd = miss(d).1;
            for _ in 0..40 {
                if fc.is_nan() || fd.is_nan() {
                    break;
                }
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gold * (b - a);
                    fc = miss(c).1;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gold * (b - a);
                    fd = miss(d).1;
                }
            }
            candidates.push((a + b) * T::lit(0.5));
        }
    }

    for phi_root in candidates {
        let v = [phi_root.cos(), phi_root.sin()];
        match try_ray(model, p, q, v, s_max, bvp_tol) {
            Ok(Some(seg)) => {
                let keep = match constraint {
                    None => true,
                    Some(cls) => seg.causal_class == cls,
                };
                let dup = out.connectors.iter().any(|c| {
                    let a = c.start_tangent();
                    let cosang =
                        (a[0] * v[0] + a[1] * v[1]) / ((a[0] * a[0] + a[1] * a[1]).sqrt());
                    (cosang - T::one()).abs().as_f64() < 1e-9
                });
                if keep && !dup {
                    out.connectors.push(seg);
                }
            }
            Ok(None) => out.warnings.push(format!(
                "candidate near angle {:.6} did not converge to a connector",
                phi_root.as_f64()
            )),
            Err(w) => out.warnings.push(w),
        }
    }
    Ok(out)
}

/// Integrate one ray and, if it passes within tolerance of q, return the
/// connector cut at the closest approach.
fn try_ray<T: Real>(
    model: &SpacetimeModel<T>,
    p: Point<T>,
    q: Point<T>,
    v: [T; 2],
    s_max: T,
    bvp_tol: T,
) -> Result<Option<GeodesicSegment<T>>, String> {
    let seg = match geodesic_ivp(model, p, v, (T::zero(), s_max)) {
        Ok(s) => s,
        Err(e) => return Err(format!("ray integration failed: {e}")),
    };
    let (s_star, d2) = closest_approach(&seg, q);
    let dist = d2.sqrt();
    if dist <= bvp_tol {
        if s_star <= seg.step {
            return Err("connector collapses to the start point".into());
        }
        match geodesic_ivp(model, p, v, (T::zero(), s_star)) {
            Ok(conn) => Ok(Some(conn)),
            Err(e) => Err(format!("connector re-integration failed: {e}")),
        }
    } else if dist <= bvp_tol * T::lit(10.0) {
        Err(format!(
            "near miss: closest approach {:.3e} above tolerance",
            dist.as_f64()
        ))
    } else {
        Ok(None)
    }
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
    fn null_connector_along_lightray() {
        let m = mink();
        let out = geodesic_bvp(&m, [0.0, 0.0], [1.0, 1.0], Some(CausalClass::Null)).unwrap();
        assert_eq!(out.connectors.len(), 1, "warnings: {:?}", out.warnings);
        let seg = &out.connectors[0];
        let end = seg.end();
        assert!((end[0] - 1.0).abs() < 1e-6 && (end[1] - 1.0).abs() < 1e-6);
        let v = seg.start_tangent();
        assert!((v[0] - v[1]).abs() < 1e-9, "direction not (1,1): {v:?}");
    }

    #[test]
    fn spacelike_pair_has_no_null_connector() {
        let m = mink();
        let out = geodesic_bvp(&m, [0.0, 0.0], [0.0, 1.0], Some(CausalClass::Null)).unwrap();
        assert!(out.connectors.is_empty());
        assert!(out.warnings.is_empty(), "clean miss expected");
    }

    #[test]
    fn timelike_straight_connector_found() {
        let m = mink();
        let out = geodesic_bvp(&m, [0.0, 0.0], [2.0, 1.0], None).unwrap();
        assert!(
            out.connectors
                .iter()
                .any(|c| c.causal_class == CausalClass::Timelike),
            "no timelike connector among {}",
            out.connectors.len()
        );
        let c = out
            .connectors
            .iter()
            .find(|c| c.causal_class == CausalClass::Timelike)
            .unwrap();
        let end = c.end();
        assert!((end[0] - 2.0).abs() < 1e-6 && (end[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn conformal_null_connector_matches_flat_image() {
        let cm = SpacetimeModel::<f64>::conformally_flat(
            Expr::parse("exp(2*t)").unwrap(),
            ChartDomain::symmetric(3.0, 3.0),
        );
        let out = geodesic_bvp(&cm, [-0.5, -0.5], [0.7, 0.7], Some(CausalClass::Null)).unwrap();
        assert_eq!(out.connectors.len(), 1, "warnings: {:?}", out.warnings);
        let end = out.connectors[0].end();
        assert!((end[0] - 0.7).abs() < 1e-6 && (end[1] - 0.7).abs() < 1e-6);
    }
}
