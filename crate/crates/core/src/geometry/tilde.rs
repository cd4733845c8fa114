//! The lightlike-geodesic equivalence between covector points: two null
//! covectors are related when a null connector carries the dual of one as
//! its tangent and parallel transport maps one covector to the other.

use super::bvp::geodesic_bvp;
use super::geodesic::CausalClass;
use super::transport::parallel_transport;
use super::{CovectorPoint, GeoError, SpacetimeModel};
use crate::scalar::Real;

/// Normalize a null covector to |xi(w)| = 1, keeping its orientation.
fn orient_normalize<T: Real>(model: &SpacetimeModel<T>, xi: [T; 2]) -> Option<[T; 2]> {
    let s = xi[0] * model.orientation[0] + xi[1] * model.orientation[1];
    if s.abs() <= T::lit(1e-300) {
        return None;
    }
    let inv = T::one() / s.abs();
    Some([xi[0] * inv, xi[1] * inv])
}

fn close<T: Real>(a: [T; 2], b: [T; 2], tol: T) -> bool {
    (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
}

/// Parallel-or-not of two 2-vectors, returning the scale factor when the
/// residual of d - c u is below `tol` relative to |d|.
fn parallel_scale<T: Real>(d: [T; 2], u: [T; 2], tol: T) -> Option<T> {
    let uu = u[0] * u[0] + u[1] * u[1];
    if uu == T::zero() {
        return None;
    }
    let c = (d[0] * u[0] + d[1] * u[1]) / uu;
    let r0 = d[0] - c * u[0];
    let r1 = d[1] - c * u[1];
    let dn = (d[0] * d[0] + d[1] * d[1]).sqrt().max(T::lit(1e-300));
    if (r0 * r0 + r1 * r1).sqrt() <= tol * dn {
        Some(c)
    } else {
        None
    }
}

/// Decide (a ~ b): both covectors null, joined by a lightlike geodesic whose
/// tangent is dual to them (one common affine scale), with parallel
/// transport carrying one to the other. Coincident base points compare the
/// normalized covectors directly.
pub fn related_by_tilde<T: Real>(
    model: &SpacetimeModel<T>,
    a: &CovectorPoint<T>,
    b: &CovectorPoint<T>,
) -> Result<bool, GeoError> {
    let ca = model.classify_covector(a)?;
    let cb = model.classify_covector(b)?;
    if !ca.is_null() || !cb.is_null() {
        return Ok(false);
    }
    let tol = T::lit(model.tol.tilde_tol);
    let na = orient_normalize(model, a.xi).ok_or(GeoError::DegenerateDirection)?;
    let nb = orient_normalize(model, b.xi).ok_or(GeoError::DegenerateDirection)?;

    let sep = ((a.base[0] - b.base[0]) * (a.base[0] - b.base[0])
        + (a.base[1] - b.base[1]) * (a.base[1] - b.base[1]))
        .sqrt();
    if sep <= T::lit(model.tol.bvp_tol) {
        // Zero-length geodesic limit.
        return Ok(close(na, nb, tol));
    }

    let out = geodesic_bvp(model, a.base, b.base, Some(CausalClass::Null))?;
    let dual_a = model.raise(a.base, a.xi);
    for conn in &out.connectors {
        let u0 = conn.start_tangent();
        let c = match parallel_scale(dual_a, u0, tol) {
            Some(c) => c,
            None => continue,
        };
        if c == T::zero() {
            continue;
        }
        // Tangent duality at the far end, same parametrization scale sign.
        let dual_b = model.raise(b.base, b.xi);
        let c_end = match parallel_scale(dual_b, conn.end_tangent(), tol) {
            Some(c) => c,
            None => continue,
        };
        if (c > T::zero()) != (c_end > T::zero()) {
            continue;
        }
        // Transport consistency after orientation normalization.
        let moved = parallel_transport(model, conn, a.xi)?;
        let nm = match orient_normalize(model, moved) {
            Some(v) => v,
            None => continue,
        };
        if close(nm, nb, tol) {
            return Ok(true);
        }
    }
    Ok(false)
}
