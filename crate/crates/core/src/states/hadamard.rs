//! Hadamard verdict: scan a state's two-point kernel and compare the
//! conclusive singular set against the predicted null-related,
//! frequency-asymmetric wavefront form
//!
//! ```text
//! { (q, xi; q', xi') in N- x N+ : (q, xi) ~ (q', -xi') }.
//! ```

use crate::geometry::{related_by_tilde, CovectorPoint, SpacetimeModel};
use crate::ladder::Verdict;
use crate::microlocal::{estimate_wavefront2, ScanConfig, SpectrumReport};
use crate::scalar::Real;
use crate::states::QuasifreeState;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HadamardOutcome {
    HadamardConsistent,
    NotHadamard,
    InsufficientResolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct HadamardVerdict {
    pub outcome: HadamardOutcome,
    /// Per grid entry: does it lie in the predicted singular set?
    pub predicted: Vec<bool>,
    pub detected_predicted: usize,
    pub offending_entries: Vec<usize>,
    pub report: SpectrumReport,
}

/// Angular distance between two 2d directions, in degrees.
fn angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1]).sqrt();
    let c = ((a[0] * b[0] + a[1] * b[1]) / (na * nb)).clamp(-1.0, 1.0);
    c.acos().to_degrees()
}

/// Snap a direction to the nearest null covector direction at `p`, or None
/// when it is more than `ang_tol` degrees away.
fn snap_to_null<T: Real>(
    model: &SpacetimeModel<T>,
    p: &[T],
    xi: &[f64],
    ang_tol: f64,
) -> Option<[f64; 2]> {
    let (w_plus, w_minus) = model.null_slopes([p[0], p[1]]).ok()?;
    // Null covectors are duals of null vectors: for v = (1, w) the dual is
    // g(v, .) which in 2d spans the covector branch; enumerate both branches
    // and both signs.
    let g = model.metric([p[0], p[1]]);
    let mut best: Option<[f64; 2]> = None;
    let mut best_angle = ang_tol;
    for w in [w_plus, w_minus] {
        let v = [T::one(), w];
        let dual = g.apply(v);
        for sign in [1.0, -1.0] {
            let cand = [sign * dual[0].as_f64(), sign * dual[1].as_f64()];
            let ang = angle_deg(xi, &cand);
            if ang <= best_angle {
                best_angle = ang;
                best = Some(cand);
            }
        }
    }
    best
}

/// Membership of a scan entry in the predicted Hadamard wavefront set, up to
/// `ang_tol` degrees on each covector.
pub fn hadamard_predicted<T: Real>(
    model: &SpacetimeModel<T>,
    points: &[Vec<f64>],
    xis: &[Vec<f64>],
    ang_tol: f64,
) -> bool {
    let p1: Vec<T> = points[0].iter().map(|&v| T::lit(v)).collect();
    let p2: Vec<T> = points[1].iter().map(|&v| T::lit(v)).collect();
    let xi1 = snap_to_null(model, &p1, &xis[0], ang_tol);
    let xi2 = snap_to_null(model, &p2, &xis[1], ang_tol);
    let (Some(xi1), Some(xi2)) = (xi1, xi2) else {
        return false;
    };
    // Orientation: first slot past-directed, second future-directed.
    let w = model.orientation;
    let xw1 = xi1[0] * w[0].as_f64() + xi1[1] * w[1].as_f64();
    let xw2 = xi2[0] * w[0].as_f64() + xi2[1] * w[1].as_f64();
    if !(xw1 < 0.0 && xw2 > 0.0) {
        return false;
    }
    let a = CovectorPoint::new([p1[0], p1[1]], [T::lit(xi1[0]), T::lit(xi1[1])]);
    let b = CovectorPoint::new([p2[0], p2[1]], [T::lit(-xi2[0]), T::lit(-xi2[1])]);
    related_by_tilde(model, &a, &b).unwrap_or(false)
}

/// Run the arity-2 scanner on the state's two-point kernel and compare
/// against the predicted set.
pub fn hadamard_verdict<T: Real>(
    state: &QuasifreeState<T>,
    model: &SpacetimeModel<T>,
    point_pairs: &[(Vec<T>, Vec<T>)],
    dir_pairs: &[(Vec<T>, Vec<T>)],
    cfg: &ScanConfig,
    ang_tol: f64,
) -> Result<HadamardVerdict, crate::kernels::KernelError> {
    let kernel = state.kernel();
    let report = estimate_wavefront2(&kernel, point_pairs, dir_pairs, cfg)?;
    let predicted: Vec<bool> = report
        .entries
        .iter()
        .map(|e| hadamard_predicted(model, &e.points, &e.xis, ang_tol))
        .collect();

    let n = report.entries.len();
    let inconclusive = report.inconclusive_count;
    if inconclusive * 2 > n {
        return Ok(HadamardVerdict {
            outcome: HadamardOutcome::InsufficientResolution,
            predicted,
            detected_predicted: 0,
            offending_entries: vec![],
            report,
        });
    }

    let mut offending = Vec::new();
    let mut detected = 0usize;
    for (i, e) in report.entries.iter().enumerate() {
        match e.verdict {
            Verdict::Singular if !predicted[i] => offending.push(i),
            Verdict::Singular => detected += 1,
            Verdict::Regular if predicted[i] => offending.push(i),
            _ => {}
        }
    }
    let outcome = if offending.is_empty() {
        HadamardOutcome::HadamardConsistent
    } else {
        HadamardOutcome::NotHadamard
    };
    Ok(HadamardVerdict {
        outcome,
        predicted,
        detected_predicted: detected,
        offending_entries: offending,
        report,
    })
}
