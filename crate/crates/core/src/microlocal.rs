//! Numerical wavefront-set estimation: windowed Fourier transforms of
//! smearable kernels, directional dyadic decay ladders, spectrum reports and
//! the chart-covariance / operator-shrink consistency checks.

use crate::kernels::{DiffOp, KernelError, LinearMap, SmearableKernel};
use crate::ladder::{DecayLadder, LadderConfig, ScaleKind, Verdict};
use crate::scalar::{Cplx, Real};
use crate::testfn::TestFn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Compactly supported window: normalized bump profile around a center.
#[derive(Clone, Debug)]
pub struct Window<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Real> Window<T> {
    pub fn new(center: Vec<T>, radius: T) -> Self {
        Window { center, radius }
    }

    pub fn to_testfn(&self) -> TestFn<T> {
        match self.center.len() {
            1 => TestFn::bump_1d(self.center[0], self.radius, T::zero()),
            2 => TestFn::bump_2d(
                [self.center[0], self.center[1]],
                [self.radius, self.radius],
                [T::zero(), T::zero()],
            ),
            d => panic!("windows support dim 1 or 2, got {d}"),
        }
    }
}

/// Scanner configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    pub window_radius: f64,
    /// Adaptive shrink floor.
    pub window_min: f64,
    pub cone_half_angle_deg: f64,
    /// Rays in the cone net (1d ladders always use the single ray).
    pub cone_rays: usize,
    /// Rotation offsets (degrees) applied per slot in arity-2 ladders.
    pub pair_rot_net: Vec<f64>,
    pub ladder: LadderConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            window_radius: 0.3,
            window_min: 0.12,
            cone_half_angle_deg: 5.0,
            cone_rays: 16,
            pair_rot_net: vec![-2.5, 0.0, 2.5],
            ladder: LadderConfig::default(),
        }
    }
}

/// Fourier transform of the windowed kernel at frequency k:
/// pairing of v against x -> chi(x) e^{-i k.x}.
pub fn windowed_transform<T: Real>(
    v: &SmearableKernel<T>,
    window: &Window<T>,
    k: &[T],
) -> Result<Cplx<T>, KernelError> {
    let minus_k: Vec<T> = k.iter().map(|&ki| -ki).collect();
    let probe = window.to_testfn().modulate(&minus_k);
    v.pair1(&probe)
}

fn rotate<T: Real>(v: &[T], angle_rad: f64) -> Vec<T> {
    if v.len() == 1 {
        return v.to_vec();
    }
    let c = T::lit(angle_rad.cos());
    let s = T::lit(angle_rad.sin());
    vec![c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

fn normalize<T: Real>(v: &[T]) -> Vec<T> {
    let n = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    v.iter().map(|&x| x / n).collect()
}

/// Decay ladder of sup cone amplitudes along direction `khat` at `window`.
pub fn direction_ladder<T: Real>(
    v: &SmearableKernel<T>,
    window: &Window<T>,
    khat: &[T],
    cfg: &ScanConfig,
) -> Result<DecayLadder, KernelError> {
    let khat = normalize(khat);
    let rays: Vec<Vec<T>> = if khat.len() == 1 || cfg.cone_rays <= 1 {
        vec![khat.clone()]
    } else {
        let half = cfg.cone_half_angle_deg.to_radians();
        (0..cfg.cone_rays)
            .map(|i| {
                let a = -half + 2.0 * half * (i as f64) / ((cfg.cone_rays - 1) as f64);
                rotate(&khat, a)
            })
            .collect()
    };
    let scales = cfg.ladder.frequency_scales();
    let nb = cfg.ladder.band_samples.max(1);
    let mut amps = Vec::with_capacity(scales.len());
    for &r in &scales {
        let mut sup = T::zero();
        for i in 0..nb {
            let rb = r * 2f64.powf(i as f64 / nb as f64);
            for ray in &rays {
                let k: Vec<T> = ray.iter().map(|&d| d * T::lit(rb)).collect();
                let a = windowed_transform(v, window, &k)?.norm();
                if a > sup {
                    sup = a;
                }
            }
        }
        amps.push(sup.as_f64());
    }
    Ok(DecayLadder::fit(
        ScaleKind::Frequency,
        scales,
        amps,
        &cfg.ladder,
    ))
}

/// Joint two-slot ladder for bikernels with product windows and paired
/// frequencies (R xi, R xi').
pub fn pair_ladder<T: Real>(
    v: &SmearableKernel<T>,
    w1: &Window<T>,
    w2: &Window<T>,
    xi1: &[T],
    xi2: &[T],
    cfg: &ScanConfig,
) -> Result<DecayLadder, KernelError> {
    let xi1 = normalize(xi1);
    let xi2 = normalize(xi2);
    let chi1 = w1.to_testfn();
    let chi2 = w2.to_testfn();
    let scales = cfg.ladder.frequency_scales();
    // Joint rotation net: the zero offset plus single-slot tilts (a cross
    // pattern through the configured offsets).
    let mut net: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for &a in &cfg.pair_rot_net {
        if a != 0.0 {
            net.push((a, 0.0));
            net.push((0.0, a));
        }
    }
    let nb = cfg.ladder.band_samples.max(1);
    let mut amps = Vec::with_capacity(scales.len());
    for &r in &scales {
        let mut sup = T::zero();
        for i in 0..nb {
            let rb = r * 2f64.powf(i as f64 / nb as f64);
            for &(a1, a2) in &net {
                let k1: Vec<T> = rotate(&xi1, a1.to_radians())
                    .iter()
                    .map(|&d| -d * T::lit(rb))
                    .collect();
                let k2: Vec<T> = rotate(&xi2, a2.to_radians())
                    .iter()
                    .map(|&d| -d * T::lit(rb))
                    .collect();
                let f = chi1.modulate(&k1);
                let h = chi2.modulate(&k2);
                let amp = v.pair2(&f, &h)?.norm();
                if amp > sup {
                    sup = amp;
                }
            }
        }
        amps.push(sup.as_f64());
    }
    Ok(DecayLadder::fit(
        ScaleKind::Frequency,
        scales,
        amps,
        &cfg.ladder,
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub points: Vec<Vec<f64>>,
    pub xis: Vec<Vec<f64>>,
    pub slope: f64,
    pub r2: f64,
    pub verdict: Verdict,
    pub test: String,
    pub window_radius: f64,
    pub annotations: Vec<String>,
    pub ladder: DecayLadder,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema: u32,
    pub test: String,
    pub entries: Vec<SpectrumEntry>,
    pub points: Vec<Vec<Vec<f64>>>,
    pub directions: Vec<Vec<Vec<f64>>>,
    pub config: ScanConfig,
    pub inconclusive_count: usize,
}

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn conclusive_singular(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Singular)
    }
}

fn to_f64v<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

/// Scan an arity-1 kernel over a base-point grid and direction net. Windows
/// shrink (radius halved, down to window_min) while a verdict stays
/// inconclusive.
pub fn estimate_wavefront1<T: Real>(
    v: &SmearableKernel<T>,
    points: &[Vec<T>],
    directions: &[Vec<T>],
    cfg: &ScanConfig,
) -> Result<SpectrumReport, KernelError> {
    let combos: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..directions.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<SpectrumEntry, KernelError>> = combos
        .par_iter()
        .map(|&(i, j)| {
            let mut radius = cfg.window_radius;
            let mut best: Option<(DecayLadder, f64)> = None;
            loop {
                let w = Window::new(points[i].clone(), T::lit(radius));
                let ladder = direction_ladder(v, &w, &directions[j], cfg)?;
                let done = ladder.verdict != Verdict::Inconclusive;
                best = Some((ladder, radius));
                if done || radius * 0.5 < cfg.window_min {
                    break;
                }
                radius *= 0.5;
            }
            let (ladder, radius) = best.unwrap();
            Ok(SpectrumEntry {
                points: vec![to_f64v(&points[i])],
                xis: vec![to_f64v(&normalize(&directions[j]))],
                slope: ladder.slope,
                r2: ladder.r2,
                verdict: ladder.verdict,
                test: format!("wf-scan:{}", v.name),
                window_radius: radius,
                annotations: ladder.annotations.clone(),
                ladder,
            })
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    for r in results {
        entries.push(r?);
    }
    let inconclusive_count = entries
        .iter()
        .filter(|e| e.verdict == Verdict::Inconclusive)
        .count();
    Ok(SpectrumReport {
        schema: 1,
        test: format!("wf-scan:{}", v.name),
        entries,
        points: points.iter().map(|p| vec![to_f64v(p)]).collect(),
        directions: directions.iter().map(|d| vec![to_f64v(d)]).collect(),
        config: cfg.clone(),
        inconclusive_count,
    })
}

/// Scan an arity-2 kernel over point pairs and direction pairs.
pub fn estimate_wavefront2<T: Real>(
    v: &SmearableKernel<T>,
    point_pairs: &[(Vec<T>, Vec<T>)],
    dir_pairs: &[(Vec<T>, Vec<T>)],
    cfg: &ScanConfig,
) -> Result<SpectrumReport, KernelError> {
    let combos: Vec<(usize, usize)> = (0..point_pairs.len())
        .flat_map(|i| (0..dir_pairs.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<SpectrumEntry, KernelError>> = combos
        .par_iter()
        .map(|&(i, j)| {
            let (p1, p2) = &point_pairs[i];
            let (xi1, xi2) = &dir_pairs[j];
            let mut radius = cfg.window_radius;
            let mut best: Option<(DecayLadder, f64)> = None;
            loop {
                let w1 = Window::new(p1.clone(), T::lit(radius));
                let w2 = Window::new(p2.clone(), T::lit(radius));
                let ladder = pair_ladder(v, &w1, &w2, xi1, xi2, cfg)?;
                let done = ladder.verdict != Verdict::Inconclusive;
                best = Some((ladder, radius));
                if done || radius * 0.5 < cfg.window_min {
                    break;
                }
                radius *= 0.5;
            }
            let (ladder, radius) = best.unwrap();
            Ok(SpectrumEntry {
                points: vec![to_f64v(p1), to_f64v(p2)],
                xis: vec![to_f64v(&normalize(xi1)), to_f64v(&normalize(xi2))],
                slope: ladder.slope,
                r2: ladder.r2,
                verdict: ladder.verdict,
                test: format!("wf-scan2:{}", v.name),
                window_radius: radius,
                annotations: ladder.annotations.clone(),
                ladder,
            })
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    for r in results {
        entries.push(r?);
    }
    let inconclusive_count = entries
        .iter()
        .filter(|e| e.verdict == Verdict::Inconclusive)
        .count();
    Ok(SpectrumReport {
        schema: 1,
        test: format!("wf-scan2:{}", v.name),
        entries,
        points: point_pairs
            .iter()
            .map(|(a, b)| vec![to_f64v(a), to_f64v(b)])
            .collect(),
        directions: dir_pairs
            .iter()
            .map(|(a, b)| vec![to_f64v(a), to_f64v(b)])
            .collect(),
        config: cfg.clone(),
        inconclusive_count,
    })
}

/// Base projection of the conclusive singular entries.
pub fn singular_support(report: &SpectrumReport) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for e in report.conclusive_singular() {
        for p in &e.points {
            if !out.iter().any(|q| {
                q.len() == p.len()
                    && q.iter().zip(p.iter()).all(|(a, b)| (a - b).abs() < 1e-12)
            }) {
                out.push(p.clone());
            }
        }
    }
    out
}

/// Result of the wavefront covariance check under a linear chart map.
#[derive(Debug)]
pub struct CovarianceCheck {
    /// Conclusive verdict disagreements after mapping covectors by the
    /// inverse transpose.
    pub score: usize,
    pub base: SpectrumReport,
    pub mapped: SpectrumReport,
}

/// Scans v and phi_* v on corresponding grids and counts conclusive verdict
/// disagreements (the wavefront set must map by (t D phi)^{-1}).
pub fn transform_covariance_check<T: Real>(
    v: &SmearableKernel<T>,
    map: &LinearMap,
    points: &[Vec<T>],
    directions: &[Vec<T>],
    cfg: &ScanConfig,
) -> Result<CovarianceCheck, KernelError> {
    let pushed = v.pushforward(map)?;
    let base = estimate_wavefront1(v, points, directions, cfg)?;
    let mapped_points: Vec<Vec<T>> = points
        .iter()
        .map(|p| {
            map.apply(&to_f64v(p))
                .into_iter()
                .map(T::lit)
                .collect::<Vec<T>>()
        })
        .collect();
    let mapped_dirs: Vec<Vec<T>> = directions
        .iter()
        .map(|d| {
            normalize(
                &map.inv_transpose_apply(&to_f64v(d))
                    .into_iter()
                    .map(T::lit)
                    .collect::<Vec<T>>(),
            )
        })
        .collect();
    let mapped = estimate_wavefront1(&pushed, &mapped_points, &mapped_dirs, cfg)?;
    let mut score = 0;
    for (a, b) in base.entries.iter().zip(mapped.entries.iter()) {
        let conclusive = a.verdict != Verdict::Inconclusive && b.verdict != Verdict::Inconclusive;
        if conclusive && a.verdict != b.verdict {
            score += 1;
        }
    }
    Ok(CovarianceCheck {
        score,
        base,
        mapped,
    })
}

/// WF(Av) must be contained in WF(v): every conclusive singular entry of the
/// Av scan is singular or inconclusive in the v scan.
pub fn operator_shrink_check<T: Real>(
    v: &SmearableKernel<T>,
    op: &DiffOp,
    points: &[Vec<T>],
    directions: &[Vec<T>],
    cfg: &ScanConfig,
) -> Result<bool, KernelError> {
    let av = v.apply_operator(op);
    let base = estimate_wavefront1(v, points, directions, cfg)?;
    let applied = estimate_wavefront1(&av, points, directions, cfg)?;
    for (a, b) in applied.entries.iter().zip(base.entries.iter()) {
        if a.verdict == Verdict::Singular && b.verdict == Verdict::Regular {
            return Ok(false);
        }
    }
    Ok(true)
}
