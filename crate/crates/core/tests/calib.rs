use microspec_core::kernels;
use microspec_core::ladder::Verdict;
use microspec_core::microlocal::{estimate_wavefront1, ScanConfig};
use std::time::Instant;

#[test]
fn calibration_reference_battery() {
    let cfg = ScanConfig::default();
    let points: Vec<Vec<f64>> = vec![vec![-0.8], vec![-0.45], vec![0.0], vec![0.45], vec![0.8]];
    let dirs: Vec<Vec<f64>> = vec![vec![1.0], vec![-1.0]];
    let t0 = Instant::now();
    let mut inconclusive = 0;
    let mut total = 0;
    let mut mis = 0;
    for v in kernels::reference_battery::<f64>() {
        let rep = estimate_wavefront1(&v, &points, &dirs, &cfg).unwrap();
        for e in &rep.entries {
            total += 1;
            let x = e.points[0][0];
            let dir = e.xis[0][0];
            let truth = match v.name.as_str() {
                "delta" | "delta_prime" | "heaviside" => {
                    if x == 0.0 { Verdict::Singular } else { Verdict::Regular }
                }
                "gaussian" => Verdict::Regular,
                "cauchy_plus" => {
                    if x == 0.0 && dir > 0.0 { Verdict::Singular } else { Verdict::Regular }
                }
                _ => unreachable!(),
            };
            match e.verdict {
                Verdict::Inconclusive => {
                    inconclusive += 1;
                    println!("INC  {} x={x} dir={dir} slope={:.2} r2={:.4} amps={:?}", v.name, e.slope, e.r2, e.ladder.amplitudes);
                }
                vd if vd != truth => {
                    mis += 1;
                    println!("MIS  {} x={x} dir={dir} got {vd:?} want {truth:?} slope={:.2} r2={:.4} amps={:?}", v.name, e.slope, e.r2, e.ladder.amplitudes);
                }
                _ => {}
            }
        }
    }
    println!("total={total} inconclusive={inconclusive} misclassified={mis} elapsed={:?}", t0.elapsed());
    assert_eq!(mis, 0, "conclusive misclassifications");
    assert!(inconclusive * 10 <= total, "more than 10% inconclusive");
}
