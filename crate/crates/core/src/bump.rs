//! The compactly supported smooth profile used by every window and test
//! function in the toolkit:
//!
//! ```text
//! b(r) = exp(1 - 1/(1 - r^2))   for |r| < 1,   0 otherwise,   b(0) = 1.
//! ```
//!
//! Its Fourier transform `bhat(u) = int_{-1}^{1} b(r) e^{-iur} dr` is real and
//! even; it is tabulated once in f64 on a uniform grid and interpolated. All
//! closed-form test-function transforms in the crate reduce to `bhat`.

use crate::scalar::Real;
use once_cell::sync::Lazy;
use rayon::prelude::*;

/// Profile value b(r).
pub fn profile(r: f64) -> f64 {
    let r2 = r * r;
    if r2 >= 1.0 - 1e-12 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// n-th derivative of the profile, n <= 2.
pub fn profile_deriv(r: f64, n: u8) -> f64 {
    let r2 = r * r;
    if r2 >= 1.0 - 1e-12 {
        return 0.0;
    }
    let g = 1.0 / (1.0 - r2);
    let b = (1.0 - g).exp();
    match n {
        0 => b,
        1 => -2.0 * r * g * g * b,
        2 => {
            let gp = 2.0 * r * g * g;
            let gpp = 2.0 * g * g + 8.0 * r2 * g * g * g;
            (gp * gp - gpp) * b
        }
        _ => panic!("profile derivatives implemented up to order 2"),
    }
}

/// Tabulation grid: bhat is below 1e-18 well before U_MAX, so it is clamped
/// to zero beyond the table.
const U_MAX: f64 = 1536.0;
const DU: f64 = 1.0 / 64.0;
const N_TAB: usize = (U_MAX / DU) as usize + 1;

/// Fixed composite-GL node set on [-1, 1] used to build the table. 768
/// panels keep the cos(u r) factor under one period per panel at U_MAX.
fn table_nodes() -> Vec<(f64, f64)> {
    let panels = 768usize;
    let width = 2.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * 12);
    for p in 0..panels {
        let a = -1.0 + p as f64 * width;
        for (x, w) in crate::quad::gl12_points(a, a + width) {
            out.push((x, w * profile(x)));
        }
    }
    out
}

static BHAT_TABLE: Lazy<Vec<f64>> = Lazy::new(|| {
    let nodes = table_nodes();
    let chunks: Vec<&[(f64, f64)]> = nodes.chunks(256).collect();
    chunks
        .par_iter()
        .map(|chunk| {
            let mut acc = vec![0.0f64; N_TAB];
            let mut comp = vec![0.0f64; N_TAB];
            let kahan_add = |acc: &mut [f64], comp: &mut [f64], k: usize, v: f64| {
                let y = v - comp[k];
                let t = acc[k] + y;
                comp[k] = (t - acc[k]) - y;
                acc[k] = t;
            };
            for &(r, wb) in chunk.iter() {
                // cos(k du r) by the double-angle recurrence, re-anchored on
                // an exact cos every 32 steps to stop the linear error drift.
                let theta = DU * r;
                let c = theta.cos();
                let mut c_prev = 1.0f64;
                let mut c_cur = c;
                kahan_add(&mut acc, &mut comp, 0, wb);
                kahan_add(&mut acc, &mut comp, 1, wb * c);
                for k in 2..N_TAB {
                    let c_next = if k % 32 == 0 {
                        c_prev = ((k as f64 - 1.0) * theta).cos();
                        (k as f64 * theta).cos()
                    } else {
                        2.0 * c * c_cur - c_prev
                    };
                    if k % 32 != 0 {
                        c_prev = c_cur;
                    }
                    c_cur = c_next;
                    kahan_add(&mut acc, &mut comp, k, wb * c_next);
                }
            }
            acc
        })
        .reduce(
            || vec![0.0f64; N_TAB],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += *y;
                }
                a
            },
        )
});

/// bhat(u): Fourier transform of the profile (real, even). Six-point
/// Lagrange interpolation on the f64 table; zero beyond the tabulated range.
pub fn profile_ft<T: Real>(u: T) -> T {
    let ua = u.abs().as_f64();
    if ua >= U_MAX - 4.0 * DU {
        return T::zero();
    }
    let table = &*BHAT_TABLE;
    let s = ua / DU;
    let i = s.floor() as isize;
    let t = s - i as f64;
    // Nodes i-2..i+3; the transform is even, so reflect negative indices.
    let y = |j: isize| -> f64 {
        let k = (i + j).unsigned_abs();
        table[k]
    };
    let (ym2, ym1, y0, y1, y2, y3) = (y(-2), y(-1), y(0), y(1), y(2), y(3));
    let a = t + 2.0;
    let b = t + 1.0;
    let c = t;
    let d = t - 1.0;
    let e = t - 2.0;
    let f = t - 3.0;
    let v = -ym2 * (b * c * d * e * f) / 120.0
        + ym1 * (a * c * d * e * f) / 24.0
        - y0 * (a * b * d * e * f) / 12.0
        + y1 * (a * b * c * e * f) / 12.0
        - y2 * (a * b * c * d * f) / 24.0
        + y3 * (a * b * c * d * e) / 120.0;
    T::lit(v)
}

/// L1 norm of the profile, int_{-1}^{1} b = bhat(0).
pub fn profile_mass() -> f64 {
    BHAT_TABLE[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn profile_basics() {
        assert_eq!(profile(0.0), 1.0);
        assert_eq!(profile(1.0), 0.0);
        assert_eq!(profile(-1.2), 0.0);
        assert!((profile(0.5) - (1.0f64 - 1.0 / 0.75).exp()).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &r in &[0.0, 0.3, -0.55, 0.8] {
            let d1 = (profile(r + h) - profile(r - h)) / (2.0 * h);
            assert!((profile_deriv(r, 1) - d1).abs() < 1e-8, "b' at {r}");
            let d2 = (profile(r + h) - 2.0 * profile(r) + profile(r - h)) / (h * h);
            assert!((profile_deriv(r, 2) - d2).abs() < 1e-5, "b'' at {r}");
        }
    }

    #[test]
    fn table_matches_direct_quadrature() {
        for &u in &[0.0, 0.37, 1.9, 8.25, 33.3, 147.0, 512.5] {
            let f = move |r: f64| Complex64::new(profile(r) * (u * r).cos(), 0.0);
            let direct = crate::quad::integrate_osc(&f, -1.0, 1.0, u, 1e-13, 1e-18).re;
            let tab: f64 = profile_ft(u);
            assert!(
                (tab - direct).abs() < 2e-9,
                "u={u}: table {tab} vs direct {direct}"
            );
        }
    }

    #[test]
    fn tail_is_subpolynomial() {
        // Decay like exp(-sqrt(2u)): past u ~ 900 the true transform is
        // below 1e-18; the tabulated value must sit under the ladder floor.
        let t: f64 = profile_ft(900.0);
        assert!(t.abs() < 1e-15, "tail {t}");
        let z: f64 = profile_ft(2000.0);
        assert_eq!(z, 0.0);
    }
}
