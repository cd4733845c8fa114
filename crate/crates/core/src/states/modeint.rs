//! Momentum-space evaluation of two-point functions. Every pairing is an
//! absolutely convergent 1d mode integral over spatial momentum p with
//! dispersion omega = sqrt(p^2 + m^2); the i-epsilon prescription never
//! appears because smearing happens first.
//!
//! A mode term pairs the Fourier transforms of the two slots at one of the
//! sign combinations (+-omega, -+p) with a thermal or squeezing weight:
//!
//! ```text
//! omega2(f, h) = sum_terms int dp w(omega)/(4 pi omega)
//!                    F[f](k_f(p)) F[h](k_h(p))
//! ```

use crate::quad::{composite, panels_for_rate};
use crate::scalar::{Cplx, Real};
use crate::testfn::{ProductTerm, TestFn};
use num_complex::Complex;

/// Frequency-argument slots: which (k0, k1) the transform is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreqArg {
    /// (+omega, -p)
    PosNeg,
    /// (-omega, +p)
    NegPos,
    /// (+omega, +p)
    PosPos,
    /// (-omega, -p)
    NegNeg,
}

impl FreqArg {
    fn k<T: Real>(self, omega: T, p: T) -> [T; 2] {
        match self {
            FreqArg::PosNeg => [omega, -p],
            FreqArg::NegPos => [-omega, p],
            FreqArg::PosPos => [omega, p],
            FreqArg::NegNeg => [-omega, -p],
        }
    }

    /// Sign of the omega slot.
    fn omega_sign(self) -> f64 {
        match self {
            FreqArg::PosNeg | FreqArg::PosPos => 1.0,
            _ => -1.0,
        }
    }

    /// Sign of the p slot.
    fn p_sign(self) -> f64 {
        match self {
            FreqArg::PosNeg | FreqArg::NegNeg => -1.0,
            _ => 1.0,
        }
    }
}

/// Mode-occupation weight in front of a term.
#[derive(Clone, Copy, Debug)]
pub enum Weight {
    One,
    /// 1 + n(omega) = 1/(1 - e^{-beta omega})
    BosePlus(f64),
    /// n(omega) = 1/(e^{beta omega} - 1)
    BoseMinus(f64),
    Cosh2(f64),
    Sinh2(f64),
    CoshSinh(f64),
}

impl Weight {
    pub fn eval<T: Real>(&self, omega: T) -> T {
        match *self {
            Weight::One => T::one(),
            Weight::BosePlus(beta) => {
                T::one() / (T::one() - (-T::lit(beta) * omega).exp())
            }
            Weight::BoseMinus(beta) => {
                let e = (-T::lit(beta) * omega).exp();
                e / (T::one() - e)
            }
            Weight::Cosh2(theta) => {
                let c = T::lit(theta.cosh());
                c * c
            }
            Weight::Sinh2(theta) => {
                let s = T::lit(theta.sinh());
                s * s
            }
            Weight::CoshSinh(theta) => T::lit(theta.cosh() * theta.sinh()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ModeTerm {
    pub weight: Weight,
    pub f_arg: FreqArg,
    pub h_arg: FreqArg,
}

/// Per-factor支持 cut: the profile transform is numerically dead past this.
const U_CUT: f64 = 1000.0;

/// Intersect `cur` with the p-interval on which `fac`'s x-transform at
/// sign*p is above the cutoff.
fn intersect_x_window<T: Real>(
    cur: (f64, f64),
    term: &ProductTerm<T>,
    p_sign: f64,
) -> (f64, f64) {
    let fac = &term.factors[1];
    let q = fac.modulation.as_f64();
    let reach = U_CUT / fac.radius.as_f64();
    // |rho (sign p - q)| <= U_CUT  ->  sign p in [q - reach, q + reach]
    let (lo, hi) = if p_sign > 0.0 {
        (q - reach, q + reach)
    } else {
        (-q - reach, -q + reach)
    };
    (cur.0.max(lo), cur.1.min(hi))
}

/// Upper bound on |p| implied by the t-factor window at sign*omega.
fn omega_cut<T: Real>(term: &ProductTerm<T>, omega_sign: f64, mass: f64) -> f64 {
    let fac = &term.factors[0];
    let q = fac.modulation.as_f64();
    let reach = U_CUT / fac.radius.as_f64();
    // |rho (sign omega - q)| <= U_CUT -> omega <= sign*(q) + reach
    let omega_max = omega_sign * q + reach;
    if omega_max <= mass {
        return 0.0;
    }
    (omega_max * omega_max - mass * mass).sqrt()
}

/// Safe upper envelope for the profile transform magnitude.
fn profile_envelope(u: f64) -> f64 {
    // Empirically |bhat(u)| <= 3 exp(-0.75 sqrt(2u)) with margin; clamp the
    // head at the exact mass.
    (3.0 * (-0.75 * (2.0 * u.abs()).sqrt()).exp()).min(1.2)
}

/// Shrink the p-interval to where the product of all four window envelopes
/// is above the contribution floor. The individual cuts leave long stretches
/// where every factor is simultaneously in its tail.
fn envelope_refine<T: Real>(
    iv: (f64, f64),
    mt: &ModeTerm,
    tf: &ProductTerm<T>,
    th: &ProductTerm<T>,
    mass: f64,
) -> (f64, f64) {
    let env = |p: f64| -> f64 {
        let omega = (p * p + mass * mass).sqrt();
        let mut e = 1.0f64;
        for (term, arg) in [(tf, mt.f_arg), (th, mt.h_arg)] {
            let k0 = arg.omega_sign() * omega;
            let k1 = arg.p_sign() * p;
            let ft_fac = &term.factors[0];
            let fx_fac = &term.factors[1];
            e *= profile_envelope(ft_fac.radius.as_f64() * (k0 - ft_fac.modulation.as_f64()));
            e *= profile_envelope(fx_fac.radius.as_f64() * (k1 - fx_fac.modulation.as_f64()));
        }
        e
    };
    const FLOOR: f64 = 1e-16;
    let n = 128usize;
    let step = (iv.1 - iv.0) / n as f64;
    let mut lo = iv.1;
    let mut hi = iv.0;
    for i in 0..=n {
        let p = iv.0 + i as f64 * step;
        if env(p) > FLOOR {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    if lo > hi {
        return (0.0, 0.0);
    }
    ((lo - step).max(iv.0), (hi + step).min(iv.1))
}

/// One (state term) x (f product term) x (h product term) mode integral.
fn term_integral<T: Real>(
    mt: &ModeTerm,
    tf: &ProductTerm<T>,
    th: &ProductTerm<T>,
    mass: T,
    rel_tol: T,
) -> Cplx<T> {
    // Spatial window intersection in p.
    let mut iv = (f64::NEG_INFINITY, f64::INFINITY);
    iv = intersect_x_window(iv, tf, mt.f_arg.p_sign());
    iv = intersect_x_window(iv, th, mt.h_arg.p_sign());
    // Temporal windows bound |p| through omega.
    let m = mass.as_f64();
    let pmax_t = omega_cut(tf, mt.f_arg.omega_sign(), m)
        .min(omega_cut(th, mt.h_arg.omega_sign(), m));
    iv = (iv.0.max(-pmax_t), iv.1.min(pmax_t));
    if iv.0 >= iv.1 {
        return Complex::new(T::zero(), T::zero());
    }
    iv = envelope_refine(iv, mt, tf, th, m);
    if iv.0 >= iv.1 {
        return Complex::new(T::zero(), T::zero());
    }

    // Oscillation rate: transform phases e^{-i k . c}.
    let rate: T = tf.factors[0].center.abs()
        + tf.factors[1].center.abs()
        + th.factors[0].center.abs()
        + th.factors[1].center.abs();

    let weight = mt.weight;
    let f_arg = mt.f_arg;
    let h_arg = mt.h_arg;
    let four_pi = T::lit(4.0 * std::f64::consts::PI);
    let integrand = move |p: T| -> Cplx<T> {
        let omega = (p * p + mass * mass).sqrt();
        let kf = f_arg.k(omega, p);
        let kh = h_arg.k(omega, p);
        let w = weight.eval(omega) / (four_pi * omega);
        tf.ft(&kf) * th.ft(&kh) * w
    };

    let (a, b) = (T::lit(iv.0), T::lit(iv.1));
    let mut panels = panels_for_rate(a, b, rate, 16);
    let mut prev = composite(&integrand, a, b, panels);
    for _ in 0..4 {
        panels *= 2;
        let next = composite(&integrand, a, b, panels);
        if (next - prev).norm() <= rel_tol * next.norm() + T::lit(1e-16) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Full two-point pairing for a list of mode terms.
pub fn two_point_pairing<T: Real>(
    terms: &[ModeTerm],
    mass: T,
    f: &TestFn<T>,
    h: &TestFn<T>,
    rel_tol: T,
) -> Cplx<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for mt in terms {
        for tf in &f.terms {
            for th in &h.terms {
                acc = acc + term_integral(mt, tf, th, mass, rel_tol);
            }
        }
    }
    acc
}

/// The state-independent symplectic form sigma(f, h) (propagator pairing):
/// sigma = -i [omega2_vac(f, h) - omega2_vac(h, f)].
pub fn symplectic_form<T: Real>(mass: T, f: &TestFn<T>, h: &TestFn<T>, rel_tol: T) -> Cplx<T> {
    let vac = [ModeTerm {
        weight: Weight::One,
        f_arg: FreqArg::PosNeg,
        h_arg: FreqArg::NegPos,
    }];
    let a = two_point_pairing(&vac, mass, f, h, rel_tol);
    let b = two_point_pairing(&vac, mass, h, f, rel_tol);
    -Complex::new(T::zero(), T::one()) * (a - b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vac_terms() -> Vec<ModeTerm> {
        vec![ModeTerm {
            weight: Weight::One,
            f_arg: FreqArg::PosNeg,
            h_arg: FreqArg::NegPos,
        }]
    }

    #[test]
    fn vacuum_two_point_positive_on_diagonal() {
        // omega2(conj f, f) is real and positive.
        let f = TestFn::<f64>::bump_2d([0.0, 0.0], [0.5, 0.5], [1.0, 0.5]);
        let v = two_point_pairing(&vac_terms(), 1.0, &f.conj(), &f, 1e-10);
        assert!(v.re > 0.0, "{v}");
        assert!(v.im.abs() < 1e-10 * v.re, "{v}");
    }

    #[test]
    fn vacuum_matches_direct_formula_for_single_bumps() {
        // Oracle: independent quadrature of the mode integral over the full
        // (uncut) window with a dense fixed rule.
        let f = TestFn::<f64>::bump_2d([0.1, -0.2], [0.4, 0.4], [2.0, 1.0]);
        let h = TestFn::<f64>::bump_2d([-0.3, 0.2], [0.5, 0.35], [-1.0, 0.7]);
        let got = two_point_pairing(&vac_terms(), 1.0, &f, &h, 1e-11);
        let integrand = |p: f64| {
            let w = (p * p + 1.0).sqrt();
            f.ft(&[w, -p]) * h.ft(&[-w, p]) / num_complex::Complex64::new(4.0 * std::f64::consts::PI * w, 0.0)
        };
        let oracle = composite(&integrand, -4000.0, 4000.0, 20000);
        assert!(
            (got - oracle).norm() < 1e-9 * (1.0 + oracle.norm()),
            "got {got} oracle {oracle}"
        );
    }

    #[test]
    fn kms_reduces_to_vacuum_at_low_temperature() {
        let kms = |beta: f64| -> Vec<ModeTerm> {
            vec![
                ModeTerm {
                    weight: Weight::BosePlus(beta),
                    f_arg: FreqArg::PosNeg,
                    h_arg: FreqArg::NegPos,
                },
                ModeTerm {
                    weight: Weight::BoseMinus(beta),
                    f_arg: FreqArg::NegPos,
                    h_arg: FreqArg::PosNeg,
                },
            ]
        };
        let f = TestFn::<f64>::real_bump_2d([0.0, 0.0], [0.5, 0.5], [1.5, 0.0]);
        let h = TestFn::<f64>::real_bump_2d([0.4, 0.3], [0.4, 0.4], [0.0, 2.0]);
        let v = two_point_pairing(&vac_terms(), 1.0, &f, &h, 1e-10);
        let mut prev = f64::INFINITY;
        for beta in [5.0, 10.0, 25.0, 50.0] {
            let k = two_point_pairing(&kms(beta), 1.0, &f, &h, 1e-10);
            let err = (k - v).norm();
            assert!(err < prev, "beta={beta}: {err} !< {prev}");
            prev = err;
        }
        assert!(prev < 1e-6 * (1.0 + v.norm()), "beta=50 gap {prev}");
    }

    #[test]
    fn symplectic_is_antisymmetric_and_real() {
        let f = TestFn::<f64>::real_bump_2d([0.0, 0.1], [0.45, 0.45], [2.0, 0.0]);
        let h = TestFn::<f64>::real_bump_2d([0.2, -0.1], [0.4, 0.4], [0.0, 1.0]);
        let ab = symplectic_form(1.0, &f, &h, 1e-10);
        let ba = symplectic_form(1.0, &h, &f, 1e-10);
        assert!((ab + ba).norm() < 1e-10 * (1.0 + ab.norm()));
        // Real test functions give a real symplectic pairing.
        assert!(ab.im.abs() < 1e-9 * (1.0 + ab.norm()), "{ab}");
    }
}
