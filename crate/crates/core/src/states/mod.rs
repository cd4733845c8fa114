//! Quasifree states of the 2d free scalar field, built in momentum space:
//! the massive vacuum, its KMS thermal deformation, a constant-squeezing
//! (non-Hadamard) Bogoliubov deformation, and the vacuum pulled back through
//! a conformally flat chart.

pub mod checks;
pub mod hadamard;
pub mod modeint;
pub mod weyl;

use crate::geometry::expr::Expr;
use crate::kernels::SmearableKernel;
use crate::scalar::{Cplx, Real};
use crate::testfn::TestFn;
use modeint::{two_point_pairing, symplectic_form, FreqArg, ModeTerm, Weight};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug)]
pub enum StateKind {
    Vacuum { mass: f64 },
    Kms { mass: f64, beta: f64 },
    Squeezed { mass: f64, theta: f64 },
    /// Massive vacuum pulled back through the conformal chart; the kernel is
    /// the flat one, the conformal factor drives the geometry-side checks.
    ConformalVacuum { mass: f64, omega_sq: Expr },
}

impl StateKind {
    pub fn mass(&self) -> f64 {
        match self {
            StateKind::Vacuum { mass }
            | StateKind::Kms { mass, .. }
            | StateKind::Squeezed { mass, .. }
            | StateKind::ConformalVacuum { mass, .. } => *mass,
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateKind::Vacuum { mass } => format!("vacuum(m={mass})"),
            StateKind::Kms { mass, beta } => format!("kms(m={mass},beta={beta})"),
            StateKind::Squeezed { mass, theta } => format!("squeezed(m={mass},theta={theta})"),
            StateKind::ConformalVacuum { mass, .. } => format!("conformal-vacuum(m={mass})"),
        }
    }

    fn mode_terms(&self) -> Vec<ModeTerm> {
        match self {
            StateKind::Vacuum { .. } | StateKind::ConformalVacuum { .. } => vec![ModeTerm {
                weight: Weight::One,
                f_arg: FreqArg::PosNeg,
                h_arg: FreqArg::NegPos,
            }],
            StateKind::Kms { beta, .. } => vec![
                ModeTerm {
                    weight: Weight::BosePlus(*beta),
                    f_arg: FreqArg::PosNeg,
                    h_arg: FreqArg::NegPos,
                },
                ModeTerm {
                    weight: Weight::BoseMinus(*beta),
                    f_arg: FreqArg::NegPos,
                    h_arg: FreqArg::PosNeg,
                },
            ],
            StateKind::Squeezed { theta, .. } => vec![
                ModeTerm {
                    weight: Weight::Cosh2(*theta),
                    f_arg: FreqArg::PosNeg,
                    h_arg: FreqArg::NegPos,
                },
                ModeTerm {
                    weight: Weight::Sinh2(*theta),
                    f_arg: FreqArg::NegPos,
                    h_arg: FreqArg::PosNeg,
                },
                ModeTerm {
                    weight: Weight::CoshSinh(*theta),
                    f_arg: FreqArg::PosNeg,
                    h_arg: FreqArg::PosPos,
                },
                ModeTerm {
                    weight: Weight::CoshSinh(*theta),
                    f_arg: FreqArg::NegPos,
                    h_arg: FreqArg::NegNeg,
                },
            ],
        }
    }
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("state invariant battery failed: {0}")]
    Battery(String),
}

/// Certificate of the randomized invariant battery run at construction.
#[derive(Clone, Debug, Serialize)]
pub struct StateCertificate {
    pub label: String,
    pub samples: usize,
    pub hermiticity_worst: f64,
    pub positivity_worst: f64,
    pub commutator_worst: f64,
    pub tolerance: f64,
}

/// A quasifree state with its momentum-space two-point pairing.
#[derive(Clone, Debug)]
pub struct QuasifreeState<T> {
    pub kind: StateKind,
    pub mass: T,
    terms: Vec<ModeTerm>,
    pub quad_tol: f64,
    pub certificate: Option<StateCertificate>,
}

impl<T: Real> QuasifreeState<T> {
    /// Construct without running the battery (used internally and by tests
    /// that exercise the battery itself).
    pub fn new_unchecked(kind: StateKind) -> Result<Self, StateError> {
        let mass = kind.mass();
        if !(mass > 0.0) {
            return Err(StateError::Parameter(
                "mass must be positive (the 2d massless vacuum is infrared-divergent)".into(),
            ));
        }
        if let StateKind::Kms { beta, .. } = kind {
            if !(beta > 0.0) {
                return Err(StateError::Parameter("beta must be positive".into()));
            }
        }
        if let StateKind::Squeezed { theta, .. } = kind {
            if !theta.is_finite() {
                return Err(StateError::Parameter("theta must be finite".into()));
            }
        }
        if let StateKind::ConformalVacuum { omega_sq, .. } = &kind {
            // Positivity of the conformal factor on a coarse grid.
            for i in 0..5 {
                for j in 0..5 {
                    let t = -2.0 + i as f64;
                    let x = -2.0 + j as f64;
                    if !(omega_sq.eval(t, x) > 0.0) {
                        return Err(StateError::Parameter(format!(
                            "conformal factor not positive at ({t}, {x})"
                        )));
                    }
                }
            }
        }
        let terms = kind.mode_terms();
        Ok(QuasifreeState {
            mass: T::lit(kind.mass()),
            kind,
            terms,
            quad_tol: 1e-8,
            certificate: None,
        })
    }

    /// Two-point function omega2(f, h).
    pub fn two_point(&self, f: &TestFn<T>, h: &TestFn<T>) -> Cplx<T> {
        two_point_pairing(&self.terms, self.mass, f, h, T::lit(self.quad_tol * 0.01))
    }

    pub(crate) fn mode_terms(&self) -> &[ModeTerm] {
        &self.terms
    }

    /// The symplectic form sigma(f, h), state-independent by construction.
    pub fn symplectic(&self, f: &TestFn<T>, h: &TestFn<T>) -> Cplx<T> {
        symplectic_form(self.mass, f, h, T::lit(self.quad_tol * 0.01))
    }

    /// The two-point function as an arity-2 smearable kernel.
    pub fn kernel(&self) -> SmearableKernel<T> {
        let state = self.clone();
        SmearableKernel::new(2, 2, self.kind.label(), move |fs: &[&TestFn<T>]| {
            state.two_point(fs[0], fs[1])
        })
    }

    /// Randomized invariant battery: hermiticity, positivity, commutator.
    pub fn run_battery(&mut self, samples: usize, seed: u64) -> Result<StateCertificate, StateError> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let tol = self.quad_tol;
        let mut hermiticity_worst = 0.0f64;
        let mut positivity_worst = 0.0f64;
        let mut commutator_worst = 0.0f64;
        for _ in 0..samples {
            let rf = self.random_real_fn(&mut rng);
            let rh = self.random_real_fn(&mut rng);
            let cf = self.random_complex_fn(&mut rng);

            // Hermiticity on real functions: omega2(f,h) = conj(omega2(h,f)).
            let ab = self.two_point(&rf, &rh);
            let ba = self.two_point(&rh, &rf);
            let herm = (ab - ba.conj()).norm().as_f64() / (1.0 + ab.norm().as_f64());
            hermiticity_worst = hermiticity_worst.max(herm);

            // Positivity of the sesquilinear form on complex functions.
            let diag = self.two_point(&cf.conj(), &cf);
            let pos_violation =
                (-diag.re.as_f64()).max(diag.im.abs().as_f64() / (1.0 + diag.re.abs().as_f64()));
            positivity_worst = positivity_worst.max(pos_violation);

            // Commutator: omega2(f,h) - omega2(h,f) = i sigma(f,h).
            let sigma = self.symplectic(&rf, &rh);
            let comm = (ab - ba - Complex::new(T::zero(), T::one()) * sigma)
                .norm()
                .as_f64()
                / (1.0 + sigma.norm().as_f64());
            commutator_worst = commutator_worst.max(comm);
        }
        let cert = StateCertificate {
            label: self.kind.label(),
            samples,
            hermiticity_worst,
            positivity_worst,
            commutator_worst,
            tolerance: tol,
        };
        if hermiticity_worst > tol || positivity_worst > tol || commutator_worst > tol {
            return Err(StateError::Battery(format!(
                "hermiticity {hermiticity_worst:.2e}, positivity {positivity_worst:.2e}, commutator {commutator_worst:.2e} vs tol {tol:.1e}"
            )));
        }
        self.certificate = Some(cert.clone());
        Ok(cert)
    }

    fn random_real_fn(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TestFn<T> {
        TestFn::real_bump_2d(
            [T::lit(rng.gen_range(-0.6..0.6)), T::lit(rng.gen_range(-0.6..0.6))],
            [T::lit(rng.gen_range(0.25..0.5)), T::lit(rng.gen_range(0.25..0.5))],
            [T::lit(rng.gen_range(-3.0..3.0)), T::lit(rng.gen_range(-3.0..3.0))],
        )
    }

    fn random_complex_fn(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TestFn<T> {
        TestFn::bump_2d(
            [T::lit(rng.gen_range(-0.6..0.6)), T::lit(rng.gen_range(-0.6..0.6))],
            [T::lit(rng.gen_range(0.25..0.5)), T::lit(rng.gen_range(0.25..0.5))],
            [T::lit(rng.gen_range(-3.0..3.0)), T::lit(rng.gen_range(-3.0..3.0))],
        )
    }
}

/// Construct a state and certify it on a randomized 20-sample battery.
pub fn make_state<T: Real>(kind: StateKind) -> Result<QuasifreeState<T>, StateError> {
    let mut s = QuasifreeState::new_unchecked(kind)?;
    s.run_battery(20, 0x5eed)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_passes_battery() {
        let s = make_state::<f64>(StateKind::Vacuum { mass: 1.0 }).unwrap();
        let c = s.certificate.as_ref().unwrap();
        assert!(c.commutator_worst < 1e-8);
    }

    #[test]
    fn squeezed_theta_zero_equals_vacuum() {
        let v = QuasifreeState::<f64>::new_unchecked(StateKind::Vacuum { mass: 1.0 }).unwrap();
        let s =
            QuasifreeState::<f64>::new_unchecked(StateKind::Squeezed { mass: 1.0, theta: 0.0 })
                .unwrap();
        let f = TestFn::real_bump_2d([0.0, 0.0], [0.4, 0.4], [2.0, 1.0]);
        let h = TestFn::real_bump_2d([0.3, -0.2], [0.35, 0.5], [0.0, -1.5]);
        let a = v.two_point(&f, &h);
        let b = s.two_point(&f, &h);
        assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{a} vs {b}");
    }

    #[test]
    fn kms_large_beta_matches_vacuum_on_battery() {
        let v = QuasifreeState::<f64>::new_unchecked(StateKind::Vacuum { mass: 1.0 }).unwrap();
        let k = QuasifreeState::<f64>::new_unchecked(StateKind::Kms { mass: 1.0, beta: 50.0 })
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = v.random_real_fn(&mut rng);
            let h = v.random_real_fn(&mut rng);
            let a = v.two_point(&f, &h);
            let b = k.two_point(&f, &h);
            assert!(
                (a - b).norm() < 1e-6 * (1.0 + a.norm()),
                "beta=50 deviates: {a} vs {b}"
            );
        }
    }

    #[test]
    fn sigma_state_independent() {
        let v = QuasifreeState::<f64>::new_unchecked(StateKind::Vacuum { mass: 1.0 }).unwrap();
        let k =
            QuasifreeState::<f64>::new_unchecked(StateKind::Kms { mass: 1.0, beta: 1.0 }).unwrap();
        let s =
            QuasifreeState::<f64>::new_unchecked(StateKind::Squeezed { mass: 1.0, theta: 0.5 })
                .unwrap();
        let f = TestFn::real_bump_2d([0.1, 0.0], [0.4, 0.4], [1.0, 2.0]);
        let h = TestFn::real_bump_2d([-0.2, 0.3], [0.45, 0.35], [2.0, 0.0]);
        // sigma from the antisymmetric part of each state's two-point fn.
        let i = Complex::new(0.0, 1.0);
        let sig = |st: &QuasifreeState<f64>| (st.two_point(&f, &h) - st.two_point(&h, &f)) / i;
        let sv = sig(&v);
        let sk = sig(&k);
        let ss = sig(&s);
        assert!((sv - sk).norm() < 2e-8 * (1.0 + sv.norm()), "{sv} vs {sk}");
        assert!((sv - ss).norm() < 2e-8 * (1.0 + sv.norm()), "{sv} vs {ss}");
        // And it matches the direct propagator pairing.
        let direct = v.symplectic(&f, &h);
        assert!((sv - direct).norm() < 2e-8 * (1.0 + sv.norm()));
    }

    #[test]
    fn battery_rejects_broken_quadrature() {
        let mut s =
            QuasifreeState::<f64>::new_unchecked(StateKind::Vacuum { mass: 1.0 }).unwrap();
        // Unreasonably loose integrator tolerance breaks the invariants...
        s.quad_tol = 1e-30;
        assert!(s.run_battery(5, 3).is_err());
    }

    #[test]
    fn mass_must_be_positive() {
        assert!(make_state::<f64>(StateKind::Vacuum { mass: 0.0 }).is_err());
        assert!(make_state::<f64>(StateKind::Kms { mass: 1.0, beta: -1.0 }).is_err());
    }
}
