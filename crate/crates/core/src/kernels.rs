//! Smearable kernels: distributions and bikernels evaluated only through
//! pairing with test functions. Includes the analytic reference battery used
//! to calibrate the wavefront scanner (delta, delta', Heaviside, Gaussian
//! density, and the (x + i0)^{-1} boundary kernel).

use crate::quad::integrate_osc;
use crate::scalar::{Cplx, Real};
use crate::testfn::TestFn;
use num_complex::Complex;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel has arity {actual}, expected {expected}")]
    Arity { expected: usize, actual: usize },
    #[error("test function leaves the kernel domain: {0}")]
    Domain(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

type Pairing<T> = Arc<dyn Fn(&[&TestFn<T>]) -> Cplx<T> + Send + Sync>;

/// A distribution (arity 1) or bikernel (arity 2) on R^dim, defined by its
/// pairing against test functions.
#[derive(Clone)]
pub struct SmearableKernel<T> {
    pub arity: usize,
    pub dim: usize,
    pub name: String,
    /// Pairing domain per dimension; None means all of R^dim.
    pub domain: Option<Vec<(f64, f64)>>,
    pairing: Pairing<T>,
}

impl<T: Real> SmearableKernel<T> {
    pub fn new(
        arity: usize,
        dim: usize,
        name: impl Into<String>,
        pairing: impl Fn(&[&TestFn<T>]) -> Cplx<T> + Send + Sync + 'static,
    ) -> Self {
        SmearableKernel {
            arity,
            dim,
            name: name.into(),
            domain: None,
            pairing: Arc::new(pairing),
        }
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Self {
        self.domain = Some(domain);
        self
    }

    fn check_domain(&self, f: &TestFn<T>) -> Result<(), KernelError> {
        if let Some(dom) = &self.domain {
            for (d, (lo, hi)) in f.support().iter().zip(dom.iter()) {
                if d.0.as_f64() < *lo || d.1.as_f64() > *hi {
                    return Err(KernelError::Domain(format!(
                        "support [{}, {}] outside [{lo}, {hi}]",
                        d.0.as_f64(),
                        d.1.as_f64()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pair1(&self, f: &TestFn<T>) -> Result<Cplx<T>, KernelError> {
        if self.arity != 1 {
            return Err(KernelError::Arity {
                expected: 1,
                actual: self.arity,
            });
        }
        self.check_domain(f)?;
        Ok((self.pairing)(&[f]))
    }

    pub fn pair2(&self, f: &TestFn<T>, h: &TestFn<T>) -> Result<Cplx<T>, KernelError> {
        if self.arity != 2 {
            return Err(KernelError::Arity {
                expected: 2,
                actual: self.arity,
            });
        }
        self.check_domain(f)?;
        self.check_domain(h)?;
        Ok((self.pairing)(&[f, h]))
    }

    /// Largest relative linearity violation over `trials` random two-term
    /// combinations in each slot.
    pub fn linearity_probe(&self, seed: u64, trials: usize) -> T {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst = T::zero();
        for _ in 0..trials {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| -> TestFn<T> {
                let c = T::lit(rng.gen_range(-0.5..0.5));
                let r = T::lit(rng.gen_range(0.2..0.6));
                let q = T::lit(rng.gen_range(-3.0..3.0));
                match self.dim {
                    1 => TestFn::bump_1d(c, r, q),
                    _ => TestFn::bump_2d(
                        [c, T::lit(rng.gen_range(-0.5..0.5))],
                        [r, r],
                        [q, T::lit(rng.gen_range(-3.0..3.0))],
                    ),
                }
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let a = Complex::new(T::lit(rng.gen_range(-2.0..2.0)), T::lit(rng.gen_range(-2.0..2.0)));
            let b = Complex::new(T::lit(rng.gen_range(-2.0..2.0)), T::lit(rng.gen_range(-2.0..2.0)));
            let combo = f.scaled(a).add(&g.scaled(b));
            let (lhs, parts) = match self.arity {
                1 => (
                    self.pair1(&combo),
                    self.pair1(&f).and_then(|vf| self.pair1(&g).map(|vg| vf * a + vg * b)),
                ),
                _ => {
                    let probe = mk(&mut rng);
                    (
                        self.pair2(&combo, &probe),
                        self.pair2(&f, &probe)
                            .and_then(|vf| self.pair2(&g, &probe).map(|vg| vf * a + vg * b)),
                    )
                }
            };
            if let (Ok(l), Ok(r)) = (lhs, parts) {
                let scale = l.norm().max(r.norm()).max(T::lit(1e-30));
                let dev = (l - r).norm() / scale;
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    /// Push-forward under an invertible monomial linear map phi:
    /// (phi_* v)(f) = v(f o phi).
    pub fn pushforward(&self, map: &LinearMap) -> Result<SmearableKernel<T>, KernelError> {
        let m = *map;
        m.validate(self.dim)?;
        let inner = self.clone();
        Ok(SmearableKernel {
            arity: self.arity,
            dim: self.dim,
            name: format!("{}_pushforward", self.name),
            domain: None,
            pairing: Arc::new(move |fs: &[&TestFn<T>]| {
                let composed: Vec<TestFn<T>> =
                    fs.iter().map(|f| m.compose_into(f)).collect();
                let refs: Vec<&TestFn<T>> = composed.iter().collect();
                (inner.pairing)(&refs)
            }),
        })
    }

    /// Av for a constant-coefficient differential operator, computed by
    /// transposition onto the test function.
    pub fn apply_operator(&self, op: &DiffOp) -> SmearableKernel<T> {
        let inner = self.clone();
        let op = op.clone();
        SmearableKernel {
            arity: self.arity,
            dim: self.dim,
            name: format!("{}({})", op.name, self.name),
            domain: self.domain.clone(),
            pairing: Arc::new(move |fs: &[&TestFn<T>]| {
                // A acts on the first slot.
                let transposed = op.transpose_apply(fs[0]);
                let mut args: Vec<&TestFn<T>> = fs.to_vec();
                args[0] = &transposed;
                (inner.pairing)(&args)
            }),
        }
    }
}

/// Invertible monomial linear map on R^1 or R^2 (diagonal or axis swap with
/// scales). General linear maps would break the product-bump closure.
#[derive(Clone, Copy, Debug)]
pub struct LinearMap {
    /// Row-major 2x2; for dim 1 only [0][0] is used.
    pub m: [[f64; 2]; 2],
}

impl LinearMap {
    pub fn scale_1d(a: f64) -> Self {
        LinearMap {
            m: [[a, 0.0], [0.0, 1.0]],
        }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        LinearMap {
            m: [[a, 0.0], [0.0, b]],
        }
    }

    pub fn swap(a: f64, b: f64) -> Self {
        LinearMap {
            m: [[0.0, a], [b, 0.0]],
        }
    }

    pub fn identity() -> Self {
        LinearMap::diag(1.0, 1.0)
    }

    fn validate(&self, dim: usize) -> Result<(), KernelError> {
        let ok = if dim == 1 {
            self.m[0][0] != 0.0
        } else {
            (self.m[0][0] != 0.0 && self.m[1][1] != 0.0 && self.m[0][1] == 0.0 && self.m[1][0] == 0.0)
                || (self.m[0][0] == 0.0
                    && self.m[1][1] == 0.0
                    && self.m[0][1] != 0.0
                    && self.m[1][0] != 0.0)
        };
        if ok {
            Ok(())
        } else {
            Err(KernelError::Unsupported(
                "only invertible monomial (diagonal or swap) maps are supported".into(),
            ))
        }
    }

    pub fn is_swap(&self) -> bool {
        self.m[0][0] == 0.0
    }

    /// Apply to a point.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        if p.len() == 1 {
            vec![self.m[0][0] * p[0]]
        } else {
            vec![
                self.m[0][0] * p[0] + self.m[0][1] * p[1],
                self.m[1][0] * p[0] + self.m[1][1] * p[1],
            ]
        }
    }

    /// Inverse-transpose action on covectors (the wavefront mapping).
    pub fn inv_transpose_apply(&self, k: &[f64]) -> Vec<f64> {
        if k.len() == 1 {
            vec![k[0] / self.m[0][0]]
        } else if self.is_swap() {
            // M = [[0,a],[b,0]]: (M^T)^{-1} = [[0,1/b],[1/a,0]]
            vec![k[1] / self.m[1][0], k[0] / self.m[0][1]]
        } else {
            vec![k[0] / self.m[0][0], k[1] / self.m[1][1]]
        }
    }

    /// f o phi for a product-bump test function.
    pub fn compose_into<T: Real>(&self, f: &TestFn<T>) -> TestFn<T> {
        let mut out = f.clone();
        if self.is_swap() && f.dim == 2 {
            for t in &mut out.terms {
                t.factors.swap(0, 1);
            }
        }
        let diag: [f64; 2] = if self.is_swap() {
            // After the swap, factor d now sees coordinate scaled by the
            // off-diagonal entry feeding it: f(phi(x))_0 = a x_1.
            [self.m[1][0], self.m[0][1]]
        } else {
            [self.m[0][0], self.m[1][1]]
        };
        for t in &mut out.terms {
            for (d, fac) in t.factors.iter_mut().enumerate() {
                let a = T::lit(diag[d]);
                // b^(n)((a x - c)/rho) e^{iq(a x - c)} =
                //   (-1)^n-parity-free rewrite around center c/a:
                fac.center = fac.center / a;
                fac.modulation = fac.modulation * a;
                if a < T::zero() {
                    fac.radius = fac.radius / -a;
                    if fac.deriv % 2 == 1 {
                        t.amp = -t.amp;
                    }
                } else {
                    fac.radius = fac.radius / a;
                }
            }
        }
        out
    }
}

/// Constant-coefficient differential operator, sum of c_alpha d^alpha with
/// per-dimension orders.
#[derive(Clone, Debug)]
pub struct DiffOp {
    pub name: String,
    /// (complex coefficient, orders per dimension)
    pub terms: Vec<((f64, f64), Vec<u8>)>,
}

impl DiffOp {
    pub fn identity(dim: usize) -> Self {
        DiffOp {
            name: "id".into(),
            terms: vec![((1.0, 0.0), vec![0; dim])],
        }
    }

    pub fn d_dx_1d() -> Self {
        DiffOp {
            name: "d/dx".into(),
            terms: vec![((1.0, 0.0), vec![1])],
        }
    }

    /// box + m^2 on the (t, x) chart, signature (+,-).
    pub fn kg_2d(mass: f64) -> Self {
        DiffOp {
            name: "kg".into(),
            terms: vec![
                ((1.0, 0.0), vec![2, 0]),
                ((-1.0, 0.0), vec![0, 2]),
                ((mass * mass, 0.0), vec![0, 0]),
            ],
        }
    }

    /// A^T f = sum (-1)^{|alpha|} c_alpha d^alpha f.
    pub fn transpose_apply<T: Real>(&self, f: &TestFn<T>) -> TestFn<T> {
        let mut out = TestFn::zero(f.dim);
        for (c, orders) in &self.terms {
            let total: u32 = orders.iter().map(|&o| o as u32).sum();
            let mut g = f.clone();
            for (d, &o) in orders.iter().enumerate() {
                for _ in 0..o {
                    g = g.derivative(d);
                }
            }
            let sign = if total % 2 == 0 { T::one() } else { -T::one() };
            let coef = Complex::new(T::lit(c.0) * sign, T::lit(c.1) * sign);
            out = out.add(&g.scaled(coef));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Reference battery (1d, arity 1)
// ---------------------------------------------------------------------------

/// Quadrature over the support of f, panels sized by its modulation.
fn pair_by_quadrature<T: Real>(
    f: &TestFn<T>,
    weight: impl Fn(T) -> Cplx<T> + Copy,
    lo_clip: Option<T>,
) -> Cplx<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for term in &f.terms {
        let single = TestFn {
            dim: 1,
            terms: vec![term.clone()],
        };
        let (mut lo, hi) = single.support()[0];
        if let Some(c) = lo_clip {
            if hi <= c {
                continue;
            }
            lo = lo.max(c);
        }
        let rate = term.factors[0].modulation.abs();
        let g = |x: T| single.eval(&[x]) * weight(x);
        acc = acc + integrate_osc(&g, lo, hi, rate, T::lit(1e-11), T::lit(1e-17));
    }
    acc
}

/// delta_0: pairing f -> f(0).
pub fn delta<T: Real>() -> SmearableKernel<T> {
    SmearableKernel::new(1, 1, "delta", |fs| fs[0].eval(&[T::zero()]))
}

/// delta_0': pairing f -> -f'(0).
pub fn delta_prime<T: Real>() -> SmearableKernel<T> {
    SmearableKernel::new(1, 1, "delta_prime", |fs| {
        -fs[0].derivative(0).eval(&[T::zero()])
    })
}

/// Heaviside step: f -> int_0^infty f.
pub fn heaviside<T: Real>() -> SmearableKernel<T> {
    SmearableKernel::new(1, 1, "heaviside", |fs| {
        pair_by_quadrature(fs[0], |_| Complex::new(T::one(), T::zero()), Some(T::zero()))
    })
}

/// Gaussian density e^{-x^2}: a smooth distribution.
pub fn gaussian_density<T: Real>() -> SmearableKernel<T> {
    SmearableKernel::new(1, 1, "gaussian", |fs| {
        pair_by_quadrature(
            fs[0],
            |x: T| Complex::new((-x * x).exp(), T::zero()),
            None,
        )
    })
}

/// Boundary-value kernel 1/(x + i0): pairing computed in momentum space,
/// <u, f> = -i int_0^infty f_hat(-kappa) d kappa (absolutely convergent).
pub fn cauchy_plus<T: Real>() -> SmearableKernel<T> {
    SmearableKernel::new(1, 1, "cauchy_plus", |fs: &[&TestFn<T>]| {
        let f = fs[0];
        // Integrand decays once rho(kappa + q) exceeds the profile cutoff.
        let mut kappa_max = T::zero();
        let mut rate = T::zero();
        for term in &f.terms {
            let fac = &term.factors[0];
            let reach = (-fac.modulation) + T::lit(800.0) / fac.radius;
            if reach > kappa_max {
                kappa_max = reach;
            }
            if fac.center.abs() > rate {
                rate = fac.center.abs();
            }
        }
        if kappa_max <= T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let g = |kappa: T| f.ft(&[-kappa]);
        let integral = integrate_osc(&g, T::zero(), kappa_max, rate, T::lit(1e-11), T::lit(1e-17));
        -Complex::new(T::zero(), T::one()) * integral
    })
}

/// The full reference battery with known singular structure.
pub fn reference_battery<T: Real>() -> Vec<SmearableKernel<T>> {
    vec![
        delta(),
        delta_prime(),
        heaviside(),
        gaussian_density(),
        cauchy_plus(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn delta_pairing_is_point_evaluation() {
        let k = delta::<f64>();
        let f = TestFn::bump_1d(0.1, 0.5, 2.0);
        let got = k.pair1(&f).unwrap();
        assert!((got - f.eval(&[0.0])).norm() < 1e-15);
    }

    #[test]
    fn heaviside_pairing_against_closed_form() {
        // f = plain bump at 0 radius 1: int_0^infty b = bhat(0)/2 by symmetry.
        let k = heaviside::<f64>();
        let f = TestFn::bump_1d(0.0, 1.0, 0.0);
        let got = k.pair1(&f).unwrap();
        let expect = crate::bump::profile_mass() / 2.0;
        assert!((got.re - expect).abs() < 1e-10, "{} vs {expect}", got.re);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn cauchy_kernel_matches_epsilon_regularization() {
        // Dual-route oracle at finite eps: the x-space quadrature of
        // f(x)/(x + i eps) must equal the momentum form
        // -i int_0^inf f_hat(-kappa) e^{-eps kappa} d kappa, and the
        // eps -> 0 momentum values must converge to the kernel pairing.
        let k = cauchy_plus::<f64>();
        let f = TestFn::<f64>::real_bump_1d(0.2, 0.45, 1.0);
        let got = k.pair1(&f).unwrap();

        let eps = 0.05;
        let (lo, hi) = f.support()[0];
        let fx = f.clone();
        let g = move |x: f64| fx.eval(&[x]) / Complex64::new(x, eps);
        let x_route = crate::quad::integrate_osc(&g, lo, hi, 40.0, 1e-13, 1e-18);
        let fm = f.clone();
        let mom = move |kappa: f64| fm.ft(&[-kappa]) * (-eps * kappa).exp();
        let k_route =
            -Complex64::i() * crate::quad::integrate_osc(&mom, 0.0, 2000.0, 1.0, 1e-13, 1e-18);
        assert!(
            (x_route - k_route).norm() < 1e-9,
            "x-route {x_route} vs momentum {k_route}"
        );

        // Convergence of the regularization to the boundary value.
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let fm = f.clone();
            let mom = move |kappa: f64| fm.ft(&[-kappa]) * (-eps * kappa).exp();
            let reg = -Complex64::i()
                * crate::quad::integrate_osc(&mom, 0.0, 3000.0, 1.0, 1e-13, 1e-18);
            let err = (reg - got).norm();
            assert!(err < prev, "not converging at eps={eps}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 0.03, "eps=1e-3 error {prev}");
    }

    #[test]
    fn linearity_probe_on_battery() {
        for k in reference_battery::<f64>() {
            let dev = k.linearity_probe(7, 20);
            assert!(dev < 1e-10, "{}: linearity deviation {dev}", k.name);
        }
    }

    #[test]
    fn pushforward_scale_delta() {
        // phi(x) = 2x: (phi_* delta)(f) = f(0) still.
        let k = delta::<f64>().pushforward(&LinearMap::scale_1d(2.0)).unwrap();
        let f = TestFn::bump_1d(0.0, 0.5, 1.0);
        let got = k.pair1(&f).unwrap();
        assert!((got - f.eval(&[0.0])).norm() < 1e-14);
    }

    #[test]
    fn compose_preserves_values() {
        let m = LinearMap::scale_1d(-1.5);
        let f = TestFn::<f64>::real_bump_1d(0.3, 0.4, 2.0).derivative(0);
        let g = m.compose_into(&f);
        for &x in &[-0.4, -0.2, -0.1] {
            let expect = f.eval(&[-1.5 * x]);
            let got = g.eval(&[x]);
            assert!((expect - got).norm() < 1e-12, "at {x}: {expect} vs {got}");
        }
    }

    #[test]
    fn operator_transposition_identity_and_derivative() {
        let v = delta::<f64>();
        let dv = v.apply_operator(&DiffOp::d_dx_1d());
        // <delta', f> = -f'(0) and d/dx delta = delta'.
        let f = TestFn::bump_1d(0.05, 0.5, 3.0);
        let got = dv.pair1(&f).unwrap();
        let expect = delta_prime::<f64>().pair1(&f).unwrap();
        assert!((got - expect).norm() < 1e-13);
    }
}
