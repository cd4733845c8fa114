//! Compactly supported test functions: finite linear combinations of
//! products of modulated bump factors,
//!
//! ```text
//! factor(x) = b^(n)((x - c)/rho) * e^{i q (x - c)}
//! ```
//!
//! The family is closed under translation, dilation about a point,
//! differentiation, multiplication by plane waves and complex conjugation,
//! and every member has a closed-form Fourier transform in terms of the
//! tabulated profile transform. That closure is what lets every pairing in
//! the toolkit run through absolutely convergent momentum-space quadrature.

use crate::bump;
use crate::scalar::{cis, Cplx, Real};
use num_complex::Complex;

/// One modulated bump factor in one coordinate.
#[derive(Clone, Debug)]
pub struct BumpFactor<T> {
    pub center: T,
    pub radius: T,
    /// Modulation frequency; the phase is anchored at the center.
    pub modulation: T,
    /// Profile derivative order (0..=2): the factor uses b^(n), not (d/dx)^n b.
    pub deriv: u8,
}

impl<T: Real> BumpFactor<T> {
    pub fn new(center: T, radius: T, modulation: T) -> Self {
        BumpFactor {
            center,
            radius,
            modulation,
            deriv: 0,
        }
    }

    pub fn eval(&self, x: T) -> Cplx<T> {
        let r = (x - self.center) / self.radius;
        let v = T::lit(bump::profile_deriv(r.as_f64(), self.deriv));
        cis(self.modulation * (x - self.center)) * v
    }

    /// Fourier transform at frequency kappa (convention int f e^{-i kappa x}).
    pub fn ft(&self, kappa: T) -> Cplx<T> {
        let u = self.radius * (kappa - self.modulation);
        let base = bump::profile_ft(u);
        let mag = self.radius * base;
        // (i u)^n factor from the profile derivative.
        let iu = Complex::new(T::zero(), u);
        let mut out = Complex::new(mag, T::zero());
        for _ in 0..self.deriv {
            out = out * iu;
        }
        out * cis(-kappa * self.center)
    }

    pub fn support(&self) -> (T, T) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// Product of per-dimension factors with a complex amplitude.
#[derive(Clone, Debug)]
pub struct ProductTerm<T> {
    pub amp: Cplx<T>,
    pub factors: Vec<BumpFactor<T>>,
}

impl<T: Real> ProductTerm<T> {
    pub fn eval(&self, x: &[T]) -> Cplx<T> {
        let mut v = self.amp;
        for (f, &xi) in self.factors.iter().zip(x.iter()) {
            v = v * f.eval(xi);
        }
        v
    }

    pub fn ft(&self, k: &[T]) -> Cplx<T> {
        let mut v = self.amp;
        for (f, &ki) in self.factors.iter().zip(k.iter()) {
            v = v * f.ft(ki);
        }
        v
    }
}

/// A test function on R^dim: a finite sum of product terms.
#[derive(Clone, Debug)]
pub struct TestFn<T> {
    pub dim: usize,
    pub terms: Vec<ProductTerm<T>>,
}

impl<T: Real> TestFn<T> {
    /// Single complex-modulated bump in one dimension.
    pub fn bump_1d(center: T, radius: T, modulation: T) -> Self {
        TestFn {
            dim: 1,
            terms: vec![ProductTerm {
                amp: Complex::new(T::one(), T::zero()),
                factors: vec![BumpFactor::new(center, radius, modulation)],
            }],
        }
    }

    /// Real cosine-modulated bump in one dimension.
    pub fn real_bump_1d(center: T, radius: T, modulation: T) -> Self {
        if modulation == T::zero() {
            return Self::bump_1d(center, radius, T::zero());
        }
        let half = Complex::new(T::lit(0.5), T::zero());
        TestFn {
            dim: 1,
            terms: vec![
                ProductTerm {
                    amp: half,
                    factors: vec![BumpFactor::new(center, radius, modulation)],
                },
                ProductTerm {
                    amp: half,
                    factors: vec![BumpFactor::new(center, radius, -modulation)],
                },
            ],
        }
    }

    /// Complex-modulated product bump on the (t, x) chart.
    pub fn bump_2d(center: [T; 2], radius: [T; 2], modulation: [T; 2]) -> Self {
        TestFn {
            dim: 2,
            terms: vec![ProductTerm {
                amp: Complex::new(T::one(), T::zero()),
                factors: vec![
                    BumpFactor::new(center[0], radius[0], modulation[0]),
                    BumpFactor::new(center[1], radius[1], modulation[1]),
                ],
            }],
        }
    }

    /// Real 2d bump: cos-modulated, b((t-ct)/r) b((x-cx)/r) cos(q.(y - c)).
    pub fn real_bump_2d(center: [T; 2], radius: [T; 2], modulation: [T; 2]) -> Self {
        if modulation[0] == T::zero() && modulation[1] == T::zero() {
            return Self::bump_2d(center, radius, modulation);
        }
        let half = Complex::new(T::lit(0.5), T::zero());
        let mk = |sign: T| ProductTerm {
            amp: half,
            factors: vec![
                BumpFactor::new(center[0], radius[0], sign * modulation[0]),
                BumpFactor::new(center[1], radius[1], sign * modulation[1]),
            ],
        };
        TestFn {
            dim: 2,
            terms: vec![mk(T::one()), mk(-T::one())],
        }
    }

    pub fn zero(dim: usize) -> Self {
        TestFn { dim, terms: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[T]) -> Cplx<T> {
        debug_assert_eq!(x.len(), self.dim);
        let mut v = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            v = v + t.eval(x);
        }
        v
    }

    /// Fourier transform, f_hat(k) = int f(x) e^{-i k.x} dx.
    pub fn ft(&self, k: &[T]) -> Cplx<T> {
        debug_assert_eq!(k.len(), self.dim);
        let mut v = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            v = v + t.ft(k);
        }
        v
    }

    pub fn scaled(&self, c: Cplx<T>) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amp = t.amp * c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TestFn {
            dim: self.dim,
            terms,
        }
    }

    /// Whole-function translation by dx (modulation phases ride along).
    pub fn translate(&self, dx: &[T]) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            for (f, &d) in t.factors.iter_mut().zip(dx.iter()) {
                f.center = f.center + d;
            }
        }
        out
    }

    /// Multiply by the plane wave e^{i q.x}.
    pub fn modulate(&self, q: &[T]) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            for (f, &qd) in t.factors.iter_mut().zip(q.iter()) {
                t.amp = t.amp * cis(qd * f.center);
                f.modulation = f.modulation + qd;
            }
        }
        out
    }

    /// g(x) = f(p + (x - p)/s): supports dilate by s about p, frequencies
    /// divide by s. Used by testing families and scaled neighborhoods.
    pub fn rescale_about(&self, p: &[T], s: T) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            for (f, &pd) in t.factors.iter_mut().zip(p.iter()) {
                f.center = pd + s * (f.center - pd);
                f.radius = f.radius * s;
                f.modulation = f.modulation / s;
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amp = t.amp.conj();
            for f in &mut t.factors {
                f.modulation = -f.modulation;
            }
        }
        out
    }

    /// Partial derivative along dimension `d`.
    pub fn derivative(&self, d: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            let f = &t.factors[d];
            if f.deriv < 2 {
                let mut chain = t.clone();
                chain.factors[d].deriv += 1;
                chain.amp = chain.amp * Complex::new(T::one() / f.radius, T::zero());
                terms.push(chain);
            } else {
                panic!("test-function derivatives supported up to second order per factor");
            }
            if f.modulation != T::zero() {
                let mut modl = t.clone();
                modl.amp = modl.amp * Complex::new(T::zero(), f.modulation);
                terms.push(modl);
            }
        }
        TestFn {
            dim: self.dim,
            terms,
        }
    }

    /// Klein-Gordon operator (box + m^2) f on the (t, x) chart, signature
    /// (+,-): box = d_t^2 - d_x^2.
    pub fn kg_operator(&self, mass: T) -> Self {
        debug_assert_eq!(self.dim, 2);
        let dtt = self.derivative(0).derivative(0);
        let dxx = self.derivative(1).derivative(1);
        let m2 = Complex::new(mass * mass, T::zero());
        dtt.add(&dxx.scaled(Complex::new(-T::one(), T::zero())))
            .add(&self.scaled(m2))
    }

    /// Support bounding box per dimension (union over terms).
    pub fn support(&self) -> Vec<(T, T)> {
        let mut out = vec![(T::infinity(), T::neg_infinity()); self.dim];
        for t in &self.terms {
            for (d, f) in t.factors.iter().enumerate() {
                let (a, b) = f.support();
                if a < out[d].0 {
                    out[d].0 = a;
                }
                if b > out[d].1 {
                    out[d].1 = b;
                }
            }
        }
        out
    }

    /// Largest modulation magnitude along dimension `d` (quadrature sizing).
    pub fn max_modulation(&self, d: usize) -> T {
        self.terms
            .iter()
            .map(|t| t.factors[d].modulation.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest bump radius along dimension `d` over terms.
    pub fn max_radius(&self, d: usize) -> T {
        self.terms
            .iter()
            .map(|t| t.factors[d].radius)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Smallest bump radius along dimension `d` over terms.
    pub fn min_radius(&self, d: usize) -> T {
        self.terms
            .iter()
            .map(|t| t.factors[d].radius)
            .fold(T::infinity(), |a, b| if b < a { b } else { a })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ft_by_quadrature(f: &TestFn<f64>, k: f64) -> Complex64 {
        let (a, b) = f.support()[0];
        let g = move |x: f64| f.eval(&[x]) * Complex64::new(0.0, -k * x).exp();
        crate::quad::integrate_osc(&g, a, b, k + f.max_modulation(0), 1e-12, 1e-16)
    }

    #[test]
    fn closed_form_ft_matches_quadrature() {
        let f = TestFn::bump_1d(0.3, 0.7, 2.5);
        for &k in &[0.0, 1.0, -4.2, 17.0] {
            let direct = ft_by_quadrature(&f, k);
            let closed = f.ft(&[k]);
            assert!(
                (direct - closed).norm() < 1e-10,
                "k={k}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = TestFn::real_bump_1d(-0.2, 0.5, 3.0);
        let df = f.derivative(0);
        let h = 1e-6;
        for &x in &[-0.4, -0.2, 0.1] {
            let fd = (f.eval(&[x + h]) - f.eval(&[x - h])) / Complex64::new(2.0 * h, 0.0);
            assert!((df.eval(&[x]) - fd).norm() < 1e-7, "at {x}");
        }
    }

    #[test]
    fn derivative_ft_is_ik_times_ft() {
        let f = TestFn::bump_1d(0.1, 0.4, -1.5);
        let df = f.derivative(0);
        for &k in &[0.7, 5.0, -12.0] {
            let expect = f.ft(&[k]) * Complex64::new(0.0, k);
            let got = df.ft(&[k]);
            assert!((expect - got).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn translation_shifts_phase_of_ft() {
        let f = TestFn::bump_2d([0.0, 0.0], [0.5, 0.5], [1.0, -2.0]);
        let g = f.translate(&[0.3, -0.7]);
        let k = [2.0, 5.0];
        let expect = f.ft(&k) * Complex64::new(0.0, -(k[0] * 0.3 + k[1] * (-0.7))).exp();
        let got = g.ft(&k);
        assert!((expect - got).norm() < 1e-12);
    }

    #[test]
    fn rescale_about_point_moves_support() {
        let f: TestFn<f64> = TestFn::bump_1d(0.4, 0.2, 8.0);
        let g = f.rescale_about(&[0.1], 0.25);
        // center 0.1 + 0.25*(0.4-0.1) = 0.175, radius 0.05
        let s = g.support()[0];
        assert!((s.0 - 0.125).abs() < 1e-14 && (s.1 - 0.225).abs() < 1e-14);
        // pointwise: g(x) = f(0.1 + (x-0.1)/0.25)
        let x = 0.19;
        let expect = f.eval(&[0.1 + (x - 0.1) / 0.25]);
        assert!((g.eval(&[x]) - expect).norm() < 1e-13);
    }

    #[test]
    fn kg_operator_kills_on_shell_ft() {
        // F[(box + m^2) f](k) = (-k0^2 + k1^2 + m^2) F[f](k): zero on shell.
        let m = 1.0f64;
        let f = TestFn::real_bump_2d([0.0, 0.0], [0.8, 0.8], [2.0, 1.0]);
        let kg = f.kg_operator(m);
        let p = 1.3f64;
        let w = (p * p + m * m).sqrt();
        let on_shell = kg.ft(&[w, -p]);
        assert!(on_shell.norm() < 1e-10, "on-shell residual {on_shell}");
        let off = kg.ft(&[2.0 * w, p]);
        let expect = f.ft(&[2.0 * w, p]) * Complex64::new(-4.0 * w * w + p * p + m * m, 0.0);
        assert!((off - expect).norm() < 1e-10 * (1.0 + expect.norm()));
    }
}
