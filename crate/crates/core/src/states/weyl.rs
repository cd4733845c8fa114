//! Weyl-monomial expectation values: the canonical commutation relations in
//! Weyl form reduce a product W(f_1) ... W(f_N) to a single generator with
//! an accumulated symplectic phase, and the quasifree form fixes the result,
//!
//! ```text
//! omega(W(f_1) ... W(f_N)) = exp(-i/2 sum_{j<l} sigma(f_j, f_l))
//!                          * exp(-omega2(F, F)/2),   F = sum f_j.
//! ```

use super::QuasifreeState;
use crate::scalar::{Cplx, Real};
use crate::testfn::TestFn;
use num_complex::Complex;

/// Expectation value of the Weyl monomial over the given state.
pub fn weyl_correlation<T: Real>(
    state: &QuasifreeState<T>,
    factors: &[TestFn<T>],
) -> Cplx<T> {
    if factors.is_empty() {
        return Complex::new(T::one(), T::zero());
    }
    let mut phase = T::zero();
    for j in 0..factors.len() {
        for l in (j + 1)..factors.len() {
            phase = phase - state.symplectic(&factors[j], &factors[l]).re * T::lit(0.5);
        }
    }
    let mut total = factors[0].clone();
    for f in &factors[1..] {
        total = total.add(f);
    }
    // Bilinear omega2(F, F); Weyl generators carry real test functions.
    let q = state.two_point(&total, &total);
    let decay = (-q * Complex::new(T::lit(0.5), T::zero())).exp();
    decay * Complex::new(T::zero(), phase).exp()
}
