//! The fixed four-state chain used to encode Diophantine equations.
//!
//! `A` has minimal polynomial `(x−1)(x−½)²(x−⅓)`. With `f` uniform and the
//! vectors `g`, `g' = 2(A−½I)g`, `g'' = 2g' + g` below, for all `n ≥ 0`:
//!
//! ```text
//! fᵀAⁿg = (½)ⁿ(n−2)     fᵀAⁿg' = (½)ⁿ     fᵀAⁿg'' = (½)ⁿ·n
//! ```
//!
//! so `x(t) = 4/3·Pr(p2@t) + 8/3·Pr(p3@t)` and
//! `w(t) = 8/3·Pr(p1@t) − 8/3·Pr(p3@t)` evaluate to `(½)ᵗ` and `t·(½)ᵗ`.

use num::One;

use crate::formula::{Polynomial, ProbTerm};
use crate::matrix::{RMatrix, RVector};
use crate::model::{Podtmc, BLIND_SYMBOL};
use crate::rational::{int, pow, ratio, Rational};

use super::ReductionError;

/// The blind agent of the chain.
pub const HILBERT_AGENT: &str = "i";

fn r(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

pub fn hilbert_matrix() -> RMatrix {
    RMatrix::from_rows(vec![
        vec![r(1, 2), r(0, 1), r(0, 1), r(1, 2)],
        vec![r(1, 4), r(1, 2), r(0, 1), r(1, 4)],
        vec![r(1, 3), r(1, 3), r(1, 3), r(0, 1)],
        vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
    ])
    .expect("4x4")
}

/// Initial distribution `f`.
pub fn hilbert_f() -> RVector {
    RVector(vec![r(1, 4); 4])
}

/// `g` with `fᵀAⁿg = (½)ⁿ(n−2)`.
pub fn hilbert_g() -> RVector {
    RVector(vec![r(8, 3), r(-8, 3), int(-8), int(0)])
}

/// `g' = 2(A−½I)g`, an eigenvector for `½`.
pub fn hilbert_g1() -> RVector {
    RVector(vec![int(0), r(4, 3), r(8, 3), int(0)])
}

/// `g'' = 2g' + g`.
pub fn hilbert_g2() -> RVector {
    RVector(vec![r(8, 3), int(0), r(-8, 3), int(0)])
}

/// Coefficients (constant first) of `(x−1)(x−½)²(x−⅓)`.
pub fn hilbert_min_poly() -> Vec<Rational> {
    let mut acc = vec![Rational::one()];
    for root in [int(1), r(1, 2), r(1, 2), r(1, 3)] {
        // multiply by (x − root)
        let mut next = vec![int(0); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &root;
        }
        acc = next;
    }
    acc
}

/// The chain as a model: states `s1..s4`, `PI = f`, `PT = A`, blind agent
/// [`HILBERT_AGENT`], and `p_k` true exactly at `s_k`.
pub fn hilbert_chain() -> Podtmc {
    let states: Vec<String> = (1..=4).map(|k| format!("s{k}")).collect();
    let labels = (1..=4)
        .map(|k| (format!("p{k}"), vec![format!("s{k}")]))
        .collect();
    Podtmc::new(
        states,
        hilbert_f(),
        hilbert_matrix(),
        vec![(HILBERT_AGENT.into(), vec![BLIND_SYMBOL.into(); 4])],
        labels,
    )
    .expect("the chain is valid")
}

/// `Aⁿ` from the closed-form expansion over the minimal polynomial's
/// factors, stated for `n ≥ 1`:
///
/// ```text
/// Aⁿ = 6(A−½I)²(A−⅓I) − 12(½)ⁿ(A−I)(A−⅓I)
///      − 12[(½)ⁿ⁻¹n − 4(½)ⁿ](A−I)(A−½I)(A−⅓I) − 54(⅓)ⁿ(A−I)(A−½I)²
/// ```
pub fn perron_power(n: u64) -> Result<RMatrix, ReductionError> {
    if n == 0 {
        return Err(ReductionError::PerronZero);
    }
    let a = hilbert_matrix();
    let id = RMatrix::identity(4);
    let a1 = &a - &id;
    let ah = &a - &id.scale(&r(1, 2));
    let at = &a - &id.scale(&r(1, 3));
    let prod = |ms: &[&RMatrix]| -> RMatrix {
        ms.iter()
            .fold(RMatrix::identity(4), |acc, m| acc.mul(m).expect("4x4"))
    };
    let half_n = pow(&r(1, 2), n);
    let third_n = pow(&r(1, 3), n);
    let nn = Rational::from_integer(n.into());
    let c3 = int(12) * (pow(&r(1, 2), n - 1) * &nn - int(4) * &half_n);
    let t0 = prod(&[&ah, &ah, &at]).scale(&int(6));
    let t1 = prod(&[&a1, &at]).scale(&(int(12) * &half_n));
    let t2 = prod(&[&a1, &ah, &at]).scale(&c3);
    let t3 = prod(&[&a1, &ah, &ah]).scale(&(int(54) * &third_n));
    Ok(&(&(&t0 - &t1) - &t2) - &t3)
}

/// `x(t) = 4/3·Pr(p2@t) + 8/3·Pr(p3@t)`, worth `(½)ᵗ` on the chain.
pub fn hilbert_x(t: &str) -> Polynomial {
    Polynomial::term(ProbTerm::prop_at("p2", t))
        .scale(&r(4, 3))
        .add(&Polynomial::term(ProbTerm::prop_at("p3", t)).scale(&r(8, 3)))
}

/// `w(t) = 8/3·Pr(p1@t) − 8/3·Pr(p3@t)`, worth `t·(½)ᵗ` on the chain.
pub fn hilbert_w(t: &str) -> Polynomial {
    Polynomial::term(ProbTerm::prop_at("p1", t))
        .scale(&r(8, 3))
        .sub(&Polynomial::term(ProbTerm::prop_at("p3", t)).scale(&r(8, 3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::bilinear_power;

    #[test]
    fn chain_is_stochastic() {
        assert!(hilbert_matrix().is_stochastic());
        assert!(hilbert_f().is_distribution());
    }

    #[test]
    fn derived_vectors() {
        let a = hilbert_matrix();
        let ah = &a - &RMatrix::identity(4).scale(&r(1, 2));
        let g1 = ah.mul_vec(&hilbert_g()).unwrap().scale(&int(2));
        assert_eq!(g1, hilbert_g1());
        let g2: Vec<Rational> = hilbert_g1()
            .iter()
            .zip(hilbert_g().iter())
            .map(|(x, y)| int(2) * x + y)
            .collect();
        assert_eq!(RVector(g2), hilbert_g2());
        // eigenvector for 1/2, and (A - 1/2)^2 g = 0
        assert_eq!(a.mul_vec(&hilbert_g1()).unwrap(), hilbert_g1().scale(&r(1, 2)));
        assert!(ah.mul(&ah).unwrap().mul_vec(&hilbert_g()).unwrap().iter().all(|x| *x == int(0)));
    }

    #[test]
    fn minimal_polynomial_annihilates() {
        let c = hilbert_min_poly();
        assert_eq!(c.len(), 5);
        assert!(hilbert_matrix().eval_poly(&c).unwrap().is_zero());
    }

    #[test]
    fn identities_small_n() {
        let (a, f) = (hilbert_matrix(), hilbert_f());
        for n in 0..8u64 {
            let h = pow(&r(1, 2), n);
            let nn = Rational::from_integer(n.into());
            assert_eq!(bilinear_power(&f, &a, n, &hilbert_g()).unwrap(), &h * (&nn - int(2)));
            assert_eq!(bilinear_power(&f, &a, n, &hilbert_g1()).unwrap(), h.clone());
            assert_eq!(bilinear_power(&f, &a, n, &hilbert_g2()).unwrap(), h * nn);
        }
    }

    #[test]
    fn perron_matches_powers() {
        let a = hilbert_matrix();
        for n in 1..=6 {
            assert_eq!(perron_power(n).unwrap(), a.pow(n).unwrap());
        }
        assert!(matches!(perron_power(0), Err(ReductionError::PerronZero)));
    }

    #[test]
    fn first_step_distribution() {
        let m = hilbert_chain();
        assert_eq!(
            m.time_distribution(1),
            RVector(vec![r(13, 48), r(10, 48), r(4, 48), r(21, 48)])
        );
        assert_eq!(m.enum_paths(1).len(), 9);
    }
}
