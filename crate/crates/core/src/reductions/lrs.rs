//! Linear recurrence sequences, their matrix form, and Skolem instances.
//!
//! Recurrence convention: `u_n = a_1·u_{n−1} + … + a_k·u_{n−k}` for `n ≥ k`,
//! with `u_0 … u_{k−1}` given.

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::formula::{MixedTimeAtom, Polynomial, ProbTerm, Rel};
use crate::matrix::{RMatrix, RVector};
use crate::model::{Podtmc, BLIND_SYMBOL};
use crate::rational::{common_denominator, fmt_rational, parse_rational, Rational};

use super::ReductionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lrs {
    coeffs: Vec<Rational>,
    init: Vec<Rational>,
}

impl Lrs {
    /// `coeffs = (a_1, …, a_k)` with `a_k ≠ 0`, `init = (u_0, …, u_{k−1})`.
    pub fn new(coeffs: Vec<Rational>, init: Vec<Rational>) -> Result<Self, ReductionError> {
        if coeffs.is_empty() {
            return Err(ReductionError::InvalidLrs("order must be at least 1".into()));
        }
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(ReductionError::InvalidLrs("last coefficient must be nonzero".into()));
        }
        if init.len() != coeffs.len() {
            return Err(ReductionError::InvalidLrs(format!(
                "order {} needs {} initial terms, got {}",
                coeffs.len(),
                coeffs.len(),
                init.len()
            )));
        }
        Ok(Lrs { coeffs, init })
    }

    /// Parses comma-separated rationals for coefficients and initial terms.
    pub fn parse(coeffs: &str, init: &str) -> Result<Self, ReductionError> {
        let list = |s: &str| -> Result<Vec<Rational>, ReductionError> {
            s.split(',')
                .map(|x| parse_rational(x.trim()).map_err(|e| ReductionError::Parse(e.to_string())))
                .collect()
        };
        Lrs::new(list(coeffs)?, list(init)?)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn init(&self) -> &[Rational] {
        &self.init
    }

    /// `u_0 … u_{n}` by direct recurrence.
    pub fn terms(&self, n: usize) -> Vec<Rational> {
        let k = self.order();
        let mut u: Vec<Rational> = self.init.iter().take(n + 1).cloned().collect();
        while u.len() <= n {
            let m = u.len();
            let next = (1..=k).map(|i| &self.coeffs[i - 1] * &u[m - i]).sum();
            u.push(next);
        }
        u
    }
}

/// `u_n` by direct recurrence.
pub fn lrs_term(s: &Lrs, n: usize) -> Rational {
    s.terms(n).pop().expect("n+1 terms")
}

/// Companion form `(C, v, w)` with `vᵀ Cⁿ w = u_n` for all `n ≥ 0`: `w`
/// holds the initial terms and `C` shifts the window `(u_n, …, u_{n+k−1})`
/// one step forward.
pub fn lrs_to_matrix(s: &Lrs) -> (RMatrix, RVector, RVector) {
    let k = s.order();
    let mut c = RMatrix::zeros(k, k);
    for i in 0..k - 1 {
        c[(i, i + 1)] = Rational::one();
    }
    for j in 0..k {
        // last row produces u_{n+k} from the window
        c[(k - 1, j)] = s.coeffs[k - 1 - j].clone();
    }
    (c, RVector::unit(k, 0), RVector(s.init.clone()))
}

/// Stochastic encoding of one entry of an integer matrix's powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticInstance {
    pub b: RMatrix,
    /// Initial distribution (a unit vector).
    pub v: RVector,
    /// 0/1 indicator of the observed state.
    pub w: RVector,
    pub c: Rational,
    /// `α` in `vᵀBⁿw = c + ½·αⁿ·(Aⁿ)_{i0,j0}`.
    pub alpha: Rational,
}

/// For an integer `k×k` matrix `A`, builds a stochastic `2k×2k` matrix `B`
/// with `vᵀBⁿw = c + ½·αⁿ·(Aⁿ)_{i0,j0}` for all `n ≥ 1`, where `c = 1/(2k)`
/// and `α = 1/(kt)`, `t = max(1, max|A_ij|)`.
///
/// Construction: `D = [[A, −A], [−A, A]]` has zero row and column sums and
/// `Dⁿ = 2ⁿ⁻¹·[[Aⁿ, −Aⁿ], [−Aⁿ, Aⁿ]]`. With `J` the all-ones matrix,
/// `DJ = JD = 0`, so `(D + tJ)ⁿ = Dⁿ + tⁿ(2k)ⁿ⁻¹J`; dividing by `2kt` gives a
/// stochastic matrix whose powers are `Dⁿ/(2kt)ⁿ + J/(2k)`.
pub fn integer_matrix_to_stochastic(
    a: &RMatrix,
    i0: usize,
    j0: usize,
) -> Result<StochasticInstance, ReductionError> {
    if !a.is_square() {
        return Err(ReductionError::NotSquare);
    }
    let k = a.rows();
    for (idx, which) in [(i0, "row"), (j0, "column")] {
        if idx >= k {
            return Err(ReductionError::IndexOutOfRange(format!("{which} {idx} of a {k}x{k} matrix")));
        }
    }
    let mut t = BigInt::one();
    for i in 0..k {
        for j in 0..k {
            let x = &a[(i, j)];
            if !x.is_integer() {
                return Err(ReductionError::NotInteger { row: i, col: j });
            }
            t = t.max(x.to_integer().abs());
        }
    }
    let t = Rational::from_integer(t);
    let two_k = Rational::from_integer(BigInt::from(2 * k));
    let scale = Rational::one() / (&two_k * &t);
    let mut b = RMatrix::zeros(2 * k, 2 * k);
    for bi in 0..2 {
        for bj in 0..2 {
            let sign = if bi == bj { Rational::one() } else { -Rational::one() };
            for i in 0..k {
                for j in 0..k {
                    b[(bi * k + i, bj * k + j)] = (&sign * &a[(i, j)] + &t) * &scale;
                }
            }
        }
    }
    debug_assert!(b.is_stochastic());
    Ok(StochasticInstance {
        b,
        v: RVector::unit(2 * k, i0),
        w: RVector::unit(2 * k, j0),
        c: Rational::one() / two_k,
        alpha: Rational::one() / (Rational::from_integer(BigInt::from(k)) * t),
    })
}

/// A Skolem instance as a model-checking query.
#[derive(Debug, Clone)]
pub struct SkolemInstance {
    pub model: Podtmc,
    pub atom: MixedTimeAtom,
    /// Integer matrix `A'` with `(A'ⁿ)_{0,k}` a positive multiple of `u_n`
    /// for `n ≥ 1`.
    pub integer_matrix: RMatrix,
    pub stochastic: StochasticInstance,
}

/// Proposition marking the observed state of a Skolem instance.
pub const SKOLEM_PROP: &str = "p";

/// Agent of the Skolem instance (blind).
pub const SKOLEM_AGENT: &str = "i";

/// Encodes "`u_n = 0` for some `n`" as `∃t (Pr(p@t) = c)`.
///
/// Denominators are cleared first (`û_n = L·Dⁿ·u_n` satisfies an integer
/// recurrence with the same zeros). Then `A' = [[C, C·ŵ], [0, 0]]` has
/// `(A'ⁿ)_{0,k} = û_n` for `n ≥ 1`, and its stochastic encoding is wrapped
/// as a blind-agent model. Time 0 never satisfies the atom (`c` is neither 0
/// nor 1); for `n ≥ 1`, `Pr(p@n) = c` iff `u_n = 0`.
pub fn skolem_instance(s: &Lrs) -> Result<SkolemInstance, ReductionError> {
    let k = s.order();
    let d = Rational::from_integer(common_denominator(s.coeffs()));
    let l = Rational::from_integer(common_denominator(s.init()));
    let mut dpow = Rational::one();
    let mut coeffs = Vec::with_capacity(k);
    let mut init = Vec::with_capacity(k);
    for j in 0..k {
        init.push(&l * &dpow * &s.init()[j]);
        dpow *= &d;
        coeffs.push(&s.coeffs()[j] * &dpow);
    }
    let cleared = Lrs::new(coeffs, init)?;
    let (c, _, w) = lrs_to_matrix(&cleared);
    let y = c.mul_vec(&w)?;
    let mut a = RMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = c[(i, j)].clone();
        }
        a[(i, k)] = y[i].clone();
    }
    let inst = integer_matrix_to_stochastic(&a, 0, k)?;
    let n = inst.b.rows();
    let states: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
    let marked: Vec<String> = (0..n)
        .filter(|&i| !inst.w[i].is_zero())
        .map(|i| states[i].clone())
        .collect();
    let model = Podtmc::new(
        states,
        inst.v.clone(),
        inst.b.clone(),
        vec![(SKOLEM_AGENT.into(), vec![BLIND_SYMBOL.into(); n])],
        vec![(SKOLEM_PROP.into(), marked)],
    )?;
    let atom = MixedTimeAtom {
        time_vars: vec!["t".into()],
        poly: Polynomial::term(ProbTerm::prop_at(SKOLEM_PROP, "t")),
        rel: Rel::Eq,
        rhs: inst.c.clone(),
    };
    Ok(SkolemInstance {
        model,
        atom,
        integer_matrix: a,
        stochastic: inst,
    })
}

impl std::fmt::Display for Lrs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(",");
        write!(f, "coeffs={} init={}", join(&self.coeffs), join(&self.init))
    }
}
