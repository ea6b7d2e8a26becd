//! Equivalence-preserving rewrites.
//!
//! * Clock elimination: under the clock semantics an agent's knowledge and
//!   probability operators can be expressed with the operators of a blind
//!   agent together with propositions naming the agent's observations.
//! * On CTLPK formulas, `K[i] φ` is equivalent to `Pr[i](φ) = 1`.

use num::{One, Zero};

use crate::model::{ModelError, Podtmc};
use crate::rational::Rational;

use super::ast::{Formula, ProbTerm, Rel};
use super::is_ctlpk;
use super::poly::{Monomial, Polynomial};

/// Name of the blind agent introduced by clock elimination.
pub const BLIND_AGENT: &str = "bot";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("not CTLPK: {0}")]
    NotCtlpk(String),
    #[error("`{0}` is not supported by clock elimination")]
    Unsupported(String),
    #[error("agent `{0}` exists and is not blind")]
    BlindAgentTaken(String),
    #[error("label `{0}` already exists with a different extension")]
    LabelClash(String),
}

/// Name of the proposition marking states where `agent` sees its `j`-th
/// observation symbol (1-based, symbols in sorted order).
pub fn obs_prop(agent: &str, j: usize) -> String {
    format!("obs_{agent}_{j}")
}

/// Eliminates `K[agent]` and `Pr[agent]` in favour of the blind agent
/// [`BLIND_AGENT`]. Returns the rewritten formula together with the model
/// extended by the blind agent and the observation propositions.
pub fn rewrite_clk_elim(
    f: &Formula,
    m: &Podtmc,
    agent: &str,
) -> Result<(Formula, Podtmc), RewriteError> {
    let alphabet = m.obs_alphabet(agent)?;
    let obs = m.observations(agent)?.to_vec();
    let mut model = m.clone();
    let mut props = Vec::with_capacity(alphabet.len());
    for (j, sym) in alphabet.iter().enumerate() {
        let name = obs_prop(agent, j + 1);
        let mask: Vec<bool> = obs.iter().map(|o| o == sym).collect();
        match model.label(&name) {
            Some(existing) if existing == mask.as_slice() => {}
            Some(_) => return Err(RewriteError::LabelClash(name)),
            None => model = model.with_label(&name, mask)?,
        }
        props.push(name);
    }
    if model.has_agent(BLIND_AGENT) {
        if !model.is_blind(BLIND_AGENT)? {
            return Err(RewriteError::BlindAgentTaken(BLIND_AGENT.into()));
        }
    } else {
        model = model.add_blind_agent(BLIND_AGENT)?;
    }
    let rw = ClkElim { agent, props: &props };
    Ok((rw.formula(f)?, model))
}

struct ClkElim<'a> {
    agent: &'a str,
    props: &'a [String],
}

impl ClkElim<'_> {
    fn formula(&self, f: &Formula) -> Result<Formula, RewriteError> {
        Ok(match f {
            Formula::True | Formula::Prop(_) => f.clone(),
            Formula::Not(a) => Formula::not(self.formula(a)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            Formula::All(a) => Formula::all(self.formula(a)?),
            Formula::Exists(a) => Formula::exists(self.formula(a)?),
            Formula::Next(a) => Formula::next(self.formula(a)?),
            Formula::Until(a, b, k) => Formula::until(self.formula(a)?, self.formula(b)?, *k),
            Formula::Eventually(a, k) => Formula::eventually(self.formula(a)?, *k),
            Formula::Globally(a, k) => Formula::globally(self.formula(a)?, *k),
            Formula::Knows(i, a) if i == self.agent => {
                let body = self.formula(a)?;
                Formula::conj(
                    self.props
                        .iter()
                        .map(|o| {
                            Formula::implies(
                                Formula::prop(o),
                                Formula::knows(
                                    BLIND_AGENT,
                                    Formula::implies(Formula::prop(o), body.clone()),
                                ),
                            )
                        })
                        .collect(),
                )
            }
            Formula::Knows(i, a) => Formula::knows(i, self.formula(a)?),
            Formula::Cmp(p, rel, c) => self.comparison(p, *rel, c)?,
        })
    }

    fn is_own(&self, t: &ProbTerm) -> bool {
        matches!(t, ProbTerm::Pr { agent, .. } if agent == self.agent)
    }

    /// Rewrites the arguments of every term other than the agent's own.
    fn other_term(&self, t: &ProbTerm) -> Result<ProbTerm, RewriteError> {
        Ok(match t {
            ProbTerm::Pr { agent, arg } => ProbTerm::Pr {
                agent: agent.clone(),
                arg: Box::new(self.formula(arg)?),
            },
            ProbTerm::Prior { agent, .. } | ProbTerm::PrAt { agent, .. } if agent == self.agent => {
                return Err(RewriteError::Unsupported(t.to_string()))
            }
            ProbTerm::Prior { agent, arg } => ProbTerm::Prior {
                agent: agent.clone(),
                arg: Box::new(self.formula(arg)?),
            },
            ProbTerm::PrAt { .. } | ProbTerm::PropAt { .. } => {
                return Err(RewriteError::Unsupported(t.to_string()))
            }
        })
    }

    /// `P(Pr_i(ψ_1), …) ⋈ c` becomes, per observation `o`,
    /// `o -> Z^d·P(Pr(o ∧ ψ_1)/Z, …) ⋈ c·Z^d` with `Z = Pr(o)` and `d` the
    /// largest degree in the agent's terms; `Z > 0` wherever `o` holds.
    fn comparison(&self, p: &Polynomial, rel: Rel, c: &Rational) -> Result<Formula, RewriteError> {
        let own_degree = |m: &Monomial| -> u32 {
            m.factors
                .iter()
                .filter(|(t, _)| self.is_own(t))
                .map(|(_, e)| e)
                .sum()
        };
        let d = p.monomials().iter().map(own_degree).max().unwrap_or(0);
        if d == 0 {
            let q = p.substitute(&mut |t| Ok::<_, RewriteError>(Polynomial::term(self.other_term(t)?)))?;
            return Ok(Formula::Cmp(q, rel, c.clone()));
        }
        let mut parts = Vec::with_capacity(self.props.len());
        for o in self.props {
            let obs = Formula::prop(o);
            let z = Polynomial::term(ProbTerm::pr(BLIND_AGENT, obs.clone()));
            let mut acc = Polynomial::zero();
            for mono in p.monomials() {
                let mut prod = Polynomial::constant(mono.coeff.clone());
                for (t, e) in &mono.factors {
                    let base = match t {
                        ProbTerm::Pr { agent, arg } if agent == self.agent => {
                            Polynomial::term(ProbTerm::pr(
                                BLIND_AGENT,
                                Formula::and(obs.clone(), self.formula(arg)?),
                            ))
                        }
                        _ => Polynomial::term(self.other_term(t)?),
                    };
                    prod = prod.mul(&base.pow(*e));
                }
                acc = acc.add(&prod.mul(&z.pow(d - own_degree(mono))));
            }
            let lhs = acc.sub(&z.pow(d).scale(c));
            parts.push(Formula::implies(obs, Formula::Cmp(lhs, rel, Rational::zero())));
        }
        Ok(Formula::conj(parts))
    }
}

/// Replaces every `K[i] ψ` by `Pr[i](ψ) = 1`. Only sound on CTLPK formulas,
/// so anything else is rejected.
pub fn rewrite_k_to_prob(f: &Formula) -> Result<Formula, RewriteError> {
    if !is_ctlpk(f) {
        return Err(RewriteError::NotCtlpk(f.to_string()));
    }
    Ok(k_to_prob(f))
}

fn k_to_prob(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::not(k_to_prob(a)),
        Formula::And(a, b) => Formula::and(k_to_prob(a), k_to_prob(b)),
        Formula::Or(a, b) => Formula::or(k_to_prob(a), k_to_prob(b)),
        Formula::Implies(a, b) => Formula::implies(k_to_prob(a), k_to_prob(b)),
        Formula::All(a) => Formula::all(k_to_prob(a)),
        Formula::Exists(a) => Formula::exists(k_to_prob(a)),
        Formula::Next(a) => Formula::next(k_to_prob(a)),
        Formula::Until(a, b, k) => Formula::until(k_to_prob(a), k_to_prob(b), *k),
        Formula::Eventually(a, k) => Formula::eventually(k_to_prob(a), *k),
        Formula::Globally(a, k) => Formula::globally(k_to_prob(a), *k),
        Formula::Knows(i, a) => Formula::Cmp(
            Polynomial::term(ProbTerm::pr(i, k_to_prob(a))),
            Rel::Eq,
            Rational::one(),
        ),
        Formula::Cmp(p, rel, c) => {
            let q = p
                .substitute(&mut |t| {
                    Ok::<_, ()>(Polynomial::term(match t {
                        ProbTerm::Pr { agent, arg } => ProbTerm::Pr {
                            agent: agent.clone(),
                            arg: Box::new(k_to_prob(arg)),
                        },
                        ProbTerm::Prior { agent, arg } => ProbTerm::Prior {
                            agent: agent.clone(),
                            arg: Box::new(k_to_prob(arg)),
                        },
                        ProbTerm::PrAt { agent, time, arg } => ProbTerm::PrAt {
                            agent: agent.clone(),
                            time: time.clone(),
                            arg: Box::new(k_to_prob(arg)),
                        },
                        ProbTerm::PropAt { .. } => t.clone(),
                    }))
                })
                .expect("infallible");
            Formula::Cmp(q, *rel, c.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    const TWO_OBS: &str = "\
states: s0 s1 s2
init: s0=1/2 s1=1/2
trans: s0 -> s1 : 1
trans: s1 -> s2 : 1/3
trans: s1 -> s0 : 2/3
trans: s2 -> s2 : 1
obs i: s0=a s1=b s2=b
label p: s1
";

    #[test]
    fn knowledge_becomes_one_implication_per_observation() {
        let m = Podtmc::parse(TWO_OBS).unwrap();
        let (f, m2) = rewrite_clk_elim(&parse_formula("K[i] p").unwrap(), &m, "i").unwrap();
        let expected = parse_formula(
            "(obs_i_1 -> K[bot] (obs_i_1 -> p)) & (obs_i_2 -> K[bot] (obs_i_2 -> p))",
        )
        .unwrap();
        assert_eq!(f, expected);
        assert!(m2.is_blind(BLIND_AGENT).unwrap());
        assert_eq!(m2.label("obs_i_2").unwrap(), &[false, true, true]);
    }

    #[test]
    fn probability_comparison_is_cleared_of_denominators() {
        let m = Podtmc::parse(TWO_OBS).unwrap();
        let (f, _) = rewrite_clk_elim(&parse_formula("Pr[i](p) > 1/2").unwrap(), &m, "i").unwrap();
        let expected = parse_formula(
            "(obs_i_1 -> 1*Pr[bot](obs_i_1 & p) - 1/2*Pr[bot](obs_i_1) > 0) \
             & (obs_i_2 -> 1*Pr[bot](obs_i_2 & p) - 1/2*Pr[bot](obs_i_2) > 0)",
        )
        .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn rewriting_is_idempotent_on_the_model() {
        let m = Podtmc::parse(TWO_OBS).unwrap();
        let (_, m2) = rewrite_clk_elim(&Formula::True, &m, "i").unwrap();
        let (_, m3) = rewrite_clk_elim(&Formula::True, &m2, "i").unwrap();
        assert_eq!(m2, m3);
    }

    #[test]
    fn prior_of_the_agent_is_rejected() {
        let m = Podtmc::parse(TWO_OBS).unwrap();
        let f = parse_formula("Prior[i](p) > 0").unwrap();
        assert!(matches!(
            rewrite_clk_elim(&f, &m, "i"),
            Err(RewriteError::Unsupported(_))
        ));
    }

    #[test]
    fn k_to_prob_on_ctlpk() {
        let f = parse_formula("K[i] (p & A X q)").unwrap();
        assert_eq!(
            rewrite_k_to_prob(&f).unwrap(),
            parse_formula("Pr[i](p & A X q) = 1").unwrap()
        );
    }

    #[test]
    fn k_to_prob_rejects_bare_temporal_operators() {
        let f = parse_formula("K[i] F !q").unwrap();
        assert!(matches!(rewrite_k_to_prob(&f), Err(RewriteError::NotCtlpk(_))));
    }
}
