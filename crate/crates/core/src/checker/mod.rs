//! Model checking: exact bounded evaluation, qualitative decisions for
//! unbounded operators, and bounded witness search for mixed-time atoms.

mod eval;
pub mod qualitative;
mod witness;

use std::fmt;

use crate::belief::{Semantics, DEFAULT_MAX_PATHS};
use crate::formula::{dependence_horizon, is_state_formula, Bound, Formula, Horizon};
use crate::model::{FinitePath, ModelError, Podtmc};

pub use eval::{eval_point, eval_prob_term, Evaluator, Point};
pub use qualitative::{
    almost_sure_eventually, almost_sure_until, decide_support_query, support_lasso, SupportKind,
    SupportPred,
};
pub use witness::{eval_atom_at, witness_search};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "no qualitative reading for {0}: exact evaluation of unbounded operators is \
         undecidable in general; use a qualitative form or give a horizon"
    )]
    Unbounded(String),
    #[error("run prefix too short: need {needed} states, have {have}")]
    RunNotDetermined { needed: usize, have: usize },
    #[error("path enumeration bound exceeded (limit {0})")]
    EnumerationBound(u64),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("time-indexed term `{0}` outside a mixed-time atom")]
    TimeTerm(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The formula fails on a run through this prefix.
    Fails(FinitePath),
    WitnessFound(Vec<(String, u64)>),
    /// No witness (or no confirmation) with all times up to the bound.
    NoWitnessUpTo(u64),
}

impl Verdict {
    /// True for `Holds` and `WitnessFound`.
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Holds | Verdict::WitnessFound(_))
    }

    /// Single-line record, e.g. `FAILS pt=s0,s1` or `WITNESS t1=2`.
    pub fn render(&self, m: &Podtmc) -> String {
        self.render_with(&|p| m.format_path(p))
    }

    fn render_with(&self, path: &dyn Fn(&FinitePath) -> String) -> String {
        match self {
            Verdict::Holds => "HOLDS".into(),
            Verdict::Fails(p) => format!("FAILS pt={}", path(p)),
            Verdict::WitnessFound(a) => {
                let parts: Vec<String> = a.iter().map(|(v, n)| format!("{v}={n}")).collect();
                format!("WITNESS {}", parts.join(" "))
            }
            Verdict::NoWitnessUpTo(b) => format!("NOWITNESS bound={b}"),
        }
    }
}

/// Like [`Verdict::render`], with failing paths shown as state indices.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|p| {
            let idx: Vec<String> = p.states().iter().map(|i| format!("#{i}")).collect();
            idx.join(",")
        }))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub max_paths: u64,
    /// Bound used to under-approximate unbounded operators that have no
    /// qualitative reading. `None` refuses such formulas.
    pub horizon: Option<u32>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_paths: DEFAULT_MAX_PATHS,
            horizon: None,
        }
    }
}

/// Checks `f` at every time-0 point of `m`.
///
/// Bounded formulas are decided exactly. Unbounded ones are first tried as
/// qualitative (graph-decidable) queries; failing that, and only if
/// `opts.horizon` is set, unbounded eventualities in positive positions are
/// cut to the horizon. That under-approximation can confirm the formula
/// (`Holds`) but never refute it (`NoWitnessUpTo`).
pub fn check(m: &Podtmc, sem: Semantics, f: &Formula, opts: CheckOptions) -> Result<Verdict, CheckError> {
    match dependence_horizon(f) {
        Horizon::Bounded(h) => check_bounded(m, sem, f, h as usize, opts.max_paths),
        Horizon::Unbounded => {
            let ev = Evaluator::new(m, sem).with_max_paths(opts.max_paths);
            let q = qualitative::Qualitative { ev: &ev };
            let lifted;
            let state_form = if is_state_formula(f) {
                f
            } else {
                lifted = Formula::all(f.clone());
                &lifted
            };
            let mut verdict = Ok(Verdict::Holds);
            for s in m.init_support() {
                match q.state(state_form, s) {
                    Ok(true) => {}
                    Ok(false) => {
                        verdict = Ok(Verdict::Fails(m.path(vec![s])?));
                        break;
                    }
                    Err(e) => {
                        verdict = Err(e);
                        break;
                    }
                }
            }
            match (verdict, opts.horizon) {
                (Ok(v), _) => Ok(v),
                (Err(CheckError::Unsupported(_) | CheckError::Unbounded(_)), Some(h)) => {
                    let approx = under_approx(f, h, true)?;
                    let bound = dependence_horizon(&approx)
                        .bounded()
                        .expect("all unbounded operators were cut");
                    match check_bounded(m, sem, &approx, bound as usize, opts.max_paths)? {
                        Verdict::Holds => Ok(Verdict::Holds),
                        _ => Ok(Verdict::NoWitnessUpTo(u64::from(h))),
                    }
                }
                (Err(CheckError::Unsupported(msg)), None) => Err(CheckError::Unbounded(msg)),
                (Err(e), _) => Err(e),
            }
        }
    }
}

fn check_bounded(
    m: &Podtmc,
    sem: Semantics,
    f: &Formula,
    h: usize,
    max_paths: u64,
) -> Result<Verdict, CheckError> {
    let ev = Evaluator::new(m, sem).with_max_paths(max_paths);
    if is_state_formula(f) {
        for s in m.init_support() {
            if !ev.eval(f, &[s], 0)? {
                return Ok(Verdict::Fails(m.path(vec![s])?));
            }
        }
        return Ok(Verdict::Holds);
    }
    let count = m.count_paths(h);
    if count > u128::from(max_paths) {
        return Err(CheckError::EnumerationBound(max_paths));
    }
    for p in m.enum_paths(h) {
        if !ev.eval(f, p.states(), 0)? {
            return Ok(Verdict::Fails(p));
        }
    }
    Ok(Verdict::Holds)
}

/// Replaces unbounded `F`/`U` in positive and `G` in negative positions by
/// their `<= h` versions, giving a formula that implies `f`. Anything else
/// unbounded (including inside probability comparisons, whose polarity is
/// unknown) is rejected.
fn under_approx(f: &Formula, h: u32, pos: bool) -> Result<Formula, CheckError> {
    let cut = |b: &Bound, ok: bool| -> Result<Bound, CheckError> {
        match b {
            Bound::Within(k) => Ok(Bound::Within(*k)),
            Bound::Unbounded if ok => Ok(Bound::Within(h)),
            Bound::Unbounded => Err(CheckError::Unbounded(f.to_string())),
        }
    };
    Ok(match f {
        Formula::True | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::not(under_approx(a, h, !pos)?),
        Formula::And(a, b) => Formula::and(under_approx(a, h, pos)?, under_approx(b, h, pos)?),
        Formula::Or(a, b) => Formula::or(under_approx(a, h, pos)?, under_approx(b, h, pos)?),
        Formula::Implies(a, b) => {
            Formula::implies(under_approx(a, h, !pos)?, under_approx(b, h, pos)?)
        }
        Formula::All(a) => Formula::all(under_approx(a, h, pos)?),
        Formula::Exists(a) => Formula::exists(under_approx(a, h, pos)?),
        Formula::Next(a) => Formula::next(under_approx(a, h, pos)?),
        Formula::Knows(i, a) => Formula::knows(i, under_approx(a, h, pos)?),
        Formula::Until(a, b, k) => Formula::until(
            under_approx(a, h, pos)?,
            under_approx(b, h, pos)?,
            cut(k, pos)?,
        ),
        Formula::Eventually(a, k) => Formula::eventually(under_approx(a, h, pos)?, cut(k, pos)?),
        Formula::Globally(a, k) => Formula::globally(under_approx(a, h, pos)?, cut(k, !pos)?),
        Formula::Cmp(..) => match dependence_horizon(f) {
            Horizon::Bounded(_) => f.clone(),
            Horizon::Unbounded => return Err(CheckError::Unbounded(f.to_string())),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    const FIG: &str = "\
states: s u
init: s=1
trans: s -> s : 1/2
trans: s -> u : 1/2
trans: u -> u : 1
obs i: s=o u=o
label q: s
";

    fn run(src: &str, f: &str, horizon: Option<u32>) -> Result<Verdict, CheckError> {
        let m = Podtmc::parse(src).unwrap();
        check(
            &m,
            Semantics::Clk,
            &parse_formula(f).unwrap(),
            CheckOptions {
                horizon,
                ..CheckOptions::default()
            },
        )
    }

    #[test]
    fn trivial_and_point_mass() {
        assert_eq!(run(FIG, "true", None).unwrap(), Verdict::Holds);
        assert_eq!(run(FIG, "Pr[i](q) = 1", None).unwrap(), Verdict::Holds);
    }

    #[test]
    fn failing_path_is_reported() {
        let m = Podtmc::parse(FIG).unwrap();
        let v = check(&m, Semantics::Spr, &parse_formula("X X q").unwrap(), CheckOptions::default())
            .unwrap();
        assert_eq!(v.render(&m), "FAILS pt=s,s,u");
    }

    #[test]
    fn figure_qualitative() {
        assert!(matches!(run(FIG, "K[i] F !q", None).unwrap(), Verdict::Fails(_)));
        assert_eq!(run(FIG, "Pr[i](F !q) = 1", None).unwrap(), Verdict::Holds);
        assert!(matches!(run(FIG, "G q", None).unwrap(), Verdict::Fails(_)));
    }

    #[test]
    fn unbounded_without_qualitative_reading_needs_horizon() {
        // almost sure, so any threshold below 1 is decided qualitatively
        assert_eq!(run(FIG, "Pr[i](F !q) > 1/2", None).unwrap(), Verdict::Holds);
        let split = "states: a b c\ninit: a=1\ntrans: a -> b : 1/3\ntrans: a -> c : 2/3\n\
                     trans: b -> b : 1\ntrans: c -> c : 1\nobs i: a=o b=o c=o\nlabel g: b\n";
        let f = "Pr[i](F g) > 1/2";
        assert!(matches!(run(split, f, None), Err(CheckError::Unbounded(_))));
        // not monotone under cutting (inside a comparison)
        assert!(matches!(run(split, f, Some(4)), Err(CheckError::Unbounded(_))));
        // E X F(...) has no graph reading here; the cut version confirms it
        assert_eq!(run(FIG, "E X (Pr[i](q) < 1 & F !q)", Some(3)).unwrap(), Verdict::Holds);
        assert_eq!(
            run(FIG, "E X (Pr[i](q) = 1 & F !q)", Some(3)).unwrap(),
            Verdict::NoWitnessUpTo(3)
        );
    }

    #[test]
    fn verdict_records() {
        assert_eq!(Verdict::Holds.to_string(), "HOLDS");
        assert_eq!(
            Verdict::WitnessFound(vec![("t1".into(), 2), ("t2".into(), 0)]).to_string(),
            "WITNESS t1=2 t2=0"
        );
        assert_eq!(Verdict::NoWitnessUpTo(32).to_string(), "NOWITNESS bound=32");
    }
}
