//! Probabilistic finite automata with a cut-point.
//!
//! File format (same conventions as the model format):
//!
//! ```text
//! states: q0 q1
//! letters: a b
//! init: q0=1
//! trans[a]: q0 -> q1 : 1/2
//! finals: q1
//! cutpoint: 1/2
//! ```

use std::collections::{BTreeMap, HashMap};

use num::{One, Signed, Zero};

use crate::matrix::{RMatrix, RVector};
use crate::model::{is_id, split_header, strip_comment, tokens_with_cols, LineCtx, ModelError};
use crate::rational::{fmt_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pfa {
    states: Vec<String>,
    alphabet: Vec<String>,
    init: RVector,
    letters: BTreeMap<String, RMatrix>,
    finals: Vec<bool>,
    cutpoint: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PfaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("letter `{letter}`: row `{state}` not stochastic (sum = {sum})")]
    LetterNotStochastic {
        letter: String,
        state: String,
        sum: String,
    },
    #[error("cut-point must lie strictly between 0 and 1, got {0}")]
    CutpointRange(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("acceptance weight is defined for nonempty words only")]
    EmptyWord,
    #[error("alphabet is empty")]
    EmptyAlphabet,
}

impl Pfa {
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<String>,
        init: RVector,
        letters: BTreeMap<String, RMatrix>,
        finals: Vec<bool>,
        cutpoint: Rational,
    ) -> Result<Self, PfaError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::Empty.into());
        }
        if alphabet.is_empty() {
            return Err(PfaError::EmptyAlphabet);
        }
        if init.len() != n || finals.len() != n {
            return Err(ModelError::InvalidPath("PFA dimension mismatch".into()).into());
        }
        if init.iter().any(Signed::is_negative) || !init.sum().is_one() {
            return Err(ModelError::InitNotDistribution(fmt_rational(&init.sum())).into());
        }
        for a in &alphabet {
            let m = letters
                .get(a)
                .ok_or_else(|| PfaError::UnknownLetter(a.clone()))?;
            if m.rows() != n || m.cols() != n {
                return Err(ModelError::InvalidPath(format!("letter `{a}` has wrong shape")).into());
            }
            for (i, s) in states.iter().enumerate() {
                let sum = m.row_sum(i);
                if !sum.is_one() || m.row(i).iter().any(Signed::is_negative) {
                    return Err(PfaError::LetterNotStochastic {
                        letter: a.clone(),
                        state: s.clone(),
                        sum: fmt_rational(&sum),
                    });
                }
            }
        }
        if letters.len() != alphabet.len() {
            let extra = letters
                .keys()
                .find(|k| !alphabet.contains(k))
                .cloned()
                .unwrap_or_default();
            return Err(PfaError::UnknownLetter(extra));
        }
        if !cutpoint.is_positive() || cutpoint >= Rational::one() {
            return Err(PfaError::CutpointRange(fmt_rational(&cutpoint)));
        }
        Ok(Pfa {
            states,
            alphabet,
            init,
            letters,
            finals,
            cutpoint,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn init(&self) -> &RVector {
        &self.init
    }

    pub fn letter(&self, a: &str) -> Option<&RMatrix> {
        self.letters.get(a)
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn cutpoint(&self) -> &Rational {
        &self.cutpoint
    }

    /// The 0/1 column vector of final states.
    pub fn final_vector(&self) -> RVector {
        RVector(
            self.finals
                .iter()
                .map(|&f| if f { Rational::one() } else { Rational::zero() })
                .collect(),
        )
    }

    /// `μ0·Δ(a_1)·…·Δ(a_n)` for a possibly empty word.
    pub fn distribution_after<S: AsRef<str>>(&self, word: &[S]) -> Result<RVector, PfaError> {
        let mut v = self.init.clone();
        for a in word {
            let m = self
                .letters
                .get(a.as_ref())
                .ok_or_else(|| PfaError::UnknownLetter(a.as_ref().to_string()))?;
            v = v.mul_mat(m).expect("shapes validated");
        }
        Ok(v)
    }

    /// Acceptance weight `f(w) = μ0·Δ(a_1)·…·Δ(a_n)·v_F` of a nonempty word.
    pub fn accept_weight<S: AsRef<str>>(&self, word: &[S]) -> Result<Rational, PfaError> {
        if word.is_empty() {
            return Err(PfaError::EmptyWord);
        }
        let v = self.distribution_after(word)?;
        Ok(v.dot(&self.final_vector()).expect("shapes validated"))
    }

    pub fn parse(text: &str) -> Result<Pfa, PfaError> {
        parse_pfa(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "states: {}\nletters: {}\n",
            self.states.join(" "),
            self.alphabet.join(" ")
        );
        let init: Vec<String> = self
            .init
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| format!("{}={}", self.states[i], fmt_rational(p)))
            .collect();
        out.push_str(&format!("init: {}\n", init.join(" ")));
        for a in &self.alphabet {
            let m = &self.letters[a];
            for i in 0..self.states.len() {
                for (j, p) in m.row(i).iter().enumerate() {
                    if !p.is_zero() {
                        out.push_str(&format!(
                            "trans[{a}]: {} -> {} : {}\n",
                            self.states[i],
                            self.states[j],
                            fmt_rational(p)
                        ));
                    }
                }
            }
        }
        let finals: Vec<&str> = self
            .finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| self.states[i].as_str())
            .collect();
        out.push_str(&format!("finals: {}\n", finals.join(" ")));
        out.push_str(&format!("cutpoint: {}\n", fmt_rational(&self.cutpoint)));
        out
    }
}

/// Acceptance weight of a nonempty word.
pub fn pfa_accept_weight<S: AsRef<str>>(a: &Pfa, word: &[S]) -> Result<Rational, PfaError> {
    a.accept_weight(word)
}

pub fn parse_pfa(text: &str) -> Result<Pfa, PfaError> {
    let mut states: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut alphabet: Vec<String> = Vec::new();
    let mut init: Option<RVector> = None;
    let mut letters: BTreeMap<String, RMatrix> = BTreeMap::new();
    let mut finals: Option<Vec<bool>> = None;
    let mut cutpoint: Option<Rational> = None;

    for (ln, raw) in text.lines().enumerate() {
        let ctx = LineCtx {
            line_no: ln + 1,
            line: raw,
        };
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (head, body, body_col) =
            split_header(line).ok_or_else(|| ctx.err(1, "expected `<section>: ...`"))?;
        let lookup = |index: &HashMap<String, usize>, col: usize, id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ctx.err(col, format!("unknown state `{id}`")))
        };
        if head != "states" && states.is_empty() {
            return Err(ctx.err(1, "`states:` must come first").into());
        }
        if let Some(letter) = head.strip_prefix("trans[").and_then(|r| r.strip_suffix(']')) {
            if !alphabet.iter().any(|a| a == letter) {
                return Err(ctx.err(1, format!("unknown letter `{letter}`")).into());
            }
            let (edge, prob) = body
                .rsplit_once(':')
                .ok_or_else(|| ctx.err(body_col, "expected `src -> dst : p`"))?;
            let (src, dst) = edge
                .split_once("->")
                .ok_or_else(|| ctx.err(body_col, "expected `->`"))?;
            let i = lookup(&index, body_col, src.trim())?;
            let j = lookup(&index, body_col, dst.trim())?;
            let p = ctx.rational(body_col + edge.len() + 1, prob.trim())?;
            let n = states.len();
            let m = letters
                .entry(letter.to_string())
                .or_insert_with(|| RMatrix::zeros(n, n));
            if !m[(i, j)].is_zero() {
                return Err(ctx.err(body_col, "duplicate transition").into());
            }
            m[(i, j)] = p;
            continue;
        }
        match head {
            "states" => {
                if !states.is_empty() {
                    return Err(ctx.err(1, "duplicate `states:` line").into());
                }
                for (col, tok) in tokens_with_cols(body) {
                    if !is_id(tok) {
                        return Err(ctx.err(col + body_col - 1, "invalid state id").into());
                    }
                    if index.insert(tok.to_string(), states.len()).is_some() {
                        return Err(ModelError::DuplicateState(tok.to_string()).into());
                    }
                    states.push(tok.to_string());
                }
            }
            "letters" => {
                for (col, tok) in tokens_with_cols(body) {
                    if !is_id(tok) || alphabet.iter().any(|a| a == tok) {
                        return Err(ctx.err(col + body_col - 1, format!("bad letter `{tok}`")).into());
                    }
                    alphabet.push(tok.to_string());
                }
                let n = states.len();
                for a in &alphabet {
                    letters
                        .entry(a.clone())
                        .or_insert_with(|| RMatrix::zeros(n, n));
                }
            }
            "init" => {
                let mut v = RVector::zeros(states.len());
                for (col, k, val) in ctx.assignments(body, body_col)? {
                    let i = lookup(&index, col, &k)?;
                    v[i] = ctx.rational(col, &val)?;
                }
                init = Some(v);
            }
            "finals" => {
                let mut f = vec![false; states.len()];
                for (col, tok) in tokens_with_cols(body) {
                    f[lookup(&index, col + body_col - 1, tok)?] = true;
                }
                finals = Some(f);
            }
            "cutpoint" => {
                cutpoint = Some(ctx.rational(body_col, body.trim())?);
            }
            _ => return Err(ctx.err(1, format!("unknown section `{head}`")).into()),
        }
    }
    let n = states.len();
    Pfa::new(
        states,
        alphabet,
        init.unwrap_or_else(|| RVector::zeros(n)),
        letters,
        finals.unwrap_or_else(|| vec![false; n]),
        cutpoint.ok_or_else(|| ModelError::Syntax {
            line: 0,
            col: 0,
            msg: "missing `cutpoint:`".into(),
        })?,
    )
}
