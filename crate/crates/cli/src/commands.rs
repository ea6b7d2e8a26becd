//! One function per subcommand. Each writes its report lines and says
//! whether the query was answered positively.

use std::fs;
use std::path::Path;

use serde_json::json;

use pometh_core::belief::{belief, cell_partition_measures, BeliefError};
use pometh_core::checker::{
    almost_sure_eventually, check, decide_support_query, witness_search, CheckError, CheckOptions,
    Evaluator, Point, SupportKind, SupportPred, Verdict,
};
use pometh_core::formula::{parse_formula, parse_polynomial, parse_query, Formula, FormulaError, MixedTimeAtom, Query};
use pometh_core::model::ModelError;
use pometh_core::pfa::PfaError;
use pometh_core::rational::fmt_rational;
use pometh_core::reductions::{dioph_to_atom, pfa_to_podtmc, skolem_instance, DiophantinePoly, Lrs, ReductionError};
use pometh_core::{ObsData, ObsRecord, Pfa, Podtmc, Semantics};

use crate::report::Report;
use crate::{BeliefsArgs, CheckArgs, DiophArgs, EvalTermArgs, PfaArgs, QualArgs, QualQuery, SkolemArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    ModelFile { path: String, source: ModelError },
    #[error("{path}: {source}")]
    PfaFile { path: String, source: PfaError },
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("{0}")]
    Usage(String),
}

/// Settings shared by all subcommands.
pub struct Ctx {
    pub max_paths: u64,
    pub jobs: usize,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_model(path: &Path) -> Result<Podtmc, CliError> {
    Podtmc::parse(&read(path)?).map_err(|source| CliError::ModelFile {
        path: path.display().to_string(),
        source,
    })
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).collect()
}

fn verdict_line(rep: &mut Report, m: &Podtmc, v: &Verdict) -> bool {
    let j = match v {
        Verdict::Holds => json!({ "verdict": "HOLDS" }),
        Verdict::Fails(p) => {
            let ids: Vec<&str> = p.states().iter().map(|&i| m.state_id(i)).collect();
            json!({ "verdict": "FAILS", "path": ids })
        }
        Verdict::WitnessFound(a) => {
            let pairs: Vec<_> = a.iter().map(|(v, n)| json!([v, n])).collect();
            json!({ "verdict": "WITNESS", "assignment": pairs })
        }
        Verdict::NoWitnessUpTo(b) => json!({ "verdict": "NOWITNESS", "bound": b }),
    };
    rep.line(v.render(m), j);
    v.is_positive()
}

fn need_bound(bound: Option<u64>, what: &str) -> Result<u64, CliError> {
    bound.ok_or_else(|| CliError::Usage(format!("{what} needs --bound")))
}

fn search(rep: &mut Report, ctx: &Ctx, m: &Podtmc, atom: &MixedTimeAtom, bound: u64) -> Result<bool, CliError> {
    let v = witness_search(m, atom, bound, ctx.jobs)?;
    Ok(verdict_line(rep, m, &v))
}

fn emit(rep: &mut Report, m: &Podtmc, query: &str) {
    rep.raw(&m.to_text());
    rep.line(format!("# query: {query}"), json!({ "query": query }));
}

pub fn check_cmd(a: &CheckArgs, ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let m = load_model(&a.model)?;
    match parse_query(&a.formula)? {
        Query::Formula(f) => {
            let sem = a
                .semantics
                .ok_or_else(|| CliError::Usage("formula queries need --semantics".into()))?;
            let opts = CheckOptions {
                max_paths: ctx.max_paths,
                horizon: a.horizon,
            };
            let v = check(&m, sem, &f, opts)?;
            Ok(verdict_line(rep, &m, &v))
        }
        Query::Mixed(atom) => search(rep, ctx, &m, &atom, need_bound(a.bound, "a mixed-time atom")?),
    }
}

pub fn eval_term_cmd(a: &EvalTermArgs, ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let m = load_model(&a.model)?;
    let poly = parse_polynomial(&a.term)?;
    let path = m.path_by_ids(&split_list(&a.path))?;
    let time = a.time.unwrap_or(path.transitions());
    let pt = Point::new(path, time)?;
    let ev = Evaluator::new(&m, a.semantics).with_max_paths(ctx.max_paths);
    let v = poly.eval(&mut |t| ev.prob(t, pt.path().states(), pt.time()))?;
    let s = fmt_rational(&v);
    rep.line(format!("VALUE {s}"), json!({ "value": s }));
    Ok(true)
}

pub fn beliefs_cmd(a: &BeliefsArgs, _ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let m = load_model(&a.model)?;
    let records: Vec<ObsRecord> = match (&a.history, &a.obs) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --history or --obs, not both".into())),
        (Some(h), None) => {
            if a.semantics != Semantics::Spr {
                return Err(CliError::Usage("--history is an spr observation record".into()));
            }
            let rec = ObsRecord::spr(&a.agent, split_list(h));
            if a.time.is_some_and(|t| t != rec.time) {
                return Err(CliError::Usage("--time disagrees with the history length".into()));
            }
            vec![rec]
        }
        (None, Some(o)) => {
            if a.semantics != Semantics::Clk {
                return Err(CliError::Usage("--obs is a clk observation record".into()));
            }
            let t = a.time.ok_or_else(|| CliError::Usage("--obs needs --time".into()))?;
            vec![ObsRecord::clk(&a.agent, t, o.as_str())]
        }
        (None, None) => {
            let t = a.time.ok_or_else(|| CliError::Usage("beliefs needs --time".into()))?;
            cell_partition_measures(&m, &a.agent, a.semantics, t)?
                .into_keys()
                .map(|d| match d {
                    ObsData::History(h) => ObsRecord::spr(&a.agent, h),
                    ObsData::Current(o) => ObsRecord::clk(&a.agent, t, o),
                })
                .collect()
        }
    };
    for rec in records {
        let b = belief(&m, &rec)?;
        let measure = fmt_rational(&b.cell_measure);
        let mut plain = format!("CELL obs={} measure={measure}", rec.data);
        let mut dist = serde_json::Map::new();
        for (i, p) in b.dist.iter().enumerate() {
            plain.push_str(&format!(" {}={}", m.state_id(i), fmt_rational(p)));
            dist.insert(m.state_id(i).to_string(), json!(fmt_rational(p)));
        }
        let obs = match &rec.data {
            ObsData::History(h) => json!(h),
            ObsData::Current(o) => json!(o),
        };
        rep.line(
            plain,
            json!({ "time": rec.time, "obs": obs, "measure": measure, "belief": dist }),
        );
    }
    Ok(true)
}

pub fn reduce_pfa_cmd(a: &PfaArgs, ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let text = read(&a.pfa)?;
    let pfa = Pfa::parse(&text).map_err(|source| CliError::PfaFile {
        path: a.pfa.display().to_string(),
        source,
    })?;
    let r = pfa_to_podtmc(&pfa)?;
    if a.emit {
        emit(rep, &r.model, &r.formula(a.horizon).to_string());
        if a.horizon.is_none() {
            return Ok(true);
        }
    }
    let h = a
        .horizon
        .ok_or_else(|| CliError::Usage("reduce-pfa needs --horizon to check, or --emit".into()))?;
    let opts = CheckOptions {
        max_paths: ctx.max_paths,
        horizon: None,
    };
    let v = check(&r.model, Semantics::Spr, &r.formula(Some(h)), opts)?;
    Ok(verdict_line(rep, &r.model, &v))
}

pub fn reduce_dioph_cmd(a: &DiophArgs, ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let p = DiophantinePoly::parse(&a.poly)?;
    let (m, atom) = dioph_to_atom(&p);
    if a.emit {
        emit(rep, &m, &atom.to_string());
        if a.bound.is_none() {
            return Ok(true);
        }
    }
    search(rep, ctx, &m, &atom, need_bound(a.bound, "reduce-dioph")?)
}

pub fn skolem_cmd(a: &SkolemArgs, ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let s = Lrs::parse(&a.coeffs, &a.init)?;
    let inst = skolem_instance(&s)?;
    if a.emit {
        emit(rep, &inst.model, &inst.atom.to_string());
        if a.bound.is_none() {
            return Ok(true);
        }
    }
    search(rep, ctx, &inst.model, &inst.atom, need_bound(a.bound, "skolem")?)
}

pub fn qualitative_cmd(a: &QualArgs, _ctx: &Ctx, rep: &mut Report) -> Result<bool, CliError> {
    let m = load_model(&a.model)?;
    let target = parse_formula(&a.prop)?;
    let support = |kind, pred| -> Result<bool, CliError> {
        match &target {
            Formula::Prop(p) => Ok(decide_support_query(&m, kind, pred, p)?),
            _ => Err(CliError::Usage("support queries take a single proposition".into())),
        }
    };
    let answer = match a.query {
        QualQuery::AlmostSureEventually => almost_sure_eventually(&m, &target)?,
        QualQuery::ExistsZero => support(SupportKind::Exists, SupportPred::Zero)?,
        QualQuery::ExistsPositive => support(SupportKind::Exists, SupportPred::Positive)?,
        QualQuery::ForallZero => support(SupportKind::Forall, SupportPred::Zero)?,
        QualQuery::ForallPositive => support(SupportKind::Forall, SupportPred::Positive)?,
    };
    rep.line(if answer { "TRUE" } else { "FALSE" }, json!({ "answer": answer }));
    Ok(answer)
}
