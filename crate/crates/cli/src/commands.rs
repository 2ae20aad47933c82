//! One record type per subcommand, each rendering to JSON, CSV, and an
//! aligned table. CSV rows carry the same numbers as the JSON record.

use std::path::PathBuf;

use serde::Serialize;

use relgrowth::{
    breakdown, classify, parse_model, parse_scale, rel_order, rel_type, rel_weak_type,
    run_suite, standard_catalog, transition, CatalogPair, ConvergenceVerdict, Divergence,
    EquivalenceReport, GridSpec, IndicatorEstimate, NevanlinnaBreakdown, PairRow,
    RowStatus, TransitionResult, Verdict,
};

use crate::output::{flag, num, opt_num, stamp, write_out, Format};

#[derive(Debug)]
pub enum Failure {
    /// Unusable invocation: bad flags, bad literals, bad config text.
    Usage(String),
    /// Well-formed request the numerics cannot satisfy.
    Domain(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 3,
            Failure::Domain(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

pub fn core_err(e: relgrowth::Error) -> Failure {
    match e {
        relgrowth::Error::Parse(m) => Failure::Usage(m),
        other => Failure::Domain(other.to_string()),
    }
}

pub struct OutCtx {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub stamp: bool,
}

trait Render: Serialize {
    fn csv(&self) -> String;
    fn table(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(self).expect("record serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Table => self.table(),
        }
    }
}

fn finish<R: Render>(record: &R, ctx: &OutCtx) -> Result<i32, Failure> {
    if ctx.stamp {
        stamp();
    }
    write_out(&record.render(ctx.format), ctx.out.as_deref()).map_err(Failure::Domain)?;
    Ok(0)
}

/// Quote a free-text CSV field (commas and quotes are possible in error
/// messages and notes).
fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn divergence_str(d: Option<Divergence>) -> &'static str {
    match d {
        None => "",
        Some(Divergence::TowardZero) => "toward_zero",
        Some(Divergence::TowardInfinity) => "toward_infinity",
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Converges => "converges",
        Verdict::Diverges => "diverges",
        Verdict::Indeterminate => "indeterminate",
    }
}

fn status_str(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Pass => "pass",
        RowStatus::Fail => "fail",
        RowStatus::Inconclusive => "inconclusive",
        RowStatus::Errored => "errored",
    }
}

// ---------------------------------------------------------------- indicators

#[derive(Serialize)]
struct IndicatorsRecord {
    alpha: String,
    beta: String,
    p: u32,
    q: u32,
    grid: GridSpec,
    rho: IndicatorEstimate,
    lambda: IndicatorEstimate,
    sigma: Option<IndicatorEstimate>,
    sigma_bar: Option<IndicatorEstimate>,
    tau: Option<IndicatorEstimate>,
    tau_bar: Option<IndicatorEstimate>,
}

impl IndicatorsRecord {
    fn each(&self) -> Vec<(&'static str, &IndicatorEstimate)> {
        let mut v = vec![("rho", &self.rho), ("lambda", &self.lambda)];
        let opt = [
            ("sigma", &self.sigma),
            ("sigma_bar", &self.sigma_bar),
            ("tau", &self.tau),
            ("tau_bar", &self.tau_bar),
        ];
        for (name, est) in opt {
            if let Some(e) = est {
                v.push((name, e));
            }
        }
        v
    }
}

impl Render for IndicatorsRecord {
    fn csv(&self) -> String {
        let ts = self.grid.ts();
        let mut s = String::from("indicator,field,index,t,value\n");
        for (name, est) in self.each() {
            s.push_str(&format!("{name},value,,,{}\n", num(est.value)));
            s.push_str(&format!("{name},tail_extremum,,,{}\n", num(est.tail_extremum)));
            s.push_str(&format!("{name},envelope_slope,,,{}\n", num(est.envelope_slope)));
            s.push_str(&format!("{name},spread,,,{}\n", num(est.spread)));
            s.push_str(&format!("{name},divergence,,,{}\n", divergence_str(est.divergence)));
            let skip = ts.len() - est.tail_values.len();
            for (i, (&t, &v)) in ts[skip..].iter().zip(&est.tail_values).enumerate() {
                s.push_str(&format!("{name},tail,{i},{},{}\n", num(t), num(v)));
            }
        }
        s
    }

    fn table(&self) -> String {
        let mut s = format!(
            "indicators  alpha={}  beta={}  (p,q)=({},{})  grid t0={} h={} J={} anchor={}\n",
            self.alpha,
            self.beta,
            self.p,
            self.q,
            self.grid.t0,
            self.grid.h,
            self.grid.j_count,
            self.grid.q_anchor
        );
        s.push_str(&format!(
            "{:<10} {:>18} {:>18} {:>12} {:>10}  {}\n",
            "indicator", "value", "tail extremum", "slope", "spread", "flag"
        ));
        for (name, est) in self.each() {
            s.push_str(&format!(
                "{:<10} {:>18.12} {:>18.12} {:>12.6} {:>10.4}  {}\n",
                name,
                est.value,
                est.tail_extremum,
                est.envelope_slope,
                est.spread,
                divergence_str(est.divergence)
            ));
        }
        s
    }
}

pub fn cmd_indicators(
    alpha: &str,
    beta: &str,
    p: u32,
    q: u32,
    grid: GridSpec,
    ctx: &OutCtx,
) -> Result<i32, Failure> {
    let a = parse_scale(alpha).map_err(core_err)?;
    let b = parse_scale(beta).map_err(core_err)?;
    let (rho, lambda) = rel_order(&a, &b, p, q, &grid).map_err(core_err)?;

    // Types need a positive finite order; a flagged order is still a valid
    // answer, reported with the refinement slots empty.
    let (mut sigma, mut sigma_bar, mut tau, mut tau_bar) = (None, None, None, None);
    if rho.divergence.is_none() && rho.value > 0.0 {
        let (s, sb) = rel_type(&a, &b, p, q, rho.value, &grid).map_err(core_err)?;
        sigma = Some(s);
        sigma_bar = Some(sb);
    }
    if lambda.divergence.is_none() && lambda.value > 0.0 {
        let (t, tb) = rel_weak_type(&a, &b, p, q, lambda.value, &grid).map_err(core_err)?;
        tau = Some(t);
        tau_bar = Some(tb);
    }

    let record = IndicatorsRecord {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
        p,
        q,
        grid,
        rho,
        lambda,
        sigma,
        sigma_bar,
        tau,
        tau_bar,
    };
    finish(&record, ctx)
}

// ------------------------------------------------------------------ integral

#[derive(Serialize)]
struct ClassifyRecord {
    alpha: String,
    beta: String,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    grid: GridSpec,
    verdict: ConvergenceVerdict,
}

impl Render for ClassifyRecord {
    fn csv(&self) -> String {
        format!(
            "k,verdict,decay_slope,tail_bound\n{},{},{},{}\n",
            num(self.k),
            verdict_str(self.verdict.verdict),
            num(self.verdict.decay_slope),
            opt_num(self.verdict.tail_bound),
        )
    }

    fn table(&self) -> String {
        let bound = match self.verdict.tail_bound {
            Some(b) => format!(", tail bound {b:.6e}"),
            None => String::new(),
        };
        format!(
            "integral classify  alpha={}  beta={}  (p,q)=({},{})  A={}\nk = {} -> {} (decay slope {:.6}{})\n",
            self.alpha,
            self.beta,
            self.p,
            self.q,
            self.a_pow,
            self.k,
            verdict_str(self.verdict.verdict),
            self.verdict.decay_slope,
            bound,
        )
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_classify(
    alpha: &str,
    beta: &str,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    grid: GridSpec,
    ctx: &OutCtx,
) -> Result<i32, Failure> {
    let a = parse_scale(alpha).map_err(core_err)?;
    let b = parse_scale(beta).map_err(core_err)?;
    let verdict = classify(&a, &b, p, q, a_pow, k, &grid).map_err(core_err)?;
    let record = ClassifyRecord {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
        p,
        q,
        a_pow,
        k,
        grid,
        verdict,
    };
    finish(&record, ctx)
}

#[derive(Serialize)]
struct TransitionRecord {
    alpha: String,
    beta: String,
    p: u32,
    q: u32,
    a_pow: f64,
    k_range: (f64, f64),
    tol: f64,
    grid: GridSpec,
    result: TransitionResult,
}

impl Render for TransitionRecord {
    fn csv(&self) -> String {
        let mut s = String::from("field,k,verdict,decay_slope,tail_bound\n");
        s.push_str(&format!("k_lo,{},,,\n", num(self.result.k_lo)));
        s.push_str(&format!("k_hi,{},,,\n", num(self.result.k_hi)));
        s.push_str(&format!(
            "limited,,{},,\n",
            flag(self.result.indeterminate_limited)
        ));
        for (k, v) in &self.result.verdict_table {
            s.push_str(&format!(
                "probe,{},{},{},{}\n",
                num(*k),
                verdict_str(v.verdict),
                num(v.decay_slope),
                opt_num(v.tail_bound),
            ));
        }
        s
    }

    fn table(&self) -> String {
        let mut s = format!(
            "integral transition  alpha={}  beta={}  (p,q)=({},{})  A={}\nbracket [{:.6}, {:.6}]  width {:.6}  limited: {}\n",
            self.alpha,
            self.beta,
            self.p,
            self.q,
            self.a_pow,
            self.result.k_lo,
            self.result.k_hi,
            self.result.k_hi - self.result.k_lo,
            flag(self.result.indeterminate_limited),
        );
        s.push_str(&format!("{:<12} {:<15} {:>14}\n", "k", "verdict", "decay slope"));
        for (k, v) in &self.result.verdict_table {
            s.push_str(&format!(
                "{:<12.6} {:<15} {:>14.6}\n",
                k,
                verdict_str(v.verdict),
                v.decay_slope
            ));
        }
        s
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_transition(
    alpha: &str,
    beta: &str,
    p: u32,
    q: u32,
    a_pow: f64,
    k_range: (f64, f64),
    tol: f64,
    grid: GridSpec,
    ctx: &OutCtx,
) -> Result<i32, Failure> {
    let a = parse_scale(alpha).map_err(core_err)?;
    let b = parse_scale(beta).map_err(core_err)?;
    let result = transition(&a, &b, p, q, a_pow, k_range, tol, &grid).map_err(core_err)?;
    let record = TransitionRecord {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
        p,
        q,
        a_pow,
        k_range,
        tol,
        grid,
        result,
    };
    finish(&record, ctx)
}

// ---------------------------------------------------------------- nevanlinna

#[derive(Serialize)]
struct NevanlinnaRecord {
    model: String,
    rows: Vec<NevanlinnaBreakdown>,
}

impl Render for NevanlinnaRecord {
    fn csv(&self) -> String {
        let mut s = String::from("r,proximity,counting,characteristic\n");
        for row in &self.rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                num(row.r),
                num(row.proximity),
                num(row.counting),
                num(row.characteristic),
            ));
        }
        s
    }

    fn table(&self) -> String {
        let mut s = format!("nevanlinna  model={}\n", self.model);
        s.push_str(&format!(
            "{:>12} {:>18} {:>18} {:>18}\n",
            "r", "m(r)", "N(r)", "T(r)"
        ));
        for row in &self.rows {
            s.push_str(&format!(
                "{:>12.6} {:>18.12} {:>18.12} {:>18.12}\n",
                row.r, row.proximity, row.counting, row.characteristic
            ));
        }
        s
    }
}

pub fn cmd_nevanlinna(model: &str, radii: &[f64], ctx: &OutCtx) -> Result<i32, Failure> {
    let m = parse_model(model).map_err(core_err)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        rows.push(breakdown(&m, r, None).map_err(core_err)?);
    }
    let record = NevanlinnaRecord {
        model: model.to_string(),
        rows,
    };
    finish(&record, ctx)
}

// -------------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyRecord {
    pairs: Vec<String>,
    transition_tol: f64,
    tol_override: Option<f64>,
    report: EquivalenceReport,
}

fn verify_csv_row(s: &mut String, row: &PairRow) {
    let st = status_str(row.status);
    let pair = &row.pair;
    if let Some(err) = &row.error {
        s.push_str(&format!("{pair},{st},error,{},,,\n", csv_quote(err)));
        return;
    }
    if let Some(d) = &row.divergence {
        s.push_str(&format!("{pair},{st},divergence,{d},,,\n"));
    }
    for e in &row.estimates {
        s.push_str(&format!(
            "{pair},{st},{},{},{},{},{}\n",
            e.indicator,
            num(e.value),
            opt_num(e.ground_truth),
            opt_num(e.delta),
            e.within_tol.map(flag).unwrap_or(""),
        ));
    }
    for (tag, check) in [("type", &row.type_check), ("weak", &row.weak_check)] {
        if let Some(c) = check {
            s.push_str(&format!("{pair},{st},k_{tag}_lo,{},,,\n", num(c.k_lo)));
            s.push_str(&format!("{pair},{st},k_{tag}_hi,{},,,\n", num(c.k_hi)));
            s.push_str(&format!(
                "{pair},{st},{tag}_agrees_limsup,{},,,\n",
                flag(c.agrees_limsup)
            ));
            s.push_str(&format!(
                "{pair},{st},{tag}_agrees_liminf,{},,,\n",
                flag(c.agrees_liminf)
            ));
            s.push_str(&format!(
                "{pair},{st},{tag}_limited,{},,,\n",
                flag(c.transition_limited)
            ));
        }
    }
    if let Some(rp) = &row.reparam {
        for e in &rp.entries {
            s.push_str(&format!(
                "{pair},{st},reparam_{},{},{},{},\n",
                e.indicator,
                num(e.inverse_form),
                num(e.direct),
                num(e.delta),
            ));
        }
        s.push_str(&format!("{pair},{st},reparam_pass,{},,,\n", flag(rp.pass)));
    }
    if let Some(reg) = &row.regular {
        s.push_str(&format!(
            "{pair},{st},identity_gap,{},,,\n",
            num(reg.identity_gap)
        ));
        s.push_str(&format!(
            "{pair},{st},identity_pass,{},,,\n",
            flag(reg.identity_pass)
        ));
        s.push_str(&format!(
            "{pair},{st},full_coincidence,{},,,\n",
            flag(reg.full_coincidence)
        ));
    }
}

impl Render for VerifyRecord {
    fn csv(&self) -> String {
        let mut s = String::from("pair,status,indicator,value,ground_truth,delta,within_tol\n");
        for row in &self.report.rows {
            verify_csv_row(&mut s, row);
        }
        let sm = &self.report.summary;
        for (name, v) in [
            ("pairs", sm.pairs),
            ("passed", sm.passed),
            ("failed", sm.failed),
            ("inconclusive", sm.inconclusive),
            ("errored", sm.errored),
        ] {
            s.push_str(&format!("summary,,{name},{v},,,\n"));
        }
        s
    }

    fn table(&self) -> String {
        let mut s = String::new();
        for row in &self.report.rows {
            s.push_str(&format!("{} [{}]\n", row.pair, status_str(row.status)));
            if let Some(err) = &row.error {
                s.push_str(&format!("  error: {err}\n"));
                continue;
            }
            if let Some(d) = &row.divergence {
                s.push_str(&format!("  order drains: {d}\n"));
            }
            for e in &row.estimates {
                let truth = match e.ground_truth {
                    Some(t) => format!("  truth {t:<10.6} delta {:.2e}", e.delta.unwrap_or(0.0)),
                    None => String::new(),
                };
                s.push_str(&format!(
                    "  {:<12} {:>14.8}{}{}\n",
                    e.indicator,
                    e.value,
                    truth,
                    match e.within_tol {
                        Some(false) => "  MISS",
                        _ => "",
                    }
                ));
            }
            for (tag, check) in [("type", &row.type_check), ("weak", &row.weak_check)] {
                if let Some(c) = check {
                    s.push_str(&format!(
                        "  {tag} flip in [{:.4}, {:.4}] agrees limsup={} liminf={}{}\n",
                        c.k_lo,
                        c.k_hi,
                        flag(c.agrees_limsup),
                        flag(c.agrees_liminf),
                        if c.transition_limited { " (limited)" } else { "" },
                    ));
                }
            }
            if let Some(rp) = &row.reparam {
                s.push_str(&format!(
                    "  reparametrization max delta {:.2e} pass={}\n",
                    rp.max_delta,
                    flag(rp.pass)
                ));
            }
            if let Some(reg) = &row.regular {
                s.push_str(&format!(
                    "  identities gap {:.2e} pass={} coincide={}\n",
                    reg.identity_gap,
                    flag(reg.identity_pass),
                    flag(reg.full_coincidence)
                ));
            }
        }
        let sm = &self.report.summary;
        s.push_str(&format!(
            "summary: {} pairs, {} passed, {} failed, {} inconclusive, {} errored\n",
            sm.pairs, sm.passed, sm.failed, sm.inconclusive, sm.errored
        ));
        s
    }
}

pub fn cmd_verify(
    pairs: Vec<CatalogPair>,
    transition_tol: f64,
    tol_override: Option<f64>,
    ctx: &OutCtx,
) -> Result<i32, Failure> {
    let names = pairs.iter().map(|p| p.name.clone()).collect();
    let report = run_suite(&pairs, transition_tol);
    let gate_open = report.summary.failed == 0 && report.summary.errored == 0;
    let record = VerifyRecord {
        pairs: names,
        transition_tol,
        tol_override,
        report,
    };
    finish(&record, ctx)?;
    Ok(if gate_open { 0 } else { 1 })
}

// ------------------------------------------------------------------- catalog

const GRAMMAR_LINES: &[&str] = &[
    "scale   := sinlog",
    "         | iter(m=INT, n=INT, a=FLOAT, c=FLOAT)",
    "         | maxmod(model)",
    "         | charac(model)",
    "model   := poly(COMPLEX, ...)",
    "         | exppow(c=FLOAT, n=INT)",
    "         | exptower(k=INT)",
    "         | rat(zeros=[COMPLEX, ...]; poles=[COMPLEX, ...]; scale=COMPLEX)",
    "         | sum(model, model)",
    "         | prod(model, model)",
    "complex := 2 | -1.5 | 3i | 1+2i | 2.5-1e-3i | i | -i",
];

#[derive(Serialize)]
struct CatalogRecord {
    grammar: Vec<&'static str>,
    pairs: Vec<CatalogPair>,
}

impl Render for CatalogRecord {
    fn csv(&self) -> String {
        let mut s =
            String::from("name,alpha,beta,p,q,tol,degenerate,reparam,k_lo,k_hi,note\n");
        for p in &self.pairs {
            let (k_lo, k_hi) = match p.k_range {
                Some((lo, hi)) => (num(lo), num(hi)),
                None => (String::new(), String::new()),
            };
            let note = p
                .ground_truth
                .as_ref()
                .map(|g| csv_quote(&g.note))
                .unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{k_lo},{k_hi},{note}\n",
                p.name,
                csv_quote(&p.alpha_spec),
                csv_quote(&p.beta_spec),
                p.p,
                p.q,
                num(p.tol),
                flag(p.degenerate),
                flag(p.reparam),
            ));
        }
        s
    }

    fn table(&self) -> String {
        let mut s = String::from("scale and model grammar:\n");
        for line in &self.grammar {
            s.push_str(&format!("  {line}\n"));
        }
        s.push_str(&format!(
            "\nstandard pairs ({}):\n{:<15} {:<24} {:<42} {:>6} {:>7}\n",
            self.pairs.len(),
            "name",
            "alpha",
            "beta",
            "(p,q)",
            "tol"
        ));
        for p in &self.pairs {
            s.push_str(&format!(
                "{:<15} {:<24} {:<42} ({},{}) {:>7}{}\n",
                p.name,
                p.alpha_spec,
                p.beta_spec,
                p.p,
                p.q,
                p.tol,
                if p.degenerate { "  degenerate" } else { "" },
            ));
        }
        s
    }
}

pub fn cmd_catalog(ctx: &OutCtx) -> Result<i32, Failure> {
    let record = CatalogRecord {
        grammar: GRAMMAR_LINES.to_vec(),
        pairs: standard_catalog(),
    };
    finish(&record, ctx)
}
