//! Subcommand bodies. Each returns its full output so the binary only prints and exits.

use std::fmt::Write as _;

use ptower_core::descent::{
    augmentation_check, random_descent_instance, DeltaPreset, DescentBounds, DescentInstance, OracleReport,
    SemidirectGroup,
};
use ptower_core::lambda::{omega, CompanionOptions};
use ptower_core::tower::{
    fit_growth, random_instance, GrowthFit, InstanceBounds, LayerReport, StabilizationDepth, StabilizationVerdict,
    TowerInstance, TowerLength,
};
use ptower_core::{AbelianType, Error, RingParams};
use serde::Serialize;

use crate::schema::{InstanceFile, LoadError, ObservedFile, Observation, TowerFile, DescentFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Math(String),
    #[error("{0}; shrink the instance bounds or raise --budget")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Math(_) => EXIT_MATH,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            Error::TheoremViolation { .. } => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Text printed on stdout and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

pub fn companion_options() -> CompanionOptions {
    let max_precision = std::env::var("TOWER_MAX_PRECISION").ok().and_then(|v| v.parse().ok());
    CompanionOptions { max_precision }
}

pub fn omega_cmd(p: u64, precision: u32, n: u32) -> Result<Outcome, CliError> {
    let pr = RingParams::new(p, precision)?;
    let w = omega(pr, n);
    let (mu, lambda) = w.as_element().mu_lambda()?;
    Ok(Outcome::ok(format!("{}\n(μ, λ) = ({mu}, {lambda})\n", w.as_element())))
}

#[derive(Serialize)]
struct JsonLevel<'a> {
    n: u32,
    #[serde(rename = "type")]
    group: &'a [u32],
    e: u64,
}

#[derive(Serialize)]
struct JsonFit {
    mu: u64,
    lambda: u64,
    nu: i64,
    n0: u32,
}

#[derive(Serialize)]
struct JsonLayers<'a> {
    levels: Vec<JsonLevel<'a>>,
    stable_from: Option<u32>,
    fit: Option<JsonFit>,
}

fn fit_text(fit: &GrowthFit) -> String {
    format!("({},{},{}) from n={}", fit.mu, fit.lambda, fit.nu, fit.n0)
}

fn render_layers(report: &LayerReport, p: u64, format: Format) -> Result<String, CliError> {
    let e = report.exponents();
    let fit = if e.len() >= 4 { fit_growth(&e, p).ok() } else { None };
    match format {
        Format::Text => {
            let mut out = String::from("n\ttype\te_n\n");
            for r in &report.levels {
                writeln!(out, "{}\t{}\t{}", r.n, r.group, r.e).unwrap();
            }
            match report.stable_from {
                Some(s) => writeln!(out, "stable from n={s}").unwrap(),
                None => out.push_str("not stable within the computed levels\n"),
            }
            if e.len() >= 4 {
                match &fit {
                    Some(f) => writeln!(out, "fit (μ,λ,ν) = {}", fit_text(f)).unwrap(),
                    None => out.push_str("no stable fit\n"),
                }
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "type", "e_n"]).map_err(|e| CliError::Usage(e.to_string()))?;
            for r in &report.levels {
                w.write_record([r.n.to_string(), r.group.to_string(), r.e.to_string()])
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Json => {
            let doc = JsonLayers {
                levels: report
                    .levels
                    .iter()
                    .map(|r| JsonLevel { n: r.n, group: r.group.exponents(), e: r.e })
                    .collect(),
                stable_from: report.stable_from,
                fit: fit.map(|f| JsonFit { mu: f.mu, lambda: f.lambda, nu: f.nu, n0: f.n0 }),
            };
            Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
        }
    }
}

pub fn layers_cmd(file: &InstanceFile, n_max: u32, format: Format, budget: Option<u64>) -> Result<Outcome, CliError> {
    let (report, p) = match file {
        InstanceFile::Tower(t) => (t.load()?.layer_sequence(n_max)?, t.p),
        InstanceFile::Elementary(e) => (e.load()?.layers(n_max, companion_options())?, e.p),
        InstanceFile::Descent(d) => (d.load(budget)?.compile_to_tower()?.layer_sequence(n_max)?, d.p),
        InstanceFile::Observed(_) => return Err(CliError::Usage("layers needs a tower, elementary or descent file".into())),
    };
    Ok(Outcome::ok(render_layers(&report, p, format)?))
}

fn tower_of(file: &InstanceFile, budget: Option<u64>) -> Result<TowerInstance, CliError> {
    match file {
        InstanceFile::Tower(t) => Ok(t.load()?),
        InstanceFile::Descent(d) => Ok(d.load(budget)?.compile_to_tower()?),
        _ => Err(CliError::Usage("expected a tower or descent file".into())),
    }
}

fn pk_text(k: u32) -> String {
    if k == 1 {
        "p".into()
    } else {
        format!("p^{k}")
    }
}

pub fn verdict_text(p: u64, v: &StabilizationVerdict) -> String {
    if !v.hypothesis_holds {
        return "hypothesis fails (no claim)".into();
    }
    match v.depth {
        StabilizationDepth::Mod(k) => {
            let pk = p.checked_pow(k).map_or_else(|| format!("{p}^{k}"), |v| v.to_string());
            format!("hypothesis holds; stabilized mod {}; C̄ ⊆ {pk}X̄ verified", pk_text(k))
        }
        StabilizationDepth::Full => "hypothesis holds; stabilized; C̄ = 0 verified".into(),
    }
}

fn effective_n_max(inst: &TowerInstance, n_max: u32) -> u32 {
    match inst.length() {
        TowerLength::Finite(d) => n_max.min(d).max(1),
        TowerLength::Unbounded => n_max,
    }
}

pub fn fukuda_cmd(file: &InstanceFile, depth: StabilizationDepth, n_max: u32, budget: Option<u64>) -> Result<Outcome, CliError> {
    let inst = tower_of(file, budget)?;
    let n_max = effective_n_max(&inst, n_max);
    let v = inst.check_stabilization(depth, n_max)?;
    let r = inst.rank_stabilization(depth, n_max)?;
    if v != r {
        return Err(CliError::Math("isomorphism and rank formulations disagree".into()));
    }
    Ok(Outcome::ok(verdict_text(inst.p(), &v) + "\n"))
}

/// The random tower used for seed `seed` in batch runs: `|X̄| <= p^8`; odd seeds get a
/// finite length just above the order of `σ`.
pub fn batch_tower(p: u64, seed: u64) -> Result<TowerInstance, Error> {
    let bounds = InstanceBounds { max_log_order: 8, max_rank: 4, max_extra_generators: 2, length: TowerLength::Unbounded };
    let inst = random_instance(p, bounds, seed)?;
    if seed % 2 == 0 {
        return Ok(inst);
    }
    let d = inst.module().order_exponent().max(1) + (seed / 2 % 3) as u32;
    TowerInstance::new(inst.module().clone(), inst.c_bar().clone(), TowerLength::Finite(d))
}

/// Everything the batch checks on one instance; `Err` carries the reason it is inconsistent.
pub fn check_tower_instance(inst: &TowerInstance, n_max: u32, depths: &[StabilizationDepth]) -> Result<(), String> {
    let n_max = effective_n_max(inst, n_max);
    let report = inst.layer_sequence(n_max).map_err(|e| e.to_string())?;
    if report.levels.windows(2).any(|w| w[0].e > w[1].e) {
        return Err("|A_n| does not divide |A_{n+1}|".into());
    }
    for &depth in depths {
        let a = inst.check_stabilization(depth, n_max).map_err(|e| e.to_string())?;
        let b = inst.rank_stabilization(depth, n_max).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{depth:?}: rank formulation disagrees"));
        }
        if a.hypothesis_holds && a.c_in_pk_x != Some(true) {
            return Err(format!("{depth:?}: witness C̄ ⊆ p^k X̄ missing"));
        }
    }
    Ok(())
}

pub fn fukuda_batch(p: u64, count: u64, seed: u64, n_max: u32, depths: &[StabilizationDepth]) -> Result<Outcome, CliError> {
    let mut bad = Vec::new();
    for i in 0..count {
        let inst = batch_tower(p, seed + i)?;
        if let Err(why) = check_tower_instance(&inst, n_max, depths) {
            bad.push(format!("seed {}: {why}", seed + i));
        }
    }
    let mut text = format!("{}/{count} consistent\n", count - bad.len() as u64);
    for b in &bad {
        writeln!(text, "{b}").unwrap();
    }
    Ok(Outcome { text, code: if bad.is_empty() { EXIT_OK } else { EXIT_MATH } })
}

pub fn infer_cmd(obs: &ObservedFile, k: Option<u32>, n_target: Option<u32>) -> Result<Outcome, CliError> {
    if !obs.ramhyp {
        return Err(CliError::Usage(
            "refusing to infer: the ramification hypothesis (a prime totally ramified in K/F, inertia of shape H ⋊ Δ_v) \
             was not asserted; pass --ramhyp once it is known to hold"
                .into(),
        ));
    }
    obs.validate()?;
    let (a0, a1) = match (obs.level(0), obs.level(1)) {
        (Some(a0), Some(a1)) => (a0, a1),
        _ => return Err(CliError::Usage("observations at n = 0 and n = 1 are required".into())),
    };
    let p = obs.p;
    if order_of(&a1) < order_of(&a0) {
        return Err(CliError::Usage("inconsistent data: |A_1| < |A_0| although the norm map A_1 → A_0 is onto".into()));
    }
    let (line, stable): (String, Option<Observation>) = match (&a0, &a1, k) {
        (Observation::Group(g0), Observation::Group(g1), _) if g0 == g1 => {
            if g0.is_trivial() {
                ("A_n trivial for all n".into(), Some(a0.clone()))
            } else {
                (format!("A_n ≅ {} for all n ≥ 1", g0.display(p)), Some(a0.clone()))
            }
        }
        (Observation::Group(g0), Observation::Group(g1), Some(k)) if g0.mod_pk(k) == g1.mod_pk(k) => (
            format!("A_n/{}A_n ≅ {} for all n ≥ 1", pk_text(k), g0.mod_pk(k).display(p)),
            None,
        ),
        // the norm maps are onto, so equal orders already force A_1 ≅ A_0
        (x, y, _) if order_of(x) == order_of(y) => {
            let e = order_of(x);
            if e == 0 {
                ("A_n trivial for all n".into(), Some(a0.clone()))
            } else {
                (format!("|A_n| = {p}^{e} for all n ≥ 1"), Some(a0.clone()))
            }
        }
        _ => ("theorem not applicable".into(), None),
    };
    let mut text = line + "\n";
    if let (Some(n_target), Some(obs0)) = (n_target, stable) {
        for n in 0..=n_target {
            let shown = match &obs0 {
                Observation::Group(g) => g.display(p).to_string(),
                Observation::Order(e) => format!("order {p}^{e}"),
            };
            writeln!(text, "n={n}: {shown}").unwrap();
        }
    }
    Ok(Outcome::ok(text))
}

fn order_of(o: &Observation) -> u64 {
    match o {
        Observation::Group(g) => g.log_order(),
        Observation::Order(e) => *e,
    }
}

fn type_text(t: &AbelianType, p: u64) -> String {
    if t.is_trivial() {
        "trivial".into()
    } else {
        t.display(p).to_string()
    }
}

pub fn report_text(report: &OracleReport, p: u64) -> String {
    let parts: Vec<String> = report
        .levels
        .iter()
        .map(|l| {
            if l.equal {
                format!("n={}: equal ({})", l.n, type_text(&l.brute, p))
            } else {
                let mut s = format!(
                    "n={}: MISMATCH brute-force {} vs closed form {} (tower {})",
                    l.n,
                    type_text(&l.brute, p),
                    type_text(&l.closed, p),
                    type_text(&l.tower, p)
                );
                if let Some(w) = &l.witness {
                    write!(s, ", witness {w:?}").unwrap();
                }
                s
            }
        })
        .collect();
    parts.join("; ")
}

pub fn oracle_cmd(file: &InstanceFile, budget: Option<u64>) -> Result<Outcome, CliError> {
    let InstanceFile::Descent(d) = file else {
        return Err(CliError::Usage("oracle needs a descent file".into()));
    };
    let inst = d.load(budget)?;
    let report = inst.compare_oracle()?;
    let code = if report.all_equal() { EXIT_OK } else { EXIT_MATH };
    Ok(Outcome { text: report_text(&report, d.p) + "\n", code })
}

/// Parameters of the `i`-th instance of a batch: `p` alternates 2, 3; `d` cycles 1, 1, 2, 2;
/// `Δ` cycles trivial, central `Z/2`, inverting `Z/2`.
pub fn batch_descent_params(i: u64, p: Option<u64>, d: Option<u32>, delta: Option<DeltaPreset>) -> (u64, u32, DeltaPreset) {
    const DELTAS: [DeltaPreset; 3] = [DeltaPreset::Trivial, DeltaPreset::Z2Central, DeltaPreset::Z2Inverting];
    (
        p.unwrap_or([2, 3][(i % 2) as usize]),
        d.unwrap_or(1 + (i / 2 % 2) as u32),
        delta.unwrap_or(DELTAS[(i % 3) as usize]),
    )
}

pub fn batch_descent(i: u64, seed: u64, p: Option<u64>, d: Option<u32>, delta: Option<DeltaPreset>, budget: u64) -> Result<DescentInstance, Error> {
    let (p, d, preset) = batch_descent_params(i, p, d, delta);
    let bounds = DescentBounds { budget: budget.min(1 << 18), ..DescentBounds::default() };
    random_descent_instance(p, d, preset, bounds, seed + i)
}

pub fn oracle_batch(
    count: u64,
    seed: u64,
    p: Option<u64>,
    d: Option<u32>,
    delta: Option<DeltaPreset>,
    budget: u64,
) -> Result<Outcome, CliError> {
    let mut lines = Vec::new();
    for i in 0..count {
        let inst = batch_descent(i, seed, p, d, delta, budget)?;
        let report = inst.compare_oracle()?;
        if !report.all_equal() {
            let (p, d, preset) = batch_descent_params(i, p, d, delta);
            lines.push(format!("seed {} (p={p}, d={d}, Δ={}): {}", seed + i, preset.name(), report_text(&report, p)));
        }
    }
    let mut text = format!("{}/{count} equal\n", count - lines.len() as u64);
    for l in &lines {
        writeln!(text, "{l}").unwrap();
    }
    Ok(Outcome { text, code: if lines.is_empty() { EXIT_OK } else { EXIT_MATH } })
}

pub fn lemma_aug_cmd(p: u64, d: u32, delta: DeltaPreset, n: u32, precision: u32, budget: u64) -> Result<Outcome, CliError> {
    let g = SemidirectGroup::from_preset(p, d, delta)?;
    if augmentation_check(&g, n, precision, budget)? {
        Ok(Outcome::ok("verified\n".into()))
    } else {
        Ok(Outcome { text: "not verified\n".into(), code: EXIT_MATH })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    Tower,
    Descent,
}

pub fn random_instance_cmd(kind: RandomKind, p: u64, seed: u64, d: Option<u32>, delta: Option<DeltaPreset>) -> Result<Outcome, CliError> {
    let file = match kind {
        RandomKind::Tower => InstanceFile::Tower(TowerFile::from_instance(&batch_tower(p, seed)?)),
        RandomKind::Descent => {
            let bounds = DescentBounds::default();
            let inst = random_descent_instance(p, d.unwrap_or(1), delta.unwrap_or(DeltaPreset::Trivial), bounds, seed)?;
            InstanceFile::Descent(DescentFile::from_instance(&inst))
        }
    };
    Ok(Outcome::ok(serde_json::to_string_pretty(&file).expect("json") + "\n"))
}
