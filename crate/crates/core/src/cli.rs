//! Instance documents and the `coarselab` command line.
//!
//! Exit codes: 0 pass, 1 property failure (with witness), 2 schema or input
//! error, 3 resource cap, 4 verdicts dominated by Unknown.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backends::{self, LsrBackend, NearnessQuery, Sampling, SetFamily};
use crate::dimension::{self, Cover, IntervalRule};
use crate::error::{Error, Result};
use crate::famtable;
use crate::lineset::LineSet;
use crate::maps::{self, MapRule, SpaceMap};
use crate::nearness_lab::{self, BunchSearch};
use crate::setcore::{Family, Subset, Universe};
use crate::structures::{self, AxiomReport, ClosureOp, ExplicitASR, ExplicitCoarse, ExplicitLSR, ExplicitNearness, ExplicitProximity, Relation};
use crate::verdict::{Budget, TriVerdict};

pub const DOCUMENT_VERSION: &str = "coarselab/1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

type Labels = Vec<String>;

// ---------------------------------------------------------------------------
// document schema

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: String,
    pub space: SpaceDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsr: Option<LsrDesc>,
    /// Closed sets of the topology; discrete when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<Vec<Labels>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nearness: Option<NearnessDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asr: Option<AsrDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse: Option<CoarseDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximity: Option<ProximityDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QueryDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDesc {
    Universe { universe: Labels },
    /// `"nat-line"`.
    Named(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyClosure {
    /// Exactly the listed families.
    Listed,
    /// Listed families and all their subfamilies.
    #[default]
    Down,
    /// The smallest large scale resemblance containing them.
    Generated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "backend", deny_unknown_fields)]
pub enum LsrDesc {
    Explicit {
        families: Vec<Vec<Labels>>,
        #[serde(default)]
        closure: FamilyClosure,
    },
    MetricLine,
    TopoTrace,
    /// Either point classes or generators of a coarse structure.
    Partition {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        classes: Vec<Labels>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        generators: Vec<(String, String)>,
    },
    /// Uses the document's `asr` section.
    FromAsr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "from", deny_unknown_fields)]
pub enum NearnessDesc {
    /// Induced by the document's large scale resemblance and closure.
    Lsr,
    Proximity,
    Topology,
    Listed { families: Vec<Vec<Labels>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsrDesc {
    /// Each block is a list of subsets; unlisted subsets are alone.
    pub blocks: Vec<Vec<Labels>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseDesc {
    pub generators: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProximityDesc {
    /// `A δ B` iff some class meets both.
    pub classes: Vec<Labels>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoverDesc {
    Members { members: Vec<Labels> },
    Sets { sets: Vec<LineSet> },
    Rule {
        rule: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<[u64; 4]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Codomain space and structure; the document's own when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<Box<InstanceDocument>>,
    pub f: MapRule,
    /// Candidate large scale inverse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<MapRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryDesc {
    Family { family: Vec<Labels> },
    Lines { lines: Vec<LineSet> },
}

// ---------------------------------------------------------------------------
// resolution

/// A document with every name resolved.
#[derive(Debug, Clone)]
pub struct Instance {
    pub universe: Option<Universe>,
    pub lsr: Option<LsrBackend>,
    pub closure: Option<ClosureOp>,
    pub nearness: Option<ExplicitNearness>,
    pub asr: Option<ExplicitASR>,
    pub coarse: Option<ExplicitCoarse>,
    pub proximity: Option<ExplicitProximity>,
    pub covers: Vec<Cover>,
    pub maps: Vec<(Option<String>, SpaceMap, Option<SpaceMap>)>,
    pub queries: Vec<SetFamily>,
    pub budget: Budget,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    if doc.version != DOCUMENT_VERSION {
        return Err(schema(format!("unsupported version {:?}, expected {DOCUMENT_VERSION:?}", doc.version)));
    }
    Ok(doc)
}

pub fn load_document(path: &Path) -> Result<InstanceDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

fn families(u: &Universe, fams: &[Vec<Labels>]) -> Result<Vec<Family>> {
    fams.iter().map(|f| u.family(f)).collect()
}

fn masks(u: &Universe, sets: &[Labels]) -> Result<Vec<u32>> {
    sets.iter().map(|s| u.subset(s).map(Subset::mask)).collect()
}

fn need_universe(u: &Option<Universe>, what: &str) -> Result<Universe> {
    u.clone().ok_or_else(|| schema(format!("{what} needs an explicit universe")))
}

impl Instance {
    pub fn resolve(doc: &InstanceDocument, budget_override: Budget) -> Result<Instance> {
        let universe = match &doc.space {
            SpaceDesc::Universe { universe } => Some(Universe::new(universe.clone())?),
            SpaceDesc::Named(n) if n == "nat-line" => None,
            SpaceDesc::Named(n) => return Err(schema(format!("unknown space {n:?}"))),
        };
        let budget = doc.budget.unwrap_or(budget_override);
        let closure = match (&doc.closure, &universe) {
            (Some(closed), Some(u)) => Some(ClosureOp::from_closed_sets(u.size(), &masks(u, closed)?)?),
            (Some(_), None) => return Err(schema("closure tables need an explicit universe")),
            (None, Some(u)) => Some(ClosureOp::discrete(u.size())?),
            (None, None) => None,
        };
        let asr = match &doc.asr {
            Some(a) => {
                let u = need_universe(&universe, "asr")?;
                let blocks = a
                    .blocks
                    .iter()
                    .map(|b| b.iter().map(|s| u.subset(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Some(ExplicitASR::from_blocks(u, &blocks)?)
            }
            None => None,
        };
        let coarse = match &doc.coarse {
            Some(c) => {
                let u = need_universe(&universe, "coarse")?;
                let generators = pairs(&u, &c.generators)?;
                Some(ExplicitCoarse { universe: u, generators })
            }
            None => None,
        };
        let proximity = match &doc.proximity {
            Some(p) => {
                let u = need_universe(&universe, "proximity")?;
                let rel = Relation::from_partition(u.size(), &masks(&u, &p.classes)?)?;
                Some(ExplicitProximity::from_point_relation(u, &rel)?)
            }
            None => None,
        };
        let lsr = match &doc.lsr {
            None => None,
            Some(d) => Some(resolve_lsr(d, &universe, &asr, budget)?),
        };
        let nearness = match (&doc.nearness, &universe) {
            (None, _) => None,
            (Some(NearnessDesc::Lsr), None) => None,
            (Some(_), None) => return Err(schema("explicit nearness needs an explicit universe")),
            (Some(d), Some(u)) => {
                let cl = closure.clone().expect("explicit universes always carry a closure");
                Some(match d {
                    NearnessDesc::Lsr => {
                        let c = lsr.as_ref().ok_or_else(|| schema("nearness from lsr needs an lsr section"))?;
                        backends::induced_nearness(&c.to_explicit()?, &cl)?
                    }
                    NearnessDesc::Proximity => ExplicitNearness::from_proximity(
                        proximity.as_ref().ok_or_else(|| schema("nearness from proximity needs a proximity section"))?,
                    )?,
                    NearnessDesc::Topology => ExplicitNearness::topological(u.clone(), cl)?,
                    NearnessDesc::Listed { families: fams } => {
                        let mut table = famtable::FamilySet::empty(u.size())?;
                        for f in families(u, fams)? {
                            table.insert(famtable::code_of(&f));
                        }
                        ExplicitNearness::new(u.clone(), table, cl)?
                    }
                })
            }
        };
        let covers = doc.covers.iter().map(|c| resolve_cover(c, &universe)).collect::<Result<Vec<_>>>()?;
        let queries = doc
            .queries
            .iter()
            .map(|q| match (q, &universe) {
                (QueryDesc::Family { family }, Some(u)) => Ok(SetFamily::Explicit(u.family(family)?)),
                (QueryDesc::Lines { lines }, None) => Ok(SetFamily::Line(lines.clone())),
                _ => Err(schema("query does not match the space")),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut inst = Instance {
            universe,
            lsr,
            closure,
            nearness,
            asr,
            coarse,
            proximity,
            covers,
            maps: vec![],
            queries,
            budget,
        };
        for m in &doc.maps {
            let dom = inst.lsr.clone().ok_or_else(|| schema("maps need an lsr section"))?;
            let cod = match &m.codomain {
                Some(d) => Instance::resolve(d, budget)?.lsr.ok_or_else(|| schema("codomain needs an lsr section"))?,
                None => dom.clone(),
            };
            let f = SpaceMap::new(dom.clone(), cod.clone(), m.f.clone())?;
            let g = m.g.clone().map(|g| SpaceMap::new(cod, dom, g)).transpose()?;
            inst.maps.push((m.name.clone(), f, g));
        }
        Ok(inst)
    }
}

fn pairs(u: &Universe, gens: &[(String, String)]) -> Result<Vec<(usize, usize)>> {
    gens.iter().map(|(x, y)| Ok((u.index_of(x)?, u.index_of(y)?))).collect()
}

fn resolve_lsr(d: &LsrDesc, universe: &Option<Universe>, asr: &Option<ExplicitASR>, budget: Budget) -> Result<LsrBackend> {
    Ok(match d {
        LsrDesc::MetricLine => LsrBackend::MetricLine { budget },
        LsrDesc::TopoTrace => LsrBackend::TopoTrace,
        LsrDesc::Explicit { families: fams, closure } => {
            let u = need_universe(universe, "explicit lsr")?;
            let fams = families(&u, fams)?;
            LsrBackend::Explicit(match closure {
                FamilyClosure::Listed => ExplicitLSR::from_families(u, &fams)?,
                FamilyClosure::Down => ExplicitLSR::from_generators(u, &fams)?,
                FamilyClosure::Generated => ExplicitLSR::generated_by(u, &fams)?,
            })
        }
        LsrDesc::Partition { classes, generators } => {
            let u = need_universe(universe, "partition lsr")?;
            match (classes.is_empty(), generators.is_empty()) {
                (false, true) => LsrBackend::partition(u.clone(), &masks(&u, classes)?)?,
                (true, _) => LsrBackend::from_coarse(u.clone(), pairs(&u, generators)?)?,
                (false, false) => return Err(schema("partition takes classes or generators, not both")),
            }
        }
        LsrDesc::FromAsr => LsrBackend::FromAsr(asr.clone().ok_or_else(|| schema("from-asr needs an asr section"))?),
    })
}

fn resolve_cover(c: &CoverDesc, universe: &Option<Universe>) -> Result<Cover> {
    Ok(match (c, universe) {
        (CoverDesc::Members { members }, Some(u)) => Cover::Explicit { width: u.size(), members: masks(u, members)? },
        (CoverDesc::Sets { sets }, None) => Cover::Lines(sets.clone()),
        (CoverDesc::Rule { rule, params }, None) => Cover::Rule(match (rule.as_str(), params) {
            ("adjacent-pairs", None) => IntervalRule::adjacent_pairs(),
            ("i-to-2i", None) => IntervalRule::i_to_2i(),
            ("singletons", None) => IntervalRule::singletons(),
            ("intervals", Some([a, b, c, d])) => IntervalRule::new(*a, *b, *c, *d)?,
            (r, _) => return Err(schema(format!("unknown cover rule {r:?} or wrong params"))),
        }),
        _ => return Err(schema("cover does not match the space")),
    })
}

// ---------------------------------------------------------------------------
// command line

#[derive(Debug, Parser)]
#[command(name = "coarselab", version, about = "Checks and experiments for large scale resemblance structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Largest scale k for scale-bounded checks.
    #[arg(long, global = true)]
    pub scale: Option<u64>,
    /// Window [0, N] (or largest asdim window) for windowed checks.
    #[arg(long, global = true)]
    pub window: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Resource cap (miner candidates, sampled families).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every applicable axiom checker.
    Check { file: PathBuf },
    /// Uniform boundedness of covers and asymptotic dimension.
    Asdim { file: PathBuf },
    /// Nearness verdicts for the document's queries.
    Near { file: PathBuf },
    /// Bunch obstruction for the first query.
    Bunch { file: PathBuf },
    /// Verify the document's maps and equivalences.
    Map { file: PathBuf },
    /// Search small explicit structures for a property boundary.
    Mine {
        #[arg(long, value_enum, default_value_t = MineTarget::NonLsRegular)]
        target: MineTarget,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MineTarget {
    /// An LS.R that is not LS-regular.
    NonLsRegular,
    /// An LS.R whose induced nearness fails nearness axiom iv.
    NearnessIv,
    /// An induced near family that no bunch contains.
    NoBunch,
}

/// Report of one command: exit code plus text and JSON renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.json).expect("values serialize") + "\n"
        } else {
            format!("coarselab {}\n{}", env!("CARGO_PKG_VERSION"), self.text)
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_SCHEMA,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome { exit: exit_code_for(e), text: format!("error: {e}\n"), json: json!({ "error": e.to_string() }) }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Check { file } => with_instance(cli, file, cmd_check),
        Command::Asdim { file } => with_instance(cli, file, cmd_asdim),
        Command::Near { file } => with_instance(cli, file, cmd_near),
        Command::Bunch { file } => with_instance(cli, file, cmd_bunch),
        Command::Map { file } => with_instance(cli, file, cmd_map),
        Command::Mine { target, max_size } => cmd_mine(*target, *max_size, cli.seed, cli.cap.unwrap_or(20_000)),
    };
    result.unwrap_or_else(|e| error_outcome(&e))
}

fn budget_of(cli: &Cli) -> Budget {
    Budget {
        window: cli.window.unwrap_or(backends::DEFAULT_BUDGET.window),
        scale: cli.scale.unwrap_or(backends::DEFAULT_BUDGET.scale),
    }
}

fn with_instance(cli: &Cli, file: &Path, f: fn(&Cli, &Instance) -> Result<Outcome>) -> Result<Outcome> {
    let doc = load_document(file)?;
    let mut inst = Instance::resolve(&doc, budget_of(cli))?;
    if cli.window.is_some() || cli.scale.is_some() {
        inst.budget = budget_of(cli);
        if let Some(LsrBackend::MetricLine { budget }) = &mut inst.lsr {
            *budget = inst.budget;
        }
    }
    f(cli, &inst)
}

fn sampling(cli: &Cli, inst: &Instance) -> Sampling {
    Sampling { seed: cli.seed, families: cli.cap.unwrap_or(200), scale: inst.budget.scale }
}

fn verdict_word(v: &TriVerdict) -> &'static str {
    match v {
        TriVerdict::Yes { .. } => "yes",
        TriVerdict::No { .. } => "no",
        TriVerdict::Unknown { .. } => "unknown",
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

// ---------------------------------------------------------------------------
// commands

pub fn cmd_check(cli: &Cli, inst: &Instance) -> Result<Outcome> {
    let mut reports: Vec<AxiomReport> = Vec::new();
    let mut extra = serde_json::Map::new();
    let mut text = String::new();
    if let Some(b) = &inst.lsr {
        if b.is_explicit() {
            let c = b.to_explicit()?;
            let r = structures::check_lsr_axioms(&c);
            match structures::ls_regularity(&c) {
                Ok(()) => {
                    writeln!(text, "LS-regular: true").ok();
                    extra.insert("ls_regular".into(), json!(true));
                }
                Err(w) => {
                    let d = w.describe(c.universe());
                    writeln!(text, "LS-regular: false ({d})").ok();
                    extra.insert("ls_regular".into(), json!(false));
                    extra.insert("ls_regular_witness".into(), json!(d));
                }
            }
            reports.push(r);
        } else {
            reports.push(backends::sampled_lsr_axioms(b, sampling(cli, inst))?);
            if inst.nearness.is_none() {
                reports.push(backends::sampled_nearness_axioms(b, sampling(cli, inst))?);
            }
        }
    }
    if let Some(n) = &inst.nearness {
        reports.push(structures::check_nearness_axioms(n));
    }
    if let Some(l) = &inst.asr {
        reports.push(structures::check_asr_axioms(l));
    }
    if let Some(c) = &inst.coarse {
        let r = structures::check_coarse(c)?;
        extra.insert("coarse_classes".into(), json!(r.classes));
        reports.push(r.report);
    }
    if let Some(p) = &inst.proximity {
        reports.push(structures::check_proximity_axioms(p));
    }
    if reports.is_empty() {
        return Err(schema("document has no structure to check"));
    }
    for r in &reports {
        write!(text, "{r}").ok();
    }
    let failed = reports.iter().any(AxiomReport::any_fail);
    let exit = if failed { EXIT_FAILURE } else { EXIT_PASS };
    writeln!(text, "result: {}", if failed { "FAIL" } else { "pass" }).ok();
    extra.insert("reports".into(), to_json(&reports));
    extra.insert("pass".into(), json!(!failed));
    Ok(Outcome { exit, text, json: Value::Object(extra) })
}

/// Windows `16, 32, …` up to the cap (default 512).
fn asdim_windows(cli: &Cli) -> Vec<u64> {
    let top = cli.window.unwrap_or(512).max(16);
    std::iter::successors(Some(16u64), |w| w.checked_mul(2)).take_while(|w| *w <= top).collect()
}

pub fn cmd_asdim(cli: &Cli, inst: &Instance) -> Result<Outcome> {
    let b = inst.lsr.as_ref().ok_or_else(|| schema("asdim needs an lsr section"))?;
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    let mut unknown = 0;
    let mut covers = Vec::new();
    for (i, c) in inst.covers.iter().enumerate() {
        let v = dimension::is_uniformly_bounded(c, b)?;
        writeln!(text, "cover {i}: uniformly bounded: {}", verdict_word(&v)).ok();
        unknown += usize::from(v.is_unknown());
        covers.push(to_json(&v));
    }
    out.insert("covers".into(), Value::Array(covers));
    let exit = match b {
        LsrBackend::TopoTrace => {
            let r = dimension::asdim_topo_line_report(&asdim_windows(cli))?;
            for row in &r.rows {
                writeln!(
                    text,
                    "N = {}: {} intervals, multiplicity {}, uniformly bounded {}, multiplicity-one block of 1 has {} points",
                    row.n, row.intervals, row.multiplicity, row.uniformly_bounded, row.forced_member
                )
                .ok();
            }
            writeln!(text, "{}", r.conclusion).ok();
            let exit = if r.certified { EXIT_PASS } else { EXIT_FAILURE };
            out.insert("topo_line".into(), to_json(&r));
            exit
        }
        b if b.is_explicit() => {
            let r = dimension::asdim_explicit(&b.to_explicit()?)?;
            writeln!(text, "asdim = {} ({} uniformly bounded covers)", r.asdim, r.uniformly_bounded_covers).ok();
            let u = b.universe().expect("explicit");
            for c in &r.certificates {
                let show = |ms: &[u32]| {
                    let parts: Vec<String> = ms.iter().map(|m| u.fmt_subset(Subset(*m))).collect();
                    format!("{{{}}}", parts.join(", "))
                };
                writeln!(text, "  {} refines {} (multiplicity {})", show(&c.cover), show(&c.coarsening), c.multiplicity).ok();
            }
            out.insert("explicit".into(), to_json(&r));
            EXIT_PASS
        }
        _ if !inst.covers.is_empty() => EXIT_PASS,
        b => return Err(Error::Unsupported(format!("asdim search on the {} backend", b.name()))),
    };
    let exit = if exit == EXIT_PASS && unknown * 2 > inst.covers.len().max(1) { EXIT_UNKNOWN } else { exit };
    Ok(Outcome { exit, text, json: Value::Object(out) })
}

pub fn cmd_near(_cli: &Cli, inst: &Instance) -> Result<Outcome> {
    let b = inst.lsr.as_ref().ok_or_else(|| schema("near needs an lsr section"))?;
    if inst.queries.is_empty() {
        return Err(schema("near needs at least one query"));
    }
    let mut text = String::new();
    let mut verdicts = Vec::new();
    for (i, q) in inst.queries.iter().enumerate() {
        let v = backends::nearness_of(&NearnessQuery { backend: b.clone(), closure: inst.closure.clone(), family: q.clone() })?;
        writeln!(text, "query {i}: near: {}", verdict_word(&v)).ok();
        verdicts.push(v);
    }
    let unknown = verdicts.iter().filter(|v| v.is_unknown()).count();
    let exit = if unknown * 2 > verdicts.len() { EXIT_UNKNOWN } else { EXIT_PASS };
    Ok(Outcome { exit, text, json: json!({ "verdicts": to_json(&verdicts) }) })
}

pub fn cmd_bunch(_cli: &Cli, inst: &Instance) -> Result<Outcome> {
    let q = inst.queries.first().ok_or_else(|| schema("bunch needs a query"))?;
    match q {
        SetFamily::Line(sets) => match nearness_lab::bunch_obstruction(sets, inst.budget) {
            Ok(ob) => {
                let exit = if ob.verdict.is_no() { EXIT_PASS } else { EXIT_UNKNOWN };
                let passed = ob.candidates.iter().filter(|c| c.passed()).count();
                let text = format!(
                    "bunch obstruction: L = {}, L1 = {}, L2 = {}\nscales refuted: {}/{} on window {}\nno bunch contains the family: {}\n",
                    ob.chosen,
                    ob.l1,
                    ob.l2,
                    passed,
                    ob.candidates.len(),
                    ob.budget.window,
                    verdict_word(&ob.verdict).replace("no", "certified at every scale").replace("unknown", "not certified")
                );
                Ok(Outcome { exit, text, json: to_json(&ob) })
            }
            Err(Error::Precondition(why)) => Ok(Outcome {
                exit: EXIT_FAILURE,
                text: format!("rejected: {why}\n"),
                json: json!({ "rejected": why }),
            }),
            Err(e) => Err(e),
        },
        SetFamily::Explicit(f) => {
            let n = inst.nearness.as_ref().ok_or_else(|| schema("explicit bunch search needs a nearness section"))?;
            match nearness_lab::bunch_exists_explicit(f, n) {
                Ok(r) => {
                    let text = match &r {
                        BunchSearch::Found { bunch } => format!("bunch: {}\n", n.universe().fmt_family(bunch)),
                        BunchSearch::Exhausted { bunches_checked } => {
                            format!("no bunch contains the family ({bunches_checked} bunches searched)\n")
                        }
                    };
                    Ok(Outcome { exit: EXIT_PASS, text, json: to_json(&r) })
                }
                Err(Error::Precondition(why)) => Ok(Outcome {
                    exit: EXIT_FAILURE,
                    text: format!("rejected: {why}\n"),
                    json: json!({ "rejected": why }),
                }),
                Err(e) => Err(e),
            }
        }
    }
}

pub fn cmd_map(cli: &Cli, inst: &Instance) -> Result<Outcome> {
    if inst.maps.is_empty() {
        return Err(schema("map needs at least one map"));
    }
    let s = sampling(cli, inst);
    let mut text = String::new();
    let mut out = Vec::new();
    let mut verdicts = Vec::new();
    for (i, (name, f, g)) in inst.maps.iter().enumerate() {
        let label = name.clone().unwrap_or_else(|| format!("map {i}"));
        match g {
            Some(g) => {
                let r = maps::is_ls_equivalence(f, g, s)?;
                writeln!(
                    text,
                    "{label}: f is a map: {}, g is a map: {}, conditional form: {}, member form: {}, equivalence: {}",
                    verdict_word(&r.f_is_map),
                    verdict_word(&r.g_is_map),
                    verdict_word(&r.conditional),
                    verdict_word(&r.member_form),
                    verdict_word(&r.verdict)
                )
                .ok();
                verdicts.push(r.verdict.clone());
                out.push(json!({ "name": label, "equivalence": to_json(&r) }));
            }
            None => {
                let v = maps::is_lsr_map(f, s)?;
                writeln!(text, "{label}: large scale resemblance map: {}", verdict_word(&v)).ok();
                verdicts.push(v.clone());
                out.push(json!({ "name": label, "map": to_json(&v) }));
            }
        }
    }
    let exit = if verdicts.iter().any(TriVerdict::is_no) {
        EXIT_FAILURE
    } else if verdicts.iter().filter(|v| v.is_unknown()).count() * 2 > verdicts.len() {
        EXIT_UNKNOWN
    } else {
        EXIT_PASS
    };
    Ok(Outcome { exit, text, json: Value::Array(out) })
}

// ---------------------------------------------------------------------------
// miner

/// Candidate generator families: two or three subsets of the universe.
fn generator_pool(n: usize) -> Vec<Family> {
    let subs: Vec<Subset> = (0..1u32 << n).map(Subset).collect();
    let mut out = Vec::new();
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            out.push(Family::new(n, [subs[i], subs[j]]).expect("fits"));
            for k in j + 1..subs.len() {
                out.push(Family::new(n, [subs[i], subs[j], subs[k]]).expect("fits"));
            }
        }
    }
    out
}

/// The document `check` needs to re-verify a mined structure.
pub fn explicit_document(c: &ExplicitLSR) -> InstanceDocument {
    let u = c.universe();
    let fams = c
        .maximal()
        .into_iter()
        .map(|m| famtable::members_of(m).map(|s| u.labels_of(Subset(s))).collect())
        .collect();
    InstanceDocument {
        version: DOCUMENT_VERSION.into(),
        space: SpaceDesc::Universe { universe: u.labels().to_vec() },
        lsr: Some(LsrDesc::Explicit { families: fams, closure: FamilyClosure::Down }),
        closure: None,
        nearness: None,
        asr: None,
        coarse: None,
        proximity: None,
        covers: vec![],
        maps: vec![],
        queries: vec![],
        budget: None,
    }
}

fn mine_hit(target: MineTarget, c: &ExplicitLSR) -> Result<Option<String>> {
    if !structures::check_lsr_axioms(c).all_pass() {
        return Ok(None);
    }
    Ok(match target {
        MineTarget::NonLsRegular => structures::ls_regularity(c).err().map(|w| w.describe(c.universe())),
        MineTarget::NearnessIv => {
            let n = backends::induced_nearness(c, &ClosureOp::discrete(c.width())?)?;
            let r = structures::check_nearness_axioms(&n);
            r.witness("iv").map(str::to_string)
        }
        MineTarget::NoBunch => {
            let n = backends::induced_nearness(c, &ClosureOp::discrete(c.width())?)?;
            let bunches = structures::enumerate_bunch_codes(&n);
            let lonely = n
                .table()
                .iter()
                .filter(|code| famtable::members_of(*code).count() == 2)
                .find(|code| !bunches.iter().any(|b| famtable::is_subcode(*code, *b)));
            lonely.map(|code| format!("{} lies in no bunch", c.universe().fmt_family(&famtable::family_of(code, c.width()))))
        }
    })
}

/// Enumerate structures generated by one or two small generator families,
/// smallest universes first, in a seeded order within each size.
pub fn mine(target: MineTarget, max_size: usize, seed: u64, cap: usize) -> Result<Option<(ExplicitLSR, String, usize)>> {
    if max_size > 4 {
        return Err(Error::CapExceeded { what: "miner universe size", limit: 4 });
    }
    let mut examined = 0;
    for n in 1..=max_size {
        let u = Universe::letters(n)?;
        let pool = generator_pool(n);
        let mut cands: Vec<Vec<Family>> = pool.iter().map(|g| vec![g.clone()]).collect();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                cands.push(vec![pool[i].clone(), pool[j].clone()]);
            }
        }
        cands.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ n as u64));
        let mut seen = std::collections::HashSet::new();
        for gens in cands {
            if examined >= cap {
                return Err(Error::CapExceeded { what: "miner candidates", limit: cap });
            }
            examined += 1;
            let c = ExplicitLSR::generated_by(u.clone(), &gens)?;
            if !seen.insert(c.maximal()) {
                continue;
            }
            if let Some(w) = mine_hit(target, &c)? {
                return Ok(Some((c, w, examined)));
            }
        }
    }
    Ok(None)
}

pub fn cmd_mine(target: MineTarget, max_size: usize, seed: u64, cap: usize) -> Result<Outcome> {
    Ok(match mine(target, max_size, seed, cap)? {
        Some((c, w, examined)) => {
            let doc = explicit_document(&c);
            let text = format!(
                "found on {} points after {examined} candidates: {w}\ninstance:\n{}\n",
                c.width(),
                serde_json::to_string_pretty(&doc).expect("documents serialize")
            );
            Outcome {
                exit: EXIT_PASS,
                text,
                json: json!({ "target": target, "found": true, "size": c.width(), "examined": examined, "witness": w, "instance": to_json(&doc) }),
            }
        }
        None => Outcome {
            exit: EXIT_PASS,
            text: format!("no instance up to {max_size} points\n"),
            json: json!({ "target": target, "found": false, "max_size": max_size }),
        },
    })
}
