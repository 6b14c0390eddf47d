//! `c235 {list|verify|identities|curvature}`.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::chazy::{residual_6th, residual_ds6};
use crate::dist::{catalog, find, legendre_transform, Params, Picture, SolutionSpec};
use crate::error::{Error, Result};
use crate::geometry::{elementary_q, sample_points, CaseFrame, CurvatureReport};
use crate::jets::Jet1;
use crate::par::{self, Mode};
use crate::specialfn::{
    all_families, transform_identity_check, wronskian_check, ClosedFormFamily, ClosedFormId, TransformKind,
};
use crate::twistor::{twistor_coordinate_check, PlebanskiData};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_POINTS: usize = 10;
pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "c235", version, about = "Check (2,3,5)-distributions for conformally flat Nurowski metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog cases.
    List {
        #[arg(long)]
        json: bool,
        /// `key=value` with key one of id, picture, family, expectFail.
        #[arg(long)]
        filter: Vec<String>,
    },
    /// Run residual, flatness and duality checks on catalog cases.
    Verify(VerifyArgs),
    /// Check hypergeometric transformation identities and the Wronskian law.
    Identities {
        /// Transform kind or `wronskian`; repeat or comma-separate. Default: every kind.
        #[arg(long, value_delimiter = ',')]
        kind: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print the curvature report of one case at one point.
    Curvature {
        #[arg(long = "case")]
        case: String,
        /// `x=..,y=..,z=..,p=..,<param>=..`; omitted base coordinates are 0.
        #[arg(long)]
        point: String,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Case id, `all`, or a comma-separated list.
    #[arg(long = "case", value_delimiter = ',', default_value = "all")]
    case: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, env = "C235_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also print the report when `--out` is given.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
    /// Run sequentially.
    #[arg(long)]
    sequential: bool,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub case_ids: Vec<String>,
    pub points_per_case: usize,
    pub tol: f64,
    pub seed: u64,
    pub output_path: Option<String>,
    pub format: &'static str,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub point: usize,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn of(name: &str, point: usize, value: Result<f64>, tol: f64) -> Self {
        match value {
            Ok(v) => Check { name: name.into(), point, value: v, tol, pass: v < tol, error: None },
            Err(e) => Check { name: name.into(), point, value: f64::NAN, tol, pass: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CaseReport {
    pub id: String,
    pub expect_fail: bool,
    pub params: Vec<f64>,
    pub checks: Vec<Check>,
}

impl CaseReport {
    fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    /// Failed checks belonging to expect-fail cases.
    pub expected_failures: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Report {
    pub version: u32,
    pub config: RunConfig,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl Report {
    fn new(config: RunConfig, mut cases: Vec<CaseReport>) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        for c in &mut cases {
            c.checks.sort_by_key(|k| k.point);
        }
        let all = cases.iter().flat_map(|c| &c.checks);
        let passed = all.clone().filter(|k| k.pass).count();
        let failed = all.count() - passed;
        let expected_failures =
            cases.iter().filter(|c| c.expect_fail).flat_map(|c| &c.checks).filter(|k| !k.pass).count();
        Report { version: REPORT_VERSION, config, cases, summary: Summary { passed, failed, expected_failures } }
    }

    /// 0 when everything passes; with `excuse_controls`, expect-fail cases must fail instead.
    fn exit_code(&self, excuse_controls: bool) -> i32 {
        let ok = self.cases.iter().all(|c| if excuse_controls && c.expect_fail { !c.all_pass() } else { c.all_pass() });
        if ok {
            0
        } else {
            1
        }
    }
}

/// Runs the CLI on `args` (including the program name). Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::List { json, filter } => cmd_list(json, &filter, out),
        Command::Verify(a) => {
            check_common(&a.common)?;
            if a.points == 0 {
                return Err(Error::InvalidParam("--points must be at least 1".into()));
            }
            let (specs, all) = select_cases(&a.case)?;
            let config = RunConfig {
                case_ids: if all { vec!["all".into()] } else { specs.iter().map(|s| s.id.clone()).collect() },
                points_per_case: a.points,
                tol: a.common.tol,
                seed: a.seed,
                output_path: a.common.out.clone(),
                format: "json",
            };
            let report = cmd_verify(&config, &specs, mode(&a.common));
            emit(&report, &a.common, out, err)?;
            Ok(report.exit_code(all))
        }
        Command::Identities { kind, samples, common } => {
            check_common(&common)?;
            if samples == 0 {
                return Err(Error::InvalidParam("--samples must be at least 1".into()));
            }
            let kinds = parse_kinds(&kind)?;
            let config = RunConfig {
                case_ids: kinds.iter().map(|k| k.name().to_string()).collect(),
                points_per_case: samples,
                tol: common.tol,
                seed: 0,
                output_path: common.out.clone(),
                format: "json",
            };
            let report = cmd_identities(&config, &kinds, mode(&common));
            emit(&report, &common, out, err)?;
            Ok(report.exit_code(false))
        }
        Command::Curvature { case, point, out: path } => {
            let spec = find(&case)?;
            let text = to_json(&cmd_curvature(&spec, &point)?)?;
            match path {
                Some(p) => write_file(&p, &text)?,
                None => write_out(out, &text)?,
            }
            Ok(0)
        }
    }
}

fn check_common(c: &Common) -> Result<()> {
    if !(c.tol.is_finite() && c.tol > 0.0) {
        return Err(Error::InvalidParam(format!("tolerance must be positive, got {}", c.tol)));
    }
    Ok(())
}

fn mode(c: &Common) -> Mode {
    if c.sequential {
        Mode::Sequential
    } else {
        Mode::Parallel
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::ParseError(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::InvalidParam(format!("cannot write output: {e}")))
}

fn write_file(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidParam(format!("cannot write {path}: {e}")))
}

fn emit(report: &Report, c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let text = to_json(report)?;
    if let Some(p) = &c.out {
        write_file(p, &text)?;
        let s = &report.summary;
        let _ = writeln!(err, "wrote {p}: {} passed, {} failed", s.passed, s.failed);
        if !c.json {
            return Ok(());
        }
    }
    write_out(out, &text)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ListEntry<'a> {
    id: &'a str,
    picture: Picture,
    family: crate::dist::Family,
    anchor: &'a str,
    param_name: &'a str,
    domain: (f64, f64),
    expect_fail: bool,
}

fn cmd_list(json: bool, filters: &[String], out: &mut dyn Write) -> Result<i32> {
    let mut preds = Vec::new();
    for f in filters {
        let (k, v) = f.split_once('=').ok_or_else(|| Error::ParseError(format!("filter `{f}` is not key=value")))?;
        if !["id", "picture", "family", "expectFail"].contains(&k) {
            return Err(Error::ParseError(format!("unknown filter key `{k}`")));
        }
        preds.push((k.to_string(), v.to_string()));
    }
    let cases = catalog();
    let keep = |s: &SolutionSpec| {
        preds.iter().all(|(k, v)| match k.as_str() {
            "id" => s.id.starts_with(v.as_str()),
            "picture" => s.picture.to_string() == *v,
            "family" => s.family.to_string() == *v,
            _ => s.expect_fail.to_string() == *v,
        })
    };
    let entries: Vec<ListEntry> = cases
        .iter()
        .filter(|s| keep(s))
        .map(|s| ListEntry {
            id: &s.id,
            picture: s.picture,
            family: s.family,
            anchor: s.anchor,
            param_name: s.param_name,
            domain: s.domain,
            expect_fail: s.expect_fail,
        })
        .collect();
    let text = if json {
        to_json(&entries)?
    } else {
        let mut t = String::new();
        for e in &entries {
            let flag = if e.expect_fail { "  [expect-fail]" } else { "" };
            t.push_str(&format!("{:<32} {:<7} {:<22} {}{}\n", e.id, e.picture, e.family.to_string(), e.anchor, flag));
        }
        t
    };
    write_out(out, &text)?;
    Ok(0)
}

fn select_cases(ids: &[String]) -> Result<(Vec<SolutionSpec>, bool)> {
    if ids.iter().any(|i| i == "all") {
        if ids.len() > 1 {
            return Err(Error::InvalidParam("`all` cannot be combined with other ids".into()));
        }
        return Ok((catalog(), true));
    }
    let mut specs = ids.iter().map(|i| find(i)).collect::<Result<Vec<_>>>()?;
    specs.sort_by(|a, b| a.id.cmp(&b.id));
    specs.dedup_by(|a, b| a.id == b.id);
    Ok((specs, false))
}

/// Every check of one case at its sampled points.
pub fn verify_case(spec: &SolutionSpec, points: usize, seed: u64, tol: f64) -> CaseReport {
    let pts = match sample_points(spec, points, seed) {
        Ok(p) => p,
        Err(e) => {
            return CaseReport {
                id: spec.id.clone(),
                expect_fail: spec.expect_fail,
                params: vec![],
                checks: vec![Check::of("sampling", 0, Err(e), tol)],
            }
        }
    };
    let mut checks = Vec::new();
    for (i, &(param, xyzp)) in pts.iter().enumerate() {
        let jet = spec.jet(param, 8).map(|c| c.jet);
        let with = |f: &dyn Fn(&Jet1) -> Result<f64>| jet.clone().and_then(|j| f(&j));
        let (own, dual) = match spec.picture {
            Picture::FOfQ => ("residual_6th", "legendre_ds6"),
            Picture::HOfT => ("residual_ds6", "legendre_6th"),
        };
        let own_res = |j: &Jet1| {
            Ok(match spec.picture {
                Picture::FOfQ => residual_6th(j).relative(),
                Picture::HOfT => residual_ds6(j).relative(),
            })
        };
        let dual_res = |j: &Jet1| {
            let (_, d) = legendre_transform(j)?;
            Ok(match spec.picture {
                Picture::FOfQ => residual_ds6(&d).relative(),
                Picture::HOfT => residual_6th(&d).relative(),
            })
        };
        checks.push(Check::of(own, i, with(&own_res), tol));
        let weyl = CaseFrame::new(spec, param, xyzp).and_then(|cf| Ok(cf.curvature()?.weyl_ratio()));
        checks.push(Check::of("weyl_ratio", i, weyl, tol));
        checks.push(Check::of(dual, i, with(&dual_res), tol));
        if spec.picture == Picture::HOfT {
            let tw = |j: &Jet1| {
                twistor_coordinate_check(&PlebanskiData::new(j.clone(), [xyzp[0], 0.0, xyzp[1], xyzp[2]], xyzp[3]))
            };
            checks.push(Check::of("twistor_coordinates", i, with(&tw), tol));
        }
    }
    CaseReport { id: spec.id.clone(), expect_fail: spec.expect_fail, params: pts.iter().map(|p| p.0).collect(), checks }
}

/// The `verify` report for `specs`.
pub fn cmd_verify(config: &RunConfig, specs: &[SolutionSpec], mode: Mode) -> Report {
    let cases = par::map(mode, specs, |s| verify_case(s, config.points_per_case, config.seed, config.tol));
    Report::new(config.clone(), cases)
}

/// An identity family checked by `identities`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    Transform(TransformKind),
    Wronskian,
}

impl IdentityKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Transform(k) => k.name(),
            Self::Wronskian => "wronskian",
        }
    }
}

fn parse_kinds(raw: &[String]) -> Result<Vec<IdentityKind>> {
    if raw.is_empty() || raw.iter().any(|k| k == "all") {
        let mut v: Vec<_> = TransformKind::ALL.iter().map(|&k| IdentityKind::Transform(k)).collect();
        v.push(IdentityKind::Wronskian);
        return Ok(v);
    }
    raw.iter()
        .map(|k| if k == "wronskian" { Ok(IdentityKind::Wronskian) } else { k.parse().map(IdentityKind::Transform) })
        .collect()
}

/// `n` points strictly inside `(lo, hi)`, evenly spaced.
fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn identity_case(kind: IdentityKind, samples: usize, tol: f64) -> CaseReport {
    let mut checks = Vec::new();
    let params = match kind {
        IdentityKind::Transform(k) => {
            let (lo, hi) = k.domain();
            let s = grid(lo + 0.05, hi - 0.05, samples);
            for (i, &s0) in s.iter().enumerate() {
                checks.push(Check::of("mismatch", i, transform_identity_check(k, s0), tol));
            }
            s
        }
        IdentityKind::Wronskian => {
            let s = grid(0.05, 0.45, samples);
            for fam in all_families().into_iter().filter(|f| *f != ClosedFormFamily::ElementaryR) {
                let id = ClosedFormId::new(fam);
                let name = format!("{fam:?}").to_lowercase().replace(['(', ')'], "");
                for (i, &s0) in s.iter().enumerate() {
                    let v = id.hyper_triple().and_then(|p| wronskian_check(|x| id.hyper_pair(x, 3), p, 0.25, s0));
                    checks.push(Check::of(&name, i, v, tol));
                }
            }
            s
        }
    };
    CaseReport { id: kind.name().into(), expect_fail: false, params, checks }
}

/// The `identities` report for `kinds`.
pub fn cmd_identities(config: &RunConfig, kinds: &[IdentityKind], mode: Mode) -> Report {
    let cases = par::map(mode, kinds, |&k| identity_case(k, config.points_per_case, config.tol));
    Report::new(config.clone(), cases)
}

#[derive(Serialize, Debug)]
#[serde(rename_all = "camelCase")]
pub struct PointReport {
    pub id: String,
    pub param_name: &'static str,
    pub param: f64,
    /// `(x, y, z, p)` followed by the picture coordinate `q` or `t` of the jet.
    pub coordinates: [f64; 5],
    /// `R_rr` for the elementary example, converted from the `q` chart.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ricci_rr: Option<f64>,
    #[serde(flatten)]
    pub report: CurvatureReport,
}

/// Parses `x=..,y=..,z=..,p=..,<param>=..` into the parameter and base point.
pub fn parse_point(spec: &SolutionSpec, text: &str) -> Result<(f64, [f64; 4])> {
    let mut xyzp = [0.0; 4];
    let mut param = None;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::ParseError(format!("`{part}` is not key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::ParseError(format!("`{v}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::ParseError(format!("`{part}` is not finite")));
        }
        match k.trim() {
            "x" => xyzp[0] = v,
            "y" => xyzp[1] = v,
            "z" => xyzp[2] = v,
            "p" => xyzp[3] = v,
            k if k == spec.param_name => param = Some(v),
            k => return Err(Error::ParseError(format!("unknown coordinate `{k}` for {}", spec.id))),
        }
    }
    let param = param.ok_or_else(|| Error::ParseError(format!("missing `{}=`", spec.param_name)))?;
    Ok((param, xyzp))
}

pub fn cmd_curvature(spec: &SolutionSpec, point: &str) -> Result<PointReport> {
    let (param, xyzp) = parse_point(spec, point)?;
    let cf = CaseFrame::new(spec, param, xyzp)?;
    let report = cf.curvature()?;
    let base = cf.jet.basepoint();
    let ricci_rr = match spec.params {
        Params::ElementaryR { c1, c2 } => {
            let dq = elementary_q(c1, c2, param)?.deriv(1);
            Some(report.ricci_at(4, 4) * dq * dq)
        }
        _ => None,
    };
    Ok(PointReport {
        id: spec.id.clone(),
        param_name: spec.param_name,
        param,
        coordinates: [xyzp[0], xyzp[1], xyzp[2], xyzp[3], base],
        ricci_rr,
        report,
    })
}
