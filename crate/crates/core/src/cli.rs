//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 construction error, 4 solver
//! error, 5 reproduction mismatch.

use clap::{Parser, Subcommand};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use crate::analyze;
use crate::cstab::{self, ContinuousTableau, IndexMap, Variant};
use crate::error::Error;
use crate::golden;
use crate::integrate::{self, Preset, Problem, SolverConfig};
use crate::orthopoly::{OrthoBasis, WeightSpec};
use crate::quadrature::{self, NodeFamily, QuadratureRule};
use crate::reduce::{self, Format, RKTableau, ReductionMode};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONSTRUCTION: u8 = 3;
pub const EXIT_SOLVE: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "csrk", version, about = "Continuous-stage Runge-Kutta toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a tableau from a method specification file.
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report order levels, structure residuals and stability of a tableau.
    Analyze {
        file: PathBuf,
        /// Emit the report as JSON on stdout (the summary moves to stderr).
        #[arg(long)]
        json: bool,
    },
    /// Integrate a preset problem and write the trajectory as CSV.
    Integrate {
        file: PathBuf,
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure the convergence order over a list of step sizes.
    Order {
        file: PathBuf,
        #[arg(long)]
        problem: String,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        hs: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        t1: f64,
    },
    /// Regenerate a reference table and diff it against closed-form values.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        table: u8,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Parameter values for table 7 (comma-separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        omega: Vec<f64>,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn construction(e: Error) -> Self {
        CliError {
            code: EXIT_CONSTRUCTION,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Weight families accepted in a method specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Legendre,
    ChebyshevFirst,
    ChebyshevSecond,
    JacobiI,
    JacobiIi,
    JacobiIii,
    Gegenbauer,
    Jacobi,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightField {
    pub family: Family,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Truncated,
    LegendreGeneral,
    SymplecticSkew,
    SymmetricSkew,
    HairerCollocation,
    ChebyshevPair,
    ChebyshevFamily,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionField {
    pub kind: ConstructionKind,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussChristoffel,
    ChebyshevGaussLobatto,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureField {
    pub kind: QuadratureKind,
    pub s: usize,
    #[serde(default = "default_mode")]
    pub mode: ReductionMode,
    #[serde(default)]
    pub nodes: Option<Vec<f64>>,
}

fn default_mode() -> ReductionMode {
    ReductionMode::Weighted
}

/// Input document of `gen`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpecFile {
    pub weight: WeightField,
    pub construction: ConstructionField,
    pub quadrature: QuadratureField,
}

impl MethodSpecFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let spec: MethodSpecFile = serde_json::from_str(text)
            .map_err(|e| CliError::input(format!("invalid method specification: {e}")))?;
        let w = &spec.weight;
        for (name, v) in [("weight.alpha", w.alpha), ("weight.beta", w.beta)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(CliError::input(format!("{name} must be finite")));
            }
        }
        if let Some((k, _)) = spec
            .construction
            .params
            .iter()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(CliError::input(format!(
                "construction.params.{k} must be finite"
            )));
        }
        if let Some(nodes) = &spec.quadrature.nodes {
            if nodes.iter().any(|x| !x.is_finite()) {
                return Err(CliError::input("quadrature.nodes must be finite"));
            }
        }
        Ok(spec)
    }

    pub fn weight_spec(&self) -> CliResult<WeightSpec> {
        let w = &self.weight;
        let fixed = |named: WeightSpec| -> CliResult<WeightSpec> {
            let clash = w.alpha.is_some_and(|a| a != named.alpha)
                || w.beta.is_some_and(|b| b != named.beta);
            if clash {
                Err(CliError::input(format!(
                    "weight.alpha/beta contradict family {}",
                    named.name()
                )))
            } else {
                Ok(named)
            }
        };
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::input(format!("{name} is required for this family")))
        };
        match w.family {
            Family::Legendre => fixed(WeightSpec::legendre()),
            Family::ChebyshevFirst => fixed(WeightSpec::chebyshev_first()),
            Family::ChebyshevSecond => fixed(WeightSpec::chebyshev_second()),
            Family::JacobiI => fixed(WeightSpec::jacobi_type_i()),
            Family::JacobiIi => fixed(WeightSpec::jacobi_type_ii()),
            Family::JacobiIii => fixed(WeightSpec::jacobi_type_iii()),
            Family::Gegenbauer => {
                let a = need(w.alpha, "weight.alpha")?;
                if w.beta.is_some_and(|b| b != a) {
                    return Err(CliError::input(
                        "weight.beta must equal weight.alpha for gegenbauer",
                    ));
                }
                WeightSpec::gegenbauer(a).map_err(|e| CliError::input(e.to_string()))
            }
            Family::Jacobi => {
                WeightSpec::jacobi(need(w.alpha, "weight.alpha")?, need(w.beta, "weight.beta")?)
                    .map_err(|e| CliError::input(e.to_string()))
            }
        }
    }
}

fn require_r(c: &ConstructionField) -> CliResult<usize> {
    c.r.ok_or_else(|| CliError::input("construction.r is required for this kind"))
}

fn param_usize(params: &BTreeMap<String, f64>, key: &str) -> CliResult<Option<usize>> {
    match params.get(key) {
        None => Ok(None),
        Some(&v) if v >= 0.0 && v.fract() == 0.0 => Ok(Some(v as usize)),
        Some(v) => Err(CliError::input(format!(
            "construction.params.{key} must be a non-negative integer, got {v}"
        ))),
    }
}

/// `alpha_i_j` entries of the parameter map.
fn index_params(params: &BTreeMap<String, f64>) -> CliResult<IndexMap> {
    let mut out = IndexMap::new();
    for (k, &v) in params {
        let Some(rest) = k.strip_prefix("alpha_") else {
            continue;
        };
        let mut it = rest.split('_').map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(i)), Some(Ok(j)), None) => {
                out.insert((i, j), v);
            }
            _ => {
                return Err(CliError::input(format!(
                    "construction.params.{k}: expected alpha_<i>_<j>"
                )))
            }
        }
    }
    Ok(out)
}

/// `lambda_k` entries, or the `B(xi)` truncation when `xi` is given.
fn bhat_params(basis: &OrthoBasis, params: &BTreeMap<String, f64>) -> CliResult<Vec<f64>> {
    if let Some(xi) = param_usize(params, "xi")? {
        return cstab::bhat_truncation(basis, xi).map_err(CliError::construction);
    }
    let mut lambda = Vec::new();
    for (k, &v) in params {
        if let Some(idx) = k.strip_prefix("lambda_") {
            let i: usize = idx
                .parse()
                .map_err(|_| CliError::input(format!("construction.params.{k}: bad index")))?;
            if lambda.len() <= i {
                lambda.resize(i + 1, 0.0);
            }
            lambda[i] = v;
        }
    }
    if lambda.is_empty() {
        return Err(CliError::input(
            "construction.params needs 'xi' or 'lambda_<k>' entries for Bhat",
        ));
    }
    Ok(lambda)
}

fn build_continuous(spec: &MethodSpecFile, weight: WeightSpec) -> CliResult<ContinuousTableau> {
    let c = &spec.construction;
    let cerr = CliError::construction;
    let legendre_only = |kind: &str| -> CliResult<()> {
        if weight != WeightSpec::legendre() {
            Err(CliError::input(format!(
                "{kind} requires weight.family = legendre"
            )))
        } else {
            Ok(())
        }
    };
    let chebyshev_only = |kind: &str| -> CliResult<()> {
        if weight != WeightSpec::chebyshev_first() {
            Err(CliError::input(format!(
                "{kind} requires weight.family = chebyshev_first"
            )))
        } else {
            Ok(())
        }
    };
    match c.kind {
        ConstructionKind::Truncated => {
            let r = require_r(c)?;
            let basis = OrthoBasis::build(weight, r + 1).map_err(cerr)?;
            cstab::truncated_family(&basis, r, c.variant.unwrap_or(Variant::Balanced)).map_err(cerr)
        }
        ConstructionKind::LegendreGeneral => {
            legendre_only("legendre_general")?;
            let eta = param_usize(&c.params, "eta")?
                .ok_or_else(|| CliError::input("construction.params.eta is required"))?;
            let zeta = param_usize(&c.params, "zeta")?
                .ok_or_else(|| CliError::input("construction.params.zeta is required"))?;
            cstab::legendre_general(eta, zeta, &index_params(&c.params)?).map_err(cerr)
        }
        ConstructionKind::SymplecticSkew | ConstructionKind::SymmetricSkew => {
            let basis = OrthoBasis::build(weight, 4).map_err(cerr)?;
            let lambda = bhat_params(&basis, &c.params)?;
            let mut coeffs = index_params(&c.params)?;
            if c.kind == ConstructionKind::SymplecticSkew {
                // entries given for i < j; the mirror is implied
                let upper: Vec<_> = coeffs.iter().map(|(&k, &v)| (k, v)).collect();
                for ((i, j), v) in upper {
                    if i < j {
                        coeffs.entry((j, i)).or_insert(-v);
                    }
                }
                cstab::symplectic_skew(&basis, &lambda, &coeffs).map_err(cerr)
            } else {
                cstab::symmetric_skew(&basis, &lambda, &coeffs).map_err(cerr)
            }
        }
        ConstructionKind::HairerCollocation => {
            legendre_only("hairer_collocation")?;
            let mut nodes: Vec<f64> = c
                .params
                .iter()
                .filter(|(k, _)| k.starts_with("node_"))
                .map(|(_, &v)| v)
                .collect();
            if nodes.is_empty() {
                let r = require_r(c)?;
                let basis = OrthoBasis::build(WeightSpec::legendre(), r).map_err(cerr)?;
                nodes = quadrature::gauss_christoffel(&basis, r)
                    .map_err(cerr)?
                    .nodes;
            }
            nodes.sort_by(f64::total_cmp);
            cstab::hairer_collocation_at(&nodes).map_err(cerr)
        }
        ConstructionKind::ChebyshevPair => {
            chebyshev_only("chebyshev_pair")?;
            cstab::chebyshev_symplectic_pair().map_err(cerr)
        }
        ConstructionKind::ChebyshevFamily => {
            chebyshev_only("chebyshev_family")?;
            let omega = c
                .params
                .get("omega")
                .copied()
                .ok_or_else(|| CliError::input("construction.params.omega is required"))?;
            cstab::chebyshev_symplectic_family(omega).map_err(cerr)
        }
    }
}

fn build_rule(spec: &MethodSpecFile, ct: &ContinuousTableau) -> CliResult<QuadratureRule> {
    let q = &spec.quadrature;
    let cerr = CliError::construction;
    let rule_weight = match q.mode {
        ReductionMode::Weighted => ct.weight(),
        ReductionMode::Unweighted => WeightSpec::legendre(),
    };
    match q.kind {
        QuadratureKind::GaussChristoffel => {
            let basis = OrthoBasis::build(rule_weight, q.s.max(1)).map_err(cerr)?;
            quadrature::gauss_christoffel(&basis, q.s).map_err(cerr)
        }
        QuadratureKind::ChebyshevGaussLobatto => {
            quadrature::chebyshev_gauss_lobatto(rule_weight, q.s).map_err(cerr)
        }
        QuadratureKind::Custom => {
            let nodes = q
                .nodes
                .as_ref()
                .ok_or_else(|| CliError::input("quadrature.nodes is required for kind custom"))?;
            if nodes.len() != q.s {
                return Err(CliError::input(format!(
                    "quadrature.s = {} but {} nodes given",
                    q.s,
                    nodes.len()
                )));
            }
            quadrature::interpolatory_rule(rule_weight, nodes, NodeFamily::Custom).map_err(cerr)
        }
    }
}

/// Continuous construction and reduction described by `spec`.
pub fn build_method(spec: &MethodSpecFile) -> CliResult<RKTableau> {
    let weight = spec.weight_spec()?;
    let ct = build_continuous(spec, weight)?;
    let rule = build_rule(spec, &ct)?;
    let mut rk = reduce::to_rk(&ct, &rule, spec.quadrature.mode).map_err(CliError::construction)?;
    if rk.provenance.r.is_none() {
        rk.provenance.r = spec.construction.r;
    }
    Ok(rk)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn load_tableau(path: &Path) -> CliResult<RKTableau> {
    reduce::parse_json(&read(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn solve_error(e: Error) -> CliError {
    let code = match e {
        Error::StepMismatch { .. } | Error::InvalidParameter(_) => EXIT_INPUT,
        _ => EXIT_SOLVE,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

fn cmd_gen(spec: &Path, out: &Path) -> CliResult<()> {
    let spec = MethodSpecFile::parse(&read(spec)?)?;
    let rk = build_method(&spec)?;
    write(out, &reduce::serialize(&rk, Format::Json))?;
    print!("{}", reduce::serialize(&rk, Format::Markdown));
    Ok(())
}

fn cmd_analyze(file: &Path, json: bool) -> CliResult<()> {
    let rk = load_tableau(file)?;
    let report = analyze::analyze(&rk);
    if json {
        let text = serde_json::to_string_pretty(&report).expect("report is serializable");
        println!("{text}");
        eprintln!("{}", report.summary());
    } else {
        println!("{}", report.summary());
    }
    Ok(())
}

fn cmd_integrate(
    file: &Path,
    problem: &str,
    t0: f64,
    t1: f64,
    h: f64,
    out: &Path,
) -> CliResult<()> {
    let rk = load_tableau(file)?;
    let problem: Preset = problem
        .parse()
        .map_err(|e: Error| CliError::input(e.to_string()))?;
    integrate::step_count(t0, t1, h).map_err(solve_error)?;
    let z0 = problem.initial_state();
    let traj = integrate::integrate(&rk, &problem, &z0, t0, t1, h, &SolverConfig::default())
        .map_err(solve_error)?;
    write(out, &traj.to_csv())?;
    let drift = integrate::invariant_drift(&traj).map_err(solve_error)?;
    let err = problem.exact(t0, &z0, t1).map(|exact| {
        exact
            .iter()
            .zip(traj.final_state())
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    });
    let err_text = err.map_or_else(|| "n/a".to_string(), |e| format!("{e:.3e}"));
    eprintln!(
        "{} steps, final error {err_text}, max energy drift {:.3e}, drift rate {:.3e}/step",
        traj.steps(),
        drift.max_drift,
        drift.linear_fit_rate
    );
    Ok(())
}

fn cmd_order(file: &Path, problem: &str, hs: &[f64], t0: f64, t1: f64) -> CliResult<()> {
    let rk = load_tableau(file)?;
    let problem: Preset = problem
        .parse()
        .map_err(|e: Error| CliError::input(e.to_string()))?;
    let est = integrate::empirical_order(&rk, &problem, t0, t1, hs, &SolverConfig::default())
        .map_err(solve_error)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&est).expect("estimate is serializable")
    );
    eprintln!("slope {:.3} ({} reference)", est.slope, est.reference);
    Ok(())
}

fn cmd_reproduce(table: u8, tol: f64, omega: &[f64]) -> CliResult<()> {
    let omegas: Vec<f64> = if table == 7 && !omega.is_empty() {
        omega.to_vec()
    } else if table == 7 {
        golden::DEFAULT_OMEGAS.to_vec()
    } else {
        vec![0.0]
    };
    let mut failed = false;
    for w in omegas {
        let checks = golden::reproduce(table, w, tol).map_err(CliError::construction)?;
        for ch in checks {
            let verdict = if ch.passes { "pass" } else { "FAIL" };
            println!(
                "table {} {:<32} max diff {:.2e}  {verdict}",
                ch.table, ch.label, ch.max_diff
            );
            if !ch.passes {
                failed = true;
                println!(
                    "    {:<8} {:>24} {:>24} {:>10}",
                    "entry", "computed", "expected", "diff"
                );
                for m in &ch.mismatches {
                    println!(
                        "    {:<8} {:>24.17e} {:>24.17e} {:>10.2e}",
                        m.entry, m.computed, m.expected, m.diff
                    );
                }
            }
        }
    }
    if failed {
        Err(CliError {
            code: EXIT_MISMATCH,
            message: format!("table {table} does not match within {tol:e}"),
        })
    } else {
        Ok(())
    }
}

/// Parse `args` (including the program name) and run the selected command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match &cli.cmd {
        Command::Gen { spec, out } => cmd_gen(spec, out),
        Command::Analyze { file, json } => cmd_analyze(file, *json),
        Command::Integrate {
            file,
            problem,
            t0,
            t1,
            h,
            out,
        } => cmd_integrate(file, problem, *t0, *t1, *h, out),
        Command::Order {
            file,
            problem,
            hs,
            t0,
            t1,
        } => cmd_order(file, problem, hs, *t0, *t1),
        Command::Reproduce { table, tol, omega } => cmd_reproduce(*table, *tol, omega),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
