//! Validation of runs into executable plans, and their evaluation.
//!
//! Every plan is built before anything is computed, so an invalid run fails
//! the whole file with a validation error and no partial output.

use alr_core::certificates::{dual_multimode, primal_radial, sandwich_check};
use alr_core::conformal::{dual_certificate, ConformalOptions, PolynomialMap, Resolution};
use alr_core::eccentric::{admissibility, galerkin_solve, primal_certificate, EccentricConfig, EccentricOptions};
use alr_core::plasmon_lab::{plasmon_root, quoted_sphere_eigenvalue, sphere_flux_residual, SphericalPlasmonProblem};
use alr_core::radial::{classify_resonance, energy, Core, RadialConfig, SourceSpectrum};
use alr_core::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spec::{Kind, RunSpec};
use crate::CliError;

const DEFAULT_GALERKIN_ORDER: usize = 40;
const GALERKIN_ORDER_STEP: usize = 8;
const DEFAULT_GALERKIN_GATE: f64 = 1e-6;
const DEFAULT_SANDWICH_SLACK: f64 = 1e-9;

/// One CSV row. Column meanings per kind are documented in the README.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub eta: Option<f64>,
    pub value: f64,
    pub term_coupling: Option<f64>,
    pub term_psi: Option<f64>,
    pub term_v: Option<f64>,
    pub residual_constraint: Option<f64>,
    pub verdict: String,
}

impl Row {
    fn new(eta: Option<f64>, value: f64) -> Self {
        Self {
            eta,
            value,
            term_coupling: None,
            term_psi: None,
            term_v: None,
            residual_constraint: None,
            verdict: String::new(),
        }
    }

    fn check_finite(&self, run: &str) -> Result<(), CliError> {
        let fields = [Some(self.value), self.term_coupling, self.term_psi, self.term_v, self.residual_constraint];
        if fields.iter().flatten().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(CliError::Gate(format!("run {run:?} produced a non-finite value at η = {:?}", self.eta)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub kind: Kind,
    pub rows: Vec<Row>,
    /// Sweep classification (`sweep` only).
    pub verdict: Option<String>,
    pub slope: Option<f64>,
    pub spread: Option<f64>,
}

#[derive(Debug, Clone)]
enum Plan {
    Radial { template: RadialConfig, etas: Vec<f64>, classify: bool },
    Dual { template: RadialConfig, etas: Vec<f64> },
    Primal { template: RadialConfig, etas: Vec<f64>, k_star: Option<u32> },
    Sandwich { template: RadialConfig, etas: Vec<f64>, slack: f64 },
    EccentricCert { template: EccentricConfig, etas: Vec<f64>, options: EccentricOptions },
    EccentricSolve { template: EccentricConfig, etas: Vec<f64>, order: usize, gate: f64 },
    Conformal { map: PolynomialMap, source: SourceSpectrum, etas: Vec<f64>, options: ConformalOptions },
    Appendix { dimensions: Vec<u32>, l_max: u32, radii: Vec<f64> },
}

/// Validated run, ready to evaluate.
#[derive(Debug, Clone)]
pub struct PlannedRun {
    name: String,
    kind: Kind,
    plan: Plan,
}

fn radial_template(run: &RunSpec) -> Result<(RadialConfig, Vec<f64>), CliError> {
    let g = &run.geometry;
    let r_shell = run.require(g.r_shell, "geometry.r_shell")?;
    let q = run.require(g.q, "geometry.q")?;
    if g.rho.is_some() || g.z0.is_some() || g.map.is_some() {
        return Err(run.invalid("concentric kinds take no rho, z0 or map"));
    }
    let core = match g.core {
        Some(r0) => Core::Disk(r0),
        None => Core::None,
    };
    let etas = run.etas()?;
    let source = run.source_spectrum()?;
    let template = RadialConfig::new(r_shell, q, core, etas[0], source).map_err(|e| run.invalid(e))?;
    Ok((template, etas))
}

fn eccentric_template(run: &RunSpec) -> Result<(EccentricConfig, Vec<f64>), CliError> {
    let g = &run.geometry;
    let r_shell = run.require(g.r_shell, "geometry.r_shell")?;
    let q = run.require(g.q, "geometry.q")?;
    let rho = run.require(g.rho, "geometry.rho")?;
    let [x, y] = g.z0.unwrap_or([0.0, 0.0]);
    if g.core.is_some() || g.map.is_some() {
        return Err(run.invalid("eccentric kinds describe the core by rho and z0; core and map are not accepted"));
    }
    let etas = run.etas()?;
    let source = run.source_spectrum()?;
    let config = EccentricConfig::new(r_shell, q, etas[0], source, rho, C64::new(x, y)).map_err(|e| run.invalid(e))?;
    Ok((config, etas))
}

impl PlannedRun {
    pub fn plan(run: &RunSpec) -> Result<Self, CliError> {
        let o = &run.options;
        let plan = match run.kind {
            Kind::RadialSolve | Kind::Sweep => {
                let (template, etas) = radial_template(run)?;
                Plan::Radial { template, etas, classify: run.kind == Kind::Sweep }
            }
            Kind::DualCert => {
                let (template, etas) = radial_template(run)?;
                if let Core::Disk(r0) = template.core {
                    if r0 != 1.0 {
                        return Err(run.invalid(format!("the dual certificate needs no core or a unit core, got {r0}")));
                    }
                }
                Plan::Dual { template, etas }
            }
            Kind::PrimalCert => {
                let (template, etas) = radial_template(run)?;
                if o.k_star == Some(0) {
                    return Err(run.invalid("k_star must be at least 1"));
                }
                Plan::Primal { template, etas, k_star: o.k_star }
            }
            Kind::Sandwich => {
                let (template, etas) = radial_template(run)?;
                let slack = o.slack.unwrap_or(DEFAULT_SANDWICH_SLACK);
                if !(slack >= 0.0 && slack.is_finite()) {
                    return Err(run.invalid("slack must be non-negative"));
                }
                Plan::Sandwich { template, etas, slack }
            }
            Kind::EccentricCert => {
                let (template, etas) = eccentric_template(run)?;
                let adm = admissibility(&template);
                let mut failed = Vec::new();
                if !adm.source_ok {
                    failed.push(format!("q > R³ (source beyond the critical radius) fails by {:.3e}", -adm.source_slack));
                }
                if !adm.decay_ok {
                    failed.push(format!(
                        "(|z0| + R²/q)/ρ² < 1/R (decay of the core correction) fails: {:.6} ≥ {:.6}",
                        adm.decay_lhs, adm.decay_rhs
                    ));
                }
                if !adm.shell_ok {
                    failed.push(format!("R ≥ 1 + |z0| (core inside the shell's inner disc) fails by {:.3e}", -adm.shell_slack));
                }
                if !failed.is_empty() {
                    return Err(run.invalid(format!("eccentric certificate preconditions violated: {}", failed.join("; "))));
                }
                let mut options = EccentricOptions::default();
                if let Some(t) = o.tolerance {
                    if !(t > 0.0 && t < 1.0) {
                        return Err(run.invalid("tolerance must lie in (0, 1)"));
                    }
                    options.tolerance = t;
                }
                options.order = o.order;
                Plan::EccentricCert { template, etas, options }
            }
            Kind::EccentricSolve => {
                let (template, etas) = eccentric_template(run)?;
                let order = o.galerkin_order.unwrap_or(DEFAULT_GALERKIN_ORDER);
                if order == 0 || order + GALERKIN_ORDER_STEP > 400 {
                    return Err(run.invalid(format!(
                        "galerkin_order must lie in 1..={} (the gate also solves at order + {GALERKIN_ORDER_STEP})",
                        400 - GALERKIN_ORDER_STEP
                    )));
                }
                if (template.source.max_k() as usize) > order {
                    return Err(run.invalid(format!(
                        "galerkin_order {order} cannot represent source modes up to k = {}",
                        template.source.max_k()
                    )));
                }
                let gate = o.convergence_tolerance.unwrap_or(DEFAULT_GALERKIN_GATE);
                if !(gate > 0.0) {
                    return Err(run.invalid("convergence_tolerance must be positive"));
                }
                Plan::EccentricSolve { template, etas, order, gate }
            }
            Kind::ConformalCert => {
                let g = &run.geometry;
                let r_shell = run.require(g.r_shell, "geometry.r_shell")?;
                let q = run.require(g.q, "geometry.q")?;
                let s = run.require(g.s, "geometry.s")?;
                if g.core.is_some() || g.rho.is_some() || g.z0.is_some() {
                    return Err(run.invalid("the mapped certificate is for coreless shells; core, rho and z0 are not accepted"));
                }
                let coeffs = g.map.clone().unwrap_or_default().into_iter().map(|[re, im]| C64::new(re, im)).collect();
                let map = PolynomialMap::new(coeffs, r_shell, q, s, g.cutoff).map_err(|e| run.invalid(e))?;
                let mut options = ConformalOptions { k: o.k, lambda: o.lambda, ..Default::default() };
                if o.k == Some(0) {
                    return Err(run.invalid("k must be at least 1"));
                }
                let defaults = Resolution::default();
                options.resolution = Resolution {
                    radial: o.radial_nodes.unwrap_or(defaults.radial),
                    angular_extra: o.angular_extra.unwrap_or(defaults.angular_extra),
                };
                if options.resolution.radial == 0 {
                    return Err(run.invalid("radial_nodes must be at least 1"));
                }
                if let Some(t) = o.convergence_tolerance {
                    options.convergence_tolerance = t;
                }
                Plan::Conformal { map, source: run.source_spectrum()?, etas: run.etas()?, options }
            }
            Kind::AppendixCheck => {
                if run.eta.is_some() || run.source.is_some() {
                    return Err(run.invalid("appendix-check takes no eta grid or source"));
                }
                let dimensions = o.dimensions.clone().unwrap_or_else(|| vec![2, 3]);
                let l_max = o.l_max.unwrap_or(10);
                let radii = o.radii.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
                if dimensions.is_empty() || dimensions.iter().any(|&n| n < 2) {
                    return Err(run.invalid("dimensions must be a non-empty list of values ≥ 2"));
                }
                if l_max == 0 {
                    return Err(run.invalid("l_max must be at least 1"));
                }
                if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                    return Err(run.invalid("radii must be a non-empty list of positive values"));
                }
                Plan::Appendix { dimensions, l_max, radii }
            }
        };
        Ok(Self { name: run.name.clone(), kind: run.kind, plan })
    }

    /// Evaluates the plan. η points run in parallel; rows keep grid order.
    pub fn execute(&self) -> Result<RunRecord, CliError> {
        let mut record =
            RunRecord { name: self.name.clone(), kind: self.kind, rows: Vec::new(), verdict: None, slope: None, spread: None };
        record.rows = match &self.plan {
            Plan::Radial { template, etas, classify } => {
                let mut rows = per_eta(etas, |eta| {
                    let rep = energy(&template.with_eta(eta))?;
                    let mut row = Row::new(Some(eta), rep.e);
                    row.residual_constraint = Some(rep.identity_residual);
                    Ok(row)
                })?;
                if *classify {
                    let series: Vec<(f64, f64)> = rows.iter().map(|r| (r.eta.unwrap_or(0.0), r.value)).collect();
                    let c = classify_resonance(&series);
                    for row in &mut rows {
                        row.verdict = c.verdict.to_string();
                    }
                    record.verdict = Some(c.verdict.to_string());
                    record.slope = Some(c.slope);
                    record.spread = Some(c.spread);
                }
                rows
            }
            Plan::Dual { template, etas } => per_eta(etas, |eta| {
                let d = dual_multimode(&template.with_eta(eta))?;
                let mut row = Row::new(Some(eta), d.j);
                row.term_coupling = Some(d.terms.coupling);
                row.term_psi = Some(d.terms.psi);
                row.term_v = Some(d.terms.v);
                row.residual_constraint = Some(d.constraint_residual);
                Ok(row)
            })?,
            Plan::Primal { template, etas, k_star } => per_eta(etas, |eta| {
                let p = primal_radial(&template.with_eta(eta), *k_star)?;
                let mut row = Row::new(Some(eta), p.i);
                row.term_psi = Some(p.terms.v_low + p.terms.v_high);
                row.term_v = Some(p.terms.w);
                row.residual_constraint = Some(p.constraint_residual);
                Ok(row)
            })?,
            Plan::Sandwich { template, etas, slack } => per_eta(etas, |eta| {
                let s = sandwich_check(&template.with_eta(eta))?;
                let mut row = Row::new(Some(eta), s.e);
                row.term_coupling = Some(s.j);
                row.term_psi = Some(s.i);
                row.residual_constraint = Some(s.lower_margin.min(s.upper_margin));
                row.verdict = if s.holds(*slack) { "holds" } else { "violated" }.into();
                Ok(row)
            })?,
            Plan::EccentricCert { template, etas, options } => per_eta(etas, |eta| {
                let p = primal_certificate(&template.with_eta(eta), *options)?;
                let mut row = Row::new(Some(eta), p.i);
                row.term_psi = Some(p.terms.v);
                row.term_v = Some(p.terms.w);
                row.residual_constraint = Some(p.constraint_residual);
                Ok(row)
            })?,
            Plan::EccentricSolve { template, etas, order, gate } => per_eta(etas, |eta| {
                let cfg = template.with_eta(eta);
                let coarse = galerkin_solve(&cfg, *order)?;
                let fine = galerkin_solve(&cfg, order + GALERKIN_ORDER_STEP)?;
                let change = (fine.energy - coarse.energy).abs() / fine.energy.abs();
                if !(change <= *gate) {
                    return Err(alr_core::Error::NotConverged(format!(
                        "Galerkin energy at η = {eta} changes by {change:.3e} from order {order} to {}, above {gate:.1e}",
                        order + GALERKIN_ORDER_STEP
                    )));
                }
                let mut row = Row::new(Some(eta), fine.energy);
                row.residual_constraint = Some(fine.identity_residual);
                Ok(row)
            })?,
            Plan::Conformal { map, source, etas, options } => per_eta(etas, |eta| {
                let c = dual_certificate(map, source, eta, *options)?;
                let mut row = Row::new(Some(eta), c.j_lower);
                row.term_coupling = Some(c.terms.coupling);
                row.term_psi = Some(c.terms.psi);
                row.term_v = Some(c.terms.v);
                row.residual_constraint = Some(c.convergence);
                Ok(row)
            })?,
            Plan::Appendix { dimensions, l_max, radii } => {
                let mut rows = Vec::new();
                for &n in dimensions {
                    for l in 1..=*l_max {
                        for &r in radii {
                            let p = SphericalPlasmonProblem::new(n, l, r, -1.0).map_err(CliError::from_core)?;
                            let residual = sphere_flux_residual(&p);
                            let expected = -((n - 2) as f64) * r.powi(l as i32 - 1);
                            let mut row = Row::new(None, residual);
                            row.term_coupling = Some(plasmon_root(n, l));
                            row.term_psi = Some(quoted_sphere_eigenvalue(l));
                            row.residual_constraint = Some((residual - expected).abs());
                            row.verdict = format!("n={n};l={l};R={r}");
                            rows.push(row);
                        }
                    }
                }
                rows
            }
        };
        for row in &record.rows {
            row.check_finite(&self.name)?;
        }
        Ok(record)
    }
}

fn per_eta<F>(etas: &[f64], f: F) -> Result<Vec<Row>, CliError>
where
    F: Fn(f64) -> alr_core::Result<Row> + Sync,
{
    // collect everything first so the reported failure is the first in grid
    // order, independent of scheduling
    let results: Vec<_> = etas.par_iter().map(|&eta| f(eta)).collect();
    results.into_iter().map(|r| r.map_err(CliError::from_core)).collect()
}
