//! Experiment specification: a versioned JSON document holding one or more
//! runs, each naming a computation kind, its geometry, source and η grid.

use alr_core::radial::{decade_grid, SourceSpectrum};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub runs: Vec<RunSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Exact concentric energy per η.
    RadialSolve,
    /// Exact concentric energy per η plus the resonance classification.
    Sweep,
    /// Multi-mode dual (lower) certificate.
    DualCert,
    /// Concentric primal (upper) certificate.
    PrimalCert,
    /// `J ≤ E ≤ I` check per η.
    Sandwich,
    /// Primal certificate for an off-center core.
    EccentricCert,
    /// Two-center Galerkin energy with a self-convergence gate.
    EccentricSolve,
    /// Dual certificate through a polynomial conformal map.
    ConformalCert,
    /// Sphere and half-space plasmon residual table.
    AppendixCheck,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::RadialSolve => "radial-solve",
            Kind::Sweep => "sweep",
            Kind::DualCert => "dual-cert",
            Kind::PrimalCert => "primal-cert",
            Kind::Sandwich => "sandwich",
            Kind::EccentricCert => "eccentric-cert",
            Kind::EccentricSolve => "eccentric-solve",
            Kind::ConformalCert => "conformal-cert",
            Kind::AppendixCheck => "appendix-check",
        }
    }

    /// Kinds that evaluate once per η.
    pub fn uses_eta(&self) -> bool {
        !matches!(self, Kind::AppendixCheck)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Output stem; must be unique within the file.
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub eta: Option<EtaGrid>,
    #[serde(default)]
    pub options: RunOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub r_shell: Option<f64>,
    pub q: Option<f64>,
    /// Radius of a concentric core; absent means no core.
    pub core: Option<f64>,
    /// Radius of an off-center core.
    pub rho: Option<f64>,
    /// Center of an off-center core as `[re, im]`.
    pub z0: Option<[f64; 2]>,
    /// Coefficients `c₂, c₃, …` of `Φ(z) = z + c₂z² + …` as `[re, im]`.
    pub map: Option<Vec<[f64; 2]>>,
    /// Radius of the disc on which the map must be injective.
    pub s: Option<f64>,
    /// Cutoff radius inside `(q²/R, s)`.
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `α_k = k^{−p}` for `1 ≤ k ≤ k_max`.
    Algebraic { p: f64, k_max: u32 },
    /// Explicit `(k, amplitude)` lists for the cosine and sine parts.
    Modes {
        #[serde(default)]
        alpha: Vec<(u32, f64)>,
        #[serde(default)]
        beta: Vec<(u32, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaGrid {
    Values(Vec<f64>),
    /// `10^{−from}, …, 10^{−to}`, one point per decade.
    Decades { from: i32, to: i32 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    /// Low/high split of the concentric primal certificate.
    pub k_star: Option<u32>,
    /// Expansion order for the eccentric certificate.
    pub order: Option<usize>,
    /// Truncation tolerance for the eccentric certificate.
    pub tolerance: Option<f64>,
    /// Galerkin order `M` for `eccentric-solve`.
    pub galerkin_order: Option<usize>,
    /// Self-convergence gate for `eccentric-solve` (`M` against `M + 8`).
    pub convergence_tolerance: Option<f64>,
    /// Plasmon index replacing the schedule of `conformal-cert`.
    pub k: Option<u32>,
    /// Amplitude replacing the schedule of `conformal-cert`.
    pub lambda: Option<f64>,
    pub radial_nodes: Option<usize>,
    pub angular_extra: Option<usize>,
    /// Dimensions for `appendix-check`.
    pub dimensions: Option<Vec<u32>>,
    /// Largest degree for `appendix-check`.
    pub l_max: Option<u32>,
    /// Sphere radii for `appendix-check`.
    pub radii: Option<Vec<f64>>,
    /// Relative slack allowed by `sandwich`.
    pub slack: Option<f64>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: SpecFile =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed spec: {e}")))?;
        if spec.schema != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema version {} (this build reads version {SCHEMA_VERSION})",
                spec.schema
            )));
        }
        if spec.runs.is_empty() {
            return Err(CliError::Validation("spec contains no runs".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for run in &spec.runs {
            if run.name.is_empty() || !run.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(CliError::Validation(format!(
                    "run name {:?} must be non-empty and use only letters, digits, '-', '_' or '.'",
                    run.name
                )));
            }
            if !names.insert(run.name.as_str()) {
                return Err(CliError::Validation(format!("duplicate run name {:?}", run.name)));
            }
        }
        Ok(spec)
    }

    /// Canonical serialization used for hashing and for the result record.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

impl RunSpec {
    pub(crate) fn invalid(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Validation(format!("run {:?} ({}): {msg}", self.name, self.kind.as_str()))
    }

    pub(crate) fn require<T: Copy>(&self, value: Option<T>, what: &str) -> Result<T, CliError> {
        value.ok_or_else(|| self.invalid(format!("missing required field {what}")))
    }

    /// Expanded η grid; every point must be positive and finite.
    pub fn etas(&self) -> Result<Vec<f64>, CliError> {
        let grid = self.eta.as_ref().ok_or_else(|| self.invalid("missing required field eta"))?;
        let etas = match grid {
            EtaGrid::Values(v) => v.clone(),
            EtaGrid::Decades { from, to } => decade_grid(*from, *to),
        };
        if etas.is_empty() {
            return Err(self.invalid("the η grid is empty"));
        }
        if let Some(bad) = etas.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(self.invalid(format!("η must be positive and finite, got {bad}")));
        }
        Ok(etas)
    }

    pub fn source_spectrum(&self) -> Result<SourceSpectrum, CliError> {
        let spec = self.source.as_ref().ok_or_else(|| self.invalid("missing required field source"))?;
        let spectrum = match spec {
            SourceSpec::Algebraic { p, k_max } => {
                if *k_max == 0 {
                    return Err(self.invalid("source k_max must be at least 1"));
                }
                if !p.is_finite() {
                    return Err(self.invalid("source exponent p must be finite"));
                }
                SourceSpectrum::algebraic(*p, *k_max)
            }
            SourceSpec::Modes { alpha, beta } => {
                SourceSpectrum::new(alpha.clone(), beta.clone()).map_err(|e| self.invalid(e))?
            }
        };
        if spectrum.is_empty() {
            return Err(self.invalid("the source has no nonzero mode"));
        }
        Ok(spectrum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema":1,"name":"t","runs":[{"name":"a","kind":"sweep",
        "geometry":{"r_shell":2.0,"q":3.0,"core":1.0},
        "source":{"algebraic":{"p":2.0,"k_max":4}},"eta":{"decades":{"from":1,"to":3}}}]}"#;

    #[test]
    fn parses_and_expands() {
        let spec = SpecFile::parse(MINIMAL).unwrap();
        let etas = spec.runs[0].etas().unwrap();
        assert_eq!(etas.len(), 3);
        assert!((etas[2] - 1e-3).abs() < 1e-18);
        assert_eq!(spec.runs[0].source_spectrum().unwrap().max_k(), 4);
    }

    #[test]
    fn canonical_form_round_trips() {
        let spec = SpecFile::parse(MINIMAL).unwrap();
        let again = SpecFile::parse(&spec.canonical_json()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(spec.canonical_json(), again.canonical_json());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(SpecFile::parse(&MINIMAL.replace("\"schema\":1", "\"schema\":2")).is_err());
        assert!(SpecFile::parse(&MINIMAL.replace("\"kind\":\"sweep\"", "\"kind\":\"nope\"")).is_err());
        assert!(SpecFile::parse(&MINIMAL.replace("\"q\":3.0", "\"q\":3.0,\"extra\":1")).is_err());
        let empty = MINIMAL.replace(r#"{"decades":{"from":1,"to":3}}"#, r#"{"values":[]}"#);
        let spec = SpecFile::parse(&empty).unwrap();
        assert!(matches!(spec.runs[0].etas(), Err(CliError::Validation(_))));
        let negative = MINIMAL.replace(r#"{"decades":{"from":1,"to":3}}"#, r#"{"values":[0.1,-1]}"#);
        assert!(SpecFile::parse(&negative).unwrap().runs[0].etas().is_err());
    }
}
