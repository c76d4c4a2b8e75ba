//! Verification suites, convergence studies and the Hardy decomposition of
//! jet files, with machine-readable reports.

mod fit;
mod report;
mod suites;

pub use suites::whitney_pairs;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use fit::{fit_exponent, ExponentFit, MIN_DECADES, MIN_PAIRS};
pub use report::{
    convergence_csv, is_monotone_decreasing, CheckRecord, ConvergenceRow, FittedExponent,
    ReportParameters, SuiteReport,
};

use crate::boundary::{projections_from, singular_sl};
use crate::error::{Error, Result};
use crate::geometry::{
    ShapeDescriptor, SurfaceMesh, DEFAULT_RESOLUTION, MAX_LEVEL_M3, MAX_LEVEL_M4,
};
use crate::jet::{JetFile, LipschitzJet};
use crate::params::LameParams;
use crate::poly::LAME_SIGN;

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Kernels,
    Cauchy,
    BorelPompeiu,
    Involution,
    Hardy,
    Recovery,
    Holder,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Algebra,
        Suite::Kernels,
        Suite::Cauchy,
        Suite::BorelPompeiu,
        Suite::Involution,
        Suite::Hardy,
        Suite::Recovery,
        Suite::Holder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Kernels => "kernels",
            Suite::Cauchy => "cauchy",
            Suite::BorelPompeiu => "borel_pompeiu",
            Suite::Involution => "involution",
            Suite::Hardy => "hardy",
            Suite::Recovery => "recovery",
            Suite::Holder => "holder",
        }
    }

    fn needs_surface(self) -> bool {
        !matches!(self, Suite::Algebra | Suite::Kernels)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Every tunable of a harness run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub params: LameParams,
    pub level: u32,
    pub alpha: f64,
    pub seed: u64,
    /// Volume grid resolution for the Borel–Pompeiu checks.
    pub resolution: usize,
    /// Record wall-clock seconds per check (breaks byte-identical reports).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 3,
            params: LameParams::default(),
            level: 3,
            alpha: 1.0,
            seed: 42,
            resolution: DEFAULT_RESOLUTION,
            timings: false,
        }
    }
}

impl RunConfig {
    /// Checks the Lamé parameters and the Hölder exponent; dimension and
    /// level are checked per suite.
    pub fn new(m: usize, mu: f64, lambda: f64, level: u32, alpha: f64, seed: u64) -> Result<Self> {
        let params = LameParams::new(mu, lambda)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!("α must lie in (0, 1], got {alpha}")));
        }
        Ok(RunConfig {
            m,
            params,
            level,
            alpha,
            seed,
            ..RunConfig::default()
        })
    }

    pub fn validate_for(&self, suite: Suite) -> Result<()> {
        if suite.needs_surface() {
            self.validate_level(self.level)
        } else if !(3..=6).contains(&self.m) {
            Err(Error::Config(format!(
                "suite {suite} supports m ∈ 3..=6, got {}",
                self.m
            )))
        } else {
            Ok(())
        }
    }

    fn validate_level(&self, level: u32) -> Result<()> {
        let cap = match self.m {
            3 => MAX_LEVEL_M3,
            4 => MAX_LEVEL_M4,
            m => {
                return Err(Error::Config(format!(
                    "surface suites support m ∈ {{3, 4}}, got {m}"
                )))
            }
        };
        if level > cap {
            return Err(Error::Config(format!(
                "level {level} exceeds the cap {cap} for m = {}",
                self.m
            )));
        }
        if self.resolution == 0 || self.resolution > crate::geometry::MAX_RESOLUTION {
            return Err(Error::Config(format!(
                "volume resolution {} out of range",
                self.resolution
            )));
        }
        Ok(())
    }

    pub fn parameters(&self) -> ReportParameters {
        ReportParameters {
            m: self.m,
            mu: self.params.mu(),
            lambda: self.params.lambda(),
            level: self.level,
            alpha: self.alpha,
            seed: self.seed,
            lame_sign: *LAME_SIGN,
        }
    }

    /// Unit sphere about the origin at `level`.
    pub fn mesh(&self, level: u32) -> Result<Arc<SurfaceMesh>> {
        self.validate_level(level)?;
        Ok(Arc::new(SurfaceMesh::from_descriptor(
            &ShapeDescriptor::unit_sphere(self.m, level),
        )?))
    }

    fn at_level(&self, level: u32) -> RunConfig {
        RunConfig {
            level,
            ..self.clone()
        }
    }
}

/// Node spacing of the level-4 icosphere, where the surface tolerances are pinned.
pub fn reference_spacing() -> f64 {
    (4.0 * std::f64::consts::PI / (20.0 * 256.0)).sqrt()
}

/// A first-order tolerance pinned at the reference spacing, widened in
/// proportion to `h` on coarser meshes.
pub fn first_order_tolerance(tolerance: f64, h: f64) -> f64 {
    tolerance * (h / reference_spacing()).max(1.0)
}

/// Times `f` and attaches the duration when the config asks for timings.
fn timed(
    config: &RunConfig,
    f: impl FnOnce() -> Result<Vec<CheckRecord>>,
) -> Result<Vec<CheckRecord>> {
    let start = Instant::now();
    let mut checks = f()?;
    if config.timings {
        let secs = start.elapsed().as_secs_f64() / checks.len().max(1) as f64;
        for c in &mut checks {
            c.seconds = Some(secs);
        }
    }
    Ok(checks)
}

/// Runs every check of `suite`.
pub fn run_suite(config: &RunConfig, suite: Suite) -> Result<SuiteReport> {
    config.validate_for(suite)?;
    let mut report = SuiteReport::new(suite.name(), config.parameters());
    log::info!(
        "running suite {suite} (m = {}, level = {})",
        config.m,
        config.level
    );
    match suite {
        Suite::Algebra => suites::algebra(config, &mut report)?,
        Suite::Kernels => suites::kernels(config, &mut report)?,
        Suite::Cauchy => suites::cauchy(config, &mut report)?,
        Suite::BorelPompeiu => suites::borel_pompeiu(config, &mut report)?,
        Suite::Involution => suites::involution(config, &mut report)?,
        Suite::Hardy => suites::hardy(config, &mut report)?,
        Suite::Recovery => suites::recovery(config, &mut report)?,
        Suite::Holder => suites::holder(config, &mut report)?,
    }
    Ok(report)
}

/// Suites with a single refinement residual per level.
pub const CONVERGENCE_SUITES: [Suite; 4] = [
    Suite::Involution,
    Suite::Cauchy,
    Suite::Hardy,
    Suite::BorelPompeiu,
];

/// Refinement study: one headline residual of `suite` per level, with a
/// monotonicity check over the table.
pub fn converge(config: &RunConfig, suite: Suite, levels: &[u32]) -> Result<SuiteReport> {
    if !CONVERGENCE_SUITES.contains(&suite) {
        return Err(Error::Config(format!(
            "no convergence study for suite {suite}; choose one of involution, cauchy, hardy, borel_pompeiu"
        )));
    }
    if levels.len() < 2 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "levels must be at least two strictly increasing values".into(),
        ));
    }
    for &level in levels {
        config.validate_level(level)?;
    }
    let mut report = SuiteReport::new(suite.name(), config.parameters());
    for &level in levels {
        let cfg = config.at_level(level);
        let mesh = cfg.mesh(level)?;
        let residual = suites::headline_residual(&cfg, suite, &mesh)?;
        log::info!("{suite} level {level}: residual {residual:.4e}");
        report.convergence.push(ConvergenceRow {
            level,
            nodes: mesh.len(),
            h: mesh.h(),
            residual,
        });
    }
    let monotone = is_monotone_decreasing(&report.convergence);
    report.push(CheckRecord::holds(
        format!("{suite}_monotone_decrease"),
        monotone,
    ));
    Ok(report)
}

/// The two Hardy parts of a jet with the quality report.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub plus: LipschitzJet,
    pub minus: LipschitzJet,
    pub report: SuiteReport,
}

/// Reconstruction tolerance for `P⁺f + P⁻f = f`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-12;
/// Involution tolerance at the reference spacing.
pub const INVOLUTION_TOLERANCE: f64 = 5e-2;

/// Splits `jet` into `P⁺f` and `P⁻f`.
pub fn decompose(config: &RunConfig, jet: &LipschitzJet) -> Result<Decomposition> {
    let descriptor = jet.mesh().descriptor();
    if descriptor.m != config.m || descriptor.level != config.level {
        return Err(Error::Malformed(format!(
            "mesh mismatch: jet has m = {}, level = {}; configuration has m = {}, level = {}",
            descriptor.m, descriptor.level, config.m, config.level
        )));
    }
    let mut report = SuiteReport::new("decompose", config.parameters());
    let norm = jet.norm();
    let s = singular_sl(jet, &config.params).jet;
    let (plus, minus) = projections_from(jet, &s);
    let back = plus.add(&minus)?.sub(jet)?.norm();
    report.push(CheckRecord::at_most(
        "reconstruction",
        relative(back, norm),
        RECONSTRUCTION_TOLERANCE,
    ));
    let s2 = singular_sl(&s, &config.params).jet;
    let involution = relative(s2.sub(jet)?.norm(), norm);
    let h = jet.mesh().h();
    report.push(CheckRecord::at_most(
        "involution",
        involution,
        first_order_tolerance(INVOLUTION_TOLERANCE, h),
    ));
    report.diagnostic("plus_norm_ratio", relative(plus.norm(), norm));
    report.diagnostic("minus_norm_ratio", relative(minus.norm(), norm));
    Ok(Decomposition {
        plus,
        minus,
        report,
    })
}

/// [`decompose`] on a jet file.
pub fn decompose_file(config: &RunConfig, path: &Path) -> Result<Decomposition> {
    let text = std::fs::read_to_string(path)?;
    let file: JetFile = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let jet = file.into_jet(None)?;
    decompose(config, &jet)
}

/// `a / b`, or `a` itself when `b` vanishes.
pub(crate) fn relative(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Config(_))));
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            RunConfig::new(3, -1.0, 1.0, 2, 1.0, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::new(3, 1.0, -0.7, 2, 1.0, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::new(3, 1.0, 1.0, 2, 0.0, 1),
            Err(Error::Config(_))
        ));
        let mut cfg = RunConfig::new(5, 1.0, 1.0, 2, 1.0, 1).unwrap();
        assert!(cfg.validate_for(Suite::Algebra).is_ok());
        assert!(matches!(
            cfg.validate_for(Suite::Hardy),
            Err(Error::Config(_))
        ));
        cfg.m = 3;
        cfg.level = 9;
        assert!(matches!(
            cfg.validate_for(Suite::Involution),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn tolerance_widens_on_coarse_meshes() {
        let h = reference_spacing();
        assert_eq!(first_order_tolerance(0.05, h), 0.05);
        assert_eq!(first_order_tolerance(0.05, 0.5 * h), 0.05);
        assert!((first_order_tolerance(0.05, 2.0 * h) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn converge_rejects_bad_levels() {
        let cfg = RunConfig::default();
        assert!(converge(&cfg, Suite::Involution, &[2]).is_err());
        assert!(converge(&cfg, Suite::Involution, &[3, 2]).is_err());
        assert!(converge(&cfg, Suite::Algebra, &[1, 2]).is_err());
    }
}
