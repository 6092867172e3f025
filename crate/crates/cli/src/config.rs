//! Experiment manifests: a sectioned TOML file describing the gas law, the
//! Riemann data, the smoothing, the solver, and the output layout.
//!
//! Loading resolves documented defaults (q = 2, cfl = 0.5, order = 2, and
//! eps = delta^3 when no smoothing rate is given), then validates every
//! module-level invariant up front so commands start from a config that can
//! only fail for numerical reasons. A loaded config serializes back to an
//! equal config, and the first 16 hex digits of the SHA-256 of that canonical
//! form tag every file a run emits.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rarewave_core::approx_wave::{ApproxWave, Bump, PerturbationSpec};
use rarewave_core::riemann::{classify, solve_fan, Classification};
use rarewave_core::solver::{BoundaryKind, SchemeOrder};
use rarewave_core::{Grid1D, PressureLaw, RiemannData, SolverConfig, WaveFan};

use crate::error::CliError;

/// What a run does with the configured wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Solve the fan and print it with exact-profile samples.
    Riemann,
    /// Tabulate the smooth approximate wave and its derivatives.
    ApproxWave,
    /// Run the solver, writing snapshots and a diagnostics series.
    Simulate,
    /// Fit the decay exponents of the wave gradients and pass judgement.
    VerifyDecay,
    /// Sweep the relaxation time against the classical limit.
    CompareLimit,
    /// Grid-refinement study of the solver.
    Convergence,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Riemann => "riemann",
            ExperimentKind::ApproxWave => "approx-wave",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::VerifyDecay => "verify-decay",
            ExperimentKind::CompareLimit => "compare-limit",
            ExperimentKind::Convergence => "convergence",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawBlock {
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

impl Default for LawBlock {
    fn default() -> Self {
        Self { a: default_a(), gamma: default_gamma() }
    }
}

/// End states of the jump. The only section without defaults: every
/// experiment needs its data spelled out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannBlock {
    pub v_minus: f64,
    pub u_minus: f64,
    pub v_plus: f64,
    pub u_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingBlock {
    /// Smoothing rate. Left out, it resolves to delta^3 at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Tail exponent of the mollifier shape; must exceed 3/2.
    #[serde(default = "default_q")]
    pub q: f64,
}

impl Default for SmoothingBlock {
    fn default() -> Self {
        Self { eps: None, q: default_q() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// The domain is [-half_length, half_length].
    #[serde(default = "default_half_length")]
    pub half_length: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// 1 or 2.
    #[serde(default = "default_order")]
    pub order: u32,
    /// Strictly increasing times in (0, t_end]; the initial state and the
    /// final state are always recorded on top of these.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            tau: default_tau(),
            mu: default_mu(),
            cfl: default_cfl(),
            half_length: default_half_length(),
            cells: default_cells(),
            t_end: default_t_end(),
            order: default_order(),
            snapshot_times: Vec::new(),
        }
    }
}

/// Gaussian bump `amplitude exp(-(x - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpBlock {
    pub amplitude: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
}

/// Optional initial perturbations, one bump per field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BumpBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<BumpBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<BumpBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: default_out_dir() }
    }
}

fn default_a() -> f64 {
    1.0
}
fn default_gamma() -> f64 {
    2.0
}
fn default_q() -> f64 {
    2.0
}
fn default_tau() -> f64 {
    0.2
}
fn default_mu() -> f64 {
    1.0
}
fn default_cfl() -> f64 {
    0.5
}
fn default_half_length() -> f64 {
    200.0
}
fn default_cells() -> usize {
    4000
}
fn default_t_end() -> f64 {
    50.0
}
fn default_order() -> u32 {
    2
}
fn default_width() -> f64 {
    1.0
}
fn default_out_dir() -> String {
    "out".into()
}
fn default_kind() -> ExperimentKind {
    ExperimentKind::Riemann
}

/// One experiment manifest, fully resolved and validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_kind")]
    pub kind: ExperimentKind,
    #[serde(default)]
    pub law: LawBlock,
    pub riemann: RiemannBlock,
    #[serde(default)]
    pub smoothing: SmoothingBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub perturbation: PerturbationBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn cfgerr(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl ExperimentConfig {
    /// Parse, resolve defaults, and validate.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        cfg.resolve();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Jump size `|v_+ - v_-| + |u_+ - u_-|` of the raw data.
    pub fn delta(&self) -> f64 {
        (self.riemann.v_plus - self.riemann.v_minus).abs()
            + (self.riemann.u_plus - self.riemann.u_minus).abs()
    }

    /// Fill in the one data-dependent default, eps = delta^3.
    fn resolve(&mut self) {
        if self.smoothing.eps.is_none() {
            self.smoothing.eps = Some(self.delta().powi(3));
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let l = &self.law;
        if !(l.a > 0.0) || !l.a.is_finite() {
            return bad(format!("law.a must be positive and finite, got {}", l.a));
        }
        if !(l.gamma > 1.0) || !l.gamma.is_finite() {
            return bad(format!("law.gamma must exceed 1, got {}", l.gamma));
        }
        let law = PressureLaw::new(l.a, l.gamma).map_err(cfgerr)?;
        let r = &self.riemann;
        let data = RiemannData::new(r.v_minus, r.u_minus, r.v_plus, r.u_plus)
            .map_err(|e| CliError::Config(format!("riemann: {e}")))?;
        if classify(&law, &data).map_err(cfgerr)? == Classification::Outside {
            return bad(
                "riemann data is outside the rarefaction region (classification OUTSIDE): \
                 the right state must lie on or above both rarefaction curves through the left state"
                    .into(),
            );
        }
        solve_fan(&law, &data).map_err(|e| CliError::Config(format!("riemann: {e}")))?;

        let eps = self.smoothing.eps.unwrap_or(0.0);
        if !(eps > 0.0) || !eps.is_finite() {
            return bad(format!(
                "smoothing.eps must be positive and finite, got {eps} \
                 (the default rule eps = delta^3 needs a nonzero jump)"
            ));
        }
        if !(self.smoothing.q > 1.5) || !self.smoothing.q.is_finite() {
            return bad(format!("smoothing.q must exceed 3/2, got {}", self.smoothing.q));
        }

        let s = &self.solver;
        if !(s.tau >= 0.0) || !s.tau.is_finite() {
            return bad(format!("solver.tau must be nonnegative, got {}", s.tau));
        }
        if !(s.mu > 0.0) || !s.mu.is_finite() {
            return bad(format!("solver.mu must be positive, got {}", s.mu));
        }
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return bad(format!("solver.cfl must lie in (0, 1], got {}", s.cfl));
        }
        if !(s.half_length > 0.0) || !s.half_length.is_finite() {
            return bad(format!("solver.half_length must be positive, got {}", s.half_length));
        }
        if s.cells < 16 {
            return bad(format!("solver.cells must be at least 16, got {}", s.cells));
        }
        if !(s.t_end >= 0.0) || !s.t_end.is_finite() {
            return bad(format!("solver.t_end must be nonnegative, got {}", s.t_end));
        }
        if !matches!(s.order, 1 | 2) {
            return bad(format!("solver.order must be 1 or 2, got {}", s.order));
        }
        let mut prev = 0.0;
        for &ts in &s.snapshot_times {
            if !(ts > 0.0) || ts > s.t_end || !ts.is_finite() {
                return bad(format!(
                    "solver.snapshot_times entry {ts} lies outside (0, {}]; \
                     the initial state is always recorded",
                    s.t_end
                ));
            }
            if ts <= prev {
                return bad("solver.snapshot_times must be strictly increasing".into());
            }
            prev = ts;
        }

        for (name, bump) in [
            ("phi", &self.perturbation.phi),
            ("psi", &self.perturbation.psi),
            ("s", &self.perturbation.s),
        ] {
            if let Some(b) = bump {
                if !b.amplitude.is_finite() || !b.center.is_finite() {
                    return bad(format!(
                        "perturbation.{name} needs finite amplitude and center"
                    ));
                }
                if !(b.width > 0.0) || !b.width.is_finite() {
                    return bad(format!(
                        "perturbation.{name}.width must be positive, got {}",
                        b.width
                    ));
                }
            }
        }
        Ok(())
    }

    /// The resolved config in its on-disk form. Hash input and echo format.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical form.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_toml().as_bytes());
        let mut out = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            use std::fmt::Write;
            write!(out, "{byte:02x}").expect("hex digits");
        }
        out
    }

    pub fn eps(&self) -> f64 {
        self.smoothing.eps.expect("eps resolved at load")
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.output.dir)
    }

    pub fn pressure_law(&self) -> Result<PressureLaw, CliError> {
        PressureLaw::new(self.law.a, self.law.gamma).map_err(cfgerr)
    }

    pub fn riemann_data(&self) -> Result<RiemannData, CliError> {
        let r = &self.riemann;
        RiemannData::new(r.v_minus, r.u_minus, r.v_plus, r.u_plus).map_err(cfgerr)
    }

    pub fn wave_fan(&self) -> Result<WaveFan, CliError> {
        solve_fan(&self.pressure_law()?, &self.riemann_data()?).map_err(cfgerr)
    }

    pub fn approx_wave(&self) -> Result<ApproxWave, CliError> {
        ApproxWave::new(self.pressure_law()?, self.wave_fan()?, self.eps(), self.smoothing.q)
            .map_err(cfgerr)
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        Grid1D::new(self.solver.half_length, self.solver.cells).map_err(cfgerr)
    }

    pub fn scheme_order(&self) -> SchemeOrder {
        if self.solver.order == 1 {
            SchemeOrder::First
        } else {
            SchemeOrder::Second
        }
    }

    pub fn perturbation_spec(&self) -> PerturbationSpec {
        let conv = |b: &Option<BumpBlock>| {
            b.map(|b| Bump { amplitude: b.amplitude, center: b.center, width: b.width })
        };
        PerturbationSpec {
            phi: conv(&self.perturbation.phi),
            psi: conv(&self.perturbation.psi),
            s: conv(&self.perturbation.s),
        }
    }

    /// The core solver parameters, with an optional relaxation-time override
    /// for sweep commands.
    pub fn solver_config_with_tau(&self, tau: f64) -> Result<SolverConfig, CliError> {
        Ok(SolverConfig {
            law: self.pressure_law()?,
            tau,
            mu: self.solver.mu,
            cfl: self.solver.cfl,
            t_end: self.solver.t_end,
            snapshot_times: self.solver.snapshot_times.clone(),
            boundary: BoundaryKind::FarFieldFixed,
            order: self.scheme_order(),
        })
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        self.solver_config_with_tau(self.solver.tau)
    }
}
