use std::path::{Path, PathBuf};

use lorentz_iso::functionals::{TOL_ATOMIC, TOL_QUADRATURE};
use lorentz_iso::profiles::ProfileSpec;
use lorentz_iso::quadrature::DEFAULT_RADIAL_NODES;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Sharpness,
    Simplex,
    Scalar,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Sharpness => "sharpness",
            Self::Simplex => "simplex",
            Self::Scalar => "scalar",
            Self::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Geodesic ball around the origin. Without a radius, random profiles
    /// draw their own.
    Ball { radius: Option<f64> },
    /// Weighted atoms with explicit values and optional gradient norms.
    Atomic {
        weights: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        grad: Option<Vec<f64>>,
    },
    /// Random atomic graphs, one per instance.
    RandomAtomic,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self::Ball { radius: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSpec {
    pub atomic: f64,
    pub quadrature: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            atomic: TOL_ATOMIC,
            quadrature: TOL_QUADRATURE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BumpSpec {
    /// The projected standard bump on `[0.3 t*, 0.7 t*]`.
    Default,
    /// `exp(-1/(s(1-s)))` on `[a, b]`, then projected.
    Standard { a: f64, b: f64 },
    /// Sampled table, then projected.
    Table { t: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessSpec {
    pub n: usize,
    pub t_star: f64,
    /// Explicit ladder; defaults to 8 log-spaced points in `[1e-3, 10^-1.5]`.
    pub epsilons: Option<Vec<f64>>,
    pub bump: BumpSpec,
    /// Half-width of the accepted windows around the slopes 2, 1, 2.
    pub slope_window: f64,
    /// Half-width for the slopes against `eps` (1 and 2).
    pub eps_slope_window: f64,
    /// Relative slack on the `A_F / eps` lower bound.
    pub af_limit_slack: f64,
}

impl Default for SharpnessSpec {
    fn default() -> Self {
        Self {
            n: 2,
            t_star: 1.0,
            epsilons: None,
            bump: BumpSpec::Default,
            slope_window: 0.1,
            eps_slope_window: 0.05,
            af_limit_slack: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalarSpec {
    pub grid_points: usize,
    pub n_values: Vec<usize>,
    pub a_values: Option<Vec<f64>>,
    pub b_values: Option<Vec<f64>>,
    pub p_values: Option<Vec<f64>>,
    pub constants_n_max: usize,
    pub counterexample_j_max: u32,
}

impl Default for ScalarSpec {
    fn default() -> Self {
        Self {
            grid_points: 200,
            n_values: vec![1, 2, 3],
            a_values: None,
            b_values: None,
            p_values: None,
            constants_n_max: 100,
            counterexample_j_max: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexSpec {
    /// Monte Carlo samples per containment estimate.
    pub mc_samples: usize,
    /// Simplices per dimension for the containment estimate.
    pub containment_instances: usize,
    /// Pairs per dimension for the induction step.
    pub induction_pairs: usize,
    pub inject_degenerate: bool,
}

impl Default for SimplexSpec {
    fn default() -> Self {
        Self {
            mc_samples: 20_000,
            containment_instances: 20,
            induction_pairs: 1000,
            inject_degenerate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub dimensions: Vec<usize>,
    pub domain: DomainSpec,
    pub profile: Option<ProfileSpec>,
    pub quadrature_nodes: usize,
    pub tolerances: ToleranceSpec,
    pub seed: u64,
    pub instances: usize,
    /// Random node subsets per instance for the Bahn–Ehrlich subset check.
    pub subsets: usize,
    /// Steps of the compact exhaustion.
    pub exhaustion_steps: usize,
    pub out_dir: PathBuf,
    pub sharpness: SharpnessSpec,
    pub scalar: ScalarSpec,
    pub simplex: SimplexSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            dimensions: vec![1, 2, 3],
            domain: DomainSpec::default(),
            profile: None,
            quadrature_nodes: DEFAULT_RADIAL_NODES,
            tolerances: ToleranceSpec::default(),
            seed: 42,
            instances: 1000,
            subsets: 2,
            exhaustion_steps: 8,
            out_dir: PathBuf::from("out"),
            sharpness: SharpnessSpec::default(),
            scalar: ScalarSpec::default(),
            simplex: SimplexSpec::default(),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

fn nonzero(name: &str, x: usize) -> Result<(), CliError> {
    if x > 0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )));
            }
        }
        if self.dimensions.is_empty() || self.dimensions.iter().any(|n| !(1..=6).contains(n)) {
            return Err(CliError::Config("dimensions must be a nonempty list from 1..=6".into()));
        }
        positive("tolerances.atomic", self.tolerances.atomic)?;
        positive("tolerances.quadrature", self.tolerances.quadrature)?;
        nonzero("instances", self.instances)?;
        nonzero("exhaustion_steps", self.exhaustion_steps)?;
        if self.quadrature_nodes < 8 {
            return Err(CliError::Config("quadrature_nodes must be at least 8".into()));
        }
        match &self.domain {
            DomainSpec::Ball { radius: Some(r) } => positive("domain.radius", *r)?,
            DomainSpec::Atomic { weights, values, grad } => {
                if weights.is_empty() || weights.len() != values.len() {
                    return Err(CliError::Config("atomic weights and values must be nonempty and equal length".into()));
                }
                if grad.as_ref().is_some_and(|g| g.len() != weights.len()) {
                    return Err(CliError::Config("atomic grad must match weights in length".into()));
                }
                for w in weights.iter().chain(values) {
                    positive("atomic weights and values", *w)?;
                }
            }
            _ => {}
        }
        if self.profile.is_some() && !matches!(self.domain, DomainSpec::Ball { radius: Some(_) }) {
            return Err(CliError::Config("a profile needs a ball domain with a radius".into()));
        }
        let s = &self.sharpness;
        nonzero("sharpness.n", s.n)?;
        positive("sharpness.t_star", s.t_star)?;
        positive("sharpness.slope_window", s.slope_window)?;
        positive("sharpness.eps_slope_window", s.eps_slope_window)?;
        positive("sharpness.af_limit_slack", s.af_limit_slack)?;
        if let Some(eps) = &s.epsilons {
            if eps.len() < 3 {
                return Err(CliError::Config("sharpness.epsilons needs at least three values".into()));
            }
            for e in eps {
                positive("sharpness.epsilons", *e)?;
            }
            if eps.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(CliError::Config("sharpness.epsilons must be strictly decreasing".into()));
            }
        }
        nonzero("scalar.grid_points", self.scalar.grid_points)?;
        nonzero("scalar.constants_n_max", self.scalar.constants_n_max)?;
        if self.scalar.counterexample_j_max == 0 {
            return Err(CliError::Config("scalar.counterexample_j_max must be positive".into()));
        }
        if self.simplex.mc_samples < 2 {
            return Err(CliError::Config("simplex.mc_samples must be at least 2".into()));
        }
        Ok(())
    }
}
