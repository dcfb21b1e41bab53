use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclic::TestSequenceRule;
use crate::kronecker::{PhaseConvention, DEFAULT_C_O};
use crate::simulate::CovarianceSpec;
use crate::spectrum::{AngularConvention, CoefficientRule, CoefficientSeq, FrequencyRule, FrequencySeq, PolynomialSpec};
use crate::{Error, Result};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "GSUP_SEED";

/// A complete experiment description, read from TOML.
///
/// ```toml
/// [run]
/// seed = 7
/// reps = 100000
///
/// [experiment]
/// kind = "equicorrelated"
/// n = 8
/// lambda = 0.3
/// thetas = [2.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub run: RunSection,
    pub experiment: Experiment,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_reps() -> u64 {
    10_000
}

fn default_workers() -> usize {
    1
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: None,
            reps: default_reps(),
            workers: default_workers(),
        }
    }
}

/// Overrides for constants the statements leave unspecified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_c_o")]
    pub c_o: f64,
}

fn one() -> f64 {
    1.0
}

fn default_c_o() -> f64 {
    DEFAULT_C_O
}

impl Default for Constants {
    fn default() -> Self {
        Self { c: 1.0, c_o: DEFAULT_C_O }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub plotdata: Option<PathBuf>,
}

/// Coefficients, frequencies and index range of an almost periodic polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySection {
    #[serde(default = "one_usize")]
    pub y: usize,
    pub x: usize,
    pub coefficients: CoefficientRule,
    #[serde(default = "identity_rule")]
    pub frequencies: FrequencyRule,
    #[serde(default)]
    pub convention: AngularConvention,
}

fn one_usize() -> usize {
    1
}

fn identity_rule() -> FrequencyRule {
    FrequencyRule::Identity
}

impl PolySection {
    pub fn build(&self) -> Result<PolynomialSpec> {
        let coeffs = CoefficientSeq::new(self.coefficients.clone(), self.x)?;
        let freqs = FrequencySeq::from_rule(&self.frequencies, self.x)?;
        PolynomialSpec::new(coeffs, freqs, self.y, self.x, self.convention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockForm {
    /// The closed form as stated.
    #[default]
    Verbatim,
    /// `β = 1/λ_max(C)` with the true determinant.
    Exact,
}

/// One experiment per family of inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// `P{max X_i <= Θ}` for unit-variance equicorrelated vectors.
    Equicorrelated { n: usize, lambda: f64, thetas: Vec<f64> },
    /// Same for block covariances.
    Block {
        n_blocks: usize,
        k: usize,
        u: f64,
        lambda: f64,
        thetas: Vec<f64>,
        #[serde(default)]
        form: BlockForm,
    },
    /// Two-sided bounds on `P{max |X_j| <= z}` for a stationary sequence
    /// with cosine-polynomial spectral density `c_0 + Σ c_h cos(h t)`.
    Szego { density: Vec<f64>, n: usize, zs: Vec<f64> },
    /// Sup of a trigonometric polynomial over `[0, ε]` at the moderate threshold.
    ModerateTrig {
        polynomial: PolySection,
        eta: f64,
        eps: f64,
        v: Option<f64>,
        #[serde(default = "default_density")]
        density: usize,
    },
    /// `X` against its rational neighbour `X⊥` on `[1, U]`.
    CyclicTransfer {
        polynomial: PolySection,
        test_sequence: TestSequenceRule,
        u: f64,
        theta: f64,
        h: f64,
        #[serde(default = "default_density")]
        density: usize,
    },
    Decoupling(DecouplingTarget),
    /// Lattice search with fixed or seeded random targets.
    KroneckerSearch {
        lambdas: Vec<f64>,
        betas: Option<Vec<f64>>,
        #[serde(default = "one_usize")]
        trials: usize,
        omega: u64,
        h: f64,
        interval: (f64, f64),
    },
    Limsup {
        alphas: Vec<f64>,
        lambdas: Vec<f64>,
        #[serde(default = "one_i64")]
        start: i64,
        #[serde(default = "one_i64")]
        step: i64,
        ladder: Vec<usize>,
        #[serde(default)]
        convention: PhaseConvention,
    },
    Divergence {
        polynomial: PolySection,
        a: f64,
        ladder: Vec<u64>,
        /// Required relative growth `S_{2J} >= (1 + growth) S_J`.
        #[serde(default = "default_growth")]
        growth: f64,
    },
    LatticeCorrelation {
        polynomial: PolySection,
        a: f64,
        omega: u64,
        beta: f64,
        c: f64,
        points: usize,
        block_length: f64,
        #[serde(default)]
        pi_factor: bool,
        /// Threshold argument of the cosine-lattice bound.
        #[serde(default = "one")]
        kappa: f64,
    },
}

fn default_density() -> usize {
    256
}

fn one_i64() -> i64 {
    1
}

fn default_growth() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecouplingTarget {
    /// Box probabilities against the product of marginals.
    Vector {
        covariance: CovarianceSpec,
        p: f64,
        beta: f64,
        boxes: Vec<(f64, f64)>,
    },
    /// `P{max_{j<=z} X(j/n) <= Θ}` against the cyclic deviation bound.
    CyclicDeviation {
        polynomial: PolySection,
        n: usize,
        eps: f64,
        thetas: Vec<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Equicorrelated { .. } => "equicorrelated",
            Experiment::Block { .. } => "block",
            Experiment::Szego { .. } => "szego",
            Experiment::ModerateTrig { .. } => "moderate-trig",
            Experiment::CyclicTransfer { .. } => "cyclic-transfer",
            Experiment::Decoupling(_) => "decoupling",
            Experiment::KroneckerSearch { .. } => "kronecker-search",
            Experiment::Limsup { .. } => "limsup",
            Experiment::Divergence { .. } => "divergence",
            Experiment::LatticeCorrelation { .. } => "lattice-correlation",
        }
    }
}

pub const KINDS: [&str; 10] = [
    "equicorrelated",
    "block",
    "szego",
    "moderate-trig",
    "cyclic-transfer",
    "decoupling",
    "kronecker-search",
    "limsup",
    "divergence",
    "lattice-correlation",
];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(format!("config {}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form with worker count and output
    /// paths removed, so the hash identifies the computation only.
    pub fn hash(&self, seed: u64) -> String {
        let mut canon = self.clone();
        canon.run.seed = Some(seed);
        canon.run.workers = 0;
        canon.output = OutputSection::default();
        let bytes = serde_json::to_vec(&canon).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Seed precedence: explicit flag, then the environment, then the config, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env {
        return v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")));
    }
    Ok(config.unwrap_or(0))
}
