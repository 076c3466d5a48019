//! JSON experiment configuration and its resolution into domain objects.
//!
//! One config file describes one experiment: a system (subshift or Markov
//! interval map), a potential, an optional hole (center plus shrinking
//! family), a run list with per-command options, and output settings. The
//! [`crate::cli`] commands read the file, resolve the pieces they need, and
//! leave everything else untouched, so one config can drive several commands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::dimension;
use crate::error::{Error, Result};
use crate::geometry::{self, BallApproximation, Branch, MarkovIntervalMap};
use crate::holes::HoleFamily;
use crate::symbolic::{Subshift, SymbolicPoint, Word};
use crate::thermo::Potential;

/// Top-level experiment description, one JSON file per experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub potential: PotentialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole: Option<HoleConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub run: Vec<RunEntry>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Base RNG seed for Monte Carlo commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Depth floor for transfer matrices and geometric-potential sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

/// The dynamical system: a subshift given by its transition matrix, or a
/// Markov interval map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemConfig {
    Subshift(Subshift),
    Map(MapConfig),
}

/// Interval-map descriptor: a named builtin or an explicit branch list.
///
/// The branch list is kept raw and validated in [`resolve_map`]; running the
/// map constructor during untagged deserialization would reduce its message
/// to serde's generic no-variant-matched error.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapConfig {
    /// "cantor", "doubling", or "cubic".
    Named(String),
    Explicit(RawMap),
}

/// Unvalidated branch list for an explicit interval map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMap {
    pub branches: Vec<Branch>,
}

/// Potential descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialConfig {
    /// Constant potential at depth 1.
    Constant(f64),
    /// Locally constant potential from an explicit cylinder table.
    Table {
        depth: usize,
        values: BTreeMap<Word, f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<f64>,
    },
    /// Geometric potential -t log|f'| of a map system. With t omitted, t is
    /// set to the Bowen root of the closed map, making the pressure zero.
    Bowen {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
}

/// Hole description: a marked center plus a family of shrinking holes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub center: CenterConfig,
    pub family: FamilyConfig,
}

/// The marked point the holes shrink to.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterConfig {
    /// Periodic point with the given repeating block.
    Periodic(Word),
    /// Preperiod followed by a repeating block.
    EventuallyPeriodic { preperiod: Word, block: Word },
    /// A finite prefix of an otherwise unspecified point.
    Prefix(Word),
    /// The binary Champernowne point truncated to this many digits.
    Champernowne(usize),
    /// A point of the interval, encoded through the map's branches. Strings
    /// are exact fractions ("1/4"); numbers are binary64.
    Point(PointSpec),
}

/// Exact or floating interval point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Exact(String),
    Float(f64),
}

/// The family of holes around the center.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConfig {
    /// U_n is the length-n cylinder of the center.
    SingleCylinder { n_max: usize },
    /// U_n sandwiches the metric ball B(z, eps_n) between cylinder unions
    /// with measure slack eta.
    Ball { epsilons: Vec<f64>, eta: f64 },
}

/// One command entry in the run list, with per-command options.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunEntry {
    Pressure {
        /// Depth bound for the empirical Gibbs-constant scan.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gibbs_depth: Option<usize>,
    },
    Escape {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_range: Option<[usize; 2]>,
    },
    Dimension {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_range: Option<[usize; 2]>,
    },
    Oracle {
        /// Family index of the hole to check; defaults to the deepest.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_max: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_fraction: Option<f64>,
    },
}

/// Where and how tables are written.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, created if missing; without it only the stdout
    /// report is produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            formats: default_formats(),
        }
    }
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A resolved system: the subshift always exists, the map only for interval
/// systems.
#[derive(Debug, Clone)]
pub enum System {
    Shift(Subshift),
    Map(MarkovIntervalMap),
}

impl System {
    pub fn shift(&self) -> &Subshift {
        match self {
            System::Shift(s) => s,
            System::Map(m) => m.subshift(),
        }
    }

    pub fn map(&self) -> Option<&MarkovIntervalMap> {
        match self {
            System::Shift(_) => None,
            System::Map(m) => Some(m),
        }
    }
}

/// The potential actually used, plus how it was obtained.
#[derive(Debug, Clone)]
pub struct ResolvedPotential {
    pub phi: Potential,
    /// Geometric parameter when the potential is -t log|f'|.
    pub t: Option<f64>,
    /// Sampling oscillation for geometric potentials; 0 otherwise.
    pub oscillation: f64,
}

/// Hole families ready for sweeps. Ball mode carries both sandwich members;
/// cylinder mode only the primary.
#[derive(Debug, Clone)]
pub struct ResolvedFamilies {
    pub center: SymbolicPoint,
    pub primary: HoleFamily,
    pub outer: Option<HoleFamily>,
    /// Requested measure slack, ball mode.
    pub eta: Option<f64>,
    /// Largest achieved slack across the radii, ball mode.
    pub eta_achieved: Option<f64>,
    pub approximations: Option<Vec<BallApproximation>>,
}

impl ExperimentConfig {
    pub fn resolve_system(&self) -> Result<System> {
        match &self.system {
            SystemConfig::Subshift(s) => Ok(System::Shift(s.clone())),
            SystemConfig::Map(m) => Ok(System::Map(resolve_map(m)?)),
        }
    }

    /// Builds the potential; `depth_floor` bounds the sampling depth of
    /// geometric potentials from below.
    pub fn resolve_potential(&self, system: &System, depth_floor: usize) -> Result<ResolvedPotential> {
        match &self.potential {
            PotentialConfig::Constant(v) => Ok(ResolvedPotential {
                phi: Potential::constant(*v),
                t: None,
                oscillation: 0.0,
            }),
            PotentialConfig::Table {
                depth,
                values,
                default,
            } => Ok(ResolvedPotential {
                phi: Potential::new(*depth, values.clone(), *default)?,
                t: None,
                oscillation: 0.0,
            }),
            PotentialConfig::Bowen { t } => {
                let map = system.map().ok_or_else(|| {
                    Error::Config("geometric potential needs an interval map system".into())
                })?;
                let depth = depth_floor.max(1);
                let t = match t {
                    Some(t) => *t,
                    None => dimension::bowen_root(map, depth, None)?.t,
                };
                let sampled = map.log_deriv_potential(t, depth)?;
                Ok(ResolvedPotential {
                    phi: sampled.potential,
                    t: Some(t),
                    oscillation: sampled.oscillation,
                })
            }
        }
    }

    /// Builds the hole families; `phi` sets the measure in which ball slack
    /// is controlled.
    pub fn resolve_families(&self, system: &System, phi: &Potential) -> Result<ResolvedFamilies> {
        let hole = self
            .hole
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a hole section".into()))?;
        let shift = system.shift();
        match &hole.family {
            FamilyConfig::SingleCylinder { n_max } => {
                if *n_max == 0 {
                    return Err(Error::Config("n_max must be at least 1".into()));
                }
                let center = resolve_center(system, &hole.center, *n_max)?;
                shift.validate_point(&center)?;
                let primary = HoleFamily::standard(shift, &center, *n_max)?;
                Ok(ResolvedFamilies {
                    center,
                    primary,
                    outer: None,
                    eta: None,
                    eta_achieved: None,
                    approximations: None,
                })
            }
            FamilyConfig::Ball { epsilons, eta } => {
                let map = system.map().ok_or_else(|| {
                    Error::Config("ball families need an interval map system".into())
                })?;
                let z = match &hole.center {
                    CenterConfig::Point(spec) => point_value(spec)?,
                    _ => {
                        return Err(Error::Config(
                            "ball families need a point center".into(),
                        ))
                    }
                };
                let family = geometry::ball_family(map, phi, z, epsilons, *eta)?;
                let eta_achieved = family
                    .approximations
                    .iter()
                    .map(|a| a.eta)
                    .fold(0.0, f64::max);
                // Exact rational centers recover periodicity, which the
                // predicted escape limit depends on.
                let center = match &hole.center {
                    CenterConfig::Point(PointSpec::Exact(s)) => {
                        let digits = family.approximations.last().unwrap().depth + 8;
                        map.encode_rational(&parse_rational(s)?, digits)?
                    }
                    _ => family.center.clone(),
                };
                let primary =
                    HoleFamily::from_parts(shift, center.clone(), family.inner.holes().to_vec())?;
                let outer =
                    HoleFamily::from_parts(shift, center.clone(), family.outer.holes().to_vec())?;
                Ok(ResolvedFamilies {
                    center,
                    primary,
                    outer: Some(outer),
                    eta: Some(*eta),
                    eta_achieved: Some(eta_achieved),
                    approximations: Some(family.approximations),
                })
            }
        }
    }
}

fn resolve_map(config: &MapConfig) -> Result<MarkovIntervalMap> {
    match config {
        MapConfig::Named(name) => match name.as_str() {
            "cantor" => Ok(geometry::cantor_middle_thirds()),
            "doubling" => Ok(geometry::doubling_map()),
            "cubic" => Ok(geometry::cubic_toy_map()),
            other => Err(Error::Config(format!(
                "unknown map name {other:?}; expected cantor, doubling, or cubic"
            ))),
        },
        MapConfig::Explicit(raw) => MarkovIntervalMap::new(raw.branches.clone()),
    }
}

fn resolve_center(system: &System, config: &CenterConfig, digits: usize) -> Result<SymbolicPoint> {
    match config {
        CenterConfig::Periodic(block) => SymbolicPoint::periodic(block.clone()),
        CenterConfig::EventuallyPeriodic { preperiod, block } => {
            SymbolicPoint::eventually_periodic(preperiod.clone(), block.clone())
        }
        CenterConfig::Prefix(w) => Ok(SymbolicPoint::aperiodic_prefix(w.clone())),
        CenterConfig::Champernowne(len) => Ok(SymbolicPoint::binary_champernowne(*len)),
        CenterConfig::Point(spec) => {
            let map = system.map().ok_or_else(|| {
                Error::Config("point centers need an interval map system".into())
            })?;
            match spec {
                PointSpec::Exact(s) => map.encode_rational(&parse_rational(s)?, digits),
                PointSpec::Float(x) => map.encode_point(*x, digits),
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.parse()
        .map_err(|e| Error::Config(format!("bad rational point {s:?}: {e}")))
}

fn point_value(spec: &PointSpec) -> Result<f64> {
    match spec {
        PointSpec::Exact(s) => parse_rational(s)?
            .to_f64()
            .ok_or_else(|| Error::Config(format!("rational point {s:?} overflows binary64"))),
        PointSpec::Float(x) => Ok(*x),
    }
}
