//! Config file schema and its translation into library types.
//!
//! A run is described by one TOML file with three tables: `[problem]` fixes
//! the coupling operators, the two mappings and the starting points,
//! `[solver]` picks a mode with its schedules and tolerances, `[output]`
//! says where the trace goes and in which format. Parse errors keep the
//! line and column reported by the TOML reader; everything rejected after
//! parsing names the offending field, so a bad file always points at itself.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result, anyhow, bail};
use serde::Deserialize;

use sefpp::{
    AlphaSchedule, ConvexSet, KnownSolution, LinearOperator, NonlinearMapping, Point, SefppProblem,
    SolverConfig, SolverMode, TauSchedule, WeightChoice,
};

use crate::export::ExportFormat;

/// A fully translated run: the problem and solver are library values ready
/// to hand to [`sefpp::solve`], the output plan is interpreted by
/// [`crate::export`], and the summary is a one-line human description used
/// by `validate`.
#[derive(Debug)]
pub struct LoadedRun {
    pub problem: SefppProblem,
    pub solver: SolverConfig,
    pub output: OutputPlan,
    pub summary: String,
}

#[derive(Debug)]
pub struct OutputPlan {
    pub format: ExportFormat,
    pub path: PathBuf,
    pub log_every_k: usize,
}

/// Reads and translates a config file. Any failure, from the file system up
/// to a rejected known solution, comes back as one located error.
pub fn load_run(path: &Path) -> Result<LoadedRun> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: RunConfig =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    spec.build()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    problem: ProblemSpec,
    solver: SolverSpec,
    output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSpec {
    /// Row-major matrix for the left coupling operator.
    d1: Vec<Vec<f64>>,
    /// Row-major matrix for the right coupling operator.
    d2: Vec<Vec<f64>>,
    t1: MappingSpec,
    t2: MappingSpec,
    x0: Vec<f64>,
    y0: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSpec {
    /// "known-norm", "norm-free" or "decoupled-km".
    mode: String,
    alpha: ScheduleSpec,
    tau: ScheduleSpec,
    /// Either the string "auto" or a `{ eta, zeta }` table. Defaults to auto.
    weights: Option<WeightsSpec>,
    max_iters: Option<usize>,
    stop_tolerance: Option<f64>,
    start_index: Option<usize>,
    parameter_override: Option<bool>,
    /// Optional `{ p, q }` pair; when present it is verified against the
    /// problem and the trace gains a distance column.
    known_solution: Option<KnownSolutionSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    /// "csv" or "json-lines".
    format: String,
    path: PathBuf,
    log_every_k: Option<usize>,
}

/// Mapping descriptor. `kind` selects the constructor; the other fields are
/// kind-specific, and a field that the chosen kind does not read is an
/// error rather than silently ignored.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingSpec {
    kind: String,
    scale: Option<f64>,
    offset: Option<Vec<f64>>,
    rows: Option<Vec<Vec<f64>>>,
    set: Option<SetSpec>,
    lipschitz: Option<f64>,
    fixed_points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetSpec {
    kind: String,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    normal: Option<Vec<f64>>,
    offset: Option<f64>,
    dim: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSpec {
    kind: String,
    value: Option<f64>,
    scale: Option<f64>,
    exponent: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum WeightsSpec {
    Keyword(String),
    Fixed { eta: f64, zeta: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnownSolutionSpec {
    p: Vec<f64>,
    q: Vec<f64>,
}

fn need<T: Copy>(path: &str, name: &str, field: Option<T>, kind: &str) -> Result<T> {
    field.ok_or_else(|| anyhow!("{path}.{name}: required by kind {kind:?}"))
}

fn need_vec(path: &str, name: &str, field: &Option<Vec<f64>>, kind: &str) -> Result<Vec<f64>> {
    field
        .clone()
        .ok_or_else(|| anyhow!("{path}.{name}: required by kind {kind:?}"))
}

impl MappingSpec {
    fn build(&self, path: &str) -> Result<NonlinearMapping> {
        let kind = self.kind.as_str();
        self.reject_stray_fields(path)?;
        let mut mapping = match kind {
            "identity" => NonlinearMapping::identity(),
            "affine" => {
                let scale = need(path, "scale", self.scale, kind)?;
                let offset = need_vec(path, "offset", &self.offset, kind)?;
                NonlinearMapping::affine(scale, offset).map_err(|e| anyhow!("{path}: {e}"))?
            }
            "affine-matrix" => {
                let rows = self
                    .rows
                    .clone()
                    .ok_or_else(|| anyhow!("{path}.rows: required by kind \"affine-matrix\""))?;
                let offset = need_vec(path, "offset", &self.offset, kind)?;
                NonlinearMapping::affine_matrix(rows, offset).map_err(|e| anyhow!("{path}: {e}"))?
            }
            "projection" => {
                let set = self
                    .set
                    .as_ref()
                    .ok_or_else(|| anyhow!("{path}.set: required by kind \"projection\""))?;
                NonlinearMapping::projection(set.build(&format!("{path}.set"))?)
            }
            other => bail!(
                "{path}.kind: unknown mapping kind {other:?}; expected identity, affine, \
                 affine-matrix or projection"
            ),
        };
        if let Some(l) = self.lipschitz {
            mapping = mapping
                .with_lipschitz(l)
                .map_err(|e| anyhow!("{path}.lipschitz: {e}"))?;
        }
        if let Some(points) = &self.fixed_points {
            let points = points
                .iter()
                .map(|coords| Point::new(coords.clone()))
                .collect::<sefpp::Result<Vec<_>>>()
                .map_err(|e| anyhow!("{path}.fixed_points: {e}"))?;
            mapping = mapping
                .with_fixed_points(points)
                .map_err(|e| anyhow!("{path}.fixed_points: {e}"))?;
        }
        Ok(mapping)
    }

    fn reject_stray_fields(&self, path: &str) -> Result<()> {
        let allowed: &[&str] = match self.kind.as_str() {
            "identity" => &[],
            "affine" => &["scale", "offset"],
            "affine-matrix" => &["rows", "offset"],
            "projection" => &["set"],
            // Unknown kinds are reported by build() with the full list.
            _ => return Ok(()),
        };
        let present = [
            ("scale", self.scale.is_some()),
            ("offset", self.offset.is_some()),
            ("rows", self.rows.is_some()),
            ("set", self.set.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                bail!("{path}.{name}: not read by mapping kind {:?}", self.kind);
            }
        }
        Ok(())
    }
}

impl SetSpec {
    fn build(&self, path: &str) -> Result<ConvexSet> {
        let kind = self.kind.as_str();
        match kind {
            "box" => {
                let lower = need_vec(path, "lower", &self.lower, kind)?;
                let upper = need_vec(path, "upper", &self.upper, kind)?;
                ConvexSet::box_set(lower, upper).map_err(|e| anyhow!("{path}: {e}"))
            }
            "ball" => {
                let center = need_vec(path, "center", &self.center, kind)?;
                let radius = need(path, "radius", self.radius, kind)?;
                let center = Point::new(center).map_err(|e| anyhow!("{path}.center: {e}"))?;
                ConvexSet::ball(center, radius).map_err(|e| anyhow!("{path}: {e}"))
            }
            "halfspace" => {
                let normal = need_vec(path, "normal", &self.normal, kind)?;
                let offset = need(path, "offset", self.offset, kind)?;
                let normal = Point::new(normal).map_err(|e| anyhow!("{path}.normal: {e}"))?;
                ConvexSet::halfspace(normal, offset).map_err(|e| anyhow!("{path}: {e}"))
            }
            "whole-space" => {
                let dim = need(path, "dim", self.dim, kind)?;
                ConvexSet::whole_space(dim).map_err(|e| anyhow!("{path}: {e}"))
            }
            other => bail!(
                "{path}.kind: unknown set kind {other:?}; expected box, ball, halfspace or \
                 whole-space"
            ),
        }
    }
}

impl ScheduleSpec {
    fn to_tau(&self, path: &str) -> Result<TauSchedule> {
        let kind = self.kind.as_str();
        match kind {
            "constant" => TauSchedule::constant(need(path, "value", self.value, kind)?),
            "harmonic" => TauSchedule::harmonic(need(path, "scale", self.scale, kind)?),
            "power" => TauSchedule::power(
                need(path, "scale", self.scale, kind)?,
                need(path, "exponent", self.exponent, kind)?,
            ),
            other => bail!(
                "{path}.kind: unknown schedule kind {other:?}; expected constant, harmonic \
                 or power"
            ),
        }
        .map_err(|e| anyhow!("{path}: {e}"))
    }

    fn to_alpha(&self, path: &str) -> Result<AlphaSchedule> {
        match self.kind.as_str() {
            "constant" => AlphaSchedule::constant(need(path, "value", self.value, "constant")?)
                .map_err(|e| anyhow!("{path}: {e}")),
            other => bail!(
                "{path}.kind: the relaxation schedule only supports \"constant\", got {other:?}"
            ),
        }
    }
}

impl RunConfig {
    fn build(&self) -> Result<LoadedRun> {
        let d1 =
            LinearOperator::new(self.problem.d1.clone()).map_err(|e| anyhow!("problem.d1: {e}"))?;
        let d2 =
            LinearOperator::new(self.problem.d2.clone()).map_err(|e| anyhow!("problem.d2: {e}"))?;
        let t1 = self.problem.t1.build("problem.t1")?;
        let t2 = self.problem.t2.build("problem.t2")?;
        let x0 = Point::new(self.problem.x0.clone()).map_err(|e| anyhow!("problem.x0: {e}"))?;
        let y0 = Point::new(self.problem.y0.clone()).map_err(|e| anyhow!("problem.y0: {e}"))?;
        let problem =
            SefppProblem::new(d1, d2, t1, t2, x0, y0).map_err(|e| anyhow!("problem: {e}"))?;

        let mode = match self.solver.mode.as_str() {
            "known-norm" => SolverMode::KnownNorm,
            "norm-free" => SolverMode::NormFree,
            "decoupled-km" => SolverMode::DecoupledKm,
            other => bail!(
                "solver.mode: unknown mode {other:?}; expected known-norm, norm-free or \
                 decoupled-km"
            ),
        };
        let alpha = self.solver.alpha.to_alpha("solver.alpha")?;
        let tau = self.solver.tau.to_tau("solver.tau")?;
        let mut solver = SolverConfig::new(mode, alpha, tau);
        match &self.solver.weights {
            // Auto is the library default, so the keyword is a no-op.
            None => {}
            Some(WeightsSpec::Keyword(word)) if word == "auto" => {}
            Some(WeightsSpec::Keyword(word)) => {
                bail!("solver.weights: the only keyword is \"auto\", got {word:?}")
            }
            Some(WeightsSpec::Fixed { eta, zeta }) => {
                solver = solver.with_weights(WeightChoice::Fixed {
                    eta: *eta,
                    zeta: *zeta,
                });
            }
        }
        if let Some(m) = self.solver.max_iters {
            solver = solver.with_max_iters(m);
        }
        if let Some(t) = self.solver.stop_tolerance {
            solver = solver.with_stop_tolerance(t);
        }
        if let Some(s) = self.solver.start_index {
            solver = solver.with_start_index(s);
        }
        if let Some(allow) = self.solver.parameter_override {
            solver = solver.with_override(allow);
        }
        if let Some(pair) = &self.solver.known_solution {
            let p =
                Point::new(pair.p.clone()).map_err(|e| anyhow!("solver.known_solution.p: {e}"))?;
            let q =
                Point::new(pair.q.clone()).map_err(|e| anyhow!("solver.known_solution.q: {e}"))?;
            let verified = KnownSolution::verified(&problem, p, q)
                .map_err(|e| anyhow!("solver.known_solution: {e}"))?;
            solver = solver.with_known_solution(verified);
        }

        let format = match self.output.format.as_str() {
            "csv" => ExportFormat::Csv,
            "json-lines" => ExportFormat::JsonLines,
            other => bail!("output.format: unknown format {other:?}; expected csv or json-lines"),
        };
        let log_every_k = self.output.log_every_k.unwrap_or(1);
        if log_every_k == 0 {
            bail!("output.log_every_k: must be at least 1");
        }

        let mut summary = format!(
            "x in R^{}, y in R^{}, coupled through R^{}; mode {}, alpha {}, tau {}",
            problem.x0().dim(),
            problem.y0().dim(),
            problem.d1().codomain_dim(),
            self.solver.mode,
            alpha.describe(),
            tau.describe(),
        );
        if self.solver.known_solution.is_some() {
            write!(summary, "; known solution verified").unwrap();
        }

        Ok(LoadedRun {
            problem,
            solver,
            output: OutputPlan {
                format,
                path: self.output.path.clone(),
                log_every_k,
            },
            summary,
        })
    }
}
