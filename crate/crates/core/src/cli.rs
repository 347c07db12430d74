//! Run configs and the commands behind the `retroscatter` binary.
//!
//! A run is one JSON config tagged by `command`. Every file a command writes
//! carries that config: JSON outputs under a `config` key, CSV outputs as a
//! leading `# config: {...}` line before the header.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{trace_hollow, trace_unbounded, IncidenceState, ScatterRecord, TraceLimits, UnboundedScene};
use crate::error::{config, Error};
use crate::geometry::{Point, Ray, UnitVec, Vec2};
use crate::hollows::ShapeSpec;
use crate::measures::{
    estimate_measure_unchecked, incidence_at, MeasureOptions, MeasureSummary, ScatterMeasure, DEFAULT_GRID, PATHOLOGY_LIMIT,
};
use crate::oracles::notched::tv_to_geometric;
use crate::oracles::{compare_notched, compare_rectangle, compare_triangle, rotation_histogram, transition_counts};
use crate::resistance::{directional_resistance, maxwellian_resistance, ResistanceReport};
use crate::schedules::{run_sweep, SweepGrid, SweepSpec};

/// Trajectories written by `--dump-paths`.
pub const DUMPED_PATHS: u64 = 100;

fn default_tol() -> f64 {
    1e-6
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn default_cut() -> f64 {
    1e-4
}

fn default_max_iter() -> u64 {
    100_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Trace(TraceConfig),
    Measure(MeasureConfig),
    Sweep(SweepConfig),
    Support(SupportConfig),
    Resistance(ResistanceConfig),
    OracleCheck(OracleConfig),
    Rotation(RotationConfig),
}

/// Either a hollow with an incidence, or an unbounded scene with a ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incidence: Option<IncidenceState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<UnboundedScene>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayConfig>,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayConfig {
    pub origin: Vec2,
    /// Normalized on use.
    pub dir: Vec2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub shape: ShapeSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Bins per axis of the angle-square histogram.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: SweepGrid,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportConfig {
    pub shape: ShapeSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistanceConfig {
    pub shape: ShapeSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    /// Incidence of a parallel flow for the directional resistance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Accommodation coefficient of a Maxwellian mixture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accommodation: Option<f64>,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    Rectangle {
        eps: f64,
    },
    Triangle {
        eps: f64,
    },
    /// Parity of the symbolic exit time against the reduced notched angle.
    Notched {
        lambda: f64,
        delta: f64,
        #[serde(default = "default_cut")]
        cut: f64,
    },
    /// Law of the transition time against the geometric law.
    Transition {
        lambda: f64,
        delta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub oracle: OracleSpec,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    #[serde(default)]
    pub limits: TraceLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationConfig {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    /// Outputs were written, but the run exceeded the pathology limit.
    #[error("{0}")]
    Flagged(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Flagged(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RunFlagged { .. } => CliError::Flagged(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    parse_config(&fs::read_to_string(path)?)
}

/// Output of one command: files written, a short text report and, if the
/// run was flagged, the error to exit with.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub report: String,
    pub flagged: Option<Error>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<RunOutcome, CliError> {
        match self.flagged {
            Some(e) => Err(CliError::Flagged(e)),
            None => Ok(self),
        }
    }
}

struct Writer<'a> {
    dir: &'a Path,
    config_line: String,
    config: &'a RunConfig,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path, config: &'a RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string(config).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { dir, config_line: format!("# config: {json}"), config, files: Vec::new() })
    }

    fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'b, T> {
            config: &'b RunConfig,
            result: &'b T,
        }
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &Doc { config: self.config, result }).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "{}", self.config_line)?;
        body(&mut w)?;
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn path(&mut self, name: &str, path: &[Point]) -> Result<(), CliError> {
        self.csv(name, |w| {
            writeln!(w, "segment_index,x,y")?;
            for (k, p) in path.iter().enumerate() {
                writeln!(w, "{k},{},{}", p.x, p.y)?;
            }
            Ok(())
        })
    }

    fn dump_paths(&mut self, shape: &ShapeSpec, n: u64, seed: u64, lim: &TraceLimits) -> Result<(), CliError> {
        let h = shape.build()?;
        let lim = TraceLimits { record_path: true, ..*lim };
        for i in 0..n.min(DUMPED_PATHS) {
            let rec = trace_hollow(&h, incidence_at(seed, i), &lim);
            self.path(&format!("paths/path_{i:03}.csv"), &rec.path)?;
        }
        Ok(())
    }

    fn finish(self, report: String, flagged: Option<Error>) -> RunOutcome {
        RunOutcome { files: self.files, report, flagged }
    }
}

fn write_histogram(w: &mut dyn Write, eta: &ScatterMeasure) -> std::io::Result<()> {
    let (counts, grid) = eta.histogram();
    let centre = |i: usize| -FRAC_PI_2 + (i as f64 + 0.5) * PI / grid as f64;
    writeln!(w, "phi,phi_plus,count")?;
    for i in 0..grid {
        for j in 0..grid {
            writeln!(w, "{},{},{}", centre(i), centre(j), counts[i * grid + j])?;
        }
    }
    Ok(())
}

fn measure_for(shape: &ShapeSpec, n: usize, seed: u64, lim: &TraceLimits, opts: MeasureOptions) -> Result<ScatterMeasure, CliError> {
    let h = shape.build()?;
    Ok(estimate_measure_unchecked(&h, n, seed, lim, opts)?)
}

#[derive(Serialize)]
struct UnboundedResult {
    v: Vec2,
    v_plus: Vec2,
    reflections: usize,
    /// `|v⁺ + v|`.
    reversal_error: f64,
    /// Distance from the focus to the chord between the first two hits.
    #[serde(skip_serializing_if = "Option::is_none")]
    focus_chord_distance: Option<f64>,
    path: Vec<Point>,
}

fn chord_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    (d.cross(p - a) / d.norm()).abs()
}

fn cmd_trace(c: &TraceConfig, w: &mut Writer, dump: bool) -> Result<String, CliError> {
    c.limits.validate()?;
    match (&c.shape, c.incidence, &c.scene, c.ray) {
        (Some(shape), Some(s), None, None) => {
            let s = IncidenceState::new(s.xi, s.phi)?;
            let h = shape.build()?;
            let rec: ScatterRecord = trace_hollow(&h, s, &TraceLimits { record_path: true, ..c.limits });
            w.json("trace.json", &rec)?;
            if dump {
                w.path("paths/path_000.csv", &rec.path)?;
            }
            Ok(format!("{}: phi_plus = {}, reflections = {}, status = {:?}", h.label(), rec.phi_plus, rec.n_reflections, rec.status))
        }
        (None, None, Some(scene), Some(ray)) => {
            let dir = UnitVec::new(ray.dir).ok_or_else(|| config("ray direction must be nonzero"))?;
            let t = trace_unbounded(scene, Ray::new(ray.origin, dir), &c.limits)?;
            let focus_chord_distance = match scene {
                UnboundedScene::ParabolaExterior { focal, .. } if t.path.len() >= 3 => {
                    Some(chord_distance(Vec2::new(*focal, 0.0), t.path[1], t.path[2]))
                }
                _ => None,
            };
            let r = UnboundedResult {
                v: dir.as_vec(),
                v_plus: t.v_plus.as_vec(),
                reflections: t.path.len() - 1,
                reversal_error: (t.v_plus.as_vec() + dir.as_vec()).norm(),
                focus_chord_distance,
                path: t.path,
            };
            w.json("trace.json", &r)?;
            if dump {
                w.path("paths/path_000.csv", &r.path)?;
            }
            let mut report = format!("v_plus = ({}, {}), |v_plus + v| = {:e}", r.v_plus.x, r.v_plus.y, r.reversal_error);
            if let Some(d) = r.focus_chord_distance {
                report.push_str(&format!(
                    ", chord from ({}, {}) to ({}, {}) misses the focus by {d:e}",
                    r.path[1].x, r.path[1].y, r.path[2].x, r.path[2].y
                ));
            }
            Ok(report)
        }
        _ => Err(CliError::Config("trace needs either shape + incidence or scene + ray".into())),
    }
}

/// Runs one config, writing its outputs under `out`.
pub fn run(cfg: &RunConfig, out: &Path, dump_paths: bool) -> Result<RunOutcome, CliError> {
    let mut w = Writer::new(out, cfg)?;
    match cfg {
        RunConfig::Trace(c) => {
            let report = cmd_trace(c, &mut w, dump_paths)?;
            Ok(w.finish(report, None))
        }
        RunConfig::Measure(c) => {
            let h = c.shape.build()?;
            let eta = measure_for(&c.shape, c.n, c.seed, &c.limits, MeasureOptions { grid: c.grid, ..Default::default() })?;
            let summary = MeasureSummary::new(&h, &eta, c.seed, c.tol)?;
            w.json("measure.json", &summary)?;
            w.csv("pairs.csv", |f| eta.write_pairs_csv(f))?;
            w.csv("histogram.csv", |f| write_histogram(f, &eta))?;
            if dump_paths {
                w.dump_paths(&c.shape, c.n as u64, c.seed, &c.limits)?;
            }
            let report = format!(
                "{}: F = {}, retro = {}, mean reflections = {}",
                h.label(),
                summary.f,
                summary.retro_fraction,
                summary.mean_reflections
            );
            Ok(w.finish(report, eta.check_pathology(PATHOLOGY_LIMIT).err()))
        }
        RunConfig::Sweep(c) => {
            let spec = SweepSpec { grid: c.grid.clone(), n: c.n, seed: c.seed, tol: c.tol };
            let table = run_sweep(&spec, &c.limits)?;
            w.csv("sweep.csv", |f| table.write_csv(f))?;
            let flagged = table.rows.iter().find(|r| r.flagged).map(|r| Error::RunFlagged {
                n_pathological: r.n_path,
                n_total: r.n,
                fraction: r.n_path as f64 / r.n as f64,
                limit: PATHOLOGY_LIMIT,
            });
            Ok(w.finish(format!("{} grid points", table.rows.len()), flagged))
        }
        RunConfig::Support(c) => {
            let eta = measure_for(&c.shape, c.n, c.seed, &c.limits, MeasureOptions { retain: c.n.max(1), ..Default::default() })?;
            w.csv("support.csv", |f| eta.write_pairs_csv(f))?;
            if dump_paths {
                w.dump_paths(&c.shape, c.n as u64, c.seed, &c.limits)?;
            }
            Ok(w.finish(format!("{} pairs", eta.samples().len()), eta.check_pathology(PATHOLOGY_LIMIT).err()))
        }
        RunConfig::Resistance(c) => {
            #[derive(Serialize)]
            struct Out {
                report: ResistanceReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                maxwellian: Option<f64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                directional: Option<Vec2>,
            }
            let h = c.shape.build()?;
            let eta = measure_for(&c.shape, c.n, c.seed, &c.limits, MeasureOptions::default())?;
            let report = ResistanceReport::from_scatter(&eta)?;
            let maxwellian = c.accommodation.map(|a| maxwellian_resistance(report.big_r, report.d, a)).transpose()?;
            let directional = c.phi.map(|phi| directional_resistance(&h, phi, c.n, c.seed, &c.limits)).transpose()?;
            w.json("resistance.json", &Out { report, maxwellian, directional })?;
            if dump_paths {
                w.dump_paths(&c.shape, c.n as u64, c.seed, &c.limits)?;
            }
            Ok(w.finish(format!("{}: R = {}, r = {}", h.label(), report.big_r, report.r), eta.check_pathology(PATHOLOGY_LIMIT).err()))
        }
        RunConfig::OracleCheck(c) => {
            let report = match c.oracle {
                OracleSpec::Rectangle { eps } => {
                    let r = compare_rectangle(eps, c.n, c.seed, &c.limits)?;
                    w.json("oracle.json", &r)?;
                    format!("agree {}, disagree {}, degenerate {}, excluded {}", r.agree, r.disagree, r.degenerate, r.excluded)
                }
                OracleSpec::Triangle { eps } => {
                    let r = compare_triangle(eps, c.n, c.seed, &c.limits)?;
                    w.json("oracle.json", &r)?;
                    let o = &r.report;
                    format!(
                        "agree {}, disagree {}, degenerate {}, excluded {}, sign mismatches {}",
                        o.agree, o.disagree, o.degenerate, o.excluded, r.sign_mismatch
                    )
                }
                OracleSpec::Notched { lambda, delta, cut } => {
                    let r = compare_notched(lambda, delta, cut, c.n, c.seed, &c.limits)?;
                    w.json("oracle.json", &r)?;
                    format!("agree {}, disagree {}, degenerate {}, excluded {}", r.agree, r.disagree, r.degenerate, r.excluded)
                }
                OracleSpec::Transition { lambda, delta } => {
                    #[derive(Serialize)]
                    struct Out {
                        counts: Vec<u64>,
                        total_variation: f64,
                    }
                    let counts = transition_counts(lambda, delta, c.n, c.seed)?;
                    let tv = tv_to_geometric(&counts, lambda)?;
                    w.json("oracle.json", &Out { counts, total_variation: tv })?;
                    format!("total variation to the geometric law {tv}")
                }
            };
            Ok(w.finish(report, None))
        }
        RunConfig::Rotation(c) => {
            let h = rotation_histogram(c.eps, c.n, c.seed, c.max_iter)?;
            w.json("rotation.json", &h)?;
            Ok(w.finish(format!("{} capped of {}", h.capped, h.n), None))
        }
    }
}
