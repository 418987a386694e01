//! File formats and the command runner behind the `bellows` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 numeric error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::continuation::{self, ComplexPath, LoopSpec};
use crate::error::{Error, Result};
use crate::flexion::{self, ConstraintSystem, FlexOptions, FlexionTrace};
use crate::gram::{ComplexGram, IndexSet, RealGram, Sign, Space};
use crate::linalg::Mat;
use crate::polyhedra::{from_klein, Configuration, PseudoManifold};
use crate::simplex_volume;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// `{"n": int, "entries": [[re] | [re, im], ...]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramFile {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

fn parse_entries(n: usize, entries: &[Vec<f64>]) -> Result<Mat<C64>> {
    let size = n + 1;
    if entries.len() != size * size {
        return Err(Error::Argument(format!(
            "expected {} entries for n = {n}, got {}",
            size * size,
            entries.len()
        )));
    }
    let values = entries
        .iter()
        .map(|e| match e.as_slice() {
            [re] => Ok(C64::new(*re, 0.0)),
            [re, im] => Ok(C64::new(*re, *im)),
            _ => Err(Error::Argument("each entry must be [re] or [re, im]".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Mat::from_row_major(size, values).ok_or_else(|| Error::Argument("entry count does not match n".into()))
}

impl GramFile {
    pub fn to_complex(&self) -> Result<ComplexGram> {
        ComplexGram::new(parse_entries(self.n, &self.entries)?)
    }

    /// The real matrix, or an argument error if some entry has an imaginary part.
    pub fn to_real(&self) -> Result<RealGram> {
        self.to_complex()?
            .to_real()
            .ok_or_else(|| Error::Argument("expected a real Gram matrix".into()))
    }

    pub fn from_real(c: &RealGram) -> GramFile {
        let size = c.size();
        GramFile {
            n: c.n(),
            entries: (0..size * size).map(|i| vec![c.entry(i / size, i % size)]).collect(),
        }
    }

    pub fn from_complex(c: &ComplexGram) -> GramFile {
        let size = c.size();
        GramFile {
            n: c.n(),
            entries: (0..size * size)
                .map(|i| {
                    let z = c.entry(i / size, i % size);
                    if z.im == 0.0 {
                        vec![z.re]
                    } else {
                        vec![z.re, z.im]
                    }
                })
                .collect(),
        }
    }
}

/// `{"n": int, "space": "hyperbolic" | "sphere", "waypoints": [entries, ...]}`
/// where each waypoint is a row-major entry list as in [`GramFile`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathFile {
    pub n: usize,
    pub space: String,
    pub waypoints: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_segment: Option<usize>,
}

impl PathFile {
    pub fn space(&self) -> Result<Space> {
        self.space.parse()
    }

    pub fn to_path(&self) -> Result<ComplexPath> {
        let w = self
            .waypoints
            .iter()
            .map(|e| ComplexGram::new(parse_entries(self.n, e)?))
            .collect::<Result<Vec<_>>>()?;
        ComplexPath::new(w, self.samples_per_segment.unwrap_or(8))
    }

    pub fn from_path(path: &ComplexPath, space: Space) -> PathFile {
        PathFile {
            n: path.size() - 1,
            space: space.name().to_string(),
            waypoints: path.waypoints.iter().map(|w| GramFile::from_complex(w).entries).collect(),
            samples_per_segment: Some(path.samples_per_segment),
        }
    }
}

/// Vertex ids may be given as strings or integers.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexId {
    Int(i64),
    Str(String),
}

impl VertexId {
    fn key(&self) -> String {
        match self {
            VertexId::Int(i) => i.to_string(),
            VertexId::Str(s) => s.clone(),
        }
    }
}

/// `{"n": int, "vertices": [ids], "facets": [[ids in orientation order]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub n: usize,
    pub vertices: Vec<VertexId>,
    pub facets: Vec<Vec<VertexId>>,
}

impl ComplexFile {
    pub fn to_complex(&self) -> Result<PseudoManifold> {
        let v: Vec<String> = self.vertices.iter().map(VertexId::key).collect();
        let f: Vec<Vec<String>> = self.facets.iter().map(|f| f.iter().map(VertexId::key).collect()).collect();
        PseudoManifold::from_ids(self.n, &v, &f)
    }

    pub fn from_complex(k: &PseudoManifold) -> ComplexFile {
        let id = |v: usize| VertexId::Str(k.labels()[v].clone());
        ComplexFile {
            n: k.n(),
            vertices: (0..k.vertex_count()).map(id).collect(),
            facets: k.facets().iter().map(|f| f.iter().map(|&v| id(v)).collect()).collect(),
        }
    }
}

/// `{"coords": {id: [x0, ..., xn]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordsFile {
    pub coords: BTreeMap<String, Vec<f64>>,
}

impl CoordsFile {
    /// Strict: every point on the hyperboloid within `1e-10`.
    pub fn to_configuration(&self, k: &PseudoManifold) -> Result<Configuration> {
        let p = self.to_guess(k)?;
        p.check(1e-10)?;
        Ok(p)
    }

    /// An initial guess for the solvers; only the sheet is checked.
    pub fn to_guess(&self, k: &PseudoManifold) -> Result<Configuration> {
        let coords = k
            .labels()
            .iter()
            .map(|l| {
                self.coords
                    .get(l)
                    .cloned()
                    .ok_or_else(|| Error::Argument(format!("no coordinates for vertex '{l}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Configuration { coords };
        p.check(1e-3)?;
        Ok(p)
    }

    pub fn from_configuration(k: &PseudoManifold, p: &Configuration) -> CoordsFile {
        CoordsFile {
            coords: k.labels().iter().cloned().zip(p.coords.iter().cloned()).collect(),
        }
    }
}

/// `{"edges": {"u-v": length}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgesFile {
    pub edges: BTreeMap<String, f64>,
}

impl EdgesFile {
    pub fn to_system(&self, k: PseudoManifold) -> Result<ConstraintSystem> {
        let index: BTreeMap<&str, usize> = k.labels().iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut lengths = Vec::new();
        for (key, &len) in &self.edges {
            let (u, v) = key
                .split_once('-')
                .ok_or_else(|| Error::Argument(format!("edge key '{key}' is not of the form u-v")))?;
            let look = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::Argument(format!("edge '{key}' names unknown vertex '{s}'")))
            };
            lengths.push((look(u)?, look(v)?, len));
        }
        ConstraintSystem::new(k, lengths)
    }

    pub fn from_system(s: &ConstraintSystem) -> EdgesFile {
        let l = s.complex().labels();
        EdgesFile {
            edges: s
                .edges()
                .iter()
                .map(|&(u, v, len)| (format!("{}-{}", l[u], l[v]), len))
                .collect(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Argument(format!("malformed {}: {e}", path.display())))
}

/// Bundled scenes.
pub mod fixtures {
    pub const OCTAHEDRON: &str = include_str!("../fixtures/octahedron.json");
    pub const OCTAHEDRON_EDGES: &str = include_str!("../fixtures/octahedron_edges.json");
    pub const OCTAHEDRON_COORDS: &str = include_str!("../fixtures/octahedron_coords.json");
    pub const QUADRILATERAL: &str = include_str!("../fixtures/quadrilateral.json");
    pub const QUADRILATERAL_EDGES: &str = include_str!("../fixtures/quadrilateral_edges.json");
    pub const QUADRILATERAL_COORDS: &str = include_str!("../fixtures/quadrilateral_coords.json");
    pub const LOOP_N1: &str = include_str!("../fixtures/loop_n1.json");
    pub const LOOP_N2: &str = include_str!("../fixtures/loop_n2.json");
    pub const LOOP_N3: &str = include_str!("../fixtures/loop_n3.json");
}

/// The bundled octahedron scene: complex, lengths and a symmetric seed configuration.
pub fn bundled_octahedron() -> Result<(ConstraintSystem, Configuration)> {
    let k: ComplexFile = serde_json::from_str(fixtures::OCTAHEDRON)?;
    let k = k.to_complex()?;
    let e: EdgesFile = serde_json::from_str(fixtures::OCTAHEDRON_EDGES)?;
    let c: CoordsFile = serde_json::from_str(fixtures::OCTAHEDRON_COORDS)?;
    let guess = c.to_guess(&k)?;
    let s = e.to_system(k)?;
    let p = flexion::bricard_seed(&s, &guess, 1e-13)?;
    Ok((s, p))
}

pub fn bundled_quadrilateral() -> Result<(ConstraintSystem, Configuration)> {
    let k: ComplexFile = serde_json::from_str(fixtures::QUADRILATERAL)?;
    let k = k.to_complex()?;
    let e: EdgesFile = serde_json::from_str(fixtures::QUADRILATERAL_EDGES)?;
    let c: CoordsFile = serde_json::from_str(fixtures::QUADRILATERAL_COORDS)?;
    let guess = c.to_guess(&k)?;
    let s = e.to_system(k)?;
    let p = flexion::solve_configuration(&s, &guess, 1e-13)?;
    Ok((s, p))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Volume { gram: PathBuf, space: Space },
    Oracle { gram: PathBuf, space: Space },
    Continue { path: PathBuf },
    Link { path: PathBuf },
    Flex {
        complex: PathBuf,
        edges: PathBuf,
        coords: Option<PathBuf>,
        bricard: bool,
        steps: usize,
        step_length: f64,
    },
    VerifyBellows { steps: usize, step_length: f64 },
    VerifyMonodromy { n: Option<usize>, space: Option<Space> },
    Witness { n: usize, set: Vec<usize>, sigma: Sign },
    /// Writes the `index`-th loop of the suite at the default basepoint.
    Loop { n: usize, space: Space, index: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn emit(config: &RunConfig, stdout: &mut dyn Write, body: &str) -> Result<()> {
    match &config.out {
        Some(p) => std::fs::write(p, format!("{body}\n"))?,
        None => writeln!(stdout, "{body}")?,
    }
    Ok(())
}

fn pretty(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn tol_or(config: &RunConfig, default: f64) -> Result<f64> {
    let t = config.tol.unwrap_or(default);
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

/// Runs one command, writing results to `stdout` (or `--out`) and diagnostics
/// to `stderr`; returns the process exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let code = match &e {
                Error::Argument(_) | Error::Domain(_) | Error::Json(_) | Error::Io(_) => EXIT_INPUT,
                Error::Numeric { .. } | Error::Internal(_) => EXIT_NUMERIC,
            };
            let _ = writeln!(stderr, "error: {e}");
            if let Error::Numeric { best_estimate: Some(b), .. } = &e {
                let _ = writeln!(stderr, "best estimate: {b:e}");
            }
            code
        }
    }
}

fn dispatch(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &config.command {
        Command::Volume { gram, space } => {
            let c = read_json::<GramFile>(gram)?.to_real()?;
            let r = simplex_volume::volume(&c, *space, tol_or(config, 1e-10)?)?;
            emit(config, stdout, &pretty(&r)?)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { gram, space } => {
            let c = read_json::<GramFile>(gram)?.to_real()?;
            let r = simplex_volume::volume_oracle_quadrature(&c, *space, tol_or(config, 1e-8)?)?;
            emit(config, stdout, &pretty(&r)?)?;
            Ok(EXIT_OK)
        }
        Command::Continue { path } => {
            let f: PathFile = read_json(path)?;
            let space = f.space()?;
            let p = f.to_path()?;
            let tol = tol_or(config, 1e-10)?;
            let base = p
                .start()
                .to_real()
                .ok_or_else(|| Error::Domain("path must start at a real Gram matrix".into()))?;
            let start = continuation::init_state(&base, space, tol * 1e-2)?;
            let end = continuation::continue_volume(&start, &p, tol)?;
            let mut report = json!({
                "n": f.n,
                "space": space.name(),
                "v_start": start.volume(),
                "v_end": end.volume(),
                "clearance": continuation::path_clearance(&p),
                "closed": p.is_closed(),
                "branch_residual": end.branch_residual(),
            });
            if p.is_closed() {
                let table = continuation::linking_table(&p)?;
                let lk_h = table
                    .iter()
                    .find(|l| l.component.sign.is_none() && l.component.set == IndexSet::full(p.size()))
                    .map(|l| l.lk)
                    .unwrap_or_else(|| table.iter().map(|l| l.lk).sum());
                let sign = if lk_h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                report["lk"] = lk_object(&table);
                report["lk_h"] = json!(lk_h);
                report["defect"] = serde_json::to_value(end.volume() - start.volume() * sign)?;
            }
            emit(config, stdout, &pretty(&report)?)?;
            Ok(EXIT_OK)
        }
        Command::Link { path } => {
            let p = read_json::<PathFile>(path)?.to_path()?;
            if !p.is_closed() {
                return Err(Error::Argument("linking numbers need a closed path".into()));
            }
            let table = continuation::linking_table(&p)?;
            let report = json!({
                "clearance": continuation::path_clearance(&p),
                "lk": lk_object(&table),
            });
            emit(config, stdout, &pretty(&report)?)?;
            Ok(EXIT_OK)
        }
        Command::Flex { complex, edges, coords, bricard, steps, step_length } => {
            let k = read_json::<ComplexFile>(complex)?.to_complex()?;
            let violations = k.validate();
            if !violations.is_empty() {
                return Err(Error::Argument(format!("not an oriented pseudo-manifold: {violations:?}")));
            }
            let guess = match coords {
                Some(p) => read_json::<CoordsFile>(p)?.to_guess(&k)?,
                None => random_configuration(&k, config.seed),
            };
            let system = read_json::<EdgesFile>(edges)?.to_system(k)?;
            let tol = tol_or(config, 1e-12)?;
            let start = if *bricard {
                let pairs = opposite_pairs(system.complex())?;
                flexion::solve_symmetric(&system, &guess, &pairs, tol)?
            } else {
                flexion::solve_configuration(&system, &guess, tol)?
            };
            let opts = FlexOptions {
                steps: *steps,
                step_length: *step_length,
                tol,
                ..FlexOptions::default()
            };
            let trace = flexion::trace_flexion(&system, &start, &opts)?;
            let csv = trace_csv(&trace);
            match &config.out {
                Some(p) => {
                    std::fs::write(p, &csv)?;
                    let mut side = p.clone().into_os_string();
                    side.push(".json");
                    std::fs::write(PathBuf::from(side), format!("{}\n", pretty(&trace)?))?;
                }
                None => write!(stdout, "{csv}")?,
            }
            if let Some(msg) = &trace.truncated {
                writeln!(stderr, "trace truncated: {msg}")?;
                return Ok(EXIT_NUMERIC);
            }
            Ok(EXIT_OK)
        }
        Command::VerifyBellows { steps, step_length } => {
            let tol = tol_or(config, 1e-8)?;
            let report = verify_bellows(*steps, *step_length, tol)?;
            emit(config, stdout, &pretty(&report)?)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::VerifyMonodromy { n, space } => {
            let tol = tol_or(config, 1e-6)?;
            let mut all_passed = true;
            let mut suites = Vec::new();
            for (sn, sspace) in monodromy_suites() {
                if n.is_some_and(|m| m != sn) || space.is_some_and(|s| s != sspace) {
                    continue;
                }
                let r = run_monodromy_suite(sn, sspace, tol, config.seed)?;
                all_passed &= r.passed;
                writeln!(stderr, "{}^{}: {}/{} loops passed", sspace.name(), sn, r.passed_count, r.loops.len())?;
                suites.push(r);
            }
            if suites.is_empty() {
                return Err(Error::Argument("no monodromy suite matches the requested n/space".into()));
            }
            emit(config, stdout, &pretty(&suites)?)?;
            Ok(if all_passed { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Witness { n, set, sigma } => {
            let set = IndexSet::from_indices(set.iter().copied());
            let c = crate::gram::witness_matrix(*n, set, *sigma)?;
            emit(config, stdout, &pretty(&witness_report(&c, set, *sigma))?)?;
            Ok(EXIT_OK)
        }
        Command::Loop { n, space, index } => {
            let base = continuation::default_basepoint(*n, *space)?;
            let suite = continuation::loop_suite(&base, 0, 0, config.seed)?;
            let l = suite.get(*index).ok_or_else(|| {
                Error::Argument(format!("the suite has {} elementary loops", suite.len()))
            })?;
            writeln!(stderr, "{}", l.label)?;
            emit(config, stdout, &serde_json::to_string(&PathFile::from_path(&l.path, *space))?)?;
            Ok(EXIT_OK)
        }
    }
}

/// `{"H{0,1}+": lk, ...}`.
pub fn lk_object(table: &[continuation::ComponentLink]) -> Value {
    Value::Object(table.iter().map(|l| (l.component.to_string(), json!(l.lk))).collect())
}

/// CSV with columns `t,max_residual,volume,tmc`.
pub fn trace_csv(trace: &FlexionTrace) -> String {
    let mut s = String::from("t,max_residual,volume,tmc\n");
    for st in &trace.steps {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e}\n",
            st.t, st.max_residual, st.volume, st.total_mean_curvature
        ));
    }
    s
}

/// A seeded configuration inside the Klein ball of radius 1/2.
pub fn random_configuration(k: &PseudoManifold, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..k.vertex_count())
        .map(|_| {
            let u: Vec<f64> = (0..k.n()).map(|_| rng.random_range(-0.3..0.3)).collect();
            from_klein(&u)
        })
        .collect();
    Configuration { coords }
}

/// Vertex pairs not joined by an edge; for an octahedron these are the
/// opposite vertices, which the half-turn swaps.
pub fn opposite_pairs(k: &PseudoManifold) -> Result<Vec<(usize, usize)>> {
    let edges = k.edges();
    let m = k.vertex_count();
    let mut pairs = Vec::new();
    let mut seen = vec![false; m];
    for u in 0..m {
        for v in u + 1..m {
            if !edges.contains(&(u, v)) {
                if seen[u] || seen[v] {
                    return Err(Error::Argument("non-adjacent vertices do not form a perfect matching".into()));
                }
                seen[u] = true;
                seen[v] = true;
                pairs.push((u, v));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Argument("non-adjacent vertices do not form a perfect matching".into()));
    }
    Ok(pairs)
}

#[derive(Clone, Debug, Serialize)]
pub struct BellowsReport {
    pub steps: usize,
    pub truncated: Option<String>,
    pub volume_start: f64,
    pub volume_drift: f64,
    pub tmc_start: f64,
    pub tmc_drift: f64,
    pub combined_drift: f64,
    pub max_residual: f64,
    pub max_angle_change: f64,
    /// Largest |cone volume| over facets at the start, to show that the sum
    /// is a cancellation of non-trivial terms.
    pub max_cone_volume: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// The full octahedron pipeline on the bundled scene.
pub fn verify_bellows(steps: usize, step_length: f64, tol: f64) -> Result<BellowsReport> {
    let (system, start) = bundled_octahedron()?;
    let report = flexion::flex_analysis(&system, &start, None)?;
    if report.flex_dim < 1 {
        return Err(Error::numeric(format!(
            "bundled octahedron is not flexible: singular values {:?}",
            report.singular_values
        )));
    }
    let opts = FlexOptions { steps, step_length, ..FlexOptions::default() };
    let trace = flexion::trace_flexion(&system, &start, &opts)?;
    let n = system.complex().n() as f64;
    let first = &trace.steps[0];
    let drift = |f: &dyn Fn(&flexion::FlexionStep) -> f64| {
        trace.steps.iter().map(|s| (f(s) - f(first)).abs()).fold(0.0, f64::max)
    };
    let volume_drift = drift(&|s| s.volume);
    let tmc_drift = drift(&|s| s.total_mean_curvature);
    let combined_drift = drift(&|s| (n - 1.0) * s.volume - s.total_mean_curvature);
    let max_residual = trace.steps.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    let p0 = Configuration { coords: first.configuration.clone() };
    let mut max_cone_volume: f64 = 0.0;
    for f in system.complex().facets() {
        let pts: Vec<&[f64]> = f.iter().map(|&v| p0.coords[v].as_slice()).collect();
        max_cone_volume = max_cone_volume.max(crate::polyhedra::oriented_cone_volume(&trace.apex, &pts, 1e-12)?.abs());
    }
    let passed = trace.truncated.is_none()
        && trace.steps.len() > steps
        && trace.max_angle_change >= 0.1
        && max_residual <= 1e-11
        && volume_drift <= tol * (1.0 + first.volume.abs())
        && tmc_drift <= tol
        && combined_drift <= tol;
    Ok(BellowsReport {
        steps: trace.steps.len() - 1,
        truncated: trace.truncated,
        volume_start: first.volume,
        volume_drift,
        tmc_start: first.total_mean_curvature,
        tmc_drift,
        combined_drift,
        max_residual,
        max_angle_change: trace.max_angle_change,
        max_cone_volume,
        tolerance: tol,
        passed,
    })
}

/// `(n, space)` pairs covered by the monodromy suites: the real-part law in
/// `Λ^1`, `Λ^3` and the realness law in `S^1`, `S^2`, `S^3`, `Λ^2`.
pub fn monodromy_suites() -> Vec<(usize, Space)> {
    vec![
        (1, Space::Hyperbolic),
        (3, Space::Hyperbolic),
        (1, Space::Sphere),
        (2, Space::Sphere),
        (3, Space::Sphere),
        (2, Space::Hyperbolic),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopOutcome {
    pub label: String,
    pub lk_h: i64,
    pub v_start: C64,
    pub v_end: C64,
    pub checked: f64,
    pub bound: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub n: usize,
    pub space: String,
    pub law: String,
    pub loops: Vec<LoopOutcome>,
    pub passed_count: usize,
    pub passed: bool,
}

/// Loops used by the suites: all elementary lassos, a few double circuits and
/// random words, at least 20 in total.
pub fn suite_loops(n: usize, space: Space, seed: u64) -> Result<Vec<LoopSpec>> {
    let base = continuation::default_basepoint(n, space)?;
    let lassos = continuation::generate_lassos(&base, &continuation::coordinate_directions(n + 1), 8)?.len();
    let words = 20usize.saturating_sub(lassos + 2).max(6);
    continuation::loop_suite(&base, 2, words, seed)
}

/// Runs one suite. The bound is `tol * (1 + |V_1|)`.
pub fn run_monodromy_suite(n: usize, space: Space, tol: f64, seed: u64) -> Result<SuiteReport> {
    let loops = suite_loops(n, space, seed)?;
    let real_part_law = space == Space::Hyperbolic && n % 2 == 1;
    if !real_part_law && !(space == Space::Sphere || n == 2) {
        return Err(Error::Argument(format!("no monodromy law for {}^{n}", space.name())));
    }
    let full = IndexSet::full(n + 1);
    let mut outcomes = Vec::with_capacity(loops.len());
    for l in loops {
        let result = continuation::continue_loop(&l.path, space, 1e-10)
            .and_then(|(start, end)| Ok((start, end, continuation::linking_table(&l.path)?)));
        let (start, end, table) = match result {
            Ok(r) => r,
            Err(e) => {
                outcomes.push(LoopOutcome {
                    label: l.label,
                    lk_h: 0,
                    v_start: C64::new(f64::NAN, 0.0),
                    v_end: C64::new(f64::NAN, 0.0),
                    checked: f64::INFINITY,
                    bound: tol,
                    passed: false,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let lk_h = if n == 1 {
            table.iter().map(|c| c.lk).sum()
        } else {
            table
                .iter()
                .find(|c| c.component.sign.is_none() && c.component.set == full)
                .map(|c| c.lk)
                .unwrap_or(0)
        };
        let (v1, v2) = (start.volume(), end.volume());
        let bound = tol * (1.0 + v1.norm());
        let checked = if real_part_law {
            let sign = if lk_h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (v2 - v1 * sign).re.abs()
        } else {
            v2.im.abs()
        };
        outcomes.push(LoopOutcome {
            label: l.label,
            lk_h,
            v_start: v1,
            v_end: v2,
            checked,
            bound,
            passed: checked <= bound,
            error: None,
        });
    }
    let passed_count = outcomes.iter().filter(|o| o.passed).count();
    Ok(SuiteReport {
        n,
        space: space.name().to_string(),
        law: if real_part_law { "real part" } else { "realness" }.to_string(),
        passed: passed_count == outcomes.len(),
        passed_count,
        loops: outcomes,
    })
}

fn witness_report(c: &RealGram, set: IndexSet, sigma: Sign) -> Value {
    let size = c.size();
    let full = IndexSet::full(size);
    let minors: Vec<Value> = (2..=size)
        .flat_map(|k| IndexSet::subsets(size, k))
        .map(|j| {
            let d = c.principal_minor(j);
            json!({
                "set": j,
                "minor": d,
                "zero": d.abs() <= 1e-10,
                "expected_zero": j == full || j == set,
            })
        })
        .collect();
    json!({
        "n": size - 1,
        "set": set,
        "sigma": match sigma { Sign::Plus => "+", Sign::Minus => "-" },
        "matrix": (0..size).map(|j| (0..size).map(|k| c.entry(j, k)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "minors": minors,
    })
}
