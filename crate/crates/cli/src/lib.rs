//! The `su2dig` command-line pipeline: `generate`, `mesh gen`, `project`,
//! `measure` and `analyze`.
//!
//! Every command writes a manifest beside its outputs holding the full
//! parameters, seeds and sha256 digests of inputs and outputs. Failures are
//! reported on stderr as one JSON object with a stable `error` category.
//!
//! `SU2DIG_OUT_DIR`, when set, is prepended to relative output paths.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use su2dig::analysis::{self, WindowPolicy};
use su2dig::digitize::{
    gen_edgewise_mesh, gen_subgroup, project_fixed_point, project_mesh, AprObjective, FixedPointSpec, Mesh, MeshKind,
    Projection, Scheme, Subgroup,
};
use su2dig::io::config::{read_config, write_config};
use su2dig::io::manifest::{label, manifest_path_for_file};
use su2dig::io::records::{read_records, write_csv};
use su2dig::io::{
    ensemble_id, read_dir_mesh, read_scheme, write_mesh, write_scheme, Manifest, SchemeInfo, MANIFEST_FILE, MESH_FILE,
    SCHEME_FILE,
};
use su2dig::monte_carlo::{
    generate_ensemble, read_metadata, write_metadata, RunParams, Start, DEFAULT_THERMALIZATION, ENSEMBLE_FILE,
};
use su2dig::observables::{measure, MeasurementRecord, ObservableSet};
use su2dig::{Error, Result};

pub const OUT_DIR_ENV: &str = "SU2DIG_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "su2dig", version, about = "SU(2) gauge-field digitization lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a heat-bath/overrelaxation chain and save configurations.
    Generate(GenerateArgs),
    /// Mesh codebooks.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Project every configuration of an ensemble onto a digitization.
    Project(ProjectArgs),
    /// Measure Wilson-loop observables on every configuration.
    Measure(MeasureArgs),
    /// Statistical analysis of measurement tables.
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StartArg {
    Hot,
    Cold,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub beta: f64,
    /// Lattice extents `NX,NY,NZ,NT`.
    #[arg(long)]
    pub dims: String,
    #[arg(long)]
    pub trajectories: u64,
    #[arg(long)]
    pub save_every: u64,
    /// Trajectories discarded before the first save.
    #[arg(long)]
    pub therm: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub start: Option<StartArg>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    /// Generate a codebook file.
    Gen(MeshGenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeshKindArg {
    Edgewise,
    Subgroup,
}

#[derive(Debug, Args)]
pub struct MeshGenArgs {
    #[arg(long, value_enum)]
    pub kind: MeshKindArg,
    /// Subdivision level of an edgewise mesh.
    #[arg(long)]
    pub level: Option<u32>,
    /// Subgroup name: 2T, 2O or 2I.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    L2,
    Apr,
    Fixedpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitArg {
    Indexed,
    Quaternion,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    /// Mesh file, or a built-in mesh name (`2T`, `2O`, `2I`, `edgewise-k<K>`).
    #[arg(long)]
    pub mesh: Option<String>,
    /// Fixed-point precision `p`.
    #[arg(long)]
    pub bits: Option<u32>,
    /// `all-staples` (default) or `single`.
    #[arg(long)]
    pub apr_objective: Option<String>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Payload of the written configurations; mesh schemes default to
    /// `indexed`.
    #[arg(long, value_enum)]
    pub emit: Option<EmitArg>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Comma-separated: plaq, loops6, polyakov, wilson.
    #[arg(long, default_value = "plaq")]
    pub obs: String,
    #[arg(long)]
    pub rmax: Option<usize>,
    #[arg(long)]
    pub tmax: Option<usize>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Ensemble id written to every row; defaults to one derived from the
    /// chain parameters, shared by all projections of the ensemble.
    #[arg(long)]
    pub ensemble: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Static potential fits `V(r)` per ensemble and scheme.
    Potential(PotentialArgs),
    /// Paired relative errors against the undigitized ensemble.
    ErrorCurve(ErrorCurveArgs),
    /// Polyakov loop across β with a transition estimate per scheme.
    BetaScan(BetaScanArgs),
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 1)]
    pub t_min: u32,
    #[arg(long, default_value_t = 4)]
    pub t_max: u32,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long = "in", num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Args)]
pub struct ErrorCurveArgs {
    #[arg(long = "in", num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Restrict to these observables (comma-separated); `V` selects the
    /// potential ratios.
    #[arg(long)]
    pub obs: Option<String>,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Args)]
pub struct BetaScanArgs {
    #[arg(long = "in", num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "polyakov")]
    pub obs: String,
}

/// Error reported by the binary: category plus message.
#[derive(Debug)]
pub struct CliError {
    pub category: String,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            category: e.category().to_string(),
            message: e.to_string(),
        }
    }
}

impl CliError {
    pub fn to_json(&self) -> String {
        json!({"error": self.category, "message": self.message}).to_string()
    }
}

/// Parse and run. Help and version requests are returned as `Ok(Some(text))`.
pub fn run<I, T>(args: I) -> std::result::Result<Option<String>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Some(e.to_string())),
                _ => Err(CliError {
                    category: "usage".into(),
                    message: e.to_string().lines().next().unwrap_or_default().to_string(),
                }),
            };
        }
    };
    execute(cli.command)?;
    Ok(None)
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(&a),
        Command::Mesh {
            command: MeshCommand::Gen(a),
        } => mesh_gen(&a),
        Command::Project(a) => project(&a),
        Command::Measure(a) => measure_cmd(&a),
        Command::Analyze { command } => match command {
            AnalyzeCommand::Potential(a) => analyze_potential(&a),
            AnalyzeCommand::ErrorCurve(a) => analyze_error_curve(&a),
            AnalyzeCommand::BetaScan(a) => analyze_beta_scan(&a),
        },
    }
}

/// Apply the output-directory override to relative paths.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn parse_dims(s: &str) -> Result<[usize; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "--dims needs four comma-separated extents, got {s:?}"
        )));
    }
    let mut d = [0; 4];
    for (i, p) in parts.iter().enumerate() {
        d[i] = p
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad lattice extent {p:?}")))?;
    }
    Ok(d)
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    Ok(())
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let dims = parse_dims(&a.dims)?;
    let mut defaulted = Vec::new();
    let seed = a.seed.unwrap_or_else(|| {
        defaulted.push("seed".to_string());
        0
    });
    let mut params = RunParams::new(a.beta, dims, seed, a.trajectories, a.save_every);
    match a.therm {
        Some(t) => params.thermalization_trajectories = t,
        None => {
            params.thermalization_trajectories = DEFAULT_THERMALIZATION;
            defaulted.push("therm".into());
        }
    }
    match a.start {
        Some(StartArg::Hot) => params.start = Start::Hot,
        Some(StartArg::Cold) => params.start = Start::Cold,
        None => defaulted.push("start".into()),
    }
    let meta = generate_ensemble(&params, &out, defaulted.clone())?;
    let mut m = Manifest::new("generate", json!({"run": params, "defaulted": defaulted}));
    m.seeds.push(seed);
    for c in &meta.configs {
        m.add_output(&c.file, &out.join(&c.file))?;
    }
    m.add_output(ENSEMBLE_FILE, &out.join(ENSEMBLE_FILE))?;
    m.summary = json!({"saved": meta.configs.len(), "plaquette_tau_int": meta.plaquette_tau_int});
    m.write(&out.join(MANIFEST_FILE))
}

/// Built-in mesh from a name: `2T`, `2O`, `2I` or `edgewise-k<K>`.
pub fn builtin_mesh(name: &str) -> Option<Result<Mesh<f64>>> {
    if let Some(k) = name.strip_prefix("edgewise-k") {
        return Some(
            k.parse()
                .map_err(|_| Error::InvalidParameter(format!("bad edgewise level in {name:?}")))
                .and_then(gen_edgewise_mesh),
        );
    }
    name.parse::<Subgroup>().ok().map(|g| Ok(gen_subgroup(g)))
}

fn mesh_gen(a: &MeshGenArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let mesh: Mesh<f64> = match (a.kind, a.level, &a.name) {
        (MeshKindArg::Edgewise, Some(k), None) => gen_edgewise_mesh(k)?,
        (MeshKindArg::Subgroup, None, Some(n)) => gen_subgroup(n.parse()?),
        (MeshKindArg::Edgewise, _, _) => {
            return Err(Error::InvalidParameter(
                "--kind edgewise takes --level and no --name".into(),
            ))
        }
        (MeshKindArg::Subgroup, _, _) => {
            return Err(Error::InvalidParameter(
                "--kind subgroup takes --name and no --level".into(),
            ))
        }
    };
    create_parent(&out)?;
    write_mesh(&out, &mesh)?;
    let mut m = Manifest::new("mesh gen", json!({"kind": mesh.kind(), "v": mesh.len()}));
    m.add_output(&label(&out), &out)?;
    m.summary = json!({"digest": mesh.digest_hex(), "bits_per_link": mesh.bits_per_link()});
    m.write(&manifest_path_for_file(&out))
}

fn load_mesh_arg(s: &str) -> Result<(Mesh<f64>, Option<PathBuf>)> {
    let p = Path::new(s);
    if p.exists() {
        return Ok((su2dig::io::read_mesh(p)?, Some(p.to_path_buf())));
    }
    match builtin_mesh(s) {
        Some(m) => Ok((m?, None)),
        None => Err(Error::Io {
            path: p.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such mesh file or built-in mesh"),
        }),
    }
}

fn project(a: &ProjectArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let meta = read_metadata(&a.input)?;
    let in_mesh = read_dir_mesh(&a.input)?;
    let objective: AprObjective = match &a.apr_objective {
        Some(s) if a.scheme == SchemeArg::Apr => s.parse()?,
        Some(_) => {
            return Err(Error::InvalidParameter(
                "--apr-objective applies only to --scheme apr".into(),
            ))
        }
        None => AprObjective::default(),
    };
    let mut m = Manifest::new("project", serde_json::Value::Null);
    let (scheme, mesh, spec) = match a.scheme {
        SchemeArg::L2 | SchemeArg::Apr => {
            if a.bits.is_some() {
                return Err(Error::InvalidParameter(
                    "--bits applies only to --scheme fixedpoint".into(),
                ));
            }
            let name = a
                .mesh
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("mesh schemes need --mesh".into()))?;
            let (mesh, path) = load_mesh_arg(name)?;
            if let Some(p) = &path {
                m.add_input(&label(p), p)?;
            }
            let projection = if a.scheme == SchemeArg::L2 {
                Projection::L2
            } else {
                Projection::Apr(objective)
            };
            (Scheme::mesh(&mesh, projection), Some(mesh), None)
        }
        SchemeArg::Fixedpoint => {
            if a.mesh.is_some() {
                return Err(Error::InvalidParameter(
                    "--mesh does not apply to --scheme fixedpoint".into(),
                ));
            }
            if a.emit == Some(EmitArg::Indexed) {
                return Err(Error::InvalidParameter(
                    "fixed-point fields have no indexed form".into(),
                ));
            }
            let p = a
                .bits
                .ok_or_else(|| Error::InvalidParameter("--scheme fixedpoint needs --bits".into()))?;
            let spec = FixedPointSpec::new(p)?;
            (Scheme::FixedPoint(spec), None, Some(spec))
        }
    };
    let emit = match (a.emit, &scheme) {
        (Some(EmitArg::Quaternion), _) => "quaternion",
        (_, Scheme::FixedPoint(_)) => "fixed-point",
        _ => "indexed",
    };
    fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    m.add_input(ENSEMBLE_FILE, &a.input.join(ENSEMBLE_FILE))?;
    let results: Vec<Result<()>> = meta
        .configs
        .par_iter()
        .map(|c| {
            let (header, field) = read_config(&a.input.join(&c.file), in_mesh.as_ref())?;
            let (projected, header) = match (&mesh, spec) {
                (Some(mesh), _) => {
                    let Scheme::Mesh { projection, .. } = scheme else {
                        unreachable!()
                    };
                    let f = project_mesh(&field, mesh, projection)?;
                    let h = if emit == "indexed" {
                        header.indexed(mesh)
                    } else {
                        header.as_quaternion()
                    };
                    (f, h)
                }
                (None, Some(spec)) => {
                    let f = project_fixed_point(&field, spec);
                    let h = if emit == "quaternion" {
                        header.as_quaternion()
                    } else {
                        header.fixed_point(spec)
                    };
                    (f, h)
                }
                (None, None) => unreachable!(),
            };
            write_config(&out.join(&c.file), &header, &projected, mesh.as_ref())
        })
        .collect();
    results.into_iter().collect::<Result<()>>()?;
    for c in &meta.configs {
        m.add_input(&c.file, &a.input.join(&c.file))?;
    }
    write_metadata(&out, &meta)?;
    let info = SchemeInfo {
        name: scheme.to_string(),
        bits_per_link: scheme.bits_per_link(),
        scheme,
        emit: emit.into(),
        mesh_digest: mesh.as_ref().map(|m| m.digest_hex()),
    };
    write_scheme(&out, &info)?;
    if let Some(mesh) = &mesh {
        write_mesh(&out.join(MESH_FILE), mesh)?;
        m.add_output(MESH_FILE, &out.join(MESH_FILE))?;
    }
    for c in &meta.configs {
        m.add_output(&c.file, &out.join(&c.file))?;
    }
    m.add_output(ENSEMBLE_FILE, &out.join(ENSEMBLE_FILE))?;
    m.add_output(SCHEME_FILE, &out.join(SCHEME_FILE))?;
    m.parameters = json!({"scheme": info, "source_seed": meta.params.seed});
    m.seeds.push(meta.params.seed);
    m.write(&out.join(MANIFEST_FILE))
}

pub fn parse_observables(s: &str) -> Result<Vec<ObservableSet>> {
    let mut seen = BTreeSet::new();
    let mut v = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let o: ObservableSet = part.parse()?;
        if seen.insert(part.to_string()) {
            v.push(o);
        }
    }
    if v.is_empty() {
        return Err(Error::InvalidParameter("no observables requested".into()));
    }
    Ok(v)
}

/// Measure every configuration of an ensemble directory.
pub fn measure_dir(
    dir: &Path,
    sets: &[ObservableSet],
    rmax: Option<usize>,
    tmax: Option<usize>,
    ensemble: Option<&str>,
) -> Result<Vec<MeasurementRecord>> {
    let meta = read_metadata(dir)?;
    let info = read_scheme(dir)?;
    let mesh = read_dir_mesh(dir)?;
    let dims = meta.params.dims;
    let rmax = rmax.unwrap_or(dims[..3].iter().min().unwrap() / 2);
    let tmax = tmax.unwrap_or(dims[3] / 2);
    let id = ensemble.map_or_else(|| ensemble_id(&meta.params), str::to_string);
    let rows: Vec<Result<Vec<MeasurementRecord>>> = meta
        .configs
        .par_iter()
        .map(|c| {
            let (header, field) = read_config(&dir.join(&c.file), mesh.as_ref())?;
            if header.dims() != dims {
                return Err(Error::GeometryMismatch(format!(
                    "{} has dims {:?}, ensemble has {dims:?}",
                    c.file,
                    header.dims()
                )));
            }
            Ok(measure(&field, sets, rmax, tmax)?
                .into_iter()
                .map(|(observable, r, t, value)| MeasurementRecord {
                    ensemble: id.clone(),
                    scheme: info.name.clone(),
                    bits_per_link: info.bits_per_link,
                    beta: meta.params.beta,
                    config: c.trajectory,
                    observable,
                    r,
                    t,
                    value,
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

fn measure_cmd(a: &MeasureArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let sets = parse_observables(&a.obs)?;
    let records = measure_dir(&a.input, &sets, a.rmax, a.tmax, a.ensemble.as_deref())?;
    create_parent(&out)?;
    write_csv(&out, &records)?;
    let meta = read_metadata(&a.input)?;
    let info = read_scheme(&a.input)?;
    let mut m = Manifest::new(
        "measure",
        json!({
            "obs": sets,
            "rmax": a.rmax,
            "tmax": a.tmax,
            "ensemble": records.first().map(|r| r.ensemble.clone()),
            "scheme": info.name,
            "dims": meta.params.dims,
            "beta": meta.params.beta,
        }),
    );
    m.seeds.push(meta.params.seed);
    for c in &meta.configs {
        m.add_input(&c.file, &a.input.join(&c.file))?;
    }
    m.add_output(&label(&out), &out)?;
    m.write(&manifest_path_for_file(&out))
}

fn read_all(inputs: &[PathBuf], m: &mut Manifest) -> Result<Vec<MeasurementRecord>> {
    let mut all = Vec::new();
    for (i, p) in inputs.iter().enumerate() {
        all.extend(read_records(p)?);
        m.add_input(&format!("{i}:{}", label(p)), p)?;
    }
    Ok(all)
}

fn write_table<S: serde::Serialize>(out: &Path, rows: &[S], m: &mut Manifest) -> Result<()> {
    create_parent(out)?;
    write_csv(out, rows)?;
    m.add_output(&label(out), out)
}

fn analyze_potential(a: &PotentialArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let policy = WindowPolicy::new(a.window.t_min, a.window.t_max)?;
    let mut m = Manifest::new("analyze potential", json!({"window": policy}));
    let records = read_all(&a.input, &mut m)?;
    let table = analysis::fit_potential(&records, policy)?;
    if table.fits.is_empty() {
        let reasons: Vec<String> = table
            .refused
            .iter()
            .map(|r| format!("{}/{} r={}: {}", r.ensemble, r.scheme, r.r, r.reason))
            .collect();
        return Err(Error::InsufficientData(format!(
            "every potential fit was refused ({})",
            reasons.join("; ")
        )));
    }
    write_table(&out, &table.fits, &mut m)?;
    m.summary = json!({"refused": table.refused});
    m.write(&manifest_path_for_file(&out))
}

fn analyze_error_curve(a: &ErrorCurveArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let policy = WindowPolicy::new(a.window.t_min, a.window.t_max)?;
    let obs: Option<Vec<String>> = a.obs.as_ref().map(|s| {
        s.split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect()
    });
    let mut m = Manifest::new("analyze error-curve", json!({"window": policy, "obs": obs}));
    let records = read_all(&a.input, &mut m)?;
    let wants = |name: &str| obs.as_ref().is_none_or(|o| o.iter().any(|x| x == name));
    let mut points = Vec::new();
    let plain: Vec<String> = match &obs {
        Some(o) => o
            .iter()
            .filter(|x| x.as_str() != analysis::curves::OBS_POTENTIAL)
            .cloned()
            .collect(),
        None => records
            .iter()
            .map(|r| r.observable.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if !plain.is_empty() {
        points.extend(analysis::error_curve(&records, Some(&plain))?);
    }
    let mut refused = Vec::new();
    let has_wilson = records.iter().any(|r| r.observable == su2dig::observables::OBS_WILSON);
    if wants(analysis::curves::OBS_POTENTIAL) && has_wilson {
        let (v, r) = analysis::potential_error_curve(&records, policy)?;
        points.extend(v);
        refused = r;
    }
    if points.is_empty() {
        return Err(Error::InsufficientData("no error-curve points".into()));
    }
    points.sort_by(|x, y| {
        x.ensemble
            .cmp(&y.ensemble)
            .then(x.bits_per_link.total_cmp(&y.bits_per_link))
            .then(x.scheme.cmp(&y.scheme))
            .then(x.observable.cmp(&y.observable))
            .then(x.r.cmp(&y.r))
            .then(x.t.cmp(&y.t))
    });
    write_table(&out, &points, &mut m)?;
    m.summary = json!({"refused": refused});
    m.write(&manifest_path_for_file(&out))
}

/// Dims recorded by the `measure` manifest beside a CSV, if present.
fn recorded_dims(csv: &Path) -> Result<Option<serde_json::Value>> {
    let mp = manifest_path_for_file(csv);
    if !mp.exists() {
        return Ok(None);
    }
    Ok(Manifest::read(&mp)?.parameters.get("dims").cloned())
}

fn analyze_beta_scan(a: &BetaScanArgs) -> Result<()> {
    let out = resolve_out(&a.out);
    let mut dims: Option<serde_json::Value> = None;
    for p in &a.input {
        if let Some(d) = recorded_dims(p)? {
            match &dims {
                Some(prev) if *prev != d => {
                    return Err(Error::GeometryMismatch(format!(
                        "{} was measured on {d}, earlier inputs on {prev}",
                        p.display()
                    )))
                }
                _ => dims = Some(d),
            }
        }
    }
    let mut m = Manifest::new("analyze beta-scan", json!({"obs": a.obs, "dims": dims}));
    let records = read_all(&a.input, &mut m)?;
    let scan = analysis::beta_scan(&records, &a.obs)?;
    write_table(&out, &scan.rows, &mut m)?;
    let tpath = out.with_extension("transitions.csv");
    write_table(&tpath, &scan.transitions, &mut m)?;
    m.write(&manifest_path_for_file(&out))
}

/// Mesh kind of a built-in name, for help text and tests.
pub fn builtin_kind(name: &str) -> Option<MeshKind> {
    builtin_mesh(name).and_then(|m| m.ok()).map(|m| m.kind())
}
