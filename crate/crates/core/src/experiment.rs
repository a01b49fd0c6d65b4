//! Experiment runner: configuration, datasets and figure reproductions.
//!
//! Configuration resolves in three layers: per-experiment defaults, then a
//! TOML file with flat dotted keys (`params.n_b = 2`, `sweep.values = [..]`),
//! then `key=value` overrides from the command line.

use crate::analytics::{
    avg_goodput_analytic, derive_constants, effective_power_cdf, effective_power_quantile,
    max_density, success_probability_detailed, Backoff,
};
use crate::channel::kmh_to_mps;
use crate::error::{Error, Result};
use crate::params::{db_to_linear, SystemParams};
use crate::simulator::{
    deployed_codebook, estimate_goodput, estimate_outage, ks_distance, mean_interference_mc,
    sample_effective_powers, trial_rng, worker_pool, Axis, Feedback, GoodputMode, Setup, SweepSpec,
};
use crate::validation::{self, CriterionReport, ValidationOptions};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use crate::params::default_params;

pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const REPORT_FILE: &str = "validation_report.json";
/// Trial count of the determinism re-runs inside `validate_all`.
pub const DETERMINISM_TRIALS: u64 = 2_000;

/// Named numeric dataset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "dataset {} row {i} column {} is {}",
                    self.name, self.columns[j], row[j]
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        self.check_finite()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    /// Array of row records keyed by column name.
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        self.check_finite()?;
        let records: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|&v| serde_json::Value::from(v)))
                    .collect()
            })
            .collect();
        serde_json::to_vec_pretty(&records).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!(
                "format must be csv or json, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig2Cdf,
    Fig3Outage,
    Fig4Density,
    Fig5GoodputDelay,
    Fig6GoodputInterference,
    Fig7BetaSurface,
    ValidateAll,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Fig2Cdf,
        ExperimentKind::Fig3Outage,
        ExperimentKind::Fig4Density,
        ExperimentKind::Fig5GoodputDelay,
        ExperimentKind::Fig6GoodputInterference,
        ExperimentKind::Fig7BetaSurface,
        ExperimentKind::ValidateAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig2Cdf => "fig2_cdf",
            ExperimentKind::Fig3Outage => "fig3_outage",
            ExperimentKind::Fig4Density => "fig4_density",
            ExperimentKind::Fig5GoodputDelay => "fig5_goodput_delay",
            ExperimentKind::Fig6GoodputInterference => "fig6_goodput_interference",
            ExperimentKind::Fig7BetaSurface => "fig7_beta_surface",
            ExperimentKind::ValidateAll => "validate_all",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown experiment `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Knobs that only some experiments read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Outage target of the density experiment.
    pub epsilon: f64,
    /// Feedback bit counts for the density curves and the backoff surface.
    pub bits_list: Vec<u32>,
    /// Users for the position-averaged density; 0 disables it.
    pub users: usize,
    /// Grid points of each CDF curve.
    pub cdf_points: usize,
    /// SNR of the backoff surface, dB.
    pub surface_snr_db: f64,
    /// Draw a new codebook per trial instead of one deployed codebook.
    pub fresh_codebook: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            bits_list: vec![2, 4, 6, 8, 10, 12],
            users: 1000,
            cdf_points: 200,
            surface_snr_db: validation::SURFACE_SNR_DB,
            fresh_codebook: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub params: SystemParams,
    pub sweep: SweepSpec,
    pub output_dir: PathBuf,
    pub format: Format,
    /// Worker cap; falls back to `FEMTONET_THREADS`, then all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub options: ExperimentOptions,
}

/// Shorthand keys accepted on top of the structural ones.
const CONVENIENCE_KEYS: [&str; 4] = [
    "params.velocity_kmh",
    "params.sir_threshold_db",
    "params.femtocells_per_cell",
    "params.snr_db",
];

impl ExperimentConfig {
    /// Defaults for one experiment, matching the corresponding figure.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let seed = 42;
        let trials = 100_000;
        let sweep = |axis, values: &[f64]| SweepSpec {
            axis,
            values: values.to_vec(),
            trials_per_point: trials,
            seed,
        };
        let mut options = ExperimentOptions::default();
        let (params, sweep) = match kind {
            ExperimentKind::Fig2Cdf => {
                let mut p = default_params();
                p.bits = 6;
                p.density = 0.0;
                (p, sweep(Axis::Velocity, &validation::CDF_VELOCITIES))
            }
            ExperimentKind::Fig3Outage => {
                options.fresh_codebook = true;
                (
                    validation::interference_config(),
                    sweep(Axis::Distance, &validation::outage_distances()),
                )
            }
            ExperimentKind::Fig4Density => (
                default_params(),
                sweep(
                    Axis::Snr,
                    &[-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
                ),
            ),
            ExperimentKind::Fig5GoodputDelay => (
                validation::delay_config(),
                sweep(Axis::Snr, &validation::GOODPUT_SNR_DB),
            ),
            ExperimentKind::Fig6GoodputInterference => (
                validation::interference_config(),
                sweep(Axis::Snr, &validation::GOODPUT_SNR_DB),
            ),
            ExperimentKind::Fig7BetaSurface => {
                options.bits_list = validation::SURFACE_BITS.to_vec();
                (
                    validation::interference_config(),
                    sweep(Axis::Velocity, &validation::SURFACE_VELOCITIES),
                )
            }
            ExperimentKind::ValidateAll => (default_params(), sweep(Axis::Snr, &[0.0])),
        };
        Self {
            experiment: kind,
            params,
            sweep,
            output_dir: PathBuf::from("results").join(kind.name()),
            format: Format::Csv,
            threads: None,
            options,
        }
    }

    /// Layers a config file and `key=value` overrides on the defaults. The
    /// experiment comes from `kind`, else from the file.
    pub fn resolve(
        kind: Option<ExperimentKind>,
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let file_table = match file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => toml::Table::new(),
        };
        let kind = match (kind, file_table.get("experiment")) {
            (Some(k), _) => k,
            (None, Some(toml::Value::String(s))) => s.parse()?,
            (None, Some(v)) => {
                return Err(Error::Config(format!(
                    "`experiment` must be a string, got {v}"
                )))
            }
            (None, None) => return Err(Error::Config("no experiment given".into())),
        };

        let mut pairs: Vec<(String, toml::Value)> = Vec::new();
        flatten("", &file_table, &mut pairs);
        for (k, v) in overrides {
            pairs.push((k.clone(), parse_override(v)));
        }
        pairs.retain(|(k, _)| k != "experiment");

        let defaults = Self::defaults(kind);
        let mut tree =
            toml::Value::try_from(&defaults).map_err(|e| Error::Config(e.to_string()))?;
        let mut shorthand = Vec::new();
        for (key, value) in pairs {
            if CONVENIENCE_KEYS.contains(&key.as_str()) {
                shorthand.push((key, value));
            } else {
                set_path(&mut tree, &key, value)?;
            }
        }
        let mut cfg: Self = tree
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        for (key, value) in shorthand {
            let x = value
                .as_float()
                .or_else(|| value.as_integer().map(|i| i as f64))
                .ok_or_else(|| Error::Config(format!("`{key}` must be a number")))?;
            let p = &mut cfg.params;
            match key.as_str() {
                "params.velocity_kmh" => p.mobility.velocity = kmh_to_mps(x),
                "params.sir_threshold_db" => p.sir_threshold = db_to_linear(x),
                "params.femtocells_per_cell" => {
                    p.density = x / (PI * p.cell_radius * p.cell_radius)
                }
                _ => p.user_distance = p.distance_for_snr_db(x),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, e: Error| Error::Config(format!("{name}: {e}"));
        self.params.validate().map_err(|e| field("params", e))?;
        self.sweep.validate().map_err(|e| field("sweep", e))?;
        self.sweep
            .points(&self.params)
            .map_err(|e| field("sweep.values", e))?;
        let o = &self.options;
        if !(o.epsilon > 0.0 && o.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "options.epsilon must be in (0, 1), got {}",
                o.epsilon
            )));
        }
        if o.bits_list.is_empty()
            || o.bits_list
                .iter()
                .any(|&b| b == 0 || b > crate::codebook::MAX_BITS)
        {
            return Err(Error::Config(
                "options.bits_list must hold bit counts in 1..=16".into(),
            ));
        }
        if o.cdf_points < 2 {
            return Err(Error::Config(
                "options.cdf_points must be at least 2".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Config stored in a run manifest.
    pub fn from_manifest(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        manifest.config.validate()?;
        Ok(manifest.config)
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            // Tables under `params` and `options` are structural; anything
            // else is a leaf value.
            toml::Value::Table(t) => flatten(&key, t, out),
            _ => out.push((key, v.clone())),
        }
    }
}

fn parse_override(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(tree: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let mut node = tree;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{key}` does not name a field")))?;
        if i + 1 == parts.len() {
            // Optional fields are absent from the default tree.
            if !table.contains_key(*part) && *part != "threads" {
                return Err(Error::Config(format!("unknown field `{key}`")));
            }
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table
            .get_mut(*part)
            .ok_or_else(|| Error::Config(format!("unknown field `{key}`")))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub femtonet_version: String,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Present for `validate_all`.
    pub reports: Option<Vec<CriterionReport>>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports
            .as_ref()
            .is_none_or(|r| r.iter().all(|c| c.passed))
    }
}

#[derive(Serialize)]
struct ReportEntry<'a> {
    id: u8,
    name: &'a str,
    passed: bool,
    metric: f64,
    threshold: f64,
    detail: &'a str,
}

/// Computes the datasets of an experiment without writing them.
pub fn compute(cfg: &ExperimentConfig) -> Result<(Vec<Table>, Option<Vec<CriterionReport>>)> {
    cfg.validate()?;
    worker_pool(cfg.threads).install(|| match cfg.experiment {
        ExperimentKind::Fig2Cdf => fig2_cdf(cfg).map(|t| (t, None)),
        ExperimentKind::Fig3Outage => fig3_outage(cfg).map(|t| (vec![t], None)),
        ExperimentKind::Fig4Density => fig4_density(cfg).map(|t| (t, None)),
        ExperimentKind::Fig5GoodputDelay | ExperimentKind::Fig6GoodputInterference => {
            goodput_figure(cfg).map(|t| (vec![t], None))
        }
        ExperimentKind::Fig7BetaSurface => fig7_beta_surface(cfg).map(|t| (vec![t], None)),
        ExperimentKind::ValidateAll => {
            let reports = validate_all(cfg)?;
            Ok((
                reports.iter().map(|r| r.table.clone()).collect(),
                Some(reports),
            ))
        }
    })
}

/// Runs an experiment and writes its datasets, the manifest and, for
/// `validate_all`, the per-criterion report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (tables, reports) = compute(cfg)?;
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", cfg.output_dir.display())))?;
    let mut files = Vec::new();
    for t in &tables {
        let name = format!("{}.{}", t.name, cfg.format.extension());
        let bytes = match cfg.format {
            Format::Csv => t.to_csv_bytes()?,
            Format::Json => t.to_json_bytes()?,
        };
        write(&cfg.output_dir.join(&name), &bytes)?;
        files.push(name);
    }
    if let Some(reports) = &reports {
        let entries: Vec<ReportEntry> = reports
            .iter()
            .map(|r| ReportEntry {
                id: r.id,
                name: &r.name,
                passed: r.passed,
                metric: r.metric,
                threshold: r.threshold,
                detail: &r.detail,
            })
            .collect();
        let bytes = serde_json::to_vec_pretty(&entries).map_err(|e| Error::Io(e.to_string()))?;
        write(&cfg.output_dir.join(REPORT_FILE), &bytes)?;
        files.push(REPORT_FILE.into());
    }
    let manifest = Manifest {
        femtonet_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        files: files.clone(),
    };
    let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    write(&cfg.output_dir.join(MANIFEST_FILE), &bytes)?;
    files.push(MANIFEST_FILE.into());
    Ok(RunOutcome {
        files: files.into_iter().map(|f| cfg.output_dir.join(f)).collect(),
        reports,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

/// Leading columns: the swept quantity, then SNR and distance unless one of
/// them is the swept quantity.
fn lead_columns(axis: Axis) -> Vec<&'static str> {
    let mut cols = vec![axis.column()];
    for c in ["snr_db", "distance_m"] {
        if c != axis.column() {
            cols.push(c);
        }
    }
    cols
}

fn lead_values(axis: Axis, value: f64, p: &SystemParams) -> Vec<f64> {
    let mut row = vec![value];
    if axis != Axis::Snr {
        row.push(p.snr_db_at(p.user_distance));
    }
    if axis != Axis::Distance {
        row.push(p.user_distance);
    }
    row
}

fn table_with_lead(name: &str, axis: Axis, rest: &[&str]) -> Table {
    let mut cols = lead_columns(axis);
    cols.extend_from_slice(rest);
    Table::new(name, &cols)
}

fn point_label(axis: Axis, value: f64) -> String {
    format!("{}_{}", axis.column(), value)
        .replace('.', "p")
        .replace('-', "m")
}

fn fig2_cdf(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let s = &cfg.sweep;
    let mut summary = Table::new(
        "fig2_ks",
        &[
            s.axis.column(),
            "eta",
            "ks_distance",
            "max_grid_gap",
            "aged_ks_distance",
        ],
    );
    let mut tables = Vec::new();
    for (i, (p, &value)) in s.points(&cfg.params)?.iter().zip(&s.values).enumerate() {
        let setup = Setup::with_mean_interference(p, 0.0)?;
        let k = derive_constants(p)?;
        let mut pairs = sample_effective_powers(
            &setup,
            Feedback::FreshRvq,
            s.trials_per_point,
            s.seed,
            i as u64,
        )?;
        let (mut approx, mut aged): (Vec<f64>, Vec<f64>) = pairs.drain(..).unzip();
        let cdf = |z: f64| effective_power_cdf(z, &k).unwrap_or(f64::NAN);
        let ks = ks_distance(&approx, cdf);
        let ks_aged = ks_distance(&aged, cdf);
        approx.sort_by(f64::total_cmp);
        aged.sort_by(f64::total_cmp);
        let ecdf = |xs: &[f64], z: f64| xs.partition_point(|&x| x <= z) as f64 / xs.len() as f64;
        let top = effective_power_quantile(0.999, &k)?;
        let n = cfg.options.cdf_points;
        let mut t = Table::new(
            &format!("fig2_cdf_{}", point_label(s.axis, value)),
            &["z", "empirical_cdf", "analytic_cdf", "aged_empirical_cdf"],
        );
        let mut gap = 0.0_f64;
        for j in 0..n {
            let z = top * j as f64 / (n - 1) as f64;
            let (e, a) = (ecdf(&approx, z), effective_power_cdf(z, &k)?);
            gap = gap.max((e - a).abs());
            t.push(vec![z, e, a, ecdf(&aged, z)]);
        }
        summary.push(vec![value, setup.eta, ks, gap, ks_aged]);
        tables.push(t);
    }
    tables.push(summary);
    Ok(tables)
}

fn feedback<'a>(cfg: &ExperimentConfig, cb: &'a crate::codebook::Codebook) -> Feedback<'a> {
    if cfg.options.fresh_codebook {
        Feedback::FreshRvq
    } else {
        Feedback::Fixed(cb)
    }
}

fn fig3_outage(cfg: &ExperimentConfig) -> Result<Table> {
    let s = &cfg.sweep;
    let ups = cfg.params.sir_threshold;
    let cb = deployed_codebook(&cfg.params, s.seed)?;
    let mut t = table_with_lead(
        "fig3_outage",
        s.axis,
        &[
            "outage_empirical",
            "outage_half_width",
            "outage_analytic",
            "omega1",
            "within_expansion",
        ],
    );
    for (i, (p, &value)) in s.points(&cfg.params)?.iter().zip(&s.values).enumerate() {
        // Outage only involves the received SIR, so rho_bar is irrelevant here.
        let setup = Setup::with_mean_interference(p, 1.0)?;
        let est = estimate_outage(
            &setup,
            feedback(cfg, &cb),
            ups,
            s.trials_per_point,
            s.seed,
            i as u64,
        )?;
        let a = success_probability_detailed(ups, p)?;
        let mut row = lead_values(s.axis, value, p);
        row.extend([
            est.outage,
            est.half_width,
            1.0 - a.probability,
            a.omega1,
            a.within_expansion as u8 as f64,
        ]);
        t.push(row);
    }
    Ok(t)
}

fn fig4_density(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let s = &cfg.sweep;
    let o = &cfg.options;
    let ups = cfg.params.sir_threshold;
    let mut cols = vec![s.axis.column(), "bits", "max_femtocells"];
    for c in ["snr_db", "distance_m"] {
        if c != s.axis.column() {
            cols.push(c);
        }
    }
    cols.extend(["closed_form_femtocells", "closed_form_valid", "capped"]);
    let mut t = Table::new("fig4_density", &cols);
    for (p, &value) in s.points(&cfg.params)?.iter().zip(&s.values) {
        for &bits in &o.bits_list {
            let mut q = *p;
            q.bits = bits;
            let m = max_density(o.epsilon, ups, &q)?;
            let area = PI * q.cell_radius * q.cell_radius;
            let mut row = vec![value, bits as f64, m.femtocells(q.cell_radius)];
            if s.axis != Axis::Snr {
                row.push(q.snr_db_at(q.user_distance));
            }
            if s.axis != Axis::Distance {
                row.push(q.user_distance);
            }
            row.extend([
                m.closed_form.map_or(0.0, |c| c * area),
                m.closed_form.is_some() as u8 as f64,
                m.capped as u8 as f64,
            ]);
            t.push(row);
        }
    }
    let mut tables = vec![t];
    if o.users > 0 {
        // Users uniform over the cell, outside the exclusion radius.
        let mut rng = trial_rng(s.seed, 4, 0);
        let p = &cfg.params;
        let r_min = p.pathloss.d_min / p.cell_radius;
        let distances: Vec<f64> = (0..o.users)
            .map(|_| p.cell_radius * rng.random_range(r_min * r_min..1.0_f64).sqrt())
            .collect();
        let mut u = Table::new(
            "fig4_density_users",
            &[
                "bits",
                "mean_max_femtocells",
                "median_max_femtocells",
                "capped_users",
                "users",
            ],
        );
        for &bits in &o.bits_list {
            let mut counts = Vec::with_capacity(o.users);
            let mut capped = 0;
            for &d in &distances {
                let mut q = p.with_distance(d);
                q.bits = bits;
                let m = max_density(o.epsilon, ups, &q)?;
                capped += m.capped as usize;
                counts.push(m.femtocells(q.cell_radius));
            }
            let mean = counts.iter().sum::<f64>() / counts.len() as f64;
            counts.sort_by(f64::total_cmp);
            let median = counts[counts.len() / 2];
            u.push(vec![
                bits as f64,
                mean,
                median,
                capped as f64,
                o.users as f64,
            ]);
        }
        tables.push(u);
    }
    Ok(tables)
}

fn goodput_figure(cfg: &ExperimentConfig) -> Result<Table> {
    let s = &cfg.sweep;
    let interference = cfg.params.density > 0.0;
    let modes: Vec<GoodputMode> = if interference {
        GoodputMode::ALL.to_vec()
    } else {
        GoodputMode::ALL
            .into_iter()
            .filter(|&m| m != GoodputMode::RandomBeamforming)
            .collect()
    };
    let mut rest: Vec<String> = Vec::new();
    for m in &modes {
        let name = mode_column(*m);
        rest.push(format!("{name}_bps_hz"));
        rest.push(format!("{name}_std_err"));
    }
    rest.extend([
        "goodput_analytic_no_backoff_bps_hz".into(),
        "goodput_analytic_backoff_bps_hz".into(),
    ]);
    let rest_ref: Vec<&str> = rest.iter().map(|c| c.as_str()).collect();
    let name = cfg.experiment.name();
    let mut t = table_with_lead(name, s.axis, &rest_ref);

    let cb = deployed_codebook(&cfg.params, s.seed)?;
    let mean_i = mean_interference_mc(&cfg.params, s.seed)?;
    for (i, (p, &value)) in s.points(&cfg.params)?.iter().zip(&s.values).enumerate() {
        let setup = Setup::with_mean_interference(p, mean_i)?;
        let mut row = lead_values(s.axis, value, p);
        for &m in &modes {
            let est = estimate_goodput(
                &setup,
                feedback(cfg, &cb),
                m,
                s.trials_per_point,
                s.seed,
                i as u64,
            )?;
            row.extend([est.mean, est.std_err]);
        }
        row.push(avg_goodput_analytic(p, Backoff::None)?);
        row.push(avg_goodput_analytic(p, Backoff::Optimal)?);
        t.push(row);
    }
    Ok(t)
}

fn mode_column(m: GoodputMode) -> &'static str {
    match m {
        GoodputMode::NoBackoff => "goodput_no_backoff",
        GoodputMode::BackoffExact => "goodput_backoff_exact",
        GoodputMode::BackoffPoly => "goodput_backoff_approx",
        GoodputMode::RandomBeamforming => "rate_random_bf",
        GoodputMode::Throughput => "throughput",
    }
}

fn fig7_beta_surface(cfg: &ExperimentConfig) -> Result<Table> {
    if cfg.sweep.axis != Axis::Velocity {
        return Err(Error::Config(
            "fig7_beta_surface sweeps velocity; set sweep.axis = \"velocity\"".into(),
        ));
    }
    let (t, _, _) = validation::beta_surfaces(
        &cfg.params,
        &cfg.sweep.values,
        &cfg.options.bits_list,
        cfg.options.surface_snr_db,
        "fig7_beta_surface",
    )?;
    Ok(t)
}

fn validate_all(cfg: &ExperimentConfig) -> Result<Vec<CriterionReport>> {
    let opts = ValidationOptions::with_trials(cfg.sweep.seed, cfg.sweep.trials_per_point);
    let mut reports = validation::run_checks(&opts)?;
    let quick = ValidationOptions::with_trials(
        cfg.sweep.seed,
        cfg.sweep.trials_per_point.min(DETERMINISM_TRIALS),
    );
    reports.push(validation::determinism_check(&quick)?);
    Ok(reports)
}
