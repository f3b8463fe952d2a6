//! Run configuration: a flat `key = value` text format (hand-parsed so
//! reports stay dependency-free and diff-able), strict about unknown
//! keys, with CLI flags overriding file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Result, WclError};
use crate::render::ProjectionPlane;

/// All knobs of the pipeline. Defaults are desk-scale: n = 2, T = 1,
/// the patch thresholds of the construction, and mesh sizes chosen so
/// the full verification pipeline stays in the minutes range on a
/// laptop (larger meshes are a config edit away).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub t_half: f64,
    pub eps: f64,
    pub delta: f64,
    pub rho_tube: f64,
    pub rho_cut: f64,
    /// Tube radii used when tracing the cobordism: wide enough that
    /// mid-band nodes lagging behind the isotopy never transit the
    /// cutoff shell (the cutoff exists for compact support, and the
    /// shell's steep gradients would shear the traced mesh).
    pub trace_rho_tube: f64,
    pub trace_rho_cut: f64,
    pub g_cap: f64,
    pub push_eps: f64,
    pub t_band: f64,
    pub mesh: usize,
    pub mesh_v: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub flow_step: f64,
    pub trace_span: f64,
    pub seed: u64,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub negative_controls: bool,
    pub render_ts: Vec<f64>,
    pub render_planes: Vec<ProjectionPlane>,
    pub render_slice: f64,
    pub render_resolution: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t_half = 1.0;
        let mut tolerances = BTreeMap::new();
        for (k, v) in [
            ("formula", 1e-10),
            ("inversion", 1e-8),
            ("legendrian", 1e-10),
            ("locus", 1e-6),
            ("identity", 1e-9),
            ("fd", 1e-5),
            ("isotropy", 1e-14),
            ("cutoff_c", 4.0),
            ("lambda_dev", 1e-3),
            ("ends", 1e-4),
            ("variance", 1e-6),
            ("order_lo", 1.8),
            ("order_hi", 2.2),
            ("path_order_lo", 0.9),
            ("transport_order", 1.8),
            ("truncation_fraction", 0.2),
        ] {
            tolerances.insert(k.to_string(), v);
        }
        Self {
            n: 2,
            t_half,
            eps: 0.1,
            delta: 0.3,
            rho_tube: 0.2,
            rho_cut: 0.35,
            trace_rho_tube: 15.0,
            trace_rho_cut: 20.0,
            g_cap: 10.0,
            push_eps: 0.1,
            t_band: 3.0 * t_half,
            mesh: 33,
            mesh_v: 7,
            v_min: -3.0 * t_half - 2.0,
            v_max: 3.0 * t_half + 2.0,
            flow_step: 2e-3,
            trace_span: 1.6,
            seed: 42,
            jobs: 0,
            out_dir: PathBuf::from("out"),
            negative_controls: false,
            render_ts: vec![-0.5, 0.5, 1.0],
            render_planes: vec![
                ProjectionPlane::X1Z,
                ProjectionPlane::X2Z,
                ProjectionPlane::UX2,
            ],
            render_slice: 0.0,
            render_resolution: 256,
            tolerances,
        }
    }
}

impl RunConfig {
    pub fn tol(&self, key: &str) -> f64 {
        *self
            .tolerances
            .get(key)
            .unwrap_or_else(|| panic!("unknown tolerance key {key}"))
    }

    pub fn effective_jobs(&self) -> usize {
        if self.jobs == 0 {
            crate::symplectization::available_jobs()
        } else {
            self.jobs
        }
    }

    /// Apply one key = value assignment (file line or CLI override).
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| WclError::Config(format!("bad value for {what}: {value}"));
        match key {
            "n" => self.n = value.parse().map_err(|_| bad(key))?,
            "t_half" => self.t_half = value.parse().map_err(|_| bad(key))?,
            "eps" => self.eps = value.parse().map_err(|_| bad(key))?,
            "delta" => self.delta = value.parse().map_err(|_| bad(key))?,
            "rho_tube" => self.rho_tube = value.parse().map_err(|_| bad(key))?,
            "rho_cut" => self.rho_cut = value.parse().map_err(|_| bad(key))?,
            "trace_rho_tube" => self.trace_rho_tube = value.parse().map_err(|_| bad(key))?,
            "trace_rho_cut" => self.trace_rho_cut = value.parse().map_err(|_| bad(key))?,
            "g_cap" => self.g_cap = value.parse().map_err(|_| bad(key))?,
            "push_eps" => self.push_eps = value.parse().map_err(|_| bad(key))?,
            "t_band" => self.t_band = value.parse().map_err(|_| bad(key))?,
            "mesh" => self.mesh = value.parse().map_err(|_| bad(key))?,
            "mesh_v" => self.mesh_v = value.parse().map_err(|_| bad(key))?,
            "v_min" => self.v_min = value.parse().map_err(|_| bad(key))?,
            "v_max" => self.v_max = value.parse().map_err(|_| bad(key))?,
            "flow_step" => self.flow_step = value.parse().map_err(|_| bad(key))?,
            "trace_span" => self.trace_span = value.parse().map_err(|_| bad(key))?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            "jobs" => self.jobs = value.parse().map_err(|_| bad(key))?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "negative_controls" => {
                self.negative_controls = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(bad(key)),
                }
            }
            "render_ts" => {
                self.render_ts = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<f64>().map_err(|_| bad(key)))
                    .collect::<Result<Vec<_>>>()?;
            }
            "render_planes" => {
                self.render_planes = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| ProjectionPlane::parse(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
            }
            "render_slice" => self.render_slice = value.parse().map_err(|_| bad(key))?,
            "render_resolution" => self.render_resolution = value.parse().map_err(|_| bad(key))?,
            other => {
                if let Some(tol_key) = other.strip_prefix("tol_") {
                    return self.override_tolerance(tol_key, value);
                }
                return Err(WclError::Config(format!("unknown config key: {other}")));
            }
        }
        Ok(())
    }

    /// Override a named tolerance; only known names are accepted.
    pub fn override_tolerance(&mut self, key: &str, value: &str) -> Result<()> {
        if !self.tolerances.contains_key(key) {
            return Err(WclError::Config(format!(
                "unknown tolerance key: {key} (known: {})",
                self.tolerances
                    .keys()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| WclError::Config(format!("bad tolerance value for {key}: {value}")))?;
        self.tolerances.insert(key.to_string(), v);
        Ok(())
    }

    /// Parse a flat `key = value` config file body.
    pub fn apply_file(&mut self, body: &str) -> Result<()> {
        for (lineno, raw) in body.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                WclError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(WclError::Config(msg));
        if self.n < 2 {
            return fail(format!("n must be >= 2, got {}", self.n));
        }
        if !(self.t_half > 0.0) {
            return fail("t_half must be > 0".into());
        }
        if !(self.eps > 0.0 && self.delta > 0.0) {
            return fail("eps and delta must be > 0".into());
        }
        if !(self.rho_tube > 0.0 && self.rho_cut > self.rho_tube) {
            return fail("need 0 < rho_tube < rho_cut".into());
        }
        if !(self.trace_rho_tube > 0.0 && self.trace_rho_cut > self.trace_rho_tube) {
            return fail("need 0 < trace_rho_tube < trace_rho_cut".into());
        }
        if !(self.g_cap > 0.0 && self.push_eps > 0.0) {
            return fail("g_cap and push_eps must be > 0".into());
        }
        if !(self.t_band > 0.0) {
            return fail("t_band must be > 0".into());
        }
        if self.mesh < 3 || self.mesh_v < 3 {
            return fail("mesh resolutions must be >= 3".into());
        }
        if !(self.v_min < self.v_max) {
            return fail("need v_min < v_max".into());
        }
        if self.v_max < self.t_band || -self.v_min < self.t_band {
            return fail("v range must cover the cutoff band".into());
        }
        if !(self.flow_step > 0.0) {
            return fail("flow_step must be > 0".into());
        }
        if !(self.trace_span > 0.0) {
            return fail("trace_span must be > 0".into());
        }
        if self.render_resolution < 16 {
            return fail("render_resolution must be >= 16".into());
        }
        Ok(())
    }

    /// Echo the effective configuration as report metadata.
    pub fn meta_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("n".into(), self.n.to_string()),
            ("t_half".into(), crate::util::fmt_f64(self.t_half)),
            ("eps".into(), crate::util::fmt_f64(self.eps)),
            ("delta".into(), crate::util::fmt_f64(self.delta)),
            ("rho_tube".into(), crate::util::fmt_f64(self.rho_tube)),
            ("rho_cut".into(), crate::util::fmt_f64(self.rho_cut)),
            (
                "trace_rho_tube".into(),
                crate::util::fmt_f64(self.trace_rho_tube),
            ),
            (
                "trace_rho_cut".into(),
                crate::util::fmt_f64(self.trace_rho_cut),
            ),
            ("g_cap".into(), crate::util::fmt_f64(self.g_cap)),
            ("push_eps".into(), crate::util::fmt_f64(self.push_eps)),
            ("t_band".into(), crate::util::fmt_f64(self.t_band)),
            ("mesh".into(), self.mesh.to_string()),
            ("mesh_v".into(), self.mesh_v.to_string()),
            ("v_min".into(), crate::util::fmt_f64(self.v_min)),
            ("v_max".into(), crate::util::fmt_f64(self.v_max)),
            ("flow_step".into(), crate::util::fmt_f64(self.flow_step)),
            ("trace_span".into(), crate::util::fmt_f64(self.trace_span)),
            ("seed".into(), self.seed.to_string()),
            (
                "negative_controls".into(),
                self.negative_controls.to_string(),
            ),
        ];
        for (k, v) in &self.tolerances {
            out.push((format!("tol.{k}"), crate::util::fmt_f64(*v)));
        }
        out
    }
}
