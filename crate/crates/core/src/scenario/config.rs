//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment, SI units throughout.
//! Unknown and repeated keys are rejected. Every error names the line and
//! key it came from.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::envelope::EnvelopeFn;
use crate::error::{Error, Result};
use crate::grid::{default_dt, Frame, Grid1D};
use crate::params::{PhysicalParams, SPEED_OF_LIGHT};
use crate::schedule::{PulseSchedule, PulseShape};

/// Keys taking a number; only these can be swept.
pub const NUMERIC_KEYS: &[&str] = &[
    "g_tilde",
    "n_atoms",
    "length",
    "c_light",
    "delta",
    "Delta",
    "gamma_b",
    "gamma_e",
    "gamma_c",
    "density",
    "omega0",
    "t_switch",
    "tau_switch",
    "t_reswitch",
    "z_min",
    "z_max",
    "n_z",
    "dt",
    "n_t",
    "t_end",
    "input_center",
    "input_width",
    "input_amplitude",
    "alpha",
    "alpha_im",
    "output_stride",
    "compare_bound",
    "analytic_points",
    "quad_tol",
];

pub const TEXT_KEYS: &[&str] = &[
    "pulse_shape",
    "pulse_knots",
    "frame",
    "input_shape",
    "output_dir",
    "sweep",
    "sweep2",
    "sweep_mode",
];

const INTEGER_KEYS: &[&str] = &["n_z", "n_t", "output_stride", "analytic_points"];

pub fn is_integer_key(key: &str) -> bool {
    INTEGER_KEYS.contains(&key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    /// 1-based source line, 0 for values set programmatically.
    pub line: usize,
    pub value: String,
}

/// Parsed but not yet interpreted assignments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::ConfigKey {
                    line,
                    key: content.to_string(),
                    msg: "expected `key = value`".into(),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !NUMERIC_KEYS.contains(&key.as_str()) && !TEXT_KEYS.contains(&key.as_str()) {
                return Err(Error::ConfigKey {
                    line,
                    key,
                    msg: "unknown key".into(),
                });
            }
            if value.is_empty() {
                return Err(Error::ConfigKey {
                    line,
                    key,
                    msg: "missing value".into(),
                });
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                return Err(Error::ConfigKey {
                    line,
                    key,
                    msg: format!("repeated (first set on line {})", prev.line),
                });
            }
            entries.insert(key, Entry { line, value });
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    /// Sets or replaces a key, keeping its original line for messages.
    pub fn set(&mut self, key: &str, value: String) -> Result<()> {
        if !NUMERIC_KEYS.contains(&key) && !TEXT_KEYS.contains(&key) {
            return Err(Error::ConfigKey {
                line: 0,
                key: key.into(),
                msg: "unknown key".into(),
            });
        }
        let line = self.entries.get(key).map_or(0, |e| e.line);
        self.entries.insert(key.to_string(), Entry { line, value });
        Ok(())
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    fn key_error(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::ConfigKey {
            line: self.entries.get(key).map_or(0, |e| e.line),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        let v: f64 = e
            .value
            .parse()
            .map_err(|_| self.key_error(key, format!("`{}` is not a number", e.value)))?;
        if !v.is_finite() {
            return Err(self.key_error(key, "must be finite"));
        }
        Ok(Some(v))
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| Error::ConfigKey {
            line: 0,
            key: key.into(),
            msg: "required key is missing".into(),
        })
    }

    fn int(&self, key: &str) -> Result<Option<usize>> {
        match self.num(key)? {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(Some(v as usize)),
            Some(v) => Err(self.key_error(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: SweepScale,
}

impl SweepAxis {
    /// `key:start:stop:count:scale`, scale `lin` (default) or `log`.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err("expected key:start:stop:count[:lin|log]".into());
        }
        let key = parts[0].to_string();
        if !NUMERIC_KEYS.contains(&key.as_str()) {
            return Err(format!("`{key}` is not a numeric config key"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        let (start, stop) = (num(parts[1])?, num(parts[2])?);
        let count: usize = parts[3]
            .parse()
            .map_err(|_| format!("`{}` is not a count", parts[3]))?;
        let scale = match parts.get(4).copied().unwrap_or("lin") {
            "lin" | "linear" => SweepScale::Linear,
            "log" => SweepScale::Log,
            other => return Err(format!("unknown scale `{other}`")),
        };
        let axis = Self {
            key,
            start,
            stop,
            count,
            scale,
        };
        axis.check()?;
        Ok(axis)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.count < 2 {
            return Err("count must be >= 2".into());
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err("endpoints must be finite".into());
        }
        if self.start == self.stop {
            return Err("endpoints are identical (single-point sweep)".into());
        }
        if self.scale == SweepScale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err("log sweeps need positive endpoints".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.start + (self.stop - self.start) * f,
                    SweepScale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * f).exp(),
                }
            })
            .collect();
        // hit the endpoints exactly
        v[0] = self.start;
        v[self.count - 1] = self.stop;
        if is_integer_key(&self.key) {
            v.iter_mut().for_each(|x| *x = x.round());
        }
        v
    }

    pub fn spec_string(&self) -> String {
        format!(
            "{}:{:e}:{:e}:{}:{}",
            self.key,
            self.start,
            self.stop,
            self.count,
            match self.scale {
                SweepScale::Linear => "lin",
                SweepScale::Log => "log",
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Run the solver at every point.
    Simulate,
    /// Closed-form and quadrature quantities only.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputShape {
    Gaussian,
    Sech,
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub schedule: PulseSchedule,
    pub grid: Grid1D,
    pub input_shape: InputShape,
    pub input: EnvelopeFn,
    pub alpha: Complex64,
    pub output_stride: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub compare_bound: f64,
    pub analytic_points: usize,
    pub quad_tol: f64,
    pub sweep_mode: SweepMode,
    pub sweeps: Vec<SweepAxis>,
    /// The assignments this was built from.
    pub raw: RawConfig,
}

fn parse_knots(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    text.split(',')
        .map(|k| {
            let (t, w) = k
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("knot `{}` is not `t:omega`", k.trim()))?;
            let t: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            let w: f64 = w.trim().parse().map_err(|_| format!("`{w}` is not a number"))?;
            Ok((t, w))
        })
        .collect()
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_raw(RawConfig::read(path)?)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let d = PhysicalParams::default();
        let params = PhysicalParams {
            g_tilde: raw.num_or("g_tilde", d.g_tilde)?,
            n_atoms: raw.num_or("n_atoms", d.n_atoms)?,
            length: raw.num_or("length", d.length)?,
            c_light: raw.num_or("c_light", SPEED_OF_LIGHT)?,
            delta: raw.num_or("delta", d.delta)?,
            big_delta: raw.num_or("Delta", d.big_delta)?,
            gamma_b: raw.num_or("gamma_b", d.gamma_b)?,
            gamma_e: raw.num_or("gamma_e", d.gamma_e)?,
            gamma_c: raw.num_or("gamma_c", d.gamma_c)?,
        };
        params.validate()?;
        if let Some(n) = raw.num("density")? {
            let expected = params.density();
            if (n - expected).abs() > 1e-9 * expected {
                return Err(raw.key_error(
                    "density",
                    format!("inconsistent with n_atoms/length = {expected:e}"),
                ));
            }
        }

        let shape_name = raw.text("pulse_shape").unwrap_or("constant").replace('_', "-");
        let schedule = match shape_name.as_str() {
            "piecewise-linear" => {
                let text = raw.text("pulse_knots").ok_or_else(|| Error::ConfigKey {
                    line: raw.get("pulse_shape").map_or(0, |e| e.line),
                    key: "pulse_knots".into(),
                    msg: "required for piecewise-linear".into(),
                })?;
                let knots = parse_knots(text).map_err(|m| raw.key_error("pulse_knots", m))?;
                PulseSchedule::piecewise_linear(knots)
            }
            name => {
                let omega0 = raw.required("omega0")?;
                let t_switch = raw.num_or("t_switch", 0.0)?;
                let tau = raw.num_or("tau_switch", 1.0)?;
                match name {
                    "constant" => PulseSchedule::constant(omega0),
                    "tanh-off" => PulseSchedule::tanh_off(omega0, t_switch, tau),
                    "tanh-on" => PulseSchedule::tanh_on(omega0, t_switch, tau),
                    "off-then-on" => {
                        let tr = raw.required("t_reswitch")?;
                        PulseSchedule::off_then_on(omega0, t_switch, tr, tau)
                    }
                    other => {
                        return Err(raw.key_error(
                            "pulse_shape",
                            format!("unknown shape `{other}` (constant, tanh-off, tanh-on, off-then-on, piecewise-linear)"),
                        ))
                    }
                }
            }
        };
        schedule.validate()?;

        let input_shape = match raw.text("input_shape").unwrap_or("gaussian") {
            "gaussian" => InputShape::Gaussian,
            "sech" => InputShape::Sech,
            other => return Err(raw.key_error("input_shape", format!("unknown shape `{other}` (gaussian, sech)"))),
        };
        let center = raw.required("input_center")?;
        let width = raw.required("input_width")?;
        let amp = raw.num_or("input_amplitude", 1.0)?;
        let input = match input_shape {
            InputShape::Gaussian => EnvelopeFn::gaussian(center, width, amp),
            InputShape::Sech => EnvelopeFn::sech(center, width, amp),
        };
        input.validate()?;

        let frame = match raw.text("frame").unwrap_or("retarded") {
            "retarded" => Frame::Retarded,
            "lab" => Frame::Lab,
            other => return Err(raw.key_error("frame", format!("unknown frame `{other}` (retarded, lab)"))),
        };
        let mut grid = Grid1D {
            z_min: raw.num_or("z_min", 0.0)?,
            z_max: raw.num_or("z_max", params.length)?,
            n_z: raw.int("n_z")?.unwrap_or(256),
            dt: 1.0,
            n_t: 1,
            frame,
        };
        let dt_given = raw.num("dt")?;
        let n_t = raw.int("n_t")?;
        let t_end = raw.num("t_end")?;
        match (n_t, t_end) {
            (Some(_), Some(_)) => {
                return Err(raw.key_error("t_end", "give either n_t or t_end, not both"));
            }
            (None, None) => {
                return Err(Error::ConfigKey {
                    line: 0,
                    key: "t_end".into(),
                    msg: "one of n_t or t_end is required".into(),
                })
            }
            _ => {}
        }
        if let Some(t_end) = t_end {
            if !(t_end > 0.0) {
                return Err(raw.key_error("t_end", "must be > 0"));
            }
        }
        match (dt_given, n_t, t_end) {
            (Some(dt), Some(n), _) => {
                grid.dt = dt;
                grid.n_t = n;
            }
            (Some(dt), None, Some(t_end)) => {
                grid.dt = dt;
                grid.n_t = (t_end / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            }
            (None, Some(n), _) => {
                grid.dt = default_dt(&params, &schedule, width, &grid);
                grid.n_t = n;
            }
            (None, None, Some(t_end)) => {
                let dt0 = default_dt(&params, &schedule, width, &grid);
                grid.n_t = (t_end / dt0).ceil().max(1.0) as usize;
                grid.dt = t_end / grid.n_t as f64;
            }
            (_, None, None) => unreachable!(),
        }
        grid.validate(&params)?;

        let alpha = Complex64::new(raw.num_or("alpha", 1.0)?, raw.num_or("alpha_im", 0.0)?);
        let output_stride = raw.int("output_stride")?;
        if output_stride == Some(0) {
            return Err(raw.key_error("output_stride", "must be >= 1"));
        }
        let compare_bound = raw.num_or("compare_bound", 0.01)?;
        if !(compare_bound > 0.0) {
            return Err(raw.key_error("compare_bound", "must be > 0"));
        }
        let analytic_points = raw.int("analytic_points")?.unwrap_or(401);
        if analytic_points < 2 {
            return Err(raw.key_error("analytic_points", "must be >= 2"));
        }
        let quad_tol = raw.num_or("quad_tol", 1e-10)?;
        if !(quad_tol > 0.0 && quad_tol < 1.0) {
            return Err(raw.key_error("quad_tol", "must lie in (0, 1)"));
        }
        let sweep_mode = match raw.text("sweep_mode").unwrap_or("simulate") {
            "simulate" => SweepMode::Simulate,
            "analytic" => SweepMode::Analytic,
            other => return Err(raw.key_error("sweep_mode", format!("unknown mode `{other}` (simulate, analytic)"))),
        };
        let mut sweeps = Vec::new();
        for key in ["sweep", "sweep2"] {
            if let Some(text) = raw.text(key) {
                let axis = SweepAxis::parse(text).map_err(|m| raw.key_error(key, m))?;
                if TEXT_KEYS.contains(&axis.key.as_str()) || axis.key == "sweep" {
                    return Err(raw.key_error(key, "only numeric keys can be swept"));
                }
                sweeps.push(axis);
            }
        }
        if raw.get("sweep2").is_some() && raw.get("sweep").is_none() {
            return Err(raw.key_error("sweep2", "needs `sweep` as well"));
        }
        if sweeps.len() == 2 && sweeps[0].key == sweeps[1].key {
            return Err(raw.key_error("sweep2", "sweeps the same key as `sweep`"));
        }

        Ok(Self {
            params,
            schedule,
            grid,
            input_shape,
            input,
            alpha,
            output_stride,
            output_dir: raw.text("output_dir").map(PathBuf::from),
            compare_bound,
            analytic_points,
            quad_tol,
            sweep_mode,
            sweeps,
            raw,
        })
    }

    /// The same scenario with `key` set to `value` and re-resolved.
    /// Step size and count are re-derived unless they were given explicitly.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut raw = self.raw.clone();
        let text = if is_integer_key(key) {
            format!("{}", value.round() as i64)
        } else {
            format!("{value:e}")
        };
        raw.set(key, text)?;
        Self::from_raw(raw)
    }

    /// The same scenario with the sweep keys removed.
    pub fn without_sweeps(&self) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.remove("sweep");
        raw.remove("sweep2");
        Self::from_raw(raw)
    }

    /// Every resolved key in config syntax. Reading it back reproduces this
    /// scenario exactly, including the derived step size and count.
    pub fn to_manifest(&self, header: &str) -> String {
        let mut s = String::new();
        for line in header.lines() {
            let _ = writeln!(s, "# {line}");
        }
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let p = &self.params;
        for (k, v) in [
            ("g_tilde", p.g_tilde),
            ("n_atoms", p.n_atoms),
            ("length", p.length),
            ("c_light", p.c_light),
            ("delta", p.delta),
            ("Delta", p.big_delta),
            ("gamma_b", p.gamma_b),
            ("gamma_e", p.gamma_e),
            ("gamma_c", p.gamma_c),
        ] {
            kv(k, format!("{v:e}"));
        }
        let sch = &self.schedule;
        kv("pulse_shape", sch.shape.name().to_string());
        match &sch.shape {
            PulseShape::PiecewiseLinear(knots) => {
                let text: Vec<String> = knots.iter().map(|(t, w)| format!("{t:e}:{w:e}")).collect();
                kv("pulse_knots", text.join(", "));
            }
            shape => {
                kv("omega0", format!("{:e}", sch.omega0));
                if *shape != PulseShape::Constant {
                    kv("t_switch", format!("{:e}", sch.t_switch));
                    kv("tau_switch", format!("{:e}", sch.tau_switch));
                }
                if let Some(tr) = sch.t_reswitch {
                    kv("t_reswitch", format!("{tr:e}"));
                }
            }
        }
        let g = &self.grid;
        kv("z_min", format!("{:e}", g.z_min));
        kv("z_max", format!("{:e}", g.z_max));
        kv("n_z", g.n_z.to_string());
        kv("dt", format!("{:e}", g.dt));
        kv("n_t", g.n_t.to_string());
        kv("frame", g.frame.name().to_string());
        kv(
            "input_shape",
            match self.input_shape {
                InputShape::Gaussian => "gaussian",
                InputShape::Sech => "sech",
            }
            .into(),
        );
        kv("input_center", format!("{:e}", self.input.center));
        kv("input_width", format!("{:e}", self.input.width));
        kv("input_amplitude", format!("{:e}", self.input.amplitude.re));
        kv("alpha", format!("{:e}", self.alpha.re));
        kv("alpha_im", format!("{:e}", self.alpha.im));
        if let Some(st) = self.output_stride {
            kv("output_stride", st.to_string());
        }
        kv("compare_bound", format!("{:e}", self.compare_bound));
        kv("analytic_points", self.analytic_points.to_string());
        kv("quad_tol", format!("{:e}", self.quad_tol));
        kv(
            "sweep_mode",
            match self.sweep_mode {
                SweepMode::Simulate => "simulate",
                SweepMode::Analytic => "analytic",
            }
            .into(),
        );
        for (k, axis) in ["sweep", "sweep2"].iter().zip(&self.sweeps) {
            kv(k, axis.spec_string());
        }
        s
    }
}
