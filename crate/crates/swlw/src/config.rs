//! Run configuration in INI form.
//!
//! ```text
//! [grid]
//! n = 64
//!
//! [time]
//! dt = 1e-3
//! t_end = 0.1
//!
//! [scenario]
//! name = smooth-random
//! seed = 7
//! ```
//!
//! Every section and key is optional; missing keys take the defaults listed
//! in [`KEYS`]. Unknown sections or keys, duplicate keys, values that fail
//! to parse and values outside their admissible range are all reported
//! together, each naming the offending `section.key`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use ini::{Ini, ParseOption};
use swlw_core::coupling::CouplingSpec;
use swlw_core::fluid::FluidParams;
use swlw_core::magnetics::MagneticParams;
use swlw_core::momentum::InnerOptions;
use swlw_core::stepper::{ContinuityScheme, Physics, StepConfig};

use crate::scenario::{RandomSpec, Scenario, NAMES};

/// Every accepted `section.key` with its default, as written by [`RunConfig::to_ini`].
pub const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["n"]),
    (
        "time",
        &[
            "dt",
            "t_end",
            "picard_tol",
            "picard_abs_tol",
            "max_picard",
            "cfl_max",
            "diagnostic_interval",
            "inner_tol",
            "max_inner",
            "continuity",
            "freeze_velocity",
        ],
    ),
    ("fluid", &["a", "gamma", "mu", "b", "beta"]),
    ("magnetic", &["nu"]),
    ("coupling", &["alpha", "v_lo", "v_hi", "g_amp", "s_max", "h_amp"]),
    (
        "scenario",
        &[
            "name",
            "rho",
            "amplitude",
            "k1",
            "k2",
            "seed",
            "modes",
            "rho_mean",
            "rho_spread",
            "u_amp",
            "h_amp",
            "psi_amp",
            "delta",
            "velocity",
            "rho_mod",
            "field",
        ],
    ),
    ("output", &["dir", "snapshot_interval"]),
];

fn scenario_keys(name: &str) -> &'static [&'static str] {
    match name {
        "equilibrium" => &["name", "rho", "amplitude", "k1", "k2"],
        "smooth-random" => &["name", "seed", "modes", "rho_mean", "rho_spread", "u_amp", "h_amp", "psi_amp"],
        "perturbed-pair" => &[
            "name",
            "seed",
            "modes",
            "rho_mean",
            "rho_spread",
            "u_amp",
            "h_amp",
            "psi_amp",
            "delta",
        ],
        "shear" => &["name", "velocity", "rho_mod", "amplitude", "field"],
        _ => &["name"],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    /// Overridden by `--out` on the command line.
    pub dir: Option<PathBuf>,
    /// Steps between snapshots; 0 writes only the final state.
    pub snapshot_interval: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub t_end: f64,
    pub step: StepConfig,
    pub physics: Physics,
    pub scenario: Scenario,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 64,
            t_end: 0.1,
            step: StepConfig::default(),
            physics: Physics::default(),
            scenario: Scenario::equilibrium(),
            output: OutputConfig {
                dir: None,
                snapshot_interval: 0,
            },
        }
    }
}

/// A single problem with one key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// `section.key`, or just the section name for unknown sections.
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem", self.violations.len())?;
        if self.violations.len() != 1 {
            write!(f, "s")?;
        }
        write!(f, ")")?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    pub fn names(&self, key: &str) -> bool {
        self.violations.iter().any(|v| v.key == key)
    }
}

/// A validated configuration together with non-fatal advisories.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

struct Reader {
    values: BTreeMap<String, String>,
    errors: Vec<Violation>,
}

impl Reader {
    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(Violation {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: T, kind: &str) -> T {
        let Some(text) = self.raw(key) else {
            return default;
        };
        match text.parse::<T>() {
            Ok(v) => v,
            Err(_) => {
                let msg = format!("expected {kind}, got {text:?}");
                self.fail(key, msg);
                default
            }
        }
    }

    fn real(&mut self, key: &str, default: f64) -> f64 {
        let v = self.parse(key, default, "a number");
        if !v.is_finite() {
            self.fail(key, "must be finite");
            return default;
        }
        v
    }

    fn count(&mut self, key: &str, default: usize) -> usize {
        self.parse(key, default, "a non-negative integer")
    }

    fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.real(key, default);
        if v <= 0.0 {
            self.fail(key, format!("must be positive, got {v}"));
        }
        v
    }

    fn nonneg(&mut self, key: &str, default: f64) -> f64 {
        let v = self.real(key, default);
        if v < 0.0 {
            self.fail(key, format!("must be non-negative, got {v}"));
        }
        v
    }

    fn at_least(&mut self, key: &str, default: usize, min: usize) -> usize {
        let v = self.count(key, default);
        if v < min {
            self.fail(key, format!("must be at least {min}, got {v}"));
        }
        v
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.raw(key) {
            None => default,
            Some("true") => true,
            Some("false") => false,
            Some(other) => {
                let msg = format!("expected true or false, got {other:?}");
                self.fail(key, msg);
                default
            }
        }
    }
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<Parsed, ConfigError> {
    let opt = ParseOption {
        enabled_quote: false,
        enabled_escape: false,
        ..Default::default()
    };
    let ini = Ini::load_from_str_opt(text, opt).map_err(|e| ConfigError {
        violations: vec![Violation {
            key: format!("line {}", e.line),
            message: e.msg.to_string(),
        }],
    })?;

    let mut r = Reader {
        values: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (section, props) in ini.iter() {
        let known = section.and_then(|s| KEYS.iter().find(|(name, _)| *name == s));
        for (key, value) in props.iter() {
            let full = match section {
                Some(s) => format!("{s}.{key}"),
                None => key.to_string(),
            };
            match known {
                None => match section {
                    Some(_) => r.fail(&full, "unknown section"),
                    None => r.fail(&full, "key outside any section"),
                },
                Some((_, keys)) if !keys.contains(&key) => r.fail(&full, "unknown key"),
                Some(_) => {
                    if r.values.insert(full.clone(), value.trim().to_string()).is_some() {
                        r.fail(&full, "duplicate key");
                    }
                }
            }
        }
    }

    let d = RunConfig::default();
    let n = r.count("grid.n", d.n);
    if n < 8 || !n.is_power_of_two() {
        r.fail("grid.n", format!("must be a power of two and at least 8, got {n}"));
    }

    let ds = d.step;
    let dt = r.positive("time.dt", ds.dt);
    let t_end = r.nonneg("time.t_end", d.t_end);
    let picard_tol = r.positive("time.picard_tol", ds.picard_tol);
    let picard_abs_tol = r.nonneg("time.picard_abs_tol", ds.picard_abs_tol);
    let max_picard = r.at_least("time.max_picard", ds.max_picard, 1);
    let cfl_max = r.positive("time.cfl_max", ds.cfl_max);
    let diagnostic_interval = r.at_least("time.diagnostic_interval", ds.diagnostic_interval, 1);
    let inner_tol = r.positive("time.inner_tol", ds.inner.tol);
    let max_inner = r.at_least("time.max_inner", ds.inner.max_inner, 1);
    let continuity = match r.raw("time.continuity") {
        None | Some("spectral") => ContinuityScheme::Spectral,
        Some("characteristics") => ContinuityScheme::Characteristics,
        Some(other) => {
            let msg = format!("expected spectral or characteristics, got {other:?}");
            r.fail("time.continuity", msg);
            ContinuityScheme::Spectral
        }
    };
    let freeze_velocity = r.boolean("time.freeze_velocity", false);

    let df = FluidParams::default();
    let fluid = FluidParams {
        a: r.positive("fluid.a", df.a),
        gamma: r.real("fluid.gamma", df.gamma),
        mu: r.positive("fluid.mu", df.mu),
        b: r.positive("fluid.b", df.b),
        beta: r.real("fluid.beta", df.beta),
    };
    if fluid.gamma <= 1.0 {
        r.fail("fluid.gamma", format!("must exceed 1, got {}", fluid.gamma));
    }
    let magnetic = MagneticParams {
        nu: r.positive("magnetic.nu", MagneticParams::default().nu),
    };

    let dc = CouplingSpec::default();
    let alpha = r.nonneg("coupling.alpha", dc.alpha);
    let v_lo = r.positive("coupling.v_lo", dc.v_lo);
    let v_hi = r.positive("coupling.v_hi", dc.v_hi);
    let g_amp = r.positive("coupling.g_amp", dc.g_amp);
    let s_max = r.positive("coupling.s_max", dc.s_max);
    let h_amp = r.positive("coupling.h_amp", dc.h_amp);
    if v_hi <= v_lo {
        r.fail("coupling.v_hi", format!("must exceed v_lo = {v_lo}, got {v_hi}"));
    }
    let coupling = CouplingSpec::new(alpha, v_lo, v_hi, g_amp, s_max, h_amp).unwrap_or_else(|_| dc.clone());

    let scenario = read_scenario(&mut r);

    let output = OutputConfig {
        dir: r.raw("output.dir").map(PathBuf::from),
        snapshot_interval: r.count("output.snapshot_interval", 0),
    };

    if !r.errors.is_empty() {
        return Err(ConfigError { violations: r.errors });
    }
    let physics = Physics {
        fluid,
        magnetic,
        coupling,
    };
    let warnings = fluid.warnings().into_iter().map(String::from).collect();
    Ok(Parsed {
        config: RunConfig {
            n,
            t_end,
            step: StepConfig {
                dt,
                picard_tol,
                picard_abs_tol,
                max_picard,
                cfl_max,
                diagnostic_interval,
                inner: InnerOptions {
                    tol: inner_tol,
                    max_inner,
                },
                continuity,
                freeze_velocity,
            },
            physics,
            scenario,
            output,
        },
        warnings,
    })
}

fn read_random(r: &mut Reader) -> RandomSpec {
    let d = RandomSpec::default();
    let spec = RandomSpec {
        seed: r.parse("scenario.seed", d.seed, "a non-negative integer"),
        modes: r.parse("scenario.modes", d.modes, "an integer"),
        rho_mean: r.positive("scenario.rho_mean", d.rho_mean),
        rho_spread: r.nonneg("scenario.rho_spread", d.rho_spread),
        u_amp: r.nonneg("scenario.u_amp", d.u_amp),
        h_amp: r.nonneg("scenario.h_amp", d.h_amp),
        psi_amp: r.nonneg("scenario.psi_amp", d.psi_amp),
    };
    if spec.modes < 1 {
        r.fail("scenario.modes", format!("must be at least 1, got {}", spec.modes));
    }
    if spec.rho_spread >= spec.rho_mean {
        r.fail("scenario.rho_spread", "must be smaller than rho_mean to keep the density positive");
    }
    spec
}

fn read_scenario(r: &mut Reader) -> Scenario {
    let name = r.raw("scenario.name").unwrap_or("equilibrium").to_string();
    if !NAMES.contains(&name.as_str()) {
        let msg = format!("unknown scenario {name:?}; expected one of {}", NAMES.join(", "));
        r.fail("scenario.name", msg);
        return Scenario::equilibrium();
    }
    let allowed = scenario_keys(&name);
    let extra: Vec<String> = r
        .values
        .keys()
        .filter_map(|k| k.strip_prefix("scenario."))
        .filter(|k| !allowed.contains(k))
        .map(String::from)
        .collect();
    for k in extra {
        r.fail(&format!("scenario.{k}"), format!("not a parameter of scenario {name}"));
    }
    match name.as_str() {
        "equilibrium" => {
            let Scenario::Equilibrium { rho, amplitude, k } = Scenario::equilibrium() else {
                unreachable!()
            };
            Scenario::Equilibrium {
                rho: r.positive("scenario.rho", rho),
                amplitude: r.nonneg("scenario.amplitude", amplitude),
                k: [
                    r.parse("scenario.k1", k[0], "an integer"),
                    r.parse("scenario.k2", k[1], "an integer"),
                ],
            }
        }
        "smooth-random" => Scenario::SmoothRandom(read_random(r)),
        "perturbed-pair" => {
            let base = read_random(r);
            Scenario::PerturbedPair {
                base,
                delta: r.nonneg("scenario.delta", 1e-3),
            }
        }
        _ => {
            let Scenario::Shear {
                velocity,
                rho_mod,
                amplitude,
                field,
            } = Scenario::shear()
            else {
                unreachable!()
            };
            let s = Scenario::Shear {
                velocity: r.real("scenario.velocity", velocity),
                rho_mod: r.nonneg("scenario.rho_mod", rho_mod),
                amplitude: r.nonneg("scenario.amplitude", amplitude),
                field: r.real("scenario.field", field),
            };
            if let Scenario::Shear { rho_mod, .. } = s {
                if rho_mod >= 1.0 {
                    r.fail("scenario.rho_mod", "must be below 1 to keep the density positive");
                }
            }
            s
        }
    }
}

impl RunConfig {
    /// Full configuration text; parsing it yields an identical configuration.
    pub fn to_ini(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let st = &self.step;
        let f = &self.physics.fluid;
        let c = &self.physics.coupling;
        let _ = writeln!(s, "[grid]\nn = {}\n", self.n);
        let _ = writeln!(s, "[time]");
        let _ = writeln!(s, "dt = {:?}\nt_end = {:?}", st.dt, self.t_end);
        let _ = writeln!(s, "picard_tol = {:?}\npicard_abs_tol = {:?}", st.picard_tol, st.picard_abs_tol);
        let _ = writeln!(s, "max_picard = {}\ncfl_max = {:?}", st.max_picard, st.cfl_max);
        let _ = writeln!(s, "diagnostic_interval = {}", st.diagnostic_interval);
        let _ = writeln!(s, "inner_tol = {:?}\nmax_inner = {}", st.inner.tol, st.inner.max_inner);
        let scheme = match st.continuity {
            ContinuityScheme::Spectral => "spectral",
            ContinuityScheme::Characteristics => "characteristics",
        };
        let _ = writeln!(s, "continuity = {scheme}\nfreeze_velocity = {}\n", st.freeze_velocity);
        let _ = writeln!(s, "[fluid]\na = {:?}\ngamma = {:?}\nmu = {:?}", f.a, f.gamma, f.mu);
        let _ = writeln!(s, "b = {:?}\nbeta = {:?}\n", f.b, f.beta);
        let _ = writeln!(s, "[magnetic]\nnu = {:?}\n", self.physics.magnetic.nu);
        let _ = writeln!(s, "[coupling]\nalpha = {:?}\nv_lo = {:?}\nv_hi = {:?}", c.alpha, c.v_lo, c.v_hi);
        let _ = writeln!(s, "g_amp = {:?}\ns_max = {:?}\nh_amp = {:?}\n", c.g_amp, c.s_max, c.h_amp);
        let _ = writeln!(s, "[scenario]\nname = {}", self.scenario.name());
        let random = |s: &mut String, p: &RandomSpec| {
            let _ = writeln!(s, "seed = {}\nmodes = {}", p.seed, p.modes);
            let _ = writeln!(s, "rho_mean = {:?}\nrho_spread = {:?}", p.rho_mean, p.rho_spread);
            let _ = writeln!(s, "u_amp = {:?}\nh_amp = {:?}\npsi_amp = {:?}", p.u_amp, p.h_amp, p.psi_amp);
        };
        match &self.scenario {
            Scenario::Equilibrium { rho, amplitude, k } => {
                let _ = writeln!(s, "rho = {rho:?}\namplitude = {amplitude:?}\nk1 = {}\nk2 = {}", k[0], k[1]);
            }
            Scenario::SmoothRandom(p) => random(&mut s, p),
            Scenario::PerturbedPair { base, delta } => {
                random(&mut s, base);
                let _ = writeln!(s, "delta = {delta:?}");
            }
            Scenario::Shear {
                velocity,
                rho_mod,
                amplitude,
                field,
            } => {
                let _ = writeln!(s, "velocity = {velocity:?}\nrho_mod = {rho_mod:?}");
                let _ = writeln!(s, "amplitude = {amplitude:?}\nfield = {field:?}");
            }
        }
        let _ = writeln!(s, "\n[output]");
        if let Some(dir) = &self.output.dir {
            let _ = writeln!(s, "dir = {}", dir.display());
        }
        let _ = writeln!(s, "snapshot_interval = {}", self.output.snapshot_interval);
        s
    }
}
