//! Flat `key = value` simulation configuration.
//!
//! ```text
//! n = 32
//! l_box = 6.283185307179586
//! du = 0.05
//! steps = 126
//! branch = +
//! init.kind = plane-wave
//! init.k = 1, 0, 0        # integer mode numbers, k = 2 pi m / l_box
//! init.e0 = 0, 1, 0
//! output.cadence = 1
//! ```
//!
//! `init.kind = custom` takes `init.e` and `init.b` as `;`-separated
//! expressions in `x1, x2, x3, t`, sampled at `t = branch * e^u`.
//! Optional keys: `u0`, `init.dual`, `output.dump` (dump cadence, 0 = off).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::maxwell::{norm, plane_wave, EmField};

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// mode numbers `m` with `k = 2 pi m / l_box`
    PlaneWave { modes: [i64; 3], e0: [f64; 3] },
    Custom { e: String, b: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub l_box: f64,
    pub du: f64,
    pub steps: usize,
    /// sign of `t` on the simulated branch
    pub branch: f64,
    pub u0: f64,
    pub init: InitialCondition,
    /// apply `(E, B) -> (B, -E)` to the initial data
    pub dual: bool,
    /// CSV row every `cadence` steps (the last step is always written)
    pub cadence: usize,
    /// field dump every `dump_cadence` steps; 0 disables dumps
    pub dump_cadence: usize,
}

const KEYS: [&str; 14] = [
    "n",
    "l_box",
    "du",
    "steps",
    "branch",
    "u0",
    "init.kind",
    "init.k",
    "init.e0",
    "init.e",
    "init.b",
    "init.dual",
    "output.cadence",
    "output.dump",
];

impl SimConfig {
    /// Plane wave with `m` modes, CFL fraction `courant` of the bound, over
    /// `periods` wave periods.
    pub fn plane_wave(n: usize, l_box: f64, modes: [i64; 3], e0: [f64; 3], courant: f64, periods: f64) -> Self {
        let k = modes.map(|m| 2.0 * PI * m as f64 / l_box);
        let span = periods * 2.0 * PI / norm(k);
        let bound = l_box / n as f64 / 3f64.sqrt();
        let steps = (span / (courant * bound)).ceil().max(1.0) as usize;
        SimConfig {
            n,
            l_box,
            du: span / steps as f64,
            steps,
            branch: 1.0,
            u0: 0.0,
            init: InitialCondition::PlaneWave { modes, e0 },
            dual: false,
            cadence: 1,
            dump_cadence: 0,
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (lineno, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
            }
            if kv.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let need = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key `{k}`")));
        let num = |k: &str, v: &str| v.parse::<f64>().map_err(|_| Error::Config(format!("`{k}`: not a number: `{v}`")));
        let int = |k: &str, v: &str| v.parse::<usize>().map_err(|_| Error::Config(format!("`{k}`: not a count: `{v}`")));
        let init = match need("init.kind")? {
            "zero" => InitialCondition::Zero,
            "plane-wave" => {
                let modes = triple(need("init.k")?, "init.k", |s| s.parse::<i64>().ok())?;
                let e0 = triple(need("init.e0")?, "init.e0", |s| s.parse::<f64>().ok())?;
                InitialCondition::PlaneWave { modes, e0 }
            }
            "custom" => InitialCondition::Custom { e: need("init.e")?.to_string(), b: need("init.b")?.to_string() },
            other => return Err(Error::Config(format!("`init.kind`: unknown kind `{other}`"))),
        };
        let branch = match get("branch").unwrap_or("+") {
            "+" | "+1" | "1" => 1.0,
            "-" | "-1" => -1.0,
            other => return Err(Error::Config(format!("`branch`: expected + or -, got `{other}`"))),
        };
        let dual = match get("init.dual").unwrap_or("false") {
            "true" => true,
            "false" => false,
            other => return Err(Error::Config(format!("`init.dual`: expected true or false, got `{other}`"))),
        };
        let cfg = SimConfig {
            n: int("n", need("n")?)?,
            l_box: num("l_box", need("l_box")?)?,
            du: num("du", need("du")?)?,
            steps: int("steps", need("steps")?)?,
            branch,
            u0: get("u0").map(|v| num("u0", v)).transpose()?.unwrap_or(0.0),
            init,
            dual,
            cadence: get("output.cadence").map(|v| int("output.cadence", v)).transpose()?.unwrap_or(1),
            dump_cadence: get("output.dump").map(|v| int("output.dump", v)).transpose()?.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::Config(format!("`n` must be at least 8, got {}", self.n)));
        }
        if !(self.l_box > 0.0 && self.l_box.is_finite()) {
            return Err(Error::Config("`l_box` must be positive".into()));
        }
        if !(self.du > 0.0 && self.du.is_finite()) {
            return Err(Error::Config("`du` must be positive".into()));
        }
        if self.cadence == 0 {
            return Err(Error::Config("`output.cadence` must be positive".into()));
        }
        let bound = self.dx() / 3f64.sqrt();
        if self.du > bound {
            return Err(Error::Cfl { du: self.du, bound });
        }
        self.initial_field().map(|_| ())
    }

    pub fn dx(&self) -> f64 {
        self.l_box / self.n as f64
    }

    pub fn wave_vector(&self) -> Option<[f64; 3]> {
        match &self.init {
            InitialCondition::PlaneWave { modes, .. } => Some(modes.map(|m| 2.0 * PI * m as f64 / self.l_box)),
            _ => None,
        }
    }

    /// The symbolic initial data (exact solution for plane waves).
    pub fn initial_field(&self) -> Result<EmField> {
        let f = match &self.init {
            InitialCondition::Zero => EmField::zero(),
            InitialCondition::PlaneWave { modes, e0 } => {
                if modes.iter().all(|&m| m == 0) {
                    return Err(Error::Config("`init.k` must be a nonzero mode vector".into()));
                }
                plane_wave(self.wave_vector().expect("plane wave"), *e0, false).map_err(|e| Error::Config(e.to_string()))?
            }
            InitialCondition::Custom { e, b } => EmField::parse(e, b)?,
        };
        Ok(if self.dual { f.dual() } else { f })
    }
}

fn triple<T: Copy + Default>(src: &str, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<[T; 3]> {
    let parts: Vec<&str> = src.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("`{key}`: expected three comma-separated values")));
    }
    let mut out = [T::default(); 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse(p).ok_or_else(|| Error::Config(format!("`{key}`: cannot read `{p}`")))?;
    }
    Ok(out)
}

impl fmt::Display for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "l_box = {}", self.l_box)?;
        writeln!(f, "du = {}", self.du)?;
        writeln!(f, "steps = {}", self.steps)?;
        writeln!(f, "branch = {}", if self.branch < 0.0 { "-" } else { "+" })?;
        writeln!(f, "u0 = {}", self.u0)?;
        match &self.init {
            InitialCondition::Zero => writeln!(f, "init.kind = zero")?,
            InitialCondition::PlaneWave { modes, e0 } => {
                writeln!(f, "init.kind = plane-wave")?;
                writeln!(f, "init.k = {}, {}, {}", modes[0], modes[1], modes[2])?;
                writeln!(f, "init.e0 = {}, {}, {}", e0[0], e0[1], e0[2])?;
            }
            InitialCondition::Custom { e, b } => {
                writeln!(f, "init.kind = custom")?;
                writeln!(f, "init.e = {e}")?;
                writeln!(f, "init.b = {b}")?;
            }
        }
        writeln!(f, "init.dual = {}", self.dual)?;
        writeln!(f, "output.cadence = {}", self.cadence)?;
        writeln!(f, "output.dump = {}", self.dump_cadence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = "n = 16\nl_box = 6.283185307179586\ndu = 0.1\nsteps = 10\n\
                       init.kind = plane-wave\ninit.k = 1, 0, 0\ninit.e0 = 0, 1, 0 # transverse\n";

    #[test]
    fn parses_and_round_trips() {
        let c = SimConfig::parse(CFG).unwrap();
        assert_eq!(c.branch, 1.0);
        assert_eq!(c.init, InitialCondition::PlaneWave { modes: [1, 0, 0], e0: [0.0, 1.0, 0.0] });
        assert_eq!(SimConfig::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(SimConfig::parse(&format!("{CFG}colour = red\n")), Err(Error::Config(_))));
        assert!(matches!(SimConfig::parse(&CFG.replace("du = 0.1", "du = 0.3")), Err(Error::Cfl { .. })));
        assert!(SimConfig::parse(&CFG.replace("n = 16", "n = 4")).is_err());
        assert!(SimConfig::parse(&CFG.replace("0, 1, 0", "1, 0, 0")).is_err());
        assert!(SimConfig::parse(&CFG.replace("1, 0, 0", "0.5, 0, 0")).is_err());
    }
}
