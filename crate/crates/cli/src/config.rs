//! Flat `key = value` configuration files grouped under `[section]`
//! headers. Unknown sections or keys are hard errors so typos cannot
//! silently change a run.

use std::collections::BTreeMap;

use bredsim_core::{markov_params, DeltaVariant, GeneratorParams, PhysicalParams};

#[derive(Debug, Default)]
struct Section {
    entries: BTreeMap<String, String>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn require_empty(&self, name: &str) -> Result<(), String> {
        if let Some(key) = self.entries.keys().next() {
            return Err(format!("unknown key '{key}' in [{name}]"));
        }
        Ok(())
    }
}

fn parse_f64(section: &str, key: &str, raw: &str) -> Result<f64, String> {
    raw.parse::<f64>()
        .map_err(|_| format!("non-numeric value for '{key}' in [{section}]: '{raw}'"))
}

fn parse_u64(section: &str, key: &str, raw: &str) -> Result<u64, String> {
    raw.parse::<u64>()
        .map_err(|_| format!("non-numeric value for '{key}' in [{section}]: '{raw}'"))
}

/// Either microscopic constants (resolved through the Markov limit) or
/// directly specified generator constants.
#[derive(Debug, Clone)]
pub enum ParamBlock {
    Physical {
        params: PhysicalParams,
        variant: DeltaVariant,
    },
    Generator(GeneratorParams),
}

impl ParamBlock {
    pub fn generator(&self) -> GeneratorParams {
        match self {
            ParamBlock::Physical { params, variant } => markov_params(params, *variant),
            ParamBlock::Generator(g) => *g,
        }
    }

    pub fn physical(&self) -> Option<&PhysicalParams> {
        match self {
            ParamBlock::Physical { params, .. } => Some(params),
            ParamBlock::Generator(_) => None,
        }
    }
}

/// Grid keys; each mode demands the ones it consumes.
#[derive(Debug, Clone, Default)]
pub struct Grid {
    pub t_max: Option<f64>,
    pub n_points: Option<usize>,
    pub theta_step: Option<f64>,
    pub p_step: Option<f64>,
}

impl Grid {
    pub fn t_max(&self) -> Result<f64, String> {
        self.t_max
            .ok_or_else(|| "missing required key 't_max' in [grid]".into())
    }

    pub fn n_points(&self) -> Result<usize, String> {
        self.n_points
            .ok_or_else(|| "missing required key 'n_points' in [grid]".into())
    }

    pub fn theta_step(&self) -> Result<f64, String> {
        self.theta_step
            .ok_or_else(|| "missing required key 'theta_step' in [grid]".into())
    }

    pub fn p_step(&self) -> Result<f64, String> {
        self.p_step
            .ok_or_else(|| "missing required key 'p_step' in [grid]".into())
    }
}

#[derive(Debug, Clone)]
pub struct RunOpts {
    pub seed: u64,
    pub n_traj: usize,
    pub dt: Option<f64>,
}

impl Default for RunOpts {
    fn default() -> Self {
        Self {
            seed: 0,
            n_traj: 20_000,
            dt: None,
        }
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ParamBlock,
    pub grid: Grid,
    /// Initial single-qubit Bloch components (eta1, eta2, eta3).
    pub state: Option<[f64; 3]>,
    pub run: RunOpts,
}

impl RunConfig {
    pub fn state(&self) -> Result<[f64; 3], String> {
        self.state
            .ok_or_else(|| "missing required section [state]".into())
    }

    pub fn physical(&self) -> Result<&PhysicalParams, String> {
        self.params
            .physical()
            .ok_or_else(|| "this mode requires the [physical] parameter block".into())
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, String> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| format!("line {}: malformed section header '{line}'", lineno + 1))?
                .trim()
                .to_string();
            if sections.contains_key(&name) {
                return Err(format!("duplicate section [{name}]"));
            }
            sections.insert(name.clone(), Section::default());
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected 'key = value', got '{line}'", lineno + 1))?;
        let section = current
            .as_ref()
            .ok_or_else(|| format!("line {}: key outside any [section]", lineno + 1))?;
        let entry = sections.get_mut(section).expect("section exists");
        let key = key.trim().to_string();
        if entry.entries.contains_key(&key) {
            return Err(format!("duplicate key '{key}' in [{section}]"));
        }
        entry.entries.insert(key, value.trim().to_string());
    }
    Ok(sections)
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let mut sections = split_sections(text)?;

    let physical = sections.remove("physical");
    let generator = sections.remove("generator");
    let params = match (physical, generator) {
        (Some(_), Some(_)) => {
            return Err(
                "conflicting parameter blocks: both [physical] and [generator] present".into(),
            )
        }
        (None, None) => {
            return Err("missing parameter block: provide [physical] or [generator]".into())
        }
        (Some(mut s), None) => {
            let require = |s: &mut Section, key: &str| -> Result<f64, String> {
                let raw = s
                    .take(key)
                    .ok_or_else(|| format!("missing required key '{key}' in [physical]"))?;
                parse_f64("physical", key, &raw)
            };
            let g2 = require(&mut s, "g2")?;
            let mu = require(&mut s, "mu")?;
            let omega0 = require(&mut s, "omega0")?;
            let f2 = match s.take("f2") {
                Some(raw) => parse_f64("physical", "f2", &raw)?,
                None => 0.0,
            };
            let nu = match s.take("nu") {
                Some(raw) => parse_f64("physical", "nu", &raw)?,
                None => 1.0,
            };
            let variant = match s.take("delta_variant").as_deref() {
                None | Some("mu") => DeltaVariant::MuDenominator,
                Some("nu") => DeltaVariant::NuDenominator,
                Some(other) => {
                    return Err(format!(
                        "invalid delta_variant '{other}' in [physical]: expected 'mu' or 'nu'"
                    ))
                }
            };
            s.require_empty("physical")?;
            let params = PhysicalParams::new(g2, f2, mu, nu, omega0).map_err(|e| e.to_string())?;
            ParamBlock::Physical { params, variant }
        }
        (None, Some(mut s)) => {
            let require = |s: &mut Section, key: &str| -> Result<f64, String> {
                let raw = s
                    .take(key)
                    .ok_or_else(|| format!("missing required key '{key}' in [generator]"))?;
                parse_f64("generator", key, &raw)
            };
            let alpha = require(&mut s, "alpha")?;
            let beta = require(&mut s, "beta")?;
            let omega = require(&mut s, "omega")?;
            let gamma = match s.take("gamma") {
                Some(raw) => parse_f64("generator", "gamma", &raw)?,
                None => 0.0,
            };
            let delta = match s.take("delta") {
                Some(raw) => parse_f64("generator", "delta", &raw)?,
                None => 0.0,
            };
            s.require_empty("generator")?;
            let g = GeneratorParams::new(alpha, beta, omega, gamma, delta)
                .map_err(|e| e.to_string())?;
            ParamBlock::Generator(g)
        }
    };

    let mut grid = Grid::default();
    if let Some(mut s) = sections.remove("grid") {
        if let Some(raw) = s.take("t_max") {
            grid.t_max = Some(parse_f64("grid", "t_max", &raw)?);
        }
        if let Some(raw) = s.take("n_points") {
            let n = parse_u64("grid", "n_points", &raw)? as usize;
            if n < 2 {
                return Err("'n_points' in [grid] must be at least 2".into());
            }
            grid.n_points = Some(n);
        }
        if let Some(raw) = s.take("theta_step") {
            grid.theta_step = Some(parse_f64("grid", "theta_step", &raw)?);
        }
        if let Some(raw) = s.take("p_step") {
            grid.p_step = Some(parse_f64("grid", "p_step", &raw)?);
        }
        s.require_empty("grid")?;
    }

    let state = match sections.remove("state") {
        None => None,
        Some(mut s) => {
            let mut comps = [0.0; 3];
            for (i, key) in ["eta1", "eta2", "eta3"].iter().enumerate() {
                let raw = s
                    .take(key)
                    .ok_or_else(|| format!("missing required key '{key}' in [state]"))?;
                comps[i] = parse_f64("state", key, &raw)?;
            }
            s.require_empty("state")?;
            Some(comps)
        }
    };

    let mut run = RunOpts::default();
    if let Some(mut s) = sections.remove("run") {
        if let Some(raw) = s.take("seed") {
            run.seed = parse_u64("run", "seed", &raw)?;
        }
        if let Some(raw) = s.take("n_traj") {
            run.n_traj = parse_u64("run", "n_traj", &raw)? as usize;
        }
        if let Some(raw) = s.take("dt") {
            run.dt = Some(parse_f64("run", "dt", &raw)?);
        }
        s.require_empty("run")?;
    }

    if let Some(name) = sections.keys().next() {
        return Err(format!("unknown section [{name}]"));
    }
    Ok(RunConfig {
        params,
        grid,
        state,
        run,
    })
}
