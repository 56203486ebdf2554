//! Flat key=value run configuration with bracketed sections.
//!
//! The accepted grammar, line by line:
//!
//! ```text
//! # full-line comment
//! [run] | [economy] | [sweep] | [output]
//! key = value
//! ```
//!
//! Keys are lower_snake_case and scoped to their section; unknown sections,
//! unknown keys, duplicates, and malformed values are hard errors carrying
//! the offending line number.  Numbers accept plain decimals and exact
//! fractions (`8/7`); sequences accept `constant <x>`,
//! `geometric <base> <ratio>`, and
//! `explicit <v1,v2,...> tail <constant | geometric <ratio>>`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use olg_core::{EconomyParams, SequenceSpec, Tail, Technology, TechnologyFamily, Utility};

/// A configuration problem, with the source line when one is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    pub fn global(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error (line {line}): {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Which pipeline a run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    OlgGeneral,
    ExchangeLog,
    FiatContinuum,
    CobbDouglasBubble,
    LinearTech,
    VerifyPath,
}

impl Scenario {
    fn parse(raw: &str, line: usize) -> Result<Self, ConfigError> {
        match raw {
            "olg_general" => Ok(Scenario::OlgGeneral),
            "exchange_log" => Ok(Scenario::ExchangeLog),
            "fiat_continuum" => Ok(Scenario::FiatContinuum),
            "cobb_douglas_bubble" => Ok(Scenario::CobbDouglasBubble),
            "linear_tech" => Ok(Scenario::LinearTech),
            "verify_path" => Ok(Scenario::VerifyPath),
            other => Err(ConfigError::at_line(
                line,
                format!(
                    "unknown scenario `{other}` (expected olg_general, exchange_log, \
                     fiat_continuum, cobb_douglas_bubble, linear_tech, or verify_path)"
                ),
            )),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::OlgGeneral => "olg_general",
            Scenario::ExchangeLog => "exchange_log",
            Scenario::FiatContinuum => "fiat_continuum",
            Scenario::CobbDouglasBubble => "cobb_douglas_bubble",
            Scenario::LinearTech => "linear_tech",
            Scenario::VerifyPath => "verify_path",
        }
    }
}

/// An initial price: a number, or the run-time critical level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriceSpec {
    Value(f64),
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    P0,
    Q0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Utility and technology settings plus primitives, still in config form.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyConfig {
    pub utility: Utility,
    pub technology: Option<Technology>,
    pub k0: Option<f64>,
    pub endow_young: SequenceSpec,
    pub endow_old: SequenceSpec,
    pub dividends: SequenceSpec,
    /// Curvature as written, for scenarios that take it directly.
    pub sigma: f64,
}

impl EconomyConfig {
    /// Assemble validated primitives for simulation-style scenarios.
    pub fn build_params(&self, scenario: Scenario) -> Result<EconomyParams, ConfigError> {
        let k0 = match (&self.technology, self.k0) {
            (Some(_), Some(k0)) => k0,
            (Some(_), None) => {
                return Err(ConfigError::global(format!(
                    "scenario {} uses production; the [economy] field `k0` is required",
                    scenario.as_str()
                )))
            }
            (None, _) => 0.0,
        };
        let params = EconomyParams::new(
            self.utility,
            self.technology.clone(),
            self.dividends.clone(),
            self.endow_young.clone(),
            self.endow_old.clone(),
            k0,
        );
        params
            .validate()
            .map_err(|e| ConfigError::global(format!("invalid economy: {e}")))?;
        Ok(params)
    }
}

/// Everything a verb needs to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub horizon: usize,
    pub q0: f64,
    pub p0: PriceSpec,
    /// Input trajectory, for `verify_path` runs.
    pub trajectory: Option<PathBuf>,
    pub economy: EconomyConfig,
    pub sweep: Option<SweepConfig>,
    pub output_dir: Option<PathBuf>,
}

/// One `key = value` occurrence.
struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Section-scoped key/value store from the first parsing pass.
struct Raw {
    entries: BTreeMap<(String, String), Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at_line(line_no, "unterminated section header"))?
                    .trim();
                if !matches!(name, "run" | "economy" | "sweep" | "output") {
                    return Err(ConfigError::at_line(line_no, format!("unknown section `[{name}]`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let section = section.as_ref().ok_or_else(|| {
                ConfigError::at_line(line_no, "key before any [section] header")
            })?;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::at_line(line_no, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if value.is_empty() {
                return Err(ConfigError::at_line(line_no, format!("empty value for `{key}`")));
            }
            let prior = entries.insert(
                (section.clone(), key.clone()),
                Entry { line: line_no, value, used: false },
            );
            if let Some(prior) = prior {
                return Err(ConfigError::at_line(
                    line_no,
                    format!("duplicate key `{key}` in [{section}] (first at line {})", prior.line),
                ));
            }
        }
        Ok(Raw { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entries.get_mut(&(section.to_string(), key.to_string())).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.keys().any(|(s, _)| s == section)
    }

    fn reject_unused(&self) -> Result<(), ConfigError> {
        if let Some(((section, key), entry)) =
            self.entries.iter().find(|(_, entry)| !entry.used)
        {
            return Err(ConfigError::at_line(
                entry.line,
                format!("unknown key `{key}` in [{section}]"),
            ));
        }
        Ok(())
    }
}

/// Parse a decimal or an exact fraction `a/b`.
fn parse_number(raw: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    let parse = |s: &str| -> Option<f64> { s.trim().parse::<f64>().ok() };
    let value = match raw.split_once('/') {
        Some((num, den)) => {
            let (n, d) = (parse(num), parse(den));
            match (n, d) {
                (Some(n), Some(d)) if d != 0.0 => Some(n / d),
                _ => None,
            }
        }
        None => parse(raw),
    };
    value
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::at_line(line, format!("`{key}` is not a number: `{raw}`")))
}

fn parse_count(raw: &str, line: usize, key: &str) -> Result<usize, ConfigError> {
    raw.trim()
        .parse::<usize>()
        .map_err(|_| ConfigError::at_line(line, format!("`{key}` is not a whole number: `{raw}`")))
}

/// Parse a sequence literal (`constant`, `geometric`, or `explicit ... tail ...`).
fn parse_sequence(raw: &str, line: usize, key: &str) -> Result<SequenceSpec, ConfigError> {
    let words: Vec<&str> = raw.split_whitespace().collect();
    let bad = |msg: &str| ConfigError::at_line(line, format!("`{key}`: {msg} (got `{raw}`)"));
    match words.as_slice() {
        ["constant", x] => Ok(SequenceSpec::Constant(parse_number(x, line, key)?)),
        ["geometric", base, ratio] => Ok(SequenceSpec::Geometric {
            base: parse_number(base, line, key)?,
            ratio: parse_number(ratio, line, key)?,
        }),
        ["explicit", values, "tail", rest @ ..] => {
            let values = values
                .split(',')
                .map(|v| parse_number(v, line, key))
                .collect::<Result<Vec<f64>, _>>()?;
            if values.is_empty() {
                return Err(bad("explicit list is empty"));
            }
            let tail = match rest {
                ["constant"] => Tail::Constant,
                ["geometric", ratio] => Tail::Geometric(parse_number(ratio, line, key)?),
                _ => return Err(bad("tail must be `constant` or `geometric <ratio>`")),
            };
            Ok(SequenceSpec::Explicit { values, tail })
        }
        _ => Err(bad(
            "expected `constant <x>`, `geometric <base> <ratio>`, \
             or `explicit <v1,...> tail <rule>`",
        )),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = Raw::parse(text)?;

        // [run]
        let (scen_line, scen_value) = raw
            .take("run", "scenario")
            .ok_or_else(|| ConfigError::global("missing required key `scenario` in [run]"))?;
        let scenario = Scenario::parse(&scen_value, scen_line)?;

        let horizon = match raw.take("run", "horizon") {
            Some((line, value)) => {
                let h = parse_count(&value, line, "horizon")?;
                if h < 2 {
                    return Err(ConfigError::at_line(line, format!("horizon must be at least 2, got {h}")));
                }
                h
            }
            None => {
                if scenario == Scenario::VerifyPath {
                    2 // replaced by the trajectory length on load
                } else {
                    return Err(ConfigError::global("missing required key `horizon` in [run]"));
                }
            }
        };

        let q0 = match raw.take("run", "q0") {
            Some((line, value)) => {
                let v = parse_number(&value, line, "q0")?;
                if v < 0.0 {
                    return Err(ConfigError::at_line(line, format!("q0 must be nonnegative, got {v}")));
                }
                v
            }
            None => 0.0,
        };
        let p0 = match raw.take("run", "p0") {
            Some((_, value)) if value == "critical" => PriceSpec::Critical,
            Some((line, value)) => {
                let v = parse_number(&value, line, "p0")?;
                if v < 0.0 {
                    return Err(ConfigError::at_line(line, format!("p0 must be nonnegative, got {v}")));
                }
                PriceSpec::Value(v)
            }
            None => PriceSpec::Value(0.0),
        };
        let trajectory = raw.take("run", "trajectory").map(|(_, v)| PathBuf::from(v));
        if scenario == Scenario::VerifyPath && trajectory.is_none() {
            return Err(ConfigError::global(
                "scenario verify_path requires the [run] key `trajectory`",
            ));
        }

        let economy = Self::parse_economy(&mut raw, scenario)?;
        let sweep = Self::parse_sweep(&mut raw)?;
        let output_dir = raw.take("output", "dir").map(|(_, v)| PathBuf::from(v));

        raw.reject_unused()?;
        Ok(RunConfig { scenario, horizon, q0, p0, trajectory, economy, sweep, output_dir })
    }

    fn parse_economy(raw: &mut Raw, scenario: Scenario) -> Result<EconomyConfig, ConfigError> {
        let beta = match raw.take("economy", "beta") {
            Some((line, value)) => parse_number(&value, line, "beta")?,
            None => return Err(ConfigError::global("missing required key `beta` in [economy]")),
        };
        let sigma = match raw.take("economy", "sigma") {
            Some((line, value)) => parse_number(&value, line, "sigma")?,
            None => 1.0,
        };
        let utility = match raw.take("economy", "utility") {
            Some((line, value)) => match value.as_str() {
                "log" => Utility::log(beta),
                "isoelastic" => Utility::isoelastic(sigma, beta),
                other => {
                    return Err(ConfigError::at_line(
                        line,
                        format!("unknown utility `{other}` (expected log or isoelastic)"),
                    ))
                }
            },
            None => {
                if sigma == 1.0 {
                    Utility::log(beta)
                } else {
                    Utility::isoelastic(sigma, beta)
                }
            }
        };

        let technology = match raw.take("economy", "technology") {
            Some((line, value)) => match value.as_str() {
                "none" => None,
                "cobb_douglas" => {
                    let need = |raw: &mut Raw, key: &str| -> Result<f64, ConfigError> {
                        match raw.take("economy", key) {
                            Some((l, v)) => parse_number(&v, l, key),
                            None => Err(ConfigError::at_line(
                                line,
                                format!("technology cobb_douglas requires `{key}` in [economy]"),
                            )),
                        }
                    };
                    let tfp = need(raw, "tfp")?;
                    let alpha = need(raw, "alpha")?;
                    let delta = match raw.take("economy", "delta") {
                        Some((l, v)) => parse_number(&v, l, "delta")?,
                        None => 1.0,
                    };
                    Some(Technology::cobb_douglas(tfp, alpha, delta))
                }
                "linear" => {
                    let need = |raw: &mut Raw, key: &str| -> Result<f64, ConfigError> {
                        match raw.take("economy", key) {
                            Some((l, v)) => parse_number(&v, l, key),
                            None => Err(ConfigError::at_line(
                                line,
                                format!("technology linear requires `{key}` in [economy]"),
                            )),
                        }
                    };
                    Some(Technology::linear(need(raw, "slope")?, need(raw, "intercept")?, need(raw, "delta")?))
                }
                other => {
                    return Err(ConfigError::at_line(
                        line,
                        format!("unknown technology `{other}` (expected cobb_douglas, linear, or none)"),
                    ))
                }
            },
            None => None,
        };

        let k0 = match raw.take("economy", "k0") {
            Some((line, value)) => Some(parse_number(&value, line, "k0")?),
            None => None,
        };
        let sequence_or_zero = |raw: &mut Raw, key: &str| -> Result<SequenceSpec, ConfigError> {
            match raw.take("economy", key) {
                Some((line, value)) => parse_sequence(&value, line, key),
                None => Ok(SequenceSpec::zero()),
            }
        };
        let endow_young = sequence_or_zero(raw, "endow_young")?;
        let endow_old = sequence_or_zero(raw, "endow_old")?;
        let dividends = sequence_or_zero(raw, "dividends")?;

        // Scenario-specific shape requirements that do not depend on values.
        match scenario {
            Scenario::CobbDouglasBubble => {
                if !matches!(
                    technology,
                    Some(Technology { family: TechnologyFamily::CobbDouglas { .. }, .. })
                ) {
                    return Err(ConfigError::global(
                        "scenario cobb_douglas_bubble requires technology = cobb_douglas",
                    ));
                }
            }
            Scenario::LinearTech => {
                if !matches!(
                    technology,
                    Some(Technology { family: TechnologyFamily::Linear { .. }, .. })
                ) {
                    return Err(ConfigError::global(
                        "scenario linear_tech requires technology = linear",
                    ));
                }
            }
            Scenario::ExchangeLog | Scenario::FiatContinuum => {
                if technology.is_some() {
                    return Err(ConfigError::global(format!(
                        "scenario {} is an exchange economy; set technology = none or omit it",
                        scenario.as_str()
                    )));
                }
            }
            Scenario::OlgGeneral | Scenario::VerifyPath => {}
        }

        Ok(EconomyConfig { utility, technology, k0, endow_young, endow_old, dividends, sigma })
    }

    fn parse_sweep(raw: &mut Raw) -> Result<Option<SweepConfig>, ConfigError> {
        if !raw.has_section("sweep") {
            return Ok(None);
        }
        let need = |raw: &mut Raw, key: &str| -> Result<(usize, String), ConfigError> {
            raw.take("sweep", key)
                .ok_or_else(|| ConfigError::global(format!("missing required key `{key}` in [sweep]")))
        };
        let (var_line, var_value) = need(raw, "variable")?;
        let variable = match var_value.as_str() {
            "p0" => SweepVariable::P0,
            "q0" => SweepVariable::Q0,
            other => {
                return Err(ConfigError::at_line(
                    var_line,
                    format!("sweep variable must be p0 or q0, got `{other}`"),
                ))
            }
        };
        let (min_line, min_value) = need(raw, "min")?;
        let min = parse_number(&min_value, min_line, "min")?;
        let (max_line, max_value) = need(raw, "max")?;
        let max = parse_number(&max_value, max_line, "max")?;
        let (count_line, count_value) = need(raw, "count")?;
        let count = parse_count(&count_value, count_line, "count")?;
        if count < 2 {
            return Err(ConfigError::at_line(count_line, format!("sweep count must be at least 2, got {count}")));
        }
        if !(max > min) {
            return Err(ConfigError::at_line(max_line, format!("sweep needs max > min, got [{min}, {max}]")));
        }
        if min < 0.0 {
            return Err(ConfigError::at_line(min_line, format!("sweep minimum must be nonnegative, got {min}")));
        }
        Ok(Some(SweepConfig { variable, min, max, count }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUBBLE: &str = "\
# benchmark bubble run
[run]
scenario = cobb_douglas_bubble
horizon = 200
p0 = critical

[economy]
beta = 0.9
technology = cobb_douglas
tfp = 1
alpha = 0.3
k0 = 1
";

    #[test]
    fn parses_the_benchmark_config() {
        let cfg = RunConfig::parse(BUBBLE).unwrap();
        assert_eq!(cfg.scenario, Scenario::CobbDouglasBubble);
        assert_eq!(cfg.horizon, 200);
        assert_eq!(cfg.p0, PriceSpec::Critical);
        assert_eq!(cfg.q0, 0.0);
        assert!(cfg.economy.technology.is_some());
        assert_eq!(cfg.economy.k0, Some(1.0));
    }

    #[test]
    fn fractions_parse_exactly() {
        let text = "\
[run]
scenario = fiat_continuum
horizon = 100
p0 = 14

[economy]
beta = 7/8
sigma = 2
utility = isoelastic
endow_young = geometric 70 8/7
endow_old = geometric 35 8/7
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.economy.utility.beta, 0.875);
        match cfg.economy.endow_young {
            SequenceSpec::Geometric { base, ratio } => {
                assert_eq!(base, 70.0);
                assert_eq!(ratio, 8.0 / 7.0);
            }
            ref other => panic!("wrong sequence: {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_an_error_with_its_line() {
        let text = "\
[run]
scenario = cobb_douglas_bubble
horizon = 10
frobnicate = 3

[economy]
beta = 0.9
technology = cobb_douglas
tfp = 1
alpha = 0.3
k0 = 1
";
        let err = RunConfig::parse(text).unwrap_err();
        assert_eq!(err.line, Some(4));
        assert!(err.message.contains("frobnicate"), "{err}");
    }

    #[test]
    fn missing_k0_names_the_field() {
        let text = "\
[run]
scenario = cobb_douglas_bubble
horizon = 10

[economy]
beta = 0.9
technology = cobb_douglas
tfp = 1
alpha = 0.3
";
        let cfg = RunConfig::parse(text).unwrap();
        let err = cfg.economy.build_params(cfg.scenario).unwrap_err();
        assert!(err.message.contains("`k0`"), "{err}");
    }

    #[test]
    fn sweep_section_validates_bounds() {
        let base = "\
[run]
scenario = cobb_douglas_bubble
horizon = 10

[economy]
beta = 0.9
technology = cobb_douglas
tfp = 1
alpha = 0.3
k0 = 1

[sweep]
variable = p0
min = 0
max = 0.05
count = COUNT
";
        let good = RunConfig::parse(&base.replace("COUNT", "64")).unwrap();
        assert_eq!(good.sweep.unwrap().count, 64);
        let err = RunConfig::parse(&base.replace("COUNT", "1")).unwrap_err();
        assert!(err.message.contains("at least 2"), "{err}");
    }

    #[test]
    fn explicit_sequences_parse() {
        let seq = parse_sequence("explicit 1,2,3 tail geometric 1.05", 7, "dividends").unwrap();
        match seq {
            SequenceSpec::Explicit { values, tail } => {
                assert_eq!(values, vec![1.0, 2.0, 3.0]);
                assert_eq!(tail, Tail::Geometric(1.05));
            }
            other => panic!("wrong sequence: {other:?}"),
        }
        assert!(parse_sequence("explicit tail constant", 7, "d").is_err());
        assert!(parse_sequence("linear 1 2", 7, "d").is_err());
    }
}
