//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;
use twostep::gmmb::{GmmbParams, McConfig, ScrPrinciple, DEFAULT_COC_RATE};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

const KEYS: &[&str] = &[
    "c", "xi", "lambda0", "r", "sigma", "T", "K", "y0", "mu", "n_paths", "seed", "threads",
    "scr_principle", "beta", "tvar_level", "coc_rate", "rho_grid", "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `rho` inside is a placeholder; sweeps use `rho_grid`.
    pub model: GmmbParams,
    pub mc: McConfig,
    pub scr_principle: ScrPrinciple,
    pub coc_rate: f64,
    pub rho_grid: Vec<f64>,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: GmmbParams::default(),
            mc: McConfig::default(),
            scr_principle: ScrPrinciple::default(),
            coc_rate: DEFAULT_COC_RATE,
            rho_grid: default_grid(),
            output_path: None,
        }
    }
}

fn default_grid() -> Vec<f64> {
    parse_grid("-1:0.1:1").expect("valid literal")
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(|e| match e {
            twostep::Error::InvalidParameter { name, reason } => invalid(name, reason),
            other => invalid("model", other.to_string()),
        })?;
        if self.mc.n_paths == 0 {
            return Err(invalid("n_paths", "must be at least 1"));
        }
        if self.mc.n_threads == Some(0) {
            return Err(invalid("threads", "must be at least 1"));
        }
        match self.scr_principle {
            ScrPrinciple::StdDev { beta } if !(beta.is_finite() && beta >= 0.0) => {
                return Err(invalid("beta", format!("must be >= 0, got {beta}")))
            }
            ScrPrinciple::Tvar { level } if !(level > 0.0 && level < 1.0) => {
                return Err(invalid("tvar_level", format!("must lie in (0, 1), got {level}")))
            }
            _ => {}
        }
        if !(self.coc_rate.is_finite() && self.coc_rate >= 0.0) {
            return Err(invalid("coc_rate", format!("must be >= 0, got {}", self.coc_rate)));
        }
        if self.rho_grid.is_empty() {
            return Err(invalid("rho_grid", "is empty"));
        }
        if let Some(r) = self.rho_grid.iter().find(|r| !(r.abs() <= 1.0)) {
            return Err(invalid("rho_grid", format!("entry {r} outside [-1, 1]")));
        }
        Ok(())
    }
}

/// `a:step:b` (inclusive of `b` within 1e-12) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("not a number: `{}`", s.trim()));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) || b < a {
                return Err(format!("bad range `{text}`"));
            }
            let span = (b - a) / step;
            let n = span.round();
            if (a + n * step - b).abs() <= 1e-12 {
                // Interpolate between exact endpoints so that e.g. 0 is hit exactly.
                let n = n as usize;
                Ok((0..=n)
                    .map(|k| if n == 0 { a } else { (a * (n - k) as f64 + b * k as f64) / n as f64 })
                    .collect())
            } else {
                Ok((0..=span.floor() as usize).map(|k| a + k as f64 * step).collect())
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(format!("bad grid `{text}`")),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Parse { line, message: format!("expected `key = value`, got `{body}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ConfigError::Parse { line, message: format!("unknown key `{k}`") });
        }
        if v.is_empty() {
            return Err(ConfigError::Parse { line, message: format!("missing value for `{k}`") });
        }
        if let Some((first, _)) = entries.insert(k, (line, v)) {
            return Err(ConfigError::Parse { line, message: format!("`{k}` already set on line {first}") });
        }
    }

    fn get<T: std::str::FromStr>(
        entries: &BTreeMap<&str, (usize, &str)>,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError> {
        match entries.get(key) {
            None => Ok(default),
            Some(&(line, v)) => v.parse().map_err(|_| ConfigError::Parse {
                line,
                message: format!("cannot parse `{v}` for `{key}`"),
            }),
        }
    }

    let d = RunConfig::default();
    let m = d.model;
    let model = GmmbParams {
        c: get(&entries, "c", m.c)?,
        xi: get(&entries, "xi", m.xi)?,
        lambda0: get(&entries, "lambda0", m.lambda0)?,
        r: get(&entries, "r", m.r)?,
        sigma: get(&entries, "sigma", m.sigma)?,
        rho: m.rho,
        maturity: get(&entries, "T", m.maturity)?,
        guarantee: get(&entries, "K", m.guarantee)?,
        y0: get(&entries, "y0", m.y0)?,
        mu: get(&entries, "mu", m.mu)?,
    };
    let threads: Option<usize> = match entries.get("threads") {
        None => None,
        Some(_) => Some(get(&entries, "threads", 0)?),
    };
    let mc = McConfig {
        n_paths: get(&entries, "n_paths", d.mc.n_paths)?,
        seed: get(&entries, "seed", d.mc.seed)?,
        n_threads: threads,
    };
    let kind: String = get(&entries, "scr_principle", "std_dev".to_string())?;
    let scr_principle = match kind.as_str() {
        "std_dev" => {
            if let Some(&(line, _)) = entries.get("tvar_level") {
                return Err(ConfigError::Parse { line, message: "`tvar_level` needs scr_principle = tvar".into() });
            }
            ScrPrinciple::StdDev { beta: get(&entries, "beta", 1.0)? }
        }
        "tvar" => {
            if let Some(&(line, _)) = entries.get("beta") {
                return Err(ConfigError::Parse { line, message: "`beta` needs scr_principle = std_dev".into() });
            }
            ScrPrinciple::Tvar { level: get(&entries, "tvar_level", 0.995)? }
        }
        other => return Err(invalid("scr_principle", format!("expected `std_dev` or `tvar`, got `{other}`"))),
    };
    let rho_grid = match entries.get("rho_grid") {
        None => d.rho_grid,
        Some(&(line, v)) => parse_grid(v).map_err(|message| ConfigError::Parse { line, message })?,
    };
    let cfg = RunConfig {
        model,
        mc,
        scr_principle,
        coc_rate: get(&entries, "coc_rate", d.coc_rate)?,
        rho_grid,
        output_path: entries.get("out").map(|&(_, v)| v.to_string()),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Inverse of [`parse_config`]; floats use the shortest round-trip form.
pub fn render_config(cfg: &RunConfig) -> String {
    let m = &cfg.model;
    let mut s = String::new();
    for (k, v) in [
        ("c", m.c),
        ("xi", m.xi),
        ("lambda0", m.lambda0),
        ("r", m.r),
        ("sigma", m.sigma),
        ("T", m.maturity),
        ("K", m.guarantee),
        ("y0", m.y0),
        ("mu", m.mu),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    let _ = writeln!(s, "n_paths = {}", cfg.mc.n_paths);
    let _ = writeln!(s, "seed = {}", cfg.mc.seed);
    if let Some(t) = cfg.mc.n_threads {
        let _ = writeln!(s, "threads = {t}");
    }
    match cfg.scr_principle {
        ScrPrinciple::StdDev { beta } => {
            let _ = writeln!(s, "scr_principle = std_dev\nbeta = {beta:?}");
        }
        ScrPrinciple::Tvar { level } => {
            let _ = writeln!(s, "scr_principle = tvar\ntvar_level = {level:?}");
        }
    }
    let _ = writeln!(s, "coc_rate = {:?}", cfg.coc_rate);
    let grid: Vec<String> = cfg.rho_grid.iter().map(|r| format!("{r:?}")).collect();
    let _ = writeln!(s, "rho_grid = {}", grid.join(", "));
    if let Some(out) = &cfg.output_path {
        let _ = writeln!(s, "out = {out}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.mc.n_paths, 100_000);
        assert_eq!(cfg.coc_rate, 0.06);
        assert_eq!(cfg.model.c, 0.075);
    }

    #[test]
    fn grid_syntax() {
        let g = parse_grid("-1:0.1:1").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[10], 0.0);
        assert_eq!(g[20], 1.0);
        assert_eq!(parse_grid("0:0.3:1").unwrap().len(), 4);
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("-1, 0,1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(parse_grid("1:0.1:0").is_err());
        assert!(parse_grid("0:0:1").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# header\n\nxi = 0   # deterministic\nseed=7\n").unwrap();
        assert_eq!(cfg.model.xi, 0.0);
        assert_eq!(cfg.mc.seed, 7);
    }

    #[test]
    fn negative_beta_names_the_key() {
        let err = parse_config("beta = -0.5").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "beta"), "{err}");
        let err = parse_config("T = 0").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "T"), "{err}");
        let err = parse_config("rho_grid = 0:0.5:1.5").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "rho_grid"), "{err}");
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        assert_eq!(
            parse_config("c = 0.07\nnonsense\n").unwrap_err(),
            ConfigError::Parse { line: 2, message: "expected `key = value`, got `nonsense`".into() }
        );
        assert!(matches!(parse_config("\n\nfoo = 1").unwrap_err(), ConfigError::Parse { line: 3, .. }));
        assert!(matches!(parse_config("c = x").unwrap_err(), ConfigError::Parse { line: 1, .. }));
        assert!(matches!(parse_config("c = 1\nc = 2").unwrap_err(), ConfigError::Parse { line: 2, .. }));
        assert!(matches!(parse_config("scr_principle = tvar\nbeta = 1").unwrap_err(), ConfigError::Parse { line: 2, .. }));
    }

    #[test]
    fn tvar_principle() {
        let cfg = parse_config("scr_principle = tvar\ntvar_level = 0.9").unwrap();
        assert_eq!(cfg.scr_principle, ScrPrinciple::Tvar { level: 0.9 });
        assert!(parse_config("scr_principle = var").is_err());
    }
}
