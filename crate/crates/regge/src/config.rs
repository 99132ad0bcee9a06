//! Flat key = value run configuration with `#` comments. Every key has a
//! default, so an empty (or absent) file is a valid configuration; CLI flags
//! override file keys one-for-one.

use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config key `{key}`: {detail}")]
    BadValue { key: String, detail: String },
    #[error("config io: {0}")]
    Io(#[from] std::io::Error),
}

/// Run configuration shared by all subcommands. Defaults are what an empty
/// config yields; see the field docs for each default.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Input table path (CSV or JSON). No default; subcommands that read a
    /// table require it from the config or `--input`.
    pub input: Option<PathBuf>,
    /// Output directory, created if missing. Default "out".
    pub out: PathBuf,
    /// Scattering-angle grid "start:stop:step" in degrees. Default "5:175:5".
    pub theta_grid: String,
    /// Unfolded phi grid lower edge, degrees. Default -180.
    pub phi_min_deg: f64,
    /// Unfolded phi grid upper edge, degrees. Default 540.
    pub phi_max_deg: f64,
    /// Unfolded phi grid step, degrees. Default 0.5.
    pub phi_step_deg: f64,
    /// Winding-sum truncation |m| <= m_max. Default 2.
    pub m_max: i32,
    /// Ceiling on the pre-resummation m-truncation bound. Default 1e-3.
    pub fold_tol: f64,
    /// Per-point quadrature error-estimate ceiling. Default 1e-3.
    pub quad_tol: f64,
    /// Quadrature split point; empty means J_max + 1/2. Default empty.
    pub lambda_cut: Option<f64>,
    /// Pole-search trust half-height in Im lambda. Default 4.0.
    pub im_cap: f64,
    /// Minimum |residue| for a pole to count as significant. Default 1e-4.
    pub res_min: f64,
    /// Maximum Im lambda for a pole to count as significant. Default 3.0.
    pub im_max: f64,
    /// Pole-zero pairing radius for Froissart-doublet filtering. Default 1e-3.
    pub doublet_radius: f64,
    /// Trajectory chaining radius in lambda. Default 1.0.
    pub match_radius: f64,
    /// Energy offset for CE-set comparison, meV. Default 0.
    pub offset_mev: f64,
    /// Warn when a table's J_max is below this. Default 20.
    pub jmax_warn: usize,
    /// Worker threads; empty means rayon's default. Default empty.
    pub threads: Option<usize>,
    /// Trajectory fit window "lo:hi" in meV; empty fits every point.
    pub fit_window: Option<(f64, f64)>,
    /// Integer J list for ce-poles, e.g. "12..17" or "12,14,16". Empty
    /// derives the range from the fitted trajectory.
    pub ce_j: Option<Vec<usize>>,
    /// Sideway decomposition angle, degrees. Default 90.
    pub decompose_theta_deg: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out: PathBuf::from("out"),
            theta_grid: "5:175:5".to_string(),
            phi_min_deg: -180.0,
            phi_max_deg: 540.0,
            phi_step_deg: 0.5,
            m_max: 2,
            fold_tol: 1e-3,
            quad_tol: 1e-3,
            lambda_cut: None,
            im_cap: 4.0,
            res_min: 1e-4,
            im_max: 3.0,
            doublet_radius: 1e-3,
            match_radius: 1.0,
            offset_mev: 0.0,
            jmax_warn: 20,
            threads: None,
            fit_window: None,
            ce_j: None,
            decompose_theta_deg: 90.0,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        detail: format!("`{v}` is not a number"),
    })
}

fn parse_window(key: &str, v: &str) -> Result<(f64, f64), ConfigError> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 2 {
        return Err(ConfigError::BadValue {
            key: key.to_string(),
            detail: format!("`{v}` is not `lo:hi`"),
        });
    }
    Ok((parse_f64(key, parts[0].trim())?, parse_f64(key, parts[1].trim())?))
}

/// "12..17" (inclusive) or "12,14,16".
pub fn parse_j_list(v: &str) -> Result<Vec<usize>, ConfigError> {
    let bad = |detail: String| ConfigError::BadValue { key: "ce_j".to_string(), detail };
    if let Some((lo, hi)) = v.split_once("..") {
        let lo: usize =
            lo.trim().parse().map_err(|_| bad(format!("`{v}`: bad range start")))?;
        let hi: usize = hi.trim().parse().map_err(|_| bad(format!("`{v}`: bad range end")))?;
        if hi < lo {
            return Err(bad(format!("`{v}`: empty range")));
        }
        return Ok((lo..=hi).collect());
    }
    v.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad(format!("`{v}`: bad entry `{t}`"))))
        .collect()
}

impl RunConfig {
    pub fn apply_key(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "input" => self.input = Some(PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "theta_grid" => self.theta_grid = v.to_string(),
            "phi_min_deg" => self.phi_min_deg = parse_f64(key, v)?,
            "phi_max_deg" => self.phi_max_deg = parse_f64(key, v)?,
            "phi_step_deg" => self.phi_step_deg = parse_f64(key, v)?,
            "m_max" => {
                self.m_max = v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    detail: format!("`{v}` is not an integer"),
                })?
            }
            "fold_tol" => self.fold_tol = parse_f64(key, v)?,
            "quad_tol" => self.quad_tol = parse_f64(key, v)?,
            "lambda_cut" => {
                self.lambda_cut = if v.is_empty() { None } else { Some(parse_f64(key, v)?) }
            }
            "im_cap" => self.im_cap = parse_f64(key, v)?,
            "res_min" => self.res_min = parse_f64(key, v)?,
            "im_max" => self.im_max = parse_f64(key, v)?,
            "doublet_radius" => self.doublet_radius = parse_f64(key, v)?,
            "match_radius" => self.match_radius = parse_f64(key, v)?,
            "offset_mev" => self.offset_mev = parse_f64(key, v)?,
            "jmax_warn" => {
                self.jmax_warn = v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    detail: format!("`{v}` is not an integer"),
                })?
            }
            "threads" => {
                self.threads = if v.is_empty() {
                    None
                } else {
                    Some(v.parse().map_err(|_| ConfigError::BadValue {
                        key: key.to_string(),
                        detail: format!("`{v}` is not an integer"),
                    })?)
                }
            }
            "fit_window" => {
                self.fit_window = if v.is_empty() { None } else { Some(parse_window(key, v)?) }
            }
            "ce_j" => self.ce_j = if v.is_empty() { None } else { Some(parse_j_list(v)?) },
            "decompose_theta_deg" => self.decompose_theta_deg = parse_f64(key, v)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
        }
        self.validate()
    }

    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::MalformedLine {
                line,
                text: content.to_string(),
            })?;
            cfg.apply_key(key.trim(), value, line)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::from_str_config(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&str, f64); 8] = [
            ("phi_step_deg", self.phi_step_deg),
            ("fold_tol", self.fold_tol),
            ("quad_tol", self.quad_tol),
            ("im_cap", self.im_cap),
            ("im_max", self.im_max),
            ("doublet_radius", self.doublet_radius),
            ("match_radius", self.match_radius),
            ("decompose_theta_deg", self.decompose_theta_deg),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::BadValue {
                    key: key.to_string(),
                    detail: format!("must be positive and finite, got {v}"),
                });
            }
        }
        if self.res_min < 0.0 || !self.res_min.is_finite() {
            return Err(ConfigError::BadValue {
                key: "res_min".to_string(),
                detail: format!("must be non-negative, got {}", self.res_min),
            });
        }
        if self.m_max < 0 {
            return Err(ConfigError::BadValue {
                key: "m_max".to_string(),
                detail: format!("must be >= 0, got {}", self.m_max),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid_defaults() {
        let cfg = RunConfig::from_str_config("").unwrap();
        assert_eq!(cfg.m_max, 2);
        assert_eq!(cfg.theta_grid, "5:175:5");
        assert_eq!(cfg.out, PathBuf::from("out"));
        assert!(cfg.input.is_none());
        assert!((cfg.fold_tol - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn parses_keys_comments_and_blanks() {
        let text = "\n# a comment\n  m_max = 4   # trailing\ninput= table.csv\nfit_window = 60:140\nce_j = 12..14\nthreads = 3\nlambda_cut = 25.5\n";
        let cfg = RunConfig::from_str_config(text).unwrap();
        assert_eq!(cfg.m_max, 4);
        assert_eq!(cfg.input.as_deref(), Some(Path::new("table.csv")));
        assert_eq!(cfg.fit_window, Some((60.0, 140.0)));
        assert_eq!(cfg.ce_j.as_deref(), Some(&[12, 13, 14][..]));
        assert_eq!(cfg.threads, Some(3));
        assert_eq!(cfg.lambda_cut, Some(25.5));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            RunConfig::from_str_config("no_such_key = 1"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::from_str_config("just words"),
            Err(ConfigError::MalformedLine { .. })
        ));
        assert!(matches!(
            RunConfig::from_str_config("quad_tol = -1"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            RunConfig::from_str_config("m_max = x"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn j_list_forms() {
        assert_eq!(parse_j_list("12..15").unwrap(), vec![12, 13, 14, 15]);
        assert_eq!(parse_j_list("3,5, 9").unwrap(), vec![3, 5, 9]);
        assert!(parse_j_list("15..12").is_err());
        assert!(parse_j_list("a,b").is_err());
    }
}
