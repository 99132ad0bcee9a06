//! Partial-wave S-matrix tables: types, validation, and CSV/JSON round-trip I/O.
//!
//! A table holds S^J(E) for J = 0..=J_max on a strictly increasing energy grid,
//! one wavenumber per energy. The CSV layout is
//!
//! ```text
//! # transition: vi ji Oi -> vf jf Of
//! # jmax: <int>
//! E_meV,k,J,Re_S,Im_S
//! ...rows sorted by (E, J)
//! ```
//!
//! Floats are written with shortest round-trip formatting, so save/load cycles
//! reproduce the table bit-for-bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Rovibrational transition label. Only Omega_i = Omega_f = 0 transitions are
/// representable by this toolkit; construction rejects anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionLabel {
    pub vi: u32,
    pub ji: u32,
    pub omega_i: u32,
    pub vf: u32,
    pub jf: u32,
    pub omega_f: u32,
}

impl TransitionLabel {
    pub fn new(
        vi: u32,
        ji: u32,
        omega_i: u32,
        vf: u32,
        jf: u32,
        omega_f: u32,
    ) -> Result<Self, SmatrixError> {
        if omega_i != 0 || omega_f != 0 {
            return Err(SmatrixError::UnsupportedTable {
                detail: format!(
                    "only Omega = 0 transitions are supported, got Omega_i={omega_i}, Omega_f={omega_f}"
                ),
            });
        }
        Ok(Self { vi, ji, omega_i, vf, jf, omega_f })
    }
}

impl std::fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {} -> {} {} {}",
            self.vi, self.ji, self.omega_i, self.vf, self.jf, self.omega_f
        )
    }
}

#[derive(Debug, Error)]
pub enum SmatrixError {
    #[error("malformed row at line {line}: {detail}")]
    MalformedRow { line: usize, detail: String },
    #[error("energies not strictly increasing at index {index}: {prev} then {next}")]
    NonMonotonicEnergy { index: usize, prev: f64, next: f64 },
    #[error("missing partial wave J={j} at E={e_mev} meV")]
    MissingJ { e_mev: f64, j: usize },
    #[error("unitarity violation at E={e_mev} meV, J={j}: |S|={smod} exceeds 1+{tol}")]
    UnitarityViolation { e_mev: f64, j: usize, smod: f64, tol: f64 },
    #[error("index out of range: {detail}")]
    IndexOutOfRange { detail: String },
    #[error("unsupported table: {detail}")]
    UnsupportedTable { detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Default slack above |S| = 1 tolerated before a unitarity violation is raised.
pub const UNITARITY_TOL: f64 = 1e-6;

/// Tabulated S^J(E) with one wavenumber per energy.
///
/// Invariants (enforced by [`PartialWaveTable::validate`], which every loader
/// and constructor calls): energies strictly increasing, k > 0, a complete
/// J = 0..=J_max block per energy, |S| <= 1 + tol, J_max >= 8.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialWaveTable {
    pub transition: TransitionLabel,
    pub energies_mev: Vec<f64>,
    pub k: Vec<f64>,
    pub jmax: usize,
    /// Row-major: s[energy_index][J]
    pub s: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    transition: TransitionLabel,
    energies_mev: Vec<f64>,
    k: Vec<f64>,
    jmax: usize,
    s_re: Vec<Vec<f64>>,
    s_im: Vec<Vec<f64>>,
}

impl PartialWaveTable {
    pub fn new(
        transition: TransitionLabel,
        energies_mev: Vec<f64>,
        k: Vec<f64>,
        jmax: usize,
        s: Vec<Vec<Complex64>>,
    ) -> Result<Self, SmatrixError> {
        let t = Self { transition, energies_mev, k, jmax, s };
        t.validate(UNITARITY_TOL)?;
        Ok(t)
    }

    pub fn n_energies(&self) -> usize {
        self.energies_mev.len()
    }

    /// Half-integer CAM abscissae lambda_J = J + 1/2 for J = 0..=J_max.
    pub fn lambdas(&self) -> Vec<f64> {
        (0..=self.jmax).map(|j| j as f64 + 0.5).collect()
    }

    pub fn validate(&self, unitarity_tol: f64) -> Result<(), SmatrixError> {
        if self.transition.omega_i != 0 || self.transition.omega_f != 0 {
            return Err(SmatrixError::UnsupportedTable {
                detail: "only Omega = 0 transitions are supported".into(),
            });
        }
        if self.jmax < 8 {
            return Err(SmatrixError::UnsupportedTable {
                detail: format!("J_max = {} is below the minimum of 8", self.jmax),
            });
        }
        if self.energies_mev.is_empty() {
            return Err(SmatrixError::UnsupportedTable { detail: "empty energy grid".into() });
        }
        if self.k.len() != self.energies_mev.len() || self.s.len() != self.energies_mev.len() {
            return Err(SmatrixError::UnsupportedTable {
                detail: "k and S blocks must match the energy grid length".into(),
            });
        }
        for i in 1..self.energies_mev.len() {
            if self.energies_mev[i] <= self.energies_mev[i - 1] {
                return Err(SmatrixError::NonMonotonicEnergy {
                    index: i,
                    prev: self.energies_mev[i - 1],
                    next: self.energies_mev[i],
                });
            }
        }
        for (i, &kv) in self.k.iter().enumerate() {
            if !(kv > 0.0) || !kv.is_finite() {
                return Err(SmatrixError::UnsupportedTable {
                    detail: format!("k must be positive and finite, got {kv} at E index {i}"),
                });
            }
        }
        for (i, row) in self.s.iter().enumerate() {
            if row.len() != self.jmax + 1 {
                let j = row.len(); // first absent J
                return Err(SmatrixError::MissingJ { e_mev: self.energies_mev[i], j });
            }
            for (j, sv) in row.iter().enumerate() {
                let smod = sv.norm();
                if !smod.is_finite() {
                    return Err(SmatrixError::UnsupportedTable {
                        detail: format!("non-finite S at E index {i}, J={j}"),
                    });
                }
                if smod > 1.0 + unitarity_tol {
                    return Err(SmatrixError::UnitarityViolation {
                        e_mev: self.energies_mev[i],
                        j,
                        smod,
                        tol: unitarity_tol,
                    });
                }
            }
        }
        Ok(())
    }

    /// Advisory messages that do not block loading (small J_max, short energy grids).
    pub fn warnings(&self, jmax_warn: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.jmax < jmax_warn {
            out.push(format!(
                "J_max = {} is small (below {}); continuation into the CAM plane will be poorly constrained",
                self.jmax, jmax_warn
            ));
        }
        if self.energies_mev.len() < 4 {
            out.push(format!(
                "only {} energies tabulated; energy-axis analysis needs at least 4",
                self.energies_mev.len()
            ));
        }
        out
    }

    /// (lambda_J, S^J) pairs at one tabulated energy.
    pub fn slice_at_energy(&self, index: usize) -> Result<Vec<(f64, Complex64)>, SmatrixError> {
        if index >= self.energies_mev.len() {
            return Err(SmatrixError::IndexOutOfRange {
                detail: format!("energy index {index} >= {}", self.energies_mev.len()),
            });
        }
        Ok(self.s[index]
            .iter()
            .enumerate()
            .map(|(j, &sv)| (j as f64 + 0.5, sv))
            .collect())
    }

    /// (E, S^J) pairs at one partial wave across the energy grid.
    pub fn slice_at_j(&self, j: usize) -> Result<Vec<(f64, Complex64)>, SmatrixError> {
        if j > self.jmax {
            return Err(SmatrixError::IndexOutOfRange {
                detail: format!("J = {j} > J_max = {}", self.jmax),
            });
        }
        Ok(self
            .energies_mev
            .iter()
            .zip(&self.s)
            .map(|(&e, row)| (e, row[j]))
            .collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# transition: {}", self.transition);
        let _ = writeln!(out, "# jmax: {}", self.jmax);
        out.push_str("E_meV,k,J,Re_S,Im_S\n");
        for (i, &e) in self.energies_mev.iter().enumerate() {
            for (j, sv) in self.s[i].iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", e, self.k[i], j, sv.re, sv.im);
            }
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), SmatrixError> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn from_csv_string(text: &str) -> Result<Self, SmatrixError> {
        let mut transition: Option<TransitionLabel> = None;
        let mut jmax: Option<usize> = None;
        // rows grouped by energy in order of first appearance
        let mut energies: Vec<f64> = Vec::new();
        let mut ks: Vec<f64> = Vec::new();
        let mut blocks: Vec<Vec<(usize, Complex64)>> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(t) = rest.strip_prefix("transition:") {
                    transition = Some(parse_transition(t.trim()).ok_or_else(|| {
                        SmatrixError::MalformedRow {
                            line: lineno,
                            detail: format!("bad transition header: {t}"),
                        }
                    })?);
                } else if let Some(t) = rest.strip_prefix("jmax:") {
                    jmax = Some(t.trim().parse().map_err(|_| SmatrixError::MalformedRow {
                        line: lineno,
                        detail: format!("bad jmax header: {t}"),
                    })?);
                }
                continue;
            }
            // tolerate (and skip) a column-name header row
            if line.starts_with("E_meV") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(SmatrixError::MalformedRow {
                    line: lineno,
                    detail: format!("expected 5 comma-separated fields, got {}", fields.len()),
                });
            }
            let parse_f = |s: &str, what: &str| -> Result<f64, SmatrixError> {
                s.parse().map_err(|_| SmatrixError::MalformedRow {
                    line: lineno,
                    detail: format!("bad {what}: {s}"),
                })
            };
            let e = parse_f(fields[0], "E_meV")?;
            let k = parse_f(fields[1], "k")?;
            let j: usize = fields[2].parse().map_err(|_| SmatrixError::MalformedRow {
                line: lineno,
                detail: format!("bad J: {}", fields[2]),
            })?;
            let re = parse_f(fields[3], "Re_S")?;
            let im = parse_f(fields[4], "Im_S")?;
            let is_new = match energies.last() {
                Some(&last) => e != last,
                None => true,
            };
            if is_new {
                if energies.contains(&e) {
                    // revisiting an earlier energy means rows are not sorted by (E, J)
                    return Err(SmatrixError::MalformedRow {
                        line: lineno,
                        detail: format!("rows not grouped by energy (E={e} reappears)"),
                    });
                }
                energies.push(e);
                ks.push(k);
                blocks.push(Vec::new());
            } else if ks.last() != Some(&k) {
                return Err(SmatrixError::MalformedRow {
                    line: lineno,
                    detail: format!("inconsistent k within E={e} block"),
                });
            }
            blocks.last_mut().unwrap().push((j, Complex64::new(re, im)));
        }

        let transition = transition.ok_or(SmatrixError::MalformedRow {
            line: 0,
            detail: "missing '# transition:' header".into(),
        })?;
        let jmax = jmax.ok_or(SmatrixError::MalformedRow {
            line: 0,
            detail: "missing '# jmax:' header".into(),
        })?;

        let mut s = Vec::with_capacity(blocks.len());
        for (bi, block) in blocks.iter().enumerate() {
            let mut row = vec![None; jmax + 1];
            for &(j, v) in block {
                if j > jmax {
                    return Err(SmatrixError::IndexOutOfRange {
                        detail: format!("J={j} exceeds declared jmax={jmax} at E={}", energies[bi]),
                    });
                }
                row[j] = Some(v);
            }
            let mut filled = Vec::with_capacity(jmax + 1);
            for (j, v) in row.into_iter().enumerate() {
                match v {
                    Some(v) => filled.push(v),
                    None => {
                        return Err(SmatrixError::MissingJ { e_mev: energies[bi], j });
                    }
                }
            }
            s.push(filled);
        }

        Self::new(transition, energies, ks, jmax, s)
    }

    pub fn load_csv(path: &Path) -> Result<Self, SmatrixError> {
        Self::from_csv_string(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String, SmatrixError> {
        let j = TableJson {
            transition: self.transition,
            energies_mev: self.energies_mev.clone(),
            k: self.k.clone(),
            jmax: self.jmax,
            s_re: self.s.iter().map(|r| r.iter().map(|c| c.re).collect()).collect(),
            s_im: self.s.iter().map(|r| r.iter().map(|c| c.im).collect()).collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<(), SmatrixError> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn from_json_string(text: &str) -> Result<Self, SmatrixError> {
        let j: TableJson = serde_json::from_str(text)?;
        let s = j
            .s_re
            .iter()
            .zip(&j.s_im)
            .map(|(re, im)| {
                re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect::<Vec<_>>()
            })
            .collect();
        Self::new(j.transition, j.energies_mev, j.k, j.jmax, s)
    }

    pub fn load_json(path: &Path) -> Result<Self, SmatrixError> {
        Self::from_json_string(&std::fs::read_to_string(path)?)
    }

    /// Load by extension: `.json` as JSON, anything else as CSV.
    pub fn load(path: &Path) -> Result<Self, SmatrixError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::load_json(path),
            _ => Self::load_csv(path),
        }
    }
}

fn parse_transition(text: &str) -> Option<TransitionLabel> {
    // "vi ji Oi -> vf jf Of"
    let (lhs, rhs) = text.split_once("->")?;
    let l: Vec<u32> = lhs.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
    let r: Vec<u32> = rhs.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
    if l.len() != 3 || r.len() != 3 {
        return None;
    }
    TransitionLabel::new(l[0], l[1], l[2], r[0], r[1], r[2]).ok()
}
