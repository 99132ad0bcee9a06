//! Synthetic S-matrix generator with an exact pole/residue ledger.
//!
//! Models are built from a real decaying background amplitude profile, a real
//! polynomial phase, and unit-circle-compatible pole/zero factors:
//!
//! ```text
//! S(lambda, E) = a(lambda) e^{2 i delta(lambda)}
//!                * prod_poles (lambda - (p - s (p - conj p))) / (lambda - p)
//!                * prod_zeros (lambda - z) / (lambda - conj z)
//! ```
//!
//! with p = alpha + beta E (+ gamma E^2 for curved trajectories) and strength
//! s in (0, 1]. On the real axis each pole factor has modulus <= 1 and each
//! zero factor modulus exactly 1, so |S| never exceeds the background peak —
//! generated tables always satisfy the unitarity bound when `peak <= 1`.
//!
//! Every pole of S — resonance poles, the background window poles, and the
//! lower-half mirror poles introduced by zero factors — has a closed-form
//! residue, recorded in the ledger that `generate` produces alongside the
//! table. That ledger is the ground truth the extraction pipeline is tested
//! against.

use crate::smatrix::{PartialWaveTable, SmatrixError, TransitionLabel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("pole {index} sits on the real axis at E={e_mev} meV (lambda0 = {lambda0})")]
    PoleOnRealAxis { index: usize, e_mev: f64, lambda0: Complex64 },
    #[error("zero {index} sits on the real axis at E={e_mev} meV")]
    ZeroOnRealAxis { index: usize, e_mev: f64 },
    #[error("index out of range: {detail}")]
    IndexOutOfRange { detail: String },
    #[error("strength of pole {index} must be in (0, 1], got {strength}")]
    InvalidStrength { index: usize, strength: f64 },
    #[error("invalid model: {detail}")]
    InvalidModel { detail: String },
    #[error(transparent)]
    Table(#[from] SmatrixError),
}

/// Real decaying amplitude profile a(lambda), normalized so its real-axis peak
/// equals the model's `peak`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BackgroundProfile {
    /// A lambda^2 (edge - lambda)^2 / prod_k ((lambda - center)^2 + width_k^2).
    /// Exactly rational, so the continued-fraction continuation of a generated
    /// table reproduces the model to machine precision.
    RationalWindow { center: f64, widths: Vec<f64>, edge: f64 },
    /// A e^{-((lambda - center)/width)^2}. Entire (no background poles), used
    /// where a pole-free background is wanted; not rational, so recovery of
    /// generated tables is limited by interpolation misfit rather than exact.
    Gaussian { center: f64, width: f64 },
}

/// Complex-linear (optionally quadratic) Regge trajectory carrying one pole.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoleSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
    #[serde(default)]
    pub gamma: Complex64,
    /// Residue strength s in (0, 1]: the factor's zero sits at p - 2 i s Im p.
    pub strength: f64,
}

impl PoleSpec {
    pub fn position(&self, e_mev: f64) -> Complex64 {
        self.alpha + self.beta * e_mev + self.gamma * e_mev * e_mev
    }
}

/// Complex-linear trajectory of an S-matrix zero (upper half-plane).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ZeroSpec {
    pub fn position(&self, e_mev: f64) -> Complex64 {
        self.alpha + self.beta * e_mev
    }
}

/// Wavenumber model for the generated table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum KSpec {
    Constant(f64),
    /// k = coeff * sqrt(E_meV)
    SqrtEnergy { coeff: f64 },
}

impl KSpec {
    pub fn at(&self, e_mev: f64) -> f64 {
        match self {
            KSpec::Constant(v) => *v,
            KSpec::SqrtEnergy { coeff } => coeff * e_mev.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticModel {
    pub jmax: usize,
    pub energies_mev: Vec<f64>,
    pub k: KSpec,
    pub background: BackgroundProfile,
    /// Real-axis peak of |S| (background normalization target).
    pub peak: f64,
    /// Polynomial coefficients of delta(lambda): delta = sum_i phase[i] lambda^i.
    /// Degree 0 keeps S exactly rational for RationalWindow backgrounds.
    pub phase: Vec<f64>,
    pub poles: Vec<PoleSpec>,
    pub zeros: Vec<ZeroSpec>,
}

/// Where a ledger pole comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LedgerKind {
    /// A pole carried by a [`PoleSpec`] trajectory.
    Resonance,
    /// A background window pole (RationalWindow profiles only).
    Window,
    /// The lower-half mirror pole of a [`ZeroSpec`] factor.
    MirrorZero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerPole {
    pub kind: LedgerKind,
    pub position: Complex64,
    pub residue: Complex64,
}

/// Exact pole/zero data of the model at one energy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerAtEnergy {
    pub e_mev: f64,
    pub k: f64,
    pub poles: Vec<LedgerPole>,
    pub zeros: Vec<Complex64>,
}

/// Exact model data across the energy grid, written as `.ledger.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ledger {
    pub jmax: usize,
    pub entries: Vec<LedgerAtEnergy>,
    pub trajectories: Vec<PoleSpec>,
}

impl SyntheticModel {
    fn normalization(&self) -> f64 {
        let grid_n = 2001;
        let mut peak = 0.0f64;
        for i in 0..grid_n {
            let lam =
                0.5 + (self.jmax as f64) * i as f64 / (grid_n - 1) as f64;
            peak = peak.max(self.profile_raw(Complex64::new(lam, 0.0)).norm());
        }
        self.peak / peak
    }

    fn profile_raw(&self, lam: Complex64) -> Complex64 {
        match &self.background {
            BackgroundProfile::RationalWindow { center, widths, edge } => {
                let mut den = Complex64::new(1.0, 0.0);
                for &d in widths {
                    den *= (lam - center) * (lam - center) + d * d;
                }
                lam * lam * (edge - lam) * (edge - lam) / den
            }
            BackgroundProfile::Gaussian { center, width } => {
                let u = (lam - center) / *width;
                (-u * u).exp()
            }
        }
    }

    fn phase_factor(&self, lam: Complex64) -> Complex64 {
        let mut delta = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for &c in &self.phase {
            delta += c * pw;
            pw *= lam;
        }
        (Complex64::new(0.0, 2.0) * delta).exp()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.jmax < 8 {
            return Err(SynthError::InvalidModel {
                detail: format!("jmax = {} below the minimum of 8", self.jmax),
            });
        }
        if self.energies_mev.is_empty() {
            return Err(SynthError::InvalidModel { detail: "no energies".into() });
        }
        if !(self.peak > 0.0) {
            return Err(SynthError::InvalidModel {
                detail: format!("peak must be positive, got {}", self.peak),
            });
        }
        for (i, p) in self.poles.iter().enumerate() {
            if !(p.strength > 0.0 && p.strength <= 1.0) {
                return Err(SynthError::InvalidStrength { index: i, strength: p.strength });
            }
            for &e in &self.energies_mev {
                let pos = p.position(e);
                if pos.im.abs() < 1e-12 {
                    return Err(SynthError::PoleOnRealAxis { index: i, e_mev: e, lambda0: pos });
                }
            }
        }
        for (i, z) in self.zeros.iter().enumerate() {
            for &e in &self.energies_mev {
                if z.position(e).im.abs() < 1e-12 {
                    return Err(SynthError::ZeroOnRealAxis { index: i, e_mev: e });
                }
            }
        }
        Ok(())
    }

    /// Closed-form S(lambda, E).
    pub fn eval(&self, lam: Complex64, e_mev: f64) -> Complex64 {
        let mut s = self.normalization() * self.profile_raw(lam) * self.phase_factor(lam);
        for p in &self.poles {
            let q = p.position(e_mev);
            let zero = q - p.strength * (q - q.conj());
            s *= (lam - zero) / (lam - q);
        }
        for z in &self.zeros {
            let zq = z.position(e_mev);
            s *= (lam - zq) / (lam - zq.conj());
        }
        s
    }

    /// Closed-form residue of the `index`-th resonance pole at energy `e_mev`.
    pub fn exact_residue(&self, index: usize, e_mev: f64) -> Result<Complex64, SynthError> {
        if index >= self.poles.len() {
            return Err(SynthError::IndexOutOfRange {
                detail: format!("pole index {index} >= {}", self.poles.len()),
            });
        }
        let p = self.poles[index].position(e_mev);
        let s = self.poles[index].strength;
        let mut rest = self.normalization() * self.profile_raw(p) * self.phase_factor(p);
        for (j, other) in self.poles.iter().enumerate() {
            if j == index {
                continue;
            }
            let q = other.position(e_mev);
            let zero = q - other.strength * (q - q.conj());
            rest *= (p - zero) / (p - q);
        }
        for z in &self.zeros {
            let zq = z.position(e_mev);
            rest *= (p - zq) / (p - zq.conj());
        }
        Ok(s * (p - p.conj()) * rest)
    }

    /// Exact poles (all kinds), residues, and zeros at one energy.
    pub fn ledger_at(&self, e_mev: f64) -> Result<LedgerAtEnergy, SynthError> {
        self.validate()?;
        let norm = self.normalization();
        let mut poles = Vec::new();
        for (i, _) in self.poles.iter().enumerate() {
            poles.push(LedgerPole {
                kind: LedgerKind::Resonance,
                position: self.poles[i].position(e_mev),
                residue: self.exact_residue(i, e_mev)?,
            });
        }
        // factors of S other than the background profile, evaluated at lam
        let extras = |lam: Complex64| -> Complex64 {
            let mut v = self.phase_factor(lam);
            for p in &self.poles {
                let q = p.position(e_mev);
                let zero = q - p.strength * (q - q.conj());
                v *= (lam - zero) / (lam - q);
            }
            for z in &self.zeros {
                let zq = z.position(e_mev);
                v *= (lam - zq) / (lam - zq.conj());
            }
            v
        };
        if let BackgroundProfile::RationalWindow { center, widths, edge } = &self.background {
            for &dk in widths.iter() {
                for sign in [1.0, -1.0] {
                    let pw = Complex64::new(*center, sign * dk);
                    // d/dlambda of the window denominator product at pw:
                    // sum over l of 2(pw-c) prod_{m != l} ((pw-c)^2 + dm^2)
                    let mut dprod = Complex64::new(0.0, 0.0);
                    for l in 0..widths.len() {
                        let mut term = 2.0 * (pw - *center);
                        for (m, &dm) in widths.iter().enumerate() {
                            if m != l {
                                term *= (pw - *center) * (pw - *center) + dm * dm;
                            }
                        }
                        dprod += term;
                    }
                    let r = norm * pw * pw * (edge - pw) * (edge - pw) / dprod * extras(pw);
                    poles.push(LedgerPole { kind: LedgerKind::Window, position: pw, residue: r });
                }
            }
        }
        for (zi, z) in self.zeros.iter().enumerate() {
            let zq = z.position(e_mev);
            let mirror = zq.conj();
            // residue of the (lam - z)/(lam - conj z) factor's pole, times the rest of S
            let mut rest = norm * self.profile_raw(mirror) * self.phase_factor(mirror);
            for p in &self.poles {
                let q = p.position(e_mev);
                let zero = q - p.strength * (q - q.conj());
                rest *= (mirror - zero) / (mirror - q);
            }
            for (zj, other) in self.zeros.iter().enumerate() {
                let oq = other.position(e_mev);
                if zj == zi {
                    rest *= mirror - oq;
                } else {
                    rest *= (mirror - oq) / (mirror - oq.conj());
                }
            }
            poles.push(LedgerPole { kind: LedgerKind::MirrorZero, position: mirror, residue: rest });
        }
        let mut zeros: Vec<Complex64> = Vec::new();
        for p in &self.poles {
            let q = p.position(e_mev);
            zeros.push(q - p.strength * (q - q.conj()));
        }
        for z in &self.zeros {
            zeros.push(z.position(e_mev));
        }
        Ok(LedgerAtEnergy { e_mev, k: self.k.at(e_mev), poles, zeros })
    }

    pub fn ledger(&self) -> Result<Ledger, SynthError> {
        let entries = self
            .energies_mev
            .iter()
            .map(|&e| self.ledger_at(e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ledger { jmax: self.jmax, entries, trajectories: self.poles.clone() })
    }

    /// Evaluate the model on the half-integer lambda grid and package it as a
    /// validated table.
    pub fn generate(&self) -> Result<PartialWaveTable, SynthError> {
        self.validate()?;
        let k: Vec<f64> = self.energies_mev.iter().map(|&e| self.k.at(e)).collect();
        let s: Vec<Vec<Complex64>> = self
            .energies_mev
            .iter()
            .map(|&e| {
                (0..=self.jmax)
                    .map(|j| self.eval(Complex64::new(j as f64 + 0.5, 0.0), e))
                    .collect()
            })
            .collect();
        let table = PartialWaveTable::new(
            TransitionLabel::new(0, 0, 0, 0, 0, 0).expect("zero-Omega label"),
            self.energies_mev.clone(),
            k,
            self.jmax,
            s,
        )?;
        Ok(table)
    }

    /// Fixed-point solve of the pole strengths so the exact resonance residues
    /// hit `target_abs` in magnitude at `e_mev`.
    pub fn solve_strengths(&mut self, target_abs: &[f64], e_mev: f64) -> Result<(), SynthError> {
        if target_abs.len() != self.poles.len() {
            return Err(SynthError::IndexOutOfRange {
                detail: format!(
                    "{} targets for {} poles",
                    target_abs.len(),
                    self.poles.len()
                ),
            });
        }
        for _ in 0..8 {
            let current: Vec<f64> = (0..self.poles.len())
                .map(|i| self.exact_residue(i, e_mev).map(|r| r.norm()))
                .collect::<Result<_, _>>()?;
            for (i, (&tgt, cur)) in target_abs.iter().zip(current).enumerate() {
                let s = self.poles[i].strength * tgt / cur;
                self.poles[i].strength = s.clamp(1e-12, 1.0);
            }
        }
        Ok(())
    }
}

/// Models with measured, pinned behavior; used by the test batteries and
/// exposed through the CLI `synth --preset` flag.
pub mod presets {
    use super::*;

    /// Preset names accepted by [`by_name`], in listing order.
    pub fn names() -> &'static [&'static str] {
        &[
            "fold_j20_0p",
            "fold_j20_1p",
            "fold_j20_2p",
            "fold_j40_2p",
            "fold_j40_3p",
            "extraction_one_pole",
            "extraction_two_pole",
            "tail_single_pole",
            "decomposition_two_pole",
            "trajectory_linear",
            "trajectory_curved",
            "drift_complex_beta",
            "trajectory_offset_13",
        ]
    }

    pub fn by_name(name: &str) -> Option<SyntheticModel> {
        Some(match name {
            "fold_j20_0p" => fold_j20_0p(),
            "fold_j20_1p" => fold_j20_1p(),
            "fold_j20_2p" => fold_j20_2p(),
            "fold_j40_2p" => fold_j40_2p(),
            "fold_j40_3p" => fold_j40_3p(),
            "extraction_one_pole" => extraction_one_pole(),
            "extraction_two_pole" => extraction_two_pole(),
            "tail_single_pole" => tail_single_pole(0.95),
            "decomposition_two_pole" => decomposition_two_pole(),
            "trajectory_linear" => trajectory_linear(),
            "trajectory_curved" => trajectory_curved(),
            "drift_complex_beta" => drift_complex_beta(),
            "trajectory_offset_13" => trajectory_offset_13(),
            _ => return None,
        })
    }

    fn window(
        jmax: usize,
        center: f64,
        widths: &[f64],
        edge: f64,
        poles: Vec<PoleSpec>,
        zeros: Vec<ZeroSpec>,
    ) -> SyntheticModel {
        SyntheticModel {
            jmax,
            energies_mev: vec![100.0],
            k: KSpec::Constant(1.0),
            background: BackgroundProfile::RationalWindow {
                center,
                widths: widths.to_vec(),
                edge,
            },
            peak: 0.8,
            phase: vec![0.4],
            poles,
            zeros,
        }
    }

    fn fixed_pole(re: f64, im: f64, strength: f64) -> PoleSpec {
        PoleSpec {
            alpha: Complex64::new(re, im),
            beta: Complex64::new(0.0, 0.0),
            gamma: Complex64::new(0.0, 0.0),
            strength,
        }
    }

    fn fixed_zero(re: f64, im: f64) -> ZeroSpec {
        ZeroSpec { alpha: Complex64::new(re, im), beta: Complex64::new(0.0, 0.0) }
    }

    /// Pole-free folding model, J_max = 20.
    pub fn fold_j20_0p() -> SyntheticModel {
        window(
            20,
            10.0,
            &[1.8, 2.0, 2.2, 2.4],
            21.2,
            vec![],
            vec![fixed_zero(9.0, 3.5), fixed_zero(13.0, 5.0)],
        )
    }

    /// One-pole folding model, J_max = 20.
    pub fn fold_j20_1p() -> SyntheticModel {
        window(
            20,
            10.0,
            &[1.8, 2.0, 2.2, 2.4],
            21.2,
            vec![fixed_pole(12.0, 0.9, 1.0)],
            vec![fixed_zero(14.0, 4.0)],
        )
    }

    /// Two-pole folding model, J_max = 20.
    pub fn fold_j20_2p() -> SyntheticModel {
        window(
            20,
            10.0,
            &[1.75, 1.95, 2.2, 2.45],
            21.2,
            vec![fixed_pole(11.2, 0.8, 1.0), fixed_pole(14.5, 1.7, 0.6)],
            vec![],
        )
    }

    /// Two-pole folding model, J_max = 40.
    pub fn fold_j40_2p() -> SyntheticModel {
        window(
            40,
            19.0,
            &[2.2, 2.9, 3.6, 4.3, 5.0],
            41.8,
            vec![fixed_pole(14.0, 1.1, 0.9), fixed_pole(24.0, 2.0, 0.5)],
            vec![fixed_zero(20.0, 5.0)],
        )
    }

    /// Three-pole folding model, J_max = 40.
    pub fn fold_j40_3p() -> SyntheticModel {
        window(
            40,
            19.0,
            &[2.2, 2.9, 3.6, 4.3, 5.0],
            41.8,
            vec![
                fixed_pole(13.0, 0.9, 1.0),
                fixed_pole(22.0, 1.6, 0.7),
                fixed_pole(30.0, 2.6, 0.4),
            ],
            vec![],
        )
    }

    /// One-pole extraction model: residue tuned to |r| = 1e-2 at 13 + 0.9i.
    pub fn extraction_one_pole() -> SyntheticModel {
        let mut m = window(
            40,
            19.0,
            &[4.3, 5.0, 5.7, 6.4],
            41.8,
            vec![fixed_pole(13.0, 0.9, 0.05)],
            vec![fixed_zero(24.0, 6.0)],
        );
        m.solve_strengths(&[1e-2], 100.0).expect("strength solve");
        m
    }

    /// Two-pole extraction model: residues tuned to 1e-2 at 13 + 0.9i and
    /// 1e-3 at 20 + 2.5i. The wide low window (center 6) keeps the pole-zero
    /// separations of both factors >= 0.15, which the residue conditioning
    /// needs.
    pub fn extraction_two_pole() -> SyntheticModel {
        let mut m = window(
            40,
            6.0,
            &[5.0, 5.7, 6.4, 7.1],
            41.8,
            vec![fixed_pole(13.0, 0.9, 0.05), fixed_pole(20.0, 2.5, 0.02)],
            vec![],
        );
        m.solve_strengths(&[1e-2, 1e-3], 100.0).expect("strength solve");
        m
    }

    /// Gaussian-background single-pole model for tail-asymptote studies;
    /// `im` sets Im(lambda) of the pole.
    pub fn tail_single_pole(im: f64) -> SyntheticModel {
        SyntheticModel {
            jmax: 40,
            energies_mev: vec![100.0],
            k: KSpec::Constant(1.0),
            background: BackgroundProfile::Gaussian { center: 19.0, width: 5.5 },
            peak: 0.8,
            phase: vec![0.4],
            poles: vec![fixed_pole(12.5, im, 0.6)],
            zeros: vec![],
        }
    }

    /// Two upper poles with long tails, for endpoint decomposition studies.
    pub fn decomposition_two_pole() -> SyntheticModel {
        window(
            40,
            19.0,
            &[2.2, 2.9, 3.6, 4.3, 5.0],
            41.8,
            vec![fixed_pole(12.5, 0.55, 0.8), fixed_pole(16.0, 0.85, 0.6)],
            vec![],
        )
    }

    /// Multi-energy model with one complex-linear trajectory
    /// lambda_0(E) = (10 + 0.95i) + 0.03 E: at E = 100 meV the pole sits at
    /// 13 + 0.95i, and the E-plane pole for integer J lies at
    /// (J + 1/2 - alpha) / beta, inside the sampled window for J = 12..17.
    pub fn trajectory_linear() -> SyntheticModel {
        let mut m = window(
            40,
            19.0,
            &[4.3, 5.0, 5.7, 6.4],
            41.8,
            vec![PoleSpec {
                alpha: Complex64::new(10.0, 0.95),
                beta: Complex64::new(0.03, 0.0),
                gamma: Complex64::new(0.0, 0.0),
                strength: 0.05,
            }],
            vec![fixed_zero(24.0, 6.0)],
        );
        m.energies_mev = (0..9).map(|i| 60.0 + 25.0 * i as f64).collect();
        m.solve_strengths(&[1e-2], 100.0).expect("strength solve");
        m
    }

    /// Same trajectory with a mild quadratic term, for curved-trajectory
    /// inversion studies (the curvature keeps a linear fit within a couple of
    /// percent in Re E over the window).
    pub fn trajectory_curved() -> SyntheticModel {
        let mut m = trajectory_linear();
        m.poles[0].gamma = Complex64::new(5e-6, 0.0);
        m
    }

    /// One pole at 12.99 + 0.95i when E = 62.09 meV, drifting with the
    /// complex slope 0.08 + 0.002i.
    pub fn drift_complex_beta() -> SyntheticModel {
        let beta = Complex64::new(0.08, 0.002);
        let alpha = Complex64::new(12.99, 0.95) - beta * 62.09;
        let mut m = window(
            40,
            19.0,
            &[4.3, 5.0, 5.7, 6.4],
            41.8,
            vec![PoleSpec { alpha, beta, gamma: Complex64::new(0.0, 0.0), strength: 0.05 }],
            vec![fixed_zero(24.0, 6.0)],
        );
        m.energies_mev = vec![50.0, 56.0, 62.09, 68.0, 74.0, 80.0];
        m.solve_strengths(&[1e-2], 62.09).expect("strength solve");
        m
    }

    /// Companion to [`trajectory_linear`] whose complex-energy poles sit
    /// 13 meV higher: alpha' = alpha - 13 beta.
    pub fn trajectory_offset_13() -> SyntheticModel {
        let mut m = trajectory_linear();
        let beta = m.poles[0].beta;
        m.poles[0].alpha -= beta * 13.0;
        m
    }
}
