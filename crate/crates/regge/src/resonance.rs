//! Per-pole tail amplitudes, tail-subtraction diagnostics, and the forward /
//! sideway / backward resonance decompositions of the DCS.
//!
//! A single pole lambda_n with residue r_n contributes the closed-form tails
//!
//! ```text
//! f~tail_n(phi) = 2 pi i sqrt(lambda_n) r_n e^{i lambda_n phi}
//! g~tail_n(phi) = 2 pi i       lambda_n r_n e^{i lambda_n phi}
//! ```
//!
//! valid for phi >= pi; below pi direct scattering and resonance decay are not
//! distinguished, so the decompositions label the m <= 0 fold terms as
//! undifferentiated background.

use crate::amplitudes::{
    fold_endpoint, winding_angle, AmplitudeError, Endpoint, FoldConfig, FoldedAmplitude,
    UnfoldedAmplitude, Weight,
};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum ResonanceError {
    #[error("pole at {position} is flagged spurious (Froissart doublet); tails are undefined for it")]
    SpuriousPole { position: Complex64 },
    #[error("theta={theta_rad} rad not present in the folded grid, or routed to an endpoint there")]
    ThetaNotFolded { theta_rad: f64 },
    #[error("pole list length {got} does not match the energy grid length {want}")]
    PoleListMismatch { got: usize, want: usize },
    #[error(transparent)]
    Amplitude(#[from] AmplitudeError),
}

/// Which closed-form tail: the sqrt(lambda)-weighted f~ kind or the
/// lambda-weighted g~ kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    FTail,
    GTail,
}

/// Single-pole tail amplitude, evaluable at any phi.
/// |tail(phi)| = |tail(0)| e^{-Im(lambda) phi} exactly.
#[derive(Debug, Clone, Copy)]
pub struct TailAmplitude {
    pub lambda: Complex64,
    pub residue: Complex64,
    pub kind: TailKind,
}

impl TailAmplitude {
    pub fn new(lambda: Complex64, residue: Complex64, kind: TailKind) -> Self {
        Self { lambda, residue, kind }
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let weight = match self.kind {
            TailKind::FTail => self.lambda.sqrt(),
            TailKind::GTail => self.lambda,
        };
        2.0 * PI * I * weight * self.residue * (I * self.lambda * phi).exp()
    }
}

/// Closed-form tail of one extracted pole. Spurious poles are rejected.
pub fn tail(pole: &crate::pade::PoleInfo, kind: TailKind, phi: f64) -> Result<Complex64, ResonanceError> {
    if pole.spurious {
        return Err(ResonanceError::SpuriousPole { position: pole.position });
    }
    Ok(TailAmplitude::new(pole.position, pole.residue, kind).eval(phi))
}

fn tail_sum(poles: &[(Complex64, Complex64)], kind: TailKind, phi: f64) -> Complex64 {
    poles
        .iter()
        .map(|&(p, r)| TailAmplitude::new(p, r, kind).eval(phi))
        .sum()
}

/// Residual surfaces delta|f~| and delta|g~| after subtracting the coherent
/// pole tails for phi >= phi_min, with per-energy max / RMS statistics taken
/// over the phi >= phi_min part of the grid.
#[derive(Debug, Clone)]
pub struct ResidualSurface {
    pub phi: Vec<f64>,
    pub energies_mev: Vec<f64>,
    pub phi_min: f64,
    /// delta_f[energy_index][phi_index] = |f~| - |sum of tails| (step-gated)
    pub delta_f: Vec<Vec<f64>>,
    pub delta_g: Vec<Vec<f64>>,
    pub max_f: Vec<f64>,
    pub rms_f: Vec<f64>,
    pub max_g: Vec<f64>,
    pub rms_g: Vec<f64>,
}

/// delta|f~|(phi, E) = |f~| - |sum_n f~tail_n| * step(phi - phi_min), and the
/// same for g~. An empty pole list leaves the magnitudes untouched.
pub fn subtract_tails(
    unfolded: &UnfoldedAmplitude,
    poles_per_energy: &[Vec<(Complex64, Complex64)>],
    phi_min: f64,
) -> Result<ResidualSurface, ResonanceError> {
    let ne = unfolded.energies_mev.len();
    if poles_per_energy.len() != ne {
        return Err(ResonanceError::PoleListMismatch { got: poles_per_energy.len(), want: ne });
    }
    let mut delta_f = Vec::with_capacity(ne);
    let mut delta_g = Vec::with_capacity(ne);
    let mut stats = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for ei in 0..ne {
        let poles = &poles_per_energy[ei];
        let mut df = Vec::with_capacity(unfolded.phi.len());
        let mut dg = Vec::with_capacity(unfolded.phi.len());
        let (mut mf, mut sf, mut mg, mut sg, mut n) = (0.0f64, 0.0, 0.0f64, 0.0, 0usize);
        for (pi, &ph) in unfolded.phi.iter().enumerate() {
            let gate = ph >= phi_min;
            let tf = if gate { tail_sum(poles, TailKind::FTail, ph).norm() } else { 0.0 };
            let tg = if gate { tail_sum(poles, TailKind::GTail, ph).norm() } else { 0.0 };
            let vf = unfolded.f[ei][pi].norm() - tf;
            let vg = unfolded.g[ei][pi].norm() - tg;
            df.push(vf);
            dg.push(vg);
            if gate {
                mf = mf.max(vf.abs());
                mg = mg.max(vg.abs());
                sf += vf * vf;
                sg += vg * vg;
                n += 1;
            }
        }
        let n = n.max(1) as f64;
        stats.0.push(mf);
        stats.1.push((sf / n).sqrt());
        stats.2.push(mg);
        stats.3.push((sg / n).sqrt());
        delta_f.push(df);
        delta_g.push(dg);
    }
    Ok(ResidualSurface {
        phi: unfolded.phi.clone(),
        energies_mev: unfolded.energies_mev.clone(),
        phi_min,
        delta_f,
        delta_g,
        max_f: stats.0,
        rms_f: stats.1,
        max_g: stats.2,
        rms_g: stats.3,
    })
}

/// Which amplitude a decomposition report describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaTag {
    Forward,
    Backward,
    Sideway(f64),
}

impl std::fmt::Display for ThetaTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThetaTag::Forward => write!(f, "forward"),
            ThetaTag::Backward => write!(f, "backward"),
            ThetaTag::Sideway(th) => write!(f, "theta={}deg", th.to_degrees()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionTerm {
    pub label: String,
    pub value: Complex64,
}

/// One energy row of a decomposition: background terms, per-resonance terms,
/// the coherent total |sum|^2 (never the incoherent sum of squares), the exact
/// reference amplitude, and the DCS-level residual.
#[derive(Debug, Clone)]
pub struct EnergyDecomposition {
    pub e_mev: f64,
    pub background: Vec<DecompositionTerm>,
    pub resonance: Vec<DecompositionTerm>,
    pub coherent_total: Complex64,
    pub exact: Complex64,
    /// | |coherent_total|^2 - |exact|^2 |
    pub residual: f64,
}

impl EnergyDecomposition {
    fn new(
        e_mev: f64,
        background: Vec<DecompositionTerm>,
        resonance: Vec<DecompositionTerm>,
        exact: Complex64,
    ) -> Self {
        let coherent_total: Complex64 = background
            .iter()
            .chain(resonance.iter())
            .map(|t| t.value)
            .sum();
        let residual = (coherent_total.norm_sqr() - exact.norm_sqr()).abs();
        Self { e_mev, background, resonance, coherent_total, exact, residual }
    }

    /// Coherent partial sum of all background terms plus the first
    /// `n_resonances` resonance terms.
    pub fn coherent_prefix(&self, n_resonances: usize) -> Complex64 {
        self.background
            .iter()
            .map(|t| t.value)
            .chain(self.resonance.iter().take(n_resonances).map(|t| t.value))
            .sum()
    }

    /// DCS residual of the prefix approximation.
    pub fn prefix_residual(&self, n_resonances: usize) -> f64 {
        (self.coherent_prefix(n_resonances).norm_sqr() - self.exact.norm_sqr()).abs()
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub tag: ThetaTag,
    pub rows: Vec<EnergyDecomposition>,
}

impl DecompositionReport {
    /// Max over energies of the DCS residual when only the first
    /// `n_resonances` resonance terms are kept.
    pub fn max_prefix_residual(&self, n_resonances: usize) -> f64 {
        self.rows.iter().map(|r| r.prefix_residual(n_resonances)).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn peak_exact_dcs(&self) -> f64 {
        self.rows.iter().map(|r| r.exact.norm_sqr()).fold(0.0, f64::max)
    }

    /// CSV rows: one per term plus a coherent_total row per energy. The
    /// residual column carries the running coherent-prefix residual, so it
    /// shows how each added term moves the approximation.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("E_meV,theta_tag,term_label,re,im,abs2,exact_abs2,residual\n");
        for row in &self.rows {
            let exact2 = row.exact.norm_sqr();
            let mut running = Complex64::new(0.0, 0.0);
            for term in row.background.iter().chain(row.resonance.iter()) {
                running += term.value;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.e_mev,
                    self.tag,
                    term.label,
                    term.value.re,
                    term.value.im,
                    term.value.norm_sqr(),
                    exact2,
                    (running.norm_sqr() - exact2).abs()
                );
            }
            let _ = writeln!(
                out,
                "{},{},coherent_total,{},{},{},{},{}",
                row.e_mev,
                self.tag,
                row.coherent_total.re,
                row.coherent_total.im,
                row.coherent_total.norm_sqr(),
                exact2,
                row.residual
            );
        }
        out
    }
}

/// Forward decomposition: f(0, E) ~ -k^{-1} sum_n g~tail_n(pi), compared
/// against the exact endpoint fold. Pure tail approximation, no background
/// term; with an empty pole list the approximation is zero.
pub fn decompose_forward(
    unfolded: &UnfoldedAmplitude,
    poles_per_energy: &[Vec<(Complex64, Complex64)>],
    fold_cfg: &FoldConfig,
) -> Result<DecompositionReport, ResonanceError> {
    let ne = unfolded.energies_mev.len();
    if poles_per_energy.len() != ne {
        return Err(ResonanceError::PoleListMismatch { got: poles_per_energy.len(), want: ne });
    }
    let mut rows = Vec::with_capacity(ne);
    for ei in 0..ne {
        let k = unfolded.analyses[ei].k;
        let exact = fold_endpoint(unfolded, ei, Endpoint::Forward, fold_cfg)?;
        let resonance = poles_per_energy[ei]
            .iter()
            .enumerate()
            .map(|(n, &(p, r))| DecompositionTerm {
                label: format!("pole_{}", n + 1),
                value: -TailAmplitude::new(p, r, TailKind::GTail).eval(PI) / k,
            })
            .collect();
        rows.push(EnergyDecomposition::new(
            unfolded.energies_mev[ei],
            Vec::new(),
            resonance,
            exact,
        ));
    }
    Ok(DecompositionReport { tag: ThetaTag::Forward, rows })
}

/// Backward decomposition: f(pi, E) ~ (i k)^{-1} [ g~(0) - sum_n g~tail_n(2 pi) ],
/// with g~(0) taken from quadrature as the direct (background) term.
pub fn decompose_backward(
    unfolded: &UnfoldedAmplitude,
    poles_per_energy: &[Vec<(Complex64, Complex64)>],
    fold_cfg: &FoldConfig,
) -> Result<DecompositionReport, ResonanceError> {
    let ne = unfolded.energies_mev.len();
    if poles_per_energy.len() != ne {
        return Err(ResonanceError::PoleListMismatch { got: poles_per_energy.len(), want: ne });
    }
    let mut rows = Vec::with_capacity(ne);
    for ei in 0..ne {
        let k = unfolded.analyses[ei].k;
        let ik = I * k;
        let exact = fold_endpoint(unfolded, ei, Endpoint::Backward, fold_cfg)?;
        let (g0, _) = unfolded.eval_point(ei, 0.0, Weight::Lambda)?;
        let background = vec![DecompositionTerm { label: "direct_g0".into(), value: g0 / ik }];
        let resonance = poles_per_energy[ei]
            .iter()
            .enumerate()
            .map(|(n, &(p, r))| DecompositionTerm {
                label: format!("pole_{}", n + 1),
                value: -TailAmplitude::new(p, r, TailKind::GTail).eval(2.0 * PI) / ik,
            })
            .collect();
        rows.push(EnergyDecomposition::new(
            unfolded.energies_mev[ei],
            background,
            resonance,
            exact,
        ));
    }
    Ok(DecompositionReport { tag: ThetaTag::Backward, rows })
}

/// Sideway decomposition at an interior folded angle: background = the
/// retained m <= 0 fold terms, resonance terms = f~-kind tails at phi_1(theta)
/// carrying the m = 1 fold phase, compared against the exact folded total.
pub fn decompose_sideway(
    unfolded: &UnfoldedAmplitude,
    folded: &FoldedAmplitude,
    poles_per_energy: &[Vec<(Complex64, Complex64)>],
    theta_rad: f64,
) -> Result<DecompositionReport, ResonanceError> {
    let ne = unfolded.energies_mev.len();
    if poles_per_energy.len() != ne {
        return Err(ResonanceError::PoleListMismatch { got: poles_per_energy.len(), want: ne });
    }
    let ti = folded
        .thetas_rad
        .iter()
        .position(|&t| (t - theta_rad).abs() < 1e-12)
        .ok_or(ResonanceError::ThetaNotFolded { theta_rad })?;
    let mut rows = Vec::with_capacity(ne);
    for ei in 0..ne {
        let terms = &folded.terms[ei][ti];
        if terms.routed.is_some() {
            return Err(ResonanceError::ThetaNotFolded { theta_rad });
        }
        let k = unfolded.analyses[ei].k;
        let ik = I * k;
        let prefactor = 1.0 / (2.0 * PI * theta_rad.sin()).sqrt();
        let background: Vec<DecompositionTerm> = terms
            .per_m
            .iter()
            .filter(|&&(m, _)| m <= 0)
            .map(|&(m, v)| DecompositionTerm { label: format!("m_{m}"), value: v })
            .collect();
        let phi1 = winding_angle(1, theta_rad);
        let phase = Complex64::from_polar(1.0, -FRAC_PI_4 - FRAC_PI_2);
        let resonance = poles_per_energy[ei]
            .iter()
            .enumerate()
            .map(|(n, &(p, r))| DecompositionTerm {
                label: format!("pole_{}", n + 1),
                value: TailAmplitude::new(p, r, TailKind::FTail).eval(phi1) * phase * prefactor / ik,
            })
            .collect();
        rows.push(EnergyDecomposition::new(
            unfolded.energies_mev[ei],
            background,
            resonance,
            terms.total,
        ));
    }
    Ok(DecompositionReport { tag: ThetaTag::Sideway(theta_rad), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::{unfold, UnfoldConfig};
    use crate::synth;

    #[test]
    fn tail_exponential_law() {
        let lam = Complex64::new(13.0, 0.95);
        let r = Complex64::new(0.01, 0.0);
        let t = TailAmplitude::new(lam, r, TailKind::FTail);
        // |tail(pi)/tail(3 pi)| = e^{0.95 * 2 pi}
        let ratio = t.eval(PI).norm() / t.eval(3.0 * PI).norm();
        let want = (0.95 * 2.0 * PI).exp();
        assert!((ratio / want - 1.0).abs() < 1e-12);
        assert!((want - 391.1245462293824).abs() < 1e-9);
        // general law |tail(phi)| = |tail(0)| e^{-Im lambda phi}
        for &ph in &[0.5, 2.0, 7.0] {
            let want = t.eval(0.0).norm() * (-lam.im * ph).exp();
            assert!((t.eval(ph).norm() - want).abs() < 1e-12 * want);
        }
        // zero residue -> zero tail
        let t0 = TailAmplitude::new(lam, Complex64::new(0.0, 0.0), TailKind::GTail);
        assert_eq!(t0.eval(2.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spurious_pole_rejected() {
        let pole = crate::pade::PoleInfo {
            position: Complex64::new(10.0, 1.0),
            residue: Complex64::new(1e-9, 0.0),
            contour_residue: Complex64::new(1e-9, 0.0),
            crosscheck_rel: 0.0,
            spurious: true,
            significant: false,
            ill_conditioned: false,
        };
        assert!(matches!(
            tail(&pole, TailKind::FTail, PI),
            Err(ResonanceError::SpuriousPole { .. })
        ));
    }

    fn unfold_preset(model: &synth::SyntheticModel, step_deg: f64, m_max: i32) -> UnfoldedAmplitude {
        let table = model.generate().unwrap();
        let mut cfg = UnfoldConfig::covering_m(m_max);
        cfg.phi_step_deg = step_deg;
        unfold(&table, &cfg).unwrap()
    }

    #[test]
    fn single_pole_model_is_its_own_tail() {
        let model = synth::presets::tail_single_pole(0.95);
        let unfolded = unfold_preset(&model, 5.0, 2);
        let poles = unfolded.significant_pole_pairs();
        assert_eq!(poles[0].len(), 1, "expected exactly one significant pole");
        let res = subtract_tails(&unfolded, &poles, PI).unwrap();
        // residual over phi >= pi below 2% of |f~(pi)|
        let pi_idx = unfolded
            .phi
            .iter()
            .position(|&p| (p - PI).abs() < 1e-9)
            .expect("pi on the grid");
        let scale = unfolded.f[0][pi_idx].norm();
        assert!(res.max_f[0] < 0.02 * scale, "max {} vs scale {}", res.max_f[0], scale);
        // empty pole list leaves |f~| untouched
        let empty: Vec<Vec<(Complex64, Complex64)>> = vec![Vec::new(); 1];
        let res0 = subtract_tails(&unfolded, &empty, PI).unwrap();
        assert!((res0.delta_f[0][pi_idx] - unfolded.f[0][pi_idx].norm()).abs() < 1e-15);
    }

    #[test]
    fn tail_asymptote_improves_toward_real_axis() {
        // relative mismatch between quadrature g~(2 pi) and the closed-form
        // tail shrinks monotonically as the pole approaches the real axis
        // (residue magnitude pinned by the strength solver)
        let mut last = f64::INFINITY;
        for &im in &[1.4, 1.1, 0.8, 0.5] {
            let mut model = synth::presets::tail_single_pole(im);
            model.solve_strengths(&[1e-2], 100.0).unwrap();
            let table = model.generate().unwrap();
            let mut cfg = UnfoldConfig::covering_m(2);
            cfg.phi_step_deg = 45.0;
            let unfolded = unfold(&table, &cfg).unwrap();
            let ledger = model.ledger_at(100.0).unwrap();
            let pole = ledger
                .poles
                .iter()
                .find(|p| matches!(p.kind, synth::LedgerKind::Resonance))
                .unwrap();
            let (g2pi, _) = unfolded.eval_point(0, 2.0 * PI, Weight::Lambda).unwrap();
            let tail = TailAmplitude::new(pole.position, pole.residue, TailKind::GTail).eval(2.0 * PI);
            let rel = (g2pi - tail).norm() / tail.norm();
            assert!(rel < last, "im={im}: rel {rel:.3e} !< {last:.3e}");
            last = rel;
        }
    }

    #[test]
    fn backward_decomposition_on_two_pole_model() {
        let model = synth::presets::decomposition_two_pole();
        let unfolded = unfold_preset(&model, 45.0, 3);
        let poles = unfolded.significant_pole_pairs();
        let fcfg = FoldConfig { m_max: 3, ..Default::default() };
        let report = decompose_backward(&unfolded, &poles, &fcfg).unwrap();
        // internal consistency: coherent total is the sum of retained terms
        for row in &report.rows {
            let s: Complex64 = row
                .background
                .iter()
                .chain(row.resonance.iter())
                .map(|t| t.value)
                .sum();
            assert_eq!(s, row.coherent_total);
        }
        // residual under 5% of the backward DCS peak
        let peak = report.peak_exact_dcs();
        assert!(report.max_residual() < 0.05 * peak, "{} vs peak {}", report.max_residual(), peak);
    }

    #[test]
    fn forward_two_pole_beats_one_pole() {
        let model = synth::presets::decomposition_two_pole();
        let unfolded = unfold_preset(&model, 45.0, 3);
        // keep the long-lived resonance pair; the background window's own
        // poles (Im >= 2.2 here) also clear the permissive unfold gate
        let poles: Vec<Vec<(Complex64, Complex64)>> = unfolded
            .significant_pole_pairs()
            .into_iter()
            .map(|v| v.into_iter().filter(|(p, _)| p.im < 2.0).collect())
            .collect();
        for per_e in &poles {
            assert_eq!(per_e.len(), 2, "expected the two resonance poles");
        }
        let fcfg = FoldConfig { m_max: 3, ..Default::default() };
        let report = decompose_forward(&unfolded, &poles, &fcfg).unwrap();
        let one = report.max_prefix_residual(1);
        let two = report.max_prefix_residual(2);
        assert!(two < one, "two-pole {two:.3e} !< one-pole {one:.3e}");
        // no poles supplied -> approximation 0, residual = full forward DCS
        let empty: Vec<Vec<(Complex64, Complex64)>> =
            vec![Vec::new(); unfolded.energies_mev.len()];
        let r0 = decompose_forward(&unfolded, &empty, &fcfg).unwrap();
        for row in &r0.rows {
            assert_eq!(row.coherent_total, Complex64::new(0.0, 0.0));
            assert!((row.residual - row.exact.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn sideway_decomposition_csv_shape() {
        let model = synth::presets::decomposition_two_pole();
        let unfolded = unfold_preset(&model, 45.0, 3);
        let poles = unfolded.significant_pole_pairs();
        let grid = crate::amplitudes::AngularGrid::new(vec![FRAC_PI_2]).unwrap();
        let fcfg = FoldConfig { m_max: 3, ..Default::default() };
        let folded = crate::amplitudes::fold(&unfolded, &grid, &fcfg).unwrap();
        let report = decompose_sideway(&unfolded, &folded, &poles, FRAC_PI_2).unwrap();
        // background = retained m <= 0 terms
        assert_eq!(report.rows[0].background.len(), 4); // m = -3..0
        let csv = report.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "E_meV,theta_tag,term_label,re,im,abs2,exact_abs2,residual"
        );
        assert!(csv.contains("coherent_total"));
        assert!(csv.contains("theta=90deg"));
        // residual small compared to the exact sideway DCS
        let exact2 = report.rows[0].exact.norm_sqr();
        assert!(report.rows[0].residual < 0.25 * exact2);
        // unknown theta errors
        assert!(matches!(
            decompose_sideway(&unfolded, &folded, &poles, 1.0),
            Err(ResonanceError::ThetaNotFolded { .. })
        ));
    }
}
