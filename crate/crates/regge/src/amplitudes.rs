//! Partial-wave sums, unfolded amplitudes, winding angles, and the fold back
//! to the physical differential cross section.
//!
//! The unfolded amplitudes are
//!
//! ```text
//! f~(phi, E) = int_0^inf sqrt(lambda) S(lambda, E) e^{i lambda phi} dlambda
//! g~(phi, E) = int_0^inf        lambda S(lambda, E) e^{i lambda phi} dlambda
//! ```
//!
//! computed as composite Gauss-Legendre panels on [0, lambda_cut] plus the
//! remainder beyond lambda_cut. The remainder is evaluated on a vertical
//! contour ray from the endpoint (Gauss-Laguerre after the substitution
//! lambda = lambda_cut + i t / |phi|) when |phi| is not small, and through the
//! map lambda = lambda_cut / x otherwise; a one-step integration-by-parts
//! value of the same remainder feeds the stored per-point error estimate. The
//! endpoint ray keeps Re(lambda) = lambda_cut throughout, so it passes no
//! structural poles (those all sit at Re(lambda) < lambda_cut).
//!
//! Folding back sums the unfolded amplitude over winding angles phi_m and adds
//! three small closed-form corrections measured necessary for 1e-6 fidelity:
//! the |m| > m_max winding tails resummed geometrically over the interpolant's
//! pole spectrum, an exact-kernel repair term replacing the large-lambda
//! Legendre asymptotic by the true P_J at the tabulated J, and the removal of
//! the half-integer comb "ghost" nodes above J_max where the interpolant is
//! small but not zero.

use crate::numerics::{gauss_laguerre, gauss_legendre, legendre_all};
use crate::pade::{build_approximant, find_poles_zeros, Axis, PadeError, PoleSet, PoleZeroConfig, RationalApproximant};
use crate::smatrix::{PartialWaveTable, SmatrixError};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum AmplitudeError {
    #[error("quadrature did not converge at phi={phi}, E={e_mev} meV (estimate {estimate:.2e} > tol {tol:.2e})")]
    QuadratureNotConverged { phi: f64, e_mev: f64, estimate: f64, tol: f64 },
    #[error("winding angle phi={phi} outside the unfolded grid [{min}, {max}]")]
    PhiOutOfGrid { phi: f64, min: f64, max: f64 },
    #[error("m-sum truncation too coarse at theta={theta_rad} rad: remainder bound {bound:.2e} exceeds fold_tol {tol:.2e}; raise m_max")]
    TruncationTooCoarse { theta_rad: f64, bound: f64, tol: f64 },
    #[error("theta={theta_rad} rad is an exact endpoint; winding angles degenerate there, use the endpoint fold instead")]
    EndpointTheta { theta_rad: f64 },
    #[error("angular grid invalid: {detail}")]
    BadGrid { detail: String },
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Smatrix(#[from] SmatrixError),
}

/// Which unfolded amplitude a quadrature or tail refers to: f~ carries weight
/// sqrt(lambda), g~ carries weight lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    SqrtLambda,
    Lambda,
}

/// Ascending scattering angles in radians on [0, pi].
#[derive(Debug, Clone)]
pub struct AngularGrid {
    pub thetas_rad: Vec<f64>,
}

/// How a fold treats one scattering angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRoute {
    Interior,
    ForwardEndpoint,
    BackwardEndpoint,
}

impl AngularGrid {
    pub fn new(thetas_rad: Vec<f64>) -> Result<Self, AmplitudeError> {
        if thetas_rad.is_empty() {
            return Err(AmplitudeError::BadGrid { detail: "empty grid".into() });
        }
        for w in thetas_rad.windows(2) {
            if w[1] <= w[0] {
                return Err(AmplitudeError::BadGrid {
                    detail: format!("angles not ascending: {} then {}", w[0], w[1]),
                });
            }
        }
        if thetas_rad[0] < 0.0 || *thetas_rad.last().unwrap() > PI + 1e-12 {
            return Err(AmplitudeError::BadGrid {
                detail: "angles must lie in [0, pi]".into(),
            });
        }
        Ok(Self { thetas_rad })
    }

    /// Inclusive uniform grid in degrees.
    pub fn from_degrees(start: f64, stop: f64, step: f64) -> Result<Self, AmplitudeError> {
        if !(step > 0.0) || stop < start {
            return Err(AmplitudeError::BadGrid {
                detail: format!("bad range {start}:{stop}:{step}"),
            });
        }
        let n = ((stop - start) / step).round() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| (start + i as f64 * step).to_radians()).collect();
        if let Some(last) = v.last_mut() {
            // guard against rounding pushing the endpoint past pi
            if *last > PI {
                *last = PI;
            }
        }
        Self::new(v)
    }

    /// Parse "start:stop:step" (degrees).
    pub fn parse(text: &str) -> Result<Self, AmplitudeError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(AmplitudeError::BadGrid {
                detail: format!("expected start:stop:step_deg, got {text}"),
            });
        }
        let p: Result<Vec<f64>, _> = parts.iter().map(|t| t.trim().parse::<f64>()).collect();
        let p = p.map_err(|_| AmplitudeError::BadGrid {
            detail: format!("non-numeric field in {text}"),
        })?;
        Self::from_degrees(p[0], p[1], p[2])
    }

    /// Angles within pi/(2 J_max) of an endpoint are routed to the endpoint
    /// formulas: the winding construction degenerates as sin(theta) -> 0.
    pub fn route(theta_rad: f64, jmax: usize) -> ThetaRoute {
        let band = PI / (2.0 * jmax as f64);
        if theta_rad < band {
            ThetaRoute::ForwardEndpoint
        } else if theta_rad > PI - band {
            ThetaRoute::BackwardEndpoint
        } else {
            ThetaRoute::Interior
        }
    }
}

/// Winding branch: even m traverses the nearside, odd m the farside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Nearside,
    Farside,
}

#[derive(Debug, Clone, Copy)]
pub struct WindingAngle {
    pub m: i32,
    pub phi: f64,
    pub branch: Branch,
}

/// phi_m(theta) = (-1)^{m+1} theta + pi (m + 1/2 + (-1)^m / 2).
///
/// Even m: phi = -theta + (m+1) pi (nearside); odd m: phi = theta + m pi
/// (farside). phi_0 + theta = pi and phi_{m+2} - phi_m = 2 pi hold exactly.
pub fn winding_angle(m: i32, theta_rad: f64) -> f64 {
    if m.rem_euclid(2) == 0 {
        -theta_rad + (m as f64 + 1.0) * PI
    } else {
        theta_rad + m as f64 * PI
    }
}

/// All winding angles for |m| <= m_max at an interior angle.
pub fn winding_angles(theta_rad: f64, m_max: i32) -> Result<Vec<WindingAngle>, AmplitudeError> {
    if theta_rad <= 0.0 || theta_rad >= PI {
        return Err(AmplitudeError::EndpointTheta { theta_rad });
    }
    Ok((-m_max..=m_max)
        .map(|m| WindingAngle {
            m,
            phi: winding_angle(m, theta_rad),
            branch: if m.rem_euclid(2) == 0 { Branch::Nearside } else { Branch::Farside },
        })
        .collect())
}

/// f(theta) = (i k)^{-1} sum_J (J + 1/2) S^J P_J(cos(pi - theta)).
pub fn direct_amplitude(table: &PartialWaveTable, energy_index: usize, theta_rad: f64) -> Result<Complex64, AmplitudeError> {
    let row = &table.s[checked_energy(table, energy_index)?];
    let p = legendre_all(table.jmax, -theta_rad.cos());
    let mut acc = ZERO;
    for (j, (&s, &pj)) in row.iter().zip(&p).enumerate() {
        acc += (j as f64 + 0.5) * s * pj;
    }
    Ok(acc / (I * table.k[energy_index]))
}

fn checked_energy(table: &PartialWaveTable, index: usize) -> Result<usize, AmplitudeError> {
    if index >= table.n_energies() {
        return Err(AmplitudeError::Smatrix(SmatrixError::IndexOutOfRange {
            detail: format!("energy index {index} >= {}", table.n_energies()),
        }));
    }
    Ok(index)
}

/// Differential cross sections sigma = |f|^2 on a (theta, E) grid from the
/// direct partial-wave sum.
#[derive(Debug, Clone)]
pub struct DcsTable {
    pub energies_mev: Vec<f64>,
    pub thetas_rad: Vec<f64>,
    /// sigma[energy_index][theta_index]
    pub sigma: Vec<Vec<f64>>,
}

pub fn dcs_direct(table: &PartialWaveTable, grid: &AngularGrid) -> Result<DcsTable, AmplitudeError> {
    let sigma = (0..table.n_energies())
        .map(|ei| {
            grid.thetas_rad
                .iter()
                .map(|&th| direct_amplitude(table, ei, th).map(|f| f.norm_sqr()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DcsTable {
        energies_mev: table.energies_mev.clone(),
        thetas_rad: grid.thetas_rad.clone(),
        sigma,
    })
}

impl DcsTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("E_meV,theta_deg,sigma\n");
        for (ei, &e) in self.energies_mev.iter().enumerate() {
            for (ti, &th) in self.thetas_rad.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", e, th.to_degrees(), self.sigma[ei][ti]);
            }
        }
        out
    }
}

/// Quadrature and grid settings for [`unfold`].
#[derive(Debug, Clone)]
pub struct UnfoldConfig {
    pub phi_min_deg: f64,
    pub phi_max_deg: f64,
    pub phi_step_deg: f64,
    /// None: J_max + 1/2.
    pub lambda_cut: Option<f64>,
    /// Per-point error-estimate ceiling before QuadratureNotConverged fires.
    pub quad_tol: f64,
    pub max_panels: usize,
    /// Trust-region half-height used when harvesting the pole spectrum that
    /// drives the winding-tail resummation.
    pub im_cap: f64,
}

impl Default for UnfoldConfig {
    fn default() -> Self {
        Self {
            phi_min_deg: -180.0,
            phi_max_deg: 540.0,
            phi_step_deg: 0.5,
            lambda_cut: None,
            quad_tol: 1e-3,
            max_panels: 40_000,
            im_cap: 4.0,
        }
    }
}

impl UnfoldConfig {
    /// Widen the phi range so every angle the fold and endpoint series sample
    /// at |m| <= m_max lies inside the grid: interior windings reach
    /// [-m_max pi, (m_max+1) pi], the endpoint series [-2 m_max pi,
    /// (2 m_max + 1) pi].
    pub fn covering_m(m_max: i32) -> Self {
        let m = m_max.max(1) as f64;
        Self {
            phi_min_deg: -2.0 * m * 180.0,
            phi_max_deg: (2.0 * m + 1.0) * 180.0,
            ..Self::default()
        }
    }
}

/// Oscillatory quadrature engine shared by unfold and fold.
pub(crate) struct QuadEngine {
    glx: Vec<f64>,
    glw: Vec<f64>,
    lax: Vec<f64>,
    law: Vec<f64>,
}

impl QuadEngine {
    pub fn new() -> Self {
        let (glx, glw) = gauss_legendre(24);
        let (lax, law) = gauss_laguerre(40);
        Self { glx, glw, lax, law }
    }

    fn weight(kind: Weight, z: Complex64) -> Complex64 {
        match kind {
            Weight::SqrtLambda => z.sqrt(),
            Weight::Lambda => z,
        }
    }

    /// Composite Gauss-Legendre panels of int_a^b w(l) R(l) e^{i l phi} dl,
    /// panel width tied to the oscillation period.
    fn panels(
        &self,
        ev: &dyn Fn(Complex64) -> Complex64,
        a: f64,
        b: f64,
        phi: f64,
        kind: Weight,
        max_panels: usize,
    ) -> Result<Complex64, AmplitudeError> {
        let period = 2.0 * PI / phi.abs().max(1e-12);
        let width = (0.6 * period).min(1.0);
        let n = (((b - a) / width).ceil() as usize).max(1);
        if n > max_panels {
            return Err(AmplitudeError::QuadratureNotConverged {
                phi,
                e_mev: f64::NAN,
                estimate: f64::INFINITY,
                tol: 0.0,
            });
        }
        let h = (b - a) / n as f64;
        let mut tot = ZERO;
        for i in 0..n {
            if i == 0 && a == 0.0 {
                // The sqrt(lambda) weight has a branch point at 0; lambda =
                // u^2 turns the first panel into a polynomial-weight one the
                // nodes integrate to machine precision.
                let half_u = 0.5 * h.sqrt();
                for (x, w) in self.glx.iter().zip(&self.glw) {
                    let u = half_u * (1.0 + x);
                    let l = Complex64::new(u * u, 0.0);
                    let jac = match kind {
                        Weight::SqrtLambda => 2.0 * u * u,
                        Weight::Lambda => 2.0 * u * u * u,
                    };
                    tot += half_u * w * jac * ev(l) * (I * l * phi).exp();
                }
                continue;
            }
            let mid = a + (i as f64 + 0.5) * h;
            let hw = 0.5 * h;
            for (x, w) in self.glx.iter().zip(&self.glw) {
                let l = Complex64::new(mid + hw * x, 0.0);
                tot += hw * w * Self::weight(kind, l) * ev(l) * (I * l * phi).exp();
            }
        }
        Ok(tot)
    }

    /// |phi| below this, the remainder integrates along the real axis (the
    /// lc/x map); above, along the rotated contour. The contour ray samples
    /// heights t/|phi|, and small |phi| would push the continuation far into
    /// the plane where its spurious structure lives.
    const CONTOUR_PHI_MIN: f64 = 0.5;
    /// Ray points above this height are dropped: their Laguerre weights are
    /// below e^{-CONTOUR_PHI_MIN * cap} when the integrand is honest, and the
    /// continuation that far up is not.
    const CONTOUR_IM_CAP: f64 = 80.0;

    fn xmap_panels(lc: f64, phi: f64) -> usize {
        // ~3 oscillation periods per 24-point panel over lambda in [lc, 10 lc]
        let periods = 9.0 * lc * phi.abs() / (2.0 * PI);
        ((periods / 3.0).ceil() as usize).max(11)
    }

    /// Exact remainder int_{lc}^inf via the vertical contour ray (|phi| not
    /// small) or the lambda = lc/x map.
    fn remainder_exact(
        &self,
        ev: &dyn Fn(Complex64) -> Complex64,
        lc: f64,
        phi: f64,
        kind: Weight,
    ) -> Complex64 {
        if phi.abs() >= Self::CONTOUR_PHI_MIN {
            let s = phi.signum();
            let mut acc = ZERO;
            for (t, w) in self.lax.iter().zip(&self.law) {
                let y = t / phi.abs();
                if y > Self::CONTOUR_IM_CAP {
                    continue;
                }
                let z = Complex64::new(lc, s * y);
                acc += w * Self::weight(kind, z) * ev(z);
            }
            (I * lc * phi).exp() * (I * s / phi.abs()) * acc
        } else {
            self.xmap(ev, lc, phi, kind, Self::xmap_panels(lc, phi))
        }
    }

    /// lambda = lc/x map on x in [0.1, 1] with geometric panels. The floor at
    /// x = 0.1 (lambda <= 10 lc) stays inside the region where the continued
    /// fraction extrapolates cleanly; the integrand there has already decayed.
    fn xmap(
        &self,
        ev: &dyn Fn(Complex64) -> Complex64,
        lc: f64,
        phi: f64,
        kind: Weight,
        n_panels: usize,
    ) -> Complex64 {
        let mut tot = ZERO;
        for i in 0..n_panels {
            let x0 = 0.1f64 * 10f64.powf(i as f64 / n_panels as f64);
            let x1 = 0.1f64 * 10f64.powf((i + 1) as f64 / n_panels as f64);
            let mid = 0.5 * (x0 + x1);
            let hw = 0.5 * (x1 - x0);
            for (x, w) in self.glx.iter().zip(&self.glw) {
                let xv = mid + hw * x;
                let l = Complex64::new(lc / xv, 0.0);
                tot += hw * w * Self::weight(kind, l) * ev(l) * (I * l * phi).exp() * (lc / (xv * xv));
            }
        }
        tot
    }

    /// One-step integration-by-parts value of the same remainder:
    /// e^{i lc phi} (-u(lc) / (i phi)).
    fn remainder_ibp1(
        &self,
        ev: &dyn Fn(Complex64) -> Complex64,
        lc: f64,
        phi: f64,
        kind: Weight,
    ) -> Complex64 {
        let l = Complex64::new(lc, 0.0);
        (I * lc * phi).exp() * (-(Self::weight(kind, l) * ev(l)) / (I * phi))
    }

    /// Value and error estimate of int_0^inf w(l) R(l) e^{i l phi} dl.
    pub fn unfold_point(
        &self,
        ev: &dyn Fn(Complex64) -> Complex64,
        lc: f64,
        phi: f64,
        kind: Weight,
        max_panels: usize,
    ) -> Result<(Complex64, f64), AmplitudeError> {
        let main = self.panels(ev, 0.0, lc, phi, kind, max_panels)?;
        let rem = self.remainder_exact(ev, lc, phi, kind);
        let est = if phi.abs() >= Self::CONTOUR_PHI_MIN {
            (rem - self.remainder_ibp1(ev, lc, phi, kind)).norm()
        } else {
            // refinement in the resolved regime: a coarser-than-adaptive
            // count under-samples the oscillation in the widest panel and
            // reports resolution noise instead of convergence
            let fine = Self::xmap_panels(lc, phi) + 4;
            (rem - self.xmap(ev, lc, phi, kind, fine)).norm() + 1e-14 * main.norm()
        };
        Ok((main + rem, est))
    }
}

/// Per-energy continuation artifacts the fold and decomposition stages reuse.
#[derive(Debug, Clone)]
pub struct EnergyAnalysis {
    pub e_mev: f64,
    pub k: f64,
    pub approximant: RationalApproximant,
    /// Poles harvested over the symmetric trust box (both half-planes) with
    /// res_min = 0: the winding-tail resummation needs the complete spectrum,
    /// not just the significant poles.
    pub pole_set: PoleSet,
    pub lambda_cut: f64,
    pub table_row: Vec<Complex64>,
}

/// Unfolded amplitudes on a phi grid, plus the per-energy machinery to
/// re-evaluate them exactly at arbitrary phi (the fold needs winding angles
/// that rarely land on grid points).
#[derive(Debug, Clone)]
pub struct UnfoldedAmplitude {
    pub phi: Vec<f64>,
    pub energies_mev: Vec<f64>,
    /// f[energy_index][phi_index]
    pub f: Vec<Vec<Complex64>>,
    pub g: Vec<Vec<Complex64>>,
    /// max of the f~ and g~ error estimates per point
    pub err_est: Vec<Vec<f64>>,
    pub analyses: Vec<EnergyAnalysis>,
    pub jmax: usize,
    pub quad_tol: f64,
    pub max_panels: usize,
}

/// Continue each tabulated energy into the CAM plane and quadrate the
/// unfolded amplitudes over the configured phi grid.
pub fn unfold(table: &PartialWaveTable, cfg: &UnfoldConfig) -> Result<UnfoldedAmplitude, AmplitudeError> {
    if cfg.phi_max_deg.to_radians() < 3.0 * PI - 1e-9 {
        return Err(AmplitudeError::BadGrid {
            detail: format!("phi_max must reach 3 pi (540 deg), got {} deg", cfg.phi_max_deg),
        });
    }
    if cfg.phi_min_deg.to_radians() > -PI + 1e-9 {
        return Err(AmplitudeError::BadGrid {
            detail: format!("phi_min must reach -pi (-180 deg), got {} deg", cfg.phi_min_deg),
        });
    }
    let n_phi = ((cfg.phi_max_deg - cfg.phi_min_deg) / cfg.phi_step_deg).round() as usize;
    let phi: Vec<f64> =
        (0..=n_phi).map(|i| (cfg.phi_min_deg + i as f64 * cfg.phi_step_deg).to_radians()).collect();

    let analyses: Vec<EnergyAnalysis> = (0..table.n_energies())
        .into_par_iter()
        .map(|ei| analyze_energy(table, ei, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let engine = QuadEngine::new();
    let rows: Vec<(Vec<Complex64>, Vec<Complex64>, Vec<f64>)> = analyses
        .par_iter()
        .map(|an| {
            let ev = |z: Complex64| an.approximant.eval(z);
            let mut frow = Vec::with_capacity(phi.len());
            let mut grow = Vec::with_capacity(phi.len());
            let mut erow = Vec::with_capacity(phi.len());
            for &ph in &phi {
                let (fv, fe) = engine
                    .unfold_point(&ev, an.lambda_cut, ph, Weight::SqrtLambda, cfg.max_panels)
                    .map_err(|e| tag_energy(e, an.e_mev))?;
                let (gv, ge) = engine
                    .unfold_point(&ev, an.lambda_cut, ph, Weight::Lambda, cfg.max_panels)
                    .map_err(|e| tag_energy(e, an.e_mev))?;
                let est = fe.max(ge);
                if est > cfg.quad_tol {
                    return Err(AmplitudeError::QuadratureNotConverged {
                        phi: ph,
                        e_mev: an.e_mev,
                        estimate: est,
                        tol: cfg.quad_tol,
                    });
                }
                frow.push(fv);
                grow.push(gv);
                erow.push(est);
            }
            Ok::<_, AmplitudeError>((frow, grow, erow))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut f = Vec::with_capacity(rows.len());
    let mut g = Vec::with_capacity(rows.len());
    let mut err = Vec::with_capacity(rows.len());
    for (fr, gr, er) in rows {
        f.push(fr);
        g.push(gr);
        err.push(er);
    }
    Ok(UnfoldedAmplitude {
        phi,
        energies_mev: table.energies_mev.clone(),
        f,
        g,
        err_est: err,
        analyses,
        jmax: table.jmax,
        quad_tol: cfg.quad_tol,
        max_panels: cfg.max_panels,
    })
}

fn tag_energy(err: AmplitudeError, e_mev: f64) -> AmplitudeError {
    match err {
        AmplitudeError::QuadratureNotConverged { phi, estimate, tol, .. } => {
            AmplitudeError::QuadratureNotConverged { phi, e_mev, estimate, tol }
        }
        other => other,
    }
}

fn analyze_energy(
    table: &PartialWaveTable,
    ei: usize,
    cfg: &UnfoldConfig,
) -> Result<EnergyAnalysis, AmplitudeError> {
    let pairs = table.slice_at_energy(ei)?;
    let (nodes, values): (Vec<f64>, Vec<Complex64>) = pairs.into_iter().unzip();
    let approximant = build_approximant(&nodes, &values, Axis::Lambda, table.energies_mev[ei])?;
    let mut pcfg = PoleZeroConfig::for_jmax(table.jmax);
    pcfg.box_im = (-cfg.im_cap, cfg.im_cap);
    pcfg.im_cap = cfg.im_cap;
    pcfg.res_min = 0.0;
    let pole_set = find_poles_zeros(&approximant, &pcfg)?;
    Ok(EnergyAnalysis {
        e_mev: table.energies_mev[ei],
        k: table.k[ei],
        approximant,
        pole_set,
        lambda_cut: cfg.lambda_cut.unwrap_or(table.jmax as f64 + 0.5),
        table_row: table.s[ei].clone(),
    })
}

impl UnfoldedAmplitude {
    /// Exact quadrature of f~ or g~ at an arbitrary phi (not grid-bound).
    pub fn eval_point(
        &self,
        energy_index: usize,
        phi: f64,
        kind: Weight,
    ) -> Result<(Complex64, f64), AmplitudeError> {
        let an = &self.analyses[energy_index];
        let engine = QuadEngine::new();
        let ev = |z: Complex64| an.approximant.eval(z);
        engine.unfold_point(&ev, an.lambda_cut, phi, kind, self.max_panels)
    }

    pub fn phi_range(&self) -> (f64, f64) {
        (self.phi[0], *self.phi.last().unwrap())
    }

    /// Per-energy (position, residue) pairs of the physical upper-half
    /// significant poles, sorted by ascending Im (longest-lived first), ties
    /// by Re. The order matches the decomposition report convention.
    pub fn significant_pole_pairs(&self) -> Vec<Vec<(Complex64, Complex64)>> {
        self.analyses
            .iter()
            .map(|an| {
                let mut v: Vec<(Complex64, Complex64)> = an
                    .pole_set
                    .poles
                    .iter()
                    .filter(|p| p.significant && p.position.im > 0.0)
                    .map(|p| (p.position, p.residue))
                    .collect();
                v.sort_by(|a, b| {
                    (a.0.im, a.0.re)
                        .partial_cmp(&(b.0.im, b.0.re))
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                v
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("E_meV,phi_deg,re_f,im_f,re_g,im_g,err_est\n");
        for (ei, &e) in self.energies_mev.iter().enumerate() {
            for (pi, &ph) in self.phi.iter().enumerate() {
                let fv = self.f[ei][pi];
                let gv = self.g[ei][pi];
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    e,
                    ph.to_degrees(),
                    fv.re,
                    fv.im,
                    gv.re,
                    gv.im,
                    self.err_est[ei][pi]
                );
            }
        }
        out
    }
}

/// Settings for the fold back to the physical amplitude.
#[derive(Debug, Clone)]
pub struct FoldConfig {
    /// Retain winding terms |m| <= m_max.
    pub m_max: i32,
    /// Ceiling on the pre-resummation m-truncation bound.
    pub fold_tol: f64,
    /// Add the geometric resummation of the |m| > m_max tails.
    pub resum: bool,
    /// Half-integer comb nodes above J_max to subtract.
    pub ghost_count: usize,
}

impl Default for FoldConfig {
    fn default() -> Self {
        Self { m_max: 2, fold_tol: 1e-3, resum: true, ghost_count: 60 }
    }
}

/// One folded angle: retained winding terms plus the closed-form corrections.
#[derive(Debug, Clone)]
pub struct FoldTerms {
    pub theta_rad: f64,
    /// (m, contribution) for |m| <= m_max; empty when routed to an endpoint.
    pub per_m: Vec<(i32, Complex64)>,
    /// Geometric resummation of the |m| > m_max winding tails.
    pub tail_resum: Complex64,
    /// Exact-kernel repair plus ghost-node removal.
    pub kernel: Complex64,
    pub total: Complex64,
    pub routed: Option<ThetaRoute>,
}

#[derive(Debug, Clone)]
pub struct FoldedAmplitude {
    pub energies_mev: Vec<f64>,
    pub thetas_rad: Vec<f64>,
    /// terms[energy_index][theta_index]
    pub terms: Vec<Vec<FoldTerms>>,
}

impl FoldedAmplitude {
    pub fn amplitude(&self, ei: usize, ti: usize) -> Complex64 {
        self.terms[ei][ti].total
    }

    pub fn sigma(&self, ei: usize, ti: usize) -> f64 {
        self.terms[ei][ti].total.norm_sqr()
    }
}

/// Geometric resummation of the interior-fold winding tails |m| > m_max over
/// one pole of the continued S(lambda): closed-form sums of
/// f~_tail(phi_m) e^{-i pi/4 - i m pi/2}.
fn geom_tail_interior(poles: &[(Complex64, Complex64)], theta: f64, m_max: i32) -> Complex64 {
    let mut tot = ZERO;
    for &(p, r) in poles {
        if r.norm() < 1e-11 || p.im.abs() > 12.0 || p.im.abs() < 1e-9 {
            continue;
        }
        let t = 2.0 * PI * I * p.sqrt() * r;
        let e_pos = (I * p * (PI - theta)).exp() * Complex64::from_polar(1.0, -FRAC_PI_4);
        let e_neg = (I * p * (theta - PI)).exp() * Complex64::from_polar(1.0, FRAC_PI_4);
        if p.im > 0.0 {
            let z = (2.0 * PI * I * p).exp();
            let q0 = (m_max.div_euclid(2) + 1) as i32;
            let q1 = ((m_max + 1).div_euclid(2) + 1) as i32;
            tot += t * (e_pos * (-z).powi(q0) / (1.0 + z) + e_neg * (-z).powi(q1) / (1.0 + z));
        } else {
            let zi = (-2.0 * PI * I * p).exp();
            let q0 = (m_max.div_euclid(2) + 1) as i32;
            let q1 = ((m_max - 1).div_euclid(2) + 1) as i32;
            tot += t * (e_pos * (-zi).powi(q0) / (1.0 + zi) + e_neg * (-zi).powi(q1) / (1.0 + zi));
        }
    }
    tot
}

/// Same resummation for the endpoint series: forward sums (-1)^m g~((2m+1) pi),
/// backward (-1)^m g~(2 m pi), both over |m| > m_max.
fn geom_tail_endpoint(
    poles: &[(Complex64, Complex64)],
    m_max: i32,
    forward: bool,
) -> Complex64 {
    let mut tot = ZERO;
    for &(p, r) in poles {
        if r.norm() < 1e-11 || p.im.abs() > 12.0 || p.im.abs() < 1e-9 {
            continue;
        }
        let t = 2.0 * PI * I * p * r;
        if p.im > 0.0 {
            let z = (2.0 * PI * I * p).exp();
            let head = if forward { (I * PI * p).exp() } else { Complex64::new(1.0, 0.0) };
            tot += t * head * (-z).powi(m_max + 1) / (1.0 + z);
        } else {
            let zi = (-2.0 * PI * I * p).exp();
            let head = if forward { (-I * PI * p).exp() } else { Complex64::new(1.0, 0.0) };
            tot += t * head * (-zi).powi(m_max + 1) / (1.0 + zi);
        }
    }
    tot
}

/// Large-lambda Legendre asymptotic A(lambda, beta) =
/// sqrt(2 / (pi lambda sin beta)) cos(lambda beta - pi/4).
fn legendre_asymptotic(lambda: f64, beta: f64) -> f64 {
    (2.0 / (PI * lambda * beta.sin())).sqrt() * (lambda * beta - FRAC_PI_4).cos()
}

fn tail_pole_pairs(an: &EnergyAnalysis) -> Vec<(Complex64, Complex64)> {
    an.pole_set.poles.iter().map(|p| (p.position, p.residue)).collect()
}

/// Pre-resummation bound on the neglected |m| > m_max winding terms at one
/// interior angle, from the slowest-decaying upper-half pole tails.
fn truncation_bound(an: &EnergyAnalysis, theta: f64, m_max: i32) -> f64 {
    let phi_next = winding_angle(m_max + 1, theta).abs().min(winding_angle(-(m_max + 1), theta).abs() + 2.0 * PI);
    let norm = 1.0 / (an.k * (2.0 * PI * theta.sin()).sqrt());
    let mut bound = 0.0;
    for p in an.pole_set.poles.iter().filter(|p| p.significant && p.position.im > 0.0) {
        let im = p.position.im;
        let amp = 2.0 * PI * p.position.norm().sqrt() * p.residue.norm();
        bound += amp * (-im * phi_next).exp() / (1.0 - (-2.0 * PI * im).exp());
    }
    bound * norm
}

fn fold_interior(
    unfolded: &UnfoldedAmplitude,
    ei: usize,
    theta: f64,
    cfg: &FoldConfig,
    engine: &QuadEngine,
) -> Result<FoldTerms, AmplitudeError> {
    let an = &unfolded.analyses[ei];
    let bound = truncation_bound(an, theta, cfg.m_max);
    if bound > cfg.fold_tol {
        return Err(AmplitudeError::TruncationTooCoarse {
            theta_rad: theta,
            bound,
            tol: cfg.fold_tol,
        });
    }
    let (phi_lo, phi_hi) = unfolded.phi_range();
    let ik = I * an.k;
    let prefactor = 1.0 / (2.0 * PI * theta.sin()).sqrt();
    let ev = |z: Complex64| an.approximant.eval(z);

    let mut per_m = Vec::with_capacity((2 * cfg.m_max + 1) as usize);
    let mut msum = ZERO;
    for m in -cfg.m_max..=cfg.m_max {
        let ph = winding_angle(m, theta);
        if ph < phi_lo - 1e-9 || ph > phi_hi + 1e-9 {
            return Err(AmplitudeError::PhiOutOfGrid { phi: ph, min: phi_lo, max: phi_hi });
        }
        let (fv, _) =
            engine.unfold_point(&ev, an.lambda_cut, ph, Weight::SqrtLambda, unfolded.max_panels)?;
        let phase = Complex64::from_polar(1.0, -FRAC_PI_4 - m as f64 * FRAC_PI_2);
        let term = fv * phase * prefactor / ik;
        per_m.push((m, term));
        msum += fv * phase;
    }
    let tail_resum = if cfg.resum {
        geom_tail_interior(&tail_pole_pairs(an), theta, cfg.m_max) * prefactor / ik
    } else {
        ZERO
    };

    // exact-kernel repair at the tabulated J plus ghost-node removal above J_max
    let beta = PI - theta;
    let x = -theta.cos();
    let pj = legendre_all(unfolded.jmax, x);
    let mut kernel = ZERO;
    for (j, (&s, &p)) in an.table_row.iter().zip(&pj).enumerate() {
        let lam = j as f64 + 0.5;
        kernel += lam * s * (p - legendre_asymptotic(lam, beta));
    }
    for j in unfolded.jmax + 1..=unfolded.jmax + cfg.ghost_count {
        let lam = j as f64 + 0.5;
        kernel -= lam * an.approximant.eval(Complex64::new(lam, 0.0)) * legendre_asymptotic(lam, beta);
    }
    let kernel = kernel / ik;

    let total = msum * prefactor / ik + tail_resum + kernel;
    Ok(FoldTerms { theta_rad: theta, per_m, tail_resum, kernel, total, routed: None })
}

/// Which endpoint [`fold_endpoint`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Forward,
    Backward,
}

/// Endpoint amplitudes from the alternating g~ series:
/// f(0)  = -k^{-1} sum_m (-1)^m g~((2m+1) pi),
/// f(pi) = (i k)^{-1} sum_m (-1)^m g~(2 m pi),
/// summed over |m| <= m_max with the geometric tail resummation and the
/// ghost-node removal applied.
pub fn fold_endpoint(
    unfolded: &UnfoldedAmplitude,
    energy_index: usize,
    which: Endpoint,
    cfg: &FoldConfig,
) -> Result<Complex64, AmplitudeError> {
    let engine = QuadEngine::new();
    fold_endpoint_with(unfolded, energy_index, which, cfg, &engine)
}

fn fold_endpoint_with(
    unfolded: &UnfoldedAmplitude,
    ei: usize,
    which: Endpoint,
    cfg: &FoldConfig,
    engine: &QuadEngine,
) -> Result<Complex64, AmplitudeError> {
    let an = &unfolded.analyses[ei];
    let ev = |z: Complex64| an.approximant.eval(z);
    let (phi_lo, phi_hi) = unfolded.phi_range();
    let mut sum = ZERO;
    for m in -cfg.m_max..=cfg.m_max {
        let ph = match which {
            Endpoint::Forward => (2 * m + 1) as f64 * PI,
            Endpoint::Backward => (2 * m) as f64 * PI,
        };
        if ph < phi_lo - 1e-9 || ph > phi_hi + 1e-9 {
            return Err(AmplitudeError::PhiOutOfGrid { phi: ph, min: phi_lo, max: phi_hi });
        }
        let (gv, _) =
            engine.unfold_point(&ev, an.lambda_cut, ph, Weight::Lambda, unfolded.max_panels)?;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sum += sign * gv;
    }
    if cfg.resum {
        sum += geom_tail_endpoint(
            &tail_pole_pairs(an),
            cfg.m_max,
            matches!(which, Endpoint::Forward),
        );
    }
    // ghost-node removal: the comb identity behind the endpoint series also
    // picks up the half-integer nodes above J_max
    let mut ghost = ZERO;
    for j in unfolded.jmax + 1..=unfolded.jmax + cfg.ghost_count {
        let lam = j as f64 + 0.5;
        let r = an.approximant.eval(Complex64::new(lam, 0.0));
        let w = match which {
            Endpoint::Forward => {
                if j % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Endpoint::Backward => 1.0,
        };
        ghost += w * lam * r;
    }
    let k = an.k;
    Ok(match which {
        Endpoint::Forward => -sum / k - ghost / (I * k),
        Endpoint::Backward => sum / (I * k) - ghost / (I * k),
    })
}

/// Fold the unfolded amplitude back to f(theta) over an angular grid.
/// Angles within pi/(2 J_max) of 0 or pi are routed to the endpoint series.
pub fn fold(
    unfolded: &UnfoldedAmplitude,
    grid: &AngularGrid,
    cfg: &FoldConfig,
) -> Result<FoldedAmplitude, AmplitudeError> {
    let engine = QuadEngine::new();
    let terms: Vec<Vec<FoldTerms>> = (0..unfolded.energies_mev.len())
        .into_par_iter()
        .map(|ei| {
            grid.thetas_rad
                .iter()
                .map(|&th| match AngularGrid::route(th, unfolded.jmax) {
                    ThetaRoute::Interior => fold_interior(unfolded, ei, th, cfg, &engine),
                    route @ (ThetaRoute::ForwardEndpoint | ThetaRoute::BackwardEndpoint) => {
                        let which = if route == ThetaRoute::ForwardEndpoint {
                            Endpoint::Forward
                        } else {
                            Endpoint::Backward
                        };
                        let total = fold_endpoint_with(unfolded, ei, which, cfg, &engine)?;
                        Ok(FoldTerms {
                            theta_rad: th,
                            per_m: Vec::new(),
                            tail_resum: ZERO,
                            kernel: ZERO,
                            total,
                            routed: Some(route),
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FoldedAmplitude {
        energies_mev: unfolded.energies_mev.clone(),
        thetas_rad: grid.thetas_rad.clone(),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smatrix::TransitionLabel;
    use crate::synth;

    fn single_wave_table(jmax: usize, j_on: usize) -> PartialWaveTable {
        let mut s = vec![vec![ZERO; jmax + 1]];
        s[0][j_on] = Complex64::new(1.0, 0.0);
        PartialWaveTable::new(
            TransitionLabel::new(0, 0, 0, 0, 0, 0).unwrap(),
            vec![100.0],
            vec![1.0],
            jmax,
            s,
        )
        .unwrap()
    }

    #[test]
    fn direct_dcs_single_waves() {
        // S^0 = 1, k = 1: sigma = 1/4 at every angle
        let t = single_wave_table(8, 0);
        let grid = AngularGrid::from_degrees(10.0, 170.0, 40.0).unwrap();
        let d = dcs_direct(&t, &grid).unwrap();
        for &v in &d.sigma[0] {
            assert!((v - 0.25).abs() < 1e-14);
        }
        // S^1 = 1: sigma = (9/4) cos^2(theta)
        let t = single_wave_table(8, 1);
        let d = dcs_direct(&t, &grid).unwrap();
        for (ti, &th) in grid.thetas_rad.iter().enumerate() {
            let want = 2.25 * th.cos().powi(2);
            assert!((d.sigma[0][ti] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn winding_angles_match_reference() {
        // frozen from an independent evaluation at theta = 60 deg
        let th = 60f64.to_radians();
        let want = [
            (-2, -4.1887902047863905),
            (-1, -2.0943951023931957),
            (0, 2.0943951023931957),
            (1, 4.1887902047863905),
            (2, 8.377580409572781),
            (3, 10.471975511965978),
        ];
        for &(m, phi) in &want {
            assert!((winding_angle(m, th) - phi).abs() < 1e-14, "m={m}");
        }
        let ws = winding_angles(th, 2).unwrap();
        assert_eq!(ws.len(), 5);
        assert_eq!(ws[2].m, 0);
        assert_eq!(ws[2].branch, Branch::Nearside);
        assert_eq!(ws[3].branch, Branch::Farside);
    }

    #[test]
    fn winding_invariants() {
        for &th in &[0.1, 0.7, 1.3, 2.2, 3.0] {
            assert!((winding_angle(0, th) + th - PI).abs() < 1e-15);
            for m in -6..=6 {
                let d = winding_angle(m + 2, th) - winding_angle(m, th);
                assert!((d - 2.0 * PI).abs() < 4e-15, "m={m} d={d}");
            }
        }
        assert!(matches!(
            winding_angles(0.0, 2),
            Err(AmplitudeError::EndpointTheta { .. })
        ));
        assert!(matches!(
            winding_angles(PI, 2),
            Err(AmplitudeError::EndpointTheta { .. })
        ));
    }

    #[test]
    fn unfold_point_exponential_model() {
        // S(lambda) = e^{-lambda}: g~(phi) = 1/(1 - i phi)^2, f~(phi) =
        // Gamma(3/2)/(1 - i phi)^{3/2}; frozen reference values below
        let engine = QuadEngine::new();
        let ev = |z: Complex64| (-z).exp();

        // g~(0) = 1 within 1e-8, raising lambda_cut until the remainder
        // estimate drops below 1e-10
        let mut val = ZERO;
        for lc in [10.0, 20.0, 40.0] {
            let (v, est) = engine.unfold_point(&ev, lc, 0.0, Weight::Lambda, 10_000).unwrap();
            val = v;
            if est < 1e-10 {
                break;
            }
        }
        assert!((val - Complex64::new(1.0, 0.0)).norm() < 1e-8);

        let (f0, _) = engine.unfold_point(&ev, 40.0, 0.0, Weight::SqrtLambda, 10_000).unwrap();
        assert!((f0 - Complex64::new(0.8862269254527579, 0.0)).norm() < 1e-10);
        let (f1, e1) = engine.unfold_point(&ev, 40.0, 1.0, Weight::SqrtLambda, 10_000).unwrap();
        let want = Complex64::new(0.20165644396539353, 0.4868417219611831);
        assert!((f1 - want).norm() < 1e-10);
        assert!((f1 - want).norm() <= e1.max(1e-12), "estimate must bound the true error");
        let (g2, e2) = engine.unfold_point(&ev, 40.0, 2.0, Weight::Lambda, 10_000).unwrap();
        let want = Complex64::new(-0.12, 0.16);
        assert!((g2 - want).norm() < 1e-10);
        assert!((g2 - want).norm() <= e2.max(1e-12));
    }

    #[test]
    fn quadrature_branches_match_closed_forms() {
        // sweep every remainder branch (rotated contour both signs, the
        // lc/x map, phi = 0) and decay rate against the Laplace transforms
        // f~ = Gamma(3/2) (c - i phi)^{-3/2}, g~ = (c - i phi)^{-2}
        let engine = QuadEngine::new();
        let gamma_3_2 = 0.5 * PI.sqrt();
        for &c in &[0.5, 0.9, 1.3, 1.8] {
            let ev = move |z: Complex64| (-c * z).exp();
            for &phi in
                &[-5.5, -2.0, -0.4, -0.15, 0.0, 0.2, 0.45, 1.0, PI, 7.9]
            {
                let w = Complex64::new(c, -phi);
                let want_f = gamma_3_2 * w.powf(-1.5);
                let want_g = w.powi(-2);
                let (f, _) =
                    engine.unfold_point(&ev, 40.0, phi, Weight::SqrtLambda, 10_000).unwrap();
                let (g, _) =
                    engine.unfold_point(&ev, 40.0, phi, Weight::Lambda, 10_000).unwrap();
                assert!(
                    (f - want_f).norm() < 1e-8 * (1.0 + want_f.norm()),
                    "f~ at c={c}, phi={phi}: off by {:.2e}",
                    (f - want_f).norm()
                );
                assert!(
                    (g - want_g).norm() < 1e-8 * (1.0 + want_g.norm()),
                    "g~ at c={c}, phi={phi}: off by {:.2e}",
                    (g - want_g).norm()
                );
            }
        }
    }

    #[test]
    fn fold_matches_direct_at_module_tolerance() {
        // default m_max = 2 and a coarse phi grid: the fold-vs-direct
        // agreement contract at module level is 1e-3 on |f|
        let model = synth::presets::fold_j20_1p();
        let table = model.generate().unwrap();
        let mut ucfg = UnfoldConfig::covering_m(2);
        ucfg.phi_step_deg = 30.0; // grid values unused by fold (it evaluates exactly)
        let unfolded = unfold(&table, &ucfg).unwrap();
        let grid = AngularGrid::new(vec![
            45f64.to_radians(),
            90f64.to_radians(),
            150f64.to_radians(),
        ])
        .unwrap();
        let folded = fold(&unfolded, &grid, &FoldConfig::default()).unwrap();
        for (ti, &th) in grid.thetas_rad.iter().enumerate() {
            let direct = direct_amplitude(&table, 0, th).unwrap();
            let diff = (folded.amplitude(0, ti) - direct).norm();
            assert!(diff < 1e-3 * direct.norm().max(1.0), "theta {th}: diff {diff:.2e}");
        }
    }

    #[test]
    fn default_grid_too_narrow_for_symmetric_m_sum() {
        // the default phi range [-pi, 3pi] does not reach phi_{-2}; the
        // documented remedy is to extend the grid and rerun
        let model = synth::presets::fold_j20_0p();
        let table = model.generate().unwrap();
        let mut ucfg = UnfoldConfig::default();
        ucfg.phi_step_deg = 30.0;
        let unfolded = unfold(&table, &ucfg).unwrap();
        let grid = AngularGrid::new(vec![FRAC_PI_2]).unwrap();
        match fold(&unfolded, &grid, &FoldConfig::default()) {
            Err(AmplitudeError::PhiOutOfGrid { .. }) => {}
            other => panic!("expected PhiOutOfGrid, got {other:?}"),
        }
    }

    #[test]
    fn truncation_guard_fires_at_m_max_zero() {
        let model = synth::presets::fold_j20_1p();
        let table = model.generate().unwrap();
        let mut ucfg = UnfoldConfig::covering_m(2);
        ucfg.phi_step_deg = 30.0;
        let unfolded = unfold(&table, &ucfg).unwrap();
        let grid = AngularGrid::new(vec![90f64.to_radians()]).unwrap();
        let cfg = FoldConfig { m_max: 0, ..Default::default() };
        match fold(&unfolded, &grid, &cfg) {
            Err(AmplitudeError::TruncationTooCoarse { .. }) => {}
            other => panic!("expected TruncationTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn endpoint_routing_and_phi_grid_errors() {
        let model = synth::presets::fold_j20_0p();
        let table = model.generate().unwrap();
        let mut ucfg = UnfoldConfig::covering_m(2);
        ucfg.phi_step_deg = 30.0;
        let unfolded = unfold(&table, &ucfg).unwrap();
        // theta inside the forward band routes to the endpoint series
        let band = PI / (2.0 * 20.0);
        let grid = AngularGrid::new(vec![0.5 * band, FRAC_PI_2]).unwrap();
        let folded = fold(&unfolded, &grid, &FoldConfig::default()).unwrap();
        assert_eq!(folded.terms[0][0].routed, Some(ThetaRoute::ForwardEndpoint));
        assert_eq!(folded.terms[0][1].routed, None);
        let fwd = fold_endpoint(&unfolded, 0, Endpoint::Forward, &FoldConfig::default()).unwrap();
        assert!((folded.amplitude(0, 0) - fwd).norm() < 1e-12);
        // m_max beyond the phi grid range raises PhiOutOfGrid
        let cfg = FoldConfig { m_max: 6, ..Default::default() };
        match fold_endpoint(&unfolded, 0, Endpoint::Forward, &cfg) {
            Err(AmplitudeError::PhiOutOfGrid { .. }) => {}
            other => panic!("expected PhiOutOfGrid, got {other:?}"),
        }
    }

    #[test]
    fn angular_grid_parsing() {
        let g = AngularGrid::parse("10:170:40").unwrap();
        assert_eq!(g.thetas_rad.len(), 5);
        assert!((g.thetas_rad[0] - 10f64.to_radians()).abs() < 1e-15);
        assert!(AngularGrid::parse("10:170").is_err());
        assert!(AngularGrid::parse("170:10:5").is_err());
    }
}
