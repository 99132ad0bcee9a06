//! Chain per-energy CAM poles into Regge trajectories, fit them linearly in
//! energy, invert the fit to complex-energy poles, derive physical
//! observables, and compare CE-pole sets under a constant energy offset.
//!
//! Sign convention: continued S-matrix data in this toolkit puts resonance
//! poles in the upper half of the lambda plane and (for upward-drifting
//! trajectories) the lower half of the E plane. Because the literature is not
//! consistent about the Im E sign, reporting and lifetime formulas normalize
//! to Im E > 0 through [`CEPole::physical_e`] — a resonance must yield a
//! positive lifetime — and the raw signed value stays in [`CEPole::e_pole`].

use crate::pade::{build_approximant, find_poles_zeros, Axis, PadeError, PoleZeroConfig};
use crate::smatrix::{PartialWaveTable, SmatrixError};
use num_complex::Complex64;
use std::fmt::Write as _;
use thiserror::Error;

/// hbar in meV * s.
pub const HBAR_MEV_S: f64 = 6.582119569e-13;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("linear fit needs at least 3 points in the window, got {got}")]
    TooFewPoints { got: usize },
    #[error("|beta| = {beta_abs:.2e} is below 1e-12; the trajectory is not invertible to complex energy")]
    BetaNearZero { beta_abs: f64 },
    #[error("imaginary part {value} meV is not positive; lifetime undefined (pass the physical Im E > 0 pole)")]
    NonPositiveImaginaryPart { value: f64 },
    #[error("Im lambda = {value} is not positive; angular life undefined")]
    NonPositiveImLambda { value: f64 },
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Smatrix(#[from] SmatrixError),
}

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub e_mev: f64,
    pub lambda: Complex64,
    pub residue: Complex64,
}

/// Complex linear fit lambda(E) ~ alpha + beta E over a window.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub alpha: Complex64,
    /// per meV
    pub beta: Complex64,
    pub window: (f64, f64),
    pub rms: f64,
}

#[derive(Debug, Clone)]
pub struct ReggeTrajectory {
    pub label: String,
    pub points: Vec<TrajectoryPoint>,
    /// Fewer than three points: legal but unfittable.
    pub short: bool,
    pub fit: Option<LinearFit>,
}

/// Greedy nearest-neighbor chaining of per-energy poles across adjacent
/// energies: a pole continues the chain whose last lambda is nearest, if that
/// distance is within match_radius (default 1.0); leftovers start new chains.
/// Candidate order (and hence tie-breaking) is by smaller |delta lambda|, then
/// smaller Re lambda of the incoming pole, so the result is deterministic.
pub fn chain_trajectories(
    per_energy: &[(f64, Vec<(Complex64, Complex64)>)],
    match_radius: f64,
) -> Vec<ReggeTrajectory> {
    struct Chain {
        points: Vec<TrajectoryPoint>,
    }
    let mut chains: Vec<Chain> = Vec::new();
    for (e_mev, poles) in per_energy {
        // candidates: (|dlambda|, re lambda, pole index, chain index)
        let mut cands: Vec<(f64, f64, usize, usize)> = Vec::new();
        for (pi, &(lam, _)) in poles.iter().enumerate() {
            for (ci, chain) in chains.iter().enumerate() {
                let last = chain.points.last().unwrap();
                if (last.e_mev - *e_mev).abs() < f64::EPSILON {
                    continue; // already extended at this energy
                }
                let d = (last.lambda - lam).norm();
                if d <= match_radius {
                    cands.push((d, lam.re, pi, ci));
                }
            }
        }
        cands.sort_by(|a, b| {
            (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut pole_used = vec![false; poles.len()];
        let mut chain_used = vec![false; chains.len()];
        for (_, _, pi, ci) in cands {
            if pole_used[pi] || chain_used[ci] {
                continue;
            }
            pole_used[pi] = true;
            chain_used[ci] = true;
            let (lam, res) = poles[pi];
            chains[ci].points.push(TrajectoryPoint { e_mev: *e_mev, lambda: lam, residue: res });
        }
        // sorted by Re lambda for deterministic labels
        let mut fresh: Vec<usize> =
            (0..poles.len()).filter(|&pi| !pole_used[pi]).collect();
        fresh.sort_by(|&a, &b| {
            poles[a].0.re.partial_cmp(&poles[b].0.re).unwrap_or(std::cmp::Ordering::Equal)
        });
        for pi in fresh {
            let (lam, res) = poles[pi];
            chains.push(Chain {
                points: vec![TrajectoryPoint { e_mev: *e_mev, lambda: lam, residue: res }],
            });
        }
    }
    chains
        .into_iter()
        .enumerate()
        .map(|(i, c)| ReggeTrajectory {
            label: format!("T{}", i + 1),
            short: c.points.len() < 3,
            points: c.points,
            fit: None,
        })
        .collect()
}

/// Complex least squares of lambda on real E over the window (inclusive).
pub fn fit_linear(
    traj: &ReggeTrajectory,
    window: Option<(f64, f64)>,
) -> Result<LinearFit, TrajectoryError> {
    let pts: Vec<&TrajectoryPoint> = match window {
        Some((lo, hi)) => traj
            .points
            .iter()
            .filter(|p| p.e_mev >= lo - 1e-12 && p.e_mev <= hi + 1e-12)
            .collect(),
        None => traj.points.iter().collect(),
    };
    if pts.len() < 3 {
        return Err(TrajectoryError::TooFewPoints { got: pts.len() });
    }
    let n = pts.len() as f64;
    let s1: f64 = pts.iter().map(|p| p.e_mev).sum();
    let s2: f64 = pts.iter().map(|p| p.e_mev * p.e_mev).sum();
    let b0: Complex64 = pts.iter().map(|p| p.lambda).sum();
    let b1: Complex64 = pts.iter().map(|p| p.lambda * p.e_mev).sum();
    let det = n * s2 - s1 * s1;
    let beta = (b1 * n - b0 * s1) / det;
    let alpha = (b0 - beta * s1) / n;
    let rms = (pts
        .iter()
        .map(|p| (alpha + beta * p.e_mev - p.lambda).norm_sqr())
        .sum::<f64>()
        / n)
        .sqrt();
    let window = window.unwrap_or_else(|| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &pts {
            lo = lo.min(p.e_mev);
            hi = hi.max(p.e_mev);
        }
        (lo, hi)
    });
    Ok(LinearFit { alpha, beta, window, rms })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CESource {
    InvertedFromCam,
    DirectPadeInE,
}

impl std::fmt::Display for CESource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CESource::InvertedFromCam => write!(f, "inverted"),
            CESource::DirectPadeInE => write!(f, "direct"),
        }
    }
}

/// A complex-energy pole at fixed angular momentum.
#[derive(Debug, Clone, Copy)]
pub struct CEPole {
    pub j: f64,
    /// Raw signed value as produced by its source.
    pub e_pole: Complex64,
    pub source: CESource,
}

impl CEPole {
    /// Im E > 0 normalization: the convention a lifetime requires.
    pub fn physical_e(&self) -> Complex64 {
        if self.e_pole.im < 0.0 {
            self.e_pole.conj()
        } else {
            self.e_pole
        }
    }
}

/// Invert a linear trajectory fit to complex energies: E(x) = a + b x with
/// a = -alpha / beta, b = 1 / beta. The variable x is the one the trajectory
/// was fitted in — the CAM variable lambda = J + 1/2 — so pass J + 1/2 to ask
/// where physical integer J crosses the trajectory.
pub fn invert_to_ce(fit: &LinearFit, values: &[f64]) -> Result<Vec<CEPole>, TrajectoryError> {
    if fit.beta.norm() < 1e-12 {
        return Err(TrajectoryError::BetaNearZero { beta_abs: fit.beta.norm() });
    }
    let a = -fit.alpha / fit.beta;
    let b = Complex64::new(1.0, 0.0) / fit.beta;
    Ok(values
        .iter()
        .map(|&x| CEPole { j: x, e_pole: a + b * x, source: CESource::InvertedFromCam })
        .collect())
}

/// Per-energy significant upper-half CAM poles straight from a table, ready
/// for [`chain_trajectories`] — a lighter path than a full unfold when only
/// trajectories are wanted.
pub fn per_energy_cam_poles(
    table: &PartialWaveTable,
    cfg: Option<PoleZeroConfig>,
) -> Result<Vec<(f64, Vec<(Complex64, Complex64)>)>, TrajectoryError> {
    let cfg = cfg.unwrap_or_else(|| PoleZeroConfig::for_jmax(table.jmax));
    let mut out = Vec::with_capacity(table.n_energies());
    for ei in 0..table.n_energies() {
        let pairs = table.slice_at_energy(ei)?;
        let (nodes, values): (Vec<f64>, Vec<Complex64>) = pairs.into_iter().unzip();
        let approximant =
            build_approximant(&nodes, &values, Axis::Lambda, table.energies_mev[ei])?;
        let set = find_poles_zeros(&approximant, &cfg)?;
        let mut poles: Vec<(Complex64, Complex64)> = set
            .poles
            .iter()
            .filter(|p| p.significant && p.position.im > 0.0)
            .map(|p| (p.position, p.residue))
            .collect();
        poles.sort_by(|a, b| {
            (a.0.im, a.0.re).partial_cmp(&(b.0.im, b.0.re)).unwrap_or(std::cmp::Ordering::Equal)
        });
        out.push((table.energies_mev[ei], poles));
    }
    Ok(out)
}

/// Continue S^J(E) along the energy axis at fixed J and extract its
/// complex-energy poles.
pub fn ce_poles_direct(
    table: &PartialWaveTable,
    j: usize,
    cfg: Option<PoleZeroConfig>,
) -> Result<Vec<CEPole>, TrajectoryError> {
    let pairs = table.slice_at_j(j)?;
    let (nodes, values): (Vec<f64>, Vec<Complex64>) = pairs.into_iter().unzip();
    let approximant = build_approximant(&nodes, &values, Axis::Energy, j as f64)?;
    let cfg = cfg.unwrap_or_else(|| {
        PoleZeroConfig::for_energy_axis(nodes.len(), nodes[0], *nodes.last().unwrap())
    });
    let set = find_poles_zeros(&approximant, &cfg)?;
    Ok(set
        .poles
        .iter()
        .filter(|p| !p.spurious)
        .map(|p| CEPole { j: j as f64, e_pole: p.position, source: CESource::DirectPadeInE })
        .collect())
}

/// Physical observables of one resonance pole.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceObservables {
    /// tau = hbar / (2 Im E), seconds.
    pub lifetime_s: f64,
    /// 1 / (2 Im lambda) radians, in degrees; None without a CAM pole.
    pub angular_life_deg: Option<f64>,
    /// B = Re E / (J (J+1)) with J = round(Re lambda - 1/2).
    pub rotational_constant_mev: f64,
    /// omega = Re J / I when a moment of inertia is supplied.
    pub angular_velocity: Option<f64>,
    /// The integer J used in B's denominator.
    pub j_used: i64,
}

/// Observables from a CAM pole paired with its complex energy. `e_pole` must
/// be the physical Im E > 0 value (see [`CEPole::physical_e`]).
pub fn observables_cam(
    lambda: Complex64,
    e_pole: Complex64,
    i_moment: Option<f64>,
) -> Result<ResonanceObservables, TrajectoryError> {
    if e_pole.im <= 0.0 {
        return Err(TrajectoryError::NonPositiveImaginaryPart { value: e_pole.im });
    }
    if lambda.im <= 0.0 {
        return Err(TrajectoryError::NonPositiveImLambda { value: lambda.im });
    }
    let re_j = lambda.re - 0.5;
    let j_used = re_j.round() as i64;
    Ok(ResonanceObservables {
        lifetime_s: HBAR_MEV_S / (2.0 * e_pole.im),
        angular_life_deg: Some((1.0 / (2.0 * lambda.im)).to_degrees()),
        rotational_constant_mev: e_pole.re / (j_used as f64 * (j_used as f64 + 1.0)),
        angular_velocity: i_moment.map(|i| re_j / i),
        j_used,
    })
}

/// Observables from a CE pole alone (no CAM pole, so no angular life).
pub fn observables_ce(
    pole: &CEPole,
    i_moment: Option<f64>,
) -> Result<ResonanceObservables, TrajectoryError> {
    let e = pole.physical_e();
    if e.im <= 0.0 {
        return Err(TrajectoryError::NonPositiveImaginaryPart { value: e.im });
    }
    let j_used = pole.j.round() as i64;
    Ok(ResonanceObservables {
        lifetime_s: HBAR_MEV_S / (2.0 * e.im),
        angular_life_deg: None,
        rotational_constant_mev: e.re / (j_used as f64 * (j_used as f64 + 1.0)),
        angular_velocity: i_moment.map(|i| pole.j / i),
        j_used,
    })
}

/// One matched pair in a CE-set comparison.
#[derive(Debug, Clone, Copy)]
pub struct CEPair {
    pub j_a: f64,
    pub j_b: f64,
    pub e_a: Complex64,
    /// set_b value after the Re-shift by -offset.
    pub e_b_shifted: Complex64,
    pub d_re: f64,
    pub d_im: f64,
}

#[derive(Debug, Clone)]
pub struct CEComparison {
    pub offset_mev: f64,
    pub pairs: Vec<CEPair>,
    /// Total offset that zeroes the mean Re discrepancy (minimizes RMS d_re).
    pub best_fit_offset_mev: Option<f64>,
    pub warning: Option<String>,
}

/// Compare two CE-pole sets under a constant energy offset: shift set_b's
/// Re E down by `offset_mev`, match poles by nearest J (within 1/2), report
/// per-pair discrepancies and the offset that would minimize the RMS Re
/// discrepancy. Both sets are normalized to Im E > 0 before comparison.
pub fn compare_ce_sets(set_a: &[CEPole], set_b: &[CEPole], offset_mev: f64) -> CEComparison {
    let mut pairs = Vec::new();
    let mut b_used = vec![false; set_b.len()];
    let mut raw_re_diffs = Vec::new();
    for a in set_a {
        let mut best: Option<(f64, usize)> = None;
        for (bi, b) in set_b.iter().enumerate() {
            if b_used[bi] {
                continue;
            }
            let d = (a.j - b.j).abs();
            if d <= 0.5 + 1e-9 && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, bi));
            }
        }
        if let Some((_, bi)) = best {
            b_used[bi] = true;
            let ea = a.physical_e();
            let eb = set_b[bi].physical_e();
            let eb_shifted = Complex64::new(eb.re - offset_mev, eb.im);
            raw_re_diffs.push(eb.re - ea.re);
            pairs.push(CEPair {
                j_a: a.j,
                j_b: set_b[bi].j,
                e_a: ea,
                e_b_shifted: eb_shifted,
                d_re: eb_shifted.re - ea.re,
                d_im: eb_shifted.im - ea.im,
            });
        }
    }
    let best_fit_offset_mev = if raw_re_diffs.is_empty() {
        None
    } else {
        Some(raw_re_diffs.iter().sum::<f64>() / raw_re_diffs.len() as f64)
    };
    let warning = if pairs.is_empty() {
        Some("no poles matched between the two sets (disjoint J ranges?)".to_string())
    } else {
        None
    };
    CEComparison { offset_mev, pairs, best_fit_offset_mev, warning }
}

/// CSV for chained trajectories.
pub fn trajectories_to_csv(trajectories: &[ReggeTrajectory]) -> String {
    let mut out = String::from("label,E_meV,re_lambda,im_lambda,re_res,im_res\n");
    for t in trajectories {
        for p in &t.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                t.label, p.e_mev, p.lambda.re, p.lambda.im, p.residue.re, p.residue.im
            );
        }
    }
    out
}

/// CSV for CE poles with observables. The angular-life column needs a CAM
/// pole, supplied per row through `im_lambda` (same order); None leaves the
/// column empty. Rows whose lifetime is undefined carry an empty lifetime.
pub fn ce_poles_to_csv(poles: &[CEPole], im_lambda: &[Option<f64>]) -> String {
    let mut out = String::from("J,source,re_E_meV,im_E_meV,lifetime_s,angular_life_deg,B_meV\n");
    for (i, p) in poles.iter().enumerate() {
        let e = p.physical_e();
        let life = if e.im > 0.0 {
            format!("{}", HBAR_MEV_S / (2.0 * e.im))
        } else {
            String::new()
        };
        let ang = im_lambda
            .get(i)
            .copied()
            .flatten()
            .filter(|&im| im > 0.0)
            .map(|im| format!("{}", (1.0 / (2.0 * im)).to_degrees()))
            .unwrap_or_default();
        let j = p.j.round();
        let b = e.re / (j * (j + 1.0));
        let _ = writeln!(out, "{},{},{},{},{},{},{}", p.j, p.source, e.re, e.im, life, ang, b);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drifting_pole_lists(
        alpha: Complex64,
        beta: Complex64,
        energies: &[f64],
    ) -> Vec<(f64, Vec<(Complex64, Complex64)>)> {
        energies
            .iter()
            .map(|&e| (e, vec![(alpha + beta * e, Complex64::new(1e-2, 0.0))]))
            .collect()
    }

    #[test]
    fn chains_single_linear_drift() {
        let energies: Vec<f64> = (0..9).map(|i| 60.0 + 25.0 * i as f64).collect();
        // 25 meV spacing at beta = 0.03 drifts 0.75 per step, inside the
        // default radius 1.0
        let per_e = drifting_pole_lists(
            Complex64::new(10.0, 0.9),
            Complex64::new(0.03, 0.0),
            &energies,
        );
        let trajs = chain_trajectories(&per_e, 1.0);
        assert_eq!(trajs.len(), 1);
        assert_eq!(trajs[0].points.len(), 9);
        assert!(!trajs[0].short);
        assert!(chain_trajectories(&[], 1.0).is_empty());
    }

    #[test]
    fn crossing_chains_stay_separate() {
        // Re lambda paths cross mid-grid; Im gap 1.5 with radius 0.5 keeps
        // the chains apart because matching is in complex lambda
        let energies: Vec<f64> = (0..11).map(|i| 100.0 + 4.0 * i as f64).collect();
        let per_e: Vec<(f64, Vec<(Complex64, Complex64)>)> = energies
            .iter()
            .map(|&e| {
                let up = Complex64::new(10.0 + 0.1 * (e - 100.0), 0.5);
                let down = Complex64::new(14.0 - 0.1 * (e - 100.0), 2.0);
                (e, vec![(up, Complex64::new(1e-2, 0.0)), (down, Complex64::new(1e-3, 0.0))])
            })
            .collect();
        let trajs = chain_trajectories(&per_e, 0.5);
        assert_eq!(trajs.len(), 2);
        for t in &trajs {
            assert_eq!(t.points.len(), 11, "{} broke", t.label);
            let im0 = t.points[0].lambda.im;
            assert!(t.points.iter().all(|p| (p.lambda.im - im0).abs() < 1e-12));
        }
    }

    #[test]
    fn linear_fit_recovers_exact_coefficients() {
        let energies: Vec<f64> = (0..9).map(|i| 60.0 + 25.0 * i as f64).collect();
        let alpha = Complex64::new(10.0, 0.95);
        let beta = Complex64::new(0.03, 0.0);
        let per_e = drifting_pole_lists(alpha, beta, &energies);
        let trajs = chain_trajectories(&per_e, 1.0);
        let fit = fit_linear(&trajs[0], None).unwrap();
        assert!((fit.alpha - alpha).norm() < 1e-10);
        assert!((fit.beta - beta).norm() < 1e-10);
        assert!(fit.rms < 1e-10);
    }

    #[test]
    fn quadratic_perturbation_reports_its_norm() {
        // perturb by a component orthogonal to span{1, E}: fit unchanged,
        // rms = ||perturbation|| / sqrt(n)
        let energies: Vec<f64> = (0..9).map(|i| 60.0 + 25.0 * i as f64).collect();
        let alpha = Complex64::new(10.0, 0.95);
        let beta = Complex64::new(0.03, 0.0);
        // Gram-Schmidt E^2 against {1, E}
        let n = energies.len() as f64;
        let s1: f64 = energies.iter().sum();
        let s2: f64 = energies.iter().map(|e| e * e).sum();
        let det = n * s2 - s1 * s1;
        let b0: f64 = energies.iter().map(|e| e * e).sum();
        let b1: f64 = energies.iter().map(|e| e * e * e).sum();
        let cb = (b1 * n - b0 * s1) / det;
        let ca = (b0 - cb * s1) / n;
        let qperp: Vec<f64> = energies.iter().map(|&e| e * e - ca - cb * e).collect();
        let eps = 1e-3;
        let per_e: Vec<(f64, Vec<(Complex64, Complex64)>)> = energies
            .iter()
            .zip(&qperp)
            .map(|(&e, &q)| {
                (e, vec![(alpha + beta * e + eps * q, Complex64::new(1e-2, 0.0))])
            })
            .collect();
        let trajs = chain_trajectories(&per_e, 10.0);
        let fit = fit_linear(&trajs[0], None).unwrap();
        assert!((fit.alpha - alpha).norm() < 1e-9);
        assert!((fit.beta - beta).norm() < 1e-11);
        let want_rms = eps * (qperp.iter().map(|q| q * q).sum::<f64>() / n).sqrt();
        assert!((fit.rms - want_rms).abs() < 1e-12 * want_rms.max(1.0));
    }

    #[test]
    fn too_few_points_rejected() {
        let per_e = drifting_pole_lists(
            Complex64::new(10.0, 0.9),
            Complex64::new(0.08, 0.0),
            &[100.0, 104.0],
        );
        let trajs = chain_trajectories(&per_e, 1.0);
        assert!(trajs[0].short);
        assert!(matches!(
            fit_linear(&trajs[0], None),
            Err(TrajectoryError::TooFewPoints { got: 2 })
        ));
    }

    #[test]
    fn inversion_algebra() {
        let fit = LinearFit {
            alpha: Complex64::new(10.0, 0.9),
            beta: Complex64::new(0.08, 0.0),
            window: (0.0, 1.0),
            rms: 0.0,
        };
        let ce = invert_to_ce(&fit, &[12.0]).unwrap();
        assert!((ce[0].e_pole - Complex64::new(25.0, -11.25)).norm() < 1e-12);
        assert_eq!(ce[0].source, CESource::InvertedFromCam);
        // physical normalization flips to Im > 0
        assert!(ce[0].physical_e().im > 0.0);
        let degenerate = LinearFit { beta: Complex64::new(0.0, 0.0), ..fit };
        assert!(matches!(
            invert_to_ce(&degenerate, &[12.0]),
            Err(TrajectoryError::BetaNearZero { .. })
        ));
    }

    #[test]
    fn inversion_is_exact_inverse_on_linear_data() {
        let alpha = Complex64::new(10.0, 0.95);
        let beta = Complex64::new(0.03, 0.0);
        let fit = LinearFit { alpha, beta, window: (60.0, 260.0), rms: 0.0 };
        for &e0 in &[60.0, 137.5, 260.0] {
            let lam = alpha + beta * e0;
            // invert at the (complex) trajectory value's real part is not the
            // identity; the exact inverse takes the full lambda value
            let a = -fit.alpha / fit.beta;
            let b = Complex64::new(1.0, 0.0) / fit.beta;
            let back = a + b * lam;
            assert!((back - Complex64::new(e0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn observable_formulas() {
        let obs = observables_cam(
            Complex64::new(12.49, 0.95),
            Complex64::new(100.0, 1.6455),
            None,
        )
        .unwrap();
        // angular life 1/(2*0.95) rad = 30.157 deg, within the quoted band
        let ang = obs.angular_life_deg.unwrap();
        assert!((ang - 30.16).abs() < 0.05, "angular life {ang}");
        // lifetime formula value and roundtrip
        let want_tau = HBAR_MEV_S / (2.0 * 1.6455);
        assert!((obs.lifetime_s - want_tau).abs() < 1e-20);
        let im_back = HBAR_MEV_S / (2.0 * obs.lifetime_s);
        assert!((im_back - 1.6455).abs() / 1.6455 < 5e-3);
        // J rounding rule: Re lambda - 1/2 = 11.99 -> J = 12
        assert_eq!(obs.j_used, 12);
        assert!((obs.rotational_constant_mev - 100.0 / 156.0).abs() < 1e-12);
        // omega = Re J / I
        let obs2 = observables_cam(
            Complex64::new(12.49, 0.95),
            Complex64::new(100.0, 1.6455),
            Some(2.0),
        )
        .unwrap();
        assert!((obs2.angular_velocity.unwrap() - 11.99 / 2.0).abs() < 1e-12);
        // non-positive Im E rejected
        assert!(matches!(
            observables_cam(Complex64::new(12.0, 0.9), Complex64::new(100.0, -1.0), None),
            Err(TrajectoryError::NonPositiveImaginaryPart { .. })
        ));
    }

    #[test]
    fn offset_comparison() {
        let set_a: Vec<CEPole> = (12..=17)
            .map(|j| CEPole {
                j: j as f64,
                e_pole: Complex64::new(20.0 * j as f64, -10.0),
                source: CESource::DirectPadeInE,
            })
            .collect();
        let set_b: Vec<CEPole> = set_a
            .iter()
            .map(|p| CEPole {
                e_pole: p.e_pole + Complex64::new(13.0, 0.0),
                ..*p
            })
            .collect();
        let cmp = compare_ce_sets(&set_a, &set_b, 13.0);
        assert_eq!(cmp.pairs.len(), 6);
        for pair in &cmp.pairs {
            assert!(pair.d_re.abs() < 1e-12);
            assert!(pair.d_im.abs() < 1e-12);
        }
        assert!((cmp.best_fit_offset_mev.unwrap() - 13.0).abs() < 1e-12);
        // offset 0 still reports the 13 meV best fit
        let cmp0 = compare_ce_sets(&set_a, &set_b, 0.0);
        assert!((cmp0.best_fit_offset_mev.unwrap() - 13.0).abs() < 1e-12);
        // disjoint J sets: empty pairs plus a warning
        let far: Vec<CEPole> = set_a
            .iter()
            .map(|p| CEPole { j: p.j + 40.0, ..*p })
            .collect();
        let none = compare_ce_sets(&set_a, &far, 0.0);
        assert!(none.pairs.is_empty());
        assert!(none.warning.is_some());
    }

    #[test]
    fn csv_shapes() {
        let per_e = drifting_pole_lists(
            Complex64::new(10.0, 0.9),
            Complex64::new(0.08, 0.0),
            &[100.0, 104.0, 108.0],
        );
        let trajs = chain_trajectories(&per_e, 1.0);
        let csv = trajectories_to_csv(&trajs);
        assert!(csv.starts_with("label,E_meV,re_lambda,im_lambda,re_res,im_res\n"));
        assert_eq!(csv.lines().count(), 4);
        let ce = vec![CEPole {
            j: 12.0,
            e_pole: Complex64::new(83.0, -31.0),
            source: CESource::DirectPadeInE,
        }];
        let csv = ce_poles_to_csv(&ce, &[Some(0.95)]);
        assert!(csv.starts_with("J,source,re_E_meV,im_E_meV,lifetime_s,angular_life_deg,B_meV\n"));
        let row = csv.lines().nth(1).unwrap();
        assert!(row.starts_with("12,direct,83,31,"));
    }
}
