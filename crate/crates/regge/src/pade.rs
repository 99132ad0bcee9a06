//! Rational continuation of sampled S-matrix slices and pole/zero/residue
//! extraction in the complex plane.
//!
//! The continuation is a Thiele continued fraction built with greedy node
//! ordering and evaluated at full depth, which reproduces every usable node
//! exactly. Poles and zeros come from converting the continued fraction to a
//! numerator/denominator pair — fitted in the Chebyshev basis through an
//! adaptive SVD null-space solve — and taking colleague-matrix eigenvalues.
//! Residues are evaluated through the root-factored form of that pair, with an
//! independent circular-contour cross-check.

use crate::numerics::{chebder, chebroots, chebval};
use ndarray::Array2;
use ndarray_linalg::SVD;
use num_complex::Complex64;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error)]
pub enum PadeError {
    #[error("degenerate samples: {detail}")]
    DegenerateSamples { detail: String },
    #[error("numerically singular construction: {detail}")]
    NumericallySingular { detail: String },
    #[error("ill-conditioned extraction: {detail}")]
    IllConditioned { detail: String },
    #[error("multiple (or near-multiple) denominator root at {position}")]
    MultipleRoot { position: Complex64 },
}

/// Which physical variable the approximant continues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    /// Complex angular momentum lambda = J + 1/2 at fixed energy.
    Lambda,
    /// Complex energy at fixed J.
    Energy,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Lambda => write!(f, "lambda"),
            Axis::Energy => write!(f, "E"),
        }
    }
}

/// A node the construction could not extend through, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedNode {
    pub node: f64,
    pub reason: String,
}

/// Diagnostics accumulated while building an approximant.
#[derive(Debug, Clone, Default)]
pub struct ConstructionLog {
    /// Max interpolation residual over the not-yet-used nodes, per depth.
    pub residual_history: Vec<f64>,
    /// Running condition estimate: the largest ratio of consecutive
    /// continued-fraction coefficient magnitudes.
    pub max_coeff_ratio: f64,
    pub skipped: Vec<SkippedNode>,
}

/// Thiele continued-fraction interpolant of a sampled complex function along
/// one real axis.
///
/// `nodes`/`values` are stored in the greedy construction order; `cf_coeffs`
/// aligns with them. Evaluation always runs at full depth: the continued
/// fraction reproduces every used node exactly, and levels past the point
/// where the data is resolved self-cancel (the inverse differences there get
/// large, so their reciprocal contributions vanish).
#[derive(Debug, Clone)]
pub struct RationalApproximant {
    pub axis: Axis,
    /// The orthogonal coordinate: E for a lambda-axis approximant, lambda for
    /// an energy-axis one.
    pub anchor: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub cf_coeffs: Vec<Complex64>,
    pub log: ConstructionLog,
    domain: (f64, f64),
}

/// Relative interpolation tolerance the construction guarantees at used nodes.
pub const INTERP_TOL: f64 = 1e-12;

pub fn build_approximant(
    nodes: &[f64],
    values: &[Complex64],
    axis: Axis,
    anchor: f64,
) -> Result<RationalApproximant, PadeError> {
    if nodes.len() != values.len() {
        return Err(PadeError::DegenerateSamples {
            detail: format!("{} nodes vs {} values", nodes.len(), values.len()),
        });
    }
    if nodes.len() < 4 {
        return Err(PadeError::DegenerateSamples {
            detail: format!("need at least 4 samples, got {}", nodes.len()),
        });
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(PadeError::DegenerateSamples {
                    detail: format!("duplicated node {}", nodes[i]),
                });
            }
        }
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(PadeError::DegenerateSamples { detail: "all samples are zero".into() });
    }

    let n = nodes.len();
    let mut log = ConstructionLog::default();
    let start = (0..n).max_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm())).unwrap();
    let mut used: Vec<usize> = vec![start];
    let mut coeffs: Vec<Complex64> = vec![values[start]];
    let mut dead: Vec<bool> = vec![false; n]; // nodes set aside as unusable

    loop {
        let remaining: Vec<usize> =
            (0..n).filter(|i| !used.contains(i) && !dead[*i]).collect();
        if remaining.is_empty() {
            break;
        }
        // residuals of the current-depth fraction at the remaining nodes
        let mut order: Vec<(usize, f64)> = remaining
            .iter()
            .map(|&i| {
                let v = eval_cf(&used, &coeffs, nodes, Complex64::new(nodes[i], 0.0));
                (i, (v - values[i]).norm())
            })
            .collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1));
        log.residual_history.push(order[0].1);

        // extend through the worst-fit node; fall back to the next candidate
        // if the inverse-difference chain degenerates there
        let mut extended = false;
        for &(idx, _) in &order {
            let mut g = values[idx];
            let mut ok = true;
            for (k, &uk) in used.iter().enumerate() {
                let denom = g - coeffs[k];
                if denom.norm() < 1e-280 * (1.0 + g.norm()) {
                    ok = false;
                    break;
                }
                g = Complex64::new(nodes[idx] - nodes[uk], 0.0) / denom;
            }
            if ok && g.is_finite() {
                used.push(idx);
                coeffs.push(g);
                extended = true;
                break;
            }
            dead[idx] = true;
            log.skipped.push(SkippedNode {
                node: nodes[idx],
                reason: "inverse-difference chain degenerated (value already matched)".into(),
            });
        }
        if !extended {
            break;
        }
    }

    for w in coeffs.windows(2) {
        if w[0].norm() > 0.0 {
            log.max_coeff_ratio = log.max_coeff_ratio.max(w[1].norm() / w[0].norm());
        }
    }

    let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let approx = RationalApproximant {
        axis,
        anchor,
        nodes: used.iter().map(|&i| nodes[i]).collect(),
        values: used.iter().map(|&i| values[i]).collect(),
        cf_coeffs: coeffs,
        log,
        domain: (lo, hi),
    };

    // interpolation invariant at every used node
    for (x, v) in approx.nodes.iter().zip(&approx.values) {
        let r = approx.eval(Complex64::new(*x, 0.0));
        if (r - v).norm() > INTERP_TOL * (1.0 + v.norm()).max(scale * 1e-3) {
            return Err(PadeError::NumericallySingular {
                detail: format!(
                    "interpolation failed at node {x}: |err| = {:.2e}",
                    (r - v).norm()
                ),
            });
        }
    }
    Ok(approx)
}

fn eval_cf(used: &[usize], coeffs: &[Complex64], nodes: &[f64], z: Complex64) -> Complex64 {
    let d = coeffs.len();
    let mut v = coeffs[d - 1];
    for k in (0..d - 1).rev() {
        let dx = z - nodes[used[k]];
        let q = dx / v;
        let q = if q.is_finite() {
            q
        } else if dx.norm_sqr() == 0.0 {
            ZERO
        } else {
            Complex64::new(1e280, 0.0)
        };
        v = coeffs[k] + q;
    }
    v
}

impl RationalApproximant {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = self.cf_coeffs.len();
        let mut v = self.cf_coeffs[d - 1];
        for k in (0..d - 1).rev() {
            let dx = z - self.nodes[k];
            let q = dx / v;
            let q = if q.is_finite() {
                q
            } else if dx.norm_sqr() == 0.0 {
                ZERO
            } else {
                Complex64::new(1e280, 0.0)
            };
            v = self.cf_coeffs[k] + q;
        }
        v
    }

    /// Value and complex derivative, propagated analytically through the
    /// continued-fraction levels.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let d = self.cf_coeffs.len();
        let mut v = self.cf_coeffs[d - 1];
        let mut dv = ZERO;
        for k in (0..d - 1).rev() {
            let dx = z - self.nodes[k];
            let nv = self.cf_coeffs[k] + dx / v;
            let ndv = (v - dx * dv) / (v * v);
            if nv.is_finite() && ndv.is_finite() {
                v = nv;
                dv = ndv;
            } else {
                v = self.cf_coeffs[k] + if dx.norm_sqr() == 0.0 { ZERO } else { Complex64::new(1e280, 0.0) };
                dv = ZERO;
            }
        }
        (v, dv)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// Search/classification settings for pole-zero extraction.
#[derive(Debug, Clone)]
pub struct PoleZeroConfig {
    /// Re-axis search box (default 0 ..= J_max + 1 in lambda units).
    pub box_re: (f64, f64),
    /// Im-axis search box (default 0 ..= im_cap).
    pub box_im: (f64, f64),
    /// Trust-region half-height: positions with |Im| beyond this are dropped
    /// regardless of the box (continuation noise grows like e^{pi Im lambda}).
    pub im_cap: f64,
    /// Highest numerator/denominator degree the adaptive fit may use.
    pub max_degree: usize,
    /// Positions closer than this are treated as one pole.
    pub dedup_tol: f64,
    /// A pole-zero pair closer than this is a Froissart doublet (spurious).
    pub doublet_radius: f64,
    /// Minimum |residue| for a pole to count as significant.
    pub res_min: f64,
    /// Maximum Im(lambda) for a pole to count as significant.
    pub im_max: f64,
    /// Radius of the circular contour used to cross-check residues.
    pub contour_radius: f64,
    /// Relative N/D' vs contour disagreement that flags ill-conditioning.
    pub crosscheck_tol: f64,
}

impl PoleZeroConfig {
    /// Defaults for a lambda-axis approximant with the given J_max.
    pub fn for_jmax(jmax: usize) -> Self {
        Self {
            box_re: (0.0, jmax as f64 + 1.0),
            box_im: (0.0, 4.0),
            im_cap: 4.0,
            max_degree: (jmax / 2).max(4),
            dedup_tol: 1e-8,
            doublet_radius: 1e-3,
            res_min: 1e-4,
            im_max: 3.0,
            contour_radius: 1e-3,
            crosscheck_tol: 1e-6,
        }
    }

    /// Defaults for an energy-axis approximant sampled at `n` energies over
    /// [e_lo, e_hi].
    pub fn for_energy_axis(n: usize, e_lo: f64, e_hi: f64) -> Self {
        let pad = 0.25 * (e_hi - e_lo);
        let span = e_hi - e_lo;
        Self {
            box_re: (e_lo - pad, e_hi + pad),
            box_im: (-span, span),
            im_cap: span,
            max_degree: ((n.saturating_sub(1)) / 2).max(2),
            dedup_tol: 1e-8,
            doublet_radius: 1e-3,
            res_min: 0.0,
            im_max: span,
            contour_radius: 1e-3,
            crosscheck_tol: 1e-6,
        }
    }
}

/// One extracted pole with both residue determinations and classification.
#[derive(Debug, Clone)]
pub struct PoleInfo {
    pub position: Complex64,
    /// N(p)/D'(p) through the root-factored fitted pair.
    pub residue: Complex64,
    /// (2 pi i)^{-1} contour integral of the interpolant around the pole.
    pub contour_residue: Complex64,
    /// Relative disagreement between the two residue determinations.
    pub crosscheck_rel: f64,
    /// Part of a Froissart doublet: a zero sits within `doublet_radius`.
    pub spurious: bool,
    /// Physically usable: not spurious, Im <= im_max, |residue| >= res_min.
    pub significant: bool,
    /// The two residue determinations disagree beyond `crosscheck_tol`.
    pub ill_conditioned: bool,
}

/// Poles and zeros of one approximant inside a search box, classified.
#[derive(Debug, Clone, Default)]
pub struct PoleSet {
    /// Sorted by Re(position), deduped.
    pub poles: Vec<PoleInfo>,
    pub zeros: Vec<Complex64>,
    /// Degree the adaptive numerator/denominator fit settled on.
    pub fit_degree: usize,
}

impl PoleSet {
    pub fn significant(&self) -> impl Iterator<Item = &PoleInfo> {
        self.poles.iter().filter(|p| p.significant)
    }
}

/// Fitted numerator/denominator pair in the Chebyshev basis, with refined
/// roots and calibrated leading factors — enough to evaluate residues without
/// touching the raw (noise-amplifying) trailing coefficients.
struct RatioFit {
    mid: f64,
    half: f64,
    deg: usize,
    /// t-plane roots of numerator and denominator (Newton-refined on the
    /// fitted polynomials themselves).
    num_roots: Vec<Complex64>,
    den_roots: Vec<Complex64>,
    num_lead: Complex64,
    den_lead: Complex64,
}

impl RatioFit {
    fn to_lambda(&self, t: Complex64) -> Complex64 {
        Complex64::new(self.mid, 0.0) + self.half * t
    }

    /// Residue of N/D at den_roots[i], in problem-plane units.
    fn residue(&self, i: usize) -> Complex64 {
        let p = self.den_roots[i];
        let mut num = self.num_lead;
        for &z in &self.num_roots {
            num *= p - z;
        }
        let mut den = self.den_lead;
        for (k, &q) in self.den_roots.iter().enumerate() {
            if k != i {
                den *= p - q;
            }
        }
        num / den * self.half
    }
}

fn ratio_fit(
    approx: &RationalApproximant,
    max_degree: usize,
) -> Result<RatioFit, PadeError> {
    let (lo, hi) = approx.domain;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut chosen: Option<(Vec<Complex64>, Vec<Complex64>, usize)> = None;
    for deg in 2..=max_degree.max(2) {
        let m = 8 * (deg + 1);
        let tq: Vec<f64> = (0..m)
            .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos())
            .collect();
        let rv: Vec<Complex64> = tq
            .iter()
            .map(|&t| approx.eval(Complex64::new(mid + half * t, 0.0)))
            .collect();
        let scale = rv.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(PadeError::DegenerateSamples { detail: "zero function".into() });
        }
        // linearized null-space problem [N-basis | -R*D-basis]
        let cols = 2 * (deg + 1);
        let mut a = Array2::<Complex64>::zeros((m, cols));
        for (r, &t) in tq.iter().enumerate() {
            // Chebyshev Vandermonde row
            let mut t0 = Complex64::new(1.0, 0.0);
            let mut t1 = Complex64::new(t, 0.0);
            for c in 0..=deg {
                let tv = if c == 0 {
                    t0
                } else if c == 1 {
                    t1
                } else {
                    let t2 = 2.0 * t * t1 - t0;
                    t0 = t1;
                    t1 = t2;
                    t2
                };
                a[[r, c]] = tv;
                a[[r, deg + 1 + c]] = -(rv[r] / scale) * tv;
            }
        }
        let (_, s, vt) = a.svd(false, true).map_err(|e| PadeError::NumericallySingular {
            detail: format!("SVD failed during ratio conversion: {e}"),
        })?;
        let vt = vt.ok_or_else(|| PadeError::NumericallySingular {
            detail: "SVD returned no right singular vectors".into(),
        })?;
        let smin = s[s.len() - 1];
        if smin <= 1e-13 * s[0] || deg == max_degree.max(2) {
            let last = vt.nrows() - 1;
            let v: Vec<Complex64> = (0..cols).map(|c| vt[[last, c]].conj()).collect();
            let num: Vec<Complex64> = v[..deg + 1].iter().map(|&c| c * scale).collect();
            let den: Vec<Complex64> = v[deg + 1..].to_vec();
            chosen = Some((num, den, deg));
            break;
        }
    }
    let (num, den, deg) = chosen.ok_or_else(|| PadeError::NumericallySingular {
        detail: "adaptive degree scan produced no fit".into(),
    })?;

    // drop trailing coefficients buried in the fit noise; they only add junk
    // roots at |t| ~ 1e2..1e3
    let trim = |p: &[Complex64]| -> Vec<Complex64> {
        let mx = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut k = p.len();
        while k > 1 && p[k - 1].norm() < 3e-9 * mx {
            k -= 1;
        }
        p[..k].to_vec()
    };
    let num = trim(&num);
    let den = trim(&den);
    if den.len() < 2 {
        return Err(PadeError::IllConditioned {
            detail: "denominator degenerated to a constant".into(),
        });
    }

    let refine = |roots: Vec<Complex64>, p: &[Complex64]| -> Vec<Complex64> {
        let pd = chebder(p);
        roots
            .into_iter()
            .map(|mut x| {
                for _ in 0..6 {
                    let v = chebval(x, p);
                    let dv = chebval(x, &pd);
                    if dv.norm_sqr() == 0.0 {
                        break;
                    }
                    let mut step = v / dv;
                    if step.norm() > 0.1 {
                        step *= 0.1 / step.norm();
                    }
                    x -= step;
                    if step.norm() < 1e-15 {
                        break;
                    }
                }
                x
            })
            .collect()
    };
    let den_roots = refine(chebroots(&den), &den);
    let num_roots = if num.len() >= 2 {
        refine(chebroots(&num), &num)
    } else {
        Vec::new()
    };

    // leading factors calibrated where each polynomial is largest on the
    // sampled interval — benign points far from roots
    let grid: Vec<f64> = (0..801).map(|i| -1.0 + 2.0 * i as f64 / 800.0).collect();
    let argmax = |p: &[Complex64]| -> Complex64 {
        let mut best = (0.0, 0.0f64);
        for &t in &grid {
            let v = chebval(Complex64::new(t, 0.0), p).norm();
            if v > best.1 {
                best = (t, v);
            }
        }
        Complex64::new(best.0, 0.0)
    };
    let y_n = argmax(&num);
    let y_d = argmax(&den);
    let mut num_lead = chebval(y_n, &num);
    for &z in &num_roots {
        num_lead /= y_n - z;
    }
    let mut den_lead = chebval(y_d, &den);
    for &q in &den_roots {
        den_lead /= y_d - q;
    }
    if !num_lead.is_finite() || !den_lead.is_finite() || den_lead.norm() == 0.0 {
        return Err(PadeError::IllConditioned {
            detail: "leading-factor calibration failed".into(),
        });
    }

    Ok(RatioFit { mid, half, deg, num_roots, den_roots, num_lead, den_lead })
}

/// One Newton polish run on the interpolant itself (poles via 1/R, zeros via R).
fn polish_on_evaluator(
    approx: &RationalApproximant,
    start: Complex64,
    is_pole: bool,
) -> Complex64 {
    let mut x = start;
    for _ in 0..40 {
        let (v, dv) = approx.eval_with_derivative(x);
        let (f, df) = if is_pole {
            (1.0 / v, -dv / (v * v))
        } else {
            (v, dv)
        };
        if df.norm_sqr() == 0.0 || !df.is_finite() || !f.is_finite() {
            return start;
        }
        let mut dx = f / df;
        if !dx.is_finite() {
            return start;
        }
        let cap = 0.2 * (1.0 + x.norm());
        if dx.norm() > cap {
            dx *= cap / dx.norm();
        }
        x -= dx;
        if dx.norm() < 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    if (x - start).norm() < 0.05 * (1.0 + start.norm()) {
        x
    } else {
        start
    }
}

fn contour_residue(approx: &RationalApproximant, p: Complex64, rho: f64) -> Complex64 {
    let n = 64;
    let mut acc = ZERO;
    for i in 0..n {
        let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
        let e = Complex64::from_polar(rho, th);
        acc += approx.eval(p + e) * e;
    }
    acc / n as f64
}

/// Extract poles and zeros of `approx` inside the configured box, with
/// residues, cross-checks, and Froissart-doublet/significance classification.
///
/// An empty result is not an error: a box holding no structure simply yields
/// an empty set.
pub fn find_poles_zeros(
    approx: &RationalApproximant,
    cfg: &PoleZeroConfig,
) -> Result<PoleSet, PadeError> {
    let fit = ratio_fit(approx, cfg.max_degree)?;
    let im_polish = cfg.im_cap + 0.2;

    // positions: evaluator-polished inside the trust band, raw refined roots
    // beyond it (continuation noise defeats Newton there)
    let place = |t: Complex64, is_pole: bool| -> Complex64 {
        let z0 = fit.to_lambda(t);
        if z0.im.abs() > im_polish {
            z0
        } else {
            polish_on_evaluator(approx, z0, is_pole)
        }
    };

    let mut cand: Vec<(Complex64, Complex64)> = Vec::new(); // (position, residue)
    for i in 0..fit.den_roots.len() {
        let pos = place(fit.den_roots[i], true);
        cand.push((pos, fit.residue(i)));
    }
    let zeros_all: Vec<Complex64> =
        fit.num_roots.iter().map(|&t| place(t, false)).collect();

    let in_box = |z: Complex64| -> bool {
        z.re >= cfg.box_re.0
            && z.re <= cfg.box_re.1
            && z.im >= cfg.box_im.0
            && z.im <= cfg.box_im.1
    };
    let (dlo, dhi) = approx.domain;
    let in_trust = |z: Complex64| -> bool {
        z.im.abs() <= cfg.im_cap && z.re >= dlo - 1.5 && z.re <= dhi + 1.5
    };

    cand.retain(|(p, _)| in_box(*p) && in_trust(*p));
    cand.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    // dedup: coincident denominator roots collapse to one pole
    let mut merged: Vec<(Complex64, Complex64)> = Vec::new();
    for (p, r) in cand {
        match merged.last() {
            Some(&(q, _)) if (p - q).norm() < cfg.dedup_tol => {}
            _ => merged.push((p, r)),
        }
    }

    let mut poles = Vec::with_capacity(merged.len());
    for (p, r) in merged {
        let cres = contour_residue(approx, p, cfg.contour_radius);
        let denom = cres.norm().max(r.norm()).max(1e-300);
        let xrel = (r - cres).norm() / denom;
        let near_zero = zeros_all.iter().any(|&z| (z - p).norm() < cfg.doublet_radius);
        let spurious = near_zero;
        let significant =
            !spurious && p.im <= cfg.im_max && p.im >= -cfg.im_max && r.norm() >= cfg.res_min;
        poles.push(PoleInfo {
            position: p,
            residue: r,
            contour_residue: cres,
            crosscheck_rel: xrel,
            spurious,
            significant,
            ill_conditioned: xrel > cfg.crosscheck_tol,
        });
    }

    let mut zeros: Vec<Complex64> = zeros_all.into_iter().filter(|&z| in_box(z)).collect();
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re));
    zeros.dedup_by(|a, b| (*a - *b).norm() < cfg.dedup_tol);

    Ok(PoleSet { poles, zeros, fit_degree: fit.deg })
}

/// Residue of the interpolant at a caller-supplied pole position.
///
/// Returns (N/D' residue, contour residue, relative disagreement). Raises
/// [`PadeError::MultipleRoot`] when the denominator derivative vanishes at the
/// pole and [`PadeError::IllConditioned`] when no fitted pole sits near
/// `position` or the two determinations disagree beyond `cfg.crosscheck_tol`.
pub fn residue_at(
    approx: &RationalApproximant,
    position: Complex64,
    cfg: &PoleZeroConfig,
) -> Result<(Complex64, Complex64, f64), PadeError> {
    let fit = ratio_fit(approx, cfg.max_degree)?;
    let tpos = (position - Complex64::new(fit.mid, 0.0)) / fit.half;
    let (i, dist) = fit
        .den_roots
        .iter()
        .enumerate()
        .map(|(i, &q)| (i, (q - tpos).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| PadeError::IllConditioned { detail: "no denominator roots".into() })?;
    if dist * fit.half > 0.1 {
        return Err(PadeError::IllConditioned {
            detail: format!("no pole within 0.1 of {position}"),
        });
    }
    // a near-coincident second root makes the simple-pole residue meaningless
    for (k, &q) in fit.den_roots.iter().enumerate() {
        if k != i && (q - fit.den_roots[i]).norm() * fit.half < cfg.dedup_tol {
            return Err(PadeError::MultipleRoot { position });
        }
    }
    let r = fit.residue(i);
    let p = fit.to_lambda(fit.den_roots[i]);
    let cres = contour_residue(approx, p, cfg.contour_radius);
    let denom = cres.norm().max(r.norm()).max(1e-300);
    let xrel = (r - cres).norm() / denom;
    if xrel > cfg.crosscheck_tol {
        return Err(PadeError::IllConditioned {
            detail: format!(
                "residue determinations disagree by {xrel:.2e} at {position} (factored {r}, contour {cres})"
            ),
        });
    }
    Ok((r, cres, xrel))
}
