//! Randomized properties of the numerical core: interpolation exactness on
//! rational data, pole recovery under noise, closed-form transforms, Legendre
//! invariants, winding-angle identities, and fold/direct agreement.

use num_complex::Complex64;
use proptest::prelude::*;
use regge::amplitudes::{
    dcs_direct, fold, unfold, AngularGrid, Branch, FoldConfig, UnfoldConfig, Weight,
    winding_angles,
};
use regge::numerics::legendre_all;
use regge::pade::{build_approximant, find_poles_zeros, Axis, PoleZeroConfig};
use regge::smatrix::{PartialWaveTable, TransitionLabel};
use regge::synth::{self, presets};

fn label() -> TransitionLabel {
    TransitionLabel::new(0, 0, 0, 3, 0, 0).unwrap()
}

/// Exponential-profile table S^J = e^{-c lambda_J}; its unfolded amplitudes
/// have textbook closed forms.
fn exp_table(jmax: usize, c: f64) -> PartialWaveTable {
    let s = vec![(0..=jmax)
        .map(|j| Complex64::new((-c * (j as f64 + 0.5)).exp(), 0.0))
        .collect()];
    PartialWaveTable::new(label(), vec![100.0], vec![1.0], jmax, s).unwrap()
}

/// One-pole rational window in the fold_j20 family with a movable pole.
fn one_pole_model(re: f64, im: f64, strength: f64) -> synth::SyntheticModel {
    let mut m = presets::fold_j20_1p();
    m.poles[0].alpha = Complex64::new(re, im);
    m.poles[0].strength = strength;
    m
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 32,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// Thiele interpolation reproduces rational data away from the nodes.
    #[test]
    fn rational_interpolation_is_exact_off_nodes(
        re in 9.0f64..30.0,
        im in 0.5f64..2.5,
        r_re in 0.05f64..0.5,
        r_im in -0.3f64..0.3,
        c0 in 0.1f64..0.9,
        probe in 0.6f64..39.4,
    ) {
        let p = Complex64::new(re, im);
        let r = Complex64::new(r_re, r_im);
        let f = |z: Complex64| Complex64::new(c0, 0.0) + r / (z - p);
        let nodes: Vec<f64> = (0..=40).map(|j| j as f64 + 0.5).collect();
        let values: Vec<Complex64> = nodes.iter().map(|&x| f(Complex64::new(x, 0.0))).collect();
        let ap = build_approximant(&nodes, &values, Axis::Lambda, 100.0).unwrap();
        let z = Complex64::new(probe, 0.0);
        let want = f(z);
        prop_assert!((ap.eval(z) - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    /// Pole extraction on a randomized one-pole window model stays at the
    /// ledger to 1e-8 in position, 1e-6 relative in residue, and 1e-10
    /// multiplicative noise moves the recovered position by under 1e-6.
    #[test]
    fn pole_recovery_from_random_window_models(
        re in 9.0f64..15.0,
        im in 0.6f64..2.4,
        strength in 0.3f64..0.8,
        seed in any::<u64>(),
    ) {
        let mut model = presets::extraction_one_pole();
        model.poles[0].alpha = Complex64::new(re, im);
        model.poles[0].strength = strength;
        let table = model.generate().unwrap();
        let (nodes, values): (Vec<f64>, Vec<Complex64>) =
            table.slice_at_energy(0).unwrap().into_iter().unzip();
        let ap = build_approximant(&nodes, &values, Axis::Lambda, 100.0).unwrap();
        let set = find_poles_zeros(&ap, &PoleZeroConfig::for_jmax(table.jmax)).unwrap();
        let ledger = model.ledger_at(100.0).unwrap();
        let lp = &ledger.poles[0];
        let got = set
            .poles
            .iter()
            .filter(|p| p.significant)
            .min_by(|a, b| {
                (a.position - lp.position).norm().total_cmp(&(b.position - lp.position).norm())
            })
            .expect("no significant pole recovered");
        prop_assert!((got.position - lp.position).norm() <= 1e-8);
        prop_assert!((got.residue - lp.residue).norm() <= 1e-6 * lp.residue.norm());

        let mut state = seed | 1;
        let mut noisy = table.clone();
        for row in &mut noisy.s {
            for sv in row {
                state ^= state >> 12;
                state ^= state << 25;
                state ^= state >> 27;
                let u = (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64
                    / (1u64 << 53) as f64;
                *sv *= 1.0 + 1e-10 * (2.0 * u - 1.0);
            }
        }
        let (n2, v2): (Vec<f64>, Vec<Complex64>) =
            noisy.slice_at_energy(0).unwrap().into_iter().unzip();
        let ap2 = build_approximant(&n2, &v2, Axis::Lambda, 100.0).unwrap();
        let set2 = find_poles_zeros(&ap2, &PoleZeroConfig::for_jmax(table.jmax)).unwrap();
        let moved = set2
            .poles
            .iter()
            .filter(|p| p.significant)
            .map(|p| (p.position - got.position).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(moved <= 1e-6, "noise moved the pole by {moved:.3e}");
    }

    /// A real table has conjugation-symmetric unfolded amplitudes:
    /// f~(-phi) = conj(f~(phi)). The identity holds exactly through the
    /// rational continuation (real data gives real interpolation
    /// coefficients), so it pins the sign handling of every quadrature
    /// branch without needing a closed form — even where a steep profile
    /// makes the remainder genuinely hard, which is why the convergence
    /// gate is disabled rather than relied on here.
    #[test]
    fn real_tables_unfold_conjugation_symmetric(
        c in 0.5f64..2.0,
        phi in 0.05f64..9.0,
    ) {
        let table = exp_table(40, c);
        let mut cfg = UnfoldConfig::covering_m(1);
        cfg.phi_step_deg = 90.0;
        cfg.quad_tol = f64::INFINITY;
        let unfolded = unfold(&table, &cfg).unwrap();
        for weight in [Weight::SqrtLambda, Weight::Lambda] {
            let (pos, _) = unfolded.eval_point(0, phi, weight).unwrap();
            let (neg, _) = unfolded.eval_point(0, -phi, weight).unwrap();
            prop_assert!(
                (neg - pos.conj()).norm() <= 1e-10 * (1.0 + pos.norm()),
                "asymmetry {:.3e} at phi={phi}", (neg - pos.conj()).norm()
            );
        }
    }

    /// Legendre invariants that do not restate the recurrence: endpoint
    /// values, parity, and the |P_J| <= 1 bound on [-1, 1].
    #[test]
    fn legendre_endpoint_parity_and_bound(jmax in 1usize..60, x in -1.0f64..1.0) {
        let at = |y: f64| legendre_all(jmax, y);
        let p1 = at(1.0);
        let pm1 = at(-1.0);
        let px = at(x);
        let pmx = at(-x);
        for j in 0..=jmax {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((p1[j] - 1.0).abs() < 1e-12);
            prop_assert!((pm1[j] - sign).abs() < 1e-12);
            prop_assert!(px[j].abs() <= 1.0 + 1e-12);
            prop_assert!((pmx[j] - sign * px[j]).abs() < 1e-11);
        }
    }

    /// Every winding angle folds onto the same scattering angle
    /// (cos phi_m = -cos theta), alternates nearside/farside with the parity
    /// of m, and grows outward.
    #[test]
    fn winding_angles_map_back_to_theta(theta_deg in 1.0f64..179.0, m_max in 0i32..6) {
        let theta = theta_deg.to_radians();
        let ws = winding_angles(theta, m_max).unwrap();
        prop_assert_eq!(ws.len(), (2 * m_max + 1) as usize);
        for (i, w) in ws.iter().enumerate() {
            prop_assert!((w.phi.cos() + theta.cos()).abs() < 1e-12);
            let expect_branch =
                if w.m.rem_euclid(2) == 0 { Branch::Nearside } else { Branch::Farside };
            prop_assert_eq!(w.branch, expect_branch);
            if i > 0 {
                prop_assert!(w.phi > ws[i - 1].phi);
            }
        }
    }

    /// Single-partial-wave cross sections against hand closed forms for
    /// J = 0, 1, 2 at arbitrary k.
    #[test]
    fn single_wave_dcs_closed_forms(
        k in 0.5f64..3.0,
        theta_deg in 5.0f64..175.0,
        j_on in 0usize..3,
    ) {
        let jmax = 8;
        let mut s = vec![vec![Complex64::new(0.0, 0.0); jmax + 1]];
        s[0][j_on] = Complex64::new(1.0, 0.0);
        let table =
            PartialWaveTable::new(label(), vec![100.0], vec![k], jmax, s).unwrap();
        let theta = theta_deg.to_radians();
        let grid = AngularGrid::new(vec![theta]).unwrap();
        let got = dcs_direct(&table, &grid).unwrap().sigma[0][0];
        let x = -theta.cos();
        let pj = match j_on {
            0 => 1.0,
            1 => x,
            _ => 0.5 * (3.0 * x * x - 1.0),
        };
        let want = (j_on as f64 + 0.5).powi(2) * pj * pj / (k * k);
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want));
    }

    /// CSV round trip preserves every S value bit for bit.
    #[test]
    fn csv_round_trip_is_lossless(vals in proptest::collection::vec(-1.0f64..1.0, 18)) {
        let jmax = 8;
        let mut s = vec![Vec::with_capacity(jmax + 1)];
        for j in 0..=jmax {
            let re = vals[2 * j] / 2.0;
            let im = vals[2 * j + 1] / 2.0;
            s[0].push(Complex64::new(re, im));
        }
        let table =
            PartialWaveTable::new(label(), vec![100.0], vec![1.0], jmax, s).unwrap();
        let back = PartialWaveTable::from_csv_string(&table.to_csv_string()).unwrap();
        for (a, b) in table.s[0].iter().zip(&back.s[0]) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

proptest! {
    // the fold pipeline is the expensive property; keep the case count low
    #![proptest_config(ProptestConfig {
        cases: 4,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// Folding the unfolded amplitude reproduces the direct partial-wave DCS
    /// for randomized one-pole models.
    #[test]
    fn fold_matches_direct_on_random_models(
        re in 10.0f64..14.0,
        im in 0.75f64..1.1,
        strength in 0.5f64..1.0,
    ) {
        let model = one_pole_model(re, im, strength);
        let table = model.generate().unwrap();
        let mut ucfg = UnfoldConfig::covering_m(4);
        ucfg.phi_step_deg = 10.0;
        let unfolded = unfold(&table, &ucfg).unwrap();
        let grid = AngularGrid::from_degrees(30.0, 150.0, 30.0).unwrap();
        let direct = dcs_direct(&table, &grid).unwrap();
        let fcfg = FoldConfig { m_max: 4, ..Default::default() };
        let folded = fold(&unfolded, &grid, &fcfg).unwrap();
        for ti in 0..grid.thetas_rad.len() {
            let want = direct.sigma[0][ti];
            let got = folded.sigma(0, ti);
            prop_assert!(
                (got - want).abs() <= 1e-5 * want,
                "theta index {}: fold {} vs direct {}", ti, got, want
            );
        }
    }
}
