//! Shared numerical kernels: Gauss quadrature nodes, Chebyshev polynomial
//! operations on complex coefficients, and Legendre polynomial evaluation.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the three-term recurrence; nodes accurate to machine
/// precision for the orders used here (<= 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Laguerre nodes and weights for integrals of the form
/// `int_0^inf e^{-t} f(t) dt ~ sum w_i f(x_i)`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
        }
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-14 * (1.0 + z) {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}

/// Legendre polynomials P_0(x) .. P_jmax(x) by upward recurrence.
pub fn legendre_all(jmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; jmax + 1];
    p[0] = 1.0;
    if jmax >= 1 {
        p[1] = x;
    }
    for j in 1..jmax {
        p[j + 1] = ((2.0 * j as f64 + 1.0) * x * p[j] - j as f64 * p[j - 1]) / (j as f64 + 1.0);
    }
    p
}

/// Clenshaw evaluation of a Chebyshev series with complex coefficients at a
/// complex argument.
pub fn chebval(x: Complex64, c: &[Complex64]) -> Complex64 {
    match c.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => c[0],
        2 => c[0] + c[1] * x,
        n => {
            let x2 = 2.0 * x;
            let mut c0 = c[n - 2];
            let mut c1 = c[n - 1];
            for k in (0..n - 2).rev() {
                let tmp = c0;
                c0 = c[k] - c1;
                c1 = tmp + c1 * x2;
            }
            c0 + c1 * x
        }
    }
}

/// Derivative of a Chebyshev series (coefficients of d/dx).
pub fn chebder(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    if n <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut c = c.to_vec();
    let mut der = vec![Complex64::new(0.0, 0.0); n - 1];
    for j in (3..n).rev() {
        let cj = c[j];
        der[j - 1] = 2.0 * j as f64 * cj;
        c[j - 2] += j as f64 * cj / (j as f64 - 2.0);
    }
    if n > 2 {
        der[1] = 4.0 * c[2];
    }
    der[0] = c[1];
    der
}

/// Roots of a Chebyshev series via eigenvalues of the (symmetrically scaled)
/// colleague matrix — the companion-matrix construction expressed in the
/// Chebyshev basis. The trailing coefficient must be nonzero.
pub fn chebroots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let mut mat = Array2::<Complex64>::zeros((n, n));
    let half = Complex64::new(0.5, 0.0);
    let sq = Complex64::new(0.5f64.sqrt(), 0.0);
    mat[[0, 1]] = sq;
    mat[[1, 0]] = sq;
    for k in 1..n - 1 {
        mat[[k, k + 1]] = half;
        mat[[k + 1, k]] = half;
    }
    // scl_k = 1 for k=0, sqrt(1/2) otherwise; last column absorbs the series
    let cn = c[n];
    for k in 0..n {
        let scl_k = if k == 0 { 1.0 } else { 0.5f64.sqrt() };
        let scl_last = 0.5f64.sqrt();
        mat[[k, n - 1]] -= (c[k] / cn) * Complex64::new(scl_k / scl_last * 0.5, 0.0);
    }
    let (eigs, _) = mat.eig().expect("colleague matrix eigensolve failed");
    eigs.to_vec()
}
