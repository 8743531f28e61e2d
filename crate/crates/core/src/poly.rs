//! Polynomial helpers shared by the model constructors.
//!
//! Coefficient vectors are ordered from the highest power down, so
//! `[c0, c1, .., cN]` is `c0 z^N + c1 z^(N-1) + .. + cN`. With this ordering
//! the AR denominator `a` and the FIR numerator `b` can be passed straight in.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Horner evaluation of a real polynomial at a complex point, returning the
/// value and the first derivative.
pub(crate) fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a real polynomial via the eigenvalues of its companion matrix,
/// each polished with a few guarded Newton steps.
pub(crate) fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs.first().ok_or(Error::DegeneratePolynomial)?;
    if lead == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for (j, &c) in coeffs[1..].iter().enumerate() {
        companion[(0, j)] = -c / lead;
    }
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    let schur = Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure { dim: degree })?;
    let mut found: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    for z in &mut found {
        *z = polish(coeffs, *z);
    }
    Ok(found)
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let (mut p, mut dp) = eval_with_derivative(coeffs, z);
    for _ in 0..4 {
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let (cp, cdp) = eval_with_derivative(coeffs, candidate);
        if cp.norm() >= p.norm() {
            break;
        }
        z = candidate;
        p = cp;
        dp = cdp;
    }
    z
}

/// Moduli of `roots` with numerically multiple roots resolved.
///
/// A cluster of `m` coincident roots comes back from any f64 root finder
/// spread over a disk of radius about `eps^(1/m)`, which can straddle the unit
/// circle. Roots closer than `CLUSTER_RADIUS` are grouped; when the polynomial
/// vanishes at the group centroid to within rounding, every member is assigned
/// the centroid's modulus, which is well conditioned.
pub(crate) fn effective_moduli(coeffs: &[f64], roots: &[Complex64]) -> Vec<f64> {
    const CLUSTER_RADIUS: f64 = 0.05;
    let n = roots.len();
    let mut cluster: Vec<usize> = (0..n).collect();
    fn find(cluster: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while cluster[i] != i {
            cluster[i] = cluster[cluster[i]];
            i = cluster[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < CLUSTER_RADIUS {
                let (a, b) = (find(&mut cluster, i), find(&mut cluster, j));
                cluster[a] = b;
            }
        }
    }
    let mut moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    for head in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| find(&mut cluster, i) == head).collect();
        if members.len() < 2 {
            continue;
        }
        let mut centroid = members.iter().map(|&i| roots[i]).sum::<Complex64>() / members.len() as f64;
        // An m-fold root is a simple root of the (m-1)th derivative.
        let derived = derivative(coeffs, members.len() - 1);
        for _ in 0..8 {
            let (q, dq) = eval_with_derivative(&derived, centroid);
            if dq.norm() == 0.0 || q.norm() == 0.0 {
                break;
            }
            centroid -= q / dq;
        }
        let (value, _) = eval_with_derivative(coeffs, centroid);
        let scale: f64 = {
            let r = centroid.norm().max(1.0);
            coeffs.iter().rev().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum()
        };
        if value.norm() <= 64.0 * f64::EPSILON * scale {
            for &i in &members {
                moduli[i] = centroid.norm();
            }
        }
    }
    moduli
}

fn derivative(coeffs: &[f64], times: usize) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..times.min(coeffs.len().saturating_sub(1)) {
        let degree = c.len() - 1;
        c = c[..degree]
            .iter()
            .enumerate()
            .map(|(k, v)| v * (degree - k) as f64)
            .collect();
    }
    c
}

/// Coefficients of the monic polynomial `prod (z - r_k)`, highest power first.
pub(crate) fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        coeffs.push(Complex64::new(0.0, 0.0));
        for k in (1..coeffs.len()).rev() {
            let prev = coeffs[k - 1];
            coeffs[k] -= r * prev;
        }
    }
    coeffs
}

/// Greedy conjugate pairing. Returns the first element left without a partner
/// within `|z_i - conj(z_j)| <= 1e-12 (1 + |z_i|)`.
pub(crate) fn find_unpaired(values: &[Complex64]) -> Option<Complex64> {
    let tol = |z: Complex64| 1e-12 * (1.0 + z.norm());
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        let z = values[i];
        if z.im.abs() <= tol(z) {
            used[i] = true;
            continue;
        }
        used[i] = true;
        let partner = (0..values.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (values[j] - z.conj()).norm()))
            .filter(|&(_, d)| d <= tol(z))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match partner {
            Some((j, _)) => used[j] = true,
            None => return Some(z),
        }
    }
    None
}
