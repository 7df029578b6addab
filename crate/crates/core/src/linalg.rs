//! Dense kernels for small complex matrices.
//!
//! One-sided (Hestenes) Jacobi SVD: the complex SVD shipped with nalgebra loses
//! orthogonality on exactly rank-deficient inputs, which is the common case here.
//! Hermitian eigenproblems go through the real symmetric embedding
//! `[[Re H, −Im H], [Im H, Re H]]`, where every eigenvalue appears twice.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::element::CMatrix;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `a = u diag(sigma) v*`, `sigma` descending, `u`: m×k, `v`: n×k, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.adjoint());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    // m ≥ n: orthogonalize the columns of w = a v.
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);

    let mut u = CMatrix::zeros(m, n);
    let mut v_sorted = CMatrix::zeros(n, n);
    let mut degenerate = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        v_sorted.set_column(dst, &v.column(src));
        let s = norms[src];
        if s > sigma_max * f64::EPSILON * (m as f64) && s > f64::MIN_POSITIVE {
            u.set_column(dst, &(w.column(src) / Complex64::new(s, 0.0)));
        } else {
            degenerate.push(dst);
        }
    }
    complete_orthonormal(&mut u, &degenerate);
    Svd { u, sigma, v: v_sorted }
}

// Columns p, q ← (c·x − s·φ̄·y, s·x + c·φ̄·y), where φ is the phase of ⟨x, y⟩.
fn rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let pc = phase.conj();
    for r in 0..m.nrows() {
        let x = m[(r, p)];
        let y = m[(r, q)] * pc;
        m[(r, p)] = x * c - y * s;
        m[(r, q)] = x * s + y * c;
    }
}

/// Fills the listed columns with unit vectors orthogonal to all other columns.
fn complete_orthonormal(u: &mut CMatrix, columns: &[usize]) {
    let m = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|c| !columns.contains(c)).collect();
    for &col in columns {
        let mut best: Option<DVector<Complex64>> = None;
        let mut best_norm = 0.0;
        for k in 0..m {
            let mut cand = DVector::from_element(m, Complex64::new(0.0, 0.0));
            cand[k] = Complex64::new(1.0, 0.0);
            // Two passes of Gram–Schmidt.
            for _ in 0..2 {
                for &f in &filled {
                    let proj = u.column(f).dotc(&cand);
                    cand -= u.column(f) * proj;
                }
            }
            let nrm = cand.norm();
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(cand);
            }
        }
        let cand = best.expect("m ≥ number of columns");
        u.set_column(col, &(cand / Complex64::new(best_norm, 0.0)));
        filled.push(col);
    }
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).sigma
}

/// Real symmetric embedding of a complex matrix.
pub fn realify_matrix(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let c = h.ncols();
    DMatrix::from_fn(2 * n, 2 * c, |i, j| {
        let z = h[(i % n, j % c)];
        match (i < n, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending with
/// orthonormal eigenvectors in the columns.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(realify_matrix(&herm));
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    // Each eigenvalue is doubled; the embedding of w is (Re w; Im w) and of i·w is
    // (−Im w; Re w). Pick n vectors greedily, orthogonalizing in ℂⁿ.
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut count = 0;
    for &idx in &order {
        if count == n {
            break;
        }
        let col = eig.eigenvectors.column(idx);
        let mut w = DVector::from_fn(n, |r, _| Complex64::new(col[r], col[n + r]));
        for _ in 0..2 {
            for k in 0..count {
                let proj = vectors.column(k).dotc(&w);
                w -= vectors.column(k) * proj;
            }
        }
        let nrm = w.norm();
        if nrm < 0.5 {
            continue;
        }
        vectors.set_column(count, &(w / Complex64::new(nrm, 0.0)));
        values.push(eig.eigenvalues[idx]);
        count += 1;
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Largest singular value of a real matrix.
pub fn real_spectral_norm(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}
