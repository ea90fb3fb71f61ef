//! Dense reference implementations built from explicit Kronecker products
//! of Pauli matrices, independent of the sparse sector machinery.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use adiabus::model::ChainModel;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn paulis() -> [DMatrix<C>; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        DMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    ]
}

/// `op` acting on `site` (1-based). Site 1 is the least significant bit,
/// so it is the last Kronecker factor. The Pauli basis is ordered
/// `[up, down]` while bit value 1 means up, so the single-site operators
/// are conjugated by the swap before use.
pub fn site_operator(n: usize, site: usize, op: &DMatrix<C>) -> DMatrix<C> {
    // reorder from [up, down] to [bit 0 = down, bit 1 = up]
    let swap = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let local = &swap * op * &swap;
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for factor in (1..=n).rev() {
        let f = if factor == site { local.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

/// Dense `sum_b (jx XX + jy YY + jz ZZ)`; the imaginary part must vanish.
pub fn dense_hamiltonian(model: &ChainModel) -> DMatrix<f64> {
    let n = model.n_spins();
    let p = paulis();
    let dim = 1 << n;
    let mut h = DMatrix::<C>::zeros(dim, dim);
    for b in model.bonds() {
        let js = [b.coupling.jx, b.coupling.jy, b.coupling.jz];
        for (a, j) in js.iter().enumerate() {
            if *j != 0.0 {
                h += site_operator(n, b.i, &p[a]) * site_operator(n, b.j, &p[a]) * c(*j, 0.0);
            }
        }
    }
    assert!(h.iter().all(|z| z.im.abs() < 1e-12), "Hamiltonian must be real");
    h.map(|z| z.re)
}

pub fn popcount_states(n: usize, keep: impl Fn(u32) -> bool) -> Vec<u32> {
    (0u32..1 << n).filter(|&b| keep(b)).collect()
}

pub fn block(h: &DMatrix<f64>, states: &[u32]) -> DMatrix<f64> {
    DMatrix::from_fn(states.len(), states.len(), |r, c| h[(states[r] as usize, states[c] as usize)])
}

pub fn eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// `exp(-i H t) v` through the eigendecomposition of a real symmetric `H`.
pub fn dense_exp(h: &DMatrix<f64>, t: f64, v: &DVector<C>) -> DVector<C> {
    let (vals, vecs) = eigen_sorted(h);
    let vc = vecs.map(|x| c(x, 0.0));
    let mut coeff = vc.adjoint() * v;
    for (k, e) in vals.iter().enumerate() {
        coeff[k] *= C::from_polar(1.0, -e * t);
    }
    vc * coeff
}

/// Midpoint-rule propagation with exact dense exponentials per step.
pub fn dense_propagate(h_of_s: impl Fn(f64) -> DMatrix<f64>, tau: f64, psi: &DVector<C>, steps: usize) -> DVector<C> {
    let dt = tau / steps as f64;
    let mut v = psi.clone();
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        v = dense_exp(&h_of_s(s), dt, &v);
    }
    v
}

/// Reduced density matrix of `site`, ordered `[up, down]`, from a full
/// state vector.
pub fn reduced_density(n: usize, psi: &DVector<C>, site: usize) -> [[C; 2]; 2] {
    let mask = 1usize << (site - 1);
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for b in 0..1usize << n {
        if b & mask == 0 {
            continue;
        }
        let up = psi[b];
        let down = psi[b & !mask];
        rho[0][0] += up * up.conj();
        rho[1][1] += down * down.conj();
        rho[0][1] += up * down.conj();
    }
    rho[1][0] = rho[0][1].conj();
    rho
}
