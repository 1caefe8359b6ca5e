//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn diag_real(d: &[f64]) -> CMat {
    let n = d.len();
    let mut m = zeros(n);
    for (i, v) in d.iter().enumerate() {
        m[(i, i)] = c(*v, 0.0);
    }
    m
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let r = rows.len();
    let cols = rows[0].len();
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

pub fn from_real(n: usize, m: usize, v: &[f64]) -> CMat {
    CMat::from_fn(n, m, |i, j| c(v[i * m + j], 0.0))
}

/// Matrix unit e_{ij} of size n.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = ONE;
    m
}

pub fn pauli_x() -> CMat {
    from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMat {
    from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> CMat {
    from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Matrix product through a blocked complex GEMM; nalgebra's generic product is several
/// times slower for complex entries.
pub fn mm(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "matrix product dimension mismatch");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    if m * k * n < 4096 {
        return a * b;
    }
    let mut out = CMat::zeros(m, n);
    // SAFETY: Complex<f64> is repr(C) with layout [re, im]; the strides describe nalgebra's
    // column-major storage of the three matrices, which do not alias.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            out.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    out
}

/// mm over a list of factors, left to right.
pub fn mm_all(factors: &[&CMat]) -> CMat {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = mm(&acc, f);
    }
    acc
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for m in ms {
        out = out.kronecker(m);
    }
    out
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

/// Normalized trace tr(a)/n.
pub fn ntrace(a: &CMat) -> C64 {
    a.trace() / (a.nrows() as f64)
}

/// Normalized Hilbert–Schmidt inner product tr(a* b)/n.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    let mut s = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        s += x.conj() * y;
    }
    s / (a.nrows() as f64)
}

pub fn hs_norm(a: &CMat) -> f64 {
    (a.iter().map(|x| x.norm_sqr()).sum::<f64>() / a.nrows() as f64).sqrt()
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm via singular values.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn random_complex<R: Rng>(rng: &mut R, n: usize, m: usize) -> CMat {
    CMat::from_fn(n, m, |_, _| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let a = random_complex(rng, n, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Haar-ish random unitary from the QR decomposition of a Gaussian-like matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let a = random_complex(rng, n, n);
    let qr = a.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            out[(i, j)] *= ph;
        }
    }
    out
}

/// Unitary exponential exp(i h) of a Hermitian matrix.
pub fn expi_hermitian(h: &CMat) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut d = zeros(n);
    for i in 0..n {
        d[(i, i)] = C64::from_polar(1.0, eig.eigenvalues[i]);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Eigen-decomposition of a (numerically) normal matrix through a generic Hermitian
/// combination of its real and imaginary parts.  Returns (eigenvalues, eigenvectors).
pub fn normal_eigen(u: &CMat) -> (Vec<C64>, CMat) {
    let n = u.nrows();
    let ud = u.adjoint();
    let re = (u + &ud) * c(0.5, 0.0);
    let im = (u - &ud) * c(0.0, -0.5);
    let mix = &re + &im * c(0.618_033_988_749_894_9, 0.0);
    let eig = mix.symmetric_eigen();
    let v = eig.eigenvectors;
    let vals = (0..n)
        .map(|k| {
            let col = v.column(k);
            (col.adjoint() * u * col)[(0, 0)]
        })
        .collect();
    (vals, v)
}

/// Principal logarithm of a unitary, returned as Hermitian h with exp(i h) = u.
pub fn log_unitary(u: &CMat) -> CMat {
    let (vals, v) = normal_eigen(u);
    let n = u.nrows();
    let mut d = zeros(n);
    for i in 0..n {
        d[(i, i)] = c(vals[i].arg(), 0.0);
    }
    let h = &v * d * v.adjoint();
    (&h + h.adjoint()) * c(0.5, 0.0)
}

/// Unitary part of the polar decomposition y = u |y|.
pub fn polar_unitary(y: &CMat) -> Option<CMat> {
    let svd = y.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 || smin < 1e-12 * smax {
        return None;
    }
    Some(svd.u? * svd.v_t?)
}

/// Orthonormal basis (columns) of the null space of `a`, with singular values below
/// `tol * max(1, sigma_max)` treated as zero.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let (r, cols) = a.shape();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if r == 0 {
        return eye(cols);
    }
    let work = if r < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (r, cols)).copy_from(a);
        p
    } else if r > 2 * cols {
        // Shrink tall systems through their Gram factor before the SVD.
        let qr = a.clone().qr();
        qr.r()
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let mut keep = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= cut {
            keep.push(k);
        }
    }
    let mut out = CMat::zeros(cols, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        for i in 0..cols {
            out[(i, j)] = vt[(k, i)].conj();
        }
    }
    out
}

/// Orthonormal basis of the column space (numerical range) of `a`.
pub fn range_basis(a: &CMat, tol: f64) -> CMat {
    let (r, cols) = a.shape();
    if cols == 0 || r == 0 {
        return CMat::zeros(r, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol * smax.max(1e-300) && svd.singular_values[k] > 1e-300)
        .collect();
    let mut out = CMat::zeros(r, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out.set_column(j, &u.column(k));
    }
    out
}

pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().cloned())
}

pub fn mat_of(v: &CVec, n: usize, m: usize) -> CMat {
    CMat::from_iterator(n, m, v.iter().cloned())
}

/// Permute a local operator on factors with dimensions `dims` so that factor `perm[k]`
/// of the input becomes factor `k` of the output.
pub fn permute_factors(op: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let index_of = |digits: &[usize], ds: &[usize]| -> usize {
        let mut idx = 0;
        for k in 0..ds.len() {
            idx = idx * ds[k] + digits[k];
        }
        idx
    };
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; n];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut nd = vec![0usize; n];
        for k in (0..n).rev() {
            nd[k] = rem % new_dims[k];
            rem /= new_dims[k];
        }
        for k in 0..n {
            digits[perm[k]] = nd[k];
        }
        *slot = index_of(&digits, dims);
    }
    CMat::from_fn(total, total, |i, j| op[(map[i], map[j])])
}

/// Fix the global phase of `v` so its first entry of (near) maximal magnitude is real positive.
pub fn fix_phase(v: &CMat) -> CMat {
    let maxmag = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if maxmag == 0.0 {
        return v.clone();
    }
    // Column-major iteration order is deterministic.
    let pivot = v.iter().find(|x| x.norm() >= maxmag * (1.0 - 1e-9)).cloned().unwrap_or(ONE);
    v * (pivot.conj() / pivot.norm())
}

/// Scalar λ minimizing ‖z − λ w‖_HS together with the relative residual.
pub fn proportionality(z: &CMat, w: &CMat) -> (C64, f64) {
    let ww = hs_inner(w, w);
    if ww.norm() == 0.0 {
        return (ZERO, f64::INFINITY);
    }
    let lam = hs_inner(w, z) / ww;
    let res = hs_norm(&(z - w * lam)) / hs_norm(z).max(1e-300);
    (lam, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_rank_deficient() {
        let a = from_real(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-10);
        assert_eq!(ns.ncols(), 1);
        assert!(frob(&(&a * &ns)) < 1e-12);
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        let p = polar_unitary(&(&u * c(2.5, 0.0))).unwrap();
        assert!(frob(&(p - u)) < 1e-10);
    }

    #[test]
    fn log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 3) * c(0.3, 0.0);
        let u = expi_hermitian(&h);
        let h2 = log_unitary(&u);
        assert!(frob(&(expi_hermitian(&h2) - u)) < 1e-10);
    }

    #[test]
    fn permute_two_factors_is_swap() {
        let a = pauli_x();
        let b = pauli_z();
        let ab = kron(&a, &b);
        let ba = permute_factors(&ab, &[2, 2], &[1, 0]);
        assert!(frob(&(ba - kron(&b, &a))) < 1e-14);
    }
}
