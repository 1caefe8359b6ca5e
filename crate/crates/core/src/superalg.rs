//! Concrete Z₂-graded matrix algebras inside a graded ambient matrix space.

use crate::error::{Error, Result};
use crate::linalg::*;
use crate::Config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Kernel cut used for the linear systems below (relative to the largest singular value).
const KERNEL_TOL: f64 = 1e-8;
/// A product whose HS norm is below this is treated as exactly zero during closure.
const ZERO_FLOOR: f64 = 1e-10;

/// Matrix space M_N with a diagonal grading operator Θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Ambient {
    pub grading: Vec<i8>,
}

impl Ambient {
    pub fn new(grading: Vec<i8>) -> Self {
        assert!(grading.iter().all(|&s| s == 1 || s == -1), "grading entries must be ±1");
        Ambient { grading }
    }
    pub fn trivial(n: usize) -> Self {
        Ambient { grading: vec![1; n] }
    }
    /// M^{p|q}: p even basis vectors followed by q odd ones.
    pub fn superspace(p: usize, q: usize) -> Self {
        let mut g = vec![1; p];
        g.extend(std::iter::repeat_n(-1, q));
        Ambient { grading: g }
    }
    pub fn dim(&self) -> usize {
        self.grading.len()
    }
    pub fn theta_matrix(&self) -> CMat {
        diag_real(&self.grading.iter().map(|&s| s as f64).collect::<Vec<_>>())
    }
    /// θ(x) = Θ x Θ.
    pub fn theta(&self, x: &CMat) -> CMat {
        let g = &self.grading;
        CMat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * (g[i] * g[j]) as f64)
    }
    pub fn tensor(&self, other: &Ambient) -> Ambient {
        let mut g = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.grading {
            for &b in &other.grading {
                g.push(a * b);
            }
        }
        Ambient { grading: g }
    }
    fn check(&self, x: &CMat) -> Result<()> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix in ambient of dimension {}",
                x.nrows(),
                x.ncols(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// (x₊, x₋) with x₊ = (x + ΘxΘ)/2 and x₋ = (x − ΘxΘ)/2.
pub fn parity_split(x: &CMat, amb: &Ambient) -> Result<(CMat, CMat)> {
    amb.check(x)?;
    Ok(split_unchecked(x, amb))
}

fn split_unchecked(x: &CMat, amb: &Ambient) -> (CMat, CMat) {
    let g = &amb.grading;
    let even = CMat::from_fn(x.nrows(), x.ncols(), |i, j| if g[i] == g[j] { x[(i, j)] } else { ZERO });
    let odd = x - &even;
    (even, odd)
}

/// Parity of a homogeneous element: Some(0) even, Some(1) odd, None if mixed.
pub fn parity_of(x: &CMat, amb: &Ambient) -> Option<u8> {
    let (e, o) = split_unchecked(x, amb);
    let (ne, no) = (frob(&e), frob(&o));
    let tot = frob(x).max(1e-300);
    if no <= 1e-12 * tot {
        Some(0)
    } else if ne <= 1e-12 * tot {
        Some(1)
    } else {
        None
    }
}

/// [x, y]_s = xy − (−1)^{τ(x)τ(y)} yx, extended bilinearly over parity parts.
pub fn supercommutator(x: &CMat, y: &CMat, amb: &Ambient) -> Result<CMat> {
    amb.check(x)?;
    amb.check(y)?;
    let (xe, xo) = split_unchecked(x, amb);
    let (ye, yo) = split_unchecked(y, amb);
    Ok(x * y - &ye * x - &yo * &xe - (&yo * &xo) * c(-1.0, 0.0))
}

/// A *-closed, θ-closed subalgebra given by an HS-orthonormal basis of homogeneous elements.
#[derive(Debug, Clone)]
pub struct GradedSubalgebra {
    pub ambient: Ambient,
    pub basis: Vec<CMat>,
    pub parity: Vec<u8>,
    pub contains_identity: bool,
}

/// Incremental orthonormal span of homogeneous elements.
struct Span {
    amb: Ambient,
    basis: Vec<CMat>,
    parity: Vec<u8>,
    /// Columns vec(b)/√N, orthonormal in the Euclidean sense.
    packed: CMat,
}

impl Span {
    fn new(amb: &Ambient) -> Self {
        let n = amb.dim();
        Span { amb: amb.clone(), basis: Vec::new(), parity: Vec::new(), packed: CMat::zeros(n * n, 0) }
    }

    /// Indices of the candidates that leave the span, found with two GEMM projections.
    fn outside(&self, cands: &[CMat]) -> Vec<usize> {
        if self.basis.is_empty() {
            return (0..cands.len()).collect();
        }
        let nn = self.packed.nrows();
        let mut cm = CMat::zeros(nn, cands.len());
        for (j, x) in cands.iter().enumerate() {
            cm.column_mut(j).copy_from_slice(x.as_slice());
        }
        let ph = self.packed.adjoint();
        let coef = mm(&ph, &cm);
        let r = &cm - mm(&self.packed, &coef);
        (0..cands.len())
            .filter(|&j| {
                let nc = cm.column(j).norm();
                nc > 0.0 && r.column(j).norm() > 1e-9 * nc
            })
            .collect()
    }

    /// Add the homogeneous element y (parity p) if it is not already in the span.
    fn try_add(&mut self, y: &CMat, p: u8) -> bool {
        let ny = hs_norm(y);
        if ny < ZERO_FLOOR {
            return false;
        }
        let mut r = y.clone();
        for _ in 0..2 {
            for (b, &bp) in self.basis.iter().zip(&self.parity) {
                if bp == p {
                    let k = hs_inner(b, &r);
                    r -= b * k;
                }
            }
        }
        let nr = hs_norm(&r);
        if nr <= 1e-8 * ny {
            return false;
        }
        let b = r / c(nr, 0.0);
        let k = self.packed.ncols();
        let scale = c(1.0 / (self.amb.dim() as f64).sqrt(), 0.0);
        self.packed = std::mem::replace(&mut self.packed, CMat::zeros(0, 0)).insert_column(k, ZERO);
        self.packed.column_mut(k).copy_from_slice(b.as_slice());
        for z in self.packed.column_mut(k).iter_mut() {
            *z *= scale;
        }
        self.basis.push(b);
        self.parity.push(p);
        true
    }

    fn add_mixed(&mut self, y: &CMat) -> Vec<usize> {
        let (e, o) = split_unchecked(y, &self.amb);
        let mut added = Vec::new();
        if self.try_add(&e, 0) {
            added.push(self.basis.len() - 1);
        }
        if self.try_add(&o, 1) {
            added.push(self.basis.len() - 1);
        }
        added
    }

    fn finish(self) -> GradedSubalgebra {
        let n = self.amb.dim();
        let mut s = GradedSubalgebra { ambient: self.amb, basis: self.basis, parity: self.parity, contains_identity: false };
        s.contains_identity = s.contains(&eye(n));
        s
    }
}

/// Smallest *- and θ-closed algebra containing the generators.
pub fn close_algebra(generators: &[CMat], amb: &Ambient) -> Result<GradedSubalgebra> {
    let n = amb.dim();
    close_algebra_capped(generators, amb, n * n)?
        .ok_or_else(|| Error::NoConvergence(format!("span exceeded ambient dimension {}", n * n)))
}

/// As `close_algebra`, but gives up with `None` once the span exceeds `cap` elements.
pub fn close_algebra_capped(generators: &[CMat], amb: &Ambient, cap: usize) -> Result<Option<GradedSubalgebra>> {
    if generators.is_empty() {
        return Err(Error::Invalid("close_algebra needs at least one generator".into()));
    }
    let n = amb.dim();
    let mut gens: Vec<(CMat, u8)> = Vec::new();
    for x in generators {
        amb.check(x)?;
        for y in [x.clone(), dagger(x)] {
            let ny = hs_norm(&y);
            let (e, o) = split_unchecked(&y, amb);
            for (part, p) in [(e, 0u8), (o, 1u8)] {
                let nn = hs_norm(&part);
                if nn > ZERO_FLOOR && nn > 1e-9 * ny {
                    gens.push((part / c(nn, 0.0), p));
                }
            }
        }
    }
    let mut span = Span::new(amb);
    for (g, p) in &gens {
        span.try_add(g, *p);
    }
    // Left multiplication by a basis of the generator span closes the span.
    let mult: Vec<(CMat, u8)> = span.basis.iter().cloned().zip(span.parity.iter().cloned()).collect();
    let mut k = 0;
    while k < span.basis.len() {
        if span.basis.len() > cap {
            return Ok(None);
        }
        if span.basis.len() == n * n {
            break;
        }
        let (b, bp) = (span.basis[k].clone(), span.parity[k]);
        let cands: Vec<CMat> = mult.iter().map(|(g, _)| mm(g, &b)).collect();
        for j in span.outside(&cands) {
            span.try_add(&cands[j], (mult[j].1 + bp) % 2);
        }
        k += 1;
    }
    if span.basis.len() > cap {
        return Ok(None);
    }
    Ok(Some(span.finish()))
}

impl GradedSubalgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Full matrix algebra of the ambient space.
    pub fn full(amb: &Ambient) -> Self {
        let n = amb.dim();
        let mut span = Span::new(amb);
        for i in 0..n {
            for j in 0..n {
                let p = if amb.grading[i] == amb.grading[j] { 0 } else { 1 };
                span.try_add(&unit(n, i, j), p);
            }
        }
        span.finish()
    }

    /// C·I.
    pub fn scalars(amb: &Ambient) -> Self {
        let mut span = Span::new(amb);
        span.try_add(&eye(amb.dim()), 0);
        span.finish()
    }

    /// Orthonormalize a list of homogeneous elements already known to span a graded algebra.
    pub fn from_elements(elements: &[CMat], amb: &Ambient) -> Self {
        let mut span = Span::new(amb);
        for x in elements {
            span.add_mixed(x);
        }
        span.finish()
    }

    pub fn project(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(x.nrows(), x.ncols());
        for b in &self.basis {
            out += b * hs_inner(b, x);
        }
        out
    }

    /// Coordinates of x in the basis (projection coefficients).
    pub fn coords(&self, x: &CMat) -> Vec<C64> {
        self.basis.iter().map(|b| hs_inner(b, x)).collect()
    }

    pub fn element(&self, coeffs: &[C64]) -> CMat {
        let n = self.ambient.dim();
        let mut out = CMat::zeros(n, n);
        for (b, k) in self.basis.iter().zip(coeffs) {
            out += b * *k;
        }
        out
    }

    /// HS distance of x from the span, relative to ‖x‖.  Elements below the zero floor
    /// count as zero.
    pub fn defect(&self, x: &CMat) -> f64 {
        let nx = hs_norm(x);
        if nx < ZERO_FLOOR {
            return 0.0;
        }
        hs_norm(&(x - self.project(x))) / nx
    }

    pub fn contains(&self, x: &CMat) -> bool {
        self.defect(x) < Config::default().tol_alg
    }

    pub fn contains_algebra(&self, other: &GradedSubalgebra) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn same_as(&self, other: &GradedSubalgebra) -> bool {
        self.dim() == other.dim() && self.contains_algebra(other)
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> CMat {
        let coeffs: Vec<C64> = (0..self.dim()).map(|_| random_complex(rng, 1, 1)[(0, 0)]).collect();
        self.element(&coeffs)
    }

    pub fn random_parity_element(&self, rng: &mut ChaCha8Rng, p: u8) -> CMat {
        let coeffs: Vec<C64> = self
            .parity
            .iter()
            .map(|&bp| if bp == p { random_complex(rng, 1, 1)[(0, 0)] } else { ZERO })
            .collect();
        self.element(&coeffs)
    }

    pub fn even_part(&self) -> GradedSubalgebra {
        let basis: Vec<CMat> =
            self.basis.iter().zip(&self.parity).filter(|(_, &p)| p == 0).map(|(b, _)| b.clone()).collect();
        let parity = vec![0; basis.len()];
        let mut s = GradedSubalgebra { ambient: self.ambient.clone(), basis, parity, contains_identity: false };
        s.contains_identity = s.contains(&eye(self.ambient.dim()));
        s
    }

    /// Largest closure defect over products, adjoints, and gradings of basis elements.
    /// Pairs are sampled deterministically when the basis is large.
    pub fn closure_defect(&self) -> f64 {
        let amb = &self.ambient;
        let mut worst: f64 = 0.0;
        let d = self.dim();
        let step = (d / 12).max(1);
        for i in (0..d).step_by(step) {
            let b = &self.basis[i];
            worst = worst.max(self.defect(&dagger(b)));
            worst = worst.max(self.defect(&amb.theta(b)));
            for j in (0..d).step_by(step) {
                worst = worst.max(self.defect(&(b * &self.basis[j])));
            }
        }
        worst
    }

    /// Ungraded center {x ∈ B : xb = bx for all b}.
    pub fn center(&self, seed: u64) -> GradedSubalgebra {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
        let probes: Vec<CMat> = (0..3).map(|_| self.random_element(&mut rng)).collect();
        let elements = kernel_in_algebra(self, |b| probes.iter().map(|r| commutator(b, r)).collect());
        GradedSubalgebra::from_elements(&elements, &self.ambient)
    }
}

/// Elements x = Σ c_k b_k of B with f(x) = 0, where f maps x to a list of matrices
/// linearly.  The returned elements are homogeneous when f respects parity.
fn kernel_in_algebra(b: &GradedSubalgebra, f: impl Fn(&CMat) -> Vec<CMat>) -> Vec<CMat> {
    let mut out = Vec::new();
    for p in 0..2u8 {
        let idx: Vec<usize> = (0..b.dim()).filter(|&k| b.parity[k] == p).collect();
        if idx.is_empty() {
            continue;
        }
        let cols: Vec<CVec> = idx
            .iter()
            .map(|&k| {
                let parts = f(&b.basis[k]);
                let len: usize = parts.iter().map(|m| m.len()).sum();
                CVec::from_iterator(len, parts.iter().flat_map(|m| m.iter().cloned()))
            })
            .collect();
        let rows = cols[0].len();
        let mut m = CMat::zeros(rows, idx.len());
        for (j, col) in cols.iter().enumerate() {
            m.set_column(j, col);
        }
        let ns = null_space(&m, KERNEL_TOL);
        for j in 0..ns.ncols() {
            let coeffs: Vec<C64> = (0..idx.len()).map(|i| ns[(i, j)]).collect();
            let mut x = CMat::zeros(b.ambient.dim(), b.ambient.dim());
            for (t, &k) in idx.iter().enumerate() {
                x += &b.basis[k] * coeffs[t];
            }
            out.push(x);
        }
    }
    out
}

/// Supercommutant of S within the full ambient matrix algebra.
pub fn supercommutant(s: &GradedSubalgebra) -> GradedSubalgebra {
    let amb = &s.ambient;
    let n = amb.dim();
    let mut elements = Vec::new();
    for p in 0..2u8 {
        // Coordinates of the parity-p subspace: matrix units e_ij with g_i g_j = (−1)^p.
        let coords: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter(|&(i, j)| (amb.grading[i] == amb.grading[j]) == (p == 0))
            .collect();
        let m = coords.len();
        if m == 0 {
            continue;
        }
        // Kernel basis in these coordinates, refined one generator at a time.
        let mut k = eye(m);
        for (b, &bp) in s.basis.iter().zip(&s.parity) {
            if k.ncols() == 0 {
                break;
            }
            let sign = if p == 1 && bp == 1 { -1.0 } else { 1.0 };
            let mut a = CMat::zeros(n * n, m);
            for (col, &(i, j)) in coords.iter().enumerate() {
                // e_ij b − sign · b e_ij
                for t in 0..n {
                    a[(i + t * n, col)] += b[(j, t)];
                    a[(t + j * n, col)] -= b[(t, i)] * sign;
                }
            }
            let ak = &a * &k;
            let ns = null_space(&ak, KERNEL_TOL);
            k = &k * ns;
        }
        for col in 0..k.ncols() {
            let mut x = CMat::zeros(n, n);
            for (r, &(i, j)) in coords.iter().enumerate() {
                x[(i, j)] = k[(r, col)];
            }
            elements.push(x);
        }
    }
    GradedSubalgebra::from_elements(&elements, amb)
}

pub fn double_supercommutant(s: &GradedSubalgebra) -> GradedSubalgebra {
    supercommutant(&supercommutant(s))
}

/// A ∩ B computed parity by parity from the kernel of (I − P_B) restricted to A.
pub fn intersect(a: &GradedSubalgebra, b: &GradedSubalgebra) -> Result<GradedSubalgebra> {
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch("intersection of algebras in different ambients".into()));
    }
    let elements = kernel_in_algebra(a, |x| vec![x - b.project(x)]);
    Ok(GradedSubalgebra::from_elements(&elements, &a.ambient))
}

/// Site data of a finite graded chain with the left Jordan–Wigner embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEmbedding {
    pub site_dims: Vec<usize>,
    pub site_gradings: Vec<Vec<i8>>,
}

impl ChainEmbedding {
    pub fn new(site_gradings: Vec<Vec<i8>>) -> Self {
        ChainEmbedding { site_dims: site_gradings.iter().map(|g| g.len()).collect(), site_gradings }
    }

    pub fn ambient(&self) -> Ambient {
        self.site_gradings.iter().fold(Ambient::trivial(1), |acc, g| acc.tensor(&Ambient::new(g.clone())))
    }

    pub fn site_ambient(&self, site: usize) -> Ambient {
        Ambient::new(self.site_gradings[site].clone())
    }

    /// (Θ₁⊗…⊗Θ_{n−1})^{τ(x)} ⊗ x ⊗ I ⊗ … applied to each parity part of x.
    pub fn embed(&self, site: usize, x: &CMat) -> Result<CMat> {
        if site >= self.site_dims.len() {
            return Err(Error::SiteOutOfRange(site));
        }
        let local = self.site_ambient(site);
        let (xe, xo) = parity_split(x, &local)?;
        let mut even_f = Vec::new();
        let mut odd_f = Vec::new();
        for (k, g) in self.site_gradings.iter().enumerate() {
            let n = g.len();
            if k < site {
                even_f.push(eye(n));
                odd_f.push(Ambient::new(g.clone()).theta_matrix());
            } else if k == site {
                even_f.push(xe.clone());
                odd_f.push(xo.clone());
            } else {
                even_f.push(eye(n));
                odd_f.push(eye(n));
            }
        }
        Ok(kron_all(&even_f) + kron_all(&odd_f))
    }
}

/// Ambient unitary U₁ ⊗ U₂Θ₂^{ξ₁} implementing α₁ ⊗̂ α₂ in the left Jordan–Wigner picture.
pub fn graded_tensor_autom(u1: &CMat, xi1: u8, u2: &CMat, xi2: u8, amb1: &Ambient, amb2: &Ambient) -> Result<CMat> {
    for (u, xi, amb) in [(u1, xi1, amb1), (u2, xi2, amb2)] {
        amb.check(u)?;
        let sign = if xi == 1 { -1.0 } else { 1.0 };
        if frob(&(amb.theta(u) - u * c(sign, 0.0))) > 1e-9 * frob(u).max(1.0) {
            return Err(Error::ParityMismatch(format!("unitary does not have parity {xi}")));
        }
    }
    let right = if xi1 == 1 { u2 * amb2.theta_matrix() } else { u2.clone() };
    Ok(kron(u1, &right))
}

/// Shape of a central simple superalgebra.
#[derive(Debug, Clone)]
pub enum CentralSimpleShape {
    /// M^{p|q} with grading operator Θ_B ∈ B.
    Rational { p: usize, q: usize, theta: CMat },
    /// M_n ⊗ K with odd central self-adjoint unitary ε.
    Radical { n: usize, epsilon: CMat },
}

impl CentralSimpleShape {
    pub fn is_radical(&self) -> bool {
        matches!(self, CentralSimpleShape::Radical { .. })
    }
    /// Dimension of the algebra with this shape.
    pub fn algebra_dim(&self) -> usize {
        match self {
            CentralSimpleShape::Rational { p, q, .. } => (p + q) * (p + q),
            CentralSimpleShape::Radical { n, .. } => 2 * n * n,
        }
    }
}

fn exact_sqrt(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

/// Normalize an invertible v with v² ∝ I so that v² = I, fixing the sign deterministically.
fn normalize_involution(v: &CMat) -> CMat {
    let n = v.nrows();
    let sq = v * v;
    let lam = ntrace(&sq);
    let s = lam.sqrt();
    let w = v / s;
    let _ = n;
    let pivot = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let first = w.iter().find(|x| x.norm() >= pivot * (1.0 - 1e-9)).cloned().unwrap_or(ONE);
    if first.re < 0.0 || (first.re.abs() < 1e-12 && first.im < 0.0) {
        -w
    } else {
        w
    }
}

pub fn classify_central_simple(b: &GradedSubalgebra, cfg: &Config) -> Result<CentralSimpleShape> {
    let amb = &b.ambient;
    if !b.contains_identity {
        return Err(Error::NotCentralSimple("algebra does not contain the identity".into()));
    }
    let defect = b.closure_defect();
    if defect > cfg.tol_alg.max(1e-8) {
        return Err(Error::NotSemisimple(format!("closure defect {defect:.3e}")));
    }
    let z = b.center(cfg.seed);
    let odd_center: Vec<&CMat> = z.basis.iter().zip(&z.parity).filter(|(_, &p)| p == 1).map(|(x, _)| x).collect();
    match (z.dim(), odd_center.len()) {
        (1, 0) => {
            let k = exact_sqrt(b.dim())
                .ok_or_else(|| Error::NotCentralSimple(format!("dimension {} is not a square", b.dim())))?;
            let v = inner_intertwiner(b, |x| amb.theta(x), cfg)?;
            let theta = normalize_involution(&v);
            let t = ntrace(&theta).re;
            let diff = (t * k as f64).round() as i64;
            if ((k as i64 + diff) % 2) != 0 || diff.abs() > k as i64 {
                return Err(Error::NotCentralSimple(format!("grading operator trace {t} inconsistent with size {k}")));
            }
            let p = ((k as i64 + diff) / 2) as usize;
            Ok(CentralSimpleShape::Rational { p, q: k - p, theta })
        }
        (2, 1) => {
            let n = exact_sqrt(b.dim() / 2)
                .filter(|n| 2 * n * n == b.dim())
                .ok_or_else(|| Error::NotCentralSimple(format!("dimension {} is not twice a square", b.dim())))?;
            let e = odd_center[0];
            // Odd central z: z*z is an even central element, hence scalar.
            let h = (e + dagger(e)) * c(0.5, 0.0);
            let ah = (e - dagger(e)) * c(0.0, -0.5);
            let herm = if hs_norm(&h) >= hs_norm(&ah) { h } else { ah };
            let epsilon = normalize_involution(&herm);
            Ok(CentralSimpleShape::Radical { n, epsilon })
        }
        (d, _) => Err(Error::NotCentralSimple(format!("center has dimension {d}"))),
    }
}

/// Homogeneous matrix units f[a][b] of a rational central simple B ≅ M^{p|q} (k = p + q),
/// built from the spectral projections of a seeded even Hermitian probe.
pub fn matrix_units(b: &GradedSubalgebra, k: usize, seed: u64) -> Result<Vec<Vec<CMat>>> {
    let n = b.ambient.dim();
    if k == 0 || n % k != 0 || b.dim() != k * k {
        return Err(Error::NotCentralSimple(format!("an algebra of dimension {} has no {k}x{k} matrix units in M_{n}", b.dim())));
    }
    let m = n / k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf7a3_e000);
    let x = random_complex(&mut rng, n, n);
    let r = b.project(&random_complex(&mut rng, n, n));
    let h = b.project(&(&x + dagger(&x)));
    let h = ((&h + b.ambient.theta(&h)) + dagger(&(&h + b.ambient.theta(&h)))) * c(0.25, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).expect("finite eigenvalues"));
    let mut projs = Vec::with_capacity(k);
    for a in 0..k {
        let idx = &order[a * m..(a + 1) * m];
        if eig.eigenvalues[idx[m - 1]] - eig.eigenvalues[idx[0]] > 1e-7 {
            return Err(Error::NoConvergence("spectral projections of the probe are not multiplicity-uniform".into()));
        }
        let mut pa = CMat::zeros(n, n);
        for &i in idx {
            let v = eig.eigenvectors.column(i);
            pa += &v * v.adjoint();
        }
        // Clean up to an exactly even element of B.
        projs.push(b.project(&((&pa + b.ambient.theta(&pa)) * c(0.5, 0.0))));
    }
    let tr0 = projs[0].trace().re;
    let mut first_row = vec![projs[0].clone()];
    for pa in &projs[1..] {
        let y = mm_all(&[&projs[0], &r, pa]);
        let cn = mm(&y, &dagger(&y)).trace().re / tr0;
        if cn < 1e-12 {
            return Err(Error::NoConvergence("degenerate matrix-unit probe".into()));
        }
        first_row.push(y / c(cn.sqrt(), 0.0));
    }
    Ok((0..k).map(|a| (0..k).map(|bb| mm(&dagger(&first_row[a]), &first_row[bb])).collect()).collect())
}

/// Unitary V ∈ B with V x V* = φ(x) for all x ∈ B, unique up to phase when B is simple.
pub fn inner_intertwiner(b: &GradedSubalgebra, phi: impl Fn(&CMat) -> CMat, cfg: &Config) -> Result<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a7e_2717);
    let probes: Vec<(CMat, CMat)> = (0..3)
        .map(|_| {
            let r = b.random_element(&mut rng);
            let fr = phi(&r);
            (r, fr)
        })
        .collect();
    // Solve V r = φ(r) V with V ranging over all of B (not split by parity).
    let d = b.dim();
    let n = b.ambient.dim();
    let mut m = CMat::zeros(probes.len() * n * n, d);
    for (k, bk) in b.basis.iter().enumerate() {
        let mut off = 0;
        for (r, fr) in &probes {
            let col = bk * r - fr * bk;
            for (t, v) in col.iter().enumerate() {
                m[(off + t, k)] = *v;
            }
            off += n * n;
        }
    }
    let ns = null_space(&m, KERNEL_TOL);
    match ns.ncols() {
        0 => return Err(Error::NoIntertwiner("kernel is trivial".into())),
        1 => {}
        k => return Err(Error::AmbiguousKernel(k)),
    }
    let coeffs: Vec<C64> = (0..d).map(|i| ns[(i, 0)]).collect();
    let v = b.element(&coeffs);
    let vv = dagger(&v) * &v;
    let scale = ntrace(&vv).re.sqrt();
    let v = fix_phase(&(v / c(scale, 0.0)));
    if frob(&(dagger(&v) * &v - eye(n))) > 1e-7 * (n as f64).sqrt() {
        return Err(Error::NoIntertwiner("kernel element is not proportional to a unitary".into()));
    }
    // Verify on a spread of basis elements.
    let step = (d / 16).max(1);
    for k in (0..d).step_by(step) {
        let x = &b.basis[k];
        let err = hs_norm(&(&v * x * dagger(&v) - phi(x)));
        if err > 1e-7 {
            return Err(Error::NoIntertwiner(format!("verification residual {err:.3e}")));
        }
    }
    Ok(v)
}
