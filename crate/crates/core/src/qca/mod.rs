//! Finite windows of graded quantum chains, extensional realizations of even equivariant
//! QCAs, overlap algebras, the QCA index, composition and stacking, presets, circuits and
//! decoupling of trivial QCAs.
//!
//! Cells follow the usual pairing: B_n = A_{2n} ⊗̂ A_{2n+1} and C_n = A_{2n−1} ⊗̂ A_{2n}.
//! Operators on an interval of sites are written in the left Jordan–Wigner picture of
//! that interval, so an odd operator carries the grading string of every site to its
//! left inside the interval.

mod circuit;
mod decouple;
mod ops;
mod overlap;
mod presets;

pub use circuit::{circuit_from_layers, random_circuit, random_circuit_window, random_invariant_unitary, CircuitLayer};
pub use decouple::{decouple_trivial, Decoupling};
pub use ops::{coarse_grain, compose_qca, stack_qca, stack_windows};
pub use overlap::{
    index_at_all_cells, overlap_algebras, qca_index, qca_index_at, verify_factorization, FactorizationReport,
    IndexReport, OverlapPair,
};
pub use presets::{
    preset_cocycle_example, preset_identity, preset_majorana_shift, preset_majorana_shift_left,
    preset_majorana_shift_ordered, preset_shift, preset_shift_left, preset_zeta_example, shift_uniform,
    MajoranaOrdering, DEFAULT_SITES,
};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::gsystem::{projective_cocycle, GSystem};
use crate::linalg::*;
use crate::superalg::{graded_tensor_autom, parity_of, parity_split, Ambient, ChainEmbedding, GradedSubalgebra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One site: a graded matrix algebra with a projective on-site representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub grading: Vec<i8>,
    /// u(g) indexed by group element.
    pub rep: Vec<CMat>,
}

impl Site {
    pub fn new(grading: Vec<i8>, rep: Vec<CMat>) -> Self {
        Site { grading, rep }
    }

    /// Site with trivial symmetry action.
    pub fn plain(grading: Vec<i8>, group: &FiniteGroup) -> Self {
        let d = grading.len();
        Site { grading, rep: group.elements().map(|_| eye(d)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn ambient(&self) -> Ambient {
        Ambient::new(self.grading.clone())
    }

    /// Parity ξ(g) of u(g).
    pub fn rep_parity(&self, g: usize) -> u8 {
        parity_of(&self.rep[g], &self.ambient()).unwrap_or(0)
    }

    /// The site algebra as a G-system.
    pub fn gsystem(&self, group: &FiniteGroup) -> GSystem {
        GSystem { group: group.clone(), algebra: GradedSubalgebra::full(&self.ambient()), action: self.rep.clone() }
    }
}

/// A finite stretch of a chain with its symmetry group.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainWindow {
    pub group: FiniteGroup,
    pub sites: Vec<Site>,
}

impl ChainWindow {
    /// Validates that every on-site representation is projective and acts evenly.
    pub fn new(group: FiniteGroup, sites: Vec<Site>) -> Result<Self> {
        for (k, s) in sites.iter().enumerate() {
            let d = s.dim();
            if s.rep.len() != group.order {
                return Err(Error::NotARepresentation(format!("site {k}: {} unitaries for |G| = {}", s.rep.len(), group.order)));
            }
            for u in &s.rep {
                if u.nrows() != d || u.ncols() != d || frob(&(dagger(u) * u - eye(d))) > 1e-9 * d as f64 {
                    return Err(Error::NotARepresentation(format!("site {k}: on-site operator is not a {d}x{d} unitary")));
                }
                if parity_of(u, &s.ambient()).is_none() {
                    return Err(Error::NotEquivariant(format!("site {k}: Ad u(g) does not commute with the grading")));
                }
            }
            projective_cocycle(&group, &s.rep).map_err(|e| Error::NotProjective(format!("site {k}: {e}")))?;
        }
        Ok(ChainWindow { group, sites })
    }

    pub fn uniform(group: FiniteGroup, site: Site, n: usize) -> Result<Self> {
        ChainWindow::new(group, vec![site; n])
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn embedding(&self) -> ChainEmbedding {
        ChainEmbedding::new(self.sites.iter().map(|s| s.grading.clone()).collect())
    }

    /// Ambient of the interval [a, b).
    pub fn interval_ambient(&self, a: usize, b: usize) -> Ambient {
        self.sites[a..b].iter().fold(Ambient::trivial(1), |acc, s| acc.tensor(&s.ambient()))
    }

    pub fn interval_dim(&self, a: usize, b: usize) -> usize {
        self.sites[a..b].iter().map(|s| s.dim()).product()
    }

    /// Unitary implementing ρ^g on the interval [a, b).
    pub fn interval_action(&self, a: usize, b: usize, g: usize) -> Result<CMat> {
        let mut u = eye(1);
        let mut amb = Ambient::trivial(1);
        let mut xi = 0u8;
        for s in &self.sites[a..b] {
            let sa = s.ambient();
            let sx = s.rep_parity(g);
            u = graded_tensor_autom(&u, xi, &s.rep[g], sx, &amb, &sa)?;
            amb = amb.tensor(&sa);
            xi ^= sx;
        }
        Ok(u)
    }

    /// The interval [a, b) as a G-system with its full algebra.
    pub fn interval_gsystem(&self, a: usize, b: usize) -> Result<GSystem> {
        let amb = self.interval_ambient(a, b);
        let action = self.group.elements().map(|g| self.interval_action(a, b, g)).collect::<Result<_>>()?;
        Ok(GSystem { group: self.group.clone(), algebra: GradedSubalgebra::full(&amb), action })
    }
}

/// An operator on the sites [start, start + len), in that interval's Jordan–Wigner picture.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    pub start: usize,
    pub len: usize,
    pub mat: CMat,
}

impl LocalOp {
    pub fn new(start: usize, len: usize, mat: CMat) -> Self {
        LocalOp { start, len, mat }
    }

    pub fn site(site: usize, mat: CMat) -> Self {
        LocalOp { start: site, len: 1, mat }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    /// Matrix of the operator on the larger interval [a, b).
    pub fn widen(&self, w: &ChainWindow, a: usize, b: usize) -> Result<CMat> {
        if a > self.start || b < self.end() || b > w.len() {
            return Err(Error::RegionOutOfRange(format!(
                "operator on [{}, {}) does not fit in [{a}, {b})",
                self.start,
                self.end()
            )));
        }
        if a == self.start && b == self.end() {
            return Ok(self.mat.clone());
        }
        let (e, o) = parity_split(&self.mat, &w.interval_ambient(self.start, self.end()))?;
        let left = w.interval_ambient(a, self.start);
        let right = eye(w.interval_dim(self.end(), b));
        let even = kron(&kron(&eye(left.dim()), &e), &right);
        let odd = kron(&kron(&left.theta_matrix(), &o), &right);
        Ok(even + odd)
    }

    /// The same operator on [a, b).
    pub fn widened(&self, w: &ChainWindow, a: usize, b: usize) -> Result<LocalOp> {
        Ok(LocalOp::new(a, b - a, self.widen(w, a, b)?))
    }

    /// Product self·other on the union of the supports.
    pub fn mul(&self, other: &LocalOp, w: &ChainWindow) -> Result<LocalOp> {
        let a = self.start.min(other.start);
        let b = self.end().max(other.end());
        Ok(LocalOp::new(a, b - a, mm(&self.widen(w, a, b)?, &other.widen(w, a, b)?)))
    }

    pub fn scale(&self, k: C64) -> LocalOp {
        LocalOp::new(self.start, self.len, &self.mat * k)
    }

    pub fn adjoint(&self) -> LocalOp {
        LocalOp::new(self.start, self.len, dagger(&self.mat))
    }

    /// Restriction to a sub-interval [a, b), when the operator lies in A_{[a,b)}.
    pub fn restrict(&self, w: &ChainWindow, a: usize, b: usize) -> Option<LocalOp> {
        if a < self.start || b > self.end() || a > b {
            return None;
        }
        let d1 = w.interval_dim(self.start, a);
        let d2 = w.interval_dim(a, b);
        let d3 = w.interval_dim(b, self.end());
        let left = w.interval_ambient(self.start, a);
        let (e, o) = parity_split(&self.mat, &w.interval_ambient(self.start, self.end())).ok()?;
        let norm = (d1 * d3) as f64;
        let mut y = CMat::zeros(d2, d2);
        for i in 0..d2 {
            for j in 0..d2 {
                let mut acc = ZERO;
                for l in 0..d1 {
                    let th = left.grading[l] as f64;
                    for r in 0..d3 {
                        let row = (l * d2 + i) * d3 + r;
                        let col = (l * d2 + j) * d3 + r;
                        acc += e[(row, col)] + o[(row, col)] * th;
                    }
                }
                y[(i, j)] = acc / norm;
            }
        }
        let cand = LocalOp::new(a, b - a, y);
        let back = cand.widen(w, self.start, self.end()).ok()?;
        let scale = frob(&self.mat).max(1e-300);
        (frob(&(back - &self.mat)) <= 1e-9 * scale.max(1.0)).then_some(cand)
    }

    /// Smallest interval carrying the operator.
    pub fn shrink(&self, w: &ChainWindow) -> LocalOp {
        let mut cur = self.clone();
        while cur.len > 1 {
            match cur.restrict(w, cur.start + 1, cur.end()) {
                Some(r) => cur = r,
                None => break,
            }
        }
        while cur.len > 1 {
            match cur.restrict(w, cur.start, cur.end() - 1) {
                Some(r) => cur = r,
                None => break,
            }
        }
        cur
    }

    /// Distance to another operator after widening both to a common interval.
    pub fn distance(&self, other: &LocalOp, w: &ChainWindow) -> Result<f64> {
        let a = self.start.min(other.start);
        let b = self.end().max(other.end());
        Ok(hs_norm(&(self.widen(w, a, b)? - other.widen(w, a, b)?)))
    }
}

/// Generating matrix units e_{k,k+1}, e_{k+1,k} of M_d, in this order.
pub fn site_generators(d: usize) -> Vec<(usize, usize)> {
    (0..d.saturating_sub(1)).flat_map(|k| [(k, k + 1), (k + 1, k)]).collect()
}

/// How a realization was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Preset(String),
    GlobalUnitary,
    BlockMaps,
    Circuit { depth: usize },
    Composite(String),
}

/// An automorphism stored extensionally: for each site, the images of the generating
/// matrix units listed by `site_generators`.  Sites whose images would leave the window
/// have no entry.
#[derive(Debug, Clone)]
pub struct QcaRealization {
    pub window: ChainWindow,
    /// Number of original sites grouped into one site of this window.
    pub block_size: usize,
    pub images: Vec<Option<Vec<LocalOp>>>,
    pub provenance: Provenance,
}

impl QcaRealization {
    pub fn group(&self) -> &FiniteGroup {
        &self.window.group
    }

    /// α(e_{ij}) at a site, built from the generator images.
    pub fn unit_image(&self, site: usize, i: usize, j: usize) -> Result<LocalOp> {
        let w = &self.window;
        let d = w.sites.get(site).ok_or(Error::SiteOutOfRange(site))?.dim();
        let imgs = self.images[site]
            .as_ref()
            .ok_or_else(|| Error::RegionOutOfRange(format!("no image recorded for site {site}")))?;
        if d == 1 {
            return Ok(LocalOp::site(site, eye(1)));
        }
        let up = |k: usize| &imgs[2 * k];
        let down = |k: usize| &imgs[2 * k + 1];
        let chain = |from: usize, to: usize| -> Result<LocalOp> {
            let mut cur: Option<LocalOp> = None;
            let steps: Vec<&LocalOp> = if from < to {
                (from..to).map(up).collect()
            } else {
                (to..from).rev().map(down).collect()
            };
            for s in steps {
                cur = Some(match cur {
                    None => s.clone(),
                    Some(c) => c.mul(s, w)?,
                });
            }
            Ok(cur.expect("nonempty chain"))
        };
        if i != j {
            return chain(i, j);
        }
        let other = if i + 1 < d { i + 1 } else { i - 1 };
        chain(i, other)?.mul(&chain(other, i)?, w)
    }

    /// α(x) for an operator x on one site.
    pub fn apply_site(&self, site: usize, x: &CMat) -> Result<LocalOp> {
        let (lo, hi, units) = self.site_units(site)?;
        Ok(LocalOp::new(lo, hi - lo, linear_image(&units, x)).shrink(&self.window))
    }

    /// Images of all matrix units of a site, widened to the hull of their supports.
    fn site_units(&self, site: usize) -> Result<(usize, usize, Vec<Vec<CMat>>)> {
        let d = self.window.sites.get(site).ok_or(Error::SiteOutOfRange(site))?.dim();
        let ops: Vec<Vec<LocalOp>> =
            (0..d).map(|i| (0..d).map(|j| self.unit_image(site, i, j)).collect::<Result<_>>()).collect::<Result<_>>()?;
        let lo = ops.iter().flatten().map(|o| o.start).min().expect("d ≥ 1");
        let hi = ops.iter().flatten().map(|o| o.end()).max().expect("d ≥ 1");
        let units = ops
            .iter()
            .map(|row| row.iter().map(|o| o.widen(&self.window, lo, hi)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok((lo, hi, units))
    }

    /// Identity automorphism of a window.
    pub fn identity(window: ChainWindow) -> Self {
        let images = window
            .sites
            .iter()
            .enumerate()
            .map(|(k, s)| Some(site_generators(s.dim()).into_iter().map(|(i, j)| LocalOp::site(k, unit(s.dim(), i, j))).collect()))
            .collect();
        QcaRealization { window, block_size: 1, images, provenance: Provenance::Preset("identity".into()) }
    }

    /// Realization of Ad U for a unitary on the whole window; supports are shrunk to the
    /// smallest interval carrying each image.
    pub fn from_global_unitary(window: ChainWindow, u: &CMat, cfg: &crate::Config) -> Result<Self> {
        let n = window.interval_dim(0, window.len());
        if n > cfg.max_ambient {
            return Err(Error::AmbientTooLarge { dim: n, cap: cfg.max_ambient });
        }
        if u.nrows() != n || frob(&(dagger(u) * u - eye(n))) > 1e-9 * n as f64 {
            return Err(Error::DimensionMismatch(format!("global unitary must be {n}x{n} and unitary")));
        }
        let len = window.len();
        let mut images = Vec::with_capacity(len);
        for (k, s) in window.sites.iter().enumerate() {
            let mut imgs = Vec::new();
            for (i, j) in site_generators(s.dim()) {
                let x = LocalOp::site(k, unit(s.dim(), i, j)).widen(&window, 0, len)?;
                imgs.push(LocalOp::new(0, len, u * x * dagger(u)).shrink(&window));
            }
            images.push(Some(imgs));
        }
        Ok(QcaRealization { window, block_size: 1, images, provenance: Provenance::GlobalUnitary })
    }

    /// Sites n for which B_n, C_n and C_{n+1} fit in the window and α(B_n) ⊆ C_n ⊗̂ C_{n+1}.
    pub fn admissible_cells(&self) -> Vec<usize> {
        let len = self.window.len();
        (1..len / 2)
            .filter(|&n| 2 * n + 2 < len)
            .filter(|&n| {
                [2 * n, 2 * n + 1].iter().all(|&s| match &self.images[s] {
                    Some(v) => v.iter().all(|op| op.start + 1 >= 2 * n && op.end() <= 2 * n + 3),
                    None => false,
                })
            })
            .collect()
    }

    /// Evenness, *-preservation, unitality and equivariance of the images at one site.
    /// Multiplicativity of the linear extension is tested on seeded random pairs: the
    /// defect α(x)α(y) − α(xy) is bilinear, so it vanishes at a generic pair only when it
    /// vanishes identically.
    pub fn check_site(&self, site: usize) -> Result<()> {
        let w = &self.window;
        let s = &w.sites[site];
        let d = s.dim();
        let amb = s.ambient();
        let (lo, hi, units) = self.site_units(site)?;
        let hull = w.interval_ambient(lo, hi);
        let n = hull.dim();
        let tol = 1e-8;
        let scaled = |x: &CMat| tol * (1.0 + hs_norm(x));
        let mut sum = CMat::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                let img = &units[i][j];
                let p = parity_of(&unit(d, i, j), &amb).unwrap_or(0);
                if hs_norm(img) > 0.0 && parity_of(img, &hull) != Some(p) {
                    return Err(Error::NotEquivariant(format!("image of e_{i}{j} at site {site} is not of parity {p}")));
                }
                if hs_norm(&(dagger(img) - &units[j][i])) > tol {
                    return Err(Error::Invalid(format!("images at site {site} are not *-preserving")));
                }
            }
            sum += &units[i][i];
        }
        if hs_norm(&(sum - eye(n))) > tol {
            return Err(Error::Invalid(format!("images at site {site} are not unital")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0c4e_c5e7 ^ site as u64);
        for _ in 0..2 {
            let (x, y) = (random_complex(&mut rng, d, d), random_complex(&mut rng, d, d));
            let lhs = mm(&linear_image(&units, &x), &linear_image(&units, &y));
            let rhs = linear_image(&units, &(&x * &y));
            if hs_norm(&(&lhs - &rhs)) > scaled(&rhs) {
                return Err(Error::Invalid(format!("images at site {site} are not multiplicative")));
            }
        }
        for g in w.group.elements() {
            let x = random_complex(&mut rng, d, d);
            let u = &s.rep[g];
            let lhs = linear_image(&units, &(u * &x * dagger(u)));
            let ug = w.interval_action(lo, hi, g)?;
            let rhs = &ug * linear_image(&units, &x) * dagger(&ug);
            if hs_norm(&(&lhs - &rhs)) > scaled(&rhs) {
                return Err(Error::NotEquivariant(format!("α∘ρ^{g} ≠ ρ^{g}∘α at site {site}")));
            }
        }
        Ok(())
    }
}

/// Σ x_ij α(e_ij) for unit images given on a common interval.
fn linear_image(units: &[Vec<CMat>], x: &CMat) -> CMat {
    let n = units[0][0].nrows();
    let mut acc = CMat::zeros(n, n);
    for (i, row) in units.iter().enumerate() {
        for (j, u) in row.iter().enumerate() {
            let k = x[(i, j)];
            if k != ZERO {
                acc += u * k;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermion_window(n: usize) -> ChainWindow {
        ChainWindow::uniform(FiniteGroup::trivial(), Site::plain(vec![1, -1], &FiniteGroup::trivial()), n).unwrap()
    }

    #[test]
    fn widen_matches_chain_embedding() {
        let w = fermion_window(4);
        let emb = w.embedding();
        let x = pauli_x();
        let op = LocalOp::site(2, x.clone());
        assert!(frob(&(op.widen(&w, 0, 4).unwrap() - emb.embed(2, &x).unwrap())) < 1e-14);
        let two = LocalOp::new(1, 2, kron(&pauli_x(), &pauli_y()));
        // kron(p, q) with q odd is the graded product (pΘ)·q.
        let direct = emb.embed(1, &(pauli_x() * pauli_z())).unwrap() * emb.embed(2, &pauli_y()).unwrap();
        assert!(frob(&(two.widen(&w, 0, 4).unwrap() - direct)) < 1e-14);
    }

    #[test]
    fn restrict_and_shrink() {
        let w = fermion_window(4);
        let op = LocalOp::site(2, pauli_x());
        let wide = op.widened(&w, 0, 4).unwrap();
        let back = wide.shrink(&w);
        assert_eq!((back.start, back.len), (2, 1));
        assert!(frob(&(back.mat - pauli_x())) < 1e-14);
        // I ⊗ σ_X is not an element of A_{1} in the graded picture.
        let plain = LocalOp::new(0, 2, kron(&eye(2), &pauli_x()));
        assert!(plain.restrict(&w, 1, 2).is_none());
    }

    #[test]
    fn window_rejects_odd_mixtures() {
        let g = FiniteGroup::cyclic(2);
        let bad = Site::new(vec![1, -1], vec![eye(2), (pauli_x() + pauli_z()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)]);
        assert!(matches!(ChainWindow::new(g, vec![bad]), Err(Error::NotEquivariant(_))));
    }

    #[test]
    fn identity_images_are_consistent() {
        let q = QcaRealization::identity(fermion_window(6));
        for s in 0..6 {
            q.check_site(s).unwrap();
        }
        assert_eq!(q.admissible_cells(), vec![1]);
    }
}
