//! Overlap algebras L_n = C_n ∩ α(B_n), R_n = C_{n+1} ∩ α(B_n), their factorization, and
//! the index ind(α) = ind(R_n)·ind(A_{2n+1})⁻¹ = ind(A_{2n})·ind(L_n)⁻¹.

use super::{LocalOp, QcaRealization};
use crate::error::{Error, Result};
use crate::gsystem::{analyze, relative_index, GSystem, IndexTriple};
use crate::linalg::*;
use crate::superalg::{
    classify_central_simple, close_algebra, close_algebra_capped, intersect, supercommutator, CentralSimpleShape,
    GradedSubalgebra,
};
use crate::Config;

/// Largest number of stored matrix entries (basis size × N²) for one overlap algebra.
const ALGEBRA_BUDGET: usize = 1 << 22;
/// Patches up to this dimension are cross-checked against the intersection definition.
const CROSS_CHECK_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct OverlapPair {
    /// L_n in the ambient of C_n.
    pub left: GradedSubalgebra,
    /// R_n in the ambient of C_{n+1}.
    pub right: GradedSubalgebra,
    pub at: usize,
    /// Whether the intersection definition was evaluated and agreed.
    pub cross_checked: bool,
}

/// Orthonormal basis of the span of `vectors`, dropping those within `tol` (relative) of it.
fn span_basis(vectors: impl Iterator<Item = CVec>, tol: f64) -> Vec<CVec> {
    let vectors: Vec<CVec> = vectors.collect();
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut r = v;
        for _ in 0..2 {
            for b in &basis {
                let k = b.dotc(&r);
                r -= b * k;
            }
        }
        let nr = r.norm();
        if nr > tol * scale {
            basis.push(r / c(nr, 0.0));
        }
    }
    basis
}

/// Spans of the left and right factors of op = Σ π(p_k ⊗̂ q_k) at `cut`, with p_k on
/// [start, cut) and q_k on [cut, end).  Each factor is homogeneous.
fn schmidt_spans(q: &QcaRealization, op: &LocalOp, cut: usize) -> Result<(Vec<LocalOp>, Vec<LocalOp>)> {
    let w = &q.window;
    if cut <= op.start {
        return Ok((Vec::new(), vec![op.clone()]));
    }
    if cut >= op.end() {
        return Ok((vec![op.clone()], Vec::new()));
    }
    let dl = w.interval_dim(op.start, cut);
    let dr = w.interval_dim(cut, op.end());
    let amb_l = w.interval_ambient(op.start, cut);
    let amb_r = w.interval_ambient(cut, op.end());
    let th_l = amb_l.theta_matrix();
    let (gl, gr) = (&amb_l.grading, &amb_r.grading);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (pl, pr) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let (sl, sr) = (if pl == 0 { 1.0 } else { -1.0 }, if pr == 0 { 1.0 } else { -1.0 });
        // The parity blocks of a diagonal grading are entrywise masks.
        let m = CMat::from_fn(dl * dr, dl * dr, |i, j| {
            let l = (gl[i / dr] * gl[j / dr]) as f64;
            let r = (gr[i % dr] * gr[j % dr]) as f64;
            if l == sl && r == sr {
                op.mat[(i, j)]
            } else {
                ZERO
            }
        });
        if frob(&m) < 1e-12 * frob(&op.mat).max(1e-300) {
            continue;
        }
        let realigned = CMat::from_fn(dl * dl, dr * dr, |r, s| {
            let (i1, j1) = (r / dl, r % dl);
            let (i2, j2) = (s / dr, s % dr);
            m[(i1 * dr + i2, j1 * dr + j2)]
        });
        // Orthonormalize the shorter family; the other side is its image under the
        // realigned matrix.
        let (cols, rows) = if dr <= dl {
            let cols = span_basis((0..dr * dr).map(|s| realigned.column(s).into_owned()), 1e-10);
            let adj = realigned.adjoint();
            let rows = span_basis(cols.iter().map(|v| (&adj * v).map(|z| z.conj())), 1e-10);
            (cols, rows)
        } else {
            let rows = span_basis((0..dl * dl).map(|r| realigned.row(r).transpose()), 1e-10);
            let cols = span_basis(rows.iter().map(|v| &realigned * v.map(|z| z.conj())), 1e-10);
            (cols, rows)
        };
        for v in cols {
            let mut p = CMat::from_fn(dl, dl, |i, j| v[i * dl + j]);
            if pr == 1 {
                p *= &th_l;
            }
            let p = (&p + amb_l.theta(&p) * c(sl, 0.0)) * c(0.5, 0.0);
            left.push(LocalOp::new(op.start, cut - op.start, p));
        }
        for v in rows {
            let qm = CMat::from_fn(dr, dr, |i, j| v[i * dr + j]);
            let qm = (&qm + amb_r.theta(&qm) * c(sr, 0.0)) * c(0.5, 0.0);
            right.push(LocalOp::new(cut, op.end() - cut, qm));
        }
    }
    Ok((left, right))
}

/// Generator images of B_n, checked to lie in C_n ⊗̂ C_{n+1}.
fn cell_images(q: &QcaRealization, n: usize) -> Result<Vec<LocalOp>> {
    let w = &q.window;
    if n == 0 || 2 * n + 2 >= w.len() {
        return Err(Error::RegionOutOfRange(format!("cell {n} needs sites {}..={} inside a window of {}", 2 * n as i64 - 1, 2 * n + 2, w.len())));
    }
    let mut out = Vec::new();
    for s in [2 * n, 2 * n + 1] {
        let imgs = q.images[s]
            .as_ref()
            .ok_or_else(|| Error::RegionOutOfRange(format!("no image recorded for site {s}")))?;
        for op in imgs {
            if op.start + 1 < 2 * n || op.end() > 2 * n + 3 {
                return Err(Error::FactorizationHypothesisViolated(format!(
                    "image of a generator at site {s} occupies [{}, {}), outside C_{n} ⊗̂ C_{}",
                    op.start,
                    op.end(),
                    n + 1
                )));
            }
            out.push(op.clone());
        }
    }
    Ok(out)
}

fn cap_for(dim: usize) -> usize {
    (ALGEBRA_BUDGET / (dim * dim).max(1)).min(dim * dim)
}

/// (L_n, R_n), each `None` when it exceeds the storage budget.
fn overlap_parts(q: &QcaRealization, n: usize, cfg: &Config) -> Result<(Option<GradedSubalgebra>, Option<GradedSubalgebra>)> {
    let w = &q.window;
    let images = cell_images(q, n)?;
    let (c0, c1, c2) = (2 * n - 1, 2 * n + 1, 2 * n + 3);
    for (a, b) in [(c0, c1), (c1, c2)] {
        let dim = w.interval_dim(a, b);
        if dim > cfg.max_ambient {
            return Err(Error::AmbientTooLarge { dim, cap: cfg.max_ambient });
        }
    }
    let amb_l = w.interval_ambient(c0, c1);
    let amb_r = w.interval_ambient(c1, c2);
    let mut lgens = vec![eye(amb_l.dim())];
    let mut rgens = vec![eye(amb_r.dim())];
    for op in &images {
        let (ls, rs) = schmidt_spans(q, op, c1)?;
        for l in ls {
            lgens.push(l.widen(w, c0, c1)?);
        }
        for r in rs {
            rgens.push(r.widen(w, c1, c2)?);
        }
    }
    let left = close_algebra_capped(&lgens, &amb_l, cap_for(amb_l.dim()))?;
    // dim B_n = dim L_n · dim R_n predicts when R_n cannot fit; building it up to the cap
    // first would dominate the run time.
    let predicted = left.as_ref().map(|l| w.interval_dim(2 * n, 2 * n + 2).pow(2) / l.dim());
    let right = match predicted {
        Some(p) if p > cap_for(amb_r.dim()) => None,
        _ => close_algebra_capped(&rgens, &amb_r, cap_for(amb_r.dim()))?,
    };
    Ok((left, right))
}

fn widen_algebra(q: &QcaRealization, alg: &GradedSubalgebra, a: usize, b: usize, lo: usize, hi: usize) -> Result<GradedSubalgebra> {
    let w = &q.window;
    let elements: Vec<CMat> =
        alg.basis.iter().map(|x| LocalOp::new(a, b - a, x.clone()).widen(w, lo, hi)).collect::<Result<_>>()?;
    Ok(GradedSubalgebra::from_elements(&elements, &w.interval_ambient(lo, hi)))
}

/// Compare with C_n ∩ alg(α(B_n)) and C_{n+1} ∩ alg(α(B_n)) computed on the whole patch.
fn cross_check(q: &QcaRealization, n: usize, left: &GradedSubalgebra, right: &GradedSubalgebra) -> Result<()> {
    let w = &q.window;
    let (lo, mid, hi) = (2 * n - 1, 2 * n + 1, 2 * n + 3);
    let amb = w.interval_ambient(lo, hi);
    let mut gens: Vec<CMat> = cell_images(q, n)?.iter().map(|op| op.widen(w, lo, hi)).collect::<Result<_>>()?;
    gens.push(eye(amb.dim()));
    let image = close_algebra(&gens, &amb)?;
    let full_l = GradedSubalgebra::full(&w.interval_ambient(lo, mid));
    let full_r = GradedSubalgebra::full(&w.interval_ambient(mid, hi));
    let by_int_l = intersect(&image, &widen_algebra(q, &full_l, lo, mid, lo, hi)?)?;
    let by_int_r = intersect(&image, &widen_algebra(q, &full_r, mid, hi, lo, hi)?)?;
    if !by_int_l.same_as(&widen_algebra(q, left, lo, mid, lo, hi)?) {
        return Err(Error::FactorizationHypothesisViolated(format!("left overlap at cell {n} disagrees with C_n ∩ α(B_n)")));
    }
    if !by_int_r.same_as(&widen_algebra(q, right, mid, hi, lo, hi)?) {
        return Err(Error::FactorizationHypothesisViolated(format!("right overlap at cell {n} disagrees with C_(n+1) ∩ α(B_n)")));
    }
    Ok(())
}

/// L_n and R_n at cell n.  Small patches are cross-checked against the intersection
/// definition.
pub fn overlap_algebras(q: &QcaRealization, n: usize, cfg: &Config) -> Result<OverlapPair> {
    let (l, r) = overlap_parts(q, n, cfg)?;
    let (Some(left), Some(right)) = (l, r) else {
        return Err(Error::AmbientTooLarge { dim: q.window.interval_dim(2 * n - 1, 2 * n + 3), cap: CROSS_CHECK_DIM });
    };
    let patch = q.window.interval_dim(2 * n - 1, 2 * n + 3);
    let cross_checked = patch <= CROSS_CHECK_DIM;
    if cross_checked {
        cross_check(q, n, &left, &right)?;
    }
    Ok(OverlapPair { left, right, at: n, cross_checked })
}

/// Dimension and central-simplicity checks of the overlap factorization at cell n.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub cell: usize,
    pub dim_c: usize,
    pub dim_b: usize,
    pub dim_left: usize,
    pub dim_right: usize,
    pub dim_right_prev: usize,
    /// dim C_n = dim R_{n−1}·dim L_n.
    pub c_factorizes: bool,
    /// dim B_n = dim L_n·dim R_n.
    pub b_factorizes: bool,
    pub supercommute: bool,
    /// R_{n−1} and L_n jointly generate C_n (evaluated when C_n is small).
    pub generates: Option<bool>,
    pub left_shape: Option<String>,
    pub right_shape: Option<String>,
    pub right_prev_shape: Option<String>,
}

impl FactorizationReport {
    pub fn ok(&self) -> bool {
        self.c_factorizes
            && self.b_factorizes
            && self.supercommute
            && self.generates != Some(false)
            && self.left_shape.is_some()
            && self.right_shape.is_some()
            && self.right_prev_shape.is_some()
    }
}

pub fn shape_label(s: &CentralSimpleShape) -> String {
    match s {
        CentralSimpleShape::Rational { p, q, .. } => format!("M^{{{p}|{q}}}"),
        CentralSimpleShape::Radical { n, .. } => format!("M_{n}⊗K"),
    }
}

pub fn verify_factorization(q: &QcaRealization, n: usize, cfg: &Config) -> Result<FactorizationReport> {
    if n < 2 {
        return Err(Error::RegionOutOfRange(format!("cell {n} has no left neighbour cell")));
    }
    let here = overlap_algebras(q, n, cfg)?;
    let prev = overlap_algebras(q, n - 1, cfg)?;
    let w = &q.window;
    let dim_c = w.interval_dim(2 * n - 1, 2 * n + 1).pow(2);
    let dim_b = w.interval_dim(2 * n, 2 * n + 2).pow(2);
    let (l, r, rp) = (&here.left, &here.right, &prev.right);
    let amb = &l.ambient;
    let mut supercommute = true;
    let step_a = (rp.dim() / 24).max(1);
    let step_b = (l.dim() / 24).max(1);
    'outer: for x in rp.basis.iter().step_by(step_a) {
        for y in l.basis.iter().step_by(step_b) {
            if hs_norm(&supercommutator(x, y, amb)?) > 1e-8 {
                supercommute = false;
                break 'outer;
            }
        }
    }
    let generates = if amb.dim() <= 16 {
        let gens: Vec<CMat> = rp.basis.iter().chain(l.basis.iter()).cloned().collect();
        Some(close_algebra(&gens, amb)?.dim() == dim_c)
    } else {
        None
    };
    let shape = |a: &GradedSubalgebra| classify_central_simple(a, cfg).ok().map(|s| shape_label(&s));
    Ok(FactorizationReport {
        cell: n,
        dim_c,
        dim_b,
        dim_left: l.dim(),
        dim_right: r.dim(),
        dim_right_prev: rp.dim(),
        c_factorizes: dim_c == rp.dim() * l.dim(),
        b_factorizes: dim_b == l.dim() * r.dim(),
        supercommute,
        generates,
        left_shape: shape(l),
        right_shape: shape(r),
        right_prev_shape: shape(rp),
    })
}

/// Index at one cell together with the data it was read from.
#[derive(Debug, Clone)]
pub struct IndexReport {
    pub cell: usize,
    pub index: IndexTriple,
    /// ind(R_n)·ind(A_{2n+1})⁻¹, when R_n fits the storage budget.
    pub right_route: Option<IndexTriple>,
    /// ind(A_{2n})·ind(L_n)⁻¹, when L_n fits the storage budget.
    pub left_route: Option<IndexTriple>,
    pub dim_left: Option<usize>,
    pub dim_right: Option<usize>,
    pub left_shape: Option<String>,
    pub right_shape: Option<String>,
    /// ν(g,h) of the implementing unitaries of the first available overlap algebra.
    pub overlap_cocycle: Option<Vec<Vec<C64>>>,
    pub cross_checked: bool,
}

pub fn qca_index_at(q: &QcaRealization, n: usize, cfg: &Config) -> Result<IndexReport> {
    let w = &q.window;
    let g = w.group.clone();
    cell_images(q, n)?;
    q.check_site(2 * n)?;
    q.check_site(2 * n + 1)?;
    let (left, right) = overlap_parts(q, n, cfg)?;
    let patch = w.interval_dim(2 * n - 1, 2 * n + 3);
    let mut cross_checked = false;
    if let (Some(l), Some(r)) = (&left, &right) {
        if patch <= CROSS_CHECK_DIM {
            cross_check(q, n, l, r)?;
            cross_checked = true;
        }
    }
    let mut report = IndexReport {
        cell: n,
        index: IndexTriple::identity(&g),
        right_route: None,
        left_route: None,
        dim_left: left.as_ref().map(|a| a.dim()),
        dim_right: right.as_ref().map(|a| a.dim()),
        left_shape: None,
        right_shape: None,
        overlap_cocycle: None,
        cross_checked,
    };
    if let Some(r) = right {
        let act = g.elements().map(|x| w.interval_action(2 * n + 1, 2 * n + 3, x)).collect::<Result<Vec<_>>>()?;
        let sys = GSystem::new(g.clone(), r, act)?;
        let an = analyze(&sys, cfg)?;
        report.right_shape = Some(shape_label(&an.shape));
        report.overlap_cocycle = Some(an.cocycle.phases.clone());
        report.right_route = Some(relative_index(&sys, &w.sites[2 * n + 1].gsystem(&g), cfg)?);
    }
    if let Some(l) = left {
        let act = g.elements().map(|x| w.interval_action(2 * n - 1, 2 * n + 1, x)).collect::<Result<Vec<_>>>()?;
        let sys = GSystem::new(g.clone(), l, act)?;
        let an = analyze(&sys, cfg)?;
        report.left_shape = Some(shape_label(&an.shape));
        if report.overlap_cocycle.is_none() {
            report.overlap_cocycle = Some(an.cocycle.phases.clone());
        }
        report.left_route = Some(relative_index(&w.sites[2 * n].gsystem(&g), &sys, cfg)?);
    }
    report.index = match (&report.right_route, &report.left_route) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::InconsistentIndex(format!("cell {n}: ind(R_n, A_(2n+1)) = {a:?} but ind(A_(2n), L_n) = {b:?}")))
        }
        (Some(a), _) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(Error::AmbientTooLarge { dim: patch, cap: ALGEBRA_BUDGET }),
    };
    Ok(report)
}

/// Index at the central admissible cell.
pub fn qca_index(q: &QcaRealization, cfg: &Config) -> Result<IndexTriple> {
    let cells = q.admissible_cells();
    if cells.is_empty() {
        return Err(Error::WindowTooSmall(format!("no admissible cell in a window of {} sites", q.window.len())));
    }
    Ok(qca_index_at(q, cells[cells.len() / 2], cfg)?.index)
}

pub fn index_at_all_cells(q: &QcaRealization, cfg: &Config) -> Result<Vec<(usize, IndexTriple)>> {
    q.admissible_cells().into_iter().map(|n| Ok((n, qca_index_at(q, n, cfg)?.index))).collect()
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::group::FiniteGroup;
    use crate::gsystem::IndexValue;

    #[test]
    fn schmidt_spans_of_graded_products() {
        let g = FiniteGroup::trivial();
        let w = ChainWindow::uniform(g.clone(), Site::plain(vec![1, -1], &g), 4).unwrap();
        let q = QcaRealization::identity(w);
        // σ_X ⊗̂ σ_Y on sites 1,2 is π = σ_Xσ_Z ⊗ σ_Y.
        let op = LocalOp::new(1, 2, kron(&(pauli_x() * pauli_z()), &pauli_y()));
        let (ls, rs) = schmidt_spans(&q, &op, 2).unwrap();
        assert_eq!((ls.len(), rs.len()), (1, 1));
        assert!(frob(&(&ls[0].mat / ls[0].mat[(0, 1)] - pauli_x())) < 1e-12);
        assert!(frob(&(&rs[0].mat / rs[0].mat[(0, 1)] * c(0.0, -1.0) - pauli_y())) < 1e-12);
        // σ_X ⊗̂ σ_Y + σ_Z ⊗̂ I has two factors on each side, one of each parity.
        let sum = LocalOp::new(1, 2, &op.mat + kron(&pauli_z(), &eye(2)));
        let (ls, rs) = schmidt_spans(&q, &sum, 2).unwrap();
        assert_eq!((ls.len(), rs.len()), (2, 2));
        let amb = q.window.interval_ambient(1, 2);
        assert!(ls.iter().all(|l| crate::superalg::parity_of(&l.mat, &amb).is_some()));
    }

    #[test]
    fn identity_overlaps_are_sites() {
        let g = FiniteGroup::cyclic(2);
        let site = Site::new(vec![1, -1], vec![eye(2), pauli_z()]);
        let w = ChainWindow::uniform(g, site, 8).unwrap();
        let q = QcaRealization::identity(w);
        let p = overlap_algebras(&q, 2, &Config::default()).unwrap();
        assert_eq!((p.left.dim(), p.right.dim()), (4, 4));
        assert!(p.cross_checked);
        let rep = verify_factorization(&q, 2, &Config::default()).unwrap();
        assert!(rep.ok(), "{rep:?}");
        let ind = qca_index(&q, &Config::default()).unwrap();
        assert!(ind.is_identity());
        assert_eq!(ind.d, IndexValue::one());
    }
}
