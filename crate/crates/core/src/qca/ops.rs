//! Composition, stacking and coarse graining of realizations.

use super::{site_generators, ChainWindow, LocalOp, Provenance, QcaRealization, Site};
use crate::error::{Error, Result};
use crate::linalg::*;
use crate::superalg::graded_tensor_autom;
use std::collections::HashMap;

/// Multi-index digits of `idx` for the site dimensions `dims`.
fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Sign s with kron_m e_{i_m j_m} = s·Π_m π(e^{(m)}_{i_m j_m}), the product taken left to right.
fn unit_product_sign(gradings: &[&[i8]], i: &[usize], j: &[usize]) -> f64 {
    let tau: Vec<usize> = (0..i.len()).map(|m| (gradings[m][i[m]] != gradings[m][j[m]]) as usize).collect();
    let mut s = 1.0;
    for m in 0..i.len() {
        let later: usize = tau[m + 1..].iter().sum();
        if later % 2 == 1 {
            s *= gradings[m][j[m]] as f64;
        }
    }
    s
}

/// Σ_{I,J} y_{IJ}·s_{IJ}·Π_m f(site_m, i_m, j_m) in the target window: the image of a local
/// operator under the homomorphism determined on site matrix units by f.
fn map_local(
    src: &ChainWindow,
    y: &LocalOp,
    target: &ChainWindow,
    mut f: impl FnMut(usize, usize, usize) -> Result<LocalOp>,
) -> Result<LocalOp> {
    let sites: Vec<usize> = (y.start..y.end()).collect();
    let dims: Vec<usize> = sites.iter().map(|&k| src.sites[k].dim()).collect();
    let gradings: Vec<&[i8]> = sites.iter().map(|&k| src.sites[k].grading.as_slice()).collect();
    let scale = y.mat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut terms: Vec<LocalOp> = Vec::new();
    for r in 0..y.mat.nrows() {
        for col in 0..y.mat.ncols() {
            let k = y.mat[(r, col)];
            if k.norm() <= 1e-14 * scale {
                continue;
            }
            let (i, j) = (digits(r, &dims), digits(col, &dims));
            let s = unit_product_sign(&gradings, &i, &j);
            let mut prod: Option<LocalOp> = None;
            for (m, &site) in sites.iter().enumerate() {
                let u = f(site, i[m], j[m])?;
                prod = Some(match prod {
                    None => u,
                    Some(p) => p.mul(&u, target)?,
                });
            }
            terms.push(prod.expect("nonempty interval").scale(k * s));
        }
    }
    if terms.is_empty() {
        let (a, b) = (y.start.min(target.len()), y.end().min(target.len()));
        return Ok(LocalOp::new(a, b - a, CMat::zeros(target.interval_dim(a, b), target.interval_dim(a, b))));
    }
    let lo = terms.iter().map(|t| t.start).min().expect("nonempty");
    let hi = terms.iter().map(|t| t.end()).max().expect("nonempty");
    let n = target.interval_dim(lo, hi);
    let mut acc = CMat::zeros(n, n);
    for t in &terms {
        acc += t.widen(target, lo, hi)?;
    }
    Ok(LocalOp::new(lo, hi - lo, acc).shrink(target))
}

/// Cache of α(e_{ij}) per site.
struct UnitCache<'a> {
    q: &'a QcaRealization,
    map: HashMap<(usize, usize, usize), LocalOp>,
}

impl<'a> UnitCache<'a> {
    fn new(q: &'a QcaRealization) -> Self {
        UnitCache { q, map: HashMap::new() }
    }
    fn get(&mut self, site: usize, i: usize, j: usize) -> Result<LocalOp> {
        if let Some(v) = self.map.get(&(site, i, j)) {
            return Ok(v.clone());
        }
        let v = self.q.unit_image(site, i, j)?;
        self.map.insert((site, i, j), v.clone());
        Ok(v)
    }
}

/// α₁ ∘ α₂ on a common window.
pub fn compose_qca(q1: &QcaRealization, q2: &QcaRealization) -> Result<QcaRealization> {
    if q1.window != q2.window {
        return Err(Error::WindowMismatch("composition needs identical windows".into()));
    }
    let w = &q1.window;
    let mut cache = UnitCache::new(q1);
    let mut images = Vec::with_capacity(w.len());
    for site in 0..w.len() {
        let Some(inner) = &q2.images[site] else {
            images.push(None);
            continue;
        };
        let defined = inner.iter().all(|op| (op.start..op.end()).all(|k| q1.images[k].is_some()));
        if !defined {
            images.push(None);
            continue;
        }
        let mapped = inner.iter().map(|op| map_local(w, op, w, |k, i, j| cache.get(k, i, j))).collect::<Result<Vec<_>>>()?;
        images.push(Some(mapped));
    }
    Ok(QcaRealization {
        window: w.clone(),
        block_size: q1.block_size,
        images,
        provenance: Provenance::Composite("compose".into()),
    })
}

/// Sites A_k ⊗̂ A'_k with the action u(g) ⊗ u'(g)Θ'^{ξ(g)}.
pub fn stack_windows(w1: &ChainWindow, w2: &ChainWindow) -> Result<ChainWindow> {
    if w1.len() != w2.len() || w1.group.table != w2.group.table {
        return Err(Error::WindowMismatch("stacking needs windows of equal length over the same group".into()));
    }
    let sites = w1
        .sites
        .iter()
        .zip(&w2.sites)
        .map(|(s1, s2)| {
            let grading: Vec<i8> = s1.grading.iter().flat_map(|a| s2.grading.iter().map(move |b| a * b)).collect();
            let rep = w1
                .group
                .elements()
                .map(|g| graded_tensor_autom(&s1.rep[g], s1.rep_parity(g), &s2.rep[g], s2.rep_parity(g), &s1.ambient(), &s2.ambient()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Site::new(grading, rep))
        })
        .collect::<Result<Vec<_>>>()?;
    ChainWindow::new(w1.group.clone(), sites)
}

/// α₁ ⊗̂ α₂ on the stacked window.
pub fn stack_qca(q1: &QcaRealization, q2: &QcaRealization) -> Result<QcaRealization> {
    let (w1, w2) = (&q1.window, &q2.window);
    let w = stack_windows(w1, w2)?;
    // Matrix units of each factor inside a stacked site.
    let first = |k: usize, i: usize, j: usize| {
        let d2 = w2.sites[k].dim();
        LocalOp::site(k, kron(&unit(w1.sites[k].dim(), i, j), &eye(d2)))
    };
    let second = |k: usize, i: usize, j: usize| {
        let s2 = &w2.sites[k];
        let odd = s2.grading[i] != s2.grading[j];
        let th = if odd { w1.sites[k].ambient().theta_matrix() } else { eye(w1.sites[k].dim()) };
        LocalOp::site(k, kron(&th, &unit(s2.dim(), i, j)))
    };
    let mut c1 = UnitCache::new(q1);
    let mut c2 = UnitCache::new(q2);
    let mut images = Vec::with_capacity(w.len());
    for k in 0..w.len() {
        if q1.images[k].is_none() || q2.images[k].is_none() {
            images.push(None);
            continue;
        }
        let (s1, s2) = (&w1.sites[k], &w2.sites[k]);
        let d2 = s2.dim();
        let mut imgs = Vec::new();
        for (a, b) in site_generators(s1.dim() * d2) {
            let (i, i2, j, j2) = (a / d2, a % d2, b / d2, b % d2);
            let odd2 = s2.grading[i2] != s2.grading[j2];
            let sign = if odd2 { s1.grading[j] as f64 } else { 1.0 };
            let y1 = c1.get(k, i, j)?;
            let y2 = c2.get(k, i2, j2)?;
            let lifted1 = map_local(w1, &y1, &w, |s, x, y| Ok(first(s, x, y)))?;
            let lifted2 = map_local(w2, &y2, &w, |s, x, y| Ok(second(s, x, y)))?;
            imgs.push(lifted1.mul(&lifted2, &w)?.scale(c(sign, 0.0)).shrink(&w));
        }
        images.push(Some(imgs));
    }
    Ok(QcaRealization { window: w, block_size: q1.block_size, images, provenance: Provenance::Composite("stack".into()) })
}

/// Group `factor` consecutive sites into one.  Trailing sites that do not fill a group are
/// dropped.  Every image must stay within one grouped site of its source.
pub fn coarse_grain(q: &QcaRealization, factor: usize) -> Result<QcaRealization> {
    if factor == 0 {
        return Err(Error::Invalid("coarse-graining factor must be positive".into()));
    }
    let w = &q.window;
    let new_len = w.len() / factor;
    let sites = (0..new_len)
        .map(|k| {
            let (a, b) = (k * factor, (k + 1) * factor);
            let grading = w.interval_ambient(a, b).grading;
            let rep = w.group.elements().map(|g| w.interval_action(a, b, g)).collect::<Result<Vec<_>>>()?;
            Ok(Site::new(grading, rep))
        })
        .collect::<Result<Vec<_>>>()?;
    let nw = ChainWindow::new(w.group.clone(), sites)?;
    let mut cache = UnitCache::new(q);
    let mut images = Vec::with_capacity(new_len);
    for k in 0..new_len {
        let (a, b) = (k * factor, (k + 1) * factor);
        if (a..b).any(|s| q.images[s].is_none()) {
            images.push(None);
            continue;
        }
        let dims: Vec<usize> = (a..b).map(|s| w.sites[s].dim()).collect();
        let gradings: Vec<&[i8]> = (a..b).map(|s| w.sites[s].grading.as_slice()).collect();
        let mut imgs = Vec::new();
        let mut outside = false;
        for (ri, ci) in site_generators(nw.sites[k].dim()) {
            let (i, j) = (digits(ri, &dims), digits(ci, &dims));
            let s = unit_product_sign(&gradings, &i, &j);
            let mut prod: Option<LocalOp> = None;
            for m in 0..factor {
                let u = cache.get(a + m, i[m], j[m])?;
                prod = Some(match prod {
                    None => u,
                    Some(p) => p.mul(&u, w)?,
                });
            }
            let p = prod.expect("factor > 0").scale(c(s, 0.0));
            let lo = p.start / factor;
            let hi = p.end().div_ceil(factor);
            if lo + 1 < k || hi > k + 2 || hi > new_len {
                if hi <= new_len {
                    return Err(Error::NotNearestNeighbourAfterGrouping(format!(
                        "image of grouped site {k} spans grouped sites [{lo}, {hi})"
                    )));
                }
                outside = true;
                break;
            }
            let mat = p.widen(w, lo * factor, hi * factor)?;
            imgs.push(LocalOp::new(lo, hi - lo, mat));
        }
        images.push(if outside { None } else { Some(imgs) });
    }
    Ok(QcaRealization { window: nw, block_size: q.block_size * factor, images, provenance: q.provenance.clone() })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::gsystem::IndexValue;
    use crate::Config;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn unit_product_sign_matches_embedding() {
        let g = crate::group::FiniteGroup::trivial();
        let w = ChainWindow::uniform(g.clone(), Site::plain(vec![1, -1], &g), 3).unwrap();
        let gr: Vec<&[i8]> = vec![&[1, -1], &[1, -1], &[1, -1]];
        for r in 0..8 {
            for col in 0..8 {
                let (i, j) = (digits(r, &[2, 2, 2]), digits(col, &[2, 2, 2]));
                let mut p = eye(8);
                for m in 0..3 {
                    p = p * LocalOp::site(m, unit(2, i[m], j[m])).widen(&w, 0, 3).unwrap();
                }
                assert!((p[(r, col)].re - unit_product_sign(&gr, &i, &j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn compose_and_coarse_grain_shifts() {
        let s = preset_shift(2, DEFAULT_SITES).unwrap();
        let id = QcaRealization::identity(s.window.clone());
        let same = compose_qca(&s, &id).unwrap();
        for k in 0..DEFAULT_SITES - 1 {
            for (a, b) in same.images[k].as_ref().unwrap().iter().zip(s.images[k].as_ref().unwrap()) {
                assert!(a.distance(b, &s.window).unwrap() < 1e-12);
            }
        }
        let ss = compose_qca(&s, &s).unwrap();
        assert!(matches!(coarse_grain(&ss, 1), Err(Error::NotNearestNeighbourAfterGrouping(_))));
        let g2 = coarse_grain(&ss, 2).unwrap();
        assert_eq!(qca_index(&g2, &cfg()).unwrap().d, IndexValue::rational(4, 1));
        let c2 = coarse_grain(&s, 2).unwrap();
        assert_eq!(qca_index(&c2, &cfg()).unwrap().d, IndexValue::rational(2, 1));
    }

    #[test]
    fn stacking_shifts() {
        let a = preset_shift(2, DEFAULT_SITES).unwrap();
        let b = preset_shift_left(3, DEFAULT_SITES).unwrap();
        let st = stack_qca(&a, &b).unwrap();
        for k in 1..DEFAULT_SITES - 1 {
            st.check_site(k).unwrap();
        }
        assert_eq!(qca_index(&st, &cfg()).unwrap().d, IndexValue::rational(2, 3));
        let m = preset_majorana_shift(DEFAULT_SITES).unwrap();
        let mm = stack_qca(&m, &m).unwrap();
        assert_eq!(qca_index(&mm, &cfg()).unwrap().d, IndexValue::rational(2, 1));
    }
}
