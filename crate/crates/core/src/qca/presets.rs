//! Example QCAs: shifts, the Majorana translation, and the half-site shifts realizing an
//! arbitrary grading character or an arbitrary projective class.
//!
//! In the last two the window's sites are the half-sites A_{n,L}, A_{n,R}; grouping them
//! in pairs with `coarse_grain` recovers the chain with sites A_{n,L} ⊗̂ A_{n,R}.

use super::{site_generators, ChainWindow, LocalOp, Provenance, QcaRealization, Site};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Z2Hom};
use crate::gsystem::{intertwine_projective, projective_cocycle};
use crate::linalg::*;
use crate::Config;

pub const DEFAULT_SITES: usize = 12;
const MIN_SITES: usize = 6;

fn check_size(sites: usize) -> Result<()> {
    if sites < MIN_SITES {
        return Err(Error::WindowTooSmall(format!("{sites} sites; at least {MIN_SITES} are needed")));
    }
    Ok(())
}

/// α(x at k) = W_k x W_k* at k + step, for a window whose neighbouring sites are related by
/// the even equivariant isomorphisms Ad W_k.
fn shifted(window: ChainWindow, step: isize, maps: impl Fn(usize) -> CMat, name: &str) -> QcaRealization {
    let len = window.len() as isize;
    let images = window
        .sites
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let target = k as isize + step;
            (0..len).contains(&target).then(|| {
                let wk = maps(k);
                site_generators(s.dim())
                    .into_iter()
                    .map(|(i, j)| LocalOp::site(target as usize, &wk * unit(s.dim(), i, j) * dagger(&wk)))
                    .collect()
            })
        })
        .collect();
    QcaRealization { window, block_size: 1, images, provenance: Provenance::Preset(name.into()) }
}

/// Translation by `step` sites on a chain of identical sites.
pub fn shift_uniform(group: FiniteGroup, site: Site, sites: usize, step: isize) -> Result<QcaRealization> {
    check_size(sites)?;
    let d = site.dim();
    let window = ChainWindow::uniform(group, site, sites)?;
    let name = if step >= 0 { "shift" } else { "shift_left" };
    Ok(shifted(window, step, |_| eye(d), name))
}

/// Right shift σ_D on trivially graded M_D sites without symmetry.
pub fn preset_shift(d: usize, sites: usize) -> Result<QcaRealization> {
    let g = FiniteGroup::trivial();
    shift_uniform(g.clone(), Site::plain(vec![1; d], &g), sites, 1)
}

/// Left shift σ_D⁻¹.
pub fn preset_shift_left(d: usize, sites: usize) -> Result<QcaRealization> {
    let g = FiniteGroup::trivial();
    shift_uniform(g.clone(), Site::plain(vec![1; d], &g), sites, -1)
}

pub fn preset_identity(window: ChainWindow) -> QcaRealization {
    QcaRealization::identity(window)
}

/// Which Pauli matrix of a M^{1|1} site plays ε_{n,L}; the other one is ε_{n,R}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajoranaOrdering {
    /// ε_{n,L} = σ_X, ε_{n,R} = σ_Y.
    XThenY,
    /// ε_{n,L} = σ_Y, ε_{n,R} = σ_X.
    YThenX,
}

fn majorana_pair(o: MajoranaOrdering) -> (CMat, CMat) {
    match o {
        MajoranaOrdering::XThenY => (pauli_x(), pauli_y()),
        MajoranaOrdering::YThenX => (pauli_y(), pauli_x()),
    }
}

fn majorana_window(sites: usize) -> Result<ChainWindow> {
    check_size(sites)?;
    let g = FiniteGroup::trivial();
    ChainWindow::uniform(g.clone(), Site::plain(vec![1, -1], &g), sites)
}

/// Generator images e_01 = (σ_X + iσ_Y)/2 and e_10 = (σ_X − iσ_Y)/2 from images of the two
/// Majorana generators, given on a common interval.
fn majorana_images(o: MajoranaOrdering, img_l: LocalOp, img_r: LocalOp) -> Vec<LocalOp> {
    let (sx, sy) = match o {
        MajoranaOrdering::XThenY => (img_l, img_r),
        MajoranaOrdering::YThenX => (img_r, img_l),
    };
    let half = c(0.5, 0.0);
    let i_half = c(0.0, 0.5);
    vec![
        LocalOp::new(sx.start, sx.len, (&sx.mat * half) + (&sy.mat * i_half)),
        LocalOp::new(sx.start, sx.len, (&sx.mat * half) - (&sy.mat * i_half)),
    ]
}

/// ε_{n,L} ↦ ε_{n,R}, ε_{n,R} ↦ ε_{n+1,L} with the given choice of Majorana generators.
pub fn preset_majorana_shift_ordered(sites: usize, o: MajoranaOrdering) -> Result<QcaRealization> {
    let window = majorana_window(sites)?;
    let (el, er) = majorana_pair(o);
    let mut images = Vec::with_capacity(sites);
    for k in 0..sites {
        if k + 1 >= sites {
            images.push(None);
            continue;
        }
        let a = LocalOp::site(k, er.clone()).widened(&window, k, k + 2)?;
        let b = LocalOp::site(k + 1, el.clone()).widened(&window, k, k + 2)?;
        images.push(Some(majorana_images(o, a, b)));
    }
    Ok(QcaRealization { window, block_size: 1, images, provenance: Provenance::Preset("majorana".into()) })
}

pub fn preset_majorana_shift(sites: usize) -> Result<QcaRealization> {
    preset_majorana_shift_ordered(sites, MajoranaOrdering::XThenY)
}

/// Inverse translation: ε_{n,R} ↦ ε_{n,L}, ε_{n,L} ↦ ε_{n−1,R}.
pub fn preset_majorana_shift_left(sites: usize) -> Result<QcaRealization> {
    let o = MajoranaOrdering::XThenY;
    let window = majorana_window(sites)?;
    let (el, er) = majorana_pair(o);
    let mut images = Vec::with_capacity(sites);
    for k in 0..sites {
        if k == 0 {
            images.push(None);
            continue;
        }
        let a = LocalOp::site(k - 1, er.clone()).widened(&window, k - 1, k + 1)?;
        let b = LocalOp::site(k, el.clone()).widened(&window, k - 1, k + 1)?;
        images.push(Some(majorana_images(o, a, b)));
    }
    Ok(QcaRealization { window, block_size: 1, images, provenance: Provenance::Preset("majorana_left".into()) })
}

fn check_genuine(g: &FiniteGroup, v: &[CMat]) -> Result<()> {
    if v.len() != g.order {
        return Err(Error::NotARepresentation(format!("{} matrices for |G| = {}", v.len(), g.order)));
    }
    let d = v[0].nrows();
    for a in g.elements() {
        if frob(&(dagger(&v[a]) * &v[a] - eye(d))) > 1e-9 * d as f64 {
            return Err(Error::NotARepresentation(format!("v({a}) is not unitary")));
        }
        for b in g.elements() {
            if frob(&(&v[a] * &v[b] - &v[g.mul(a, b)])) > 1e-9 * d as f64 {
                return Err(Error::NotARepresentation(format!("v({a})v({b}) ≠ v({})", g.mul(a, b))));
            }
        }
    }
    Ok(())
}

/// Half-sites (M^{D|D}, Ad V_g) with V_g = diag(v_g, v_g) when ζ(g) = 0 and the odd
/// antidiag(v_g, v_g) otherwise, translated by one half-site.  Index (2D, ζ, e).
pub fn preset_zeta_example(g: &FiniteGroup, v: &[CMat], zeta: &Z2Hom, sites: usize) -> Result<QcaRealization> {
    check_size(sites)?;
    check_genuine(g, v)?;
    if zeta.values.len() != g.order || !zeta.is_hom(g) {
        return Err(Error::NotARepresentation("ζ is not a homomorphism G → Z₂".into()));
    }
    let d = v[0].nrows();
    let grading: Vec<i8> = (0..2 * d).map(|i| if i < d { 1 } else { -1 }).collect();
    let rep = g
        .elements()
        .map(|a| {
            let mut m = CMat::zeros(2 * d, 2 * d);
            let (r, s) = if zeta.values[a] == 1 { (d, 0) } else { (0, 0) };
            m.view_mut((r, s), (d, d)).copy_from(&v[a]);
            m.view_mut(((r + d) % (2 * d), (s + d) % (2 * d)), (d, d)).copy_from(&v[a]);
            m
        })
        .collect();
    let mut q = shift_uniform(g.clone(), Site::new(grading, rep), sites, 1)?;
    q.provenance = Provenance::Preset("zeta".into());
    Ok(q)
}

/// Trivially graded half-sites alternating between (M_D, Ad v) and (M_D, Ad v̄), translated
/// by one half-site.  Index (D, 0, [ν]).  The translation is equivariant only when v and v̄
/// are equivalent projective representations; otherwise IsomorphismNotFound.
pub fn preset_cocycle_example(g: &FiniteGroup, v: &[CMat], sites: usize) -> Result<QcaRealization> {
    check_size(sites)?;
    if v.len() != g.order {
        return Err(Error::NotProjective(format!("{} matrices for |G| = {}", v.len(), g.order)));
    }
    projective_cocycle(g, v).map_err(|e| Error::NotProjective(e.to_string()))?;
    let d = v[0].nrows();
    let vbar: Vec<CMat> = v.iter().map(|m| m.map(|z| z.conj())).collect();
    let (t, _) = intertwine_projective(g, v, &vbar, &Config::default())?.ok_or_else(|| {
        Error::IsomorphismNotFound("v and its complex conjugate are inequivalent, so the half-site shift is not equivariant".into())
    })?;
    let tbar = t.map(|z| z.conj());
    let sites_v: Vec<Site> = (0..sites)
        .map(|k| Site::new(vec![1; d], if k % 2 == 0 { v.to_vec() } else { vbar.clone() }))
        .collect();
    let window = ChainWindow::new(g.clone(), sites_v)?;
    Ok(shifted(window, 1, |k| if k % 2 == 0 { t.clone() } else { tbar.clone() }, "cocycle"))
}
