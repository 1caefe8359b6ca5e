//! Depth-2 decomposition of a QCA with trivial index: Φ_n on C_n maps L_n onto A_{2n} and
//! R_{n−1} onto A_{2n−1}, so Ψ = Φ∘α preserves every B_n and α = Φ⁻¹∘Ψ.

use super::{circuit_from_layers, overlap_algebras, qca_index, stack_qca, ChainWindow, CircuitLayer, LocalOp, QcaRealization, Site};
use crate::error::{Error, Result};
use crate::group::{parity_extend, FiniteGroup, ParityExtension};
use crate::gsystem::{analyze, intertwine_projective_all, GSystem};
use crate::linalg::*;
use crate::nearincl::inner_implementer;
use crate::superalg::{matrix_units, CentralSimpleShape, GradedSubalgebra};
use crate::Config;

#[derive(Debug, Clone)]
pub struct Decoupling {
    /// Ψ on the blocks B_n, followed by Φ⁻¹ on the blocks C_n.  Identity blocks are omitted.
    pub layers: Vec<CircuitLayer>,
    /// Cells n whose B_n carries a verified Ψ block.
    pub cells: Vec<usize>,
    /// Auxiliary chain stacked on before decoupling, if any.
    pub auxiliary: Option<String>,
    /// The realization that was decoupled (the stacked one when an auxiliary chain was used).
    pub realization: QcaRealization,
    /// Largest HS distance between α and the circuit on the generator images of the cells.
    pub max_residual: f64,
}

/// Matrix units of a rational central simple subalgebra and the G'-representation carried
/// by its grading operator and implementing unitaries, in those units.
struct Frame {
    units: Vec<Vec<CMat>>,
    w: Vec<CMat>,
}

fn frame(alg: &GradedSubalgebra, action: &[CMat], g: &FiniteGroup, ext: &ParityExtension, cfg: &Config) -> Result<Frame> {
    let sys = GSystem { group: g.clone(), algebra: alg.clone(), action: action.to_vec() };
    let an = analyze(&sys, cfg)?;
    let CentralSimpleShape::Rational { p, q, theta } = &an.shape else {
        return Err(Error::IsomorphismNotFound("an overlap algebra is of radical type".into()));
    };
    let k = p + q;
    let units = matrix_units(alg, k, cfg.seed)?;
    let tr0 = units[0][0].trace().re;
    let coords = |x: &CMat| CMat::from_fn(k, k, |a, b| (&units[b][a] * x).trace() / tr0);
    let w = ext
        .group
        .elements()
        .map(|e| {
            let (bit, gg) = ext.split(e);
            let op = if bit == 1 { theta * &an.v[gg] } else { an.v[gg].clone() };
            coords(&op)
        })
        .collect();
    Ok(Frame { units, w })
}

/// All even equivariant isomorphisms source → target arising from rephasings, as lists of
/// pairs (f^S_ab, ψ(f^S_ab)).
fn isomorphisms(src: &Frame, tgt: &Frame, ext: &ParityExtension, cfg: &Config) -> Result<Vec<Vec<(CMat, CMat)>>> {
    if src.units.len() != tgt.units.len() {
        return Ok(Vec::new());
    }
    let k = src.units.len();
    let mut out = Vec::new();
    for (t, _) in intertwine_projective_all(&ext.group, &src.w, &tgt.w, cfg)? {
        let mut pairs = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                let n = tgt.units[0][0].nrows();
                let mut img = CMat::zeros(n, n);
                for cc in 0..k {
                    for d in 0..k {
                        let coef = t[(cc, a)] * t[(d, b)].conj();
                        if coef.norm() > 1e-15 {
                            img += &tgt.units[cc][d] * coef;
                        }
                    }
                }
                pairs.push((src.units[a][b].clone(), img));
            }
        }
        out.push(pairs);
    }
    Ok(out)
}

fn site_algebra_in(w: &ChainWindow, site: usize, a: usize, b: usize) -> Result<GradedSubalgebra> {
    let d = w.sites[site].dim();
    let elements: Vec<CMat> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| LocalOp::site(site, unit(d, i, j)).widen(w, a, b))
        .collect::<Result<_>>()?;
    Ok(GradedSubalgebra::from_elements(&elements, &w.interval_ambient(a, b)))
}

/// Candidate unitaries Y_n on C_n with Ad Y_n(L_n) = A_{2n}, Ad Y_n(R_{n−1}) = A_{2n−1},
/// even and G-invariant, ordered by closeness to the identity.
fn phi_candidates(q: &QcaRealization, n: usize, cfg: &Config) -> Result<Vec<CMat>> {
    let w = &q.window;
    let g = &w.group;
    let ext = parity_extend(g);
    let (a, b) = (2 * n - 1, 2 * n + 1);
    let action: Vec<CMat> = g.elements().map(|x| w.interval_action(a, b, x)).collect::<Result<_>>()?;
    let l = overlap_algebras(q, n, cfg)?.left;
    let r = overlap_algebras(q, n - 1, cfg)?.right;
    let fl = frame(&l, &action, g, &ext, cfg)?;
    let fr = frame(&r, &action, g, &ext, cfg)?;
    let fa = frame(&site_algebra_in(w, 2 * n, a, b)?, &action, g, &ext, cfg)?;
    let fb = frame(&site_algebra_in(w, 2 * n - 1, a, b)?, &action, g, &ext, cfg)?;
    let left_isos = isomorphisms(&fl, &fa, &ext, cfg)?;
    let right_isos = isomorphisms(&fr, &fb, &ext, cfg)?;
    if left_isos.is_empty() || right_isos.is_empty() {
        return Err(Error::IsomorphismNotFound(format!(
            "cell {n}: the G'-characters of the overlap algebras differ from those of the sites"
        )));
    }
    let amb = w.interval_ambient(a, b);
    let mut found: Vec<(f64, CMat)> = Vec::new();
    for li in &left_isos {
        for ri in &right_isos {
            if let Ok(imp) = inner_implementer(&[li.clone(), ri.clone()], &amb, &action, cfg) {
                let y = dagger(&imp.u);
                found.push((imp.distance, y));
            }
        }
    }
    if found.is_empty() {
        return Err(Error::IsomorphismNotFound(format!("cell {n}: no even G-invariant unitary realizes Φ_n")));
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite distances"));
    Ok(found.into_iter().map(|(_, y)| y).collect())
}

/// Z_n on B_n with Ad Z_n = Ad(Y_n ⊗ Y_{n+1})∘α on B_n.
fn psi_block(q: &QcaRealization, n: usize, yl: &CMat, yr: &CMat, cfg: &Config) -> Result<CMat> {
    let w = &q.window;
    let (lo, hi) = (2 * n - 1, 2 * n + 3);
    let y = kron(yl, yr);
    let mut pairs = Vec::new();
    for s in [2 * n, 2 * n + 1] {
        let d = w.sites[s].dim();
        let imgs = q.images[s].as_ref().ok_or_else(|| Error::RegionOutOfRange(format!("no image at site {s}")))?;
        for ((i, j), img) in super::site_generators(d).into_iter().zip(imgs) {
            let conj = &y * img.widen(w, lo, hi)? * dagger(&y);
            let psi = LocalOp::new(lo, hi - lo, conj)
                .restrict(w, 2 * n, 2 * n + 2)
                .ok_or_else(|| Error::IsomorphismNotFound(format!("Φ∘α does not preserve B_{n}")))?;
            let x = LocalOp::site(s, unit(d, i, j)).widen(w, 2 * n, 2 * n + 2)?;
            pairs.push((x, psi.mat));
        }
    }
    let action: Vec<CMat> = w.group.elements().map(|g| w.interval_action(2 * n, 2 * n + 2, g)).collect::<Result<_>>()?;
    let amb = w.interval_ambient(2 * n, 2 * n + 2);
    let imp = inner_implementer(&[pairs], &amb, &action, cfg)?;
    Ok(dagger(&imp.u))
}

fn is_identity_block(u: &CMat) -> bool {
    frob(&(u - eye(u.nrows()))) < 1e-10
}

fn decouple_direct(q: &QcaRealization, cfg: &Config) -> Result<Decoupling> {
    let cells = q.admissible_cells();
    let phi_cells: Vec<usize> = cells.iter().cloned().filter(|n| *n >= 1 && cells.contains(&(n - 1))).collect();
    let psi_cells: Vec<usize> = phi_cells.iter().cloned().filter(|n| phi_cells.contains(&(n + 1))).collect();
    if psi_cells.is_empty() {
        return Err(Error::WindowTooSmall("decoupling needs three consecutive admissible cells".into()));
    }
    let mut candidates = Vec::new();
    for &n in &phi_cells {
        candidates.push((n, phi_candidates(q, n, cfg)?));
    }
    // Greedy left-to-right choice so that each Ψ block is even and G-invariant.
    let mut chosen: Vec<CMat> = vec![candidates[0].1[0].clone()];
    let mut zs: Vec<(usize, CMat)> = Vec::new();
    for idx in 1..candidates.len() {
        let n = candidates[idx - 1].0;
        let mut picked = None;
        for cand in &candidates[idx].1 {
            match psi_block(q, n, &chosen[idx - 1], cand, cfg) {
                Ok(z) => {
                    picked = Some((cand.clone(), z));
                    break;
                }
                Err(Error::EmptyIntertwinerSpace) | Err(Error::SingularY) => continue,
                Err(e) => return Err(e),
            }
        }
        let (y, z) = picked.ok_or_else(|| Error::IsomorphismNotFound(format!("no even G-invariant Ψ block on B_{n}")))?;
        chosen.push(y);
        zs.push((n, z));
    }
    let psi_layer = CircuitLayer::new(
        zs.iter().filter(|(_, z)| !is_identity_block(z)).map(|(n, z)| (2 * n, 2, z.clone())).collect(),
    );
    let phi_inv_layer = CircuitLayer::new(
        phi_cells
            .iter()
            .zip(&chosen)
            .filter(|(_, y)| !is_identity_block(y))
            .map(|(m, y)| (2 * m - 1, 2, dagger(y)))
            .collect(),
    );
    let layers = vec![psi_layer, phi_inv_layer];
    let circuit = circuit_from_layers(q.window.clone(), &layers)?;
    let mut max_residual: f64 = 0.0;
    for (n, _) in &zs {
        for s in [2 * n, 2 * n + 1] {
            let (a, b) = (q.images[s].as_ref().expect("admissible"), circuit.images[s].as_ref().expect("circuit"));
            for (x, y) in a.iter().zip(b) {
                max_residual = max_residual.max(x.distance(y, &q.window)?);
            }
        }
    }
    if max_residual > 1e-8 {
        return Err(Error::NoConvergence(format!("decoupled circuit misses α by {max_residual:.3e}")));
    }
    Ok(Decoupling {
        layers,
        cells: zs.iter().map(|(n, _)| *n).collect(),
        auxiliary: None,
        realization: q.clone(),
        max_residual,
    })
}

fn auxiliary_windows(w: &ChainWindow) -> Result<Vec<(String, ChainWindow)>> {
    let g = &w.group;
    let n = w.len();
    let fermion = ChainWindow::uniform(g.clone(), Site::plain(vec![1, -1], g), n)?;
    let reg = crate::gsystem::samples::regular_system(g);
    let regular = ChainWindow::uniform(g.clone(), Site::new(vec![1; g.order], reg.action.clone()), n)?;
    let conj = ChainWindow::new(
        g.clone(),
        w.sites.iter().map(|s| Site::new(s.grading.clone(), s.rep.iter().map(|u| u.map(|z| z.conj())).collect())).collect(),
    )?;
    let both = super::stack_windows(&fermion, &regular)?;
    Ok(vec![
        ("fermion".into(), fermion),
        ("regular".into(), regular),
        ("conjugate".into(), conj),
        ("fermion+regular".into(), both),
    ])
}

/// Depth-2 circuit reproducing α on the interior cells.  With `auto_stack`, auxiliary
/// fermion, regular or conjugate chains carrying the identity are stacked on when the
/// overlap algebras cannot be matched with the sites directly.
pub fn decouple_trivial(q: &QcaRealization, auto_stack: bool, cfg: &Config) -> Result<Decoupling> {
    let ind = qca_index(q, cfg)?;
    if !ind.is_identity() {
        return Err(Error::IndexNotTrivial(format!("index is (d = {}, ζ = {:?})", ind.d, ind.zeta.values)));
    }
    match decouple_direct(q, cfg) {
        Err(Error::IsomorphismNotFound(msg)) if auto_stack => {
            for (name, aux) in auxiliary_windows(&q.window)? {
                let stacked = stack_qca(q, &QcaRealization::identity(aux))?;
                if let Ok(mut d) = decouple_direct(&stacked, cfg) {
                    d.auxiliary = Some(name);
                    return Ok(d);
                }
            }
            Err(Error::IsomorphismNotFound(format!("{msg}; no auxiliary chain resolved it")))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn identity_decouples_to_empty_layers() {
        let g = FiniteGroup::cyclic(2);
        let w = ChainWindow::uniform(g, Site::new(vec![1, -1], vec![eye(2), pauli_z()]), 10).unwrap();
        let d = decouple_trivial(&QcaRealization::identity(w), false, &Config::default()).unwrap();
        assert!(d.layers.iter().all(|l| l.blocks.is_empty()), "{:?}", d.layers);
    }

    #[test]
    fn shift_is_rejected() {
        let q = preset_shift(2, DEFAULT_SITES).unwrap();
        assert!(matches!(decouple_trivial(&q, false, &Config::default()), Err(Error::IndexNotTrivial(_))));
    }

    #[test]
    fn random_circuits_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for g in [FiniteGroup::cyclic(2), FiniteGroup::klein(), FiniteGroup::cyclic(3)] {
            let w = super::super::circuit::random_circuit_window(&g, 10, &mut rng).unwrap();
            let layers = random_circuit(&w, &mut rng).unwrap();
            let q = circuit_from_layers(w, &layers).unwrap();
            let d = decouple_trivial(&q, false, &Config::default()).unwrap();
            assert!(d.max_residual < 1e-8);
            assert!(!d.cells.is_empty());
        }
    }
}
