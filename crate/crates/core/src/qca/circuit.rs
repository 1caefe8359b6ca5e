//! Finite-depth circuits of even G-invariant block unitaries.

use super::{site_generators, ChainWindow, LocalOp, Provenance, QcaRealization, Site};
use crate::error::{Error, Result};
use crate::group::{characters, FiniteGroup};
use crate::gsystem::samples::pauli_rep;
use crate::linalg::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Disjoint blocks [start, start + len) of one layer with their unitaries.
#[derive(Debug, Clone)]
pub struct CircuitLayer {
    pub blocks: Vec<(usize, usize, CMat)>,
}

impl CircuitLayer {
    pub fn new(blocks: Vec<(usize, usize, CMat)>) -> Self {
        CircuitLayer { blocks }
    }
}

fn check_layer(w: &ChainWindow, layer: &CircuitLayer) -> Result<()> {
    let mut used = vec![false; w.len()];
    for (start, len, u) in &layer.blocks {
        let (a, b) = (*start, start + len);
        if *len == 0 || b > w.len() {
            return Err(Error::RegionOutOfRange(format!("block [{a}, {b}) outside a window of {}", w.len())));
        }
        if used[a..b].iter().any(|&x| x) {
            return Err(Error::Invalid(format!("block [{a}, {b}) overlaps another block of its layer")));
        }
        used[a..b].iter_mut().for_each(|x| *x = true);
        let amb = w.interval_ambient(a, b);
        let n = amb.dim();
        if u.nrows() != n || u.ncols() != n || frob(&(dagger(u) * u - eye(n))) > 1e-9 * n as f64 {
            return Err(Error::BlockUnitaryNotEquivariant(format!("block [{a}, {b}) needs a {n}x{n} unitary")));
        }
        if frob(&(amb.theta(u) - u)) > 1e-9 * n as f64 {
            return Err(Error::BlockUnitaryNotEquivariant(format!("block [{a}, {b}) is not even")));
        }
        for g in w.group.elements() {
            let ug = w.interval_action(a, b, g)?;
            if frob(&(&ug * u * dagger(&ug) - u)) > 1e-9 * n as f64 {
                return Err(Error::BlockUnitaryNotEquivariant(format!("block [{a}, {b}) is not invariant under g = {g}")));
            }
        }
    }
    Ok(())
}

/// Conjugate an operator by the blocks of a layer that meet its support.
fn apply_layer(w: &ChainWindow, layer: &CircuitLayer, op: &LocalOp) -> Result<LocalOp> {
    let touching: Vec<&(usize, usize, CMat)> =
        layer.blocks.iter().filter(|(s, l, _)| *s < op.end() && s + l > op.start).collect();
    if touching.is_empty() {
        return Ok(op.clone());
    }
    let lo = touching.iter().map(|b| b.0).min().expect("nonempty").min(op.start);
    let hi = touching.iter().map(|b| b.0 + b.1).max().expect("nonempty").max(op.end());
    let mut factors = Vec::new();
    let mut k = lo;
    while k < hi {
        match touching.iter().find(|b| b.0 == k) {
            Some((s, l, u)) => {
                factors.push(u.clone());
                k = s + l;
            }
            None => {
                factors.push(eye(w.sites[k].dim()));
                k += 1;
            }
        }
    }
    let u = kron_all(&factors);
    let m = op.widen(w, lo, hi)?;
    Ok(LocalOp::new(lo, hi - lo, mm_all(&[&u, &m, &dagger(&u)])).shrink(w))
}

/// Ad W_D ∘ … ∘ Ad W_1 for layers W_1, …, W_D applied in the given order.
pub fn circuit_from_layers(window: ChainWindow, layers: &[CircuitLayer]) -> Result<QcaRealization> {
    for layer in layers {
        check_layer(&window, layer)?;
    }
    let mut images = Vec::with_capacity(window.len());
    for (k, s) in window.sites.iter().enumerate() {
        let mut imgs = Vec::new();
        for (i, j) in site_generators(s.dim()) {
            let mut op = LocalOp::site(k, unit(s.dim(), i, j));
            for layer in layers {
                op = apply_layer(&window, layer, &op)?;
            }
            imgs.push(op);
        }
        images.push(Some(imgs));
    }
    Ok(QcaRealization { window, block_size: 1, images, provenance: Provenance::Circuit { depth: layers.len() } })
}

/// exp(iH) for a random Hermitian H on [a, b) projected to the even, G-invariant part.
pub fn random_invariant_unitary(w: &ChainWindow, a: usize, b: usize, rng: &mut ChaCha8Rng) -> Result<CMat> {
    let amb = w.interval_ambient(a, b);
    let h = random_hermitian(rng, amb.dim());
    let h = (&h + amb.theta(&h)) * c(0.5, 0.0);
    let mut avg = CMat::zeros(amb.dim(), amb.dim());
    for g in w.group.elements() {
        let ug = w.interval_action(a, b, g)?;
        avg += &ug * &h * dagger(&ug);
    }
    let avg = avg / c(w.group.order as f64, 0.0);
    Ok(expi_hermitian(&avg))
}

/// Depth-2 circuit with blocks {2k, 2k+1} in the first layer and {2k−1, 2k} in the second.
pub fn random_circuit(w: &ChainWindow, rng: &mut ChaCha8Rng) -> Result<Vec<CircuitLayer>> {
    let n = w.len();
    let first = (0..n / 2).map(|k| Ok((2 * k, 2, random_invariant_unitary(w, 2 * k, 2 * k + 2, rng)?))).collect::<Result<Vec<_>>>()?;
    let second = (1..n.div_ceil(2))
        .filter(|k| 2 * k < n)
        .map(|k| Ok((2 * k - 1, 2, random_invariant_unitary(w, 2 * k - 1, 2 * k + 1, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![CircuitLayer::new(first), CircuitLayer::new(second)])
}

/// A window of two-dimensional sites with on-site actions drawn from a few families:
/// characters on M^{1|1} or M₂, the swap action of Z₂, and the Pauli action of Z₂×Z₂.
pub fn random_circuit_window(g: &FiniteGroup, sites: usize, rng: &mut ChaCha8Rng) -> Result<ChainWindow> {
    let chars = characters(g);
    let klein = g.order == 4 && g.table == FiniteGroup::klein().table;
    let kinds = if klein || g.order == 2 { 3 } else { 2 };
    let kind = rng.gen_range(0..kinds);
    let site = match kind {
        0 | 1 => {
            let (a, b) = (rng.gen_range(0..chars.len()), rng.gen_range(0..chars.len()));
            let grading = if kind == 0 { vec![1, -1] } else { vec![1, 1] };
            let rep = g.elements().map(|x| diag_complex(&[chars[a][x], chars[b][x]])).collect();
            Site::new(grading, rep)
        }
        _ if klein => Site::new(vec![1, 1], pauli_rep()),
        _ => Site::new(vec![1, 1], vec![eye(2), pauli_x()]),
    };
    ChainWindow::uniform(g.clone(), site, sites)
}

fn diag_complex(d: &[C64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::Config;
    use rand::SeedableRng;

    #[test]
    fn empty_and_random_circuits_are_trivial() {
        let g = FiniteGroup::cyclic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_circuit_window(&g, 10, &mut rng).unwrap();
        let id = circuit_from_layers(w.clone(), &[]).unwrap();
        assert!(qca_index(&id, &Config::default()).unwrap().is_identity());
        let layers = random_circuit(&w, &mut rng).unwrap();
        let q = circuit_from_layers(w.clone(), &layers).unwrap();
        assert!(q.admissible_cells().len() >= 2);
        for (_, ind) in index_at_all_cells(&q, &Config::default()).unwrap() {
            assert!(ind.is_identity());
        }
        let one = circuit_from_layers(w, &layers[..1]).unwrap();
        assert!(qca_index(&one, &Config::default()).unwrap().is_identity());
    }

    #[test]
    fn non_invariant_blocks_are_rejected() {
        let g = FiniteGroup::cyclic(2);
        let w = ChainWindow::uniform(g.clone(), Site::new(vec![1, 1], vec![eye(2), pauli_z()]), 6).unwrap();
        let u = kron(&expi_hermitian(&(pauli_x() * c(0.3, 0.0))), &eye(2));
        let layer = CircuitLayer::new(vec![(0, 2, u)]);
        assert!(matches!(circuit_from_layers(w, &[layer]), Err(Error::BlockUnitaryNotEquivariant(_))));
    }
}
