//! U(1)-valued 2-cocycles, their discretization to roots of unity, and canonical
//! labels for classes in H²(G, U(1)).
//!
//! Classes are labelled at the fixed modulus M = |G|².  A cocycle is first gauge-fixed
//! to |G|-th roots of unity through λ(g) = Π_k ν(g,k); two such cocycles are
//! cohomologous over U(1) exactly when their exponents, scaled to modulus M, differ by
//! an element of im δ¹ + M·Z on normalized cochains.

use super::smith::{hermite_full_rank, reduce_mod_lattice, smith_normal_form, IMat};
use super::{gcd, FiniteGroup, Z2Hom};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};
use crate::Config;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle2 {
    pub phases: Vec<Vec<C64>>,
}

/// Canonical label of a class in H²(G, U(1)): exponents over Z_modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohomClass {
    pub modulus: usize,
    pub canonical: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    pub ok: bool,
    pub worst: f64,
    pub worst_triple: (usize, usize, usize),
}

impl Cocycle2 {
    pub fn trivial(order: usize) -> Self {
        Cocycle2 { phases: vec![vec![ONE; order]; order] }
    }
    pub fn order(&self) -> usize {
        self.phases.len()
    }
    pub fn mul(&self, other: &Cocycle2) -> Cocycle2 {
        let n = self.order();
        Cocycle2 { phases: (0..n).map(|g| (0..n).map(|h| self.phases[g][h] * other.phases[g][h]).collect()).collect() }
    }
    pub fn inv(&self) -> Cocycle2 {
        let n = self.order();
        Cocycle2 { phases: (0..n).map(|g| (0..n).map(|h| self.phases[g][h].conj()).collect()).collect() }
    }
}

impl CohomClass {
    pub fn trivial(order: usize) -> Self {
        CohomClass { modulus: (order * order).max(1), canonical: vec![vec![0; order]; order] }
    }
    pub fn is_trivial(&self) -> bool {
        self.canonical.iter().all(|r| r.iter().all(|&x| x == 0))
    }
    /// A representative cocycle of the class.
    pub fn representative(&self) -> Cocycle2 {
        cocycle_from_exponents(&self.canonical, self.modulus)
    }
}

pub fn cocycle_from_exponents(k: &[Vec<usize>], m: usize) -> Cocycle2 {
    Cocycle2 {
        phases: k
            .iter()
            .map(|r| r.iter().map(|&x| C64::from_polar(1.0, 2.0 * PI * x as f64 / m as f64)).collect())
            .collect(),
    }
}

pub fn is_cocycle(g: &FiniteGroup, nu: &Cocycle2) -> CocycleReport {
    is_cocycle_tol(g, nu, Config::default().tol_cocycle)
}

pub fn is_cocycle_tol(g: &FiniteGroup, nu: &Cocycle2, tol: f64) -> CocycleReport {
    let p = &nu.phases;
    let mut worst = 0.0;
    let mut worst_triple = (0, 0, 0);
    for a in g.elements() {
        for b in g.elements() {
            for c in g.elements() {
                let lhs = p[a][b] * p[g.mul(a, b)][c];
                let rhs = p[b][c] * p[a][g.mul(b, c)];
                let d = (lhs - rhs).norm();
                if d > worst {
                    worst = d;
                    worst_triple = (a, b, c);
                }
            }
        }
    }
    for row in p {
        for x in row {
            worst = f64::max(worst, (x.norm() - 1.0).abs());
        }
    }
    CocycleReport { ok: worst <= tol, worst, worst_triple }
}

/// Exponents k(g,h) ∈ Z_m with exp(2πi k/m) ≈ ν(g,h).
pub fn snap_cocycle(nu: &Cocycle2, m: usize) -> Result<Vec<Vec<usize>>> {
    snap_tol(nu, m, Config::default().tol_snap)
}

fn snap_tol(nu: &Cocycle2, m: usize, tol: f64) -> Result<Vec<Vec<usize>>> {
    let n = nu.order();
    let mut out = vec![vec![0; n]; n];
    for g in 0..n {
        for h in 0..n {
            let z = nu.phases[g][h];
            let t = z.arg() / (2.0 * PI) * m as f64;
            let k = t.round();
            let root = C64::from_polar(1.0, 2.0 * PI * k / m as f64);
            let dist = (z - root).norm();
            if dist > tol {
                return Err(Error::SnapFailure { g, h, m, dist });
            }
            out[g][h] = (k as i64).rem_euclid(m as i64) as usize;
        }
    }
    Ok(out)
}

/// δμ(g,h) = μ(g)μ(h)/μ(gh).
pub fn coboundary(g: &FiniteGroup, mu: &[C64]) -> Cocycle2 {
    Cocycle2 {
        phases: g.elements().map(|a| g.elements().map(|b| mu[a] * mu[b] / mu[g.mul(a, b)]).collect()).collect(),
    }
}

pub fn twist_class(z1: &Z2Hom, z2: &Z2Hom) -> Cocycle2 {
    let n = z1.values.len();
    Cocycle2 {
        phases: (0..n)
            .map(|a| (0..n).map(|b| if z1.values[a] & z2.values[b] == 1 { -ONE } else { ONE }).collect())
            .collect(),
    }
}

/// Normalize and gauge-fix to |G|-th roots.  Returns (fixed cocycle, gauge μ) with
/// ν = δμ · fixed.
fn gauge_fix(g: &FiniteGroup, nu: &Cocycle2) -> (Cocycle2, Vec<C64>) {
    let n = g.order;
    let e = g.identity;
    let c = nu.phases[e][e];
    let normalized = Cocycle2 { phases: nu.phases.iter().map(|r| r.iter().map(|x| x / c).collect()).collect() };
    let lambda: Vec<C64> = g.elements().map(|a| g.elements().map(|k| normalized.phases[a][k]).product()).collect();
    let mu0: Vec<C64> = lambda.iter().map(|l| C64::from_polar(1.0, l.arg() / n as f64)).collect();
    let d = coboundary(g, &mu0);
    let fixed = Cocycle2 {
        phases: (0..n).map(|a| (0..n).map(|b| normalized.phases[a][b] / d.phases[a][b]).collect()).collect(),
    };
    // ν = c · δμ₀ · fixed and the constant c is the coboundary of the constant function c.
    let mu = mu0.iter().map(|m| m * c).collect();
    (fixed, mu)
}

struct Coords {
    nonid: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

fn coords(g: &FiniteGroup) -> Coords {
    let nonid: Vec<usize> = g.elements().filter(|&x| x != g.identity).collect();
    let mut pairs = Vec::new();
    for &a in &nonid {
        for &b in &nonid {
            pairs.push((a, b));
        }
    }
    Coords { nonid, pairs }
}

/// Integer matrix of δ¹ on normalized cochains: rows are pairs, columns non-identity elements.
fn delta1(g: &FiniteGroup, co: &Coords) -> IMat {
    let col_of = |x: usize| co.nonid.iter().position(|&y| y == x);
    co.pairs
        .iter()
        .map(|&(a, b)| {
            let mut row = vec![0i128; co.nonid.len()];
            row[col_of(a).unwrap()] += 1;
            row[col_of(b).unwrap()] += 1;
            if let Some(j) = col_of(g.mul(a, b)) {
                row[j] -= 1;
            }
            row
        })
        .collect()
}

fn class_modulus(g: &FiniteGroup) -> usize {
    (g.order * g.order).max(1)
}

/// Exponent vector (normalized coordinates) at modulus |G|² of a gauge-fixed cocycle.
fn scaled_exponents(g: &FiniteGroup, fixed: &Cocycle2, cfg: &Config) -> Result<Vec<i128>> {
    let n = g.order;
    let big = class_modulus(g);
    let mut last_err = None;
    for m in [n.max(1), big] {
        match snap_tol(fixed, m, cfg.tol_snap) {
            Ok(k) => {
                let co = coords(g);
                return Ok(co.pairs.iter().map(|&(a, b)| (k[a][b] * (big / m)) as i128).collect());
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

pub fn canonical_class(g: &FiniteGroup, nu: &Cocycle2) -> Result<CohomClass> {
    canonical_class_cfg(g, nu, &Config::default())
}

pub fn canonical_class_cfg(g: &FiniteGroup, nu: &Cocycle2, cfg: &Config) -> Result<CohomClass> {
    let big = class_modulus(g);
    let n = g.order;
    if n == 1 {
        return Ok(CohomClass::trivial(1));
    }
    let (fixed, _) = gauge_fix(g, nu);
    let k = scaled_exponents(g, &fixed, cfg)?;
    let co = coords(g);
    let d1 = delta1(g, &co);
    let e = co.pairs.len();
    let mut gens: Vec<Vec<i128>> = (0..co.nonid.len()).map(|j| d1.iter().map(|row| row[j]).collect()).collect();
    for i in 0..e {
        let mut v = vec![0i128; e];
        v[i] = big as i128;
        gens.push(v);
    }
    let h = hermite_full_rank(&gens, e);
    let r = reduce_mod_lattice(&k, &h);
    let mut canonical = vec![vec![0usize; n]; n];
    for (idx, &(a, b)) in co.pairs.iter().enumerate() {
        canonical[a][b] = r[idx].rem_euclid(big as i128) as usize;
    }
    Ok(CohomClass { modulus: big, canonical })
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    // Extended Euclid; assumes gcd(a, m) = 1.
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m)
}

/// Solve d·x ≡ t (mod m) over the integers; None when infeasible.
fn solve_mod(d: &IMat, rows: usize, cols: usize, t: &[i128], m: i128) -> Option<Vec<i128>> {
    let s = smith_normal_form(d, rows, cols);
    let ut: Vec<i128> = (0..rows).map(|i| (0..rows).map(|j| s.u[i][j] * t[j]).sum::<i128>().rem_euclid(m)).collect();
    let mut y = vec![0i128; cols];
    for i in 0..rows {
        let si = if i < s.diag.len() { s.diag[i] } else { 0 };
        let si_m = si.rem_euclid(m);
        if si_m == 0 {
            if ut[i] != 0 {
                return None;
            }
            continue;
        }
        let gg = gcd(si_m as usize, m as usize) as i128;
        if ut[i] % gg != 0 {
            return None;
        }
        let mm = m / gg;
        y[i] = ((ut[i] / gg) * mod_inverse(si_m / gg, mm)).rem_euclid(mm);
    }
    Some((0..cols).map(|i| (0..cols).map(|j| s.v[i][j] * y[j]).sum::<i128>().rem_euclid(m)).collect())
}

/// Witness μ with ν₂(g,h) = μ(g)μ(h)/μ(gh)·ν₁(g,h), or None when the classes differ.
pub fn cohomologous(g: &FiniteGroup, nu1: &Cocycle2, nu2: &Cocycle2) -> Result<Option<Vec<C64>>> {
    cohomologous_cfg(g, nu1, nu2, &Config::default())
}

pub fn cohomologous_cfg(g: &FiniteGroup, nu1: &Cocycle2, nu2: &Cocycle2, cfg: &Config) -> Result<Option<Vec<C64>>> {
    let ratio = nu2.mul(&nu1.inv());
    let (fixed, mu0) = gauge_fix(g, &ratio);
    if g.order == 1 {
        return Ok(Some(mu0));
    }
    let big = class_modulus(g) as i128;
    let k = scaled_exponents(g, &fixed, cfg)?;
    let co = coords(g);
    let d1 = delta1(g, &co);
    let Some(x) = solve_mod(&d1, co.pairs.len(), co.nonid.len(), &k, big) else {
        return Ok(None);
    };
    let mut mu = mu0.clone();
    for (j, &el) in co.nonid.iter().enumerate() {
        mu[el] *= C64::from_polar(1.0, 2.0 * PI * x[j] as f64 / big as f64);
    }
    let check = coboundary(g, &mu).mul(nu1);
    let worst = (0..g.order)
        .flat_map(|a| (0..g.order).map(move |b| (a, b)))
        .map(|(a, b)| (check.phases[a][b] - nu2.phases[a][b]).norm())
        .fold(0.0, f64::max);
    if worst > cfg.tol_snap {
        return Err(Error::SnapFailure { g: 0, h: 0, m: big as usize, dist: worst });
    }
    Ok(Some(mu))
}

/// The distinct U(1)-classes carried by Z_m-valued cocycles.  Kernel generators of
/// δ² over Z_m come from a Smith normal form; the class group is closed from them.
pub fn h2_enumerate(g: &FiniteGroup, m: usize) -> Result<Vec<CohomClass>> {
    h2_enumerate_cfg(g, m, &Config::default())
}

pub fn h2_enumerate_cfg(g: &FiniteGroup, m: usize, cfg: &Config) -> Result<Vec<CohomClass>> {
    if g.order > cfg.h2_group_cap || m > cfg.h2_modulus_cap || m == 0 {
        return Err(Error::TooLarge { order: g.order, m });
    }
    let n = g.order;
    let trivial = CohomClass::trivial(n);
    if n == 1 {
        return Ok(vec![trivial]);
    }
    let co = coords(g);
    let e = co.pairs.len();
    let pair_idx = |a: usize, b: usize| -> Option<usize> {
        if a == g.identity || b == g.identity {
            None
        } else {
            co.pairs.iter().position(|&p| p == (a, b))
        }
    };
    let mut d2: IMat = Vec::new();
    for &a in &co.nonid {
        for &b in &co.nonid {
            for &c in &co.nonid {
                let mut row = vec![0i128; e];
                let terms = [
                    (pair_idx(b, c), 1),
                    (pair_idx(g.mul(a, b), c), -1),
                    (pair_idx(a, g.mul(b, c)), 1),
                    (pair_idx(a, b), -1),
                ];
                for (idx, s) in terms {
                    if let Some(i) = idx {
                        row[i] += s;
                    }
                }
                d2.push(row);
            }
        }
    }
    let rows = d2.len();
    let s = smith_normal_form(&d2, rows, e);
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for i in 0..e {
        let si = if i < s.diag.len() { s.diag[i] } else { 0 };
        let step = (m / gcd(si.rem_euclid(m as i128) as usize, m)) as i128;
        let x: Vec<usize> = (0..e).map(|r| (s.v[r][i] * step).rem_euclid(m as i128) as usize).collect();
        if x.iter().any(|&v| v != 0) {
            gens.push(x);
        }
    }
    let to_cocycle = |x: &[usize]| -> Cocycle2 {
        let mut k = vec![vec![0usize; n]; n];
        for (idx, &(a, b)) in co.pairs.iter().enumerate() {
            k[a][b] = x[idx];
        }
        cocycle_from_exponents(&k, m)
    };
    let gen_cocycles: Vec<Cocycle2> = gens.iter().map(|x| to_cocycle(x)).collect();
    for c in &gen_cocycles {
        debug_assert!(is_cocycle(g, c).ok);
    }
    let mut classes = vec![trivial];
    let mut frontier = vec![0usize];
    while let Some(idx) = frontier.pop() {
        let rep = classes[idx].representative();
        for gc in &gen_cocycles {
            let cl = canonical_class_cfg(g, &rep.mul(gc), cfg)?;
            if !classes.contains(&cl) {
                classes.push(cl);
                frontier.push(classes.len() - 1);
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_cocycle(g: &FiniteGroup, swap: bool) -> Cocycle2 {
        // Elements of Z2xZ2 as bits (g1, g2) at index 2·g1 + g2.
        Cocycle2 {
            phases: g
                .elements()
                .map(|a| {
                    g.elements()
                        .map(|b| {
                            let (a1, a2, b1, b2) = (a >> 1, a & 1, b >> 1, b & 1);
                            let bit = if swap { a2 & b1 } else { a1 & b2 };
                            if bit == 1 {
                                -ONE
                            } else {
                                ONE
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn pauli_cocycle_checks() {
        let g = FiniteGroup::klein();
        assert!(is_cocycle(&g, &Cocycle2::trivial(4)).ok);
        let w = pauli_cocycle(&g, false);
        assert!(is_cocycle(&g, &w).ok);
        let mut bad = Cocycle2::trivial(4);
        bad.phases[1][2] = -ONE;
        assert!(!is_cocycle(&g, &bad).ok);
    }

    #[test]
    fn snapping() {
        let g = FiniteGroup::klein();
        let k = snap_cocycle(&pauli_cocycle(&g, false), 2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(k[a][b], (a >> 1) & (b & 1));
            }
        }
        assert_eq!(snap_cocycle(&Cocycle2::trivial(3), 2).unwrap(), vec![vec![0; 3]; 3]);
        let mut with_i = Cocycle2::trivial(2);
        with_i.phases[1][1] = crate::linalg::I;
        assert!(matches!(snap_cocycle(&with_i, 2), Err(Error::SnapFailure { .. })));
    }

    /// Exhaustive oracle: is there μ valued in 4th roots with ν₂ = δμ·ν₁?
    fn brute_cohomologous(g: &FiniteGroup, nu1: &Cocycle2, nu2: &Cocycle2) -> bool {
        let n = g.order;
        let total = 4usize.pow(n as u32);
        (0..total).any(|code| {
            let mu: Vec<C64> = (0..n).map(|k| crate::linalg::I.powu(((code / 4usize.pow(k as u32)) % 4) as u32)).collect();
            let d = coboundary(g, &mu).mul(nu1);
            (0..n).all(|a| (0..n).all(|b| (d.phases[a][b] - nu2.phases[a][b]).norm() < 1e-9))
        })
    }

    #[test]
    fn pauli_class_is_nontrivial() {
        let g = FiniteGroup::klein();
        let w = pauli_cocycle(&g, false);
        let t = Cocycle2::trivial(4);
        assert!(cohomologous(&g, &t, &w).unwrap().is_none());
        assert!(!brute_cohomologous(&g, &t, &w));
        let w2 = pauli_cocycle(&g, true);
        let wit = cohomologous(&g, &w, &w2).unwrap().expect("the two Pauli cocycles are cohomologous");
        let d = coboundary(&g, &wit).mul(&w);
        for a in 0..4 {
            for b in 0..4 {
                assert!((d.phases[a][b] - w2.phases[a][b]).norm() < 1e-9);
            }
        }
        assert_eq!(canonical_class(&g, &w).unwrap(), canonical_class(&g, &w2).unwrap());
        assert_ne!(canonical_class(&g, &w).unwrap(), canonical_class(&g, &t).unwrap());
    }

    #[test]
    fn twist_of_equal_homs_is_trivial_with_i_witness() {
        let g = FiniteGroup::cyclic(2);
        let z = Z2Hom { values: vec![0, 1] };
        let tw = twist_class(&z, &z);
        let t = Cocycle2::trivial(2);
        let wit = cohomologous(&g, &t, &tw).unwrap().expect("ν(ζ,ζ) is a coboundary");
        let d = coboundary(&g, &wit);
        assert!((d.phases[1][1] - tw.phases[1][1]).norm() < 1e-9);
        let mu: Vec<C64> = z.values.iter().map(|&b| crate::linalg::I.powu(b as u32)).collect();
        let d = coboundary(&g, &mu);
        for a in 0..2 {
            for b in 0..2 {
                assert!((d.phases[a][b] - tw.phases[a][b]).norm() < 1e-12);
            }
        }
        assert!(twist_class(&Z2Hom::zero(2), &z).phases.iter().flatten().all(|x| (*x - ONE).norm() < 1e-15));
    }

    #[test]
    fn h2_counts() {
        assert_eq!(h2_enumerate(&FiniteGroup::trivial(), 2).unwrap().len(), 1);
        assert_eq!(h2_enumerate(&FiniteGroup::klein(), 2).unwrap().len(), 2);
        for n in 2..=4 {
            assert_eq!(h2_enumerate(&FiniteGroup::cyclic(n), n).unwrap().len(), 1, "Z{n}");
        }
        assert!(matches!(h2_enumerate(&FiniteGroup::cyclic(9), 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn canonical_class_is_gauge_invariant() {
        let g = FiniteGroup::klein();
        let w = pauli_cocycle(&g, false);
        let base = canonical_class(&g, &w).unwrap();
        for seed in 0..5u64 {
            let mu: Vec<C64> = (0..4).map(|k| C64::from_polar(1.0, 0.37 * (seed as f64 + 1.0) * (k as f64 + 0.5))).collect();
            let pert = coboundary(&g, &mu).mul(&w);
            assert_eq!(canonical_class(&g, &pert).unwrap(), base);
        }
    }

    #[test]
    fn quaternion_and_dihedral_classes() {
        // H²(Q8,U(1)) = 0 and H²(D4,U(1)) = Z2: the Z_2-cocycles realize exactly these.
        assert_eq!(h2_enumerate(&FiniteGroup::quaternion(), 2).unwrap().len(), 1);
        assert_eq!(h2_enumerate(&FiniteGroup::preset("D4").unwrap(), 2).unwrap().len(), 2);
    }
}
