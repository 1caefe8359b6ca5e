//! Finite groups given by multiplication tables, their homomorphisms into cyclic
//! groups, and second cohomology with U(1) coefficients.

mod cohomology;
mod smith;

pub use cohomology::{
    canonical_class, cohomologous, coboundary, cocycle_from_exponents, h2_enumerate, is_cocycle, snap_cocycle,
    twist_class, CocycleReport, CohomClass, Cocycle2, canonical_class_cfg, cohomologous_cfg, h2_enumerate_cfg, is_cocycle_tol,
};
pub use smith::{smith_normal_form, Smith};

use crate::error::{Error, Result};
use crate::Config;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverses: Vec<usize>,
    pub name: Option<String>,
}

/// Data recorded by [`parity_extend`]: element (b, g) of Z₂ × G sits at index b·|G| + g.
#[derive(Debug, Clone)]
pub struct ParityExtension {
    pub group: FiniteGroup,
    pub base_order: usize,
    pub theta: usize,
}

impl ParityExtension {
    pub fn embed(&self, g: usize) -> usize {
        g
    }
    pub fn element(&self, bit: u8, g: usize) -> usize {
        bit as usize * self.base_order + g
    }
    pub fn split(&self, x: usize) -> (u8, usize) {
        ((x / self.base_order) as u8, x % self.base_order)
    }
}

/// A homomorphism G → Z₂ stored by its values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z2Hom {
    pub values: Vec<u8>,
}

impl Z2Hom {
    pub fn zero(order: usize) -> Self {
        Z2Hom { values: vec![0; order] }
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
    pub fn add(&self, other: &Z2Hom) -> Z2Hom {
        Z2Hom { values: self.values.iter().zip(&other.values).map(|(a, b)| a ^ b).collect() }
    }
    pub fn is_hom(&self, g: &FiniteGroup) -> bool {
        if self.values.len() != g.order || self.values[g.identity] != 0 {
            return false;
        }
        (0..g.order).all(|a| (0..g.order).all(|b| self.values[a] ^ self.values[b] == self.values[g.mul(a, b)]))
    }
}

pub fn group_from_table(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
    let n = table.len();
    if n == 0 {
        return Err(Error::BadTable("empty table".into()));
    }
    for row in &table {
        if row.len() != n {
            return Err(Error::BadTable("table is not square".into()));
        }
        if row.iter().any(|&x| x >= n) {
            return Err(Error::BadTable("entry out of range".into()));
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or(Error::NoIdentity)?;
    let mut inverses = vec![0; n];
    for g in 0..n {
        inverses[g] = (0..n)
            .find(|&h| table[g][h] == identity && table[h][g] == identity)
            .ok_or(Error::NoInverse(g))?;
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::NotAssociative(a, b, c));
                }
            }
        }
    }
    Ok(FiniteGroup { order: n, table, identity, inverses, name: None })
}

impl FiniteGroup {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn trivial() -> Self {
        group_from_table(vec![vec![0]]).unwrap().with_name("trivial")
    }

    pub fn cyclic(n: usize) -> Self {
        let t = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        group_from_table(t).unwrap().with_name(&format!("Z{n}"))
    }

    /// Direct product with element (a, b) at index a·|H| + b.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order, h.order);
        let t = (0..m * n)
            .map(|x| (0..m * n).map(|y| g.mul(x / n, y / n) * n + h.mul(x % n, y % n)).collect())
            .collect();
        let name = format!("{}x{}", g.name.clone().unwrap_or_default(), h.name.clone().unwrap_or_default());
        group_from_table(t).unwrap().with_name(&name)
    }

    pub fn klein() -> Self {
        let mut g = Self::product(&Self::cyclic(2), &Self::cyclic(2));
        g.name = Some("Z2xZ2".into());
        g
    }

    /// Dihedral group of order 2n; r^k at index k, s·r^k at index n + k.
    pub fn dihedral(n: usize) -> Self {
        let elem = |x: usize| (x / n, x % n);
        let t = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (s1, k1) = elem(x);
                        let (s2, k2) = elem(y);
                        // s^a r^k · s^b r^l = s^{a+b} r^{(-1)^b k + l}
                        let k = if s2 == 0 { (k1 + k2) % n } else { (n - k1 + k2) % n };
                        ((s1 + s2) % 2) * n + k
                    })
                    .collect()
            })
            .collect();
        group_from_table(t).unwrap()
    }

    pub fn quaternion() -> Self {
        // Elements ±1, ±i, ±j, ±k encoded as sign·unit with unit in {1,i,j,k}.
        let unit_mul = |a: usize, b: usize| -> (bool, usize) {
            // returns (negate, unit)
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let t = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (sx, ux) = (x / 4, x % 4);
                        let (sy, uy) = (y / 4, y % 4);
                        let (neg, u) = unit_mul(ux, uy);
                        ((sx + sy + neg as usize) % 2) * 4 + u
                    })
                    .collect()
            })
            .collect();
        group_from_table(t).unwrap().with_name("Q8")
    }

    pub fn preset(name: &str) -> Result<Self> {
        Ok(match name {
            "trivial" => Self::trivial(),
            "Z2" => Self::cyclic(2),
            "Z3" => Self::cyclic(3),
            "Z4" => Self::cyclic(4),
            "Z2xZ2" => Self::klein(),
            "S3" => Self::dihedral(3).with_name("S3"),
            "D4" => Self::dihedral(4).with_name("D4"),
            "Q8" => Self::quaternion(),
            _ => return Err(Error::UnknownGroup(name.to_string())),
        })
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Greedy generating set: each element is outside the subgroup generated by the earlier ones.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut sub = vec![false; self.order];
        sub[self.identity] = true;
        for g in 0..self.order {
            if !sub[g] {
                gens.push(g);
                sub = self.subgroup_mask(&gens);
            }
        }
        gens
    }

    pub fn subgroup_mask(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order];
        mask[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &s in gens {
                let y = self.mul(x, s);
                if !mask[y] {
                    mask[y] = true;
                    frontier.push(y);
                }
            }
        }
        mask
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        let mut e = 1;
        for g in self.elements() {
            let o = self.element_order(g);
            e = e / gcd(e, o) * o;
        }
        e
    }

    pub fn is_central(&self, g: usize) -> bool {
        self.elements().all(|h| self.mul(g, h) == self.mul(h, g))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|g| self.is_central(g))
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn parity_extend(g: &FiniteGroup) -> ParityExtension {
    let z2 = FiniteGroup::cyclic(2);
    let mut gp = FiniteGroup::product(&z2, g);
    gp.name = Some(format!("Z2x{}", g.name.clone().unwrap_or_default()));
    ParityExtension { theta: g.order + g.identity, base_order: g.order, group: gp }
}

/// All homomorphisms G → Z_m as value arrays, found by assigning values on a
/// generating set and propagating through the Cayley graph.
pub fn homs_to_cyclic(g: &FiniteGroup, m: usize) -> Vec<Vec<usize>> {
    let gens = g.generators();
    let mut out = Vec::new();
    let total = m.pow(gens.len() as u32);
    for code in 0..total {
        let mut assign = vec![0usize; gens.len()];
        let mut c = code;
        for a in assign.iter_mut() {
            *a = c % m;
            c /= m;
        }
        let mut vals: Vec<Option<usize>> = vec![None; g.order];
        vals[g.identity] = Some(0);
        let mut frontier = vec![g.identity];
        let mut ok = true;
        'bfs: while let Some(x) = frontier.pop() {
            for (k, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                let v = (vals[x].unwrap() + assign[k]) % m;
                match vals[y] {
                    None => {
                        vals[y] = Some(v);
                        frontier.push(y);
                    }
                    Some(w) if w != v => {
                        ok = false;
                        break 'bfs;
                    }
                    _ => {}
                }
            }
        }
        if !ok {
            continue;
        }
        let vals: Vec<usize> = vals.into_iter().map(|v| v.unwrap()).collect();
        let hom = g.elements().all(|a| g.elements().all(|b| (vals[a] + vals[b]) % m == vals[g.mul(a, b)]));
        if hom {
            out.push(vals);
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn enumerate_z2_homs(g: &FiniteGroup) -> Result<Vec<Z2Hom>> {
    enumerate_z2_homs_capped(g, &Config::default())
}

pub fn enumerate_z2_homs_capped(g: &FiniteGroup, cfg: &Config) -> Result<Vec<Z2Hom>> {
    if g.order > cfg.hom_cap {
        return Err(Error::GroupTooLarge { order: g.order, cap: cfg.hom_cap });
    }
    Ok(homs_to_cyclic(g, 2)
        .into_iter()
        .map(|v| Z2Hom { values: v.into_iter().map(|x| x as u8).collect() })
        .collect())
}

/// One-dimensional unitary characters of G, as phase arrays.
pub fn characters(g: &FiniteGroup) -> Vec<Vec<num_complex::Complex64>> {
    let m = g.exponent();
    homs_to_cyclic(g, m)
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|k| num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_associative(g: &FiniteGroup) {
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn presets_are_groups() {
        for name in ["trivial", "Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8"] {
            let g = FiniteGroup::preset(name).unwrap();
            assert_associative(&g);
        }
        assert!(!FiniteGroup::preset("S3").unwrap().is_abelian());
        assert!(!FiniteGroup::preset("Q8").unwrap().is_abelian());
    }

    #[test]
    fn table_validation() {
        assert_eq!(group_from_table(vec![vec![0]]).unwrap().order, 1);
        let z2 = group_from_table(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(z2.identity, 0);
        let klein: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let k = group_from_table(klein).unwrap();
        assert_associative(&k);
        assert!(matches!(group_from_table(vec![vec![0, 0], vec![1, 1]]), Err(Error::NoIdentity)));
        assert!(matches!(group_from_table(vec![vec![0, 1], vec![1, 1]]), Err(Error::NoInverse(1))));
        // Identity and inverses exist but (1·1)·2 ≠ 1·(1·2).
        let bad = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 0]];
        assert!(matches!(group_from_table(bad), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn parity_extension_of_s3() {
        let s3 = FiniteGroup::preset("S3").unwrap();
        let ext = parity_extend(&s3);
        assert_eq!(ext.group.order, 12);
        assert!(ext.group.is_central(ext.theta));
        assert_eq!(ext.group.mul(ext.theta, ext.theta), ext.group.identity);
        assert_eq!(parity_extend(&FiniteGroup::trivial()).group.order, 2);
        assert_eq!(parity_extend(&FiniteGroup::cyclic(2)).group.order, 4);
    }

    #[test]
    fn z2_hom_counts_match_brute_force() {
        for name in ["trivial", "Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8"] {
            let g = FiniteGroup::preset(name).unwrap();
            let homs = enumerate_z2_homs(&g).unwrap();
            let mut brute = 0;
            for code in 0..(1u32 << g.order) {
                let h = Z2Hom { values: (0..g.order).map(|k| ((code >> k) & 1) as u8).collect() };
                if h.is_hom(&g) {
                    brute += 1;
                }
            }
            assert_eq!(homs.len(), brute, "{name}");
            assert!(homs.iter().any(|h| h.is_zero()));
        }
        assert_eq!(enumerate_z2_homs(&FiniteGroup::cyclic(3)).unwrap().len(), 1);
    }

    #[test]
    fn hom_cap_is_enforced() {
        let g = FiniteGroup::cyclic(25);
        assert!(matches!(enumerate_z2_homs(&g), Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn character_counts() {
        assert_eq!(characters(&FiniteGroup::cyclic(3)).len(), 3);
        assert_eq!(characters(&FiniteGroup::klein()).len(), 4);
        assert_eq!(characters(&FiniteGroup::preset("S3").unwrap()).len(), 2);
    }
}
