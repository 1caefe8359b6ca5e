//! Central simple G-systems, their index (d, ζ, [ν]), the index group law, stacking,
//! and the first cohomology index of 0-dimensional automorphisms.

use crate::error::{Error, Result};
use crate::group::{
    canonical_class_cfg, characters, cohomologous_cfg, parity_extend, twist_class, Cocycle2, CohomClass, FiniteGroup,
    ParityExtension, Z2Hom,
};
use crate::linalg::*;
use crate::superalg::{
    classify_central_simple, graded_tensor_autom, inner_intertwiner, parity_of, Ambient, CentralSimpleShape,
    GradedSubalgebra,
};
use crate::Config;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// q·(√2)^radical with q a positive rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexValue {
    pub q: Ratio<i64>,
    pub radical: bool,
}

impl IndexValue {
    pub fn one() -> Self {
        IndexValue { q: Ratio::from_integer(1), radical: false }
    }
    pub fn rational(n: i64, d: i64) -> Self {
        IndexValue { q: Ratio::new(n, d), radical: false }
    }
    pub fn radical(n: i64, d: i64) -> Self {
        IndexValue { q: Ratio::new(n, d), radical: true }
    }
    /// √dim for a dimension of the form k² or 2n².
    pub fn from_dim(dim: usize) -> Option<Self> {
        let k = (dim as f64).sqrt().round() as i64;
        if (k * k) as usize == dim {
            return Some(IndexValue::rational(k, 1));
        }
        let n = ((dim / 2) as f64).sqrt().round() as i64;
        (dim % 2 == 0 && (2 * n * n) as usize == dim).then(|| IndexValue::radical(n, 1))
    }
    pub fn mul(&self, o: &IndexValue) -> IndexValue {
        let both = self.radical && o.radical;
        let q = self.q * o.q * if both { 2 } else { 1 };
        IndexValue { q, radical: self.radical ^ o.radical }
    }
    pub fn inv(&self) -> IndexValue {
        if self.radical {
            IndexValue { q: (self.q * 2).recip(), radical: true }
        } else {
            IndexValue { q: self.q.recip(), radical: false }
        }
    }
    pub fn to_f64(&self) -> f64 {
        let q = *self.q.numer() as f64 / *self.q.denom() as f64;
        if self.radical {
            q * std::f64::consts::SQRT_2
        } else {
            q
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.radical, *self.q.numer() == 1 && *self.q.denom() == 1) {
            (true, true) => write!(f, "√2"),
            (true, false) => write!(f, "{}·√2", self.q),
            (false, _) => write!(f, "{}", self.q),
        }
    }
}

/// Element (d, ζ, [ν]) of the index group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexTriple {
    pub d: IndexValue,
    pub zeta: Z2Hom,
    pub nu: CohomClass,
}

impl IndexTriple {
    pub fn identity(g: &FiniteGroup) -> Self {
        IndexTriple { d: IndexValue::one(), zeta: Z2Hom::zero(g.order), nu: CohomClass::trivial(g.order) }
    }
    pub fn is_identity(&self) -> bool {
        self.d == IndexValue::one() && self.zeta.is_zero() && self.nu.is_trivial()
    }
}

/// (d₁d₂, ζ₁+ζ₂, ν₁·ν₂·ν(ζ₁,ζ₂)).
pub fn triple_mul(g: &FiniteGroup, a: &IndexTriple, b: &IndexTriple) -> Result<IndexTriple> {
    let nu = a.nu.representative().mul(&b.nu.representative()).mul(&twist_class(&a.zeta, &b.zeta));
    Ok(IndexTriple { d: a.d.mul(&b.d), zeta: a.zeta.add(&b.zeta), nu: canonical_class_cfg(g, &nu, &Config::default())? })
}

/// (d⁻¹, ζ, ν⁻¹).
pub fn triple_inv(g: &FiniteGroup, a: &IndexTriple) -> Result<IndexTriple> {
    let nu = canonical_class_cfg(g, &a.nu.representative().inv(), &Config::default())?;
    Ok(IndexTriple { d: a.d.inv(), zeta: a.zeta.clone(), nu })
}

/// Central simple superalgebra with a G-action by ambient unitary conjugation.
#[derive(Debug, Clone)]
pub struct GSystem {
    pub group: FiniteGroup,
    pub algebra: GradedSubalgebra,
    /// u(g) indexed by group element.
    pub action: Vec<CMat>,
}

fn ad(u: &CMat, x: &CMat) -> CMat {
    u * x * dagger(u)
}

fn sampled(b: &GradedSubalgebra, max: usize) -> impl Iterator<Item = &CMat> {
    let step = (b.dim() / max).max(1);
    b.basis.iter().step_by(step)
}

impl GSystem {
    pub fn new(group: FiniteGroup, algebra: GradedSubalgebra, action: Vec<CMat>) -> Result<Self> {
        let s = GSystem { group, algebra, action };
        s.validate()?;
        Ok(s)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.algebra.ambient
    }

    /// Check that each Ad u(g) preserves the algebra, commutes with θ there, and that
    /// g ↦ Ad u(g) is a homomorphism on the algebra.
    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        if self.action.len() != g.order {
            return Err(Error::NotARepresentation(format!("{} unitaries for a group of order {}", self.action.len(), g.order)));
        }
        let amb = self.ambient();
        for u in &self.action {
            if u.nrows() != amb.dim() || frob(&(dagger(u) * u - eye(amb.dim()))) > 1e-9 * amb.dim() as f64 {
                return Err(Error::NotARepresentation("action is not by ambient unitaries".into()));
            }
        }
        for x in sampled(&self.algebra, 24) {
            for a in g.elements() {
                let ux = ad(&self.action[a], x);
                if !self.algebra.contains(&ux) {
                    return Err(Error::NotARepresentation(format!("Ad u({a}) leaves the algebra")));
                }
                if frob(&(amb.theta(&ux) - ad(&self.action[a], &amb.theta(x)))) > 1e-9 * frob(x).max(1.0) {
                    return Err(Error::NotEquivariant(format!("ρ^{a} does not commute with θ")));
                }
                for b in g.elements() {
                    let lhs = ad(&self.action[a], &ad(&self.action[b], x));
                    let rhs = ad(&self.action[g.mul(a, b)], x);
                    if frob(&(lhs - rhs)) > 1e-8 * frob(x).max(1.0) {
                        return Err(Error::NotARepresentation(format!("ρ^{a}ρ^{b} ≠ ρ^{}", g.mul(a, b))));
                    }
                }
            }
        }
        Ok(())
    }

    /// The same system conjugated by an ambient unitary w.
    pub fn conjugated(&self, w: &CMat) -> GSystem {
        let elements: Vec<CMat> = self.algebra.basis.iter().map(|b| ad(w, b)).collect();
        GSystem {
            group: self.group.clone(),
            algebra: GradedSubalgebra::from_elements(&elements, self.ambient()),
            action: self.action.iter().map(|u| ad(w, u)).collect(),
        }
    }
}

/// Everything read off while computing the index.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub shape: CentralSimpleShape,
    /// V(g) in B (rational) or in the even subalgebra (radical).
    pub v: Vec<CMat>,
    pub zeta: Z2Hom,
    pub cocycle: Cocycle2,
    pub index: IndexTriple,
}

/// ν with V(g)V(h) = ν(g,h)V(gh), checked to 1e-9 relative residual.
pub fn projective_cocycle(g: &FiniteGroup, v: &[CMat]) -> Result<Cocycle2> {
    let mut phases = vec![vec![ONE; g.order]; g.order];
    for a in g.elements() {
        for b in g.elements() {
            let (lam, res) = proportionality(&(&v[a] * &v[b]), &v[g.mul(a, b)]);
            if res > 1e-9 {
                return Err(Error::ScalarExtractionFailure(res));
            }
            phases[a][b] = lam / lam.norm();
        }
    }
    Ok(Cocycle2 { phases })
}

fn sign_of(z: &CMat, w: &CMat) -> Result<u8> {
    let (lam, res) = proportionality(z, w);
    if res > 1e-9 || (lam.norm() - 1.0).abs() > 1e-9 || lam.im.abs() > 1e-9 {
        return Err(Error::ScalarExtractionFailure(res.max((lam.norm() - 1.0).abs())));
    }
    Ok(if lam.re < 0.0 { 1 } else { 0 })
}

pub fn analyze(s: &GSystem, cfg: &Config) -> Result<Analysis> {
    let g = &s.group;
    let shape = classify_central_simple(&s.algebra, cfg)?;
    let d = IndexValue::from_dim(s.algebra.dim())
        .ok_or_else(|| Error::NotCentralSimple(format!("dimension {}", s.algebra.dim())))?;
    let (marker, host) = match &shape {
        CentralSimpleShape::Rational { theta, .. } => (theta.clone(), s.algebra.clone()),
        CentralSimpleShape::Radical { epsilon, .. } => (epsilon.clone(), s.algebra.even_part()),
    };
    let mut values = vec![0u8; g.order];
    let mut v = Vec::with_capacity(g.order);
    for a in g.elements() {
        let u = &s.action[a];
        values[a] = sign_of(&ad(u, &marker), &marker)?;
        v.push(inner_intertwiner(&host, |x| ad(u, x), cfg)?);
    }
    let zeta = Z2Hom { values };
    if !zeta.is_hom(g) {
        return Err(Error::NotARepresentation("ζ is not a homomorphism".into()));
    }
    let cocycle = projective_cocycle(g, &v)?;
    let nu = canonical_class_cfg(g, &cocycle, cfg)?;
    Ok(Analysis { shape, v, zeta: zeta.clone(), cocycle, index: IndexTriple { d, zeta, nu } })
}

pub fn gsystem_index(s: &GSystem, cfg: &Config) -> Result<IndexTriple> {
    Ok(analyze(s, cfg)?.index)
}

/// ind(S₁)·ind(S₂)⁻¹.
pub fn relative_index(s1: &GSystem, s2: &GSystem, cfg: &Config) -> Result<IndexTriple> {
    let a = gsystem_index(s1, cfg)?;
    let b = gsystem_index(s2, cfg)?;
    triple_mul(&s1.group, &a, &triple_inv(&s1.group, &b)?)
}

fn unitary_parity(u: &CMat, amb: &Ambient) -> Result<u8> {
    parity_of(u, amb).ok_or_else(|| Error::ParityMismatch("action unitary is not homogeneous".into()))
}

/// π(B₁ ⊗̂ B₂) with the action u₁(g) ⊗ u₂(g)Θ₂^{ξ₁(g)}.
pub fn stack_gsystems(s1: &GSystem, s2: &GSystem) -> Result<GSystem> {
    if s1.group.table != s2.group.table {
        return Err(Error::Invalid("stacked systems must share the group".into()));
    }
    let (a1, a2) = (s1.ambient(), s2.ambient());
    let amb = a1.tensor(a2);
    let t1 = a1.theta_matrix();
    let mut elements = Vec::with_capacity(s1.algebra.dim() * s2.algebra.dim());
    for b1 in &s1.algebra.basis {
        let b1t = b1 * &t1;
        for (b2, &p2) in s2.algebra.basis.iter().zip(&s2.algebra.parity) {
            elements.push(kron(if p2 == 1 { &b1t } else { b1 }, b2));
        }
    }
    let algebra = GradedSubalgebra::from_elements(&elements, &amb);
    let action = s1
        .group
        .elements()
        .map(|g| {
            let (u1, u2) = (&s1.action[g], &s2.action[g]);
            graded_tensor_autom(u1, unitary_parity(u1, a1)?, u2, unitary_parity(u2, a2)?, a1, a2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GSystem { group: s1.group.clone(), algebra, action })
}

/// Character μ on G' = Z₂ × G with α(V(g')) = μ(g')V(g').
#[derive(Debug, Clone)]
pub struct FirstCohomology {
    pub extension: ParityExtension,
    pub mu: Vec<C64>,
}

impl FirstCohomology {
    pub fn is_trivial(&self, tol: f64) -> bool {
        self.mu.iter().all(|m| (m - ONE).norm() < tol)
    }
    /// μ restricted to G ⊂ G'.
    pub fn on_group(&self) -> Vec<C64> {
        (0..self.extension.base_order).map(|g| self.mu[self.extension.element(0, g)]).collect()
    }
    pub fn on_theta(&self) -> C64 {
        self.mu[self.extension.theta]
    }
}

fn check_alpha(s: &GSystem, u: &CMat) -> Result<()> {
    let amb = s.ambient();
    for x in sampled(&s.algebra, 24) {
        let ax = ad(u, x);
        if !s.algebra.contains(&ax) {
            return Err(Error::NotEquivariant("automorphism leaves the algebra".into()));
        }
        if frob(&(amb.theta(&ax) - ad(u, &amb.theta(x)))) > 1e-9 * frob(x).max(1.0) {
            return Err(Error::NotEquivariant("automorphism is not even".into()));
        }
        for w in &s.action {
            if frob(&(ad(u, &ad(w, x)) - ad(w, &ax))) > 1e-9 * frob(x).max(1.0) {
                return Err(Error::NotEquivariant("automorphism does not commute with the group action".into()));
            }
        }
    }
    Ok(())
}

pub fn first_cohomology_index(s: &GSystem, u: &CMat, cfg: &Config) -> Result<FirstCohomology> {
    check_alpha(s, u)?;
    let an = analyze(s, cfg)?;
    let CentralSimpleShape::Rational { theta, .. } = &an.shape else {
        return Err(Error::Invalid("first cohomology index needs a rational system".into()));
    };
    let ext = parity_extend(&s.group);
    let mut mu = vec![ONE; ext.group.order];
    for x in ext.group.elements() {
        let (bit, g) = ext.split(x);
        let vx = if bit == 1 { theta * &an.v[g] } else { an.v[g].clone() };
        let (lam, res) = proportionality(&ad(u, &vx), &vx);
        if res > 1e-9 {
            return Err(Error::ScalarExtractionFailure(res));
        }
        mu[x] = lam / lam.norm();
    }
    for a in ext.group.elements() {
        for b in ext.group.elements() {
            if (mu[a] * mu[b] - mu[ext.group.mul(a, b)]).norm() > 1e-9 {
                return Err(Error::ScalarExtractionFailure((mu[a] * mu[b] - mu[ext.group.mul(a, b)]).norm()));
            }
        }
    }
    Ok(FirstCohomology { extension: ext, mu })
}

/// Even G-invariant self-adjoint H ∈ B with Ad exp(iH) = α on B, when the first
/// cohomology index of α is trivial.
pub fn deform_to_identity_witness(s: &GSystem, u: &CMat, cfg: &Config) -> Result<Option<CMat>> {
    let mu = first_cohomology_index(s, u, cfg)?;
    if !mu.is_trivial(1e-9) {
        return Ok(None);
    }
    let w = inner_intertwiner(&s.algebra, |x| ad(u, x), cfg)?;
    // Rotate the spectrum so that its widest gap straddles the branch cut.
    let (vals, _) = normal_eigen(&w);
    let mut phases: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = (phases[0] + 2.0 * std::f64::consts::PI - phases[phases.len() - 1], phases[phases.len() - 1]);
    for k in 1..phases.len() {
        let gap = phases[k] - phases[k - 1];
        if gap > best.0 {
            best = (gap, phases[k - 1]);
        }
    }
    let mid = best.1 + best.0 / 2.0;
    let w = w * C64::from_polar(1.0, std::f64::consts::PI - mid);
    let h = log_unitary(&w);
    let amb = s.ambient();
    let scale = frob(&h).max(1.0);
    if frob(&(amb.theta(&h) - &h)) > 1e-9 * scale || s.action.iter().any(|v| frob(&(ad(v, &h) - &h)) > 1e-9 * scale) {
        return Err(Error::NotEquivariant("logarithm is not even and invariant".into()));
    }
    Ok(Some(h))
}

/// Unitary T and phases λ with T·(λ(g)v(g))·T* = w(g) for every g, when the projective
/// representations v and w are equivalent after rephasing.  Candidates λ = λ₀χ run over
/// the characters χ and are filtered by comparing characters of the two representations.
pub fn intertwine_projective(g: &FiniteGroup, v: &[CMat], w: &[CMat], cfg: &Config) -> Result<Option<(CMat, Vec<C64>)>> {
    Ok(intertwine_projective_all(g, v, w, cfg)?.into_iter().next())
}

/// One intertwiner for every admissible rephasing λ.  Within each λ the intertwiner is the
/// unitary part of the kernel element closest to the identity.
pub fn intertwine_projective_all(g: &FiniteGroup, v: &[CMat], w: &[CMat], cfg: &Config) -> Result<Vec<(CMat, Vec<C64>)>> {
    let d = v[0].nrows();
    let mut found = Vec::new();
    if w[0].nrows() != d {
        return Ok(found);
    }
    let nv = projective_cocycle(g, v)?;
    let nw = projective_cocycle(g, w)?;
    let Some(lam0) = cohomologous_cfg(g, &nv, &nw, cfg)? else {
        return Ok(found);
    };
    for chi in characters(g) {
        let lam: Vec<C64> = g.elements().map(|a| lam0[a] * chi[a]).collect();
        let traces_match = g.elements().all(|a| (w[a].trace() - lam[a] * v[a].trace()).norm() < 1e-8 * d as f64);
        if !traces_match {
            continue;
        }
        let mut m = CMat::zeros(g.order * d * d, d * d);
        for a in g.elements() {
            let lv = &v[a] * lam[a];
            let block = kron(&lv.transpose(), &eye(d)) - kron(&eye(d), &w[a]);
            m.view_mut((a * d * d, 0), (d * d, d * d)).copy_from(&block);
        }
        let ns = null_space(&m, 1e-9);
        if ns.ncols() == 0 {
            continue;
        }
        // Kernel element with the largest Re tr(y)/‖y‖; a generic one if all traces vanish.
        let traces: Vec<C64> = (0..ns.ncols()).map(|j| (0..d).map(|i| ns[(i * d + i, j)]).sum()).collect();
        let tn = traces.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
        let coeffs: CVec = if tn > 1e-9 {
            CVec::from_iterator(ns.ncols(), traces.iter().map(|t| t.conj() / tn))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0171_e27a);
            random_complex(&mut rng, ns.ncols(), 1).column(0).into_owned()
        };
        let y = mat_of(&(&ns * coeffs), d, d);
        let Some(t) = polar_unitary(&y) else { continue };
        let ok = g.elements().all(|a| frob(&(&t * &v[a] * lam[a] * dagger(&t) - &w[a])) < 1e-8 * d as f64);
        if ok {
            found.push((t, lam));
        }
    }
    Ok(found)
}

/// Small systems used for property tests and the command-line examples.
pub mod samples {
    use super::*;
    use crate::group::{characters, enumerate_z2_homs};
    use crate::superalg::close_algebra;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// Random unitary commuting with the grading operator.
    pub fn random_even_unitary(amb: &Ambient, rng: &mut ChaCha8Rng) -> CMat {
        let n = amb.dim();
        let mut out = CMat::zeros(n, n);
        for sign in [1i8, -1] {
            let idx: Vec<usize> = (0..n).filter(|&i| amb.grading[i] == sign).collect();
            if idx.is_empty() {
                continue;
            }
            let u = random_unitary(rng, idx.len());
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    out[(i, j)] = u[(a, b)];
                }
            }
        }
        out
    }

    /// X^{g₁} Z^{g₂} on Z₂×Z₂ (element index 2g₁ + g₂).
    pub fn pauli_rep() -> Vec<CMat> {
        (0..4).map(|a| {
            let x = if a >> 1 == 1 { pauli_x() } else { eye(2) };
            let z = if a & 1 == 1 { pauli_z() } else { eye(2) };
            x * z
        }).collect()
    }

    fn is_klein(g: &FiniteGroup) -> bool {
        g.order == 4 && g.table == FiniteGroup::klein().table
    }

    /// M^{p|q} with u(g) diagonal in characters: index (p+q, 0, e).
    pub fn diagonal_system(g: &FiniteGroup, p: usize, q: usize, rng: &mut ChaCha8Rng) -> GSystem {
        let amb = Ambient::superspace(p, q);
        let chars = characters(g);
        let picks: Vec<usize> = (0..p + q).map(|_| rng.gen_range(0..chars.len())).collect();
        let action = g
            .elements()
            .map(|a| CMat::from_fn(p + q, p + q, |i, j| if i == j { chars[picks[i]][a] } else { ZERO }))
            .collect();
        GSystem { group: g.clone(), algebra: GradedSubalgebra::full(&amb), action }
    }

    /// M^{1|1} with u(g) = χ(g)σ_X^{ζ(g)}: index (2, ζ, e).
    pub fn twisted_system(g: &FiniteGroup, zeta: &Z2Hom, chi: &[C64]) -> GSystem {
        let amb = Ambient::superspace(1, 1);
        let action = g
            .elements()
            .map(|a| if zeta.values[a] == 1 { pauli_x() * chi[a] } else { eye(2) * chi[a] })
            .collect();
        GSystem { group: g.clone(), algebra: GradedSubalgebra::full(&amb), action }
    }

    /// Pauli projective representation of Z₂×Z₂ on M₂ (trivially graded when `graded` is
    /// false, otherwise on M^{1|1} where X is odd).
    pub fn pauli_system(graded: bool) -> GSystem {
        let amb = if graded { Ambient::superspace(1, 1) } else { Ambient::trivial(2) };
        GSystem { group: FiniteGroup::klein(), algebra: GradedSubalgebra::full(&amb), action: pauli_rep() }
    }

    /// M_n ⊗ K inside M_n ⊗ M^{1|1}, with u(g) = P(g) ⊗ σ_Z^{ζ(g)} for a projective
    /// representation P of G on C^n.
    pub fn radical_system(g: &FiniteGroup, p_rep: &[CMat], zeta: &Z2Hom) -> GSystem {
        let n = p_rep[0].nrows();
        let mut grading = Vec::with_capacity(2 * n);
        for _ in 0..n {
            grading.extend([1i8, -1]);
        }
        let amb = Ambient::new(grading);
        let mut gens: Vec<CMat> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| kron(&unit(n, i, j), &eye(2))).collect();
        gens.push(kron(&eye(n), &pauli_x()));
        let algebra = close_algebra(&gens, &amb).expect("nonempty generators");
        let action = g
            .elements()
            .map(|a| kron(&p_rep[a], &if zeta.values[a] == 1 { pauli_z() } else { eye(2) }))
            .collect();
        GSystem { group: g.clone(), algebra, action }
    }

    /// A random system from the families above, conjugated by a random even unitary.
    pub fn random_system(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> GSystem {
        let homs = enumerate_z2_homs(g).expect("small group");
        let zeta = homs[rng.gen_range(0..homs.len())].clone();
        let chars = characters(g);
        let chi = chars[rng.gen_range(0..chars.len())].clone();
        let trivial_rep: Vec<CMat> = g.elements().map(|_| eye(1)).collect();
        let kinds = if is_klein(g) { 6 } else { 4 };
        let base = match rng.gen_range(0..kinds) {
            0 => {
                let p = rng.gen_range(1..3);
                let q = rng.gen_range(0..2);
                diagonal_system(g, p, q, rng)
            }
            1 => twisted_system(g, &zeta, &chi),
            2 => radical_system(g, &trivial_rep, &zeta),
            3 => {
                let rep: Vec<CMat> = g.elements().map(|a| diag_real(&[1.0, 1.0]) * chi[a]).collect();
                radical_system(g, &rep, &zeta)
            }
            4 => pauli_system(rng.gen_bool(0.5)),
            _ => radical_system(g, &pauli_rep(), &zeta),
        };
        let w = random_even_unitary(base.ambient(), rng);
        base.conjugated(&w)
    }

    /// Regular-representation system: M_{|G|} trivially graded with u(g)|h⟩ = |gh⟩.
    pub fn regular_system(g: &FiniteGroup) -> GSystem {
        let n = g.order;
        let amb = Ambient::trivial(n);
        let action = g.elements().map(|a| CMat::from_fn(n, n, |i, j| if i == g.mul(a, j) { ONE } else { ZERO })).collect();
        GSystem { group: g.clone(), algebra: GradedSubalgebra::full(&amb), action }
    }

    /// Diagonal unitary |g⟩ ↦ μ(g)|g⟩ on the regular system.
    pub fn regular_character_unitary(mu: &[C64]) -> CMat {
        CMat::from_fn(mu.len(), mu.len(), |i, j| if i == j { mu[i] } else { ZERO })
    }
}
