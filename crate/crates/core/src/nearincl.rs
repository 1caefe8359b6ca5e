//! Finite-dimensional checks of the near-inclusion machinery: the algebra Ã, conditional
//! expectations onto supercommutants, near-inclusion reports, and unitaries implementing
//! near-identity homomorphisms.

use crate::error::{Error, Result};
use crate::linalg::*;
use crate::superalg::{
    classify_central_simple, close_algebra, matrix_units, supercommutant, supercommutator, Ambient, CentralSimpleShape,
    GradedSubalgebra,
};
use crate::Config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Ungraded commutant of S in the full ambient.
pub fn commutant(s: &GradedSubalgebra) -> GradedSubalgebra {
    let flat = Ambient::trivial(s.ambient.dim());
    let c = supercommutant(&GradedSubalgebra::from_elements(&s.basis, &flat));
    GradedSubalgebra::from_elements(&c.basis, &s.ambient)
}

/// Ã = {a₊ + a₋Θ_{A♯}} with Θ_{A♯} = Θ_A·Θ.  The set does not depend on Θ_A, since
/// A₋Θ_A = A₋ for any even unitary Θ_A ∈ A; when A has no inner grading (radical type)
/// Θ_A = I is used and `theta_a` is `None`.
#[derive(Debug, Clone)]
pub struct TildeAlgebra {
    pub tilde: GradedSubalgebra,
    pub sharp: GradedSubalgebra,
    pub theta_a: Option<CMat>,
    pub theta_sharp: CMat,
}

pub fn tilde_algebra(a: &GradedSubalgebra, cfg: &Config) -> Result<TildeAlgebra> {
    let amb = &a.ambient;
    if !a.contains_identity {
        return Err(Error::NotInnerSuper("algebra does not contain the identity".into()));
    }
    let theta_a = match classify_central_simple(a, cfg) {
        Ok(CentralSimpleShape::Rational { theta, .. }) => Some(theta),
        _ => None,
    };
    let theta_sharp = match &theta_a {
        Some(t) => mm(t, &amb.theta_matrix()),
        None => amb.theta_matrix(),
    };
    let elements: Vec<CMat> = a
        .basis
        .iter()
        .zip(&a.parity)
        .map(|(b, &p)| if p == 0 { b.clone() } else { mm(b, &theta_sharp) })
        .collect();
    let tilde = GradedSubalgebra::from_elements(&elements, amb);
    let sharp = supercommutant(a);
    if !commutant(&sharp).same_as(&tilde) {
        return Err(Error::NotInnerSuper("(A♯)' differs from Ã".into()));
    }
    if !commutant(&tilde).same_as(&sharp) {
        return Err(Error::NotInnerSuper("Ã' differs from A♯".into()));
    }
    Ok(TildeAlgebra { tilde, sharp, theta_a, theta_sharp })
}

/// The conditional expectation onto A♯, i.e. the HS projection onto Ã'.
#[derive(Debug, Clone)]
pub struct SupercommutantExpectation {
    pub tilde: TildeAlgebra,
}

impl SupercommutantExpectation {
    pub fn new(a: &GradedSubalgebra, cfg: &Config) -> Result<Self> {
        Ok(SupercommutantExpectation { tilde: tilde_algebra(a, cfg)? })
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        self.tilde.sharp.project(x)
    }
}

pub fn cond_expect_supercommutant(x: &CMat, a: &GradedSubalgebra, cfg: &Config) -> Result<CMat> {
    Ok(SupercommutantExpectation::new(a, cfg)?.apply(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The claimed bound is vacuous at the observed ε.
    NotApplicable,
}

#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub tag: String,
    pub claimed: f64,
    /// Largest observed value of (measured quantity)/(ε·norms).
    pub observed: f64,
    pub status: CheckStatus,
}

impl BoundCheck {
    fn new(tag: &str, claimed: f64, observed: f64, vacuous: bool) -> Self {
        let status = if vacuous {
            CheckStatus::NotApplicable
        } else if observed <= claimed {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        BoundCheck { tag: tag.into(), claimed, observed, status }
    }
}

#[derive(Debug, Clone)]
pub struct NearInclusionReport {
    /// Largest HS distance from an orthonormal basis element of A to span(B).  Exact.
    pub epsilon_hs: f64,
    /// Largest ‖a − P_B(a)‖/‖a‖ over sampled a ∈ A.  An estimate of the operator-norm ε.
    pub epsilon_op: f64,
    /// The same estimate for A against B♯.
    pub epsilon_sharp: f64,
    pub bound_checks: Vec<BoundCheck>,
    pub seed: u64,
}

impl NearInclusionReport {
    pub fn passed(&self) -> bool {
        self.bound_checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Basis elements, their homogeneous parts and seeded random unitaries of B, all nonzero.
fn samples(b: &GradedSubalgebra, rng: &mut ChaCha8Rng, unitaries: usize) -> Vec<CMat> {
    let mut out: Vec<CMat> = b.basis.clone();
    for _ in 0..unitaries {
        let x = b.random_element(rng);
        let h = (&x + dagger(&x)) * c(0.5, 0.0);
        out.push(b.project(&expi_hermitian(&h)));
        let e = b.random_parity_element(rng, 0);
        out.push((&e + dagger(&e)) * c(0.5, 0.0));
        if b.parity.contains(&1) {
            let o = b.random_parity_element(rng, 1);
            out.push((&o + dagger(&o)) * c(0.5, 0.0));
        }
    }
    out.retain(|x| op_norm(x) > 1e-12);
    out
}

/// max over sampled b of ‖[x, b]_s‖/(‖x‖‖b‖), with x split into homogeneous parts.
fn supercommutation_defect(x: &CMat, bs: &[CMat], amb: &Ambient) -> Result<f64> {
    let nx = op_norm(x).max(1e-300);
    let (xe, xo) = crate::superalg::parity_split(x, amb).unwrap_or_else(|_| {
        let t = amb.theta(x);
        ((x + &t) * c(0.5, 0.0), (x - &t) * c(0.5, 0.0))
    });
    let mut worst: f64 = 0.0;
    for b in bs {
        let nb = op_norm(b);
        let mut total = 0.0;
        for part in [&xe, &xo] {
            if frob(part) > 0.0 {
                total += op_norm(&supercommutator(part, b, amb)?);
            }
        }
        worst = worst.max(total / (nx * nb));
    }
    Ok(worst)
}

fn relative_distance(a: &CMat, b: &GradedSubalgebra) -> f64 {
    op_norm(&(a - b.project(a))) / op_norm(a).max(1e-300)
}

/// ε-nearness of A in B, plus the supercommutator lemma checked against B♯:
/// A ⊆_ε B♯ implies ‖[a, b]_s‖ ≤ 4ε‖a‖‖b‖, and ‖[x, b]_s‖ ≤ ε‖x‖‖b‖ for all b ∈ B implies
/// ‖E_{B♯}(x) − x‖ ≤ 3ε‖x‖.
pub fn near_inclusion_report(a: &GradedSubalgebra, b: &GradedSubalgebra, cfg: &Config) -> Result<NearInclusionReport> {
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch("near inclusion of algebras in different ambients".into()));
    }
    let amb = &a.ambient;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4ea7_0001);
    let epsilon_hs = a.basis.iter().map(|x| hs_norm(&(x - b.project(x)))).fold(0.0, f64::max);
    let a_samples = samples(a, &mut rng, 8);
    let b_samples = samples(b, &mut rng, 8);
    let epsilon_op = a_samples.iter().map(|x| relative_distance(x, b)).fold(0.0, f64::max);
    let mut bound_checks = Vec::new();
    let sharp = supercommutant(b);
    let mut epsilon_sharp: f64 = 0.0;
    let mut forward: f64 = 0.0;
    for x in &a_samples {
        let eps = relative_distance(x, &sharp);
        epsilon_sharp = epsilon_sharp.max(eps);
        let sc = supercommutation_defect(x, &b_samples, amb)?;
        forward = forward.max(if eps > 1e-14 { sc / eps } else if sc > 1e-9 { f64::INFINITY } else { 0.0 });
    }
    bound_checks.push(BoundCheck::new("supercommutator-4eps", 4.0, forward, epsilon_sharp >= 0.5));
    match SupercommutantExpectation::new(b, cfg) {
        Ok(e) => {
            let mut reverse: f64 = 0.0;
            let mut worst_eps: f64 = 0.0;
            for x in &a_samples {
                let eps = supercommutation_defect(x, &b_samples, amb)?;
                worst_eps = worst_eps.max(eps);
                let moved = op_norm(&(e.apply(x) - x)) / op_norm(x);
                reverse = reverse.max(if eps > 1e-14 { moved / eps } else if moved > 1e-9 { f64::INFINITY } else { 0.0 });
            }
            bound_checks.push(BoundCheck::new("conditional-expectation-3eps", 3.0, reverse, worst_eps >= 2.0 / 3.0));
        }
        Err(Error::NotInnerSuper(_)) => {
            bound_checks.push(BoundCheck::new("conditional-expectation-3eps", 3.0, 0.0, true));
        }
        Err(e) => return Err(e),
    }
    Ok(NearInclusionReport { epsilon_hs, epsilon_op, epsilon_sharp, bound_checks, seed: cfg.seed })
}

/// Unitary u with u* a u = Φ(a) on every supplied pair.
#[derive(Debug, Clone)]
pub struct Implementer {
    pub u: CMat,
    /// Σ_i max_a ‖Φ_i(a) − a‖/‖a‖ over the supplied elements of each family.
    pub epsilon: f64,
    /// ‖u − I‖ in operator norm.
    pub distance: f64,
    /// √2ε(1 + (1 − ε²)^{1/2})^{−1/2}, infinite when ε ≥ 1.
    pub bound: f64,
    pub kernel_dim: usize,
    /// max ‖u* a u − Φ(a)‖/‖a‖ over the supplied pairs.
    pub residual: f64,
}

pub fn implementer_bound(eps: f64) -> f64 {
    if eps >= 1.0 {
        return f64::INFINITY;
    }
    std::f64::consts::SQRT_2 * eps / (1.0 + (1.0 - eps * eps).sqrt()).sqrt()
}

/// Restrict the column basis `k` (vectorized matrices) to the kernel of `f`.
fn refine(k: &CMat, n: usize, f: impl Fn(&CMat) -> CMat) -> CMat {
    if k.ncols() == 0 {
        return k.clone();
    }
    let mut img = CMat::zeros(n * n, k.ncols());
    for j in 0..k.ncols() {
        let y = mat_of(&k.column(j).into_owned(), n, n);
        img.set_column(j, &vec_of(&f(&y)));
    }
    let ns = null_space(&img, 1e-9);
    k * ns
}

/// Solve {y : a·y = y·Φ(a)} jointly over all families, restricted to even G-invariant y,
/// pick the solution closest to the identity and take its polar part.
pub fn inner_implementer(families: &[Vec<(CMat, CMat)>], amb: &Ambient, action: &[CMat], cfg: &Config) -> Result<Implementer> {
    inner_implementer_within(families, amb, action, None, cfg)
}

/// As `inner_implementer`, with y further restricted to the algebra `within`.
pub fn inner_implementer_within(
    families: &[Vec<(CMat, CMat)>],
    amb: &Ambient,
    action: &[CMat],
    within: Option<&GradedSubalgebra>,
    cfg: &Config,
) -> Result<Implementer> {
    let n = amb.dim();
    let even: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| amb.grading[i] == amb.grading[j]).collect();
    let mut k = CMat::zeros(n * n, even.len());
    for (col, &(i, j)) in even.iter().enumerate() {
        k[(j * n + i, col)] = ONE;
    }
    for u in action {
        k = refine(&k, n, |y| u * y * dagger(u) - y);
    }
    if let Some(alg) = within {
        k = refine(&k, n, |y| y - alg.project(y));
    }
    let pairs: Vec<&(CMat, CMat)> = families.iter().flatten().collect();
    // Two random combinations usually cut the space down before the full sweep.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a9e_0001);
    for _ in 0..2 {
        if pairs.is_empty() {
            break;
        }
        let coeffs = random_complex(&mut rng, pairs.len(), 1);
        let mut a = CMat::zeros(n, n);
        let mut fa = CMat::zeros(n, n);
        for (p, z) in pairs.iter().zip(coeffs.iter()) {
            a += &p.0 * *z;
            fa += &p.1 * *z;
        }
        k = refine(&k, n, |y| &a * y - y * &fa);
    }
    for (a, fa) in &pairs {
        k = refine(&k, n, |y| a * y - y * fa);
    }
    if k.ncols() == 0 {
        return Err(Error::EmptyIntertwinerSpace);
    }
    // Maximize Re tr(y)/‖y‖ over the (orthonormal) kernel basis.
    let traces: Vec<C64> = (0..k.ncols()).map(|j| (0..n).map(|i| k[(i * n + i, j)]).sum()).collect();
    let tnorm = traces.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    let coeffs: Vec<C64> = if tnorm > 1e-12 {
        traces.iter().map(|t| t.conj() / tnorm).collect()
    } else {
        (0..k.ncols()).map(|j| if j == 0 { ONE } else { ZERO }).collect()
    };
    let yv = &k * CVec::from_vec(coeffs);
    let y = mat_of(&yv, n, n);
    let u = polar_unitary(&y).ok_or(Error::SingularY)?;
    let mut residual: f64 = 0.0;
    for (a, fa) in &pairs {
        let scale = op_norm(a).max(1e-300);
        residual = residual.max(op_norm(&(dagger(&u) * a * &u - fa)) / scale);
    }
    if residual > 1e-9 {
        return Err(Error::NoIntertwiner(format!("implementer residual {residual:.3e}")));
    }
    let epsilon: f64 = families
        .iter()
        .map(|f| f.iter().map(|(a, fa)| op_norm(&(fa - a)) / op_norm(a).max(1e-300)).fold(0.0, f64::max))
        .sum();
    Ok(Implementer {
        distance: op_norm(&(&u - eye(n))),
        u,
        epsilon,
        bound: implementer_bound(epsilon),
        kernel_dim: k.ncols(),
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    /// Estimated ε with A ⊆_ε B.
    pub epsilon: f64,
    /// False when ε ≥ 1/8; no claim is checked then.
    pub precondition: bool,
    /// U = u* with U A U* ⊆ B, where u implements the homomorphism A → B.
    pub unitary: Option<CMat>,
    pub distance: f64,
    /// Largest defect of U a U* from B over a basis of A.
    pub inclusion_defect: f64,
    pub bound_checks: Vec<BoundCheck>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        !self.precondition || self.bound_checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Matrix units of B close to the units f of A: g_a0 from the polar part of the block
/// column [P_B(f_a0)·P], with P an isometry onto the range of the projection near P_B(f_00).
fn nearby_units(f: &[Vec<CMat>], b: &GradedSubalgebra) -> Result<Vec<Vec<CMat>>> {
    let k = f.len();
    let amb = &b.ambient;
    let n = amb.dim();
    let h = b.project(&f[0][0]);
    let h = (&h + dagger(&h)) * c(0.5, 0.0);
    // The projection is even, so its range has a basis of homogeneous vectors.
    let mut cols: Vec<CVec> = Vec::new();
    for sign in [1i8, -1] {
        let idx: Vec<usize> = (0..n).filter(|&i| amb.grading[i] == sign).collect();
        if idx.is_empty() {
            continue;
        }
        let sub = CMat::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
        let eig = sub.symmetric_eigen();
        for (t, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 0.5 {
                let mut v = CVec::zeros(n);
                for (i, &r) in idx.iter().enumerate() {
                    v[r] = eig.eigenvectors[(i, t)];
                }
                cols.push(v);
            }
        }
    }
    let m = cols.len();
    if m * k != n {
        return Err(Error::NoConvergence(format!("projection near f_00 has rank {m}, expected {}", n / k)));
    }
    let p = CMat::from_columns(&cols);
    let mut w = CMat::zeros(n, n);
    for a in 0..k {
        let wa = mm(&b.project(&f[a][0]), &p);
        w.view_mut((0, a * m), (n, m)).copy_from(&wa);
    }
    let u = polar_unitary(&w).ok_or(Error::SingularY)?;
    let ph = dagger(&p);
    let g0: Vec<CMat> = (0..k).map(|a| b.project(&mm(&u.columns(a * m, m).into_owned(), &ph))).collect();
    let g: Vec<Vec<CMat>> = (0..k).map(|a| (0..k).map(|c2| mm(&g0[a], &dagger(&g0[c2]))).collect()).collect();
    for a in 0..k {
        for b2 in 0..k {
            for c2 in 0..k {
                for d in 0..k {
                    let want = if b2 == c2 { g[a][d].clone() } else { CMat::zeros(n, n) };
                    if hs_norm(&(mm(&g[a][b2], &g[c2][d]) - want)) > 1e-9 {
                        return Err(Error::NoConvergence("nearby matrix units fail the unit relations".into()));
                    }
                }
            }
        }
    }
    Ok(g)
}

/// The near-inclusion theorem on a constructed instance: for A ⊆_ε B with ε < 1/8 and A
/// rational central simple, an even unitary U ∈ (A ∪ B)'' with U A U* ⊆ B and
/// ‖U − I‖ ≤ 12ε, and ‖UzU* − z‖ ≤ 46δ‖z‖ for the supplied z with their δ.
pub fn verify_near_inclusion_theorem(
    a: &GradedSubalgebra,
    b: &GradedSubalgebra,
    probes: &[CMat],
    cfg: &Config,
) -> Result<TheoremReport> {
    let amb = &a.ambient;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4ea7_0002);
    let a_samples = samples(a, &mut rng, 16);
    let epsilon = a_samples.iter().map(|x| relative_distance(x, b)).fold(0.0, f64::max);
    let mut report = TheoremReport {
        epsilon,
        precondition: epsilon < 0.125,
        unitary: None,
        distance: f64::NAN,
        inclusion_defect: f64::NAN,
        bound_checks: Vec::new(),
    };
    if !report.precondition {
        return Ok(report);
    }
    let k = match classify_central_simple(a, cfg)? {
        CentralSimpleShape::Rational { p, q, .. } => p + q,
        CentralSimpleShape::Radical { .. } => {
            return Err(Error::NotInnerSuper("the constructed instances use rational A".into()))
        }
    };
    let f = matrix_units(a, k, cfg.seed)?;
    let g = nearby_units(&f, b)?;
    let mut pairs = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            pairs.push((f[i][j].clone(), g[i][j].clone()));
        }
    }
    let generated = close_algebra(&a.basis.iter().chain(&b.basis).cloned().collect::<Vec<_>>(), amb)?;
    let imp = inner_implementer_within(&[pairs], amb, &[], Some(&generated), cfg)?;
    let big_u = dagger(&imp.u);
    let distance = op_norm(&(&big_u - eye(amb.dim())));
    let inclusion_defect = a.basis.iter().map(|x| b.defect(&mm_all(&[&big_u, x, &imp.u]))).fold(0.0, f64::max);
    report.bound_checks.push(BoundCheck::new("near-inclusion-12eps", 12.0, distance / epsilon.max(1e-300), false));
    report.bound_checks.push(BoundCheck::new(
        "near-inclusion-contained",
        cfg.tol_alg,
        inclusion_defect,
        false,
    ));
    let mut worst: f64 = 0.0;
    for z in probes {
        let delta = relative_distance(z, a).max(relative_distance(z, b));
        let moved = op_norm(&(mm_all(&[&big_u, z, &imp.u]) - z)) / op_norm(z).max(1e-300);
        worst = worst.max(if delta > 1e-14 { moved / delta } else if moved > 1e-9 { f64::INFINITY } else { 0.0 });
    }
    if !probes.is_empty() {
        report.bound_checks.push(BoundCheck::new("conjugation-stability-46delta", 46.0, worst, false));
    }
    report.unitary = Some(big_u);
    report.distance = distance;
    report.inclusion_defect = inclusion_defect;
    Ok(report)
}

/// Perturbation instances: a graded factor B inside a fermion chain and A = Ad_w(B) or
/// Ad_w(B♯) with w = exp(iδK) for a seeded random even Hermitian K of norm one.
pub mod instances {
    use super::*;
    use crate::superalg::ChainEmbedding;

    pub struct Instance {
        pub b: GradedSubalgebra,
        pub w: CMat,
        pub delta: f64,
    }

    /// The algebra of the first `left` sites of a chain of `total` M^{1|1} sites.
    pub fn chain_factor(left: usize, total: usize) -> GradedSubalgebra {
        let emb = ChainEmbedding::new(vec![vec![1, -1]; total]);
        let amb = emb.ambient();
        let mut gens = Vec::new();
        for s in 0..left {
            for x in [pauli_x(), pauli_y(), pauli_z()] {
                gens.push(emb.embed(s, &x).expect("site in range"));
            }
        }
        close_algebra(&gens, &amb).expect("nonempty generators")
    }

    pub fn rotated(alg: &GradedSubalgebra, w: &CMat) -> GradedSubalgebra {
        let elements: Vec<CMat> = alg.basis.iter().map(|x| mm_all(&[w, x, &dagger(w)])).collect();
        GradedSubalgebra::from_elements(&elements, &alg.ambient)
    }

    pub fn perturbation(amb: &Ambient, delta: f64, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_hermitian(&mut rng, amb.dim());
        let k = (&k + amb.theta(&k)) * c(0.5, 0.0);
        let k = &k / c(op_norm(&k), 0.0);
        expi_hermitian(&(k * c(delta, 0.0)))
    }

    pub fn instance(left: usize, total: usize, delta: f64, seed: u64) -> Instance {
        let b = chain_factor(left, total);
        let w = perturbation(&b.ambient, delta, seed);
        Instance { b, w, delta }
    }
}
