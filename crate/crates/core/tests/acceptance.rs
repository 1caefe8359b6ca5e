//! Acceptance checks, one line per criterion.  Exits nonzero when any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqca::condexp::{random_region_element, TracialFrame};
use sqca::group::{
    canonical_class, coboundary, cohomologous, enumerate_z2_homs, h2_enumerate, twist_class, Cocycle2, FiniteGroup, Z2Hom,
};
use sqca::gsystem::samples::{pauli_rep, random_even_unitary, random_system, regular_character_unitary, regular_system};
use sqca::gsystem::{first_cohomology_index, gsystem_index, stack_gsystems, triple_inv, triple_mul, IndexTriple, IndexValue};
use sqca::linalg::*;
use sqca::nearincl::{
    implementer_bound, inner_implementer, instances, near_inclusion_report, verify_near_inclusion_theorem, CheckStatus,
};
use sqca::qca::{
    circuit_from_layers, coarse_grain, compose_qca, decouple_trivial, preset_cocycle_example, preset_majorana_shift,
    preset_majorana_shift_left, preset_shift, preset_shift_left, preset_zeta_example, qca_index, qca_index_at,
    random_circuit, random_circuit_window, stack_qca, verify_factorization, QcaRealization, DEFAULT_SITES,
};
use sqca::superalg::{close_algebra, double_supercommutant, supercommutant, Ambient, ChainEmbedding, GradedSubalgebra};
use sqca::Config;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// A failed criterion, with what was observed.
struct Fail(String);

impl From<sqca::Error> for Fail {
    fn from(e: sqca::Error) -> Self {
        Fail(format!("{}: {e}", e.kind()))
    }
}

type Outcome = Result<String, Fail>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), Fail> {
    if ok {
        Ok(())
    } else {
        Err(Fail(msg()))
    }
}

fn cfg() -> Config {
    Config::default()
}

fn triv(d: IndexValue) -> IndexTriple {
    IndexTriple { d, ..IndexTriple::identity(&FiniteGroup::trivial()) }
}

fn show(t: &IndexTriple) -> String {
    let nu = if t.nu.is_trivial() { "e".to_string() } else { format!("{:?} mod {}", t.nu.canonical, t.nu.modulus) };
    format!("({}, {:?}, {nu})", t.d, t.zeta.values)
}

fn z2_hom() -> Z2Hom {
    Z2Hom { values: vec![0, 1] }
}

fn presets() -> Vec<(&'static str, QcaRealization)> {
    let n = DEFAULT_SITES;
    vec![
        ("shift-2", preset_shift(2, n).unwrap()),
        ("shift-3", preset_shift(3, n).unwrap()),
        ("shift-left-2", preset_shift_left(2, n).unwrap()),
        ("majorana", preset_majorana_shift(n).unwrap()),
        ("majorana-left", preset_majorana_shift_left(n).unwrap()),
        ("zeta-Z2", preset_zeta_example(&FiniteGroup::cyclic(2), &[eye(1), eye(1)], &z2_hom(), n).unwrap()),
        ("cocycle-Z2xZ2", preset_cocycle_example(&FiniteGroup::klein(), &pauli_rep(), n).unwrap()),
    ]
}

fn timed_index(q: &QcaRealization, limit: Duration) -> Result<(IndexTriple, Duration), Fail> {
    let t0 = Instant::now();
    let ind = qca_index(q, &cfg())?;
    let el = t0.elapsed();
    ensure(el < limit, || format!("took {el:.2?}"))?;
    Ok((ind, el))
}

fn c1_shift() -> Outcome {
    let mut detail = Vec::new();
    for d in [2usize, 3] {
        let q = preset_shift(d, DEFAULT_SITES)?;
        let (ind, el) = timed_index(&q, Duration::from_secs(5))?;
        ensure(ind == triv(IndexValue::rational(d as i64, 1)), || format!("σ{d}: {}", show(&ind)))?;
        detail.push(format!("σ{d} {} in {el:.2?}", show(&ind)));
    }
    Ok(detail.join(", "))
}

fn c2_majorana() -> Outcome {
    let (ind, el) = timed_index(&preset_majorana_shift(DEFAULT_SITES)?, Duration::from_secs(5))?;
    ensure(ind == triv(IndexValue::radical(1, 1)), || show(&ind))?;
    Ok(format!("{} in {el:.2?}", show(&ind)))
}

fn c3_zeta() -> Outcome {
    let g = FiniteGroup::cyclic(2);
    let q = preset_zeta_example(&g, &[eye(1), eye(1)], &z2_hom(), DEFAULT_SITES)?;
    let ind = qca_index(&q, &cfg())?;
    let want = IndexTriple { d: IndexValue::rational(2, 1), zeta: z2_hom(), ..IndexTriple::identity(&g) };
    ensure(ind == want, || show(&ind))?;
    Ok(show(&ind))
}

fn c4_cocycle() -> Outcome {
    let g = FiniteGroup::klein();
    let q = preset_cocycle_example(&g, &pauli_rep(), DEFAULT_SITES)?;
    let ind = qca_index(&q, &cfg())?;
    ensure(ind.d == IndexValue::rational(2, 1) && ind.zeta.is_zero(), || show(&ind))?;
    let rep = ind.nu.representative();
    let witness = cohomologous(&g, &rep, &Cocycle2::trivial(g.order))?;
    ensure(witness.is_none(), || "a coboundary witness was found for [ν]".into())?;
    // The cocycle of the Pauli representation itself carries the same class.
    let pauli = sqca::gsystem::projective_cocycle(&g, &pauli_rep())?;
    ensure(canonical_class(&g, &pauli)? == ind.nu, || "class differs from that of the Pauli representation".into())?;
    Ok(format!("{}, no witness for [ν] = e", show(&ind)))
}

fn c5_multiplicativity() -> Outcome {
    let c = cfg();
    let s2 = preset_shift(2, DEFAULT_SITES)?;
    // σ₂∘σ₂ has range 2; after coarse-graining by 2 it is nearest-neighbour again.
    let comp = qca_index(&coarse_grain(&compose_qca(&s2, &s2)?, 2)?, &c)?;
    ensure(comp == triv(IndexValue::rational(4, 1)), || format!("σ2∘σ2 = {}", show(&comp)))?;
    let mixed = qca_index(&stack_qca(&s2, &preset_shift_left(3, DEFAULT_SITES)?)?, &c)?;
    ensure(mixed == triv(IndexValue::rational(2, 3)), || format!("σ2 ⊗ σ3⁻¹ = {}", show(&mixed)))?;
    let m = preset_majorana_shift(DEFAULT_SITES)?;
    let maj = qca_index(&stack_qca(&m, &m)?, &c)?;
    ensure(maj == triv(IndexValue::rational(2, 1)), || format!("σMaj ⊗ σMaj = {}", show(&maj)))?;
    Ok(format!("{}, {}, {}", show(&comp), show(&mixed), show(&maj)))
}

fn c6_stacking() -> Outcome {
    let c = cfg();
    let groups = [FiniteGroup::cyclic(2), FiniteGroup::klein(), FiniteGroup::cyclic(3)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut radical, mut twisted) = (0, 0);
    for k in 0..50 {
        let g = &groups[k % groups.len()];
        let (s1, s2) = (random_system(g, &mut rng), random_system(g, &mut rng));
        let (i1, i2) = (gsystem_index(&s1, &c)?, gsystem_index(&s2, &c)?);
        let stacked = gsystem_index(&stack_gsystems(&s1, &s2)?, &c)?;
        let want = triple_mul(g, &i1, &i2)?;
        ensure(stacked == want, || format!("pair {k}: {} vs {}", show(&stacked), show(&want)))?;
        radical += [&i1, &i2].iter().filter(|t| t.d.radical).count();
        twisted += [&i1, &i2].iter().filter(|t| !t.nu.is_trivial() || !t.zeta.is_zero()).count();
    }
    ensure(radical > 0 && twisted > 0, || "samples did not cover radical and twisted systems".into())?;
    Ok(format!("50 pairs; {radical} radical and {twisted} twisted factors"))
}

fn c7_circuits() -> Outcome {
    let groups = [FiniteGroup::cyclic(2), FiniteGroup::klein(), FiniteGroup::cyclic(3)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..20 {
        let g = &groups[k % groups.len()];
        let w = random_circuit_window(g, 10, &mut rng)?;
        let layers = random_circuit(&w, &mut rng)?;
        let q = circuit_from_layers(w, &layers)?;
        let ind = qca_index(&q, &cfg())?;
        ensure(ind.is_identity(), || format!("circuit {k}: {}", show(&ind)))?;
    }
    Ok("20 circuits with index (1, 0, e)".into())
}

/// Cells whose predecessor is admissible too, so that C_n = R_{n−1}·L_n can be formed.
fn factorization_cells(q: &QcaRealization) -> Vec<usize> {
    let cells = q.admissible_cells();
    cells.iter().copied().filter(|&n| n >= 1 && cells.contains(&(n - 1))).collect()
}

fn c8_factorization() -> Outcome {
    let c = cfg();
    let mut count = 0;
    for (label, q) in presets() {
        let cells = factorization_cells(&q);
        ensure(!cells.is_empty(), || format!("{label}: no cell to check"))?;
        for n in cells {
            let f = verify_factorization(&q, n, &c)?;
            ensure(f.c_factorizes, || format!("{label} cell {n}: dim C = {} ≠ {}·{}", f.dim_c, f.dim_right_prev, f.dim_left))?;
            ensure(f.b_factorizes, || format!("{label} cell {n}: dim B = {} ≠ {}·{}", f.dim_b, f.dim_left, f.dim_right))?;
            ensure(f.ok(), || format!("{label} cell {n}: {f:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} cells over 7 presets"))
}

fn c9_well_defined() -> Outcome {
    let c = cfg();
    let mut detail = Vec::new();
    for (label, q) in presets() {
        let all: Vec<IndexTriple> =
            q.admissible_cells().into_iter().map(|n| qca_index_at(&q, n, &c).map(|r| r.index)).collect::<sqca::Result<_>>()?;
        ensure(all.windows(2).all(|w| w[0] == w[1]), || format!("{label}: {:?}", all.iter().map(show).collect::<Vec<_>>()))?;
        let coarse = qca_index(&coarse_grain(&q, 2)?, &c)?;
        ensure(coarse == all[0], || format!("{label}: {} after coarse-graining, {} before", show(&coarse), show(&all[0])))?;
        detail.push(format!("{label} {}", show(&all[0])));
    }
    Ok(detail.join(", "))
}

fn c10_group_structure() -> Outcome {
    let cf = cfg();
    let example_ds: Vec<IndexValue> = [preset_shift(2, DEFAULT_SITES)?, preset_shift(3, DEFAULT_SITES)?, preset_majorana_shift(DEFAULT_SITES)?]
        .iter()
        .map(|q| qca_index(q, &cf).map(|t| t.d))
        .collect::<sqca::Result<_>>()?;
    let zeta_ex = qca_index(&preset_zeta_example(&FiniteGroup::cyclic(2), &[eye(1), eye(1)], &z2_hom(), DEFAULT_SITES)?, &cf)?;
    let nu_ex = qca_index(&preset_cocycle_example(&FiniteGroup::klein(), &pauli_rep(), DEFAULT_SITES)?, &cf)?;
    let mut triples = 0;
    for (g, special) in [(FiniteGroup::trivial(), None), (FiniteGroup::cyclic(2), Some(zeta_ex)), (FiniteGroup::klein(), Some(nu_ex))] {
        // Indices of the trivial-group examples, viewed with G acting trivially.
        let mut samples: Vec<IndexTriple> = example_ds.iter().map(|&d| IndexTriple { d, ..IndexTriple::identity(&g) }).collect();
        samples.extend(special);
        for a in samples.clone() {
            samples.push(triple_inv(&g, &a)?);
        }
        for a in &samples {
            ensure(triple_mul(&g, a, &triple_inv(&g, a)?)?.is_identity(), || format!("{}·{}⁻¹ ≠ 1", show(a), show(a)))?;
            for b in &samples {
                ensure(triple_mul(&g, a, b)? == triple_mul(&g, b, a)?, || format!("{} and {} do not commute", show(a), show(b)))?;
                for x in &samples {
                    let left = triple_mul(&g, &triple_mul(&g, a, b)?, x)?;
                    let right = triple_mul(&g, a, &triple_mul(&g, b, x)?)?;
                    ensure(left == right, || format!("associativity fails on {}, {}, {}", show(a), show(b), show(x)))?;
                    triples += 1;
                }
            }
        }
        for z in enumerate_z2_homs(&g)? {
            let mu: Vec<C64> = z.values.iter().map(|&v| if v == 1 { c(0.0, 1.0) } else { ONE }).collect();
            let (nu, d) = (twist_class(&z, &z), coboundary(&g, &mu));
            let dev = nu.phases.iter().flatten().zip(d.phases.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            ensure(dev < 1e-12, || format!("ν(ζ,ζ) ≠ δ(i^ζ) for ζ = {:?}: {dev:.1e}", z.values))?;
        }
    }
    Ok(format!("{triples} ordered triples over trivial, Z2, Z2xZ2"))
}

/// A unital graded *-subalgebra: of site subsets, of a two-block decomposition, or of a
/// degenerate even Hermitian, conjugated by a random even unitary.
fn random_subalgebra(kind: usize, rng: &mut ChaCha8Rng) -> sqca::Result<GradedSubalgebra> {
    let (gens, amb) = match kind {
        0 => {
            let sites = rng.gen_range(2..=4);
            let gradings: Vec<Vec<i8>> = (0..sites).map(|_| if rng.gen_bool(0.5) { vec![1, -1] } else { vec![1, 1] }).collect();
            let chain = ChainEmbedding::new(gradings.clone());
            let amb = chain.ambient();
            let mut gens = vec![eye(amb.dim())];
            let subset: Vec<usize> = (0..sites).filter(|_| rng.gen_bool(0.5)).collect();
            for s in subset {
                for x in [pauli_x(), pauli_y(), pauli_z()] {
                    gens.push(chain.embed(s, &x)?);
                }
            }
            (gens, amb)
        }
        1 => {
            let n = rng.gen_range(4..=16);
            let amb = Ambient::new((0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect());
            let p = CMat::from_fn(n, n, |i, j| if i == j && i % 3 == 0 { ONE } else { ZERO });
            let q = eye(n) - &p;
            let (x, y) = (random_hermitian(rng, n), random_hermitian(rng, n));
            let mut gens = vec![eye(n)];
            for (m, h) in [(&p, x), (&q, y)] {
                let block = m * h * m;
                let even = (&block + amb.theta(&block)) * c(0.5, 0.0);
                gens.push(&block - &even);
                gens.push(even);
            }
            (gens, amb)
        }
        _ => {
            let n = rng.gen_range(2..=16);
            let amb = Ambient::new((0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect());
            let h = CMat::from_fn(n, n, |i, j| if i == j { c(rng.gen_range(0..3) as f64, 0.0) } else { ZERO });
            (vec![eye(n), h], amb)
        }
    };
    let u = random_even_unitary(&amb, rng);
    let gens: Vec<CMat> = gens.iter().map(|x| mm_all(&[&u, x, &dagger(&u)])).collect();
    close_algebra(&gens, &amb)
}

fn c11_bicommutant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut dims = Vec::new();
    for k in 0..20 {
        let s = random_subalgebra(k % 3, &mut rng)?;
        ensure(s.ambient.dim() <= 16, || format!("ambient {} too large", s.ambient.dim()))?;
        let ss = double_supercommutant(&s);
        ensure(ss.dim() == s.dim(), || format!("sample {k}: dim S'' = {} but dim S = {}", ss.dim(), s.dim()))?;
        for x in &s.basis {
            worst = worst.max(ss.defect(x));
        }
        for y in &ss.basis {
            worst = worst.max(s.defect(y));
        }
        dims.push(format!("{}/{}", s.dim(), s.ambient.dim()));
    }
    ensure(worst < 1e-9, || format!("HS defect {worst:.1e}"))?;
    Ok(format!("20 algebras (dim/ambient {}), HS defect {worst:.1e}", dims.join(" ")))
}

fn c12_condexp() -> Outcome {
    let configs: [(&str, Vec<Vec<i8>>); 3] = [
        ("ungraded", vec![vec![1, 1]; 3]),
        ("graded", vec![vec![1, -1]; 3]),
        ("mixed", vec![vec![1, -1], vec![1, 1], vec![1, 1, -1]]),
    ];
    let regions: Vec<Vec<usize>> = (0u32..8).map(|m| (0..3).filter(|&s| m >> s & 1 == 1).collect()).collect();
    let mut detail = Vec::new();
    for (label, gradings) in configs {
        let frame = TracialFrame::new(ChainEmbedding::new(gradings));
        let n = frame.ambient.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst = [0.0f64; 3];
        for _ in 0..100 {
            let x = random_complex(&mut rng, n, n);
            let xn = op_norm(&x);
            let xr = &regions[rng.gen_range(0..regions.len())];
            let yr = &regions[rng.gen_range(0..regions.len())];
            let ex = frame.cond_expect(&x, xr)?;
            let (b1, b2) = (random_region_element(&frame, xr, &mut rng)?, random_region_element(&frame, xr, &mut rng)?);
            let scale = xn * op_norm(&b1) * op_norm(&b2);
            worst[0] = worst[0].max((ntrace(&(&b1 * &x * &b2)) - ntrace(&(&b1 * &ex * &b2))).norm() / scale);
            worst[1] = worst[1].max(frob(&(frame.cond_expect(&frame.ambient.theta(&x), xr)? - frame.ambient.theta(&ex))) / xn);
            let meet: Vec<usize> = xr.iter().copied().filter(|s| yr.contains(s)).collect();
            let exy = frame.cond_expect(&frame.cond_expect(&x, yr)?, xr)?;
            let eyx = frame.cond_expect(&ex, yr)?;
            worst[2] = worst[2].max(frob(&(&exy - &eyx)).max(frob(&(&exy - frame.cond_expect(&x, &meet)?))) / xn);
        }
        ensure(worst.iter().all(|&w| w < 1e-10), || format!("{label}: {worst:?}"))?;
        detail.push(format!("{label} {:.0e}", worst.iter().fold(0.0f64, |a, &b| a.max(b))));
    }
    Ok(format!("100 inputs each; {}", detail.join(", ")))
}

fn c13_cohomology() -> Outcome {
    let klein = FiniteGroup::klein();
    let n = h2_enumerate(&klein, 2)?.len();
    ensure(n == 2, || format!("|H²(Z2xZ2, Z2)| = {n}"))?;
    for k in [2, 3, 4] {
        let n = h2_enumerate(&FiniteGroup::cyclic(k), k)?.len();
        ensure(n == 1, || format!("|H²(Z{k}, Z{k})| = {n}"))?;
    }
    let mut pairs = 0;
    for (g, m) in [(klein, 2), (FiniteGroup::cyclic(4), 4), (FiniteGroup::dihedral(4), 2), (FiniteGroup::quaternion(), 2)] {
        let reps: Vec<Cocycle2> = h2_enumerate(&g, m)?.iter().map(|c| c.representative()).collect();
        for a in &reps {
            for b in &reps {
                let same = canonical_class(&g, a)? == canonical_class(&g, b)?;
                ensure(same == cohomologous(&g, a, b)?.is_some(), || "canonical_class and the witness search disagree".into())?;
                pairs += 1;
            }
        }
    }
    Ok(format!("class counts 2, 1, 1, 1; {pairs} representative pairs agree"))
}

fn c14_near_inclusion() -> Outcome {
    let c = cfg();
    let mut detail = Vec::new();
    for (k, eps) in [1e-3, 1e-2].into_iter().enumerate() {
        let seed = 1400 + k as u64;
        let b = instances::chain_factor(1, 3);
        let w = instances::perturbation(&b.ambient, eps, seed);
        let rep = near_inclusion_report(&instances::rotated(&supercommutant(&b), &w), &b, &Config { seed, ..c.clone() })?;
        for tag in ["supercommutator-4eps", "conditional-expectation-3eps"] {
            let check = rep.bound_checks.iter().find(|x| x.tag == tag).ok_or_else(|| Fail(format!("no {tag} check")))?;
            ensure(check.status == CheckStatus::Pass, || format!("ε = {eps}: {tag} observed {:.3}", check.observed))?;
        }

        let a = instances::chain_factor(1, 3);
        let w = instances::perturbation(&a.ambient, eps, seed);
        let pairs: Vec<(CMat, CMat)> = a.basis.iter().map(|x| (x.clone(), mm_all(&[&dagger(&w), x, &w]))).collect();
        let imp = inner_implementer(&[pairs], &a.ambient, &[], &c)?;
        let bound = implementer_bound(imp.epsilon) + 1e-6;
        ensure(imp.distance <= bound && imp.residual < 1e-9, || format!("ε = {eps}: ‖u − I‖ = {:.3e} > {bound:.3e}", imp.distance))?;

        let bb = instances::chain_factor(2, 3);
        let w = instances::perturbation(&bb.ambient, eps, seed);
        let aa = instances::rotated(&instances::chain_factor(1, 3), &w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes: Vec<CMat> = (0..4).map(|_| bb.project(&aa.random_element(&mut rng))).collect();
        let thm = verify_near_inclusion_theorem(&aa, &bb, &probes, &c)?;
        ensure(thm.precondition && thm.passed(), || format!("ε = {eps}: theorem checks {:?}", thm.bound_checks))?;
        ensure(thm.distance <= 12.0 * thm.epsilon, || format!("ε = {eps}: ‖U − I‖ = {:.2e} > 12ε", thm.distance))?;
        ensure(thm.inclusion_defect < 1e-8, || format!("ε = {eps}: U A U* ⊄ B, defect {:.1e}", thm.inclusion_defect))?;
        detail.push(format!("ε = {eps:.0e}: ‖u − I‖ {:.1e}, ‖U − I‖/ε {:.2}", imp.distance, thm.distance / thm.epsilon));
    }
    Ok(detail.join("; "))
}

fn c15_first_cohomology() -> Outcome {
    let c = cfg();
    let mut count = 0;
    for n in [2usize, 3] {
        let g = FiniteGroup::cyclic(n);
        let reg = regular_system(&g);
        // Characters of Z_n: k ↦ exp(2πi jk/n).
        for j in 0..n {
            let mu: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * (j * k) as f64 / n as f64)).collect();
            let got = first_cohomology_index(&reg, &regular_character_unitary(&mu), &c)?.on_group();
            let dev = got.iter().zip(&mu).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            ensure(dev < 1e-9, || format!("Z{n}, character {j}: deviation {dev:.1e}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} characters recovered"))
}

fn c16_decoupling() -> Outcome {
    let c = cfg();
    let groups = [FiniteGroup::cyclic(2), FiniteGroup::klein(), FiniteGroup::cyclic(3)];
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut worst: f64 = 0.0;
    for (k, g) in groups.iter().enumerate() {
        let w = random_circuit_window(g, 10, &mut rng)?;
        let layers = random_circuit(&w, &mut rng)?;
        let q = circuit_from_layers(w, &layers)?;
        let dec = decouple_trivial(&q, false, &c)?;
        ensure(!dec.cells.is_empty(), || format!("circuit {k}: no cell was decoupled"))?;
        let rebuilt = circuit_from_layers(dec.realization.window.clone(), &dec.layers)?;
        for &n in &dec.cells {
            for s in [2 * n, 2 * n + 1] {
                let (Some(a), Some(b)) = (&dec.realization.images[s], &rebuilt.images[s]) else {
                    return Err(Fail(format!("circuit {k}: site {s} has no image")));
                };
                for (x, y) in a.iter().zip(b) {
                    worst = worst.max(x.distance(y, &dec.realization.window)?);
                }
            }
        }
    }
    ensure(worst < 1e-8, || format!("round-trip residual {worst:.1e}"))?;
    match decouple_trivial(&preset_shift(2, DEFAULT_SITES)?, false, &c) {
        Err(sqca::Error::IndexNotTrivial(_)) => {}
        Err(e) => return Err(Fail(format!("shift: expected IndexNotTrivial, got {}", e.kind()))),
        Ok(_) => return Err(Fail("shift was decoupled".into())),
    }
    Ok(format!("3 circuits, residual {worst:.1e}; shift rejected with IndexNotTrivial"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("shift index", c1_shift),
        ("Majorana index", c2_majorana),
        ("ζ example", c3_zeta),
        ("ν example", c4_cocycle),
        ("multiplicativity", c5_multiplicativity),
        ("stacking law for G-systems", c6_stacking),
        ("circuit triviality", c7_circuits),
        ("overlap factorization", c8_factorization),
        ("index well-definedness", c9_well_defined),
        ("group structure", c10_group_structure),
        ("bicommutant", c11_bicommutant),
        ("conditional expectations", c12_condexp),
        ("cohomology oracle", c13_cohomology),
        ("near-inclusion constants", c14_near_inclusion),
        ("first cohomology realization", c15_first_cohomology),
        ("decoupling round trip", c16_decoupling),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(Fail(format!("panicked: {}", msg.unwrap_or_default())))
        });
        let el = t0.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{el:.1?}]", k + 1),
            Err(Fail(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{el:.1?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
