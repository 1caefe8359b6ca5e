//! Seeded invariant suites behind `sqca verify`.  A computation error inside a check is
//! recorded as a failed check so that every suite reports in full.

use crate::{CliError, CliResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sqca::condexp::{random_region_element, TracialFrame};
use sqca::group::{
    canonical_class_cfg, coboundary, cohomologous_cfg, enumerate_z2_homs_capped, group_from_table, h2_enumerate_cfg,
    twist_class, Cocycle2, FiniteGroup,
};
use sqca::gsystem::samples::random_system;
use sqca::gsystem::{gsystem_index, stack_gsystems, triple_inv, triple_mul, IndexTriple, IndexValue};
use sqca::linalg::*;
use sqca::nearincl::{
    cond_expect_supercommutant, implementer_bound, inner_implementer, instances, near_inclusion_report,
    verify_near_inclusion_theorem,
};
use sqca::qca::{
    coarse_grain, compose_qca, preset_cocycle_example, preset_majorana_shift, preset_majorana_shift_left, preset_shift,
    preset_zeta_example, qca_index, qca_index_at, stack_qca, verify_factorization, QcaRealization, DEFAULT_SITES,
};
use sqca::superalg::{supercommutant, ChainEmbedding};
use sqca::Config;

pub const SUITES: [&str; 6] = ["group-laws", "stacking", "overlap", "condexp", "nearincl", "all"];

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn to_json(&self) -> Value {
        json!({"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail})
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Recorder { suite, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, detail: detail.into() });
    }

    /// Record the outcome of a fallible check; errors count as failures.
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> sqca::Result<(bool, String)>) {
        match f() {
            Ok((ok, detail)) => self.check(name, ok, detail),
            Err(e) => self.check(name, false, format!("{}: {e}", e.kind())),
        }
    }
}

pub fn run(suite: &str, group: Option<&FiniteGroup>, cfg: &Config) -> CliResult<Vec<Check>> {
    let out = match suite {
        "group-laws" => group_laws(group, cfg),
        "stacking" => stacking(group, cfg),
        "overlap" => overlap(cfg),
        "condexp" => condexp(cfg),
        "nearincl" => nearincl(cfg),
        "all" => [group_laws(group, cfg), stacking(group, cfg), overlap(cfg), condexp(cfg), nearincl(cfg)].concat(),
        other => {
            return Err(CliError::input("UnknownSuite", format!("unknown suite '{other}'; expected one of {}", SUITES.join(", "))))
        }
    };
    Ok(out)
}

fn default_groups() -> Vec<FiniteGroup> {
    ["trivial", "Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8"].iter().map(|n| FiniteGroup::preset(n).expect("preset")).collect()
}

fn name(g: &FiniteGroup) -> String {
    g.name.clone().unwrap_or_else(|| format!("order-{}", g.order))
}

fn max_dist(a: &Cocycle2, b: &Cocycle2) -> f64 {
    a.phases.iter().flatten().zip(b.phases.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Group axioms, Z₂-homomorphism counts, cohomology consistency and the index group laws.
fn group_laws(group: Option<&FiniteGroup>, cfg: &Config) -> Vec<Check> {
    let mut r = Recorder::new("group-laws");
    let groups = group.map(|g| vec![g.clone()]).unwrap_or_else(default_groups);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for g in &groups {
        let gn = name(g);
        r.run(format!("{gn}: table is a group"), || Ok((group_from_table(g.table.clone()).is_ok(), String::new())));
        // Brute force over all maps G → Z₂.
        let brute = (0u32..1 << g.order)
            .filter(|mask| {
                let f = |x: usize| (mask >> x) & 1;
                g.elements().all(|a| g.elements().all(|b| f(g.mul(a, b)) == f(a) ^ f(b)))
            })
            .count();
        r.run(format!("{gn}: |Hom(G, Z2)| matches brute force"), || {
            let homs = enumerate_z2_homs_capped(g, cfg)?;
            Ok((homs.len() == brute, format!("{} vs {brute}", homs.len())))
        });
        r.run(format!("{gn}: ν(ζ,ζ) = δμ with μ = i^ζ"), || {
            let mut worst: f64 = 0.0;
            for z in enumerate_z2_homs_capped(g, cfg)? {
                let mu: Vec<C64> = z.values.iter().map(|&v| if v == 1 { c(0.0, 1.0) } else { ONE }).collect();
                worst = worst.max(max_dist(&twist_class(&z, &z), &coboundary(g, &mu)));
            }
            Ok((worst < 1e-12, format!("max deviation {worst:.1e}")))
        });
        if g.order > cfg.h2_group_cap {
            continue;
        }
        let m = g.order.clamp(2, cfg.h2_modulus_cap);
        r.run(format!("{gn}: canonical classes agree with the witness search (m = {m})"), || {
            let classes = h2_enumerate_cfg(g, m, cfg)?;
            let reps: Vec<Cocycle2> = classes.iter().map(|c| c.representative()).collect();
            let mut bad = 0;
            for (i, a) in reps.iter().enumerate() {
                for (j, b) in reps.iter().enumerate() {
                    let same = canonical_class_cfg(g, a, cfg)? == canonical_class_cfg(g, b, cfg)?;
                    let witness = cohomologous_cfg(g, a, b, cfg)?.is_some();
                    if same != witness || same != (i == j) {
                        bad += 1;
                    }
                }
                let mu: Vec<C64> = g.elements().map(|_| C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
                let moved = a.mul(&coboundary(g, &mu));
                if canonical_class_cfg(g, &moved, cfg)? != classes[i] || cohomologous_cfg(g, a, &moved, cfg)?.is_none() {
                    bad += 1;
                }
            }
            Ok((bad == 0, format!("{} classes, {bad} disagreements", classes.len())))
        });
        r.run(format!("{gn}: index group laws on sample triples"), || {
            let homs = enumerate_z2_homs_capped(g, cfg)?;
            let classes = h2_enumerate_cfg(g, m, cfg)?;
            let ds = [IndexValue::one(), IndexValue::rational(2, 3), IndexValue::radical(1, 1)];
            let samples: Vec<IndexTriple> = (0..4)
                .map(|k| IndexTriple {
                    d: ds[k % ds.len()],
                    zeta: homs[(k * 7 + 1) % homs.len()].clone(),
                    nu: classes[(k * 5 + 2) % classes.len()].clone(),
                })
                .collect();
            let mut bad = 0;
            for a in &samples {
                if !triple_mul(g, a, &triple_inv(g, a)?)?.is_identity() {
                    bad += 1;
                }
                for b in &samples {
                    if triple_mul(g, a, b)? != triple_mul(g, b, a)? {
                        bad += 1;
                    }
                    for c3 in &samples {
                        if triple_mul(g, &triple_mul(g, a, b)?, c3)? != triple_mul(g, a, &triple_mul(g, b, c3)?)? {
                            bad += 1;
                        }
                    }
                }
            }
            Ok((bad == 0, format!("{} samples, {bad} violations", samples.len())))
        });
    }
    r.checks
}

/// Stacking law for random G-system pairs and multiplicativity on QCA presets.
fn stacking(group: Option<&FiniteGroup>, cfg: &Config) -> Vec<Check> {
    let mut r = Recorder::new("stacking");
    let groups = group.map(|g| vec![g.clone()]).unwrap_or_else(|| {
        ["Z2", "Z2xZ2", "Z3"].iter().map(|n| FiniteGroup::preset(n).expect("preset")).collect()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for g in &groups {
        for trial in 0..10 {
            let (s1, s2) = (random_system(g, &mut rng), random_system(g, &mut rng));
            r.run(format!("{}: random pair {trial}", name(g)), || {
                let (i1, i2) = (gsystem_index(&s1, cfg)?, gsystem_index(&s2, cfg)?);
                let stacked = gsystem_index(&stack_gsystems(&s1, &s2)?, cfg)?;
                let want = triple_mul(g, &i1, &i2)?;
                Ok((stacked == want, format!("{} ⊗ {} = {}", crate::json::triple_text(&i1), crate::json::triple_text(&i2), crate::json::triple_text(&stacked))))
            });
        }
    }
    let qca_case = |r: &mut Recorder, label: &str, want: IndexTriple, build: &dyn Fn() -> sqca::Result<QcaRealization>| {
        r.run(label, || {
            let got = qca_index(&build()?, cfg)?;
            Ok((got == want, crate::json::triple_text(&got)))
        });
    };
    let triv = FiniteGroup::trivial();
    let t = |d: IndexValue| IndexTriple { d, ..IndexTriple::identity(&triv) };
    qca_case(&mut r, "σ2 ∘ σ2 = (4, 0, e)", t(IndexValue::rational(4, 1)), &|| {
        let s = preset_shift(2, DEFAULT_SITES)?;
        coarse_grain(&compose_qca(&s, &s)?, 2)
    });
    qca_case(&mut r, "σMaj ⊗ σMaj = (2, 0, e)", t(IndexValue::rational(2, 1)), &|| {
        let m = preset_majorana_shift(DEFAULT_SITES)?;
        stack_qca(&m, &m)
    });
    qca_case(&mut r, "σMaj ⊗ σMaj⁻¹ = (1, 0, e)", t(IndexValue::one()), &|| {
        stack_qca(&preset_majorana_shift(DEFAULT_SITES)?, &preset_majorana_shift_left(DEFAULT_SITES)?)
    });
    r.checks
}

fn presets() -> Vec<(&'static str, sqca::Result<QcaRealization>)> {
    let z2 = FiniteGroup::cyclic(2);
    let klein = FiniteGroup::klein();
    let zeta = sqca::group::Z2Hom { values: vec![0, 1] };
    vec![
        ("shift-2", preset_shift(2, DEFAULT_SITES)),
        ("shift-3", preset_shift(3, DEFAULT_SITES)),
        ("majorana", preset_majorana_shift(DEFAULT_SITES)),
        ("zeta-Z2", preset_zeta_example(&z2, &[eye(1), eye(1)], &zeta, DEFAULT_SITES)),
        ("cocycle-Z2xZ2", preset_cocycle_example(&klein, &sqca::gsystem::samples::pauli_rep(), DEFAULT_SITES)),
    ]
}

/// Overlap factorization, position independence and coarse-graining invariance on presets.
fn overlap(cfg: &Config) -> Vec<Check> {
    let mut r = Recorder::new("overlap");
    for (label, q) in presets() {
        let q = match q {
            Ok(q) => q,
            Err(e) => {
                r.check(format!("{label}: construction"), false, e.to_string());
                continue;
            }
        };
        // C_n factorizes through R_{n−1}, so cell n − 1 must be admissible as well.
        let cells = q.admissible_cells();
        for &n in cells.iter().filter(|&&n| n >= 1 && cells.contains(&(n - 1))) {
            r.run(format!("{label}: factorization at cell {n}"), || {
                let f = verify_factorization(&q, n, cfg)?;
                Ok((f.ok(), format!("dim C = {}, dim B = {}, L = {}, R = {}", f.dim_c, f.dim_b, f.dim_left, f.dim_right)))
            });
        }
        r.run(format!("{label}: same index at every admissible cell"), || {
            let all = q.admissible_cells().into_iter().map(|n| qca_index_at(&q, n, cfg).map(|x| x.index)).collect::<sqca::Result<Vec<_>>>()?;
            Ok((all.windows(2).all(|w| w[0] == w[1]), crate::json::triple_text(&all[0])))
        });
        r.run(format!("{label}: invariant under coarse-graining by 2"), || {
            let a = qca_index(&q, cfg)?;
            let b = qca_index(&coarse_grain(&q, 2)?, cfg)?;
            Ok((a == b, format!("{} vs {}", crate::json::triple_text(&a), crate::json::triple_text(&b))))
        });
    }
    r.checks
}

/// Araki properties and the module properties of E_X, plus the supercommutant expectation.
fn condexp(cfg: &Config) -> Vec<Check> {
    let mut r = Recorder::new("condexp");
    let configs: [(&str, Vec<Vec<i8>>); 3] = [
        ("ungraded", vec![vec![1, 1]; 3]),
        ("graded", vec![vec![1, -1]; 3]),
        ("mixed", vec![vec![1, -1], vec![1, 1], vec![1, 1, -1]]),
    ];
    let regions: Vec<Vec<usize>> = (0u32..8).map(|m| (0..3).filter(|&s| m >> s & 1 == 1).collect()).collect();
    for (label, gradings) in configs {
        let frame = TracialFrame::new(ChainEmbedding::new(gradings));
        let n = frame.ambient.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        r.run(format!("{label}: Araki (i)-(iii) and module properties on 100 inputs"), || {
            let mut worst = [0.0f64; 5];
            for _ in 0..100 {
                let x = random_complex(&mut rng, n, n);
                let xn = op_norm(&x);
                let x_reg = &regions[rng.gen_range(0..regions.len())];
                let y_reg = &regions[rng.gen_range(0..regions.len())];
                let ex = frame.cond_expect(&x, x_reg)?;
                let (b1, b2) = (random_region_element(&frame, x_reg, &mut rng)?, random_region_element(&frame, x_reg, &mut rng)?);
                let scale = xn * op_norm(&b1) * op_norm(&b2);
                worst[0] = worst[0].max((ntrace(&(&b1 * &x * &b2)) - ntrace(&(&b1 * &ex * &b2))).norm() / scale);
                let theta = frame.ambient.theta(&x);
                worst[1] = worst[1].max(frob(&(frame.cond_expect(&theta, x_reg)? - frame.ambient.theta(&ex))) / xn);
                let both: Vec<usize> = x_reg.iter().copied().filter(|s| y_reg.contains(s)).collect();
                let exy = frame.cond_expect(&frame.cond_expect(&x, y_reg)?, x_reg)?;
                let eyx = frame.cond_expect(&ex, y_reg)?;
                let emeet = frame.cond_expect(&x, &both)?;
                worst[2] = worst[2].max(frob(&(&exy - &eyx)).max(frob(&(&exy - &emeet))) / xn);
                worst[3] = worst[3].max(frob(&(frame.cond_expect(&(&b1 * &x * &b2), x_reg)? - &b1 * &ex * &b2)) / scale);
                worst[4] = worst[4].max(op_norm(&ex) - xn);
            }
            let ok = worst[..4].iter().all(|&w| w < 1e-10) && worst[4] < 1e-10;
            Ok((ok, format!("(i) {:.1e}, (ii) {:.1e}, (iii) {:.1e}, bimodule {:.1e}, contraction excess {:.1e}", worst[0], worst[1], worst[2], worst[3], worst[4])))
        });
    }
    r.run("supercommutant expectation: projection, grading, bimodule, contraction", || {
        let a = instances::chain_factor(1, 3);
        let sharp = supercommutant(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = random_complex(&mut rng, 8, 8);
            let ex = cond_expect_supercommutant(&x, &a, cfg)?;
            worst = worst.max(sharp.defect(&ex));
            worst = worst.max(frob(&(cond_expect_supercommutant(&ex, &a, cfg)? - &ex)));
            let odd = (&x - a.ambient.theta(&x)) * c(0.5, 0.0);
            let eo = cond_expect_supercommutant(&odd, &a, cfg)?;
            worst = worst.max(frob(&(&eo + a.ambient.theta(&eo))));
            let (s1, s2) = (sharp.random_element(&mut rng), sharp.random_element(&mut rng));
            worst = worst.max(frob(&(cond_expect_supercommutant(&(&s1 * &x * &s2), &a, cfg)? - &s1 * &ex * &s2)) / (op_norm(&s1) * op_norm(&s2)));
            worst = worst.max(op_norm(&ex) - op_norm(&x));
        }
        Ok((worst < 1e-9, format!("max defect {worst:.1e}")))
    });
    r.checks
}

/// Near-inclusion constants on constructed perturbation instances.
fn nearincl(cfg: &Config) -> Vec<Check> {
    let mut r = Recorder::new("nearincl");
    for (k, eps) in [1e-3, 1e-2].into_iter().enumerate() {
        let seed = cfg.seed.wrapping_add(100 + k as u64);
        r.run(format!("δ = {eps:.0e}: supercommutator 4ε and expectation 3ε"), || {
            let b = instances::chain_factor(1, 3);
            let sharp = supercommutant(&b);
            let w = instances::perturbation(&b.ambient, eps, seed);
            let rep = near_inclusion_report(&instances::rotated(&sharp, &w), &b, &Config { seed, ..cfg.clone() })?;
            let detail = rep.bound_checks.iter().map(|c| format!("{} {:.3} ({:?})", c.tag, c.observed, c.status)).collect::<Vec<_>>().join("; ");
            Ok((rep.passed(), format!("ε♯ = {:.2e}; {detail}", rep.epsilon_sharp)))
        });
        r.run(format!("δ = {eps:.0e}: implementer distance bound"), || {
            let a = instances::chain_factor(1, 3);
            let w = instances::perturbation(&a.ambient, eps, seed);
            let pairs: Vec<(CMat, CMat)> = a.basis.iter().map(|x| (x.clone(), mm_all(&[&dagger(&w), x, &w]))).collect();
            let imp = inner_implementer(&[pairs], &a.ambient, &[], cfg)?;
            let bound = implementer_bound(imp.epsilon) + 1e-6;
            Ok((imp.distance <= bound && imp.residual < 1e-9, format!("‖u − I‖ = {:.3e} ≤ {bound:.3e}", imp.distance)))
        });
        r.run(format!("δ = {eps:.0e}: near-inclusion theorem 12ε and 46δ"), || {
            let b = instances::chain_factor(2, 3);
            let w = instances::perturbation(&b.ambient, eps, seed);
            let a = instances::rotated(&instances::chain_factor(1, 3), &w);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let probes: Vec<CMat> = (0..4).map(|_| b.project(&a.random_element(&mut rng))).collect();
            let rep = verify_near_inclusion_theorem(&a, &b, &probes, cfg)?;
            let ok = rep.precondition && rep.passed() && rep.distance <= 12.0 * rep.epsilon;
            Ok((ok, format!("ε = {:.2e}, ‖U − I‖ = {:.2e}, defect {:.1e}", rep.epsilon, rep.distance, rep.inclusion_defect)))
        });
    }
    r.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_input_error() {
        let e = run("numerology", None, &Config::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn group_laws_pass_on_klein() {
        let checks = run("group-laws", Some(&FiniteGroup::klein()), &Config::default()).unwrap();
        assert!(checks.len() >= 5);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn condexp_and_nearincl_pass() {
        for suite in ["condexp", "nearincl"] {
            let checks = run(suite, None, &Config::default()).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        }
    }
}
