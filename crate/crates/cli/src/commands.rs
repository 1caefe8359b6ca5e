//! The subcommands, each producing one JSON document.

use crate::json::{self, triple};
use crate::problem::{self, group_spec, layers, window_spec, BlockSpec, Problem, ProblemFile, RealizationSpec};
use crate::suites;
use crate::{CliError, CliResult};
use serde_json::{json, Value};
use sqca::group::{cocycle_from_exponents, h2_enumerate_cfg, FiniteGroup};
use sqca::qca::{circuit_from_layers, decouple_trivial, qca_index_at, QcaRealization};
use sqca::Config;

/// Index at the central admissible cell with the data it was read from; with `all_cells`
/// the index at every admissible cell as well.
pub fn index(p: &Problem, cfg: &Config, all_cells: bool) -> CliResult<Value> {
    let q = &p.qca;
    let cells = q.admissible_cells();
    if cells.is_empty() {
        return Err(sqca::Error::WindowTooSmall(format!("no admissible cell in a window of {} sites", q.window.len())).into());
    }
    let centre = cells[cells.len() / 2];
    let r = qca_index_at(q, centre, cfg)?;
    let mut diagnostics = json!({
        "cell": r.cell,
        "admissible_cells": cells,
        "sites": q.window.len(),
        "block_size": q.block_size,
        "site_dims": q.window.sites.iter().map(|s| s.dim()).collect::<Vec<_>>(),
        "dim_left": r.dim_left,
        "dim_right": r.dim_right,
        "left_shape": r.left_shape,
        "right_shape": r.right_shape,
        "right_route": r.right_route.as_ref().map(triple),
        "left_route": r.left_route.as_ref().map(triple),
        "cross_checked": r.cross_checked,
        "overlap_cocycle": r.overlap_cocycle.as_ref().map(|phases| {
            Value::Array(phases.iter().map(|row| Value::Array(row.iter().map(|&z| json::complex(z)).collect())).collect())
        }),
    });
    if all_cells {
        let mut per_cell = Vec::new();
        for &n in &cells {
            let t = if n == centre { r.index.clone() } else { qca_index_at(q, n, cfg)?.index };
            per_cell.push(json!({"cell": n, "index": triple(&t)}));
        }
        diagnostics["cells"] = Value::Array(per_cell);
    }
    let t = &r.index;
    Ok(json!({
        "group": json::group(&p.group),
        "d": json::index_value(&t.d),
        "zeta": json::zeta(&t.zeta),
        "nu": json::class(&t.nu),
        "text": json::triple_text(t),
        "diagnostics": diagnostics,
        "seed": cfg.seed,
    }))
}

/// Canonical classes carried by Z_m-valued cocycles, with a representative of each.
pub fn cohomology(g: &FiniteGroup, m: usize, cfg: &Config) -> CliResult<Value> {
    let classes = h2_enumerate_cfg(g, m, cfg)?;
    let rows: Vec<Value> = classes
        .iter()
        .map(|cl| {
            json!({
                "class": json::class(cl),
                "representative": json::cocycle(&cocycle_from_exponents(&cl.canonical, cl.modulus)),
            })
        })
        .collect();
    Ok(json!({"group": json::group(g), "order": g.order, "m": m, "count": classes.len(), "classes": rows}))
}

/// Depth-2 circuit for a QCA of trivial index, written as a problem file whose realization
/// is the circuit (so it can be fed back to `index`).
pub fn decouple(p: &Problem, cfg: &Config, auto_stack: bool) -> CliResult<Value> {
    let dec = decouple_trivial(&p.qca, auto_stack || p.options.auto_stack, cfg)?;
    let spec: Vec<Vec<BlockSpec>> = dec
        .layers
        .iter()
        .map(|l| l.blocks.iter().map(|(s, n, u)| BlockSpec { start: *s, len: *n, unitary: json::matrix(u) }).collect())
        .collect();
    let round_trip = rebuilt_residual(&dec.realization, &dec.cells, &spec)?;
    let file = ProblemFile {
        version: problem::VERSION,
        group: group_spec(&p.group),
        window: Some(window_spec(&dec.realization.window)),
        realization: RealizationSpec::BlockMaps { layers: spec },
        options: Default::default(),
        diagnostics: Some(json!({
            "auxiliary": dec.auxiliary,
            "cells": dec.cells,
            "layer_blocks": dec.layers.iter().map(|l| l.blocks.len()).collect::<Vec<_>>(),
            "max_residual": dec.max_residual,
            "written_residual": round_trip,
            "seed": cfg.seed,
        })),
    };
    Ok(serde_json::to_value(file).expect("problem files serialize"))
}

/// Largest distance between α and the circuit rebuilt from the serialized blocks, over the
/// generator images at the cells the decoupling covers.
fn rebuilt_residual(q: &QcaRealization, cells: &[usize], spec: &[Vec<BlockSpec>]) -> CliResult<f64> {
    let rebuilt = circuit_from_layers(q.window.clone(), &layers(spec)?)?;
    let mut worst: f64 = 0.0;
    for &n in cells {
        for s in [2 * n, 2 * n + 1] {
            let (Some(a), Some(b)) = (&q.images[s], &rebuilt.images[s]) else { continue };
            for (x, y) in a.iter().zip(b) {
                worst = worst.max(x.distance(y, &q.window)?);
            }
        }
    }
    Ok(worst)
}

pub fn verify(suite: &str, group: Option<&FiniteGroup>, cfg: &Config) -> CliResult<Value> {
    let checks = suites::run(suite, group, cfg)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let report = json!({
        "suite": suite,
        "seed": cfg.seed,
        "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        "total": checks.len(),
        "failed": failed,
        "passed": failed == 0,
    });
    if failed > 0 {
        return Err(CliError::Failed(report));
    }
    Ok(report)
}

/// Example problem files, by file name.
pub fn examples() -> Vec<(&'static str, Value)> {
    let preset = |group: &str, payload: Value| json!({"version": 1, "group": group, "realization": {"type": "preset", "payload": payload}});
    let mut coarse = preset("trivial", json!({"name": "shift", "d": 2}));
    coarse["options"] = json!({"coarse_grain": 2});
    vec![
        ("shift-d2.json", preset("trivial", json!({"name": "shift", "d": 2}))),
        ("shift-d3.json", preset("trivial", json!({"name": "shift", "d": 3}))),
        ("shift-d2-coarse.json", coarse),
        ("majorana.json", preset("trivial", json!({"name": "majorana"}))),
        ("zeta-z2.json", preset("Z2", json!({"name": "zeta", "zeta": [0, 1], "rep": "trivial"}))),
        ("cocycle-klein.json", preset("Z2xZ2", json!({"name": "cocycle", "rep": "pauli"}))),
        (
            "identity-z2.json",
            json!({
                "version": 1,
                "group": "Z2",
                "window": {"sites": 12, "site": {"grading": [1, -1]}},
                "realization": {"type": "preset", "payload": {"name": "identity"}},
            }),
        ),
        ("circuit-z2.json", {
            let mut f = preset("Z2", json!({"name": "random_circuit"}));
            f["window"] = json!({"sites": 10});
            f
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_parse_and_load() {
        let cfg = Config::default();
        for (name, v) in examples() {
            let f = problem::parse(&v.to_string()).unwrap_or_else(|e| panic!("{name}: {e}"));
            problem::load(&f, &cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn cohomology_counts() {
        let cfg = Config::default();
        let count = |g: &str, m: usize| cohomology(&problem::group_arg(g).unwrap(), m, &cfg).unwrap()["count"].clone();
        assert_eq!(count("Z2", 2), json!(1));
        assert_eq!(count("Z2xZ2", 2), json!(2));
        let e = cohomology(&FiniteGroup::preset("S3").unwrap(), 6, &cfg).unwrap_err();
        assert!(matches!(e, CliError::Computation(sqca::Error::TooLarge { .. })));
    }
}
