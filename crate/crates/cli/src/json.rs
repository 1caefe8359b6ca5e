//! JSON encodings: complex numbers as [re, im], rationals as {num, den}.

use serde_json::{json, Value};
use sqca::group::{Cocycle2, CohomClass, FiniteGroup, Z2Hom};
use sqca::gsystem::{IndexTriple, IndexValue};
use sqca::linalg::{c, CMat, C64};

/// Serialized matrix: rows of [re, im] pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// Rounded to 12 decimals with −0 folded into 0, so reports do not carry rounding noise.
pub fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn complex(z: C64) -> Value {
    json!([clean(z.re), clean(z.im)])
}

pub fn matrix(m: &CMat) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [clean(m[(i, j)].re), clean(m[(i, j)].im)]).collect()).collect()
}

pub fn parse_matrix(rows: &MatrixJson) -> Result<CMat, String> {
    let n = rows.len();
    if n == 0 {
        return Err("empty matrix".into());
    }
    let m = rows[0].len();
    if rows.iter().any(|r| r.len() != m) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn cocycle(nu: &Cocycle2) -> Value {
    Value::Array(nu.phases.iter().map(|row| Value::Array(row.iter().map(|&z| complex(z)).collect())).collect())
}

pub fn index_value(d: &IndexValue) -> Value {
    json!({"num": d.q.numer(), "den": d.q.denom(), "radical": d.radical})
}

pub fn zeta(z: &Z2Hom) -> Value {
    json!(z.values)
}

pub fn class(nu: &CohomClass) -> Value {
    json!({"modulus": nu.modulus, "canonical": nu.canonical, "trivial": nu.is_trivial()})
}

/// (d, ζ, [ν]) as a JSON object.
pub fn triple(t: &IndexTriple) -> Value {
    json!({"d": index_value(&t.d), "zeta": zeta(&t.zeta), "nu": class(&t.nu), "text": triple_text(t)})
}

/// Human-readable form such as "(√2, 0, e)".
pub fn triple_text(t: &IndexTriple) -> String {
    let z = if t.zeta.is_zero() {
        "0".to_string()
    } else {
        t.zeta.values.iter().map(|v| v.to_string()).collect::<String>()
    };
    let nu = if t.nu.is_trivial() {
        "e".to_string()
    } else {
        let rows: Vec<String> =
            t.nu.canonical.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
        format!("[{}] mod {}", rows.join(" / "), t.nu.modulus)
    };
    format!("({}, {z}, {nu})", t.d)
}

const PRESETS: [&str; 8] = ["trivial", "Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8"];

/// Preset name when the group is one, else the explicit table.
pub fn group(g: &FiniteGroup) -> Value {
    if let Some(name) = &g.name {
        if PRESETS.contains(&name.as_str()) && FiniteGroup::preset(name).map(|p| p.table == g.table).unwrap_or(false) {
            return json!(name);
        }
    }
    for name in PRESETS {
        if FiniteGroup::preset(name).map(|p| p.table == g.table).unwrap_or(false) {
            return json!(name);
        }
    }
    json!({"order": g.order, "table": g.table})
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqca::linalg::pauli_y;

    #[test]
    fn matrices_round_trip() {
        let m = pauli_y();
        assert_eq!(parse_matrix(&matrix(&m)).unwrap(), m);
        assert!(parse_matrix(&vec![vec![[0.0, 0.0]], vec![]]).is_err());
    }

    #[test]
    fn negative_zero_is_folded() {
        assert_eq!(complex(c(-0.0, -1e-17)).to_string(), "[0.0,0.0]");
    }

    #[test]
    fn rationals_are_in_lowest_terms() {
        let v = index_value(&IndexValue::rational(4, 6));
        assert_eq!(v, json!({"num": 2, "den": 3, "radical": false}));
    }
}
