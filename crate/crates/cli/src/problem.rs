//! Problem files: a group, a chain window and a QCA realization.
//!
//! ```json
//! {
//!   "version": 1,
//!   "group": "Z2",
//!   "window": {"sites": 12, "site": {"grading": [1, -1], "rep": [[[...]]]}},
//!   "realization": {"type": "preset", "payload": {"name": "shift", "d": 2}},
//!   "options": {"coarse_grain": 2, "auto_stack": false}
//! }
//! ```
//!
//! `group` is a preset name or `{order, table}`.  `window` is either uniform
//! (`sites` copies of `site`) or an explicit `layout` list; a site without `rep` carries
//! the trivial action.  Presets that fix their own sites only read `window.sites`.

use crate::json::{self, parse_matrix, MatrixJson};
use crate::{input_err, CliError, CliResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sqca::group::{enumerate_z2_homs, group_from_table, FiniteGroup, Z2Hom};
use sqca::gsystem::samples::pauli_rep;
use sqca::linalg::{eye, CMat};
use sqca::qca::{
    circuit_from_layers, coarse_grain, preset_cocycle_example, preset_majorana_shift, preset_majorana_shift_left,
    preset_majorana_shift_ordered, preset_zeta_example, random_circuit, random_circuit_window, shift_uniform,
    ChainWindow, CircuitLayer, MajoranaOrdering, QcaRealization, Site, DEFAULT_SITES,
};
use sqca::Config;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Table { order: usize, table: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub grading: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Vec<MatrixJson>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<SiteSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<SiteSpec>>,
}

/// A named representation ("trivial", "pauli") or explicit matrices indexed by group element.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RepChoice {
    Named(String),
    Matrices(Vec<MatrixJson>),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetSpec {
    Identity,
    Shift {
        d: usize,
        #[serde(default)]
        left: bool,
    },
    Majorana {
        #[serde(default)]
        left: bool,
        /// "xy" (default) or "yx": which Pauli matrix is the left Majorana generator.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ordering: Option<String>,
    },
    Zeta {
        zeta: Vec<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep: Option<RepChoice>,
    },
    Cocycle {
        rep: RepChoice,
    },
    RandomCircuit,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub start: usize,
    pub len: usize,
    pub unitary: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum RealizationSpec {
    Preset(PresetSpec),
    GlobalUnitary { matrix: MatrixJson },
    BlockMaps { layers: Vec<Vec<BlockSpec>> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_grain: Option<usize>,
    #[serde(default)]
    pub auto_stack: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    pub realization: RealizationSpec,
    #[serde(default)]
    pub options: Options,
    /// Output of an earlier run; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
}

/// A loaded problem, ready for computation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub group: FiniteGroup,
    pub qca: QcaRealization,
    pub options: Options,
}

pub fn parse(text: &str) -> CliResult<ProblemFile> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::input("SchemaError", e.to_string()))?;
    if file.version != VERSION {
        return Err(CliError::input("SchemaError", format!("unsupported version {}; expected {VERSION}", file.version)));
    }
    Ok(file)
}

pub fn read(path: &str) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input("IoError", format!("{path}: {e}")))?;
    parse(&text)
}

pub fn build_group(spec: &GroupSpec) -> CliResult<FiniteGroup> {
    match spec {
        GroupSpec::Preset(name) => FiniteGroup::preset(name).map_err(input_err),
        GroupSpec::Table { order, table } => {
            if table.len() != *order {
                return Err(CliError::input("SchemaError", format!("table has {} rows for order {order}", table.len())));
            }
            group_from_table(table.clone()).map_err(input_err)
        }
    }
}

/// Group from a command-line argument: a preset name or an inline {order, table} object.
pub fn group_arg(arg: &str) -> CliResult<FiniteGroup> {
    let spec = if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).map_err(|e| CliError::input("SchemaError", e.to_string()))?
    } else {
        GroupSpec::Preset(arg.to_string())
    };
    build_group(&spec)
}

fn site(spec: &SiteSpec, g: &FiniteGroup) -> CliResult<Site> {
    if spec.grading.is_empty() || spec.grading.iter().any(|&s| s != 1 && s != -1) {
        return Err(CliError::input("SchemaError", "site grading must be a nonempty list of ±1"));
    }
    match &spec.rep {
        None => Ok(Site::plain(spec.grading.clone(), g)),
        Some(mats) => {
            let rep = mats.iter().map(parse_matrix).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::input("SchemaError", e))?;
            Ok(Site::new(spec.grading.clone(), rep))
        }
    }
}

fn sites_of(window: Option<&WindowSpec>) -> usize {
    window.and_then(|w| w.sites.or(w.layout.as_ref().map(|l| l.len()))).unwrap_or(DEFAULT_SITES)
}

fn build_window(spec: Option<&WindowSpec>, g: &FiniteGroup) -> CliResult<ChainWindow> {
    let spec = spec.ok_or_else(|| CliError::input("SchemaError", "this realization needs a window"))?;
    let sites = match (&spec.layout, &spec.site) {
        (Some(layout), None) => {
            if spec.sites.is_some_and(|n| n != layout.len()) {
                return Err(CliError::input("SchemaError", "window.sites disagrees with the layout length"));
            }
            layout.iter().map(|s| site(s, g)).collect::<CliResult<Vec<_>>>()?
        }
        (None, Some(s)) => vec![site(s, g)?; spec.sites.unwrap_or(DEFAULT_SITES)],
        _ => return Err(CliError::input("SchemaError", "window needs exactly one of `site` and `layout`")),
    };
    ChainWindow::new(g.clone(), sites).map_err(input_err)
}

fn rep_choice(choice: Option<&RepChoice>, g: &FiniteGroup) -> CliResult<Vec<CMat>> {
    match choice {
        None => Ok(g.elements().map(|_| eye(1)).collect()),
        Some(RepChoice::Named(n)) if n == "trivial" => Ok(g.elements().map(|_| eye(1)).collect()),
        Some(RepChoice::Named(n)) if n == "pauli" => {
            if g.table != FiniteGroup::klein().table {
                return Err(CliError::input("SchemaError", "the pauli representation is defined for Z2xZ2"));
            }
            Ok(pauli_rep())
        }
        Some(RepChoice::Named(n)) => Err(CliError::input("SchemaError", format!("unknown representation '{n}'"))),
        Some(RepChoice::Matrices(m)) => {
            m.iter().map(parse_matrix).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::input("SchemaError", e))
        }
    }
}

fn require_trivial(g: &FiniteGroup, what: &str) -> CliResult<()> {
    if g.order != 1 {
        return Err(CliError::input("SchemaError", format!("the {what} preset is defined for the trivial group")));
    }
    Ok(())
}

fn preset(spec: &PresetSpec, file: &ProblemFile, g: &FiniteGroup, cfg: &Config) -> CliResult<QcaRealization> {
    let n = sites_of(file.window.as_ref());
    let w = file.window.as_ref();
    match spec {
        PresetSpec::Identity => Ok(QcaRealization::identity(build_window(w, g)?)),
        PresetSpec::Shift { d, left } => {
            if *d == 0 {
                return Err(CliError::input("SchemaError", "shift needs d ≥ 1"));
            }
            shift_uniform(g.clone(), Site::plain(vec![1; *d], g), n, if *left { -1 } else { 1 }).map_err(input_err)
        }
        PresetSpec::Majorana { left, ordering } => {
            require_trivial(g, "majorana")?;
            let o = match ordering.as_deref() {
                None | Some("xy") => MajoranaOrdering::XThenY,
                Some("yx") => MajoranaOrdering::YThenX,
                Some(other) => return Err(CliError::input("SchemaError", format!("unknown ordering '{other}'"))),
            };
            let q = match (left, o) {
                (true, MajoranaOrdering::XThenY) => preset_majorana_shift_left(n),
                (true, MajoranaOrdering::YThenX) => {
                    return Err(CliError::input("SchemaError", "the left Majorana shift uses the xy ordering"))
                }
                (false, MajoranaOrdering::XThenY) => preset_majorana_shift(n),
                (false, o) => preset_majorana_shift_ordered(n, o),
            };
            q.map_err(input_err)
        }
        PresetSpec::Zeta { zeta, rep } => {
            let v = rep_choice(rep.as_ref(), g)?;
            preset_zeta_example(g, &v, &Z2Hom { values: zeta.clone() }, n).map_err(input_err)
        }
        PresetSpec::Cocycle { rep } => {
            let v = rep_choice(Some(rep), g)?;
            preset_cocycle_example(g, &v, n).map_err(input_err)
        }
        PresetSpec::RandomCircuit => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let window = match w.filter(|w| w.site.is_some() || w.layout.is_some()) {
                Some(_) => build_window(w, g)?,
                None => random_circuit_window(g, n, &mut rng).map_err(input_err)?,
            };
            let layers = random_circuit(&window, &mut rng).map_err(input_err)?;
            circuit_from_layers(window, &layers).map_err(input_err)
        }
    }
}

pub fn layers(spec: &[Vec<BlockSpec>]) -> CliResult<Vec<CircuitLayer>> {
    spec.iter()
        .map(|layer| {
            let blocks = layer
                .iter()
                .map(|b| Ok((b.start, b.len, parse_matrix(&b.unitary).map_err(|e| CliError::input("SchemaError", e))?)))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(CircuitLayer::new(blocks))
        })
        .collect()
}

/// Build the group, window and realization described by a problem file.  Every failure at
/// this stage is an input error.
pub fn load(file: &ProblemFile, cfg: &Config) -> CliResult<Problem> {
    let group = build_group(&file.group)?;
    let qca = match &file.realization {
        RealizationSpec::Preset(p) => preset(p, file, &group, cfg)?,
        RealizationSpec::GlobalUnitary { matrix } => {
            let window = build_window(file.window.as_ref(), &group)?;
            let u = parse_matrix(matrix).map_err(|e| CliError::input("SchemaError", e))?;
            QcaRealization::from_global_unitary(window, &u, cfg).map_err(input_err)?
        }
        RealizationSpec::BlockMaps { layers: spec } => {
            let window = build_window(file.window.as_ref(), &group)?;
            circuit_from_layers(window, &layers(spec)?).map_err(input_err)?
        }
    };
    let qca = match file.options.coarse_grain {
        None | Some(1) => qca,
        Some(0) => return Err(CliError::input("SchemaError", "coarse_grain must be ≥ 1")),
        Some(k) => coarse_grain(&qca, k).map_err(input_err)?,
    };
    Ok(Problem { group, qca, options: file.options.clone() })
}

/// The window as an explicit layout, for files written by the CLI.
pub fn window_spec(w: &ChainWindow) -> WindowSpec {
    let layout = w
        .sites
        .iter()
        .map(|s| {
            let trivial = s.rep.iter().all(|u| *u == eye(s.dim()));
            SiteSpec { grading: s.grading.clone(), rep: (!trivial).then(|| s.rep.iter().map(json::matrix).collect()) }
        })
        .collect();
    WindowSpec { sites: None, site: None, layout: Some(layout) }
}

pub fn group_spec(g: &FiniteGroup) -> GroupSpec {
    serde_json::from_value(json::group(g)).expect("group encoding is a GroupSpec")
}

/// Characters ζ available for a group, used by `examples`.
pub fn nonzero_hom(g: &FiniteGroup) -> Option<Z2Hom> {
    enumerate_z2_homs(g).ok()?.into_iter().find(|z| !z.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> ProblemFile {
        parse(text).unwrap()
    }

    #[test]
    fn preset_shift_loads() {
        let f = file(r#"{"version": 1, "group": "trivial", "realization": {"type": "preset", "payload": {"name": "shift", "d": 2}}}"#);
        let p = load(&f, &Config::default()).unwrap();
        assert_eq!(p.qca.window.len(), DEFAULT_SITES);
        assert_eq!(p.qca.window.sites[0].dim(), 2);
    }

    #[test]
    fn schema_errors_are_input_errors() {
        for text in [
            "{",
            r#"{"version": 2, "group": "Z2", "realization": {"type": "preset", "payload": {"name": "identity"}}}"#,
            r#"{"version": 1, "group": "Z2", "realization": {"type": "teleport", "payload": {}}}"#,
            r#"{"version": 1, "group": "Z2", "realization": {"type": "preset", "payload": {"name": "shift"}}}"#,
            r#"{"version": 1, "group": "Z2", "colour": 3, "realization": {"type": "preset", "payload": {"name": "identity"}}}"#,
        ] {
            let e = parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn load_errors_are_input_errors() {
        let cfg = Config::default();
        let bad_group = file(r#"{"version": 1, "group": "Z7", "realization": {"type": "preset", "payload": {"name": "shift", "d": 2}}}"#);
        assert!(matches!(load(&bad_group, &cfg), Err(CliError::Input { ref kind, .. }) if kind == "UnknownGroup"));
        let table = file(
            r#"{"version": 1, "group": {"order": 2, "table": [[0, 1], [1, 1]]},
                "realization": {"type": "preset", "payload": {"name": "shift", "d": 2}}}"#,
        );
        assert_eq!(load(&table, &cfg).unwrap_err().exit_code(), 2);
        let no_window = file(r#"{"version": 1, "group": "Z2", "realization": {"type": "preset", "payload": {"name": "identity"}}}"#);
        assert_eq!(load(&no_window, &cfg).unwrap_err().exit_code(), 2);
        let small = file(
            r#"{"version": 1, "group": "trivial", "window": {"sites": 4},
                "realization": {"type": "preset", "payload": {"name": "shift", "d": 2}}}"#,
        );
        assert!(matches!(load(&small, &cfg), Err(CliError::Input { ref kind, .. }) if kind == "WindowTooSmall"));
    }

    #[test]
    fn written_windows_reload() {
        let cfg = Config::default();
        let f = file(r#"{"version": 1, "group": "Z2xZ2", "realization": {"type": "preset", "payload": {"name": "cocycle", "rep": "pauli"}}}"#);
        let p = load(&f, &cfg).unwrap();
        let spec = window_spec(&p.qca.window);
        let again = build_window(Some(&spec), &p.group).unwrap();
        assert_eq!(again.sites.len(), p.qca.window.sites.len());
        for (a, b) in again.sites.iter().zip(&p.qca.window.sites) {
            assert_eq!(a.grading, b.grading);
            for (x, y) in a.rep.iter().zip(&b.rep) {
                assert!(sqca::linalg::frob(&(x - y)) < 1e-11);
            }
        }
        assert_eq!(group_spec(&p.group), GroupSpec::Preset("Z2xZ2".into()));
    }
}
