//! On-disk formats. Every file starts with its provenance: `# key: value`
//! comment lines for CSV, a `provenance` object for JSON, and a first
//! `{"provenance": ...}` record for JSON lines.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use dcm_core::estimators::{ResultRow, ResultTable};
use dcm_core::topology::{diagnostic_jumps, DiagnosticsRow};
use dcm_core::{Configuration, DegreeSequence, HalfEdge, RewiringTrace};

use crate::error::{LabError, LabResult};
use crate::provenance::Provenance;

/// Result-table columns in emission order; the first nine are the stable interface.
pub const RESULT_COLUMNS: [&str; 23] = [
    "t",
    "tv_plugin",
    "tv_plugin_se",
    "tv_struct",
    "tau_tail",
    "tau_tail_se",
    "tau_theory",
    "tv_stopped",
    "tv_unstopped",
    "tv_struct_se",
    "tau_tail_lo",
    "tau_tail_hi",
    "tau_tree",
    "tv_stopped_se",
    "stopped_mode",
    "stopped_count",
    "tv_unstopped_se",
    "unstopped_mode",
    "tv_lower",
    "tv_upper",
    "ball_size",
    "beyond_log_n",
    "repetition",
];

pub const DIAGNOSTIC_COLUMNS: [&str; 9] = [
    "t",
    "mean_ball_size",
    "nu_power_prediction",
    "tree_fraction",
    "good_density",
    "ball_size_se",
    "tree_fraction_se",
    "good_se",
    "good_jumps",
];

/// Shortest round-trip text for `v`; unavailable values are empty fields.
fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn csv_text(
    prov: &Provenance,
    header: &[&str],
    records: impl IntoIterator<Item = Vec<String>>,
) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
    prov.comment_lines() + &body
}

fn result_record(r: &ResultRow, repetition: u64) -> Vec<String> {
    vec![
        r.t.to_string(),
        num(r.tv_plugin),
        num(r.tv_plugin_se),
        num(r.tv_struct),
        num(r.tau_tail),
        num(r.tau_tail_se),
        num(r.tau_theory),
        num(r.tv_stopped),
        num(r.tv_unstopped),
        num(r.tv_struct_se),
        num(r.tau_tail_lo),
        num(r.tau_tail_hi),
        num(r.tau_tree),
        num(r.tv_stopped_se),
        r.stopped_mode.as_str().into(),
        r.stopped_count.to_string(),
        num(r.tv_unstopped_se),
        r.unstopped_mode.as_str().into(),
        num(r.tv_lower),
        num(r.tv_upper),
        r.ball_size.to_string(),
        r.beyond_log_n.to_string(),
        repetition.to_string(),
    ]
}

/// Result tables of all repetitions as one CSV.
pub fn result_csv(prov: &Provenance, tables: &[ResultTable]) -> String {
    csv_text(
        prov,
        &RESULT_COLUMNS,
        tables.iter().flat_map(|tab| {
            tab.rows
                .iter()
                .map(|r| result_record(r, tab.scalars.repetition))
        }),
    )
}

fn scalars_json(tab: &ResultTable) -> Value {
    let s = &tab.scalars;
    json!({
        "repetition": s.repetition,
        "t_mix_hat": s.mixing.t_mix_hat,
        "t_mix_exceeds_horizon": s.mixing.t_mix_hat.is_none(),
        "t_mix_source": s.mixing.source.as_str(),
        "t_mix_bracket": [s.mixing.bracket_lo, s.mixing.bracket_hi],
        "t_mix_note": s.mixing.note,
        "x0": s.x0,
        "plugin_available": s.plugin_available,
        "warnings": s.warnings,
    })
}

/// JSON sidecar with the scalar outputs; the first repetition's values are
/// repeated at top level.
pub fn result_sidecar(prov: &Provenance, tables: &[ResultTable]) -> Value {
    let first = &tables[0].scalars;
    let mut out = json!({
        "provenance": prov,
        "t_mix_hat": first.mixing.t_mix_hat,
        "t_mix_exceeds_horizon": first.mixing.t_mix_hat.is_none(),
        "t_mix_source": first.mixing.source.as_str(),
        "t_mix_bracket": [first.mixing.bracket_lo, first.mixing.bracket_hi],
        "t_mix_theory": first.t_mix_theory,
        "theory_degenerate": first.theory_degenerate,
        "alpha_requested": first.alpha_requested,
        "alpha_effective": first.alpha_effective,
        "alpha_adjusted": first.alpha_adjusted,
        "k": first.k,
        "epsilon": first.epsilon,
        "horizon": first.horizon,
        "replicas": first.replicas,
        "seed": first.seed,
        "plugin_available": first.plugin_available,
        "warnings": first.warnings,
    });
    out["repetitions"] = Value::Array(tables.iter().map(scalars_json).collect());
    out
}

/// The whole result as a single JSON document.
pub fn result_json(prov: &Provenance, tables: &[ResultTable]) -> Value {
    let mut out = result_sidecar(prov, tables);
    let rows: Vec<Value> = tables
        .iter()
        .flat_map(|tab| {
            tab.rows.iter().map(|r| {
                let rec = result_record(r, tab.scalars.repetition);
                let obj: serde_json::Map<String, Value> = RESULT_COLUMNS
                    .iter()
                    .zip(rec)
                    .map(|(k, v)| {
                        let value = if v.is_empty() {
                            Value::Null
                        } else if let Ok(x) = v.parse::<f64>() {
                            json!(x)
                        } else if let Ok(b) = v.parse::<bool>() {
                            json!(b)
                        } else {
                            json!(v)
                        };
                        (k.to_string(), value)
                    })
                    .collect();
                Value::Object(obj)
            })
        })
        .collect();
    out["rows"] = Value::Array(rows);
    out
}

pub fn diagnostics_csv(prov: &Provenance, rows: &[DiagnosticsRow]) -> String {
    csv_text(
        prov,
        &DIAGNOSTIC_COLUMNS,
        rows.iter().map(|r| {
            let jumps = if r.t >= 2 {
                diagnostic_jumps(r.t)
                    .iter()
                    .map(|j| j.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            } else {
                String::new()
            };
            vec![
                r.t.to_string(),
                num(r.mean_ball_size),
                num(r.nu_power_prediction),
                num(r.tree_fraction),
                num(r.good_density),
                num(r.ball_size_se),
                num(r.tree_fraction_se),
                num(r.good_se),
                jumps,
            ]
        }),
    )
}

fn jsonl(prov: &Provenance, records: impl IntoIterator<Item = Value>) -> String {
    let mut out = json!({ "provenance": prov }).to_string();
    out.push('\n');
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// One `{t, R_t}` record per step.
pub fn trace_jsonl(prov: &Provenance, trace: &RewiringTrace) -> String {
    jsonl(
        prov,
        (1..=trace.steps()).map(|t| json!({ "t": t, "R_t": trace.step(t) })),
    )
}

/// One `{t, X_t, tau_if_hit}` record per time; `tau_if_hit` is `tau` once it
/// has happened and null before.
pub fn trajectory_jsonl(prov: &Provenance, positions: &[HalfEdge], tau: Option<usize>) -> String {
    jsonl(
        prov,
        positions.iter().enumerate().map(|(t, x)| {
            let hit = tau.filter(|&tau| tau <= t);
            json!({ "t": t, "X_t": x, "tau_if_hit": hit })
        }),
    )
}

/// A configuration snapshot: the pairing array plus the degrees it fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub provenance: Provenance,
    pub degrees: Vec<u32>,
    pub pairing: Vec<HalfEdge>,
    pub self_loops: usize,
    pub multi_edge_excess: usize,
}

impl ConfigurationFile {
    pub fn new(prov: Provenance, seq: &DegreeSequence, c: &Configuration) -> Self {
        let stats = dcm_core::multigraph_stats(c, seq);
        Self {
            provenance: prov,
            degrees: seq.degrees().to_vec(),
            pairing: c.pairing().to_vec(),
            self_loops: stats.self_loops,
            multi_edge_excess: stats.multi_edge_excess,
        }
    }
}

/// Reads a pairing from either a snapshot object or a bare JSON array.
pub fn read_pairing(path: &Path) -> LabResult<Configuration> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| LabError::parse(path, e))?;
    let array = match &value {
        Value::Array(_) => value.clone(),
        Value::Object(o) => o
            .get("pairing")
            .or_else(|| o.get("eta"))
            .cloned()
            .ok_or_else(|| LabError::parse(path, "no `pairing` field"))?,
        _ => return Err(LabError::parse(path, "expected a JSON array or object")),
    };
    let pairing: Vec<HalfEdge> =
        serde_json::from_value(array).map_err(|e| LabError::parse(path, e))?;
    Configuration::from_pairing(pairing).map_err(|e| LabError::parse(path, e))
}

/// Expected values of an exact-oracle fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleExpected {
    /// Exact TV distance to uniform for `t = 0..=t`.
    pub tv: Vec<f64>,
    /// Exact law of `X_t` for `t = 0..=t`.
    pub distributions: Vec<Vec<f64>>,
    /// Exact `P(tau > t)` when small enough to enumerate.
    pub tau_tail: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Allowed deviation in standard errors.
    pub sigmas: f64,
    pub replicas: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFixture {
    pub provenance: Provenance,
    pub degrees: Vec<u32>,
    pub eta: Vec<HalfEdge>,
    pub x0: HalfEdge,
    pub k: usize,
    pub t: usize,
    pub expected: OracleExpected,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomorphicExpected {
    pub max_abs_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomorphicFixture {
    pub provenance: Provenance,
    pub degrees: Vec<u32>,
    pub eta: Vec<HalfEdge>,
    pub k: usize,
    pub t: usize,
    pub jumps: Vec<usize>,
    pub path_a: Vec<HalfEdge>,
    pub path_b: Vec<HalfEdge>,
    pub expected: IsomorphicExpected,
    pub replicas: u64,
}

pub fn read_text(path: &Path) -> LabResult<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> LabResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| LabError::parse(path, e))
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> LabResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| LabError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| LabError::io("<stdout>", e))
        }
    }
}

pub fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// `out.csv` → `out.json`; the sidecar of a result file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new("test", &DegreeSequence::make_regular(3, 2).unwrap(), 1)
    }

    #[test]
    fn trajectory_marks_tau_from_its_time_on() {
        let text = trajectory_jsonl(&prov(), &[0, 3, 5, 1], Some(2));
        let lines: Vec<Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert!(lines[0]["provenance"].is_object());
        assert_eq!(lines[1], json!({"t": 0, "X_t": 0, "tau_if_hit": null}));
        assert_eq!(lines[2]["tau_if_hit"], Value::Null);
        assert_eq!(lines[3]["tau_if_hit"], json!(2));
        assert_eq!(lines[4]["X_t"], json!(1));
    }

    #[test]
    fn trace_records_sorted_sets() {
        let mut trace = RewiringTrace::new(6);
        trace.push(vec![0, 1, 4, 5]);
        let text = trace_jsonl(&prov(), &trace);
        let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(last, json!({"t": 1, "R_t": [0, 1, 4, 5]}));
    }

    #[test]
    fn nan_is_an_empty_field() {
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0), "1");
    }

    #[test]
    fn pairing_reader_accepts_both_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let bare = dir.path().join("bare.json");
        std::fs::write(&bare, "[1, 0, 3, 2]").unwrap();
        assert_eq!(read_pairing(&bare).unwrap().pairing(), [1, 0, 3, 2]);
        let seq = DegreeSequence::make_regular(2, 2).unwrap();
        let c = Configuration::from_pairing(vec![2, 3, 0, 1]).unwrap();
        let snap = dir.path().join("snap.json");
        std::fs::write(&snap, pretty(&ConfigurationFile::new(prov(), &seq, &c))).unwrap();
        assert_eq!(read_pairing(&snap).unwrap(), c);
        std::fs::write(&bare, "[1, 1]").unwrap();
        assert_eq!(read_pairing(&bare).unwrap_err().exit_code(), 1);
        assert_eq!(
            read_pairing(&dir.path().join("missing.json"))
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
