//! JSON and TSV renderings of ranking results. Every real number is written
//! with 17 significant digits so it re-parses to the same `f64`.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::el::InconsistencyPolicy;
use crate::oracle::ExactRanking;
use crate::rank::{RankConfig, RankingResult, StopCondition};

/// `x` with 17 significant digits; `inf`, `-inf` or `NaN` when not finite.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A real rendered through [`fmt17`]; non-finite values become `null` in JSON.
#[derive(Debug, Clone, Copy)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonAtom {
    atom: String,
    score: Num,
    log_score: Num,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonPair {
    higher: String,
    lower: String,
    strict: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonConfig {
    max_classes: Option<u128>,
    max_worlds: Option<u128>,
    max_seconds: Option<Num>,
    target_bound: Option<Num>,
    inconsistency: InconsistencyPolicy,
    tight_bound: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonReport {
    atoms: Vec<JsonAtom>,
    order: Vec<String>,
    s: u128,
    t: u128,
    #[serde(rename = "U")]
    u: Num,
    #[serde(rename = "logU")]
    log_u: Num,
    provable_pairs: Vec<JsonPair>,
    bottom_mass: Num,
    inconsistent_worlds: u128,
    complete: bool,
    n_atoms: usize,
    n_formulas: usize,
    max_log_score: Num,
    elapsed_seconds: Num,
    config: JsonConfig,
}

pub fn ranking_json(r: &RankingResult, stop: &StopCondition, config: &RankConfig) -> String {
    let report = JsonReport {
        atoms: r
            .scores
            .iter()
            .map(|s| JsonAtom {
                atom: s.atom.to_string(),
                score: Num(s.score),
                log_score: Num(s.log_score),
            })
            .collect(),
        order: r.order().map(|a| a.to_string()).collect(),
        s: r.worlds_analyzed,
        t: r.classes_analyzed,
        u: Num(r.unassigned_bound),
        log_u: Num(r.log_unassigned_bound),
        provable_pairs: r
            .provable_pairs
            .iter()
            .map(|p| JsonPair {
                higher: p.higher.to_string(),
                lower: p.lower.to_string(),
                strict: p.strict,
            })
            .collect(),
        bottom_mass: Num(r.bottom_mass),
        inconsistent_worlds: r.inconsistent_worlds,
        complete: r.complete,
        n_atoms: r.n_atoms,
        n_formulas: r.n_formulas,
        max_log_score: Num(r.max_log_score),
        elapsed_seconds: Num(r.elapsed_seconds),
        config: JsonConfig {
            max_classes: stop.max_classes,
            max_worlds: stop.max_worlds,
            max_seconds: stop.max_seconds.map(Num),
            target_bound: stop.target_bound.map(Num),
            inconsistency: config.policy,
            tight_bound: config.tight_bound,
        },
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

pub fn ranking_tsv(r: &RankingResult) -> String {
    let mut out = format!(
        "# U={} logU={} s={} t={} complete={} bottomMass={}\natom\tscore\tlogScore\n",
        fmt17(r.unassigned_bound),
        fmt17(r.log_unassigned_bound),
        r.worlds_analyzed,
        r.classes_analyzed,
        r.complete,
        fmt17(r.bottom_mass),
    );
    for s in &r.scores {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.atom,
            fmt17(s.score),
            fmt17(s.log_score)
        ));
    }
    out
}

/// Rows of a TSV report as `(atom, value, log value)`; comments and the header are skipped.
pub fn parse_tsv(text: &str) -> Result<Vec<(String, f64, f64)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.starts_with("atom\t") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [atom, v, lv] = cols.as_slice() else {
            return Err(format!("line {}: expected 3 columns", i + 1));
        };
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1));
        out.push((atom.to_string(), parse(v)?, parse(lv)?));
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonExactAtom {
    atom: String,
    probability: Num,
    log_score: Num,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonExact {
    atoms: Vec<JsonExactAtom>,
    order: Vec<String>,
    log_z: Num,
    bottom_probability: Num,
    n_atoms: usize,
}

pub fn exact_json(r: &ExactRanking) -> String {
    let report = JsonExact {
        atoms: r
            .atoms
            .iter()
            .map(|a| JsonExactAtom {
                atom: a.atom.to_string(),
                probability: Num(a.probability),
                log_score: Num(a.log_score),
            })
            .collect(),
        order: r.atoms.iter().map(|a| a.atom.to_string()).collect(),
        log_z: Num(r.log_z),
        bottom_probability: Num(r.bottom_probability),
        n_atoms: r.n_atoms,
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

pub fn exact_tsv(r: &ExactRanking) -> String {
    let mut out = format!(
        "# logZ={} bottomProbability={}\natom\tprobability\tlogScore\n",
        fmt17(r.log_z),
        fmt17(r.bottom_probability)
    );
    for a in &r.atoms {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            a.atom,
            fmt17(a.probability),
            fmt17(a.log_score)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1438.1309, std::f64::consts::E, 1e-300, 6.02e23, -2.5] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(fmt17(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_numbers_are_raw() {
        let v = serde_json::to_string(&[Num(1.5), Num(f64::INFINITY)]).unwrap();
        assert_eq!(v, "[1.5000000000000000e0,null]");
    }
}
