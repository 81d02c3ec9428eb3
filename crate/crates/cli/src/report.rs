use std::fmt::Write as _;
use std::time::Duration;

use chowvol::io::PolyDocument;
use chowvol::mixedvol::{ChowRankReport, VerificationReport, VolPolynomial};
use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Results for one matroid.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub elements: usize,
    pub rank: usize,
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolyDocument>,
    #[serde(skip)]
    pub pretty: Option<String>,
    pub checks: Vec<Check>,
}

impl Entry {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn set_volume(&mut self, vol: &VolPolynomial) {
        self.polynomial = Some(PolyDocument::new(&vol.poly, vol.degree));
        self.pretty = Some(vol.poly.pretty());
    }
}

/// Everything a command produced. Timings are kept out of the serialized
/// form so reports compare byte for byte across runs.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub entries: Vec<Entry>,
    pub passed: bool,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl RunReport {
    pub fn new(command: &str, entries: Vec<Entry>) -> Self {
        let passed = entries.iter().all(Entry::passed);
        RunReport {
            command: command.to_string(),
            entries,
            passed,
            timings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Check-by-check listing for verify and compare.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let _ = writeln!(s, "{} (n={}, r={})", e.name, e.elements, e.rank);
            for c in &e.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                if c.detail.is_empty() {
                    let _ = writeln!(s, "  {}: {status}", c.name);
                } else {
                    let _ = writeln!(s, "  {}: {status} ({})", c.name, c.detail);
                }
            }
        }
        let _ = writeln!(s, "result: {}", if self.passed { "pass" } else { "FAIL" });
        s
    }

    /// One row per matroid, for corpus runs.
    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>2}  {:>2}  {:>5}  {:>6}  status", "name", "n", "r", "terms", "checks");
        for e in &self.entries {
            let terms = e.polynomial.as_ref().map_or(0, |p| p.terms.len());
            let ok = e.checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(
                s,
                "{:<width$}  {:>2}  {:>2}  {:>5}  {:>6}  {}",
                e.name,
                e.elements,
                e.rank,
                terms,
                format!("{ok}/{}", e.checks.len()),
                if e.passed() { "pass" } else { "FAIL" }
            );
            for c in e.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(s, "    {}: {}", c.name, c.detail);
            }
        }
        let failed = self.entries.iter().filter(|e| !e.passed()).count();
        let _ = writeln!(s, "{} matroids, {failed} failed", self.entries.len());
        let _ = writeln!(s, "result: {}", if self.passed { "pass" } else { "FAIL" });
        s
    }
}

/// Checks for a verification report, in a fixed order.
pub fn verification_checks(v: &VerificationReport) -> Vec<Check> {
    let a = &v.annihilators;
    let mut out = vec![
        Check::new("homogeneous of degree d", v.homogeneous, ""),
        Check::new("variables are nontrivial flats", v.variables, ""),
        Check::new(
            "incomparable products vanish",
            a.incomparable_failures.is_empty(),
            count_detail(a.incomparable_checked, a.incomparable_failures.len(), "pairs"),
        ),
        Check::new(
            "linear relations L_ij vanish",
            a.linear_failures.is_empty(),
            count_detail(a.linear_checked, a.linear_failures.len(), "pairs"),
        ),
        Check::new(
            "maximal chains have degree 1",
            a.chain_failures.is_empty(),
            count_detail(a.chains_checked, a.chain_failures.len(), "chains"),
        ),
        Check::new(
            "constant weight is balanced",
            v.balancing.passed(),
            count_detail(v.balancing.checked, v.balancing.violations.len(), "codim-1 cones"),
        ),
    ];
    if let Some(ranks) = &v.rank_checks {
        if ranks.is_empty() {
            out.push(Check::new("rank checks", false, "polynomial is malformed"));
        }
        out.extend(ranks.iter().map(rank_check));
    }
    out
}

fn rank_check(r: &ChowRankReport) -> Check {
    Check::new(
        format!("pairing rank p={}", r.p),
        r.passed(),
        format!(
            "{} cones, dim CH^p {}, pairing rank {}, dim CH^d {}",
            r.cones, r.dim_chp, r.pairing_rank, r.dim_chd
        ),
    )
}

fn count_detail(checked: usize, failed: usize, what: &str) -> String {
    if failed == 0 {
        format!("{checked} {what}")
    } else {
        format!("{failed} of {checked} {what} fail")
    }
}
