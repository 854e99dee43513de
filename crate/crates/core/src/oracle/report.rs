//! Classification of the operator catalogue.

use std::fmt::Write as _;

use serde::Serialize;

use super::certify::{characteristic_sides, Certifier};
use super::{Mode, Verdict};
use crate::bitstring::BitString;
use crate::crossover::{catalogue, CrossoverOp};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub operator: String,
    pub family: &'static str,
    /// The classification the operator is documented to have.
    pub claimed_neutral: bool,
    pub diversity_neutral: Verdict,
    pub respectful: Verdict,
    /// Only decided for exactly enumerable, respectful operators.
    pub oim: Option<Verdict>,
    /// Only decided for exactly enumerable operators.
    pub unbiased: Option<Verdict>,
}

impl ReportRow {
    pub fn contradicts_claim(&self) -> bool {
        self.diversity_neutral.holds != self.claimed_neutral
    }

    /// Names of the implications between properties that this row violates.
    pub fn lemma_violations(&self) -> Vec<&'static str> {
        let neutral = self.diversity_neutral.holds;
        let respectful = self.respectful.holds;
        let oim = self.oim.as_ref().map(|v| v.holds);
        let unbiased = self.unbiased.as_ref().map(|v| v.holds);
        let mut out = Vec::new();
        if neutral && !respectful {
            out.push("diversity-neutral implies respectful");
        }
        if respectful && oim == Some(true) && !neutral {
            out.push("respectful and OIM implies diversity-neutral");
        }
        if respectful && unbiased == Some(true) && oim == Some(false) {
            out.push("respectful and unbiased implies OIM");
        }
        out
    }
}

/// A documented counterexample re-evaluated by the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnownWitness {
    pub operator: String,
    pub x1: String,
    pub x2: String,
    pub z: String,
    pub lhs: String,
    pub rhs: String,
    pub expected_lhs: String,
    pub expected_rhs: String,
}

impl KnownWitness {
    pub fn reproduced(&self) -> bool {
        self.lhs == self.expected_lhs && self.rhs == self.expected_rhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub rows: Vec<ReportRow>,
    pub known_witnesses: Vec<KnownWitness>,
}

impl ClassificationReport {
    pub fn contradictions(&self) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.contradicts_claim()).collect()
    }

    pub fn lemma_violations(&self) -> Vec<(String, &'static str)> {
        self.rows
            .iter()
            .flat_map(|r| r.lemma_violations().into_iter().map(|l| (r.operator.clone(), l)))
            .collect()
    }

    /// True when every row matches its claim, no implication is violated and
    /// every known witness is reproduced.
    pub fn consistent(&self) -> bool {
        self.contradictions().is_empty()
            && self.lemma_violations().is_empty()
            && self.known_witnesses.iter().all(KnownWitness::reproduced)
    }

    pub fn row(&self, operator: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.operator == operator)
    }

    pub fn render_text(&self) -> String {
        fn cell(v: Option<&Verdict>) -> String {
            match v {
                None => "n/a".into(),
                Some(v) => {
                    let mark = if v.holds { "yes" } else { "no" };
                    match v.mode {
                        Mode::Exact => mark.into(),
                        Mode::Statistical => format!("{mark}*"),
                    }
                }
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "operator classification at n = {}", self.n);
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>10} {:>5} {:>8} {:>7}",
            "operator", "neutral", "respectful", "oim", "unbiased", "claim"
        );
        for r in &self.rows {
            let claim = match (r.claimed_neutral, r.contradicts_claim()) {
                (_, true) => "MISMATCH",
                (true, false) => "neutral",
                (false, false) => "not",
            };
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:>10} {:>5} {:>8} {:>7}",
                r.operator,
                cell(Some(&r.diversity_neutral)),
                cell(Some(&r.respectful)),
                cell(r.oim.as_ref()),
                cell(r.unbiased.as_ref()),
                claim
            );
        }
        let _ = writeln!(out, "(* = statistical verdict)");
        for r in &self.rows {
            if let Some(w) = &r.diversity_neutral.witness {
                let _ = writeln!(out, "{}: {w}", r.operator);
            }
        }
        for k in &self.known_witnesses {
            let _ = writeln!(
                out,
                "known witness {} ({},{},{}): LHS {} RHS {} [{}]",
                k.operator,
                k.x1,
                k.x2,
                k.z,
                k.lhs,
                k.rhs,
                if k.reproduced() { "reproduced" } else { "NOT reproduced" }
            );
        }
        for (op, lemma) in self.lemma_violations() {
            let _ = writeln!(out, "violated: {lemma} ({op})");
        }
        out
    }
}

impl Certifier {
    pub fn classify(&self, op: &CrossoverOp, n: usize) -> Result<ReportRow> {
        let diversity_neutral = self.diversity_neutral(op, n, Mode::Exact)?;
        let respectful = self.respectful(op, n, Mode::Exact)?;
        let exact = op.exact_enumerable() && self.limits.check_certify(n).is_ok();
        let oim = if exact && respectful.holds { Some(self.oim(op, n)?) } else { None };
        let unbiased = if exact { Some(self.unbiased(op, n)?) } else { None };
        Ok(ReportRow {
            operator: op.to_string(),
            family: op.family(),
            claimed_neutral: op.claimed_diversity_neutral(),
            diversity_neutral,
            respectful,
            oim,
            unbiased,
        })
    }

    pub fn classification_report(&self, n: usize) -> Result<ClassificationReport> {
        let rows = catalogue().iter().map(|op| self.classify(op, n)).collect::<Result<Vec<_>>>()?;
        Ok(ClassificationReport {
            n,
            rows,
            known_witnesses: known_witnesses(n)?,
        })
    }
}

/// Runs the whole catalogue at length `n` with default settings.
pub fn classification_report(n: usize) -> Result<ClassificationReport> {
    Certifier::default().classification_report(n)
}

fn known_witnesses(n: usize) -> Result<Vec<KnownWitness>> {
    let mut out = Vec::new();
    let mut push = |op: &str, x1: BitString, x2: BitString, z: BitString, lhs: usize, rhs: usize| -> Result<()> {
        let c = CrossoverOp::parse(op)?;
        let (l, r) = characteristic_sides(&c, &x1, &x2, &z)?;
        out.push(KnownWitness {
            operator: c.to_string(),
            x1: x1.to_string(),
            x2: x2.to_string(),
            z: z.to_string(),
            lhs: l.to_string(),
            rhs: r.to_string(),
            expected_lhs: lhs.to_string(),
            expected_rhs: rhs.to_string(),
        });
        Ok(())
    };
    if n == 3 {
        push("alternating", "110".parse()?, "101".parse()?, "110".parse()?, 0, 2)?;
    }
    // Complementary parents with z = 0: the child is all zeros both ways.
    let x1 = BitString::from_bits(&(0..n).map(|i| i % 2 == 0).collect::<Vec<_>>());
    let x2 = x1.complement();
    push("and", x1, x2, BitString::zeros(n), 0, n)?;
    Ok(out)
}
