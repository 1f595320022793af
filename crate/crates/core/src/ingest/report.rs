use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use super::schema::{Operad, ProblemSpec, SCHEMA_VERSION};
use super::emit;
use crate::coder::PInfStructure;
use crate::error::{Error, Result};
use crate::kaledin::{formalize, truncated_class, Formalization, KaledinReport};
use crate::spectral::{degenerates_at_e2, push_euler, EulerPush};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "formal_up_to_W")]
    FormalUpToW,
    #[serde(rename = "non_formal")]
    NonFormal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FormalUpToW => "formal_up_to_W",
            Verdict::NonFormal => "non_formal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KaledinSummary {
    pub max_weight_checked: usize,
    pub vanishing_level: usize,
    pub obstruction_weight: Option<usize>,
    /// The unreachable component `(w − 1) q_w`, classical conventions.
    pub obstruction: Option<String>,
    /// `T` with `[Q, T] = Q̃` up to the vanishing level, as shifted components.
    pub witness: Option<String>,
}

impl KaledinSummary {
    pub fn new(report: &KaledinReport) -> Self {
        KaledinSummary {
            max_weight_checked: report.max_weight_checked,
            vanishing_level: report.vanishing_level,
            obstruction_weight: report.obstruction.as_ref().map(|o| o.weight),
            obstruction: report.obstruction.as_ref().map(|o| o.representative.dump(&format!("K_{}", o.weight))),
            witness: report.witness.as_ref().map(|t| t.dump("t")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerSummary {
    pub survives_to: usize,
    pub first_nonzero_page: Option<usize>,
    pub first_nonzero_class: Option<String>,
}

impl EulerSummary {
    pub fn new(push: &EulerPush) -> Self {
        EulerSummary {
            survives_to: push.survives_to,
            first_nonzero_page: push.first_nonzero.as_ref().map(|(r, _)| *r),
            first_nonzero_class: push.first_nonzero.as_ref().map(|(r, c)| c.representative.dump(&format!("d{r}(e)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    /// Weights removed by the successive gauge steps.
    pub steps: Vec<usize>,
    pub strict_part: ProblemSpec,
}

/// The combined verdict of the three formality criteria.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub operad: Operad,
    pub dim: usize,
    pub max_weight: usize,
    pub verdict: Verdict,
    pub kaledin: KaledinSummary,
    pub euler: EulerSummary,
    pub degeneration: bool,
    pub witness: Option<WitnessSummary>,
    /// Wall time per stage in milliseconds.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    /// Assembles a report, refusing inconsistent inputs.
    pub fn new(
        q: &PInfStructure,
        kaledin: &KaledinReport,
        euler: &EulerPush,
        degeneration: bool,
        formalization: &Formalization,
        timings: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let w = q.cutoff();
        let formal = kaledin.vanishing_level == w;
        let agree = kaledin.max_weight_checked == w
            && kaledin.vanishing_level == euler.survives_to
            && degeneration == formal
            && formalization.is_formal() == formal;
        if !agree {
            return Err(Error::internal(format!(
                "formality criteria disagree: Kaledin vanishes to {}, Euler class survives to {}, degeneration {}, formalize {}",
                kaledin.vanishing_level,
                euler.survives_to,
                degeneration,
                if formalization.is_formal() { "succeeded" } else { "failed" }
            )));
        }
        let witness = match formalization {
            Formalization::Formal(fw) => Some(WitnessSummary {
                steps: fw.steps.iter().map(|s| s.target_weight).collect(),
                strict_part: emit(&fw.final_structure),
            }),
            Formalization::Obstructed(_) => None,
        };
        Ok(Report {
            schema: SCHEMA_VERSION.to_string(),
            operad: Operad::from_symmetry(q.symmetry()),
            dim: q.space().dim(),
            max_weight: w,
            verdict: if formal { Verdict::FormalUpToW } else { Verdict::NonFormal },
            kaledin: KaledinSummary::new(kaledin),
            euler: EulerSummary::new(euler),
            degeneration,
            witness,
            timings,
        })
    }

    pub fn is_formal(&self) -> bool {
        self.verdict == Verdict::FormalUpToW
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "operad {:?}, dim {}, W = {}", self.operad, self.dim, self.max_weight)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        match self.kaledin.obstruction_weight {
            None => writeln!(f, "Kaledin class: K^<={} = 0", self.kaledin.vanishing_level)?,
            Some(w) => writeln!(f, "Kaledin class: vanishes to {}, obstruction at weight {w}", self.kaledin.vanishing_level)?,
        }
        match self.euler.first_nonzero_page {
            None => writeln!(f, "Euler class: survives to E_{}", self.euler.survives_to + 1)?,
            Some(r) => writeln!(f, "Euler class: d_{r}(e) ≠ 0 (obstruction at weight {r})")?,
        }
        writeln!(f, "degenerates at E_2: {}", self.degeneration)?;
        if let Some(o) = &self.kaledin.obstruction {
            writeln!(f, "obstruction:\n{o}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "gauge steps removed weights {:?}", w.steps)?;
        }
        Ok(())
    }
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    timings.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

/// Runs the Kaledin, Euler, degeneration and gauge computations and checks they agree.
pub fn crosscheck(q: &PInfStructure) -> Result<Report> {
    let mut timings = BTreeMap::new();
    let w = q.cutoff();
    let kaledin = timed(&mut timings, "kaledin", || {
        if w >= 2 {
            truncated_class(q, w)
        } else {
            Ok(KaledinReport { max_weight_checked: w, vanishing_level: w, witness: None, obstruction: None })
        }
    })?;
    let euler = timed(&mut timings, "euler", || push_euler(q))?;
    let degeneration = timed(&mut timings, "degeneration", || degenerates_at_e2(q))?;
    let formalization = timed(&mut timings, "formalize", || formalize(q))?;
    Report::new(q, &kaledin, &euler, degeneration, &formalization, timings)
}
