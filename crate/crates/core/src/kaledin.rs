//! The Kaledin class of a minimal homotopy algebra: its truncations, decided
//! by one joint linear system, and the constructive gauge-fixing loop.

use rayon::prelude::*;

use crate::coder::{
    ad_matrix, bracket, gauge, Coderivation, ComponentBasis, GaugeStep, PInfStructure,
};
use crate::error::{Error, Result};
use crate::exactla::{find_solution, RatMatrix, Rational, Solvability, SparseVec};
use crate::algcore::MultilinearOp;

/// `Q̃ = Σ_w (w − 1) q_w`.
pub fn kaledin_cocycle(q: &PInfStructure) -> Result<Coderivation> {
    let qt = q.q().weighted(|w| Rational::from_int(w as i64 - 1));
    if !bracket(q.q(), &qt)?.is_zero() {
        return Err(Error::internal("the Kaledin cocycle is not closed"));
    }
    Ok(qt)
}

/// A weight at which `[Q, T] = Q̃` has no solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub weight: usize,
    /// The right-hand side component `(w − 1) q_w` that cannot be reached.
    pub representative: MultilinearOp,
    /// A functional `y` with `yᵀA = 0` and `yᵀb ≠ 0` for the system at this weight.
    pub certificate: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaledinReport {
    pub max_weight_checked: usize,
    /// Largest `m ≤ max_weight_checked` with vanishing truncation `K^{≤m}`.
    pub vanishing_level: usize,
    /// `T` of codegree 0 in weights `1..m−1` with `[Q, T] ≡ Q̃` modulo weight `m + 1`.
    pub witness: Option<Coderivation>,
    pub obstruction: Option<Obstruction>,
}

impl KaledinReport {
    pub fn vanishes(&self) -> bool {
        self.obstruction.is_none()
    }

    fn check(&self) -> Result<()> {
        if (self.vanishing_level == self.max_weight_checked) == self.obstruction.is_some() {
            return Err(Error::internal("inconsistent Kaledin report"));
        }
        Ok(())
    }
}

struct JointSystem {
    /// Unknown blocks `t_1 … t_{n−1}` (codegree 0).
    unknowns: Vec<ComponentBasis>,
    /// Equation blocks for weights `2 … n` (codegree 1).
    equations: Vec<ComponentBasis>,
    /// `blocks[p − 2][i − 1]` is the matrix of `ad_{q_{p−i}}` from `t_i` into weight `p`.
    blocks: Vec<Vec<Option<RatMatrix>>>,
}

impl JointSystem {
    fn build(q: &PInfStructure, n: usize) -> Result<Self> {
        let space = q.space().clone();
        let sym = q.symmetry();
        let unknowns: Vec<ComponentBasis> =
            (1..n).map(|i| ComponentBasis::new(space.clone(), sym, i, 0)).collect();
        let equations: Vec<ComponentBasis> =
            (2..=n).map(|p| ComponentBasis::new(space.clone(), sym, p, 1)).collect();
        let blocks: Result<Vec<Vec<Option<RatMatrix>>>> = (2..=n)
            .into_par_iter()
            .map(|p| {
                (1..p)
                    .map(|i| match q.q().component(p - i) {
                        Some(qj) => ad_matrix(qj, &unknowns[i - 1], &equations[p - 2]).map(Some),
                        None => Ok(None),
                    })
                    .collect()
            })
            .collect();
        Ok(JointSystem { unknowns, equations, blocks: blocks? })
    }

    /// The subsystem for weights `2..=m`.
    fn assemble(&self, q: &PInfStructure, m: usize) -> Result<(RatMatrix, SparseVec)> {
        let col_off: Vec<usize> = std::iter::once(0)
            .chain(self.unknowns[..m - 1].iter().scan(0, |s, b| {
                *s += b.len();
                Some(*s)
            }))
            .collect();
        let row_off: Vec<usize> = std::iter::once(0)
            .chain(self.equations[..m - 1].iter().scan(0, |s, b| {
                *s += b.len();
                Some(*s)
            }))
            .collect();
        let mut triplets = Vec::new();
        let mut rhs = Vec::new();
        for p in 2..=m {
            for i in 1..p {
                if let Some(block) = &self.blocks[p - 2][i - 1] {
                    for r in 0..block.rows() {
                        for (c, v) in block.row(r).iter() {
                            triplets.push((row_off[p - 2] + r, col_off[i - 1] + c, v.clone()));
                        }
                    }
                }
            }
            let target = q.q_w(p).scaled(&Rational::from_int(p as i64 - 1));
            let coords = self.equations[p - 2].coordinates(&target)?;
            rhs.extend(coords.iter().map(|(k, c)| (row_off[p - 2] + k, c.clone())));
        }
        let a = RatMatrix::from_triplets(row_off[m - 1], col_off[m - 1], triplets)?;
        Ok((a, SparseVec::from_pairs(rhs)))
    }

    fn witness(&self, q: &PInfStructure, m: usize, x: &SparseVec) -> Result<Coderivation> {
        let mut t = Coderivation::zero(q.space().clone(), q.symmetry(), 0, q.cutoff());
        let mut off = 0;
        for (k, basis) in self.unknowns[..m - 1].iter().enumerate() {
            let local = SparseVec::from_pairs(
                x.iter().filter(|(i, _)| (off..off + basis.len()).contains(i)).map(|(i, c)| (i - off, c.clone())),
            );
            t.set_component(k + 1, basis.to_op(&local))?;
            off += basis.len();
        }
        Ok(t)
    }
}

/// Decides the truncations `K^{≤m}` for `m ≤ n` by solving the nested systems
/// `Σ_j [q_j, t_{p−j}] = (p − 1) q_p`, `2 ≤ p ≤ m`.
pub fn truncated_class(q: &PInfStructure, n: usize) -> Result<KaledinReport> {
    if n < 2 || n > q.cutoff() {
        return Err(Error::contract(format!("truncation level {n} must lie in 2..={}", q.cutoff())));
    }
    let system = JointSystem::build(q, n)?;
    let mut witness = None;
    for m in 2..=n {
        let (a, b) = system.assemble(q, m)?;
        match find_solution(&a, &b)? {
            Solvability::Solution(x) => {
                let t = system.witness(q, m, &x)?;
                verify_witness(q, &t, m)?;
                witness = Some(t);
            }
            Solvability::Certificate(y) => {
                let report = KaledinReport {
                    max_weight_checked: n,
                    vanishing_level: m - 1,
                    witness,
                    obstruction: Some(Obstruction {
                        weight: m,
                        representative: q.q_w(m).scaled(&Rational::from_int(m as i64 - 1)),
                        certificate: y,
                    }),
                };
                report.check()?;
                return Ok(report);
            }
        }
    }
    let report = KaledinReport { max_weight_checked: n, vanishing_level: n, witness, obstruction: None };
    report.check()?;
    Ok(report)
}

/// `[Q, T] ≡ Q̃` in weights `≤ m`.
fn verify_witness(q: &PInfStructure, t: &Coderivation, m: usize) -> Result<()> {
    let lhs = bracket(q.q(), t)?;
    let rhs = q.q().weighted(|w| Rational::from_int(w as i64 - 1));
    for w in 0..=m {
        if lhs.component_or_zero(w) != rhs.component_or_zero(w) {
            return Err(Error::internal(format!("Kaledin witness fails in weight {w}")));
        }
    }
    Ok(())
}

/// An explicit isomorphism to the strict part, as a sequence of gauge steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalityWitness {
    pub steps: Vec<GaugeStep>,
    pub final_structure: PInfStructure,
}

impl FormalityWitness {
    /// Re-applies the steps to `q` and checks the result is strict and equal to the recorded one.
    pub fn verify(&self, q: &PInfStructure) -> Result<bool> {
        let mut cur = q.clone();
        for step in &self.steps {
            cur = gauge(&cur, step)?;
        }
        Ok(cur == self.final_structure && cur.is_strict())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formalization {
    Formal(FormalityWitness),
    Obstructed(KaledinReport),
}

impl Formalization {
    pub fn is_formal(&self) -> bool {
        matches!(self, Formalization::Formal(_))
    }
}

/// Kills `q_2, q_3, …` one weight at a time by solving `[q_1, t] = (i − 1) q_i`
/// and gauging by `τ = t / (i − 1)`.
pub fn formalize(q: &PInfStructure) -> Result<Formalization> {
    let cutoff = q.cutoff();
    let mut cur = q.clone();
    let mut steps = Vec::new();
    let q1 = q.q_w(1);
    loop {
        let Some(i) = cur.q().weights().find(|&w| w >= 2) else { break };
        let src = ComponentBasis::new(q.space().clone(), q.symmetry(), i - 1, 0);
        let dst = ComponentBasis::new(q.space().clone(), q.symmetry(), i, 1);
        let a = ad_matrix(&q1, &src, &dst)?;
        let target = cur.q_w(i).scaled(&Rational::from_int(i as i64 - 1));
        let b = dst.coordinates(&target)?;
        match find_solution(&a, &b)? {
            Solvability::Solution(x) => {
                let tau = src.to_coderivation(&x, cutoff)?.scaled(&Rational::from_int(i as i64 - 1).recip());
                let step = GaugeStep::new(tau, i)?;
                let next = gauge(&cur, &step)?;
                if next.q().component(i).is_some() {
                    return Err(Error::internal(format!("gauge step did not remove weight {i}")));
                }
                steps.push(step);
                cur = next;
            }
            Solvability::Certificate(y) => {
                let report = KaledinReport {
                    max_weight_checked: cutoff,
                    vanishing_level: i - 1,
                    witness: None,
                    obstruction: Some(Obstruction { weight: i, representative: target, certificate: y }),
                };
                report.check()?;
                return Ok(Formalization::Obstructed(report));
            }
        }
    }
    Ok(Formalization::Formal(FormalityWitness { steps, final_structure: cur }))
}
