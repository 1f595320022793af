//! The weight-graded dg Lie algebra of coderivations of the cofree coalgebra,
//! truncated above a weight cutoff `W`.
//!
//! A coderivation is stored through its corestriction: the weight-`w` component
//! is an arity-`(w+1)` operation on `sA` whose degree is the codegree.

mod basis;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use basis::{ad_matrix, ComponentBasis};

use crate::algcore::{compose_into, GradedSpace, MultilinearOp, PreparedOp, SymmetryType};
use crate::error::{Error, Result};
use crate::exactla::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Coderivation {
    space: Arc<GradedSpace>,
    symmetry: SymmetryType,
    codegree: i64,
    cutoff: usize,
    /// Only nonzero components are stored.
    components: BTreeMap<usize, MultilinearOp>,
}

impl Coderivation {
    pub fn zero(space: Arc<GradedSpace>, symmetry: SymmetryType, codegree: i64, cutoff: usize) -> Self {
        assert!(cutoff >= 1, "weight cutoff must be at least 1");
        Coderivation { space, symmetry, codegree, cutoff, components: BTreeMap::new() }
    }

    /// Builds from `(weight, component)` pairs, checking shapes.
    pub fn from_components<I>(
        space: Arc<GradedSpace>,
        symmetry: SymmetryType,
        codegree: i64,
        cutoff: usize,
        components: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, MultilinearOp)>,
    {
        let mut out = Self::zero(space, symmetry, codegree, cutoff);
        for (w, op) in components {
            out.add_component(w, &op)?;
        }
        Ok(out)
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn symmetry(&self) -> SymmetryType {
        self.symmetry
    }

    pub fn codegree(&self) -> i64 {
        self.codegree
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn component(&self, w: usize) -> Option<&MultilinearOp> {
        self.components.get(&w)
    }

    /// Weight-`w` component, zero if absent.
    pub fn component_or_zero(&self, w: usize) -> MultilinearOp {
        self.components
            .get(&w)
            .cloned()
            .unwrap_or_else(|| MultilinearOp::zero(self.space.clone(), w + 1, self.codegree, self.symmetry))
    }

    /// Weights carrying a nonzero component, ascending.
    pub fn weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &MultilinearOp)> + '_ {
        self.components.iter().map(|(w, op)| (*w, op))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Smallest weight with a nonzero component.
    pub fn lowest_weight(&self) -> Option<usize> {
        self.components.keys().next().copied()
    }

    fn check_component(&self, w: usize, op: &MultilinearOp) -> Result<()> {
        if w > self.cutoff {
            return Err(Error::contract(format!("weight {w} exceeds the cutoff {}", self.cutoff)));
        }
        if op.arity() != w + 1 || op.degree() != self.codegree || op.symmetry() != self.symmetry {
            return Err(Error::contract(format!(
                "weight-{w} component must have arity {}, degree {} and {} symmetry; got arity {}, degree {}, {}",
                w + 1,
                self.codegree,
                self.symmetry,
                op.arity(),
                op.degree(),
                op.symmetry()
            )));
        }
        if !Arc::ptr_eq(op.space(), &self.space) && **op.space() != *self.space {
            return Err(Error::contract("component lives on a different graded space"));
        }
        Ok(())
    }

    /// Adds `op` to the weight-`w` component.
    pub fn add_component(&mut self, w: usize, op: &MultilinearOp) -> Result<()> {
        self.check_component(w, op)?;
        if op.is_zero() {
            return Ok(());
        }
        match self.components.get_mut(&w) {
            Some(existing) => {
                existing.add_scaled(&Rational::ONE, op)?;
                if existing.is_zero() {
                    self.components.remove(&w);
                }
            }
            None => {
                self.components.insert(w, op.clone());
            }
        }
        Ok(())
    }

    pub fn set_component(&mut self, w: usize, op: MultilinearOp) -> Result<()> {
        self.check_component(w, &op)?;
        if op.is_zero() {
            self.components.remove(&w);
        } else {
            self.components.insert(w, op);
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Coderivation) -> Result<()> {
        if self.symmetry != other.symmetry {
            return Err(Error::contract("coderivations have different symmetry types"));
        }
        if self.cutoff != other.cutoff {
            return Err(Error::contract(format!(
                "coderivations have different cutoffs ({} and {})",
                self.cutoff, other.cutoff
            )));
        }
        if !Arc::ptr_eq(&self.space, &other.space) && *self.space != *other.space {
            return Err(Error::contract("coderivations live on different graded spaces"));
        }
        Ok(())
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Coderivation) -> Result<()> {
        self.check_same_shape(other)?;
        if self.codegree != other.codegree {
            return Err(Error::contract("cannot add coderivations of different codegrees"));
        }
        for (w, op) in &other.components {
            self.add_component(*w, &op.scaled(c))?;
        }
        Ok(())
    }

    pub fn plus(&self, other: &Coderivation) -> Result<Coderivation> {
        let mut out = self.clone();
        out.add_scaled(&Rational::ONE, other)?;
        Ok(out)
    }

    pub fn minus(&self, other: &Coderivation) -> Result<Coderivation> {
        let mut out = self.clone();
        out.add_scaled(&-Rational::ONE, other)?;
        Ok(out)
    }

    pub fn scaled(&self, c: &Rational) -> Coderivation {
        let mut out = Self::zero(self.space.clone(), self.symmetry, self.codegree, self.cutoff);
        if !c.is_zero() {
            out.components = self.components.iter().map(|(w, op)| (*w, op.scaled(c))).collect();
        }
        out
    }

    /// Multiplies the weight-`w` component by `f(w)`.
    pub fn weighted(&self, f: impl Fn(usize) -> Rational) -> Coderivation {
        let mut out = Self::zero(self.space.clone(), self.symmetry, self.codegree, self.cutoff);
        for (w, op) in &self.components {
            let c = f(*w);
            if !c.is_zero() {
                out.components.insert(*w, op.scaled(&c));
            }
        }
        out
    }

    pub fn dump(&self, label: &str) -> String {
        self.components
            .iter()
            .map(|(w, op)| op.dump(&format!("{label}_{w}")))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for Coderivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Coderivation[{} codegree {} cutoff {}] {{", self.symmetry, self.codegree, self.cutoff)?;
        let body = self.dump("  x");
        if !body.is_empty() {
            writeln!(f, "{body}")?;
        }
        write!(f, "}}")
    }
}

/// Graded commutator `[f, g] = f•g − (−1)^{|f||g|} g•f`, truncated at the cutoff.
pub fn bracket(f: &Coderivation, g: &Coderivation) -> Result<Coderivation> {
    f.check_same_shape(g)?;
    let cutoff = f.cutoff;
    let sign = if f.codegree & 1 != 0 && g.codegree & 1 != 0 { Rational::ONE } else { -Rational::ONE };
    let mut acc: BTreeMap<usize, BTreeMap<_, _>> = BTreeMap::new();
    let prepared_f: Vec<(usize, PreparedOp)> = f.components.iter().map(|(w, op)| (*w, PreparedOp::new(op))).collect();
    let prepared_g: Vec<(usize, PreparedOp)> = g.components.iter().map(|(w, op)| (*w, PreparedOp::new(op))).collect();
    for (i, pf) in &prepared_f {
        for (j, pg) in &prepared_g {
            let p = i + j;
            if p > cutoff {
                continue;
            }
            let slot = acc.entry(p).or_default();
            compose_into(slot, pf, pg.op(), &Rational::ONE);
            compose_into(slot, pg, pf.op(), &sign);
        }
    }
    let codegree = f.codegree + g.codegree;
    let mut out = Coderivation::zero(f.space.clone(), f.symmetry, codegree, cutoff);
    for (p, coeffs) in acc {
        let op = MultilinearOp::from_canonical(f.space.clone(), p + 1, codegree, f.symmetry, coeffs);
        if !op.is_zero() {
            out.components.insert(p, op);
        }
    }
    Ok(out)
}

/// Keeps only the components with weight in `[lo, hi]`.
pub fn filtration_part(x: &Coderivation, lo: usize, hi: usize) -> Result<Coderivation> {
    if lo > hi || hi > x.cutoff {
        return Err(Error::contract(format!("invalid weight window [{lo}, {hi}] for cutoff {}", x.cutoff)));
    }
    let mut out = x.clone();
    out.components.retain(|w, _| (lo..=hi).contains(w));
    Ok(out)
}

/// Outcome of checking `[q, q] = 0` weight by weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McVerdict {
    Ok,
    Fails { weight: usize, residual: MultilinearOp },
}

impl McVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, McVerdict::Ok)
    }
}

pub fn mc_check(q: &Coderivation) -> Result<McVerdict> {
    if q.codegree != 1 {
        return Err(Error::contract(format!("Maurer-Cartan check needs codegree 1, got {}", q.codegree)));
    }
    if q.component(0).is_some() {
        return Err(Error::contract("Maurer-Cartan check needs a vanishing weight-0 component"));
    }
    let sq = bracket(q, q)?;
    Ok(match sq.components.into_iter().next() {
        None => McVerdict::Ok,
        Some((weight, residual)) => McVerdict::Fails { weight, residual },
    })
}

/// A minimal homotopy algebra: a codegree-1 coderivation with no weight-0 part
/// that squares to zero up to the cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PInfStructure {
    q: Coderivation,
}

impl PInfStructure {
    pub fn new(q: Coderivation) -> Result<Self> {
        match mc_check(&q)? {
            McVerdict::Ok => Ok(PInfStructure { q }),
            McVerdict::Fails { weight, residual } => Err(Error::MaurerCartan {
                weight,
                relation: format!("[Q,Q]_{weight} ≠ 0:\n{}", residual.dump(&format!("[Q,Q]_{weight}"))),
            }),
        }
    }

    pub fn q(&self) -> &Coderivation {
        &self.q
    }

    pub fn into_coderivation(self) -> Coderivation {
        self.q
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.q.space
    }

    pub fn symmetry(&self) -> SymmetryType {
        self.q.symmetry
    }

    pub fn cutoff(&self) -> usize {
        self.q.cutoff
    }

    /// `q_w`, zero if absent.
    pub fn q_w(&self, w: usize) -> MultilinearOp {
        self.q.component_or_zero(w)
    }

    /// True when only `q_1` is present.
    pub fn is_strict(&self) -> bool {
        self.q.weights().all(|w| w == 1)
    }

    /// Same structure with a smaller cutoff.
    pub fn truncated(&self, cutoff: usize) -> Result<PInfStructure> {
        if cutoff == 0 || cutoff > self.cutoff() {
            return Err(Error::contract(format!("cannot truncate cutoff {} to {cutoff}", self.cutoff())));
        }
        let mut q = Coderivation::zero(self.space().clone(), self.symmetry(), 1, cutoff);
        for (w, op) in self.q.components() {
            if w <= cutoff {
                q.set_component(w, op.clone())?;
            }
        }
        Ok(PInfStructure { q })
    }
}

/// `d_Q x = [Q, x]`.
pub fn d_q(q: &PInfStructure, x: &Coderivation) -> Result<Coderivation> {
    bracket(&q.q, x)
}

/// A gauge transformation by a codegree-0 coderivation in positive weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeStep {
    pub tau: Coderivation,
    /// The weight whose operation this step removes.
    pub target_weight: usize,
}

impl GaugeStep {
    pub fn new(tau: Coderivation, target_weight: usize) -> Result<Self> {
        if tau.codegree != 0 {
            return Err(Error::contract(format!("gauge parameter must have codegree 0, got {}", tau.codegree)));
        }
        if tau.component(0).is_some() {
            return Err(Error::contract("gauge parameter must vanish in weight 0"));
        }
        Ok(GaugeStep { tau, target_weight })
    }

    pub fn inverse(&self) -> GaugeStep {
        GaugeStep { tau: self.tau.scaled(&-Rational::ONE), target_weight: self.target_weight }
    }
}

/// `exp(ad_τ)(x) = Σ_k ad_τ^k(x) / k!`, truncated at the cutoff.
pub fn exp_ad(tau: &Coderivation, x: &Coderivation) -> Result<Coderivation> {
    if tau.codegree != 0 || tau.component(0).is_some() {
        return Err(Error::contract("exp(ad τ) needs τ of codegree 0 in positive weight"));
    }
    let mut out = x.clone();
    let mut term = x.clone();
    let mut k = 0u32;
    loop {
        term = bracket(tau, &term)?;
        if term.is_zero() {
            return Ok(out);
        }
        k += 1;
        out.add_scaled(&Rational::factorial(k).recip(), &term)?;
    }
}

/// Conjugates `q` by the gauge step.
pub fn gauge(q: &PInfStructure, step: &GaugeStep) -> Result<PInfStructure> {
    let r = exp_ad(&step.tau, &q.q)?;
    PInfStructure::new(r).map_err(|e| Error::internal(format!("gauge transformation broke Maurer-Cartan: {e}")))
}
