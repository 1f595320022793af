//! Ready-made structures: strict algebras, Massey-type examples, gauged and
//! mixed random corpora, and dg algebras for transfer.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coder::{gauge, Coderivation, ComponentBasis, GaugeStep, PInfStructure};
use crate::error::Result;
use crate::exactla::{Rational, SparseVec};
use crate::ingest::{
    parse, BasisEntry, DgAlgebraSpec, Operad, OperationRecord, ProblemSpec, ProductRecord, SCHEMA_VERSION,
};

type Term<'a> = (&'a str, i64);

fn basis(entries: &[(&str, i64)]) -> Vec<BasisEntry> {
    entries.iter().map(|(n, d)| BasisEntry { name: n.to_string(), degree: *d }).collect()
}

fn output(terms: &[Term]) -> BTreeMap<String, Rational> {
    terms.iter().map(|(n, c)| (n.to_string(), Rational::from_int(*c))).collect()
}

/// A problem spec from `(weight, inputs, output)` records with integer coefficients.
pub fn problem(
    operad: Operad,
    elements: &[(&str, i64)],
    ops: &[(usize, &[&str], &[Term])],
    max_weight: usize,
) -> ProblemSpec {
    ProblemSpec {
        schema: SCHEMA_VERSION.to_string(),
        operad,
        basis: basis(elements),
        operations: ops
            .iter()
            .map(|(w, inputs, out)| OperationRecord {
                weight: *w,
                inputs: inputs.iter().map(|s| s.to_string()).collect(),
                output: output(out),
            })
            .collect(),
        max_weight,
        options: BTreeMap::new(),
    }
}

/// A strict algebra given by its binary products.
pub fn strict(operad: Operad, elements: &[(&str, i64)], products: &[(&str, &str, &[Term])], max_weight: usize) -> ProblemSpec {
    let ops: Vec<(usize, Vec<&str>, &[Term])> = products.iter().map(|(a, b, out)| (1, vec![*a, *b], *out)).collect();
    let ops: Vec<(usize, &[&str], &[Term])> = ops.iter().map(|(w, i, o)| (*w, i.as_slice(), *o)).collect();
    problem(operad, elements, &ops, max_weight)
}

fn build(spec: ProblemSpec) -> PInfStructure {
    parse(&spec).expect("built-in fixture is valid")
}

/// `{e : 1, f : 2}` with the single operation `q_k(e, …, e) = f` of arity `k + 1`.
pub fn weight_concentrated_spec(operad: Operad, k: usize, max_weight: usize) -> ProblemSpec {
    let inputs = vec!["e"; k + 1];
    problem(operad, &[("e", 1), ("f", 2)], &[(k, &inputs, &[("f", 1)])], max_weight)
}

pub fn weight_concentrated(operad: Operad, k: usize, max_weight: usize) -> PInfStructure {
    build(weight_concentrated_spec(operad, k, max_weight))
}

/// `m_3(e, e, e) = f`, a minimal A∞ structure with a nontrivial Massey product.
pub fn massey_spec(max_weight: usize) -> ProblemSpec {
    weight_concentrated_spec(Operad::Ass, 2, max_weight)
}

pub fn massey(max_weight: usize) -> PInfStructure {
    build(massey_spec(max_weight))
}

/// The exterior algebra on one generator of degree 1, with unit.
pub fn exterior_unital(max_weight: usize) -> PInfStructure {
    build(strict(
        Operad::Ass,
        &[("1", 0), ("x", 1)],
        &[("1", "1", &[("1", 1)]), ("1", "x", &[("x", 1)]), ("x", "1", &[("x", 1)])],
        max_weight,
    ))
}

/// The augmentation ideal of the exterior algebra on two degree-1 generators.
pub fn exterior_ideal(max_weight: usize) -> PInfStructure {
    build(strict(
        Operad::Ass,
        &[("x", 1), ("y", 1), ("xy", 2)],
        &[("x", "y", &[("xy", 1)]), ("y", "x", &[("xy", -1)])],
        max_weight,
    ))
}

/// `x, x², …, x^n` with `x` in degree `degree` and `x^{n+1} = 0`, without unit.
pub fn truncated_polynomial(n: usize, degree: i64, max_weight: usize) -> PInfStructure {
    let names: Vec<String> = (1..=n).map(|k| if k == 1 { "x".into() } else { format!("x{k}") }).collect();
    let mut spec = ProblemSpec {
        schema: SCHEMA_VERSION.to_string(),
        operad: Operad::Ass,
        basis: names.iter().enumerate().map(|(k, s)| BasisEntry { name: s.clone(), degree: degree * (k as i64 + 1) }).collect(),
        operations: Vec::new(),
        max_weight,
        options: BTreeMap::new(),
    };
    for a in 1..n {
        for b in 1..=n - a {
            spec.operations.push(OperationRecord {
                weight: 1,
                inputs: vec![names[a - 1].clone(), names[b - 1].clone()],
                output: output(&[(&names[a + b - 1], 1)]),
            });
        }
    }
    build(spec)
}

pub fn sl2(max_weight: usize) -> PInfStructure {
    build(strict(
        Operad::Lie,
        &[("e", 0), ("f", 0), ("h", 0)],
        &[("h", "e", &[("e", 2)]), ("h", "f", &[("f", -2)]), ("e", "f", &[("h", 1)])],
        max_weight,
    ))
}

pub fn heisenberg(max_weight: usize) -> PInfStructure {
    build(strict(Operad::Lie, &[("x", 0), ("y", 0), ("z", 0)], &[("x", "y", &[("z", 1)])], max_weight))
}

/// `{x : 1, z : 2}` with `[x, x] = z`.
pub fn graded_lie_square(max_weight: usize) -> PInfStructure {
    build(strict(Operad::Lie, &[("x", 1), ("z", 2)], &[("x", "x", &[("z", 1)])], max_weight))
}

/// `{x, y : 1, z : 2}` with `[x, y] = z`.
pub fn graded_heisenberg(max_weight: usize) -> PInfStructure {
    build(strict(Operad::Lie, &[("x", 1), ("y", 1), ("z", 2)], &[("x", "y", &[("z", 1)])], max_weight))
}

/// `{x, y : 1, z, u : 2}` with `[x, x] = [y, y] = z` and `[x, y] = u`.
pub fn graded_lie_quadric(max_weight: usize) -> PInfStructure {
    build(strict(
        Operad::Lie,
        &[("x", 1), ("y", 1), ("z", 2), ("u", 2)],
        &[("x", "x", &[("z", 1)]), ("y", "y", &[("z", 1)]), ("x", "y", &[("u", 1)])],
        max_weight,
    ))
}

/// The unital exterior algebra on two degree-1 generators.
pub fn exterior_two_unital(max_weight: usize) -> PInfStructure {
    build(strict(
        Operad::Ass,
        &[("1", 0), ("x", 1), ("y", 1), ("xy", 2)],
        &[
            ("1", "1", &[("1", 1)]),
            ("1", "x", &[("x", 1)]),
            ("x", "1", &[("x", 1)]),
            ("1", "y", &[("y", 1)]),
            ("y", "1", &[("y", 1)]),
            ("1", "xy", &[("xy", 1)]),
            ("xy", "1", &[("xy", 1)]),
            ("x", "y", &[("xy", 1)]),
            ("y", "x", &[("xy", -1)]),
        ],
        max_weight,
    ))
}

/// Strict structures whose formality is classical, with a short name.
pub fn strict_corpus(max_weight: usize) -> Vec<(&'static str, PInfStructure)> {
    vec![
        ("exterior_unital", exterior_unital(max_weight)),
        ("exterior_ideal", exterior_ideal(max_weight)),
        ("truncated_x3_deg1", truncated_polynomial(3, 1, max_weight)),
        ("truncated_x3_deg2", truncated_polynomial(3, 2, max_weight)),
        ("sl2", sl2(max_weight)),
        ("heisenberg", heisenberg(max_weight)),
    ]
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from_int(rng.gen_range(-3..=3))
}

/// A random `τ ∈ F¹` of codegree 0 with coefficients in `[−3, 3]`.
pub fn random_gauge(q: &PInfStructure, rng: &mut ChaCha8Rng, density: f64) -> Result<Coderivation> {
    let mut tau = Coderivation::zero(q.space().clone(), q.symmetry(), 0, q.cutoff());
    for w in 1..q.cutoff() {
        let basis = ComponentBasis::new(q.space().clone(), q.symmetry(), w, 0);
        let mut pairs = Vec::new();
        for k in 0..basis.len() {
            if rng.gen_bool(density) {
                pairs.push((k, random_coeff(rng)));
            }
        }
        let coords = SparseVec::from_pairs(pairs);
        tau.set_component(w, basis.to_op(&coords))?;
    }
    Ok(tau)
}

/// Bases for the random gauge corpus, sized so that `dim` and `W` stay within desk scale.
fn gauge_bases(operad: Operad) -> Vec<PInfStructure> {
    match operad {
        Operad::Ass => vec![exterior_unital(5), truncated_polynomial(3, 1, 4), exterior_two_unital(3)],
        Operad::Lie => vec![graded_lie_square(5), graded_heisenberg(4), graded_lie_quadric(3)],
    }
}

/// A strict structure conjugated by a random gauge, together with the strict original.
#[derive(Clone, Debug)]
pub struct GaugedInstance {
    pub strict: PInfStructure,
    pub gauged: PInfStructure,
}

pub fn gauge_corpus(operad: Operad, count: usize, seed: u64) -> Result<Vec<GaugedInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = gauge_bases(operad);
    (0..count)
        .map(|k| {
            let strict = bases[k % bases.len()].clone();
            let tau = random_gauge(&strict, &mut rng, 0.5)?;
            let gauged = gauge(&strict, &GaugeStep::new(tau, 0)?)?;
            Ok(GaugedInstance { strict, gauged })
        })
        .collect()
}

/// Random structures `{e, u : 1, f : 2}` whose operations all land in `f`,
/// so that `[Q, Q] = 0` holds automatically, then conjugated by a random gauge.
/// Some are formal and some are not.
pub fn mixed_corpus(count: usize, seed: u64) -> Result<Vec<PInfStructure>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let operad = if k % 2 == 0 { Operad::Ass } else { Operad::Lie };
            let max_weight = 3 + k % 2;
            let names = ["e", "u"];
            let mut ops: Vec<(usize, Vec<&str>, i64)> = Vec::new();
            for w in 1..=max_weight {
                if !rng.gen_bool(0.7) {
                    continue;
                }
                for code in 0..(1usize << (w + 1)) {
                    let inputs: Vec<&str> = (0..=w).map(|b| names[(code >> b) & 1]).collect();
                    if operad == Operad::Lie && inputs.windows(2).any(|p| p[0] > p[1]) {
                        continue;
                    }
                    if rng.gen_bool(0.5) {
                        ops.push((w, inputs, rng.gen_range(-3..=3)));
                    }
                }
            }
            let records: Vec<(usize, &[&str], [Term; 1])> =
                ops.iter().map(|(w, i, c)| (*w, i.as_slice(), [("f", *c)])).collect();
            let records: Vec<(usize, &[&str], &[Term])> = records.iter().map(|(w, i, o)| (*w, *i, &o[..])).collect();
            let q = parse(&problem(operad, &[("e", 1), ("u", 1), ("f", 2)], &records, max_weight))?;
            let tau = random_gauge(&q, &mut rng, 0.3)?;
            gauge(&q, &GaugeStep::new(tau, 0)?)
        })
        .collect()
}

/// The product `e · e = f`, `f · e = e` on degree-0 elements, which is not associative.
pub fn non_associative_spec(max_weight: usize) -> ProblemSpec {
    strict(Operad::Ass, &[("e", 0), ("f", 0)], &[("e", "e", &[("f", 1)]), ("f", "e", &[("e", 1)])], max_weight)
}

fn dga(elements: &[(&str, i64)], differential: &[(&str, &[Term])], product: &[(&str, &str, &[Term])]) -> DgAlgebraSpec {
    DgAlgebraSpec {
        schema: SCHEMA_VERSION.to_string(),
        basis: basis(elements),
        differential: differential.iter().map(|(n, v)| (n.to_string(), output(v))).collect(),
        product: product
            .iter()
            .map(|(a, b, v)| ProductRecord { inputs: [a.to_string(), b.to_string()], output: output(v) })
            .collect(),
        max_weight: None,
    }
}

/// Cocycles `a, b, c` with `ab = dx`, `bc = dy`; the Massey product `⟨a, b, c⟩` is `[xc + ay]`.
pub fn massey_dga() -> DgAlgebraSpec {
    massey_dga_ordered(&["a", "b", "c", "x", "y", "ab", "bc", "xc", "ay"])
}

/// The same dg algebra with its basis listed in the given order.
pub fn massey_dga_ordered(order: &[&str]) -> DgAlgebraSpec {
    let degree = |n: &str| if n.len() == 1 { 1 } else { 2 };
    let elements: Vec<(&str, i64)> = order.iter().map(|n| (*n, degree(n))).collect();
    dga(
        &elements,
        &[("x", &[("ab", 1)]), ("y", &[("bc", 1)])],
        &[("a", "b", &[("ab", 1)]), ("b", "c", &[("bc", 1)]), ("x", "c", &[("xc", 1)]), ("a", "y", &[("ay", 1)])],
    )
}

/// The unital exterior algebra on two degree-1 generators with zero differential.
pub fn exterior_dga() -> DgAlgebraSpec {
    dga(
        &[("1", 0), ("x", 1), ("y", 1), ("xy", 2)],
        &[],
        &[
            ("1", "1", &[("1", 1)]),
            ("1", "x", &[("x", 1)]),
            ("x", "1", &[("x", 1)]),
            ("1", "y", &[("y", 1)]),
            ("y", "1", &[("y", 1)]),
            ("1", "xy", &[("xy", 1)]),
            ("xy", "1", &[("xy", 1)]),
            ("x", "y", &[("xy", 1)]),
            ("y", "x", &[("xy", -1)]),
        ],
    )
}

/// `u ↦ v` with `d u = v`: acyclic.
pub fn acyclic_dga() -> DgAlgebraSpec {
    dga(&[("u", 0), ("v", 1)], &[("u", &[("v", 1)])], &[])
}
