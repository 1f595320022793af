//! Acceptance suite: one PASS/FAIL line per criterion. All comparisons are exact.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use operformal::algcore::SymmetryType;
use operformal::coder::{bracket, d_q, gauge, mc_check, Coderivation, ComponentBasis, PInfStructure};
use operformal::exactla::{RatMatrix, Rational, SparseVec};
use operformal::fixtures;
use operformal::ingest::{classical_value, crosscheck, transfer, DgAlgebra, Operad, Verdict};
use operformal::kaledin::{formalize, truncated_class, Formalization};
use operformal::spectral::{
    degenerates_at_e2, euler_derivation, push_euler, FilteredComplex, OperadicSS, SpectralSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sign(odd: bool) -> Rational {
    if odd {
        q(-1)
    } else {
        q(1)
    }
}

fn random_coder_in(rng: &mut ChaCha8Rng, sym: SymmetryType) -> (Coderivation, Coderivation, Coderivation) {
    let dim = rng.gen_range(1..=3);
    let degrees: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=2)).collect();
    let sp = space(&degrees);
    let mut pick = || {
        let d = rng.gen_range(-1..=1);
        random_coder(rng, &sp, sym, d, 3, 3, 0.35)
    };
    (pick(), pick(), pick())
}

fn c1_bracket_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nonzero = 0;
    for sym in SYMMETRIES {
        for k in 0..200 {
            let (f, g, h) = random_coder_in(&mut rng, sym);
            let fg = bracket(&f, &g).unwrap();
            let gf = bracket(&g, &f).unwrap();
            check(fg == gf.scaled(&-sign(f.codegree() * g.codegree() % 2 != 0)), || {
                format!("antisymmetry fails for {sym} pair {k}")
            })?;
            let lhs = bracket(&f, &bracket(&g, &h).unwrap()).unwrap();
            let mut rhs = bracket(&fg, &h).unwrap();
            rhs.add_scaled(&sign(f.codegree() * g.codegree() % 2 != 0), &bracket(&g, &bracket(&f, &h).unwrap()).unwrap())
                .unwrap();
            check(lhs == rhs, || format!("Jacobi fails for {sym} triple {k}"))?;
            nonzero += !lhs.is_zero() as usize;
        }
    }
    Ok(format!("200 pairs and 200 triples per symmetry type, {nonzero} nonzero Jacobi sides"))
}

fn c2_euler_identity() -> Outcome {
    let lists: &[&[i64]] = &[&[0], &[1], &[-1], &[0, 1], &[1, 2], &[0, 2], &[-1, 1], &[0, 1, 2], &[1, 1, 2], &[-1, 0, 3], &[0, 0, 1]];
    let mut count = 0;
    for sym in SYMMETRIES {
        for degrees in lists {
            let sp = space(degrees);
            let e = euler_derivation(&sp, sym, 4);
            for p in 0..=4 {
                for (d, basis) in ComponentBasis::all_codegrees(sp.clone(), sym, p) {
                    for i in 0..basis.len() {
                        let beta = basis.to_coderivation(&SparseVec::unit(i), 4).unwrap();
                        check(bracket(&beta, &e).unwrap() == beta.scaled(&q(p as i64 - d)), || {
                            format!("{sym} degrees {degrees:?}, p = {p}, D = {d}, element {i}")
                        })?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} basis coderivations, dim <= 3, p <= 4, both operads"))
}

fn fixture_corpus() -> Vec<(String, PInfStructure)> {
    let mut out: Vec<(String, PInfStructure)> =
        fixtures::strict_corpus(5).into_iter().map(|(n, q)| (n.to_string(), q)).collect();
    out.push(("massey".into(), fixtures::massey(4)));
    for operad in [Operad::Ass, Operad::Lie] {
        for k in 1..=3 {
            out.push((format!("concentrated_{operad:?}_{k}"), fixtures::weight_concentrated(operad, k, 4)));
        }
        for (i, g) in fixtures::gauge_corpus(operad, 100, 6).unwrap().into_iter().enumerate() {
            out.push((format!("gauged_{operad:?}_{i}"), g.gauged));
        }
    }
    for (i, q) in fixtures::mixed_corpus(50, 7).unwrap().into_iter().enumerate() {
        out.push((format!("mixed_{i}"), q));
    }
    out
}

fn c3_dq_euler(corpus: &[(String, PInfStructure)]) -> Outcome {
    for (name, q) in corpus {
        let e = euler_derivation(q.space(), q.symmetry(), q.cutoff());
        let qt = q.q().weighted(|w| q_of(w as i64 - 1));
        check(d_q(q, &e).unwrap() == qt, || name.clone())?;
    }
    Ok(format!("{} fixtures", corpus.len()))
}

fn q_of(n: i64) -> Rational {
    q(n)
}

fn c4_massey() -> Outcome {
    let start = Instant::now();
    let q = fixtures::massey(4);
    check(mc_check(q.q()).unwrap().is_ok(), || "mc_check fails".into())?;
    let k = truncated_class(&q, 2).unwrap();
    check(k.obstruction.as_ref().map(|o| o.weight) == Some(2), || "K^<=2 vanishes".into())?;
    let push = push_euler(&q).unwrap();
    check(push.first_nonzero.as_ref().map(|(r, _)| *r) == Some(2), || "d_2(e) = 0".into())?;
    check(!degenerates_at_e2(&q).unwrap(), || "degenerates at E_2".into())?;
    match formalize(&q).unwrap() {
        Formalization::Obstructed(r) => check(r.obstruction.map(|o| o.weight) == Some(2), || "wrong weight".into())?,
        Formalization::Formal(_) => return Err("formalize succeeded".into()),
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("obstruction at weight 2 by all criteria in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn c5_strict() -> Outcome {
    let mut names = Vec::new();
    for (name, q) in fixtures::strict_corpus(5) {
        let report = crosscheck(&q).map_err(|e| format!("{name}: {e}"))?;
        check(report.verdict == Verdict::FormalUpToW, || format!("{name} is not formal"))?;
        let ss = OperadicSS::new(&q).unwrap();
        for r in 2..=5 {
            check(ss.page(r).differential_is_zero(), || format!("{name}: d_{r} != 0"))?;
        }
        check(ss.sequence().degenerates_at(2), || format!("{name}: pairs longer than 1"))?;
        names.push(name);
    }
    Ok(format!("W = 5: {}", names.join(", ")))
}

fn c6_gauge_round_trip() -> Outcome {
    let mut steps = 0;
    for operad in [Operad::Ass, Operad::Lie] {
        for (i, g) in fixtures::gauge_corpus(operad, 100, 6).unwrap().into_iter().enumerate() {
            let q = &g.gauged;
            check(mc_check(q.q()).unwrap().is_ok(), || format!("{operad:?} #{i}: mc_check"))?;
            let Formalization::Formal(w) = formalize(q).unwrap() else {
                return Err(format!("{operad:?} #{i}: formalize failed"));
            };
            let mut cur = q.clone();
            for step in &w.steps {
                cur = gauge(&cur, step).unwrap();
            }
            steps += w.steps.len();
            check((2..=cur.cutoff()).all(|k| cur.q_w(k).is_zero()), || format!("{operad:?} #{i}: higher terms remain"))?;
            let k = truncated_class(q, q.cutoff()).unwrap();
            check(k.vanishing_level == q.cutoff(), || format!("{operad:?} #{i}: K^<=n != 0"))?;
        }
    }
    Ok(format!("100 instances per operad, {steps} gauge steps replayed"))
}

fn corpus_4_to_6() -> Vec<(String, PInfStructure)> {
    let mut out: Vec<(String, PInfStructure)> = vec![("massey".into(), fixtures::massey(4))];
    out.extend(fixtures::strict_corpus(5).into_iter().map(|(n, q)| (n.to_string(), q)));
    for operad in [Operad::Ass, Operad::Lie] {
        for (i, g) in fixtures::gauge_corpus(operad, 100, 6).unwrap().into_iter().enumerate() {
            out.push((format!("gauged_{operad:?}_{i}"), g.gauged));
        }
    }
    for (i, q) in fixtures::mixed_corpus(50, 7).unwrap().into_iter().enumerate() {
        out.push((format!("mixed_{i}"), q));
    }
    out
}

struct Verdicts {
    vanishing: usize,
    survives: usize,
    degenerates: bool,
    formal: bool,
}

fn verdicts(corpus: &[(String, PInfStructure)]) -> Vec<Verdicts> {
    corpus
        .iter()
        .map(|(_, q)| Verdicts {
            vanishing: truncated_class(q, q.cutoff()).unwrap().vanishing_level,
            survives: push_euler(q).unwrap().survives_to,
            degenerates: degenerates_at_e2(q).unwrap(),
            formal: formalize(q).unwrap().is_formal(),
        })
        .collect()
}

fn c7_kaledin_euler(corpus: &[(String, PInfStructure)], v: &[Verdicts]) -> Outcome {
    let mut comparisons = 0;
    let mut disagreements = Vec::new();
    for ((name, q), v) in corpus.iter().zip(v) {
        for n in 2..=q.cutoff() {
            comparisons += 1;
            if (v.vanishing >= n) != (v.survives >= n) {
                disagreements.push(format!("{name} n={n}"));
            }
        }
    }
    check(disagreements.is_empty(), || format!("disagreements: {disagreements:?}"))?;
    let nonformal = v.iter().filter(|v| !v.formal).count();
    Ok(format!("{} structures ({nonformal} non-formal), {comparisons} truncations, 0 disagreements", corpus.len()))
}

fn c8_equivalence(corpus: &[(String, PInfStructure)], v: &[Verdicts]) -> Outcome {
    let mut disagreements = Vec::new();
    for ((name, q), v) in corpus.iter().zip(v) {
        let survives = v.survives == q.cutoff();
        if v.formal != v.degenerates || v.formal != survives {
            disagreements.push(name.clone());
        }
    }
    check(disagreements.is_empty(), || format!("disagreements: {disagreements:?}"))?;
    Ok(format!("{} structures, 0 disagreements", corpus.len()))
}

fn c9_weight_concentration() -> Outcome {
    let mut pages = 0;
    for operad in [Operad::Ass, Operad::Lie] {
        for k in 2..=3 {
            let q = fixtures::weight_concentrated(operad, k, 5);
            let ss = OperadicSS::new(&q).unwrap();
            for r in k + 1..=5 {
                check(ss.page(r).differential_is_zero(), || format!("{operad:?} k={k}: d_{r} != 0"))?;
                pages += 1;
            }
            check(!ss.page(k).differential_is_zero(), || format!("{operad:?} k={k}: d_{k} vanishes"))?;
        }
    }
    Ok(format!("k in {{2, 3}}, both operads, W = 5, {pages} full pages checked"))
}

fn c10_transfer() -> Outcome {
    // (a) zero differential.
    let alg = DgAlgebra::from_spec(&fixtures::exterior_dga()).unwrap();
    let q = transfer(&alg, 4).unwrap();
    check(q.is_strict(), || "higher operations on a zero-differential dga".into())?;
    let strict = fixtures::exterior_two_unital(4);
    for a in 0..4 {
        for b in 0..4 {
            let got = classical_value(&q, 1, &[a, b]).unwrap();
            let want: Vec<(String, Rational)> =
                classical_value(&strict, 1, &[a, b]).unwrap().into_iter().map(|(n, c)| (format!("[{n}]"), c)).collect();
            check(got == want, || format!("product differs on ({a}, {b})"))?;
        }
    }
    // (b) Massey dga.
    let q = transfer(&DgAlgebra::from_spec(&fixtures::massey_dga()).unwrap(), 3).unwrap();
    let idx = |n: &str| q.space().index_of(n).unwrap();
    let m3 = classical_value(&q, 2, &[idx("[a]"), idx("[b]"), idx("[c]")]).unwrap();
    check(!m3.is_empty(), || "m_3([a], [b], [c]) = 0".into())?;
    check(crosscheck(&q).unwrap().verdict == Verdict::NonFormal, || "Massey dga reported formal".into())?;
    // (c) and (d): every transfer passes mc_check; verdicts agree across basis orders.
    let orders: [&[&str]; 3] = [
        &["a", "b", "c", "x", "y", "ab", "bc", "xc", "ay"],
        &["ay", "xc", "bc", "ab", "y", "x", "c", "b", "a"],
        &["x", "a", "y", "b", "c", "xc", "ab", "ay", "bc"],
    ];
    let mut verdicts = Vec::new();
    for (k, order) in orders.iter().enumerate() {
        for w in 2..=4 {
            let q = transfer(&DgAlgebra::from_spec(&fixtures::massey_dga_ordered(order)).unwrap(), w).unwrap();
            check(mc_check(q.q()).unwrap().is_ok(), || format!("order {k}, W = {w}: mc_check fails"))?;
            verdicts.push(crosscheck(&q).unwrap().verdict);
        }
    }
    check(verdicts.iter().all(|v| *v == Verdict::NonFormal), || format!("verdicts {verdicts:?}"))?;
    let m3_text: Vec<String> = m3.iter().map(|(n, c)| format!("{c}*{n}")).collect();
    Ok(format!("m_3([a],[b],[c]) = {}, 3 basis orders agree", m3_text.join(" + ")))
}

/// Brute force `dim Z_r^p / (Z_{r−1}^{p+1} + d Z_{r−1}^{p−r+1})`.
fn oracle_dim(c: &FilteredComplex, n: i64, p: i64, r: i64) -> usize {
    use operformal::exactla::{kernel, Subspace};
    let z = |n: i64, lo: i64, top: i64| -> Subspace {
        let levels = c.levels(n);
        let cols: Vec<usize> = (0..levels.len()).filter(|&j| levels[j] as i64 >= lo).collect();
        let Some(d) = c.differential(n) else {
            return Subspace::span(levels.len(), cols.iter().map(|&j| SparseVec::unit(j)));
        };
        let next = c.levels(n + 1);
        let rows: Vec<usize> = (0..next.len()).filter(|&i| (next[i] as i64) < top).collect();
        let mut t = Vec::new();
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                let v = d.get(i, j);
                if !v.is_zero() {
                    t.push((a, b, v));
                }
            }
        }
        let k = kernel(&RatMatrix::from_triplets(rows.len(), cols.len(), t).unwrap());
        Subspace::span(levels.len(), k.basis().iter().map(|v| v.remap(|b| Some(cols[b]))))
    };
    let zr = z(n, p, p + r);
    let image = match c.differential(n - 1) {
        Some(d) => Subspace::span(c.dim(n), z(n - 1, (p - r + 1).max(0), p).basis().iter().map(|v| d.mul_vec(v))),
        None => Subspace::zero(c.dim(n)),
    };
    zr.dim() - z(n, p + 1, p + r).sum(&image).dim()
}

fn c11_golden() -> Outcome {
    let m = |rows, cols, e: &[(usize, usize, i64)]| {
        RatMatrix::from_triplets(rows, cols, e.iter().map(|&(r, c, v)| (r, c, q(v)))).unwrap()
    };
    let mut c = FilteredComplex::new();
    c.add_degree(0, vec![0, 1]);
    c.add_degree(1, vec![2, 1, 0, 1]);
    c.add_degree(2, vec![2]);
    c.set_differential(0, m(4, 2, &[(0, 0, 1), (3, 1, 1)])).unwrap();
    c.set_differential(1, m(1, 4, &[(0, 1, 1)])).unwrap();
    let ss = SpectralSequence::compute(c.clone()).unwrap();
    // Total dimension of E_1, E_2, E_3, and the oracle agreeing cell by cell.
    let expected = [5, 3, 1];
    for (k, &want) in expected.iter().enumerate() {
        let r = k + 1;
        let page = ss.page(r);
        let total: usize = page.cells.values().map(|cell| cell.dim()).sum();
        check(total == want, || format!("dim E_{r} = {total}, expected {want}"))?;
        for n in 0..=2 {
            for p in 0..=2 {
                let o = oracle_dim(&c, n, p, r as i64);
                check(page.dim(p as usize, n - p) == o, || format!("E_{r}^({p},{}) vs oracle {o}", n - p))?;
            }
        }
    }
    Ok("dim E_1, E_2, E_3 = 5, 3, 1, every cell equal to the brute-force oracle".into())
}

fn run(results: &mut Vec<bool>, id: usize, title: &str, tolerance: &str, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.clone()),
        Err(e) => ("FAIL", e.clone()),
    };
    println!("{tag} [{id:>2}] {title} (tolerance: {tolerance}; {secs:.2} s): {detail}");
    results.push(outcome.is_ok());
}

fn main() {
    let start = Instant::now();
    let mut results = Vec::new();
    println!("acceptance suite");
    run(&mut results, 1, "bracket antisymmetry and Jacobi", "exact", c1_bracket_axioms);
    run(&mut results, 2, "Euler bracket identity [b, e] = (p - D) b", "exact", c2_euler_identity);
    let fixtures_all = fixture_corpus();
    run(&mut results, 3, "d_Q(e) = sum (w - 1) q_w on every fixture", "exact", || c3_dq_euler(&fixtures_all));
    run(&mut results, 4, "Massey fixture obstructed at weight 2", "exact, < 1 s", c4_massey);
    run(&mut results, 5, "strict fixtures formal up to W = 5", "exact", c5_strict);
    run(&mut results, 6, "gauge round trip, 100 per operad", "exact", c6_gauge_round_trip);
    let corpus = corpus_4_to_6();
    let v = verdicts(&corpus);
    run(&mut results, 7, "Kaledin class vs Euler class, every truncation", "0 disagreements", || {
        c7_kaledin_euler(&corpus, &v)
    });
    run(&mut results, 8, "formalize <=> E_2 degeneration <=> Euler survives to W", "0 disagreements", || {
        c8_equivalence(&corpus, &v)
    });
    run(&mut results, 9, "weight concentration in k kills d_r for r > k", "exact", c9_weight_concentration);
    run(&mut results, 10, "homotopy transfer", "exact", c10_transfer);
    run(&mut results, 11, "spectral sequence golden complex", "exact dimensions", c11_golden);
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed in {:.1} s", results.len(), start.elapsed().as_secs_f64());
    if passed != results.len() {
        std::process::exit(1);
    }
}
