//! Randomized checks shared by the `properties` and `acceptance` targets.
//! Each returns a description of the first counterexample on failure; the
//! suites that can skip instances report how many were exercised.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use codistflat::dtsys::{backward_shift_oneform, build_adapted_chart, forward_shift_oneform, DiscreteTimeSystem};
use codistflat::extcalc::{Chart, Codistribution, KForm, OneForm, VectorField};
use codistflat::flatness::{compute_sequence, SequenceReport, Verdict};
use codistflat::symcore::{Expr, Symbol, ZeroTest};

use super::fixture_file;

pub type Terms = Vec<(i64, Vec<u32>)>;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// Sparse polynomial with `1..=max_terms` terms of total degree `≤ max_deg`.
pub fn terms(vars: usize, max_terms: usize, max_deg: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec(
        (-3i64..=3, prop::collection::vec(0..=max_deg, vars))
            .prop_filter("degree", move |(_, e)| e.iter().sum::<u32>() <= max_deg),
        1..=max_terms,
    )
}

pub fn poly(terms: &Terms, syms: &[Symbol]) -> Expr {
    terms
        .iter()
        .map(|(c, exps)| {
            let mut t = Expr::int(*c);
            for (s, e) in syms.iter().zip(exps) {
                if *e > 0 {
                    t = &t * &Expr::sym(s).pow(*e as i32);
                }
            }
            t
        })
        .sum()
}

fn chart(n: usize) -> (Chart, Vec<Symbol>) {
    let syms: Vec<Symbol> = (1..=n).map(|i| Symbol::state(format!("z{i}"))).collect();
    (Chart::new(syms.clone()).unwrap(), syms)
}

fn forms_strategy(n: usize, count: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<Terms>>> {
    prop::collection::vec(prop::collection::vec(terms(n, 2, 2), n), count)
}

fn forms(chart: &Chart, syms: &[Symbol], raw: &[Vec<Terms>]) -> Vec<OneForm> {
    raw.iter()
        .map(|w| OneForm::new(chart, w.iter().map(|t| poly(t, syms)).collect()))
        .collect()
}

fn check(b: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if b {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// `dim P + dim P⊥ = n`, `(P⊥)⊥ = P` and `⟨ω, v⟩ = 0` across the pair.
pub fn annihilator_duality(cases: u32) -> Result<(), String> {
    let zt = ZeroTest::default();
    run(
        cases,
        (2usize..=4).prop_flat_map(|n| (Just(n), forms_strategy(n, 1..=3))),
        |(n, raw)| {
            let (c, syms) = chart(n);
            let p = ok(Codistribution::span(&c, &forms(&c, &syms, &raw), &zt))?;
            let perp = ok(p.annihilator(&zt))?;
            check(p.dim() + perp.dim() == n, || format!("dim {p} + dim {perp} != {n}"))?;
            check(ok(perp.annihilator(&zt))? == p, || format!("({p})⊥⊥ differs"))?;
            for w in p.basis() {
                for v in perp.basis() {
                    check(ok(zt.is_zero(&ok(w.contract(&v))?))?, || {
                        format!("{w} does not annihilate {v}")
                    })?;
                }
            }
            Ok(())
        },
    )
}

/// `(P ∩ Q)⊥ = P⊥ + Q⊥`, with `P ∩ Q` contained in both and of dimension
/// `dim P + dim Q − dim(P + Q)`.
pub fn intersection_duality(cases: u32) -> Result<(), String> {
    let zt = ZeroTest::default();
    let strategy = (2usize..=4).prop_flat_map(|n| (Just(n), forms_strategy(n, 1..=2), forms_strategy(n, 1..=2)));
    run(cases, strategy, |(n, a, b)| {
        let (c, syms) = chart(n);
        let p = ok(Codistribution::span(&c, &forms(&c, &syms, &a), &zt))?;
        let q = ok(Codistribution::span(&c, &forms(&c, &syms, &b), &zt))?;
        let i = ok(p.intersect(&q, &zt))?;
        let sum = ok(p.sum(&q, &zt))?;
        check(i.dim() + sum.dim() == p.dim() + q.dim(), || {
            format!("P = {p}, Q = {q}: dim P ∩ Q = {}", i.dim())
        })?;
        check(ok(p.contains_all(&i, &zt))? && ok(q.contains_all(&i, &zt))?, || {
            format!("{i} ⊄ P or Q")
        })?;
        let lhs = ok(i.annihilator(&zt))?;
        let rhs = ok(ok(p.annihilator(&zt))?.sum(&ok(q.annihilator(&zt))?, &zt))?;
        check(lhs == rhs, || format!("P = {p}, Q = {q}: {lhs} != {rhs}"))
    })
}

/// `L_v ω = v⌋dω + d(v⌋ω)` and `d L_v ω = L_v dω`.
pub fn cartan_identity(cases: u32) -> Result<(), String> {
    let zt = ZeroTest::default();
    let strategy = (2usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(terms(n, 3, 3), n),
            prop::collection::vec(terms(n, 2, 2), n),
        )
    });
    run(cases, strategy, |(n, w, v)| {
        let (c, syms) = chart(n);
        let w = OneForm::new(&c, w.iter().map(|t| poly(t, &syms)).collect());
        let v = VectorField::new(&c, v.iter().map(|t| poly(t, &syms)).collect());
        let lie = ok(w.lie_derivative(&v))?;
        let cartan = ok(w.lie_derivative_cartan(&v))?;
        check(ok(lie.sub(&cartan).is_zero_checked(&zt))?, || {
            format!("L_v ω differs for ω = {w}, v = {v}")
        })?;
        let d_lie = lie.exterior_derivative();
        let lie_d = ok(w.exterior_derivative().contract(&v))?.exterior_derivative();
        let minus = ok(KForm::scalar(&c, Expr::int(-1)).wedge(&lie_d))?;
        check(ok(d_lie.add(&minus).is_zero_checked(&zt))?, || {
            format!("d does not commute with L_v for {w}")
        })
    })
}

/// `δ⁻¹(δ ω) = ω` for `ω ∈ span{dx}` on the shipped fixtures.
pub fn shift_round_trip(cases: u32) -> Result<(), String> {
    let zt = ZeroTest::default();
    let systems: Vec<_> = ["bilinear", "rational", "not_flat"]
        .iter()
        .map(|n| fixture_file(n).to_system(&zt).unwrap())
        .collect();
    let charts: Vec<_> = systems.iter().map(|s| build_adapted_chart(s, &zt).unwrap()).collect();
    let strategy = (0..systems.len()).prop_flat_map(|i| (Just(i), prop::collection::vec(terms(5, 2, 2), 5)));
    run(cases, strategy, |(i, raw)| {
        let sys = &systems[i];
        let n = sys.n();
        let mut coeffs: Vec<Expr> = raw[..n].iter().map(|t| poly(t, sys.states())).collect();
        coeffs.resize(n + sys.m(), Expr::zero());
        let w = OneForm::new(sys.chart(), coeffs);
        let shifted = ok(forward_shift_oneform(&w, sys))?;
        let back = ok(backward_shift_oneform(
            &ok(charts[i].pull_form(&shifted))?,
            &charts[i],
            &zt,
        ))?;
        check(back == w, || format!("{}: {w} came back as {back}", sys.name()))
    })
}

/// Random polynomial system `x⁺ = f(x,u)` with equilibrium at the origin.
pub fn random_system(n: usize, m: usize, linear: &[Vec<i64>], nonlinear: &[Terms]) -> Option<DiscreteTimeSystem> {
    let states: Vec<Symbol> = (1..=n).map(|i| Symbol::state(format!("x{i}"))).collect();
    let inputs: Vec<Symbol> = (1..=m).map(|i| Symbol::input(format!("u{i}"))).collect();
    let all: Vec<Symbol> = states.iter().chain(&inputs).cloned().collect();
    let f: Vec<Expr> = (0..n)
        .map(|i| {
            let lin: Expr = all
                .iter()
                .zip(&linear[i])
                .map(|(s, c)| &Expr::int(*c) * &Expr::sym(s))
                .sum();
            let nl: Terms = nonlinear[i]
                .iter()
                .filter(|(_, e)| e.iter().sum::<u32>() >= 2)
                .cloned()
                .collect();
            lin + poly(&nl, &all)
        })
        .collect();
    let zero = BigRational::zero();
    DiscreteTimeSystem::new(
        "random",
        states,
        inputs,
        vec![],
        f,
        vec![zero.clone(); n],
        vec![zero; m],
        &ZeroTest::default(),
    )
    .ok()
}

fn system_strategy() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>, Vec<Terms>)> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, m)| {
        (
            Just(n),
            Just(m),
            prop::collection::vec(
                prop::collection::vec(prop::sample::select(vec![0i64, 0, 1, -1, 2]), n + m),
                n,
            ),
            prop::collection::vec(terms(n + m, 1, 2), n),
        )
    })
}

fn analyze(sys: &DiscreteTimeSystem, zt: &ZeroTest) -> Result<Option<SequenceReport>, TestCaseError> {
    match compute_sequence(sys, zt) {
        Ok(r) => Ok(Some(r)),
        Err(e) if e.is_internal() => Err(TestCaseError::fail(format!("{:?}: internal error {e}", sys.f()))),
        Err(_) => Ok(None),
    }
}

/// Every computed sequence is nested, integrable, free of `du` and ends
/// within `n + 1` steps; no random system triggers an internal error.
///
/// Returns how many systems were analyzed to completion.
pub fn sequence_invariants(cases: u32) -> Result<usize, String> {
    let zt = ZeroTest::default();
    let analyzed = std::cell::Cell::new(0);
    run(cases, system_strategy(), |(n, m, lin, nl)| {
        let Some(sys) = random_system(n, m, &lin, &nl) else {
            return Ok(());
        };
        let Some(r) = analyze(&sys, &zt)? else { return Ok(()) };
        analyzed.set(analyzed.get() + 1);
        check(r.steps.len() <= n + 1, || {
            format!("{} steps for n = {n}", r.steps.len())
        })?;
        check(r.steps[0].dim == n, || "P1 is not span{dx}".into())?;
        for pair in r.steps.windows(2) {
            let (a, b) = (&pair[0].codistribution, &pair[1].codistribution);
            check(ok(a.contains_all(b, &zt))?, || format!("{b} ⊄ {a}"))?;
            check(b.dim() < a.dim(), || format!("{b} does not shrink {a}"))?;
        }
        for s in &r.steps {
            let p = &s.codistribution;
            check(ok(p.is_integrable(&zt))?, || format!("{p} is not integrable"))?;
            for w in p.basis() {
                check(w.coeffs()[n..].iter().all(Expr::is_zero), || {
                    format!("{p} has du terms")
                })?;
            }
        }
        Ok(())
    })?;
    Ok(analyzed.get())
}

/// Zero-test seeds and sample counts do not change any result.
pub fn seed_determinism(cases: u32) -> Result<usize, String> {
    let analyzed = std::cell::Cell::new(0);
    run(
        cases,
        (system_strategy(), any::<u64>(), any::<u64>(), 4usize..=12),
        |((n, m, lin, nl), s1, s2, k)| {
            let Some(sys) = random_system(n, m, &lin, &nl) else {
                return Ok(());
            };
            let a = compute_sequence(&sys, &ZeroTest::new(s1, 8));
            let b = compute_sequence(&sys, &ZeroTest::new(s2, k));
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    analyzed.set(analyzed.get() + 1);
                    check(a.verdict == b.verdict, || "verdicts differ".into())?;
                    check(a.steps.len() == b.steps.len(), || "lengths differ".into())?;
                    for (x, y) in a.steps.iter().zip(&b.steps) {
                        check(x.codistribution == y.codistribution, || format!("P{} differs", x.k))?;
                        check(x.step2_trivial == y.step2_trivial, || {
                            format!("step 2 at k = {} differs", x.k)
                        })?;
                    }
                    Ok(())
                }
                (Err(a), Err(b)) => check(a.to_string() == b.to_string(), || format!("{a} vs {b}")),
                (a, b) => Err(TestCaseError::fail(format!(
                    "{:?} vs {:?}",
                    a.map(|r| r.verdict),
                    b.map(|r| r.verdict)
                ))),
            }
        },
    )?;
    Ok(analyzed.get())
}

/// Random integer complements `h = C·(x,u)` on the given fixture give the
/// same sequence as the shipped complement. Returns the distinct `h` that
/// were accepted.
pub fn complement_independence(name: &str, cases: u32) -> Result<usize, String> {
    let zt = ZeroTest::default();
    let file = fixture_file(name);
    let reference = compute_sequence(&file.to_system(&zt).unwrap(), &zt).unwrap();
    let mut bare = file.clone();
    bare.complement = None;
    let sys = bare.to_system(&zt).unwrap();
    let (n, m) = (sys.n(), sys.m());
    let coords: Vec<Symbol> = sys.chart().coords().to_vec();
    let accepted = std::cell::RefCell::new(HashSet::new());
    let strategy = prop::collection::vec(
        prop::collection::vec(prop::sample::select(vec![0i64, 0, 0, 1, -1, 2]), n + m),
        m,
    );
    run(cases, strategy, |c| {
        let h: Vec<Expr> = c
            .iter()
            .map(|row| {
                coords
                    .iter()
                    .zip(row)
                    .map(|(s, k)| &Expr::int(*k) * &Expr::sym(s))
                    .sum()
            })
            .collect();
        let Ok(with_h) = sys.clone().with_complement(h.clone()) else {
            return Ok(());
        };
        let r = match compute_sequence(&with_h, &zt) {
            Ok(r) => r,
            Err(e) if e.is_internal() => return Err(TestCaseError::fail(format!("h = {h:?}: {e}"))),
            Err(_) => return Ok(()),
        };
        check(r.steps.len() == reference.steps.len(), || {
            format!("h = {h:?}: dims {:?}", r.dims())
        })?;
        for (a, b) in r.steps.iter().zip(&reference.steps) {
            check(a.codistribution == b.codistribution, || {
                format!("h = {h:?}: P{} = {}", a.k, a.codistribution)
            })?;
        }
        check(r.verdict == reference.verdict, || format!("h = {h:?}: {}", r.verdict))?;
        accepted
            .borrow_mut()
            .insert(h.iter().map(|e| e.to_string()).collect::<Vec<_>>());
        Ok(())
    })?;
    let count = accepted.borrow().len();
    Ok(count)
}

/// Rank of an integer matrix over ℚ.
pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let factor = &row[c] / &pivot_row[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `[B, AB, …, A^{n-1}B]`.
pub fn kalman_rank(a: &[Vec<i64>], b: &[Vec<i64>]) -> usize {
    let n = a.len();
    let m = b[0].len();
    let q = |k: i64| BigRational::from_integer(k.into());
    let mut block: Vec<Vec<BigRational>> = b.iter().map(|r| r.iter().map(|&k| q(k)).collect()).collect();
    let mut cols: Vec<Vec<BigRational>> = vec![Vec::new(); n];
    for _ in 0..n {
        for (i, row) in block.iter().enumerate() {
            cols[i].extend(row.iter().cloned());
        }
        block = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + q(a[i][k]) * &block[k][j]))
                    .collect()
            })
            .collect();
    }
    rational_rank(cols)
}

/// Linear systems are static feedback linearizable exactly when the
/// Kalman rank is full. Returns `(reachable, unreachable)` counts.
pub fn linear_oracle(cases: u32) -> Result<(usize, usize), String> {
    let counts = std::cell::Cell::new((0usize, 0usize));
    let entry = || prop::sample::select(vec![0i64, 0, 0, 1, -1, 2, -2]);
    let strategy = (1usize..=4, 1usize..=2).prop_flat_map(move |(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(entry(), n), n),
            prop::collection::vec(prop::collection::vec(entry(), m), n),
        )
    });
    run(cases, strategy, |(a, b)| {
        let n = a.len();
        let m = b[0].len();
        let linear: Vec<Vec<i64>> = (0..n).map(|i| a[i].iter().chain(&b[i]).copied().collect()).collect();
        let sys = random_system(n, m, &linear, &vec![Vec::new(); n]).expect("linear system is valid");
        let reachable = kalman_rank(&a, &b) == n;
        let verdict = match compute_sequence(&sys, &ZeroTest::default()) {
            Ok(r) => Some(r.verdict),
            Err(codistflat::dtsys::SysError::NotSubmersive(_)) => None,
            Err(e) => return Err(TestCaseError::fail(format!("A = {a:?}, B = {b:?}: {e}"))),
        };
        let sfl = verdict == Some(Verdict::StaticFeedbackLinearizable);
        check(sfl == reachable, || {
            format!("A = {a:?}, B = {b:?}: Kalman says {reachable}, verdict {verdict:?}")
        })?;
        let (r, u) = counts.get();
        counts.set(if reachable { (r + 1, u) } else { (r, u + 1) });
        Ok(())
    })?;
    Ok(counts.get())
}
