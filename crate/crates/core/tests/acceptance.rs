mod common;

use std::time::{Duration, Instant};

use codistflat::dtsys::{verify_flat_output, ResidualKind, DEFAULT_MAX_SHIFT};
use codistflat::extcalc::{
    invariant_extension_of, is_cauchy_characteristic, parse_codistribution, parse_one_form, Chart, Distribution,
    VectorField,
};
use codistflat::flatness::{compute_sequence, Verdict};
use codistflat::symcore::{parse_expr, parse_normalized, Symbol, SymbolTable};
use common::{codist, fixture, fixture_file, props, zt};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, name: &str, f: impl FnOnce() -> Result<(), String>) -> Check {
    let start = Instant::now();
    f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("{name} took {took:?}, limit {limit:?}"))?;
    Ok(format!("{took:.2?}"))
}

fn bilinear() -> Check {
    timed(Duration::from_secs(5), "bilinear example", || {
        let sys = fixture("bilinear");
        let r = compute_sequence(&sys, &zt()).map_err(|e| e.to_string())?;
        ensure(
            *r.p(2) == codist(&sys, "span{-dx1 + dx3, dx2}"),
            format!("P2 = {}", r.p(2)),
        )?;
        // Oracle for P3 = 0. In the chart theta = f, xi = (x1, x3):
        //   x1 = xi1, x3 = xi2, x2 = theta3 + theta2/xi1 - theta1,
        //   -dx1 + dx3 = -dxi1 + dxi2,
        //   dx2 = dtheta3 + dtheta2/xi1 - dtheta1 - theta2/xi1^2 dxi1.
        // a(-dx1 + dx3) + b dx2 lies in span{dtheta} only if a = 0 (dxi2) and
        // b*theta2 = 0 (dxi1). theta2 = x1(u1 - u2) = 1/2 at the equilibrium,
        // so the intersection is zero and so is P3.
        ensure(r.p(3).is_zero(), format!("P3 = {}", r.p(3)))?;
        ensure(r.verdict == Verdict::ForwardFlat, format!("verdict {:?}", r.verdict))?;
        ensure(!r.steps[0].step2_trivial, "step 2 trivial at k = 1")
    })
}

fn rational() -> Check {
    timed(Duration::from_secs(10), "rational", || {
        let sys = fixture("rational");
        let r = compute_sequence(&sys, &zt()).map_err(|e| e.to_string())?;
        ensure(r.dims() == [5, 4, 2, 0], format!("dims {:?}", r.dims()))?;
        ensure(
            *r.p(2) == codist(&sys, "span{dx1, dx2, dx3 - dx5, dx4}"),
            format!("P2 = {}", r.p(2)),
        )?;
        ensure(
            *r.p(3) == codist(&sys, "span{(x2+1)*dx1 - x1*dx2, dx3 - dx5}"),
            format!("P3 = {}", r.p(3)),
        )?;
        ensure(r.verdict == Verdict::ForwardFlat, format!("verdict {:?}", r.verdict))
    })
}

fn vtol() -> Check {
    timed(Duration::from_secs(15), "vtol", || {
        let sys = fixture("vtol");
        let r = compute_sequence(&sys, &zt()).map_err(|e| e.to_string())?;
        ensure(r.dims() == [6, 5, 4, 2, 0], format!("dims {:?}", r.dims()))?;
        let nontrivial: Vec<usize> = r.steps.iter().filter(|s| !s.step2_trivial).map(|s| s.k).collect();
        ensure(nontrivial == [1, 2], format!("nontrivial at {nontrivial:?}"))?;
        ensure(r.verdict == Verdict::ForwardFlat, format!("verdict {:?}", r.verdict))
    })
}

fn flat_output() -> Check {
    let base = fixture_file("bilinear");
    let sys = base.to_system(&zt()).map_err(|e| e.to_string())?;
    let cand = base
        .flat_output_candidate()
        .map_err(|e| e.to_string())?
        .ok_or("no flat output")?;
    let v = verify_flat_output(&sys, &cand, DEFAULT_MAX_SHIFT, &zt()).map_err(|e| e.to_string())?;
    ensure(v.passed(), "unperturbed parameterization rejected")?;

    let mut table = SymbolTable::new();
    for s in cand.y_symbols() {
        table.insert(s);
    }
    let fo = base.flat_output.clone().ok_or("no flat output")?;
    // One entry changed at a time; only that component may fail.
    let cases: [(bool, usize, &str, &str); 5] = [
        (true, 0, "y2", "x1"),
        (true, 1, "y2 + 1", "x2"),
        (true, 2, "-(y1*y1_1 + y1*y2 + y2_1)/(y1_1 + y2)", "x3"),
        (false, 0, "(y1_2*y2 + y2*y2_1 - y2_2)/(y1_2 + y2_1)", "u1"),
        (false, 1, "-(y1_1*y1_2 + y1_1*y2_1 - y2_2)/(y1_2 - y2_1)", "u2"),
    ];
    for (is_state, idx, text, component) in cases {
        let mut f = fo.clone();
        let e = parse_expr(text, &table).map_err(|e| e.to_string())?;
        if is_state {
            f.fx[idx] = e;
        } else {
            f.fu[idx] = e;
        }
        let mut file = base.clone();
        file.flat_output = Some(f);
        let cand = file
            .flat_output_candidate()
            .map_err(|e| e.to_string())?
            .ok_or("no flat output")?;
        let v = verify_flat_output(&sys, &cand, DEFAULT_MAX_SHIFT, &zt()).map_err(|e| e.to_string())?;
        let kind = if is_state {
            ResidualKind::State
        } else {
            ResidualKind::Input
        };
        let hit = v.residuals.iter().find(|r| r.kind == kind && r.component == component);
        ensure(
            hit.is_some_and(|r| !r.vanishes),
            format!("perturbing {component} went unnoticed"),
        )?;
        let stray = v
            .residuals
            .iter()
            .find(|r| r.kind != ResidualKind::Consistency && r.component != component && !r.vanishes);
        ensure(
            stray.is_none(),
            format!(
                "perturbing {component} also broke {}",
                stray.map(|r| r.to_string()).unwrap_or_default()
            ),
        )?;
    }
    Ok(format!("{} residuals, 5 perturbations rejected", v.residuals.len()))
}

fn invariant_extension() -> Check {
    let syms: Vec<Symbol> = ["x1", "x2", "x3", "x4"].iter().map(|n| Symbol::state(*n)).collect();
    let table = SymbolTable::from_symbols(&syms);
    let chart = Chart::new(syms).map_err(|e| e.to_string())?;
    let form = |s: &str| parse_one_form(s, &chart, &table).unwrap();
    let gens = vec![form("x3*dx2"), form("-x2*x4*dx1 + x4^2*dx4")];
    let d = Distribution::coordinate(&chart, &[2, 3], &zt()).map_err(|e| e.to_string())?;
    let ext = invariant_extension_of(&chart, &gens, &d, &zt()).map_err(|e| e.to_string())?;
    ensure(ext.added.len() == 1, format!("{} forms added", ext.added.len()))?;
    // L_{∂x4}(-x2*x4*dx1 + x4^2*dx4) = -x2*dx1 + 2*x4*dx4 by hand.
    let expected = parse_codistribution(
        "span{x3*dx2, -x2*x4*dx1 + x4^2*dx4, -x2*dx1 + 2*x4*dx4}",
        &chart,
        &table,
        &zt(),
    )
    .map_err(|e| e.to_string())?;
    ensure(ext.codistribution == expected, format!("P^ = {}", ext.codistribution))?;

    let syms: Vec<Symbol> = ["x1", "x2", "x3"].iter().map(|n| Symbol::state(*n)).collect();
    let table = SymbolTable::from_symbols(&syms);
    let chart = Chart::new(syms).map_err(|e| e.to_string())?;
    let p = parse_codistribution("span{dx2 + x1*dx3, dx1 - dx3}", &chart, &table, &zt()).map_err(|e| e.to_string())?;
    let comps = ["1", "-x1", "1"]
        .iter()
        .map(|c| parse_normalized(c, &table).unwrap())
        .collect();
    let v = VectorField::new(&chart, comps);
    ensure(
        is_cauchy_characteristic(&v, &p, &zt()).map_err(|e| e.to_string())?,
        "v is not Cauchy-characteristic",
    )?;
    Ok("one added form, Cauchy membership holds".into())
}

fn properties() -> Check {
    const CASES: u32 = 100;
    props::annihilator_duality(CASES)?;
    props::intersection_duality(CASES)?;
    props::cartan_identity(CASES)?;
    props::shift_round_trip(CASES)?;
    let nested = props::sequence_invariants(2 * CASES)?;
    ensure(nested >= 100, format!("only {nested} sequences analyzed"))?;
    let seeded = props::seed_determinism(2 * CASES)?;
    ensure(seeded >= 100, format!("only {seeded} seed comparisons"))?;
    for name in ["bilinear", "rational"] {
        let accepted = props::complement_independence(name, CASES)?;
        ensure(accepted >= 2, format!("{name}: {accepted} distinct complements"))?;
    }
    Ok(format!("{nested} sequences, {seeded} seed comparisons"))
}

fn linear_oracle() -> Check {
    let (reachable, unreachable) = props::linear_oracle(240)?;
    ensure(reachable + unreachable >= 200, "fewer than 200 pairs")?;
    Ok(format!(
        "{reachable} reachable, {unreachable} unreachable, no disagreement"
    ))
}

fn negative_control() -> Check {
    // x1+ = x1 + x2*u, x2+ = u with automatic complement xi = x2.
    // Chart: x2 = xi, u = theta2, x1 = theta1 - xi*theta2.
    //   P1 = span{dx1, dx2}; a*dx1 + b*dx2 has dxi coefficient b - a*theta2,
    //   so P1 ∩ span{dtheta} = span{dtheta1 - xi*dtheta2}.
    //   L_{dxi} of it is -dtheta2, not in the span, so the extension is
    //   span{dtheta1, dtheta2} and shifting back gives P2 = span{dx1, dx2} = P1.
    let sys = fixture("not_flat");
    let r = compute_sequence(&sys, &zt()).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::NotForwardFlat, format!("verdict {:?}", r.verdict))?;
    ensure(
        r.steps[0].intersection_dim == 1,
        format!("intersection dim {}", r.steps[0].intersection_dim),
    )?;
    ensure(r.steps[0].extension_added.len() == 1, "expected one added form")?;
    let obs = r.obstruction.as_ref().ok_or("no obstruction reported")?;
    ensure(*obs == codist(&sys, "span{dx1, dx2}"), format!("obstruction {obs}"))?;
    Ok(format!("obstruction {obs}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("bilinear example sequence", bilinear),
        ("rational example sequence", rational),
        ("vtol sequence", vtol),
        ("flat output verification", flat_output),
        ("invariant extension and cauchy", invariant_extension),
        ("property suites", properties),
        ("linear oracle", linear_oracle),
        ("negative control", negative_control),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
