use codistflat::extcalc::{
    cauchy_distribution, invariant_extension_of, is_cauchy_characteristic, parse_codistribution, parse_one_form, Chart,
    Codistribution, Distribution, KForm, OneForm, VectorField,
};
use codistflat::symcore::{parse_normalized, Expr, Symbol, SymbolTable, ZeroTest};

struct Ctx {
    chart: Chart,
    table: SymbolTable,
    zt: ZeroTest,
}

impl Ctx {
    fn new(names: &[&str]) -> Self {
        let syms: Vec<Symbol> = names.iter().map(|n| Symbol::state(*n)).collect();
        Ctx {
            table: SymbolTable::from_symbols(&syms),
            chart: Chart::new(syms).unwrap(),
            zt: ZeroTest::default(),
        }
    }

    fn e(&self, s: &str) -> Expr {
        parse_normalized(s, &self.table).unwrap()
    }

    fn form(&self, s: &str) -> OneForm {
        parse_one_form(s, &self.chart, &self.table).unwrap()
    }

    fn span(&self, s: &str) -> Codistribution {
        parse_codistribution(s, &self.chart, &self.table, &self.zt).unwrap()
    }

    fn field(&self, comps: &[&str]) -> VectorField {
        VectorField::new(&self.chart, comps.iter().map(|c| self.e(c)).collect())
    }

    fn dist(&self, fields: &[VectorField]) -> Distribution {
        Distribution::span(&self.chart, fields, &self.zt).unwrap()
    }
}

fn bilinear_chart() -> Ctx {
    Ctx::new(&["x1", "x2", "x3", "u1", "u2"])
}

#[test]
fn differential_of_product() {
    let c = Ctx::new(&["x1", "x2"]);
    let d = OneForm::differential(&c.chart, &c.e("x1*x2"));
    assert_eq!(d, c.form("x2*dx1 + x1*dx2"));
    assert_eq!(d.to_string(), "x2*dx1 + x1*dx2");
}

#[test]
fn exterior_derivative_of_one_form() {
    let c = Ctx::new(&["x1", "x2", "x3", "x4"]);
    let dw = c.form("x3*dx2").exterior_derivative();
    assert_eq!(dw.coeff(&[1, 2]), Expr::int(-1));
    assert_eq!(dw.coeff(&[2, 1]), Expr::int(1));
    assert_eq!(dw.terms().len(), 1);
    assert!(c.form("3*dx1 - dx4").exterior_derivative().is_zero());
}

#[test]
fn d_squared_vanishes() {
    let c = Ctx::new(&["x1", "x2", "x3"]);
    let f = c.e("x1^2*x3/(x2+1) + x2*x3");
    let ddf = OneForm::differential(&c.chart, &f).exterior_derivative();
    assert!(ddf.is_zero());
}

#[test]
fn wedge_antisymmetry() {
    let c = Ctx::new(&["x1", "x2", "x3"]);
    let dx1 = OneForm::dx(&c.chart, 0).to_kform();
    let dx2 = OneForm::dx(&c.chart, 1).to_kform();
    assert!(dx1.wedge(&dx1).unwrap().is_zero());
    let s = dx1.wedge(&dx2).unwrap().add(&dx2.wedge(&dx1).unwrap());
    assert!(s.is_zero());
    let top = dx1
        .wedge(&dx2)
        .unwrap()
        .wedge(&OneForm::dx(&c.chart, 2).to_kform())
        .unwrap();
    assert!(top.wedge(&dx1).unwrap().is_zero());
}

#[test]
fn wedge_detects_independence_on_bilinear_basis() {
    let c = bilinear_chart();
    let w1 = c.form("(u1-u2)*dx1 + x1*dx2");
    let lw1 = c.form("(u1-u2)*dx1 + x1*du1 - x1*du2");
    let w = w1.to_kform().wedge(&lw1.to_kform()).unwrap();
    assert!(!w.is_zero());
    let dep = w1.to_kform().wedge(&w1.scale(&c.e("x3")).to_kform()).unwrap();
    assert!(dep.is_zero());
}

#[test]
fn contractions() {
    let c = Ctx::new(&["x1", "x2", "x3", "x4"]);
    let v = VectorField::partial(&c.chart, 2);
    assert!(c.form("x3*dx2").contract(&v).unwrap().is_zero());

    let c = Ctx::new(&["x1", "x2", "x3"]);
    let v = c.field(&["1", "-x1", "1"]);
    let w1 = c.form("dx2 + x1*dx3");
    let w2 = c.form("dx1 - dx3");
    let a = w1.exterior_derivative().contract(&v).unwrap().as_one_form();
    assert_eq!(a, c.form("-dx1 + dx3"));
    assert!(w2.exterior_derivative().contract(&v).unwrap().is_zero());
    let zero: KForm = KForm::scalar(&c.chart, Expr::zero());
    assert!(zero.contract(&v).unwrap().is_zero());
}

#[test]
fn lie_derivatives_of_forms() {
    let c = Ctx::new(&["x1", "x2", "x3", "x4"]);
    let v1 = VectorField::partial(&c.chart, 2);
    let v2 = VectorField::partial(&c.chart, 3);
    assert_eq!(c.form("x3*dx2").lie_derivative(&v1).unwrap(), c.form("dx2"));
    assert_eq!(
        c.form("-x2*x4*dx1 + x4^2*dx4").lie_derivative(&v2).unwrap(),
        c.form("-x2*dx1 + 2*x4*dx4")
    );

    let c = bilinear_chart();
    let v2 = c.field(&["-x1", "u1-u2", "0", "u1-u2", "0"]);
    let w1 = c.form("(u1-u2)*dx1 + x1*dx2");
    let l = w1.lie_derivative(&v2).unwrap();
    // Hand expansion of both the coefficient formula and v⌋dω + d(v⌋ω).
    assert_eq!(l, c.form("-x1*dx2 + x1*du1 - x1*du2"));
    assert_eq!(l, w1.lie_derivative_cartan(&v2).unwrap());
    // The published value differs from this by a multiple of ω¹, so both
    // give the same extension span{ω¹, L_v₂ω¹}.
    let published = c.form("(u1-u2)*dx1 + x1*du1 - x1*du2");
    assert_eq!(
        Codistribution::span(&c.chart, &[w1.clone(), l], &c.zt).unwrap(),
        Codistribution::span(&c.chart, &[w1, published], &c.zt).unwrap()
    );
}

#[test]
fn lie_brackets() {
    let c = Ctx::new(&["x1", "x2"]);
    let d1 = VectorField::partial(&c.chart, 0);
    let d2 = VectorField::partial(&c.chart, 1);
    assert!(d1.lie_bracket(&d2).unwrap().is_zero());
    let v = c.field(&["x2^2", "x1*x2"]);
    assert!(v.lie_bracket(&v).unwrap().is_zero());
    let x1d1 = c.field(&["x1", "0"]);
    assert_eq!(x1d1.lie_bracket(&d1).unwrap(), c.field(&["-1", "0"]));
}

#[test]
fn annihilator_of_jacobian_codistribution() {
    let c = bilinear_chart();
    let f = ["u1-x2", "x1*(u1-u2)", "u2"];
    let df: Vec<OneForm> = f.iter().map(|s| OneForm::differential(&c.chart, &c.e(s))).collect();
    let span_df = Codistribution::span(&c.chart, &df, &c.zt).unwrap();
    assert_eq!(span_df.dim(), 3);
    let perp = span_df.annihilator(&c.zt).unwrap();
    let v1 = VectorField::partial(&c.chart, 2);
    let v2 = c.field(&["-x1", "u1-u2", "0", "u1-u2", "0"]);
    assert_eq!(perp, c.dist(&[v1, v2]));
    assert_eq!(Codistribution::full(&c.chart).annihilator(&c.zt).unwrap().dim(), 0);
    assert_eq!(
        Codistribution::zero(&c.chart).annihilator(&c.zt).unwrap(),
        Distribution::full(&c.chart)
    );
}

#[test]
fn annihilator_of_distribution() {
    let c = Ctx::new(&["t1", "t2", "t3", "xi1", "xi2"]);
    let d = Distribution::coordinate(&c.chart, &[3, 4], &c.zt).unwrap();
    let p = d.annihilator(&c.zt).unwrap();
    assert_eq!(p, Codistribution::coordinate(&c.chart, &[0, 1, 2], &c.zt).unwrap());
    assert_eq!(p.annihilator(&c.zt).unwrap(), d);
    assert_eq!(
        Distribution::zero(&c.chart).annihilator(&c.zt).unwrap(),
        Codistribution::full(&c.chart)
    );
}

#[test]
fn intersection_with_jacobian_codistribution() {
    let c = bilinear_chart();
    let p1 = Codistribution::coordinate(&c.chart, &[0, 1, 2], &c.zt).unwrap();
    let df = c.span("span{-dx2 + du1, (u1-u2)*dx1 + x1*du1 - x1*du2, du2}");
    let i = p1.intersect(&df, &c.zt).unwrap();
    assert_eq!(i, c.span("span{(u1-u2)*dx1 + x1*dx2}"));
    assert_eq!(i.to_string(), "span{(u1-u2)*dx1 + x1*dx2}");
    assert_eq!(p1.intersect(&p1, &c.zt).unwrap(), p1);
}

#[test]
fn integrability() {
    let c = Ctx::new(&["x1", "x2", "x3"]);
    assert!(c.span("span{dx1, dx2}").is_integrable(&c.zt).unwrap());
    assert!(!c.span("span{dx2 + x1*dx3}").is_integrable(&c.zt).unwrap());
    let c = Ctx::new(&["x1", "x2", "x3", "x4", "x5"]);
    let p3 = c.span("span{(x2+1)*dx1 - x1*dx2, dx3 - dx5}");
    assert!(p3.is_integrable(&c.zt).unwrap());
    assert_eq!(p3.to_string(), "span{(x2+1)*dx1 - x1*dx2, dx3 - dx5}");
}

fn invariance_fixture() -> (Ctx, Vec<OneForm>, Distribution) {
    let c = Ctx::new(&["x1", "x2", "x3", "x4"]);
    let gens = vec![c.form("x3*dx2"), c.form("-x2*x4*dx1 + x4^2*dx4")];
    let d = Distribution::coordinate(&c.chart, &[2, 3], &c.zt).unwrap();
    (c, gens, d)
}

#[test]
fn invariance_checks() {
    let (c, gens, d) = invariance_fixture();
    let p = Codistribution::span(&c.chart, &gens, &c.zt).unwrap();
    let dx3 = Distribution::coordinate(&c.chart, &[2], &c.zt).unwrap();
    assert!(c.span("span{x3*dx2}").is_invariant(&dx3, &c.zt).unwrap());
    assert!(!p.is_invariant(&d, &c.zt).unwrap());
    assert!(Codistribution::zero(&c.chart).is_invariant(&d, &c.zt).unwrap());
}

#[test]
fn invariant_extension_adds_one_lie_derivative() {
    let (c, gens, d) = invariance_fixture();
    let ext = invariant_extension_of(&c.chart, &gens, &d, &c.zt).unwrap();
    assert_eq!(ext.added.len(), 1);
    assert_eq!(ext.added[0], c.form("-x2*dx1 + 2*x4*dx4"));
    let expected = c.span("span{x3*dx2, -x2*x4*dx1 + x4^2*dx4, -x2*dx1 + 2*x4*dx4}");
    assert_eq!(ext.codistribution, expected);
    assert_eq!(ext.codistribution.dim(), 3);
    assert!(ext.codistribution.is_invariant(&d, &c.zt).unwrap());

    // An invariant input comes back unchanged.
    let again = ext.codistribution.invariant_extension(&d, &c.zt).unwrap();
    assert!(again.added.is_empty());
    assert_eq!(again.codistribution, ext.codistribution);

    // D is involutive and annihilates P, so it annihilates P̂.
    for w in ext.codistribution.basis() {
        for v in d.basis() {
            assert!(w.contract(&v).unwrap().is_zero() || !gens.iter().all(|g| g.contract(&v).unwrap().is_zero()));
        }
    }
}

#[test]
fn invariant_extension_bilinear() {
    let c = bilinear_chart();
    let v1 = VectorField::partial(&c.chart, 2);
    let v2 = c.field(&["-x1", "u1-u2", "0", "u1-u2", "0"]);
    let d = c.dist(&[v1, v2]);
    let w1 = c.form("(u1-u2)*dx1 + x1*dx2");
    let ext = invariant_extension_of(&c.chart, &[w1], &d, &c.zt).unwrap();
    assert_eq!(ext.codistribution.dim(), 2);
    // D's primitive basis uses -v₂, hence the sign.
    assert_eq!(ext.added, vec![c.form("x1*dx2 - x1*du1 + x1*du2")]);
    assert_eq!(
        ext.codistribution,
        c.span("span{(u1-u2)*dx1 + x1*dx2, (u1-u2)*dx1 + x1*du1 - x1*du2}")
    );
}

#[test]
fn cauchy_characteristics() {
    let c = Ctx::new(&["x1", "x2", "x3"]);
    let p = c.span("span{dx2 + x1*dx3, dx1 - dx3}");
    let v = c.field(&["1", "-x1", "1"]);
    assert!(is_cauchy_characteristic(&v, &p, &c.zt).unwrap());
    assert!(is_cauchy_characteristic(&VectorField::zero(&c.chart), &p, &c.zt).unwrap());
    assert!(!is_cauchy_characteristic(&VectorField::partial(&c.chart, 0), &p, &c.zt).unwrap());
    let cp = cauchy_distribution(&p, &c.zt).unwrap();
    assert!(cp.contains(&v, &c.zt).unwrap());

    let c2 = Ctx::new(&["x1", "x2"]);
    let cp2 = cauchy_distribution(&c2.span("span{dx1}"), &c2.zt).unwrap();
    assert_eq!(cp2, Distribution::coordinate(&c2.chart, &[1], &c2.zt).unwrap());
}

#[test]
fn extension_lies_in_cauchy_distribution() {
    let (c, gens, _) = invariance_fixture();
    // A distribution annihilating P: D = span{∂x3} with P = span{ω¹, ω²}
    // after the extension w.r.t. ∂x3 alone.
    let d = Distribution::coordinate(&c.chart, &[2], &c.zt).unwrap();
    let ext = invariant_extension_of(&c.chart, &gens, &d, &c.zt).unwrap();
    let cp = cauchy_distribution(&ext.codistribution, &c.zt).unwrap();
    assert!(cp.contains_all(&d, &c.zt).unwrap());
}
