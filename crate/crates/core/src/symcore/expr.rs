use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::poly::{Coeff, Poly};
use super::symbol::{Symbol, Var};
use super::SymError;

/// A normalized scalar: a quotient of two polynomials in symbols and
/// `sin`/`cos` of symbols.
///
/// The representation is canonical up to common factors the GCD cannot see:
/// the numerator and denominator are trig-reduced and the denominator has
/// leading coefficient 1. Zero has exactly one representation, so
/// [`Expr::is_zero`] is exact. Equality is semantic (cross-multiplication).
#[derive(Clone, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(k: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::constant(BigRational::new(p.into(), q.into()))
    }

    pub fn constant(c: BigRational) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn sym(s: &Symbol) -> Self {
        Self::from_poly(Poly::var(Var::Sym(s.clone())))
    }

    pub fn sin(s: &Symbol) -> Self {
        Self::from_poly(Poly::var(Var::Sin(s.clone())))
    }

    pub fn cos(s: &Symbol) -> Self {
        Self::from_poly(Poly::var(Var::Cos(s.clone())))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p.reduce_trig(),
            den: Poly::one(),
        }
    }

    /// `num / den` brought to canonical form; `None` when `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = (num.reduce_trig(), den.reduce_trig());
        if num.is_zero() {
            return Some(Self::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Some(Self::scaled(num, den))
    }

    /// Make the denominator monic; inputs must already be coprime.
    fn scaled(num: Poly, den: Poly) -> Self {
        if den.lc().is_one() {
            return Expr { num, den };
        }
        let inv = den.lc().recip();
        Expr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    /// The symbol this expression is, if it is a bare symbol.
    pub fn as_symbol(&self) -> Option<Symbol> {
        if !self.den.is_one() {
            return None;
        }
        match self.num.terms() {
            [(m, c)] if c.is_one() => match m.factors() {
                [(Var::Sym(s), 1)] => Some(s.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    /// Every symbol the expression depends on, including trig arguments.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        let hit = |p: &Poly| p.vars().iter().any(|v| v.symbol() == s);
        hit(&self.num) || hit(&self.den)
    }

    pub fn recip(&self) -> Option<Expr> {
        if self.is_zero() {
            return None;
        }
        Some(Self::scaled(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        Some(self * &other.recip()?)
    }

    pub fn pow(&self, e: i32) -> Expr {
        let base = if e < 0 {
            self.recip().expect("negative power of zero")
        } else {
            self.clone()
        };
        let k = e.unsigned_abs();
        Self::scaled(base.num.pow(k), base.den.pow(k))
    }

    pub fn scale(&self, k: &BigRational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Partial derivative with respect to `s`.
    pub fn diff(&self, s: &Symbol) -> Expr {
        let dn = diff_poly(&self.num, s);
        let dd = diff_poly(&self.den, s);
        if dd.is_zero() {
            return Expr::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        let top = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_parts(top, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Simultaneous substitution of symbols by expressions.
    ///
    /// A `sin`/`cos` whose argument is bound must map to another bare symbol
    /// or to the constant 0; anything else leaves the supported fragment.
    pub fn substitute(&self, bindings: &HashMap<Symbol, Expr>) -> Result<Expr, SymError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut images: BTreeMap<Var, Expr> = BTreeMap::new();
        for v in self.num.vars().into_iter().chain(self.den.vars()) {
            if images.contains_key(&v) {
                continue;
            }
            if let Some(img) = var_image(&v, bindings)? {
                images.insert(v, img);
            }
        }
        if images.is_empty() {
            return Ok(self.clone());
        }
        let n = eval_poly(&self.num, &images);
        let d = eval_poly(&self.den, &images);
        n.checked_div(&d).ok_or(SymError::PoleAtPoint)
    }

    /// Exact value at a rational point binding every free symbol.
    pub fn evaluate(&self, point: &HashMap<Symbol, BigRational>) -> Result<BigRational, SymError> {
        let value = |v: &Var| -> Result<BigRational, SymError> {
            let s = v.symbol();
            let x = point
                .get(s)
                .ok_or_else(|| SymError::UnboundSymbol(s.name().to_string()))?;
            match v {
                Var::Sym(_) => Ok(x.clone()),
                Var::Sin(_) if x.is_zero() => Ok(BigRational::zero()),
                Var::Cos(_) if x.is_zero() => Ok(BigRational::one()),
                _ => Err(SymError::NonRationalTrigArgument(s.name().to_string())),
            }
        };
        let mut vals: HashMap<Var, BigRational> = HashMap::new();
        for v in self.num.vars().into_iter().chain(self.den.vars()) {
            if let std::collections::hash_map::Entry::Vacant(slot) = vals.entry(v) {
                let x = value(slot.key())?;
                slot.insert(x);
            }
        }
        let d = self.den.eval_rational(|v| vals[v].clone());
        if d.is_zero() {
            return Err(SymError::PoleAtPoint);
        }
        Ok(self.num.eval_rational(|v| vals[v].clone()) / d)
    }

    /// Semantic equality is exact for reduced forms.
    pub fn equals(&self, other: &Expr) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

fn var_image(v: &Var, bindings: &HashMap<Symbol, Expr>) -> Result<Option<Expr>, SymError> {
    let Some(b) = bindings.get(v.symbol()) else {
        return Ok(None);
    };
    match v {
        Var::Sym(_) => Ok(Some(b.clone())),
        Var::Sin(s) | Var::Cos(s) => {
            let is_sin = matches!(v, Var::Sin(_));
            if let Some(t) = b.as_symbol() {
                return Ok(Some(if is_sin { Expr::sin(&t) } else { Expr::cos(&t) }));
            }
            if b.is_zero() {
                return Ok(Some(if is_sin { Expr::zero() } else { Expr::one() }));
            }
            Err(SymError::OutOfFragment(format!(
                "{}({}) with {} replaced by {}",
                if is_sin { "sin" } else { "cos" },
                s,
                s,
                b
            )))
        }
    }
}

/// Evaluate a polynomial at rational-function images of some of its
/// indeterminates. Denominators are grouped so that the result is formed with
/// polynomial arithmetic and one final cancellation.
fn eval_poly(p: &Poly, images: &BTreeMap<Var, Expr>) -> Expr {
    let vars: Vec<Var> = p.vars().into_iter().collect();
    let mut nums: Vec<Poly> = Vec::with_capacity(vars.len());
    let mut group_of: Vec<Option<usize>> = Vec::with_capacity(vars.len());
    let mut groups: Vec<Poly> = Vec::new();
    for v in &vars {
        match images.get(v) {
            Some(e) => {
                nums.push(e.num.clone());
                if e.den.is_one() {
                    group_of.push(None);
                } else {
                    let idx = match groups.iter().position(|g| *g == e.den) {
                        Some(i) => i,
                        None => {
                            groups.push(e.den.clone());
                            groups.len() - 1
                        }
                    };
                    group_of.push(Some(idx));
                }
            }
            None => {
                nums.push(Poly::var(v.clone()));
                group_of.push(None);
            }
        }
    }
    let index: HashMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut max_deg = vec![0u32; groups.len()];
    for (m, _) in p.terms() {
        let mut deg = vec![0u32; groups.len()];
        for (v, e) in m.factors() {
            if let Some(g) = group_of[index[v]] {
                deg[g] += e;
            }
        }
        for (mx, d) in max_deg.iter_mut().zip(deg) {
            *mx = (*mx).max(d);
        }
    }

    let mut num_pows: HashMap<(usize, u32), Poly> = HashMap::new();
    let mut den_pows: HashMap<(usize, u32), Poly> = HashMap::new();
    let mut total = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::constant(c.clone());
        let mut deg = vec![0u32; groups.len()];
        for (v, e) in m.factors() {
            let i = index[v];
            if let Some(g) = group_of[i] {
                deg[g] += e;
            }
            let pw = num_pows.entry((i, *e)).or_insert_with(|| nums[i].pow(*e));
            term = term.mul(pw);
        }
        for (g, d) in deg.iter().enumerate() {
            let k = max_deg[g] - d;
            if k > 0 {
                let pw = den_pows.entry((g, k)).or_insert_with(|| groups[g].pow(k));
                term = term.mul(pw);
            }
        }
        total = total.add(&term);
    }
    let mut den = Poly::one();
    for (g, d) in max_deg.iter().enumerate() {
        if *d > 0 {
            den = den.mul(&groups[g].pow(*d));
        }
    }
    Expr::from_parts(total, den).expect("product of nonzero denominators")
}

fn diff_poly(p: &Poly, s: &Symbol) -> Poly {
    let sv = Var::Sin(s.clone());
    let cv = Var::Cos(s.clone());
    let mut r = p.diff_var(&Var::Sym(s.clone()));
    if p.degree(&sv) > 0 {
        r = r.add(&p.diff_var(&sv).mul(&Poly::var(cv.clone())));
    }
    if p.degree(&cv) > 0 {
        r = r.sub(&p.diff_var(&cv).mul(&Poly::var(sv)));
    }
    r
}

fn add_fractions(a: &Expr, b: &Expr, negate: bool) -> Expr {
    let bn = if negate { b.num.neg() } else { b.num.clone() };
    if a.is_zero() {
        return Expr {
            num: bn,
            den: b.den.clone(),
        };
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        if a.den.is_one() {
            return Expr {
                num: a.num.add(&bn),
                den: Poly::one(),
            };
        }
        return Expr::from_parts(a.num.add(&bn), a.den.clone()).unwrap();
    }
    // Henrici: only the common part of the denominators can cancel.
    let g = gcd(&a.den, &b.den);
    let ad = a.den.div_exact(&g).unwrap();
    let bd = b.den.div_exact(&g).unwrap();
    let t = a.num.mul(&bd).add(&bn.mul(&ad));
    if t.is_zero() {
        return Expr::zero();
    }
    let g2 = gcd(&t, &g);
    let t = t.div_exact(&g2).unwrap();
    let den = ad.mul(&b.den.div_exact(&g2).unwrap());
    Expr::scaled(t, den)
}

fn mul_fractions(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return Expr {
            num: a.num.mul(&b.num),
            den: Poly::one(),
        };
    }
    // Cross-cancel, then the result is already coprime.
    let g1 = gcd(&a.num, &b.den);
    let g2 = gcd(&b.num, &a.den);
    let an = a.num.div_exact(&g1).unwrap();
    let bd = b.den.div_exact(&g1).unwrap();
    let bn = b.num.div_exact(&g2).unwrap();
    let ad = a.den.div_exact(&g2).unwrap();
    let num = an.mul(&bn);
    let den = ad.mul(&bd);
    if num.vars().iter().any(|v| matches!(v, Var::Cos(_))) || den.vars().iter().any(|v| matches!(v, Var::Cos(_))) {
        // Trig reduction can create factors the cross-cancellation missed.
        return Expr::from_parts(num, den).unwrap();
    }
    Expr::scaled(num, den)
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for Expr {}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl From<i64> for Expr {
    fn from(k: i64) -> Self {
        Expr::int(k)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::sym(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(&self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| add_fractions(a, b, false));
binop!(Sub, sub, |a, b| add_fractions(a, b, true));
binop!(Mul, mul, mul_fractions);
binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by the zero expression"));

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

/// Compact rendering of a polynomial, e.g. `x2+1` or `u1*x1-u2*x1`.
pub(crate) fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if neg {
            f.write_str("-")?;
        } else if i > 0 {
            f.write_str("+")?;
        }
        let a = c.abs();
        if m.is_one() {
            fmt_coeff(&a, f)?;
            continue;
        }
        if !a.is_one() {
            fmt_coeff(&a, f)?;
            f.write_str("*")?;
        }
        for (j, (v, e)) in m.factors().iter().enumerate() {
            if j > 0 {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
    }
    Ok(())
}

fn fmt_coeff(c: &Coeff, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

struct P<'a>(&'a Poly);

impl fmt::Display for P<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self.0, f)
    }
}

impl Expr {
    /// True when the rendering is a single product (no top-level `+`/`-`
    /// between terms), so it can be juxtaposed with `*` without parentheses.
    pub(crate) fn is_single_term(&self) -> bool {
        self.num.len() <= 1 && self.den.is_one()
    }

    pub(crate) fn leading_negative(&self) -> bool {
        self.num.leading_is_negative()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return fmt_poly(&self.num, f);
        }
        if self.num.len() > 1 {
            write!(f, "({})", P(&self.num))?;
        } else {
            fmt_poly(&self.num, f)?;
        }
        let den_simple = self.den.len() == 1 && self.den.terms()[0].0.factors().len() <= 1;
        if den_simple {
            write!(f, "/{}", P(&self.den))
        } else {
            write!(f, "/({})", P(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(name: &str) -> Symbol {
        Symbol::state(name)
    }

    fn e(name: &str) -> Expr {
        Expr::sym(&s(name))
    }

    #[test]
    fn pythagorean_identity_vanishes() {
        let x = s("x");
        let z = Expr::sin(&x).pow(2) + Expr::cos(&x).pow(2) - Expr::one();
        assert!(z.is_zero());
        let w = e("x") + Expr::one();
        let z2 = Expr::cos(&x).pow(2) * &w + Expr::sin(&x).pow(2) * &w - &w;
        assert!(z2.is_zero());
    }

    #[test]
    fn commutativity_vanishes() {
        let z = e("x1") * e("x2") - e("x2") * e("x1");
        assert!(z.is_zero());
    }

    #[test]
    fn cancellation() {
        let q = (e("u1") - e("u2")) * e("x1") / e("x1");
        assert_eq!(q.to_string(), "u1-u2");
        assert!(q.is_polynomial());
    }

    #[test]
    fn derivatives() {
        assert_eq!((e("x1") * e("x2")).diff(&s("x1")).to_string(), "x2");
        let x5 = s("x5");
        assert_eq!(Expr::sin(&x5).diff(&x5), Expr::cos(&x5));
        let row = e("x1") * (e("u1") - e("u2"));
        assert_eq!(row.diff(&s("u2")), -e("x1"));
        let q = e("x1") / (e("x2") + Expr::one());
        assert_eq!(q.diff(&s("x2")), -e("x1") / (e("x2") + Expr::one()).pow(2));
    }

    #[test]
    fn substitution() {
        let mut b = HashMap::new();
        b.insert(s("x1"), e("f1"));
        assert_eq!((e("x1") + e("x2")).substitute(&b).unwrap(), e("f1") + e("x2"));
        let mut b = HashMap::new();
        b.insert(s("x5"), Expr::zero());
        assert_eq!(Expr::cos(&s("x5")).substitute(&b).unwrap(), Expr::one());
        let mut b = HashMap::new();
        b.insert(s("x5"), e("a") + e("b"));
        assert!(matches!(
            Expr::sin(&s("x5")).substitute(&b),
            Err(SymError::OutOfFragment(_))
        ));
    }

    #[test]
    fn substitution_with_denominators() {
        let mut b = HashMap::new();
        let d = e("t") + Expr::one();
        b.insert(s("x1"), e("a") / &d);
        b.insert(s("x2"), e("b") / &d);
        let g = e("x1") * e("x2") + e("x1");
        let expected = &e("a") / &d * (&e("b") / &d) + &e("a") / &d;
        assert_eq!(g.substitute(&b).unwrap(), expected);
    }

    #[test]
    fn evaluation() {
        let mut pt = HashMap::new();
        pt.insert(s("u1"), BigRational::one());
        pt.insert(s("u2"), BigRational::zero());
        assert_eq!((e("u1") - e("u2")).evaluate(&pt).unwrap(), BigRational::one());
        let mut pt = HashMap::new();
        pt.insert(s("x1"), BigRational::zero());
        pt.insert(s("x2"), BigRational::zero());
        let q = e("x1") / (e("x2") + Expr::one());
        assert_eq!(q.evaluate(&pt).unwrap(), BigRational::zero());
        let inv = Expr::one() / e("x1");
        assert!(matches!(inv.evaluate(&pt), Err(SymError::PoleAtPoint)));
    }

    #[test]
    fn rendering() {
        let q = e("x1") / (e("x2") + Expr::one());
        assert_eq!(q.to_string(), "x1/(x2+1)");
        let r = (e("x1") + Expr::one()) / e("x2");
        assert_eq!(r.to_string(), "(x1+1)/x2");
        assert_eq!(Expr::ratio(1, 2).to_string(), "1/2");
        assert_eq!((e("x1") * Expr::int(-3)).to_string(), "-3*x1");
    }
}
