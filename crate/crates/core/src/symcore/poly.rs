//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept sorted by descending lexicographic monomial order, where a
//! smaller [`Var`] is the more significant variable. Polynomials that mention
//! `cos(a)` are kept reduced: no monomial carries `cos(a)` to a power above 1
//! (the relation `cos² = 1 − sin²` is applied by [`Poly::reduce_trig`]).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::{Symbol, Var};

pub type Coeff = BigRational;

#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let mut s = SmallVec::new();
        s.push((v, exp));
        Monomial(s)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exp(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| other.exp(v) >= *e)
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (v, e) in &self.0 {
            let d = e - other.exp(v);
            if d > 0 {
                out.push((v.clone(), d));
            }
        }
        Monomial(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (v, e) in &self.0 {
            let d = (*e).min(other.exp(v));
            if d > 0 {
                out.push((v.clone(), d));
            }
        }
        Monomial(out)
    }

    /// Remove `v` entirely, returning its exponent and the remainder.
    pub fn split_off(&self, v: &Var) -> (u32, Monomial) {
        let mut e = 0;
        let mut out = SmallVec::new();
        for (w, k) in &self.0 {
            if w == v {
                e = *k;
            } else {
                out.push((w.clone(), *k));
            }
        }
        (e, Monomial(out))
    }

    fn high_cos(&self) -> Option<usize> {
        self.0.iter().position(|(v, e)| matches!(v, Var::Cos(_)) && *e >= 2)
    }

    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if a[i].1 != b[j].1 {
                        return a[i].1.cmp(&b[j].1);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: Vec<(Monomial, Coeff)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: vec![(Monomial::one(), c)],
        }
    }

    pub fn var(v: Var) -> Self {
        Poly {
            terms: vec![(Monomial::var(v, 1), Coeff::one())],
        }
        .reduce_trig()
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: vec![(m, c)] }.reduce_trig()
    }

    /// Build from arbitrary terms: sorts, merges and drops zeros. Does not
    /// apply the trigonometric reduction.
    pub fn from_terms(mut terms: Vec<(Monomial, Coeff)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Coeff)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [(m, c)] if m.is_one() && c.is_one())
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &Coeff {
        &self.terms[0].1
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.factors() {
                s.insert(v.clone());
            }
        }
        s
    }

    /// Symbols mentioned directly or as `sin`/`cos` arguments.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.vars().into_iter().map(|v| v.symbol().clone()).collect()
    }

    pub fn degree(&self, v: &Var) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &Coeff| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sign(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Poly { terms: out }
    }

    /// Product in the free polynomial ring (no trigonometric reduction).
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(k) = self.as_constant() {
            return other.scale(&k);
        }
        if let Some(k) = other.as_constant() {
            return self.scale(&k);
        }
        let mut acc: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_raw(other).reduce_trig()
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Apply `cos(a)² → 1 − sin(a)²` until every `cos` exponent is below 2.
    pub fn reduce_trig(self) -> Poly {
        if !self.terms.iter().any(|(m, _)| m.high_cos().is_some()) {
            return self;
        }
        let mut out = Vec::with_capacity(self.terms.len());
        let mut work = self.terms;
        while let Some((m, c)) = work.pop() {
            match m.high_cos() {
                Some(idx) => {
                    let (v, e) = m.0[idx].clone();
                    let sym = v.symbol().clone();
                    let mut lowered = m.clone();
                    if e == 2 {
                        lowered.0.remove(idx);
                    } else {
                        lowered.0[idx].1 = e - 2;
                    }
                    let with_sin = lowered.mul(&Monomial::var(Var::Sin(sym), 2));
                    work.push((lowered, c.clone()));
                    work.push((with_sin, -c));
                }
                None => out.push((m, c)),
            }
        }
        Poly::from_terms(out)
    }

    /// Exact quotient in the free polynomial ring, if `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(k) = divisor.as_constant() {
            return Some(self.scale(&k.recip()));
        }
        let (dlm, dlc) = (divisor.lm().clone(), divisor.lc().clone());
        if divisor.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dlm.divides(m) {
                    return None;
                }
                terms.push((m.div(&dlm), c / &dlc));
            }
            return Some(Poly { terms });
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while !rem.is_zero() {
            let (rm, rc) = (rem.lm().clone(), rem.lc().clone());
            if !dlm.divides(&rm) {
                return None;
            }
            let tm = rm.div(&dlm);
            let tc = &rc / &dlc;
            let step = divisor.mul_term(&tm, &tc);
            rem = rem.sub(&step);
            quot.push((tm, tc));
        }
        Some(Poly::from_terms(quot))
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(tm, tc)| (tm.mul(m), tc * c)).collect(),
        }
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.lc().is_one() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Dense coefficient list with respect to `v`: `self = Σ cᵢ·vⁱ`.
    pub fn coefficients_in(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn from_coefficients(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            let vm = Monomial::var(v.clone(), i as u32);
            for (m, k) in &c.terms {
                terms.push((m.mul(&vm), k.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Formal partial derivative with respect to one indeterminate.
    pub fn diff_var(&self, v: &Var) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let (_, rest) = m.split_off(v);
            let m2 = rest.mul(&Monomial::var(v.clone(), e - 1));
            terms.push((m2, c * Coeff::from_integer(e.into())));
        }
        Poly::from_terms(terms)
    }

    /// Evaluate with a value for each indeterminate.
    pub fn eval_rational<F>(&self, mut value: F) -> Coeff
    where
        F: FnMut(&Var) -> Coeff,
    {
        let mut cache: BTreeMap<&Var, Coeff> = BTreeMap::new();
        let mut total = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let base = cache.entry(v).or_insert_with(|| value(v));
                t *= num_traits::pow(base.clone(), *e as usize);
            }
            total += t;
        }
        total
    }

    /// Sign of the leading coefficient.
    pub fn leading_is_negative(&self) -> bool {
        !self.is_zero() && self.lc().is_negative()
    }
}
