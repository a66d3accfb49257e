//! Multivariate polynomial GCD over ℚ. A modular pretest catches coprime
//! pairs, a heuristic evaluation/interpolation pass handles most of the
//! rest, and the recursive primitive PRS is the fallback.
//!
//! `sin(a)`/`cos(a)` indeterminates are treated as free variables here. For
//! trig-reduced inputs the cofactors are again reduced, so the result is safe
//! to use for cancellation even though it may miss factors that only appear
//! modulo the side relation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, Poly};
use super::symbol::Var;

/// Monic GCD (leading coefficient 1); `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        return monomial_gcd(a, b);
    }
    if a == b {
        return a.monic();
    }
    // Cheap exact-division probe: covers the very common "one divides the other".
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if large.div_exact(small).is_some() {
        return small.monic();
    }
    let (pa, pb) = (integer_primitive(a), integer_primitive(b));
    if certainly_coprime(&pa, &pb) {
        return Poly::one();
    }
    match heuristic(&pa, &pb) {
        Some(g) => g.monic(),
        None => gcd_rec(a, b).monic(),
    }
}

const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) % P
}

/// Image of an integer polynomial in `F_p[v]` after substituting `point`
/// for every other indeterminate, as a dense coefficient vector.
fn univariate_image(p: &Poly, v: &Var, point: &dyn Fn(&Var) -> u64) -> Vec<u64> {
    let big_p = BigInt::from(P);
    let mut out = vec![0u64; p.degree(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = c.numer().mod_floor(&big_p).try_into().unwrap_or(0u64);
        let mut e = 0;
        for (w, k) in m.factors() {
            if w == v {
                e = *k as usize;
            } else {
                t = mul_mod(t, pow_mod(point(w), *k as u64));
            }
        }
        out[e] = (out[e] + t) % P;
    }
    out
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn gcd_degree_mod_p(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), P - 2);
        while a.len() >= b.len() {
            let k = mul_mod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + P - mul_mod(k, *bc)) % P;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// `true` only if `gcd(a, b)` is provably constant. For each shared
/// indeterminate `v`, the degree in `v` of the GCD is bounded by that of
/// the GCD of images in `F_p[v]`, as long as the leading coefficients in
/// `v` survive the substitution.
fn certainly_coprime(a: &Poly, b: &Poly) -> bool {
    let shared: Vec<Var> = a.vars().intersection(&b.vars()).cloned().collect();
    'vars: for (vi, v) in shared.iter().enumerate() {
        for attempt in 0..2u64 {
            let point = |w: &Var| {
                let wi = shared.iter().position(|s| s == w).unwrap_or(shared.len()) as u64;
                let h = w
                    .symbol()
                    .name()
                    .bytes()
                    .fold(wi, |h, c| h.wrapping_mul(131).wrapping_add(c as u64));
                splitmix(h ^ (attempt << 32) ^ (vi as u64) << 48)
            };
            let ia = univariate_image(a, v, &point);
            let ib = univariate_image(b, v, &point);
            if ia.last() == Some(&0) || ib.last() == Some(&0) {
                continue;
            }
            if gcd_degree_mod_p(ia, ib) == 0 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

/// `p` scaled to integer coefficients with no common integer factor.
fn integer_primitive(p: &Poly) -> Poly {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    p.scale(&BigRational::new(den, num))
}

fn integer_content(p: &Poly) -> BigInt {
    p.terms().iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c.numer()))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

/// Heuristic GCD of integer polynomials: evaluate the main variable at a
/// large integer `ξ`, take the GCD of the images recursively and read the
/// result back from its balanced base-`ξ` digits. A candidate is accepted
/// only if it divides both inputs exactly, which together with the size of
/// `ξ` makes it the GCD. Returns `None` when no candidate is found, so the
/// caller can fall back to the PRS.
fn heuristic(a: &Poly, b: &Poly) -> Option<Poly> {
    let (ca, cb) = (integer_content(a), integer_content(b));
    let c = Poly::constant(BigRational::from_integer(ca.gcd(&cb)));
    if a.is_constant() || b.is_constant() {
        return Some(c);
    }
    let a = a.scale(&BigRational::from_integer(ca).recip());
    let b = b.scale(&BigRational::from_integer(cb).recip());
    let v = a.vars().union(&b.vars()).next().cloned()?;
    let mut xi: BigInt = BigInt::from(2) * max_norm(&a).min(max_norm(&b)) + 29;
    for _ in 0..6 {
        if xi.bits() > 1 << 16 {
            return None;
        }
        let xq = BigRational::from_integer(xi.clone());
        let (fa, fb) = (eval_at(&a, &v, &xq), eval_at(&b, &v, &xq));
        if !fa.is_zero() && !fb.is_zero() {
            let h = heuristic(&fa, &fb)?;
            let candidates = [
                Some(interpolate(&h, &v, &xi)),
                fa.div_exact(&h)
                    .map(|q| interpolate(&q, &v, &xi))
                    .and_then(|q| a.div_exact(&integer_primitive(&q))),
                fb.div_exact(&h)
                    .map(|q| interpolate(&q, &v, &xi))
                    .and_then(|q| b.div_exact(&integer_primitive(&q))),
            ];
            for g in candidates.into_iter().flatten() {
                if g.is_zero() {
                    continue;
                }
                let g = integer_primitive(&g);
                if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.mul_raw(&c));
                }
            }
        }
        xi = xi * 73794u32 / 27011u32 + 7u32;
    }
    None
}

fn eval_at(p: &Poly, v: &Var, x: &BigRational) -> Poly {
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let (e, rest) = m.split_off(v);
            (rest, c * num_traits::pow(x.clone(), e as usize))
        })
        .collect();
    Poly::from_terms(terms)
}

/// Inverse of [`eval_at`] for polynomials whose coefficients are the
/// balanced base-`xi` digits.
fn interpolate(h: &Poly, v: &Var, xi: &BigInt) -> Poly {
    let half = xi / 2;
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut rest = c.numer().clone();
        let mut k = 0u32;
        while !rest.is_zero() {
            let mut d = rest.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            if !d.is_zero() {
                terms.push((
                    m.mul(&Monomial::var(v.clone(), k)),
                    BigRational::from_integer(d.clone()),
                ));
            }
            rest = (rest - d) / xi;
            k += 1;
        }
    }
    Poly::from_terms(terms)
}

/// GCD when at least one side is a single term.
fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let m = a.monomial_content().gcd(&b.monomial_content());
    Poly::monomial(m, num_traits::One::one())
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        return monomial_gcd(a, b);
    }
    let va = a.vars();
    let vb = b.vars();
    // The most significant variable present in either polynomial.
    let v = match (va.iter().next(), vb.iter().next()) {
        (Some(x), Some(y)) => x.min(y).clone(),
        (Some(x), None) | (None, Some(x)) => x.clone(),
        (None, None) => return Poly::one(),
    };
    let in_a = va.contains(&v);
    let in_b = vb.contains(&v);
    if in_a && !in_b {
        return gcd_rec(&content(a, &v), b);
    }
    if in_b && !in_a {
        return gcd_rec(a, &content(b, &v));
    }

    let ca = content(a, &v);
    let cb = content(b, &v);
    let c = gcd_rec(&ca, &cb);
    let mut pa = coeffs(&a.div_exact(&ca).expect("content divides"), &v);
    let mut pb = coeffs(&b.div_exact(&cb).expect("content divides"), &v);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !is_zero_vec(&pb) {
        let r = prem(&pa, &pb);
        let r = primitive(r);
        pa = pb;
        pb = r;
    }
    let g = Poly::from_coefficients(&v, &pa);
    c.mul_raw(&g)
}

fn coeffs(p: &Poly, v: &Var) -> Vec<Poly> {
    p.coefficients_in(v)
}

fn is_zero_vec(p: &[Poly]) -> bool {
    p.iter().all(Poly::is_zero)
}

/// GCD of the coefficients of `p` viewed as a polynomial in `v`.
fn content(p: &Poly, v: &Var) -> Poly {
    content_of(&coeffs(p, v))
}

fn content_of(cs: &[Poly]) -> Poly {
    let mut nonzero: Vec<&Poly> = cs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| c.len());
    let mut g = Poly::zero();
    for c in nonzero {
        g = gcd_rec(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.monic()
}

fn primitive(mut cs: Vec<Poly>) -> Vec<Poly> {
    while cs.last().is_some_and(Poly::is_zero) {
        cs.pop();
    }
    if cs.is_empty() {
        return cs;
    }
    let c = content_of(&cs);
    let lc = cs.last().unwrap().lc().clone();
    let inv = num_traits::Inv::inv(lc);
    cs.into_iter()
        .map(|x| x.div_exact(&c).expect("content divides").scale(&inv))
        .collect()
}

/// Pseudo-remainder of dense coefficient vectors (index = degree).
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    loop {
        while r.last().is_some_and(Poly::is_zero) {
            r.pop();
        }
        if r.len() < b.len() {
            return r;
        }
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul_raw(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            let t = bc.mul_raw(&lr);
            r[i + shift] = r[i + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::symbol::Symbol;

    fn v(name: &str) -> Poly {
        Poly::var(Var::Sym(Symbol::state(name)))
    }

    #[test]
    fn common_factor_found() {
        let f = v("x1").add(&v("x2"));
        let a = f.mul(&v("x3").sub(&Poly::one()));
        let b = f.mul(&v("x3").add(&v("x1")));
        assert_eq!(gcd(&a, &b), f);
    }

    #[test]
    fn coprime_gives_one() {
        let a = v("x1").mul(&v("x1")).add(&v("x2"));
        let b = v("x1").add(&v("x2"));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_parts() {
        let a = v("x1").mul(&v("x2")).mul(&v("x2"));
        let b = v("x2").mul(&v("x3")).add(&v("x2"));
        assert_eq!(gcd(&a, &b), v("x2"));
    }

    #[test]
    fn squares_and_higher_degree() {
        let f = v("x1").sub(&v("x2")).add(&Poly::one());
        let g = v("x3").mul(&v("x1")).add(&v("x2"));
        let a = f.pow(2).mul(&g);
        let b = f.mul(&g.pow(2)).mul(&v("x4").add(&Poly::one()));
        assert_eq!(gcd(&a, &b), f.mul(&g).monic());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly() -> impl Strategy<Value = Poly> {
            prop::collection::vec((-5i64..=5, [0u32..=2, 0u32..=2, 0u32..=2]), 1..=4).prop_map(|ts| {
                ts.iter().fold(Poly::zero(), |acc, (c, e)| {
                    let m = ["x1", "x2", "x3"]
                        .iter()
                        .zip(e)
                        .fold(Poly::constant(BigRational::from_integer((*c).into())), |t, (n, k)| {
                            t.mul(&v(n).pow(*k))
                        });
                    acc.add(&m)
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

            #[test]
            fn agrees_with_prs(f in poly(), a in poly(), b in poly()) {
                let (a, b) = (f.mul(&a), f.mul(&b));
                let g = gcd(&a, &b);
                if !a.is_zero() && !b.is_zero() {
                    prop_assert_eq!(&g, &gcd_rec(&a, &b).monic());
                    prop_assert!(a.div_exact(&g).is_some() && b.div_exact(&g).is_some());
                    if !f.is_zero() {
                        prop_assert!(g.div_exact(&f).is_some());
                    }
                }
            }

            #[test]
            fn heuristic_candidates_divide(a in poly(), b in poly()) {
                let ab = a.mul(&b);
                if ab.len() > 1 && b.len() > 1 {
                    let (pa, pb) = (integer_primitive(&ab), integer_primitive(&b));
                    if let Some(g) = heuristic(&pa, &pb) {
                        prop_assert!(pa.div_exact(&g).is_some() && pb.div_exact(&g).is_some());
                    }
                }
            }
        }
    }
}
