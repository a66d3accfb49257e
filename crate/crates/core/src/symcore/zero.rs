use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::poly::Poly;
use super::symbol::Var;
use super::SymError;

/// Zero test used for every rank decision.
///
/// The decision itself is the canonical form (a reduced numerator is zero
/// exactly when the function is). Nonzero verdicts are cross-checked by
/// evaluating the numerator at random rational points; if every sample is
/// zero the normal form and the numbers disagree, which is reported as
/// [`SymError::InternalInconsistency`] rather than resolved either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroTest {
    pub seed: u64,
    pub samples: usize,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            seed: 0x5eed_c0de,
            samples: 8,
        }
    }
}

impl ZeroTest {
    pub fn new(seed: u64, samples: usize) -> Self {
        ZeroTest { seed, samples }
    }

    pub fn is_zero(&self, e: &Expr) -> Result<bool, SymError> {
        if e.is_zero() {
            return Ok(true);
        }
        if self.samples == 0 || e.numer().is_constant() {
            return Ok(false);
        }
        let mut rng = self.rng_for(e.numer());
        for _ in 0..self.samples {
            if !self.sample(e.numer(), &mut rng).is_zero() {
                return Ok(false);
            }
        }
        Err(SymError::InternalInconsistency(format!(
            "nonzero normal form {e} vanished at {} random points",
            self.samples
        )))
    }

    fn rng_for(&self, p: &Poly) -> ChaCha8Rng {
        let mut h = DefaultHasher::new();
        p.hash(&mut h);
        ChaCha8Rng::seed_from_u64(self.seed ^ h.finish())
    }

    /// Value of `p` at a random point; trigonometric pairs are drawn from the
    /// rational parametrization of the unit circle.
    fn sample(&self, p: &Poly, rng: &mut ChaCha8Rng) -> BigRational {
        let mut vals: HashMap<Var, BigRational> = HashMap::new();
        for v in p.vars() {
            let x = match &v {
                Var::Sym(_) => random_rational(rng),
                Var::Sin(s) | Var::Cos(s) => {
                    if vals.contains_key(&v) {
                        continue;
                    }
                    let t = random_rational(rng);
                    let one = BigRational::one();
                    let d = &one + &t * &t;
                    let sin = (BigRational::from_integer(BigInt::from(2)) * &t) / &d;
                    let cos = (&one - &t * &t) / &d;
                    vals.insert(Var::Sin(s.clone()), sin);
                    vals.insert(Var::Cos(s.clone()), cos);
                    continue;
                }
            };
            vals.insert(v, x);
        }
        p.eval_rational(|v| vals[v].clone())
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let p: i64 = rng.gen_range(-97..=97);
    let q: i64 = rng.gen_range(1..=31);
    let r = BigRational::new(p.into(), q.into());
    if r.is_zero() {
        BigRational::new(1.into(), 7.into())
    } else {
        r
    }
}
