use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::Expr;
use super::poly::Poly;
use super::symbol::Symbol;
use super::zero::ZeroTest;
use super::SymError;

/// Dense row-major matrix over the expression field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix {
            rows,
            cols,
            data: vec![Expr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Expr::one();
        }
        m
    }

    /// Build from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Expr>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        ExprMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Expr>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Vec<Expr> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr, SymError>) -> Result<Self, SymError> {
        Ok(ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and pivot columns.
    ///
    /// Pivots are chosen column by column from the left; within a column the
    /// first (lowest-index) remaining row with a nonzero entry is used. Zero
    /// rows end up last.
    pub fn rref(&self, zt: &ZeroTest) -> Result<(ExprMatrix, Vec<usize>), SymError> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut found = None;
            for i in r..m.rows {
                if !zt.is_zero(&m[(i, c)])? {
                    found = Some(i);
                    break;
                }
            }
            let Some(p) = found else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip().expect("pivot is nonzero");
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] = &m[(r, j)] * &inv;
                }
            }
            m[(r, c)] = Expr::one();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let t = &factor * &m[(r, j)];
                    m[(i, j)] = &m[(i, j)] - &t;
                }
                m[(i, c)] = Expr::zero();
            }
            pivots.push(c);
            r += 1;
        }
        for e in &mut m.data {
            if zt.is_zero(e)? {
                *e = Expr::zero();
            }
        }
        Ok((m, pivots))
    }

    pub fn rank(&self, zt: &ZeroTest) -> Result<usize, SymError> {
        Ok(self.rref(zt)?.1.len())
    }

    /// Basis of the right kernel, one vector per non-pivot column.
    pub fn nullspace(&self, zt: &ZeroTest) -> Result<Vec<Vec<Expr>>, SymError> {
        let (r, pivots) = self.rref(zt)?;
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Expr::zero(); self.cols];
            v[free] = Expr::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[(i, free)];
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Rank after substituting a point for some symbols (others, such as
    /// parameters, stay symbolic). Rows are first multiplied through by their
    /// denominators so removable poles do not abort the evaluation.
    pub fn rank_at(&self, point: &HashMap<Symbol, BigRational>, zt: &ZeroTest) -> Result<usize, SymError> {
        let bindings: HashMap<Symbol, Expr> = point
            .iter()
            .map(|(s, v)| (s.clone(), Expr::constant(v.clone())))
            .collect();
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let cleared = clear_denominators(self.row(i));
            let mut row = Vec::with_capacity(self.cols);
            for e in cleared {
                row.push(e.substitute(&bindings)?);
            }
            rows.push(row);
        }
        ExprMatrix::from_rows(self.cols, rows).rank(zt)
    }
}

/// Scale a row so every entry is a polynomial (times a common factor that
/// does not change the row's span).
pub fn clear_denominators(row: &[Expr]) -> Vec<Expr> {
    let mut l = Poly::one();
    for e in row {
        if !e.is_polynomial() {
            let g = super::gcd::gcd(&l, e.denom());
            let part = e.denom().div_exact(&g).expect("gcd divides");
            l = l.mul(&part);
        }
    }
    if l.is_one() {
        return row.to_vec();
    }
    let le = Expr::from_poly(l);
    row.iter().map(|e| e * &le).collect()
}

/// Representative of the line through `row` with polynomial entries, no
/// common polynomial or integer factor, and a positive leading coefficient
/// in the first nonzero entry. Used for display and for cheap wedge products.
pub fn primitive_row(row: &[Expr]) -> Vec<Expr> {
    let cleared = clear_denominators(row);
    let mut g = Poly::zero();
    for e in &cleared {
        if !e.is_zero() {
            g = super::gcd::gcd(&g, e.numer());
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        return cleared;
    }
    let mut polys: Vec<Poly> = cleared
        .iter()
        .map(|e| e.numer().div_exact(&g).expect("gcd divides"))
        .collect();
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for p in &polys {
        for (_, c) in p.terms() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
    }
    let mut k = BigRational::new(den_lcm, num_gcd);
    if let Some(first) = polys.iter().find(|p| !p.is_zero()) {
        if first.leading_is_negative() {
            k = -k;
        }
    }
    for p in &mut polys {
        *p = p.scale(&k);
    }
    polys.into_iter().map(Expr::from_poly).collect()
}

impl std::ops::Index<(usize, usize)> for ExprMatrix {
    type Output = Expr;
    fn index(&self, (i, j): (usize, usize)) -> &Expr {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExprMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Expr {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: &str) -> Expr {
        Expr::sym(&Symbol::state(n))
    }

    #[test]
    fn identity_rref() {
        let zt = ZeroTest::default();
        let (r, p) = ExprMatrix::identity(3).rref(&zt).unwrap();
        assert_eq!(r, ExprMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn proportional_rows() {
        let zt = ZeroTest::default();
        let a = e("u1") - e("u2");
        let lam = e("lam");
        let m = ExprMatrix::from_rows(
            3,
            vec![
                vec![a.clone(), e("x1"), Expr::zero()],
                vec![&lam * &a, &lam * e("x1"), Expr::zero()],
            ],
        );
        let (r, p) = m.rref(&zt).unwrap();
        assert_eq!(p, vec![0]);
        assert_eq!(r[(0, 1)], e("x1") / &a);
        assert!(r.row(1).iter().all(Expr::is_zero));
    }

    #[test]
    fn kernel_of_generic_row() {
        let zt = ZeroTest::default();
        let m = ExprMatrix::from_rows(2, vec![vec![e("a"), e("b")]]);
        let k = m.nullspace(&zt).unwrap();
        assert_eq!(k.len(), 1);
        // Proportional to (-b, a).
        assert_eq!(&k[0][0] * e("a") + &k[0][1] * e("b"), Expr::zero());
        assert_eq!(k[0][1], Expr::one());
        let z = ExprMatrix::zeros(2, 3);
        assert_eq!(z.nullspace(&zt).unwrap().len(), 3);
    }

    #[test]
    fn rank_at_point_drops() {
        let zt = ZeroTest::default();
        let m = ExprMatrix::from_rows(2, vec![vec![e("x1"), Expr::zero()], vec![Expr::zero(), Expr::one()]]);
        assert_eq!(m.rank(&zt).unwrap(), 2);
        let mut pt = HashMap::new();
        pt.insert(Symbol::state("x1"), BigRational::from_integer(0.into()));
        assert_eq!(m.rank_at(&pt, &zt).unwrap(), 1);
    }
}
