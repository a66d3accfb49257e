use std::fmt;

use crate::symcore::{primitive_row, Expr, ExprMatrix, ZeroTest};

use super::chart::Chart;
use super::field::VectorField;
use super::forms::{render_combination, KForm, OneForm};
use super::ExtError;

/// Row space over the expression field, kept in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RowSpace {
    chart: Chart,
    rows: Vec<Vec<Expr>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    fn span(chart: &Chart, rows: Vec<Vec<Expr>>, zt: &ZeroTest) -> Result<Self, ExtError> {
        let n = chart.dim();
        if rows.is_empty() {
            return Ok(Self::empty(chart));
        }
        let (r, pivots) = ExprMatrix::from_rows(n, rows).rref(zt)?;
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Ok(RowSpace {
            chart: chart.clone(),
            rows,
            pivots,
        })
    }

    fn empty(chart: &Chart) -> Self {
        RowSpace {
            chart: chart.clone(),
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn full(chart: &Chart) -> Self {
        let n = chart.dim();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![Expr::zero(); n];
                r[i] = Expr::one();
                r
            })
            .collect();
        RowSpace {
            chart: chart.clone(),
            rows,
            pivots: (0..n).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after eliminating the pivot columns.
    fn reduce(&self, v: &[Expr]) -> Vec<Expr> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let k = v[c].clone();
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    v[j] = &v[j] - &(&k * r);
                }
            }
        }
        v
    }

    fn contains(&self, v: &[Expr], zt: &ZeroTest) -> Result<bool, ExtError> {
        for e in self.reduce(v) {
            if !zt.is_zero(&e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn with_rows(&self, extra: impl IntoIterator<Item = Vec<Expr>>, zt: &ZeroTest) -> Result<Self, ExtError> {
        let mut rows = self.rows.clone();
        rows.extend(extra);
        Self::span(&self.chart, rows, zt)
    }

    /// Kernel of the row space read off the rref directly.
    fn kernel(&self) -> Vec<Vec<Expr>> {
        let n = self.chart.dim();
        let mut out = Vec::new();
        for free in 0..n {
            if self.pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Expr::zero(); n];
            v[free] = Expr::one();
            for (row, &c) in self.rows.iter().zip(&self.pivots) {
                v[c] = -&row[free];
            }
            out.push(v);
        }
        out
    }
}

/// A codistribution `span{ω¹,…,ω^p}` in canonical (rref) form, so equal
/// codistributions compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codistribution {
    space: RowSpace,
}

/// Result of [`Codistribution::invariant_extension`].
#[derive(Clone, Debug)]
pub struct Extension {
    pub codistribution: Codistribution,
    /// Lie derivatives that were not already contained and had to be adjoined,
    /// in the order they were found.
    pub added: Vec<OneForm>,
    /// Rounds of differentiation performed, including the final one that
    /// found nothing new.
    pub rounds: usize,
}

impl Codistribution {
    pub fn span(chart: &Chart, forms: &[OneForm], zt: &ZeroTest) -> Result<Self, ExtError> {
        for f in forms {
            chart.check_same(f.chart())?;
        }
        let rows = forms.iter().map(|f| f.coeffs().to_vec()).collect();
        Ok(Codistribution {
            space: RowSpace::span(chart, rows, zt)?,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        Codistribution {
            space: RowSpace::empty(chart),
        }
    }

    /// The whole cotangent space.
    pub fn full(chart: &Chart) -> Self {
        Codistribution {
            space: RowSpace::full(chart),
        }
    }

    /// `span{dxⁱ : i ∈ idx}`.
    pub fn coordinate(chart: &Chart, idx: &[usize], zt: &ZeroTest) -> Result<Self, ExtError> {
        let forms: Vec<OneForm> = idx.iter().map(|&i| OneForm::dx(chart, i)).collect();
        Self::span(chart, &forms, zt)
    }

    pub fn chart(&self) -> &Chart {
        &self.space.chart
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.space.rows.is_empty()
    }

    /// Canonical basis: the nonzero rows of the reduced row echelon form.
    pub fn basis(&self) -> Vec<OneForm> {
        self.space
            .rows
            .iter()
            .map(|r| OneForm::new(self.chart(), r.clone()))
            .collect()
    }

    /// Pivot column of each canonical basis row.
    pub fn pivots(&self) -> &[usize] {
        &self.space.pivots
    }

    /// Canonical basis rescaled to polynomial, content-free rows.
    pub fn primitive_basis(&self) -> Vec<OneForm> {
        self.space
            .rows
            .iter()
            .map(|r| OneForm::new(self.chart(), primitive_row(r)))
            .collect()
    }

    pub fn coefficient_matrix(&self) -> ExprMatrix {
        ExprMatrix::from_rows(self.chart().dim(), self.space.rows.clone())
    }

    pub fn contains(&self, w: &OneForm, zt: &ZeroTest) -> Result<bool, ExtError> {
        self.chart().check_same(w.chart())?;
        self.space.contains(w.coeffs(), zt)
    }

    pub fn contains_all(&self, other: &Codistribution, zt: &ZeroTest) -> Result<bool, ExtError> {
        for r in &other.space.rows {
            if !self.space.contains(r, zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Residual of `w` after reduction against the canonical basis.
    pub fn reduce(&self, w: &OneForm) -> OneForm {
        OneForm::new(self.chart(), self.space.reduce(w.coeffs()))
    }

    pub fn sum(&self, other: &Codistribution, zt: &ZeroTest) -> Result<Self, ExtError> {
        self.chart().check_same(other.chart())?;
        Ok(Codistribution {
            space: self.space.with_rows(other.space.rows.clone(), zt)?,
        })
    }

    pub fn with_form(&self, w: &OneForm, zt: &ZeroTest) -> Result<Self, ExtError> {
        Ok(Codistribution {
            space: self.space.with_rows([w.coeffs().to_vec()], zt)?,
        })
    }

    /// `P⊥`: all vector fields annihilated by every form of `P`.
    pub fn annihilator(&self, zt: &ZeroTest) -> Result<Distribution, ExtError> {
        Ok(Distribution {
            space: RowSpace::span(self.chart(), self.space.kernel(), zt)?,
        })
    }

    /// `P ∩ Q`, computed as `(P⊥ + Q⊥)⊥`.
    pub fn intersect(&self, other: &Codistribution, zt: &ZeroTest) -> Result<Self, ExtError> {
        self.chart().check_same(other.chart())?;
        let d = self.annihilator(zt)?.sum(&other.annihilator(zt)?, zt)?;
        d.annihilator(zt)
    }

    /// Frobenius condition `dωⁱ ∧ ω¹ ∧ … ∧ ω^p = 0` for every basis form.
    pub fn is_integrable(&self, zt: &ZeroTest) -> Result<bool, ExtError> {
        let basis = self.primitive_basis();
        if basis.is_empty() || basis.len() == self.chart().dim() {
            return Ok(true);
        }
        let mut w = KForm::scalar(self.chart(), Expr::one());
        for b in &basis {
            w = w.wedge(&b.to_kform())?;
        }
        for b in &basis {
            let t = b.exterior_derivative().wedge(&w)?;
            if !t.is_zero_checked(zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `L_v ω ∈ P` for all basis fields `v` of `d` and basis forms `ω`.
    pub fn is_invariant(&self, d: &Distribution, zt: &ZeroTest) -> Result<bool, ExtError> {
        self.chart().check_same(d.chart())?;
        for w in self.primitive_basis() {
            for v in d.primitive_basis() {
                if !self.contains(&w.lie_derivative(&v)?, zt)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest codistribution containing `self` and invariant under `d`,
    /// starting from the primitive canonical basis as generators.
    pub fn invariant_extension(&self, d: &Distribution, zt: &ZeroTest) -> Result<Extension, ExtError> {
        invariant_extension_of(self.chart(), &self.primitive_basis(), d, zt)
    }

    /// Text rendering of the basis forms with denominators cleared.
    pub fn basis_strings(&self) -> Vec<String> {
        self.primitive_basis().iter().map(|w| w.to_string()).collect()
    }
}

/// Smallest `d`-invariant codistribution containing `span(gens)`.
///
/// Since `L_v(aω) = v(a)ω + a L_vω`, differentiating the generators suffices,
/// and each round only needs the generators adjoined in the previous one.
/// The iteration stops after at most `dim − dim span(gens)` productive rounds.
pub fn invariant_extension_of(
    chart: &Chart,
    gens: &[OneForm],
    d: &Distribution,
    zt: &ZeroTest,
) -> Result<Extension, ExtError> {
    chart.check_same(d.chart())?;
    let mut current = Codistribution::span(chart, gens, zt)?;
    let fields = d.primitive_basis();
    let mut frontier: Vec<OneForm> = gens.to_vec();
    let mut added = Vec::new();
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        let mut next = Vec::new();
        for w in &frontier {
            for v in &fields {
                let l = w.lie_derivative(v)?;
                if l.is_zero() || current.contains(&l, zt)? {
                    continue;
                }
                current = current.with_form(&l, zt)?;
                added.push(l.clone());
                next.push(l);
            }
        }
        frontier = next;
    }
    Ok(Extension {
        codistribution: current,
        added,
        rounds,
    })
}

/// A distribution `span{v₁,…,v_d}` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    space: RowSpace,
}

impl Distribution {
    pub fn span(chart: &Chart, fields: &[VectorField], zt: &ZeroTest) -> Result<Self, ExtError> {
        for f in fields {
            chart.check_same(f.chart())?;
        }
        let rows = fields.iter().map(|f| f.comps().to_vec()).collect();
        Ok(Distribution {
            space: RowSpace::span(chart, rows, zt)?,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        Distribution {
            space: RowSpace::empty(chart),
        }
    }

    pub fn full(chart: &Chart) -> Self {
        Distribution {
            space: RowSpace::full(chart),
        }
    }

    pub fn coordinate(chart: &Chart, idx: &[usize], zt: &ZeroTest) -> Result<Self, ExtError> {
        let f: Vec<VectorField> = idx.iter().map(|&i| VectorField::partial(chart, i)).collect();
        Self::span(chart, &f, zt)
    }

    pub fn chart(&self) -> &Chart {
        &self.space.chart
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> Vec<VectorField> {
        self.space
            .rows
            .iter()
            .map(|r| VectorField::new(self.chart(), r.clone()))
            .collect()
    }

    pub fn primitive_basis(&self) -> Vec<VectorField> {
        self.space
            .rows
            .iter()
            .map(|r| VectorField::new(self.chart(), primitive_row(r)))
            .collect()
    }

    pub fn contains(&self, v: &VectorField, zt: &ZeroTest) -> Result<bool, ExtError> {
        self.chart().check_same(v.chart())?;
        self.space.contains(v.comps(), zt)
    }

    pub fn contains_all(&self, other: &Distribution, zt: &ZeroTest) -> Result<bool, ExtError> {
        for r in &other.space.rows {
            if !self.space.contains(r, zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Distribution, zt: &ZeroTest) -> Result<Self, ExtError> {
        self.chart().check_same(other.chart())?;
        Ok(Distribution {
            space: self.space.with_rows(other.space.rows.clone(), zt)?,
        })
    }

    /// `D⊥`: all 1-forms vanishing on `D`.
    pub fn annihilator(&self, zt: &ZeroTest) -> Result<Codistribution, ExtError> {
        Ok(Codistribution {
            space: RowSpace::span(self.chart(), self.space.kernel(), zt)?,
        })
    }

    pub fn is_involutive(&self, zt: &ZeroTest) -> Result<bool, ExtError> {
        let b = self.primitive_basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if !self.contains(&b[i].lie_bracket(&b[j])?, zt)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn basis_strings(&self) -> Vec<String> {
        self.primitive_basis().iter().map(|v| v.to_string()).collect()
    }
}

fn render_span(f: &mut fmt::Formatter<'_>, chart: &Chart, rows: &[Vec<Expr>], prefix: &str) -> fmt::Result {
    if rows.is_empty() {
        return f.write_str("0");
    }
    f.write_str("span{")?;
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        render_combination(f, chart, &primitive_row(r), prefix)?;
    }
    f.write_str("}")
}

impl fmt::Display for Codistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_span(f, self.chart(), &self.space.rows, "d")
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_span(f, self.chart(), &self.space.rows, "∂")
    }
}
