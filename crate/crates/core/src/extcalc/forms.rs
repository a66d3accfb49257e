use std::collections::BTreeMap;
use std::fmt;

use crate::symcore::{Expr, ZeroTest};

use super::chart::Chart;
use super::field::VectorField;
use super::ExtError;

/// A 1-form `ω = ωᵢ dxⁱ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    chart: Chart,
    coeffs: Vec<Expr>,
}

impl OneForm {
    pub fn new(chart: &Chart, coeffs: Vec<Expr>) -> Self {
        assert_eq!(coeffs.len(), chart.dim(), "coefficient count must match chart");
        OneForm {
            chart: chart.clone(),
            coeffs,
        }
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::new(chart, vec![Expr::zero(); chart.dim()])
    }

    /// The coordinate differential `dxⁱ`.
    pub fn dx(chart: &Chart, i: usize) -> Self {
        let mut c = vec![Expr::zero(); chart.dim()];
        c[i] = Expr::one();
        Self::new(chart, c)
    }

    /// The differential of a scalar.
    pub fn differential(chart: &Chart, f: &Expr) -> Self {
        let coeffs = chart.coords().iter().map(|s| f.diff(s)).collect();
        Self::new(chart, coeffs)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, a: &Expr) -> Self {
        Self::new(&self.chart, self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn add(&self, other: &OneForm) -> Self {
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self::new(&self.chart, c)
    }

    pub fn sub(&self, other: &OneForm) -> Self {
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self::new(&self.chart, c)
    }

    pub fn to_kform(&self) -> KForm {
        let mut terms = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![i], c.clone());
            }
        }
        KForm {
            chart: self.chart.clone(),
            degree: 1,
            terms,
        }
    }

    /// `dω`, with `(i<j)` coefficient `∂ᵢωⱼ − ∂ⱼωᵢ`.
    pub fn exterior_derivative(&self) -> KForm {
        self.to_kform().exterior_derivative()
    }

    /// Contraction `v⌋ω = vⁱωᵢ`.
    pub fn contract(&self, v: &VectorField) -> Result<Expr, ExtError> {
        self.chart.check_same(v.chart())?;
        Ok(self
            .coeffs
            .iter()
            .zip(v.comps())
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `L_v ω = (vᵏ ∂ₖωᵢ) dxⁱ + ωₖ dvᵏ`.
    ///
    /// Debug builds recompute the result with Cartan's formula
    /// `v⌋dω + d(v⌋ω)` and panic on disagreement.
    pub fn lie_derivative(&self, v: &VectorField) -> Result<OneForm, ExtError> {
        self.chart.check_same(v.chart())?;
        let coords = self.chart.coords();
        let n = self.chart.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Expr::zero();
            for k in 0..n {
                let vk = &v.comps()[k];
                if !vk.is_zero() && !self.coeffs[i].is_zero() {
                    acc = acc + vk * self.coeffs[i].diff(&coords[k]);
                }
                let wk = &self.coeffs[k];
                if !wk.is_zero() && !vk.is_zero() {
                    acc = acc + wk * vk.diff(&coords[i]);
                }
            }
            out.push(acc);
        }
        let result = OneForm::new(&self.chart, out);
        #[cfg(debug_assertions)]
        {
            let cartan = self.lie_derivative_cartan(v)?;
            assert!(
                result.sub(&cartan).is_zero(),
                "Lie derivative formulas disagree for {self} along {v}"
            );
        }
        Ok(result)
    }

    /// Cartan's formula `v⌋dω + d(v⌋ω)`.
    pub fn lie_derivative_cartan(&self, v: &VectorField) -> Result<OneForm, ExtError> {
        let a = self.exterior_derivative().contract(v)?.as_one_form();
        let b = OneForm::differential(&self.chart, &self.contract(v)?);
        Ok(a.add(&b))
    }

    /// Replace every coefficient, e.g. to rename coordinates.
    pub fn map_coeffs(&self, chart: &Chart, f: impl Fn(&Expr) -> Result<Expr, ExtError>) -> Result<OneForm, ExtError> {
        let c = self.coeffs.iter().map(f).collect::<Result<_, _>>()?;
        Ok(OneForm::new(chart, c))
    }

    pub fn is_zero_checked(&self, zt: &ZeroTest) -> Result<bool, ExtError> {
        for c in &self.coeffs {
            if !zt.is_zero(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Render `Σ cᵢ·<prefix><coordᵢ>` in chart order, e.g. `(u1-u2)*dx1 + x1*dx2`.
pub(crate) fn render_combination(
    f: &mut fmt::Formatter<'_>,
    chart: &Chart,
    coeffs: &[Expr],
    prefix: &str,
) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.leading_negative() && c.is_single_term();
        let shown = if neg { -c } else { c.clone() };
        match (first, neg) {
            (true, true) => f.write_str("-")?,
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
            (true, false) => {}
        }
        first = false;
        let sym = chart.coord(i);
        if shown.is_one() {
            write!(f, "{prefix}{sym}")?;
        } else if shown.is_single_term() {
            write!(f, "{shown}*{prefix}{sym}")?;
        } else {
            write!(f, "({shown})*{prefix}{sym}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_combination(f, &self.chart, &self.coeffs, "d")
    }
}

/// A `k`-form stored sparsely over strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    Some(sign)
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        KForm {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The constant function as a 0-form.
    pub fn scalar(chart: &Chart, f: Expr) -> Self {
        let mut k = Self::zero(chart, 0);
        if !f.is_zero() {
            k.terms.insert(Vec::new(), f);
        }
        k
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.terms
    }

    /// Coefficient of `dx^{i₀}∧…` for any index order (antisymmetry applied).
    pub fn coeff(&self, idx: &[usize]) -> Expr {
        let mut k = idx.to_vec();
        match sort_sign(&mut k) {
            None => Expr::zero(),
            Some(s) => match self.terms.get(&k) {
                Some(c) => c * Expr::int(s),
                None => Expr::zero(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: Vec<usize>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&key) {
            Some(prev) => prev + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &KForm) -> KForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm, ExtError> {
        self.chart.check_same(&other.chart)?;
        let mut out = KForm::zero(&self.chart, self.degree + other.degree);
        if out.degree > self.chart.dim() {
            return Ok(out);
        }
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut key: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some(s) = sort_sign(&mut key) {
                    out.add_term(key, a * b * Expr::int(s));
                }
            }
        }
        Ok(out)
    }

    /// Interior product `v⌋α`.
    pub fn contract(&self, v: &VectorField) -> Result<KForm, ExtError> {
        self.chart.check_same(v.chart())?;
        let mut out = KForm::zero(&self.chart, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return Ok(out);
        }
        for (idx, a) in &self.terms {
            for (p, &i) in idx.iter().enumerate() {
                let vi = &v.comps()[i];
                if vi.is_zero() {
                    continue;
                }
                let mut key = idx.clone();
                key.remove(p);
                let s = if p % 2 == 0 { 1 } else { -1 };
                out.add_term(key, a * vi * Expr::int(s));
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree + 1);
        for (idx, a) in &self.terms {
            for (j, s) in self.chart.coords().iter().enumerate() {
                let da = a.diff(s);
                if da.is_zero() {
                    continue;
                }
                let mut key = Vec::with_capacity(idx.len() + 1);
                key.push(j);
                key.extend(idx);
                if let Some(sign) = sort_sign(&mut key) {
                    out.add_term(key, da * Expr::int(sign));
                }
            }
        }
        out
    }

    /// View a degree-1 form as a [`OneForm`].
    pub fn as_one_form(&self) -> OneForm {
        assert!(self.degree == 1, "not a 1-form");
        let mut c = vec![Expr::zero(); self.chart.dim()];
        for (k, v) in &self.terms {
            c[k[0]] = v.clone();
        }
        OneForm::new(&self.chart, c)
    }

    pub fn is_zero_checked(&self, zt: &ZeroTest) -> Result<bool, ExtError> {
        for c in self.terms.values() {
            if !zt.is_zero(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            let neg = c.leading_negative() && c.is_single_term();
            let shown = if neg { -c } else { c.clone() };
            match (n == 0, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            let wedge = idx
                .iter()
                .map(|i| format!("d{}", self.chart.coord(*i)))
                .collect::<Vec<_>>()
                .join("^");
            match (
                shown.is_one() && !idx.is_empty(),
                shown.is_single_term(),
                idx.is_empty(),
            ) {
                (true, _, _) => f.write_str(&wedge)?,
                (false, true, true) => write!(f, "{shown}")?,
                (false, false, true) => write!(f, "({shown})")?,
                (false, true, false) => write!(f, "{shown}*{wedge}")?,
                (false, false, false) => write!(f, "({shown})*{wedge}")?,
            }
        }
        Ok(())
    }
}
