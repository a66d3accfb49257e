use std::fmt;

use crate::symcore::Expr;

use super::chart::Chart;
use super::forms::render_combination;
use super::ExtError;

/// A vector field `v = vⁱ ∂ᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, comps: Vec<Expr>) -> Self {
        assert_eq!(comps.len(), chart.dim(), "component count must match chart");
        VectorField {
            chart: chart.clone(),
            comps,
        }
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::new(chart, vec![Expr::zero(); chart.dim()])
    }

    /// The coordinate field `∂ᵢ`.
    pub fn partial(chart: &Chart, i: usize) -> Self {
        let mut c = vec![Expr::zero(); chart.dim()];
        c[i] = Expr::one();
        Self::new(chart, c)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// Directional derivative `v(f) = vⁱ ∂ᵢ f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.comps
            .iter()
            .zip(self.chart.coords())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| c * f.diff(s))
            .sum()
    }

    pub fn lie_bracket(&self, w: &VectorField) -> Result<VectorField, ExtError> {
        self.chart.check_same(&w.chart)?;
        let comps = (0..self.chart.dim())
            .map(|i| self.apply(&w.comps[i]) - w.apply(&self.comps[i]))
            .collect();
        Ok(VectorField::new(&self.chart, comps))
    }

    pub fn scale(&self, a: &Expr) -> Self {
        Self::new(&self.chart, self.comps.iter().map(|c| c * a).collect())
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_combination(f, &self.chart, &self.comps, "∂")
    }
}
