//! Sparse linear functionals over degrees of freedom.

/// A linear functional `φ ↦ Σ c_i φ_{dof_i} + constant`.
///
/// The constant carries contributions of known boundary data (Dirichlet
/// values, boundary edge values, and source integrals), so that applying the
/// stencil to the unknown vector gives the complete flux or balance term.
#[derive(Debug, Clone, Default)]
pub struct LinearStencil {
    terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinearStencil {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff * φ_dof`, merging with an existing term on the same dof.
    pub fn add(&mut self, dof: usize, coeff: f64) {
        match self.terms.binary_search_by_key(&dof, |t| t.0) {
            Ok(pos) => self.terms[pos].1 += coeff,
            Err(pos) => self.terms.insert(pos, (dof, coeff)),
        }
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant += value;
    }

    /// Adds `factor` times another stencil.
    pub fn add_scaled(&mut self, other: &LinearStencil, factor: f64) {
        for &(dof, c) in &other.terms {
            self.add(dof, factor * c);
        }
        self.constant += factor * other.constant;
    }

    pub fn scale(&mut self, factor: f64) {
        for t in &mut self.terms {
            t.1 *= factor;
        }
        self.constant *= factor;
    }

    /// Terms sorted by dof index, duplicates merged.
    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    /// Evaluates the functional on a dof vector.
    pub fn apply(&self, dofs: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(d, c)| c * dofs[d])
            .sum::<f64>()
            + self.constant
    }

    /// The exact negation of this stencil.
    pub fn negated(&self) -> LinearStencil {
        let mut s = self.clone();
        s.scale(-1.0);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_duplicate_dofs() {
        let mut s = LinearStencil::new();
        s.add(3, 1.0);
        s.add(1, 2.0);
        s.add(3, 0.5);
        assert_eq!(s.terms(), &[(1, 2.0), (3, 1.5)]);
    }

    #[test]
    fn apply_includes_constant() {
        let mut s = LinearStencil::new();
        s.add(0, 2.0);
        s.add_constant(-1.0);
        assert_eq!(s.apply(&[3.0, 0.0]), 5.0);
    }

    #[test]
    fn negation_cancels_termwise() {
        let mut s = LinearStencil::new();
        s.add(0, 2.0);
        s.add(5, -0.25);
        s.add_constant(0.75);
        let n = s.negated();
        let mut sum = s.clone();
        sum.add_scaled(&n, 1.0);
        assert!(sum.terms().iter().all(|&(_, c)| c == 0.0));
        assert_eq!(sum.constant, 0.0);
    }
}
