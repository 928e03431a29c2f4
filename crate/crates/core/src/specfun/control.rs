use super::SpecFunError;

/// Accuracy and resource knobs for Mellin-Barnes contour quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureControl {
    /// Relative tolerance on the step-halving error estimate.
    pub target_rel_tol: f64,
    /// Upper bound on trapezoid nodes along one contour.
    pub max_nodes: usize,
    /// Fixed real part of the vertical contour. `None` picks it automatically
    /// inside the pole-free strip.
    pub contour_shift: Option<f64>,
    /// Initial cutoff of the imaginary axis; doubled until the tail is negligible.
    pub truncation_height: f64,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            target_rel_tol: 1e-8,
            max_nodes: 1 << 16,
            contour_shift: None,
            truncation_height: 8.0,
        }
    }
}

impl QuadratureControl {
    pub fn with_tol(target_rel_tol: f64) -> Self {
        Self {
            target_rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SpecFunError> {
        if !(self.target_rel_tol > 0.0 && self.target_rel_tol < 1.0) {
            return Err(SpecFunError::InvalidSpec(format!(
                "target_rel_tol must lie in (0, 1), got {}",
                self.target_rel_tol
            )));
        }
        if self.max_nodes < 64 {
            return Err(SpecFunError::InvalidSpec(format!(
                "max_nodes must be at least 64, got {}",
                self.max_nodes
            )));
        }
        if !(self.truncation_height > 0.0 && self.truncation_height.is_finite()) {
            return Err(SpecFunError::InvalidSpec(format!(
                "truncation_height must be positive, got {}",
                self.truncation_height
            )));
        }
        if let Some(c) = self.contour_shift {
            if !c.is_finite() {
                return Err(SpecFunError::InvalidSpec("contour_shift must be finite".into()));
            }
        }
        Ok(())
    }
}
