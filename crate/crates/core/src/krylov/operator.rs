use crate::dense::{Matrix, Vector};

/// A square linear map `x ↦ A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vector {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl LinearOperator for Matrix {
    fn dim(&self) -> usize {
        assert!(self.is_square(), "only square matrices act as operators");
        self.rows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y);
    }
}

/// Outcome of one preconditioner application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyStatus {
    /// Direct solves only.
    Exact,
    /// Inner iterations reached their tolerance.
    Converged,
    /// An inner iteration stopped at its iteration cap.
    Degraded,
}

impl ApplyStatus {
    /// The worse of two statuses.
    pub fn merge(self, other: ApplyStatus) -> ApplyStatus {
        use ApplyStatus::*;
        match (self, other) {
            (Degraded, _) | (_, Degraded) => Degraded,
            (Converged, _) | (_, Converged) => Converged,
            _ => Exact,
        }
    }
}

/// The action `v ↦ P⁻¹ v` of a preconditioner.
pub trait Preconditioner: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, v: &[f64], z: &mut [f64]) -> ApplyStatus;

    fn apply(&self, v: &[f64]) -> Vector {
        let mut z = vec![0.0; self.dim()];
        self.apply_into(v, &mut z);
        z
    }

    /// True when every application is the same linear map.
    fn is_linear(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityPreconditioner(pub usize);

impl Preconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_into(&self, v: &[f64], z: &mut [f64]) -> ApplyStatus {
        z.copy_from_slice(v);
        ApplyStatus::Exact
    }
}

/// `P⁻¹ A` (left) or `A P⁻¹` (right) as an operator.
pub struct ComposedOperator<'a> {
    pub op: &'a dyn LinearOperator,
    pub precond: &'a dyn Preconditioner,
    pub left: bool,
}

impl LinearOperator for ComposedOperator<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let t = if self.left {
            self.op.apply(x)
        } else {
            self.precond.apply(x)
        };
        if self.left {
            self.precond.apply_into(&t, y);
        } else {
            self.op.apply_into(&t, y);
        }
    }
}

/// Densifies any operator column by column.
pub fn to_matrix(op: &dyn LinearOperator) -> Matrix {
    let n = op.dim();
    let mut m = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        m.set_column(j, &op.apply(&e));
        e[j] = 0.0;
    }
    m
}
