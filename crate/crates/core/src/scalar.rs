//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// f32 or f64, with the tolerances the numeric routines use for that width.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
    const JACOBI_TOLERANCE: Self;
    /// Eigenvalues at or below this are treated as zero.
    const NULL_EIGENVALUE: Self;

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable as a float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }
}

impl Scalar for f64 {
    const JACOBI_TOLERANCE: Self = 1e-10;
    const NULL_EIGENVALUE: Self = 1e-9;
}

impl Scalar for f32 {
    const JACOBI_TOLERANCE: Self = 1e-5;
    const NULL_EIGENVALUE: Self = 1e-4;
}
