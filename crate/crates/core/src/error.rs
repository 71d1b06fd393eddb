use num_complex::Complex64;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("non-convergent input: |q| = {0} >= 1")]
    NonConvergent(f64),
    #[error("invalid modulus: Im tau = {0} <= 0")]
    NotInUpperHalfPlane(f64),
    #[error("point z = {z} outside the Laurent disk of radius {radius}")]
    OutOfDisk { z: Complex64, radius: f64 },
    #[error("pole: argument is a lattice point")]
    Pole,
    #[error("domain violation: |eps| = {eps_abs} >= bound {bound}")]
    Domain { eps_abs: f64, bound: f64 },
    #[error("point z = {z} on sheet {sheet} lies in the excised disk (radius {radius})")]
    Excised { sheet: u8, z: Complex64, radius: f64 },
    #[error("coincident points on the same sheet")]
    Coincident,
    #[error("numeric inconsistency in {what}: discrepancy {diff:e} exceeds {tol:e}")]
    Inconsistent { what: String, diff: f64, tol: f64 },
    #[error("singular matrix in {0}")]
    Singular(String),
    #[error("cutoff too small: tail estimate {tail:e} exceeds {tol:e}")]
    CutoffTooSmall { tail: f64, tol: f64 },
    #[error("order {requested} exceeds the enumeration guard {limit}")]
    Explosion { requested: u32, limit: u32 },
    #[error("could not snap {value} to a 12th root of unity (distance {distance:e})")]
    Snap { value: Complex64, distance: f64 },
    #[error("contour integration failed: {0}")]
    Integration(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Excised { .. } | Error::NotInUpperHalfPlane(_) | Error::NonConvergent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
