use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// `2j` must be a positive integer.
    InvalidSpin {
        twice_j: i64,
    },
    /// Magnetic quantum number outside `-j..=j` or of the wrong parity.
    InvalidProjection {
        twice_j: u32,
        twice_m: i64,
    },
    /// A scalar argument is outside its domain.
    OutOfDomain {
        name: &'static str,
        value: f64,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NotNormalized {
        norm: f64,
    },
    NotHermitian {
        deviation: f64,
    },
    TraceViolation {
        trace: f64,
    },
    NegativeEigenvalue {
        value: f64,
    },
    ComplexResidue {
        value: f64,
    },
    /// The classical equations of motion diverge at `|p| = 1`.
    PoleSingularity {
        p: f64,
    },
    /// RK4 energy drift exceeded the allowed bound.
    StepTooLarge {
        drift: f64,
        bound: f64,
    },
    /// Cramér-Rao bound requested for a non-positive Fisher information.
    NonPositiveFisher {
        value: f64,
    },
    NoConvergence {
        routine: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpin { twice_j } => {
                write!(f, "invalid spin: 2j = {twice_j} must be a positive integer")
            }
            Error::InvalidProjection { twice_j, twice_m } => write!(
                f,
                "invalid projection m = {}/2 for j = {}/2",
                twice_m, twice_j
            ),
            Error::OutOfDomain { name, value } => {
                write!(f, "{name} = {value} is outside its allowed domain")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotNormalized { norm } => write!(f, "state is not normalized (norm {norm})"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::TraceViolation { trace } => write!(f, "density operator has trace {trace}"),
            Error::NegativeEigenvalue { value } => {
                write!(f, "density operator has negative eigenvalue {value:e}")
            }
            Error::ComplexResidue { value } => {
                write!(f, "expected a real quantity, imaginary residue {value:e}")
            }
            Error::PoleSingularity { p } => {
                write!(f, "pole singularity: |p| = {} reached the pole", p.abs())
            }
            Error::StepTooLarge { drift, bound } => write!(
                f,
                "energy drift {drift:e} exceeds {bound:e}; reduce the time step"
            ),
            Error::NonPositiveFisher { value } => write!(
                f,
                "Cramér-Rao bound undefined for Fisher information {value}"
            ),
            Error::NoConvergence { routine } => write!(f, "{routine} failed to converge"),
        }
    }
}

impl core::error::Error for Error {}
