//! Exponent-matrix analysis: rank, resonance, and the log-linear generator.

use num_traits::Zero;
use thiserror::Error;

use crate::linalg;
use crate::polyring::rational::{dot, fmt_vector, primitive_vector, Rational};
use crate::polyring::Jet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResonanceError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent matrix has rank {rank} < {expected}; kernel is not one-dimensional")]
    RankDeficient { rank: usize, expected: usize },
    #[error("a log-linear field needs a nonzero coefficient vector")]
    ZeroField,
}

/// Rows `gamma0, .., gamman`, each of length `n + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    rows: Vec<Vec<Rational>>,
}

impl ExponentMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, ResonanceError> {
        let ncols = rows.len() + 1;
        for r in &rows {
            if r.len() != ncols {
                return Err(ResonanceError::DimensionMismatch {
                    expected: ncols,
                    got: r.len(),
                });
            }
        }
        Ok(ExponentMatrix { rows })
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn ncols(&self) -> usize {
        self.rows.len() + 1
    }

    /// `n + 1`, the rank of a generic matrix.
    pub fn maximal_rank(&self) -> usize {
        self.rows.len()
    }
}

pub fn matrix_rank(m: &ExponentMatrix) -> usize {
    linalg::rank(&m.rows)
}

/// `gamma0 ^ sum_j gamma_j == 0`: every 2x2 minor of the two-row matrix
/// vanishes. A zero `gamma0` counts as resonant.
pub fn is_resonant(gamma0: &[Rational], gammas: &[Vec<Rational>]) -> Result<bool, ResonanceError> {
    let len = gamma0.len();
    let mut sum = vec![Rational::zero(); len];
    for g in gammas {
        if g.len() != len {
            return Err(ResonanceError::DimensionMismatch {
                expected: len,
                got: g.len(),
            });
        }
        for (s, x) in sum.iter_mut().zip(g) {
            *s += x;
        }
    }
    for i in 0..len {
        for j in i + 1..len {
            if &gamma0[i] * &sum[j] != &gamma0[j] * &sum[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `X = sum_j alpha_j z_j d/dz_j` with `alpha` primitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogLinearField {
    alpha: Vec<Rational>,
}

impl LogLinearField {
    pub fn new(alpha: &[Rational]) -> Result<Self, ResonanceError> {
        if alpha.iter().all(Zero::is_zero) {
            return Err(ResonanceError::ZeroField);
        }
        Ok(LogLinearField {
            alpha: primitive_vector(alpha),
        })
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }
}

impl std::fmt::Display for LogLinearField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", fmt_vector(&self.alpha))
    }
}

/// Primitive generator of the kernel of a maximal-rank exponent matrix.
pub fn generator_field(m: &ExponentMatrix) -> Result<LogLinearField, ResonanceError> {
    let rank = matrix_rank(m);
    if rank != m.maximal_rank() {
        return Err(ResonanceError::RankDeficient {
            rank,
            expected: m.maximal_rank(),
        });
    }
    let kernel = linalg::kernel(&m.rows, m.ncols());
    debug_assert_eq!(kernel.len(), 1);
    LogLinearField::new(&kernel[0])
}

/// Whether `X` kills `z^gamma`, or `z^gamma * unit` to the unit's jet order.
///
/// `X(z^gamma * D) = z^gamma * (<alpha, gamma> D + X(D))`, so only the jet in
/// parentheses has to vanish.
pub fn verify_annihilation(field: &LogLinearField, gamma: &[Rational], unit: Option<&Jet>) -> bool {
    if gamma.len() != field.alpha.len() {
        return false;
    }
    let weight = dot(&field.alpha, gamma);
    match unit {
        None => weight.is_zero(),
        Some(u) => {
            if u.roster().len() != gamma.len() {
                return false;
            }
            let image = u.scale(&weight).add(&u.apply_log_linear(&field.alpha));
            image.map(|j| j.is_zero()).unwrap_or(false)
        }
    }
}
