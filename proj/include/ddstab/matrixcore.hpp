#pragma once

#include <Eigen/Dense>

namespace ddstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerances used to turn exact-arithmetic statements into floating point decisions.
struct NumericalConfig {
  /// Relative singular-value threshold, multiplied by max(rows, cols) of the matrix under test.
  double rank_rel_tol = 1e-9;
  double subspace_tol = 1e-8;
  /// A matrix is Schur when its spectral radius is at most 1 - schur_margin.
  double schur_margin = 1e-6;
  /// Minimum eigenvalue slack required to accept a strict LMI.
  double psd_margin = 1e-7;
  double equality_tol = 1e-8;

  /// Throws std::invalid_argument when a tolerance is non-positive or schur_margin >= 1.
  void validate() const;
};

/// Orthogonal coordinate change S with S X- = [X^-; 0] and X^+ = [I 0] S X+.
struct RowCompression {
  Matrix S;
  Index rank = 0;
  Matrix x_hat_minus;
  Matrix x_hat_plus;
};

bool all_finite(const Matrix& m);

/// Threshold below which singular values of an rows x cols matrix count as zero.
double rank_threshold(double largest_singular_value, Index rows, Index cols,
                      const NumericalConfig& cfg);

Index numerical_rank(const Matrix& m, const NumericalConfig& cfg);
Index numerical_rank(const Eigen::MatrixXcd& m, const NumericalConfig& cfg);

Vector singular_values(const Matrix& m);

/// Orthonormal basis of the column space of m.
Matrix orthonormal_basis(const Matrix& m, const NumericalConfig& cfg);

/// Orthonormal basis of ker m (columns).
Matrix null_space_basis(const Matrix& m, const NumericalConfig& cfg);

RowCompression row_compress(const Matrix& x_minus, const Matrix& x_plus,
                            const NumericalConfig& cfg);

Eigen::VectorXcd eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);
bool is_schur(const Matrix& m, const NumericalConfig& cfg);

/// Kalman matrix [B, AB, ..., A^{n-1} B].
Matrix controllability_matrix(const Matrix& a, const Matrix& b);
bool is_controllable(const Matrix& a, const Matrix& b, const NumericalConfig& cfg);

/// PBH test on every eigenvalue with |lambda| >= 1 - schur_margin.
bool is_stabilizable(const Matrix& a, const Matrix& b, const NumericalConfig& cfg);

/// ||(I - P_N) M||_F where P_N projects onto the column space of n.
double subspace_residual(const Matrix& m, const Matrix& n, const NumericalConfig& cfg);
bool subspace_contained(const Matrix& m, const Matrix& n, const NumericalConfig& cfg);

/// Moore-Penrose pseudoinverse; singular values under the rank threshold are dropped.
Matrix pinv(const Matrix& m, const NumericalConfig& cfg);

Matrix matrix_exponential(const Matrix& m);

/// Smallest eigenvalue of the symmetric part of m.
double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace ddstab
