#include "ddstab/matrixcore.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "ddstab/errors.hpp"

namespace ddstab {

void NumericalConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be a positive finite number");
    }
  };
  positive(rank_rel_tol, "rank_rel_tol");
  positive(subspace_tol, "subspace_tol");
  positive(schur_margin, "schur_margin");
  positive(psd_margin, "psd_margin");
  positive(equality_tol, "equality_tol");
  if (schur_margin >= 1.0) {
    throw std::invalid_argument("schur_margin must be smaller than 1");
  }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double rank_threshold(double largest_singular_value, Index rows, Index cols,
                      const NumericalConfig& cfg) {
  const double scale = static_cast<double>(std::max<Index>({rows, cols, 1}));
  return cfg.rank_rel_tol * scale * largest_singular_value;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector(0);
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

namespace {

template <typename SingularValues>
Index count_above_threshold(const SingularValues& sv, Index rows, Index cols,
                            const NumericalConfig& cfg) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol = rank_threshold(sv(0), rows, cols, cfg);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return r;
}

}  // namespace

Index numerical_rank(const Matrix& m, const NumericalConfig& cfg) {
  if (m.size() == 0) return 0;
  return count_above_threshold(singular_values(m), m.rows(), m.cols(), cfg);
}

Index numerical_rank(const Eigen::MatrixXcd& m, const NumericalConfig& cfg) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return count_above_threshold(svd.singularValues(), m.rows(), m.cols(), cfg);
}

Matrix orthonormal_basis(const Matrix& m, const NumericalConfig& cfg) {
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Index r = count_above_threshold(svd.singularValues(), m.rows(), m.cols(), cfg);
  return svd.matrixU().leftCols(r);
}

Matrix null_space_basis(const Matrix& m, const NumericalConfig& cfg) {
  const Index cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  if (cols == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Index r = count_above_threshold(svd.singularValues(), m.rows(), m.cols(), cfg);
  return svd.matrixV().rightCols(cols - r);
}

RowCompression row_compress(const Matrix& x_minus, const Matrix& x_plus,
                            const NumericalConfig& cfg) {
  if (x_minus.rows() != x_plus.rows() || x_minus.cols() != x_plus.cols()) {
    throw DimensionMismatch("row_compress: X- and X+ must have equal shapes");
  }
  const Index n = x_minus.rows();
  RowCompression out;
  if (x_minus.cols() == 0 || x_minus.isZero(0.0)) {
    out.S = Matrix::Identity(n, n);
    out.rank = 0;
  } else {
    Eigen::JacobiSVD<Matrix> svd(x_minus, Eigen::ComputeFullU);
    out.rank = count_above_threshold(svd.singularValues(), x_minus.rows(), x_minus.cols(), cfg);
    out.S = svd.matrixU().transpose();
    // Fix the sign of every row so that its largest entry is positive; this makes S = I
    // whenever X- is already compressed.
    for (Index i = 0; i < n; ++i) {
      Index j = 0;
      out.S.row(i).cwiseAbs().maxCoeff(&j);
      if (out.S(i, j) < 0.0) out.S.row(i) *= -1.0;
    }
  }
  out.x_hat_minus = (out.S * x_minus).topRows(out.rank);
  out.x_hat_plus = (out.S * x_plus).topRows(out.rank);
  return out;
}

Eigen::VectorXcd eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eigenvalues: matrix must be square");
  if (m.size() == 0) return Eigen::VectorXcd(0);
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues();
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return eigenvalues(m).cwiseAbs().maxCoeff();
}

bool is_schur(const Matrix& m, const NumericalConfig& cfg) {
  return spectral_radius(m) <= 1.0 - cfg.schur_margin;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n) {
    throw DimensionMismatch("controllability_matrix: A must be n x n and B n x m");
  }
  const Index m = b.cols();
  Matrix c(n, n * m);
  Matrix block = b;
  for (Index k = 0; k < n; ++k) {
    c.middleCols(k * m, m) = block;
    block = a * block;
  }
  return c;
}

bool is_controllable(const Matrix& a, const Matrix& b, const NumericalConfig& cfg) {
  const Index n = a.rows();
  if (n == 0) return true;
  return numerical_rank(controllability_matrix(a, b), cfg) == n;
}

bool is_stabilizable(const Matrix& a, const Matrix& b, const NumericalConfig& cfg) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n) {
    throw DimensionMismatch("is_stabilizable: A must be n x n and B n x m");
  }
  if (n == 0) return true;
  const Eigen::VectorXcd lambda = eigenvalues(a);
  Eigen::MatrixXcd pbh(n, n + b.cols());
  pbh.rightCols(b.cols()) = b.cast<std::complex<double>>();
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) < 1.0 - cfg.schur_margin) continue;
    pbh.leftCols(n) = a.cast<std::complex<double>>();
    pbh.leftCols(n).diagonal().array() -= lambda(i);
    if (numerical_rank(pbh, cfg) < n) return false;
  }
  return true;
}

double subspace_residual(const Matrix& m, const Matrix& n, const NumericalConfig& cfg) {
  if (m.rows() != n.rows()) throw DimensionMismatch("subspace_residual: row counts differ");
  const Matrix q = orthonormal_basis(n, cfg);
  return (m - q * (q.transpose() * m)).norm();
}

bool subspace_contained(const Matrix& m, const Matrix& n, const NumericalConfig& cfg) {
  return subspace_residual(m, n, cfg) <= cfg.subspace_tol * std::max(1.0, m.norm());
}

Matrix pinv(const Matrix& m, const NumericalConfig& cfg) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Index r = count_above_threshold(sv, m.rows(), m.cols(), cfg);
  Vector inv = Vector::Zero(sv.size());
  inv.head(r) = sv.head(r).cwiseInverse();
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix_exponential: matrix must be square");
  if (m.size() == 0) return m;
  return m.exp();
}

double min_symmetric_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ddstab
