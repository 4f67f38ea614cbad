#include "gdag/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace gdag {

IndexSet::IndexSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  for (size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 0) {
      throw Error(ErrorKind::validation, "index set entries must be >= 0");
    }
    if (i > 0 && members_[i] == members_[i - 1]) {
      throw Error(ErrorKind::validation, "duplicate index in index set");
    }
  }
}

IndexSet IndexSet::full(int n) {
  std::vector<int> all(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  return IndexSet(std::move(all));
}

bool IndexSet::contains(int index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

IndexSet IndexSet::complement(int n) const {
  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (!contains(i)) rest.push_back(i);
  }
  return IndexSet(std::move(rest));
}

IndexSet IndexSet::unioned_with(const IndexSet& other) const {
  std::vector<int> merged = members_;
  for (int i : other.members_) {
    if (!contains(i)) merged.push_back(i);
  }
  return IndexSet(std::move(merged));
}

SymMatrix SymMatrix::identity(int order) {
  SymMatrix m(order);
  for (int i = 0; i < order; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a, double sym_tol) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionMismatch("symmetric matrix must be square, order >= 1");
  }
  double worst = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (worst > sym_tol) {
    throw Error(ErrorKind::validation,
                "matrix is not symmetric (max asymmetry " +
                    std::to_string(worst) + ")");
  }
  SymMatrix m(static_cast<int>(a.rows()));
  // a + a' evaluates both (i,j) and (j,i) as the same commutative sum, so
  // the result is exactly symmetric.
  m.m_ = 0.5 * (a + a.transpose());
  return m;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionMismatch("symmetric matrix must be square, order >= 1");
  }
  SymMatrix m(static_cast<int>(a.rows()));
  m.m_ = 0.5 * (a + a.transpose());
  return m;
}

SymMatrix SymMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  int n = static_cast<int>(rows.size());
  Eigen::MatrixXd a(n, n);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) {
      throw DimensionMismatch("row length does not match order");
    }
    int j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  return from_dense(a, 0.0);
}

SymMatrix SymMatrix::submatrix(const IndexSet& rows) const {
  SymMatrix out(rows.size());
  for (int i = 0; i < rows.size(); ++i) {
    for (int j = 0; j <= i; ++j) {
      out.set(i, j, m_(rows[i], rows[j]));
    }
  }
  return out;
}

CholeskyResult cholesky_logdet(const SymMatrix& m) {
  const int n = m.order();
  const Eigen::MatrixXd& a = m.dense();
  double max_diag = a.diagonal().maxCoeff();
  double pivot_floor = 1e-12 * std::max(max_diag, 0.0);

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  double log_det = 0.0;
  for (int j = 0; j < n; ++j) {
    double pivot = a(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_floor)) {
      throw NotPositiveDefinite("pivot " + std::to_string(pivot) +
                                " at column " + std::to_string(j));
    }
    double root = std::sqrt(pivot);
    lower(j, j) = root;
    log_det += 2.0 * std::log(root);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j));
      lower(i, j) = s / root;
    }
  }
  return {std::move(lower), log_det};
}

bool is_positive_definite(const SymMatrix& m) {
  try {
    cholesky_logdet(m);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

Eigen::MatrixXd solve_spd(const SymMatrix& m, const Eigen::MatrixXd& b) {
  CholeskyResult chol = cholesky_logdet(m);
  Eigen::MatrixXd y =
      chol.lower.triangularView<Eigen::Lower>().solve(b);
  return chol.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

SymMatrix schur_complement(const SymMatrix& m, const IndexSet& block1) {
  const int n = m.order();
  if (block1.empty() || block1.size() >= n) {
    throw Error(ErrorKind::validation,
                "block1 must be a proper non-empty subset");
  }
  IndexSet block2 = block1.complement(n);
  SymMatrix m22 = m.submatrix(block2);

  Eigen::MatrixXd m12(block1.size(), block2.size());
  for (int i = 0; i < block1.size(); ++i) {
    for (int j = 0; j < block2.size(); ++j) {
      m12(i, j) = m(block1[i], block2[j]);
    }
  }
  Eigen::MatrixXd correction = m12 * solve_spd(m22, m12.transpose());
  return SymMatrix::symmetrized(m.submatrix(block1).dense() - correction);
}

SymMatrix submatrix_inverse_marginal(const SymMatrix& m, const IndexSet& y) {
  if (y.empty()) throw EmptySubset("marginal subset is empty");
  if (y.size() == m.order()) return m;
  // ((M^{-1})_YY)^{-1} computed via factorization: invert M through
  // triangular solves, restrict, invert the restriction.
  Eigen::MatrixXd inv =
      solve_spd(m, Eigen::MatrixXd::Identity(m.order(), m.order()));
  SymMatrix inv_yy = SymMatrix::symmetrized(inv).submatrix(y);
  Eigen::MatrixXd out =
      solve_spd(inv_yy, Eigen::MatrixXd::Identity(y.size(), y.size()));
  return SymMatrix::symmetrized(out);
}

}  // namespace gdag
