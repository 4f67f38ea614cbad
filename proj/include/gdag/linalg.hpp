#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "gdag/errors.hpp"

namespace gdag {

// Ordered set of distinct coordinate indices in [0, n), kept strictly
// increasing.  Used for block partitions and subset marginals.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> members);
  IndexSet(std::initializer_list<int> members)
      : IndexSet(std::vector<int>(members)) {}

  static IndexSet full(int n);

  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  int operator[](int i) const { return members_[static_cast<size_t>(i)]; }
  bool contains(int index) const;

  // Sorted complement within [0, n).
  IndexSet complement(int n) const;
  IndexSet unioned_with(const IndexSet& other) const;

  const std::vector<int>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<int> members_;
};

// Dense symmetric matrix; storage is exactly symmetric by construction.
class SymMatrix {
 public:
  explicit SymMatrix(int order) : m_(Eigen::MatrixXd::Zero(order, order)) {}

  static SymMatrix identity(int order);
  // Validates |a_ij - a_ji| <= sym_tol, then symmetrizes exactly by
  // averaging.
  static SymMatrix from_dense(const Eigen::MatrixXd& a, double sym_tol = 0.0);
  // Symmetrizes by averaging without a tolerance check; for results of
  // computations that are symmetric up to rounding.
  static SymMatrix symmetrized(const Eigen::MatrixXd& a);
  static SymMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  int order() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double value) {
    m_(i, j) = value;
    m_(j, i) = value;
  }

  const Eigen::MatrixXd& dense() const { return m_; }
  SymMatrix submatrix(const IndexSet& rows) const;

  bool operator==(const SymMatrix& other) const { return m_ == other.m_; }

 private:
  Eigen::MatrixXd m_;
};

struct CholeskyResult {
  Eigen::MatrixXd lower;  // lower * lower^T reproduces the input
  double log_det;
};

// Cholesky factorization with log-determinant.  Throws NotPositiveDefinite
// when a pivot falls at or below 1e-12 times the largest diagonal entry.
CholeskyResult cholesky_logdet(const SymMatrix& m);

bool is_positive_definite(const SymMatrix& m);

// M_11 - M_12 M_22^{-1} M_12' for block1 a proper non-empty index subset;
// block2 is the sorted complement.
SymMatrix schur_complement(const SymMatrix& m, const IndexSet& block1);

// ((M^{-1})_YY)^{-1}; equal to schur_complement(m, Y) by the Schur identity.
SymMatrix submatrix_inverse_marginal(const SymMatrix& m, const IndexSet& y);

// Solve M x = b through the Cholesky factor of M.
Eigen::MatrixXd solve_spd(const SymMatrix& m, const Eigen::MatrixXd& b);

}  // namespace gdag
