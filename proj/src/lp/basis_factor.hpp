#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cstddef>
#include <memory>
#include <vector>

#include "wdro/lp/lp_model.hpp"

namespace wdro::lp::detail {

// LU factorization of the simplex basis plus a product-form eta file.
// Columns with index >= model.num_cols() are logical columns -e_i. Only the
// kernel (structural basic columns restricted to the rows not covered by a
// basic logical) is factorized; the logical part is eliminated explicitly.
class BasisFactor {
 public:
  BasisFactor(const LpModel& model, std::size_t dense_threshold = 400);

  // Returns false when the basis is numerically singular.
  bool factorize(const std::vector<std::size_t>& head);

  // Replaces basis columns that make the basis singular by logical columns
  // of the rows they leave uncovered. Returns the removed structurals.
  std::vector<std::size_t> repair(std::vector<std::size_t>& head);

  // In place: v <- B^{-1} v.
  void ftran(std::vector<double>& v) const;
  // In place: v <- B^{-T} v.
  void btran(std::vector<double>& v) const;

  // Basis column at position p replaced; alpha = B^{-1} a_entering.
  void push_eta(std::size_t p, const std::vector<double>& alpha);
  std::size_t num_etas() const noexcept { return etas_.size(); }

 private:
  struct Eta {
    std::size_t p;
    double pivot;
    std::vector<std::pair<std::size_t, double>> entries;  // i != p
  };
  struct Entry {
    std::size_t index;
    double value;
  };

  void kernel_solve(Eigen::VectorXd& rhs, bool transpose) const;

  const LpModel& model_;
  std::size_t m_;
  std::size_t dense_threshold_;
  bool dense_ = true;
  // Kernel: structural basic positions and the uncovered rows, in kernel order.
  std::vector<std::size_t> kernel_pos_;
  std::vector<std::size_t> kernel_row_;
  // Logical basic positions and the row each covers.
  std::vector<std::size_t> logical_pos_;
  std::vector<std::size_t> logical_row_;
  // Per kernel column: its entries in covered rows, as (logical slot, value).
  std::vector<std::vector<Entry>> covered_;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_lu_;
  std::vector<Eta> etas_;
  mutable Eigen::VectorXd work_;
  mutable std::vector<double> scratch_;
};

}  // namespace wdro::lp::detail
