#include "basis_factor.hpp"

#include <cmath>

namespace wdro::lp::detail {

namespace {
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
}

BasisFactor::BasisFactor(const LpModel& model, std::size_t dense_threshold)
    : model_(model), m_(model.num_rows()), dense_threshold_(dense_threshold) {}

bool BasisFactor::factorize(const std::vector<std::size_t>& head) {
  etas_.clear();
  kernel_pos_.clear();
  kernel_row_.clear();
  logical_pos_.clear();
  logical_row_.clear();
  covered_.clear();
  if (m_ == 0) return true;
  const std::size_t n = model_.num_cols();

  // slot[i]: logical slot covering row i, or kernel index of row i.
  std::vector<std::size_t> logical_slot(m_, kNone);
  for (std::size_t p = 0; p < m_; ++p) {
    const std::size_t j = head[p];
    if (j >= n) {
      const std::size_t r = j - n;
      if (logical_slot[r] != kNone) return false;
      logical_slot[r] = logical_pos_.size();
      logical_pos_.push_back(p);
      logical_row_.push_back(r);
    } else {
      kernel_pos_.push_back(p);
    }
  }
  std::vector<std::size_t> kernel_index(m_, kNone);
  for (std::size_t r = 0; r < m_; ++r) {
    if (logical_slot[r] == kNone) {
      kernel_index[r] = kernel_row_.size();
      kernel_row_.push_back(r);
    }
  }
  const std::size_t s = kernel_pos_.size();
  if (kernel_row_.size() != s) return false;
  covered_.resize(s);
  scratch_.assign(m_, 0.0);
  if (s == 0) return true;

  const auto ks = static_cast<Eigen::Index>(s);
  work_.resize(ks);
  dense_ = s <= dense_threshold_;
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::MatrixXd dense;
  if (dense_) {
    dense = Eigen::MatrixXd::Zero(ks, ks);
  } else {
    entries.reserve(s * 4);
  }
  for (std::size_t c = 0; c < s; ++c) {
    const std::size_t j = head[kernel_pos_[c]];
    for (std::size_t k = model_.col_start(j); k < model_.col_start(j + 1); ++k) {
      const std::size_t r = model_.row_index()[k];
      const double a = model_.values()[k];
      if (logical_slot[r] != kNone) {
        covered_[c].push_back({logical_slot[r], a});
      } else if (dense_) {
        dense(static_cast<Eigen::Index>(kernel_index[r]), static_cast<Eigen::Index>(c)) = a;
      } else {
        entries.emplace_back(static_cast<int>(kernel_index[r]), static_cast<int>(c), a);
      }
    }
  }

  if (dense_) {
    dense_lu_.compute(dense);
    // PartialPivLU never reports failure; inspect the U diagonal instead.
    const auto& lu = dense_lu_.matrixLU();
    double max_diag = 0.0;
    double min_diag = INFINITY;
    for (Eigen::Index i = 0; i < ks; ++i) {
      max_diag = std::max(max_diag, std::abs(lu(i, i)));
      min_diag = std::min(min_diag, std::abs(lu(i, i)));
    }
    return min_diag > 1e-11 * std::max(1.0, max_diag);
  }
  Eigen::SparseMatrix<double> kernel(ks, ks);
  kernel.setFromTriplets(entries.begin(), entries.end());
  kernel.makeCompressed();
  sparse_lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  sparse_lu_->compute(kernel);
  return sparse_lu_->info() == Eigen::Success;
}

std::vector<std::size_t> BasisFactor::repair(std::vector<std::size_t>& head) {
  const std::size_t n = model_.num_cols();
  std::vector<std::size_t> removed;
  // Rebuild the kernel of the current head densely and find a maximal
  // independent column set with full pivoting.
  factorize(head);
  const std::size_t s = kernel_pos_.size();
  if (s == 0 || kernel_row_.size() != s) return removed;
  std::vector<std::size_t> kernel_index(m_, static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < s; ++c) kernel_index[kernel_row_[c]] = c;
  const auto ks = static_cast<Eigen::Index>(s);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(ks, ks);
  for (std::size_t c = 0; c < s; ++c) {
    const std::size_t j = head[kernel_pos_[c]];
    for (std::size_t k = model_.col_start(j); k < model_.col_start(j + 1); ++k) {
      const std::size_t r = kernel_index[model_.row_index()[k]];
      if (r != static_cast<std::size_t>(-1)) {
        dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = model_.values()[k];
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
  lu.setThreshold(1e-9);
  const Eigen::Index rank = lu.rank();
  const auto& P = lu.permutationP();
  const auto& Q = lu.permutationQ();
  // P * A * Q = L U: rows P^{-1}(0..rank) and columns Q(0..rank) are kept.
  std::vector<std::size_t> dep_rows;
  for (Eigen::Index i = 0; i < ks; ++i) {
    if (P.indices()[i] >= rank) dep_rows.push_back(kernel_row_[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = rank; i < ks; ++i) {
    const std::size_t c = static_cast<std::size_t>(Q.indices()[i]);
    const std::size_t p = kernel_pos_[c];
    removed.push_back(head[p]);
    head[p] = n + dep_rows[static_cast<std::size_t>(i - rank)];
  }
  return removed;
}

void BasisFactor::kernel_solve(Eigen::VectorXd& rhs, bool transpose) const {
  if (rhs.size() == 0) return;
  if (dense_) {
    rhs = transpose ? Eigen::VectorXd(dense_lu_.transpose().solve(rhs))
                    : Eigen::VectorXd(dense_lu_.solve(rhs));
  } else {
    rhs = transpose ? Eigen::VectorXd(sparse_lu_->transpose().solve(rhs))
                    : Eigen::VectorXd(sparse_lu_->solve(rhs));
  }
}

// Rows in the kernel: K x_S = b_S. Covered row r: A_r x_S - x_logical = b_r.
void BasisFactor::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  const std::size_t s = kernel_pos_.size();
  for (std::size_t c = 0; c < s; ++c) work_[static_cast<Eigen::Index>(c)] = v[kernel_row_[c]];
  kernel_solve(work_, false);
  std::vector<double>& out = scratch_;
  for (std::size_t t = 0; t < logical_pos_.size(); ++t) {
    out[logical_pos_[t]] = -v[logical_row_[t]];
  }
  for (std::size_t c = 0; c < s; ++c) {
    const double x = work_[static_cast<Eigen::Index>(c)];
    out[kernel_pos_[c]] = x;
    if (x == 0.0) continue;
    for (const Entry& e : covered_[c]) out[logical_pos_[e.index]] += e.value * x;
  }
  v.swap(out);
  for (const Eta& eta : etas_) {
    const double vp = v[eta.p] / eta.pivot;
    v[eta.p] = vp;
    if (vp == 0.0) continue;
    for (const auto& [i, a] : eta.entries) v[i] -= a * vp;
  }
}

// Logical position covering row r: y_r = -c_p. Kernel: K' y_S = c_S - A_L' y_L.
void BasisFactor::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->p];
    for (const auto& [i, a] : it->entries) acc -= a * v[i];
    v[it->p] = acc / it->pivot;
  }
  std::vector<double>& out = scratch_;
  for (std::size_t t = 0; t < logical_pos_.size(); ++t) {
    out[logical_row_[t]] = -v[logical_pos_[t]];
  }
  const std::size_t s = kernel_pos_.size();
  for (std::size_t c = 0; c < s; ++c) {
    double acc = v[kernel_pos_[c]];
    for (const Entry& e : covered_[c]) acc -= e.value * out[logical_row_[e.index]];
    work_[static_cast<Eigen::Index>(c)] = acc;
  }
  kernel_solve(work_, true);
  for (std::size_t c = 0; c < s; ++c) out[kernel_row_[c]] = work_[static_cast<Eigen::Index>(c)];
  v.swap(out);
}

void BasisFactor::push_eta(std::size_t p, const std::vector<double>& alpha) {
  Eta eta{p, alpha[p], {}};
  for (std::size_t i = 0; i < m_; ++i) {
    if (i != p && std::abs(alpha[i]) > 1e-14) eta.entries.emplace_back(i, alpha[i]);
  }
  etas_.push_back(std::move(eta));
}

}  // namespace wdro::lp::detail
