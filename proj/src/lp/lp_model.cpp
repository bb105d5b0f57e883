#include "wdro/lp/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "wdro/errors.hpp"

namespace wdro::lp {

std::vector<double> LpModel::row_activity(std::span<const double> x) const {
  std::vector<double> activity(num_rows(), 0.0);
  for (std::size_t j = 0; j < num_cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      activity[row_index_[k]] += values_[k] * xj;
    }
  }
  return activity;
}

double LpModel::objective_value(std::span<const double> x) const {
  double value = offset_;
  for (std::size_t j = 0; j < num_cols(); ++j) value += cost_[j] * x[j];
  return value;
}

LpModel LpModel::with_bounds(std::span<const std::size_t> cols,
                             std::span<const double> lower,
                             std::span<const double> upper) const {
  LpModel copy = *this;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] >= num_cols() || lower[k] > upper[k]) {
      throw InvalidArgument("with_bounds: bad column or empty bound interval");
    }
    copy.lower_[cols[k]] = lower[k];
    copy.upper_[cols[k]] = upper[k];
  }
  return copy;
}

std::size_t LpBuilder::add_variable(double lower, double upper, double cost) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return cost_.size() - 1;
}

std::size_t LpBuilder::add_row(RowSense sense, double rhs) {
  row_sense_.push_back(sense);
  rhs_.push_back(rhs);
  return row_sense_.size() - 1;
}

void LpBuilder::add_coefficient(std::size_t row, std::size_t col,
                                double value) {
  if (value != 0.0) triplets_.push_back({row, col, value});
}

void LpBuilder::set_cost(std::size_t col, double cost) { cost_.at(col) = cost; }

void LpBuilder::set_bounds(std::size_t col, double lower, double upper) {
  lower_.at(col) = lower;
  upper_.at(col) = upper;
}

void LpBuilder::set_rhs(std::size_t row, double rhs) { rhs_.at(row) = rhs; }

LpModel LpBuilder::build() const {
  const std::size_t m = row_sense_.size();
  const std::size_t n = cost_.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost_[j])) {
      throw InvalidArgument("objective coefficient " + std::to_string(j) +
                            " is not finite");
    }
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) ||
        lower_[j] > upper_[j] || lower_[j] == kInf || upper_[j] == -kInf) {
      throw InvalidArgument("variable " + std::to_string(j) +
                            " has an empty or invalid bound interval");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(rhs_[i])) {
      throw InvalidArgument("right-hand side " + std::to_string(i) +
                            " is not finite");
    }
  }
  for (const Triplet& t : triplets_) {
    if (t.row >= m || t.col >= n) {
      throw InvalidArgument("triplet index out of range");
    }
    if (!std::isfinite(t.value)) {
      throw InvalidArgument("matrix coefficient is not finite");
    }
  }

  std::vector<Triplet> sorted = triplets_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.col != b.col ? a.col < b.col : a.row < b.row;
                   });

  LpModel model;
  model.sense_ = sense_;
  model.offset_ = offset_;
  model.cost_ = cost_;
  model.lower_ = lower_;
  model.upper_ = upper_;
  model.row_sense_ = row_sense_;
  model.rhs_ = rhs_;
  model.col_start_.assign(n + 1, 0);
  model.row_index_.reserve(sorted.size());
  model.values_.reserve(sorted.size());

  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    model.col_start_[j] = model.values_.size();
    while (k < sorted.size() && sorted[k].col == j) {
      const std::size_t row = sorted[k].row;
      double sum = 0.0;
      while (k < sorted.size() && sorted[k].col == j && sorted[k].row == row) {
        sum += sorted[k].value;
        ++k;
      }
      if (sum != 0.0) {
        model.row_index_.push_back(row);
        model.values_.push_back(sum);
      }
    }
  }
  model.col_start_[n] = model.values_.size();
  return model;
}

void write_triplets(std::ostream& out, const LpModel& model) {
  out << model.num_rows() << ' ' << model.num_cols() << ' '
      << model.num_nonzeros() << ' '
      << (model.sense() == ObjectiveSense::kMinimize ? "min" : "max") << '\n';
  for (std::size_t i = 0; i < model.num_rows(); ++i) {
    const char* s = model.row_sense()[i] == RowSense::kLessEqual ? "<="
                    : model.row_sense()[i] == RowSense::kEqual   ? "="
                                                                 : ">=";
    out << "R " << s << ' ' << model.rhs()[i] << '\n';
  }
  for (std::size_t j = 0; j < model.num_cols(); ++j) {
    out << "C " << model.cost()[j] << ' ' << model.lower()[j] << ' '
        << model.upper()[j] << '\n';
  }
  for (std::size_t j = 0; j < model.num_cols(); ++j) {
    for (std::size_t k = model.col_start(j); k < model.col_start(j + 1); ++k) {
      out << model.row_index()[k] << ' ' << j << ' ' << model.values()[k]
          << '\n';
    }
  }
}

}  // namespace wdro::lp
