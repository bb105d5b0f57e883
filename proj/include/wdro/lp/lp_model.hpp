#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace wdro::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ObjectiveSense { kMinimize, kMaximize };
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Immutable sparse linear program
//
//   min/max  c'x   s.t.  a_i'x (<=,=,>=) b_i,   lower <= x <= upper.
//
// The constraint matrix is stored column-major; duplicate (row, col) entries
// supplied to the builder are summed.
class LpModel {
 public:
  std::size_t num_rows() const noexcept { return row_sense_.size(); }
  std::size_t num_cols() const noexcept { return cost_.size(); }
  std::size_t num_nonzeros() const noexcept { return values_.size(); }

  ObjectiveSense sense() const noexcept { return sense_; }
  double objective_offset() const noexcept { return offset_; }
  std::span<const double> cost() const noexcept { return cost_; }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> upper() const noexcept { return upper_; }
  std::span<const RowSense> row_sense() const noexcept { return row_sense_; }
  std::span<const double> rhs() const noexcept { return rhs_; }

  // Entries of column j live in [col_start(j), col_start(j + 1)).
  std::size_t col_start(std::size_t j) const noexcept { return col_start_[j]; }
  std::span<const std::size_t> row_index() const noexcept { return row_index_; }
  std::span<const double> values() const noexcept { return values_; }

  // a_i'x for every row.
  std::vector<double> row_activity(std::span<const double> x) const;
  double objective_value(std::span<const double> x) const;

  // Copy with the bounds of column j replaced. Used by the enumeration layer
  // to fix binaries without rebuilding the matrix.
  LpModel with_bounds(std::span<const std::size_t> cols,
                      std::span<const double> lower,
                      std::span<const double> upper) const;

 private:
  friend class LpBuilder;

  ObjectiveSense sense_ = ObjectiveSense::kMinimize;
  double offset_ = 0.0;
  std::vector<double> cost_, lower_, upper_;
  std::vector<RowSense> row_sense_;
  std::vector<double> rhs_;
  std::vector<std::size_t> col_start_{0};
  std::vector<std::size_t> row_index_;
  std::vector<double> values_;
};

class LpBuilder {
 public:
  explicit LpBuilder(ObjectiveSense sense = ObjectiveSense::kMinimize)
      : sense_(sense) {}

  std::size_t add_variable(double lower, double upper, double cost = 0.0);
  std::size_t add_row(RowSense sense, double rhs);
  void add_coefficient(std::size_t row, std::size_t col, double value);

  void set_cost(std::size_t col, double cost);
  void set_bounds(std::size_t col, double lower, double upper);
  void set_rhs(std::size_t row, double rhs);
  void set_objective_offset(double offset) { offset_ = offset; }

  std::size_t num_rows() const noexcept { return row_sense_.size(); }
  std::size_t num_cols() const noexcept { return cost_.size(); }

  // Validates the invariants (indices in range, finite costs and right-hand
  // sides, lower <= upper) and assembles the column-major matrix. Throws
  // InvalidArgument on violation.
  LpModel build() const;

 private:
  ObjectiveSense sense_;
  double offset_ = 0.0;
  std::vector<double> cost_, lower_, upper_;
  std::vector<RowSense> row_sense_;
  std::vector<double> rhs_;
  std::vector<Triplet> triplets_;
};

// Debug dump: a header line "rows cols nnz sense", one line per row
// "R <sense> <rhs>", one per column "C <cost> <lower> <upper>" and one per
// nonzero "<row> <col> <value>". Not a stable format.
void write_triplets(std::ostream& out, const LpModel& model);

}  // namespace wdro::lp
