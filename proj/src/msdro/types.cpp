#include "wdro/msdro/types.hpp"

#include <cmath>

namespace wdro::msdro {

void AmbiguitySpec::validate() const {
  if (sources.empty()) throw InvalidArgument("ambiguity set needs at least one source");
  const std::size_t d = sources[0].center.dim();
  for (const Source& s : sources) {
    if (s.center.size() == 0) throw InvalidArgument("source center has no atoms");
    if (s.center.dim() != d) throw DimensionMismatch("source centers differ in dimension");
    if (!(s.radius >= 0.0) || !std::isfinite(s.radius)) {
      throw InvalidArgument("radii must be finite and nonnegative");
    }
  }
}

double PiecewiseAffineLoss::piece(std::size_t l, std::span<const double> xi) const {
  const AffinePiece& p = pieces[l];
  double v = p.b;
  for (std::size_t i = 0; i < xi.size(); ++i) v += p.a[i] * xi[i];
  return v;
}

double PiecewiseAffineLoss::operator()(std::span<const double> xi) const {
  double best = -INFINITY;
  for (std::size_t l = 0; l < pieces.size(); ++l) best = std::max(best, piece(l, xi));
  return best;
}

void PiecewiseAffineLoss::validate(std::size_t d) const {
  if (pieces.empty()) throw InvalidArgument("loss needs at least one piece");
  for (const AffinePiece& p : pieces) {
    if (p.a.size() != d) throw DimensionMismatch("loss piece dimension mismatch");
    if (!std::isfinite(p.b)) throw InvalidArgument("loss intercept is not finite");
    for (double v : p.a) {
      if (!std::isfinite(v)) throw InvalidArgument("loss slope is not finite");
    }
  }
}

bool Polyhedron::contains(std::span<const double> x, double tol) const {
  for (std::size_t r = 0; r < g.size(); ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += C[r][i] * x[i];
    if (s > g[r] + tol) return false;
  }
  return true;
}

void Polyhedron::validate(std::size_t d) const {
  if (C.size() != g.size()) throw DimensionMismatch("polyhedron C and g differ in rows");
  for (std::size_t r = 0; r < C.size(); ++r) {
    if (C[r].size() != d) throw DimensionMismatch("polyhedron row dimension mismatch");
    if (!std::isfinite(g[r])) throw InvalidArgument("polyhedron rhs is not finite");
    for (double v : C[r]) {
      if (!std::isfinite(v)) throw InvalidArgument("polyhedron entry is not finite");
    }
  }
}

Polyhedron Polyhedron::box(std::size_t d, double lo, double hi) {
  Polyhedron p;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> up(d, 0.0), down(d, 0.0);
    up[i] = 1.0;
    down[i] = -1.0;
    p.C.push_back(up);
    p.g.push_back(hi);
    p.C.push_back(down);
    p.g.push_back(-lo);
  }
  return p;
}

PiecewiseAffineLoss DecisionLoss::at(std::span<const double> theta) const {
  PiecewiseAffineLoss loss;
  for (const DecisionPiece& p : pieces) {
    AffinePiece q;
    q.a = p.a0;
    q.b = p.b0;
    for (std::size_t j = 0; j < num_decisions; ++j) {
      q.b += p.c[j] * theta[j];
      for (std::size_t i = 0; i < q.a.size(); ++i) q.a[i] += p.A[i][j] * theta[j];
    }
    loss.pieces.push_back(std::move(q));
  }
  return loss;
}

void DecisionLoss::validate(std::size_t d) const {
  if (pieces.empty()) throw InvalidArgument("loss needs at least one piece");
  for (const DecisionPiece& p : pieces) {
    if (p.a0.size() != d || p.A.size() != d || p.c.size() != num_decisions) {
      throw DimensionMismatch("decision loss piece has wrong shape");
    }
    for (const auto& row : p.A) {
      if (row.size() != num_decisions) throw DimensionMismatch("decision loss A has wrong shape");
    }
  }
}

DecisionLoss DecisionLoss::constant(const PiecewiseAffineLoss& loss) {
  DecisionLoss out;
  for (const AffinePiece& p : loss.pieces) {
    DecisionPiece q;
    q.A.assign(p.a.size(), {});
    q.a0 = p.a;
    q.b0 = p.b;
    out.pieces.push_back(std::move(q));
  }
  return out;
}

}  // namespace wdro::msdro
