#include "wdro/oracle/ellipsoid.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "wdro/msdro/dual_lp.hpp"
#include "wdro/msdro/msdro.hpp"

namespace wdro::oracle {

std::vector<double> flatten(const DualSolution& point) {
  std::vector<double> x = point.lambda;
  for (const auto& g : point.gamma) x.insert(x.end(), g.begin(), g.end());
  return x;
}

DualSolution unflatten(const AmbiguitySpec& amb, const std::vector<double>& x) {
  const std::size_t K = amb.num_sources();
  DualSolution out;
  out.lambda.assign(x.begin(), x.begin() + static_cast<long>(K));
  std::size_t pos = K;
  for (const auto& src : amb.sources) {
    const std::size_t n = src.center.size();
    out.gamma.emplace_back(x.begin() + static_cast<long>(pos),
                           x.begin() + static_cast<long>(pos + n));
    pos += n;
  }
  out.value = msdro::dual_objective(amb, out);
  return out;
}

Separation separation_oracle(const DualSolution& point, const AmbiguitySpec& amb,
                             const PiecewiseAffineLoss& loss, const Polyhedron& support) {
  amb.validate();
  const std::size_t K = amb.num_sources();
  std::vector<std::size_t> gamma_offset(K);
  std::size_t dim = K;
  for (std::size_t k = 0; k < K; ++k) {
    gamma_offset[k] = dim;
    dim += amb.sources[k].center.size();
  }

  Separation out;
  for (std::size_t k = 0; k < K; ++k) {
    if (point.lambda[k] < 0.0) {
      out.inside = false;
      out.cut.normal.assign(dim, 0.0);
      out.cut.normal[k] = -1.0;
      out.cut.offset = 0.0;
      return out;
    }
  }

  const std::size_t total = msdro::num_multi_indices(amb);
  std::vector<Point> anchors(K);
  for (std::size_t a = 0; a < total; ++a) {
    const auto alpha = msdro::decode_alpha(amb, a);
    double gsum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      anchors[k] = amb.sources[k].center.atom(alpha[k]);
      gsum += point.gamma[k][alpha[k]];
    }
    const MoreauResult m = moreau_envelope(point.lambda, anchors, loss, support, amb.cost);
    if (!m.finite) {
      out.inside = false;
      out.cut.normal.assign(dim, 0.0);
      for (std::size_t k = 0; k < K; ++k) out.cut.normal[k] = m.halfspace.normal[k];
      out.cut.offset = m.halfspace.offset;
      return out;
    }
    if (m.value > gsum + 1e-9 * (1.0 + std::abs(gsum))) {
      // l(xi*) - sum_k lambda'_k c(xi*, anchor_k) <= sum_k gamma'_{k,alpha_k}.
      out.inside = false;
      out.cut.normal.assign(dim, 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        out.cut.normal[k] = -amb.cost(m.maximizer, anchors[k]);
        out.cut.normal[gamma_offset[k] + alpha[k]] = -1.0;
      }
      out.cut.offset = -loss(m.maximizer);
      return out;
    }
  }
  return out;
}

double default_radius(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                      const Polyhedron& support) {
  const DualSolution sol = msdro::worst_case_value(amb, loss, support);
  double sq = 0.0;
  for (double v : flatten(sol)) sq += v * v;
  return 10.0 * std::max(1.0, std::sqrt(sq));
}

EllipsoidResult ellipsoid_solve(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                                const Polyhedron& support, double R, double delta,
                                const EllipsoidOptions& options) {
  amb.validate();
  if (!(R > 0.0) || !(delta > 0.0)) {
    throw InvalidArgument("ellipsoid_solve: R and delta must be positive");
  }
  const std::size_t K = amb.num_sources();
  std::size_t dim = K;
  for (const auto& src : amb.sources) dim += src.center.size();
  const auto n = static_cast<Eigen::Index>(dim);
  const double nd = static_cast<double>(dim);

  Eigen::VectorXd c(n);
  {
    Eigen::Index pos = 0;
    for (std::size_t k = 0; k < K; ++k) c(pos++) = amb.sources[k].radius;
    for (const auto& src : amb.sources) {
      for (double p : src.center.probs()) c(pos++) = p;
    }
  }

  EllipsoidResult out;
  EllipsoidState& st = out.state;
  st.center = Eigen::VectorXd::Zero(n);
  st.shape = R * R * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd best_point;

  for (st.iterations = 0; st.iterations < options.max_iterations; ++st.iterations) {
    std::vector<double> z(st.center.data(), st.center.data() + n);
    const DualSolution point = unflatten(amb, z);
    const Separation sep = separation_oracle(point, amb, loss, support);
    Eigen::VectorXd a(n);
    if (sep.inside) {
      const double v = c.dot(st.center);
      if (v < st.best_value) {
        st.best_value = v;
        best_point = st.center;
      }
      a = c;
    } else {
      a = Eigen::Map<const Eigen::VectorXd>(sep.cut.normal.data(), n);
    }

    const double lower = c.dot(st.center) - std::sqrt(std::max(0.0, c.dot(st.shape * c)));
    out.lower_bound = std::max(out.lower_bound, lower);
    if (st.best_value - out.lower_bound <= delta) break;

    const double aPa = a.dot(st.shape * a);
    if (!(aPa > 0.0)) throw NumericalFailure("ellipsoid_solve: degenerate shape matrix");
    const Eigen::VectorXd b = st.shape * a / std::sqrt(aPa);
    st.center -= b / (nd + 1.0);
    st.shape = nd * nd / (nd * nd - 1.0) * (st.shape - 2.0 / (nd + 1.0) * b * b.transpose());
    st.shape = 0.5 * (st.shape + st.shape.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(st.shape);
    if (llt.info() != Eigen::Success) {
      throw NumericalFailure("ellipsoid_solve: shape matrix lost definiteness");
    }
    st.log_det.push_back(2.0 * llt.matrixLLT().diagonal().array().log().sum());
  }
  if (st.iterations >= options.max_iterations) {
    throw IterationBudgetExceeded("ellipsoid_solve: iteration budget exhausted");
  }
  if (best_point.norm() >= 0.99 * R) {
    throw IterationBudgetExceeded(
        "ellipsoid_solve: optimum on the boundary of the initial ball");
  }
  out.value = st.best_value;
  out.dual = unflatten(amb, std::vector<double>(best_point.data(), best_point.data() + n));
  return out;
}

}  // namespace wdro::oracle
