#include "wdro/io/json_io.hpp"

#include <cmath>

#include "wdro/errors.hpp"
#include "wdro/io/csv.hpp"

namespace wdro::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("json: missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j) {
  if (j.is_null()) return NAN;
  if (!j.is_number()) throw InvalidArgument("json: expected a number");
  return j.get<double>();
}

std::vector<double> vec(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("json: expected an array of numbers");
  std::vector<double> out;
  for (const Json& v : j) out.push_back(number(v));
  return out;
}

std::vector<std::vector<double>> mat(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("json: expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (const Json& row : j) out.push_back(vec(row));
  return out;
}

std::vector<double> bounds(const Json& j, const char* key, double missing) {
  if (!j.contains(key)) return {};
  std::vector<double> out = vec(j.at(key));
  for (double& v : out) {
    if (std::isnan(v)) v = missing;
  }
  return out;
}

}  // namespace

transport::DiscreteDistribution distribution_from_json(const Json& j) {
  auto atoms = mat(field(j, "atoms"));
  if (!j.contains("probs")) return transport::DiscreteDistribution::uniform(std::move(atoms));
  return transport::DiscreteDistribution(std::move(atoms), vec(j.at("probs")));
}

Json to_json(const transport::DiscreteDistribution& P) {
  return Json{{"atoms", P.atoms()}, {"probs", P.probs()}};
}

transport::GroundCost cost_from_json(const Json& j) {
  const std::string norm = j.value("norm", std::string("l1"));
  const int p = j.value("p", 1);
  if (norm == "sqeuclidean") return transport::GroundCost::sq_euclidean();
  if (norm == "l1") return transport::GroundCost::norm_power(transport::Norm::kL1, p);
  if (norm == "l2") return transport::GroundCost::norm_power(transport::Norm::kL2, p);
  if (norm == "linf") return transport::GroundCost::norm_power(transport::Norm::kLinf, p);
  throw UnsupportedCost("json: unknown norm \"" + norm + "\"");
}

Json to_json(const transport::GroundCost& c) {
  if (c.kind == transport::GroundCost::Kind::kSqEuclidean) return Json{{"norm", "sqeuclidean"}};
  const char* name = c.norm == transport::Norm::kL1 ? "l1"
                     : c.norm == transport::Norm::kL2 ? "l2"
                                                      : "linf";
  return Json{{"norm", name}, {"p", c.p}};
}

msdro::AmbiguitySpec ambiguity_from_json(const Json& j) {
  msdro::AmbiguitySpec amb;
  if (j.contains("cost")) amb.cost = cost_from_json(j.at("cost"));
  for (const Json& s : field(j, "sources")) {
    amb.sources.push_back({distribution_from_json(field(s, "center")), number(field(s, "radius"))});
  }
  return amb;
}

Json to_json(const msdro::AmbiguitySpec& amb) {
  Json sources = Json::array();
  for (const auto& s : amb.sources) {
    sources.push_back({{"center", to_json(s.center)}, {"radius", s.radius}});
  }
  return Json{{"cost", to_json(amb.cost)}, {"sources", sources}};
}

msdro::PiecewiseAffineLoss loss_from_json(const Json& j) {
  msdro::PiecewiseAffineLoss loss;
  for (const Json& p : field(j, "pieces")) {
    loss.pieces.push_back({vec(field(p, "a")), number(field(p, "b"))});
  }
  return loss;
}

msdro::Polyhedron polyhedron_from_json(const Json& j) {
  if (j.is_null()) return msdro::Polyhedron::whole_space();
  msdro::Polyhedron P;
  P.C = mat(field(j, "C"));
  P.g = vec(field(j, "g"));
  return P;
}

msdro::DecisionLoss decision_loss_from_json(const Json& j) {
  msdro::DecisionLoss loss;
  loss.num_decisions = field(j, "num_decisions").get<std::size_t>();
  for (const Json& p : field(j, "pieces")) {
    msdro::DecisionPiece piece;
    piece.A = mat(field(p, "A"));
    piece.a0 = vec(field(p, "a0"));
    piece.c = vec(field(p, "c"));
    piece.b0 = p.contains("b0") ? number(p.at("b0")) : 0.0;
    loss.pieces.push_back(std::move(piece));
  }
  return loss;
}

msdro::DecisionSet decision_set_from_json(const Json& j) {
  msdro::DecisionSet ds;
  if (j.is_null()) return ds;
  if (j.contains("C")) ds.rows = polyhedron_from_json(j);
  ds.lower = bounds(j, "lower", -INFINITY);
  ds.upper = bounds(j, "upper", INFINITY);
  return ds;
}

calibration::Prior prior_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  calibration::Prior prior;
  if (kind == "none") {
    prior = calibration::Prior::none();
  } else if (kind == "dirac") {
    prior = calibration::Prior::dirac(number(field(j, "r")));
  } else if (kind == "gaussian") {
    prior = calibration::Prior::gaussian(number(field(j, "mean")), number(field(j, "sd")));
  } else if (kind == "table") {
    prior = calibration::Prior::table(vec(field(j, "table_r")), vec(field(j, "table_F")));
  } else {
    throw InvalidArgument("json: unknown prior kind \"" + kind + "\"");
  }
  return prior;
}

calibration::ConcentrationParams params_from_json(const Json& j) {
  calibration::ConcentrationParams p;
  p.a = j.value("a", p.a);
  p.A = j.value("A", p.A);
  p.c1 = j.value("c1", p.c1);
  p.c2 = j.value("c2", p.c2);
  p.d = j.value("d", p.d);
  p.p = j.value("p", p.p);
  p.validate();
  return p;
}

Json to_json(const msdro::DualSolution& s) {
  return Json{{"lambda", s.lambda}, {"gamma", s.gamma}, {"value", s.value}};
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace wdro::io
