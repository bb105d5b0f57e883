#pragma once

#include <json.hpp>

#include "wdro/calibration/calibration.hpp"
#include "wdro/msdro/types.hpp"
#include "wdro/transport/distribution.hpp"

namespace wdro::io {

using Json = nlohmann::json;

// {"atoms": [[...], ...], "probs": [...]}; probs default to uniform.
transport::DiscreteDistribution distribution_from_json(const Json& j);
Json to_json(const transport::DiscreteDistribution& P);

// {"norm": "l1" | "l2" | "linf" | "sqeuclidean", "p": 1}
transport::GroundCost cost_from_json(const Json& j);
Json to_json(const transport::GroundCost& c);

// {"cost": {...}, "sources": [{"center": <distribution>, "radius": r}, ...]}
msdro::AmbiguitySpec ambiguity_from_json(const Json& j);
Json to_json(const msdro::AmbiguitySpec& amb);

// {"pieces": [{"a": [...], "b": b}, ...]}
msdro::PiecewiseAffineLoss loss_from_json(const Json& j);

// {"C": [[...]], "g": [...]}; null or absent means the whole space.
msdro::Polyhedron polyhedron_from_json(const Json& j);

// {"num_decisions": n, "pieces": [{"A": [[...]], "a0": [...], "c": [...], "b0": b}]}
msdro::DecisionLoss decision_loss_from_json(const Json& j);
// {"C": [[...]], "g": [...], "lower": [...], "upper": [...]}; null bounds are infinite.
msdro::DecisionSet decision_set_from_json(const Json& j);

// {"kind": "none" | "dirac" | "gaussian" | "table", "r", "mean", "sd", "table_r", "table_F"}
calibration::Prior prior_from_json(const Json& j);
// {"a", "A", "c1", "c2", "d", "p"}
calibration::ConcentrationParams params_from_json(const Json& j);

Json to_json(const msdro::DualSolution& s);

Json read_json_file(const std::string& path);

}  // namespace wdro::io
