#pragma once

// JSON forms of estimator specs and verification reports.
//
// Spec objects carry a "kind" field plus parameters:
//   {"kind": "unbiased"}
//   {"kind": "affine", "a": 0.8}
//   {"kind": "mle"}
//   {"kind": "boundary_uniform", "l": 0, "radius": 2.5}      l, radius optional
//   {"kind": "radial_mixture", "l": 0, "prior": PRIOR}
//   {"kind": "truncated", "base": SPEC}
//   {"kind": "tabulated", "t": [...], "h": [...]}
// with PRIOR one of
//   {"kind": "point_mass", "r": 1.5}
//   {"kind": "ball_uniform"}
//   {"kind": "tabulated", "r": [...], "density": [...]}

#include "boundedsnr/analysis.hpp"
#include "boundedsnr/estimators.hpp"

#include <json.hpp>

#include <string>

namespace snr {

nlohmann::json to_json(const EstimatorSpec& spec);
nlohmann::json to_json(const RadialPrior& prior);

/// Throws ConfigurationError naming the offending field.
EstimatorSpec spec_from_json(const nlohmann::json& j);
RadialPrior prior_from_json(const nlohmann::json& j);

/// Accepts a JSON object or a bare kind name ("mle", "unbiased", "boundary_uniform").
EstimatorSpec parse_spec(const std::string& text);

nlohmann::json to_json(const analysis::VerificationReport& report);
nlohmann::json to_json(const analysis::Truncation& truncation);

}  // namespace snr
