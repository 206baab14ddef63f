#pragma once

#include <string>

#include "json.hpp"
#include "dissdim/aniso_measure.hpp"
#include "dissdim/exponents.hpp"
#include "dissdim/fixtures.hpp"
#include "dissdim/weak_balance.hpp"

/// JSON views of the reports. Every document carries "schema": "dissdim/1";
/// infinite exponents are written as the string "inf".
namespace dissdim::json_io {

using nlohmann::ordered_json;

inline constexpr const char* kSchema = "dissdim/1";

ordered_json to_json(const ExtendedReal& v);
ordered_json to_json(const SpaceTimePoint& p);
ordered_json to_json(const std::vector<exponents::Term>& terms);

ordered_json to_json(const exponents::ExponentReport& rep);
ordered_json to_json(const weak::BalanceReport& rep);
ordered_json to_json(const weak::BoundaryBalance& b);
ordered_json to_json(const aniso::BoxCount& bc);
ordered_json to_json(const aniso::DensityLadder& ladder);
ordered_json to_json(const aniso::Certification& c);

/// Parameters and outcome of a viscous run (not the samples).
ordered_json run_manifest(const fixtures::ViscousRun& run, const fixtures::RiemannDatum& datum);

/// {"schema", "error": {"kind", "exit_code", "message"}}.
ordered_json error_object(const std::string& kind, int exit_code, const std::string& message);

/// Wraps `body` as {"schema": ..., <body fields>}.
ordered_json document(const ordered_json& body);

}  // namespace dissdim::json_io
