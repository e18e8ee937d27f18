#pragma once

#include <json.hpp>

#include "jetflag/flagcauchy.hpp"
#include "jetflag/involutive.hpp"
#include "jetflag/jetspace.hpp"
#include "jetflag/multiindex.hpp"
#include "jetflag/variational.hpp"

// JSON wire format. Expressions travel as strings in the parser grammar;
// chart points are flat objects keyed by coordinate name.
namespace jetflag::io {

using json = nlohmann::json;

json to_json(const BlockPartition& bp);
json to_json(const jet::JetPoint& p);
json to_json(const flag::Point& p);
json to_json(const grassmann::Plane& p);
json to_json(const inv::InvolutivitySystem& sys);
json to_json(const inv::InvolutivityResidual& r);
json to_json(const inv::ConsequenceReport& r);
json to_json(const flag::DiagramReport& r);
json to_json(const flag::FlagRoundTripReport& r);
json to_json(const flag::CauchyRoundTripReport& r);
json to_json(const flag::TransversalityReport& r);
json to_json(const var::CylinderBoundary& b);
json to_json(const var::ColumbusSolution& s);

sym::Expr expr_from_json(const json& j);
std::map<std::string, double> values_from_json(const json& j);

/// {"vars": [...], "forms": [{"dx": {...}, "du": {...}}], "independent": [...]?}
/// The x-variables are "independent" when given, otherwise every variable
/// that appears as a dx key, in "vars" order; the rest are u-variables.
inv::DistributionSpec distribution_from_json(const json& j);
json to_json(const inv::DistributionSpec& d);

/// {"x": "<expr in s>", "y": "<expr in s>", "domain": [a, b]}
var::CurveSpec curve_from_json(const json& j);

/// {"n": 2, "f": "...", "g": ["..."], "h": [["...", ...]]}
flag::CauchyDatumSpec datum_from_json(const json& j);

/// {"n": 1, "components": ["..."]}
jet::SectionSpec section_from_json(const json& j);

/// Reads the whole document from a path, standard input for "-", or
/// takes `source` itself when it starts with '{' or '['.
json read_document(const std::string& source);

}  // namespace jetflag::io
