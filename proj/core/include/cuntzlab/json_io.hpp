#pragma once

#include "cuntzlab/cuntz.hpp"
#include "cuntzlab/field.hpp"
#include "cuntzlab/measure.hpp"
#include "cuntzlab/rsh.hpp"
#include "cuntzlab/space.hpp"
#include "cuntzlab/villadsen.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cuntzlab::io {

using json = nlohmann::json;

/// Reads and parses a file; parse failures carry the path and the parser's
/// byte/line diagnostics in the ValidationError message.
json load_json_file(const std::string& path);

/// Floats are serialised as strings with 17 significant digits so report
/// files are byte-stable; rationals as canonical "p/q" strings.
std::string format_double(double value);
json rational_json(const Rational& value);
Rational rational_from_json(const json& value);

json space_to_json(const SampledSpace& space);
SpaceRef space_from_json(const json& j);

json field_to_json(const MatrixField& field);
json operator_field_to_json(const OperatorField& field);
MatrixField field_from_json(const json& j, SpaceRef space);

/// Per-point dimension data: {"default": d, "points": {id: d}}; points are
/// optional and the default falls back to the space's covering dimension.
std::vector<int> dims_from_json(const json& j, const SampledSpace& space);

json trace_to_json(const TraceMeasure& mu);
TraceMeasure trace_from_json(const json& j, SpaceRef space);

json decomposition_to_json(const RshDecomposition& d);
RshDecomposition decomposition_from_json(const json& j);

json sequence_to_json(const InductiveSequence& seq);
InductiveSequence sequence_from_json(const json& j);

json params_to_json(const VilladsenParams& p);
VilladsenParams params_from_json(const json& j);

json measure_to_json(const MarginalMeasure& mu);
MarginalMeasure measure_from_json(const json& j);

} // namespace cuntzlab::io
