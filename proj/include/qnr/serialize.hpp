#pragma once

#include <json.hpp>

#include "qnr/algebra.hpp"
#include "qnr/learn.hpp"
#include "qnr/metrics.hpp"
#include "qnr/qfa.hpp"
#include "qnr/quiver.hpp"

namespace qnr {

using json = nlohmann::json;

// Matrices: {"rows": r, "cols": c, "data": [...]} row-major; entries are plain
// numbers or [re, im] pairs (writers emit pairs only for nonzero imaginary
// parts, readers accept both).
json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);

json quiver_to_json(const Quiver& q);
Quiver quiver_from_json(const json& j);

json dims_to_json(const DimData& d);
DimData dims_from_json(const json& j);

json rep_to_json(const FramedRep& r);
FramedRep rep_from_json(const json& j);

json path_to_json(const Path& p);
Path path_from_json(const json& j);

json hatted_to_json(const HattedElement& h);
HattedElement hatted_from_json(const json& j);

// Node-tagged recursive records: {"type":"sum"|"term"|"input"|"act", ...}.
json tree_to_json(const AlgorithmTree& t);
AlgorithmTree tree_from_json(const json& j);

// Presets by name ("moduli" | "euclidean" | "hyperbolic") or an explicit
// {"<vertex>:<arrow.arrow...>": value} table keyed like Path::key().
json alpha_to_json(const AlphaWeights& a, const Quiver& q);
AlphaWeights alpha_from_json(const json& j, const Quiver& q);

json qfa_to_json(const Qfa& m);
Qfa qfa_from_json(const json& j);

json machine_to_json(const QuantumMachine& m);
QuantumMachine machine_from_json(const json& j);

json distribution_to_json(const OutcomeDistribution& d);

json trace_row_to_json(const TraceRow& r);

json tolerances_to_json();

// FNV-1a 64 over the canonical dump, as fixed-width hex.
std::string config_hash(const json& j);

}  // namespace qnr
