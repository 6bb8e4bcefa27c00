#pragma once

#include "cartan_lab/cartan.hpp"
#include "cartan_lab/geometry.hpp"
#include "cartan_lab/multidim.hpp"
#include "cartan_lab/trace.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cartan_lab::io {

using json = nlohmann::ordered_json;

// Extended reals: finite values as numbers, +-inf as the strings "inf" / "-inf".
json real(double v);
double to_real(const json& j);

// Points as flat real coordinate arrays [Re z1, Im z1, Re z2, Im z2, ...].
json to_json(const Point& p);
Point point_from_json(const json& j);

json to_json(const DSet& s);
DSet dset_from_json(const json& j);

json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j, std::size_t nvars);

// Tagged union: {"type": "potential" | "logpoly" | "lognormmap" | "constant" | "max" | "shifted", ...}
json to_json(const Function& f);
Function function_from_json(const json& j);

json to_json(const BallCover& c);
BallCover cover_from_json(const json& j);

json to_json(const HolomorphicMapSample& F);
// Either a full map spec {n, components, zeros, M} or {"gallery": "quadratic:0.01"}.
HolomorphicMapSample map_from_json(const json& j);

json to_json(const RegularityReport& r);
json to_json(const CartanReport& r);
json to_json(const RemezExperiment& e);
RemezExperiment remez_from_json(const json& j);
json to_json(const RemezFit& f);
json to_json(const BmoReport& r);
json to_json(const ReverseHolderReport& r);
json to_json(const DistributionReport& r);
json to_json(const SharpnessReport& r);
json to_json(const EnvelopeReport& r);
json to_json(const EllipticityProbeResult& r);

json read_json(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

// RFC 4180 style CSV with a header row.
std::string csv_field(const std::string& s);
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

// Shortest round-trip decimal form of a double, "inf" / "-inf" / "nan" otherwise.
std::string format_double(double v);

} // namespace cartan_lab::io
