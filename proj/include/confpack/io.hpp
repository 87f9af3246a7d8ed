#pragma once

// File formats and report serialization. Doubles are written in shortest
// round-trip form so re-reading reproduces the exact values.

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "confpack/extremal.hpp"
#include "confpack/packing.hpp"
#include "confpack/spectral.hpp"
#include "confpack/weights.hpp"
#include "confpack/wgraph.hpp"

namespace confpack {

using nlohmann::json;

/// Raised on malformed input files; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x);

json packing_to_json(const SpherePacking& p);
SpherePacking packing_from_json(const json& j);
void write_packing(const std::string& path, const SpherePacking& p);
SpherePacking read_packing(const std::string& path);

void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);
void write_graph(const std::string& path, const Graph& g);
Graph read_graph(const std::string& path);

/// Bodies of the packing become the vertices of the graph, in order.
QuasiPackedGraph assemble_graph(const SpherePacking& p, const Graph& g, double multiplicity = 1.0);

void write_weight_csv(std::ostream& os, std::span<const double> omega);
std::vector<double> read_weight_csv(std::istream& is);
void write_weight(const std::string& csv_path, const ConformalWeight& w);
std::vector<double> read_weight(const std::string& csv_path);
json weight_meta(const ConformalWeight& w);
std::string weight_meta_path(const std::string& csv_path);

json to_json(const ValidationReport& r);
json to_json(const GrowthReport& r);
json to_json(const SpectrumReport& s);
json to_json(const WeylCheck& w);
json to_json(const BumpResult& b);
json to_json(const VelResult& v, const std::string& omega_file);
json to_json(const Certificate& c);
json to_json(const DimensionFit& f);

void write_heat_csv(std::ostream& os, std::span<const HeatPoint> series);

/// 64-bit FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& config);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace confpack
