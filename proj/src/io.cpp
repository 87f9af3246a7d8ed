#include "confpack/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace confpack {

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

template <class T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": field '" + key + "' has the wrong type");
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json packing_to_json(const SpherePacking& p) {
  json bodies = json::array();
  for (const auto& b : p.bodies) bodies.push_back({{"id", b.id}, {"center", b.center}, {"radius", b.radius}});
  return {{"dimension", p.space.dimension},
          {"metric", to_string(p.space.metric)},
          {"tau", p.tau},
          {"bodies", std::move(bodies)}};
}

SpherePacking packing_from_json(const json& j) {
  SpherePacking p;
  const int d = field<int>(j, "dimension", "packing");
  if (d < 1 || d > kMaxDim) throw FormatError("packing: field 'dimension' out of range");
  MetricKind metric;
  try {
    metric = metric_from_string(field<std::string>(j, "metric", "packing"));
  } catch (const InvalidArgument&) {
    throw FormatError("packing: field 'metric' must be \"linf\" or \"l2\"");
  }
  p.space = AmbientSpace(d, metric);
  p.tau = field<double>(j, "tau", "packing");
  if (!(p.tau >= 1.0)) throw FormatError("packing: field 'tau' must be >= 1");
  if (!j.contains("bodies")) throw FormatError("packing: missing field 'bodies'");
  const auto& arr = j.at("bodies");
  if (!arr.is_array()) throw FormatError("packing: field 'bodies' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "packing.bodies[" + std::to_string(i) + "]";
    Body b;
    b.id = field<std::int64_t>(arr[i], "id", where);
    b.center = field<std::vector<double>>(arr[i], "center", where);
    b.radius = field<double>(arr[i], "radius", where);
    if (b.center.size() != static_cast<std::size_t>(d))
      throw FormatError(where + ": field 'center' has the wrong dimension");
    if (!(b.radius > 0.0)) throw FormatError(where + ": field 'radius' must be positive");
    p.bodies.push_back(std::move(b));
  }
  return p;
}

void write_packing(const std::string& path, const SpherePacking& p) {
  write_json(path, packing_to_json(p));
}

SpherePacking read_packing(const std::string& path) { return packing_from_json(read_json(path)); }

void write_graph(std::ostream& os, const Graph& g) {
  os << "# vertices " << g.vertex_count() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& is) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      if (hs >> word && word == "vertices") {
        if (!(hs >> n)) throw FormatError("graph: malformed '# vertices' header");
        have_header = true;
      }
      continue;
    }
    if (!have_header) throw FormatError("graph: missing '# vertices N' header");
    std::istringstream ls(line);
    std::uint64_t u = 0, v = 0;
    if (!(ls >> u >> v)) throw FormatError("graph: line " + std::to_string(lineno) + " is not 'u v'");
    if (u >= n || v >= n)
      throw FormatError("graph: line " + std::to_string(lineno) + " has an endpoint >= N");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!have_header) throw FormatError("graph: missing '# vertices N' header");
  return Graph(n, edges);
}

void write_graph(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  write_graph(out, g);
}

Graph read_graph(const std::string& path) {
  auto in = open_in(path);
  return read_graph(in);
}

QuasiPackedGraph assemble_graph(const SpherePacking& p, const Graph& g, double multiplicity) {
  if (p.bodies.size() != g.vertex_count())
    throw FormatError("graph has " + std::to_string(g.vertex_count()) + " vertices but the packing has " +
                      std::to_string(p.bodies.size()) + " bodies");
  QuasiPackedGraph q;
  q.space = p.space;
  q.graph = g;
  q.bodies = p.bodies;
  q.tau = p.tau;
  q.multiplicity = multiplicity;
  return q;
}

void write_weight_csv(std::ostream& os, std::span<const double> omega) {
  os << "vertex,omega\n";
  for (std::size_t v = 0; v < omega.size(); ++v) os << v << ',' << format_double(omega[v]) << '\n';
}

std::vector<double> read_weight_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "vertex,omega")
    throw FormatError("weight: header must be 'vertex,omega'");
  std::vector<double> w;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("weight: line " + std::to_string(lineno) + " lacks a comma");
    std::size_t v = 0;
    double x = 0.0;
    const char* b = line.data();
    const char* e = line.data() + line.size();
    if (std::from_chars(b, b + comma, v).ec != std::errc() ||
        std::from_chars(b + comma + 1, e, x).ec != std::errc())
      throw FormatError("weight: line " + std::to_string(lineno) + " is malformed");
    if (v != w.size()) throw FormatError("weight: vertices must be listed in order 0..N-1");
    w.push_back(x);
  }
  return w;
}

std::string weight_meta_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

json weight_meta(const ConformalWeight& w) {
  json j{{"d_star", w.d_star},
         {"pre_norm_mass", number(w.pre_norm_mass)},
         {"normalization_factor", number(w.normalization_factor)},
         {"systems", w.systems},
         {"mass", number(w.mass())}};
  j["k"] = w.k ? json(*w.k) : json(nullptr);
  if (w.k_max) j["k_max"] = *w.k_max;
  return j;
}

void write_weight(const std::string& csv_path, const ConformalWeight& w) {
  auto out = open_out(csv_path);
  write_weight_csv(out, w.omega);
}

std::vector<double> read_weight(const std::string& csv_path) {
  auto in = open_in(csv_path);
  return read_weight_csv(in);
}

json to_json(const ValidationReport& r) {
  json viol = json::array();
  for (auto [u, v] : r.tangency_violations) viol.push_back({u, v});
  return {{"edges_checked", r.edges_checked},
          {"tangency_violations", viol},
          {"point_multiplicity_max", r.point_multiplicity_max},
          {"sampled_quasi_multiplicity_max", r.sampled_quasi_multiplicity_max},
          {"multiplicity_probes", r.multiplicity_probes},
          {"quasi_probes", r.quasi_probes},
          {"sampled", r.sampled}};
}

json to_json(const GrowthReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"R", e.R},
                       {"max_ball", e.max_ball},
                       {"argmax", e.argmax},
                       {"const_poly", e.const_poly},
                       {"const_polylog", e.const_polylog}});
  return {{"d_star", r.d_star},
          {"entries", entries},
          {"roots_sampled", r.roots_sampled},
          {"sampled", r.sampled},
          {"max_const_poly", r.max_const_poly()},
          {"max_const_polylog", r.max_const_polylog()}};
}

json to_json(const SpectrumReport& s) {
  json ev = json::array();
  for (double x : s.eigenvalues) ev.push_back(x);
  return {{"n", s.n}, {"components", s.components}, {"eigenvalues", ev}};
}

json to_json(const WeylCheck& w) {
  json rows = json::array();
  for (const auto& r : w.per_k)
    rows.push_back({{"k", r.k}, {"lambda", r.lambda}, {"shape", r.shape}, {"ratio", r.ratio},
                    {"lower_ratio", r.lower_ratio}});
  return {{"d", w.d},
          {"C_emp", number(w.C_emp)},
          {"C_argmax", w.C_argmax},
          {"c_emp", number(w.c_emp)},
          {"c_argmin", w.c_argmin},
          {"counting_const_log_ratio", number(w.counting_const_log_ratio)},
          {"counting_const_inverse", number(w.counting_const_inverse)},
          {"per_k", rows}};
}

json to_json(const BumpResult& b) {
  json list = json::array();
  for (const auto& f : b.bumps)
    list.push_back({{"center", f.center},
                    {"support", f.values.size()},
                    {"rayleigh", f.rayleigh},
                    {"lipschitz_bound", number(f.lipschitz_bound)}});
  return {{"R", b.R},
          {"K", b.K},
          {"count", b.count()},
          {"skipped", b.skipped},
          {"max_rayleigh", b.max_rayleigh},
          {"functions", list}};
}

json to_json(const VelResult& v, const std::string& omega_file) {
  return {{"d", v.d},
          {"value", v.value},
          {"primal", v.primal},
          {"dual", number(v.dual)},
          {"gap", number(v.gap)},
          {"relative_gap", number(v.relative_gap)},
          {"iterations", v.iterations},
          {"converged", v.converged},
          {"omega_file", omega_file}};
}

json to_json(const Certificate& c) {
  json ov = json::array();
  for (auto [i, j] : c.overlaps) ov.push_back({i, j});
  return {{"distance", number(c.distance)},
          {"norm", c.norm},
          {"ratio", number(c.ratio)},
          {"target_size", c.target_size},
          {"annuli_disjoint", c.annuli_disjoint},
          {"overlaps", ov}};
}

json to_json(const DimensionFit& f) {
  return {{"dimension", f.dimension}, {"used", f.used}, {"excluded", f.excluded}};
}

void write_heat_csv(std::ostream& os, std::span<const HeatPoint> series) {
  os << "t,p,stderr\n";
  for (const auto& h : series) os << h.t << ',' << format_double(h.p) << ',' << format_double(h.stderr_) << '\n';
}

std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace confpack
