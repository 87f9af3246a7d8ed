// confpack command-line driver.
//
// Every command writes a JSON report carrying the effective configuration,
// its hash and a pass flag. Exit codes: 0 success, 2 hard assertion or
// validation failure, 3 degenerate instance, 64 usage or input error.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "confpack/io.hpp"

namespace fs = std::filesystem;
using namespace confpack;

namespace {

constexpr int kExitAssertion = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitUsage = 64;

std::string output_root() {
  const char* root = std::getenv("CONFPACK_OUT");
  return root ? std::string(root) : std::string();
}

std::string out_path(const std::string& p) {
  fs::path path(p);
  const std::string root = output_root();
  if (!root.empty() && path.is_relative()) path = fs::path(root) / path;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return path.string();
}

std::string in_path(const std::string& p) {
  fs::path path(p);
  const std::string root = output_root();
  if (!root.empty() && path.is_relative() && !fs::exists(path) && fs::exists(fs::path(root) / path))
    return (fs::path(root) / path).string();
  return p;
}

json effective_config(const std::string& name, const CLI::App* sub) {
  json cfg = json::object();
  cfg["command"] = name;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (key == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() > 1)
        cfg[key] = res;
      else
        cfg[key] = res.empty() ? std::string("true") : res.back();
    } else if (!opt->get_default_str().empty()) {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

struct Context {
  std::string name;
  json config;
  std::string hash;
};

void emit(const Context& ctx, const std::string& path, json body, bool pass) {
  body["command"] = ctx.name;
  body["config"] = ctx.config;
  body["config_hash"] = ctx.hash;
  body["pass"] = pass;
  write_json(out_path(path), body);
}

MetricKind parse_metric(const std::string& s) {
  try {
    return metric_from_string(s);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("--metric must be linf or l2, got '" + s + "'");
  }
}

std::optional<json> try_meta(const std::string& csv) {
  const std::string p = weight_meta_path(in_path(csv));
  if (!fs::exists(p)) return std::nullopt;
  return read_json(p);
}

/// Appends option values from a JSON config file to argv, unless already
/// given on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& argv, CLI::App& app) {
  std::string config_file;
  std::string command;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) config_file = argv[i + 1];
    if (argv[i].rfind("--config=", 0) == 0) config_file = argv[i].substr(9);
  }
  if (config_file.empty()) return argv;
  const json cfg = read_json(in_path(config_file));
  if (!cfg.is_object()) throw InvalidArgument("config: top level must be an object");
  for (const auto* sub : app.get_subcommands({})) {
    for (const auto& a : argv)
      if (a == sub->get_name()) command = a;
  }
  std::vector<std::string> out = argv;
  if (command.empty()) {
    if (!cfg.contains("command") || !cfg["command"].is_string())
      throw InvalidArgument("config: field 'command' missing and no command given");
    command = cfg["command"].get<std::string>();
    out.push_back(command);
  }
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(command);
  } catch (const CLI::OptionNotFound&) {
    throw InvalidArgument("config: unknown command '" + command + "'");
  }
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InvalidArgument("config: unknown field '" + key + "' for command " + command);
    bool given = false;
    for (const auto& a : argv)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) given = true;
    if (given) continue;
    auto scalar = [](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
      if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
      if (v.is_number()) return format_double(v.get<double>());
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      throw InvalidArgument("config: unsupported value type");
    };
    if (value.is_boolean() && opt->get_type_size() == 0) {
      if (value.get<bool>()) out.push_back("--" + key);
      continue;
    }
    out.push_back("--" + key);
    if (value.is_array())
      for (const auto& v : value) out.push_back(scalar(v));
    else
      out.push_back(scalar(value));
  }
  return out;
}

Graph load_graph(const std::string& p) { return read_graph(in_path(p)); }

std::vector<double> load_weight(const std::string& csv, std::size_t n) {
  if (csv.empty()) return std::vector<double>(n, 1.0);
  auto w = read_weight(in_path(csv));
  if (w.size() != n)
    throw InvalidArgument("--weight has " + std::to_string(w.size()) + " rows but the graph has " +
                          std::to_string(n) + " vertices");
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confpack: discrete uniformizing weights on quasi-packed graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config", config_file, "JSON file whose fields mirror the command's options");

  // gen
  struct {
    std::string kind, metric, out, graph_out;
    int d = 2, m = 0, levels = 0;
    std::size_t count = 0, leaves = 0;
    double rmin = 0.1, rmax = 1.0, tau = 1.0, leaf_radius = 0.0;
    std::optional<std::uint64_t> seed;
  } gen;
  auto* c_gen = app.add_subcommand("gen", "Generate a packing");
  c_gen->add_option("--kind", gen.kind, "grid | rsa | accumulation | star")
      ->required()
      ->check(CLI::IsMember({"grid", "rsa", "accumulation", "star"}));
  c_gen->add_option("--d", gen.d, "Dimension")->capture_default_str();
  c_gen->add_option("--m", gen.m, "Grid side length");
  c_gen->add_option("--count", gen.count, "RSA body count");
  c_gen->add_option("--rmin", gen.rmin, "RSA minimum radius")->capture_default_str();
  c_gen->add_option("--rmax", gen.rmax, "RSA maximum radius")->capture_default_str();
  c_gen->add_option("--levels", gen.levels, "Accumulation ring count");
  c_gen->add_option("--leaves", gen.leaves, "Star leaf count");
  c_gen->add_option("--leaf-radius", gen.leaf_radius, "Star leaf radius (default automatic)");
  c_gen->add_option("--seed", gen.seed, "RNG seed (required for rsa)");
  c_gen->add_option("--tau", gen.tau, "Tangency parameter for RSA extraction")->capture_default_str();
  c_gen->add_option("--metric", gen.metric, "linf | l2 (default linf for grid and rsa, l2 otherwise)");
  c_gen->add_option("--out", gen.out, "Packing JSON path")->required();
  c_gen->add_option("--graph-out", gen.graph_out, "Contact graph edge list path");

  // graph
  struct {
    std::string packing, rule = "quasi", out, packing_out;
    std::optional<double> tau;
  } gr;
  auto* c_graph = app.add_subcommand("graph", "Extract the quasi-tangency graph of a packing");
  c_graph->add_option("--packing", gr.packing, "Packing JSON")->required();
  c_graph->add_option("--tau", gr.tau, "Tangency parameter (default: the packing's)");
  c_graph->add_option("--rule", gr.rule, "quasi | tangent")
      ->capture_default_str()
      ->check(CLI::IsMember({"quasi", "tangent"}));
  c_graph->add_option("--out", gr.out, "Edge list path")->required();
  c_graph->add_option("--packing-out", gr.packing_out,
                      "Packing of the kept component (written when vertices are dropped)");

  // validate
  struct {
    std::string packing, graph, out;
    std::optional<double> M;
  } val;
  auto* c_val = app.add_subcommand("validate", "Validate quasi-tangency and multiplicity");
  c_val->add_option("--packing", val.packing, "Packing JSON")->required();
  c_val->add_option("--graph", val.graph, "Edge list")->required();
  c_val->add_option("--M", val.M, "Declared multiplicity; exceeding it fails validation");
  c_val->add_option("--out", val.out, "Report path")->required();

  // weight
  struct {
    std::string packing, graph, out;
    std::optional<int> k, k_max;
    double ceiling = kInf;
  } wt;
  auto* c_wt = app.add_subcommand("weight", "Build the conformal weight");
  c_wt->add_option("--packing", wt.packing, "Packing JSON")->required();
  c_wt->add_option("--graph", wt.graph, "Edge list")->required();
  auto* o_k = c_wt->add_option("--k", wt.k, "Scale parameter (>= 3)");
  auto* o_kmax = c_wt->add_option("--k-max", wt.k_max, "Combined weight over k = 3..k_max");
  o_k->excludes(o_kmax);
  c_wt->add_option("--mass-ceiling", wt.ceiling, "Hard ceiling on the pre-normalization mass");
  c_wt->add_option("--out", wt.out, "Weight CSV path")->required();

  // growth
  struct {
    std::string graph, weight, out;
    std::optional<int> d_star;
    std::optional<std::uint64_t> seed;
    std::vector<double> radii;
  } gw;
  auto* c_gw = app.add_subcommand("growth", "Ball growth profile of a weight");
  c_gw->add_option("--graph", gw.graph, "Edge list")->required();
  c_gw->add_option("--weight", gw.weight, "Weight CSV (default constant 1)");
  c_gw->add_option("--d-star", gw.d_star, "Growth exponent (default from the weight sidecar, else 2)");
  c_gw->add_option("--seed", gw.seed, "Root sampling seed (required above 4096 vertices)");
  c_gw->add_option("--radii", gw.radii, "Explicit radii (default 2^(j/2) up to the diameter)");
  c_gw->add_option("--out", gw.out, "Report path")->required();

  // spectrum / weyl-check
  struct {
    std::string graph, out;
    std::size_t cap = kDenseCap;
    double d = 2.0;
  } sp;
  auto* c_sp = app.add_subcommand("spectrum", "Normalized Laplacian spectrum");
  c_sp->add_option("--graph", sp.graph, "Edge list")->required();
  c_sp->add_option("--cap", sp.cap, "Dense solve cap")->capture_default_str();
  c_sp->add_option("--out", sp.out, "Report path")->required();
  auto* c_weyl = app.add_subcommand("weyl-check", "Empirical Weyl-bound constants");
  c_weyl->add_option("--graph", sp.graph, "Edge list")->required();
  c_weyl->add_option("--d", sp.d, "Dimension")->capture_default_str();
  c_weyl->add_option("--cap", sp.cap, "Dense solve cap")->capture_default_str();
  c_weyl->add_option("--out", sp.out, "Report path")->required();

  // bumps
  struct {
    std::string graph, weight, out;
    double R = 0.0;
    std::optional<std::size_t> K;
    std::size_t cap = kDenseCap;
  } bp;
  auto* c_bp = app.add_subcommand("bumps", "Ball-carving test functions");
  c_bp->add_option("--graph", bp.graph, "Edge list")->required();
  c_bp->add_option("--weight", bp.weight, "Weight CSV (default constant 1)");
  c_bp->add_option("--R", bp.R, "Carving radius")->required();
  c_bp->add_option("--K", bp.K, "Ball-size bound (default: measured max |B(x,R)|)");
  c_bp->add_option("--cap", bp.cap, "Dense solve cap for the min-max check")->capture_default_str();
  c_bp->add_option("--out", bp.out, "Report path")->required();

  // heat
  struct {
    std::string graph, method = "auto", out;
    Vertex vertex = 0;
    std::size_t T = 100, walks = 1u << 16, fit_lo = 0, fit_hi = 0;
    std::optional<std::uint64_t> seed;
  } ht;
  auto* c_ht = app.add_subcommand("heat", "Return probabilities p_2t(x,x)");
  c_ht->add_option("--graph", ht.graph, "Edge list")->required();
  c_ht->add_option("--vertex", ht.vertex, "Start vertex")->capture_default_str();
  c_ht->add_option("--T", ht.T, "Largest t")->capture_default_str();
  c_ht->add_option("--method", ht.method, "auto | propagation | spectral | mc")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "propagation", "spectral", "mc"}));
  c_ht->add_option("--walks", ht.walks, "Monte Carlo walk count")->capture_default_str();
  c_ht->add_option("--seed", ht.seed, "Monte Carlo seed (required for mc)");
  c_ht->add_option("--fit-lo", ht.fit_lo, "Fit window start");
  c_ht->add_option("--fit-hi", ht.fit_hi, "Fit window end");
  c_ht->add_option("--out", ht.out, "Series CSV path")->required();

  // vel
  struct {
    std::string graph, out, omega_out;
    double d = 2.0, tol = 0.02;
    std::vector<Vertex> sources, targets;
    std::optional<Vertex> boundary_of;
    std::size_t iterations = 2000;
  } vl;
  auto* c_vl = app.add_subcommand("vel", "Vertex extremal length between vertex sets");
  c_vl->add_option("--graph", vl.graph, "Edge list")->required();
  c_vl->add_option("--d", vl.d, "Exponent")->capture_default_str();
  auto* o_src = c_vl->add_option("--source", vl.sources, "Source vertices");
  auto* o_tgt = c_vl->add_option("--target", vl.targets, "Target vertices");
  auto* o_bnd = c_vl->add_option("--boundary-of", vl.boundary_of,
                                 "Use this root as source and its farthest hop shell as target");
  o_bnd->excludes(o_src)->excludes(o_tgt);
  c_vl->add_option("--iterations", vl.iterations, "Supergradient iterations")->capture_default_str();
  c_vl->add_option("--tol", vl.tol, "Relative gap regarded as converged")->capture_default_str();
  c_vl->add_option("--out", vl.out, "Report path")->required();
  c_vl->add_option("--omega-out", vl.omega_out, "Optimal weight CSV (default <out>.omega.csv)");

  // certify
  struct {
    std::string graph, out;
    Vertex z = 0;
    double c_prime = 2.0, d = 2.0;
    std::vector<double> radii;
    std::vector<std::string> weights;
    bool regularize = false;
  } ct;
  auto* c_ct = app.add_subcommand("certify", "Finite parabolicity certificate");
  c_ct->add_option("--graph", ct.graph, "Edge list")->required();
  c_ct->add_option("--z", ct.z, "Root vertex")->capture_default_str();
  c_ct->add_option("--cprime", ct.c_prime, "Edge-Lipschitz constant C'")->capture_default_str();
  c_ct->add_option("--d", ct.d, "Exponent")->capture_default_str();
  c_ct->add_option("--radii", ct.radii, "Increasing scale radii r_1 < ... < r_n")->required();
  c_ct->add_option("--weights", ct.weights, "One weight CSV per radius (default constant 1)");
  c_ct->add_flag("--regularize", ct.regularize, "Apply the regularity relaxation to each weight");
  c_ct->add_option("--out", ct.out, "Report path")->required();

  // report
  struct {
    std::vector<std::string> inputs;
    std::string dir, out;
  } rp;
  auto* c_rp = app.add_subcommand("report", "Aggregate reports into a manifest");
  c_rp->add_option("--inputs", rp.inputs, "Report JSON files");
  c_rp->add_option("--dir", rp.dir, "Directory scanned for report JSON files");
  c_rp->add_option("--out", rp.out, "Manifest path")->required();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = merge_config(args, app);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.name = sub->get_name();
  ctx.config = effective_config(ctx.name, sub);
  ctx.hash = config_hash(ctx.config);

  try {
    if (sub == c_gen) {
      const bool round = gen.kind == "star" || gen.kind == "accumulation";
      const MetricKind metric = parse_metric(gen.metric.empty() ? (round ? "l2" : "linf") : gen.metric);
      PackingInstance inst;
      if (gen.kind == "grid") {
        require(gen.m >= 2, "--m must be >= 2 for the grid generator");
        inst = gen_grid(gen.d, gen.m, metric);
      } else if (gen.kind == "rsa") {
        require(gen.seed.has_value(), "--seed is required for the rsa generator");
        require(gen.count >= 1, "--count must be >= 1 for the rsa generator");
        RsaOptions o;
        o.dimension = gen.d;
        o.count = gen.count;
        o.radius_min = gen.rmin;
        o.radius_max = gen.rmax;
        o.seed = *gen.seed;
        o.tau = gen.tau;
        o.metric = metric;
        inst = gen_rsa(o);
      } else if (gen.kind == "accumulation") {
        require(gen.levels >= 1, "--levels must be >= 1 for the accumulation generator");
        inst = gen_accumulation(gen.d, gen.levels, metric);
      } else {
        require(gen.leaves >= 1, "--leaves must be >= 1 for the star generator");
        std::optional<double> lr;
        if (gen.leaf_radius > 0) lr = gen.leaf_radius;
        inst = gen_star(gen.d, gen.leaves, lr, metric);
      }
      SpherePacking kept_p = inst.packing;
      kept_p.bodies = inst.graph.bodies;
      write_packing(out_path(gen.out), kept_p);
      const std::string gpath = gen.graph_out.empty() ? gen.out + ".graph.txt" : gen.graph_out;
      write_graph(out_path(gpath), inst.graph.graph);
      emit(ctx, gen.out + ".report.json",
           {{"vertices", inst.graph.vertex_count()},
            {"bodies", inst.packing.bodies.size()},
            {"dropped", inst.packing.bodies.size() - inst.graph.vertex_count()},
            {"edges", inst.graph.graph.edge_count()},
            {"tau", inst.graph.tau},
            {"multiplicity", inst.graph.multiplicity},
            {"partial", inst.partial},
            {"warning", inst.warning},
            {"graph_file", gpath}},
           !inst.partial);
      if (inst.partial) std::cerr << "warning: " << inst.warning << '\n';
    } else if (sub == c_graph) {
      SpherePacking p = read_packing(in_path(gr.packing));
      const double tau = gr.tau.value_or(p.tau);
      require(tau >= 1.0, "--tau must be >= 1");
      p.tau = tau;
      const auto rule = gr.rule == "quasi" ? ContactRule::QuasiTangent : ContactRule::Tangent;
      const auto full = extract_graph(p, tau, rule);
      const auto kept = largest_component(full);
      write_graph(out_path(gr.out), kept.graph);
      std::string packing_file = gr.packing;
      if (kept.vertex_count() != full.vertex_count()) {
        SpherePacking sub_p = p;
        sub_p.bodies = kept.bodies;
        packing_file = gr.packing_out.empty() ? gr.out + ".packing.json" : gr.packing_out;
        write_packing(out_path(packing_file), sub_p);
      }
      emit(ctx, gr.out + ".report.json",
           {{"vertices", kept.vertex_count()},
            {"edges", kept.graph.edge_count()},
            {"dropped", full.vertex_count() - kept.vertex_count()},
            {"tau", tau},
            {"packing_file", packing_file}},
           true);
    } else if (sub == c_val) {
      const auto p = read_packing(in_path(val.packing));
      const auto q = assemble_graph(p, load_graph(val.graph), val.M.value_or(1.0));
      ValidationReport rep;
      bool failed = false;
      std::string msg;
      try {
        rep = validate(q);
      } catch (const ValidationFailure& e) {
        rep = e.report();
        failed = true;
        msg = e.what();
      }
      const bool mult_ok = !val.M || static_cast<double>(rep.sampled_quasi_multiplicity_max) <= *val.M;
      json body = to_json(rep);
      body["declared_M"] = val.M ? json(*val.M) : json(nullptr);
      emit(ctx, val.out, body, !failed && mult_ok);
      if (failed) {
        std::cerr << "validation failure: " << msg << '\n';
        return kExitAssertion;
      }
      if (!mult_ok) {
        std::cerr << "validation failure: sampled multiplicity " << rep.sampled_quasi_multiplicity_max
                  << " exceeds declared M=" << *val.M << '\n';
        return kExitAssertion;
      }
    } else if (sub == c_wt) {
      require(wt.k || wt.k_max, "one of --k or --k-max is required");
      const auto p = read_packing(in_path(wt.packing));
      const auto q = assemble_graph(p, load_graph(wt.graph));
      require(q.graph.connected(), "--graph must be connected");
      const DyadicFamily fam(p.space.dimension);
      const WeightBuilder builder(q, fam);
      WeightOptions o;
      o.mass_ceiling = wt.ceiling;
      const ConformalWeight w = wt.k ? builder.build(*wt.k, o) : builder.combined(*wt.k_max, o);
      write_weight(out_path(wt.out), w);
      json meta = weight_meta(w);
      meta["config_hash"] = ctx.hash;
      write_json(out_path(weight_meta_path(wt.out)), meta);
      const auto& diag = builder.diagnostics();
      double trunc_const = 0.0;
      for (int i = 0; i < fam.system_count(); ++i)
        trunc_const = std::max(trunc_const, builder.table(i, wt.k.value_or(*wt.k_max)).observed_truncated_constant());
      const bool normalized = std::abs(w.mass() - 1.0) <= 1e-12;
      emit(ctx, wt.out + ".report.json",
           {{"weight_meta", weight_meta(w)},
            {"vertices", q.vertex_count()},
            {"defined_cubes", diag.defined_cubes},
            {"max_exceptional", diag.max_exceptional},
            {"level_constant", diag.level_constant},
            {"truncated_level_constant", trunc_const},
            {"level_window", {diag.window.lowest, diag.window.highest}}},
           normalized);
    } else if (sub == c_gw) {
      const Graph g = load_graph(gw.graph);
      const auto omega = load_weight(gw.weight, g.vertex_count());
      const auto meta = gw.weight.empty() ? std::nullopt : try_meta(gw.weight);
      int d_star = gw.d_star.value_or(2);
      if (!gw.d_star && meta && meta->contains("d_star")) d_star = (*meta)["d_star"].get<int>();
      const WeightedGraphMetric m(g, omega);
      require(g.vertex_count() <= 4096 || gw.seed.has_value(),
              "--seed is required for root sampling above 4096 vertices");
      const auto roots = sample_roots(g, gw.seed.value_or(0));
      std::vector<double> radii = gw.radii;
      if (radii.empty()) radii = radii_grid(max_eccentricity(m, roots));
      const auto rep = growth_profile(m, radii, roots, d_star);
      bool monotone = true;
      for (std::size_t j = 1; j < rep.entries.size(); ++j)
        if (rep.entries[j].R >= rep.entries[j - 1].R && rep.entries[j].max_ball < rep.entries[j - 1].max_ball)
          monotone = false;
      json body = to_json(rep);
      body["weight_meta"] = meta ? *meta : json(nullptr);
      emit(ctx, gw.out, body, monotone);
    } else if (sub == c_sp || sub == c_weyl) {
      const Graph g = load_graph(sp.graph);
      const auto s = spectrum(g, sp.cap);
      CompensatedSum tr;
      for (double x : s.eigenvalues) tr.add(x);
      const bool trace_ok = std::abs(tr.value() - static_cast<double>(s.n)) <= 1e-8 * static_cast<double>(s.n);
      const bool range_ok = std::abs(s.eigenvalues.front()) <= 1e-9 && s.eigenvalues.back() <= 2.0 + 1e-9;
      json body{{"n", s.n}, {"components", s.components}, {"trace", tr.value()},
                {"counting_at_2", s.counting(2.0)}};
      body["eigenvalues"] = to_json(s)["eigenvalues"];
      bool pass = trace_ok && range_ok;
      if (sub == c_weyl) {
        const auto w = weyl_check(s, g, sp.d);
        body["weyl"] = to_json(w);
        pass = pass && std::isfinite(w.C_emp);
      }
      emit(ctx, sp.out, body, pass);
    } else if (sub == c_bp) {
      const Graph g = load_graph(bp.graph);
      const auto omega = load_weight(bp.weight, g.vertex_count());
      const WeightedGraphMetric m(g, omega);
      std::vector<Vertex> all(g.vertex_count());
      for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
      const double Rs[] = {bp.R};
      const auto growth = growth_profile(m, Rs, all, 2);
      const std::size_t measured = growth.entries.front().max_ball;
      const std::size_t K = bp.K.value_or(measured);
      check_invariant(measured <= K, "--K=" + std::to_string(K) + " is below the measured max ball size " +
                                          std::to_string(measured));
      const auto res = ball_carving_bumps(m, bp.R, K);
      json body = to_json(res);
      body["measured_max_ball"] = measured;
      bool pass = res.count_bound_met(g.vertex_count());
      if (g.vertex_count() <= bp.cap && res.count() >= 1) {
        const auto s = spectrum(g, bp.cap);
        const double lam = s.eigenvalues[res.count() - 1];
        body["lambda_count_minus_1"] = lam;
        body["minmax_holds"] = lam <= res.max_rayleigh;
        pass = pass && lam <= res.max_rayleigh;
      }
      emit(ctx, bp.out, body, pass);
    } else if (sub == c_ht) {
      const Graph g = load_graph(ht.graph);
      HeatOptions o;
      o.method = ht.method == "auto"          ? HeatMethod::Auto
                 : ht.method == "propagation" ? HeatMethod::Propagation
                 : ht.method == "spectral"    ? HeatMethod::Spectral
                                              : HeatMethod::MonteCarlo;
      o.walks = ht.walks;
      o.seed = ht.seed;
      if (o.method == HeatMethod::Auto && g.vertex_count() > o.cap)
        require(ht.seed.has_value(), "--seed is required: this graph exceeds the cap and uses Monte Carlo");
      if (o.method == HeatMethod::MonteCarlo) require(ht.seed.has_value(), "--seed is required for --method mc");
      const auto series = heat_kernel(g, ht.vertex, ht.T, o);
      std::ostringstream csv;
      write_heat_csv(csv, series);
      write_text(out_path(ht.out), csv.str());
      json body{{"points", series.size()}, {"series_file", ht.out}};
      json flagged = json::array();
      for (const auto& h : series)
        if (h.zero_hits) flagged.push_back(h.t);
      body["zero_hit_times"] = flagged;
      if (ht.fit_hi > ht.fit_lo && ht.fit_lo >= 1) body["fit"] = to_json(spectral_dim_fit(series, ht.fit_lo, ht.fit_hi));
      emit(ctx, ht.out + ".report.json", body, true);
    } else if (sub == c_vl) {
      const Graph g = load_graph(vl.graph);
      PathFamilySpec spec;
      if (vl.boundary_of) {
        spec = boundary_spec(g, *vl.boundary_of);
      } else {
        require(!vl.sources.empty(), "--source is required (or --boundary-of)");
        require(!vl.targets.empty(), "--target is required (or --boundary-of)");
        spec.sources = vl.sources;
        spec.targets = vl.targets;
      }
      VelOptions o;
      o.iterations = vl.iterations;
      o.tol = vl.tol;
      const auto r = vel_solve(g, spec, vl.d, o);
      const std::string omega_file = vl.omega_out.empty() ? vl.out + ".omega.csv" : vl.omega_out;
      std::ostringstream csv;
      write_weight_csv(csv, r.omega);
      write_text(out_path(omega_file), csv.str());
      emit(ctx, vl.out, to_json(r, omega_file), r.converged && r.primal <= r.dual);
    } else if (sub == c_ct) {
      const Graph g = load_graph(ct.graph);
      require(ct.weights.empty() || ct.weights.size() == ct.radii.size(),
              "--weights must list one file per radius");
      std::vector<ScaleWeight> scales;
      for (std::size_t j = 0; j < ct.radii.size(); ++j) {
        ScaleWeight s;
        s.r = ct.radii[j];
        s.omega = load_weight(ct.weights.empty() ? std::string() : ct.weights[j], g.vertex_count());
        if (ct.regularize) s.omega = enforce_regularity(g, s.omega, ct.c_prime);
        scales.push_back(std::move(s));
      }
      const auto c = parabolicity_certificate(g, scales, ct.z, ct.c_prime, ct.d);
      json body = to_json(c);
      body["lower_bound_if_disjoint"] = static_cast<double>(scales.size()) / (2.0 * ct.c_prime);
      emit(ctx, ct.out, body, c.annuli_disjoint);
    } else if (sub == c_rp) {
      std::vector<std::string> files = rp.inputs;
      if (!rp.dir.empty()) {
        std::vector<std::string> found;
        for (const auto& e : fs::recursive_directory_iterator(in_path(rp.dir)))
          if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path().string());
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      }
      require(!files.empty(), "--inputs or --dir is required");
      json list = json::array();
      bool all = true;
      for (const auto& f : files) {
        const json j = read_json(in_path(f));
        if (!j.is_object() || !j.contains("config_hash") || !j.contains("pass")) continue;
        const bool pass = j["pass"].get<bool>();
        all = all && pass;
        list.push_back({{"file", f},
                        {"command", j.value("command", std::string())},
                        {"config_hash", j["config_hash"]},
                        {"pass", pass}});
      }
      emit(ctx, rp.out, {{"reports", list}, {"all_pass", all}, {"count", list.size()}}, all);
    }
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failure: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const DegenerateInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
