#pragma once

// l_d vertex extremal length between vertex sets, flow duals, and finite
// parabolicity certificates.
//
// A path v_0 ... v_m has length w(v_0)/2 + w(v_1) + ... + w(v_{m-1}) + w(v_m)/2
// under a vertex weight w, i.e. the sum of its edge lengths (w(u) + w(v))/2.
// VEL_d = sup_w min_path len_w / ||w||_d.

#include <optional>
#include <vector>

#include "confpack/graph.hpp"

namespace confpack {

struct PathFamilySpec {
  std::vector<Vertex> sources;  // A
  std::vector<Vertex> targets;  // B
};

/// Throws InvalidArgument unless A, B are nonempty, disjoint, in range and
/// joined by at least one path.
void check_spec(const Graph& g, const PathFamilySpec& spec);

/// Spec with A = {v0} and B = vertices at maximal hop distance from v0.
PathFamilySpec boundary_spec(const Graph& g, Vertex v0);

double lp_norm(std::span<const double> w, double p);

struct ShortestPath {
  double length = kInf;
  std::vector<Vertex> vertices;  // source first
};

/// Shortest A->B path under the endpoint-half convention.
ShortestPath shortest_path(const Graph& g, const PathFamilySpec& spec, std::span<const double> w);

/// Per-vertex coefficients of a path: 1/2 at the endpoints, 1 inside.
std::vector<double> path_load(std::size_t n, std::span<const Vertex> path);

struct FlowDual {
  double bound = kInf;        // ||load||_{d/(d-1)}, or ||load||_inf for d = 1
  std::vector<double> load;   // vertex load of a unit A->B flow
  std::vector<double> weight; // gradient weight, the matching primal candidate
  std::size_t iterations = 0;
};

/// Frank-Wolfe over convex combinations of A->B paths minimizing the
/// conjugate norm of the vertex load. Every iterate is a unit flow, so the
/// value is a certified upper bound on VEL_d.
FlowDual flow_dual_bound(const Graph& g, const PathFamilySpec& spec, double d,
                         std::size_t iterations = 400);

struct VelOptions {
  std::size_t iterations = 2000;
  double tol = 0.02;                   // relative gap regarded as converged
  std::optional<double> eta0;          // default n^(-1/d)
  std::optional<std::vector<double>> initial;  // default constant weight
  std::size_t dual_iterations = 400;
};

struct VelResult {
  double d = 2.0;
  double value = 0.0;   // best primal found
  std::vector<double> omega;  // l_d-normalized weight achieving `value`
  double primal = 0.0;
  double dual = kInf;
  double gap = kInf;         // dual - primal
  double relative_gap = kInf;
  std::size_t iterations = 0;
  bool converged = false;
};

VelResult vel_solve(const Graph& g, const PathFamilySpec& spec, double d,
                    const VelOptions& opt = {});

/// Radii r_1 = 1, r_j = (16 C' / eps) C'^(2 r_{j-1}); overflow yields +inf.
std::vector<double> certificate_radii(double c_prime, double eps, std::size_t count);

struct ScaleWeight {
  double r = 1.0;
  std::vector<double> omega;
};

struct Certificate {
  std::vector<double> omega;  // w_(z)
  double distance = 0.0;      // dist_{w_(z)}(z, V \ B_G(z, 2 r_n))
  double norm = 0.0;          // ||w_(z)||_d
  double ratio = 0.0;
  std::size_t target_size = 0;
  bool annuli_disjoint = true;
  std::vector<std::pair<std::size_t, std::size_t>> overlaps;  // annulus pairs (1-based)
};

Certificate parabolicity_certificate(const Graph& g, std::span<const ScaleWeight> weights,
                                     Vertex z, double c_prime, double d);

/// w'(x) = max(1/2, max_y C'^(-hop(x,y)) w(y)).
std::vector<double> enforce_regularity(const Graph& g, std::span<const double> w, double c_prime);

}  // namespace confpack
