#pragma once

#include <span>
#include <utility>
#include <vector>

#include "confpack/common.hpp"

namespace confpack {

using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph in compressed adjacency form. Immutable once built.
class Graph {
 public:
  Graph() = default;
  /// Self-loops are dropped and parallel edges merged.
  Graph(std::size_t vertex_count, std::span<const Edge> edges);

  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  /// Each edge once, with u < v, sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Component label per vertex and the number of components.
  std::pair<std::vector<std::size_t>, std::size_t> components() const;
  bool connected() const { return vertex_count() > 0 && components().second == 1; }

  /// Hop distances from `src`; unreachable vertices get SIZE_MAX.
  std::vector<std::size_t> hop_distances(Vertex src) const;

  /// Induced subgraph on `keep` (sorted). Vertex i of the result is keep[i].
  Graph induced(std::span<const Vertex> keep) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::vector<Edge> edges_;
};

}  // namespace confpack
