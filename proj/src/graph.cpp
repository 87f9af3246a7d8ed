#include "confpack/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace confpack {

Graph::Graph(std::size_t vertex_count, std::span<const Edge> edges) {
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    require(u < vertex_count && v < vertex_count, "edge endpoint out of range");
    if (u == v) continue;
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  std::vector<std::size_t> deg(vertex_count, 0);
  for (auto [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t i = 0; i < vertex_count; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : edges_) {
    adjacency_[fill[u]++] = v;
    adjacency_[fill[v]++] = u;
  }
  for (std::size_t i = 0; i < vertex_count; ++i)
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::pair<std::vector<std::size_t>, std::size_t> Graph::components() const {
  const std::size_t n = vertex_count();
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kUnset);
  std::size_t count = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (label[s] != kUnset) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : neighbors(u)) {
        if (label[w] == kUnset) {
          label[w] = count;
          stack.push_back(w);
        }
      }
    }
    ++count;
  }
  return {std::move(label), count};
}

std::vector<std::size_t> Graph::hop_distances(Vertex src) const {
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(vertex_count(), kUnset);
  std::deque<Vertex> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : neighbors(u)) {
      if (dist[w] == kUnset) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

Graph Graph::induced(std::span<const Vertex> keep) const {
  constexpr auto kUnset = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> index(vertex_count(), kUnset);
  for (std::size_t i = 0; i < keep.size(); ++i) index[keep[i]] = static_cast<Vertex>(i);
  std::vector<Edge> sub;
  for (auto [u, v] : edges_)
    if (index[u] != kUnset && index[v] != kUnset) sub.emplace_back(index[u], index[v]);
  return Graph(keep.size(), sub);
}

}  // namespace confpack
