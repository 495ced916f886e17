#include "cfwalk/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "cfwalk/errors.hpp"

namespace cfwalk {

std::vector<std::pair<Label, VertexKey>> GraphOracle::neighbors(const VertexKey& x) const {
  std::vector<std::pair<Label, VertexKey>> out;
  out.reserve(alphabet_.size());
  for (Label a = 0; a < alphabet_.size(); ++a) out.emplace_back(a, neighbor(x, a));
  return out;
}

std::optional<std::size_t> BallView::find(const VertexKey& key) const {
  auto it = index.find(key);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> BallView::frontier() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (distance[i] == radius) out.push_back(i);
  return out;
}

BallView ball(const GraphOracle& graph, const VertexKey& center, int radius,
              std::size_t vertex_cap) {
  if (radius < 0) throw ConfigurationError("alphabet-graph", "ball radius must be >= 0");
  BallView view;
  view.center = center;
  view.radius = radius;
  const auto labels = graph.alphabet().size();

  view.index.emplace(center, 0);
  view.vertices.push_back(center);
  view.distance.push_back(0);
  // Adjacency recorded during BFS so that each neighbor is evaluated once.
  std::vector<std::int64_t> adjacency;
  for (std::size_t head = 0; head < view.vertices.size(); ++head) {
    const int d = view.distance[head];
    for (Label a = 0; a < labels; ++a) {
      VertexKey y = graph.neighbor(view.vertices[head], a);
      auto it = view.index.find(y);
      if (it != view.index.end()) {
        adjacency.push_back(static_cast<std::int64_t>(it->second));
        continue;
      }
      if (d == radius) {
        adjacency.push_back(-1);
        continue;
      }
      if (view.vertices.size() >= vertex_cap)
        throw TruncationError("ball of radius " + std::to_string(radius) + " exceeds the vertex cap of " +
                              std::to_string(vertex_cap) + "; rely on grammar DP for long series");
      const std::size_t id = view.vertices.size();
      view.index.emplace(y, id);
      view.vertices.push_back(std::move(y));
      view.distance.push_back(d + 1);
      adjacency.push_back(static_cast<std::int64_t>(id));
    }
  }
  for (std::size_t v = 0; v < view.vertices.size(); ++v) {
    for (Label a = 0; a < labels; ++a) {
      std::int64_t t = adjacency[v * labels + a];
      if (t < 0) {
        // Frontier edges to earlier-discovered vertices are resolved now.
        auto it = view.index.find(graph.neighbor(view.vertices[v], a));
        if (it == view.index.end()) continue;
        t = static_cast<std::int64_t>(it->second);
      }
      view.edges.push_back({v, a, static_cast<std::size_t>(t)});
    }
  }
  return view;
}

VertexKey follow(const GraphOracle& graph, const VertexKey& from, std::string_view word) {
  VertexKey v = from;
  for (Label a : graph.alphabet().parse_word(word)) v = graph.neighbor(v, a);
  return v;
}

std::optional<int> graph_distance(const GraphOracle& graph, const VertexKey& x, const VertexKey& y,
                                  int max_distance) {
  if (x == y) return 0;
  KeyMap<int> dist;
  dist.emplace(x, 0);
  std::deque<VertexKey> queue{x};
  while (!queue.empty()) {
    VertexKey v = std::move(queue.front());
    queue.pop_front();
    const int d = dist.at(v);
    if (d >= max_distance) continue;
    for (auto& [a, w] : graph.neighbors(v)) {
      if (dist.count(w)) continue;
      if (w == y) return d + 1;
      dist.emplace(w, d + 1);
      queue.push_back(std::move(w));
    }
  }
  return std::nullopt;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string ball_to_dot(const GraphOracle& graph, const BallView& view) {
  const auto& alphabet = graph.alphabet();
  std::ostringstream os;
  os << "graph ball {\n";
  for (std::size_t i = 0; i < view.vertices.size(); ++i) {
    os << "  v" << i << " [label=\"" << dot_escape(graph.format_key(view.vertices[i]))
       << "\\nd=" << view.distance[i] << "\"];\n";
  }
  for (const auto& e : view.edges) {
    const Label inv = alphabet.inverse(e.label);
    const bool keep = e.from < e.to || (e.from == e.to && e.label <= inv);
    if (!keep) continue;
    os << "  v" << e.from << " -- v" << e.to << " [label=\"" << dot_escape(alphabet.name(e.label))
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<std::int64_t> ball_signature(const GraphOracle& graph, const VertexKey& center,
                                         int radius) {
  BallView view = ball(graph, center, radius);
  const auto labels = graph.alphabet().size();
  std::vector<std::int64_t> table(view.size() * labels, -1);
  for (const auto& e : view.edges) table[e.from * labels + e.label] = static_cast<std::int64_t>(e.to);
  std::vector<std::int64_t> sig;
  sig.reserve(table.size() + view.size() + 1);
  sig.push_back(static_cast<std::int64_t>(labels));
  for (std::size_t v = 0; v < view.size(); ++v) {
    sig.push_back(view.distance[v]);
    for (Label a = 0; a < labels; ++a) sig.push_back(table[v * labels + a]);
  }
  return sig;
}

std::vector<std::string> check_oracle_invariants(const GraphOracle& graph, int radius) {
  std::vector<std::string> problems;
  const auto& alphabet = graph.alphabet();
  BallView view = ball(graph, graph.root(), radius);
  for (std::size_t v = 0; v < view.size(); ++v) {
    const auto nbrs = graph.neighbors(view.vertices[v]);
    if (nbrs.size() != alphabet.size())
      problems.push_back("vertex " + graph.format_key(view.vertices[v]) + " has " +
                         std::to_string(nbrs.size()) + " neighbours");
    for (const auto& [a, y] : nbrs) {
      if (graph.neighbor(y, alphabet.inverse(a)) != view.vertices[v])
        problems.push_back("symmetry fails at " + graph.format_key(view.vertices[v]) + " label " +
                           alphabet.name(a));
    }
  }
  for (const auto& e : view.edges) {
    if (std::abs(view.distance[e.from] - view.distance[e.to]) > 1)
      problems.push_back("distance jump along an edge at " + graph.format_key(view.vertices[e.from]));
  }
  // Strong connectivity inside the ball follows from symmetry: reversing
  // the BFS tree path of each vertex leads back to the root.
  return problems;
}

}  // namespace cfwalk
