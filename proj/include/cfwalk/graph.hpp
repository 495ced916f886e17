#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfwalk/alphabet.hpp"

namespace cfwalk {

/// Canonical vertex identifier of an infinite graph oracle. The meaning of
/// the parts is private to the oracle that issued the key; equality of keys
/// is equality of vertices.
struct VertexKey {
  std::vector<std::int32_t> parts;

  bool operator==(const VertexKey&) const = default;
  auto operator<=>(const VertexKey&) const = default;
};

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto p : key.parts) {
      h ^= static_cast<std::uint32_t>(p);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ key.parts.size());
  }
};

template <typename T>
using KeyMap = std::unordered_map<VertexKey, T, VertexKeyHash>;

/// Lazily evaluated, fully deterministic, symmetric labelled graph.
///
/// Implementations are immutable after construction; neighbor lookups are
/// pure and may be called from several threads.
class GraphOracle {
 public:
  explicit GraphOracle(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  virtual ~GraphOracle() = default;

  const Alphabet& alphabet() const noexcept { return alphabet_; }

  virtual VertexKey root() const = 0;
  /// The unique y with an edge (x, a, y). Throws KeyError on malformed keys.
  virtual VertexKey neighbor(const VertexKey& x, Label a) const = 0;
  virtual std::string format_key(const VertexKey& x) const = 0;
  virtual std::string kind() const = 0;

  /// One entry per alphabet symbol, in label order.
  std::vector<std::pair<Label, VertexKey>> neighbors(const VertexKey& x) const;

 private:
  Alphabet alphabet_;
};

using OraclePtr = std::shared_ptr<const GraphOracle>;

struct BallEdge {
  std::size_t from;
  Label label;
  std::size_t to;
};

/// Breadth-first closure of a ball B(center, radius). Vertices are listed in
/// BFS order with neighbours visited in label order, so indices are
/// reproducible.
struct BallView {
  VertexKey center;
  int radius = 0;
  std::vector<VertexKey> vertices;
  std::vector<int> distance;
  KeyMap<std::size_t> index;
  /// Every edge whose endpoints both lie in the ball.
  std::vector<BallEdge> edges;

  std::optional<std::size_t> find(const VertexKey& key) const;
  std::vector<std::size_t> frontier() const;
  std::size_t size() const noexcept { return vertices.size(); }
};

inline constexpr std::size_t kDefaultBallVertexCap = 8'000'000;

/// Throws TruncationError when the ball would exceed vertex_cap vertices.
BallView ball(const GraphOracle& graph, const VertexKey& center, int radius,
              std::size_t vertex_cap = kDefaultBallVertexCap);

/// Endpoint of the path reading `word` from `from`.
VertexKey follow(const GraphOracle& graph, const VertexKey& from, std::string_view word);

/// Graph-metric distance, found by breadth-first search up to max_distance.
std::optional<int> graph_distance(const GraphOracle& graph, const VertexKey& x,
                                  const VertexKey& y, int max_distance);

/// Undirected DOT rendering: each inverse pair of edges is drawn once.
std::string ball_to_dot(const GraphOracle& graph, const BallView& view);

/// Label-ordered BFS encoding of a ball. Two balls of deterministic graphs are
/// isomorphic as rooted labelled graphs iff their signatures are equal.
std::vector<std::int64_t> ball_signature(const GraphOracle& graph, const VertexKey& center,
                                         int radius);

/// Checks full determinism, symmetry, and (within the doubled ball) strong
/// connectivity on ball(root, radius); returns a list of violations.
std::vector<std::string> check_oracle_invariants(const GraphOracle& graph, int radius);

}  // namespace cfwalk
