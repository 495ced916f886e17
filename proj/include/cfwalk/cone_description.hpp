#pragma once

#include <string>
#include <vector>

#include "cfwalk/graph.hpp"

namespace cfwalk {

struct PieceEdgeSpec {
  int from = 0;
  std::string label;
  int to = 0;
};

/// A child cone attached to a piece: `attach` edges go from a vertex of the
/// parent piece to a vertex of the child's type piece.
struct ChildSpec {
  std::string type;
  std::vector<PieceEdgeSpec> attach;
};

/// One finite piece of a tessellation. Internal edges are listed in one
/// direction; the inverse edge is implied.
struct PieceSpec {
  std::string name;
  int vertices = 0;
  std::vector<PieceEdgeSpec> edges;
  std::vector<ChildSpec> children;
};

/// Direct finite-type input: a root piece and finitely many type pieces whose
/// child attachments unroll into an infinite symmetric graph.
struct ConeDescriptionSpec {
  std::vector<std::pair<std::string, std::string>> alphabet;
  PieceSpec root;
  std::vector<PieceSpec> types;
};

/// Vertices are keyed by (tree address of child indices, piece-local id).
class ConeDescriptionOracle : public GraphOracle {
 public:
  explicit ConeDescriptionOracle(const ConeDescriptionSpec& spec);

  VertexKey root() const override { return VertexKey{{0}}; }
  VertexKey neighbor(const VertexKey& x, Label a) const override;
  std::string format_key(const VertexKey& x) const override;
  std::string kind() const override { return "cone_description"; }

 private:
  struct Target {
    enum class Kind { kNone, kInternal, kChild, kParent } kind = Kind::kNone;
    int child = -1;
    int vertex = -1;
  };
  struct Piece {
    std::string name;
    int vertices = 0;
    std::vector<int> child_type;
    // [vertex][label]
    std::vector<std::vector<Target>> moves;
    // [child][child-local vertex][label] -> parent-local vertex
    std::vector<std::vector<std::vector<int>>> up;
  };

  // Piece index 0 is the root, type t is piece t + 1.
  int piece_at(const VertexKey& x) const;

  std::vector<Piece> pieces_;
};

OraclePtr make_cone_description(const ConeDescriptionSpec& spec);

}  // namespace cfwalk
