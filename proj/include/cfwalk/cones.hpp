#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "cfwalk/cone_description.hpp"
#include "cfwalk/graph.hpp"

namespace cfwalk {

using KeySet = std::unordered_set<VertexKey, VertexKeyHash>;

/// One connected component of X minus B(o, n), seen to a finite depth.
struct Cone {
  int radius = 0;
  /// Boundary vertices, i.e. cone vertices with a neighbour in B(o, radius).
  std::vector<VertexKey> boundary;
  /// Edges (ball vertex, label, boundary position) entering the cone.
  struct Entry {
    VertexKey from;
    Label label;
    int to;
  };
  std::vector<Entry> entries;
  /// Stored vertices of the truncation, boundary first.
  std::size_t stored = 0;
};

/// Components of X \ B(o, n), each explored `depth` levels past its boundary.
/// Boundary vertices that only meet deeper than `depth` are reported as
/// separate cones.
std::vector<Cone> cones_at(const GraphOracle& graph, const VertexKey& o, int n, int depth = 6);

struct PieceEdge {
  int from = 0;
  Label label = 0;
  int to = 0;
};

/// A successor cone hanging off a piece. Its boundary is listed in the order
/// fixed by the canonical form, so position k maps to local vertex k of the
/// representative of `type` (this is the isomorphism phi).
struct ChildCone {
  int type = 0;
  std::vector<VertexKey> boundary;
  /// (piece vertex, label, boundary position).
  std::vector<PieceEdge> attach;
};

/// Piece 0 is the root piece B(o, root_radius); piece i >= 1 is the boundary
/// of the representative cone of type i. For cones the boundary is the whole
/// piece that is not covered by successor cones.
struct Piece {
  std::vector<VertexKey> vertices;
  /// Directed edges inside the piece (both orientations are stored).
  std::vector<PieceEdge> edges;
  std::vector<ChildCone> children;
};

struct DepthRecord {
  int depth = 0;
  int types = 0;
  /// Total successor count summed over representatives.
  int successors = 0;
};

struct AssignOptions {
  int root_radius = 0;
  int first_depth = 4;
  int depth_step = 2;
  int max_radius = 24;
  /// Exploration budget for one truncated cone.
  std::size_t vertex_cap = 2'000'000;
  /// Types beyond this count abort certification.
  int max_types = 4096;
};

struct ConeTypeTable {
  VertexKey origin;
  int root_radius = 0;
  /// Truncation depth at which the table was certified.
  int depth = 0;
  std::vector<Piece> pieces;
  /// Canonical code of every type, indexed like pieces (entry 0 unused).
  std::vector<std::vector<std::int32_t>> codes;
  /// Largest graph diameter of a representative boundary.
  int boundary_diameter = 0;
  std::vector<DepthRecord> trace;

  int type_count() const { return static_cast<int>(pieces.size()) - 1; }
};

/// Finds cone types by truncated canonical forms, deepening until the type
/// count and successor structure agree at two consecutive depths. Throws
/// CertificationError with the growth trace otherwise.
ConeTypeTable assign_types(const GraphOracle& graph, const VertexKey& o,
                           const AssignOptions& options = {});

/// Builds the table at one fixed truncation depth without certification.
ConeTypeTable types_at_depth(const GraphOracle& graph, const VertexKey& o, int depth,
                             const AssignOptions& options = {});

struct TypeGraph {
  int r = 0;
  /// a[i][j] for types 1..r, stored 0-based.
  std::vector<std::vector<int>> a;
  bool strongly_connected = false;
  /// Period of a when strongly connected, otherwise 0.
  int period = 0;
  /// Cyclic classes I_0 .. I_{d-1} (1-based type ids).
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<bool>> reach;
};

TypeGraph type_graph(const ConeTypeTable& table);

struct IrreducibilityReport {
  bool irreducible = false;
  std::vector<std::vector<bool>> reach;
  std::string summary;
};

IrreducibilityReport check_irreducible(const TypeGraph& tg);

/// Unrolls the table into a cone description; its balls must match the
/// original graph when the typing is right.
ConeDescriptionSpec table_to_description(const GraphOracle& graph, const ConeTypeTable& table);

/// Explores every cone up to `generations` levels of successors below the
/// root and checks that each one's successor types agree with its
/// representative's row of a. Returns violations.
std::vector<std::string> check_successor_counts(const GraphOracle& graph, const ConeTypeTable& table,
                                                int generations);

/// Checks that B(o, radius) is covered exactly once by the root piece and the
/// boundaries of the cones met while descending the table. Returns violations.
std::vector<std::string> check_partition(const GraphOracle& graph, const ConeTypeTable& table,
                                         int radius);

/// The representative cone of a type, explored `depth` levels past its boundary.
struct ConeTruncation {
  int type = 0;
  std::vector<VertexKey> vertices;
  /// Directed edges between stored vertices.
  std::vector<PieceEdge> edges;
};

std::vector<ConeTruncation> representative_truncations(const GraphOracle& graph,
                                                       const ConeTypeTable& table, int depth);

std::string type_graph_dot(const TypeGraph& tg);
std::string type_table_json(const GraphOracle& graph, const ConeTypeTable& table,
                            const TypeGraph& tg);

}  // namespace cfwalk
