#include "cfwalk/cones.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cfwalk/errors.hpp"

namespace cfwalk {

namespace {

constexpr std::int32_t kOut = -1;
constexpr std::int32_t kDeep = -2;

// Multi-source BFS from `seeds` that never enters `forbidden`. Levels are
// distances to the seed set; vertices deeper than `depth` are not stored.
struct Region {
  std::size_t labels = 0;
  std::vector<VertexKey> keys;
  std::vector<int> level;
  std::vector<std::int32_t> adj;  // keys.size() * labels, kOut / kDeep / index
  KeyMap<std::int32_t> index;
  std::size_t seeds = 0;

  std::int32_t at(std::size_t v, Label a) const { return adj[v * labels + a]; }
};

Region explore(const GraphOracle& g, const std::vector<VertexKey>& seeds, const KeySet& forbidden,
               int depth, std::size_t cap) {
  Region r;
  r.labels = g.alphabet().size();
  r.seeds = seeds.size();
  for (const auto& s : seeds) {
    if (r.index.emplace(s, static_cast<std::int32_t>(r.keys.size())).second) {
      r.keys.push_back(s);
      r.level.push_back(0);
    }
  }
  r.seeds = r.keys.size();
  for (std::size_t head = 0; head < r.keys.size(); ++head) {
    const int lv = r.level[head];
    for (Label a = 0; a < r.labels; ++a) {
      VertexKey y = g.neighbor(r.keys[head], a);
      if (forbidden.count(y)) {
        r.adj.push_back(kOut);
        continue;
      }
      auto it = r.index.find(y);
      if (it != r.index.end()) {
        r.adj.push_back(it->second);
        continue;
      }
      if (lv == depth) {
        r.adj.push_back(kDeep);
        continue;
      }
      if (r.keys.size() >= cap)
        throw CertificationError("cone exploration at depth " + std::to_string(depth) +
                                 " exceeds the vertex cap of " + std::to_string(cap));
      const auto id = static_cast<std::int32_t>(r.keys.size());
      r.index.emplace(y, id);
      r.keys.push_back(std::move(y));
      r.level.push_back(lv + 1);
      r.adj.push_back(id);
    }
  }
  return r;
}

struct Canonical {
  std::vector<std::int32_t> code;
  std::vector<std::int32_t> boundary;  // region indices in canonical order
};

// Label-ordered BFS from every boundary vertex of a component; the
// lexicographically smallest encoding wins and fixes the boundary order.
Canonical canonical_form(const Region& r, const std::vector<std::int32_t>& component) {
  Canonical best;
  std::vector<std::int32_t> order;
  std::vector<std::int32_t> code;
  std::unordered_map<std::int32_t, std::int32_t> local;
  for (std::int32_t s : component) {
    if (r.level[s] != 0) continue;
    local.clear();
    order.assign(1, s);
    local.emplace(s, 0);
    code.clear();
    // -1: smaller than best so far, 0: equal prefix, 1: larger (abandon).
    int cmp = best.code.empty() ? -1 : 0;
    for (std::size_t head = 0; head < order.size() && cmp <= 0; ++head) {
      for (Label a = 0; a < r.labels; ++a) {
        const std::int32_t t = r.at(order[head], a);
        std::int32_t c = t;
        if (t >= 0) {
          auto [it, fresh] = local.emplace(t, static_cast<std::int32_t>(order.size()));
          if (fresh) order.push_back(t);
          c = it->second;
        }
        if (cmp == 0) {
          const std::int32_t b = best.code[code.size()];
          if (c > b) cmp = 1;
          if (c < b) cmp = -1;
        }
        code.push_back(c);
        if (cmp > 0) break;
      }
    }
    if (cmp >= 0) continue;
    best.code = code;
    best.boundary.clear();
    for (std::int32_t v : order)
      if (r.level[v] == 0) best.boundary.push_back(v);
  }
  return best;
}

struct ChildInfo {
  std::vector<VertexKey> boundary;
  std::vector<std::int32_t> code;
  std::size_t size = 0;
};

std::vector<ChildInfo> split_children(const GraphOracle& g, const std::vector<VertexKey>& seeds,
                                      const KeySet& forbidden, int depth, std::size_t cap,
                                      bool with_codes) {
  const Region r = explore(g, seeds, forbidden, depth, cap);
  const std::size_t n = r.keys.size();
  std::vector<std::int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t v = 0; v < n; ++v)
    for (Label a = 0; a < r.labels; ++a) {
      const std::int32_t t = r.at(v, a);
      if (t < 0) continue;
      const std::int32_t x = find(static_cast<std::int32_t>(v)), y = find(t);
      // Smaller root wins so that components are ordered by first seed.
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  std::map<std::int32_t, std::vector<std::int32_t>> comps;
  for (std::size_t v = 0; v < n; ++v) comps[find(static_cast<std::int32_t>(v))].push_back(static_cast<std::int32_t>(v));
  std::vector<ChildInfo> out;
  for (auto& [root, members] : comps) {
    ChildInfo info;
    if (!with_codes) {
      for (auto v : members)
        if (r.level[v] == 0) info.boundary.push_back(r.keys[v]);
      info.size = members.size();
      out.push_back(std::move(info));
      continue;
    }
    Canonical c = canonical_form(r, members);
    info.code = std::move(c.code);
    for (auto v : c.boundary) info.boundary.push_back(r.keys[v]);
    info.size = members.size();
    out.push_back(std::move(info));
  }
  return out;
}

struct Expansion {
  Piece piece;
  std::vector<std::vector<std::int32_t>> child_codes;
  std::shared_ptr<const KeySet> child_forbidden;
};

// Splits the neighbourhood of a piece into the piece's own edges and its
// successor cones. `forbidden` is what lies outside (the parent side).
Expansion expand(const GraphOracle& g, const std::vector<VertexKey>& piece_vertices,
                 const KeySet& forbidden, int depth, std::size_t cap, bool with_codes = true) {
  const Label labels = static_cast<Label>(g.alphabet().size());
  auto own = std::make_shared<KeySet>(piece_vertices.begin(), piece_vertices.end());
  KeyMap<int> local;
  for (std::size_t i = 0; i < piece_vertices.size(); ++i) local.emplace(piece_vertices[i], static_cast<int>(i));

  std::vector<VertexKey> seeds;
  KeySet seen;
  std::vector<std::vector<VertexKey>> nbrs(piece_vertices.size());
  for (std::size_t i = 0; i < piece_vertices.size(); ++i) {
    for (Label a = 0; a < labels; ++a) {
      VertexKey y = g.neighbor(piece_vertices[i], a);
      if (!forbidden.count(y) && !own->count(y) && seen.insert(y).second) seeds.push_back(y);
      nbrs[i].push_back(std::move(y));
    }
  }

  Expansion ex;
  ex.piece.vertices = piece_vertices;
  ex.child_forbidden = own;
  auto children = split_children(g, seeds, *own, depth, cap, with_codes);
  KeyMap<std::pair<int, int>> where;
  for (std::size_t c = 0; c < children.size(); ++c) {
    ChildCone cc;
    cc.boundary = children[c].boundary;
    for (std::size_t p = 0; p < cc.boundary.size(); ++p)
      where.emplace(cc.boundary[p], std::pair<int, int>(static_cast<int>(c), static_cast<int>(p)));
    ex.piece.children.push_back(std::move(cc));
    ex.child_codes.push_back(std::move(children[c].code));
  }
  for (std::size_t i = 0; i < piece_vertices.size(); ++i) {
    for (Label a = 0; a < labels; ++a) {
      const VertexKey& y = nbrs[i][a];
      if (forbidden.count(y)) continue;
      if (auto it = local.find(y); it != local.end()) {
        ex.piece.edges.push_back({static_cast<int>(i), a, it->second});
        continue;
      }
      const auto [c, p] = where.at(y);
      ex.piece.children[c].attach.push_back({static_cast<int>(i), a, p});
    }
  }
  return ex;
}

std::vector<VertexKey> root_piece(const GraphOracle& g, const VertexKey& o, int radius) {
  return ball(g, o, radius).vertices;
}

struct Structure {
  std::vector<std::vector<int>> child_types;
  std::vector<std::size_t> sizes;
  bool operator==(const Structure&) const = default;
};

Structure structure_of(const ConeTypeTable& t) {
  Structure s;
  for (const auto& p : t.pieces) {
    std::vector<int> row;
    for (const auto& c : p.children) row.push_back(c.type);
    s.child_types.push_back(std::move(row));
    s.sizes.push_back(p.vertices.size());
  }
  return s;
}

int boundary_diameter(const GraphOracle& g, const std::vector<VertexKey>& b) {
  int m = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      auto d = graph_distance(g, b[i], b[j], 256);
      if (!d) throw CertificationError("boundary vertices farther apart than 256");
      m = std::max(m, *d);
    }
  return m;
}

struct ConeRef {
  std::vector<VertexKey> boundary;
  std::shared_ptr<const KeySet> forbidden;
};

std::map<std::vector<std::int32_t>, int> code_index(const ConeTypeTable& t) {
  std::map<std::vector<std::int32_t>, int> m;
  for (std::size_t i = 1; i < t.codes.size(); ++i) m.emplace(t.codes[i], static_cast<int>(i));
  return m;
}

}  // namespace

std::vector<Cone> cones_at(const GraphOracle& graph, const VertexKey& o, int n, int depth) {
  if (n < 0) throw ConfigurationError("cone-analyzer", "cone radius must be >= 0");
  const auto inner = root_piece(graph, o, n);
  auto ex = expand(graph, inner, KeySet{}, depth, AssignOptions{}.vertex_cap);
  std::vector<Cone> out;
  for (const auto& child : ex.piece.children) {
    Cone c;
    c.radius = n;
    c.boundary = child.boundary;
    for (const auto& e : child.attach) c.entries.push_back({inner[e.from], e.label, e.to});
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ConeTruncation> representative_truncations(const GraphOracle& graph,
                                                       const ConeTypeTable& table, int depth) {
  // The representative of type i sits below the first piece that lists a
  // child with the same boundary; that piece is what it must not re-enter.
  std::vector<int> parent(table.pieces.size(), -1);
  for (std::size_t p = 0; p < table.pieces.size(); ++p)
    for (const auto& child : table.pieces[p].children) {
      const int t = child.type;
      if (parent[t] < 0 && child.boundary == table.pieces[t].vertices) parent[t] = static_cast<int>(p);
    }
  std::vector<ConeTruncation> out;
  for (int t = 1; t <= table.type_count(); ++t) {
    if (parent[t] < 0) throw CertificationError("type " + std::to_string(t) + " has no parent piece");
    const auto& up = table.pieces[parent[t]].vertices;
    const Region r = explore(graph, table.pieces[t].vertices, KeySet(up.begin(), up.end()), depth,
                             AssignOptions{}.vertex_cap);
    ConeTruncation c;
    c.type = t;
    c.vertices = r.keys;
    for (std::size_t v = 0; v < r.keys.size(); ++v)
      for (Label a = 0; a < r.labels; ++a)
        if (r.at(v, a) >= 0) c.edges.push_back({static_cast<int>(v), a, r.at(v, a)});
    out.push_back(std::move(c));
  }
  return out;
}

ConeTypeTable types_at_depth(const GraphOracle& graph, const VertexKey& o, int depth,
                             const AssignOptions& options) {
  ConeTypeTable t;
  t.origin = o;
  t.root_radius = options.root_radius;
  t.depth = depth;
  std::map<std::vector<std::int32_t>, int> type_of;
  std::vector<ConeRef> reps{ConeRef{}};
  t.codes.emplace_back();

  auto classify_children = [&](Expansion& ex) {
    for (std::size_t c = 0; c < ex.piece.children.size(); ++c) {
      auto& child = ex.piece.children[c];
      auto [it, fresh] = type_of.emplace(ex.child_codes[c], static_cast<int>(reps.size()));
      if (fresh) {
        if (static_cast<int>(reps.size()) > options.max_types)
          throw CertificationError("more than " + std::to_string(options.max_types) +
                                   " cone types at depth " + std::to_string(depth));
        reps.push_back({child.boundary, ex.child_forbidden});
        t.codes.push_back(ex.child_codes[c]);
      }
      child.type = it->second;
    }
  };

  auto root = expand(graph, root_piece(graph, o, options.root_radius), KeySet{}, depth,
                     options.vertex_cap);
  classify_children(root);
  t.pieces.push_back(std::move(root.piece));
  for (std::size_t i = 1; i < reps.size(); ++i) {
    // reps may grow while we iterate; copy what we need first.
    const ConeRef rep = reps[i];
    auto ex = expand(graph, rep.boundary, *rep.forbidden, depth, options.vertex_cap);
    classify_children(ex);
    t.pieces.push_back(std::move(ex.piece));
  }
  for (std::size_t i = 1; i < t.pieces.size(); ++i)
    t.boundary_diameter = std::max(t.boundary_diameter, boundary_diameter(graph, t.pieces[i].vertices));
  return t;
}

ConeTypeTable assign_types(const GraphOracle& graph, const VertexKey& o,
                           const AssignOptions& options) {
  if (options.first_depth < 1) throw ConfigurationError("cone-analyzer", "probe depth must be >= 1");
  if (options.depth_step < 1) throw ConfigurationError("cone-analyzer", "depth step must be >= 1");
  if (options.root_radius < 0) throw ConfigurationError("cone-analyzer", "root radius must be >= 0");
  std::vector<DepthRecord> trace;
  auto describe = [&trace] {
    std::ostringstream s;
    for (const auto& r : trace) s << " depth " << r.depth << ": " << r.types << " types;";
    return s.str();
  };
  std::optional<Structure> previous;
  for (int d = options.first_depth; d <= options.max_radius; d += options.depth_step) {
    ConeTypeTable t;
    try {
      t = types_at_depth(graph, o, d, options);
    } catch (const CertificationError& e) {
      throw CertificationError(std::string("finite type not certified: ") + e.what() +
                               "; growth trace:" + describe());
    }
    DepthRecord rec{d, t.type_count(), 0};
    for (std::size_t i = 1; i < t.pieces.size(); ++i)
      rec.successors += static_cast<int>(t.pieces[i].children.size());
    trace.push_back(rec);
    Structure s = structure_of(t);
    if (previous && *previous == s) {
      t.trace = trace;
      return t;
    }
    previous = std::move(s);
  }
  throw CertificationError("finite type not certified up to depth " +
                           std::to_string(options.max_radius) + "; growth trace:" + describe());
}

TypeGraph type_graph(const ConeTypeTable& table) {
  TypeGraph tg;
  tg.r = table.type_count();
  const int r = tg.r;
  tg.a.assign(r, std::vector<int>(r, 0));
  for (int i = 0; i < r; ++i)
    for (const auto& c : table.pieces[i + 1].children) ++tg.a[i][c.type - 1];

  tg.reach.assign(r, std::vector<bool>(r, false));
  for (int s = 0; s < r; ++s) {
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < r; ++v)
        if (tg.a[u][v] > 0 && !tg.reach[s][v]) {
          tg.reach[s][v] = true;
          stack.push_back(v);
        }
    }
  }
  tg.strongly_connected = r > 0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (!tg.reach[i][j]) tg.strongly_connected = false;

  if (tg.strongly_connected) {
    std::vector<int> lvl(r, -1);
    lvl[0] = 0;
    std::vector<int> queue{0};
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (int v = 0; v < r; ++v)
        if (tg.a[queue[h]][v] > 0 && lvl[v] < 0) {
          lvl[v] = lvl[queue[h]] + 1;
          queue.push_back(v);
        }
    int g = 0;
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v)
        if (tg.a[u][v] > 0) g = std::gcd(g, std::abs(lvl[u] + 1 - lvl[v]));
    tg.period = g;
    tg.classes.assign(g, {});
    for (int u = 0; u < r; ++u) tg.classes[lvl[u] % g].push_back(u + 1);
  }
  return tg;
}

IrreducibilityReport check_irreducible(const TypeGraph& tg) {
  IrreducibilityReport rep;
  rep.irreducible = tg.strongly_connected;
  rep.reach = tg.reach;
  std::ostringstream s;
  if (rep.irreducible) {
    s << "graph of types is strongly connected (" << tg.r << " types, period " << tg.period << ")";
  } else {
    s << "graph of types is not strongly connected:";
    for (int i = 0; i < tg.r; ++i)
      for (int j = 0; j < tg.r; ++j)
        if (!tg.reach[i][j]) {
          s << " type " << i + 1 << " does not reach type " << j + 1 << ';';
        }
  }
  rep.summary = s.str();
  return rep;
}

ConeDescriptionSpec table_to_description(const GraphOracle& graph, const ConeTypeTable& table) {
  const Alphabet& al = graph.alphabet();
  ConeDescriptionSpec spec;
  for (Label a = 0; a < al.size(); ++a) spec.alphabet.emplace_back(al.name(a), al.name(al.inverse(a)));
  auto convert = [&](const Piece& p, std::string name) {
    PieceSpec ps;
    ps.name = std::move(name);
    ps.vertices = static_cast<int>(p.vertices.size());
    for (const auto& e : p.edges) {
      const auto fwd = std::pair(e.from, e.label);
      const auto back = std::pair(e.to, al.inverse(e.label));
      if (fwd <= back) ps.edges.push_back({e.from, al.name(e.label), e.to});
    }
    for (const auto& c : p.children) {
      ChildSpec cs;
      cs.type = "T" + std::to_string(c.type);
      for (const auto& e : c.attach) cs.attach.push_back({e.from, al.name(e.label), e.to});
      ps.children.push_back(std::move(cs));
    }
    return ps;
  };
  spec.root = convert(table.pieces[0], "root");
  for (std::size_t i = 1; i < table.pieces.size(); ++i)
    spec.types.push_back(convert(table.pieces[i], "T" + std::to_string(i)));
  return spec;
}

std::vector<std::string> check_successor_counts(const GraphOracle& graph, const ConeTypeTable& table,
                                                int generations) {
  std::vector<std::string> problems;
  const auto index = code_index(table);
  const AssignOptions opts;
  struct Item {
    ConeRef ref;
    int type;
    int generation;
  };
  std::vector<Item> queue;
  auto root = expand(graph, table.pieces[0].vertices, KeySet{}, table.depth, opts.vertex_cap);
  for (std::size_t c = 0; c < root.piece.children.size(); ++c)
    queue.push_back({{root.piece.children[c].boundary, root.child_forbidden},
                     table.pieces[0].children[c].type, 1});
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const Item it = queue[h];
    auto ex = expand(graph, it.ref.boundary, *it.ref.forbidden, table.depth, opts.vertex_cap);
    const Piece& rep = table.pieces[it.type];
    std::vector<int> want, got;
    for (const auto& c : rep.children) want.push_back(c.type);
    for (std::size_t c = 0; c < ex.child_codes.size(); ++c) {
      auto f = index.find(ex.child_codes[c]);
      const int ty = f == index.end() ? 0 : f->second;
      got.push_back(ty);
      if (ty == 0) {
        problems.push_back("cone at " + graph.format_key(ex.piece.children[c].boundary[0]) +
                           " has an unknown type");
        continue;
      }
      if (it.generation < generations)
        queue.push_back({{ex.piece.children[c].boundary, ex.child_forbidden}, ty, it.generation + 1});
    }
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got)
      problems.push_back("cone of type " + std::to_string(it.type) + " at " +
                         graph.format_key(it.ref.boundary[0]) + " has successors differing from its type");
  }
  return problems;
}

std::vector<std::string> check_partition(const GraphOracle& graph, const ConeTypeTable& table,
                                         int radius) {
  std::vector<std::string> problems;
  const auto view = ball(graph, table.origin, radius);
  KeyMap<int> hits;
  for (const auto& v : table.pieces[0].vertices) ++hits[v];
  const AssignOptions opts;
  std::vector<ConeRef> queue;
  // Every boundary vertex of a cone cut at level n sits at distance n + 1.
  auto root = expand(graph, table.pieces[0].vertices, KeySet{}, table.depth, opts.vertex_cap, false);
  for (const auto& c : root.piece.children) queue.push_back({c.boundary, root.child_forbidden});
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const ConeRef ref = queue[h];
    bool inside = false;
    for (const auto& v : ref.boundary) {
      if (view.find(v)) {
        inside = true;
        ++hits[v];
      }
    }
    if (!inside) continue;
    auto ex = expand(graph, ref.boundary, *ref.forbidden, table.depth, opts.vertex_cap, false);
    for (const auto& c : ex.piece.children) queue.push_back({c.boundary, ex.child_forbidden});
  }
  for (std::size_t i = 0; i < view.size(); ++i) {
    const int h = hits.count(view.vertices[i]) ? hits.at(view.vertices[i]) : 0;
    if (h != 1)
      problems.push_back("vertex " + graph.format_key(view.vertices[i]) + " covered " +
                         std::to_string(h) + " times");
  }
  return problems;
}

std::string type_graph_dot(const TypeGraph& tg) {
  std::ostringstream s;
  s << "digraph types {\n";
  for (int i = 1; i <= tg.r; ++i) s << "  " << i << ";\n";
  for (int i = 0; i < tg.r; ++i)
    for (int j = 0; j < tg.r; ++j)
      if (tg.a[i][j] > 0) {
        s << "  " << i + 1 << " -> " << j + 1;
        if (tg.a[i][j] > 1) s << " [label=\"" << tg.a[i][j] << "\"]";
        s << ";\n";
      }
  s << "}\n";
  return s.str();
}

std::string type_table_json(const GraphOracle& graph, const ConeTypeTable& table,
                            const TypeGraph& tg) {
  using nlohmann::json;
  json j;
  j["origin"] = graph.format_key(table.origin);
  j["root_radius"] = table.root_radius;
  j["depth"] = table.depth;
  j["r"] = tg.r;
  j["root_piece_size"] = table.pieces[0].vertices.size();
  json types = json::array();
  for (std::size_t i = 1; i < table.pieces.size(); ++i) {
    json t;
    t["id"] = i;
    t["boundary_size"] = table.pieces[i].vertices.size();
    json b = json::array();
    for (const auto& v : table.pieces[i].vertices) b.push_back(graph.format_key(v));
    t["representative_boundary"] = b;
    json succ = json::array();
    for (const auto& c : table.pieces[i].children) succ.push_back(c.type);
    t["successors"] = succ;
    types.push_back(t);
  }
  j["types"] = types;
  j["a"] = tg.a;
  j["M"] = table.boundary_diameter;
  j["irreducible"] = tg.strongly_connected;
  j["period"] = tg.period;
  j["classes"] = tg.classes;
  json trace = json::array();
  for (const auto& r : table.trace) trace.push_back({{"depth", r.depth}, {"types", r.types}, {"successors", r.successors}});
  j["trace"] = trace;
  return j.dump(2);
}

}  // namespace cfwalk
