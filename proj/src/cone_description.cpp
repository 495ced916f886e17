#include "cfwalk/cone_description.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "cfwalk/errors.hpp"

namespace cfwalk {

namespace {

using ParentSignature = std::vector<std::pair<int, Label>>;

}  // namespace

ConeDescriptionOracle::ConeDescriptionOracle(const ConeDescriptionSpec& spec)
    : GraphOracle(Alphabet(spec.alphabet)) {
  const auto& alphabet = this->alphabet();
  const std::size_t labels = alphabet.size();
  std::map<std::string, int> type_index;
  for (std::size_t t = 0; t < spec.types.size(); ++t) {
    if (!type_index.emplace(spec.types[t].name, static_cast<int>(t)).second)
      throw ValidationError("duplicate type piece '" + spec.types[t].name + "'");
  }

  std::vector<const PieceSpec*> specs{&spec.root};
  for (const auto& t : spec.types) specs.push_back(&t);

  pieces_.resize(specs.size());
  std::vector<std::optional<ParentSignature>> parent_sig(specs.size());

  auto where = [](const PieceSpec& p, int v) {
    return "piece '" + p.name + "' vertex " + std::to_string(v);
  };

  for (std::size_t p = 0; p < specs.size(); ++p) {
    const PieceSpec& ps = *specs[p];
    Piece& piece = pieces_[p];
    piece.name = ps.name;
    piece.vertices = ps.vertices;
    if (ps.vertices < 1) throw ValidationError("piece '" + ps.name + "' has no vertices");
    piece.moves.assign(ps.vertices, std::vector<Target>(labels));

    auto set_move = [&](int v, Label a, Target t) {
      if (v < 0 || v >= ps.vertices)
        throw ValidationError(where(ps, v) + " does not exist");
      if (piece.moves[v][a].kind != Target::Kind::kNone)
        throw ValidationError(where(ps, v) + " has two edges labelled '" + alphabet.name(a) + "'");
      piece.moves[v][a] = t;
    };

    for (const auto& e : ps.edges) {
      const Label a = alphabet.find(e.label);
      const Label inv = alphabet.inverse(a);
      set_move(e.from, a, {Target::Kind::kInternal, -1, e.to});
      if (e.from != e.to || a != inv) set_move(e.to, inv, {Target::Kind::kInternal, -1, e.from});
    }

    if (ps.children.empty())
      throw ValidationError("piece '" + ps.name +
                            "' has no child cones; the described graph must be infinite");
    for (std::size_t c = 0; c < ps.children.size(); ++c) {
      const ChildSpec& child = ps.children[c];
      auto it = type_index.find(child.type);
      if (it == type_index.end())
        throw ValidationError("piece '" + ps.name + "' attaches unknown type '" + child.type + "'");
      const int type = it->second;
      const PieceSpec& ts = spec.types[type];
      if (child.attach.empty())
        throw ValidationError("child " + std::to_string(c) + " of piece '" + ps.name +
                              "' has no attachment edges");
      piece.child_type.push_back(type);
      piece.up.emplace_back(ts.vertices, std::vector<int>(labels, -1));
      ParentSignature sig;
      for (const auto& e : child.attach) {
        const Label a = alphabet.find(e.label);
        const Label inv = alphabet.inverse(a);
        if (e.to < 0 || e.to >= ts.vertices)
          throw ValidationError(where(ts, e.to) + " does not exist (attached from '" + ps.name + "')");
        set_move(e.from, a, {Target::Kind::kChild, static_cast<int>(c), e.to});
        if (piece.up[c][e.to][inv] >= 0)
          throw ValidationError(where(ts, e.to) + " receives label '" + alphabet.name(inv) +
                                "' twice from its parent '" + ps.name + "'");
        piece.up[c][e.to][inv] = e.from;
        sig.emplace_back(e.to, inv);
      }
      std::sort(sig.begin(), sig.end());
      auto& expected = parent_sig[type + 1];
      if (!expected) {
        expected = sig;
      } else if (*expected != sig) {
        // Report the first label on which the two attachments disagree.
        std::vector<std::pair<int, Label>> diff;
        std::set_symmetric_difference(expected->begin(), expected->end(), sig.begin(), sig.end(),
                                      std::back_inserter(diff));
        throw ValidationError("inconsistent attachment of type '" + ts.name + "': parent label '" +
                              alphabet.name(diff.front().second) + "' at vertex " +
                              std::to_string(diff.front().first) + " differs between parents");
      }
    }
  }

  for (std::size_t t = 0; t < spec.types.size(); ++t) {
    if (!parent_sig[t + 1])
      throw ValidationError("type piece '" + spec.types[t].name + "' is never attached");
    for (const auto& [w, b] : *parent_sig[t + 1]) {
      auto& slot = pieces_[t + 1].moves[w][b];
      if (slot.kind != Target::Kind::kNone)
        throw ValidationError(where(spec.types[t], w) + " has two edges labelled '" +
                              alphabet.name(b) + "' (one from its parent)");
      slot = {Target::Kind::kParent, -1, -1};
    }
  }

  for (std::size_t p = 0; p < pieces_.size(); ++p)
    for (int v = 0; v < pieces_[p].vertices; ++v)
      for (Label a = 0; a < labels; ++a)
        if (pieces_[p].moves[v][a].kind == Target::Kind::kNone)
          throw ValidationError(where(*specs[p], v) + " has no edge labelled '" + alphabet.name(a) +
                                "'");
}

int ConeDescriptionOracle::piece_at(const VertexKey& x) const {
  if (x.parts.empty()) throw KeyError("empty cone-description key");
  int piece = 0;
  for (std::size_t i = 0; i + 1 < x.parts.size(); ++i) {
    const int c = x.parts[i];
    const auto& types = pieces_[piece].child_type;
    if (c < 0 || c >= static_cast<int>(types.size())) throw KeyError("child index out of range");
    piece = types[c] + 1;
  }
  const int local = x.parts.back();
  if (local < 0 || local >= pieces_[piece].vertices) throw KeyError("local vertex out of range");
  return piece;
}

VertexKey ConeDescriptionOracle::neighbor(const VertexKey& x, Label a) const {
  const int piece = piece_at(x);
  if (a >= alphabet().size()) throw AlphabetError("label out of range");
  const int local = x.parts.back();
  const Target& t = pieces_[piece].moves[local][a];
  VertexKey y = x;
  switch (t.kind) {
    case Target::Kind::kInternal:
      y.parts.back() = t.vertex;
      return y;
    case Target::Kind::kChild:
      y.parts.back() = t.child;
      y.parts.push_back(t.vertex);
      return y;
    case Target::Kind::kParent: {
      const int child = x.parts[x.parts.size() - 2];
      y.parts.pop_back();
      // Re-derive the parent piece from the shortened address.
      y.parts.back() = 0;
      const int parent = piece_at(y);
      y.parts.back() = pieces_[parent].up[child][local][a];
      return y;
    }
    case Target::Kind::kNone:
      break;
  }
  throw KeyError("unreachable: incomplete piece");
}

std::string ConeDescriptionOracle::format_key(const VertexKey& x) const {
  std::string out;
  for (std::size_t i = 0; i + 1 < x.parts.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(x.parts[i]);
  }
  return out + "/" + std::to_string(x.parts.back());
}

OraclePtr make_cone_description(const ConeDescriptionSpec& spec) {
  return std::make_shared<ConeDescriptionOracle>(spec);
}

}  // namespace cfwalk
