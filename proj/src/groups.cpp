#include "cfwalk/groups.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "cfwalk/errors.hpp"

namespace cfwalk {

void validate_group_table(const std::vector<std::vector<int>>& table) {
  const int n = static_cast<int>(table.size());
  if (n < 2) throw ValidationError("group table must have at least 2 elements");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw ValidationError("group table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw ValidationError("group table entry out of range");
  }
  for (int x = 0; x < n; ++x) {
    if (table[0][x] != x || table[x][0] != x)
      throw ValidationError("element 0 is not the identity of the group table");
    // Latin-square rows imply the existence of inverses.
    std::vector<bool> seen(n, false);
    for (int y = 0; y < n; ++y) seen[table[x][y]] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ValidationError("group table row " + std::to_string(x) + " is not a permutation");
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (table[table[x][y]][z] != table[x][table[y][z]])
          throw ValidationError("group table is not associative");
}

GroupFactor GroupFactor::finite(std::vector<std::vector<int>> table,
                                std::vector<std::string> names) {
  validate_group_table(table);
  if (names.size() + 1 != table.size())
    throw ValidationError("finite factor of order " + std::to_string(table.size()) + " needs " +
                          std::to_string(table.size() - 1) + " element names");
  GroupFactor f;
  f.order = static_cast<int>(table.size());
  f.table = std::move(table);
  f.names = std::move(names);
  return f;
}

GroupFactor GroupFactor::cyclic(int n, std::vector<std::string> names) {
  if (n < 2) throw ValidationError("cyclic factor order must be >= 2");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) table[x][y] = (x + y) % n;
  return finite(std::move(table), std::move(names));
}

GroupFactor GroupFactor::infinite_cyclic(std::string generator, std::string inverse) {
  GroupFactor f;
  f.order = 0;
  f.names = {std::move(generator), std::move(inverse)};
  return f;
}

namespace {

Alphabet alphabet_for(const std::vector<GroupFactor>& factors) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& f : factors) {
    if (f.infinite()) {
      if (f.names.size() != 2) throw ValidationError("infinite cyclic factor needs 2 names");
      pairs.emplace_back(f.names[0], f.names[1]);
      pairs.emplace_back(f.names[1], f.names[0]);
      continue;
    }
    for (int x = 1; x < f.order; ++x) {
      int inv = 0;
      while (f.table[x][inv] != 0) ++inv;
      pairs.emplace_back(f.names[x - 1], f.names[inv - 1]);
    }
  }
  return Alphabet(pairs);
}

}  // namespace

FreeProductAlgebra::FreeProductAlgebra(std::vector<GroupFactor> factors)
    : factors_(std::move(factors)), alphabet_(alphabet_for(factors_)) {
  if (factors_.empty()) throw ValidationError("free product needs at least one factor");
  finite_labels_.resize(factors_.size());
  Label next = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto& factor = factors_[f];
    if (factor.infinite()) {
      label_factor_.push_back(static_cast<int>(f));
      label_value_.push_back(1);
      label_factor_.push_back(static_cast<int>(f));
      label_value_.push_back(-1);
      next += 2;
      continue;
    }
    finite_labels_[f].assign(factor.order, 0);
    for (int x = 1; x < factor.order; ++x) {
      label_factor_.push_back(static_cast<int>(f));
      label_value_.push_back(x);
      finite_labels_[f][x] = next++;
    }
  }
}

Label FreeProductAlgebra::label_of(int factor, int value) const {
  return finite_labels_.at(factor).at(value);
}

void FreeProductAlgebra::multiply(std::vector<std::int32_t>& parts, std::size_t offset,
                                  Label a) const {
  const int f = label_factor_.at(a);
  const int x = label_value_[a];
  if (parts.size() > offset && parts[parts.size() - 2] == f) {
    auto& last = parts.back();
    const auto& factor = factors_[f];
    last = factor.infinite() ? last + x : factor.table[last][x];
    if (last == 0) parts.resize(parts.size() - 2);
    return;
  }
  parts.push_back(f);
  parts.push_back(x);
}

void FreeProductAlgebra::validate(const std::vector<std::int32_t>& parts,
                                  std::size_t offset) const {
  if (parts.size() < offset || (parts.size() - offset) % 2 != 0)
    throw KeyError("normal form has odd length");
  int previous = -1;
  for (std::size_t i = offset; i < parts.size(); i += 2) {
    const int f = parts[i];
    const int v = parts[i + 1];
    if (f < 0 || f >= static_cast<int>(factors_.size())) throw KeyError("factor index out of range");
    if (f == previous) throw KeyError("adjacent syllables from the same factor");
    const auto& factor = factors_[f];
    if (v == 0 || (!factor.infinite() && (v < 0 || v >= factor.order)))
      throw KeyError("syllable value out of range");
    previous = f;
  }
}

std::string FreeProductAlgebra::format(const std::vector<std::int32_t>& parts,
                                       std::size_t offset) const {
  std::vector<Label> word;
  for (std::size_t i = offset; i + 1 < parts.size(); i += 2) {
    const int f = parts[i];
    const int v = parts[i + 1];
    const auto& factor = factors_[f];
    if (factor.infinite()) {
      // Labels of an infinite cyclic factor are consecutive: generator, inverse.
      Label gen = 0;
      while (label_factor_[gen] != f) ++gen;
      for (int k = 0; k < std::abs(v); ++k) word.push_back(v > 0 ? gen : gen + 1);
    } else {
      word.push_back(finite_labels_[f][v]);
    }
  }
  return alphabet_.format_word(word);
}

FreeProductOracle::FreeProductOracle(FreeProductAlgebra algebra)
    : GraphOracle(algebra.alphabet()), algebra_(std::move(algebra)) {
  const bool all_infinite = std::all_of(algebra_.factors().begin(), algebra_.factors().end(),
                                        [](const GroupFactor& f) { return f.infinite(); });
  kind_ = all_infinite ? "free_group" : "free_product";
}

VertexKey FreeProductOracle::neighbor(const VertexKey& x, Label a) const {
  algebra_.validate(x.parts, 0);
  if (a >= alphabet().size()) throw AlphabetError("label out of range");
  VertexKey y = x;
  algebra_.multiply(y.parts, 0, a);
  return y;
}

std::string FreeProductOracle::format_key(const VertexKey& x) const {
  if (x.parts.empty()) return "e";
  return algebra_.format(x.parts, 0);
}

namespace {

// Coset-table style folding: a partial deterministic graph with union-find
// coincidence processing.
class Folder {
 public:
  Folder(const FreeProductAlgebra& algebra) : algebra_(algebra), labels_(algebra.alphabet().size()) {
    add_vertex();
  }

  int add_vertex() {
    next_.emplace_back(labels_, -1);
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  int target(int v, Label a) {
    const int t = next_[find(v)][a];
    return t < 0 ? -1 : find(t);
  }

  void define(int u, Label a, int v) {
    const Label inv = algebra_.alphabet().inverse(a);
    u = find(u);
    v = find(v);
    if (next_[u][a] >= 0)
      merge(next_[u][a], v);
    else
      next_[u][a] = v;
    u = find(u);
    v = find(v);
    if (next_[v][inv] >= 0)
      merge(next_[v][inv], u);
    else
      next_[v][inv] = u;
  }

  void merge(int x, int y) {
    std::deque<std::pair<int, int>> queue{{x, y}};
    while (!queue.empty()) {
      auto [a, b] = queue.front();
      queue.pop_front();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      parent_[b] = a;
      for (Label l = 0; l < labels_; ++l) {
        int t = next_[b][l];
        if (t < 0) continue;
        next_[b][l] = -1;
        t = find(t);
        const int s = next_[a][l];
        if (s < 0)
          next_[a][l] = t;
        else if (find(s) != t)
          queue.emplace_back(s, t);
      }
    }
  }

  void trace_relator(const std::vector<Label>& word) {
    if (word.empty()) return;
    int current = 0;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      int t = target(current, word[i]);
      if (t < 0) {
        t = add_vertex();
        define(current, word[i], t);
      }
      current = find(t);
    }
    define(current, word.back(), 0);
  }

  // Every finite factor that acts at a vertex must act as on a coset space
  // of that factor: complete the edges and impose u.x.y = u.(xy).
  void complete_finite_factors() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int u = 0; u < static_cast<int>(next_.size()); ++u) {
        if (find(u) != u) continue;
        for (std::size_t f = 0; f < algebra_.factors().size(); ++f) {
          const auto& factor = algebra_.factors()[f];
          if (factor.infinite()) continue;
          bool acts = false;
          for (int x = 1; x < factor.order; ++x)
            acts = acts || target(u, algebra_.label_of(static_cast<int>(f), x)) >= 0;
          if (!acts) continue;
          for (int x = 1; x < factor.order && find(u) == u; ++x) {
            const Label lx = algebra_.label_of(static_cast<int>(f), x);
            if (target(u, lx) < 0) {
              define(u, lx, add_vertex());
              changed = true;
            }
          }
          for (int x = 1; x < factor.order && find(u) == u; ++x) {
            for (int y = 1; y < factor.order && find(u) == u; ++y) {
              const Label lx = algebra_.label_of(static_cast<int>(f), x);
              const Label ly = algebra_.label_of(static_cast<int>(f), y);
              const int xy = factor.table[x][y];
              const int expected = xy == 0 ? u : target(u, algebra_.label_of(static_cast<int>(f), xy));
              const int mid = target(u, lx);
              if (mid < 0 || expected < 0) continue;
              const int got = target(mid, ly);
              if (got < 0) {
                define(mid, ly, expected);
                changed = true;
              } else if (got != find(expected)) {
                merge(got, expected);
                changed = true;
              }
            }
          }
        }
      }
    }
  }

  // Live vertices renumbered in label-ordered BFS order from the root.
  std::vector<std::vector<int>> extract() {
    std::vector<int> order;
    std::vector<int> id(next_.size(), -1);
    const int root = find(0);
    id[root] = 0;
    order.push_back(root);
    for (std::size_t head = 0; head < order.size(); ++head) {
      for (Label l = 0; l < labels_; ++l) {
        const int t = target(order[head], l);
        if (t >= 0 && id[t] < 0) {
          id[t] = static_cast<int>(order.size());
          order.push_back(t);
        }
      }
    }
    std::vector<std::vector<int>> core(order.size(), std::vector<int>(labels_, -1));
    for (std::size_t v = 0; v < order.size(); ++v)
      for (Label l = 0; l < labels_; ++l) {
        const int t = target(order[v], l);
        core[v][l] = t < 0 ? -1 : id[t];
      }
    return core;
  }

 private:
  const FreeProductAlgebra& algebra_;
  std::size_t labels_;
  std::vector<std::vector<int>> next_;
  std::vector<int> parent_;
};

}  // namespace

SchreierOracle::SchreierOracle(FreeProductAlgebra algebra,
                               const std::vector<std::string>& generators)
    : GraphOracle(algebra.alphabet()), algebra_(std::move(algebra)) {
  Folder folder(algebra_);
  for (const auto& g : generators) folder.trace_relator(alphabet().parse_word(g));
  folder.complete_finite_factors();
  core_ = folder.extract();
  const bool complete = std::all_of(core_.begin(), core_.end(), [](const std::vector<int>& row) {
    return std::all_of(row.begin(), row.end(), [](int t) { return t >= 0; });
  });
  if (complete)
    throw ValidationError("subgroup has finite index: the Schreier graph is finite (" +
                          std::to_string(core_.size()) + " cosets)");
}

void SchreierOracle::validate(const VertexKey& x) const {
  if (x.parts.empty()) throw KeyError("empty Schreier key");
  const int v = x.parts[0];
  if (v < 0 || v >= static_cast<int>(core_.size())) throw KeyError("core vertex out of range");
  algebra_.validate(x.parts, 1);
  if (x.parts.size() > 1) {
    const int f = x.parts[1];
    const int value = x.parts[2];
    const auto& factor = algebra_.factors()[f];
    for (Label a = 0; a < alphabet().size(); ++a) {
      if (algebra_.factor_of(a) != f || core_[v][a] < 0) continue;
      // An infinite cyclic direction is only blocked in the sign it uses.
      if (!factor.infinite() || (algebra_.value_of(a) > 0) == (value > 0))
        throw KeyError("hanging word starts in a core direction");
    }
  }
}

VertexKey SchreierOracle::neighbor(const VertexKey& x, Label a) const {
  validate(x);
  if (a >= alphabet().size()) throw AlphabetError("label out of range");
  const int v = x.parts[0];
  if (x.parts.size() == 1 && core_[v][a] >= 0) return VertexKey{{core_[v][a]}};
  VertexKey y = x;
  algebra_.multiply(y.parts, 1, a);
  return y;
}

std::string SchreierOracle::format_key(const VertexKey& x) const {
  std::string out = "K" + std::to_string(x.parts.at(0));
  if (x.parts.size() > 1) out += "." + algebra_.format(x.parts, 1);
  return out;
}

OraclePtr make_free_group(int rank) {
  if (rank < 1) throw ValidationError("free group rank must be >= 1");
  if (rank > 26) throw ValidationError("free group rank must be <= 26");
  std::vector<GroupFactor> factors;
  for (int i = 0; i < rank; ++i)
    factors.push_back(GroupFactor::infinite_cyclic(std::string(1, static_cast<char>('a' + i)),
                                                   std::string(1, static_cast<char>('A' + i))));
  return std::make_shared<FreeProductOracle>(FreeProductAlgebra(std::move(factors)));
}

OraclePtr make_free_product(std::vector<GroupFactor> factors) {
  if (factors.size() < 2) throw ValidationError("a free product needs at least 2 factors");
  return std::make_shared<FreeProductOracle>(FreeProductAlgebra(std::move(factors)));
}

OraclePtr make_subgroup_schreier(int rank, const std::vector<std::string>& generators) {
  if (rank < 1 || rank > 26) throw ValidationError("free group rank must be in [1, 26]");
  std::vector<GroupFactor> factors;
  for (int i = 0; i < rank; ++i)
    factors.push_back(GroupFactor::infinite_cyclic(std::string(1, static_cast<char>('a' + i)),
                                                   std::string(1, static_cast<char>('A' + i))));
  return std::make_shared<SchreierOracle>(FreeProductAlgebra(std::move(factors)), generators);
}

OraclePtr make_subgroup_schreier(std::vector<GroupFactor> factors,
                                 const std::vector<std::string>& generators) {
  return std::make_shared<SchreierOracle>(FreeProductAlgebra(std::move(factors)), generators);
}

}  // namespace cfwalk
