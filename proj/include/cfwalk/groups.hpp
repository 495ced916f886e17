#pragma once

#include <string>
#include <vector>

#include "cfwalk/graph.hpp"

namespace cfwalk {

/// One free factor of a free product: either a finite group given by its
/// multiplication table (element 0 is the identity) or an infinite cyclic
/// group.
struct GroupFactor {
  /// 0 for the infinite cyclic group, otherwise the group order.
  int order = 0;
  std::vector<std::vector<int>> table;
  /// Finite factor: names of elements 1..order-1. Infinite cyclic: generator
  /// name followed by the inverse name.
  std::vector<std::string> names;

  bool infinite() const noexcept { return order == 0; }

  static GroupFactor finite(std::vector<std::vector<int>> table, std::vector<std::string> names);
  static GroupFactor cyclic(int n, std::vector<std::string> names);
  static GroupFactor infinite_cyclic(std::string generator, std::string inverse);
};

/// Checks closure, identity, inverses and associativity of a finite table.
void validate_group_table(const std::vector<std::vector<int>>& table);

/// Right multiplication of normal forms in a free product. A normal form is a
/// list of syllables (factor, value): value is a non-identity element of a
/// finite factor or a nonzero power of an infinite cyclic one, and adjacent
/// syllables belong to different factors.
class FreeProductAlgebra {
 public:
  explicit FreeProductAlgebra(std::vector<GroupFactor> factors);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<GroupFactor>& factors() const noexcept { return factors_; }
  int factor_of(Label a) const { return label_factor_[a]; }
  int value_of(Label a) const { return label_value_[a]; }
  /// Label of the element `value` of a finite factor (value != 0).
  Label label_of(int factor, int value) const;

  /// Multiplies the normal form stored in parts[offset..] by the label on the
  /// right, in place.
  void multiply(std::vector<std::int32_t>& parts, std::size_t offset, Label a) const;
  /// Throws KeyError unless parts[offset..] is a valid normal form.
  void validate(const std::vector<std::int32_t>& parts, std::size_t offset) const;
  std::string format(const std::vector<std::int32_t>& parts, std::size_t offset) const;

 private:
  std::vector<GroupFactor> factors_;
  Alphabet alphabet_;
  std::vector<int> label_factor_;
  std::vector<int> label_value_;
  std::vector<std::vector<Label>> finite_labels_;
};

/// Cayley graph of a free product of cyclic/finite factors on the alphabet of
/// all non-identity factor elements (plus generator/inverse pairs for the
/// infinite cyclic factors). Vertices are normal forms.
class FreeProductOracle : public GraphOracle {
 public:
  explicit FreeProductOracle(FreeProductAlgebra algebra);

  VertexKey root() const override { return {}; }
  VertexKey neighbor(const VertexKey& x, Label a) const override;
  std::string format_key(const VertexKey& x) const override;
  std::string kind() const override { return kind_; }

  const FreeProductAlgebra& algebra() const noexcept { return algebra_; }

 private:
  FreeProductAlgebra algebra_;
  std::string kind_;
};

/// Schreier graph of a finitely generated subgroup K of a free product of
/// finite and infinite cyclic groups. The folded finite core is stored
/// explicitly; vertices outside the core are (core vertex, normal form) pairs
/// that leave the core through an undefined direction.
class SchreierOracle : public GraphOracle {
 public:
  SchreierOracle(FreeProductAlgebra algebra, const std::vector<std::string>& generators);

  VertexKey root() const override { return VertexKey{{0}}; }
  VertexKey neighbor(const VertexKey& x, Label a) const override;
  std::string format_key(const VertexKey& x) const override;
  std::string kind() const override { return "subgroup_schreier"; }

  std::size_t core_size() const noexcept { return core_.size(); }
  /// Core edge target or -1 when the direction leaves the core.
  int core_edge(std::size_t vertex, Label a) const { return core_[vertex][a]; }

 private:
  void validate(const VertexKey& x) const;

  FreeProductAlgebra algebra_;
  std::vector<std::vector<int>> core_;
};

OraclePtr make_free_group(int rank);
OraclePtr make_free_product(std::vector<GroupFactor> factors);
/// Subgroup of the rank-k free group generated by words over a, A, b, B, ...
OraclePtr make_subgroup_schreier(int rank, const std::vector<std::string>& generators);
OraclePtr make_subgroup_schreier(std::vector<GroupFactor> factors,
                                 const std::vector<std::string>& generators);

}  // namespace cfwalk
