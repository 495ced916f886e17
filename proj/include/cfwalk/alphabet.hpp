#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cfwalk {

/// Index of a symbol inside its alphabet.
using Label = std::uint32_t;

/// A finite, ordered label alphabet together with an involution a -> a^-1.
///
/// Self-inverse symbols are allowed; order-2 generators of free products need
/// them.
class Alphabet {
 public:
  Alphabet() = default;

  /// Builds an alphabet from (name, inverse name) pairs. Each name must appear
  /// exactly once as a symbol; the pairing must be an involution.
  explicit Alphabet(const std::vector<std::pair<std::string, std::string>>& pairs);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(Label a) const;
  Label inverse(Label a) const;
  Label find(std::string_view name) const;
  bool contains(std::string_view name) const noexcept;
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Name-level inversion: invert_label("a") == "A" for the free group.
  const std::string& invert_label(std::string_view name) const;

  /// Splits a word into labels by greedy longest match; spaces separate tokens.
  std::vector<Label> parse_word(std::string_view word) const;
  std::string format_word(const std::vector<Label>& word) const;

  bool operator==(const Alphabet& other) const {
    return names_ == other.names_ && inverse_ == other.inverse_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Label> inverse_;
  std::unordered_map<std::string, Label> index_;
};

/// Standard free-group alphabet of rank k: a, A, b, B, ... (lowercase
/// generator followed by its uppercase inverse).
Alphabet free_group_alphabet(int rank);

}  // namespace cfwalk
