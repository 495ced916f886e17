#include "cfwalk/alphabet.hpp"

#include <algorithm>

#include "cfwalk/errors.hpp"

namespace cfwalk {

Alphabet::Alphabet(const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& [name, inv] : pairs) {
    if (name.empty()) throw AlphabetError("empty symbol name");
    if (name.find(' ') != std::string::npos)
      throw AlphabetError("symbol name '" + name + "' contains a space");
    if (!index_.emplace(name, static_cast<Label>(names_.size())).second)
      throw AlphabetError("duplicate symbol '" + name + "'");
    names_.push_back(name);
  }
  inverse_.resize(names_.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto it = index_.find(pairs[i].second);
    if (it == index_.end())
      throw AlphabetError("inverse '" + pairs[i].second + "' of '" + pairs[i].first +
                          "' is not a symbol");
    inverse_[i] = it->second;
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (inverse_[inverse_[i]] != i)
      throw AlphabetError("inverse map is not an involution at '" + names_[i] + "'");
  }
}

const std::string& Alphabet::name(Label a) const {
  if (a >= names_.size()) throw AlphabetError("label index " + std::to_string(a) + " out of range");
  return names_[a];
}

Label Alphabet::inverse(Label a) const {
  if (a >= inverse_.size())
    throw AlphabetError("label index " + std::to_string(a) + " out of range");
  return inverse_[a];
}

Label Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw AlphabetError("unknown symbol '" + std::string(name) + "'");
  return it->second;
}

bool Alphabet::contains(std::string_view name) const noexcept {
  return index_.count(std::string(name)) != 0;
}

const std::string& Alphabet::invert_label(std::string_view name) const {
  return names_[inverse_[find(name)]];
}

std::vector<Label> Alphabet::parse_word(std::string_view word) const {
  std::size_t longest = 0;
  for (const auto& n : names_) longest = std::max(longest, n.size());
  std::vector<Label> out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    if (word[pos] == ' ') {
      ++pos;
      continue;
    }
    bool matched = false;
    for (std::size_t len = std::min(longest, word.size() - pos); len > 0; --len) {
      auto it = index_.find(std::string(word.substr(pos, len)));
      if (it != index_.end()) {
        out.push_back(it->second);
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched)
      throw AlphabetError("cannot parse word '" + std::string(word) + "' at position " +
                          std::to_string(pos));
  }
  return out;
}

std::string Alphabet::format_word(const std::vector<Label>& word) const {
  bool single = std::all_of(names_.begin(), names_.end(),
                            [](const std::string& n) { return n.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single && i > 0) out += ' ';
    out += name(word[i]);
  }
  return out;
}

Alphabet free_group_alphabet(int rank) {
  if (rank < 1 || rank > 26)
    throw AlphabetError("free group rank must be in [1, 26], got " + std::to_string(rank));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < rank; ++i) {
    std::string lower(1, static_cast<char>('a' + i));
    std::string upper(1, static_cast<char>('A' + i));
    pairs.emplace_back(lower, upper);
    pairs.emplace_back(upper, lower);
  }
  return Alphabet(pairs);
}

}  // namespace cfwalk
