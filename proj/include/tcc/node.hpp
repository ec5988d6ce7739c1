#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tcc {

using nat = std::uint32_t;

struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_params : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Finite truncation caps for enumeration universes.
/// height == 0 means unbounded depth, width == 0 means unbounded entries;
/// otherwise nodes must have depth <= height and every entry < width.
struct Caps {
  std::size_t height = 8;
  nat width = 0;

  bool allows_depth(std::size_t d) const { return height == 0 || d <= height; }
  bool allows_entry(nat e) const { return width == 0 || e < width; }
};

/// A node of the tree: a nonempty finite sequence of naturals.
class Node {
 public:
  explicit Node(std::vector<nat> entries) : entries_(std::move(entries)) {
    if (entries_.empty())
      throw std::invalid_argument("Node: entry sequence must be nonempty");
  }
  Node(std::initializer_list<nat> xs) : Node(std::vector<nat>(xs)) {}

  const std::vector<nat>& entries() const { return entries_; }
  std::size_t depth() const { return entries_.size(); }
  nat operator[](std::size_t i) const { return entries_[i]; }
  nat last() const { return entries_.back(); }

  bool operator==(const Node&) const = default;

 private:
  std::vector<nat> entries_;
};

/// Stems seed constructions; the root is not a member of the tree, so a
/// stem is "node or root".
using Stem = std::optional<Node>;

inline std::span<const nat> stem_entries(const Stem& s) {
  return s ? std::span<const nat>(s->entries()) : std::span<const nat>();
}

inline std::size_t stem_depth(const Stem& s) { return s ? s->depth() : 0; }

inline bool within_caps(std::span<const nat> entries, const Caps& caps) {
  if (!caps.allows_depth(entries.size())) return false;
  return std::all_of(entries.begin(), entries.end(),
                     [&](nat e) { return caps.allows_entry(e); });
}

inline bool within_caps(const Node& n, const Caps& caps) {
  return within_caps(std::span<const nat>(n.entries()), caps);
}

/// Tree order: s <= t iff s is a prefix of t.
inline bool tree_leq(const Node& s, const Node& t) {
  if (s.depth() > t.depth()) return false;
  return std::equal(s.entries().begin(), s.entries().end(),
                    t.entries().begin());
}

inline bool stem_leq(const Stem& s, const Node& t) {
  auto se = stem_entries(s);
  if (se.size() > t.depth()) return false;
  return std::equal(se.begin(), se.end(), t.entries().begin());
}

enum class Ord { LT, EQ, GT };

/// The linear order extending the tree order: s < t iff s is a proper
/// prefix of t, or s has the larger entry at the first position where
/// they differ.  Sibling successors s^k are thus decreasing in k, a copy
/// of omega reversed converging down to s.
inline Ord lin_cmp(const Node& s, const Node& t) {
  const auto& a = s.entries();
  const auto& b = t.entries();
  std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i] != b[i]) return a[i] > b[i] ? Ord::LT : Ord::GT;
  }
  if (a.size() == b.size()) return Ord::EQ;
  return a.size() < b.size() ? Ord::LT : Ord::GT;
}

inline bool lin_less(const Node& s, const Node& t) {
  return lin_cmp(s, t) == Ord::LT;
}

struct LinLess {
  bool operator()(const Node& s, const Node& t) const { return lin_less(s, t); }
};

/// s^k: append k to the stem. Throws cap_exceeded when the result would
/// leave the capped universe.
inline Node succ(const Stem& s, nat k, const Caps& caps = Caps{}) {
  std::vector<nat> e(stem_entries(s).begin(), stem_entries(s).end());
  e.push_back(k);
  if (!caps.allows_depth(e.size()) || !caps.allows_entry(k))
    throw cap_exceeded("succ: height/width cap exceeded");
  return Node(std::move(e));
}

/// Closed-form membership in the open interval (s, s^k): t lies strictly
/// between s and s^k iff t properly extends s and t's entry right after s
/// exceeds k.
inline bool interval_contains(const Node& s, nat k, const Node& t) {
  if (t.depth() <= s.depth()) return false;
  if (!tree_leq(s, t)) return false;
  return t[s.depth()] > k;
}

/// Direct two-comparison form of interval membership; the oracle the
/// closed form is checked against.
inline bool interval_contains_cmp(const Node& s, nat k, const Node& t) {
  std::vector<nat> e = s.entries();
  e.push_back(k);
  Node sk(std::move(e));
  return lin_cmp(s, t) == Ord::LT && lin_cmp(t, sk) == Ord::LT;
}

/// Longest common prefix; root when the first entries already differ.
inline Stem meet(const Node& s, const Node& t) {
  std::size_t m = std::min(s.depth(), t.depth());
  std::size_t i = 0;
  while (i < m && s[i] == t[i]) ++i;
  if (i == 0) return std::nullopt;
  return Node(std::vector<nat>(s.entries().begin(), s.entries().begin() + i));
}

// --- text form -------------------------------------------------------
// Dot-separated decimals, e.g. "0.3.17"; the root stem is "^".

inline std::string to_string(const Node& n) {
  std::string out;
  for (std::size_t i = 0; i < n.depth(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(n[i]);
  }
  return out;
}

inline std::string to_string(const Stem& s) {
  return s ? to_string(*s) : std::string("^");
}

namespace detail {

inline nat parse_nat(std::string_view text, std::size_t& pos) {
  std::size_t start = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  if (pos == start) throw parse_error("expected a natural number");
  std::string_view digits = text.substr(start, pos - start);
  if (digits.size() > 1 && digits[0] == '0')
    throw parse_error("leading zeros are not canonical");
  unsigned long long v = 0;
  for (char c : digits) {
    v = v * 10 + static_cast<unsigned>(c - '0');
    if (v > 0xffffffffull) throw parse_error("entry out of range");
  }
  return static_cast<nat>(v);
}

}  // namespace detail

inline Node parse_node(std::string_view text) {
  std::size_t pos = 0;
  std::vector<nat> entries;
  entries.push_back(detail::parse_nat(text, pos));
  while (pos < text.size() && text[pos] == '.') {
    ++pos;
    entries.push_back(detail::parse_nat(text, pos));
  }
  if (pos != text.size()) throw parse_error("trailing characters after node");
  return Node(std::move(entries));
}

inline Stem parse_stem(std::string_view text) {
  if (text == "^") return std::nullopt;
  return parse_node(text);
}

}  // namespace tcc
