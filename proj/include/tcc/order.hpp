#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "tcc/condition.hpp"

namespace tcc {

/// F1 extends F2 when F1 contains F2 and preserves F2's isolated points:
/// F1 >= F2 as a set, and the accumulation points of F1 lying in F2 are
/// exactly the accumulation points of F2.
inline bool extends(const Condition& f1, const Condition& f2) {
  if (!subset(f2, f1)) return false;
  for (const Node& s : f2.limits)
    if (!is_limit_of(f1, s)) return false;
  for (const Node& s : f1.limits)
    if (member(f2, s) && !is_limit_of(f2, s)) return false;
  return true;
}

/// Two conditions are compatible exactly when neither turns an isolated
/// point of the other into an accumulation point; then their union is the
/// canonical common extension.
inline bool compatible(const Condition& f, const Condition& g) {
  for (const Node& s : g.limits)
    if (member(f, s) && !is_limit_of(f, s)) return false;
  for (const Node& s : f.limits)
    if (member(g, s) && !is_limit_of(g, s)) return false;
  return true;
}

struct Orthogonality {
  bool orthogonal = false;
  /// A blocking node: isolated in one condition, an accumulation point of
  /// the other. Present exactly when orthogonal.
  std::optional<Node> witness;
};

/// Checks the blocking predicate for a claimed witness, from members and
/// d_set alone.
inline bool is_blocking_witness(const Condition& f, const Condition& g,
                                const Node& t) {
  bool blocks_f = member(f, t) && is_limit_of(g, t) && !is_limit_of(f, t);
  bool blocks_g = member(g, t) && is_limit_of(f, t) && !is_limit_of(g, t);
  return blocks_f || blocks_g;
}

inline Orthogonality orthogonal(const Condition& f, const Condition& g) {
  for (const Node& s : g.limits)
    if (member(f, s) && !is_limit_of(f, s)) return {true, s};
  for (const Node& s : f.limits)
    if (member(g, s) && !is_limit_of(g, s)) return {true, s};
  return {false, std::nullopt};
}

struct incompatible_error : std::runtime_error {
  Node witness;
  explicit incompatible_error(Node w)
      : std::runtime_error("incompatible conditions, blocking witness " +
                           to_string(w)),
        witness(std::move(w)) {}
};

/// The union, when it is a common extension; throws with the blocking
/// witness otherwise.
inline Condition common_extension(const Condition& f, const Condition& g) {
  Orthogonality o = orthogonal(f, g);
  if (o.orthogonal) throw incompatible_error(*o.witness);
  return union_of(f, g);
}

}  // namespace tcc
