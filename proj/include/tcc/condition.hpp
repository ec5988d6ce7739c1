#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "tcc/node.hpp"

namespace tcc {

/// Finite descriptor of a canonical convergent sequence:
/// the point set { limit^k^suffix : k >= index_from }, converging down to
/// `limit` in the linear order.
struct Ray {
  Node limit;
  nat index_from = 0;
  std::vector<nat> suffix;

  Node at(nat k) const {
    std::vector<nat> e = limit.entries();
    e.push_back(k);
    e.insert(e.end(), suffix.begin(), suffix.end());
    return Node(std::move(e));
  }

  /// Solves limit^k^suffix == t; returns k when t is generated.
  std::optional<nat> index_of(const Node& t) const {
    std::size_t want = limit.depth() + 1 + suffix.size();
    if (t.depth() != want) return std::nullopt;
    if (!tree_leq(limit, t)) return std::nullopt;
    for (std::size_t i = 0; i < suffix.size(); ++i)
      if (t[limit.depth() + 1 + i] != suffix[i]) return std::nullopt;
    nat k = t[limit.depth()];
    if (k < index_from) return std::nullopt;
    return k;
  }

  bool operator==(const Ray&) const = default;
};

/// An element F of the ordering, finitely represented: the set
///   limits  U  (all ray points)  U  explicit_pts.
/// Valid conditions have accumulation set exactly `limits`.
struct Condition {
  std::vector<Node> limits;
  std::vector<Ray> rays;
  std::vector<Node> explicit_pts;

  bool operator==(const Condition&) const = default;
};

enum class ValidationIssue {
  EmptyCondition,
  LimitWithoutRay,
  RayLimitNotDeclared,
  ExplicitEqualsLimit,
  CapExceeded,
};

inline std::string to_string(ValidationIssue v) {
  switch (v) {
    case ValidationIssue::EmptyCondition: return "EmptyCondition";
    case ValidationIssue::LimitWithoutRay: return "LimitWithoutRay";
    case ValidationIssue::RayLimitNotDeclared: return "RayLimitNotDeclared";
    case ValidationIssue::ExplicitEqualsLimit: return "ExplicitEqualsLimit";
    case ValidationIssue::CapExceeded: return "CapExceeded";
  }
  return "?";
}

/// First violated invariant, or nullopt when the condition is valid.
inline std::optional<ValidationIssue> validate(const Condition& f,
                                               const Caps& caps = Caps{}) {
  if (f.limits.empty() && f.explicit_pts.empty())
    return ValidationIssue::EmptyCondition;
  for (const Node& s : f.limits) {
    bool has_ray = false;
    for (const Ray& r : f.rays) has_ray = has_ray || r.limit == s;
    if (!has_ray) return ValidationIssue::LimitWithoutRay;
  }
  for (const Ray& r : f.rays) {
    bool declared = false;
    for (const Node& s : f.limits) declared = declared || r.limit == s;
    if (!declared) return ValidationIssue::RayLimitNotDeclared;
  }
  for (const Node& p : f.explicit_pts)
    for (const Node& s : f.limits)
      if (p == s) return ValidationIssue::ExplicitEqualsLimit;
  for (const Node& s : f.limits)
    if (!within_caps(s, caps)) return ValidationIssue::CapExceeded;
  for (const Ray& r : f.rays) {
    // every generated point respects caps except the unbounded index k
    if (!caps.allows_depth(r.limit.depth() + 1 + r.suffix.size()))
      return ValidationIssue::CapExceeded;
    for (nat e : r.suffix)
      if (!caps.allows_entry(e)) return ValidationIssue::CapExceeded;
  }
  for (const Node& p : f.explicit_pts)
    if (!within_caps(p, caps)) return ValidationIssue::CapExceeded;
  return std::nullopt;
}

inline bool is_valid(const Condition& f, const Caps& caps = Caps{}) {
  return !validate(f, caps).has_value();
}

/// Set membership of the represented point set.
inline bool member(const Condition& f, const Node& t) {
  for (const Node& s : f.limits)
    if (s == t) return true;
  for (const Node& p : f.explicit_pts)
    if (p == t) return true;
  for (const Ray& r : f.rays)
    if (r.index_of(t)) return true;
  return false;
}

/// The accumulation set F^d. Exactly the declared limits for a valid
/// condition (each ray accumulates only at its limit; everything else is
/// finite).
inline std::vector<Node> d_set(const Condition& f) { return f.limits; }

inline bool is_limit_of(const Condition& f, const Node& t) {
  for (const Node& s : f.limits)
    if (s == t) return true;
  return false;
}

/// Canonical form: sorted components, duplicate limits removed, rays equal
/// in (limit,suffix) merged to the least index, explicit points already
/// generated by a limit or a ray absorbed, and explicit points one step
/// below a ray folded into the ray.  Canonical forms are the equality
/// notion for conditions.
inline Condition canonical(Condition f) {
  std::sort(f.limits.begin(), f.limits.end(), LinLess{});
  f.limits.erase(std::unique(f.limits.begin(), f.limits.end()),
                 f.limits.end());

  // merge rays sharing (limit, suffix)
  std::map<std::pair<std::vector<nat>, std::vector<nat>>, nat> merged;
  for (const Ray& r : f.rays) {
    auto key = std::make_pair(r.limit.entries(), r.suffix);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(key, r.index_from);
    else
      it->second = std::min(it->second, r.index_from);
  }
  f.rays.clear();
  for (const auto& [key, from] : merged)
    f.rays.push_back(Ray{Node(key.first), from, key.second});

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Node> kept;
    for (const Node& p : f.explicit_pts) {
      bool absorbed = is_limit_of(f, p);
      for (const Ray& r : f.rays) absorbed = absorbed || r.index_of(p).has_value();
      if (!absorbed) {
        // a point one index below a ray extends the ray downward
        for (Ray& r : f.rays) {
          if (r.index_from > 0 && p == r.at(r.index_from - 1)) {
            --r.index_from;
            absorbed = true;
            changed = true;
            break;
          }
        }
      }
      if (!absorbed) kept.push_back(p);
    }
    f.explicit_pts = std::move(kept);
  }

  std::sort(f.rays.begin(), f.rays.end(), [](const Ray& a, const Ray& b) {
    if (a.limit != b.limit) return lin_less(a.limit, b.limit);
    if (a.suffix != b.suffix) return a.suffix < b.suffix;
    return a.index_from < b.index_from;
  });
  std::sort(f.explicit_pts.begin(), f.explicit_pts.end(), LinLess{});
  f.explicit_pts.erase(
      std::unique(f.explicit_pts.begin(), f.explicit_pts.end()),
      f.explicit_pts.end());
  return f;
}

inline bool canonically_equal(const Condition& f, const Condition& g) {
  return canonical(f) == canonical(g);
}

/// Set union of the represented sets, in canonical form.  The union of two
/// valid conditions is always valid.
inline Condition union_of(const Condition& f, const Condition& g) {
  Condition u = f;
  u.limits.insert(u.limits.end(), g.limits.begin(), g.limits.end());
  u.rays.insert(u.rays.end(), g.rays.begin(), g.rays.end());
  u.explicit_pts.insert(u.explicit_pts.end(), g.explicit_pts.begin(),
                        g.explicit_pts.end());
  return canonical(u);
}

/// Inclusion of represented sets.  Exact: two rays overlap in infinitely
/// many points only when they share (limit, suffix), so each ray of f must
/// be matched by one of g up to finitely many explicitly covered points.
inline bool subset(const Condition& f, const Condition& g) {
  for (const Node& s : f.limits)
    if (!member(g, s)) return false;
  for (const Node& p : f.explicit_pts)
    if (!member(g, p)) return false;
  Condition gc = canonical(g);
  for (const Ray& r : f.rays) {
    const Ray* match = nullptr;
    for (const Ray& q : gc.rays)
      if (q.limit == r.limit && q.suffix == r.suffix) match = &q;
    if (!match) return false;
    for (nat k = r.index_from; k < match->index_from; ++k)
      if (!member(g, r.at(k))) return false;
  }
  return true;
}

/// F restricted to the open interval (s, s^k): finitely many points plus
/// at most one tail per ray.
struct IntervalSlice {
  std::vector<Node> points;
  std::vector<Ray> tails;

  bool empty() const { return points.empty() && tails.empty(); }
};

inline IntervalSlice intersect_interval(const Condition& f, const Node& s,
                                        nat k) {
  IntervalSlice out;
  for (const Node& t : f.limits)
    if (interval_contains(s, k, t)) out.points.push_back(t);
  for (const Node& t : f.explicit_pts)
    if (interval_contains(s, k, t)) out.points.push_back(t);
  for (const Ray& r : f.rays) {
    if (r.limit.depth() > s.depth()) {
      // the whole tail sits inside or outside, decided by the fixed prefix
      std::vector<nat> probe = r.limit.entries();
      probe.push_back(r.index_from);
      probe.insert(probe.end(), r.suffix.begin(), r.suffix.end());
      if (interval_contains(s, k, Node(std::move(probe)))) out.tails.push_back(r);
    } else if (r.limit.depth() == s.depth()) {
      if (r.limit == s) out.tails.push_back(Ray{r.limit, std::max(r.index_from, k + 1), r.suffix});
    } else {
      // at most one generated point can extend s
      if (!tree_leq(r.limit, s)) continue;
      nat j = s[r.limit.depth()];
      if (j < r.index_from) continue;
      Node pt = r.at(j);
      if (tree_leq(s, pt) && pt != s && interval_contains(s, k, pt))
        out.points.push_back(pt);
    }
  }
  std::sort(out.points.begin(), out.points.end(), LinLess{});
  out.points.erase(std::unique(out.points.begin(), out.points.end()),
                   out.points.end());
  return out;
}

namespace detail {

inline Node rebase_node(const Node& n, const Stem& from, const Stem& to) {
  auto fe = stem_entries(from);
  if (!stem_leq(from, n))
    throw std::invalid_argument("rebase: node does not extend the old stem");
  std::vector<nat> e(stem_entries(to).begin(), stem_entries(to).end());
  e.insert(e.end(), n.entries().begin() + fe.size(), n.entries().end());
  if (e.empty())
    throw std::invalid_argument("rebase: node would collapse to the root");
  return Node(std::move(e));
}

}  // namespace detail

/// Stem transplant: replaces the prefix `from` of every node of f by `to`.
/// The subtree above any node is order-isomorphic to the whole tree, so
/// this preserves every structural quantity of the condition.
inline Condition rebase(const Condition& f, const Stem& from, const Stem& to) {
  Condition out;
  for (const Node& s : f.limits)
    out.limits.push_back(detail::rebase_node(s, from, to));
  for (const Ray& r : f.rays)
    out.rays.push_back(
        Ray{detail::rebase_node(r.limit, from, to), r.index_from, r.suffix});
  for (const Node& p : f.explicit_pts)
    out.explicit_pts.push_back(detail::rebase_node(p, from, to));
  return canonical(out);
}

/// Prepend a stem to every node (the translation map used for evidence
/// transplant).
inline Condition transplant(const Condition& f, const Stem& stem) {
  return rebase(f, std::nullopt, stem);
}

// --- random corpus generation ---------------------------------------

struct RandomParams {
  nat max_limits = 2;
  nat max_rays_per_limit = 2;
  nat max_explicit = 3;
  std::size_t max_height = 3;
  nat max_entry = 4;
  nat max_suffix_len = 1;
  nat max_index_from = 3;
  bool allow_pure_explicit = true;
};

namespace detail {

inline Node random_node(std::mt19937_64& rng, const RandomParams& p,
                        std::size_t max_depth) {
  std::uniform_int_distribution<std::size_t> dlen(1, std::max<std::size_t>(1, max_depth));
  std::uniform_int_distribution<nat> dent(0, p.max_entry ? p.max_entry - 1 : 0);
  std::vector<nat> e(dlen(rng));
  for (nat& x : e) x = dent(rng);
  return Node(std::move(e));
}

}  // namespace detail

/// Deterministic corpus generator; identical output for identical seeds.
inline Condition random_condition(const RandomParams& p, std::mt19937_64& rng) {
  if (p.max_limits == 0 && p.max_explicit == 0)
    throw invalid_params("random_condition: a condition must be nonempty");
  if (p.max_height < 2 && p.max_limits > 0)
    throw invalid_params("random_condition: rays need height >= 2");
  Condition f;
  nat lo = (p.max_explicit == 0 || !p.allow_pure_explicit) ? 1 : 0;
  std::uniform_int_distribution<nat> dlim(std::min(lo, p.max_limits), p.max_limits);
  nat nlim = p.max_limits ? dlim(rng) : 0;
  std::uniform_int_distribution<nat> dray(1, std::max<nat>(1, p.max_rays_per_limit));
  std::uniform_int_distribution<nat> dfrom(0, p.max_index_from);
  std::uniform_int_distribution<nat> dsuf(0, p.max_suffix_len);
  std::uniform_int_distribution<nat> dent(0, p.max_entry ? p.max_entry - 1 : 0);
  for (nat i = 0; i < nlim; ++i) {
    // keep room for one ray index below the height cap
    Node s = detail::random_node(rng, p, p.max_height - 1);
    f.limits.push_back(s);
    nat nr = dray(rng);
    for (nat j = 0; j < nr; ++j) {
      nat sl = std::min<nat>(dsuf(rng),
                             static_cast<nat>(p.max_height - 1 - std::min(p.max_height - 1, s.depth())));
      std::vector<nat> suf(sl);
      for (nat& x : suf) x = dent(rng);
      f.rays.push_back(Ray{s, dfrom(rng), std::move(suf)});
    }
  }
  std::uniform_int_distribution<nat> dexp(nlim == 0 ? 1 : 0, std::max<nat>(1, p.max_explicit));
  nat nx = p.max_explicit ? dexp(rng) : 0;
  for (nat i = 0; i < nx; ++i)
    f.explicit_pts.push_back(detail::random_node(rng, p, p.max_height));
  f = canonical(f);
  if (f.limits.empty() && f.explicit_pts.empty())
    f.explicit_pts.push_back(detail::random_node(rng, p, p.max_height));
  return canonical(f);
}

inline Condition random_condition(const RandomParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_condition(p, rng);
}

// --- text form -------------------------------------------------------
// {L:[0,1];R:[(0;0;-),(1;0;-)];X:[]}  — whitespace-insensitive on input,
// canonical (sorted, no whitespace) on output.

inline std::string to_string(const Ray& r) {
  std::string out = "(" + to_string(r.limit) + ";" + std::to_string(r.index_from) + ";";
  if (r.suffix.empty()) {
    out += "-";
  } else {
    for (std::size_t i = 0; i < r.suffix.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(r.suffix[i]);
    }
  }
  out.push_back(')');
  return out;
}

inline std::string to_string(const Condition& f) {
  std::string out = "{L:[";
  for (std::size_t i = 0; i < f.limits.size(); ++i) {
    if (i) out.push_back(',');
    out += to_string(f.limits[i]);
  }
  out += "];R:[";
  for (std::size_t i = 0; i < f.rays.size(); ++i) {
    if (i) out.push_back(',');
    out += to_string(f.rays[i]);
  }
  out += "];X:[";
  for (std::size_t i = 0; i < f.explicit_pts.size(); ++i) {
    if (i) out.push_back(',');
    out += to_string(f.explicit_pts[i]);
  }
  out += "]}";
  return out;
}

namespace detail {

struct ConditionParser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\n' || text[pos] == '\r'))
      ++pos;
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) throw parse_error("unexpected end of condition");
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c)
      throw parse_error(std::string("expected '") + c + "' at offset " +
                        std::to_string(pos));
    ++pos;
  }
  void expect(std::string_view s) {
    for (char c : s) expect(c);
  }

  Node node() {
    skip_ws();
    std::vector<nat> e;
    e.push_back(parse_nat(text, pos));
    while (pos < text.size() && text[pos] == '.') {
      ++pos;
      e.push_back(parse_nat(text, pos));
    }
    return Node(std::move(e));
  }

  std::vector<Node> nodelist() {
    expect('[');
    std::vector<Node> out;
    if (peek() != ']') {
      out.push_back(node());
      while (peek() == ',') {
        ++pos;
        out.push_back(node());
      }
    }
    expect(']');
    return out;
  }

  Ray ray() {
    expect('(');
    Node limit = node();
    expect(';');
    skip_ws();
    nat from = parse_nat(text, pos);
    expect(';');
    std::vector<nat> suffix;
    if (peek() == '-') {
      ++pos;
    } else {
      suffix = node().entries();
    }
    expect(')');
    return Ray{std::move(limit), from, std::move(suffix)};
  }

  Condition condition() {
    Condition f;
    expect('{');
    expect("L:");
    f.limits = nodelist();
    expect(';');
    expect("R:");
    expect('[');
    if (peek() != ']') {
      f.rays.push_back(ray());
      while (peek() == ',') {
        ++pos;
        f.rays.push_back(ray());
      }
    }
    expect(']');
    expect(';');
    expect("X:");
    f.explicit_pts = nodelist();
    expect('}');
    skip_ws();
    if (pos != text.size()) throw parse_error("trailing characters after condition");
    return f;
  }
};

}  // namespace detail

/// Parses the condition grammar; the result is canonicalized.
inline Condition parse_condition(std::string_view text) {
  detail::ConditionParser p{text};
  return canonical(p.condition());
}

}  // namespace tcc
