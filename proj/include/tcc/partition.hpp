#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcc/condition.hpp"
#include "tcc/order.hpp"

namespace tcc {

/// The least k such that, for every accumulation point s of F, the open
/// interval (s, s^k) contains no accumulation point of F.  Equivalently:
/// the largest branching entry between nested limits (0 when no limit
/// extends another).  Every k' >= k_of(F) has the same property.
inline nat k_of(const Condition& f) {
  nat k = 0;
  for (const Node& s : f.limits)
    for (const Node& t : f.limits) {
      if (t.depth() <= s.depth() || !tree_leq(s, t)) continue;
      k = std::max(k, t[s.depth()]);
    }
  return k;
}

/// The finite residue R(F) = F \ (union of (s, s^k(F)) over s in F^d,
/// together with F^d itself): the members caught neither by a limit's
/// interval nor by being a limit.
inline std::vector<Node> r_set(const Condition& f) {
  nat k = k_of(f);
  auto in_some_interval = [&](const Node& p) {
    for (const Node& s : f.limits)
      if (interval_contains(s, k, p)) return true;
    return false;
  };
  std::vector<Node> out;
  for (const Node& p : f.explicit_pts)
    if (!in_some_interval(p)) out.push_back(p);
  for (const Ray& r : f.rays) {
    // a ray point with index j > k sits in its own limit's interval, so
    // only the finitely many indices in [index_from, k] can survive
    for (nat j = r.index_from; j <= k; ++j) {
      Node p = r.at(j);
      if (!is_limit_of(f, p) && !in_some_interval(p)) out.push_back(p);
      if (j == k) break;  // guard nat wrap when k is maximal
    }
  }
  std::sort(out.begin(), out.end(), LinLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Partition index (k(F), |F^d|, |R(F)|); conditions sharing a signature
/// lie in one class of the sigma-finite partition.
struct Signature {
  nat k = 0;
  nat n = 0;
  nat m = 0;

  auto operator<=>(const Signature&) const = default;
};

inline Signature signature(const Condition& f) {
  return Signature{k_of(f), static_cast<nat>(f.limits.size()),
                   static_cast<nat>(r_set(f).size())};
}

inline std::string to_string(const Signature& s) {
  return "(" + std::to_string(s.k) + "," + std::to_string(s.n) + "," +
         std::to_string(s.m) + ")";
}

struct signature_mismatch : std::runtime_error {
  Signature left, right;
  signature_mismatch(Signature l, Signature r)
      : std::runtime_error("signature mismatch: " + to_string(l) + " vs " +
                           to_string(r)),
        left(l),
        right(r) {}
};

/// One of the four pair-color families.  `second` is n' for families 1 and
/// 3, m for families 2 and 4.
struct Color {
  int family = 1;
  nat n = 0;
  nat second = 0;

  auto operator<=>(const Color&) const = default;
};

inline std::string to_string(const Color& c) {
  return std::to_string(c.family) + ":" + std::to_string(c.n) + "/" +
         std::to_string(c.second);
}

/// All colors of an ordered same-signature pair (i before j).  s^n is the
/// ascending enumeration of the accumulation set, r^m of the residue, and
/// F^{n'} the part of F inside (s^{n'}, s^{n'}^kbar).
inline std::vector<Color> color_pair(const Condition& fi, const Condition& fj) {
  Signature sig = signature(fi);
  Signature sjg = signature(fj);
  if (sig != sjg) throw signature_mismatch(sig, sjg);
  const nat kbar = sig.k;
  const std::vector<Node>& si = fi.limits;  // canonical: lin-ascending
  const std::vector<Node>& sj = fj.limits;
  std::vector<Node> ri = r_set(fi);
  std::vector<Node> rj = r_set(fj);

  std::vector<Color> out;
  for (nat n = 0; n < si.size(); ++n)
    for (nat n2 = 0; n2 < sj.size(); ++n2)
      if (member(fj, si[n]) && interval_contains(sj[n2], kbar, si[n]))
        out.push_back(Color{1, n, n2});
  for (nat n = 0; n < si.size(); ++n)
    for (nat m = 0; m < rj.size(); ++m)
      if (si[n] == rj[m]) out.push_back(Color{2, n, m});
  for (nat n = 0; n < sj.size(); ++n)
    for (nat n2 = 0; n2 < si.size(); ++n2)
      if (member(fi, sj[n]) && interval_contains(si[n2], kbar, sj[n]))
        out.push_back(Color{3, n, n2});
  for (nat n = 0; n < sj.size(); ++n)
    for (nat m = 0; m < ri.size(); ++m)
      if (sj[n] == ri[m]) out.push_back(Color{4, n, m});
  std::sort(out.begin(), out.end());
  return out;
}

/// Checks, over one same-signature family, that every orthogonal pair
/// receives at least one color.
struct CoverageReport {
  std::size_t pairs = 0;
  std::size_t orthogonal_pairs = 0;
  std::vector<std::pair<std::size_t, std::size_t>> uncolored;
  std::map<Color, std::size_t> color_counts;

  bool ok() const { return uncolored.empty(); }
};

inline CoverageReport coverage_check(const std::vector<Condition>& family) {
  CoverageReport rep;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      ++rep.pairs;
      std::vector<Color> colors = color_pair(family[i], family[j]);
      for (const Color& c : colors) ++rep.color_counts[c];
      if (orthogonal(family[i], family[j]).orthogonal) {
        ++rep.orthogonal_pairs;
        if (colors.empty()) rep.uncolored.emplace_back(i, j);
      }
    }
  return rep;
}

struct HomogeneousResult {
  std::vector<std::size_t> indices;
  bool exact = true;
};

namespace detail {

inline void max_clique_rec(const std::vector<std::vector<bool>>& adj,
                           std::vector<std::size_t>& cur,
                           std::vector<std::size_t>& best,
                           const std::vector<std::size_t>& cand,
                           std::size_t from) {
  if (cur.size() + (cand.size() - from) <= best.size()) return;
  for (std::size_t idx = from; idx < cand.size(); ++idx) {
    std::size_t v = cand[idx];
    bool ok = true;
    for (std::size_t u : cur) ok = ok && adj[u][v];
    if (!ok) continue;
    cur.push_back(v);
    if (cur.size() > best.size()) best = cur;
    max_clique_rec(adj, cur, best, cand, idx + 1);
    cur.pop_back();
  }
}

}  // namespace detail

/// Largest sub-family in which every ordered pair carries color c.  Exact
/// (first maximum in index order) up to 20 members, greedy beyond.
inline HomogeneousResult max_homogeneous(const std::vector<Condition>& family,
                                         const Color& c) {
  const std::size_t n = family.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<Color> colors = color_pair(family[i], family[j]);
      bool has = std::binary_search(colors.begin(), colors.end(), c);
      adj[i][j] = adj[j][i] = has;
    }
  HomogeneousResult res;
  if (n <= 20) {
    std::vector<std::size_t> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = i;
    std::vector<std::size_t> cur;
    detail::max_clique_rec(adj, cur, res.indices, cand, 0);
    res.exact = true;
  } else {
    for (std::size_t v = 0; v < n; ++v) {
      bool ok = true;
      for (std::size_t u : res.indices) ok = ok && adj[u][v];
      if (ok) res.indices.push_back(v);
    }
    res.exact = false;
  }
  return res;
}

}  // namespace tcc
