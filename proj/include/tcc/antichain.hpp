#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tcc/condition.hpp"
#include "tcc/order.hpp"

namespace tcc {

/// Pairwise compatibility graph of a family; antichains of the family are
/// exactly the independent sets of this graph.
struct CompatGraph {
  std::vector<Condition> family;
  std::vector<std::vector<bool>> compat;  // symmetric, no loops

  std::size_t size() const { return family.size(); }
  std::size_t degree(std::size_t v) const {
    std::size_t d = 0;
    for (bool b : compat[v]) d += b ? 1 : 0;
    return d;
  }
};

inline CompatGraph build_graph(std::vector<Condition> family) {
  CompatGraph g;
  g.family = std::move(family);
  const std::size_t n = g.family.size();
  g.compat.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool c = compatible(g.family[i], g.family[j]);
      g.compat[i][j] = g.compat[j][i] = c;
    }
  return g;
}

struct PairVerdict {
  std::size_t i = 0;
  std::size_t j = 0;
  bool orthogonal = false;
  std::optional<Node> witness;
};

struct AntichainCheck {
  bool antichain = true;
  std::vector<PairVerdict> pairs;
};

/// True iff all pairs are orthogonal; every orthogonal pair comes with a
/// blocking witness so the verdict can be re-verified independently.
inline AntichainCheck is_antichain(const std::vector<Condition>& family) {
  AntichainCheck out;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      Orthogonality o = orthogonal(family[i], family[j]);
      out.pairs.push_back(PairVerdict{i, j, o.orthogonal, o.witness});
      out.antichain = out.antichain && o.orthogonal;
    }
  return out;
}

struct SearchResult {
  std::vector<std::size_t> indices;
  bool exact = true;
  std::uint64_t nodes = 0;
};

namespace detail {

struct MisSearch {
  const CompatGraph& g;
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  bool exact = true;
  std::vector<std::size_t> best;

  void run(std::vector<std::size_t>& cand, std::vector<std::size_t>& cur) {
    if (cur.size() > best.size()) best = cur;
    if (cand.empty()) return;
    if (cur.size() + cand.size() <= best.size()) return;
    if (++nodes > budget) {
      exact = false;
      return;
    }
    // branch on the candidate with most compatible neighbours left
    std::size_t pick = 0;
    std::size_t pick_deg = 0;
    for (std::size_t idx = 0; idx < cand.size(); ++idx) {
      std::size_t d = 0;
      for (std::size_t u : cand) d += g.compat[cand[idx]][u] ? 1 : 0;
      if (idx == 0 || d > pick_deg) {
        pick = idx;
        pick_deg = d;
      }
    }
    std::size_t v = cand[pick];
    // include v: drop v and everything compatible with it
    std::vector<std::size_t> with;
    for (std::size_t u : cand)
      if (u != v && !g.compat[v][u]) with.push_back(u);
    cur.push_back(v);
    run(with, cur);
    cur.pop_back();
    // exclude v
    std::vector<std::size_t> without;
    for (std::size_t u : cand)
      if (u != v) without.push_back(u);
    run(without, cur);
  }
};

}  // namespace detail

/// Maximum independent set of the compatibility graph, i.e. a maximum
/// antichain of the family.  Exact within the node budget (branch and
/// bound); otherwise the best antichain found, flagged inexact.  A known
/// antichain may be supplied as a seed lower bound.  Deterministic for a
/// fixed graph, budget, and seed.
inline SearchResult max_antichain(const CompatGraph& g,
                                  std::uint64_t budget = 1'000'000,
                                  std::vector<std::size_t> seed = {}) {
  detail::MisSearch s{g, budget};
  s.best = std::move(seed);
  std::vector<std::size_t> cand(g.size());
  std::iota(cand.begin(), cand.end(), 0);
  // deterministic order: compatible degree descending, serialization tiebreak
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    std::size_t da = g.degree(a), db = g.degree(b);
    if (da != db) return da > db;
    return to_string(g.family[a]) < to_string(g.family[b]);
  });
  std::vector<std::size_t> cur;
  s.run(cand, cur);
  std::sort(s.best.begin(), s.best.end());
  return SearchResult{s.best, s.exact, s.nodes};
}

inline SearchResult max_antichain(const std::vector<Condition>& family,
                                  std::uint64_t budget = 1'000'000) {
  return max_antichain(build_graph(family), budget);
}

/// Antichain gadget: A sibling fans above a stem, each decorated with the
/// other fans' limits as explicit points.  s^i is an accumulation point of
/// the i-th member and isolated in every other, so the family is pairwise
/// orthogonal.
inline std::vector<Condition> ladder(const Stem& stem, nat count,
                                     const Caps& caps = Caps{}) {
  if (!caps.allows_depth(stem_depth(stem) + 2))
    throw cap_exceeded("ladder: needs two levels above the stem");
  std::vector<Condition> out;
  for (nat j = 0; j < count; ++j) {
    Condition f;
    Node sj = succ(stem, j, caps);
    f.limits.push_back(sj);
    f.rays.push_back(Ray{sj, 0, {}});
    for (nat i = 0; i < count; ++i)
      if (i != j) f.explicit_pts.push_back(succ(stem, i, caps));
    out.push_back(canonical(f));
  }
  return out;
}

}  // namespace tcc
