// Test-only machinery: independent brute-force oracles and corpus
// generators.  Nothing here reuses the decision procedures it checks.
#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "tcc/antichain.hpp"
#include "tcc/condition.hpp"
#include "tcc/node.hpp"
#include "tcc/order.hpp"
#include "tcc/partition.hpp"

namespace tcc::test {

inline Node random_node(std::mt19937_64& rng, std::size_t max_depth,
                        nat max_entry) {
  std::uniform_int_distribution<std::size_t> dlen(1, max_depth);
  std::uniform_int_distribution<nat> dent(0, max_entry - 1);
  std::vector<nat> e(dlen(rng));
  for (nat& x : e) x = dent(rng);
  return Node(std::move(e));
}

/// All nodes with depth <= max_depth and entries < max_entry.
inline std::vector<Node> node_universe(std::size_t max_depth, nat max_entry) {
  std::vector<Node> out;
  std::vector<std::vector<nat>> frontier{{}};
  for (std::size_t d = 0; d < max_depth; ++d) {
    std::vector<std::vector<nat>> next;
    for (const auto& base : frontier)
      for (nat e = 0; e < max_entry; ++e) {
        std::vector<nat> n = base;
        n.push_back(e);
        out.push_back(Node(n));
        next.push_back(std::move(n));
      }
    frontier = std::move(next);
  }
  return out;
}

/// A finite sample of the represented point set: limits, explicit points,
/// and every ray truncated to `span` indices past its start.
inline std::vector<Node> enumerate_members(const Condition& f, nat span) {
  std::vector<Node> out = f.limits;
  out.insert(out.end(), f.explicit_pts.begin(), f.explicit_pts.end());
  for (const Ray& r : f.rays)
    for (nat j = r.index_from; j <= r.index_from + span; ++j)
      out.push_back(r.at(j));
  std::sort(out.begin(), out.end(), LinLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Interval-probe oracle for the accumulation set: a member is an
/// accumulation point iff every probed punctured interval below it still
/// meets the set.
inline std::vector<Node> probe_accumulation(const Condition& f,
                                            nat probe_bound = 20) {
  std::vector<Node> out;
  for (const Node& t : enumerate_members(f, probe_bound)) {
    bool accumulates = true;
    for (nat k = 0; k <= probe_bound && accumulates; ++k)
      accumulates = !intersect_interval(f, t, k).empty();
    if (accumulates) out.push_back(t);
  }
  return out;
}

/// Brute-force evaluation of the residue formula over an enumerated member
/// sample, independent of r_set's per-ray analysis.
inline std::vector<Node> brute_r_set(const Condition& f, nat span = 25) {
  nat k = k_of(f);
  std::vector<Node> out;
  for (const Node& t : enumerate_members(f, span + k)) {
    if (is_limit_of(f, t)) continue;
    bool inside = false;
    for (const Node& s : f.limits) inside = inside || interval_contains(s, k, t);
    if (!inside) out.push_back(t);
  }
  return out;
}

/// Exhaustive maximum-independent-set oracle over all subsets (n <= 20).
inline std::size_t brute_max_antichain(const CompatGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.compat[i][j]) conflict[i] |= 1u << j;
  std::vector<bool> independent(std::size_t{1} << n, false);
  independent[0] = true;
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::uint32_t v = static_cast<std::uint32_t>(__builtin_ctz(mask));
    std::uint32_t rest = mask & (mask - 1);
    independent[mask] = independent[rest] && (conflict[v] & rest) == 0;
    if (independent[mask])
      best = std::max<std::size_t>(best, __builtin_popcount(mask));
  }
  return best;
}

/// A random proper-or-trivial extension of f in the ordering.
inline Condition random_extension(const Condition& f, std::mt19937_64& rng,
                                  const RandomParams& params = RandomParams{},
                                  int tries = 20) {
  for (int t = 0; t < tries; ++t) {
    Condition d = random_condition(params, rng);
    if (compatible(f, d)) return union_of(f, d);
  }
  // guaranteed fallback: one far-away isolated point
  std::uniform_int_distribution<nat> far(1000, 1000000);
  Condition d{{}, {}, {Node{far(rng)}}};
  return union_of(f, d);
}

/// Deterministic pool of valid random conditions over a small node
/// universe, so supports collide often.
inline std::vector<Condition> condition_pool(std::size_t count,
                                             std::uint64_t seed,
                                             RandomParams params = RandomParams{}) {
  std::mt19937_64 rng(seed);
  std::vector<Condition> out;
  out.reserve(count);
  while (out.size() < count) out.push_back(random_condition(params, rng));
  return out;
}

/// Same-signature families: pool buckets plus ladder gadgets.
inline std::vector<std::vector<Condition>> same_signature_families(
    std::size_t pool_size, std::uint64_t seed, std::size_t max_family = 14) {
  std::map<std::string, std::vector<Condition>> buckets;
  for (const Condition& f : condition_pool(pool_size, seed)) {
    auto& b = buckets[to_string(signature(f))];
    bool dup = false;
    for (const Condition& g : b) dup = dup || g == f;
    if (!dup && b.size() < max_family) b.push_back(f);
  }
  std::vector<std::vector<Condition>> out;
  for (auto& [sig, fam] : buckets)
    if (fam.size() >= 2) out.push_back(std::move(fam));
  for (nat a = 2; a <= 6; ++a) out.push_back(ladder(std::nullopt, a));
  for (nat a = 2; a <= 5; ++a) out.push_back(ladder(Node{3, 1}, a));
  return out;
}

/// Orthogonal pairs sharing a signature: bucket pairs from a random pool,
/// topped up with ladder pairs over varied stems when the pool runs dry.
inline std::vector<std::pair<Condition, Condition>> orthogonal_same_sig_pairs(
    std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<Condition, Condition>> out;
  std::map<std::string, std::vector<Condition>> buckets;
  for (const Condition& f : condition_pool(count / 2 + 500, seed))
    buckets[to_string(signature(f))].push_back(f);
  for (auto& [sig, fam] : buckets) {
    for (std::size_t i = 0; i < fam.size() && out.size() < count; ++i)
      for (std::size_t j = i + 1; j < fam.size() && out.size() < count; ++j)
        if (fam[i] != fam[j] && orthogonal(fam[i], fam[j]).orthogonal)
          out.emplace_back(fam[i], fam[j]);
    if (out.size() >= count) break;
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  while (out.size() < count) {
    Stem stem;
    if (rng() % 3 != 0) stem = random_node(rng, 3, 5);
    nat a = 2 + static_cast<nat>(rng() % 5);
    std::vector<Condition> fam = ladder(stem, a);
    nat i = static_cast<nat>(rng() % a);
    nat j = static_cast<nat>(rng() % a);
    if (i != j) out.emplace_back(fam[std::min(i, j)], fam[std::max(i, j)]);
  }
  return out;
}

/// Runs a shell command, capturing stdout and the exit status.
inline std::pair<int, std::string> run_cmd(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

}  // namespace tcc::test
