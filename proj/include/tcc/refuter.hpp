#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "tcc/antichain.hpp"
#include "tcc/condition.hpp"
#include "tcc/order.hpp"
#include "tcc/partition.hpp"

namespace tcc {

struct oracle_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct no_witness : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct budget_exhausted : std::runtime_error {
  Stem deepest;
  explicit budget_exhausted(Stem s)
      : std::runtime_error("budget exhausted at stem " + to_string(s)),
        deepest(std::move(s)) {}
};

/// A claimed decomposition of the ordering into finitely many classes,
/// class i asserting it contains no antichain of size bound(i).
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::size_t class_count() const = 0;
  virtual nat bound(std::size_t i) const = 0;
  virtual std::size_t classify(const Condition& f) = 0;
};

class ConstantOracle : public Oracle {
 public:
  explicit ConstantOracle(nat bound) : bound_(bound) {}
  std::size_t class_count() const override { return 1; }
  nat bound(std::size_t) const override { return bound_; }
  std::size_t classify(const Condition&) override { return 0; }

 private:
  nat bound_;
};

/// Classifies by a component of the partition signature, modulo the class
/// count.  Transplant-invariant, since signatures are.
class SignatureModOracle : public Oracle {
 public:
  enum class Component { K, N, M, Sum };

  SignatureModOracle(Component c, std::vector<nat> bounds)
      : component_(c), bounds_(std::move(bounds)) {
    if (bounds_.empty()) throw invalid_params("oracle needs >= 1 class");
  }
  std::size_t class_count() const override { return bounds_.size(); }
  nat bound(std::size_t i) const override { return bounds_.at(i); }
  std::size_t classify(const Condition& f) override {
    Signature s = signature(f);
    nat v = 0;
    switch (component_) {
      case Component::K: v = s.k; break;
      case Component::N: v = s.n; break;
      case Component::M: v = s.m; break;
      case Component::Sum: v = s.k + s.n + s.m; break;
    }
    return v % bounds_.size();
  }

 private:
  Component component_;
  std::vector<nat> bounds_;
};

/// Seeded hash classifier, memoized so repeated queries agree.
class RandomOracle : public Oracle {
 public:
  RandomOracle(std::uint64_t seed, std::vector<nat> bounds)
      : seed_(seed), bounds_(std::move(bounds)) {
    if (bounds_.empty()) throw invalid_params("oracle needs >= 1 class");
  }
  std::size_t class_count() const override { return bounds_.size(); }
  nat bound(std::size_t i) const override { return bounds_.at(i); }
  std::size_t classify(const Condition& f) override {
    std::string key = to_string(canonical(f));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::uint64_t h = 1469598103934665603ull ^ seed_;
    for (char c : key) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    std::size_t cls = h % bounds_.size();
    memo_.emplace(std::move(key), cls);
    return cls;
  }

 private:
  std::uint64_t seed_;
  std::vector<nat> bounds_;
  std::map<std::string, std::size_t> memo_;
};

namespace detail {

inline std::vector<nat> parse_bounds(std::string_view text) {
  std::vector<nat> out;
  std::size_t pos = 0;
  out.push_back(parse_nat(text, pos));
  while (pos < text.size() && text[pos] == ',') {
    ++pos;
    out.push_back(parse_nat(text, pos));
  }
  if (pos != text.size()) throw invalid_params("malformed bounds list");
  return out;
}

}  // namespace detail

/// Built-in oracle grammar:
///   const:<bound>
///   kmod:<M>:<b0,...>   nmod:...   mmod:...   sigmod:...
///   rand:<seed>:<b0,...>
inline std::unique_ptr<Oracle> make_builtin_oracle(std::string_view spec) {
  auto colon = spec.find(':');
  std::string_view name = spec.substr(0, colon);
  std::string_view rest = colon == std::string_view::npos
                              ? std::string_view{}
                              : spec.substr(colon + 1);
  if (name == "const") {
    std::size_t pos = 0;
    nat b = detail::parse_nat(rest, pos);
    if (pos != rest.size()) throw invalid_params("const oracle takes one bound");
    return std::make_unique<ConstantOracle>(b);
  }
  if (name == "kmod" || name == "nmod" || name == "mmod" || name == "sigmod") {
    auto c2 = rest.find(':');
    if (c2 == std::string_view::npos)
      throw invalid_params("expected <modulus>:<bounds>");
    std::size_t pos = 0;
    nat modulus = detail::parse_nat(rest.substr(0, c2), pos);
    std::vector<nat> bounds = detail::parse_bounds(rest.substr(c2 + 1));
    if (bounds.size() != modulus)
      throw invalid_params("bounds list must have one entry per class");
    SignatureModOracle::Component comp =
        name == "kmod"   ? SignatureModOracle::Component::K
        : name == "nmod" ? SignatureModOracle::Component::N
        : name == "mmod" ? SignatureModOracle::Component::M
                         : SignatureModOracle::Component::Sum;
    return std::make_unique<SignatureModOracle>(comp, std::move(bounds));
  }
  if (name == "rand") {
    auto c2 = rest.find(':');
    if (c2 == std::string_view::npos)
      throw invalid_params("expected <seed>:<bounds>");
    std::string_view seed_text = rest.substr(0, c2);
    std::uint64_t seed = 0;
    for (char c : seed_text) {
      if (c < '0' || c > '9') throw invalid_params("malformed seed");
      seed = seed * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return std::make_unique<RandomOracle>(seed,
                                          detail::parse_bounds(rest.substr(c2 + 1)));
  }
  throw invalid_params("unknown builtin oracle: " + std::string(spec));
}

// --- wire protocol ---------------------------------------------------
// engine -> oracle: HELLO            oracle -> engine: CLASSES <N> <b...>
// engine -> oracle: CLASSIFY <cond>  oracle -> engine: CLASS <i>
// engine -> oracle: BYE              oracle exits 0

/// Serves an oracle over line-delimited stdin/stdout.
inline int serve_oracle(Oracle& oracle, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "HELLO") {
      out << "CLASSES " << oracle.class_count();
      for (std::size_t i = 0; i < oracle.class_count(); ++i)
        out << ' ' << oracle.bound(i);
      out << '\n' << std::flush;
    } else if (line.rfind("CLASSIFY ", 0) == 0) {
      try {
        Condition f = parse_condition(std::string_view(line).substr(9));
        out << "CLASS " << oracle.classify(f) << '\n' << std::flush;
      } catch (const std::exception& e) {
        out << "ERR " << e.what() << '\n' << std::flush;
      }
    } else if (line == "BYE") {
      return 0;
    } else {
      out << "ERR unknown command\n" << std::flush;
    }
  }
  return 0;
}

/// Oracle spoken to over a subprocess's stdin/stdout.  The command line is
/// split on whitespace; no shell is involved.
class ProcessOracle : public Oracle {
 public:
  explicit ProcessOracle(const std::string& command) {
    std::vector<std::string> args;
    std::istringstream is(command);
    for (std::string a; is >> a;) args.push_back(a);
    if (args.empty()) throw invalid_params("empty oracle command");

    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw std::runtime_error("pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> argv;
      for (std::string& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      std::perror("execvp");
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (!to_child_ || !from_child_)
      throw std::runtime_error("fdopen failed");

    std::string reply = request("HELLO");
    std::istringstream rs(reply);
    std::string tag;
    long long n = 0;
    if (!(rs >> tag >> n) || tag != "CLASSES" || n < 1)
      throw oracle_violation("bad handshake reply: " + reply);
    for (long long i = 0; i < n; ++i) {
      long long b;
      if (!(rs >> b) || b < 0)
        throw oracle_violation("bad bounds in handshake: " + reply);
      bounds_.push_back(static_cast<nat>(b));
    }
  }

  ProcessOracle(const ProcessOracle&) = delete;
  ProcessOracle& operator=(const ProcessOracle&) = delete;

  ~ProcessOracle() override {
    if (to_child_) {
      std::fputs("BYE\n", to_child_);
      std::fflush(to_child_);
      std::fclose(to_child_);
    }
    if (from_child_) std::fclose(from_child_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  std::size_t class_count() const override { return bounds_.size(); }
  nat bound(std::size_t i) const override { return bounds_.at(i); }

  std::size_t classify(const Condition& f) override {
    std::string reply = request("CLASSIFY " + to_string(canonical(f)));
    std::istringstream rs(reply);
    std::string tag;
    long long i = -1;
    if (!(rs >> tag >> i) || tag != "CLASS" || i < 0)
      throw oracle_violation("bad classify reply: " + reply);
    return static_cast<std::size_t>(i);
  }

 private:
  std::string request(const std::string& line) {
    std::fputs(line.c_str(), to_child_);
    std::fputc('\n', to_child_);
    std::fflush(to_child_);
    char* buf = nullptr;
    std::size_t cap = 0;
    ssize_t len = getline(&buf, &cap, from_child_);
    if (len < 0) {
      free(buf);
      throw oracle_violation("oracle closed the pipe");
    }
    std::string out(buf, static_cast<std::size_t>(len));
    free(buf);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
      out.pop_back();
    return out;
  }

  pid_t pid_ = -1;
  FILE* to_child_ = nullptr;
  FILE* from_child_ = nullptr;
  std::vector<nat> bounds_;
};

/// Parses `builtin:<spec>` or `exec:<command line>`.
inline std::unique_ptr<Oracle> make_oracle(std::string_view spec) {
  if (spec.rfind("builtin:", 0) == 0) return make_builtin_oracle(spec.substr(8));
  if (spec.rfind("exec:", 0) == 0)
    return std::make_unique<ProcessOracle>(std::string(spec.substr(5)));
  throw invalid_params("oracle spec must start with builtin: or exec:");
}

// --- the engine ------------------------------------------------------

struct RefuterConfig {
  Caps caps{};                       // default height 8, unbounded width
  std::size_t universe_budget = 160; // conditions enumerated per stem
  std::uint64_t search_budget = 200'000;
  std::size_t max_rounds = 32;
  std::size_t stable_samples = 8;    // probed extensions per stem
  std::uint64_t seed = 1;
};

/// Serial access to the oracle with a query log; repeated queries must
/// agree and indices stay in range, else the oracle violated its contract.
class OracleSession {
 public:
  explicit OracleSession(Oracle& o) : oracle_(o) {
    if (o.class_count() < 1) throw oracle_violation("no classes");
    for (std::size_t i = 0; i < o.class_count(); ++i)
      if (o.bound(i) < 2) throw oracle_violation("claimed bound < 2");
  }

  std::size_t class_count() const { return oracle_.class_count(); }
  nat bound(std::size_t i) const { return oracle_.bound(i); }
  std::size_t queries() const { return queries_; }

  std::size_t classify(const Condition& f) {
    Condition c = canonical(f);
    std::size_t i = oracle_.classify(c);
    ++queries_;
    if (i >= oracle_.class_count())
      throw oracle_violation("class index " + std::to_string(i) +
                             " out of range");
    std::string key = to_string(c);
    auto [it, fresh] = log_.emplace(std::move(key), i);
    if (!fresh && it->second != i)
      throw oracle_violation("inconsistent repeat answer for " + it->first);
    return i;
  }

 private:
  Oracle& oracle_;
  std::map<std::string, std::size_t> log_;
  std::size_t queries_ = 0;
};

namespace detail {

inline std::uint64_t fnv(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Deterministic universe of candidate conditions rooted above a stem:
/// ladder gadgets, fans with shifted start indices and decorations, nested
/// two-limit conditions, and seeded random transplants.  Every member has
/// an accumulation point extending the stem.
inline std::vector<Condition> enumerate_universe(const Stem& stem,
                                                 const RefuterConfig& cfg,
                                                 nat ladder_max) {
  std::vector<Condition> out;
  auto push = [&](const Condition& f) {
    if (is_valid(f, cfg.caps)) out.push_back(canonical(f));
  };
  auto try_push = [&](auto&& make) {
    try {
      push(make());
    } catch (const cap_exceeded&) {
    }
  };

  for (nat a = 2; a <= ladder_max; ++a) {
    try {
      for (const Condition& f : ladder(stem, a, cfg.caps)) push(f);
    } catch (const cap_exceeded&) {
      break;
    }
  }
  for (nat j = 0; j < 3; ++j)
    for (nat k0 = 0; k0 < 2; ++k0)
      try_push([&] {
        Node sj = succ(stem, j, cfg.caps);
        if (!cfg.caps.allows_depth(sj.depth() + 1))
          throw cap_exceeded("fan");
        return Condition{{sj}, {Ray{sj, k0, {}}}, {}};
      });
  for (nat j = 0; j < 2; ++j)
    try_push([&] {
      Node sj = succ(stem, j, cfg.caps);
      Node deep = succ(sj, j, cfg.caps);
      if (!cfg.caps.allows_depth(deep.depth() + 1)) throw cap_exceeded("fan");
      Condition f{{sj, deep}, {Ray{sj, 0, {}}, Ray{deep, 0, {}}}, {}};
      return f;
    });
  for (nat j = 0; j < 2; ++j)
    try_push([&] {
      Node sj = succ(stem, j, cfg.caps);
      if (!cfg.caps.allows_depth(sj.depth() + 1)) throw cap_exceeded("fan");
      Condition f{{sj}, {Ray{sj, 0, {}}}, {succ(stem, j + 1, cfg.caps)}};
      return f;
    });

  std::mt19937_64 rng(detail::fnv(to_string(stem), cfg.seed));
  RandomParams params;
  params.allow_pure_explicit = false;
  std::size_t room = cfg.caps.height == 0
                         ? params.max_height
                         : cfg.caps.height - std::min(cfg.caps.height, stem_depth(stem));
  params.max_height = std::min<std::size_t>(params.max_height, room);
  if (params.max_height >= 2) {
    for (std::size_t tries = 0; tries < 4 * cfg.universe_budget &&
                                out.size() < cfg.universe_budget;
         ++tries) {
      try {
        push(rebase(random_condition(params, rng), std::nullopt, stem));
      } catch (const cap_exceeded&) {
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Condition& a, const Condition& b) {
    return to_string(a) < to_string(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() > cfg.universe_budget) out.resize(cfg.universe_budget);
  return out;
}

struct Estimate {
  std::vector<Condition> antichain;
  std::size_t size() const { return antichain.size(); }
};

/// Largest antichain found inside one class of a fixed universe, restricted
/// to conditions with an accumulation point extending the stem.  A lower
/// bound on the class's true antichain number over that stem.
inline Estimate estimate_in_universe(const std::vector<Condition>& universe,
                                     OracleSession& session, std::size_t cls,
                                     const Stem& stem,
                                     const RefuterConfig& cfg) {
  std::vector<Condition> pool;
  for (const Condition& f : universe) {
    bool above = false;
    for (const Node& t : f.limits) above = above || stem_leq(stem, t);
    if (above && session.classify(f) == cls) pool.push_back(f);
  }
  CompatGraph g = build_graph(pool);
  SearchResult r = max_antichain(g, cfg.search_budget);
  Estimate e;
  for (std::size_t idx : r.indices) e.antichain.push_back(pool[idx]);
  return e;
}

inline Estimate estimate_f(OracleSession& session, std::size_t cls,
                           const Stem& stem, const RefuterConfig& cfg) {
  nat ladder_max = 2;
  for (std::size_t i = 0; i < session.class_count(); ++i)
    ladder_max = std::max<nat>(ladder_max, session.bound(i) + 1);
  ladder_max = std::min<nat>(ladder_max, 12);
  return estimate_in_universe(enumerate_universe(stem, cfg, ladder_max),
                              session, cls, stem, cfg);
}

/// Descends from s0 until no sampled extension drops any class estimate.
/// Estimates are non-increasing along the tree order, and each is bounded
/// by its class's claimed bound, so at most sum(bounds) descents happen.
inline Stem find_stable_stem(OracleSession& session, const Stem& s0,
                             const RefuterConfig& cfg) {
  std::size_t max_descents = 0;
  for (std::size_t i = 0; i < session.class_count(); ++i)
    max_descents += session.bound(i);
  max_descents = std::min<std::size_t>(max_descents, 64);

  Stem s = s0;
  auto room = [&](const Stem& t) {
    return cfg.caps.height == 0 || stem_depth(t) + 3 <= cfg.caps.height;
  };
  if (!room(s)) throw budget_exhausted(s);

  for (std::size_t d = 0; d <= max_descents; ++d) {
    std::vector<std::size_t> base(session.class_count());
    for (std::size_t i = 0; i < session.class_count(); ++i)
      base[i] = estimate_f(session, i, s, cfg).size();
    std::optional<Stem> drop;
    for (nat j = 0; j < cfg.stable_samples && !drop; ++j) {
      Stem t;
      try {
        t = succ(s, j, cfg.caps);
      } catch (const cap_exceeded&) {
        break;
      }
      if (!room(t)) break;
      for (std::size_t i = 0; i < session.class_count() && !drop; ++i)
        if (estimate_f(session, i, t, cfg).size() < base[i]) drop = t;
    }
    if (!drop) return s;
    s = *drop;
    if (!room(s)) throw budget_exhausted(s);
  }
  throw budget_exhausted(s);
}

/// The diagonal condition over stem s: the sibling fan at s plus, for each
/// supplied member, one of its accumulation points extending s^n for the
/// member's assigned index n.  Those witnesses are isolated in the result
/// but accumulation points of the members, so the result is orthogonal to
/// every member.
inline Condition build_diagonal(
    const Node& s, const std::vector<std::pair<Condition, nat>>& members,
    const Caps& caps = Caps{}) {
  Condition f;
  f.limits.push_back(s);
  f.rays.push_back(Ray{s, 0, {}});
  for (const auto& [m, n] : members) {
    Node sn = succ(s, n, caps);
    std::optional<Node> witness;
    for (const Node& t : m.limits)
      if (tree_leq(sn, t)) {
        witness = t;
        break;  // limits are lin-ascending; first hit is deterministic
      }
    if (!witness)
      throw no_witness("member has no accumulation point above " +
                       to_string(sn));
    f.explicit_pts.push_back(*witness);
  }
  f = canonical(f);
  for (const auto& [m, n] : members)
    if (!orthogonal(f, m).orthogonal)
      throw std::logic_error("diagonal condition failed orthogonality");
  return f;
}

struct RefutationReport {
  enum class Status { violation, budget_exhausted };

  Status status = Status::budget_exhausted;
  std::size_t class_count = 0;
  std::vector<nat> bounds;
  std::size_t rounds = 0;

  // violation payload
  std::size_t class_index = 0;
  nat bound = 0;
  std::vector<Condition> antichain;
  AntichainCheck pairs;

  // exhaustion payload
  Stem deepest;
  std::vector<std::size_t> best_sizes;

  std::string to_string() const {
    std::string out;
    out += "# refuter: finite decomposition, " + std::to_string(class_count) +
           " classes, claimed antichain bounds";
    for (std::size_t i = 0; i < bounds.size(); ++i)
      out += (i ? "," : " ") + std::to_string(bounds[i]);
    out += "\n";
    if (status == Status::violation) {
      out += "VIOLATION class=" + std::to_string(class_index) +
             " bound=" + std::to_string(bound) +
             " size=" + std::to_string(antichain.size()) + "\n";
      for (std::size_t i = 0; i < antichain.size(); ++i)
        out += "member " + std::to_string(i) + " " + tcc::to_string(antichain[i]) +
               "\n";
      for (const PairVerdict& p : pairs.pairs) {
        out += std::to_string(p.i) + " " + std::to_string(p.j);
        if (p.orthogonal)
          out += " ORTHO witness=" + tcc::to_string(*p.witness) + "\n";
        else
          out += " COMPAT\n";
      }
    } else {
      out += "BUDGET_EXHAUSTED rounds=" + std::to_string(rounds) + "\n";
      out += "deepest_stem=" + tcc::to_string(deepest) + "\n";
      for (std::size_t i = 0; i < best_sizes.size(); ++i)
        out += "class " + std::to_string(i) +
               " best=" + std::to_string(best_sizes[i]) + "\n";
    }
    return out;
  }
};

namespace detail {

/// Zero-tolerance re-verification of a violation: every pair's witness is
/// re-checked by the blocking predicate and every member re-classified.
inline AntichainCheck verify_violation(OracleSession& session, std::size_t cls,
                                       const std::vector<Condition>& members) {
  AntichainCheck check = is_antichain(members);
  if (!check.antichain)
    throw std::logic_error("violation evidence is not an antichain");
  for (const PairVerdict& p : check.pairs) {
    if (!p.witness ||
        !is_blocking_witness(members[p.i], members[p.j], *p.witness))
      throw std::logic_error("violation witness failed re-verification");
  }
  for (const Condition& f : members)
    if (session.classify(f) != cls)
      throw std::logic_error("violation member re-classified differently");
  return check;
}

}  // namespace detail

/// Runs the diagonalization loop against a claimed decomposition: find a
/// stem where per-class antichain estimates are stable, gather per-class
/// antichains above fresh sibling indices, build the diagonal condition
/// orthogonal to all of them, and feed it back into whichever class the
/// oracle assigns it to.  Some class's evidence grows every round, so
/// within sum(bounds - 1) + 1 rounds either a claimed bound is exceeded or
/// the finite caps run out.
inline RefutationReport refute(Oracle& oracle, const RefuterConfig& cfg = {}) {
  OracleSession session(oracle);
  const std::size_t ncls = session.class_count();

  RefutationReport rep;
  rep.class_count = ncls;
  for (std::size_t i = 0; i < ncls; ++i) rep.bounds.push_back(session.bound(i));

  std::size_t round_limit = 1;
  for (std::size_t i = 0; i < ncls; ++i) round_limit += session.bound(i) - 1;
  round_limit = std::min(round_limit, cfg.max_rounds);

  nat ladder_max = 2;
  for (std::size_t i = 0; i < ncls; ++i)
    ladder_max = std::max<nat>(ladder_max, session.bound(i) + 1);
  ladder_max = std::min<nat>(ladder_max, 12);

  auto emit_violation = [&](std::size_t cls, std::vector<Condition> members,
                            std::size_t rounds) {
    rep.status = RefutationReport::Status::violation;
    rep.class_index = cls;
    rep.bound = session.bound(cls);
    rep.rounds = rounds;
    members.resize(std::min<std::size_t>(members.size(), session.bound(cls)));
    rep.pairs = detail::verify_violation(session, cls, members);
    rep.antichain = std::move(members);
    return rep;
  };

  Stem stable;
  try {
    stable = find_stable_stem(session, std::nullopt, cfg);
  } catch (const budget_exhausted& e) {
    rep.deepest = e.deepest;
    rep.best_sizes.assign(ncls, 0);
    return rep;
  }
  // the diagonal condition needs a proper node as its accumulation point
  Node s = stable ? *stable : succ(std::nullopt, 0, cfg.caps);

  std::vector<std::vector<Condition>> evidence(ncls);
  nat next_index = 0;
  std::size_t completed = 0;

  try {
    for (std::size_t round = 0; round < round_limit; ++round) {
      std::vector<std::pair<Condition, nat>> gathered;
      std::vector<std::size_t> gathered_class;
      for (std::size_t i = 0; i < ncls; ++i) {
        nat ni = next_index++;
        Node sni = succ(s, ni, cfg.caps);
        // candidates: prior evidence transplanted below the fresh index,
        // plus the enumerated universe there
        std::vector<Condition> pool;
        std::vector<std::size_t> seed_idx;
        for (const Condition& f : evidence[i]) {
          Condition moved = rebase(f, Stem(s), Stem(sni));
          if (!is_valid(moved, cfg.caps)) throw cap_exceeded("transplant");
          if (session.classify(moved) == i) {
            seed_idx.push_back(pool.size());
            pool.push_back(moved);
          }
        }
        for (const Condition& f : enumerate_universe(Stem(sni), cfg, ladder_max)) {
          bool above = false;
          for (const Node& t : f.limits) above = above || tree_leq(sni, t);
          if (above && session.classify(f) == i) pool.push_back(f);
        }
        SearchResult r = max_antichain(build_graph(pool), cfg.search_budget,
                                       seed_idx);
        std::vector<Condition> best;
        for (std::size_t idx : r.indices) best.push_back(pool[idx]);
        if (best.size() >= session.bound(i))
          return emit_violation(i, std::move(best), completed);
        for (Condition& f : best) {
          gathered.emplace_back(std::move(f), ni);
          gathered_class.push_back(i);
        }
      }

      Condition diag = build_diagonal(s, gathered, cfg.caps);
      std::size_t j = session.classify(diag);
      std::vector<Condition> grown;
      for (std::size_t idx = 0; idx < gathered.size(); ++idx)
        if (gathered_class[idx] == j) grown.push_back(gathered[idx].first);
      grown.push_back(diag);
      evidence[j] = std::move(grown);
      ++completed;
      if (evidence[j].size() >= session.bound(j))
        return emit_violation(j, evidence[j], completed);
    }
  } catch (const cap_exceeded&) {
    // fall through to the exhaustion report
  }

  rep.status = RefutationReport::Status::budget_exhausted;
  rep.rounds = completed;
  rep.deepest = Stem(s);
  for (std::size_t i = 0; i < ncls; ++i)
    rep.best_sizes.push_back(evidence[i].size());
  return rep;
}

}  // namespace tcc
