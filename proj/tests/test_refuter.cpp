#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "tcc/refuter.hpp"

using namespace tcc;

namespace {

/// Two claimed classes, but every condition lands in class 0.
class LopsidedOracle : public Oracle {
 public:
  std::size_t class_count() const override { return 2; }
  nat bound(std::size_t) const override { return 4; }
  std::size_t classify(const Condition&) override { return 0; }
};

class OutOfRangeOracle : public Oracle {
 public:
  std::size_t class_count() const override { return 2; }
  nat bound(std::size_t) const override { return 3; }
  std::size_t classify(const Condition&) override { return 2; }
};

class FlakyOracle : public Oracle {
 public:
  std::size_t class_count() const override { return 2; }
  nat bound(std::size_t) const override { return 3; }
  std::size_t classify(const Condition&) override { return flip_ = !flip_; }

 private:
  bool flip_ = false;
};

}  // namespace

TEST_CASE("builtin oracle specs") {
  auto c = make_builtin_oracle("const:6");
  CHECK(c->class_count() == 1);
  CHECK(c->bound(0) == 6);
  auto m = make_builtin_oracle("mmod:2:4,4");
  CHECK(m->class_count() == 2);
  CHECK(m->classify(ladder(std::nullopt, 4)[0]) == 0);  // |R| = 4
  CHECK(m->classify(ladder(std::nullopt, 5)[0]) == 1);  // |R| = 5
  auto r = make_builtin_oracle("rand:9:3,3,3");
  Condition f = ladder(std::nullopt, 3)[1];
  CHECK(r->classify(f) == r->classify(f));
  CHECK_THROWS_AS(make_builtin_oracle("const:"), std::exception);
  CHECK_THROWS_AS(make_builtin_oracle("kmod:2:4"), invalid_params);
  CHECK_THROWS_AS(make_builtin_oracle("nosuch:1"), invalid_params);
  CHECK_THROWS_AS(make_oracle("bogus:1"), invalid_params);
}

TEST_CASE("estimate_f finds ladder antichains and respects classes") {
  ConstantOracle one(6);
  OracleSession session(one);
  RefuterConfig cfg;
  Estimate e = estimate_f(session, 0, std::nullopt, cfg);
  CHECK(e.size() >= 6);
  CHECK(is_antichain(e.antichain).antichain);

  // repeat call: identical result
  OracleSession session2(one);
  Estimate e2 = estimate_f(session2, 0, std::nullopt, cfg);
  std::vector<std::string> a, b;
  for (const Condition& f : e.antichain) a.push_back(to_string(f));
  for (const Condition& f : e2.antichain) b.push_back(to_string(f));
  CHECK(a == b);

  // a class the oracle never assigns is empty
  LopsidedOracle lop;
  OracleSession ls(lop);
  CHECK(estimate_f(ls, 1, std::nullopt, cfg).size() == 0);
  CHECK(estimate_f(ls, 0, std::nullopt, cfg).size() >= 4);
}

TEST_CASE("estimate is non-increasing along the tree order on a fixed universe") {
  RefuterConfig cfg;
  auto oracle = make_builtin_oracle("mmod:2:4,4");
  OracleSession session(*oracle);
  std::vector<Condition> universe = enumerate_universe(std::nullopt, cfg, 6);
  for (nat j = 0; j < 3; ++j) {
    Stem child(Node{j});
    Stem grand(Node{j, 0});
    for (std::size_t cls = 0; cls < 2; ++cls) {
      std::size_t at_root =
          estimate_in_universe(universe, session, cls, std::nullopt, cfg).size();
      std::size_t at_child =
          estimate_in_universe(universe, session, cls, child, cfg).size();
      std::size_t at_grand =
          estimate_in_universe(universe, session, cls, grand, cfg).size();
      CHECK(at_root >= at_child);
      CHECK(at_child >= at_grand);
    }
  }
}

TEST_CASE("find_stable_stem") {
  auto oracle = make_builtin_oracle("kmod:2:3,3");
  OracleSession session(*oracle);
  RefuterConfig cfg;
  Stem s = find_stable_stem(session, std::nullopt, cfg);
  // re-probe extensions: no estimate drops below its value at s
  std::vector<std::size_t> base(2);
  for (std::size_t i = 0; i < 2; ++i) base[i] = estimate_f(session, i, s, cfg).size();
  std::mt19937_64 rng(109);
  for (int probe = 0; probe < 12; ++probe) {
    Stem t(succ(s, static_cast<nat>(rng() % 5), cfg.caps));
    if (stem_depth(t) + 3 > cfg.caps.height) continue;
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(estimate_f(session, i, t, cfg).size() >= base[i]);
  }

  // transplant-invariant oracle stabilizes immediately
  ConstantOracle one(4);
  OracleSession cs(one);
  CHECK(find_stable_stem(cs, std::nullopt, cfg) == Stem());

  RefuterConfig tiny;
  tiny.caps = Caps{2, 0};
  CHECK_THROWS_AS(find_stable_stem(cs, std::nullopt, tiny), budget_exhausted);
}

TEST_CASE("build_diagonal") {
  Node s{2};
  // members rooted below s^0
  std::vector<Condition> fam = ladder(Stem(succ(Stem(s), 0)), 3);
  std::vector<std::pair<Condition, nat>> members;
  for (const Condition& f : fam) members.emplace_back(f, 0);
  Condition diag = build_diagonal(s, members);
  CHECK(is_valid(diag));
  CHECK(d_set(diag) == std::vector<Node>{s});
  for (const Condition& f : fam) CHECK(orthogonal(diag, f).orthogonal);

  // empty member list: the plain fan at s
  CHECK(build_diagonal(s, {}) ==
        canonical(Condition{{s}, {Ray{s, 0, {}}}, {}}));

  // a member whose only accumulation point is s itself has no witness
  Condition at_s = canonical(Condition{{s}, {Ray{s, 0, {}}}, {}});
  CHECK_THROWS_AS(build_diagonal(s, {{at_s, 0}}), no_witness);
}

TEST_CASE("refute: constant-class oracle with bound 6") {
  ConstantOracle oracle(6);
  RefutationReport rep = refute(oracle);
  REQUIRE(rep.status == RefutationReport::Status::violation);
  CHECK(rep.class_index == 0);
  CHECK(rep.bound == 6);
  CHECK(rep.antichain.size() == 6);
  AntichainCheck chk = is_antichain(rep.antichain);
  CHECK(chk.antichain);
  for (const PairVerdict& p : chk.pairs)
    CHECK(is_blocking_witness(rep.antichain[p.i], rep.antichain[p.j], *p.witness));
  ConstantOracle fresh(6);
  for (const Condition& f : rep.antichain) CHECK(fresh.classify(f) == 0);
}

TEST_CASE("refute: residue-parity oracle with bounds (4,4)") {
  auto oracle = make_builtin_oracle("mmod:2:4,4");
  RefutationReport rep = refute(*oracle);
  REQUIRE(rep.status == RefutationReport::Status::violation);
  CHECK(rep.antichain.size() >= rep.bound);
  CHECK(is_antichain(rep.antichain).antichain);
  auto fresh = make_builtin_oracle("mmod:2:4,4");
  for (const Condition& f : rep.antichain)
    CHECK(fresh->classify(f) == rep.class_index);
}

TEST_CASE("refute: signature classifiers across components") {
  for (const char* spec : {"kmod:2:3,3", "nmod:2:3,3", "sigmod:3:3,3,3"}) {
    auto oracle = make_builtin_oracle(spec);
    RefutationReport rep = refute(*oracle);
    INFO(spec);
    REQUIRE(rep.status == RefutationReport::Status::violation);
    CHECK(is_antichain(rep.antichain).antichain);
    CHECK(rep.antichain.size() >= rep.bound);
  }
}

TEST_CASE("refute is deterministic") {
  auto a = make_builtin_oracle("mmod:2:4,4");
  auto b = make_builtin_oracle("mmod:2:4,4");
  CHECK(refute(*a).to_string() == refute(*b).to_string());
}

TEST_CASE("oracle contract violations are detected") {
  OutOfRangeOracle bad;
  CHECK_THROWS_AS(refute(bad), oracle_violation);
  FlakyOracle flaky;
  CHECK_THROWS_AS(refute(flaky), oracle_violation);
  ConstantOracle trivial(1);  // claimed bound below 2
  CHECK_THROWS_AS(refute(trivial), oracle_violation);
}

TEST_CASE("budget exhaustion reports evidence instead of a violation") {
  ConstantOracle oracle(6);
  RefuterConfig tiny;
  tiny.caps = Caps{2, 0};
  RefutationReport rep = refute(oracle, tiny);
  CHECK(rep.status == RefutationReport::Status::budget_exhausted);
  CHECK(rep.to_string().find("BUDGET_EXHAUSTED") != std::string::npos);
}

TEST_CASE("serve_oracle speaks the wire protocol") {
  auto oracle = make_builtin_oracle("mmod:2:4,4");
  std::istringstream in(
      "HELLO\n"
      "CLASSIFY {L:[0];R:[(0;0;-)];X:[]}\n"
      "CLASSIFY garbage\n"
      "NONSENSE\n"
      "BYE\n");
  std::ostringstream out;
  CHECK(serve_oracle(*oracle, in, out) == 0);
  std::istringstream lines(out.str());
  std::string l1, l2, l3, l4;
  std::getline(lines, l1);
  std::getline(lines, l2);
  std::getline(lines, l3);
  std::getline(lines, l4);
  CHECK(l1 == "CLASSES 2 4 4");
  CHECK(l2 == "CLASS 1");  // canonical fan has |R| = 1
  CHECK(l3.rfind("ERR", 0) == 0);
  CHECK(l4.rfind("ERR", 0) == 0);
}
