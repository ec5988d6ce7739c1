// Command-line front end: validation, compatibility, classification,
// coloring, antichain search, decomposition refutation, corpus generation,
// and serving built-in oracles over the wire protocol.
//
// Exit codes: 0 success, 1 validation failure, 2 precondition mismatch,
// 3 oracle violation, 4 budget exhaustion.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcc/antichain.hpp"
#include "tcc/condition.hpp"
#include "tcc/node.hpp"
#include "tcc/order.hpp"
#include "tcc/partition.hpp"
#include "tcc/refuter.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitOracle = 3;
constexpr int kExitBudget = 4;

struct FileLine {
  std::size_t lineno;
  std::string text;
};

std::vector<FileLine> read_condition_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<FileLine> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (!blank) out.push_back(FileLine{no, line});
  }
  return out;
}

std::vector<tcc::Condition> load_conditions(const std::string& path) {
  std::vector<tcc::Condition> out;
  for (const FileLine& l : read_condition_lines(path)) {
    tcc::Condition f = tcc::parse_condition(l.text);
    if (auto issue = tcc::validate(f))
      throw std::runtime_error(path + ":" + std::to_string(l.lineno) + ": " +
                               tcc::to_string(*issue));
    out.push_back(f);
  }
  return out;
}

int cmd_validate(const std::string& path) {
  std::size_t count = 0;
  for (const FileLine& l : read_condition_lines(path)) {
    try {
      tcc::Condition f = tcc::parse_condition(l.text);
      if (auto issue = tcc::validate(f)) {
        std::cout << path << ":" << l.lineno << ": INVALID "
                  << tcc::to_string(*issue) << "\n";
        return kExitValidation;
      }
    } catch (const tcc::parse_error& e) {
      std::cout << path << ":" << l.lineno << ": PARSE " << e.what() << "\n";
      return kExitValidation;
    }
    ++count;
  }
  std::cout << "OK " << count << " conditions\n";
  return kExitOk;
}

int cmd_compat(const std::string& path) {
  auto conds = load_conditions(path);
  if (conds.size() != 2) {
    std::cerr << "compat needs exactly 2 conditions, got " << conds.size()
              << "\n";
    return kExitPrecondition;
  }
  tcc::Orthogonality o = tcc::orthogonal(conds[0], conds[1]);
  if (o.orthogonal) {
    if (!tcc::is_blocking_witness(conds[0], conds[1], *o.witness)) {
      std::cerr << "internal error: witness failed re-verification\n";
      return kExitValidation;
    }
    std::cout << "ORTHO witness=" << tcc::to_string(*o.witness) << "\n";
  } else {
    std::cout << "COMPAT extension="
              << tcc::to_string(tcc::common_extension(conds[0], conds[1]))
              << "\n";
  }
  return kExitOk;
}

int cmd_classify(const std::string& path) {
  for (const tcc::Condition& f : load_conditions(path))
    std::cout << tcc::to_string(tcc::signature(f)) << "\n";
  return kExitOk;
}

int cmd_color(const std::string& path) {
  auto conds = load_conditions(path);
  tcc::CoverageReport rep = tcc::coverage_check(conds);
  for (std::size_t i = 0; i < conds.size(); ++i)
    for (std::size_t j = i + 1; j < conds.size(); ++j) {
      auto colors = tcc::color_pair(conds[i], conds[j]);
      bool ortho = tcc::orthogonal(conds[i], conds[j]).orthogonal;
      std::cout << i << " " << j << (ortho ? " ORTHO" : " COMPAT")
                << " colors=";
      if (colors.empty()) {
        std::cout << "-";
      } else {
        for (std::size_t c = 0; c < colors.size(); ++c)
          std::cout << (c ? "," : "") << tcc::to_string(colors[c]);
      }
      std::cout << "\n";
    }
  if (rep.ok()) {
    std::cout << "COVERAGE ok orthogonal_pairs=" << rep.orthogonal_pairs
              << "\n";
    return kExitOk;
  }
  std::cout << "COVERAGE violations=" << rep.uncolored.size() << "\n";
  return kExitValidation;
}

int cmd_antichain(const std::string& path, std::uint64_t budget) {
  auto conds = load_conditions(path);
  tcc::CompatGraph g = tcc::build_graph(conds);
  tcc::SearchResult r = tcc::max_antichain(g, budget);
  std::cout << "MAX_ANTICHAIN size=" << r.indices.size()
            << " exact=" << (r.exact ? "yes" : "no") << " indices=";
  for (std::size_t i = 0; i < r.indices.size(); ++i)
    std::cout << (i ? "," : "") << r.indices[i];
  std::cout << "\n";
  tcc::AntichainCheck check = tcc::is_antichain(conds);
  for (const tcc::PairVerdict& p : check.pairs) {
    std::cout << p.i << " " << p.j;
    if (p.orthogonal)
      std::cout << " ORTHO witness=" << tcc::to_string(*p.witness) << "\n";
    else
      std::cout << " COMPAT\n";
  }
  return kExitOk;
}

int cmd_refute(const std::string& spec, const tcc::RefuterConfig& cfg) {
  auto oracle = tcc::make_oracle(spec);
  tcc::RefutationReport rep = tcc::refute(*oracle, cfg);
  std::cout << rep.to_string();
  return rep.status == tcc::RefutationReport::Status::violation ? kExitOk
                                                                : kExitBudget;
}

int cmd_gen(const std::string& kind, const std::string& stem_text, tcc::nat size,
            std::uint64_t seed, std::size_t count) {
  tcc::Stem stem = tcc::parse_stem(stem_text);
  if (kind == "ladder") {
    for (const tcc::Condition& f : tcc::ladder(stem, size))
      std::cout << tcc::to_string(f) << "\n";
    return kExitOk;
  }
  if (kind == "random") {
    std::mt19937_64 rng(seed);
    tcc::RandomParams params;
    for (std::size_t i = 0; i < count; ++i) {
      tcc::Condition f = tcc::random_condition(params, rng);
      if (stem) f = tcc::transplant(f, stem);
      std::cout << tcc::to_string(f) << "\n";
    }
    return kExitOk;
  }
  throw CLI::ValidationError("--kind must be ladder or random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-scale workbench for chain conditions on a "
               "tree ordering of convergent-sequence conditions"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "parse and validate a condition file");
  validate->add_option("file", file)->required();

  auto* compat = app.add_subcommand("compat", "decide compatibility of a 2-condition file");
  compat->add_option("file", file)->required();

  auto* classify = app.add_subcommand("classify", "print the (k,n,m) signature per condition");
  classify->add_option("file", file)->required();

  auto* color = app.add_subcommand("color", "per-pair colors and coverage verdict");
  color->add_option("file", file)->required();

  std::uint64_t budget = 1'000'000;
  auto* antichain = app.add_subcommand("antichain", "maximum-antichain report");
  antichain->add_option("file", file)->required();
  antichain->add_option("--budget", budget, "branch-and-bound node budget");

  std::string oracle_spec;
  tcc::RefuterConfig cfg;
  auto* refute = app.add_subcommand("refute", "refute a claimed bounded-cc decomposition");
  refute->add_option("--oracle", oracle_spec, "builtin:<spec> or exec:<command>")->required();
  refute->add_option("--height", cfg.caps.height, "tree height cap");
  refute->add_option("--width", cfg.caps.width, "entry width cap (0 = unbounded)");
  refute->add_option("--universe-budget", cfg.universe_budget, "conditions enumerated per stem");
  refute->add_option("--search-budget", cfg.search_budget, "antichain search node budget");
  refute->add_option("--rounds", cfg.max_rounds, "maximum diagonalization rounds");
  refute->add_option("--seed", cfg.seed, "seed for universe enumeration");

  std::string kind = "ladder";
  std::string stem_text = "^";
  tcc::nat size = 4;
  std::uint64_t gen_seed = 1;
  std::size_t count = 10;
  auto* gen = app.add_subcommand("gen", "generate a condition file on stdout");
  gen->add_option("--kind", kind, "ladder | random");
  gen->add_option("--stem", stem_text, "stem node, ^ for the root");
  gen->add_option("--size", size, "ladder size A");
  gen->add_option("--count", count, "number of random conditions");
  gen->add_option("--seed", gen_seed, "generator seed");

  std::string serve_spec;
  auto* serve = app.add_subcommand("oracle", "serve a builtin oracle over stdin/stdout");
  serve->add_option("--spec", serve_spec, "builtin:<spec>")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(file);
    if (compat->parsed()) return cmd_compat(file);
    if (classify->parsed()) return cmd_classify(file);
    if (color->parsed()) return cmd_color(file);
    if (antichain->parsed()) return cmd_antichain(file, budget);
    if (refute->parsed()) return cmd_refute(oracle_spec, cfg);
    if (gen->parsed()) return cmd_gen(kind, stem_text, size, gen_seed, count);
    if (serve->parsed()) {
      auto oracle = tcc::make_oracle(serve_spec);
      return tcc::serve_oracle(*oracle, std::cin, std::cout);
    }
  } catch (const tcc::signature_mismatch& e) {
    std::cerr << e.what() << "\n";
    return kExitPrecondition;
  } catch (const tcc::oracle_violation& e) {
    std::cerr << "oracle violation: " << e.what() << "\n";
    return kExitOracle;
  } catch (const tcc::parse_error& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const tcc::invalid_params& e) {
    std::cerr << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
