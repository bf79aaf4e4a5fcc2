// Command-line front door: compile, count, oracle, and grid verification.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "liftcount/evaluate.hpp"
#include "liftcount/expr.hpp"
#include "liftcount/frontend.hpp"
#include "liftcount/oracle.hpp"
#include "liftcount/search.hpp"

using namespace liftcount;
using nlohmann::json;

namespace {

// exit codes per contract
constexpr int kExitUsage = 1;    // parse/normalize/usage errors
constexpr int kExitCompile = 2;  // compilation failure or search exhaustion
constexpr int kExitMismatch = 3; // verify found a counterexample

struct Options {
  std::string command;
  std::string input;
  std::vector<std::string> sizes;
  std::string dot_path;
  bool emit_defs = false;
  bool trace = false;
  bool use_json = false;
  int max_size = -1;
  int solution = 0;
  std::string mode = "hybrid";
  int max_depth = 6;
  int max_solutions = 5;
};

std::string rational_str(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

DomainSizeAssignment parse_sizes(const Session& sn,
                                 const std::vector<std::string>& specs) {
  DomainSizeAssignment out;
  for (const std::string& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--size expects NAME=N, got '" + s + "'");
    std::string name = s.substr(0, eq);
    long n = std::stol(s.substr(eq + 1));
    auto d = sn.find_domain(name);
    if (!d) throw std::invalid_argument("unknown domain '" + name + "'");
    out[*d] = n;
  }
  return out;
}

void require_all_roots(const Session& sn, const DomainSizeAssignment& sizes) {
  for (DomainId d : sn.root_domains())
    if (!sizes.count(d))
      throw std::invalid_argument("missing --size for domain " +
                                  sn.domain(d).name);
}

json sizes_json(const Session& sn, const DomainSizeAssignment& sizes) {
  json j = json::object();
  for (const auto& [d, n] : sizes) j[sn.domain(d).name] = n;
  return j;
}

json defs_json(const Session& sn, const std::vector<FunctionDef>& defs) {
  json a = json::array();
  for (const FunctionDef& d : defs) a.push_back(to_string(sn, d));
  return a;
}

int run(const Options& opt) {
  auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::ifstream in(opt.input);
  if (!in) {
    std::cerr << "cannot read " << opt.input << "\n";
    return kExitUsage;
  }
  std::stringstream ss;
  ss << in.rdbuf();

  Problem pr;
  DomainSizeAssignment sizes;
  try {
    pr = normalize(parse(ss.str()));
    sizes = parse_sizes(pr.sn, opt.sizes);
    if (opt.command == "count" || opt.command == "oracle")
      require_all_roots(pr.sn, sizes);
    if (opt.command == "verify" && opt.max_size < 0)
      throw std::invalid_argument("verify requires --max-size");
  } catch (const std::exception& e) {
    std::cerr << opt.input << ": " << e.what() << "\n";
    return kExitUsage;
  }

  json out{{"command", opt.command},
           {"input", opt.input},
           {"sizes", sizes_json(pr.sn, sizes)},
           {"result", nullptr},
           {"memo_entries", nullptr},
           {"wall_ms", nullptr},
           {"solutions", json::array()}};

  if (opt.command == "oracle") {
    Rational r = oracle_count_full(pr.sn, pr.f, sizes, pr.declared);
    out["result"] = rational_str(r);
    out["wall_ms"] = wall_ms();
    if (opt.use_json)
      std::cout << out.dump(2) << "\n";
    else
      std::cout << rational_str(r) << "\n";
    return 0;
  }

  SearchConfig cfg;
  cfg.mode = opt.mode == "greedy" ? SearchConfig::Greedy : SearchConfig::Hybrid;
  cfg.max_depth = opt.max_depth;
  cfg.max_solutions = opt.max_solutions;
  if (opt.trace)
    cfg.trace = [](int depth, const std::string& rule, uint64_t hash) {
      std::cerr << "trace " << depth << " " << rule << " " << std::hex << hash
                << std::dec << "\n";
    };

  std::vector<Fcg> graphs;
  try {
    if (cfg.mode == SearchConfig::Greedy)
      graphs.push_back(compile_greedy(pr.sn, pr.f, cfg));
    else
      graphs = compile_hybrid(pr.sn, pr.f, cfg);
  } catch (const CompilationError& e) {
    std::cerr << "compilation failed: " << e.what() << "\n";
    return kExitCompile;
  }
  if (graphs.empty()) {
    std::cerr << "search exhausted: no complete graph within limits\n";
    return kExitCompile;
  }
  if (opt.solution < 0 || opt.solution >= static_cast<int>(graphs.size())) {
    std::cerr << "--solution " << opt.solution << " out of range (found "
              << graphs.size() << ")\n";
    return kExitCompile;
  }

  std::vector<std::vector<FunctionDef>> sols;
  for (const Fcg& g : graphs) {
    std::vector<FunctionDef> defs = simplify(interpret(pr.sn, g));
    scope_check(defs);
    sols.push_back(std::move(defs));
  }
  const std::vector<FunctionDef>& defs = sols[opt.solution];
  for (const auto& s : sols) out["solutions"].push_back(defs_json(pr.sn, s));

  if (!opt.dot_path.empty()) {
    std::ofstream dot(opt.dot_path);
    if (!dot) {
      std::cerr << "cannot write " << opt.dot_path << "\n";
      return kExitUsage;
    }
    dot << to_dot(pr.sn, graphs[opt.solution]);
  }

  if (opt.command == "compile") {
    out["wall_ms"] = wall_ms();
    if (opt.use_json)
      std::cout << out.dump(2) << "\n";
    else
      std::cout << to_string(pr.sn, defs);
    return 0;
  }

  if (opt.command == "count") {
    EvalStats stats;
    Rational r = evaluate(pr.sn, defs, sizes, &stats);
    out["result"] = rational_str(r);
    out["memo_entries"] = stats.entries;
    out["wall_ms"] = wall_ms();
    if (opt.use_json)
      std::cout << out.dump(2) << "\n";
    else
      std::cout << rational_str(r) << "\n";
    return 0;
  }

  // verify: compiled count vs oracle on the whole size grid
  std::vector<DomainId> roots = pr.sn.root_domains();
  long total = 0, passed = 0;
  std::string first_bad;
  std::vector<long> vec(roots.size(), 0);
  while (true) {
    DomainSizeAssignment sa;
    for (size_t i = 0; i < roots.size(); ++i) sa[roots[i]] = vec[i];
    Rational got = evaluate(pr.sn, defs, sa);
    Rational want = oracle_count_full(pr.sn, pr.f, sa, pr.declared);
    ++total;
    std::ostringstream label;
    label << "(";
    for (size_t i = 0; i < roots.size(); ++i)
      label << (i ? "," : "") << vec[i];
    label << ")";
    if (got == want) {
      ++passed;
      if (!opt.use_json)
        std::cout << label.str() << " ok " << rational_str(got) << "\n";
    } else {
      if (first_bad.empty()) first_bad = label.str();
      if (!opt.use_json)
        std::cout << label.str() << " MISMATCH compiled=" << rational_str(got)
                  << " oracle=" << rational_str(want) << "\n";
    }
    size_t i = 0;
    for (; i < vec.size(); ++i) {
      if (vec[i] < opt.max_size) {
        ++vec[i];
        std::fill(vec.begin(), vec.begin() + i, 0);
        break;
      }
    }
    if (i == vec.size()) break;
  }
  out["result"] = std::to_string(passed) + "/" + std::to_string(total);
  out["wall_ms"] = wall_ms();
  if (opt.use_json)
    std::cout << out.dump(2) << "\n";
  else
    std::cout << passed << "/" << total << " size vectors pass\n";
  if (passed != total) {
    std::cerr << "first mismatch at " << first_bad << "\n";
    return kExitMismatch;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lifted first-order model counter"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* c) {
    c->add_option("input", opt.input, "problem file")->required();
    c->add_option("--size", opt.sizes, "domain size NAME=N");
    c->add_flag("--json", opt.use_json, "machine-readable output");
  };
  auto add_compile = [&](CLI::App* c) {
    c->add_option("--dot", opt.dot_path, "write DOT graph to PATH");
    c->add_flag("--emit-defs", opt.emit_defs, "print function definitions");
    c->add_flag("--trace", opt.trace, "log rule applications to stderr");
    c->add_option("--solution", opt.solution, "solution index (default 0)");
    c->add_option("--mode", opt.mode, "greedy|hybrid")
        ->check(CLI::IsMember({"greedy", "hybrid"}));
    c->add_option("--max-depth", opt.max_depth, "hybrid branching depth");
    c->add_option("--max-solutions", opt.max_solutions, "hybrid solution cap");
  };

  CLI::App* compile = app.add_subcommand("compile", "compile to definitions");
  add_common(compile);
  add_compile(compile);
  CLI::App* count = app.add_subcommand("count", "compile and evaluate");
  add_common(count);
  add_compile(count);
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force grounding count");
  add_common(oracle);
  CLI::App* verify = app.add_subcommand("verify", "compare against the oracle");
  add_common(verify);
  add_compile(verify);
  verify->add_option("--max-size", opt.max_size, "grid upper bound")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? 0 : kExitUsage;
  }
  opt.command = app.get_subcommands().front()->get_name();
  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
