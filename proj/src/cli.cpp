#include "fairlot/cli.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairlot/json_io.hpp"
#include "fairlot/rsd.hpp"

namespace fairlot {
namespace {

int log_level() {
  const char* env = std::getenv("FAIRLOT_LOG");
  if (env == nullptr || *env == '\0') return 0;
  return std::string(env) == "debug" ? 2 : 1;
}

void logf(int level, const char* fmt, ...) {
  if (log_level() < level) return;
  std::fprintf(stderr, "fairlot: ");
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fprintf(stderr, "\n");
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string number_list(const std::vector<double>& vals) {
  std::string out = "[";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    out += fmt12(vals[i]);
  }
  return out + "]";
}

const char* pf(bool pass) { return pass ? "pass" : "FAIL"; }

// One verification check: its pass bit, the summary line for stdout and the
// full JSON document embedded into report.json.
struct CheckRow {
  std::string name;
  bool pass = false;
  std::string line;
  std::string doc;
};

CheckRow row_ex_ante(const Instance& inst, const Lottery& lot) {
  ExAnteReport r = check_ex_ante_ef(inst, lot);
  CheckRow row;
  row.name = "ex-ante-envy-free";
  row.pass = r.envy_free;
  row.line = "check ex-ante-envy-free: " + std::string(pf(r.envy_free)) +
             " (worst margin " + fmt12(r.worst_margin) + ")";
  row.doc = serialize_report(r);
  return row;
}

CheckRow row_ex_post(const Instance& inst, const Lottery& lot,
                     ExPostCheck what) {
  ExPostReport r = check_ex_post(inst, lot, what);
  const char* name = what == ExPostCheck::Feasible ? "ex-post-feasible"
                     : what == ExPostCheck::EnvyFree ? "ex-post-envy-free"
                                                     : "ex-post-proportional";
  CheckRow row;
  row.name = name;
  row.pass = r.pass;
  row.line = "check " + std::string(name) + ": " + pf(r.pass) +
             " (worst margin " + fmt12(r.worst_margin) + ")";
  row.doc = serialize_report(r, what);
  return row;
}

// Expected utility of at least a 1/n share of everything; there is no
// library struct for this one, so the document is assembled here.
CheckRow row_ex_ante_prop(const Instance& inst, const Lottery& lot) {
  UtilityMatrix u = expected_utilities(inst, lot);
  double worst = 0.0;
  std::string violations;
  for (int i = 0; i < inst.n; ++i) {
    double share = inst.full_value(i) / inst.n;
    double margin = u.own[i] - share;
    if (i == 0 || margin < worst) worst = margin;
    if (margin < -1e-9) {
      violations += violations.empty() ? "\n" : ",\n";
      violations += "    {\"agent\": " + std::to_string(i) +
                    ", \"utility\": " + fmt12(u.own[i]) +
                    ", \"share\": " + fmt12(share) + "}";
    }
  }
  CheckRow row;
  row.name = "ex-ante-proportional";
  row.pass = violations.empty();
  row.line = "check ex-ante-proportional: " + std::string(pf(row.pass)) +
             " (worst margin " + fmt12(worst) + ")";
  row.doc = "{\n  \"check\": \"ex-ante-proportional\",\n  \"pass\": " +
            std::string(row.pass ? "true" : "false") +
            ",\n  \"worst_margin\": " + fmt12(worst) +
            ",\n  \"violations\": [" + violations +
            (violations.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return row;
}

CheckRow row_pareto(const Instance& inst, const Lottery& lot, double eps,
                    ParetoClass cls, double grid_eps) {
  ParetoReport r = check_eps_pareto(inst, lot, eps, cls, grid_eps);
  CheckRow row;
  row.name = "eps-pareto";
  row.pass = r.eps_pareto;
  row.line = "check eps-pareto: " + std::string(pf(r.eps_pareto)) +
             " (margin " + fmt12(r.margin) + ")";
  row.doc = serialize_report(r);
  return row;
}

std::string indent4(const std::string& doc) {
  std::string out;
  std::size_t start = 0;
  while (start < doc.size()) {
    std::size_t end = doc.find('\n', start);
    if (end == std::string::npos) end = doc.size();
    if (!out.empty()) out += "\n";
    out += "    " + doc.substr(start, end - start);
    start = end + 1;
  }
  return out;
}

std::string compose_report(
    const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& fields,
    const std::vector<CheckRow>& checks, bool pass) {
  std::string out = "{\n  \"command\": \"" + command + "\",\n";
  for (const auto& [key, value] : fields)
    out += "  \"" + key + "\": " + value + ",\n";
  out += std::string("  \"pass\": ") + (pass ? "true" : "false") + ",\n";
  out += "  \"checks\": [";
  for (std::size_t c = 0; c < checks.size(); ++c) {
    out += c ? ",\n" : "\n";
    out += indent4(checks[c].doc);
  }
  out += checks.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string queries_field(const QueryLedger& ledger) {
  return "{\"value\": " + std::to_string(ledger.value_count) +
         ", \"cut\": " + std::to_string(ledger.cut_count) + "}";
}

// Shared flag bundle; each subcommand registers the flags it honors.
struct Options {
  std::string instance_path;
  std::string lottery_path;
  std::string out = ".";
  double epsilon = 0.25;
  std::string objective = "welfare";
  std::string fairness = "ef";
  std::uint64_t seed = 1;
  bool exact = false;
  int samples = 1000;
  int directions = 5;
  bool dump_lp_file = false;
  double solver_epsilon = 0.5;
};

Fairness parse_fairness(const std::string& s) {
  if (s == "ef") return Fairness::EnvyFree;
  if (s == "prop") return Fairness::Proportional;
  if (s == "none") return Fairness::None;
  throw ConfigError("--fairness must be ef, prop or none, got \"" + s + "\"");
}

void parse_objective(const std::string& s, SolverConfig& config) {
  if (s == "welfare") {
    config.objective = Objective::Welfare;
    return;
  }
  if (s == "leximin") {
    config.objective = Objective::Leximin;
    return;
  }
  if (s.rfind("weights=", 0) == 0) {
    config.objective = Objective::Weights;
    config.weights.clear();
    std::string rest = s.substr(8);
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t comma = rest.find(',', start);
      if (comma == std::string::npos) comma = rest.size();
      std::string tok = rest.substr(start, comma - start);
      try {
        std::size_t used = 0;
        double w = std::stod(tok, &used);
        if (used != tok.size() || tok.empty()) throw std::invalid_argument(tok);
        config.weights.push_back(w);
      } catch (const std::exception&) {
        throw ConfigError("--objective weights: \"" + tok +
                          "\" is not a number");
      }
      start = comma + 1;
    }
    return;
  }
  throw ConfigError(
      "--objective must be welfare, leximin or weights=<csv>, got \"" + s +
      "\"");
}

std::string out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out);
  return (std::filesystem::path(opt.out) / name).string();
}

void emit(const Options& opt, const std::string& name,
          const std::string& content, std::string& artifact_line) {
  std::string path = out_path(opt, name);
  write_text_file(path, content);
  artifact_line += (artifact_line.empty() ? "artifacts: " : " ") + path;
}

int finish(const std::string& command, const Options& opt,
           std::vector<std::pair<std::string, std::string>> fields,
           const std::vector<CheckRow>& checks,
           const std::vector<std::string>& gates, std::string artifact_line) {
  bool pass = true;
  for (const CheckRow& row : checks)
    for (const std::string& gate : gates)
      if (row.name == gate && !row.pass) pass = false;
  std::string gate_list;
  for (const std::string& g : gates)
    gate_list += (gate_list.empty() ? "\"" : ", \"") + g + "\"";
  fields.emplace_back("gates", "[" + gate_list + "]");
  emit(opt, "report.json", compose_report(command, fields, checks, pass),
       artifact_line);
  for (const CheckRow& row : checks) std::printf("%s\n", row.line.c_str());
  std::printf("%s\n", artifact_line.c_str());
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 2;
}

std::vector<CheckRow> fairness_rows(const Instance& inst, const Lottery& lot,
                                    Fairness fairness) {
  std::vector<CheckRow> rows;
  rows.push_back(row_ex_post(inst, lot, ExPostCheck::Feasible));
  if (fairness == Fairness::EnvyFree) rows.push_back(row_ex_ante(inst, lot));
  if (fairness == Fairness::Proportional)
    rows.push_back(row_ex_ante_prop(inst, lot));
  return rows;
}

std::vector<std::string> fairness_gates(Fairness fairness) {
  std::vector<std::string> gates = {"ex-post-feasible"};
  if (fairness == Fairness::EnvyFree) gates.push_back("ex-ante-envy-free");
  if (fairness == Fairness::Proportional)
    gates.push_back("ex-ante-proportional");
  return gates;
}

int cmd_solve(const Options& opt) {
  Instance inst = parse_instance(opt.instance_path);
  SolverConfig config;
  config.epsilon = opt.epsilon;
  config.fairness = parse_fairness(opt.fairness);
  parse_objective(opt.objective, config);
  if (config.objective == Objective::Weights &&
      static_cast<int>(config.weights.size()) != inst.n)
    throw ConfigError("--objective weights needs exactly " +
                      std::to_string(inst.n) + " entries");
  logf(1, "solve: n=%d m=%d epsilon=%s", inst.n, inst.m,
       fmt12(opt.epsilon).c_str());

  QueryLedger ledger;
  SolveResult r = solve_ef_lottery(inst, config, ledger);
  Lottery lot = merge_support(decompose(r.graph, r.flow));
  double welfare = 0.0;
  for (double u : r.utilities) welfare += u;
  logf(2, "flow LP: %zu edges, welfare %s", r.graph.edges.size(),
       fmt12(welfare).c_str());

  std::string artifacts;
  emit(opt, "flow.json", serialize_flow(r.graph, r.flow), artifacts);
  emit(opt, "lottery.json", serialize_lottery(lot), artifacts);
  if (opt.dump_lp_file)
    emit(opt, "lp.mps",
         dump_lp(assemble_lp(r.graph, r.grid, config), "FLOW"), artifacts);

  std::printf("solve: %s n=%d m=%d epsilon=%s objective=%s fairness=%s\n",
              opt.instance_path.c_str(), inst.n, inst.m,
              fmt12(opt.epsilon).c_str(), opt.objective.c_str(),
              opt.fairness.c_str());
  std::printf("queries: value=%lld cut=%lld total=%lld\n",
              static_cast<long long>(ledger.value_count),
              static_cast<long long>(ledger.cut_count),
              static_cast<long long>(ledger.total()));
  std::printf("lottery: %zu outcomes; utilities", lot.support.size());
  for (double u : r.utilities) std::printf(" %s", fmt12(u).c_str());
  std::printf("; welfare %s\n", fmt12(welfare).c_str());

  std::vector<std::pair<std::string, std::string>> fields = {
      {"instance", "\"" + opt.instance_path + "\""},
      {"epsilon", fmt12(opt.epsilon)},
      {"objective", "\"" + opt.objective + "\""},
      {"fairness", "\"" + opt.fairness + "\""},
      {"utilities", number_list(r.utilities)},
      {"welfare", fmt12(welfare)},
      {"queries", queries_field(ledger)},
  };
  return finish("solve", opt, std::move(fields),
                fairness_rows(inst, lot, config.fairness),
                fairness_gates(config.fairness), std::move(artifacts));
}

int cmd_naive_solve(const Options& opt) {
  Instance inst = parse_instance(opt.instance_path);
  SolverConfig config;
  config.epsilon = opt.epsilon;
  config.fairness = parse_fairness(opt.fairness);
  parse_objective(opt.objective, config);
  if (config.objective == Objective::Weights &&
      static_cast<int>(config.weights.size()) != inst.n)
    throw ConfigError("--objective weights needs exactly " +
                      std::to_string(inst.n) + " entries");

  QueryLedger ledger;
  NaiveResult nr = solve_naive(inst, config, ledger);
  DerandomizeResult dr = derandomize_naive(nr);
  double welfare = 0.0;
  for (double u : nr.utilities) welfare += u;

  std::string marginals;
  for (std::size_t i = 0; i < nr.marginals.size(); ++i)
    for (std::size_t q = 0; q < nr.marginals[i].size(); ++q)
      for (std::size_t y = 0; y < nr.marginals[i][q].size(); ++y) {
        if (nr.marginals[i][q][y] == 0.0) continue;
        marginals += marginals.empty() ? "\n" : ",\n";
        marginals += "    {\"agent\": " + std::to_string(i) + ", \"item\": " +
                     std::to_string(q) + ", \"pieces\": " + std::to_string(y) +
                     ", \"probability\": " + fmt12(nr.marginals[i][q][y]) +
                     "}";
      }
  std::string naive_doc = "{\n  \"utilities\": " + number_list(nr.utilities) +
                          ",\n  \"marginals\": [" + marginals +
                          (marginals.empty() ? "]\n}\n" : "\n  ]\n}\n");

  std::string artifacts;
  emit(opt, "naive.json", naive_doc, artifacts);
  if (opt.dump_lp_file)
    emit(opt, "lp.mps", dump_lp(assemble_naive_lp(nr.grid, config), "NAIVE"),
         artifacts);

  std::printf(
      "naive-solve: %s n=%d m=%d epsilon=%s objective=%s fairness=%s\n",
      opt.instance_path.c_str(), inst.n, inst.m, fmt12(opt.epsilon).c_str(),
      opt.objective.c_str(), opt.fairness.c_str());
  std::printf("queries: value=%lld cut=%lld total=%lld\n",
              static_cast<long long>(ledger.value_count),
              static_cast<long long>(ledger.cut_count),
              static_cast<long long>(ledger.total()));
  std::printf("naive optimum: utilities");
  for (double u : nr.utilities) std::printf(" %s", fmt12(u).c_str());
  std::printf("; welfare %s\n", fmt12(welfare).c_str());

  std::vector<std::pair<std::string, std::string>> fields = {
      {"instance", "\"" + opt.instance_path + "\""},
      {"epsilon", fmt12(opt.epsilon)},
      {"objective", "\"" + opt.objective + "\""},
      {"fairness", "\"" + opt.fairness + "\""},
      {"utilities", number_list(nr.utilities)},
      {"welfare", fmt12(welfare)},
      {"queries", queries_field(ledger)},
      {"derandomizable", dr.feasible ? "true" : "false"},
  };

  if (!dr.feasible) {
    std::printf(
        "decomposition impossible: no lottery matches the naive marginals\n");
    CheckRow row;
    row.name = "derandomizable";
    row.pass = false;
    row.line = "check derandomizable: FAIL (the naive optimum promises "
               "utilities no lottery delivers)";
    row.doc = "{\n  \"check\": \"derandomizable\",\n  \"pass\": false,\n"
              "  \"note\": \"no flow matches the naive marginals\"\n}\n";
    return finish("naive-solve", opt, std::move(fields), {row},
                  {"derandomizable"}, std::move(artifacts));
  }

  Lottery lot = merge_support(decompose(dr.graph, dr.flow));
  emit(opt, "flow.json", serialize_flow(dr.graph, dr.flow), artifacts);
  emit(opt, "lottery.json", serialize_lottery(lot), artifacts);
  std::printf("decomposition found: %zu outcomes\n", lot.support.size());
  std::vector<CheckRow> checks = fairness_rows(inst, lot, config.fairness);
  std::vector<std::string> gates = fairness_gates(config.fairness);
  gates.push_back("derandomizable");
  return finish("naive-solve", opt, std::move(fields), checks, gates,
                std::move(artifacts));
}

int cmd_rsd(const Options& opt) {
  Instance inst = parse_instance(opt.instance_path);
  QueryLedger ledger;
  RsdMode mode = opt.exact ? RsdMode::Exact : RsdMode::Sampled;
  if (!opt.exact && opt.samples < 1)
    throw ConfigError("--samples must be at least 1");
  Lottery lot =
      rsd_lottery(inst, mode, opt.seed, opt.exact ? 0 : opt.samples, ledger);

  std::string artifacts;
  emit(opt, "lottery.json", serialize_lottery(lot), artifacts);

  UtilityMatrix u = expected_utilities(inst, lot);
  std::printf("rsd: %s n=%d m=%d mode=%s", opt.instance_path.c_str(), inst.n,
              inst.m, opt.exact ? "exact" : "sampled");
  if (!opt.exact)
    std::printf(" samples=%d seed=%llu", opt.samples,
                static_cast<unsigned long long>(opt.seed));
  std::printf("\n");
  std::printf("queries: value=%lld cut=%lld total=%lld\n",
              static_cast<long long>(ledger.value_count),
              static_cast<long long>(ledger.cut_count),
              static_cast<long long>(ledger.total()));
  std::printf("lottery: %zu outcomes; utilities", lot.support.size());
  for (double v : u.own) std::printf(" %s", fmt12(v).c_str());
  std::printf("\n");

  std::vector<std::pair<std::string, std::string>> fields = {
      {"instance", "\"" + opt.instance_path + "\""},
      {"mode", opt.exact ? "\"exact\"" : "\"sampled\""},
      {"samples", std::to_string(opt.exact ? 0 : opt.samples)},
      {"seed", std::to_string(opt.seed)},
      {"utilities", number_list(u.own)},
      {"queries", queries_field(ledger)},
  };
  std::vector<CheckRow> checks = {
      row_ex_post(inst, lot, ExPostCheck::Feasible), row_ex_ante(inst, lot)};
  return finish("rsd", opt, std::move(fields), checks,
                {"ex-post-feasible", "ex-ante-envy-free"},
                std::move(artifacts));
}

int cmd_verify(const Options& opt) {
  Instance inst = parse_instance(opt.instance_path);
  Lottery lot = parse_lottery(opt.lottery_path);
  Fairness fairness = parse_fairness(opt.fairness);

  std::vector<CheckRow> checks = fairness_rows(inst, lot, fairness);
  checks.push_back(row_ex_post(inst, lot, ExPostCheck::EnvyFree));
  checks.push_back(row_ex_post(inst, lot, ExPostCheck::Proportional));
  ParetoClass cls = fairness == Fairness::EnvyFree
                        ? ParetoClass::EfLotteriesOnGrid
                        : ParetoClass::AllLotteriesOnGrid;
  checks.push_back(row_pareto(inst, lot, 0.0, cls, opt.epsilon));

  UtilityMatrix u = expected_utilities(inst, lot);
  std::printf("verify: %s against %s fairness=%s epsilon=%s\n",
              opt.lottery_path.c_str(), opt.instance_path.c_str(),
              opt.fairness.c_str(), fmt12(opt.epsilon).c_str());
  std::printf("lottery: %zu outcomes; utilities", lot.support.size());
  for (double v : u.own) std::printf(" %s", fmt12(v).c_str());
  std::printf("\n");

  std::vector<std::pair<std::string, std::string>> fields = {
      {"instance", "\"" + opt.instance_path + "\""},
      {"lottery", "\"" + opt.lottery_path + "\""},
      {"epsilon", fmt12(opt.epsilon)},
      {"fairness", "\"" + opt.fairness + "\""},
      {"utilities", number_list(u.own)},
  };
  return finish("verify", opt, std::move(fields), checks,
                fairness_gates(fairness), "");
}

int cmd_frontier(const Options& opt) {
  Instance inst = parse_instance(opt.instance_path);
  Fairness fairness = parse_fairness(opt.fairness);
  FrontierData data =
      frontier_sweep(inst, opt.epsilon, opt.directions, fairness);

  std::string artifacts;
  std::vector<std::string> refs;
  for (std::size_t p = 0; p < data.lottery_points.size(); ++p) {
    char name[40];
    std::snprintf(name, sizeof name, "frontier_%03zu.json", p);
    emit(opt, name, serialize_lottery(data.lottery_points[p].lottery),
         artifacts);
    refs.push_back(name);
  }
  emit(opt, "frontier.csv", frontier_csv(data, refs), artifacts);
  emit(opt, "outcomes.csv", deterministic_csv(data), artifacts);

  int k = grid_pieces(opt.epsilon);
  long long value_queries = static_cast<long long>(inst.n) * inst.m * k *
                            (static_cast<long long>(refs.size()) + 1);
  std::printf("frontier: %s directions=%d fairness=%s epsilon=%s\n",
              opt.instance_path.c_str(), opt.directions, opt.fairness.c_str(),
              fmt12(opt.epsilon).c_str());
  std::printf("queries: value=%lld cut=0 total=%lld (one grid pass per sweep "
              "plus the outcome pass)\n",
              value_queries, value_queries);
  std::printf("points: %zu lottery, %zu deterministic\n",
              data.lottery_points.size(), data.deterministic_points.size());

  std::vector<std::pair<std::string, std::string>> fields = {
      {"instance", "\"" + opt.instance_path + "\""},
      {"epsilon", fmt12(opt.epsilon)},
      {"directions", std::to_string(opt.directions)},
      {"fairness", "\"" + opt.fairness + "\""},
      {"lottery_points", std::to_string(data.lottery_points.size())},
      {"deterministic_points",
       std::to_string(data.deterministic_points.size())},
      {"queries", "{\"value\": " + std::to_string(value_queries) +
                      ", \"cut\": 0}"},
  };
  return finish("frontier", opt, std::move(fields), {}, {},
                std::move(artifacts));
}

int cmd_adversary_audit(const Options& opt) {
  AdversaryState state(opt.epsilon);
  Lottery audited;
  std::string source;
  if (!opt.lottery_path.empty()) {
    audited = parse_lottery(opt.lottery_path);
    source = opt.lottery_path;
  } else {
    AdversaryOracle oracle(state);
    SolverConfig config;
    config.epsilon = opt.solver_epsilon;
    SolveResult r = solve_ef_lottery(oracle, config);
    audited = merge_support(decompose(r.graph, r.flow));
    source = "solve_ef_lottery through the adversary (epsilon=" +
             fmt12(opt.solver_epsilon) + ")";
  }
  logf(1, "adversary transcript: %zu queries", state.transcript.size());

  ForgedInstances fi = forge_instances(state, opt.epsilon);
  AuditReport rep = audit_lottery(fi, audited, opt.epsilon);

  std::string artifacts;
  emit(opt, "instance_i1.json", serialize_instance(fi.i1), artifacts);
  emit(opt, "instance_i2.json", serialize_instance(fi.i2), artifacts);
  emit(opt, "instance_i3.json", serialize_instance(fi.i3), artifacts);
  emit(opt, "lottery.json", serialize_lottery(audited), artifacts);
  emit(opt, "report.json", serialize_report(rep), artifacts);

  std::printf("adversary-audit: epsilon=%s lottery from %s\n",
              fmt12(opt.epsilon).c_str(), source.c_str());
  std::printf("queries answered: %zu; hidden interval [%s, %s]\n",
              state.transcript.size(), fmt12(rep.x1).c_str(),
              fmt12(rep.x1 + rep.epsilon).c_str());
  bool all_pass = true;
  for (const AuditCheck& c : rep.checks) {
    std::printf("check %s: %s (value %s)\n", c.name.c_str(), pf(c.pass),
                fmt12(c.value).c_str());
    all_pass = all_pass && c.pass;
  }
  if (rep.defeated)
    std::printf("defeated in %s: no finite transcript protects this "
                "lottery in every consistent instance\n",
                rep.defeating_instance.c_str());
  std::printf("%s\n", artifacts.c_str());
  std::printf("%s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? 0 : 2;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"envy-free lotteries over divisible goods"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* solve = app.add_subcommand(
      "solve", "discretize, solve the lottery flow LP, decompose, verify");
  CLI::App* naive = app.add_subcommand(
      "naive-solve",
      "solve the per-item marginal relaxation and try to derandomize it");
  CLI::App* rsd = app.add_subcommand(
      "rsd", "random serial dictatorship, exact or sampled");
  CLI::App* verify = app.add_subcommand(
      "verify", "re-check a lottery file against an instance");
  CLI::App* frontier = app.add_subcommand(
      "frontier", "sweep weighted objectives across the utility frontier");
  CLI::App* audit = app.add_subcommand(
      "adversary-audit",
      "answer queries as-if-linear, forge instances, audit the result");

  for (CLI::App* sub : {solve, naive, rsd, verify, frontier})
    sub->add_option("instance", opt.instance_path, "instance JSON file")
        ->required();
  verify->add_option("lottery", opt.lottery_path, "lottery JSON file")
      ->required();
  for (CLI::App* sub : {solve, naive, verify, frontier, audit})
    sub->add_option("--epsilon", opt.epsilon,
                    audit == sub ? "hidden interval length"
                                 : "grid step (1/epsilon integral)")
        ->capture_default_str();
  for (CLI::App* sub : {solve, naive})
    sub->add_option("--objective", opt.objective,
                    "welfare, leximin or weights=<csv>")
        ->capture_default_str();
  for (CLI::App* sub : {solve, naive, verify, frontier})
    sub->add_option("--fairness", opt.fairness, "ef, prop or none")
        ->capture_default_str();
  for (CLI::App* sub : {solve, naive})
    sub->add_flag("--dump-lp", opt.dump_lp_file,
                  "also write the assembled LP in MPS layout");
  CLI::Option* exact =
      rsd->add_flag("--exact", opt.exact, "average all n! orders");
  rsd->add_option("--samples", opt.samples, "sampled orders")
      ->capture_default_str()
      ->excludes(exact);
  rsd->add_option("--seed", opt.seed, "sampling seed")->capture_default_str();
  frontier->add_option("--directions", opt.directions,
                       "weight vectors across the simplex")
      ->capture_default_str();
  audit->add_option("--lottery", opt.lottery_path,
                    "audit this lottery file instead of the solver's output");
  audit->add_option("--solver-epsilon", opt.solver_epsilon,
                    "grid step for the audited solver run")
      ->capture_default_str();
  for (CLI::App* sub : {solve, naive, rsd, verify, frontier, audit})
    sub->add_option("--out", opt.out, "artifact directory")
        ->capture_default_str();

  // The adversary target has a different natural default than the grid step.
  audit->parse_complete_callback([&] {
    if (audit->count("--epsilon") == 0) opt.epsilon = 0.2;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(opt);
    if (*naive) return cmd_naive_solve(opt);
    if (*rsd) return cmd_rsd(opt);
    if (*verify) return cmd_verify(opt);
    if (*frontier) return cmd_frontier(opt);
    if (*audit) return cmd_adversary_audit(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "error: no subcommand\n");
  return 1;
}

}  // namespace fairlot
