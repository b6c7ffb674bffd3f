#pragma once

// Subcommand front end. All numerics live in the library headers; this file
// only parses flags, calls them and formats the result.

#include "rainbow/census.hpp"
#include "rainbow/errors.hpp"
#include "rainbow/harness.hpp"
#include "rainbow/io.hpp"
#include "rainbow/search.hpp"
#include "rainbow/theory.hpp"
#include "rainbow/variance.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace rainbow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

/// Usage problems discovered after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string subcommand;
  std::string model = "hamilton";
  int n = 3;
  int d = 4;
  long long trials = 10000;
  std::uint64_t seed = 0;
  std::optional<int> i_max;
  std::string format = "json";
  int threads = 1;
  std::string output;
  std::string input;
  // search / census
  bool exists = false;
  bool cross_check = false;
  // variance
  bool n_given = false;
  bool surface = false;
  bool quintic = false;
  bool terms = false;
  bool force_float = false;
  double delta = 0.5;
  int grid = 2000;
  // experiment
  std::vector<std::string> stats;
  std::vector<std::string> moments;
  bool with_oracle = false;
  bool gof = false;
};

inline int default_threads() {
  if (const char* env = std::getenv("RAINBOW_LAB_THREADS")) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(env, &used);
      if (used == std::string(env).size() && v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("RAINBOW_LAB_THREADS must be a positive integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// "Y*1:0:2*2:1:1" -> FactorialMoment
inline mc::FactorialMoment parse_moment(const std::string& text) {
  mc::FactorialMoment fm;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, '*')) {
    if (tok == "Y") {
      fm.with_y = true;
      continue;
    }
    int i, j, m;
    char c1, c2;
    std::istringstream ts(tok);
    if (!(ts >> i >> c1 >> j >> c2 >> m) || c1 != ':' || c2 != ':' || !ts.eof())
      throw UsageError("malformed moment term: " + tok);
    fm.orders.emplace_back(i, j, m);
  }
  return fm;
}

// Flattens {"exact", "value"} leaves into "quantity,exact,value" rows and
// other scalars into "quantity,,value".
inline void flatten_json(const nlohmann::json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object() && j.contains("exact") && j.contains("value") && j.size() == 2) {
    os << prefix << ',' << j["exact"].get<std::string>() << ',' << j["value"].dump() << '\n';
    return;
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_json(v, prefix.empty() ? k : prefix + "." + k, os);
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_json(j[i], prefix + "[" + std::to_string(i) + "]", os);
    return;
  }
  os << prefix << ",," << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
}

inline std::string flat_csv(const nlohmann::json& j) {
  std::ostringstream os;
  os << "quantity,exact,value\n";
  flatten_json(j, "", os);
  return os.str();
}

class Runner {
public:
  explicit Runner(const CliConfig& c) : c_(c) {}

  std::string run() {
    if (c_.subcommand == "sample") return sample();
    if (c_.subcommand == "search") return search();
    if (c_.subcommand == "census") return census_cmd();
    if (c_.subcommand == "theory") return theory_cmd();
    if (c_.subcommand == "variance") return variance_cmd();
    if (c_.subcommand == "oracle") return oracle_cmd();
    if (c_.subcommand == "experiment") return experiment();
    throw UsageError("unknown subcommand");
  }

private:
  bool csv() const { return c_.format == "csv"; }

  static std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

  mc::Model model() const { return mc::parse_model(c_.model); }

  int vertices() const { return model() == mc::Model::matching ? 2 * c_.n : c_.n; }

  int i_max_or(int cap) const { return c_.i_max ? *c_.i_max : std::min(4, cap); }

  mc::Instance instance() const {
    if (!c_.input.empty()) {
      std::ifstream in(c_.input);
      if (!in) throw UsageError("cannot read " + c_.input);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& ex) {
        throw ParameterError(std::string("malformed instance: ") + ex.what());
      }
      return parse_instance_json(j);
    }
    return sample_instance(model(), c_.n, c_.d, c_.seed);
  }

  std::string sample() const {
    const auto inst = instance();
    if (csv()) {
      std::ostringstream os;
      os << "edge_id,u,v,colour\n";
      for (std::size_t e = 0; e < inst.graph.edge_count(); ++e)
        os << e << ',' << inst.graph.edges[e].u << ',' << inst.graph.edges[e].v << ',' << inst.colouring.colour[e]
           << '\n';
      return os.str();
    }
    return json_text(instance_json(inst, model(), c_.n, c_.seed));
  }

  std::string search() const {
    const auto inst = instance();
    const bool matching = 2 * inst.colouring.colours == inst.graph.n && model() == mc::Model::matching;
    SearchResult r;
    std::string target;
    if (matching) {
      target = "Z";
      r = count_rainbow_matching(inst.graph, inst.colouring);
    } else {
      target = "Y";
      r = count_rainbow_hamilton(inst.graph, inst.colouring, c_.exists ? SearchMode::exists : SearchMode::count);
    }
    if (csv()) {
      std::ostringstream os;
      os << "target,count,exists,nodes_expanded\n"
         << target << ',' << r.count << ',' << (r.exists ? 1 : 0) << ',' << r.nodes_expanded << '\n';
      return os.str();
    }
    nlohmann::json j = {{"target", target},
                        {"mode", c_.exists ? "exists" : "count"},
                        {"count", r.count},
                        {"exists", r.exists},
                        {"nodes_expanded", r.nodes_expanded},
                        {"vertices", inst.graph.n},
                        {"d", inst.graph.d}};
    return json_text(j);
  }

  std::string census_cmd() const {
    const auto inst = instance();
    const int i_max = i_max_or(inst.graph.n);
    const auto table = census(build_bipartite(inst.graph, inst.colouring), i_max);
    if (csv()) return census_csv(table);
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= i_max; ++i)
      for (int j = 0; j <= i; ++j) rows.push_back({{"i", i}, {"j", j}, {"count", table.at(i, j)}});
    nlohmann::json out = {{"i_max", i_max}, {"census", rows}};
    if (c_.cross_check) {
      const auto cc = interpret_cross_check(inst.graph, inst.colouring, i_max);
      nlohmann::json check = nlohmann::json::array();
      for (int i = 1; i <= i_max; ++i)
        check.push_back({{"i", i},
                         {"rainbow_cycles", cc.rainbow_cycles[i]},
                         {"same_end_colour_paths", cc.same_end_paths[i]},
                         {"degenerate", cc.degenerate[i]},
                         {"agrees", cc.agrees_with(table, i)}});
      out["cross_check"] = check;
    }
    return json_text(out);
  }

  std::string theory_cmd() const {
    nlohmann::json j;
    if (model() == mc::Model::matching) {
      j = theory::to_json(theory::matching_theory(c_.n, c_.d, c_.i_max.value_or(3)));
    } else {
      j = theory::hamilton_report(c_.n, c_.d, c_.i_max.value_or(4));
    }
    return csv() ? flat_csv(j) : json_text(j);
  }

  std::string variance_cmd() const {
    if (!c_.n_given && !c_.surface && !c_.quintic) throw UsageError("variance needs --n, --surface or --quintic");
    nlohmann::json out = nlohmann::json::object();
    std::optional<variance::SecondMoment> sm;
    if (c_.n_given) {
      sm = variance::second_moment_finite(c_.n, c_.d, c_.force_float);
      out["second_moment"] = variance::to_json(*sm);
    }
    if (c_.surface) out["surface"] = variance::to_json(variance::argmax_F(c_.d, c_.grid));
    if (c_.quintic) {
      const double t = c_.d - 2;
      out["quintic"] = variance::to_json(variance::quintic_tools(t, c_.delta));
      out["quintic"]["g_half"] = variance::quintic_g(t, 0.5);
    }
    if (csv()) {
      if (c_.terms && sm) return variance::terms_csv(*sm);
      return flat_csv(out);
    }
    if (c_.terms && sm) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : sm->terms) terms.push_back({{"k", t.k}, {"j", t.j}, {"f", t.f}});
      out["second_moment"]["terms"] = terms;
    }
    return json_text(out);
  }

  std::string oracle_cmd() const {
    const auto rec = mc::oracle_exhaustive(c_.n, c_.d, i_max_or(c_.n));
    const auto j = mc::to_json(rec);
    return csv() ? flat_csv(j) : json_text(j);
  }

  std::string experiment() const {
    mc::ExperimentPlan p;
    p.model = model();
    p.n = c_.n;
    p.d = c_.d;
    p.trials = c_.trials;
    p.seed = c_.seed;
    p.threads = c_.threads;
    p.i_max = i_max_or(vertices());
    p.census = false;
    std::vector<std::string> stats = c_.stats;
    if (stats.empty()) stats = {p.model == mc::Model::matching ? "Z" : "X"};
    for (const auto& s : stats) {
      if (s == "Y") p.hamilton_count = true;
      else if (s == "P") p.hamilton_exists = true;
      else if (s == "X") p.census = true;
      else if (s == "Z") p.matching_count = true;
      else throw UsageError("unknown statistic: " + s + " (use Y, P, X, Z)");
    }
    for (const auto& m : c_.moments) p.moments.push_back(parse_moment(m));
    std::optional<mc::OracleRecord> oracle;
    if (c_.with_oracle) {
      p.validate();
      oracle = mc::oracle_exhaustive(p.n, p.d, p.census ? p.i_max : std::min(p.i_max, p.n));
    }
    const auto result = mc::run_trials(p);
    if (csv()) {
      std::ostringstream os;
      os.precision(17);
      os << "stat,mean,stderr,trials\n";
      for (const auto& [k, e] : result.estimates) os << k << ',' << e.mean << ',' << e.stderr_ << ',' << e.trials << '\n';
      return os.str();
    }
    auto doc = mc::results_document(result, oracle);
    if (c_.gof) {
      if (!p.census || p.model != mc::Model::hamilton) throw UsageError("--gof needs the hamilton model with X");
      nlohmann::json reports = nlohmann::json::array();
      for (int i = 1; i <= p.i_max; ++i)
        for (int j = 0; j <= i; ++j) {
          const auto key = "X_" + std::to_string(i) + "_" + std::to_string(j);
          const double lambda = to_double(theory::lambda_delta_mu(p.d, i, j).lambda);
          const double finite = to_double(theory::expected_census_exact(p.n, p.d, i, j));
          const auto samples = result.samples(key);
          const auto g = mc::poisson_gof(samples, lambda, finite);
          reports.push_back({{"stat", key},
                             {"lambda", lambda},
                             {"expected_mean", finite},
                             {"tv", g.tv},
                             {"mean_gap", g.mean_gap},
                             {"mean_tolerance", g.mean_tolerance},
                             {"pass", g.pass}});
        }
      doc["poisson"] = reports;
    }
    return json_text(doc);
  }

  const CliConfig& c_;
};

/// Entry point. Exit 0 on success, 1 on usage errors, 2 when the parameters
/// are infeasible for the requested computation.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Rainbow Hamilton cycles in random regular graphs: sampling, exact search, censuses, theory and "
               "Monte Carlo experiments.",
               "rainbow_lab"};
  app.require_subcommand(1);
  CliConfig c;

  auto model_opt = [&](CLI::App* s) {
    s->add_option("--model", c.model, "hamilton | matching | planted")
        ->check(CLI::IsMember({"hamilton", "matching", "planted"}));
  };
  auto nd = [&](CLI::App* s) {
    s->add_option("--n", c.n, "vertices (hamilton, planted) or colours (matching)");
    s->add_option("--d", c.d, "degree");
  };
  auto fmt = [&](CLI::App* s) {
    s->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("-o,--output", c.output, "write to a file instead of stdout");
  };
  auto imax = [&](CLI::App* s) { s->add_option("--i-max", c.i_max, "largest census length"); };
  auto seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "master seed"); };

  auto* sample = app.add_subcommand("sample", "emit one coloured instance");
  model_opt(sample), nd(sample), seed(sample), fmt(sample);

  auto* search = app.add_subcommand("search", "count rainbow Hamilton cycles (Y) or rainbow perfect matchings (Z)");
  model_opt(search), nd(search), seed(search), fmt(search);
  search->add_option("--input", c.input, "instance JSON from `sample`");
  search->add_flag("--exists", c.exists, "stop at the first cycle");

  auto* census_cmd = app.add_subcommand("census", "X_ij table of one instance");
  model_opt(census_cmd), nd(census_cmd), seed(census_cmd), fmt(census_cmd), imax(census_cmd);
  census_cmd->add_option("--input", c.input, "instance JSON from `sample`");
  census_cmd->add_flag("--cross-check", c.cross_check, "compare X_i0 and X_i1 with direct multigraph counts");

  auto* theory_cmd = app.add_subcommand("theory", "closed forms for given n, d");
  model_opt(theory_cmd), nd(theory_cmd), fmt(theory_cmd), imax(theory_cmd);

  auto* variance_cmd = app.add_subcommand("variance", "second moment ratio, surface argmax, quintic report");
  variance_cmd->add_option("--d", c.d, "degree");
  auto* n_opt = variance_cmd->add_option("--n", c.n, "finite-n ratio E Y^2/(E Y)^2");
  variance_cmd->add_flag("--surface", c.surface, "global argmax of F over T");
  variance_cmd->add_flag("--quintic", c.quintic, "quintic factorization report");
  variance_cmd->add_option("--delta", c.delta, "evaluation point for --quintic");
  variance_cmd->add_option("--grid", c.grid, "grid resolution for --surface");
  variance_cmd->add_flag("--terms", c.terms, "list every (k, j) term");
  variance_cmd->add_flag("--float", c.force_float, "lgamma evaluation even for small n");
  fmt(variance_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive exact record for tiny n, d");
  nd(oracle_cmd), fmt(oracle_cmd), imax(oracle_cmd);

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo plan");
  model_opt(experiment), nd(experiment), seed(experiment), fmt(experiment), imax(experiment);
  experiment->add_option("--trials", c.trials, "number of trials");
  auto* threads_opt = experiment->add_option("--threads", c.threads, "worker threads");
  experiment->add_option("--stats", c.stats, "any of Y, P, X, Z")->delimiter(',');
  experiment->add_option("--moment", c.moments, "factorial moment such as Y*1:0:2 (i:j:order)");
  experiment->add_flag("--oracle", c.with_oracle, "attach the exhaustive oracle record");
  experiment->add_flag("--gof", c.gof, "Poisson goodness of fit for every X_ij");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  for (auto* s : app.get_subcommands()) c.subcommand = s->get_name();
  c.n_given = n_opt->count() > 0;
  try {
    if (threads_opt->count() == 0) c.threads = default_threads();
    const std::string text = Runner(c).run();
    if (c.output.empty()) {
      out << text;
    } else {
      std::ofstream f(c.output);
      if (!f) throw UsageError("cannot write " + c.output);
      f << text;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

}  // namespace rainbow::cli
