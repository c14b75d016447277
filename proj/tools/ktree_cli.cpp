// ktree: command-line front end for sampling, exact laws, oracles and the
// experiment harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktree/asymptotics.hpp"
#include "ktree/distribution.hpp"
#include "ktree/error.hpp"
#include "ktree/exact.hpp"
#include "ktree/harness.hpp"
#include "ktree/ktree.hpp"
#include "ktree/metrics.hpp"
#include "ktree/oracle.hpp"

using namespace ktree;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0, kExitUsage = 1, kExitCheck = 2;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by all subcommands; unused ones are simply not registered.
struct Options {
  int k = 2;
  std::uint32_t n = 10;
  std::uint32_t j = 1;
  std::uint64_t seed = 1;
  std::uint64_t reps = 10'000;
  unsigned threads = 1;
  std::string law = "outdegree";
  int thm = 0;
  std::string backend = "exact";
  std::string parameter = "outdegree";
  std::string node = "last";
  std::string tree_in;
  std::string trace_out;
  std::string out;
  std::string json_out;
  std::string compare;
  double alpha = 1e-4;
  std::vector<std::uint64_t> ladder;
  double tol = 1e-12;
  std::uint32_t max_n = 6;
};

// Output sink: --out FILE or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::invalid_parameter, "cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

NodeSelector parse_node(const std::string& s) {
  if (s == "last") return NodeSelector::last();
  if (s == "root") return NodeSelector::root();
  if (s == "random") return NodeSelector::random_inserted();
  try {
    std::size_t used = 0;
    const auto j = std::stoul(s, &used);
    if (used == s.size() && j >= 1) return NodeSelector::fixed(static_cast<std::uint32_t>(j));
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::invalid_parameter, "node must be last, root, random or a positive integer, got " + s);
}

Parameter parse_param(const std::string& s) {
  if (auto p = parse_parameter(s)) return *p;
  throw Error(ErrorCode::invalid_parameter, "unknown parameter " + s);
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// exact

struct ExactLaw {
  const char* name;
  int number;  // numeric alias accepted by --thm
  bool needs_j;
};

constexpr ExactLaw kLaws[] = {
    {"outdegree", 1, true},          {"root-outdegree", 2, false},     {"random-outdegree", 3, false},
    {"descendants", 5, true},        {"random-descendants", 6, false},
};

const ExactLaw& resolve_law(const Options& o) {
  for (const auto& l : kLaws)
    if (o.thm != 0 ? l.number == o.thm : o.law == l.name) return l;
  throw Error(ErrorCode::invalid_parameter,
              o.thm != 0 ? "--thm must be one of 1, 2, 3, 5, 6" : "unknown law " + o.law);
}

// Rows (m, probability) of the selected law over its whole support.
std::vector<std::pair<std::uint64_t, exact::Rational>> exact_rows(const ExactLaw& law, const Options& o) {
  std::vector<std::pair<std::uint64_t, exact::Rational>> rows;
  const std::string name = law.name;
  auto push_table = [&](const std::vector<exact::Rational>& t, std::uint64_t first) {
    for (std::size_t i = 0; i < t.size(); ++i) rows.emplace_back(first + i, t[i]);
  };
  if (name == "outdegree") {
    push_table(exact::outdegree_pmf_table(o.k, o.n, o.j, o.n - o.j), 0);
  } else if (name == "root-outdegree") {
    push_table(exact::root_outdegree_pmf_table(o.k, o.n, o.n), 0);
  } else if (name == "random-outdegree") {
    push_table(exact::random_outdegree_pmf_table(o.k, o.n, o.n), 0);
  } else if (name == "descendants") {
    for (std::uint64_t m = 1; m <= o.n - o.j + 1; ++m) rows.emplace_back(m, exact::pmf_descendants(o.k, o.n, o.j, m));
  } else {
    const auto t = exact::random_descendants_pmf_table(o.k, o.n, o.n);
    for (std::size_t m = 1; m < t.size(); ++m) rows.emplace_back(m, t[m]);
  }
  return rows;
}

json run_exact(const Options& o, std::ostream& os) {
  const auto& law = resolve_law(o);
  if (law.needs_j && (o.j < 1 || o.j > o.n))
    throw Error(ErrorCode::invalid_parameter, "need 1 <= j <= n for " + std::string(law.name));
  if (o.backend != "exact" && o.backend != "float")
    throw Error(ErrorCode::invalid_parameter, "backend must be exact or float");

  os << std::setprecision(17);
  json summary{{"law", law.name}};
  if (o.backend == "float") {
    // Floating-point evaluation; only the descendants law has a native float path.
    os << "m,prob_float\n";
    double total = 0;
    if (std::string(law.name) == "descendants") {
      const auto t = exact::descendants_pmf_float_table(o.k, o.n, o.j);
      for (std::size_t i = 0; i < t.size(); ++i) {
        os << i + 1 << ',' << t[i] << '\n';
        total += t[i];
      }
    } else {
      for (const auto& [m, p] : exact_rows(law, o)) {
        os << m << ',' << p.get_d() << '\n';
        total += p.get_d();
      }
    }
    summary["total"] = total;
    if (std::abs(total - 1) > 1e-9) throw CheckFailure("probabilities sum to " + format_double(total));
    return summary;
  }

  os << "m,prob_num,prob_den,prob_float\n";
  exact::Rational total = 0;
  for (const auto& [m, p] : exact_rows(law, o)) {
    os << m << ',' << p.get_num().get_str() << ',' << p.get_den().get_str() << ',' << p.get_d() << '\n';
    total += p;
  }
  summary["total"] = total.get_str();
  if (total != 1) throw CheckFailure("probabilities sum to " + total.get_str());
  return summary;
}

// ---------------------------------------------------------------------------

json run_generate(const Options& o, std::ostream& os) {
  const auto ev = evolve(o.k, o.n, o.seed);
  os << serialize(ev.tree);
  if (!o.trace_out.empty()) {
    std::ofstream t(o.trace_out);
    if (!t) throw Error(ErrorCode::invalid_parameter, "cannot open " + o.trace_out);
    t << serialize_trace(ev.trace);
  }
  return {{"nodes", ev.tree.size()}, {"cliques", ev.tree.cliques().size()}, {"slots", ev.tree.slot_count()}};
}

KTree load_or_grow(const Options& o) {
  if (o.tree_in.empty()) return evolve(o.k, o.n, o.seed).tree;
  std::ifstream in(o.tree_in);
  if (!in) throw Error(ErrorCode::invalid_parameter, "cannot open " + o.tree_in);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  // A trace file starts with "trace", a tree document with "ktree".
  if (text.rfind("trace", 0) == 0) return replay(deserialize_trace(text));
  return deserialize(text);
}

json run_metrics(const Options& o, std::ostream& os) {
  const auto t = load_or_grow(o);
  const auto rows = metrics::node_metrics(t);
  metrics::write_metrics_csv(os, t, rows);
  return {{"nodes", rows.size()}, {"edges", t.edge_count()}};
}

json run_oracle(const Options& o, std::ostream& os) {
  const auto p = parse_param(o.parameter);
  const auto sel = parse_node(o.node);
  const auto table = oracle::exact_empirical_distribution(o.k, o.n, p, sel);
  write_pmf_csv(os, table);
  json summary{{"trees", exact::count_trees(o.k, o.n).get_str()}};
  // Where a closed form exists, the enumerated law must equal it.
  std::function<exact::Rational(std::uint64_t)> formula;
  if (p == Parameter::outdegree && sel.kind == NodeSelector::Kind::fixed)
    formula = [&](std::uint64_t m) { return exact::pmf_outdegree(o.k, o.n, sel.j, m); };
  else if (p == Parameter::outdegree && sel.kind == NodeSelector::Kind::root)
    formula = [&](std::uint64_t m) { return exact::pmf_root_outdegree(o.k, o.n, m); };
  else if (p == Parameter::outdegree && sel.kind == NodeSelector::Kind::random_inserted)
    formula = [&](std::uint64_t m) { return exact::pmf_random_outdegree(o.k, o.n, m); };
  else if (p == Parameter::descendants && sel.kind == NodeSelector::Kind::fixed)
    formula = [&](std::uint64_t m) { return m == 0 ? exact::Rational(0) : exact::pmf_descendants(o.k, o.n, sel.j, m); };
  else if (p == Parameter::descendants && sel.kind == NodeSelector::Kind::random_inserted)
    formula = [&](std::uint64_t m) { return m == 0 ? exact::Rational(0) : exact::pmf_random_descendants(o.k, o.n, m); };
  if (formula) {
    exact::Rational mass = 0;
    for (const auto& [v, q] : table.exact) {
      if (formula(static_cast<std::uint64_t>(v.num)) != q)
        throw CheckFailure("enumeration differs from the closed form at m=" + v.str());
      mass += q;
    }
    if (mass != 1) throw CheckFailure("enumerated mass is " + mass.get_str());
    summary["closed_form_agrees"] = true;
  }
  return summary;
}

json run_mc(const Options& o, std::ostream& os) {
  harness::ExperimentConfig cfg{o.k, o.n, parse_param(o.parameter), parse_node(o.node), o.reps, o.seed, o.threads};
  const auto table = harness::mc_distribution(cfg);
  write_pmf_csv(os, table);
  json summary{{"mean", table.mean()}, {"variance", table.variance()}};
  if (o.compare.empty()) return summary;
  if (o.compare != "exact") throw Error(ErrorCode::invalid_parameter, "--compare accepts only 'exact'");
  const auto ref = oracle::exact_empirical_distribution(o.k, o.n, cfg.parameter, cfg.selector);
  const auto rep = harness::compare(table, ref);
  summary["comparison"] = {{"total_variation", rep.total_variation}, {"chi_square", rep.chi_square},
                           {"dof", rep.dof},  {"p_value", rep.p_value},
                           {"max_abs_deviation", rep.max_abs_deviation}, {"cells", rep.cells}};
  std::cerr << "chi-square " << rep.chi_square << " on " << rep.dof << " dof, p = " << rep.p_value
            << ", TV = " << rep.total_variation << '\n';
  if (rep.p_value <= o.alpha) throw CheckFailure("p-value " + format_double(rep.p_value) + " at or below alpha");
  return summary;
}

json run_distance(const Options& o, std::ostream& os) {
  std::vector<std::uint64_t> ladder = o.ladder;
  if (ladder.empty())
    for (int e = 10; e <= 14; ++e) ladder.push_back(std::uint64_t{1} << e);
  const auto r = harness::distance_experiment(o.k, ladder, o.reps, o.seed, o.threads);
  os << std::setprecision(10) << "n,mean_last,var_last,mean_random,var_random\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.mean_last << ',' << row.var_last << ',' << row.mean_random << ',' << row.var_random
       << '\n';
  auto fit = [](const stats::LinearFit& f) {
    return json{{"slope", f.slope}, {"slope_stderr", f.slope_stderr}, {"intercept", f.intercept}, {"r2", f.r2}};
  };
  std::cerr << "mean slope " << r.mean_last.slope << " (expected " << r.expected.mean_coefficient << "), variance slope "
            << r.var_last.slope << " (expected " << r.expected.variance_coefficient << "), KS " << r.ks_last << '\n';
  return {{"expected_mean_slope", r.expected.mean_coefficient},
          {"expected_variance_slope", r.expected.variance_coefficient},
          {"mean_last", fit(r.mean_last)},
          {"var_last", fit(r.var_last)},
          {"mean_random", fit(r.mean_random)},
          {"var_random", fit(r.var_random)},
          {"ks_last", r.ks_last},
          {"ks_last_uncorrected", r.ks_last_raw}};
}

json run_clustering(const Options& o, std::ostream& os) {
  const double c = asym::clustering_constant(o.k, o.tol);
  // Print only the digits the error bound supports.
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(o.tol))), 1, 16);
  os << std::fixed << std::setprecision(digits) << "k,constant\n" << o.k << ',' << c << '\n';
  json summary{{"constant", c}};
  if (auto closed = asym::clustering_constant_closed_form(o.k)) summary["closed_form"] = *closed;
  return summary;
}

// Every exact identity at sizes 1..max_n: tree counts, both pmfs against the
// recurrences and enumeration for every j, root and random-node laws.
json run_selfcheck(const Options& o, std::ostream& os) {
  std::uint64_t checks = 0;
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  };
  auto ratio = [](const mpz_class& a, const mpz_class& b) {
    exact::Rational r(a, b);
    r.canonicalize();
    return r;
  };
  for (std::uint32_t n = 1; n <= o.max_n; ++n) {
    const auto total = exact::count_trees(o.k, n);
    std::uint64_t visited = 0;
    std::vector<std::vector<std::uint64_t>> deg(n, std::vector<std::uint64_t>(n + 2)), desc = deg;
    std::vector<std::uint64_t> root(n + 1);
    visited = oracle::enumerate_all(o.k, n, [&](const KTree& t, const InsertionTrace&) {
      const auto d = metrics::descendant_counts(t);
      for (std::uint32_t j = 1; j <= n; ++j) {
        const NodeId id = t.inserted(j);
        ++deg[j - 1][t.out_degree(id)];
        ++desc[j - 1][d[id.index]];
      }
      ++root[t.out_degree(NodeId{0})];
    });
    const std::string at = "n=" + std::to_string(n);
    check(total == static_cast<unsigned long>(visited), at + ": tree count");
    for (std::uint32_t j = 1; j <= n; ++j) {
      const auto rd = oracle::recur_outdegree(o.k, n, j), rx = oracle::recur_descendants(o.k, n, j);
      for (std::uint64_t m = 0; m <= n + 1; ++m) {
        const auto f = exact::pmf_outdegree(o.k, n, j, m);
        const auto e = ratio(mpz_class(static_cast<unsigned long>(deg[j - 1][m])), total);
        check(f == e && f == ratio(rd.at(m), total), at + " j=" + std::to_string(j) + ": out-degree m=" + std::to_string(m));
        const auto g = m == 0 ? exact::Rational(0) : exact::pmf_descendants(o.k, n, j, m);
        const auto x = ratio(mpz_class(static_cast<unsigned long>(desc[j - 1][m])), total);
        check(g == x && g == ratio(rx.at(m), total), at + " j=" + std::to_string(j) + ": descendants m=" + std::to_string(m));
      }
    }
    for (std::uint64_t m = 0; m <= n; ++m) {
      check(exact::pmf_root_outdegree(o.k, n, m) == ratio(mpz_class(static_cast<unsigned long>(root[m])), total),
            at + ": root out-degree m=" + std::to_string(m));
      exact::Rational avg_deg = 0, avg_desc = 0;
      for (std::uint32_t j = 1; j <= n; ++j) {
        avg_deg += exact::pmf_outdegree(o.k, n, j, m);
        if (m >= 1) avg_desc += exact::pmf_descendants(o.k, n, j, m);
      }
      avg_deg /= n;
      avg_desc /= n;
      check(exact::pmf_random_outdegree(o.k, n, m) == avg_deg, at + ": random out-degree m=" + std::to_string(m));
      if (m >= 1)
        check(exact::pmf_random_descendants(o.k, n, m) == avg_desc, at + ": random descendants m=" + std::to_string(m));
    }
  }
  os << "checks,failures\n" << checks << ',' << failures.size() << '\n';
  for (const auto& f : failures) std::cerr << "FAILED " << f << '\n';
  json summary{{"checks", checks}, {"failures", failures}};
  if (!failures.empty()) throw CheckFailure(std::to_string(failures.size()) + " identities failed");
  return summary;
}

// ---------------------------------------------------------------------------

std::string run_id(const std::string& config_text) {
  const auto now = std::chrono::system_clock::now().time_since_epoch().count();
  const std::uint64_t h = splitmix64(std::hash<std::string>{}(config_text) ^ splitmix64(static_cast<std::uint64_t>(now)));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str().substr(0, 12);
}

void write_summary(const Options& o, const CLI::App& sub, const json& result, const std::string& status,
                   double seconds) {
  if (o.json_out.empty()) return;
  json config = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--out" || opt->get_name() == "--json") continue;
    if (opt->count() == 0 && opt->get_default_str().empty()) continue;
    const auto values = opt->count() > 0 ? opt->results() : std::vector<std::string>{opt->get_default_str()};
    config[opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front()] =
        values.size() == 1 ? json(values.front()) : json(values);
  }
  json doc{{"command", sub.get_name()},
           {"run_id", run_id(sub.get_name() + config.dump())},
           {"config", config},
           {"status", status},
           {"wall_clock_seconds", seconds},
           {"result", result}};
  std::ofstream f(o.json_out);
  if (!f) throw Error(ErrorCode::invalid_parameter, "cannot open " + o.json_out);
  f << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Random increasing k-trees: sampling, exact laws, enumeration oracles and experiments."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file with option values (keys are long option names)");
  app.footer("Exit status: 0 success, 1 usage or argument error, 2 a check failed.");

  std::map<std::string, std::function<json(const Options&, std::ostream&)>> handlers;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Write the CSV/text output to this file instead of stdout");
    sub->add_option("--json", o.json_out, "Write a JSON run summary (config, run id, wall clock, results)");
    sub->set_config("--config", "", "Flat key=value file with option values");
  };
  auto size_opts = [&](CLI::App* sub) {
    sub->add_option("--k", o.k, "Clique size k >= 1")->capture_default_str()->check(CLI::Range(1, 1000));
    sub->add_option("--n", o.n, "Number of inserted nodes")->capture_default_str();
  };

  auto* gen = app.add_subcommand("generate", "Grow one random tree and print its text form");
  size_opts(gen);
  gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  gen->add_option("--trace-out", o.trace_out, "Also write the insertion trace to this file");
  gen->footer("Output: 'ktree k=<k> n=<n>', then 'node <j> clique <cid>' lines, then\n"
              "'clique <cid> members <l1,...,lk> children <c1,...>' lines.");
  common(gen);
  handlers["generate"] = run_generate;

  auto* met = app.add_subcommand("metrics", "Per-node metrics of a random or loaded tree");
  size_opts(met);
  met->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  met->add_option("--tree", o.tree_in, "Read a tree document or trace file instead of sampling");
  met->footer("CSV: label,outdeg,deg,clustering_num,clustering_den,descendants,dist01,distK0");
  common(met);
  handlers["metrics"] = run_metrics;

  auto* ex = app.add_subcommand("exact", "Exact pmf of an out-degree or descendant law");
  size_opts(ex);
  ex->add_option("--j", o.j, "Node label for per-node laws")->capture_default_str();
  ex->add_option("--law", o.law, "outdegree | root-outdegree | random-outdegree | descendants | random-descendants")
      ->capture_default_str();
  ex->add_option("--thm", o.thm, "Numeric law selector: 1 outdegree, 2 root-outdegree, 3 random-outdegree, "
                                 "5 descendants, 6 random-descendants (overrides --law)");
  ex->add_option("--backend", o.backend, "exact (rationals) or float")->capture_default_str();
  ex->footer("CSV (exact): m,prob_num,prob_den,prob_float\nCSV (float): m,prob_float\n"
             "Exits 2 when the probabilities do not sum to one.");
  common(ex);
  handlers["exact"] = run_exact;

  auto* orc = app.add_subcommand("oracle", "Exact law of a node parameter by enumerating every tree");
  size_opts(orc);
  orc->add_option("--parameter", o.parameter, "outdegree | degree | descendants | clustering | dist01 | distK0")
      ->capture_default_str();
  orc->add_option("--node", o.node, "Node: a label j, last, root or random")->capture_default_str();
  orc->footer("CSV: m,prob_num,prob_den,prob_float (m is the parameter value, p/q for clustering).\n"
              "Out-degree and descendant laws are also checked against their closed forms (exit 2 on mismatch).");
  common(orc);
  handlers["oracle"] = run_oracle;

  auto* mc = app.add_subcommand("mc", "Monte Carlo distribution of a node parameter");
  size_opts(mc);
  mc->add_option("--parameter", o.parameter, "outdegree | degree | descendants | clustering | dist01 | distK0")
      ->capture_default_str();
  mc->add_option("--node", o.node, "Node: a label j, last, root or random")->capture_default_str();
  mc->add_option("--reps", o.reps, "Number of independent trees")->capture_default_str();
  mc->add_option("--seed", o.seed, "Experiment seed")->capture_default_str();
  mc->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")->capture_default_str();
  mc->add_option("--compare", o.compare, "'exact': chi-square against the enumerated law");
  mc->add_option("--alpha", o.alpha, "Significance level for --compare")->capture_default_str();
  mc->footer("CSV: m,prob_num,prob_den,prob_float with prob_num = count and prob_den = replicates.");
  common(mc);
  handlers["mc"] = run_mc;

  auto* dist = app.add_subcommand("distance", "Growth of the distance to 0_1 over a geometric size ladder");
  dist->add_option("--k", o.k, "Clique size k >= 1")->capture_default_str()->check(CLI::Range(1, 1000));
  dist->add_option("--ladder", o.ladder, "Sizes, geometric spacing, at least four (default 2^10..2^14)")
      ->delimiter(',');
  dist->add_option("--reps", o.reps, "Trees per size")->capture_default_str();
  dist->add_option("--seed", o.seed, "Experiment seed")->capture_default_str();
  dist->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")->capture_default_str();
  dist->footer("CSV: n,mean_last,var_last,mean_random,var_random\n"
               "Slopes against log n and the KS distance go to stderr and the JSON summary.");
  common(dist);
  handlers["distance"] = run_distance;

  auto* clu = app.add_subcommand("clustering-constant", "Limit of the expected mean clustering coefficient");
  clu->add_option("--k", o.k, "Clique size k >= 2")->capture_default_str()->check(CLI::Range(2, 100000));
  clu->add_option("--tol", o.tol, "Absolute error bound of the series")->capture_default_str();
  clu->footer("CSV: k,constant");
  common(clu);
  handlers["clustering-constant"] = run_clustering;

  auto* sc = app.add_subcommand("selfcheck", "Check all exact identities against recurrences and enumeration");
  sc->add_option("--k", o.k, "Clique size k >= 1")->capture_default_str()->check(CLI::Range(1, 1000));
  sc->add_option("--max-n", o.max_n, "Largest size to enumerate")->capture_default_str();
  sc->footer("CSV: checks,failures; failing identities are listed on stderr. Exits 2 on any failure.");
  common(sc);
  handlers["selfcheck"] = run_selfcheck;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    Sink sink(o.out);
    const json result = handlers.at(sub->get_name())(o, sink.os());
    sink.os().flush();
    write_summary(o, *sub, result, "pass", elapsed());
    return kExitOk;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    write_summary(o, *sub, json{{"error", e.what()}}, "fail", elapsed());
    return kExitCheck;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::root_tracking ? kExitCheck : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
