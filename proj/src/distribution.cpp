#include "ktree/distribution.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "ktree/error.hpp"
#include "ktree/metrics.hpp"

namespace ktree {

std::string_view to_string(Parameter p) {
  switch (p) {
    case Parameter::outdegree: return "outdegree";
    case Parameter::degree: return "degree";
    case Parameter::descendants: return "descendants";
    case Parameter::clustering: return "clustering";
    case Parameter::dist01: return "dist01";
    case Parameter::distK0: return "distK0";
  }
  return "?";
}

std::optional<Parameter> parse_parameter(std::string_view name) {
  for (auto p : {Parameter::outdegree, Parameter::degree, Parameter::descendants, Parameter::clustering,
                 Parameter::dist01, Parameter::distK0})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::string NodeSelector::str() const {
  switch (kind) {
    case Kind::fixed: return "j=" + std::to_string(j);
    case Kind::random_inserted: return "random";
    case Kind::root: return "root";
    case Kind::last: return "last";
  }
  return "?";
}

Fraction parameter_value(const KTree& tree, Parameter parameter, NodeId node) {
  switch (parameter) {
    case Parameter::outdegree: return Fraction(static_cast<std::int64_t>(metrics::out_degree(tree, node)));
    case Parameter::degree: return Fraction(static_cast<std::int64_t>(metrics::degree(tree, node)));
    case Parameter::descendants: return Fraction(metrics::descendants(tree, node));
    case Parameter::clustering: return metrics::clustering_direct(tree, node);
    case Parameter::dist01: return Fraction(metrics::distances_from_root(tree).to_01[node.index]);
    case Parameter::distK0: return Fraction(metrics::distances_from_root(tree).to_root_clique[node.index]);
  }
  throw Error(ErrorCode::invalid_parameter, "unknown parameter");
}

std::vector<Fraction> parameter_values(const KTree& tree, Parameter parameter) {
  std::vector<Fraction> out;
  out.reserve(tree.nodes().size());
  switch (parameter) {
    case Parameter::outdegree:
    case Parameter::degree:
      for (const auto& rec : tree.nodes())
        out.emplace_back(static_cast<std::int64_t>(parameter == Parameter::degree ? tree.degree(rec.id)
                                                                                   : tree.out_degree(rec.id)));
      return out;
    case Parameter::descendants:
      for (auto c : metrics::descendant_counts(tree)) out.emplace_back(static_cast<std::int64_t>(c));
      return out;
    case Parameter::clustering:
      for (const auto& rec : tree.nodes()) out.push_back(parameter_value(tree, parameter, rec.id));
      return out;
    case Parameter::dist01:
    case Parameter::distK0: {
      const auto d = metrics::distances_from_root(tree);
      const auto& v = parameter == Parameter::dist01 ? d.to_01 : d.to_root_clique;
      for (auto x : v) out.emplace_back(static_cast<std::int64_t>(x));
      return out;
    }
  }
  throw Error(ErrorCode::invalid_parameter, "unknown parameter");
}

std::map<Fraction, double> DistributionTable::pmf() const {
  std::map<Fraction, double> out;
  if (is_exact()) {
    for (const auto& [v, p] : exact) out[v] = p.get_d();
  } else {
    for (const auto& [v, c] : counts) out[v] = static_cast<double>(c) / static_cast<double>(sample_size);
  }
  return out;
}

double DistributionTable::mean() const {
  double m = 0;
  for (const auto& [v, p] : pmf()) m += v.value() * p;
  return m;
}

double DistributionTable::variance() const {
  const double mu = mean();
  double s = 0;
  for (const auto& [v, p] : pmf()) s += (v.value() - mu) * (v.value() - mu) * p;
  return s;
}

void write_pmf_csv(std::ostream& os, const DistributionTable& table) {
  os << "m,prob_num,prob_den,prob_float\n";
  std::ostringstream line;
  line << std::setprecision(17);
  if (table.is_exact()) {
    for (const auto& [v, p] : table.exact)
      line << v.str() << ',' << p.get_num().get_str() << ',' << p.get_den().get_str() << ',' << p.get_d() << '\n';
  } else {
    for (const auto& [v, c] : table.counts) {
      mpq_class q(mpz_class(static_cast<unsigned long>(c)), mpz_class(static_cast<unsigned long>(table.sample_size)));
      q.canonicalize();
      line << v.str() << ',' << q.get_num().get_str() << ',' << q.get_den().get_str() << ',' << q.get_d() << '\n';
    }
  }
  os << line.str();
}

}  // namespace ktree
