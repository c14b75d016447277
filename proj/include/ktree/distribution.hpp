#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "ktree/fraction.hpp"
#include "ktree/ktree.hpp"

namespace ktree {

enum class Parameter { outdegree, degree, descendants, clustering, dist01, distK0 };

std::string_view to_string(Parameter p);
std::optional<Parameter> parse_parameter(std::string_view name);

/// Which node of a tree a measurement is taken on.
struct NodeSelector {
  enum class Kind { fixed, random_inserted, root, last };
  Kind kind = Kind::last;
  std::uint32_t j = 0;  // only for Kind::fixed

  static NodeSelector fixed(std::uint32_t j) { return {Kind::fixed, j}; }
  static NodeSelector random_inserted() { return {Kind::random_inserted, 0}; }
  static NodeSelector root() { return {Kind::root, 0}; }
  static NodeSelector last() { return {Kind::last, 0}; }

  std::string str() const;
};

/// Parameter value of one node. Descendants of a root node follow the same
/// recursive definition (the root itself plus everything hanging below it).
Fraction parameter_value(const KTree& tree, Parameter parameter, NodeId node);
/// Parameter values of all nodes, indexed by NodeId::index.
std::vector<Fraction> parameter_values(const KTree& tree, Parameter parameter);

/// Indexed pmf over exact rational values (counts / total) or an empirical
/// histogram, with the metadata describing what was measured.
struct DistributionTable {
  Parameter parameter = Parameter::outdegree;
  NodeSelector selector;
  int k = 1;
  std::uint64_t n = 0;

  std::map<Fraction, mpq_class> exact;      // exact tables
  std::map<Fraction, std::uint64_t> counts;  // empirical tables
  std::uint64_t sample_size = 0;

  bool is_exact() const noexcept { return sample_size == 0; }
  std::map<Fraction, double> pmf() const;
  double mean() const;
  double variance() const;
};

/// CSV "m,prob_num,prob_den,prob_float" for exact tables; empirical tables
/// report the observed frequency count/sample_size in the same columns.
void write_pmf_csv(std::ostream& os, const DistributionTable& table);

}  // namespace ktree
