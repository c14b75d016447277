#pragma once

#include <map>
#include <string>
#include <vector>

#include "ktree/ktree.hpp"

namespace ktree::testing {

// A 2-tree of size 11 in which node 4 has out-degree 3, five descendants,
// degree 5 with four edges among its neighbours, and 0_1 as a parent.
inline KTree sample_2tree() {
  KTree t(2);
  t.insert_at(SlotLocation{0, 1});   // 1 -> {0_1,0_2}; cliques 1 {0_2,1}, 2 {0_1,1}
  t.insert_at(SlotLocation{0, 2});   // 2 -> {0_1,0_2}; 3 {0_2,2}, 4 {0_1,2}
  t.insert_at(SlotLocation{1, 1});   // 3 -> {0_2,1};   5 {1,3},   6 {0_2,3}
  t.insert_at(SlotLocation{2, 1});   // 4 -> {0_1,1};   7 {1,4},   8 {0_1,4}
  t.insert_at(SlotLocation{7, 1});   // 5 -> {1,4};     9 {4,5},  10 {1,5}
  t.insert_at(SlotLocation{8, 1});   // 6 -> {0_1,4}
  t.insert_at(SlotLocation{10, 1});  // 7 -> {1,5}
  t.insert_at(SlotLocation{9, 1});   // 8 -> {4,5}
  t.insert_at(SlotLocation{0, 3});   // 9 -> {0_1,0_2}
  t.insert_at(SlotLocation{3, 1});   // 10 -> {0_2,2}
  t.insert_at(SlotLocation{6, 1});   // 11 -> {0_2,3}
  return t;
}

// Shape of a tree independent of clique numbering: each clique as its sorted
// member names mapped to its ordered child labels.
inline std::map<std::vector<std::string>, std::vector<std::uint32_t>> canonical_form(const KTree& t) {
  std::map<std::vector<std::string>, std::vector<std::uint32_t>> out;
  for (const auto& c : t.cliques()) {
    std::vector<std::string> names;
    for (NodeId m : c.members) names.push_back(t.name(m));
    std::sort(names.begin(), names.end());
    out[names] = c.children;
  }
  return out;
}

}  // namespace ktree::testing
