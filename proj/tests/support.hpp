#pragma once

#include <functional>
#include <string>

#include "lfl/core.hpp"
#include "lfl/io.hpp"

namespace lfl::testing {

inline Problem fixture(const std::string& name) { return load_problem(std::string(LFL_FIXTURE_DIR) + "/" + name + ".json"); }

// Calls f on every labeling in [0, base)^len in lexicographic order; stops when f returns true.
inline bool for_each_word(int len, int base, const std::function<bool(const std::vector<int>&)>& f) {
  std::vector<int> w(len, 0);
  for (;;) {
    if (f(w)) return true;
    int i = len - 1;
    while (i >= 0 && w[i] == base - 1) w[i--] = 0;
    if (i < 0) return false;
    ++w[i];
  }
}

// Exhaustive solvability oracle for node-edge problems: checks every half-edge labeling.
inline bool oracle_solvable_node_edge(const TreeInstance& t, const NodeEdgeLFL& p) {
  return for_each_word(2 * t.m(), p.nout(), [&](const std::vector<int>& s) { return verify_node_edge(t, s, p).valid; });
}

inline bool oracle_solvable_radius(const TreeInstance& t, const RadiusLFL& p) {
  return for_each_word(t.n(), p.nout(), [&](const std::vector<int>& s) { return verify_radius(t, s, p).valid; });
}

}  // namespace lfl::testing
