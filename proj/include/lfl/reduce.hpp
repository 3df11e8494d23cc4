#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "lfl/core.hpp"

namespace lfl {

// Admissible neighbor counts for one neighbor label: exactly `count`, or at least `count` when `open`.
struct CountRange {
  int count = 0;
  bool open = false;
  bool admits(int m) const { return m == count || (open && m > count); }
  auto operator<=>(const CountRange&) const = default;
};

// A radius-1 star summarized per neighbor label (label = in * |sigma_out| + out).
struct StarProfile {
  int center = 0;
  std::map<int, CountRange> nbr;  // labels absent from the map admit only 0
  bool admits(const std::map<int, int>& ball) const;
  auto operator<=>(const StarProfile&) const = default;
};

struct TwigConfiguration {
  RadiusConfiguration ball;  // node 0 is the twig, node 1 its parent (required edge)
  StarProfile profile;
  int parent_config = 0;
  int twig_node = 0;
  std::string canonical;
};

using TwigSet = std::vector<int>;  // sorted twig indices

std::string configuration_canonical(const RadiusConfiguration& c, int root = -1);

std::vector<TwigConfiguration> twig_configurations(const RadiusLFL& problem);

// C_X for the given twigs, or absent when they are jointly unmatchable.
std::optional<StarProfile> intersect_twig_set(const std::vector<TwigConfiguration>& twigs, const TwigSet& X);
RadiusConfiguration star_configuration(const StarProfile& p, int nout, const std::string& name);

struct CombinedConfiguration {
  RadiusConfiguration config;       // original labels
  std::vector<int> twig_of;         // per node: twig index for nodes at depth r-1, else -1
  std::string trace;
};

// All combined configurations C' for twig set X. Empty when an abort case fires.
std::vector<CombinedConfiguration> combine_configurations(const RadiusLFL& problem, int config,
                                                          const std::vector<TwigConfiguration>& twigs,
                                                          const StarProfile& cx, const TwigSet& X);

struct ReduceOptions {
  std::size_t cap = 100000;
  std::size_t ball_enumeration_cap = 1000000;
};

struct ReduceResult {
  RadiusLFL problem;  // radius r-1 with auxiliary * and T+ labels
  std::vector<TwigConfiguration> twigs;
  std::vector<TwigSet> twig_sets;        // per output label of the reduced problem
  std::vector<int> base_output;          // per output label: the original output symbol
  std::vector<std::string> trace;        // one entry per emitted configuration
};

std::vector<TwigSet> realizable_twig_sets(const RadiusLFL& problem, const std::vector<TwigConfiguration>& twigs,
                                          const ReduceOptions& opts = {});

ReduceResult reduce_radius(const RadiusLFL& problem, const ReduceOptions& opts = {});

// Twig indices whose configuration the 1-ball of v (under the given outputs) matches.
TwigSet ball_twig_set(const TreeInstance& inst, const Labeling& outputs, int v, int nout,
                      const std::vector<TwigConfiguration>& twigs);

struct NodeEdgeConversion {
  NodeEdgeLFL problem;
  std::vector<std::array<int, 2>> label_parts;  // per output: (center label, neighbor label) in the radius label space
  std::vector<int> isolated_center;             // per input symbol: center output for a node without edges (-1 if none)
  std::vector<int> config_source;               // per node configuration: source radius configuration (-1 escape)
  int escape_label = -1;
};

// Radius-1, order-free problem to node-edge form. With several input symbols an escape
// label keeps mixed-input nodes (which no radius instance produces) unconstrained.
NodeEdgeConversion to_node_edge(const RadiusLFL& problem);

struct ConversionError : std::runtime_error {
  Verdict verdict;
  ConversionError(const std::string& what, Verdict v) : std::runtime_error(what), verdict(std::move(v)) {}
};

// Radius-r valid labeling to the reduced problem's labeling.
Labeling convert_forward_reduce(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& original,
                                const ReduceResult& reduced);
Labeling convert_backward_reduce(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& original,
                                 const ReduceResult& reduced);
// Radius-1 node labeling to a half-edge labeling and back; instance needs node inputs.
Labeling convert_forward_node_edge(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& radius1,
                                   const NodeEdgeConversion& conv);
Labeling convert_backward_node_edge(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& radius1,
                                    const NodeEdgeConversion& conv);

// Whole chain: eliminate_auxiliary, reduce_radius until r = 1 (eliminating in between), to_node_edge.
struct PipelineStage {
  std::string name;
  RadiusLFL radius;
  std::optional<ReduceResult> reduction;  // set on stages produced by reduce_radius
};
struct Pipeline {
  std::vector<PipelineStage> stages;  // first = input with aux eliminated, last = radius 1 order-free
  NodeEdgeConversion node_edge;
  std::vector<std::string> notes;
};
Pipeline run_pipeline(const RadiusLFL& problem, const ReduceOptions& opts = {});
// Original-problem labeling to a half-edge labeling of the final node-edge problem, and back.
Labeling pipeline_forward(const Pipeline& pl, const TreeInstance& inst, const Labeling& sigma,
                          const RadiusLFL& original);
Labeling pipeline_backward(const Pipeline& pl, const TreeInstance& inst, const Labeling& half,
                           const RadiusLFL& original);

// Tree DP solver for radius-1 order-free problems (node labeling or absent).
std::optional<Labeling> solve_radius1(const TreeInstance& inst, const RadiusLFL& problem);

}  // namespace lfl
