#pragma once

#include <string>

#include "json.hpp"
#include "lfl/core.hpp"

namespace lfl {

using json = nlohmann::json;

enum class Formalism { NodeEdge, Radius, RadiusPO };

struct Problem {
  Formalism formalism = Formalism::NodeEdge;
  std::string name;
  NodeEdgeLFL node_edge;
  RadiusLFL radius;
};

std::string formalism_name(Formalism f);

json read_json_file(const std::string& path);  // throws NotFound / MalformedInput
void write_json_file(const std::string& path, const json& j);

Problem parse_problem(const json& j, bool allow_disconnected_required = false);
Problem load_problem(const std::string& path, bool allow_disconnected_required = false);
json problem_to_json(const NodeEdgeLFL& p);
json problem_to_json(const RadiusLFL& p);
json problem_to_json(const Problem& p);

// Inputs may be omitted when sigma_in has a single symbol.
TreeInstance parse_instance(const json& j, const Alphabet& sigma_in);
TreeInstance load_instance(const std::string& path, const Alphabet& sigma_in);
json instance_to_json(const TreeInstance& inst, const Alphabet& sigma_in, bool half_edge_mode);

std::string half_edge_key(const TreeInstance& inst, int h);
Labeling parse_labeling(const json& j, const TreeInstance& inst, const Alphabet& sigma_out);
json labeling_to_json(const TreeInstance& inst, const Labeling& sigma, const Alphabet& sigma_out, bool half_edge_mode);

}  // namespace lfl
