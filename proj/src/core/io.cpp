#include "lfl/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace lfl {

namespace {

std::string scalar_id(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw MalformedInput("node identifiers must be strings or integers");
}

Alphabet parse_alphabet(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw MalformedInput(std::string("missing '") + key + "'");
    return Alphabet({"·"});
  }
  std::vector<std::string> symbols;
  for (const auto& s : j.at(key)) symbols.push_back(s.get<std::string>());
  return Alphabet(std::move(symbols));
}

int default_input(const Alphabet& sigma_in, const json& j, const char* what) {
  if (sigma_in.size() == 1) return 0;
  throw MalformedInput(std::string("missing input symbol in ") + what + ": " + j.dump());
}

std::pair<int, int> parse_side(const json& side, const NodeEdgeLFL& p) {
  if (side.is_string()) {
    return {default_input(p.sigma_in, side, "edge configuration"), p.sigma_out.index(side.get<std::string>())};
  }
  if (side.is_array() && side.size() == 2)
    return {p.sigma_in.index(side[0].get<std::string>()), p.sigma_out.index(side[1].get<std::string>())};
  throw MalformedInput("edge configuration side must be [in, out]: " + side.dump());
}

}  // namespace

std::string formalism_name(Formalism f) {
  switch (f) {
    case Formalism::NodeEdge: return "node-edge";
    case Formalism::Radius: return "radius";
    case Formalism::RadiusPO: return "radius-po";
  }
  return "?";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedInput("'" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

Problem parse_problem(const json& j, bool allow_disconnected_required) {
  try {
    Problem prob;
    std::string f = j.value("formalism", "node-edge");
    prob.name = j.value("name", "");
    if (f == "node-edge") {
      prob.formalism = Formalism::NodeEdge;
      NodeEdgeLFL& p = prob.node_edge;
      p.sigma_in = parse_alphabet(j, "sigma_in", false);
      p.sigma_out = parse_alphabet(j, "sigma_out", true);
      for (const auto& cfg : j.value("node_configs", json::array())) {
        NodeConfig c;
        for (const auto& el : cfg) {
          int in = el.contains("in") ? p.sigma_in.index(el.at("in").get<std::string>())
                                     : default_input(p.sigma_in, el, "node configuration");
          int out = p.sigma_out.index(el.at("out").get<std::string>());
          bool star = el.value("star", false);
          int count = el.value("count", star ? 0 : 1);
          c.push_back({p.pair(in, out), count, star});
        }
        p.node_configs.push_back(c);
      }
      for (const auto& ec : j.value("edge_configs", json::array())) {
        if (!ec.is_array() || ec.size() != 2) throw MalformedInput("edge configuration must have two sides");
        auto a = parse_side(ec[0], p);
        auto b = parse_side(ec[1], p);
        p.edge_configs.push_back({p.pair(a.first, a.second), p.pair(b.first, b.second)});
      }
      p.finalize();
      return prob;
    }
    if (f != "radius" && f != "radius-po") throw MalformedInput("unknown formalism '" + f + "'");
    prob.formalism = f == "radius" ? Formalism::Radius : Formalism::RadiusPO;
    RadiusLFL& p = prob.radius;
    p.sigma_in = parse_alphabet(j, "sigma_in", false);
    p.sigma_out = parse_alphabet(j, "sigma_out", true);
    if (j.contains("aux")) p.aux = parse_alphabet(j, "aux", true);
    p.radius = j.value("radius", 1);
    p.allow_disconnected_required = j.value("allow_disconnected_required", allow_disconnected_required);
    auto label_index = [&](const std::string& s) {
      if (auto o = p.sigma_out.find(s)) return *o;
      if (auto a = p.aux.find(s)) return p.nout() + *a;
      throw MalformedInput("unknown label '" + s + "'");
    };
    for (const auto& pr : j.value("order", json::array()))
      p.order.push_back({label_index(pr.at(0).get<std::string>()), label_index(pr.at(1).get<std::string>())});
    int counter = 0;
    for (const auto& cj : j.at("configurations")) {
      RadiusConfiguration c;
      c.name = cj.value("name", "C" + std::to_string(counter));
      ++counter;
      std::unordered_map<std::string, int> idx;
      for (const auto& nid : cj.at("nodes")) {
        std::string id = scalar_id(nid);
        if (idx.count(id)) throw MalformedInput("duplicate configuration node '" + id + "'");
        idx[id] = c.size();
        c.in.push_back(-1);
        c.out.push_back(-1);
      }
      auto node = [&](const json& v) {
        auto it = idx.find(scalar_id(v));
        if (it == idx.end()) throw MalformedInput("unknown configuration node " + v.dump());
        return it->second;
      };
      for (const auto& e : cj.value("edges", json::array())) {
        std::string kind = e.size() > 2 ? e[2].get<std::string>() : "required";
        if (kind != "required" && kind != "optional") throw MalformedInput("edge kind must be required|optional");
        c.edges.push_back({node(e[0]), node(e[1]), kind == "required"});
      }
      c.center = node(cj.at("center"));
      for (auto it = cj.at("labels").begin(); it != cj.at("labels").end(); ++it) {
        int w = node(json(it.key()));
        const json& lab = it.value();
        if (lab.is_string()) {
          c.in[w] = default_input(p.sigma_in, lab, "configuration label");
          c.out[w] = label_index(lab.get<std::string>());
        } else {
          c.in[w] = p.sigma_in.index(lab.at(0).get<std::string>());
          c.out[w] = label_index(lab.at(1).get<std::string>());
        }
      }
      for (int w = 0; w < c.size(); ++w)
        if (c.in[w] < 0) throw MalformedInput("configuration '" + c.name + "' has an unlabeled node");
      p.configs.push_back(std::move(c));
    }
    p.finalize();
    return prob;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("problem descriptor: ") + e.what());
  }
}

Problem load_problem(const std::string& path, bool allow_disconnected_required) {
  return parse_problem(read_json_file(path), allow_disconnected_required);
}

json problem_to_json(const NodeEdgeLFL& p) {
  json j;
  j["formalism"] = "node-edge";
  j["sigma_in"] = p.sigma_in.symbols();
  j["sigma_out"] = p.sigma_out.symbols();
  json cfgs = json::array();
  for (const auto& c : p.node_configs) {
    json arr = json::array();
    for (const auto& e : c) {
      std::string in = p.sigma_in.name(p.pair_in(e.pair));
      std::string out = p.sigma_out.name(p.pair_out(e.pair));
      for (int k = 0; k < e.count; ++k) arr.push_back({{"in", in}, {"out", out}});
      if (e.star) arr.push_back({{"in", in}, {"out", out}, {"star", true}});
    }
    cfgs.push_back(arr);
  }
  j["node_configs"] = cfgs;
  json edges = json::array();
  for (auto [a, b] : p.edge_configs)
    edges.push_back(json::array({json::array({p.sigma_in.name(p.pair_in(a)), p.sigma_out.name(p.pair_out(a))}),
                                 json::array({p.sigma_in.name(p.pair_in(b)), p.sigma_out.name(p.pair_out(b))})}));
  j["edge_configs"] = edges;
  return j;
}

json problem_to_json(const RadiusLFL& p) {
  json j;
  j["formalism"] = p.aux.size() > 0 || !p.order.empty() ? "radius-po" : "radius";
  j["sigma_in"] = p.sigma_in.symbols();
  j["sigma_out"] = p.sigma_out.symbols();
  if (p.aux.size() > 0) j["aux"] = p.aux.symbols();
  if (!p.order.empty()) {
    json ord = json::array();
    for (auto [a, b] : p.order) ord.push_back(json::array({p.label_name(a), p.label_name(b)}));
    j["order"] = ord;
  }
  j["radius"] = p.radius;
  json cfgs = json::array();
  for (const auto& c : p.configs) {
    json cj;
    cj["name"] = c.name;
    json nodes = json::array();
    json labels = json::object();
    for (int w = 0; w < c.size(); ++w) {
      nodes.push_back(w);
      labels[std::to_string(w)] = json::array({p.sigma_in.name(c.in[w]), p.label_name(c.out[w])});
    }
    cj["nodes"] = nodes;
    json edges = json::array();
    for (const auto& e : c.edges) edges.push_back(json::array({e.u, e.v, e.required ? "required" : "optional"}));
    cj["edges"] = edges;
    cj["center"] = c.center;
    cj["labels"] = labels;
    cfgs.push_back(cj);
  }
  j["configurations"] = cfgs;
  return j;
}

json problem_to_json(const Problem& p) {
  json j = p.formalism == Formalism::NodeEdge ? problem_to_json(p.node_edge) : problem_to_json(p.radius);
  if (!p.name.empty()) j["name"] = p.name;
  return j;
}

std::string half_edge_key(const TreeInstance& inst, int h) {
  int e = h / 2;
  const auto& ed = inst.edges[e];
  return inst.ids[ed[0]] + "-" + inst.ids[ed[1]] + ":" + inst.ids[ed[h % 2]];
}

TreeInstance parse_instance(const json& j, const Alphabet& sigma_in) {
  try {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> idx;
    for (const auto& v : j.at("nodes")) {
      std::string id = scalar_id(v);
      if (idx.count(id)) throw MalformedInput("duplicate node '" + id + "'");
      idx[id] = static_cast<int>(ids.size());
      ids.push_back(id);
    }
    auto node = [&](const json& v) {
      auto it = idx.find(scalar_id(v));
      if (it == idx.end()) throw MalformedInput("unknown node " + v.dump());
      return it->second;
    };
    std::vector<std::array<int, 2>> edges;
    for (const auto& e : j.value("edges", json::array())) edges.push_back({node(e.at(0)), node(e.at(1))});
    TreeInstance inst = TreeInstance::from_edges(static_cast<int>(ids.size()), edges);
    inst.ids = ids;
    inst.check_tree();
    if (j.contains("node_inputs")) {
      inst.node_inputs.assign(inst.n(), -1);
      for (auto it = j["node_inputs"].begin(); it != j["node_inputs"].end(); ++it)
        inst.node_inputs[node(json(it.key()))] = sigma_in.index(it.value().get<std::string>());
      for (int v = 0; v < inst.n(); ++v)
        if (inst.node_inputs[v] < 0) {
          if (sigma_in.size() != 1) throw MalformedInput("node '" + ids[v] + "' lacks an input");
          inst.node_inputs[v] = 0;
        }
      inst.fill_half_from_nodes();
    } else if (j.contains("half_edge_inputs")) {
      std::unordered_map<std::string, int> given;
      for (auto it = j["half_edge_inputs"].begin(); it != j["half_edge_inputs"].end(); ++it)
        given[it.key()] = sigma_in.index(it.value().get<std::string>());
      inst.half_inputs.assign(2 * inst.m(), -1);
      for (int h = 0; h < 2 * inst.m(); ++h) {
        const auto& ed = inst.edges[h / 2];
        std::string at = inst.ids[ed[h % 2]];
        std::string k1 = inst.ids[ed[0]] + "-" + inst.ids[ed[1]] + ":" + at;
        std::string k2 = inst.ids[ed[1]] + "-" + inst.ids[ed[0]] + ":" + at;
        if (given.count(k1)) inst.half_inputs[h] = given[k1];
        else if (given.count(k2)) inst.half_inputs[h] = given[k2];
        else if (sigma_in.size() == 1) inst.half_inputs[h] = 0;
        else throw MalformedInput("half-edge '" + k1 + "' lacks an input");
      }
    } else {
      if (sigma_in.size() != 1) throw MalformedInput("instance lacks inputs");
      inst.node_inputs.assign(inst.n(), 0);
      inst.fill_half_from_nodes();
    }
    return inst;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("instance: ") + e.what());
  }
}

TreeInstance load_instance(const std::string& path, const Alphabet& sigma_in) {
  return parse_instance(read_json_file(path), sigma_in);
}

json instance_to_json(const TreeInstance& inst, const Alphabet& sigma_in, bool half_edge_mode) {
  json j;
  j["nodes"] = inst.ids;
  json edges = json::array();
  for (auto [u, v] : inst.edges) edges.push_back(json::array({inst.ids[u], inst.ids[v]}));
  j["edges"] = edges;
  if (half_edge_mode) {
    json h = json::object();
    for (int i = 0; i < 2 * inst.m(); ++i) h[half_edge_key(inst, i)] = sigma_in.name(inst.half_inputs[i]);
    j["half_edge_inputs"] = h;
  } else {
    json n = json::object();
    for (int v = 0; v < inst.n(); ++v) n[inst.ids[v]] = sigma_in.name(inst.node_inputs[v]);
    j["node_inputs"] = n;
  }
  return j;
}

Labeling parse_labeling(const json& j, const TreeInstance& inst, const Alphabet& sigma_out) {
  if (j.contains("half_edge_outputs")) {
    std::unordered_map<std::string, int> given;
    for (auto it = j["half_edge_outputs"].begin(); it != j["half_edge_outputs"].end(); ++it)
      given[it.key()] = sigma_out.index(it.value().get<std::string>());
    Labeling sigma(2 * inst.m(), -1);
    for (int h = 0; h < 2 * inst.m(); ++h) {
      const auto& ed = inst.edges[h / 2];
      std::string at = inst.ids[ed[h % 2]];
      std::string k1 = inst.ids[ed[0]] + "-" + inst.ids[ed[1]] + ":" + at;
      std::string k2 = inst.ids[ed[1]] + "-" + inst.ids[ed[0]] + ":" + at;
      if (given.count(k1)) sigma[h] = given[k1];
      else if (given.count(k2)) sigma[h] = given[k2];
      else throw MalformedInput("labeling misses half-edge '" + k1 + "'");
    }
    return sigma;
  }
  if (j.contains("node_outputs")) {
    Labeling sigma(inst.n(), -1);
    std::unordered_map<std::string, int> idx;
    for (int v = 0; v < inst.n(); ++v) idx[inst.ids[v]] = v;
    for (auto it = j["node_outputs"].begin(); it != j["node_outputs"].end(); ++it) {
      auto f = idx.find(it.key());
      if (f == idx.end()) throw MalformedInput("labeling names unknown node '" + it.key() + "'");
      sigma[f->second] = sigma_out.index(it.value().get<std::string>());
    }
    for (int v = 0; v < inst.n(); ++v)
      if (sigma[v] < 0) throw MalformedInput("labeling misses node '" + inst.ids[v] + "'");
    return sigma;
  }
  throw MalformedInput("labeling needs 'half_edge_outputs' or 'node_outputs'");
}

json labeling_to_json(const TreeInstance& inst, const Labeling& sigma, const Alphabet& sigma_out, bool half_edge_mode) {
  json j;
  if (half_edge_mode) {
    json h = json::object();
    for (int i = 0; i < 2 * inst.m(); ++i) h[half_edge_key(inst, i)] = sigma_out.name(sigma[i]);
    j["half_edge_outputs"] = h;
  } else {
    json n = json::object();
    for (int v = 0; v < inst.n(); ++v) n[inst.ids[v]] = sigma_out.name(sigma[v]);
    j["node_outputs"] = n;
  }
  return j;
}

}  // namespace lfl
