#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lfl/classify.hpp"
#include "lfl/io.hpp"
#include "lfl/reduce.hpp"
#include "lfl/sim.hpp"
#include "lfl/trees.hpp"
#include "lfl/types.hpp"

using namespace lfl;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Collects the run report written by --report.
struct Report {
  json j = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  void input(const std::string& path) { j["inputs"][path] = file_hash(path); }
  void write(const std::string& path, const std::string& command) {
    if (path.empty()) return;
    j["command"] = command;
    j["timings"]["seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json_file(path, j);
  }
};

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << j.dump(1) << "\n";
  else
    write_json_file(out, j);
}

json accounting_json(const std::vector<PhaseRounds>& a) {
  json arr = json::array();
  for (const auto& p : a) arr.push_back({{"phase", p.phase}, {"rounds", p.rounds}});
  return arr;
}

// Node-edge form of any problem, with the pipeline kept for radius problems.
struct Loaded {
  Problem problem;
  std::optional<Pipeline> pipeline;
  const NodeEdgeLFL& node_edge() const { return pipeline ? pipeline->node_edge.problem : problem.node_edge; }
  const Alphabet& sigma_in() const {
    return problem.formalism == Formalism::NodeEdge ? problem.node_edge.sigma_in : problem.radius.sigma_in;
  }
};

Loaded load(const std::string& path, Report& rep) {
  Loaded l;
  l.problem = load_problem(path);
  rep.input(path);
  if (l.problem.formalism != Formalism::NodeEdge) l.pipeline = run_pipeline(l.problem.radius);
  return l;
}

TreeInstance load_tree(const std::string& path, const Alphabet& sigma_in, Report& rep) {
  auto t = load_instance(path, sigma_in);
  rep.input(path);
  if (t.half_inputs.empty() && !t.node_inputs.empty()) t.fill_half_from_nodes();
  return t;
}

json behavior_json(const NodeBehavior& b, const NodeEdgeLFL& p) {
  json pairs = json::array();
  const int k = p.nout();
  for (int m : b.type.members()) pairs.push_back({p.sigma_out.name(m / k), p.sigma_out.name(m % k)});
  return {{"x_left", p.sigma_in.name(b.x_left)}, {"x_right", p.sigma_in.name(b.x_right)}, {"pairs", pairs}};
}

NodeBehavior behavior_from_json(const json& j, const NodeEdgeLFL& p) {
  NodeBehavior b;
  const int k = p.nout();
  b.type = Bits(k * k);
  b.x_left = p.sigma_in.index(j.at("x_left").get<std::string>());
  b.x_right = p.sigma_in.index(j.at("x_right").get<std::string>());
  for (const auto& pr : j.at("pairs"))
    b.type.set(p.sigma_out.index(pr.at(0).get<std::string>()) * k + p.sigma_out.index(pr.at(1).get<std::string>()));
  return b;
}

json registry_json(const TypeRegistry& r, const NodeEdgeLFL& p) {
  json arr = json::array();
  static const char* kinds[] = {"seed", "virtual-tree", "class-left", "class-right"};
  for (int i = 0; i < r.size(); ++i) {
    const auto& t = r.tuple(i);
    const auto& pv = r.provenance(i);
    json children = json::array();
    for (auto [id, x] : pv.children) children.push_back({{"tuple", id}, {"x_adj", p.sigma_in.name(x)}});
    json e = {{"id", i},
              {"type", type_to_string(t.type, p)},
              {"input", p.sigma_in.name(t.x)},
              {"provenance", {{"kind", kinds[static_cast<int>(pv.kind)]}, {"iteration", pv.iteration}}}};
    if (!children.empty()) e["provenance"]["children"] = children;
    if (!pv.path.empty()) {
      e["provenance"]["path_length"] = pv.path.size();
      e["provenance"]["class"] = {type_to_string(pv.class_x, p), type_to_string(pv.class_y, p)};
    }
    arr.push_back(e);
  }
  return arr;
}

// "{A,B},x" -> tuple
TypeTuple parse_tuple(const std::string& s, const NodeEdgeLFL& p) {
  const auto close = s.rfind('}');
  if (s.empty() || s.front() != '{' || close == std::string::npos || close + 1 >= s.size() || s[close + 1] != ',')
    throw UsageError("tuple must look like '{A,B},x'");
  TypeTuple t;
  t.type = Bits(p.nout());
  std::stringstream body(s.substr(1, close - 1));
  std::string name;
  while (std::getline(body, name, ','))
    if (!name.empty()) t.type.set(p.sigma_out.index(name));
  t.x = p.sigma_in.index(s.substr(close + 2));
  return t;
}

std::vector<TreeInstance> trees_with_inputs(int max_nodes, int nin, Rng& rng) {
  std::vector<TreeInstance> out;
  for (const auto& t : nonisomorphic_trees_up_to(max_nodes)) {
    long long combos = 1;
    for (int i = 0; i < t.n() && combos <= 64; ++i) combos *= nin;
    if (combos <= 64) {
      for (long long c = 0; c < combos; ++c) {
        std::vector<int> in(t.n());
        long long r = c;
        for (int v = 0; v < t.n(); ++v, r /= nin) in[v] = static_cast<int>(r % nin);
        auto u = t;
        set_node_inputs(u, in);
        out.push_back(u);
      }
    } else {
      for (int s = 0; s < 8; ++s) {
        std::vector<int> in(t.n());
        for (auto& x : in) x = static_cast<int>(rng() % static_cast<std::uint64_t>(nin));
        auto u = t;
        set_node_inputs(u, in);
        out.push_back(u);
      }
    }
  }
  return out;
}

void print_classification(const Classification& c, const NodeEdgeLFL& p) {
  std::cout << verdict_line(c) << "\n";
  if (c.search.incomplete) std::cout << "LOWER-BOUND-ONLY\n";
  if (c.witness) std::cout << "witness: " << instance_to_json(c.witness->tree, p.sigma_in, true).dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally finite labelings on trees"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string report_path;
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--jobs", jobs, "Worker threads (0: default)");
  app.add_option("--report", report_path, "Write a run report");

  std::string problem_path, instance_path, labeling_path, out_path, evidence_path, assigner_path, mode = "auto";
  std::string path_path, tuple_str, fixture_name, keep_dir, preset, to = "node-edge";
  int ell = -1, target = 0, g = 64, L = 16, pad = 0, max_nodes = 6;
  std::size_t budget = 2000;
  double alpha = 0.5;
  bool trace = false;

  auto* classify = app.add_subcommand("classify", "Classify the complexity of a problem");
  classify->add_option("problem", problem_path)->required();
  classify->add_option("--ell", ell);
  classify->add_option("--budget", budget);
  classify->add_option("--evidence", evidence_path);

  auto* convert = app.add_subcommand("convert", "Convert a radius problem to node-edge form");
  convert->add_option("problem", problem_path)->required();
  convert->add_option("--to", to)->check(CLI::IsMember({"node-edge"}));
  convert->add_option("-o,--out", out_path);
  convert->add_flag("--trace", trace);

  auto* pipeline = app.add_subcommand("pipeline", "Reduce, convert and classify");
  pipeline->add_option("problem", problem_path)->required();
  pipeline->add_option("--keep", keep_dir, "Directory for intermediate problems");
  pipeline->add_option("--ell", ell);
  pipeline->add_option("--budget", budget);

  auto* types = app.add_subcommand("types", "Compute the type registry");
  types->add_option("problem", problem_path)->required();
  types->add_option("-o,--out", out_path);

  auto* pump = app.add_subcommand("pump", "Pump a path of node behaviors");
  pump->add_option("problem", problem_path)->required();
  pump->add_option("--path", path_path)->required();
  pump->add_option("--target", target)->required();
  pump->add_option("-o,--out", out_path);

  auto* witness = app.add_subcommand("witness", "Realize a registry tuple as an instance");
  witness->add_option("problem", problem_path)->required();
  witness->add_option("--tuple", tuple_str)->required();
  witness->add_option("-o,--out", out_path);

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("problem", problem_path)->required();
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"auto", "poly", "log", "diameter"}));
  solve->add_option("--assigner", assigner_path, "Evidence file from classify");
  solve->add_option("--ell", ell);
  solve->add_option("--budget", budget);
  solve->add_option("-o,--out", out_path);

  auto* verify = app.add_subcommand("verify", "Verify a labeling");
  verify->add_option("problem", problem_path)->required();
  verify->add_option("instance", instance_path)->required();
  verify->add_option("labeling", labeling_path)->required();

  auto* gadget = app.add_subcommand("gadget", "Generate a gadget path instance");
  gadget->add_option("--alpha", alpha);
  gadget->add_option("--g", g);
  gadget->add_option("--L", L);
  gadget->add_option("--pad", pad);
  gadget->add_option("--preset", preset, "Name from fixtures/gadget-presets.json");
  gadget->add_option("--presets-file", path_path);
  gadget->add_option("-o,--out", out_path);

  auto* oracle = app.add_subcommand("oracle", "Run the exhaustive cross-checks");
  oracle->add_option("problem", problem_path);
  oracle->add_option("--fixture", fixture_name);
  oracle->add_option("--fixtures-dir", keep_dir);
  oracle->add_option("--max-nodes", max_nodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (jobs > 0) omp_set_num_threads(jobs);

  Report rep;
  rep.j["seed"] = seed;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*classify) {
      auto l = load(problem_path, rep);
      SearchOptions so;
      so.ell = ell;
      so.budget = budget;
      auto c = classify_problem(l.node_edge(), so);
      print_classification(c, l.node_edge());
      if (!evidence_path.empty()) write_json_file(evidence_path, classification_to_json(c, l.node_edge()));
      rep.j["verdict"] = verdict_line(c);
      rep.j["incomplete"] = c.search.incomplete;
      rep.write(report_path, command);
      return kOk;
    }
    if (*convert) {
      auto l = load(problem_path, rep);
      emit(problem_to_json(l.node_edge()), out_path);
      if (trace && l.pipeline)
        for (const auto& st : l.pipeline->stages)
          if (st.reduction)
            for (const auto& line : st.reduction->trace) std::cerr << json{{"stage", st.name}, {"config", line}}.dump() << "\n";
      rep.write(report_path, command);
      return kOk;
    }
    if (*pipeline) {
      auto l = load(problem_path, rep);
      if (!l.pipeline) throw UsageError("pipeline needs a radius-form problem");
      if (!keep_dir.empty()) {
        std::filesystem::create_directories(keep_dir);
        for (std::size_t i = 0; i < l.pipeline->stages.size(); ++i)
          write_json_file(keep_dir + "/stage" + std::to_string(i) + "-" + l.pipeline->stages[i].name + ".json",
                          problem_to_json(l.pipeline->stages[i].radius));
        write_json_file(keep_dir + "/node-edge.json", problem_to_json(l.node_edge()));
      }
      for (const auto& st : l.pipeline->stages)
        std::cout << "stage " << st.name << ": radius " << st.radius.radius << ", " << st.radius.configs.size()
                  << " configurations\n";
      std::cout << "node-edge: " << l.node_edge().node_configs.size() << " node configurations, "
                << l.node_edge().nout() << " outputs\n";
      SearchOptions so;
      so.ell = ell;
      so.budget = budget;
      auto c = classify_problem(l.node_edge(), so);
      print_classification(c, l.node_edge());
      rep.j["verdict"] = verdict_line(c);
      rep.write(report_path, command);
      return kOk;
    }
    if (*types) {
      auto l = load(problem_path, rep);
      auto r = compute_types(l.node_edge());
      json j = {{"registry", registry_json(r.registry, l.node_edge())}, {"states", r.states}};
      j["invalid"] = r.invalid.has_value();
      emit(j, out_path);
      rep.write(report_path, command);
      return r.invalid ? kNegative : kOk;
    }
    if (*pump) {
      auto l = load(problem_path, rep);
      const auto& p = l.node_edge();
      auto pj = read_json_file(path_path);
      rep.input(path_path);
      std::vector<NodeBehavior> path;
      for (const auto& b : pj.at("behaviors")) path.push_back(behavior_from_json(b, p));
      auto pumped = pump_virtual_path(path, target, p);
      json out = {{"behaviors", json::array()}};
      for (const auto& b : pumped) out["behaviors"].push_back(behavior_json(b, p));
      const bool same = compress_path_type(pumped, p) == compress_path_type(path, p);
      out["type"] = type_to_string(compress_path_type(pumped, p).type, p);
      out["type_preserved"] = same;
      emit(out, out_path);
      rep.write(report_path, command);
      return same ? kOk : kNegative;
    }
    if (*witness) {
      auto l = load(problem_path, rep);
      const auto& p = l.node_edge();
      auto tuple = parse_tuple(tuple_str, p);
      auto r = compute_types(p);
      auto id = r.registry.find(tuple);
      if (!id) {
        std::cerr << "tuple is not in the registry\n";
        return kNegative;
      }
      auto real = minimal_realization(*id, r.registry);
      json j = instance_to_json(real.tree, p.sigma_in, true);
      j["special_half"] = real.special_half;
      emit(j, out_path);
      rep.write(report_path, command);
      return kOk;
    }
    if (*solve) {
      auto l = load(problem_path, rep);
      const auto& p = l.node_edge();
      auto t = load_tree(instance_path, l.sigma_in(), rep);
      SolveOptions so;
      Assigner f;
      std::optional<Classification> cls;
      if (!assigner_path.empty()) {
        auto ev = read_json_file(assigner_path);
        rep.input(assigner_path);
        f = assigner_from_json(ev.at("assigner"), p);
        so.ell = ev.value("ell", 2);
        const std::string verdict = ev.value("verdict", "");
        so.mode = verdict == "O(log n)" ? SolveMode::Log : SolveMode::Poly;
        so.k = ev.value("exponent", 1);
        so.assigner = &f;
      } else if (mode == "poly" || mode == "log" || mode == "auto") {
        SearchOptions sopt;
        sopt.ell = ell;
        sopt.budget = budget;
        cls = classify_problem(p, sopt);
        so = solve_options_for(*cls);
      }
      if (mode == "poly") so.mode = SolveMode::Poly;
      if (mode == "log") so.mode = SolveMode::Log;
      if (mode == "diameter") so.mode = SolveMode::Diameter;
      if (ell > 0) so.ell = ell;
      auto r = solve_instance(t, p, so);
      json out;
      out["accounting"] = accounting_json(r.accounting);
      out["rounds"] = r.rounds;
      out["valid"] = r.valid;
      if (!r.error.empty()) out["error"] = r.error;
      if (r.labeling) {
        if (l.pipeline) {
          auto back = pipeline_backward(*l.pipeline, t, *r.labeling, l.problem.radius);
          out["valid"] = verify_radius(t, back, l.problem.radius).valid && r.valid;
          out["labeling"] = labeling_to_json(t, back, l.problem.radius.sigma_out, false);
        } else {
          out["labeling"] = labeling_to_json(t, *r.labeling, p.sigma_out, true);
        }
      }
      emit(out, out_path);
      rep.j["accounting"] = out["accounting"];
      rep.j["verdicts"] = {{"valid", out["valid"]}};
      rep.write(report_path, command);
      return out["valid"].get<bool>() ? kOk : kNegative;
    }
    if (*verify) {
      auto pr = load_problem(problem_path);
      rep.input(problem_path);
      const bool ne = pr.formalism == Formalism::NodeEdge;
      auto t = load_tree(instance_path, ne ? pr.node_edge.sigma_in : pr.radius.sigma_in, rep);
      auto lj = read_json_file(labeling_path);
      rep.input(labeling_path);
      Verdict v;
      if (ne) {
        v = verify_node_edge(t, parse_labeling(lj, t, pr.node_edge.sigma_out), pr.node_edge);
      } else {
        v = verify_radius(t, parse_labeling(lj, t, pr.radius.sigma_out), pr.radius);
      }
      std::cout << (v.valid ? "VALID" : "INVALID") << "\n";
      for (const auto& x : v.violations)
        std::cout << (x.kind == Violation::Kind::Node ? "node " : "edge ") << x.id << ": " << x.what << "\n";
      rep.j["verdicts"] = {{"valid", v.valid}};
      rep.write(report_path, command);
      return v.valid ? kOk : kNegative;
    }
    if (*gadget) {
      if (!preset.empty()) {
        const std::string file = path_path.empty() ? std::string(LFL_FIXTURE_DIR) + "/gadget-presets.json" : path_path;
        auto presets = read_json_file(file);
        bool found = false;
        for (const auto& pj : presets.at("presets"))
          if (pj.at("name") == preset) {
            alpha = pj.at("alpha").get<double>();
            g = pj.at("g").get<int>();
            L = pj.at("L").get<int>();
            pad = pj.value("pad", 0);
            found = true;
          }
        if (!found) throw UsageError("unknown preset " + preset);
      }
      auto inst = generate_gadget_instance(alpha, g, L, pad);
      Alphabet in({"·"});
      json j = {{"instance", instance_to_json(inst.tree, in, false)},
                {"alpha", alpha},
                {"g", g},
                {"L", L},
                {"padding", pad},
                {"nodes", inst.tree.n()},
                {"unpadded_nodes", inst.unpadded_nodes()},
                {"required", inst.required},
                {"path", inst.path}};
      emit(j, out_path);
      rep.write(report_path, command);
      return kOk;
    }
    if (*oracle) {
      Problem pr;
      if (!fixture_name.empty()) {
        const std::string dir = keep_dir.empty() ? std::string(LFL_FIXTURE_DIR) : keep_dir;
        pr = load_problem(dir + "/" + fixture_name + ".json");
      } else if (!problem_path.empty()) {
        pr = load_problem(problem_path);
        rep.input(problem_path);
      } else {
        throw UsageError("oracle needs a problem file or --fixture");
      }
      Rng rng(seed);
      const bool ne = pr.formalism == Formalism::NodeEdge;
      std::optional<Pipeline> pl;
      if (!ne) pl = run_pipeline(pr.radius);
      const NodeEdgeLFL& p = ne ? pr.node_edge : pl->node_edge.problem;
      const int nin = ne ? pr.node_edge.nin() : pr.radius.nin();
      long long pass = 0, fail = 0;
      auto tally = [&](const char* name, long long ok, long long bad) {
        std::cout << name << ": " << ok << " passed, " << bad << " failed\n";
        pass += ok;
        fail += bad;
      };
      auto trees = trees_with_inputs(std::max(1, max_nodes), nin, rng);
      for (auto& t : trees) t.fill_half_from_nodes();
      {
        long long ok = 0, bad = 0;
        for (const auto& t : trees) {
          auto a = solve_diameter(t, p);
          std::optional<Labeling> b;
          try {
            b = brute_force_solve(t, p);
          } catch (const PreconditionError&) {
            continue;
          }
          const bool agree = a.has_value() == b.has_value() && (!a || verify_node_edge(t, *a, p).valid);
          agree ? ++ok : ++bad;
        }
        tally("solver agreement", ok, bad);
      }
      {
        long long ok = 0, bad = 0;
        auto reg = compute_types(p);
        if (reg.invalid) {
          std::cout << "type soundness: problem is invalid, skipped\n";
        } else {
          for (const auto& t : trees)
            for (int h = 0; h < 2 * t.m(); ++h) {
              TypeTuple tt{subtree_type(t, t.half_node(h), {h}, p), t.half_inputs[h]};
              reg.registry.find(tt) ? ++ok : ++bad;
            }
          tally("type soundness", ok, bad);
        }
      }
      if (!ne && !pr.radius.trivial_order()) {
        long long ok = 0, bad = 0;
        auto elim = eliminate_auxiliary(pr.radius).problem;
        for (const auto& t : trees) {
          if (t.n() > 6) continue;
          std::vector<int> w(t.n(), 0);
          const int k = pr.radius.nout();
          for (;;) {
            const bool x = verify_radius(t, w, pr.radius).valid;
            const bool y = verify_radius(t, w, elim).valid;
            x == y ? ++ok : ++bad;
            int i = t.n() - 1;
            while (i >= 0 && w[i] == k - 1) w[i--] = 0;
            if (i < 0) break;
            ++w[i];
          }
        }
        tally("partial-order equivalence", ok, bad);
      }
      std::cout << (fail == 0 ? "ALL PASS" : "FAILURES") << " (" << pass << " passed, " << fail << " failed)\n";
      rep.j["verdicts"] = {{"passed", pass}, {"failed", fail}};
      rep.write(report_path, command);
      return fail == 0 ? kOk : kNegative;
    }
  } catch (const NotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const MalformedInput& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNegative;
  }
  return kUsage;
}
