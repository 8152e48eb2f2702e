#include "pinn/cli/run_config.hpp"

#include <set>
#include <sstream>

#include "pinn/errors.hpp"

namespace pinn::cli {

namespace {

template <class T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig merge_config(RunConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "pde",     "widths",        "iterations",      "interior",
      "boundary",       "seed",    "seeds",         "eta_reg",         "noise",
      "hard_boundary",  "average_penalty", "checkpoint_stride", "eval_points", "out"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (j.contains("pde")) c.pde = get<std::string>(j, "pde");
  if (j.contains("widths")) {
    const auto& w = j.at("widths");
    c.widths = w.is_array() ? get<std::vector<std::size_t>>(j, "widths")
                            : std::vector<std::size_t>{get<std::size_t>(j, "widths")};
  }
  if (j.contains("iterations")) c.iterations = get<std::size_t>(j, "iterations");
  if (j.contains("interior")) c.interior = get<std::size_t>(j, "interior");
  if (j.contains("boundary")) c.boundary = get<std::size_t>(j, "boundary");
  // A base seed first, then any explicit stream seeds on top of it.
  if (j.contains("seed")) c.seeds = Seeds::from_base(get<std::uint64_t>(j, "seed"));
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (!s.is_object()) throw ConfigError("config key 'seeds' must be an object");
    if (s.contains("params")) c.seeds.params = get<std::uint64_t>(s, "params");
    if (s.contains("interior")) c.seeds.interior = get<std::uint64_t>(s, "interior");
    if (s.contains("boundary")) c.seeds.boundary = get<std::uint64_t>(s, "boundary");
    if (s.contains("eval")) c.seeds.eval = get<std::uint64_t>(s, "eval");
  }
  if (j.contains("eta_reg")) c.eta_reg = get<double>(j, "eta_reg");
  if (j.contains("noise")) c.noise = get<double>(j, "noise");
  if (j.contains("hard_boundary")) c.hard_boundary = get<bool>(j, "hard_boundary");
  if (j.contains("average_penalty")) c.average_penalty = get<bool>(j, "average_penalty");
  if (j.contains("checkpoint_stride")) c.checkpoint_stride = get<std::size_t>(j, "checkpoint_stride");
  if (j.contains("eval_points")) c.eval_points = get<std::size_t>(j, "eval_points");
  if (j.contains("out")) c.out = get<std::string>(j, "out");
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"pde", c.pde},
          {"widths", c.widths},
          {"iterations", c.iterations},
          {"interior", c.interior},
          {"boundary", c.boundary},
          {"seeds",
           {{"params", c.seeds.params},
            {"interior", c.seeds.interior},
            {"boundary", c.seeds.boundary},
            {"eval", c.seeds.eval}}},
          {"eta_reg", c.eta_reg},
          {"noise", c.noise},
          {"hard_boundary", c.hard_boundary},
          {"average_penalty", c.average_penalty},
          {"checkpoint_stride", c.checkpoint_stride},
          {"eval_points", c.eval_points},
          {"out", c.out}};
}

PdeProblem build_problem(const RunConfig& c) {
  ProblemOptions opts;
  opts.eta_reg = c.eta_reg;
  opts.noise = c.noise;
  opts.average_penalty = c.average_penalty;
  PdeProblem problem;
  try {
    problem = make_problem(c.pde, opts);
  } catch (const InvalidRegularization& e) {
    throw ConfigError(e.what());
  }
  if (c.average_penalty && c.pde != "stokes" && c.pde != "transient-stokes") {
    throw ConfigError("--average-penalty only applies to stokes and transient-stokes");
  }
  if (!c.widths.empty() && c.widths.size() != 1 && c.widths.size() != problem.fields.size()) {
    std::ostringstream msg;
    msg << c.pde << " has " << problem.fields.size() << " fields (";
    for (std::size_t f = 0; f < problem.fields.size(); ++f) {
      msg << (f ? ", " : "") << problem.fields[f].name;
    }
    msg << ") but " << c.widths.size() << " widths were given";
    throw ConfigError(msg.str());
  }
  for (std::size_t w : c.widths) {
    if (w == 0) throw ConfigError("widths must be positive");
  }
  return c.hard_boundary ? with_hard_boundary(problem) : problem;
}

TrainConfig train_config(const RunConfig& c, const PdeProblem& problem) {
  if (c.iterations == 0) throw ConfigError("iterations must be at least 1");
  if (c.interior == 0 || c.boundary == 0) throw ConfigError("point counts must be positive");
  if (c.checkpoint_stride == 0) throw ConfigError("checkpoint stride must be positive");
  if (c.eval_points == 0) throw ConfigError("eval points must be positive");
  TrainConfig t;
  t.iterations = c.iterations;
  t.seeds = c.seeds;
  t.counts = {c.interior, c.boundary};
  if (c.widths.size() == 1) {
    t.widths.assign(problem.fields.size(), c.widths.front());
  } else {
    t.widths = c.widths;
  }
  t.checkpoint_stride = c.checkpoint_stride;
  t.eval_points = c.eval_points;
  return t;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a list of integers: '" + text + "'");
    }
    if (used != item.size()) throw ConfigError("not a list of integers: '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

}  // namespace pinn::cli
