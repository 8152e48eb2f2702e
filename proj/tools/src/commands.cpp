#include "pinn/cli/commands.hpp"

#include <cstdio>
#include <fstream>

#include "pinn/cli/check.hpp"
#include "pinn/cli/reproduce.hpp"
#include "pinn/errors.hpp"
#include "pinn/metrics.hpp"

namespace fs = std::filesystem;

namespace pinn::cli {

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string summary_line(const RunConfig& config, const TrainReport& rep) {
  std::string line = config.pde + ": " + std::to_string(rep.iterations_run) + " iterations (" +
                     to_string(rep.stop) + ")";
  char buf[96];
  std::snprintf(buf, sizeof buf, ", loss %.3e", rep.loss.back());
  line += buf;
  if (!rep.checkpoints.empty()) {
    const Checkpoint& c = rep.final_checkpoint();
    for (const auto& f : c.errors.fields) {
      std::snprintf(buf, sizeof buf, ", %s L2 %.3e H1 %.3e", f.field.c_str(), f.l2.absolute,
                    f.h1.absolute);
      line += buf;
    }
  }
  std::snprintf(buf, sizeof buf, ", %.1f s", rep.wall_seconds);
  return line + buf;
}

}  // namespace

ActivationDerivs corrupted_tanh(double z) {
  ActivationDerivs d = tanh_derivs(z);
  d.s3 *= 1.5;
  return d;
}

nlohmann::json params_to_json(const PdeProblem& problem, const std::vector<NetworkParams>& params,
                              std::uint64_t seed) {
  nlohmann::json fields = nlohmann::json::array();
  for (std::size_t f = 0; f < params.size(); ++f) {
    NetworkCheckpoint ckpt{params[f], seed, {{"problem", problem.name}, {"field", problem.fields[f].name}}};
    fields.push_back({{"name", problem.fields[f].name}, {"network", checkpoint_to_json(ckpt)}});
  }
  return {{"schema_version", kSchemaVersion}, {"problem", problem.name}, {"fields", fields}};
}

std::vector<NetworkParams> params_from_json(const PdeProblem& problem, const nlohmann::json& j) {
  try {
    const auto& fields = j.at("fields");
    if (fields.size() != problem.fields.size()) {
      throw ConfigError("params.json has " + std::to_string(fields.size()) + " fields, " +
                        problem.name + " needs " + std::to_string(problem.fields.size()));
    }
    std::vector<NetworkParams> out;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const FieldSpec& spec = problem.fields[f];
      if (fields[f].at("name").get<std::string>() != spec.name) {
        throw ConfigError("params.json field " + std::to_string(f) + " is not '" + spec.name + "'");
      }
      NetworkParams p = checkpoint_from_json(fields[f].at("network")).params;
      if (p.shape.d_in != problem.domain.coord_dim() || p.shape.d_out != spec.d_out) {
        throw ConfigError("params.json network for '" + spec.name + "' has the wrong shape");
      }
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed params.json: ") + e.what());
  }
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  PdeProblem problem;
  TrainConfig tc;
  try {
    problem = build_problem(config);
    tc = train_config(config, problem);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  TrainReport rep;
  try {
    rep = train(problem, tc);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonFiniteResidual& e) {
    err << "aborted: " << e.what() << "\n";
    return kNonFinite;
  }
  if (rep.stop == StopReason::NonFinite) {
    err << "aborted: " << rep.message << "\n";
    return kNonFinite;
  }

  const fs::path dir(config.out);
  fs::create_directories(dir);
  nlohmann::json report = {{"schema_version", kSchemaVersion},
                           {"config", to_json(config)},
                           {"train", to_json(rep)},
                           {"errors", to_json(rep.final_checkpoint().errors)},
                           {"certificate", rep.final_checkpoint().certificate}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  {
    std::ofstream csv(dir / "loss.csv");
    write_loss_csv(rep, csv);
  }
  write_text(dir / "params.json", params_to_json(problem, rep.params, tc.seeds.params).dump(2) + "\n");

  out << summary_line(config, rep) << "\n";
  if (!rep.ok()) {
    err << "optimizer stopped: " << rep.message << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_reproduce(const ReproduceOptions& options, std::ostream& out, std::ostream& err) {
  Reproduction result;
  try {
    paper_table(options.table);
    result = reproduce(options.table, options.seeds, options.iterations, &err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  out << format_reproduction(result);
  if (!options.out.empty()) {
    fs::create_directories(options.out);
    write_text(fs::path(options.out) / "reproduce.json", to_json(result).dump(2) + "\n");
  }
  return result.pass() ? kOk : kFailure;
}

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  const bool grads = options.scope == "gradients" || options.scope == "all";
  const bool manufactured = options.scope == "manufactured" || options.scope == "all";
  if (!grads && !manufactured) {
    err << "config error: unknown scope '" << options.scope
        << "' (valid: gradients, manufactured, all)\n";
    return kConfigError;
  }
  bool ok = true;
  char line[200];
  auto print = [&](const char* what, const CheckReport& report) {
    for (const Deviation& d : report.entries) {
      const bool bad = !(d.worst <= report.tolerance);
      std::snprintf(line, sizeof line, "%-4s %-12s %-24s %-18s %.3e  (%zu samples)\n",
                    bad ? "FAIL" : "ok", what, d.problem.c_str(), d.block.c_str(), d.worst,
                    d.samples);
      out << line;
    }
    if (const Deviation* w = report.worst()) {
      std::snprintf(line, sizeof line, "worst %s deviation: %.3e at %s/%s (tolerance %.0e)\n", what,
                    w->worst, w->problem.c_str(), w->block.c_str(), report.tolerance);
      out << line;
    }
    if (!report.ok()) {
      ok = false;
      for (const Deviation& d : report.entries) {
        if (!(d.worst <= report.tolerance)) {
          err << "violation: " << what << " " << d.problem << "/" << d.block << " deviation "
              << d.worst << "\n";
        }
      }
    }
  };
  if (grads) {
    GradientCheckOptions g;
    g.configs = options.configs;
    g.seed = options.seed;
    if (options.corrupt_activation) g.assembly.activation = corrupted_tanh;
    print("gradient", check_gradients(g));
  }
  if (manufactured) print("manufactured", check_manufactured(100, options.seed));
  out << (ok ? "check passed\n" : "check FAILED\n");
  return ok ? kOk : kFailure;
}

int cmd_export(const fs::path& dir, const std::string& out_file, std::ostream& out,
               std::ostream& err) {
  nlohmann::json stored;
  ErrorReport recomputed;
  try {
    const nlohmann::json report = read_json(dir / "report.json");
    const RunConfig config = merge_config(RunConfig{}, report.at("config"));
    const PdeProblem problem = build_problem(config);
    const std::vector<NetworkParams> params =
        params_from_json(problem, read_json(dir / "params.json"));
    ErrorOptions eo;
    eo.n_points = config.eval_points;
    eo.seed = config.seeds.eval;
    recomputed = evaluate_errors(problem, params, eo);
    stored = report.at("errors");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: malformed report.json: " << e.what() << "\n";
    return kConfigError;
  }
  const nlohmann::json fresh = to_json(recomputed);
  out << format_error_table(recomputed);
  if (!out_file.empty()) write_text(out_file, fresh.dump(2) + "\n");
  if (fresh != stored) {
    err << "recomputed errors differ from report.json\n";
    return kFailure;
  }
  out << "errors reproduced bit-identically from " << (dir / "params.json").string() << "\n";
  return kOk;
}

}  // namespace pinn::cli
