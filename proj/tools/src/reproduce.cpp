#include "pinn/cli/reproduce.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "pinn/errors.hpp"

namespace pinn::cli {

namespace {

using K = NormKind;

TableSpec table1() {
  return {1, 500, 10.0,
          {{"poisson", {64}, {{"u", K::L2, 7.02e-05, true}, {"u", K::H1, 5.78e-04, true}}},
           {"elasticity", {64}, {{"u", K::L2, 7.34e-04, true}, {"u", K::H1, 1.94e-02, false}}},
           {"parabolic", {64}, {{"u", K::L2, 1.82e-03, true}, {"u", K::H1, 1.54e-02, false}}},
           {"hyperbolic", {64}, {{"u", K::L2, 4.41e-04, true}, {"u", K::H1, 3.81e-03, false}}}}};
}

TableSpec table2() {
  return {2, 500, 10.0,
          {{"stokes",
            {32, 32},
            {{"u", K::L2, 1.84e-04, true},
             {"u", K::H1, 2.91e-03, false},
             {"p", K::H1Semi, 2.20e-02, false}}},
           {"transient-stokes",
            {32, 32},
            {{"u", K::L2, 1.41e-04, false},
             {"u", K::H1, 2.30e-03, false},
             {"p", K::H1Semi, 1.59e-02, false}}},
           {"darcy", {32, 32}, {{"sigma", K::L2, 1.34e-03, false}, {"p", K::L2, 1.13e-04, true}}},
           {"inverse",
            {32, 32},
            {{"u", K::L2, 3.16e-03, true},
             {"f", K::L2, 5.66e-02, true},
             {"u", K::H1, 4.73e-02, false}}}}};
}

// Appendix tables: every L2 value is gated at 10x.
TableSpec table6() {
  return {6, 5000, 10.0,
          {{"poisson", {64}, {{"u", K::L2, 1.84e-06, true}, {"u", K::H1, 1.13e-05, false}}},
           {"elasticity", {64}, {{"u", K::L2, 2.06e-04, true}, {"u", K::H1, 6.03e-03, false}}},
           {"parabolic", {64}, {{"u", K::L2, 6.17e-05, true}, {"u", K::H1, 5.34e-04, false}}},
           {"hyperbolic", {64}, {{"u", K::L2, 3.12e-05, true}, {"u", K::H1, 4.42e-04, false}}}}};
}

TableSpec table7() {
  return {7, 5000, 10.0,
          {{"stokes",
            {32, 32},
            {{"u", K::L2, 1.41e-04, true},
             {"u", K::H1, 2.19e-03, false},
             {"p", K::H1Semi, 1.93e-02, false}}},
           {"transient-stokes",
            {32, 32},
            {{"u", K::L2, 9.69e-05, true},
             {"u", K::H1, 1.62e-03, false},
             {"p", K::H1Semi, 1.37e-02, false}}},
           // The printed Darcy p value lacks its exponent marker ("7.79-06").
           {"darcy", {32, 32}, {{"sigma", K::L2, 1.01e-04, true}, {"p", K::L2, 7.79e-06, true}}},
           {"inverse",
            {32, 32},
            {{"u", K::L2, 7.88e-05, true},
             {"f", K::L2, 1.20e-03, true},
             {"u", K::H1, 1.36e-03, false}}}}};
}

std::string label(const PaperValue& v) {
  return v.field + " " + (v.kind == K::L2 ? "L2" : v.kind == K::H1 ? "H1" : "H1-semi");
}

}  // namespace

const TableSpec& paper_table(int id) {
  static const TableSpec t1 = table1(), t2 = table2(), t6 = table6(), t7 = table7();
  switch (id) {
    case 1: return t1;
    case 2: return t2;
    case 6: return t6;
    case 7: return t7;
    default: throw ConfigError("unknown table " + std::to_string(id) + " (valid: 1, 2, 6, 7)");
  }
}

double measured_value(const ErrorReport& errors, const PaperValue& value) {
  const FieldErrors& f = errors.field(value.field);
  switch (value.kind) {
    case K::L2: return f.l2.absolute;
    case K::H1: return f.h1.absolute;
    case K::H1Semi: return f.h1_semi.absolute;
  }
  return 0.0;
}

bool Reproduction::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const RowResult& r) { return r.pass; });
}

Reproduction reproduce(int table, const std::vector<std::uint64_t>& seeds,
                       std::optional<std::size_t> iterations, std::ostream* progress) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  Reproduction out;
  out.table = paper_table(table);
  out.seeds = seeds;
  out.iterations = iterations.value_or(out.table.iterations);
  const double factor = out.table.tolerance_factor;

  for (const TableRow& row : out.table.rows) {
    RowResult rr;
    rr.row = row;
    rr.gated = std::any_of(row.values.begin(), row.values.end(),
                           [](const PaperValue& v) { return v.gated; });
    const PdeProblem problem = make_problem(row.pde);
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg;
      cfg.iterations = out.iterations;
      cfg.widths = row.widths;
      cfg.seeds = Seeds::from_base(seed);
      SeedRun run;
      run.seed = seed;
      run.report = train(problem, cfg);
      for (const PaperValue& v : row.values) {
        // A run aborted before its first checkpoint has no errors to report.
        const double m = run.report.checkpoints.empty()
                             ? std::numeric_limits<double>::infinity()
                             : measured_value(run.report.final_checkpoint().errors, v);
        run.measured.push_back(m);
        if (v.gated || !rr.gated) run.score = std::max(run.score, m / (factor * v.paper));
      }
      if (!run.report.ok()) run.score = std::numeric_limits<double>::infinity();
      if (progress) {
        char line[160];
        std::snprintf(line, sizeof line, "  table %d %-16s seed %-4llu loss %.3e  score %.3f  %.1fs\n",
                      table, row.pde.c_str(), static_cast<unsigned long long>(seed),
                      run.report.loss.back(), run.score, run.report.wall_seconds);
        *progress << line << std::flush;
      }
      rr.runs.push_back(std::move(run));
    }
    std::vector<std::size_t> order(rr.runs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rr.runs[a].score < rr.runs[b].score;
    });
    rr.best = order.front();
    rr.median = order[(order.size() - 1) / 2];
    rr.pass = !rr.gated || rr.runs[rr.best].score <= 1.0;
    out.rows.push_back(std::move(rr));
  }
  return out;
}

std::string format_reproduction(const Reproduction& r) {
  std::ostringstream os;
  os << "Table " << r.table.id << ": " << r.iterations << " iterations, seeds";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) os << (i ? "," : " ") << r.seeds[i];
  if (r.iterations != r.table.iterations) os << " (budget overridden; paper uses " << r.table.iterations << ")";
  os << "\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-17s %-11s %10s %10s %10s %8s %10s  %s\n", "pde", "quantity",
                "paper", "best", "median", "ratio", "threshold", "verdict");
  os << line;
  for (const RowResult& row : r.rows) {
    const SeedRun& best = row.runs[row.best];
    const SeedRun& median = row.runs[row.median];
    for (std::size_t v = 0; v < row.row.values.size(); ++v) {
      const PaperValue& pv = row.row.values[v];
      const double threshold = r.table.tolerance_factor * pv.paper;
      const char* verdict = !pv.gated ? "-" : best.measured[v] <= threshold ? "pass" : "FAIL";
      std::snprintf(line, sizeof line, "%-17s %-11s %10.2e %10.2e %10.2e %8.2f %10.2e  %s\n",
                    v == 0 ? row.row.pde.c_str() : "", label(pv).c_str(), pv.paper,
                    best.measured[v], median.measured[v], best.measured[v] / pv.paper,
                    threshold, verdict);
      os << line;
    }
  }
  os << "verdict: " << (r.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

nlohmann::json to_json(const Reproduction& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const RowResult& row : r.rows) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t v = 0; v < row.row.values.size(); ++v) {
      const PaperValue& pv = row.row.values[v];
      nlohmann::json per_seed = nlohmann::json::array();
      for (const SeedRun& run : row.runs) per_seed.push_back(run.measured[v]);
      values.push_back({{"quantity", label(pv)},
                        {"paper", pv.paper},
                        {"gated", pv.gated},
                        {"threshold", r.table.tolerance_factor * pv.paper},
                        {"best", row.runs[row.best].measured[v]},
                        {"median", row.runs[row.median].measured[v]},
                        {"per_seed", per_seed}});
    }
    nlohmann::json runs = nlohmann::json::array();
    for (const SeedRun& run : row.runs) {
      runs.push_back({{"seed", run.seed},
                      {"score", run.score},
                      {"final_loss", run.report.loss.back()},
                      {"stop_reason", to_string(run.report.stop)},
                      {"wall_seconds", run.report.wall_seconds}});
    }
    rows.push_back({{"pde", row.row.pde},
                    {"widths", row.row.widths},
                    {"values", values},
                    {"runs", runs},
                    {"best_seed", row.runs[row.best].seed},
                    {"median_seed", row.runs[row.median].seed},
                    {"pass", row.pass}});
  }
  return {{"schema_version", 1},
          {"table", r.table.id},
          {"iterations", r.iterations},
          {"seeds", r.seeds},
          {"rows", rows},
          {"pass", r.pass()}};
}

}  // namespace pinn::cli
