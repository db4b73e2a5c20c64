#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lts/bsa.hpp"
#include "lts/csv.hpp"
#include "lts/diagnostics.hpp"
#include "lts/errors.hpp"
#include "lts/generate.hpp"
#include "lts/model.hpp"
#include "lts/oracle.hpp"

namespace lts {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCapExceeded = 3;
inline constexpr int kExitNoCandidate = 4;
inline constexpr int kExitDegenerateTie = 5;

/// Resolved command-line configuration for one solver run.
struct RunConfig {
  std::string input_path;            // CSV file; empty when gen_spec is used
  std::string response = "1";        // response column: header name or ordinal
  std::string h_spec;                // "", integer count, or fraction of n
  bool intercept = false;
  std::string algorithm = "bsa";     // bsa | exact | both
  std::string report_format = "json";  // json | csv | text
  bool landscape = false;
  unsigned threads = 1;
  double residual_eq_tol = 1e-8;
  std::uint64_t cap = 2000000;       // exhaustive-enumeration budget
  std::string gen_spec;              // "seed,n,p,frac"; empty = none
};

namespace detail {

struct GenParams {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  double frac = 0.0;
};

inline GenParams parse_gen_spec(const std::string& spec) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : spec) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  if (fields.size() != 4) {
    throw InvalidInputError("--gen expects \"seed,n,p,frac\", got \"" + spec + "\"");
  }
  auto parse_u64 = [&](const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw InvalidInputError(std::string("--gen: cannot parse ") + what + " \"" + s + "\"");
    }
    return v;
  };
  GenParams g;
  g.seed = parse_u64(trim(fields[0]), "seed");
  g.n = static_cast<std::size_t>(parse_u64(trim(fields[1]), "n"));
  g.p = static_cast<std::size_t>(parse_u64(trim(fields[2]), "p"));
  double frac = 0.0;
  const std::string fs = trim(fields[3]);
  if (!parse_double(fs, frac)) {
    throw InvalidInputError("--gen: cannot parse frac \"" + fs + "\"");
  }
  g.frac = frac;
  return g;
}

inline std::size_t resolve_h(const std::string& spec, std::size_t n, std::size_t p,
                             std::ostream& err) {
  if (spec.empty()) return (n + p + 1) / 2;

  double value = 0.0;
  if (!parse_double(spec, value)) {
    throw InvalidInputError("--h: cannot parse \"" + spec + "\"");
  }
  const bool looks_fractional =
      spec.find('.') != std::string::npos || spec.find('e') != std::string::npos ||
      spec.find('E') != std::string::npos;

  std::size_t h = 0;
  if (looks_fractional || value < 1.0) {
    if (!(value > 0.0) || value > 1.0) {
      throw InvalidInputError("--h: fraction must lie in (0, 1]");
    }
    const auto rounded = std::llround(value * static_cast<double>(n));
    h = static_cast<std::size_t>(std::max<long long>(rounded, 1));
    if (h < p) h = p;
    if (h > n) h = n;
    if (value <= 0.5) {
      err << "warning: trim fraction " << spec
          << " keeps at most half the observations; the usual range is (0.5, 1]\n";
    }
  } else {
    if (value != std::floor(value)) {
      throw InvalidInputError("--h: \"" + spec + "\" is neither an integer nor a fraction below 1");
    }
    h = static_cast<std::size_t>(value);
    if (2 * h < n) {
      err << "warning: h = " << h << " keeps under half of the n = " << n
          << " observations\n";
    }
  }
  if (h < p || h > n) {
    throw InvalidInputError("--h: need p <= h <= n (p = " + std::to_string(p) +
                            ", n = " + std::to_string(n) + ", h = " +
                            std::to_string(h) + ")");
  }
  return h;
}

inline Dataset with_intercept_column(Dataset d) {
  Matrix x(d.n(), d.p() + 1);
  for (std::size_t i = 0; i < d.n(); ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 0; j < d.p(); ++j) x(i, j + 1) = d.X(i, j);
  }
  d.X = std::move(x);
  d.has_intercept = true;
  return d;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using json = nlohmann::ordered_json;

inline json counters_to_json(const Counters& c) {
  json j;
  j["index_tuples_visited"] = c.index_tuples_visited;
  j["systems_solved"] = c.systems_solved;
  j["regular_systems"] = c.regular_systems;
  j["candidates_in_Hp"] = c.candidates_in_Hp;
  j["J_evaluations"] = c.J_evaluations;
  return j;
}

inline json assumption_to_json(const AssumptionReport& r) {
  json j;
  j["id"] = r.id;
  j["status"] = to_string(r.status);
  json witnesses = json::array();
  for (const Witness& w : r.witnesses) {
    json wj;
    json idx = json::array();
    for (std::size_t i : w.indices) idx.push_back(i + 1);
    wj["indices"] = std::move(idx);
    wj["signs"] = w.signs;
    witnesses.push_back(std::move(wj));
  }
  j["witnesses"] = std::move(witnesses);
  j["note"] = r.note;
  return j;
}

inline json fit_to_json(const FitResult& fit, double wall_ms) {
  json j;
  j["beta"] = fit.beta;
  j["objective"] = fit.objective;
  j["subset"] = fit.mask.one_based();
  j["counters"] = counters_to_json(fit.counters);
  j["wall_ms"] = wall_ms;
  return j;
}

inline json landscape_to_json(const Landscape1D& ls) {
  json j;
  j["boundary_points"] = ls.boundary_points;
  json cells = json::array();
  for (const LandscapeCell& cell : ls.cells) {
    json cj;
    json interval = json::array();
    if (std::isinf(cell.lower)) interval.push_back(nullptr); else interval.push_back(cell.lower);
    if (std::isinf(cell.upper)) interval.push_back(nullptr); else interval.push_back(cell.upper);
    cj["interval"] = std::move(interval);
    cj["subset"] = cell.mask.one_based();
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  json minima = json::array();
  for (const LocalMinimum& m : ls.local_minima) {
    json mj;
    mj["beta"] = m.beta;
    mj["value"] = m.value;
    mj["subset"] = m.mask.one_based();
    minima.push_back(std::move(mj));
  }
  j["local_minima"] = std::move(minima);
  return j;
}

struct RunOutput {
  json report;
  const RunConfig* config = nullptr;
};

inline void write_csv_report(const json& report, std::ostream& out) {
  out << "field,value\n";
  auto emit = [&](const std::string& key, const json& v) {
    if (v.is_number_float()) {
      out << key << "," << fmt_double(v.get<double>()) << "\n";
    } else if (v.is_boolean()) {
      out << key << "," << (v.get<bool>() ? "true" : "false") << "\n";
    } else if (v.is_string()) {
      out << key << "," << v.get<std::string>() << "\n";
    } else {
      out << key << "," << v.dump() << "\n";
    }
  };
  auto emit_list = [&](const std::string& key, const json& arr, const char* sep) {
    std::string joined;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (i) joined += sep;
      joined += arr[i].is_number_float() ? fmt_double(arr[i].get<double>())
                                         : arr[i].dump();
    }
    out << key << "," << joined << "\n";
  };

  for (const char* key : {"algorithm", "n", "p", "h", "intercept", "ols_shortcircuit"}) {
    emit(key, report.at(key));
  }
  const auto& beta = report.at("beta");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    emit("beta_" + std::to_string(i + 1), beta[i]);
  }
  emit("objective", report.at("objective"));
  emit_list("subset", report.at("subset"), ";");
  for (auto& [k, v] : report.at("counters").items()) emit(k, v);
  emit("wall_ms", report.at("wall_ms"));
  for (const auto& a : report.at("assumptions")) {
    emit("assumption_" + a.at("id").get<std::string>(), a.at("status"));
  }
  if (report.contains("exact")) {
    emit("exact_objective", report.at("exact").at("objective"));
    emit_list("exact_subset", report.at("exact").at("subset"), ";");
    emit("agreement_objective_match", report.at("agreement").at("objective_match"));
    emit("agreement_mask_match", report.at("agreement").at("mask_match"));
  }
  if (report.contains("landscape")) {
    emit_list("boundary_points", report.at("landscape").at("boundary_points"), ";");
    const auto& minima = report.at("landscape").at("local_minima");
    for (std::size_t i = 0; i < minima.size(); ++i) {
      out << "local_minimum_" << (i + 1) << ","
          << fmt_double(minima[i].at("beta").get<double>()) << ";"
          << fmt_double(minima[i].at("value").get<double>()) << "\n";
    }
  }
}

inline void write_text_report(const json& report, std::ostream& out) {
  out << "trimmed least squares fit (" << report.at("algorithm").get<std::string>()
      << ")\n";
  out << "  n = " << report.at("n") << ", p = " << report.at("p") << ", h = "
      << report.at("h")
      << (report.at("intercept").get<bool>() ? ", with intercept" : "") << "\n";
  if (report.at("ols_shortcircuit").get<bool>()) {
    out << "  h = n: plain least squares, no trimming\n";
  }
  out << "  beta =";
  for (const auto& b : report.at("beta")) out << " " << fmt_double(b.get<double>());
  out << "\n";
  out << "  objective = " << fmt_double(report.at("objective").get<double>()) << "\n";
  out << "  subset =";
  for (const auto& s : report.at("subset")) out << " " << s;
  out << "\n";
  const auto& c = report.at("counters");
  out << "  counters: tuples=" << c.at("index_tuples_visited")
      << " systems=" << c.at("systems_solved")
      << " regular=" << c.at("regular_systems")
      << " boundary_candidates=" << c.at("candidates_in_Hp")
      << " subset_fits=" << c.at("J_evaluations") << "\n";
  out << "  wall_ms = " << report.at("wall_ms").get<double>() << "\n";

  if (report.contains("exact")) {
    const auto& e = report.at("exact");
    out << "reference enumeration\n";
    out << "  objective = " << fmt_double(e.at("objective").get<double>()) << "\n";
    out << "  subset =";
    for (const auto& s : e.at("subset")) out << " " << s;
    out << "\n";
    const auto& agr = report.at("agreement");
    out << "  agreement: objective "
        << (agr.at("objective_match").get<bool>() ? "matches" : "DIFFERS")
        << ", subset " << (agr.at("mask_match").get<bool>() ? "matches" : "DIFFERS")
        << "\n";
  }

  out << "assumptions\n";
  for (const auto& a : report.at("assumptions")) {
    out << "  " << a.at("id").get<std::string>() << ": "
        << a.at("status").get<std::string>();
    const auto& note = a.at("note").get<std::string>();
    if (!note.empty()) out << " (" << note << ")";
    out << "\n";
    for (const auto& w : a.at("witnesses")) {
      out << "    witness:";
      for (const auto& i : w.at("indices")) out << " " << i;
      const auto& signs = w.at("signs").get<std::string>();
      if (!signs.empty()) out << " signs=" << signs;
      out << "\n";
    }
  }

  if (report.contains("landscape")) {
    const auto& ls = report.at("landscape");
    out << "landscape\n  boundaries:";
    for (const auto& b : ls.at("boundary_points")) {
      out << " " << fmt_double(b.get<double>());
    }
    out << "\n";
    for (const auto& cell : ls.at("cells")) {
      const auto& iv = cell.at("interval");
      out << "  cell (" << (iv[0].is_null() ? "-inf" : fmt_double(iv[0].get<double>()))
          << ", " << (iv[1].is_null() ? "+inf" : fmt_double(iv[1].get<double>()))
          << "): subset";
      for (const auto& s : cell.at("subset")) out << " " << s;
      out << "\n";
    }
    for (const auto& m : ls.at("local_minima")) {
      out << "  local minimum: beta = " << fmt_double(m.at("beta").get<double>())
          << ", value = " << fmt_double(m.at("value").get<double>()) << ", subset";
      for (const auto& s : m.at("subset")) out << " " << s;
      out << "\n";
    }
  }

  if (report.contains("generator")) {
    const auto& g = report.at("generator");
    out << "generator: seed = " << g.at("seed") << ", true beta =";
    for (const auto& b : g.at("true_beta")) out << " " << fmt_double(b.get<double>());
    out << "\n";
  }
}

inline void run_impl(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.algorithm != "bsa" && config.algorithm != "exact" &&
      config.algorithm != "both") {
    throw InvalidInputError("--algorithm must be bsa, exact, or both");
  }
  if (config.report_format != "json" && config.report_format != "csv" &&
      config.report_format != "text") {
    throw InvalidInputError("--report must be json, csv, or text");
  }

  Dataset dataset;
  std::optional<GenParams> gen;
  std::vector<double> true_beta;
  if (!config.gen_spec.empty()) {
    if (!config.input_path.empty()) {
      throw InvalidInputError("give either an input file or --gen, not both");
    }
    const GenParams g = parse_gen_spec(config.gen_spec);
    GeneratedInstance inst = gen_instance(g.seed, g.n, g.p, g.frac);
    dataset = std::move(inst.dataset);
    true_beta = std::move(inst.true_beta);
    if (config.intercept) dataset = with_intercept_column(std::move(dataset));
    gen = g;
  } else {
    if (config.input_path.empty()) {
      throw InvalidInputError("no input: give a CSV path or --gen \"seed,n,p,frac\"");
    }
    dataset = load_csv(config.input_path, config.response, config.intercept);
  }

  Problem problem;
  problem.data = std::move(dataset);
  problem.tol.residual_eq_tol = config.residual_eq_tol;
  problem.h = resolve_h(config.h_spec, problem.n(), problem.p(), err);
  problem.validate();

  using clock = std::chrono::steady_clock;
  auto timed_ms = [](auto&& f, double& ms) {
    const auto t0 = clock::now();
    FitResult r = f();
    ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return r;
  };

  std::optional<FitResult> scan_fit, exact_fit;
  double scan_ms = 0.0, exact_ms = 0.0;
  if (config.algorithm == "bsa" || config.algorithm == "both") {
    scan_fit = timed_ms([&] { return bsa_solve(problem, config.threads); }, scan_ms);
  }
  if (config.algorithm == "exact" || config.algorithm == "both") {
    exact_fit = timed_ms(
        [&] { return exact_enumerate(problem, config.cap, config.threads); },
        exact_ms);
  }
  const FitResult& primary = scan_fit ? *scan_fit : *exact_fit;
  const double primary_ms = scan_fit ? scan_ms : exact_ms;

  std::vector<AssumptionReport> assumptions;
  assumptions.push_back(check_pairwise(problem.data, problem.tol.residual_eq_tol));
  assumptions.push_back(check_positive_minimum(problem, primary));
  assumptions.push_back(check_sign_rank(problem.data));
  assumptions.push_back(check_h_full_rank(problem.data, problem.h));

  std::optional<Landscape1D> landscape;
  if (config.landscape) {
    if (problem.p() != 1) {
      throw InvalidInputError("--landscape requires exactly one regressor");
    }
    landscape = landscape_1d(problem);
  }

  json report;
  report["algorithm"] = config.algorithm;
  report["n"] = problem.n();
  report["p"] = problem.p();
  report["h"] = problem.h;
  report["intercept"] = problem.data.has_intercept;
  report["ols_shortcircuit"] = problem.h == problem.n();
  report["beta"] = primary.beta;
  report["objective"] = primary.objective;
  report["subset"] = primary.mask.one_based();
  report["counters"] = counters_to_json(primary.counters);
  json assumption_array = json::array();
  for (const AssumptionReport& a : assumptions) {
    assumption_array.push_back(assumption_to_json(a));
  }
  report["assumptions"] = std::move(assumption_array);
  report["wall_ms"] = primary_ms;

  if (config.algorithm == "both") {
    report["exact"] = fit_to_json(*exact_fit, exact_ms);
    const double j1 = scan_fit->objective;
    const double j2 = exact_fit->objective;
    json agreement;
    agreement["objective_match"] =
        std::abs(j1 - j2) <= 1e-9 * (1.0 + std::max(std::abs(j1), std::abs(j2)));
    agreement["mask_match"] = scan_fit->mask == exact_fit->mask;
    agreement["objective_abs_diff"] = std::abs(j1 - j2);
    report["agreement"] = std::move(agreement);
  }

  if (landscape) report["landscape"] = landscape_to_json(*landscape);

  if (gen) {
    json g;
    g["seed"] = gen->seed;
    g["n"] = gen->n;
    g["p"] = gen->p;
    g["outlier_fraction"] = gen->frac;
    g["true_beta"] = true_beta;
    report["generator"] = std::move(g);
  }

  if (config.report_format == "json") {
    out << report.dump(2) << "\n";
  } else if (config.report_format == "csv") {
    write_csv_report(report, out);
  } else {
    write_text_report(report, out);
  }
}

}  // namespace detail

/// Executes one configured run, writing the report to `out` and warnings or
/// error messages to `err`. Returns a process exit code: 0 success, 2 bad
/// input, 3 enumeration cap exceeded, 4 no candidate point found, 5
/// degenerate residual tie, 1 anything unexpected.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    detail::run_impl(config, out, err);
    return kExitOk;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const NoCandidateError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoCandidate;
  } catch (const DegenerateTieError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerateTie;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace lts
