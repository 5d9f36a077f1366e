// qso: command-line front end over the qso_core library.
//
// Exit codes: 0 success, 2 validation failure, 3 parse error. Errors are
// written to stderr as a single JSON object.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qso/abscont.hpp"
#include "qso/classify.hpp"
#include "qso/markov.hpp"
#include "qso/report.hpp"
#include "qso/spec_file.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qso;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out;
  std::string format;
  bool symmetrize = false;
};

struct LoadedSpec {
  OperatorSpec spec;
  std::string sha256;
};

LoadedSpec load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecParseError(path, std::nullopt, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return {parse_spec(text, path), sha256_hex(text)};
}

std::vector<double> parse_reals(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    double v = 0.0;
    const char* first = s.data() + pos;
    const char* last = s.data() + end;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw UsageError(fmt::format("{}: cannot read '{}' as a number", what, std::string(first, last)));
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

SimplexPoint parse_point(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> c = parse_reals(s, what);
  if (n == 2 && c.size() == 1) c.push_back(1.0 - c[0]);
  if (c.size() != n) throw UsageError(fmt::format("{}: expected {} coordinates, got {}", what, n, c.size()));
  return make_point(std::move(c));
}

// "l:i1,i2,..." with 1-based states.
CylinderSet parse_cylinder(const std::string& s, std::size_t n, const char* what) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError(fmt::format("{}: expected start:states, got '{}'", what, s));
  std::size_t start = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + colon, start);
  if (ec != std::errc() || p != s.data() + colon) throw UsageError(fmt::format("{}: bad start in '{}'", what, s));
  std::vector<std::size_t> states;
  for (double v : parse_reals(s.substr(colon + 1), what)) {
    if (v < 1 || v != std::floor(v)) throw UsageError(fmt::format("{}: states are integers >= 1", what));
    states.push_back(static_cast<std::size_t>(v) - 1);
  }
  return make_cylinder(start, std::move(states), n);
}

void emit(const Common& c, const std::string& command, const std::string& ext, const std::string& body) {
  if (c.out.empty()) {
    std::cout << body;
    return;
  }
  fs::create_directories(c.out);
  const fs::path file = fs::path(c.out) / (command + "." + ext);
  std::ofstream os(file, std::ios::binary);
  os << body;
}

void emit_json(const Common& c, const std::string& command, const std::string& sha, json config, json result) {
  emit(c, command, "json", make_envelope(command, sha, std::move(config), std::move(result)).dump(2) + "\n");
}

// CSV carries the provenance as comment lines ahead of the header.
std::string csv_preamble(const std::string& command, const std::string& sha, const json& config) {
  return fmt::format("# tool=qso version={} command={} spec_sha256={}\n# config={}\n", kToolVersion, command, sha,
                     config.dump());
}

json base_config(const Common& c) {
  json j{{"spec", c.spec}, {"format", c.format}, {"symmetrize", c.symmetrize}};
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["tol"] = c.tol ? json(*c.tol) : json(nullptr);
  j["out"] = c.out;
  return j;
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (c.format == f) return;
  }
  throw UsageError(fmt::format("format '{}' not supported by this command", c.format));
}

std::uint64_t require_seed(const Common& c) {
  if (!c.seed) throw UsageError("--seed is required for commands that sample");
  return *c.seed;
}

void add_common(CLI::App* cmd, Common& c, bool needs_spec, const std::string& default_format) {
  auto* spec = cmd->add_option("--spec", c.spec, "operator spec file (JSON)");
  if (needs_spec) spec->required();
  cmd->add_option("--seed", c.seed, "seed for sampling");
  cmd->add_option("--tol", c.tol, "primary tolerance of the command");
  cmd->add_option("--out", c.out, "output directory (default: stdout)");
  cmd->add_option("--format", c.format, "json or csv (default: " + default_format + ")")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--symmetrize", c.symmetrize, "average P(i,j,k) and P(j,i,k) on ingest");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic stochastic operators: certificates, dynamics and Markov measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common c;
  std::size_t resolution = 0, samples = 10000;
  std::string x_arg, y_arg, a_cyl, b_cyl;
  std::optional<std::size_t> steps;
  std::size_t max_iter = 10000, horizon = 5, m_max = 10, rn_m_max = 12, grid = 6;
  double dedup = 1e-6;
  std::vector<std::string> cylinders;
  std::optional<double> a, a1, a2;
  std::string den_spec;

  auto* validate = app.add_subcommand("validate", "tensor validity, necessary conditions, numeric b-order search");
  add_common(validate, c, true, "json");
  validate->add_option("--resolution", resolution, "grid resolution (default depends on n)");
  validate->add_option("--samples", samples, "random samples");

  auto* classify_cmd = app.add_subcommand("classify", "uniqueness, vertex stability and contraction checks");
  add_common(classify_cmd, c, true, "json");
  classify_cmd->add_option("--resolution", resolution, "grid resolution (default depends on n)");
  classify_cmd->add_option("--samples", samples, "random samples");

  auto* iterate_cmd = app.add_subcommand("iterate", "trajectory of a start point");
  add_common(iterate_cmd, c, true, "csv");
  iterate_cmd->add_option("--x", x_arg, "start point, comma separated")->required();
  iterate_cmd->add_option("--steps", steps, "fixed number of steps (otherwise iterate to --tol)");
  iterate_cmd->add_option("--max-iter", max_iter, "iteration cap in tolerance mode");

  auto* fixed = app.add_subcommand("fixed-points", "multistart fixed-point search");
  add_common(fixed, c, true, "json");
  fixed->add_option("--dedup-radius", dedup, "merge radius (l1)");
  fixed->add_option("--grid", grid, "seed grid resolution");

  auto* markov_cmd = app.add_subcommand("markov", "transition matrices and cylinder measures");
  add_common(markov_cmd, c, true, "json");
  markov_cmd->add_option("--x", x_arg, "initial law")->required();
  markov_cmd->add_option("--horizon", horizon, "number of one-step matrices");
  markov_cmd->add_option("--cylinder", cylinders, "cylinder as start:i1,i2,... (1-based states)");

  auto* mixing_cmd = app.add_subcommand("mixing", "mixing gaps tau_m for two thin cylinders");
  add_common(mixing_cmd, c, true, "csv");
  mixing_cmd->add_option("--x", x_arg, "initial law")->required();
  mixing_cmd->add_option("--A", a_cyl, "cylinder A as start:states")->required();
  mixing_cmd->add_option("--B", b_cyl, "cylinder B as start:states")->required();
  mixing_cmd->add_option("--m-max", m_max, "largest shift");

  auto* abscont_cmd = app.add_subcommand("abscont", "absolute-continuity series for the V_a family");
  add_common(abscont_cmd, c, false, "json");
  auto* a_opt = abscont_cmd->add_option("--a", a, "common parameter a");
  auto* a1_opt = abscont_cmd->add_option("--a1", a1, "numerator parameter");
  auto* a2_opt = abscont_cmd->add_option("--a2", a2, "denominator parameter");
  a_opt->excludes(a1_opt)->excludes(a2_opt);
  a1_opt->needs(a2_opt);
  a2_opt->needs(a1_opt);
  abscont_cmd->add_option("--x", x_arg, "numerator initial law")->required();
  abscont_cmd->add_option("--y", y_arg, "denominator initial law")->required();
  abscont_cmd->add_option("--m-max", rn_m_max, "number of series terms");
  abscont_cmd->add_option("--den-spec", den_spec, "heuristic mode: denominator operator (default: --spec)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (c.format.empty()) c.format = (*iterate_cmd || *mixing_cmd) ? "csv" : "json";

  try {
    json config = base_config(c);

    if (*validate) {
      require_format(c, {"json"});
      const auto ls = load(c.spec);
      const QsoOperator V = build_operator(ls.spec, c.symmetrize, c.tol.value_or(1e-12));
      const double eps = c.tol.value_or(1e-12);
      const std::size_t res = resolution ? resolution : default_grid_resolution(V.n());
      const NecessaryConditions nc = check_necessary_bbistochastic(V, eps);
      const BVerdict bv = verify_bbistochastic_numeric(V, res, samples, require_seed(c), eps);
      config["resolution"] = res;
      config["samples"] = samples;
      json result{{"n", V.n()}, {"valid_operator", true}, {"necessary_conditions", to_json(nc)}, {"numeric_b", to_json(bv)}};
      emit_json(c, "validate", ls.sha256, config, result);
      return nc.all_passed() && !bv.violated() ? 0 : kExitValidation;
    }

    if (*classify_cmd) {
      require_format(c, {"json"});
      const auto ls = load(c.spec);
      ClassifyOptions opts;
      opts.seed = require_seed(c);
      opts.samples = samples;
      if (resolution) opts.resolution = resolution;
      if (c.tol) opts.eps_coef = opts.eps_order = *c.tol;
      const QsoOperator V = build_operator(ls.spec, c.symmetrize, opts.eps_coef);
      config["resolution"] = opts.resolution.value_or(default_grid_resolution(V.n()));
      config["samples"] = samples;
      emit_json(c, "classify", ls.sha256, config, to_json(classify(V, opts)));
      return 0;
    }

    if (*iterate_cmd) {
      const auto ls = load(c.spec);
      const QsoOperator V = build_operator(ls.spec, c.symmetrize);
      const SimplexPoint x0 = parse_point(x_arg, V.n(), "--x");
      std::vector<SimplexPoint> path;
      bool converged = false;
      if (steps) {
        path.push_back(x0);
        for (std::size_t t = 0; t < *steps; ++t) path.push_back(evaluate(V, path.back()));
      } else {
        TrajectoryOptions to;
        to.tol = c.tol.value_or(1e-12);
        to.max_iter = max_iter;
        to.record_path = true;
        TrajectoryResult tr = trajectory(V, x0, to);
        converged = tr.converged;
        path = std::move(tr.path);
      }
      config["x"] = to_json(x0);
      config["steps"] = steps ? json(*steps) : json(nullptr);
      config["max_iter"] = max_iter;
      const std::size_t n = V.n();
      if (c.format == "csv") {
        std::string body = csv_preamble("iterate", ls.sha256, config) + "step";
        for (std::size_t i = 1; i <= n; ++i) body += fmt::format(",x_{}", i);
        for (std::size_t k = 1; k < n; ++k) body += fmt::format(",U_{}", k);
        body += ",step_l1\n";
        for (std::size_t t = 0; t < path.size(); ++t) {
          body += fmt::format("{}", t);
          for (double v : path[t].coords()) body += fmt::format(",{:.17g}", v);
          for (std::size_t k = 1; k < n; ++k) body += fmt::format(",{:.17g}", partial_sum(path[t], k));
          body += fmt::format(",{:.17g}\n", t == 0 ? 0.0 : l1_distance(path[t], path[t - 1]));
        }
        emit(c, "iterate", "csv", body);
      } else {
        json pts = json::array();
        for (const auto& p : path) pts.push_back(to_json(p));
        json result{{"path", pts}, {"limit", to_json(path.back())}, {"iterations_used", path.size() - 1}};
        if (!steps) result["converged"] = converged;
        emit_json(c, "iterate", ls.sha256, config, result);
      }
      return 0;
    }

    if (*fixed) {
      require_format(c, {"json"});
      const auto ls = load(c.spec);
      const QsoOperator V = build_operator(ls.spec, c.symmetrize);
      FixedPointOptions fo;
      fo.tol = c.tol.value_or(fo.tol);
      fo.dedup_radius = dedup;
      fo.grid_resolution = grid;
      config["dedup_radius"] = dedup;
      config["grid"] = grid;
      config["tol"] = fo.tol;
      emit_json(c, "fixed-points", ls.sha256, config, to_json(find_fixed_points(V, fo)));
      return 0;
    }

    if (*markov_cmd) {
      require_format(c, {"json"});
      const auto ls = load(c.spec);
      const QsoOperator V = build_operator(ls.spec, c.symmetrize);
      const std::size_t n = V.n();
      const SimplexPoint x0 = parse_point(x_arg, n, "--x");
      TransitionFamily fam(V, x0);
      std::vector<CylinderSet> cyl;
      for (const auto& s : cylinders) cyl.push_back(parse_cylinder(s, n, "--cylinder"));
      if (cyl.empty()) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) cyl.push_back(CylinderSet{0, {i, j}});
      }
      json laws = json::array(), mats = json::array(), logm = json::array(), meas = json::array();
      for (std::size_t k = 0; k <= horizon; ++k) laws.push_back(to_json(fam.state(k)));
      for (std::size_t k = 0; k < horizon; ++k) {
        mats.push_back(to_json(fam.transition_matrix(k)));
        logm.push_back(to_json(fam.log_transition_matrix(k)));
      }
      for (const auto& cs : cyl) {
        const double lm = log_cylinder_measure(fam, cs);
        meas.push_back({{"cylinder", to_json(cs)},
                        {"measure", cylinder_measure(fam, cs)},
                        {"log_measure", std::isfinite(lm) ? json(lm) : json(nullptr)}});
      }
      config["x"] = to_json(x0);
      config["horizon"] = horizon;
      emit_json(c, "markov", ls.sha256, config,
                {{"laws", laws}, {"transition_matrices", mats}, {"log_transition_matrices", logm}, {"cylinders", meas}});
      return 0;
    }

    if (*mixing_cmd) {
      const auto ls = load(c.spec);
      const QsoOperator V = build_operator(ls.spec, c.symmetrize);
      const SimplexPoint x0 = parse_point(x_arg, V.n(), "--x");
      TransitionFamily fam(V, x0);
      const MixingSeries s =
          mixing_series(fam, parse_cylinder(a_cyl, V.n(), "--A"), parse_cylinder(b_cyl, V.n(), "--B"), m_max);
      config["x"] = to_json(x0);
      config["A"] = to_json(s.A);
      config["B"] = to_json(s.B);
      config["m_max"] = m_max;
      if (c.format == "csv") {
        std::ostringstream os;
        os << csv_preamble("mixing", ls.sha256, config);
        write_mixing_csv(os, s);
        emit(c, "mixing", "csv", os.str());
      } else {
        emit_json(c, "mixing", ls.sha256, config, to_json(s));
      }
      return 0;
    }

    if (*abscont_cmd) {
      config["rn_m_max"] = rn_m_max;
      if (!c.spec.empty()) {
        // Exploratory mode for arbitrary operators: same numeric rule, labelled heuristic.
        require_format(c, {"json"});
        const auto ls = load(c.spec);
        const QsoOperator V = build_operator(ls.spec, c.symmetrize);
        std::string sha = ls.sha256;
        std::optional<QsoOperator> W;
        if (!den_spec.empty()) {
          const auto ld = load(den_spec);
          W = build_operator(ld.spec, c.symmetrize);
          sha += ":" + ld.sha256;
          if (W->n() != V.n()) throw UsageError("--spec and --den-spec differ in n");
        }
        const SimplexPoint x0 = parse_point(x_arg, V.n(), "--x");
        const SimplexPoint y0 = parse_point(y_arg, V.n(), "--y");
        TransitionFamily num(V, x0);
        TransitionFamily den(W ? *W : V, y0);
        config["x"] = to_json(x0);
        config["y"] = to_json(y0);
        config["den_spec"] = den_spec;
        emit_json(c, "abscont", sha, config, to_json(rn_series_heuristic(num, den, rn_m_max)));
        return 0;
      }
      if (!a && !a1) throw UsageError("abscont needs --a, or --a1 with --a2, or --spec");
      const double an = a ? *a : *a1;
      const double ad = a ? *a : *a2;
      const SimplexPoint px = parse_point(x_arg, 2, "--x");
      const SimplexPoint py = parse_point(y_arg, 2, "--y");
      const VaParams num = make_va_params(an, px[0]);
      const VaParams den = make_va_params(ad, py[0]);
      OperatorSpec sn, sd;
      sn.n = sd.n = 2;
      sn.va = an;
      sd.va = ad;
      const std::string sha = sha256_hex(serialize_spec(sn) + serialize_spec(sd));
      config["a1"] = an;
      config["a2"] = ad;
      config["x"] = to_json(px);
      config["y"] = to_json(py);
      const RNSeriesReport r = rn_series(num, den, rn_m_max, an != ad);
      if (c.format == "csv") {
        std::ostringstream os;
        os << csv_preamble("abscont", sha, config);
        write_rn_csv(os, r);
        emit(c, "abscont", "csv", os.str());
        return 0;
      }
      json result = to_json(r);
      json checks = json::array();
      std::vector<CylinderClass> classes;
      for (std::size_t l = 0; l <= 2; ++l) {
        for (std::size_t m = l; m <= l + 2; ++m) {
          classes.push_back(CylinderClass::all_ones(l, m));
          classes.push_back(CylinderClass::all_twos(l, m));
          for (std::size_t k = l; k < m; ++k) classes.push_back(CylinderClass::ones_then_twos(l, m, k));
        }
        classes.push_back(CylinderClass::two_one(l));
      }
      for (const auto& cc : classes) {
        const CylinderValue v = va_cylinder_closed_form(num, cc);
        const RatioZ z = rn_ratio_z(num, den, cc, an != ad);
        checks.push_back({{"class", cc.label()},
                          {"measure", v.value},
                          {"printed_formula", v.printed},
                          {"discrepancies", v.discrepancies},
                          {"z", std::isfinite(z.value) ? json(z.value) : json(nullptr)},
                          {"singular_witness", z.singular_witness}});
      }
      result["cylinder_checks"] = std::move(checks);
      emit_json(c, "abscont", sha, config, result);
      return 0;
    }
  } catch (const SpecParseError& e) {
    json err{{"error", "parse_error"}, {"path", e.path()}, {"message", e.detail()}, {"pointer", e.pointer()}};
    err["line"] = e.line() ? json(*e.line()) : json(nullptr);
    std::cerr << err.dump() << "\n";
    return kExitParse;
  } catch (const UsageError& e) {
    std::cerr << json{{"error", "usage_error"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "validation_error"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal_error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
