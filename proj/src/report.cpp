#include "qso/report.hpp"

#include <cmath>

#include "qso/spec_file.hpp"

namespace qso {

using nlohmann::json;

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json condition(const ConditionResult& c) {
  json j{{"passed", c.passed}, {"value", real(c.value)}};
  j["witness"] = c.witness ? json(*c.witness) : json(nullptr);
  return j;
}

json verdict(const RNStateVerdict& s) {
  return {{"state", s.state}, {"classification", to_string(s.classification)}, {"deciding", s.deciding},
          {"tail", real(s.tail)}};
}

}  // namespace

json to_json(const SimplexPoint& x) {
  json a = json::array();
  for (double v : x.coords()) a.push_back(v);
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(real(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const NecessaryConditions& c) {
  return {{"cumulative_mass", condition(c.cumulative_mass)},
          {"upper_zero", condition(c.upper_zero)},
          {"last_absorbing", condition(c.last_absorbing)},
          {"half_bound", condition(c.half_bound)},
          {"all_passed", c.all_passed()}};
}

json to_json(const BVerdict& v) {
  json j{{"resolution", v.resolution}, {"sample_count", v.sample_count}, {"seed", v.seed}};
  if (v.violation) {
    j["verdict"] = "violated";
    j["witness"] = {{"point", to_json(v.violation->point)}, {"k", v.violation->k}, {"gap", v.violation->gap}};
  } else {
    j["verdict"] = "no_violation_found";
  }
  return j;
}

json to_json(const UniquenessReport& u) {
  json vs = json::array();
  for (const auto& v : u.violations) {
    vs.push_back({{"k", v.k}, {"j", v.j}, {"value", v.value}, {"status", to_string(v.status)}});
  }
  return {{"met", u.met}, {"violations", vs}};
}

json to_json(const VertexStabilityReport& v) {
  return {{"verdict", to_string(v.verdict)}, {"eigenvalues", v.eigenvalues}};
}

json to_json(const ContractionReport& c) {
  return {{"modulus", c.modulus},
          {"is_strict", c.is_strict()},
          {"status", to_string(c.strict)},
          {"argmax_triple", c.argmax_triple}};
}

json to_json(const ClassificationReport& r) {
  json j{{"necessary_conditions", to_json(r.necessary)},
         {"numeric_b", to_json(r.numeric_b)},
         {"uniqueness_conditions", to_json(r.uniqueness)},
         {"uniqueness_conditions_met", r.uniqueness.met},
         {"vertex_stability", to_json(r.vertex)},
         {"contraction", to_json(r.contraction)}};
  if (r.contraction_1d) {
    j["contraction_1d"] = {{"max_quantity", r.contraction_1d->max_quantity},
                           {"is_strict", r.contraction_1d->is_strict()},
                           {"status", to_string(r.contraction_1d->strict)}};
  }
  if (r.contraction_2d) {
    json q = json::object();
    for (std::size_t t = 0; t < 9; ++t) q[std::string(1, static_cast<char>('a' + t))] = r.contraction_2d->quantities[t];
    j["contraction_2d"] = {{"quantities", q},
                           {"max_quantity", r.contraction_2d->max_quantity},
                           {"which", std::string(1, r.contraction_2d->which)},
                           {"is_strict", r.contraction_2d->is_strict()},
                           {"status", to_string(r.contraction_2d->strict)}};
  }
  return j;
}

json to_json(const FixedPointSet& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back({{"point", to_json(p.point)}, {"residual", p.residual}});
  return {{"points", pts}, {"count", s.points.size()}, {"dedup_radius", s.dedup_radius}};
}

json to_json(const CylinderSet& c) {
  json st = json::array();
  for (auto s : c.states) st.push_back(s + 1);
  return {{"start", c.start}, {"end", c.end()}, {"states", st}};
}

json to_json(const MixingSeries& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back({{"m", t.m}, {"tau_m", real(t.tau)}, {"bound_m", real(t.bound)}});
  return {{"A", to_json(s.A)}, {"B", to_json(s.B)}, {"terms", terms}, {"numerically_mixing", s.numerically_mixing}};
}

json to_json(const RNSeriesReport& r) {
  json terms = json::array();
  for (const auto& t : r.terms) {
    terms.push_back({{"m", t.m},
                     {"K_term", real(t.K_term)},
                     {"K_hat_term", real(t.K_hat_term)},
                     {"partial_sum", real(t.partial_sum)},
                     {"occupation", real(t.occupation)}});
  }
  json states = json::array();
  for (const auto& s : r.states) states.push_back(verdict(s));
  return {{"direction",
           {{"numerator", {{"a", r.num.a}, {"x", to_json(r.num.x)}}},
            {"denominator", {{"a", r.den.a}, {"x", to_json(r.den.x)}}}}},
          {"terms", terms},
          {"classification", to_string(r.classification)},
          {"tail_term", real(r.tail_term)},
          {"states", states},
          {"log_alpha_min", real(r.log_alpha_min)},
          {"log_alpha_max", real(r.log_alpha_max)},
          {"exceptional_set_note", r.exceptional_set_note}};
}

json to_json(const HeuristicRNReport& r) {
  json terms = json::array();
  for (const auto& t : r.terms) {
    json g = json::array(), occ = json::array();
    for (double v : t.g) g.push_back(real(v));
    for (double v : t.occupation) occ.push_back(real(v));
    terms.push_back({{"m", t.m}, {"g", g}, {"occupation", occ}, {"partial_sum", real(t.partial_sum)}});
  }
  json states = json::array();
  for (const auto& s : r.states) states.push_back(verdict(s));
  return {{"heuristic", true},
          {"terms", terms},
          {"states", states},
          {"classification", to_string(r.classification)},
          {"tail_term", real(r.tail_term)}};
}

json make_envelope(const std::string& command, const std::string& spec_sha256, json config, json result) {
  return {{"tool", "qso"},
          {"version", kToolVersion},
          {"command", command},
          {"spec_sha256", spec_sha256},
          {"config", std::move(config)},
          {"result", std::move(result)}};
}

}  // namespace qso
