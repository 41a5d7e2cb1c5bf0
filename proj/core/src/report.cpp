#include "bklab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bklab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void emit(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(it.value(), depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(v, depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

template <typename T, typename ValueFn>
Json pieces_json(const StepFunction<T>& phi, ValueFn&& value) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < phi.piece_count(); ++i) {
    arr.push_back({{"start", to_json(phi.cut_point(i))},
                   {"end", to_json(phi.cut_point(i + 1))},
                   {"value", value(phi.values()[i])}});
  }
  return arr;
}

template <typename T, typename ValueFn>
Json linearization_json(const Linearization<T>& lin, ValueFn&& value) {
  Json elements = Json::array();
  for (const auto& e : lin.elements) {
    elements.push_back({{"node", to_json(e.node)},
                        {"average", value(e.average)},
                        {"alpha", value(e.alpha)},
                        {"star", e.star < 0 ? Json(nullptr)
                                            : to_json(lin.elements[static_cast<std::size_t>(e.star)].node)}});
  }
  Json cells = Json::array();
  for (std::size_t i = 0; i < lin.cells.size(); ++i) {
    const auto& c = lin.cells[i];
    cells.push_back({{"node", to_json(c.node)},
                     {"value", value(c.value)},
                     {"maximal", value(c.maximal)},
                     {"owner", to_json(lin.elements[static_cast<std::size_t>(lin.owner[i])].node)}});
  }
  return {{"m", lin.m}, {"elements", elements}, {"cells", cells}};
}

template <typename T, typename ValueFn>
StepFunction<T> pieces_from_json(const Json& j, int m, ValueFn&& value) {
  try {
    const Json* pieces = &j;
    if (j.is_object()) {
      if (j.contains("m")) m = j.at("m").get<int>();
      pieces = &j.at("pieces");
    }
    if (!pieces->is_array() || pieces->empty()) {
      throw DomainError("step function JSON must be a nonempty array of pieces");
    }
    int R = 0;
    for (const auto& p : *pieces) {
      R = std::max({R, p.at("start").at("den_pow").get<int>(), p.at("end").at("den_pow").get<int>()});
    }
    auto units = [&](const Json& pt) {
      const int d = pt.at("den_pow").get<int>();
      if (d < 0) throw DomainError("negative den_pow in step function JSON");
      return pt.at("num").get<std::int64_t>() * checked_power(m, R - d);
    };
    std::vector<std::int64_t> cuts{units(pieces->front().at("start"))};
    std::vector<T> values;
    for (const auto& p : *pieces) {
      if (units(p.at("start")) != cuts.back()) throw DomainError("step function pieces are not contiguous");
      cuts.push_back(units(p.at("end")));
      values.push_back(value(p.at("value")));
    }
    return StepFunction<T>(m, R, std::move(cuts), std::move(values));
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed step function JSON: ") + e.what());
  }
}

}  // namespace

std::string canonical_json(const Json& j) {
  std::string out;
  emit(j, 0, out);
  out += "\n";
  return out;
}

Rational parse_rational(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    const boost::multiprecision::cpp_int num(s.substr(0, slash));
    const boost::multiprecision::cpp_int den(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw DomainError("cannot parse rational '" + s + "'");
  }
}

std::string format_rational(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

Json to_json(const Node& n) { return {{"depth", n.depth}, {"index", n.index}}; }

Json to_json(const DyadicPoint& p) { return {{"num", p.num}, {"den_pow", p.den_pow}}; }

Json to_json(const BellmanParams& p) {
  return {{"q", p.q}, {"f", p.f}, {"h", p.h}, {"L", p.L},
          {"lambda", p.lambda}, {"mu", p.mu}, {"c", p.c}};
}

Json to_json(const InequalityGap& g) {
  return {{"lhs", g.lhs}, {"rhs", g.rhs}, {"beta", g.beta}, {"slack", g.slack}};
}

Json to_json(const EigenResidual& r) {
  return {{"total", r.total}, {"on_excess", r.on_excess}, {"off_excess", r.off_excess}};
}

Json to_json(const ExcessSet& e) {
  Json nodes = Json::array();
  for (const auto& n : e.elements) nodes.push_back(to_json(n));
  return {{"elements", nodes}, {"k", e.k}, {"A", e.A}, {"B", e.B}};
}

Json to_json(const Moments& m) { return {{"mass", m.mass}, {"q_mass", m.q_mass}}; }

Json to_json(const StepFunctionD& phi) {
  return pieces_json(phi, [](double v) { return Json(v); });
}

Json to_json(const StepFunctionQ& phi) {
  return pieces_json(phi, [](const Rational& v) { return Json(format_rational(v)); });
}

Json to_json(const Linearization<double>& lin) {
  return linearization_json(lin, [](double v) { return Json(v); });
}

Json to_json(const Linearization<Rational>& lin) {
  return linearization_json(lin, [](const Rational& v) { return Json(format_rational(v)); });
}

Json to_json(const SearchReport& r) {
  return {{"params", to_json(r.params)},
          {"m", r.m},
          {"N", r.depth},
          {"best_phi", to_json(r.best_phi)},
          {"objective", r.objective},
          {"bound", r.bound},
          {"gap", r.gap},
          {"gap_ratio", r.gap_ratio},
          {"residual", to_json(r.residual)},
          {"excess", {{"k", r.k}, {"A", r.A}, {"B", r.B}}},
          {"moments", to_json(r.moments)},
          {"iterations", r.iterations},
          {"accepted", r.accepted},
          {"seed", r.seed},
          {"best_restart", r.best_restart}};
}

Json to_json(const StudyResult& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"N", r.depth}, {"objective", r.objective}, {"bound", r.bound},
                    {"gap", r.gap}, {"residual", r.residual}, {"k", r.k},
                    {"B_over_k", r.b_over_k}});
  }
  Json reports = Json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  return {{"rows", rows},
          {"reports", reports},
          {"k0", s.k0 ? Json(*s.k0) : Json(nullptr)},
          {"L", s.L},
          {"gap_nonincreasing", s.gap_nonincreasing},
          {"residual_nonincreasing", s.residual_nonincreasing},
          {"gap_strictly_nonincreasing", s.gap_strictly_nonincreasing},
          {"residual_strictly_nonincreasing", s.residual_strictly_nonincreasing}};
}

Json to_json(const SuiteSummary& s) {
  return {{"suite", s.suite},
          {"cases", s.cases},
          {"checks", s.checks},
          {"violations", s.violations},
          {"worst_slack", s.worst_slack},
          {"messages", s.messages}};
}

Json to_json(const GPhiResult& g) {
  Json recs = Json::array();
  for (const auto& r : g.records) {
    Json support = Json::array();
    for (const auto& [a, b] : r.support) {
      support.push_back({{"start", to_json(reduce_point(g.g.branching(), a, g.resolution))},
                         {"end", to_json(reduce_point(g.g.branching(), b, g.resolution))}});
    }
    recs.push_back({{"element", to_json(r.element)},
                    {"c", r.c},
                    {"gamma", r.gamma},
                    {"alpha", r.alpha},
                    {"mass", r.mass},
                    {"q_mass", r.q_mass},
                    {"support", support},
                    {"atom_masses_exact", r.atom_masses_exact}});
  }
  return {{"m", g.g.branching()}, {"g", to_json(g.g)}, {"records", recs}, {"refine", g.resolution}};
}

StepFunctionD step_function_from_json(const Json& j, int m) {
  return pieces_from_json<double>(j, m, [](const Json& v) {
    if (v.is_string()) return static_cast<double>(parse_rational(v.get<std::string>()));
    return v.get<double>();
  });
}

StepFunctionQ rational_step_function_from_json(const Json& j, int m) {
  return pieces_from_json<Rational>(j, m, [](const Json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    return Rational(v.get<double>());
  });
}

std::string study_csv(const StudyResult& s) {
  std::string out = "N,objective,bound,gap,residual,k,B_over_k\n";
  for (const auto& r : s.rows) {
    out += std::to_string(r.depth) + "," + format_double(r.objective) + "," +
           format_double(r.bound) + "," + format_double(r.gap) + "," +
           format_double(r.residual) + "," + format_double(r.k) + "," +
           format_double(r.b_over_k) + "\n";
  }
  return out;
}

std::string gap_rows_csv(const std::vector<GapRow>& rows) {
  std::string out = "inequality,phi_id,family_id,beta,lhs,rhs,slack\n";
  for (const auto& r : rows) {
    out += r.inequality + "," + std::to_string(r.phi_id) + "," + std::to_string(r.family_id) +
           "," + format_double(r.beta) + "," + format_double(r.lhs) + "," +
           format_double(r.rhs) + "," + format_double(r.slack) + "\n";
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace bklab
