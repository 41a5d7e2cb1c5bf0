#include "bklab/cli.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bklab/dyadic.hpp"
#include "bklab/kernel.hpp"
#include "bklab/report.hpp"
#include "bklab/search.hpp"
#include "bklab/transforms.hpp"
#include "bklab/verify.hpp"

namespace bklab::cli {

namespace {

constexpr double kMinQ = 1e-3;
constexpr double kMaxQ = 1.0 - 1e-3;

struct ParamFlags {
  double q = 0.5;
  double f = 1.0;
  double h = 1.0;
  double L = 1.0;
};

struct InputFlags {
  std::string phi_path;
  std::string leaves;
  int m = 2;
  bool rational = false;
};

// Fills options not given on the command line from a key = value file.
// Keys are flag names without dashes, optionally under a [subcommand] section.
// (CLI11's own set_config does not apply to subcommands.)
void apply_config(CLI::App* sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError&) {
    throw IoError("cannot read config file '" + path + "'");
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub->get_name()}) continue;
    if (item.name == "config" || item.name == "help") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw DomainError("config file: unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_q(CLI::App* sub, double& q) {
  sub->add_option("--q", q, "Exponent q in [0.001, 0.999]");
}

void add_params(CLI::App* sub, ParamFlags& p) {
  add_q(sub, p.q);
  sub->add_option("--f", p.f, "First moment int phi");
  sub->add_option("--h", p.h, "q-moment int phi^q");
  sub->add_option("--L,--big-l", p.L, "Threshold L >= f");
}

void add_input(CLI::App* sub, InputFlags& in) {
  auto* file = sub->add_option("--phi", in.phi_path, "Step function JSON file");
  auto* leaves = sub->add_option("--leaves", in.leaves, "Comma-separated leaf values (m^N of them)");
  file->excludes(leaves);
  sub->add_option("--m", in.m, "Tree branching")->check(CLI::Range(2, 64));
}

void check_q(double q) {
  if (!(q >= kMinQ && q <= kMaxQ)) {
    throw DomainError("--q must lie in [0.001, 0.999]");
  }
}

BellmanParams make_params(const ParamFlags& p) {
  check_q(p.q);
  return BellmanParams::make(p.q, p.f, p.h, p.L);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto a = tok.find_first_not_of(" \t");
    const auto b = tok.find_last_not_of(" \t");
    if (a == std::string::npos) throw DomainError("--leaves has an empty entry");
    out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

int depth_for_count(int m, std::size_t count) {
  std::size_t p = 1;
  int d = 0;
  while (p < count) {
    p *= static_cast<std::size_t>(m);
    ++d;
  }
  if (p != count) throw DomainError("--leaves needs m^N values for some N");
  return d;
}

StepFunctionQ load_rational(const InputFlags& in) {
  if (!in.phi_path.empty()) {
    return rational_step_function_from_json(Json::parse(read_text(in.phi_path)), in.m);
  }
  if (in.leaves.empty()) throw DomainError("one of --phi or --leaves is required");
  std::vector<Rational> values;
  for (const auto& t : split_commas(in.leaves)) values.push_back(parse_rational(t));
  const int d = depth_for_count(in.m, values.size());
  return StepFunctionQ::from_leaves(in.m, d, std::move(values));
}

StepFunctionD load_double(const InputFlags& in) {
  if (!in.phi_path.empty()) {
    return step_function_from_json(Json::parse(read_text(in.phi_path)), in.m);
  }
  if (in.leaves.empty()) throw DomainError("one of --phi or --leaves is required");
  std::vector<double> values;
  for (const auto& t : split_commas(in.leaves)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw DomainError("--leaves entry '" + t + "' is not a number");
    values.push_back(v);
  }
  const int d = depth_for_count(in.m, values.size());
  return StepFunctionD::from_leaves(in.m, d, std::move(values));
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bellman function of the tree maximal operator for Kolmogorov's inequality"};
  app.name("bklab");
  app.require_subcommand(1);
  // -h would collide with the q-moment flag --h.
  app.set_help_flag("--help", "Print this help message and exit");

  std::string out_path;
  std::function<std::string()> run;
  int status = kOk;

  // bellman
  ParamFlags bp;
  auto* bellman = app.add_subcommand("bellman", "Bellman value h*c with c, tau and k0");
  add_params(bellman, bp);
  bellman->callback([&] {
    run = [&] {
      const auto p = make_params(bp);
      const auto k = k0_of(p);
      Json j = {{"value", bellman_value(p)},
                {"c", p.c},
                {"tau", tau_target(p)},
                {"k0", k ? Json(*k) : Json(nullptr)}};
      return canonical_json(j);
    };
  });

  // maximal
  InputFlags mi;
  auto* maximal = app.add_subcommand("maximal", "Tree maximal function of a step function");
  add_input(maximal, mi);
  maximal->add_flag("--rational", mi.rational, "Exact rational arithmetic");
  maximal->callback([&] {
    run = [&] {
      if (mi.rational) {
        const auto phi = load_rational(mi);
        return canonical_json({{"m", phi.branching()}, {"maximal", to_json(maximal_function(phi))}});
      }
      const auto phi = load_double(mi);
      return canonical_json({{"m", phi.branching()}, {"maximal", to_json(maximal_function(phi))}});
    };
  });

  // linearize
  InputFlags li;
  auto* linearize_cmd = app.add_subcommand("linearize", "S_phi, A(phi, I), averages and weights");
  add_input(linearize_cmd, li);
  linearize_cmd->add_flag("--rational", li.rational, "Exact rational arithmetic");
  linearize_cmd->callback([&] {
    run = [&] {
      if (li.rational) return canonical_json(to_json(linearize(load_rational(li))));
      return canonical_json(to_json(linearize(load_double(li))));
    };
  });

  // gphi
  InputFlags gi;
  double gq = 0.5;
  double gL = 1.0;
  int refine = -1;
  auto* gphi = app.add_subcommand("gphi", "Two-valued transform g_phi on the excess set");
  add_input(gphi, gi);
  add_q(gphi, gq);
  gphi->add_option("--L,--big-l", gL, "Threshold L");
  gphi->add_option("--refine", refine, "Support grid depth (default: deepest with m^depth <= 2^50)");
  gphi->callback([&] {
    run = [&] {
      check_q(gq);
      const auto phi = load_double(gi);
      if (gL < phi.integral()) throw DomainError("--L must be at least int phi");
      GPhiOptions opts;
      opts.refine = refine;
      return canonical_json(to_json(g_phi(phi, gL, gq, opts)));
    };
  });

  // verify
  std::string suite = "inequalities";
  SuiteOptions vo;
  std::string csv_path;
  auto* verify = app.add_subcommand("verify", "Randomized checks of inequalities and identities");
  verify->add_option("--suite", suite, "inequalities, kernel, linearization, gphi or all")
      ->check(CLI::IsMember({"inequalities", "kernel", "linearization", "gphi", "all"}));
  verify->add_option("--n", vo.count, "Number of random cases")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vo.seed, "Random seed");
  verify->add_option("--m", vo.m, "Tree branching")->check(CLI::Range(2, 16));
  verify->add_option("--depth", vo.depth, "Tree depth of the random functions")->check(CLI::Range(1, 12));
  verify->add_option("--csv", csv_path, "Write inequality rows (phi_id, family_id, beta, lhs, rhs, slack)");
  verify->callback([&] {
    run = [&] {
      std::vector<GapRow> rows;
      if (!csv_path.empty()) vo.rows = &rows;
      std::vector<std::string> names;
      if (suite == "all") {
        names = {"kernel", "linearization", "inequalities", "gphi"};
      } else {
        names = {suite};
      }
      Json suites = Json::array();
      std::int64_t violations = 0;
      for (const auto& name : names) {
        auto opts = vo;
        if (name == "linearization" && suite == "all") opts.depth = std::min(opts.depth, 5);
        const auto s = run_suite(name, opts);
        violations += s.violations;
        suites.push_back(to_json(s));
      }
      if (!csv_path.empty()) write_text(csv_path, gap_rows_csv(rows));
      if (violations > 0) status = kViolations;
      return canonical_json({{"suites", suites}, {"violations", violations}, {"seed", vo.seed}});
    };
  });

  // search
  ParamFlags sp;
  int sm = 2;
  int sN = 8;
  std::uint64_t sseed = 1;
  std::int64_t budget = 200000;
  SearchOptions so;
  std::string method = "local";
  OracleOptions oo;
  auto* search = app.add_subcommand("search", "Maximize int max(M phi, L)^q under the moment constraints");
  add_params(search, sp);
  search->add_option("--m", sm, "Tree branching")->check(CLI::Range(2, 64));
  search->add_option("--N", sN, "Tree depth")->check(CLI::Range(1, 24));
  search->add_option("--seed", sseed, "Random seed");
  search->add_option("--budget", budget, "Proposed moves per restart")->check(CLI::PositiveNumber);
  search->add_option("--restarts", so.restarts, "Independent restarts")->check(CLI::PositiveNumber);
  search->add_option("--threads", so.threads, "Worker threads (default BKLAB_THREADS or all cores)");
  search->add_option("--method", method, "local or brute")->check(CLI::IsMember({"local", "brute"}));
  search->add_option("--grid", oo.grid_size, "Brute force: number of grid values");
  search->add_option("--ratio", oo.ratio, "Brute force: geometric grid ratio");
  search->callback([&] {
    run = [&] {
      const auto p = make_params(sp);
      const auto tree = TreeSpec::make(sm, sN);
      if (method == "brute") return canonical_json(to_json(brute_force_oracle(p, tree, oo)));
      return canonical_json(to_json(local_search(p, tree, sseed, budget, so)));
    };
  });

  // study
  ParamFlags stp;
  int stm = 2;
  std::vector<int> depths{4, 6, 8};
  std::uint64_t stseed = 1;
  std::int64_t stbudget = 200000;
  SearchOptions sto;
  std::string format = "json";
  auto* study = app.add_subcommand("study", "Search at increasing depths and tabulate the trend");
  add_params(study, stp);
  study->add_option("--m", stm, "Tree branching")->check(CLI::Range(2, 64));
  study->add_option("--depths", depths, "Ascending depths, comma separated")->delimiter(',');
  study->add_option("--seed", stseed, "Random seed");
  study->add_option("--budget", stbudget, "Proposed moves per restart")->check(CLI::PositiveNumber);
  study->add_option("--restarts", sto.restarts, "Independent restarts")->check(CLI::PositiveNumber);
  study->add_option("--threads", sto.threads, "Worker threads");
  study->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  study->callback([&] {
    run = [&] {
      const auto p = make_params(stp);
      const auto s = convergence_study(p, stm, depths, stseed, stbudget, sto);
      return format == "csv" ? study_csv(s) : canonical_json(to_json(s));
    };
  });

  // residual
  InputFlags ri;
  double rq = 0.5;
  double rL = 1.0;
  auto* residual = app.add_subcommand("residual",
                                      "Eigenfunction residual int |max(M phi, L) - c^(1/q) phi|^q");
  add_input(residual, ri);
  add_q(residual, rq);
  residual->add_option("--L,--big-l", rL, "Threshold L");
  residual->callback([&] {
    run = [&] {
      check_q(rq);
      const auto phi = load_double(ri);
      const auto mom = moments(phi, rq);
      const auto p = BellmanParams::make(rq, mom.mass, mom.q_mass, rL);
      Json j = to_json(eigen_residual(phi, rL, p));
      j["params"] = to_json(p);
      j["objective"] = objective(phi, rL, rq);
      j["bound"] = bellman_value(p);
      return canonical_json(j);
    };
  });

  std::string config_path;
  for (auto* sub : {bellman, maximal, linearize_cmd, gphi, verify, search, study, residual}) {
    sub->add_option("--out", out_path, "Write the report here instead of stdout");
    sub->add_option("--config", config_path,
                    "Read options from a key = value file; flags override it");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (!config_path.empty()) {
      try {
        apply_config(app.get_subcommands().front(), config_path);
      } catch (const CLI::Error& e) {
        err << "bklab: config file: " << e.what() << "\n";
        return kUsage;
      }
    }
    const std::string text = run();
    if (out_path.empty()) {
      out << text;
    } else {
      write_text(out_path, text);
    }
    return status;
  } catch (const IoError& e) {
    err << "bklab: " << e.what() << "\n";
    return kIo;
  } catch (const Json::exception& e) {
    err << "bklab: malformed JSON input: " << e.what() << "\n";
    return kDomain;
  } catch (const DomainError& e) {
    err << "bklab: " << e.what() << "\n";
    return kDomain;
  } catch (const NumericalError& e) {
    err << "bklab: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace bklab::cli
