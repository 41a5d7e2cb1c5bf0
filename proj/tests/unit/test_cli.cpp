#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bklab/cli.hpp"
#include "bklab/report.hpp"

using namespace bklab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bklab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) { return std::string(BKLAB_TEST_TMPDIR) + "/" + name; }

}  // namespace

TEST(Cli, BellmanMatchesModule) {
  const auto r = run({"bellman", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto p = BellmanParams::make(0.5, 1.0, 0.8, 1.2);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("value").get<double>(), bellman_value(p));
  EXPECT_EQ(j.at("c").get<double>(), p.c);
  EXPECT_EQ(j.at("tau").get<double>(), tau_target(p));
  EXPECT_EQ(j.at("k0").get<double>(), *k0_of(p));
}

TEST(Cli, MaximalIsAThinAdapter) {
  const auto r = run({"maximal", "--leaves", "3,1,2,0"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto phi = StepFunctionD::from_leaves(2, 2, {3.0, 1.0, 2.0, 0.0});
  EXPECT_EQ(r.out, canonical_json({{"m", 2}, {"maximal", to_json(maximal_function(phi))}}));

  const auto q = run({"linearize", "--leaves", "3,1,2,0", "--rational"});
  ASSERT_EQ(q.code, cli::kOk) << q.err;
  const auto rphi =
      StepFunctionQ::from_leaves(2, 2, {Rational(3), Rational(1), Rational(2), Rational(0)});
  EXPECT_EQ(q.out, canonical_json(to_json(linearize(rphi))));
}

TEST(Cli, SearchIsAThinAdapter) {
  const auto r = run({"search", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2", "--N", "3",
                      "--seed", "4", "--budget", "500", "--restarts", "2", "--threads", "1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  SearchOptions o;
  o.restarts = 2;
  o.threads = 1;
  const auto rep =
      local_search(BellmanParams::make(0.5, 1.0, 0.8, 1.2), TreeSpec::make(2, 3), 4, 500, o);
  EXPECT_EQ(r.out, canonical_json(to_json(rep)));
}

TEST(Cli, ResidualAndGphiFromFile) {
  const auto phi = StepFunctionD::from_leaves(2, 2, {4.0, 0.0, 1.0, 3.0});
  const auto path = tmp_path("cli_phi.json");
  write_text(path, canonical_json(to_json(phi)));

  const auto g = run({"gphi", "--phi", path, "--q", "0.5", "--L", "2"});
  ASSERT_EQ(g.code, cli::kOk) << g.err;
  EXPECT_EQ(g.out, canonical_json(to_json(g_phi(phi, 2.0, 0.5))));

  const auto r = run({"residual", "--phi", path, "--q", "0.5", "--L", "2.5"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto mom = moments(phi, 0.5);
  const auto p = BellmanParams::make(0.5, mom.mass, mom.q_mass, 2.5);
  EXPECT_EQ(Json::parse(r.out).at("total").get<double>(), eigen_residual(phi, 2.5, p).total);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = tmp_path("cli_bellman.ini");
  write_text(cfg, "q = 0.5\nf = 1\nh = 0.8\nL = 1.2\n");
  const auto from_file = run({"bellman", "--config", cfg});
  ASSERT_EQ(from_file.code, cli::kOk) << from_file.err;
  EXPECT_EQ(Json::parse(from_file.out).at("value").get<double>(),
            bellman_value(BellmanParams::make(0.5, 1.0, 0.8, 1.2)));

  const auto overridden = run({"bellman", "--config", cfg, "--L", "1.5"});
  ASSERT_EQ(overridden.code, cli::kOk) << overridden.err;
  EXPECT_EQ(Json::parse(overridden.out).at("value").get<double>(),
            bellman_value(BellmanParams::make(0.5, 1.0, 0.8, 1.5)));
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = tmp_path("cli_out.json");
  const auto r = run({"bellman", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2", "--out", path});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_text(path), run({"bellman", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2"}).out);
}

TEST(Cli, StudyCsv) {
  const auto r = run({"study", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2", "--depths",
                      "2,3", "--budget", "200", "--restarts", "1", "--format", "csv"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.rfind("N,objective,bound,gap,residual,k,B_over_k\n", 0), 0u);
}

TEST(Cli, VerifyReportsCleanRun) {
  const auto csv = tmp_path("cli_rows.csv");
  const auto r = run({"verify", "--suite", "inequalities", "--n", "5", "--depth", "3", "--csv", csv});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("violations").get<int>(), 0);
  EXPECT_EQ(read_text(csv).rfind("inequality,phi_id,family_id,beta,lhs,rhs,slack\n", 0), 0u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"bellman", "--q", "abc"}).code, cli::kUsage);
  EXPECT_EQ(run({"bellman", "--help"}).code, cli::kOk);
  // h > f^q
  EXPECT_EQ(run({"bellman", "--q", "0.5", "--f", "1", "--h", "2", "--L", "1.2"}).code, cli::kDomain);
  EXPECT_EQ(run({"bellman", "--q", "0.9999", "--f", "1", "--h", "0.8", "--L", "1.2"}).code,
            cli::kDomain);
  EXPECT_EQ(run({"maximal", "--leaves", "1,2,3"}).code, cli::kDomain);
  EXPECT_EQ(run({"maximal", "--leaves", "1,x"}).code, cli::kDomain);
  EXPECT_EQ(run({"maximal", "--phi", "/nonexistent/phi.json"}).code, cli::kIo);

  const auto bad = tmp_path("cli_bad.json");
  write_text(bad, "{ not json");
  EXPECT_EQ(run({"maximal", "--phi", bad}).code, cli::kDomain);

  const auto r = run({"search", "--q", "0.5", "--f", "1", "--h", "0.8", "--L", "1.2", "--N", "6",
                      "--method", "brute"});
  EXPECT_EQ(r.code, cli::kDomain);
  EXPECT_NE(r.err.find("bklab:"), std::string::npos);
}
