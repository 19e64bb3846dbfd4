#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "saddleflow/builtins.hpp"
#include "saddleflow/cli.hpp"
#include "saddleflow/errors.hpp"
#include "saddleflow/integrate.hpp"

using namespace saddleflow;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "saddleflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "saddleflow-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return {};
}

}  // namespace

TEST_CASE("exit codes") {
  SUBCASE("regularized bilinear converges") {
    const fs::path out = scratch("reg");
    const auto r = invoke({"run", "--problem", "bilinear", "--flow", "regularized", "--out", out});
    CHECK(r.code == cli::kExitConverged);
    const std::string rep = slurp(out.string() + ".report.txt");
    CHECK(report_value(rep, "stop") == "converged");
    std::istringstream h(report_value(rep, "final_h"));
    double h1 = 1, h2 = 1;
    h >> h1 >> h2;
    CHECK(h1 <= 1e-8);
    CHECK(h2 <= 1e-8);
    CHECK(fs::exists(out.string() + ".trajectory.csv"));
  }
  SUBCASE("plain bilinear reaches the horizon") {
    const fs::path out = scratch("plain");
    const auto r = invoke({"run", "--problem", "bilinear", "--flow", "plain", "--t-max", "100",
                           "--out", out});
    CHECK(r.code == cli::kExitHorizon);
    // a report is written even without convergence
    CHECK(report_value(slurp(out.string() + ".report.txt"), "stop") == "horizon-reached");
  }
  SUBCASE("unbounded LP diverges") {
    const fs::path lp = scratch("unbounded.lp");
    std::ofstream(lp) << "1 1\n-1\n-1 0\n";
    const fs::path out = scratch("unb");
    const auto r = invoke({"solve-lp", "--problem", "lp:" + lp.string(), "--t-max", "200",
                           "--out", out});
    CHECK(r.code == cli::kExitDiverged);
  }
  SUBCASE("usage errors") {
    CHECK(invoke({"run", "--problem", "nope", "--out", scratch("x")}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--flow", "sideways", "--out", scratch("x")}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--rho", "-1", "--out", scratch("x")}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--scheme", "leapfrog", "--out", scratch("x")}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--dt", "0", "--out", scratch("x")}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--bogus"}).code == cli::kExitUsage);
    // agent rounds need an LP
    const auto p = invoke({"run", "--problem", "quadratic", "--flow", "distributed", "--out",
                           scratch("x")});
    CHECK(p.code == cli::kExitUsage);
    CHECK(p.err.find("--flow") != std::string::npos);
    // solve-lp needs an LP
    CHECK(invoke({"solve-lp", "--problem", "bilinear", "--out", scratch("x")}).code ==
          cli::kExitUsage);
    // unwritable output
    CHECK(invoke({"run", "--out", "/nonexistent-dir/sub/out"}).code == cli::kExitUsage);
  }
}

TEST_CASE("config file overrides flags") {
  const fs::path conf = scratch("run.conf");
  const fs::path out = scratch("conf");
  std::ofstream(conf) << "# plain flow\nflow = plain\nt_max = 20\nout = " << out.string() << "\n";
  const auto r = invoke({"run", "--flow", "regularized", "--config", conf, "--out", scratch("ignored")});
  CHECK(r.code == cli::kExitHorizon);
  CHECK(report_value(slurp(out.string() + ".report.txt"), "flow") == "plain");

  cli::RunConfig cfg;
  std::istringstream bad("rho = abc\n");
  CHECK_THROWS_AS(cli::apply_config(bad, cfg), ParseError);
  std::istringstream unknown("colour = red\n");
  try {
    cli::apply_config(unknown, cfg);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  std::istringstream noeq("just words\n");
  CHECK_THROWS_AS(cli::apply_config(noeq, cfg), ParseError);
}

TEST_CASE("every flow runs on lp-small") {
  for (const char* flow : {"plain", "regularized", "projected", "projected-regularized", "proximal",
                           "distributed"}) {
    const std::string flow_name = flow;
    CAPTURE(flow_name);
    const auto r = invoke({"run", "--problem", "lp-small", "--flow", flow, "--t-max", "60",
                           "--out", scratch(std::string("lps-") + flow)});
    CHECK((r.code == cli::kExitConverged || r.code == cli::kExitHorizon));
  }
}

TEST_CASE("trajectory csv") {
  Trajectory t;
  for (int k = 0; k < 5; ++k) {
    t.times.push_back(0.1 * k + 1e-17 * k);
    Vec s(4);
    s << 1.0 / 3.0 * k, -2.5e-300, 7.0 / 11.0, 1e300 / (k + 1);
    t.states.push_back(s);
    t.aux.push_back({0.5 / (k + 1), 1e-20 * k, 3.0, std::sqrt(2.0) * k});
  }
  cli::CsvLayout layout;
  layout.nx = 1;
  layout.nz = 1;
  layout.ny = 1;
  layout.nw = 1;
  layout.lyapunov = layout.certificate = layout.residual = true;
  CHECK(layout.header() ==
        std::vector<std::string>{"t", "x1", "z1", "y1", "w1", "V", "h1", "h2", "residual"});

  std::stringstream io;
  cli::write_trajectory_csv(io, t, layout);
  const std::string text = io.str();
  // every row has 1 + dim + aux columns
  std::istringstream rows(text);
  std::string line;
  while (std::getline(rows, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  const cli::CsvTrajectory back = cli::read_trajectory_csv(io);
  CHECK(back.columns == layout.header());
  REQUIRE(back.trajectory.size() == t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(back.trajectory.times[k] == t.times[k]);
    CHECK(back.trajectory.states[k] == t.states[k]);
    CHECK(back.trajectory.aux[k].lyapunov == t.aux[k].lyapunov);
    CHECK(back.trajectory.aux[k].h1 == t.aux[k].h1);
    CHECK(back.trajectory.aux[k].h2 == t.aux[k].h2);
    CHECK(back.trajectory.aux[k].residual == t.aux[k].residual);
  }

  CHECK_THROWS(cli::export_trajectory(Trajectory{}, layout, scratch("empty.csv")));
  CHECK_THROWS(cli::export_trajectory(t, layout, "/nonexistent-dir/t.csv"));
}

TEST_CASE("stationary trajectory rows are identical") {
  IntegratorConfig icfg;
  icfg.t_max = 1.0;
  icfg.conv_window = 1000;
  icfg.record_stride = 50;
  const VectorField f = regularized_field(bilinear_problem(), {1.0});
  const IntegrationResult r = integrate(f, Vec::Zero(4), icfg);
  const fs::path out = scratch("stationary.csv");
  cli::export_trajectory(r.trajectory, cli::layout_for(f, false, false, false), out);
  std::ifstream in(out);
  std::string header, line, first;
  std::getline(in, header);
  CHECK(header == "t,x1,z1,y1,w1");
  int rows = 0;
  while (std::getline(in, line)) {
    const std::string data = line.substr(line.find(','));
    if (rows++ == 0) first = data;
    CHECK(data == first);
  }
  CHECK(rows == 21);
}

TEST_CASE("trajectory csv from a cli run") {
  const fs::path out = scratch("csv-run");
  REQUIRE(invoke({"run", "--problem", "bilinear", "--flow", "regularized", "--out", out}).code == 0);
  const auto csv = cli::read_trajectory_csv_file(out.string() + ".trajectory.csv");
  CHECK(csv.columns ==
        std::vector<std::string>{"t", "x1", "z1", "y1", "w1", "V", "h1", "h2", "residual"});
  REQUIRE(csv.trajectory.size() > 2);
  CHECK(csv.trajectory.aux.back().residual <= 1e-8);
}

TEST_CASE("deterministic output") {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  invoke({"run", "--problem", "coupled-quadratic", "--flow", "proximal", "--t-max", "30", "--out", a});
  invoke({"run", "--problem", "coupled-quadratic", "--flow", "proximal", "--t-max", "30", "--out", b});
  CHECK(slurp(a.string() + ".trajectory.csv") == slurp(b.string() + ".trajectory.csv"));
}

TEST_CASE("control files through the cli") {
  const fs::path ctl = scratch("trivial.ctl");
  std::ofstream(ctl) << "1 1 1\n1\n1\n1\n0\n0\n";
  const fs::path out = scratch("ctl");
  const auto r = invoke({"solve-lp", "--problem", ctl, "--out", out});
  CHECK(r.code == cli::kExitConverged);
  CHECK(report_value(slurp(out.string() + ".report.txt"), "u(0)").size() > 0);
}
