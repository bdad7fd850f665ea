#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "mor/cli.hpp"
#include "mor/io.hpp"
#include "support/random_systems.hpp"

using namespace mor;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mor_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args, const fs::path& err = "/dev/null") {
  const std::string cmd = std::string(MOR_BINARY) + " " + args + " 2>" + err.string() + " >/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_problem(const fs::path& dir, const StateSpace& G, const WeightFilter* W) {
  io::write_matrix_market(dir / "A.mtx", G.A());
  io::write_matrix_market(dir / "B.mtx", G.B());
  io::write_matrix_market(dir / "C.mtx", G.C());
  std::string m = "name = test\nA = A.mtx\nB = B.mtx\nC = C.mtx\n";
  if (W) {
    io::write_matrix_market(dir / "Aw.mtx", W->A());
    io::write_matrix_market(dir / "Bw.mtx", W->B());
    io::write_matrix_market(dir / "Cw.mtx", W->C());
    io::write_matrix_market(dir / "Dw.mtx", W->D());
    m += "A_w = Aw.mtx\nB_w = Bw.mtx\nC_w = Cw.mtx\nD_w = Dw.mtx\n";
  }
  std::ofstream(dir / "problem.manifest") << m;
  return dir / "problem.manifest";
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

const fs::path kScalar = fs::path(MOR_SOURCE_DIR) / "data/scalar/scalar.manifest";

}  // namespace

TEST(Grid, Parse) {
  const auto g = cli::parse_grid("0.01:100:5");
  EXPECT_EQ(g.points, 5);
  const auto w = cli::grid_points(g);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  const auto lin = cli::grid_points(cli::parse_grid("0:1:3"));
  EXPECT_EQ(lin, (std::vector<double>{0.0, 0.5, 1.0}));
  for (const char* bad : {"1:0:3", "1:2", "a:2:3", "1:2:0", "-1:2:3"}) {
    try {
      cli::parse_grid(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UsageError);
    }
  }
}

TEST(Reduce, ScalarFullOrderZeroError) {
  const fs::path out = scratch("scalar");
  ASSERT_EQ(run("reduce --manifest " + kScalar.string() + " --order 1 --out " + out.string()), 0);
  const auto rows = csv(out / "report.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "nowi");
  EXPECT_LT(std::stod(rows[1][column(rows[0], "relative_weighted_h2_error")]), 1e-7);
  for (const char* f : {"model.A.mtx", "model.B.mtx", "model.C.mtx", "model.D.mtx", "history.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
}

TEST(Reduce, FwbtReportMatchesRecomputation) {
  std::mt19937_64 rng(51);
  const StateSpace G = mor::testing::random_system(rng, 8, 2, 2);
  const fs::path dir = scratch("fwbt");
  const fs::path manifest = write_problem(dir, G, nullptr);
  ASSERT_EQ(run("reduce --manifest " + manifest.string() + " --method fwbt --order 4 --out " +
                (dir / "out").string()),
            0);
  const auto rows = csv(dir / "out/report.csv");
  const double reported = std::stod(rows[1][column(rows[0], "weighted_h2_error")]);
  const StateSpace Gr = io::load_model_dir(dir / "out");
  const double direct = h2_norm(difference(G, Gr));
  EXPECT_NEAR(reported, direct, 1e-10 * direct);
}

TEST(Reduce, OrderTooLargeIsUsageError) {
  const fs::path out = scratch("usage");
  EXPECT_EQ(run("reduce --manifest " + kScalar.string() + " --order 2 --out " + out.string(),
                out / "err.txt"),
            2);
  const std::string err = slurp(out / "err.txt");
  EXPECT_EQ(err.rfind("error: kind=UsageError message=", 0), 0u) << err;
  EXPECT_EQ(run("reduce --manifest " + kScalar.string() + " --order 1 --method irka"), 2);
  EXPECT_EQ(run("reduce --order 1"), 2);
}

TEST(Reduce, DataErrorsExitThree) {
  const fs::path dir = scratch("data");
  std::ofstream(dir / "bad.manifest") << "A = missing.mtx\nB = x\nC = y\n";
  EXPECT_EQ(run("reduce --manifest " + (dir / "bad.manifest").string() + " --order 1"), 3);
}

TEST(Sweep, ShapeAndDeterminism) {
  std::mt19937_64 rng(52);
  const StateSpace G = mor::testing::random_system(rng, 8, 1, 1);
  const WeightFilter W = mor::testing::random_weight(rng, 2, 1);
  const fs::path dir = scratch("sweep");
  const fs::path manifest = write_problem(dir, G, &W);
  const std::string args = "sweep --manifest " + manifest.string() +
                           " --method nowi,fwbt --order 2,4 --init random --seed 3 --out ";
  ASSERT_EQ(run(args + (dir / "a").string()), 0);
  ASSERT_EQ(run(args + (dir / "b").string()), 0);
  const std::string a = slurp(dir / "a/sweep.csv");
  EXPECT_EQ(a, slurp(dir / "b/sweep.csv"));
  const auto rows = csv(dir / "a/sweep.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1][0] + rows[1][1], "nowi2");
  EXPECT_EQ(rows[4][0] + rows[4][1], "fwbt4");
  setenv("MOR_THREADS", "3", 1);
  ASSERT_EQ(run(args + (dir / "c").string()), 0);
  unsetenv("MOR_THREADS");
  EXPECT_EQ(a, slurp(dir / "c/sweep.csv"));
}

TEST(Sweep, RowFailureDoesNotStopSweep) {
  const fs::path out = scratch("sweep_fail");
  ASSERT_EQ(run("sweep --manifest " + kScalar.string() + " --order 1,2 --out " + out.string()), 0);
  const auto rows = csv(out / "sweep.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][column(rows[0], "status")], "ok");
  EXPECT_EQ(rows[2][column(rows[0], "status")], "error");
}

TEST(Residuals, FullModelIsZero) {
  std::mt19937_64 rng(53);
  const StateSpace G = mor::testing::random_system(rng, 4, 1, 1);
  const WeightFilter W = mor::testing::random_weight(rng, 2, 1);
  const fs::path dir = scratch("residuals");
  const fs::path manifest = write_problem(dir, G, &W);
  io::write_model_dir(dir / "model", G);
  ASSERT_EQ(run("residuals --manifest " + manifest.string() + " --model " + (dir / "model").string() +
                " --out " + dir.string()),
            0);
  const auto rows = csv(dir / "residuals.csv");
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][2]), 1e-8) << rows[i][0];
    EXPECT_LT(std::stod(rows[i][5]), 1e-8) << rows[i][0];
  }
}

TEST(Sample, FirstOrderSigmaValues) {
  const fs::path dir = scratch("sample");
  const StateSpace G(Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
  const fs::path manifest = write_problem(dir, G, nullptr);
  ASSERT_EQ(run("sample --manifest " + manifest.string() + " --grid 0:1:2 --out " + dir.string()), 0);
  const auto rows = csv(dir / "freqresp.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0, 1e-15);
  EXPECT_NEAR(std::stod(rows[2][1]), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Sample, ConstantSystemIsFlat) {
  const fs::path dir = scratch("sample_const");
  io::write_matrix_market(dir / "A.mtx", Mat(0, 0));
  io::write_matrix_market(dir / "B.mtx", Mat(0, 1));
  io::write_matrix_market(dir / "C.mtx", Mat(1, 0));
  io::write_matrix_market(dir / "D.mtx", Mat::Constant(1, 1, 2.0));
  io::write_matrix_market(dir / "Dw.mtx", Mat::Zero(1, 1));
  std::ofstream(dir / "c.manifest") << "A=A.mtx\nB=B.mtx\nC=C.mtx\nD=D.mtx\nD_w=Dw.mtx\n";
  ASSERT_EQ(run("sample --manifest " + (dir / "c.manifest").string() + " --grid 0.1:10:4 --out " +
                dir.string()),
            0);
  const auto rows = csv(dir / "freqresp.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][1]), 2.0);
}
