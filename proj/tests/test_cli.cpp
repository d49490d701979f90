#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dualwave/cli.hpp"
#include "dualwave/error.hpp"

using namespace dualwave;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("dualwave-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                       "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& n) const { return (dir / n).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST(AGrid, LogAndLinear) {
  const auto g = cli::parse_a_grid("1:100:log3");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(g[2], 100.0);
  const auto l = cli::parse_a_grid("0.5:2:lin4");
  ASSERT_EQ(l.size(), 4u);
  EXPECT_DOUBLE_EQ(l[1], 1.0);
  EXPECT_THROW(cli::parse_a_grid("1:2"), ConfigError);
  EXPECT_THROW(cli::parse_a_grid("2:1:log3"), ConfigError);
  EXPECT_THROW(cli::parse_a_grid("0:1:log3"), ConfigError);
  EXPECT_THROW(cli::parse_a_grid("1:2:cubic3"), ConfigError);
}

TEST(Emit, EmptyCsvIsHeaderOnly) {
  Scratch s;
  cli::emit_csv({{"a", "status", "psi", "lambda", "G_residual"}, {}}, s.file("t.csv"));
  EXPECT_EQ(slurp(s.file("t.csv")), "a,status,psi,lambda,G_residual\r\n");
}

TEST(Emit, CsvQuoting) {
  Scratch s;
  cli::emit_csv({{"x", "y"}, {{"a,b", "say \"hi\""}}}, s.file("q.csv"));
  EXPECT_EQ(slurp(s.file("q.csv")), "x,y\r\n\"a,b\",\"say \"\"hi\"\"\"\r\n");
}

TEST(Emit, JsonRoundTripBitExact) {
  Scratch s;
  const nlohmann::json v = {{"x", 0.1 + 0.2}, {"y", 1.0 / 3.0}, {"z", 6.02214076e23}};
  cli::emit_json(v, s.file("v.json"));
  const auto back = nlohmann::json::parse(slurp(s.file("v.json")));
  EXPECT_EQ(back["x"].get<double>(), 0.1 + 0.2);
  EXPECT_EQ(back["y"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(back["z"].get<double>(), 6.02214076e23);
}

TEST(Emit, FormatDoubleRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e300}) EXPECT_EQ(std::stod(cli::format_double(x)), x);
}

TEST(Emit, UnwritablePathFails) {
  EXPECT_ANY_THROW(cli::emit_json({{"a", 1}}, "/nonexistent-dir/x/y.json"));
}

TEST(Run, ExitCodes) {
  Scratch s;
  EXPECT_EQ(run({"check", "--suite", "f-properties"}), cli::kOk);
  std::string err;
  EXPECT_EQ(run({"minimize", "--mode", "sigma", "--p", "12", "--N", "3", "--R", "10", "--M", "201", "--out",
                 s.file("r.json")},
                &err),
            cli::kRegime);
  EXPECT_NE(err.find("error"), std::string::npos);
  EXPECT_EQ(run({"no-such-command"}), cli::kConfig);
  EXPECT_EQ(run({"check", "--suite", "no-such-suite"}), cli::kConfig);
}

TEST(Run, MalformedConfigNamesPath) {
  Scratch s;
  std::ofstream(s.file("bad.json")) << R"({"solve": 1, "R": "wide"})";
  std::string err;
  EXPECT_EQ(run({"minimize", "--mode", "F", "--config", s.file("bad.json"), "--out", s.file("o.json")}, &err),
            cli::kConfig);
  EXPECT_NE(err.find("config"), std::string::npos);
  std::ofstream(s.file("unk.json")) << R"({"p": 3, "frobnicate": true})";
  EXPECT_EQ(run({"minimize", "--mode", "F", "--config", s.file("unk.json"), "--out", s.file("o.json")}, &err),
            cli::kConfig);
  EXPECT_NE(err.find("frobnicate"), std::string::npos);
  std::ofstream(s.file("syntax.json")) << "{not json";
  EXPECT_EQ(run({"minimize", "--mode", "F", "--config", s.file("syntax.json"), "--out", s.file("o.json")}),
            cli::kConfig);
  EXPECT_FALSE(fs::exists(s.file("o.json")));
}

TEST(Run, TransformTable) {
  Scratch s;
  ASSERT_EQ(run({"transform-table", "--tmax", "10", "--samples", "5", "--out", s.file("t.csv")}), cli::kOk);
  std::istringstream in(slurp(s.file("t.csv")));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 6);
}

TEST(Run, CurveSchemaAndDeterminism) {
  Scratch s;
  const std::vector<std::string> base = {"curve", "--mode", "sigma", "--p", "7", "--M", "401", "--a-grid", "1:4:log3"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", s.file("a.csv")});
  b.insert(b.end(), {"--out", s.file("b.csv")});
  ASSERT_EQ(run(a), cli::kOk);
  ASSERT_EQ(run(b), cli::kOk);
  const auto text = slurp(s.file("a.csv"));
  EXPECT_EQ(text.rfind("a,status,psi,lambda,G_residual\r\n", 0), 0u);
  EXPECT_EQ(text, slurp(s.file("b.csv")));
}
