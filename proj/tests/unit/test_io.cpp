#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxplus/io.hpp"
#include "support/test_problems.hpp"

using namespace maxplus;
using namespace maxplus::testing;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "maxplus_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

Json example1_json() {
  return Json::parse(R"({"A": [[-0.1, 0], [-0.2, -0.1]], "B": [0.1, 0.03],
                         "Phi": [[1, 0.2], [0.2, 2]], "gamma": 3.1622776601683795})");
}

}  // namespace

TEST(JsonMatrix, ShapesAndErrors) {
  EXPECT_EQ(matrix_from_json(Json(2.5), "s"), Matrix::Constant(1, 1, 2.5));
  const Matrix v = matrix_from_json(Json::parse("[1, 2, 3]"), "v");
  EXPECT_EQ(v.rows(), 3);
  EXPECT_EQ(v.cols(), 1);
  const Matrix M = matrix_from_json(Json::parse("[[1, 2], [3, 4]]"), "M");
  EXPECT_EQ(M(1, 0), 3.0);
  EXPECT_EQ(matrix_from_json(matrix_to_json(M), "M"), M);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]"), "M"), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("[]"), "M"), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, \"a\"]]"), "M"), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("{}"), "M"), InputError);
}

TEST(JsonMatrix, HessianBlocks) {
  const PartitionedHessian Q(from_rows(4, 4, {1, 2, 3, 4, 2, 5, 6, 7, 3, 6, 8, 9, 4, 7, 9, 10}));
  const Json j = hessian_to_json(Q);
  EXPECT_EQ(matrix_from_json(j.at("11"), "11"), Q.q11());
  EXPECT_EQ(matrix_from_json(j.at("12"), "12"), Q.q12());
  EXPECT_EQ(matrix_from_json(j.at("21"), "21"), Q.q21());
  EXPECT_EQ(matrix_from_json(j.at("22"), "22"), Q.q22());
}

TEST(Grids, FromJsonAndString) {
  const GridSpec a = grid_from_json(
      Json::parse(R"({"lower": -3, "upper": 3, "spacing": 0.025})"), 2, "x");
  EXPECT_EQ(a.count(0), 241u);
  EXPECT_EQ(a.size(), 241u * 241u);
  const GridSpec b = grid_from_json(
      Json::parse(R"({"lower": [-1, 0], "upper": [1, 2], "spacing": [0.5, 1]})"), 2, "x");
  EXPECT_EQ(b.count(0), 5u);
  EXPECT_EQ(b.count(1), 3u);
  EXPECT_THROW(grid_from_json(Json::parse(R"({"lower": 0, "upper": 1})"), 2, "x"),
               InputError);
  EXPECT_THROW(grid_from_json(
                   Json::parse(R"({"lower": [0, 0, 0], "upper": 1, "spacing": 1})"), 2, "x"),
               InputError);
  const GridSpec c = grid_from_string("-6:6:0.025", 2);
  EXPECT_EQ(c.count(1), 481u);
  EXPECT_THROW(grid_from_string("-6:6", 2), InputError);
  EXPECT_THROW(grid_from_string("a:6:1", 2), InputError);
  EXPECT_THROW(grid_from_string("0:1:-1", 2), InputError);
}

TEST(Csv, FormatIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  Rng rng(71);
  for (int i = 0; i < 1000; ++i) {
    const double v = uniform(rng, -1e6, 1e6) * std::pow(10.0, uniform(rng, -20, 20));
    EXPECT_EQ(parse_double(format_double(v), "t"), v);
  }
  EXPECT_EQ(parse_double("-inf", "t"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.5x", "t"), InputError);
}

TEST(Csv, WriteReadRoundTrip) {
  const GridSpec g = GridSpec::uniform(2, -1, 1, 0.1);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * i);
  v[3] = kMinusInf;
  const auto path = (scratch_dir() / "round.csv").string();
  write_grid_csv(path, g, v, "z");
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "z1,z2,value");
  const GridData d = read_grid_csv(path);
  EXPECT_EQ(d.values, v);
  EXPECT_EQ(d.grid.size(), g.size());
  EXPECT_NEAR((d.grid.spacing() - g.spacing()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Csv, RejectsMalformedFiles) {
  const auto dir = scratch_dir();
  write_text(dir / "hdr.csv", "x1,x2,val\n0,0,1\n");
  EXPECT_THROW(read_grid_csv((dir / "hdr.csv").string()), InputError);
  write_text(dir / "cols.csv", "x1,value\n0,1,2\n");
  EXPECT_THROW(read_grid_csv((dir / "cols.csv").string()), InputError);
  write_text(dir / "hole.csv", "x1,x2,value\n0,0,1\n0,1,1\n1,0,1\n");
  EXPECT_THROW(read_grid_csv((dir / "hole.csv").string()), InputError);
  write_text(dir / "order.csv", "x1,value\n1,0\n0,1\n");
  EXPECT_THROW(read_grid_csv((dir / "order.csv").string()), InputError);
  write_text(dir / "empty.csv", "x1,value\n");
  EXPECT_THROW(read_grid_csv((dir / "empty.csv").string()), InputError);
  EXPECT_THROW(read_grid_csv((dir / "missing.csv").string()), InputError);
}

TEST(Config, ParsesProblemAndOptionalFields) {
  Json j = example1_json();
  j["M"] = Json::parse("[[10, 0], [0, 10]]");
  j["grids"] = Json::parse(R"({"x": {"lower": -1, "upper": 1, "spacing": 0.5}})");
  const Config c = parse_config(j);
  EXPECT_EQ(c.problem.B.rows(), 2);
  EXPECT_EQ(c.problem.B.cols(), 1);
  ASSERT_TRUE(c.M);
  EXPECT_EQ((*c.M)(1, 1), 10.0);
  EXPECT_TRUE(c.payoff.is_null());
  EXPECT_EQ(config_grid(c, "x", 2)->size(), 25u);
  EXPECT_FALSE(config_grid(c, "w", 1));
}

TEST(Config, ErrorsAreInputErrors) {
  Json j = example1_json();
  j.erase("gamma");
  EXPECT_THROW(parse_config(j), InputError);
  j = example1_json();
  j["gamma"] = "big";
  EXPECT_THROW(parse_config(j), InputError);
  j = example1_json();
  j["B"] = Json::parse("[1, 2, 3]");
  EXPECT_THROW(parse_config(j), InputError);
  EXPECT_THROW(parse_config(Json::array()), InputError);
  EXPECT_THROW(load_config((scratch_dir() / "nope.json").string()), InputError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"example1_lqr.json", "example2_convergence.json",
                           "example3_nonquadratic.json"}) {
    const Config c = load_config(std::string(MAXPLUS_CONFIG_DIR) + "/" + name);
    EXPECT_TRUE(validate_problem(c.problem).empty()) << name;
  }
}

TEST(Payoff, DefaultGrowthBounds) {
  const auto q = payoff_from_json(
      Json::parse(R"({"type": "quadratic", "Lambda": [[1, 0.2], [0.2, 0.5]]})"), 2);
  EXPECT_NEAR(q.growth().r, max_eigenvalue(example1_lambda()), 1e-15);
  const auto s = payoff_from_json(Json::parse(R"({"type": "named", "name": "abs-sin"})"), 2);
  EXPECT_EQ(s.growth().r, 1.0);
  EXPECT_EQ(s.growth().c, 7.5);
  const auto w = payoff_from_json(
      Json::parse(R"({"type": "named", "name": "abs-weighted", "params": {"c1": 2}})"), 2);
  EXPECT_EQ(w.growth().c, 2.5);
  const auto g = payoff_from_json(
      Json::parse(R"({"type": "named", "name": "abs-sin", "growth": {"r": 2, "c": 9}})"), 2);
  EXPECT_EQ(g.growth().r, 2.0);
  EXPECT_EQ(g.growth().c, 9.0);
  EXPECT_THROW(payoff_from_json(Json::parse(R"({"type": "spline"})"), 2), InputError);
  EXPECT_THROW(payoff_from_json(
                   Json::parse(R"({"type": "quadratic", "Lambda": [[1]]})"), 2),
               InputError);
}

TEST(Payoff, CsvNeedsGrowthAndResolvesRelativePath) {
  const auto dir = scratch_dir();
  const GridSpec g = GridSpec::uniform(2, -1, 1, 0.5);
  write_grid_csv((dir / "psi.csv").string(), g, std::vector<double>(g.size(), 0.25));
  EXPECT_THROW(payoff_from_json(Json::parse(R"({"type": "csv", "path": "psi.csv"})"), 2,
                                dir.string()),
               InputError);
  const auto p = payoff_from_json(
      Json::parse(R"({"type": "csv", "path": "psi.csv", "growth": {"r": 1, "c": 1}})"), 2,
      dir.string());
  EXPECT_EQ(p(Vector::Zero(2)), 0.25);
  EXPECT_THROW(payoff_from_json(
                   Json::parse(R"({"type": "csv", "path": "psi.csv", "growth": {"r": 1}})"), 3,
                   dir.string()),
               InputError);
}
