#include "xcforge/cli.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace xcforge;
namespace fs = std::filesystem;

namespace {

struct Call {
  int code = -1;
  std::string out, err;
};

Call call(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"xcforge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  Call c;
  c.code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  c.out = o.str();
  c.err = e.str();
  return c;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("xcforge_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json load(const fs::path& p) { return json::parse(read_file(p)); }

}  // namespace

TEST(Cli, SeparationRFour) {
  const auto dir = scratch("sep");
  const auto c = call({"separation", "--r-list", "4", "--out", dir.string(), "--csv"});
  ASSERT_EQ(c.code, 0) << c.err;
  // entries nonzero iff popcount(a & b) is not a multiple of 2
  std::uint64_t support = 0;
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 16; ++b) support += std::popcount(a & b) % 2 != 0;
  const auto j = load(dir / "separation.json");
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["support"], std::to_string(support));
  EXPECT_EQ(j["rows"][0]["support"], "120");
  EXPECT_NE(c.out.find("120"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "separation.csv"));
  EXPECT_TRUE(fs::exists(dir / "separation.svg"));
}

TEST(Cli, SeparationBadR) {
  const auto dir = scratch("sep_bad");
  EXPECT_EQ(call({"separation", "--r-list", "3", "--out", dir.string()}).code, 1);
  EXPECT_FALSE(fs::exists(dir / "separation.json"));
}

TEST(Cli, CyclicUniform576) {
  const auto dir = scratch("cyc576");
  const auto c = call({"cyclic", "--uniform", "576", "--seed", "1", "--out", dir.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto j = load(dir / "cyclic.json");
  ASSERT_EQ(j["runs"].size(), 1u);
  const auto& r = j["runs"][0];
  EXPECT_TRUE(r["ok"].get<bool>());
  EXPECT_LE(r["r_total"].get<long long>(), 564);
  EXPECT_LE(r["rel_err"].get<double>(), 1e-6);
  const auto m = load(dir / "cyclic.manifest.json");
  for (const auto& f : m["outputs"]) EXPECT_TRUE(fs::exists(f.get<std::string>())) << f;
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_TRUE(m.contains("versions"));
  EXPECT_TRUE(m.contains("started_at"));
}

TEST(Cli, ReportJsonIsReproducible) {
  const auto d1 = scratch("rep1"), d2 = scratch("rep2");
  for (const auto& d : {d1, d2})
    ASSERT_EQ(call({"cyclic", "--clustered", "600", "--seed", "3", "--out", d.string()}).code, 0);
  EXPECT_EQ(read_file(d1 / "cyclic.json"), read_file(d2 / "cyclic.json"));
  EXPECT_EQ(read_file(d1 / "cyclic.svg"), read_file(d2 / "cyclic.svg"));
  for (const auto& d : {d1, d2}) ASSERT_EQ(call({"hexagon-demo", "--out", d.string()}).code, 0);
  EXPECT_EQ(read_file(d1 / "hexagon-demo.json"), read_file(d2 / "hexagon-demo.json"));
}

TEST(Cli, AnglesFileCsvRoundTripThroughVerify) {
  const auto dir = scratch("square");
  atomic_write(dir / "square.txt", "0\n1.5707963267948966\n3.141592653589793\n4.71238898038469\n");
  const auto c = call({"cyclic", "--angles", (dir / "square.txt").string(), "--csv", "--out", dir.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto j = load(dir / "cyclic.json");
  EXPECT_LE(j["runs"][0]["r_total"].get<long long>(), 4);
  const std::string tag = "cyclic_file_n4_s0_";
  ASSERT_TRUE(fs::exists(dir / (tag + "M.csv")));
  const auto v = call({"verify", "--matrix", (dir / (tag + "M.csv")).string(), "--t", (dir / (tag + "T.csv")).string(), "--u",
                       (dir / (tag + "U.csv")).string(), "--tol", "1e-9", "--out", dir.string()});
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_TRUE(load(dir / "verify.json")["ok"].get<bool>());
}

TEST(Cli, VerifyShapeMismatchIsUsageError) {
  const auto dir = scratch("verify_bad");
  atomic_write(dir / "M.csv", matrix_to_csv(Matrix::Ones(3, 3)));
  atomic_write(dir / "T.csv", matrix_to_csv(Matrix::Ones(3, 2)));
  atomic_write(dir / "U.csv", matrix_to_csv(Matrix::Ones(3, 3)));
  const auto c = call({"verify", "--matrix", (dir / "M.csv").string(), "--t", (dir / "T.csv").string(), "--u",
                       (dir / "U.csv").string(), "--out", dir.string()});
  EXPECT_EQ(c.code, 1);
  EXPECT_FALSE(c.err.empty());
}

TEST(Cli, VerifyNegativeFactorFails) {
  const auto dir = scratch("verify_neg");
  Matrix T(2, 2), U(2, 2);
  T << 1, -1, 0, 1;
  U << 1, 0, 0, 1;
  atomic_write(dir / "M.csv", matrix_to_csv(T * U));
  atomic_write(dir / "T.csv", matrix_to_csv(T));
  atomic_write(dir / "U.csv", matrix_to_csv(U));
  const auto c = call({"verify", "--matrix", (dir / "M.csv").string(), "--t", (dir / "T.csv").string(), "--u",
                       (dir / "U.csv").string(), "--out", dir.string()});
  EXPECT_EQ(c.code, 2);
  EXPECT_FALSE(load(dir / "verify.json")["nonnegative"].get<bool>());
}

TEST(Cli, HexagonDemo) {
  const auto dir = scratch("hex");
  const auto c = call({"hexagon-demo", "--csv", "--out", dir.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto j = load(dir / "hexagon-demo.json");
  EXPECT_EQ(j["r"], 5);
  EXPECT_EQ(j["rank_M"], 3);
  EXPECT_LE(j["max_abs_err"].get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(dir / "hexagon-demo_T.csv"));
}

TEST(Cli, RandomSphereSmall) {
  const auto dir = scratch("random");
  const auto c = call({"random", "--dim", "2", "--n", "1000", "--mode", "sphere", "--seed", "1,2", "--out", dir.string()});
  EXPECT_TRUE(c.code == 0 || c.code == 2) << c.err;
  const auto j = load(dir / "random.json");
  ASSERT_EQ(j["runs"].size(), 2u);
  for (const auto& r : j["runs"])
    if (r["ok"].get<bool>()) EXPECT_LE(r["rel_err"].get<double>(), 1e-8);
  EXPECT_EQ(c.code == 0, j["ok"].get<bool>());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"nonsense"}).code, 1);
  EXPECT_EQ(call({"random", "--dim", "4", "--n", "100"}).code, 1);
  EXPECT_EQ(call({"random", "--dim", "2", "--n", "100", "--eps", "0.5", "--out", scratch("eps").string()}).code, 1);
  EXPECT_EQ(call({"cyclic", "--uniform", "10", "--clustered", "10", "--out", scratch("two").string()}).code, 1);
  EXPECT_EQ(call({"cyclic", "--out", scratch("none").string()}).code, 1);
  const auto dir = scratch("unsorted");
  atomic_write(dir / "a.txt", "1 0.5 2");
  EXPECT_EQ(call({"cyclic", "--angles", (dir / "a.txt").string(), "--out", dir.string()}).code, 1);
  EXPECT_EQ(call({"verify", "--matrix", (dir / "missing.csv").string(), "--t", "x", "--u", "y"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = XCFORGE_CLI_PATH;
  const auto dir = scratch("bin");
  const int bad = std::system((bin + " verify --matrix nope.csv --t a --u b --out " + dir.string() + " 2>/dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 1);
  const int ok = std::system((bin + " separation --r-list 4,9 --out " + dir.string() + " >/dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  EXPECT_TRUE(fs::exists(dir / "separation.manifest.json"));
}
