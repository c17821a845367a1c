#include "crab_cli/config.hpp"
#include "crab_cli/run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace crab::cli;

namespace {

const char* kCircle = R"(schema = crab/1
seed = 5

[run]
command = discriminant
window = 0, 5

[model]
name = circle

[isotopy]
kind = constant
value = 1.4142135623730951
)";

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "crab_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_exe(const std::string& args) {
  const std::string cmd = std::string(CRAB_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string expect_config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kCircle;
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ParsesCircleExample) {
  const RunConfig c = parse_config(kCircle);
  EXPECT_EQ(c.command, "discriminant");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.window_lo, 0.0);
  EXPECT_EQ(c.window_hi, 5.0);
  EXPECT_EQ(c.model.name, "circle");
  EXPECT_EQ(c.isotopy.kind, "constant");
  EXPECT_DOUBLE_EQ(c.isotopy.value, 1.4142135623730951);
}

TEST(Config, DefaultSeedIsZero) {
  EXPECT_EQ(parse_config(with("seed = 5\n", "")).seed, 0u);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(expect_config_error(with("schema = crab/1", "schema = crab/9")).find("schema"), std::string::npos);
  EXPECT_NE(expect_config_error(with("schema = crab/1\n", "")).find("schema"), std::string::npos);
  EXPECT_NE(expect_config_error(with("window = 0, 5", "window = 5, 0")).find("[run].window"), std::string::npos);
  EXPECT_NE(expect_config_error(with("window = 0, 5", "window = 0, 5, 7")).find("[run].window"), std::string::npos);
  EXPECT_NE(expect_config_error(with("name = circle", "name = sphere")).find("[model].name"), std::string::npos);
  EXPECT_NE(expect_config_error(with("kind = constant", "kind = exp(x)")).find("[isotopy].kind"), std::string::npos);
  EXPECT_NE(expect_config_error(with("value = 1.4142135623730951", "value = abc")).find("[isotopy].value"),
            std::string::npos);
  EXPECT_NE(expect_config_error(with("command = discriminant", "command = fly")).find("[run].command"),
            std::string::npos);
  EXPECT_NE(expect_config_error(std::string(kCircle) + "\n[tolerances]\nnewton = -1\n").find("[tolerances].newton"),
            std::string::npos);
  EXPECT_NE(expect_config_error(std::string(kCircle) + "\n[tolerances]\nnewtn = 1e-9\n").find("newtn"),
            std::string::npos);
  EXPECT_NE(expect_config_error(std::string(kCircle) + "\n[extras]\nfoo = 1\n").find("extras"), std::string::npos);
  expect_config_error("schema = crab/1\n[run\n");
}

TEST(Config, KineticNeedsTorus) {
  EXPECT_NE(expect_config_error(with("kind = constant", "kind = kinetic")).find("[isotopy].kind"), std::string::npos);
}

TEST(Run, DiscriminantWritesTables) {
  RunConfig c = parse_config(kCircle);
  c.out_dir = scratch("disc");
  const RunOutcome r = run(c);
  ASSERT_EQ(r.status, kSuccess) << r.message;
  const std::string table = read(c.out_dir / "discriminant.csv");
  EXPECT_EQ(table.rfind("# ", 0), 0u);
  EXPECT_NE(table.find("# units:"), std::string::npos);
  EXPECT_TRUE(fs::exists(c.out_dir / "summary.json"));
  EXPECT_TRUE(fs::exists(c.out_dir / "summary.txt"));
  EXPECT_NE(read(c.out_dir / "summary.json").find("\"components\": 7"), std::string::npos);
}

TEST(Run, ValidateNegativeHamiltonian) {
  RunConfig c = parse_config(with("command = discriminant", "command = validate"));
  c.isotopy.value = -1.0;
  c.out_dir = scratch("neg");
  const RunOutcome r = run(c);
  EXPECT_EQ(r.status, kValidationFailure);
  EXPECT_EQ(r.message, "validation failed: positivity");
}

TEST(Run, OracleReportsBothCounts) {
  RunConfig c = parse_config(with("command = discriminant", "command = oracle"));
  c.out_dir = scratch("oracle");
  ASSERT_EQ(run(c).status, kSuccess);
  const std::string s = read(c.out_dir / "summary.json");
  EXPECT_NE(s.find("\"bruteforce_count\": 7"), std::string::npos);
  EXPECT_NE(s.find("\"formula_value\": 6"), std::string::npos);
}

TEST(Run, NumericFailureWritesDiagnostics) {
  RunConfig c = parse_config(with("command = discriminant", "command = descend"));
  c.window_lo = 0.1;
  c.window_hi = 0.4;
  c.out_dir = scratch("numeric");
  const RunOutcome r = run(c);
  EXPECT_EQ(r.status, kNumericFailure);
  EXPECT_TRUE(fs::exists(c.out_dir / "diagnostics.txt"));
}

TEST(Exe, ExitCodes) {
  const fs::path dir = scratch("exe");
  const fs::path good = dir / "good.ini";
  std::ofstream(good) << kCircle;
  const fs::path neg = dir / "neg.ini";
  std::ofstream(neg) << "schema = crab/1\n[run]\ncommand = validate\n[model]\nname = circle\n"
                         "[isotopy]\nkind = constant\nvalue = -1\n";
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << with("window = 0, 5", "window = 5, 0");
  EXPECT_EQ(run_exe("--config " + good.string() + " --out " + (dir / "a").string() + " --quiet"), 0);
  EXPECT_EQ(run_exe("--config " + neg.string() + " --out " + (dir / "b").string() + " --quiet"), 4);
  EXPECT_EQ(run_exe("--config " + bad.string() + " --out " + (dir / "c").string()), 2);
  EXPECT_EQ(run_exe("--config " + (dir / "missing.ini").string()), 2);
  EXPECT_EQ(run_exe("--out " + dir.string()), 2);
  EXPECT_EQ(run_exe("--config " + good.string() + " --threads 0"), 2);
}

TEST(Exe, DeterministicTables) {
  const fs::path dir = scratch("determinism");
  SCOPED_TRACE(CRAB_CONFIG_DIR);
  for (const char* name : {"circle_rotation.ini", "torus_chords.ini", "circle_descend.ini"}) {
    const std::string cfg = std::string(CRAB_CONFIG_DIR) + "/" + name;
    ASSERT_EQ(run_exe("--config " + cfg + " --out " + (dir / "one").string() + " --quiet"), 0) << name;
    ASSERT_EQ(run_exe("--config " + cfg + " --out " + (dir / "two").string() + " --threads 3 --quiet"), 0) << name;
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir / "one")) {
      const fs::path other = dir / "two" / entry.path().filename();
      ASSERT_TRUE(fs::exists(other)) << other;
      EXPECT_EQ(read(entry.path()), read(other)) << entry.path().filename();
      ++compared;
    }
    EXPECT_GE(compared, 3) << name;
    fs::remove_all(dir / "one");
    fs::remove_all(dir / "two");
  }
}

TEST(Exe, SeedOverrideChangesPerturbation) {
  const fs::path dir = scratch("seed");
  const std::string cfg = std::string(CRAB_CONFIG_DIR) + "/circle_descend.ini";
  ASSERT_EQ(run_exe("--config " + cfg + " --out " + (dir / "a").string() + " --seed 1 --quiet"), 0);
  ASSERT_EQ(run_exe("--config " + cfg + " --out " + (dir / "b").string() + " --seed 2 --quiet"), 0);
  EXPECT_NE(read(dir / "a" / "descend_history.csv"), read(dir / "b" / "descend_history.csv"));
}
