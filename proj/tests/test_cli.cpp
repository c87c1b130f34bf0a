#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "critinv/config.hpp"
#include "critinv/errors.hpp"
#include "critinv/io.hpp"

namespace fs = std::filesystem;
using namespace critinv;

namespace {

const fs::path kCli = CRITINV_CLI;
const fs::path kConfigs = CRITINV_CONFIG_DIR;

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + kCli.string() + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("critinv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Config, BundledConfigsLoad) {
  for (const char* name : {"ethane_methane_90_10.json", "methane_h2s_51_49.json", "methane_ethanol_20_80.json",
                           "cyclohexane_co2_60_40.json"}) {
    const RunConfig cfg = load_config(kConfigs / name);
    EXPECT_FALSE(cfg.name.empty());
    EXPECT_NO_THROW(cfg.context()) << name;
    EXPECT_FALSE(bank_seeds(cfg).empty());
  }
}

TEST(Config, UnknownKeyIsRejected) {
  Json j = Json::parse(slurp(kConfigs / "ethane_methane_90_10.json"));
  j["mixture"]["k21"] = 0.1;
  try {
    config_from_json(j);
    FAIL() << "expected ConfigInvalid";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    EXPECT_NE(std::string(e.what()).find("k21"), std::string::npos);
  }
}

TEST(Config, WrongTypesAreRejected) {
  Json j = Json::parse(slurp(kConfigs / "ethane_methane_90_10.json"));
  j["domain_box"]["T_min"] = "cold";
  EXPECT_THROW(config_from_json(j), Error);
  j = Json::parse(slurp(kConfigs / "ethane_methane_90_10.json"));
  j["mixture"]["mixing_rule"] = "quadratic";
  EXPECT_THROW(config_from_json(j), Error);
}

TEST_F(Cli, MissingConfigExitsWithTwo) {
  EXPECT_EQ(run("invert --config '" + (dir_ / "nope.json").string() + "' --out '" + dir_.string() + "'", dir_ / "log"),
            2);
}

TEST_F(Cli, UnknownConfigKeyExitsWithTwo) {
  Json j = Json::parse(slurp(kConfigs / "ethane_methane_90_10.json"));
  j["surprise"] = true;
  write(dir_ / "cfg.json", j.dump());
  EXPECT_EQ(run("critset --config '" + (dir_ / "cfg.json").string() + "' --out '" + dir_.string() + "'", dir_ / "log"),
            2);
  EXPECT_NE(slurp(dir_ / "log").find("surprise"), std::string::npos);
}

TEST_F(Cli, EmptyBankExitsWithThree) {
  const RunConfig cfg = load_config(kConfigs / "ethane_methane_90_10.json");
  Json bank = {{"provenance",
                {{"mixture_id", "ethane+methane"},
                 {"composition", {0.9, 0.1}},
                 {"model_stack", cfg.mixture.model_stack()},
                 {"mixture", to_json(cfg.mixture)}}},
               {"entries", Json::array()}};
  write(dir_ / "bank.json", bank.dump());
  EXPECT_EQ(run("invert --config '" + (kConfigs / "ethane_methane_90_10.json").string() + "' --bank '" +
                    (dir_ / "bank.json").string() + "' --out '" + dir_.string() + "'",
                dir_ / "log"),
            3)
      << slurp(dir_ / "log");
}

TEST_F(Cli, BankFromOtherMixtureExitsWithThree) {
  ASSERT_EQ(run("bank --config '" + (kConfigs / "methane_h2s_51_49.json").string() + "' --grid 4x4 --out '" +
                    dir_.string() + "'",
                dir_ / "log"),
            0)
      << slurp(dir_ / "log");
  ASSERT_TRUE(fs::exists(dir_ / "bank.json"));
  EXPECT_EQ(run("invert --config '" + (kConfigs / "ethane_methane_90_10.json").string() + "' --bank '" +
                    (dir_ / "bank.json").string() + "' --out '" + dir_.string() + "'",
                dir_ / "log"),
            3)
      << slurp(dir_ / "log");
}

TEST_F(Cli, InvertResultsAreByteIdenticalAcrossReruns) {
  const std::string cfg = (kConfigs / "ethane_methane_90_10.json").string();
  ASSERT_EQ(run("bank --config '" + cfg + "' --out '" + dir_.string() + "'", dir_ / "log"), 0) << slurp(dir_ / "log");
  const std::string bank = (dir_ / "bank.json").string();
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run("invert --config '" + cfg + "' --bank '" + bank + "' --out '" + (dir_ / sub).string() + "'",
                  dir_ / "log"),
              0)
        << slurp(dir_ / "log");
  }
  const std::string a = slurp(dir_ / "a" / "results.json");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "results.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "results.csv"), slurp(dir_ / "b" / "results.csv"));
  const Json r = Json::parse(a);
  ASSERT_FALSE(r["results"].empty());
  EXPECT_TRUE(fs::exists(dir_ / "a" / "paths" / "path_0.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "timings.json"));
}

TEST_F(Cli, CritsetWritesCsvFiles) {
  ASSERT_EQ(run("critset --config '" + (kConfigs / "ethane_methane_90_10.json").string() + "' --out '" +
                    dir_.string() + "'",
                dir_ / "log"),
            0)
      << slurp(dir_ / "log");
  const std::string grid = slurp(dir_ / "sign_grid.csv");
  EXPECT_EQ(grid.substr(0, grid.find('\n')), "V[m3/mol],T[K],detJ,sign");
  const std::string curves = slurp(dir_ / "curves.csv");
  EXPECT_EQ(curves.substr(0, curves.find('\n')), "curve,V[m3/mol],T[K],detJ");
  EXPECT_TRUE(fs::exists(dir_ / "images.csv"));
}

TEST_F(Cli, Demo1dPrintsRoots) {
  ASSERT_EQ(run("demo1d --q 1,-2,3 --format json --out '" + (dir_ / "demo.json").string() + "'", dir_ / "log"), 0)
      << slurp(dir_ / "log");
  const Json j = Json::parse(slurp(dir_ / "demo.json"));
  ASSERT_TRUE(j.contains("solutions"));
  ASSERT_EQ(j["solutions"].size(), 3u);
  EXPECT_EQ(j["solutions"][0]["roots"].size(), 3u);
  EXPECT_EQ(j["solutions"][1]["roots"].size(), 2u);
  EXPECT_EQ(j["solutions"][2]["roots"].size(), 1u);
}

TEST_F(Cli, BadArgumentsExitWithTwo) {
  EXPECT_EQ(run("invert --steps notanumber", dir_ / "log"), 2);
  EXPECT_EQ(run("frobnicate", dir_ / "log"), 2);
}
