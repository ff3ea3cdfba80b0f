#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "noon/config.hpp"
#include "noon/experiments.hpp"

using namespace noon;
using config::RawConfig;

namespace {
namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NOON_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("noon_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}
}  // namespace

TEST(Config, ParsesSectionsAndPhases) {
    auto c = RawConfig::parse_string("[run]\npreset = set2\nM = 4\n[protocol]\np_theta = 3*pi/4\n");
    EXPECT_EQ(c.str("run.preset", ""), "set2");
    EXPECT_NEAR(*c.real("protocol.p_theta"), 0.75 * std::numbers::pi, 1e-15);
    EXPECT_NEAR(RawConfig::parse_string("[protocol]\np_theta = pi/6\n").real("protocol.p_theta", 0.0), std::numbers::pi / 6, 1e-15);
    EXPECT_NEAR(RawConfig::parse_string("[protocol]\np_theta = pi\n").real("protocol.p_theta", 0.0), std::numbers::pi, 1e-15);
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(RawConfig::parse_string("[run]\npreest = set1\n"), ValidationError);
    EXPECT_THROW(RawConfig::parse_string("[modle]\nU = 1\n"), ValidationError);
    EXPECT_THROW(RawConfig::parse_string("U = 1\n"), ValidationError);
}

TEST(Config, RejectsMalformedValues) {
    EXPECT_THROW(RawConfig::parse_string("[run]\nM = four\n").integer("run.M", 0), ValidationError);
    EXPECT_THROW(RawConfig::parse_string("[model]\nJ = 1.0x\n").real("model.J", 0.0), ValidationError);
    EXPECT_THROW(RawConfig::parse_string("[protocol]\np_theta = 2pi\n").real("protocol.p_theta", 0.0), ValidationError);
}

TEST(Config, PhysicsValidation) {
    EXPECT_THROW(config::protocol_config(RawConfig::parse_string("[run]\nM = 5\nP = 5\n")), ValidationError);
    EXPECT_THROW(config::protocol_config(RawConfig::parse_string("[run]\nM = 4\nP = 10\n")), ValidationError);
    EXPECT_THROW(config::protocol_config(RawConfig::parse_string("[run]\npreset = set9\n")), ValidationError);
    EXPECT_THROW(config::protocol_config(RawConfig::parse_string("[model]\nU = 70\n")), ValidationError);
    const auto c = config::protocol_config(RawConfig::parse_string("[model]\nU0 = 10\nU = 5\nJ = 1\nmu = 2\n"));
    EXPECT_EQ(c.params.U12, 30.0);
    EXPECT_EQ(c.nu, 2.0);
}

TEST(Experiments, PresetsListing) {
    const auto out = experiments::run("presets", RawConfig{});
    ASSERT_EQ(out.tables.size(), 1u);
    const auto& t = out.tables[0].second;
    ASSERT_EQ(t.rows().size(), 2u);
    EXPECT_EQ(t.rows()[0][0], "set1");
    EXPECT_EQ(t.rows()[0][1], "75.876");
    EXPECT_EQ(t.rows()[1][2], "73.219");
    EXPECT_NE(t.str(io::Format::tsv).find("set2\t76.519\t73.219\t15.168"), std::string::npos);
}

TEST(Experiments, Protocol1RowsAndDeterminism) {
    auto c = RawConfig::parse_string("[run]\ngrid = 3\n");
    const auto a = experiments::run("protocol1", c);
    const auto b = experiments::run("protocol1", c);
    const auto& t = a.tables[0].second;
    EXPECT_EQ(t.rows().size(), 3u * 16u);
    EXPECT_EQ(t.str(io::Format::csv), b.tables[0].second.str(io::Format::csv));
    std::ostringstream m;
    a.manifest.write(m);
    EXPECT_NE(m.str().find("t_m = 36.95"), std::string::npos);
    EXPECT_NE(m.str().find("units"), std::string::npos);
}

TEST(Experiments, UnknownKind) { EXPECT_THROW(experiments::run("fig9", RawConfig{}), ValidationError); }

TEST(Cli, WritesTablesAndManifest) {
    const auto dir = temp_dir("presets");
    ASSERT_EQ(run_cli("presets --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "presets.csv"));
    EXPECT_TRUE(fs::exists(dir / "presets_manifest.txt"));
    EXPECT_EQ(slurp(dir / "presets.csv").rfind("# units:", 0), 0u);
}

TEST(Cli, ByteIdenticalReruns) {
    const auto d1 = temp_dir("rerun1");
    const auto d2 = temp_dir("rerun2");
    ASSERT_EQ(run_cli("protocol2 --preset set2 --grid 4 --format tsv --out " + d1.string()), 0);
    ASSERT_EQ(run_cli("protocol2 --preset set2 --grid 4 --format tsv --out " + d2.string()), 0);
    EXPECT_EQ(slurp(d1 / "protocol2.tsv"), slurp(d2 / "protocol2.tsv"));
    EXPECT_EQ(slurp(d1 / "protocol2_manifest.txt"), slurp(d2 / "protocol2_manifest.txt"));
}

TEST(Cli, ExitCodes) {
    const auto dir = temp_dir("codes");
    const auto bad = dir / "bad.ini";
    std::ofstream(bad) << "[run]\nM = 5\nP = 5\n";
    EXPECT_EQ(run_cli("protocol1 --config " + bad.string() + " --out " + dir.string()), 1);
    const auto typo = dir / "typo.ini";
    std::ofstream(typo) << "[run]\ngird = 5\n";
    EXPECT_EQ(run_cli("protocol1 --config " + typo.string() + " --out " + dir.string()), 1);
    EXPECT_EQ(run_cli("nonsense"), 1);
    EXPECT_EQ(run_cli("presets --format xml"), 1);
    const auto noroot = dir / "noroot.ini";
    std::ofstream(noroot) << "[lattice]\nanisotropy = standard\n";
    EXPECT_EQ(run_cli("physical --config " + noroot.string() + " --out " + dir.string()), 1);
}

TEST(Config, EmptySectionAllowed) {
    EXPECT_NO_THROW(RawConfig::parse_string("[run]\n[model]\nU = 70\n"));
    EXPECT_FALSE(RawConfig::parse_string("[run]\n").has("run.preset"));
}
