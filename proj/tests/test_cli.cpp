#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lqw/cli.hpp"
#include "lqw/errors.hpp"
#include "lqw/report.hpp"

using namespace lqw;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("lqw_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST(CliTargets, Parse) {
    EXPECT_EQ(parse_targets("1,6"), (std::vector<GridVertex>{{1, 6}}));
    EXPECT_EQ(parse_targets("4,10;14,8;0,12").size(), 3u);
    EXPECT_THROW(parse_targets(""), DomainError);
    EXPECT_THROW(parse_targets("1;2"), DomainError);
    EXPECT_THROW(parse_targets("1,2,3"), DomainError);
    EXPECT_THROW(parse_targets("a,b"), DomainError);
}

TEST(Cli, SimulateTraceStartsAtMOverN) {
    const auto r = cli({"simulate", "--side", "16", "--targets", "1,6", "--na", "8.5", "--mode", "hn4",
                        "--steps", "3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream in(r.out);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "step,probability");
    EXPECT_EQ(first, "0,0.00390625");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({"simulate", "--side", "16", "--targets", "", "--na", "8.5"}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate", "--side", "12", "--targets", "1,1", "--na", "8.5"}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate", "--side", "16", "--targets", "1,6"}).code, kExitUsage);
    EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"sweep", "--side", "16", "--targets", "1,6", "--na-min", "5", "--na-max", "1"}).code,
              kExitUsage);
    EXPECT_EQ(cli({"sweep", "--side", "16", "--targets", "1,6", "--steps", "8", "--na-min", "8",
                   "--na-max", "8"})
                  .code,
              kExitNoPeak);
    EXPECT_EQ(cli({"density", "--sides", "16", "--fraction", "1.0"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, ResourceLimit) {
    ::setenv("LQW_MEMORY_LIMIT", "1000", 1);
    const auto r = cli({"simulate", "--side", "64", "--targets", "1,6", "--na", "8.5", "--steps", "2"});
    ::unsetenv("LQW_MEMORY_LIMIT");
    EXPECT_EQ(r.code, kExitResource) << r.err;
}

TEST(Cli, ExceptionalTargetsWarn) {
    const auto r = cli({"simulate", "--side", "16", "--targets", "4,10;14,8;0,12", "--na", "25.0",
                        "--steps", "2"});
    EXPECT_EQ(r.code, kExitOk) << r.err;

    const auto w = cli({"simulate", "--side", "16", "--targets", "7,3;2,2", "--na", "17", "--steps", "2"});
    EXPECT_EQ(w.code, kExitOk);
    EXPECT_NE(w.err.find("warning: target (7,3)"), std::string::npos);
    EXPECT_EQ(w.err.find("(2,2)"), std::string::npos);
}

TEST_F(CliFiles, ManifestAndByteIdenticalReruns) {
    const std::vector<std::string> base{"scale", "--sides", "16,32", "--trials", "2", "--quiet",
                                        "--workers", "1", "--out"};
    auto a = base, b = base;
    a.push_back(path("a.csv"));
    b.push_back(path("b.csv"));
    ASSERT_EQ(cli(a).code, kExitOk);
    ASSERT_EQ(cli(b).code, kExitOk);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));

    const auto manifest = nlohmann::json::parse(slurp(path("a.csv.manifest.json")));
    EXPECT_EQ(manifest["command"], "scale");
    EXPECT_EQ(manifest["prng"], "mt19937_64+rejection+splitmix64");
    EXPECT_EQ(manifest["seed"], 1);
    EXPECT_EQ(manifest["parameters"]["trials"], 2);
    EXPECT_EQ(manifest["parameters"]["sides"], nlohmann::json({16, 32}));
}

TEST_F(CliFiles, FitRoundTrip) {
    std::ofstream(path("t.csv")) << "side,n_elements,m,na,mode,seed,trial,peak_step,peak_probability,amplified_cost\n"
                                    "64,4096,1,8.5,hn4,1,0,128,1,128\n"
                                    "128,16384,1,8.5,hn4,2,0,256,1,256\n"
                                    "256,65536,1,8.5,hn4,3,0,512,1,512\n"
                                    "256,65536,2,8.5,grid,3,0,1,1,1\n";
    const auto r = cli({"fit", "--in", path("t.csv"), "--model", "sqrt", "--mode", "hn4", "--out",
                        path("fit.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto fit = nlohmann::json::parse(slurp(path("fit.json")));
    EXPECT_DOUBLE_EQ(fit["coefficient"].get<double>(), 2.0);
    EXPECT_EQ(fit["points"], 3);
    EXPECT_TRUE(fs::exists(path("fit.json.manifest.json")));

    EXPECT_EQ(cli({"fit", "--in", path("missing.csv")}).code, kExitUsage);
}

TEST_F(CliFiles, SweepThenRecordsRoundTrip) {
    const auto r = cli({"sweep", "--side", "16", "--targets", "1,6", "--na-min", "6", "--na-max", "10",
                        "--na-step", "2", "--out", path("s.csv")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto text = slurp(path("s.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "na,peak_step,peak_probability,optimal");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);

    ASSERT_EQ(cli({"scale", "--sides", "16", "--trials", "3", "--quiet", "--out", path("r.csv")}).code,
              kExitOk);
    std::ifstream in(path("r.csv"));
    const auto records = read_records_csv(in);
    ASSERT_EQ(records.size(), 3u);
    std::ostringstream again;
    write_records_csv(again, records);
    EXPECT_EQ(again.str(), slurp(path("r.csv")));
}
