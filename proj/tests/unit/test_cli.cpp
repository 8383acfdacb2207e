#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "tcx/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome tcx_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = tcx::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("tcx_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string synth(const std::vector<std::string>& extra = {}) {
        std::vector<std::string> args{"synth", "--count", "3000", "--actors", "200", "--categories", "20",
                                      "--seed", "7", "--output", path("records.csv")};
        args.insert(args.end(), extra.begin(), extra.end());
        EXPECT_EQ(tcx_run(args).code, 0);
        return path("records.csv");
    }

    fs::path dir_;
};

const std::string kSchmoch = TCX_DATA_DIR "/schmoch35.csv";

std::map<std::string, double> tci_column(const std::string& csv, const std::string& metric) {
    std::map<std::string, double> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() == 4 && f[0] == "category" && f[2] == metric) out[f[1]] = std::stod(f[3]);
    }
    return out;
}

}  // namespace

TEST_F(CliTest, UsageErrors) {
    const auto records = synth();
    EXPECT_EQ(tcx_run({}).code, tcx::cli::kUsage);
    EXPECT_EQ(tcx_run({"ingest", "--records", records}).code, tcx::cli::kUsage);  // schmoch needs a table
    EXPECT_EQ(tcx_run({"ingest", "--records", records, "--scheme", "ipc3", "--share", "0"}).code, tcx::cli::kUsage);
    EXPECT_EQ(tcx_run({"ingest", "--records", records, "--scheme", "ipc3", "--share", "1.5"}).code,
              tcx::cli::kUsage);
    EXPECT_EQ(tcx_run({"ingest", "--records", path("missing.csv"), "--scheme", "ipc3"}).code, tcx::cli::kUsage);
    EXPECT_EQ(tcx_run({"analyze", "region-pair", "--records", records, "--scheme", "ipc3", "--regions", "x"}).code,
              tcx::cli::kUsage);
    EXPECT_EQ(tcx_run({"--version"}).code, tcx::cli::kOk);
}

TEST_F(CliTest, DataErrorsExitTwo) {
    tcx::io::write_file(path("bad.csv"), "nothing,useful\n1,2\n");
    const auto r = tcx_run({"ingest", "--records", path("bad.csv"), "--scheme", "ipc3", "--out", path("o")});
    EXPECT_EQ(r.code, tcx::cli::kData) << r.err;
    tcx::io::write_file(path("w.csv"), "actor,category,weight\nx,y,abc\n");
    EXPECT_EQ(tcx_run({"compute", "--weights", path("w.csv"), "--scheme", "ipc3", "--out", path("o")}).code,
              tcx::cli::kData);
}

TEST_F(CliTest, ComputeErrorsExitThree) {
    tcx::io::write_file(path("identity.csv"), "actor,category,weight\na,s,1\nb,t,1\n");
    const auto r =
        tcx_run({"compute", "--weights", path("identity.csv"), "--scheme", "ipc3", "--out", path("o")});
    EXPECT_EQ(r.code, tcx::cli::kCompute);
    EXPECT_NE(r.err.find("disconnected"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("o/tci_ipc3_corporate_1981-2010.csv")));
}

TEST_F(CliTest, NestedWeightsReproduceKnownScores) {
    // RTA >= 0.5 binarizes this to the nested staircase.
    tcx::io::write_file(path("nested.csv"),
                        "actor,category,weight\nc1,t1,1\nc1,t2,1\nc1,t3,1\nc2,t1,1\nc2,t2,1\nc3,t1,1\n");
    const auto r = tcx_run({"compute", "--weights", path("nested.csv"), "--scheme", "ipc3", "--threshold", "0.5",
                            "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = tcx::io::read_file(path("o/tci_ipc3_corporate_1981-2010.csv"));
    const auto scaled = tci_column(csv, "tci_scaled");
    EXPECT_NEAR(scaled.at("t1"), 0.0, 1e-9);
    EXPECT_NEAR(scaled.at("t2"), 50.0, 1e-9);
    EXPECT_NEAR(scaled.at("t3"), 100.0, 1e-9);
    EXPECT_NEAR(tci_column(csv, "tci").at("t3"), std::sqrt(1.5), 1e-11);
    const auto diag = json::parse(tcx::io::read_file(path("o/diagnostics_ipc3_corporate_1981-2010.json")));
    EXPECT_NEAR(diag["eigenvalue2"].get<double>(), 0.25, 1e-11);
}

TEST_F(CliTest, RejectsAndManifest) {
    const auto r = tcx_run({"ingest", "--records", TCX_TEST_DATA_DIR "/unmapped_two.csv", "--scheme", "schmoch35",
                            "--concordance", kSchmoch, "--share", "1", "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rejects = tcx::io::read_file(path("o/rejects_schmoch35_corporate_1981-2010.csv"));
    EXPECT_EQ(std::count(rejects.begin(), rejects.end(), '\n'), 3);
    const auto m = json::parse(tcx::io::read_file(path("o/manifest_ingest_schmoch35_corporate_1981-2010.json")));
    EXPECT_EQ(m["stats"]["unmapped"], 2);
    EXPECT_EQ(m["stats"]["accepted"], 3);
    EXPECT_EQ(m["stats"]["total_weight"].get<double>(), 3.0);
    for (const auto& o : m["outputs"]) {
        EXPECT_EQ(o["digest"], tcx::io::file_digest(path("o/" + o["file"].get<std::string>())));
    }
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    const auto records = synth();
    const std::vector<std::string> base{"--records", records, "--scheme", "schmoch35", "--concordance", kSchmoch,
                                        "--share", "0.1", "--out", path("o")};
    auto run_all = [&] {
        auto args = std::vector<std::string>{"compute"};
        args.insert(args.end(), base.begin(), base.end());
        const auto r = tcx_run(args);
        ASSERT_EQ(r.code, 0) << r.err;
        args[0] = "panel";
        args.insert(args.begin(), "analyze");
        ASSERT_EQ(tcx_run(args).code, 0);
    };
    auto snapshot = [&] {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::directory_iterator(path("o"))) {
            if (e.is_regular_file()) files[e.path().filename().string()] = tcx::io::read_file(e.path().string());
        }
        return files;
    };
    run_all();
    const auto first = snapshot();
    fs::remove_all(path("o"));
    run_all();
    const auto second = snapshot();
    EXPECT_GE(first.size(), 9u);
    EXPECT_EQ(first, second);
}

TEST_F(CliTest, RollingFullWidthMatchesCompute) {
    const auto records = synth();
    const std::vector<std::string> base{"--records", records, "--scheme", "ipc3", "--share", "0.1",
                                        "--out", path("o")};
    auto compute = std::vector<std::string>{"compute"};
    compute.insert(compute.end(), base.begin(), base.end());
    ASSERT_EQ(tcx_run(compute).code, 0);
    auto rolling = std::vector<std::string>{"analyze", "rolling", "--width", "30"};
    rolling.insert(rolling.end(), base.begin(), base.end());
    const auto r = tcx_run(rolling);
    ASSERT_EQ(r.code, 0) << r.err;

    const auto tci = tci_column(tcx::io::read_file(path("o/tci_ipc3_corporate_1981-2010.csv")), "tci");
    const auto table = tcx::io::read_file(path("o/rolling_ipc3_corporate_1981-2010_w30s1.csv"));
    for (const auto& [cat, v] : tci) {
        const auto needle = "1981-2010,ipc3,corporate," + cat + ",tci," + tcx::io::format_number(v) + ",";
        EXPECT_NE(table.find(needle), std::string::npos) << needle;
    }
    // Second run is served from the cache and writes the same table.
    ASSERT_EQ(tcx_run(rolling).code, 0);
    EXPECT_EQ(tcx::io::read_file(path("o/rolling_ipc3_corporate_1981-2010_w30s1.csv")), table);
    EXPECT_FALSE(fs::is_empty(path("o/cache")));
}

TEST_F(CliTest, ConsistencyAndRegionPair) {
    const auto records = path("records.csv");
    ASSERT_EQ(tcx_run({"synth", "--count", "8000", "--actors", "150", "--categories", "8", "--regions", "2",
                       "--seed", "5", "--output", records})
                  .code,
              0);
    const auto wide = path("wide.csv");
    ASSERT_EQ(tcx_run({"synth", "--count", "4000", "--actors", "200", "--categories", "20", "--seed", "7",
                       "--output", wide})
                  .code,
              0);
    auto r = tcx_run({"analyze", "consistency", "--records", wide, "--concordance", kSchmoch, "--share", "0.2",
                      "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("o/consistency_ipc3-schmoch35_both_1981-2010.csv")));

    r = tcx_run({"analyze", "region-pair", "--regions", "region01,region02", "--records", records, "--scheme",
                 "ipc3", "--share", "0.5", "--largest-component", "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto pair = tcx::io::read_file(path("o/region-pair_ipc3_corporate_1981-2010_region01-region02.csv"));

    r = tcx_run({"compute", "--region", "region01", "--records", records, "--scheme", "ipc3", "--share", "0.5",
                 "--largest-component", "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto scaled =
        tci_column(tcx::io::read_file(path("o/tci_ipc3_corporate_1981-2010_region01.csv")), "tci_scaled");
    ASSERT_FALSE(scaled.empty());
    for (const auto& [cat, v] : scaled) {
        const auto needle = "," + cat + ",tci_scaled@region01," + tcx::io::format_number(v) + ",";
        EXPECT_NE(pair.find(needle), std::string::npos) << needle;
    }
}

TEST_F(CliTest, ConfigFileAndInspect) {
    const auto records = synth();
    tcx::io::write_file(path("run.toml"), "scheme = \"ipc3\"\nshare = 0.1\nout = \"" + path("o") + "\"\n");
    auto r = tcx_run({"ingest", "--config", path("run.toml"), "--records", records});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = path("o/manifest_ingest_ipc3_corporate_1981-2010.json");
    ASSERT_TRUE(fs::exists(manifest));
    EXPECT_EQ(json::parse(tcx::io::read_file(manifest))["config"]["share"], 0.1);

    // Command-line values win over the file.
    r = tcx_run({"ingest", "--config", path("run.toml"), "--records", records, "--share", "0.2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(tcx::io::read_file(manifest))["config"]["share"], 0.2);

    r = tcx_run({"inspect", path("o")});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("manifest_ingest_ipc3_corporate_1981-2010.json: ingest"), std::string::npos) << r.out;
}
