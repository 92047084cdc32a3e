#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

using nlohmann::json;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "cone_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = conelab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "cone_lab_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

TEST(Cli, PolesListDoubleRootAtZero) {
    Outcome o = run({"poles", "--operator", "laplacian", "--n", "1", "--modes", "5", "--strip", "-3", "3"});
    ASSERT_EQ(o.code, 0) << o.err;
    json d = json::parse(o.out);
    EXPECT_EQ(d["config"]["subcommand"], "poles");
    bool found = false;
    for (const auto& p : d["points"])
        if (p["exact"] == "0") {
            found = true;
            EXPECT_EQ(p["order"], 2);
        }
    EXPECT_TRUE(found);
}

TEST(Cli, DomainsForAbcd) {
    Outcome o = run({"domains", "--operator", "example-abcd", "--gamma", "0"});
    ASSERT_EQ(o.code, 0) << o.err;
    json d = json::parse(o.out);
    EXPECT_EQ(d["minimal"]["space"], "H^{2,2}");
    EXPECT_EQ(d["maximal"]["asymptotics"]["dimension"], 2);
}

TEST(Cli, CheckFriedrichsPasses) {
    Outcome o = run({"check", "--operator", "laplacian", "--n", "1", "--gamma", "0", "--extension", "friedrichs", "--theta",
                     "1.5708", "--e3-method", "both"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(json::parse(o.out)["overall"].get<bool>());
}

TEST(Cli, CheckFailureExitsOne) {
    Outcome o = run({"check", "--n", "1", "--extension", "q=0:log-only", "--theta", "1.5708"});
    EXPECT_EQ(o.code, 1);
    EXPECT_FALSE(json::parse(o.out)["overall"].get<bool>());
}

TEST(Cli, ExtensionRoundTripThroughFile) {
    Outcome listed = run({"extensions", "--n", "1", "--filter", "dilation-invariant"});
    ASSERT_EQ(listed.code, 0) << listed.err;
    json d = json::parse(listed.out);
    ASSERT_EQ(d["extensions"].size(), 3u);
    for (std::size_t i = 0; i < d["extensions"].size(); ++i) {
        auto path = scratch("ext" + std::to_string(i) + ".json");
        std::ofstream(path) << d["extensions"][i].dump();
        Outcome c = run({"check", "--n", "1", "--extension", "@" + path.string(), "--theta", "1.5708"});
        EXPECT_NE(c.code, 2) << c.err;
        EXPECT_NE(c.code, 3) << c.err;
        json r = json::parse(c.out);
        EXPECT_EQ(r["extension"]["spec"], d["extensions"][i]["spec"]);
    }
    auto list_path = scratch("exts.json");
    std::ofstream(list_path) << d.dump();
    Outcome c = run({"check", "--n", "1", "--extension", "@" + list_path.string(), "--extension-index", "1"});
    EXPECT_EQ(json::parse(c.out)["extension"]["spec"], d["extensions"][1]["spec"]);
}

TEST(Cli, ConfigEchoIsStable) {
    Outcome a = run({"spectrum", "--n", "1", "--modes", "2", "--interval", "1", "20"});
    Outcome b = run({"spectrum", "--n", "1", "--modes", "2", "--interval", "1", "20"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    json d = json::parse(a.out);
    EXPECT_EQ(d["config"]["options"]["interval"], "1 20");
}

TEST(Cli, CsvOutput) {
    Outcome o = run({"poles", "--n", "1", "--modes", "3", "--strip", "-3", "3", "--csv"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find(','), std::string::npos);
    EXPECT_FALSE(json::accept(o.out));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"poles", "--operator", "no-such-operator"}).code, 2);
    EXPECT_EQ(run({"poles", "--strip", "1"}).code, 2);
    EXPECT_EQ(run({"check", "--extension", "@/nonexistent/file.json"}).code, 2);
}

TEST(Cli, CorruptedFileIsNumericalError) {
    auto path = scratch("corrupt.json");
    std::ofstream(path) << "{\"mu\": 2, \"n\": 1, \"coeffs\": [[0, [[0, [0, 1";
    Outcome o = run({"poles", "--operator", "@" + path.string()});
    EXPECT_EQ(o.code, 3);
    json d = json::parse(o.out);
    EXPECT_TRUE(d.contains("error"));
}

TEST(Cli, ModuleErrorCarriesName) {
    Outcome spec = run({"spectrum", "--n", "1", "--modes", "2", "--interval", "1", "10"});
    ASSERT_EQ(spec.code, 0) << spec.err;
    const double mu = json::parse(spec.out)["eigenvalues"][0]["value"].get<double>();
    std::ostringstream lambda;
    lambda.precision(17);
    lambda << mu;
    Outcome o = run({"resolvent", "--n", "1", "--modes", "2", "--lambda", lambda.str(), "0"});
    ASSERT_EQ(o.code, 3);
    json d = json::parse(o.out);
    EXPECT_EQ(d["error"]["name"], "IllConditioned");
    EXPECT_EQ(d["error"]["module"], "resolvent");
}

TEST(Cli, SelftestSubset) {
    Outcome o = run({"selftest", "--criteria", "A2"});
    EXPECT_EQ(o.code, 0) << o.out;
    EXPECT_NE(o.out.find("A2"), std::string::npos);
    EXPECT_EQ(o.out.find("A3"), std::string::npos);
}

}  // namespace
