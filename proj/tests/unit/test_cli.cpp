#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pltl/cli.hpp"

using namespace pltl;
using namespace pltl::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pltl_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Run {
    int code;
    std::string out, err;
};

Run learn_with(const LearnOptions& o) {
    std::ostringstream out, err;
    const int code = run_learn(o, out, err);
    return {code, out.str(), err.str()};
}

Run check_with(const std::filesystem::path& model, const std::string& formula) {
    std::ostringstream out, err;
    const int code = run_check(model, formula, out, err);
    return {code, out.str(), err.str()};
}

const char* kC1 = R"({"states": 3, "init": 0, "ap": ["a"], "labels": [[], ["a"], []],
                     "transitions": [[0, 1, 0.3], [0, 2, 0.7], [1, 1, 1.0], [2, 2, 1.0]]})";
const char* kC2 = R"({"states": 2, "init": 0, "ap": ["a"], "labels": [[], ["a"]],
                     "transitions": [[0, 0, 0.5], [0, 1, 0.5], [1, 1, 1.0]]})";

TEST(CliCheck, PrintsInitialValue) {
    const auto dir = scratch("check");
    write(dir / "c1.json", kC1);
    write(dir / "c2.json", kC2);
    auto r = check_with(dir / "c1.json", "F(a)");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("v_I = 0.300000000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("s1 1.000000000"), std::string::npos) << r.out;
    EXPECT_NE(check_with(dir / "c2.json", "F(a)").out.find("v_I = 1.000000000"), std::string::npos);
    EXPECT_NE(check_with(dir / "c1.json", "G(!a)").out.find("v_I = 0.700000000"), std::string::npos);
}

TEST(CliCheck, ParseFailuresExitTwo) {
    const auto dir = scratch("check_bad");
    write(dir / "c1.json", kC1);
    write(dir / "broken.json", "{\"states\": 1");
    EXPECT_EQ(check_with(dir / "c1.json", "F(a &").code, kExitInputError);
    EXPECT_EQ(check_with(dir / "broken.json", "F a").code, kExitInputError);
    EXPECT_EQ(check_with(dir / "missing.json", "F a").code, kExitInputError);
    EXPECT_EQ(check_with(dir / "c1.json", "F zz").code, kExitInputError);
}

TEST(CliCheck, ReadsPrismExplicit) {
    const auto dir = scratch("check_prism");
    write(dir / "m.tra", "3 4\n0 1 0.3\n0 2 0.7\n1 1 1\n2 2 1\n");
    write(dir / "m.lab", "0=\"init\" 1=\"a\"\n0: 0\n1: 1\n");
    const auto r = check_with(dir / "m.tra", "F a");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("v_I = 0.300000000"), std::string::npos);
}

TEST(CliLearn, PlantedSafetyEndToEnd) {
    const auto dir = scratch("learn_safety");
    std::ostringstream sink;
    ASSERT_EQ(run_benchgen("planted-safety", 5, {}, dir, sink, sink), 0);
    LearnOptions o;
    o.sample = dir / "manifest.json";
    const auto r = learn_with(o);
    EXPECT_EQ(r.code, kExitSolution) << r.err;
    EXPECT_NE(r.out.find("P>"), std::string::npos);
    EXPECT_NE(r.out.find("G(!h)"), std::string::npos);
    EXPECT_NE(r.out.find("margin"), std::string::npos);
    EXPECT_NE(r.out.find("searched"), std::string::npos);
}

TEST(CliLearn, IdenticalClassesExitOne) {
    const auto dir = scratch("learn_same");
    write(dir / "c1.json", kC1);
    write(dir / "manifest.json",
          R"({"positives": ["c1.json"], "negatives": ["c1.json"], "ap": ["a"], "params": {"max_size": 4}})");
    LearnOptions o;
    o.sample = dir / "manifest.json";
    const auto r = learn_with(o);
    EXPECT_EQ(r.code, kExitNoSolution);
    EXPECT_NE(r.out.find("no formula in the search space (K=4, D=2, δ=0.05)"), std::string::npos) << r.out;
}

TEST(CliLearn, InputErrorsExitTwo) {
    const auto dir = scratch("learn_bad");
    write(dir / "c1.json", kC1);
    write(dir / "no_neg.json", R"({"positives": ["c1.json"], "negatives": [], "ap": ["a"], "params": {"max_size": 3}})");
    write(dir / "no_k.json", R"({"positives": ["c1.json"], "negatives": ["c1.json"], "ap": ["a"]})");
    write(dir / "bad_delta.json",
          R"({"positives": ["c1.json"], "negatives": ["c1.json"], "ap": ["a"], "params": {"max_size": 3, "delta": 0.5}})");
    write(dir / "missing_chain.json",
          R"({"positives": ["nope.json"], "negatives": ["c1.json"], "ap": ["a"], "params": {"max_size": 3}})");
    write(dir / "bad_format.json",
          R"({"positives": [{"path": "c1.json", "format": "dot"}], "negatives": ["c1.json"], "ap": ["a"], "params": {"max_size": 3}})");
    write(dir / "syntax.json", "{\"positives\": [\n");
    for (const char* name : {"no_neg.json", "no_k.json", "bad_delta.json", "missing_chain.json", "bad_format.json",
                             "syntax.json", "absent.json"}) {
        LearnOptions o;
        o.sample = dir / name;
        const auto r = learn_with(o);
        EXPECT_EQ(r.code, kExitInputError) << name;
        EXPECT_NE(r.err.find(name == std::string("missing_chain.json") ? "nope.json" : name), std::string::npos)
            << name << ": " << r.err;
    }
}

TEST(CliLearn, FlagsOverrideManifest) {
    const auto dir = scratch("learn_flags");
    write(dir / "c1.json", kC1);
    write(dir / "c2.json", kC2);
    write(dir / "manifest.json",
          R"({"positives": ["c2.json"], "negatives": ["c1.json"], "ap": ["a"], "params": {"max_size": 1}})");
    LearnOptions o;
    o.sample = dir / "manifest.json";
    EXPECT_EQ(learn_with(o).code, kExitNoSolution);
    o.max_size = 2;
    const auto r = learn_with(o);
    EXPECT_EQ(r.code, kExitSolution);
    EXPECT_NE(r.out.find("P>0.65 [ F(a) ]"), std::string::npos) << r.out;
}

TEST(CliLearn, StatsTableBalances) {
    const auto dir = scratch("learn_stats");
    std::ostringstream sink;
    ASSERT_EQ(run_benchgen("planted-until", 1, {}, dir, sink, sink), 0);
    LearnOptions o;
    o.sample = dir / "manifest.json";
    o.stats = true;
    const auto r = learn_with(o);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("time gbe"), std::string::npos);
    EXPECT_EQ(r.out.find("time"), std::string::npos); // timings stay off stdout
}

TEST(CliBenchgen, UnknownGeneratorExitsTwo) {
    std::ostringstream out, err;
    EXPECT_EQ(run_benchgen("nope", 1, {}, scratch("gen_bad"), out, err), kExitInputError);
    EXPECT_NE(err.str().find("unknown generator"), std::string::npos);
}

} // namespace
