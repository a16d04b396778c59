#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include "fisc/cli/app.hpp"

namespace fs = std::filesystem;
using fisc::cli::run;

namespace {

std::string data(const std::string& name) {
    return (fs::path(FISC_TEST_DATA_DIR) / "cli" / name).string();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("fisc-cli-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) { return fisc::cli::detail::read_file(p.string()); }

struct Result {
    int code;
    std::string out, err;
};

Result fisc_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fisc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Report, MatchesHandWorkedGolden) {
    auto dir = scratch("report");
    auto r = fisc_cli({"report", data("ledger.jsonl"), "--config", data("policy.conf"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "report.csv"), slurp(data("ledger_fifo.csv")));
    const std::string totals = slurp(dir / "totals.json");
    EXPECT_NE(totals.find("\"ordinary_income\": \"15000.00000000\""), std::string::npos) << totals;
    EXPECT_NE(totals.find("\"short_term_gain\": \"40000.00000000\""), std::string::npos) << totals;
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest["command"], "report");
    EXPECT_EQ(manifest["arguments"]["method"], "FIFO");
    EXPECT_EQ(manifest["config"]["path"], data("policy.conf"));
    EXPECT_EQ(manifest["outputs"].size(), 2u);
    EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(Report, EmptyEventsGiveZeroReport) {
    auto dir = scratch("empty");
    auto r = fisc_cli({"report", data("empty.jsonl"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "report.csv"), "seq,date,kind,asset,qty,proceeds,basis,gain,term\n");
    EXPECT_NE(slurp(dir / "totals.json").find("\"lines\": 0"), std::string::npos);
}

TEST(Report, DisallowedMethodFails) {
    auto dir = scratch("disallowed");
    auto r = fisc_cli({"report", data("ledger.jsonl"), "--config", data("policy.conf"), "--method", "LIFO", "--out",
                       dir.string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("LIFO is not allowed under policy fixture"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir / "manifest.json"));
}

TEST(Report, MalformedLineIsNamed) {
    auto r = fisc_cli({"report", data("bad_line.jsonl"), "--out", scratch("bad").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(data("bad_line.jsonl") + ":3: "), std::string::npos) << r.err;
}

TEST(Report, ConfigFallsBackToEnvironment) {
    ::setenv("FISC_CONFIG", data("policy.conf").c_str(), 1);
    auto r = fisc_cli({"report", data("ledger.jsonl"), "--method", "LIFO", "--out", scratch("env").string()});
    ::unsetenv("FISC_CONFIG");
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Usage, BadArgumentsExitTwo) {
    EXPECT_EQ(fisc_cli({}).code, 2);
    EXPECT_EQ(fisc_cli({"report", data("ledger.jsonl")}).code, 2);
    EXPECT_EQ(fisc_cli({"simulate", "volcano", "x.json", "--out", "o"}).code, 2);
    EXPECT_EQ(fisc_cli({"report", data("ledger.jsonl"), "--method", "Astrology", "--out", "o"}).code, 2);
    EXPECT_EQ(fisc_cli({"--help"}).code, 0);
}

TEST(SimulatePool, K1600SwapReturnsEight) {
    auto dir = scratch("pool");
    auto r = fisc_cli({"simulate", "pool", data("pool_k1600.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string events = slurp(dir / "events.jsonl");
    EXPECT_NE(events.find("\"kind\":\"swap\""), std::string::npos) << events;
    EXPECT_NE(events.find("\"to_qty\":\"8000000000000000000\""), std::string::npos) << events;
    auto state = nlohmann::json::parse(slurp(dir / "pool_state.json"));
    EXPECT_EQ(state["reserve_x"], "50.000000000000000000");
    EXPECT_EQ(state["reserve_y"], "32.000000000000000000");
    EXPECT_EQ(state["k_units"], "1600000000000000000000000000000000000000");
}

TEST(SimulatePool, MalformedScenarioFails) {
    auto r = fisc_cli({"simulate", "pool", data("pool_malformed.json"), "--out", scratch("pool-bad").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ops[0].in"), std::string::npos) << r.err;
    auto missing = fisc_cli({"simulate", "pool", data("nope.json"), "--out", scratch("pool-missing").string()});
    EXPECT_EQ(missing.code, 2);
}

TEST(SimulateChain, HalvingVisibleInEvents) {
    auto dir = scratch("chain");
    auto r = fisc_cli({"simulate", "chain", data("chain_halving.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string events = slurp(dir / "events.jsonl");
    EXPECT_NE(events.find("\"quantity\":\"5000000000\""), std::string::npos) << events;
    EXPECT_NE(events.find("\"quantity\":\"2500000000\""), std::string::npos) << events;
    const std::string blocks = slurp(dir / "blocks.csv");
    EXPECT_NE(blocks.find("209999,1354061400,50.00000000,1d00ffff,1"), std::string::npos) << blocks;
    EXPECT_NE(blocks.find("210000,1354062000,25.00000000,"), std::string::npos) << blocks;

    // The events feed straight into a report.
    auto rep = fisc_cli({"report", (dir / "events.jsonl").string(), "--out", scratch("chain-report").string()});
    EXPECT_EQ(rep.code, 0) << rep.err;
}

TEST(SimulateValidators, RewardsAndPenalties) {
    auto dir = scratch("validators");
    auto r = fisc_cli({"simulate", "validators", data("validators.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string events = slurp(dir / "events.jsonl");
    EXPECT_NE(events.find("staking_reward"), std::string::npos);
    EXPECT_NE(events.find("slashing_penalty"), std::string::npos);
    const std::string vals = slurp(dir / "validators.csv");
    EXPECT_NE(vals.find("v3,"), std::string::npos);
    EXPECT_NE(vals.find(",slashed"), std::string::npos) << vals;
    EXPECT_NE(slurp(dir / "epochs.csv").find("0,96.000000000000000000,96.000000000000000000,1,0"), std::string::npos);
}

TEST(Attrib, AllowMatrixAffirmsAtStandardRate) {
    auto dir = scratch("allow");
    auto r = fisc_cli({"attrib", data("attrib_allow.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string trace = slurp(dir / "trace.txt");
    EXPECT_NE(trace.find("query.result"), std::string::npos);
    EXPECT_NE(trace.find("affirmed:J2"), std::string::npos) << trace;
    // 0.1 BTC at 40000 is 4000 of proceeds; 10% of that is withheld.
    EXPECT_NE(slurp(dir / "withholding.csv").find(",affirmed,J2,4000.00000000,400.00000000,"), std::string::npos);
}

TEST(Attrib, DenyMatrixWithholdsElevated) {
    auto dir = scratch("deny");
    auto r = fisc_cli({"attrib", data("attrib_deny.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(dir / "withholding.csv").find(",unaffirmed,,4000.00000000,1200.00000000,"), std::string::npos)
        << slurp(dir / "withholding.csv");
}

TEST(Attrib, ConfigSuppliesBasePolicy) {
    auto dir = scratch("attrib-cfg");
    auto cfg = scratch("attrib-cfg.conf");
    fs::create_directories(cfg.parent_path());
    std::ofstream(cfg) << "elevated_withholding = 50%\nstandard_withholding = 5%\n";
    auto r = fisc_cli({"attrib", data("attrib_deny.json"), "--config", cfg.string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    // The scenario's own rates win over the config file.
    EXPECT_NE(slurp(dir / "withholding.csv").find(",1200.00000000,"), std::string::npos);
}

TEST(Reruns, IdenticalInputsGiveIdenticalBytes) {
    struct Case {
        std::vector<std::string> args;
    };
    const std::vector<Case> cases{
        {{"attrib", data("attrib_allow.json"), "--seed", "7"}},
        {{"simulate", "pool", data("pool_k1600.json")}},
        {{"simulate", "chain", data("chain_halving.json"), "--seed", "3"}},
        {{"report", data("ledger.jsonl"), "--method", "HIFO", "--config", data("policy.conf")}},
    };
    int n = 0;
    for (const auto& c : cases) {
        auto a = scratch("rerun-a" + std::to_string(n)), b = scratch("rerun-b" + std::to_string(n));
        ++n;
        auto args_a = c.args, args_b = c.args;
        args_a.insert(args_a.end(), {"--out", a.string()});
        args_b.insert(args_b.end(), {"--out", b.string()});
        ASSERT_EQ(fisc_cli(args_a).code, 0);
        ASSERT_EQ(fisc_cli(args_b).code, 0);
        for (const auto& entry : fs::directory_iterator(a))
            EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
    }
}

TEST(Attrib, SeedChangesTraceButNotOutcome) {
    auto a = scratch("seed-a"), b = scratch("seed-b");
    ASSERT_EQ(fisc_cli({"attrib", data("attrib_allow.json"), "--seed", "1", "--out", a.string()}).code, 0);
    ASSERT_EQ(fisc_cli({"attrib", data("attrib_allow.json"), "--seed", "2", "--out", b.string()}).code, 0);
    EXPECT_NE(slurp(a / "trace.txt"), slurp(b / "trace.txt"));
    EXPECT_EQ(nlohmann::json::parse(slurp(a / "manifest.json"))["seed"], 1);
}

TEST(Binary, ExitCodesFromProcess) {
    const std::string bin = FISC_BIN_PATH;
    auto status = [&](const std::string& args) {
        int s = std::system((bin + " " + args + " 2>/dev/null").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("report " + data("empty.jsonl") + " --out " + scratch("bin-ok").string()), 0);
    EXPECT_EQ(status("report " + data("bad_line.jsonl") + " --out " + scratch("bin-bad").string()), 2);
    EXPECT_EQ(status("report " + data("ledger.jsonl") + " --config " + data("policy.conf") +
                     " --method LIFO --out " + scratch("bin-lifo").string()),
              3);
}
