#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

namespace
{

struct run_result
{
    int code = -1;
    std::string out;
};

std::string quote(const std::string &arg)
{
    std::string q = "'";
    for (const char c : arg) {
        if (c == '\'') {
            q += "'\\''";
        } else {
            q += c;
        }
    }
    return q + "'";
}

run_result run(const std::vector<std::string> &args)
{
    std::string cmd = quote(ELLREG_CLI_PATH);
    for (const auto &a : args) {
        cmd += " " + quote(a);
    }
    cmd += " 2>/dev/null";
    run_result r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

nlohmann::json run_json(const std::vector<std::string> &args, int expected_code = 0)
{
    const auto r = run(args);
    EXPECT_EQ(r.code, expected_code) << r.out;
    return nlohmann::json::parse(r.out);
}

std::complex<double> as_complex(const nlohmann::json &j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

} // namespace

TEST(Cli, TriangleAtTwoI)
{
    const auto j = run_json({"integrate", "--tau", "0+2i", "--json", "wp(1-2)*wp(2-3)*wp(3-1)"});
    const auto consts = run_json({"constants", "--tau", "0+2i", "--json"}).at("constants");
    const auto g2 = as_complex(consts.at("g2"));
    const auto g3 = as_complex(consts.at("g3"));
    const auto eta = as_complex(consts.at("eta1hat"));
    const auto want = g3 / 4.0 - g2 * eta / 4.0;
    EXPECT_EQ(j.at("command"), "integrate");
    EXPECT_LT(std::abs(as_complex(j.at("value")) - want) / std::abs(want), 1e-10);
    EXPECT_EQ(j.at("steps").size(), 3u);
    EXPECT_EQ(j.at("exit_hint"), "ok");
}

TEST(Cli, ZhatIntegratesToZero)
{
    const auto j = run_json({"integrate", "--tau", "0+1i", "--json", "Z(1-2)"});
    EXPECT_LT(std::abs(as_complex(j.at("value"))), 1e-12);
}

TEST(Cli, TraceShowsChainIntermediate)
{
    const auto j = run_json({"integrate", "--tau", "0+1i", "--trace", "--json", "--order", "1,2,3", "wp(1-2)*wp(2-3)"});
    const auto &first = j.at("steps").at(0);
    EXPECT_EQ(first.at("var"), 1);
    EXPECT_EQ(first.at("result"), "-eta1h*wp(2-3)");
    EXPECT_EQ(first.at("anchor"), 2);
    EXPECT_FALSE(first.at("residues").empty());
    const auto text = run({"integrate", "--tau", "0+1i", "--trace", "wp(1-2)*wp(2-3)"});
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("-eta1h*wp(2-3)"), std::string::npos);
}

TEST(Cli, OrderIsHonoured)
{
    const auto j = run_json({"integrate", "--tau", "0.3+1.7i", "--json", "--order", "3,1,2", "wp(1-2)*wp(2-3)"});
    EXPECT_EQ(j.at("steps").at(0).at("var"), 3);
    const auto k = run_json({"integrate", "--tau", "0.3+1.7i", "--json", "wp(1-2)*wp(2-3)"});
    EXPECT_LT(std::abs(as_complex(j.at("value")) - as_complex(k.at("value"))), 1e-12);
}

TEST(Cli, ParseErrorsExitOne)
{
    const auto j = run_json({"integrate", "--tau", "0+1i", "--json", "wp(1-"}, 1);
    EXPECT_EQ(j.at("error").at("kind"), "SyntaxError");
    EXPECT_EQ(j.at("error").at("offset"), 5);
    EXPECT_EQ(run({"integrate", "--tau", "0+1i", "wp(1-1)"}).code, 1);
    EXPECT_EQ(run({"integrate", "--tau", "0+1i", "foo"}).code, 1);
}

TEST(Cli, BadArgumentsExitOne)
{
    EXPECT_EQ(run({"integrate", "--tau", "0-1i", "wp(1-2)"}).code, 1);
    EXPECT_EQ(run({"integrate", "--tau", "1i", "wp(1-2)"}).code, 1);
    EXPECT_EQ(run({"integrate", "--tau", "0+1i", "--order", "1,1", "wp(1-2)"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"pv", "--tau", "0+1i", "--var", "1", "--fix", "2=0.5", "wp(1-2)"}).code, 1);
}

TEST(Cli, PvAgreesWithEngine)
{
    const auto j = run_json(
        {"pv", "--tau", "0+2i", "--var", "3", "--fix", "1=0.13+0.21i,2=0.57+0.89i", "--json", "wp(3-1)*wp(3-2)"});
    const auto &oracle = j.at("oracle");
    EXPECT_TRUE(oracle.at("converged").get<bool>());
    EXPECT_EQ(oracle.at("per_eps").size(), 3u);
    const auto engine = as_complex(j.at("value"));
    EXPECT_LT(std::abs(as_complex(oracle.at("value")) - engine) / std::abs(engine), 1e-8);
}

TEST(Cli, PvWithCustomRadii)
{
    const auto j = run_json({"pv", "--tau", "0+1i", "--var", "2", "--fix", "1=0.3+0.4i", "--eps", "0.2,0.1,0.05,0.025",
                             "--json", "Z(2-1)*wp(2-1)"});
    EXPECT_EQ(j.at("oracle").at("per_eps").size(), 4u);
    EXPECT_TRUE(j.at("oracle").at("converged").get<bool>());
}

TEST(Cli, PvNonConvergenceExitsTwo)
{
    // A tolerance nothing can meet reports the oracle as unconverged.
    const auto r = run({"pv", "--tau", "0+1i", "--var", "1", "--fix", "2=0.3+0.4i", "--tolerance", "1e-30", "wp(1-2)^2"});
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, ConstantsAtSquareLattice)
{
    const auto j = run_json({"constants", "--tau", "0+1i", "--json"});
    const auto &c = j.at("constants");
    EXPECT_NEAR(as_complex(c.at("eta1")).real(), M_PI, 1e-12);
    EXPECT_LT(std::abs(as_complex(c.at("eta1hat"))), 1e-12);
    EXPECT_LT(std::abs(as_complex(c.at("E6"))), 1e-12);
}

TEST(Cli, ExpandPrintsSeries)
{
    const auto r = run({"expand", "--tau", "0+1i", "--var", "1", "--at", "2", "--order", "1", "Z(1-3)"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("w^0: Z(2-3)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("w^1: -eta1h - wp(2-3)"), std::string::npos) << r.out;
    const auto j = run_json({"expand", "--tau", "0+1i", "--var", "1", "--at", "2", "--order", "2", "--fix",
                             "2=0.1+0.2i,3=0.5+0.6i", "--json", "wp(1-2)*wp(1-3)"});
    EXPECT_EQ(j.at("command"), "expand");
}

TEST(Cli, JsonIsDeterministic)
{
    const std::vector<std::string> args{"integrate", "--tau", "0.3+1.7i", "--trace", "--json",
                                        "wp(1-2)*wp(2-3)*wp(3-1) + Z(1-2)*wp(2-3)"};
    auto a = run_json(args);
    auto b = run_json(args);
    a.erase("timing_ms");
    b.erase("timing_ms");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, KernelSuitePasses)
{
    const auto j = run_json({"check", "--suite", "kernel", "--json"});
    ASSERT_FALSE(j.at("checks").empty());
    for (const auto &c : j.at("checks")) {
        EXPECT_TRUE(c.at("pass").get<bool>()) << c.at("name");
    }
}

TEST(Cli, PaperSuiteReportsOnlyTheSquareLatticeTarget)
{
    const auto j = run_json({"check", "--suite", "paper", "--json"}, 3);
    int failed = 0;
    for (const auto &c : j.at("checks")) {
        if (!c.at("pass").get<bool>()) {
            ++failed;
            EXPECT_EQ(c.at("name"), "contour_wp_minus_pi");
        }
    }
    EXPECT_EQ(failed, 1);
}
