#include <gtest/gtest.h>

#include "fsmt/score.hpp"

using namespace fsmt;

namespace {

RunRecord rec(RunResult r, double s, std::string solver = "fsmt") {
    RunRecord x;
    x.instance = "i";
    x.solver = std::move(solver);
    x.result = r;
    x.wall_seconds = s;
    return x;
}

}  // namespace

TEST(Par2, Examples) {
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Sat, 10), rec(RunResult::Timeout, 1000)}, 1000), 1005.0);
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Timeout, 5), rec(RunResult::Timeout, 7)}, 60), 120.0);
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Sat, 0), rec(RunResult::Unsat, 0)}, 60), 0.0);
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Unknown, 3)}, 60), 120.0);
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Sat, 61)}, 60), 120.0);  // beyond T counts as a timeout
    EXPECT_DOUBLE_EQ(par2({rec(RunResult::Sat, 60)}, 60), 60.0);
    EXPECT_THROW(par2({}, 60), InvalidArgument);
    EXPECT_THROW(par2({rec(RunResult::Sat, 1)}, 0), InvalidArgument);
}

TEST(Par2, BySolverMatchesManualMean) {
    std::vector<RunRecord> runs;
    double a = 0, b = 0;
    for (int i = 0; i < 10; ++i) {
        const double t = 0.5 * i;
        const auto ra = i % 3 == 0 ? RunResult::Timeout : RunResult::Sat;
        runs.push_back(rec(ra, t, "a"));
        a += ra == RunResult::Sat ? t : 20.0;
        runs.push_back(rec(RunResult::Unsat, t * 3, "b"));
        b += t * 3 <= 10 ? t * 3 : 20.0;
    }
    const auto by = par2_by_solver(runs, 10);
    ASSERT_EQ(by.size(), 2u);
    EXPECT_DOUBLE_EQ(by.at("a"), a / 10);
    EXPECT_DOUBLE_EQ(by.at("b"), b / 10);
}

TEST(RunRecords, RoundTrip) {
    std::vector<RunRecord> runs{rec(RunResult::Sat, 1.25, "fsmt"), rec(RunResult::Timeout, 60, "z3")};
    runs[0].instance = "a,b \"quoted\"";
    runs[0].seed = 42;
    runs[1].config = "eta=0.1";
    const auto back = parse_run_records(format_run_records(runs));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].instance, runs[0].instance);
    EXPECT_EQ(back[0].seed, 42u);
    EXPECT_EQ(back[0].wall_seconds, 1.25);
    EXPECT_EQ(back[1].solver, "z3");
    EXPECT_EQ(back[1].result, RunResult::Timeout);
    EXPECT_EQ(back[1].config, "eta=0.1");
}

TEST(RunRecords, ColumnOrderAndDefaults) {
    const auto r = parse_run_records("result,wall_seconds,instance\nsat,2,x\n\nunknown,3,y\n");
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].solver, "fsmt");
    EXPECT_EQ(r[1].result, RunResult::Unknown);
}

TEST(RunRecords, Errors) {
    auto line_of = [](const char* text) {
        try {
            parse_run_records(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    EXPECT_EQ(line_of(""), 1u);
    EXPECT_EQ(line_of("instance,result\n"), 1u);
    EXPECT_EQ(line_of("instance,result,wall_seconds\nx,maybe,1\n"), 2u);
    EXPECT_EQ(line_of("instance,result,wall_seconds\nx,sat,1\nx,sat,-1\n"), 3u);
    EXPECT_EQ(line_of("instance,result,wall_seconds\nx,sat,abc\n"), 2u);
    EXPECT_EQ(line_of("instance,result,wall_seconds\nx,sat\n"), 2u);
    EXPECT_EQ(line_of("instance,result,wall_seconds,seed\nx,sat,1,-3\n"), 2u);
}
