#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "boxproj/csv.hpp"
#include "test_helpers.hpp"

// End-to-end checks of the installed binary: exit codes, file round-trips,
// and determinism. Each test works in its own temp directory.

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "boxproj_test_XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BOXPROJ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << '\n';
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

// ── csv reader ──────────────────────────────────────────────────────

TEST(Csv, ReadsColumnWithOptionalHeader) {
    TempDir dir;
    write_lines(dir.path / "a.csv", {"value", "1.5", "-2", "inf"});
    const auto vals = boxproj::read_numeric_column((dir.path / "a.csv").string());
    ASSERT_EQ(vals.size(), 3u);
    EXPECT_EQ(vals[0], 1.5);
    EXPECT_EQ(vals[1], -2.0);
    EXPECT_TRUE(std::isinf(vals[2]));

    write_lines(dir.path / "b.csv", {"0.25", "0.75"});
    EXPECT_EQ(boxproj::read_numeric_column((dir.path / "b.csv").string()).size(), 2u);
}

TEST(Csv, MalformedLineReportsLineNumber) {
    TempDir dir;
    write_lines(dir.path / "bad.csv", {"1.0", "abc", "2.0"});
    try {
        boxproj::read_numeric_column((dir.path / "bad.csv").string());
        FAIL() << "expected ParseError";
    } catch (const boxproj::ParseError& e) {
        EXPECT_EQ(e.line, 2u);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Csv, FormatRoundTripsExactly) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = unit(rng);
        EXPECT_EQ(std::stod(boxproj::format_numeric(x)), x);
    }
}

// ── project subcommand ──────────────────────────────────────────────

TEST(CliProject, MatchesOracleAndRoundTrips) {
    TempDir dir;
    write_lines(dir.path / "v.csv", {"0.9", "0.5", "0.3"});
    write_lines(dir.path / "b.csv", {"0.4", "0.4", "0.4"});
    const auto out = (dir.path / "x.csv").string();

    const int rc = run_cli("project --input " + (dir.path / "v.csv").string() + " --upper " +
                           (dir.path / "b.csv").string() + " --z 1.0 --out " + out);
    ASSERT_EQ(rc, 0);

    const auto x = boxproj::read_numeric_column(out);
    ASSERT_EQ(x.size(), 3u);
    EXPECT_NEAR(x[0], 0.4, 1e-12);
    EXPECT_NEAR(x[1], 0.4, 1e-12);
    EXPECT_NEAR(x[2], 0.2, 1e-12);

    // Projecting the output again with the same budget leaves it unchanged.
    const auto out2 = (dir.path / "x2.csv").string();
    const int rc2 = run_cli("project --input " + out + " --upper " + (dir.path / "b.csv").string() +
                            " --z 1.0 --out " + out2);
    ASSERT_EQ(rc2, 0);
    EXPECT_LE(testutil::linf_diff(x, boxproj::read_numeric_column(out2)), 1e-12);
}

TEST(CliProject, InactiveBudgetReturnsClampedInput) {
    TempDir dir;
    write_lines(dir.path / "v.csv", {"0.3", "0.2"});
    const auto out = (dir.path / "x.csv").string();
    const int rc =
        run_cli("project --input " + (dir.path / "v.csv").string() + " --z 5 --out " + out);
    ASSERT_EQ(rc, 0);
    const auto x = boxproj::read_numeric_column(out);
    EXPECT_EQ(x, (std::vector<double>{0.3, 0.2}));
}

TEST(CliProject, ExitCodes) {
    TempDir dir;
    write_lines(dir.path / "v.csv", {"1.0", "abc"});
    write_lines(dir.path / "ok.csv", {"1.0", "2.0"});
    write_lines(dir.path / "short.csv", {"1.0"});
    write_lines(dir.path / "neg_lower.csv", {"2.0", "2.0"});
    const auto out = (dir.path / "x.csv").string();

    // Malformed value -> parse error.
    EXPECT_EQ(run_cli("project --input " + (dir.path / "v.csv").string() + " --z 1 --out " + out),
              3);
    // Missing required flag -> usage error.
    EXPECT_EQ(run_cli("project --input " + (dir.path / "ok.csv").string() + " --out " + out), 2);
    // Length mismatch -> validation error.
    EXPECT_EQ(run_cli("project --input " + (dir.path / "ok.csv").string() + " --upper " +
                      (dir.path / "short.csv").string() + " --z 1 --out " + out),
              2);
    // Lower bounds force more norm than the budget allows -> infeasible.
    EXPECT_EQ(run_cli("project --input " + (dir.path / "ok.csv").string() + " --lower " +
                      (dir.path / "neg_lower.csv").string() + " --z 1 --out " + out),
              4);
    // Unreadable input -> parse error.
    EXPECT_EQ(run_cli("project --input " + (dir.path / "missing.csv").string() + " --z 1 --out " +
                      out),
              3);
}

TEST(CliProject, DeterministicOutputBytes) {
    TempDir dir;
    write_lines(dir.path / "v.csv", {"0.123456789123456", "0.9", "0.5"});
    const auto out1 = (dir.path / "x1.csv").string();
    const auto out2 = (dir.path / "x2.csv").string();
    ASSERT_EQ(run_cli("project --input " + (dir.path / "v.csv").string() + " --z 1 --out " + out1),
              0);
    ASSERT_EQ(run_cli("project --input " + (dir.path / "v.csv").string() + " --z 1 --out " + out2),
              0);
    EXPECT_EQ(read_file(out1), read_file(out2));
}

// ── bench subcommand ────────────────────────────────────────────────

TEST(CliBench, ProducesSortedCsvAndValidates) {
    TempDir dir;
    const auto out = (dir.path / "bench.csv").string();
    ASSERT_EQ(run_cli("bench --sizes 400,100 --reps 3 --seed 7 --out " + out), 0);

    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,method,mean_time_s,std_time_s");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 4u);  // two methods per size, sizes ascending
    EXPECT_EQ(rows[0].rfind("100,linear,", 0), 0u);
    EXPECT_EQ(rows[1].rfind("100,sorted,", 0), 0u);
    EXPECT_EQ(rows[2].rfind("400,linear,", 0), 0u);
    EXPECT_EQ(rows[3].rfind("400,sorted,", 0), 0u);
}

TEST(CliBench, ZeroRepsIsUsageError) {
    TempDir dir;
    EXPECT_EQ(run_cli("bench --sizes 100 --reps 0 --out " + (dir.path / "b.csv").string()), 2);
}

// ── demo subcommands ────────────────────────────────────────────────

TEST(CliDemoLogistic, TraceColumnsAreNonincreasing) {
    TempDir dir;
    const auto out = (dir.path / "trace.csv").string();
    ASSERT_EQ(run_cli("demo-logistic --n 12 --m 80 --iters 25 --z-fraction 0.25 --seed 3 --out " +
                      out),
              0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "iter,objective_l1,objective_ub_l1");
    double prev_l1 = testutil::kInf, prev_ub = testutil::kInf;
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string iter, f_l1, f_ub;
        std::getline(ss, iter, ',');
        std::getline(ss, f_l1, ',');
        std::getline(ss, f_ub, ',');
        EXPECT_EQ(std::stoi(iter), rows);
        const double a = std::stod(f_l1), c = std::stod(f_ub);
        EXPECT_LE(a, prev_l1 + 1e-12);
        EXPECT_LE(c, prev_ub + 1e-12);
        prev_l1 = a;
        prev_ub = c;
        ++rows;
    }
    EXPECT_EQ(rows, 25);
}

TEST(CliDemoLogistic, ZeroFractionPinsBothTraces) {
    TempDir dir;
    const auto out = (dir.path / "trace.csv").string();
    ASSERT_EQ(run_cli("demo-logistic --n 6 --m 40 --iters 5 --z-fraction 0 --seed 1 --out " + out),
              0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string iter, f_l1, f_ub;
        std::getline(ss, iter, ',');
        std::getline(ss, f_l1, ',');
        std::getline(ss, f_ub, ',');
        EXPECT_NEAR(std::stod(f_l1), std::log(2.0), 1e-12);
        EXPECT_NEAR(std::stod(f_ub), std::log(2.0), 1e-12);
    }
}

TEST(CliDemoAllocation, BoundedMethodCoversEveryUnit) {
    TempDir dir;
    const auto out = (dir.path / "alloc.csv").string();
    const std::string data_dir = BOXPROJ_DATA_DIR;
    ASSERT_EQ(run_cli("demo-allocation --production " + data_dir + "/production.csv --prior " +
                      data_dir + "/prior.csv --ratio 50 --out " + out),
              0);

    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "unit,production,bound,allocation_l1,allocation_ub_l1");
    int rows = 0, l1_zeroed = 0;
    bool bounded_all_positive = true;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string f[5];
        for (auto& s : f) std::getline(ss, s, ',');
        const double bound = std::stod(f[2]), x_l1 = std::stod(f[3]), x_ub = std::stod(f[4]);
        if (bound > 0 && x_ub <= 0) bounded_all_positive = false;
        if (bound > 0 && x_l1 == 0) ++l1_zeroed;
        ++rows;
    }
    EXPECT_EQ(rows, 40);
    EXPECT_TRUE(bounded_all_positive);
    EXPECT_GE(l1_zeroed, 1);
}

TEST(CliDemoAllocation, RejectsNegativeEntriesAndBadRatio) {
    TempDir dir;
    write_lines(dir.path / "p.csv", {"1.0", "-2.0"});
    write_lines(dir.path / "q.csv", {"1.0", "2.0"});
    const auto out = (dir.path / "alloc.csv").string();
    EXPECT_EQ(run_cli("demo-allocation --production " + (dir.path / "p.csv").string() +
                      " --prior " + (dir.path / "q.csv").string() + " --ratio 50 --out " + out),
              2);
    EXPECT_EQ(run_cli("demo-allocation --production " + (dir.path / "q.csv").string() +
                      " --prior " + (dir.path / "q.csv").string() + " --ratio 0 --out " + out),
              2);
}
