// boxproj — exact projections onto the upper-bounded simplex and the
// box-constrained L1 ball, plus benchmark and demo drivers. All file I/O is
// single-column CSV; see README for the formats.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "boxproj/box_l1.hpp"
#include "boxproj/common.hpp"
#include "boxproj/csv.hpp"
#include "boxproj/logistic.hpp"
#include "boxproj/projection.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;
constexpr int kExitInfeasible = 4;

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ── project ─────────────────────────────────────────────────────────

struct ProjectArgs {
    std::string input, lower, upper, out;
    double z = 0;
};

int run_project(const ProjectArgs& args) {
    const std::vector<double> v = boxproj::read_numeric_column(args.input);

    boxproj::BoxL1Problem<double> p;
    p.target = v;
    p.budget = args.z;
    p.lower = args.lower.empty() ? std::vector<double>(v.size(), 0.0)
                                 : boxproj::read_numeric_column(args.lower);
    p.upper = args.upper.empty() ? std::vector<double>(v.size(), kInf)
                                 : boxproj::read_numeric_column(args.upper);
    if (p.lower.size() != v.size())
        throw boxproj::ShapeError("lower bound file length differs from input");
    if (p.upper.size() != v.size())
        throw boxproj::ShapeError("upper bound file length differs from input");

    const auto start = Clock::now();
    const auto r = boxproj::project_box_l1_full(p);
    const double elapsed = seconds_since(start);

    boxproj::write_numeric_column(args.out, r.x);

    long double norm = 0;
    for (double xi : r.x) norm += std::abs(xi);
    std::cout << "n:          " << v.size() << "\n"
              << "theta:      " << boxproj::format_numeric(r.canonical.theta) << "\n"
              << "at_zero:    " << r.canonical.lower_set.size() << "\n"
              << "at_bound:   " << r.canonical.upper_set.size() << "\n"
              << "free:       " << r.canonical.free_set.size() << "\n"
              << "l1_norm:    " << boxproj::format_numeric(static_cast<double>(norm)) << "\n"
              << "time_s:     " << boxproj::format_numeric(elapsed) << "\n";
    return 0;
}

// ── bench ───────────────────────────────────────────────────────────

struct BenchArgs {
    std::vector<std::size_t> sizes;
    int reps = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_bench(const BenchArgs& args) {
    if (args.reps < 1) throw boxproj::InvalidInputError("bench: --reps must be >= 1");
    std::vector<std::size_t> sizes(args.sizes);
    for (std::size_t n : sizes)
        if (n < 1) throw boxproj::InvalidInputError("bench: sizes must be >= 1");
    std::sort(sizes.begin(), sizes.end());

    const double tol = boxproj::default_tolerance();
    std::ofstream out(args.out);
    if (!out) throw boxproj::ParseError("cannot open '" + args.out + "' for writing", 0);
    out << "n,method,mean_time_s,std_time_s\n";

    for (std::size_t n : sizes) {
        std::mt19937_64 rng(args.seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> linear_times, sorted_times;

        for (int rep = 0; rep < args.reps; ++rep) {
            boxproj::ProjectionProblem<double> p;
            p.target.resize(n);
            p.bound.resize(n);
            long double cap = 0;
            for (std::size_t i = 0; i < n; ++i) {
                p.target[i] = unit(rng);
                p.bound[i] = unit(rng);
                cap += std::min(p.target[i], p.bound[i]);
            }
            p.budget = 0.25 * static_cast<double>(cap);

            auto t0 = Clock::now();
            const auto linear = boxproj::project_ub_simplex_linear(p);
            linear_times.push_back(seconds_since(t0));

            t0 = Clock::now();
            const auto sorted = boxproj::project_ub_simplex_sorted(p);
            sorted_times.push_back(seconds_since(t0));

            double diff = 0;
            for (std::size_t i = 0; i < n; ++i)
                diff = std::max(diff, std::abs(linear.x[i] - sorted.x[i]));
            if (diff > tol)
                throw std::runtime_error("bench: linear and sorted results disagree (|diff| = " +
                                         boxproj::format_numeric(diff) + " at n = " +
                                         std::to_string(n) + "); refusing to record timings");
        }

        const auto stats = [](const std::vector<double>& t) {
            const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
            double var = 0;
            for (double x : t) var += (x - mean) * (x - mean);
            if (t.size() > 1) var /= static_cast<double>(t.size() - 1);
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        const auto [lin_mean, lin_std] = stats(linear_times);
        const auto [sort_mean, sort_std] = stats(sorted_times);
        out << n << ",linear," << boxproj::format_numeric(lin_mean) << ','
            << boxproj::format_numeric(lin_std) << '\n';
        out << n << ",sorted," << boxproj::format_numeric(sort_mean) << ','
            << boxproj::format_numeric(sort_std) << '\n';
        std::cout << "n=" << n << "  linear " << lin_mean << "s  sorted " << sort_mean << "s\n";
    }
    return 0;
}

// ── demo-logistic ───────────────────────────────────────────────────

struct DemoLogisticArgs {
    std::size_t n = 100, m = 1000;
    int iters = 400;
    double z_fraction = 0.25;
    std::uint64_t seed = 0;
    std::string out;
};

int run_demo_logistic(const DemoLogisticArgs& args) {
    if (args.n < 1 || args.m < 1) throw boxproj::InvalidInputError("demo-logistic: n, m must be >= 1");
    if (args.iters < 1) throw boxproj::InvalidInputError("demo-logistic: --iters must be >= 1");
    if (args.z_fraction < 0) throw boxproj::InvalidInputError("demo-logistic: --z-fraction must be >= 0");

    const auto data = boxproj::generate_synthetic(static_cast<Eigen::Index>(args.n),
                                                  static_cast<Eigen::Index>(args.m), args.seed);
    boxproj::PGConfig cfg;
    cfg.max_iters = args.iters;
    cfg.step_size = boxproj::suggested_step_size(data.features);
    cfg.budget = args.z_fraction * static_cast<double>(args.n);
    cfg.seed = args.seed;

    const auto l1 = boxproj::projected_gradient(data, cfg, boxproj::box_l1_projector(cfg.budget));
    const auto bounded = boxproj::projected_gradient(
        data, cfg, boxproj::box_l1_projector(cfg.budget, {{-0.5, 0.5}}));

    std::ofstream out(args.out);
    if (!out) throw boxproj::ParseError("cannot open '" + args.out + "' for writing", 0);
    out << "iter,objective_l1,objective_ub_l1\n";
    for (int k = 0; k < args.iters; ++k)
        out << k << ',' << boxproj::format_numeric(l1.objectives[static_cast<std::size_t>(k)]) << ','
            << boxproj::format_numeric(bounded.objectives[static_cast<std::size_t>(k)]) << '\n';

    const double dist_l1 = (l1.final_iterate - data.true_weights).norm();
    const double dist_ub = (bounded.final_iterate - data.true_weights).norm();
    std::cout << "budget z:                " << cfg.budget << "\n"
              << "step size:               " << cfg.step_size << "\n"
              << "final objective L1:      " << l1.objectives.back() << "\n"
              << "final objective UB_L1:   " << bounded.objectives.back() << "\n"
              << "||w - w_true||_2 L1:     " << dist_l1 << "\n"
              << "||w - w_true||_2 UB_L1:  " << dist_ub << "\n"
              << "UB_L1 max |w_i|:         " << bounded.final_iterate.lpNorm<Eigen::Infinity>()
              << "\n";
    return 0;
}

// ── demo-allocation ─────────────────────────────────────────────────

struct DemoAllocationArgs {
    std::string production, prior, out;
    double ratio = 50;
};

int run_demo_allocation(const DemoAllocationArgs& args) {
    const std::vector<double> v = boxproj::read_numeric_column(args.production);
    const std::vector<double> prior = boxproj::read_numeric_column(args.prior);
    if (v.size() != prior.size())
        throw boxproj::ShapeError("demo-allocation: production and prior lengths differ");
    if (v.empty()) throw boxproj::ShapeError("demo-allocation: empty input");
    if (!(args.ratio > 0) || args.ratio > 100)
        throw boxproj::InvalidInputError("demo-allocation: --ratio must be in (0, 100]");
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0 || prior[i] < 0)
            throw boxproj::InvalidInputError("demo-allocation: negative entry at line " +
                                             std::to_string(i + 1));

    long double v_sq = 0, prior_sq = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v_sq += static_cast<long double>(v[i]) * v[i];
        prior_sq += static_cast<long double>(prior[i]) * prior[i];
    }
    const double v_norm = std::sqrt(static_cast<double>(v_sq));
    if (prior_sq == 0) throw boxproj::InvalidInputError("demo-allocation: prior is identically zero");

    // Scale the prior so both vectors have equal Euclidean norm, then spend
    // ratio% of the production norm.
    const double scale = v_norm / std::sqrt(static_cast<double>(prior_sq));
    std::vector<double> b(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) b[i] = prior[i] * scale;
    const double z = v_norm * args.ratio / 100.0;

    const auto l1 =
        boxproj::project_ub_simplex_linear(boxproj::ProjectionProblem<double>{
            v, std::vector<double>(v.size(), kInf), z});
    const auto bounded =
        boxproj::project_ub_simplex_linear(boxproj::ProjectionProblem<double>{v, b, z});

    std::ofstream out(args.out);
    if (!out) throw boxproj::ParseError("cannot open '" + args.out + "' for writing", 0);
    out << "unit,production,bound,allocation_l1,allocation_ub_l1\n";
    std::size_t l1_zeroed = 0, ub_zeroed = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << (i + 1) << ',' << boxproj::format_numeric(v[i]) << ','
            << boxproj::format_numeric(b[i]) << ',' << boxproj::format_numeric(l1.x[i]) << ','
            << boxproj::format_numeric(bounded.x[i]) << '\n';
        if (l1.x[i] == 0) ++l1_zeroed;
        if (bounded.x[i] == 0) ++ub_zeroed;
    }
    std::cout << "units:             " << v.size() << "\n"
              << "budget z:          " << z << "\n"
              << "zeroed by L1:      " << l1_zeroed << "\n"
              << "zeroed by UB_L1:   " << ub_zeroed << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact projections onto the upper-bounded simplex and box-constrained L1 ball"};
    app.require_subcommand(1);

    ProjectArgs project_args;
    auto* project = app.add_subcommand("project", "Project a vector read from a CSV file");
    project->add_option("--input", project_args.input, "Input vector, one value per line")->required();
    project->add_option("--lower", project_args.lower, "Lower bounds file (default: 0)");
    project->add_option("--upper", project_args.upper, "Upper bounds file (default: +inf)");
    project->add_option("--z", project_args.z, "L1 norm budget")->required();
    project->add_option("--out", project_args.out, "Output file for the projection")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Time the linear solver against the sorted baseline");
    bench->add_option("--sizes", bench_args.sizes, "Problem sizes")->required()->delimiter(',');
    bench->add_option("--reps", bench_args.reps, "Repetitions per size")->required();
    bench->add_option("--seed", bench_args.seed, "RNG seed")->default_val(0);
    bench->add_option("--out", bench_args.out, "Output CSV")->required();

    DemoLogisticArgs logi_args;
    auto* logi = app.add_subcommand(
        "demo-logistic", "Projected-gradient logistic regression, L1 vs bound-constrained L1");
    logi->add_option("--n", logi_args.n, "Number of features")->default_val(100);
    logi->add_option("--m", logi_args.m, "Number of samples")->default_val(1000);
    logi->add_option("--iters", logi_args.iters, "Gradient iterations")->default_val(400);
    logi->add_option("--z-fraction", logi_args.z_fraction, "Budget as a fraction of the dimension")
        ->default_val(0.25);
    logi->add_option("--seed", logi_args.seed, "RNG seed")->default_val(0);
    logi->add_option("--out", logi_args.out, "Output CSV trace")->required();

    DemoAllocationArgs alloc_args;
    auto* alloc = app.add_subcommand(
        "demo-allocation", "Allocate a production vector under prior-derived upper bounds");
    alloc->add_option("--production", alloc_args.production, "Production CSV")->required();
    alloc->add_option("--prior", alloc_args.prior, "Prior-consumption CSV (rescaled to bounds)")
        ->required();
    alloc->add_option("--ratio", alloc_args.ratio, "Percent of the production norm to allocate")
        ->required();
    alloc->add_option("--out", alloc_args.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
        if (project->parsed()) return run_project(project_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (logi->parsed()) return run_demo_logistic(logi_args);
        if (alloc->parsed()) return run_demo_allocation(alloc_args);
        return kExitValidation;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    } catch (const boxproj::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const boxproj::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const boxproj::ShapeError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
