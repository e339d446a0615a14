// Serial reference vs OpenMP kernels for the fiber counts, plus the two
// transfer methods. Every row also checks that the compared results agree.

#include <chrono>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>
#include <omp.h>

#include "g2rigid/frobenius.hpp"

using namespace g2rigid;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

int mismatches = 0;

void row(const char* kernel, const ExtField& f, double a, double b, bool agree) {
    if (!agree) ++mismatches;
    std::printf("%-22s %8u %12.4f %12.4f %8.2fx  %s\n", kernel, f.size(), a, b, a / b, agree ? "agree" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting kernel benchmark"};
    int reps = 3;
    int threads = 0;
    bool full = false;
    app.add_option("--reps", reps, "Repetitions, best time kept")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads (0: default)");
    app.add_flag("--full", full, "Include the larger fields");
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %8s %12s %12s %9s\n", "kernel", "|F|", "A (s)", "B (s)", "A/B");

    std::vector<std::pair<std::uint64_t, int>> naive_fields{{5, 1}, {7, 1}, {3, 2}, {11, 1}};
    if (full) naive_fields.push_back({3, 3});
    for (auto [p, k] : naive_fields) {
        const ExtField f = ExtField::create(p, k);
        const auto s = f.from_int(2);
        NaiveCount a, b;
        const double ta = best_of(reps, [&] { a = count_naive(f, s, FactorVariant::Consecutive, kDefaultBudget, Execution::Serial); });
        const double tb = best_of(reps, [&] { b = count_naive(f, s, FactorVariant::Consecutive, kDefaultBudget, Execution::Parallel); });
        row("naive serial/parallel", f, ta, tb, a.t_chi == b.t_chi && a.n_nonzero == b.n_nonzero);
    }

    std::vector<std::pair<std::uint64_t, int>> transfer_fields{{3, 4}, {3, 5}, {5, 3}, {7, 3}};
    if (full) transfer_fields.insert(transfer_fields.end(), {{3, 6}, {3, 7}});
    for (auto [p, k] : transfer_fields) {
        const ExtField f = ExtField::create(p, k);
        const auto s = f.from_int(2);
        mpz_class a, b, c;
        auto direct = [&](Execution e) {
            return count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Direct, e);
        };
        const double ta = best_of(reps, [&] { a = direct(Execution::Serial); });
        const double tb = best_of(reps, [&] { b = direct(Execution::Parallel); });
        row("direct serial/parallel", f, ta, tb, a == b);
        const double tc = best_of(reps, [&] {
            c = count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Fourier);
        });
        row("direct/fourier", f, tb, tc, b == c);
    }
    return mismatches == 0 ? 0 : 1;
}
