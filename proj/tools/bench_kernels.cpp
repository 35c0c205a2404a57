// Timing harness for the experiment kernels: runs each one through the
// serial reference path and the OpenMP path, checks the outputs agree, and
// prints the speedup.

#include "slnd/kernels.hpp"
#include "slnd/nondivergence.hpp"

#include <omp.h>

#include <cstdio>
#include <functional>

using namespace slnd;

namespace {

SubgroupSpec sl2_torus() {
    SubgroupSpec h;
    h.n = 2;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
    x(0, 0) = -1;
    x(1, 1) = 1;
    h.lie_basis = {x};
    h.window.box = {{0.0, 1.0}};
    h.stable_source = TorusSource{{-1, 1}};
    return h;
}

template <class F>
double timed(F&& f) {
    double t0 = omp_get_wtime();
    f();
    return omp_get_wtime() - t0;
}

void report(const char* name, double serial, double parallel, bool agree) {
    std::printf("%-22s serial %8.3fs   omp %8.3fs   speedup %5.2fx   outputs %s\n", name, serial,
                parallel, serial / parallel, agree ? "agree" : "DIFFER");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());

    {
        FuzzReport s, p;
        double ts = timed([&] { s = fuzz_submodularity(4, 4000, 7, ExecMode::serial); });
        double tp = timed([&] { p = fuzz_submodularity(4, 4000, 7, ExecMode::parallel); });
        report("fuzz-submodularity", ts, tp,
               s.violations == p.violations && s.min_ratio == p.min_ratio);
    }
    {
        SubgroupSpec h = sl2_torus();
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
        g.diagonal() << std::exp(-5.0), std::exp(5.0);
        EscapeReport s, p;
        double ts = timed(
            [&] { s = km_escape_experiment(h, g, IMat::identity(2), 20000, 0.1, 7, ExecMode::serial); });
        double tp = timed([&] {
            p = km_escape_experiment(h, g, IMat::identity(2), 20000, 0.1, 7, ExecMode::parallel);
        });
        report("km-escape", ts, tp,
               s.escape_count == p.escape_count && s.delta_value == p.delta_value);
    }
    {
        auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
        Window w{{{-1.0, 1.0}}};
        CgoodReport s, p;
        double ts =
            timed([&] { s = cgood_check(f, w, GoodnessParams{2.0, 0.5}, 1000, 16, 7, ExecMode::serial); });
        double tp = timed(
            [&] { p = cgood_check(f, w, GoodnessParams{2.0, 0.5}, 1000, 16, 7, ExecMode::parallel); });
        report("cgood-check", ts, tp,
               s.violations.size() == p.violations.size() && s.worst_ratio == p.worst_ratio);
    }
    {
        SubgroupSpec h = sl2_torus();
        Prop42Report s, p;
        double ts = timed([&] {
            s = prop42_verify(Eigen::MatrixXd::Identity(2, 2), h, 1.0, 50, GoodnessParams{2.0, 0.5},
                              Int(1), 1000, ExecMode::serial);
        });
        double tp = timed([&] {
            p = prop42_verify(Eigen::MatrixXd::Identity(2, 2), h, 1.0, 50, GoodnessParams{2.0, 0.5},
                              Int(1), 1000, ExecMode::parallel);
        });
        bool agree = s.pass == p.pass && s.dims.size() == p.dims.size();
        for (size_t i = 0; agree && i < s.dims.size(); ++i)
            agree = s.dims[i].min_sup == p.dims[i].min_sup;
        report("prop42-verify", ts, tp, agree);
    }
    return 0;
}
