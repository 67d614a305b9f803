// Timing harness comparing the serial reference kernels against the
// OpenMP-parallel variants on training-shaped workloads.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kge/kernels.hpp"
#include "kge/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace kge;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

void row(const char* name, double flops, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.3f ms %10.3f ms   x%.2f   %7.2f GF/s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, flops / (parallel_ms * 1e6));
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-28s %13s %13s %8s %12s\n", "kernel", "serial", "parallel", "speedup",
                "parallel");

    Rng rng(1);

    {
        // the KvsAll logits shape: [batch x d] * [d x |E|]
        const std::int64_t m = 256, k = 256, n = 2048;
        const auto a = random_vec(static_cast<std::size_t>(m * k), rng);
        const auto b = random_vec(static_cast<std::size_t>(n * k), rng);
        std::vector<double> c(static_cast<std::size_t>(m * n));
        const double flops = 2.0 * m * n * k;
        const double s = time_ms([&] { kernels::gemm_nt_serial(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        const double p = time_ms([&] { kernels::gemm_nt_parallel(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        row("gemm_nt 256x2048x256", flops, s, p);
    }
    {
        // the projection shape: [rows x m*d] * [m*d x d]
        const std::int64_t m = 512, k = 4096, n = 256;
        const auto a = random_vec(static_cast<std::size_t>(m * k), rng);
        const auto b = random_vec(static_cast<std::size_t>(n * k), rng);
        std::vector<double> c(static_cast<std::size_t>(m * n));
        const double flops = 2.0 * m * n * k;
        const double s = time_ms([&] { kernels::gemm_nt_serial(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        const double p = time_ms([&] { kernels::gemm_nt_parallel(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        row("gemm_nt 512x256x4096", flops, s, p);
    }
    {
        const std::int64_t m = 512, k = 256, n = 512;
        const auto a = random_vec(static_cast<std::size_t>(m * k), rng);
        const auto b = random_vec(static_cast<std::size_t>(k * n), rng);
        std::vector<double> c(static_cast<std::size_t>(m * n));
        const double flops = 2.0 * m * n * k;
        const double s = time_ms([&] { kernels::gemm_nn_serial(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        const double p = time_ms([&] { kernels::gemm_nn_parallel(m, n, k, a.data(), b.data(), c.data(), false); }, 5);
        row("gemm_nn 512x512x256", flops, s, p);
    }
    {
        const std::int64_t n = 1 << 22;
        const auto a = random_vec(static_cast<std::size_t>(n), rng);
        const auto b = random_vec(static_cast<std::size_t>(n), rng);
        std::vector<double> c(static_cast<std::size_t>(n));
        const double s = time_ms([&] { kernels::ew_serial(kernels::EwOp::Mul, n, a.data(), b.data(), c.data()); }, 10);
        const double p = time_ms([&] { kernels::ew_parallel(kernels::EwOp::Mul, n, a.data(), b.data(), c.data()); }, 10);
        row("elementwise mul 4M", static_cast<double>(n), s, p);
    }
    {
        const std::int64_t n = 1 << 22;
        const auto z = random_vec(static_cast<std::size_t>(n), rng);
        std::vector<double> out(static_cast<std::size_t>(n));
        const double s = time_ms([&] { kernels::sigmoid_serial(n, z.data(), out.data()); }, 5);
        const double p = time_ms([&] { kernels::sigmoid_parallel(n, z.data(), out.data()); }, 5);
        row("sigmoid 4M", static_cast<double>(n), s, p);
    }
    {
        const std::int64_t rows = 512, cols = 2048;
        const auto z = random_vec(static_cast<std::size_t>(rows * cols), rng);
        std::vector<double> y(static_cast<std::size_t>(rows * cols), 0.0);
        for (std::size_t i = 0; i < y.size(); i += 97) y[i] = 1.0;
        const double s = time_ms([&] { (void)kernels::bce_logits_mean_serial(rows, cols, z.data(), y.data()); }, 5);
        const double p = time_ms([&] { (void)kernels::bce_logits_mean_parallel(rows, cols, z.data(), y.data()); }, 5);
        row("bce mean 512x2048", static_cast<double>(rows * cols), s, p);
    }
    {
        const std::int64_t n = 1 << 22;
        auto theta = random_vec(static_cast<std::size_t>(n), rng);
        const auto g = random_vec(static_cast<std::size_t>(n), rng);
        std::vector<double> m(static_cast<std::size_t>(n), 0.0), v(static_cast<std::size_t>(n), 0.0);
        const double s = time_ms([&] { kernels::adam_update_serial(n, theta.data(), g.data(), m.data(), v.data(), 2, 0.01, 0.9, 0.999, 1e-8, 0.0); }, 5);
        const double p = time_ms([&] { kernels::adam_update_parallel(n, theta.data(), g.data(), m.data(), v.data(), 2, 0.01, 0.9, 0.999, 1e-8, 0.0); }, 5);
        row("adam update 4M", static_cast<double>(n), s, p);
    }
    return 0;
}
