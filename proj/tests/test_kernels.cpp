#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kge/kernels.hpp"
#include "kge/rng.hpp"

using namespace kge;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

std::vector<double> naive_gemm_nn(std::int64_t m, std::int64_t n, std::int64_t k,
                                  const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(static_cast<std::size_t>(m * n), 0.0);
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t l = 0; l < k; ++l) c[i * n + j] += a[i * k + l] * b[l * n + j];
    return c;
}

}  // namespace

TEST_CASE("gemm variants match a naive reference") {
    Rng rng(7);
    for (const auto [m, n, k] : {std::tuple<int, int, int>{3, 4, 5},
                                 {1, 1, 1},
                                 {17, 9, 33},
                                 {64, 32, 16}}) {
        const auto a = random_vec(static_cast<std::size_t>(m * k), rng);
        const auto b = random_vec(static_cast<std::size_t>(k * n), rng);
        const auto want = naive_gemm_nn(m, n, k, a, b);

        std::vector<double> c(static_cast<std::size_t>(m * n), 0.0);
        kernels::gemm_nn_serial(m, n, k, a.data(), b.data(), c.data(), false);
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));

        // nt: B given as [n,k] row-major equals B^T of the nn case
        std::vector<double> bt(static_cast<std::size_t>(n * k));
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t l = 0; l < k; ++l) bt[j * k + l] = b[l * n + j];
        std::vector<double> cnt(static_cast<std::size_t>(m * n), 0.0);
        kernels::gemm_nt_serial(m, n, k, a.data(), bt.data(), cnt.data(), false);
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(cnt[i] == doctest::Approx(want[i]).epsilon(1e-12));

        // tn: A given as [k,m] row-major equals A^T of the nn case
        std::vector<double> at(static_cast<std::size_t>(k * m));
        for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t l = 0; l < k; ++l) at[l * m + i] = a[i * k + l];
        std::vector<double> ctn(static_cast<std::size_t>(m * n), 0.0);
        kernels::gemm_tn_serial(m, n, k, at.data(), b.data(), ctn.data(), false);
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(ctn[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    Rng rng(11);
    const std::int64_t m = 37, n = 53, k = 29;
    const auto a = random_vec(static_cast<std::size_t>(m * k), rng);
    const auto b = random_vec(static_cast<std::size_t>(k * n), rng);
    const auto bnt = random_vec(static_cast<std::size_t>(n * k), rng);
    const auto atn = random_vec(static_cast<std::size_t>(k * m), rng);

    std::vector<double> c1(static_cast<std::size_t>(m * n)), c2 = c1;
    kernels::gemm_nn_serial(m, n, k, a.data(), b.data(), c1.data(), false);
    kernels::gemm_nn_parallel(m, n, k, a.data(), b.data(), c2.data(), false);
    CHECK(c1 == c2);

    kernels::gemm_nt_serial(m, n, k, a.data(), bnt.data(), c1.data(), false);
    kernels::gemm_nt_parallel(m, n, k, a.data(), bnt.data(), c2.data(), false);
    CHECK(c1 == c2);

    kernels::gemm_tn_serial(m, n, k, atn.data(), b.data(), c1.data(), false);
    kernels::gemm_tn_parallel(m, n, k, atn.data(), b.data(), c2.data(), false);
    CHECK(c1 == c2);

    const std::int64_t nn = 100003;
    const auto x = random_vec(static_cast<std::size_t>(nn), rng, -30.0, 30.0);
    const auto y = random_vec(static_cast<std::size_t>(nn), rng);
    std::vector<double> o1(static_cast<std::size_t>(nn)), o2 = o1;
    for (const auto op : {kernels::EwOp::Add, kernels::EwOp::Sub, kernels::EwOp::Mul}) {
        kernels::ew_serial(op, nn, x.data(), y.data(), o1.data());
        kernels::ew_parallel(op, nn, x.data(), y.data(), o2.data());
        CHECK(o1 == o2);
    }

    kernels::sigmoid_serial(nn, x.data(), o1.data());
    kernels::sigmoid_parallel(nn, x.data(), o2.data());
    CHECK(o1 == o2);

    std::vector<double> ya(static_cast<std::size_t>(nn), 1.0), yb = ya;
    kernels::axpy_serial(nn, 0.37, x.data(), ya.data());
    kernels::axpy_parallel(nn, 0.37, x.data(), yb.data());
    CHECK(ya == yb);

    CHECK(kernels::sum_sq_serial(nn, x.data()) == kernels::sum_sq_parallel(nn, x.data()));

    // labels in [0,1]
    std::vector<double> labels(static_cast<std::size_t>(nn));
    for (auto& v : labels) v = rng.uniform() < 0.1 ? 1.0 : 0.0;
    const std::int64_t rows = 101, cols = nn / 101;
    CHECK(kernels::bce_logits_mean_serial(rows, cols, x.data(), labels.data()) ==
          kernels::bce_logits_mean_parallel(rows, cols, x.data(), labels.data()));

    std::vector<double> g1(static_cast<std::size_t>(nn), 0.5), g2 = g1;
    kernels::bce_logits_grad_serial(nn, x.data(), labels.data(), 0.25, g1.data());
    kernels::bce_logits_grad_parallel(nn, x.data(), labels.data(), 0.25, g2.data());
    CHECK(g1 == g2);

    std::vector<double> t1 = random_vec(static_cast<std::size_t>(nn), rng), t2 = t1;
    std::vector<double> m1(static_cast<std::size_t>(nn), 0.0), m2 = m1, v1 = m1, v2 = m1;
    kernels::adam_update_serial(nn, t1.data(), x.data(), m1.data(), v1.data(), 3, 0.01, 0.9,
                                0.999, 1e-8, 0.1);
    kernels::adam_update_parallel(nn, t2.data(), x.data(), m2.data(), v2.data(), 3, 0.01, 0.9,
                                  0.999, 1e-8, 0.1);
    CHECK(t1 == t2);
    CHECK(m1 == m2);
    CHECK(v1 == v2);

    const std::int64_t rows2 = 257, d = 7;
    const auto src = random_vec(static_cast<std::size_t>(rows2 * d), rng);
    std::vector<std::int64_t> idx(500);
    for (auto& i : idx) i = static_cast<std::int64_t>(rng.uniform_int(rows2));
    std::vector<double> ga(idx.size() * d), gb = ga;
    kernels::gather_rows_serial(static_cast<std::int64_t>(idx.size()), d, src.data(), idx.data(),
                                ga.data());
    kernels::gather_rows_parallel(static_cast<std::int64_t>(idx.size()), d, src.data(), idx.data(),
                                  gb.data());
    CHECK(ga == gb);

    std::vector<double> s1(static_cast<std::size_t>(rows * cols)), s2 = s1;
    kernels::softmax_rows_serial(rows, cols, x.data(), s1.data());
    kernels::softmax_rows_parallel(rows, cols, x.data(), s2.data());
    CHECK(s1 == s2);
}

TEST_CASE("sigmoid is stable far into the tails") {
    double out = 0.0;
    double z = 0.0;
    kernels::sigmoid_serial(1, &z, &out);
    CHECK(out == 0.5);
    z = -1000.0;
    kernels::sigmoid_serial(1, &z, &out);
    CHECK(out >= 0.0);
    CHECK(out <= 1e-300);
    CHECK(std::isfinite(out));
    z = 1000.0;
    kernels::sigmoid_serial(1, &z, &out);
    CHECK(out == 1.0);
    z = std::log(3.0);
    kernels::sigmoid_serial(1, &z, &out);
    CHECK(out == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("bce closed forms") {
    const double z0 = 0.0, y0 = 0.0;
    CHECK(kernels::bce_logits_mean_serial(1, 1, &z0, &y0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double z2 = 2.0, y1 = 1.0;
    // softplus(-2)
    CHECK(kernels::bce_logits_mean_serial(1, 1, &z2, &y1) ==
          doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-9));
    CHECK(kernels::bce_logits_mean_serial(1, 1, &z2, &y1) == doctest::Approx(0.1269280110).epsilon(1e-8));
    // near-perfect fit
    const double zbig = 1e4;
    CHECK(kernels::bce_logits_mean_serial(1, 1, &zbig, &y1) < 1e-4);
}

TEST_CASE("adam first step matches the closed form") {
    double theta = 1.0, g = 1.0, m = 0.0, v = 0.0;
    kernels::adam_update_serial(1, &theta, &g, &m, &v, 1, 0.01, 0.9, 0.999, 1e-8, 0.0);
    // mhat = g, vhat = g^2 -> step = lr * 1/(1 + eps')
    CHECK(theta == doctest::Approx(1.0 - 0.01).epsilon(1e-6));

    // zero gradient, zero moments: parameter untouched
    double theta2 = 0.7, g2 = 0.0, m2 = 0.0, v2 = 0.0;
    kernels::adam_update_serial(1, &theta2, &g2, &m2, &v2, 1, 0.01, 0.9, 0.999, 1e-8, 0.0);
    CHECK(theta2 == 0.7);

    // l2 with zero gradient shrinks toward zero
    double theta3 = 0.7, g3 = 0.0, m3 = 0.0, v3 = 0.0;
    kernels::adam_update_serial(1, &theta3, &g3, &m3, &v3, 1, 0.01, 0.9, 0.999, 1e-8, 0.5);
    CHECK(theta3 < 0.7);
    CHECK(theta3 > 0.0);
}

TEST_CASE("sum_sq uses the same chunked combine order in both variants") {
    Rng rng(3);
    for (const std::int64_t n : {1, 5, 4095, 4096, 4097, 40960}) {
        const auto x = random_vec(static_cast<std::size_t>(n), rng);
        double plain = 0.0;
        for (const double v : x) plain += v * v;
        CHECK(kernels::sum_sq_serial(n, x.data()) == doctest::Approx(plain).epsilon(1e-12));
    }
}
