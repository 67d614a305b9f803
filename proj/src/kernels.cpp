#include "kge/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kge::kernels {

namespace {
std::atomic<bool> g_parallel{true};

// below this many flops the omp fork/join overhead dominates
constexpr std::int64_t kParallelCutoff = 16 * 1024;

inline bool go_parallel(std::int64_t work) {
#ifdef _OPENMP
    return g_parallel.load(std::memory_order_relaxed) && work >= kParallelCutoff &&
           omp_get_max_threads() > 1;
#else
    (void)work;
    return false;
#endif
}
}  // namespace

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }
bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---- GEMM ----

namespace {
inline void gemm_nn_row(std::int64_t i, std::int64_t n, std::int64_t k,
                        const double* a, const double* b, double* c, bool accumulate) {
    double* crow = c + i * n;
    if (!accumulate) std::memset(crow, 0, sizeof(double) * static_cast<std::size_t>(n));
    const double* arow = a + i * k;
    for (std::int64_t l = 0; l < k; ++l) {
        const double al = arow[l];
        const double* brow = b + l * n;
        for (std::int64_t j = 0; j < n; ++j) crow[j] += al * brow[j];
    }
}

// Column-block width for the nt kernel: B rows are transposed into a dense
// [k x w] panel so the l-loop updates w accumulators with unit stride. Each
// C[i,j] still sums over l in ascending order, so results are bit-identical
// to the plain dot-product formulation.
constexpr std::int64_t kNtBlock = 64;

inline void gemm_nt_block(std::int64_t jb, std::int64_t m, std::int64_t n, std::int64_t k,
                          const double* a, const double* b, double* c, bool accumulate,
                          std::vector<double>& panel) {
    const std::int64_t w = std::min(kNtBlock, n - jb);
    panel.resize(static_cast<std::size_t>(k * w));
    for (std::int64_t jj = 0; jj < w; ++jj)
        for (std::int64_t l = 0; l < k; ++l)
            panel[static_cast<std::size_t>(l * w + jj)] = b[(jb + jj) * k + l];
    for (std::int64_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double acc[kNtBlock] = {0.0};
        for (std::int64_t l = 0; l < k; ++l) {
            const double al = arow[l];
            const double* prow = panel.data() + l * w;
            for (std::int64_t jj = 0; jj < w; ++jj) acc[jj] += al * prow[jj];
        }
        double* crow = c + i * n + jb;
        if (accumulate)
            for (std::int64_t jj = 0; jj < w; ++jj) crow[jj] += acc[jj];
        else
            for (std::int64_t jj = 0; jj < w; ++jj) crow[jj] = acc[jj];
    }
}

inline void gemm_tn_row(std::int64_t i, std::int64_t m, std::int64_t n, std::int64_t k,
                        const double* a, const double* b, double* c, bool accumulate) {
    // C[i,:] = sum_l A[l,i] * B[l,:]
    double* crow = c + i * n;
    if (!accumulate) std::memset(crow, 0, sizeof(double) * static_cast<std::size_t>(n));
    for (std::int64_t l = 0; l < k; ++l) {
        const double al = a[l * m + i];
        const double* brow = b + l * n;
        for (std::int64_t j = 0; j < n; ++j) crow[j] += al * brow[j];
    }
}
}  // namespace

void gemm_nn_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate) {
    for (std::int64_t i = 0; i < m; ++i) gemm_nn_row(i, n, k, a, b, c, accumulate);
}

void gemm_nn_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) gemm_nn_row(i, n, k, a, b, c, accumulate);
}

void gemm_nn(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate) {
    if (go_parallel(m * n * k)) gemm_nn_parallel(m, n, k, a, b, c, accumulate);
    else gemm_nn_serial(m, n, k, a, b, c, accumulate);
}

void gemm_nt_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate) {
    std::vector<double> panel;
    for (std::int64_t jb = 0; jb < n; jb += kNtBlock)
        gemm_nt_block(jb, m, n, k, a, b, c, accumulate, panel);
}

void gemm_nt_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate) {
    const std::int64_t nblocks = (n + kNtBlock - 1) / kNtBlock;
#pragma omp parallel
    {
        std::vector<double> panel;
#pragma omp for schedule(static)
        for (std::int64_t blk = 0; blk < nblocks; ++blk)
            gemm_nt_block(blk * kNtBlock, m, n, k, a, b, c, accumulate, panel);
    }
}

void gemm_nt(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate) {
    if (go_parallel(m * n * k)) gemm_nt_parallel(m, n, k, a, b, c, accumulate);
    else gemm_nt_serial(m, n, k, a, b, c, accumulate);
}

void gemm_tn_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate) {
    for (std::int64_t i = 0; i < m; ++i) gemm_tn_row(i, m, n, k, a, b, c, accumulate);
}

void gemm_tn_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) gemm_tn_row(i, m, n, k, a, b, c, accumulate);
}

void gemm_tn(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate) {
    if (go_parallel(m * n * k)) gemm_tn_parallel(m, n, k, a, b, c, accumulate);
    else gemm_tn_serial(m, n, k, a, b, c, accumulate);
}

// ---- Elementwise ----

namespace {
template <EwOp Op>
inline double ew_one(double x, double y) {
    if constexpr (Op == EwOp::Add) return x + y;
    else if constexpr (Op == EwOp::Sub) return x - y;
    else return x * y;
}

template <EwOp Op>
void ew_loop_serial(std::int64_t n, const double* a, const double* b, double* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = ew_one<Op>(a[i], b[i]);
}

template <EwOp Op>
void ew_loop_parallel(std::int64_t n, const double* a, const double* b, double* out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = ew_one<Op>(a[i], b[i]);
}
}  // namespace

void ew_serial(EwOp op, std::int64_t n, const double* a, const double* b, double* out) {
    switch (op) {
        case EwOp::Add: ew_loop_serial<EwOp::Add>(n, a, b, out); break;
        case EwOp::Sub: ew_loop_serial<EwOp::Sub>(n, a, b, out); break;
        case EwOp::Mul: ew_loop_serial<EwOp::Mul>(n, a, b, out); break;
    }
}

void ew_parallel(EwOp op, std::int64_t n, const double* a, const double* b, double* out) {
    switch (op) {
        case EwOp::Add: ew_loop_parallel<EwOp::Add>(n, a, b, out); break;
        case EwOp::Sub: ew_loop_parallel<EwOp::Sub>(n, a, b, out); break;
        case EwOp::Mul: ew_loop_parallel<EwOp::Mul>(n, a, b, out); break;
    }
}

void ew(EwOp op, std::int64_t n, const double* a, const double* b, double* out) {
    if (go_parallel(n)) ew_parallel(op, n, a, b, out);
    else ew_serial(op, n, a, b, out);
}

void axpy_serial(std::int64_t n, double alpha, const double* x, double* y) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_parallel(std::int64_t n, double alpha, const double* x, double* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy(std::int64_t n, double alpha, const double* x, double* y) {
    if (go_parallel(n)) axpy_parallel(n, alpha, x, y);
    else axpy_serial(n, alpha, x, y);
}

void scale_serial(std::int64_t n, double alpha, const double* x, double* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

void scale_parallel(std::int64_t n, double alpha, const double* x, double* out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

void scale(std::int64_t n, double alpha, const double* x, double* out) {
    if (go_parallel(n)) scale_parallel(n, alpha, x, out);
    else scale_serial(n, alpha, x, out);
}

namespace {
inline double sigmoid_one(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}
}  // namespace

void sigmoid_serial(std::int64_t n, const double* z, double* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = sigmoid_one(z[i]);
}

void sigmoid_parallel(std::int64_t n, const double* z, double* out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = sigmoid_one(z[i]);
}

void sigmoid(std::int64_t n, const double* z, double* out) {
    if (go_parallel(n)) sigmoid_parallel(n, z, out);
    else sigmoid_serial(n, z, out);
}

// ---- Gather / scatter ----

void gather_rows_serial(std::int64_t rows, std::int64_t d, const double* src,
                        const std::int64_t* idx, double* out) {
    for (std::int64_t i = 0; i < rows; ++i)
        std::memcpy(out + i * d, src + idx[i] * d, sizeof(double) * static_cast<std::size_t>(d));
}

void gather_rows_parallel(std::int64_t rows, std::int64_t d, const double* src,
                          const std::int64_t* idx, double* out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i)
        std::memcpy(out + i * d, src + idx[i] * d, sizeof(double) * static_cast<std::size_t>(d));
}

void gather_rows(std::int64_t rows, std::int64_t d, const double* src,
                 const std::int64_t* idx, double* out) {
    if (go_parallel(rows * d)) gather_rows_parallel(rows, d, src, idx, out);
    else gather_rows_serial(rows, d, src, idx, out);
}

void scatter_add_rows(std::int64_t rows, std::int64_t d, const double* grad_out,
                      const std::int64_t* idx, double* grad_src) {
    // indices may repeat; keep it serial so accumulation order is fixed
    for (std::int64_t i = 0; i < rows; ++i) {
        double* dst = grad_src + idx[i] * d;
        const double* g = grad_out + i * d;
        for (std::int64_t j = 0; j < d; ++j) dst[j] += g[j];
    }
}

// ---- BCE with logits ----

namespace {
inline double bce_cell(double z, double y) {
    // max(z,0) - z*y + log1p(exp(-|z|))
    const double zpos = z > 0.0 ? z : 0.0;
    return zpos - z * y + std::log1p(std::exp(-std::fabs(z)));
}

double bce_row_sum(std::int64_t cols, const double* z, const double* y) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) acc += bce_cell(z[j], y[j]);
    return acc;
}
}  // namespace

double bce_logits_mean_serial(std::int64_t rows, std::int64_t cols,
                              const double* z, const double* y) {
    double total = 0.0;
    for (std::int64_t i = 0; i < rows; ++i)
        total += bce_row_sum(cols, z + i * cols, y + i * cols);
    return total / static_cast<double>(rows * cols);
}

double bce_logits_mean_parallel(std::int64_t rows, std::int64_t cols,
                                const double* z, const double* y) {
    std::vector<double> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i)
        partial[static_cast<std::size_t>(i)] = bce_row_sum(cols, z + i * cols, y + i * cols);
    double total = 0.0;
    for (std::int64_t i = 0; i < rows; ++i) total += partial[static_cast<std::size_t>(i)];
    return total / static_cast<double>(rows * cols);
}

double bce_logits_mean(std::int64_t rows, std::int64_t cols, const double* z, const double* y) {
    // serial path uses the same row-partial order, so both are bit-identical
    if (go_parallel(rows * cols)) return bce_logits_mean_parallel(rows, cols, z, y);
    double total = 0.0;
    for (std::int64_t i = 0; i < rows; ++i)
        total += bce_row_sum(cols, z + i * cols, y + i * cols);
    return total / static_cast<double>(rows * cols);
}

void bce_logits_grad_serial(std::int64_t n, const double* z, const double* y,
                            double s, double* gout) {
    for (std::int64_t i = 0; i < n; ++i) gout[i] += s * (sigmoid_one(z[i]) - y[i]);
}

void bce_logits_grad_parallel(std::int64_t n, const double* z, const double* y,
                              double s, double* gout) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) gout[i] += s * (sigmoid_one(z[i]) - y[i]);
}

void bce_logits_grad(std::int64_t n, const double* z, const double* y, double s, double* gout) {
    if (go_parallel(n)) bce_logits_grad_parallel(n, z, y, s, gout);
    else bce_logits_grad_serial(n, z, y, s, gout);
}

// ---- sum of squares ----

namespace {
constexpr std::int64_t kChunk = 4096;

inline double sum_sq_chunk(std::int64_t lo, std::int64_t hi, const double* x) {
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += x[i] * x[i];
    return acc;
}
}  // namespace

double sum_sq_serial(std::int64_t n, const double* x) {
    const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
    double total = 0.0;
    for (std::int64_t c = 0; c < nchunks; ++c)
        total += sum_sq_chunk(c * kChunk, std::min((c + 1) * kChunk, n), x);
    return total;
}

double sum_sq_parallel(std::int64_t n, const double* x) {
    const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < nchunks; ++c)
        partial[static_cast<std::size_t>(c)] =
            sum_sq_chunk(c * kChunk, std::min((c + 1) * kChunk, n), x);
    double total = 0.0;
    for (std::int64_t c = 0; c < nchunks; ++c) total += partial[static_cast<std::size_t>(c)];
    return total;
}

double sum_sq(std::int64_t n, const double* x) {
    if (go_parallel(n)) return sum_sq_parallel(n, x);
    return sum_sq_serial(n, x);
}

// ---- Softmax ----

namespace {
inline void softmax_row(std::int64_t cols, const double* x, double* out) {
    double mx = x[0];
    for (std::int64_t j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
    double sum = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) {
        out[j] = std::exp(x[j] - mx);
        sum += out[j];
    }
    const double inv = 1.0 / sum;
    for (std::int64_t j = 0; j < cols; ++j) out[j] *= inv;
}
}  // namespace

void softmax_rows_serial(std::int64_t rows, std::int64_t cols, const double* x, double* out) {
    for (std::int64_t i = 0; i < rows; ++i) softmax_row(cols, x + i * cols, out + i * cols);
}

void softmax_rows_parallel(std::int64_t rows, std::int64_t cols, const double* x, double* out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) softmax_row(cols, x + i * cols, out + i * cols);
}

void softmax_rows(std::int64_t rows, std::int64_t cols, const double* x, double* out) {
    if (go_parallel(rows * cols)) softmax_rows_parallel(rows, cols, x, out);
    else softmax_rows_serial(rows, cols, x, out);
}

// ---- Adam ----

namespace {
inline void adam_one(std::int64_t i, double* theta, const double* g, double* m, double* v,
                     double lr, double beta1, double beta2, double eps, double l2,
                     double bc1, double bc2) {
    const double gi = g[i] + l2 * theta[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
    v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
}
}  // namespace

void adam_update_serial(std::int64_t n, double* theta, const double* g, double* m,
                        double* v, std::int64_t t, double lr, double beta1,
                        double beta2, double eps, double l2) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::int64_t i = 0; i < n; ++i)
        adam_one(i, theta, g, m, v, lr, beta1, beta2, eps, l2, bc1, bc2);
}

void adam_update_parallel(std::int64_t n, double* theta, const double* g, double* m,
                          double* v, std::int64_t t, double lr, double beta1,
                          double beta2, double eps, double l2) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        adam_one(i, theta, g, m, v, lr, beta1, beta2, eps, l2, bc1, bc2);
}

void adam_update(std::int64_t n, double* theta, const double* g, double* m,
                 double* v, std::int64_t t, double lr, double beta1,
                 double beta2, double eps, double l2) {
    if (go_parallel(n)) adam_update_parallel(n, theta, g, m, v, t, lr, beta1, beta2, eps, l2);
    else adam_update_serial(n, theta, g, m, v, t, lr, beta1, beta2, eps, l2);
}

}  // namespace kge::kernels
