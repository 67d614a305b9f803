#pragma once

#include <cstdint>
#include <cstddef>

// Dense double-precision kernels backing the tensor ops. Every kernel has a
// serial reference and an OpenMP variant; both produce bit-identical results
// because parallel loops partition independent output elements and every
// floating-point reduction uses a fixed combine order. The dispatcher picks
// the parallel variant when it is enabled and the problem is big enough.
namespace kge::kernels {

void set_parallel(bool on);
bool parallel_enabled();
int max_threads();

// ---- GEMM family. Row-major. C is [m x n]; accumulate adds into C. ----

// C (+)= A[m,k] * B[k,n]
void gemm_nn_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate);
void gemm_nn_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate);
void gemm_nn(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate);

// C (+)= A[m,k] * B[n,k]^T
void gemm_nt_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate);
void gemm_nt_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate);
void gemm_nt(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate);

// C (+)= A[k,m]^T * B[k,n]
void gemm_tn_serial(std::int64_t m, std::int64_t n, std::int64_t k,
                    const double* a, const double* b, double* c, bool accumulate);
void gemm_tn_parallel(std::int64_t m, std::int64_t n, std::int64_t k,
                      const double* a, const double* b, double* c, bool accumulate);
void gemm_tn(std::int64_t m, std::int64_t n, std::int64_t k,
             const double* a, const double* b, double* c, bool accumulate);

// ---- Elementwise ----

enum class EwOp { Add, Sub, Mul };

void ew_serial(EwOp op, std::int64_t n, const double* a, const double* b, double* out);
void ew_parallel(EwOp op, std::int64_t n, const double* a, const double* b, double* out);
void ew(EwOp op, std::int64_t n, const double* a, const double* b, double* out);

// y += alpha * x
void axpy_serial(std::int64_t n, double alpha, const double* x, double* y);
void axpy_parallel(std::int64_t n, double alpha, const double* x, double* y);
void axpy(std::int64_t n, double alpha, const double* x, double* y);

void scale_serial(std::int64_t n, double alpha, const double* x, double* out);
void scale_parallel(std::int64_t n, double alpha, const double* x, double* out);
void scale(std::int64_t n, double alpha, const double* x, double* out);

// Numerically stable logistic sigmoid (sign-split form).
void sigmoid_serial(std::int64_t n, const double* z, double* out);
void sigmoid_parallel(std::int64_t n, const double* z, double* out);
void sigmoid(std::int64_t n, const double* z, double* out);

// ---- Embedding gather/scatter ----

void gather_rows_serial(std::int64_t rows, std::int64_t d, const double* src,
                        const std::int64_t* idx, double* out);
void gather_rows_parallel(std::int64_t rows, std::int64_t d, const double* src,
                          const std::int64_t* idx, double* out);
void gather_rows(std::int64_t rows, std::int64_t d, const double* src,
                 const std::int64_t* idx, double* out);

// grad_src[idx[i]] += grad_out[i]; serial by contract (rows may repeat).
void scatter_add_rows(std::int64_t rows, std::int64_t d, const double* grad_out,
                      const std::int64_t* idx, double* grad_src);

// ---- Reductions (fixed combine order => bit-stable across thread counts) ----

// mean over all cells of max(z,0) - z*y + log1p(exp(-|z|)); per-row partials
// are combined serially in row order.
double bce_logits_mean_serial(std::int64_t rows, std::int64_t cols,
                              const double* z, const double* y);
double bce_logits_mean_parallel(std::int64_t rows, std::int64_t cols,
                                const double* z, const double* y);
double bce_logits_mean(std::int64_t rows, std::int64_t cols,
                       const double* z, const double* y);

// gout += s * (sigmoid(z) - y)
void bce_logits_grad_serial(std::int64_t n, const double* z, const double* y,
                            double s, double* gout);
void bce_logits_grad_parallel(std::int64_t n, const double* z, const double* y,
                              double s, double* gout);
void bce_logits_grad(std::int64_t n, const double* z, const double* y,
                     double s, double* gout);

// sum of squares, chunked with a fixed chunk size so the combine order never
// depends on the thread count.
double sum_sq_serial(std::int64_t n, const double* x);
double sum_sq_parallel(std::int64_t n, const double* x);
double sum_sq(std::int64_t n, const double* x);

// ---- Softmax over contiguous rows ----

void softmax_rows_serial(std::int64_t rows, std::int64_t cols, const double* x, double* out);
void softmax_rows_parallel(std::int64_t rows, std::int64_t cols, const double* x, double* out);
void softmax_rows(std::int64_t rows, std::int64_t cols, const double* x, double* out);

// ---- Adam ----

// Bias-corrected Adam with classical L2 (g + l2*theta). t is the step count
// after incrementing (>= 1).
void adam_update_serial(std::int64_t n, double* theta, const double* g, double* m,
                        double* v, std::int64_t t, double lr, double beta1,
                        double beta2, double eps, double l2);
void adam_update_parallel(std::int64_t n, double* theta, const double* g, double* m,
                          double* v, std::int64_t t, double lr, double beta1,
                          double beta2, double eps, double l2);
void adam_update(std::int64_t n, double* theta, const double* g, double* m,
                 double* v, std::int64_t t, double lr, double beta1,
                 double beta2, double eps, double l2);

}  // namespace kge::kernels
