#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kge/rng.hpp"

namespace kge {

// Dense row-major double tensor. Value-semantic handle over shared storage;
// a tensor's data is written once by the op that produces it and treated as
// immutable afterwards. Gradients accumulate into a separate buffer.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::int64_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::int64_t> shape, double value, bool requires_grad = false);
    static Tensor from(std::vector<std::int64_t> shape, std::vector<double> data,
                       bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);
    static Tensor uniform(std::vector<std::int64_t> shape, double lo, double hi, Rng& rng,
                          bool requires_grad = false);

    bool defined() const { return p_ != nullptr; }
    const std::vector<std::int64_t>& shape() const { return p_->shape; }
    std::int64_t ndim() const { return static_cast<std::int64_t>(p_->shape.size()); }
    std::int64_t numel() const { return static_cast<std::int64_t>(p_->data.size()); }
    std::int64_t dim(std::size_t i) const { return p_->shape[i]; }
    // 2-d helpers
    std::int64_t rows() const { return p_->shape[0]; }
    std::int64_t cols() const { return p_->shape[1]; }

    std::vector<double>& data() { return p_->data; }
    const std::vector<double>& data() const { return p_->data; }

    bool requires_grad() const { return p_->requires_grad; }
    void set_requires_grad(bool rg);

    bool has_grad() const { return !p_->grad.empty(); }
    // allocates (zero-filled) on first use
    std::vector<double>& grad();
    const std::vector<double>& grad() const { return p_->grad; }
    void zero_grad();

    double item() const;
    bool all_finite() const;
    bool grad_all_finite() const;

    bool same_impl(const Tensor& other) const { return p_ == other.p_; }

private:
    struct Impl {
        std::vector<std::int64_t> shape;
        std::vector<double> data;
        std::vector<double> grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Impl> p_;

    explicit Tensor(std::shared_ptr<Impl> p) : p_(std::move(p)) {}
    static Tensor make(std::vector<std::int64_t> shape, bool requires_grad);

    friend std::int64_t shape_numel(const std::vector<std::int64_t>& shape);
};

std::int64_t shape_numel(const std::vector<std::int64_t>& shape);
std::string shape_str(const std::vector<std::int64_t>& shape);

// Reverse-mode tape: ops append backward closures during the forward pass;
// backward() replays them once in reverse order.
class Tape {
public:
    void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }
    std::size_t size() const { return steps_.size(); }

    // loss must be scalar; errors on a second call without reset
    void backward(Tensor& loss);
    void reset();

private:
    std::vector<std::function<void()>> steps_;
    bool consumed_ = false;
};

// Forward ops. Recording happens only when tape != nullptr and some input
// requires grad; with tape == nullptr they are pure functions.
namespace ops {

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b);      // [n,k]x[k,p]
Tensor matmul_nt(Tape* tape, const Tensor& a, const Tensor& b);   // [n,k]x[p,k] -> [n,p]

Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape* tape, const Tensor& a, const Tensor& b);

Tensor add_scalar(Tape* tape, const Tensor& a, double s);
Tensor mul_scalar(Tape* tape, const Tensor& a, double s);

// x[n,d] + b[d] broadcast over rows
Tensor add_rowvec(Tape* tape, const Tensor& x, const Tensor& b);

Tensor sigmoid(Tape* tape, const Tensor& z);

Tensor gather_rows(Tape* tape, const Tensor& x, std::vector<std::int64_t> idx);

Tensor reshape(Tape* tape, const Tensor& x, std::vector<std::int64_t> shape);

// contiguous column block [c0, c1) of a 2-d tensor
Tensor slice_cols(Tape* tape, const Tensor& x, std::int64_t c0, std::int64_t c1);
Tensor concat_cols(Tape* tape, const std::vector<Tensor>& parts);

// batched 3-d matmuls: a[B,m,k] x b[B,n,k]^T -> [B,m,n]; a[B,m,k] x b[B,k,n] -> [B,m,n]
Tensor bmm_nt(Tape* tape, const Tensor& a, const Tensor& b);
Tensor bmm_nn(Tape* tape, const Tensor& a, const Tensor& b);

// softmax over the last axis
Tensor softmax_lastdim(Tape* tape, const Tensor& x);

Tensor sum_all(Tape* tape, const Tensor& x);
Tensor mean_all(Tape* tape, const Tensor& x);

// [n,d],[n,d] -> [n]
Tensor rowwise_dot(Tape* tape, const Tensor& a, const Tensor& b);

// scale rows of x[n,d] to unit euclidean norm (rows with zero norm pass through)
Tensor unit_rows(Tape* tape, const Tensor& x);

// inverted dropout; pure identity when rate == 0
Tensor dropout(Tape* tape, const Tensor& x, double rate, Rng& rng);

// mean over all cells of the stable binary cross-entropy on logits
Tensor bce_with_logits_mean(Tape* tape, const Tensor& logits, const Tensor& labels);

}  // namespace ops

}  // namespace kge
