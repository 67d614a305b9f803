#include "kge/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "kge/kernels.hpp"

namespace kge {

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto s : shape) {
        if (s <= 0) throw std::invalid_argument("tensor shape entries must be positive");
        n *= s;
    }
    return n;
}

std::string shape_str(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor Tensor::make(std::vector<std::int64_t> shape, bool requires_grad) {
    auto impl = std::make_shared<Impl>();
    impl->shape = std::move(shape);
    impl->data.assign(static_cast<std::size_t>(shape_numel(impl->shape)), 0.0);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape, bool requires_grad) {
    return make(std::move(shape), requires_grad);
}

Tensor Tensor::full(std::vector<std::int64_t> shape, double value, bool requires_grad) {
    Tensor t = make(std::move(shape), requires_grad);
    std::fill(t.data().begin(), t.data().end(), value);
    return t;
}

Tensor Tensor::from(std::vector<std::int64_t> shape, std::vector<double> data,
                    bool requires_grad) {
    Tensor t = make(std::move(shape), requires_grad);
    if (static_cast<std::int64_t>(data.size()) != t.numel())
        throw std::invalid_argument("data length does not match shape " + shape_str(t.shape()));
    t.p_->data = std::move(data);
    return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return from({1}, {v}, requires_grad);
}

Tensor Tensor::uniform(std::vector<std::int64_t> shape, double lo, double hi, Rng& rng,
                       bool requires_grad) {
    Tensor t = make(std::move(shape), requires_grad);
    for (auto& x : t.data()) x = rng.uniform(lo, hi);
    return t;
}

void Tensor::set_requires_grad(bool rg) { p_->requires_grad = rg; }

std::vector<double>& Tensor::grad() {
    if (p_->grad.empty()) p_->grad.assign(p_->data.size(), 0.0);
    return p_->grad;
}

void Tensor::zero_grad() {
    if (!p_->grad.empty()) std::fill(p_->grad.begin(), p_->grad.end(), 0.0);
}

double Tensor::item() const {
    if (numel() != 1) throw std::invalid_argument("item() on non-scalar tensor " + shape_str(shape()));
    return p_->data[0];
}

bool Tensor::all_finite() const {
    for (double x : p_->data)
        if (!std::isfinite(x)) return false;
    return true;
}

bool Tensor::grad_all_finite() const {
    for (double x : p_->grad)
        if (!std::isfinite(x)) return false;
    return true;
}

void Tape::backward(Tensor& loss) {
    if (loss.numel() != 1)
        throw std::invalid_argument("backward requires a scalar loss, got " + shape_str(loss.shape()));
    if (consumed_)
        throw std::runtime_error("backward called twice on the same tape; reset or rebuild it");
    consumed_ = true;
    if (!loss.requires_grad()) return;  // constant loss: nothing reaches any leaf
    loss.grad()[0] += 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

void Tape::reset() {
    steps_.clear();
    consumed_ = false;
}

namespace ops {

namespace {

bool track(Tape* tape, const Tensor& a) { return tape != nullptr && a.requires_grad(); }
bool track(Tape* tape, const Tensor& a, const Tensor& b) {
    return tape != nullptr && (a.requires_grad() || b.requires_grad());
}

void check_2d(const Tensor& t, const char* who) {
    if (t.ndim() != 2)
        throw std::invalid_argument(std::string(who) + " expects a 2-d tensor, got " + shape_str(t.shape()));
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* who) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(who) + ": shape mismatch " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
}

// out += a * b elementwise
void mul_acc(std::int64_t n, const double* a, const double* b, double* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

}  // namespace

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b) {
    check_2d(a, "matmul");
    check_2d(b, "matmul");
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ, " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
    const std::int64_t n = a.rows(), k = a.cols(), p = b.cols();
    Tensor out = Tensor::zeros({n, p}, track(tape, a, b));
    kernels::gemm_nn(n, p, k, a.data().data(), b.data().data(), out.data().data(), false);
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        tape->record([ta, tb, to, n, k, p]() mutable {
            const double* g = to.grad().data();
            if (ta.requires_grad())
                kernels::gemm_nt(n, k, p, g, tb.data().data(), ta.grad().data(), true);
            if (tb.requires_grad())
                kernels::gemm_tn(k, p, n, ta.data().data(), g, tb.grad().data(), true);
        });
    }
    return out;
}

Tensor matmul_nt(Tape* tape, const Tensor& a, const Tensor& b) {
    check_2d(a, "matmul_nt");
    check_2d(b, "matmul_nt");
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_nt: inner dimensions differ, " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
    const std::int64_t n = a.rows(), k = a.cols(), p = b.rows();
    Tensor out = Tensor::zeros({n, p}, track(tape, a, b));
    kernels::gemm_nt(n, p, k, a.data().data(), b.data().data(), out.data().data(), false);
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        tape->record([ta, tb, to, n, k, p]() mutable {
            const double* g = to.grad().data();
            if (ta.requires_grad())
                kernels::gemm_nn(n, k, p, g, tb.data().data(), ta.grad().data(), true);
            if (tb.requires_grad())
                kernels::gemm_tn(p, k, n, g, ta.data().data(), tb.grad().data(), true);
        });
    }
    return out;
}

namespace {
Tensor ew_op(Tape* tape, kernels::EwOp op, const Tensor& a, const Tensor& b, const char* who) {
    check_same_shape(a, b, who);
    Tensor out = Tensor::zeros(a.shape(), track(tape, a, b));
    kernels::ew(op, a.numel(), a.data().data(), b.data().data(), out.data().data());
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        const std::int64_t n = a.numel();
        tape->record([ta, tb, to, op, n]() mutable {
            const double* g = to.grad().data();
            switch (op) {
                case kernels::EwOp::Add:
                    if (ta.requires_grad()) kernels::axpy(n, 1.0, g, ta.grad().data());
                    if (tb.requires_grad()) kernels::axpy(n, 1.0, g, tb.grad().data());
                    break;
                case kernels::EwOp::Sub:
                    if (ta.requires_grad()) kernels::axpy(n, 1.0, g, ta.grad().data());
                    if (tb.requires_grad()) kernels::axpy(n, -1.0, g, tb.grad().data());
                    break;
                case kernels::EwOp::Mul:
                    if (ta.requires_grad()) mul_acc(n, g, tb.data().data(), ta.grad().data());
                    if (tb.requires_grad()) mul_acc(n, g, ta.data().data(), tb.grad().data());
                    break;
            }
        });
    }
    return out;
}
}  // namespace

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) { return ew_op(tape, kernels::EwOp::Add, a, b, "add"); }
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) { return ew_op(tape, kernels::EwOp::Sub, a, b, "sub"); }
Tensor mul(Tape* tape, const Tensor& a, const Tensor& b) { return ew_op(tape, kernels::EwOp::Mul, a, b, "mul"); }

Tensor add_scalar(Tape* tape, const Tensor& a, double s) {
    Tensor out = Tensor::zeros(a.shape(), track(tape, a));
    const std::int64_t n = a.numel();
    for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] + s;
    if (out.requires_grad()) {
        Tensor ta = a, to = out;
        tape->record([ta, to, n]() mutable { kernels::axpy(n, 1.0, to.grad().data(), ta.grad().data()); });
    }
    return out;
}

Tensor mul_scalar(Tape* tape, const Tensor& a, double s) {
    Tensor out = Tensor::zeros(a.shape(), track(tape, a));
    kernels::scale(a.numel(), s, a.data().data(), out.data().data());
    if (out.requires_grad()) {
        Tensor ta = a, to = out;
        const std::int64_t n = a.numel();
        tape->record([ta, to, n, s]() mutable { kernels::axpy(n, s, to.grad().data(), ta.grad().data()); });
    }
    return out;
}

Tensor add_rowvec(Tape* tape, const Tensor& x, const Tensor& b) {
    check_2d(x, "add_rowvec");
    if (b.ndim() != 1 || b.dim(0) != x.cols())
        throw std::invalid_argument("add_rowvec: bias " + shape_str(b.shape()) +
                                    " does not match " + shape_str(x.shape()));
    const std::int64_t n = x.rows(), d = x.cols();
    Tensor out = Tensor::zeros(x.shape(), track(tape, x, b));
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < d; ++j)
            out.data()[i * d + j] = x.data()[i * d + j] + b.data()[j];
    if (out.requires_grad()) {
        Tensor tx = x, tb = b, to = out;
        tape->record([tx, tb, to, n, d]() mutable {
            const double* g = to.grad().data();
            if (tx.requires_grad()) kernels::axpy(n * d, 1.0, g, tx.grad().data());
            if (tb.requires_grad()) {
                double* gb = tb.grad().data();
                for (std::int64_t i = 0; i < n; ++i)
                    for (std::int64_t j = 0; j < d; ++j) gb[j] += g[i * d + j];
            }
        });
    }
    return out;
}

Tensor sigmoid(Tape* tape, const Tensor& z) {
    Tensor out = Tensor::zeros(z.shape(), track(tape, z));
    kernels::sigmoid(z.numel(), z.data().data(), out.data().data());
    if (out.requires_grad()) {
        Tensor tz = z, to = out;
        const std::int64_t n = z.numel();
        tape->record([tz, to, n]() mutable {
            const double* g = to.grad().data();
            const double* y = to.data().data();
            double* gz = tz.grad().data();
            for (std::int64_t i = 0; i < n; ++i) gz[i] += g[i] * y[i] * (1.0 - y[i]);
        });
    }
    return out;
}

Tensor gather_rows(Tape* tape, const Tensor& x, std::vector<std::int64_t> idx) {
    check_2d(x, "gather_rows");
    const std::int64_t src_rows = x.rows(), d = x.cols();
    for (auto i : idx)
        if (i < 0 || i >= src_rows)
            throw std::out_of_range("gather_rows: index " + std::to_string(i) +
                                    " out of range for " + shape_str(x.shape()));
    const std::int64_t n = static_cast<std::int64_t>(idx.size());
    Tensor out = Tensor::zeros({n, d}, track(tape, x));
    kernels::gather_rows(n, d, x.data().data(), idx.data(), out.data().data());
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        auto ids = std::make_shared<std::vector<std::int64_t>>(std::move(idx));
        tape->record([tx, to, ids, n, d]() mutable {
            kernels::scatter_add_rows(n, d, to.grad().data(), ids->data(), tx.grad().data());
        });
    }
    return out;
}

Tensor reshape(Tape* tape, const Tensor& x, std::vector<std::int64_t> shape) {
    if (shape_numel(shape) != x.numel())
        throw std::invalid_argument("reshape: cannot view " + shape_str(x.shape()) + " as " +
                                    shape_str(shape));
    Tensor out = Tensor::from(std::move(shape), x.data(), track(tape, x));
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        const std::int64_t n = x.numel();
        tape->record([tx, to, n]() mutable { kernels::axpy(n, 1.0, to.grad().data(), tx.grad().data()); });
    }
    return out;
}

Tensor slice_cols(Tape* tape, const Tensor& x, std::int64_t c0, std::int64_t c1) {
    check_2d(x, "slice_cols");
    const std::int64_t n = x.rows(), d = x.cols();
    if (c0 < 0 || c1 > d || c0 >= c1)
        throw std::invalid_argument("slice_cols: bad range [" + std::to_string(c0) + "," +
                                    std::to_string(c1) + ") for " + shape_str(x.shape()));
    const std::int64_t w = c1 - c0;
    Tensor out = Tensor::zeros({n, w}, track(tape, x));
    for (std::int64_t i = 0; i < n; ++i)
        std::memcpy(out.data().data() + i * w, x.data().data() + i * d + c0,
                    sizeof(double) * static_cast<std::size_t>(w));
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        tape->record([tx, to, n, d, c0, w]() mutable {
            const double* g = to.grad().data();
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t j = 0; j < w; ++j) gx[i * d + c0 + j] += g[i * w + j];
        });
    }
    return out;
}

Tensor concat_cols(Tape* tape, const std::vector<Tensor>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    const std::int64_t n = parts[0].rows();
    std::int64_t d = 0;
    bool rg = false;
    for (const auto& p : parts) {
        check_2d(p, "concat_cols");
        if (p.rows() != n)
            throw std::invalid_argument("concat_cols: row mismatch " + shape_str(p.shape()));
        d += p.cols();
        rg = rg || (tape != nullptr && p.requires_grad());
    }
    Tensor out = Tensor::zeros({n, d}, rg);
    std::int64_t off = 0;
    for (const auto& p : parts) {
        const std::int64_t w = p.cols();
        for (std::int64_t i = 0; i < n; ++i)
            std::memcpy(out.data().data() + i * d + off, p.data().data() + i * w,
                        sizeof(double) * static_cast<std::size_t>(w));
        off += w;
    }
    if (rg) {
        std::vector<Tensor> ps = parts;
        Tensor to = out;
        tape->record([ps, to, n, d]() mutable {
            const double* g = to.grad().data();
            std::int64_t off2 = 0;
            for (auto& p : ps) {
                const std::int64_t w = p.cols();
                if (p.requires_grad()) {
                    double* gp = p.grad().data();
                    for (std::int64_t i = 0; i < n; ++i)
                        for (std::int64_t j = 0; j < w; ++j) gp[i * w + j] += g[i * d + off2 + j];
                }
                off2 += w;
            }
        });
    }
    return out;
}

namespace {
void check_3d(const Tensor& t, const char* who) {
    if (t.ndim() != 3)
        throw std::invalid_argument(std::string(who) + " expects a 3-d tensor, got " + shape_str(t.shape()));
}
}  // namespace

Tensor bmm_nt(Tape* tape, const Tensor& a, const Tensor& b) {
    check_3d(a, "bmm_nt");
    check_3d(b, "bmm_nt");
    if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2))
        throw std::invalid_argument("bmm_nt: incompatible " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    const std::int64_t B = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(1);
    Tensor out = Tensor::zeros({B, m, n}, track(tape, a, b));
    for (std::int64_t s = 0; s < B; ++s)
        kernels::gemm_nt(m, n, k, a.data().data() + s * m * k, b.data().data() + s * n * k,
                         out.data().data() + s * m * n, false);
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        tape->record([ta, tb, to, B, m, n, k]() mutable {
            for (std::int64_t s = 0; s < B; ++s) {
                const double* g = to.grad().data() + s * m * n;
                if (ta.requires_grad())
                    kernels::gemm_nn(m, k, n, g, tb.data().data() + s * n * k,
                                     ta.grad().data() + s * m * k, true);
                if (tb.requires_grad())
                    kernels::gemm_tn(n, k, m, g, ta.data().data() + s * m * k,
                                     tb.grad().data() + s * n * k, true);
            }
        });
    }
    return out;
}

Tensor bmm_nn(Tape* tape, const Tensor& a, const Tensor& b) {
    check_3d(a, "bmm_nn");
    check_3d(b, "bmm_nn");
    if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(1))
        throw std::invalid_argument("bmm_nn: incompatible " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    const std::int64_t B = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
    Tensor out = Tensor::zeros({B, m, n}, track(tape, a, b));
    for (std::int64_t s = 0; s < B; ++s)
        kernels::gemm_nn(m, n, k, a.data().data() + s * m * k, b.data().data() + s * k * n,
                         out.data().data() + s * m * n, false);
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        tape->record([ta, tb, to, B, m, n, k]() mutable {
            for (std::int64_t s = 0; s < B; ++s) {
                const double* g = to.grad().data() + s * m * n;
                if (ta.requires_grad())
                    kernels::gemm_nt(m, k, n, g, tb.data().data() + s * k * n,
                                     ta.grad().data() + s * m * k, true);
                if (tb.requires_grad())
                    kernels::gemm_tn(k, n, m, ta.data().data() + s * m * k, g,
                                     tb.grad().data() + s * k * n, true);
            }
        });
    }
    return out;
}

Tensor softmax_lastdim(Tape* tape, const Tensor& x) {
    if (x.ndim() < 1) throw std::invalid_argument("softmax_lastdim: scalar input");
    const std::int64_t cols = x.shape().back();
    const std::int64_t rows = x.numel() / cols;
    Tensor out = Tensor::zeros(x.shape(), track(tape, x));
    kernels::softmax_rows(rows, cols, x.data().data(), out.data().data());
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        tape->record([tx, to, rows, cols]() mutable {
            const double* g = to.grad().data();
            const double* y = to.data().data();
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < rows; ++i) {
                const double* gi = g + i * cols;
                const double* yi = y + i * cols;
                double dot = 0.0;
                for (std::int64_t j = 0; j < cols; ++j) dot += gi[j] * yi[j];
                for (std::int64_t j = 0; j < cols; ++j) gx[i * cols + j] += yi[j] * (gi[j] - dot);
            }
        });
    }
    return out;
}

Tensor sum_all(Tape* tape, const Tensor& x) {
    double total = 0.0;
    for (double v : x.data()) total += v;
    Tensor out = Tensor::scalar(total, track(tape, x));
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        const std::int64_t n = x.numel();
        tape->record([tx, to, n]() mutable {
            const double g0 = to.grad()[0];
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < n; ++i) gx[i] += g0;
        });
    }
    return out;
}

Tensor mean_all(Tape* tape, const Tensor& x) {
    double total = 0.0;
    for (double v : x.data()) total += v;
    const double inv = 1.0 / static_cast<double>(x.numel());
    Tensor out = Tensor::scalar(total * inv, track(tape, x));
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        const std::int64_t n = x.numel();
        tape->record([tx, to, n, inv]() mutable {
            const double g0 = to.grad()[0] * inv;
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < n; ++i) gx[i] += g0;
        });
    }
    return out;
}

Tensor rowwise_dot(Tape* tape, const Tensor& a, const Tensor& b) {
    check_2d(a, "rowwise_dot");
    check_same_shape(a, b, "rowwise_dot");
    const std::int64_t n = a.rows(), d = a.cols();
    Tensor out = Tensor::zeros({n}, track(tape, a, b));
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int64_t j = 0; j < d; ++j) acc += a.data()[i * d + j] * b.data()[i * d + j];
        out.data()[i] = acc;
    }
    if (out.requires_grad()) {
        Tensor ta = a, tb = b, to = out;
        tape->record([ta, tb, to, n, d]() mutable {
            const double* g = to.grad().data();
            for (std::int64_t i = 0; i < n; ++i) {
                if (ta.requires_grad())
                    kernels::axpy_serial(d, g[i], tb.data().data() + i * d, ta.grad().data() + i * d);
                if (tb.requires_grad())
                    kernels::axpy_serial(d, g[i], ta.data().data() + i * d, tb.grad().data() + i * d);
            }
        });
    }
    return out;
}

Tensor unit_rows(Tape* tape, const Tensor& x) {
    check_2d(x, "unit_rows");
    const std::int64_t n = x.rows(), d = x.cols();
    Tensor out = Tensor::zeros(x.shape(), track(tape, x));
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double* xi = x.data().data() + i * d;
        double sq = 0.0;
        for (std::int64_t j = 0; j < d; ++j) sq += xi[j] * xi[j];
        const double norm = std::sqrt(sq);
        norms[static_cast<std::size_t>(i)] = norm;
        const double inv = norm > 0.0 ? 1.0 / norm : 1.0;
        for (std::int64_t j = 0; j < d; ++j) out.data()[i * d + j] = xi[j] * inv;
    }
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        auto ns = std::make_shared<std::vector<double>>(std::move(norms));
        tape->record([tx, to, ns, n, d]() mutable {
            const double* g = to.grad().data();
            const double* y = to.data().data();
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < n; ++i) {
                const double norm = (*ns)[static_cast<std::size_t>(i)];
                const double inv = norm > 0.0 ? 1.0 / norm : 1.0;
                const double* gi = g + i * d;
                const double* yi = y + i * d;
                double dot = 0.0;
                for (std::int64_t j = 0; j < d; ++j) dot += gi[j] * yi[j];
                for (std::int64_t j = 0; j < d; ++j)
                    gx[i * d + j] += inv * (gi[j] - (norm > 0.0 ? dot * yi[j] : 0.0));
            }
        });
    }
    return out;
}

Tensor dropout(Tape* tape, const Tensor& x, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0)
        throw std::invalid_argument("dropout rate must be in [0,1), got " + std::to_string(rate));
    if (rate == 0.0) return x;
    const std::int64_t n = x.numel();
    const double keep_scale = 1.0 / (1.0 - rate);
    auto mask = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        (*mask)[static_cast<std::size_t>(i)] = rng.uniform() < rate ? 0.0 : keep_scale;
    Tensor out = Tensor::zeros(x.shape(), track(tape, x));
    for (std::int64_t i = 0; i < n; ++i)
        out.data()[i] = x.data()[i] * (*mask)[static_cast<std::size_t>(i)];
    if (out.requires_grad()) {
        Tensor tx = x, to = out;
        tape->record([tx, to, mask, n]() mutable {
            const double* g = to.grad().data();
            double* gx = tx.grad().data();
            for (std::int64_t i = 0; i < n; ++i) gx[i] += g[i] * (*mask)[static_cast<std::size_t>(i)];
        });
    }
    return out;
}

Tensor bce_with_logits_mean(Tape* tape, const Tensor& logits, const Tensor& labels) {
    check_same_shape(logits, labels, "bce_with_logits_mean");
    for (double y : labels.data())
        if (!(y >= 0.0 && y <= 1.0))
            throw std::invalid_argument("bce_with_logits_mean: label outside [0,1]: " + std::to_string(y));
    const std::int64_t cols = logits.shape().back();
    const std::int64_t rows = logits.numel() / cols;
    const double value = kernels::bce_logits_mean(rows, cols, logits.data().data(), labels.data().data());
    Tensor out = Tensor::scalar(value, track(tape, logits));
    if (out.requires_grad()) {
        Tensor tz = logits, ty = labels, to = out;
        const std::int64_t n = logits.numel();
        tape->record([tz, ty, to, n]() mutable {
            const double s = to.grad()[0] / static_cast<double>(n);
            kernels::bce_logits_grad(n, tz.data().data(), ty.data().data(), s, tz.grad().data());
        });
    }
    return out;
}

}  // namespace ops

}  // namespace kge
