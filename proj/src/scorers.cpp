#include "kge/scorers.hpp"

#include <cmath>
#include <stdexcept>

namespace kge::scorers {

Family family_from_string(const std::string& name) {
    if (name == "DistMult" || name == "distmult") return Family::DistMult;
    if (name == "ComplEx" || name == "complex") return Family::ComplEx;
    if (name == "QMult" || name == "qmult") return Family::QMult;
    if (name == "Keci" || name == "keci") return Family::Keci;
    throw std::runtime_error("unknown model family: " + name);
}

const char* family_name(Family f) {
    switch (f) {
        case Family::DistMult: return "DistMult";
        case Family::ComplEx: return "ComplEx";
        case Family::QMult: return "QMult";
        case Family::Keci: return "Keci";
    }
    return "?";
}

void ScorerConfig::validate() const {
    if (d < 1) throw std::runtime_error("embedding dimension must be positive");
    switch (family) {
        case Family::DistMult:
            break;
        case Family::ComplEx:
            if (d % 2 != 0)
                throw std::runtime_error("ComplEx requires an even dimension, got " + std::to_string(d));
            break;
        case Family::QMult:
            if (d % 4 != 0)
                throw std::runtime_error("QMult requires d divisible by 4, got " + std::to_string(d));
            break;
        case Family::Keci: {
            if (p < 0 || q < 0) throw std::runtime_error("Keci requires p, q >= 0");
            const std::int64_t k = p + q + 1;
            if (d % k != 0)
                throw std::runtime_error("Keci requires d divisible by p+q+1=" + std::to_string(k) +
                                         ", got " + std::to_string(d));
            break;
        }
    }
}

namespace {

using ops::add;
using ops::concat_cols;
using ops::mul;
using ops::slice_cols;
using ops::sub;

std::vector<Tensor> split_blocks(Tape* tape, const Tensor& x, std::int64_t nblocks) {
    const std::int64_t d = x.cols();
    const std::int64_t w = d / nblocks;
    std::vector<Tensor> blocks;
    blocks.reserve(static_cast<std::size_t>(nblocks));
    for (std::int64_t b = 0; b < nblocks; ++b)
        blocks.push_back(slice_cols(tape, x, b * w, (b + 1) * w));
    return blocks;
}

Tensor combine_distmult(Tape* tape, const Tensor& h, const Tensor& r) {
    return mul(tape, h, r);
}

Tensor combine_complex(Tape* tape, const Tensor& h, const Tensor& r) {
    const std::int64_t d2 = h.cols() / 2;
    Tensor h_re = slice_cols(tape, h, 0, d2), h_im = slice_cols(tape, h, d2, h.cols());
    Tensor r_re = slice_cols(tape, r, 0, d2), r_im = slice_cols(tape, r, d2, r.cols());
    // score = (h_re r_re - h_im r_im) . t_re + (h_re r_im + h_im r_re) . t_im
    Tensor u_re = sub(tape, mul(tape, h_re, r_re), mul(tape, h_im, r_im));
    Tensor u_im = add(tape, mul(tape, h_re, r_im), mul(tape, h_im, r_re));
    return concat_cols(tape, {u_re, u_im});
}

Tensor combine_qmult(Tape* tape, const Tensor& h, const Tensor& r) {
    auto hb = split_blocks(tape, h, 4);
    auto rb = split_blocks(tape, r, 4);
    const Tensor &a1 = hb[0], &b1 = hb[1], &c1 = hb[2], &d1 = hb[3];
    const Tensor &a2 = rb[0], &b2 = rb[1], &c2 = rb[2], &d2 = rb[3];
    // Hamilton product h (x) r, blockwise
    Tensor u_a = sub(tape, sub(tape, sub(tape, mul(tape, a1, a2), mul(tape, b1, b2)),
                               mul(tape, c1, c2)),
                     mul(tape, d1, d2));
    Tensor u_b = sub(tape, add(tape, add(tape, mul(tape, a1, b2), mul(tape, b1, a2)),
                               mul(tape, c1, d2)),
                     mul(tape, d1, c2));
    Tensor u_c = add(tape, add(tape, sub(tape, mul(tape, a1, c2), mul(tape, b1, d2)),
                               mul(tape, c1, a2)),
                     mul(tape, d1, b2));
    Tensor u_d = add(tape, sub(tape, add(tape, mul(tape, a1, d2), mul(tape, b1, c2)),
                               mul(tape, c1, b2)),
                     mul(tape, d1, a2));
    return concat_cols(tape, {u_a, u_b, u_c, u_d});
}

// Grade-<=1 part of the Clifford product in Cl_{p,q}: the scalar block picks
// up signed squares of the vector blocks, each vector block the two mixed
// terms; bivector components vanish against a grade-<=1 tail.
Tensor combine_keci(Tape* tape, const Tensor& h, const Tensor& r, std::int64_t p, std::int64_t q) {
    const std::int64_t nblocks = p + q + 1;
    auto hb = split_blocks(tape, h, nblocks);
    auto rb = split_blocks(tape, r, nblocks);
    Tensor u0 = mul(tape, hb[0], rb[0]);
    for (std::int64_t i = 1; i <= p; ++i) u0 = add(tape, u0, mul(tape, hb[i], rb[i]));
    for (std::int64_t j = p + 1; j <= p + q; ++j) u0 = sub(tape, u0, mul(tape, hb[j], rb[j]));
    std::vector<Tensor> parts;
    parts.reserve(static_cast<std::size_t>(nblocks));
    parts.push_back(u0);
    for (std::int64_t i = 1; i <= p + q; ++i)
        parts.push_back(add(tape, mul(tape, hb[0], rb[i]), mul(tape, hb[i], rb[0])));
    return concat_cols(tape, parts);
}

}  // namespace

Tensor combine(Tape* tape, const ScorerConfig& cfg, const Tensor& h, const Tensor& r) {
    cfg.validate();
    if (h.ndim() != 2 || r.ndim() != 2 || h.shape() != r.shape())
        throw std::invalid_argument("combine: expected matching [n,d] inputs, got " +
                                    shape_str(h.shape()) + " vs " + shape_str(r.shape()));
    if (h.cols() != cfg.d)
        throw std::invalid_argument("combine: embedding width " + std::to_string(h.cols()) +
                                    " does not match configured d=" + std::to_string(cfg.d));
    Tensor hh = cfg.normalize ? ops::unit_rows(tape, h) : h;
    Tensor rr = cfg.normalize ? ops::unit_rows(tape, r) : r;
    switch (cfg.family) {
        case Family::DistMult: return combine_distmult(tape, hh, rr);
        case Family::ComplEx: return combine_complex(tape, hh, rr);
        case Family::QMult: return combine_qmult(tape, hh, rr);
        case Family::Keci: return combine_keci(tape, hh, rr, cfg.p, cfg.q);
    }
    throw std::logic_error("unreachable");
}

namespace {
void check_dims(const std::vector<double>& h, const std::vector<double>& r,
                const std::vector<double>& t, std::int64_t divisor, const char* who) {
    if (h.size() != r.size() || h.size() != t.size())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch " +
                                    std::to_string(h.size()) + "/" + std::to_string(r.size()) +
                                    "/" + std::to_string(t.size()));
    if (divisor > 1 && static_cast<std::int64_t>(h.size()) % divisor != 0)
        throw std::invalid_argument(std::string(who) + ": dimension " + std::to_string(h.size()) +
                                    " not divisible by " + std::to_string(divisor));
}
}  // namespace

double score_distmult(const std::vector<double>& h, const std::vector<double>& r,
                      const std::vector<double>& t) {
    check_dims(h, r, t, 1, "score_distmult");
    double acc = 0.0;
    // associate as r*(h*t) so swapping h and t is bit-exact
    for (std::size_t i = 0; i < h.size(); ++i) acc += r[i] * (h[i] * t[i]);
    return acc;
}

double score_complex(const std::vector<double>& h, const std::vector<double>& r,
                     const std::vector<double>& t) {
    check_dims(h, r, t, 2, "score_complex");
    const std::size_t d2 = h.size() / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < d2; ++i) {
        const double hre = h[i], him = h[d2 + i];
        const double rre = r[i], rim = r[d2 + i];
        acc += (hre * rre - him * rim) * t[i] + (hre * rim + him * rre) * t[d2 + i];
    }
    return acc;
}

double score_qmult(const std::vector<double>& h, const std::vector<double>& r,
                   const std::vector<double>& t) {
    check_dims(h, r, t, 4, "score_qmult");
    const std::size_t w = h.size() / 4;
    double acc = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        const double a1 = h[i], b1 = h[w + i], c1 = h[2 * w + i], d1 = h[3 * w + i];
        const double a2 = r[i], b2 = r[w + i], c2 = r[2 * w + i], d2 = r[3 * w + i];
        const double ua = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2;
        const double ub = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2;
        const double uc = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2;
        const double ud = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2;
        acc += ua * t[i] + ub * t[w + i] + uc * t[2 * w + i] + ud * t[3 * w + i];
    }
    return acc;
}

double score_keci(const std::vector<double>& h, const std::vector<double>& r,
                  const std::vector<double>& t, std::int64_t p, std::int64_t q) {
    if (p < 0 || q < 0) throw std::invalid_argument("score_keci: p, q must be >= 0");
    const std::int64_t k = p + q + 1;
    check_dims(h, r, t, k, "score_keci");
    const std::size_t w = h.size() / static_cast<std::size_t>(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        double u0 = h[i] * r[i];
        for (std::int64_t b = 1; b <= p; ++b)
            u0 += h[static_cast<std::size_t>(b) * w + i] * r[static_cast<std::size_t>(b) * w + i];
        for (std::int64_t b = p + 1; b <= p + q; ++b)
            u0 -= h[static_cast<std::size_t>(b) * w + i] * r[static_cast<std::size_t>(b) * w + i];
        acc += u0 * t[i];
        for (std::int64_t b = 1; b <= p + q; ++b) {
            const std::size_t off = static_cast<std::size_t>(b) * w + i;
            acc += (h[i] * r[off] + h[off] * r[i]) * t[off];
        }
    }
    return acc;
}

double score(const ScorerConfig& cfg, const std::vector<double>& h,
             const std::vector<double>& r, const std::vector<double>& t) {
    cfg.validate();
    std::vector<double> hh = h, rr = r;
    if (cfg.normalize) {
        auto normalize = [](std::vector<double>& v) {
            double sq = 0.0;
            for (double x : v) sq += x * x;
            const double norm = std::sqrt(sq);
            if (norm > 0.0)
                for (double& x : v) x /= norm;
        };
        normalize(hh);
        normalize(rr);
    }
    switch (cfg.family) {
        case Family::DistMult: return score_distmult(hh, rr, t);
        case Family::ComplEx: return score_complex(hh, rr, t);
        case Family::QMult: return score_qmult(hh, rr, t);
        case Family::Keci: return score_keci(hh, rr, t, cfg.p, cfg.q);
    }
    throw std::logic_error("unreachable");
}

}  // namespace kge::scorers
