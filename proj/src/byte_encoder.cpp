#include "kge/byte_encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace kge::byte_enc {

ByteEncoder::ByteEncoder(std::shared_ptr<const bpe::BpeVocab> vocab, bpe::TokenizerConfig cfg,
                         std::int64_t d, bool attention, Rng& init_rng)
    : vocab_(std::move(vocab)), cfg_(std::move(cfg)), d_(d), attention_(attention) {
    if (d_ < 1) throw std::runtime_error("embedding dimension must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_));
    table_ = Tensor::uniform({vocab_->vocab_size, d_}, -bound, bound, init_rng, true);
    w_ = Tensor::uniform({d_, cfg_.max_len * d_}, -bound, bound, init_rng, true);
    b_ = Tensor::zeros({d_}, true);
    if (attention_) {
        wq_ = Tensor::uniform({d_, d_}, -bound, bound, init_rng, true);
        wk_ = Tensor::uniform({d_, d_}, -bound, bound, init_rng, true);
        wv_ = Tensor::uniform({d_, d_}, -bound, bound, init_rng, true);
    }
}

std::int64_t ByteEncoder::param_count() const {
    std::int64_t n = vocab_->vocab_size * d_ + d_ * (cfg_.max_len * d_) + d_;
    if (attention_) n += 3 * d_ * d_;
    return n;
}

Tensor ByteEncoder::embed_tokens(Tape* tape, const std::vector<std::int64_t>& ids) const {
    return ops::gather_rows(tape, table_, ids);
}

Tensor ByteEncoder::attend(Tape* tape, const Tensor& x) const {
    if (!attention_)
        throw std::runtime_error("attend called on an encoder without attention enabled");
    if (x.ndim() != 3 || x.dim(2) != d_)
        throw std::invalid_argument("attend expects [n, m, d], got " + shape_str(x.shape()));
    const std::int64_t n = x.dim(0), m = x.dim(1);
    Tensor flat = ops::reshape(tape, x, {n * m, d_});
    Tensor q = ops::reshape(tape, ops::matmul(tape, flat, wq_), {n, m, d_});
    Tensor k = ops::reshape(tape, ops::matmul(tape, flat, wk_), {n, m, d_});
    Tensor v = ops::reshape(tape, ops::matmul(tape, flat, wv_), {n, m, d_});
    Tensor scores = ops::mul_scalar(tape, ops::bmm_nt(tape, q, k),
                                    1.0 / std::sqrt(static_cast<double>(d_)));
    Tensor weights = ops::softmax_lastdim(tape, scores);
    return ops::bmm_nn(tape, weights, v);
}

Tensor ByteEncoder::project(Tape* tape, const Tensor& x) const {
    Tensor flat = x;
    if (x.ndim() == 3) {
        if (x.dim(1) != cfg_.max_len || x.dim(2) != d_)
            throw std::invalid_argument("project: " + shape_str(x.shape()) +
                                        " does not match configured m=" + std::to_string(cfg_.max_len) +
                                        ", d=" + std::to_string(d_));
        flat = ops::reshape(tape, x, {x.dim(0), cfg_.max_len * d_});
    } else if (x.ndim() != 2 || x.cols() != cfg_.max_len * d_) {
        throw std::invalid_argument("project: expected [n, m*d], got " + shape_str(x.shape()));
    }
    return ops::add_rowvec(tape, ops::matmul_nt(tape, flat, w_), b_);
}

Tensor ByteEncoder::encode_sequences(Tape* tape, const std::vector<std::int64_t>& flat_ids,
                                     std::int64_t n, double dropout_rate, Rng* dropout_rng) const {
    const std::int64_t m = cfg_.max_len;
    if (static_cast<std::int64_t>(flat_ids.size()) != n * m)
        throw std::invalid_argument("encode_sequences: id buffer length " +
                                    std::to_string(flat_ids.size()) + " != n*m");
    Tensor emb = embed_tokens(tape, flat_ids);  // [n*m, d]
    if (dropout_rate > 0.0) {
        if (!dropout_rng) throw std::invalid_argument("dropout requires an rng");
        emb = ops::dropout(tape, emb, dropout_rate, *dropout_rng);
    }
    if (attention_) {
        Tensor x3 = ops::reshape(tape, emb, {n, m, d_});
        Tensor attended = attend(tape, x3);
        return project(tape, ops::reshape(tape, attended, {n, m * d_}));
    }
    return project(tape, ops::reshape(tape, emb, {n, m * d_}));
}

Tensor ByteEncoder::encode_component(Tape* tape, const std::string& s, double dropout_rate,
                                     Rng* dropout_rng) const {
    return encode_sequences(tape, tokenize(s), 1, dropout_rate, dropout_rng);
}

std::vector<std::int64_t> ByteEncoder::tokenize(const std::string& s) const {
    return bpe::encode_padded(s, cfg_, *vocab_);
}

}  // namespace kge::byte_enc
