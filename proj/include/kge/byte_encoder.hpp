#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kge/tensor.hpp"
#include "kge/tokenizer.hpp"

namespace kge::byte_enc {

// Composition of token lookup, optional single-head self-attention, token-major
// flattening and a shared linear projection: one d-vector per input string.
// The token table and the projection are shared across entities, relations and
// triple components, so the trainable parameter count is bound to the
// tokenizer vocabulary, never to the graph.
class ByteEncoder {
public:
    ByteEncoder(std::shared_ptr<const bpe::BpeVocab> vocab, bpe::TokenizerConfig cfg,
                std::int64_t d, bool attention, Rng& init_rng);

    std::int64_t d() const { return d_; }
    std::int64_t m() const { return cfg_.max_len; }
    bool attention_enabled() const { return attention_; }
    const bpe::TokenizerConfig& tokenizer_config() const { return cfg_; }
    const bpe::BpeVocab& vocab() const { return *vocab_; }

    // trainable tensors, in checkpoint order
    Tensor& token_table() { return table_; }
    Tensor& linear_w() { return w_; }
    Tensor& linear_b() { return b_; }
    Tensor& attn_wq() { return wq_; }
    Tensor& attn_wk() { return wk_; }
    Tensor& attn_wv() { return wv_; }

    // vocab_size*d + d*(m*d) + d (+ 3d^2 with attention)
    std::int64_t param_count() const;

    // rows of the token table: row i of the output is table[ids[i]]
    Tensor embed_tokens(Tape* tape, const std::vector<std::int64_t>& ids) const;

    // single-head scaled dot-product self-attention over each length-m
    // sequence; x is [n, m, d]; errors when attention is disabled
    Tensor attend(Tape* tape, const Tensor& x) const;

    // flatten [n, m, d] token-major to [n, m*d] and apply W v + b
    Tensor project(Tape* tape, const Tensor& x) const;

    // full pipeline for n sequences given as a flat id buffer of length n*m;
    // dropout (when rate > 0) hits the token-embedding matrix before
    // attention/flatten
    Tensor encode_sequences(Tape* tape, const std::vector<std::int64_t>& flat_ids,
                            std::int64_t n, double dropout_rate = 0.0,
                            Rng* dropout_rng = nullptr) const;

    // tokenize + encode one string -> [1, d]
    Tensor encode_component(Tape* tape, const std::string& s, double dropout_rate = 0.0,
                            Rng* dropout_rng = nullptr) const;

    std::vector<std::int64_t> tokenize(const std::string& s) const;

private:
    std::shared_ptr<const bpe::BpeVocab> vocab_;
    bpe::TokenizerConfig cfg_;
    std::int64_t d_;
    bool attention_;
    Tensor table_;              // [vocab_size, d]
    Tensor w_;                  // [d, m*d]
    Tensor b_;                  // [d]
    Tensor wq_, wk_, wv_;       // [d, d] each, only with attention
};

}  // namespace kge::byte_enc
