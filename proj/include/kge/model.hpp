#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kge/byte_encoder.hpp"
#include "kge/kg.hpp"
#include "kge/scorers.hpp"
#include "kge/tensor.hpp"

namespace kge::model {

// Named trainable tensors in a fixed declaration order (the checkpoint blob
// order).
class ParameterStore {
public:
    Tensor add(const std::string& name, Tensor t);
    Tensor* find(const std::string& name);
    const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
    std::int64_t total_params() const;
    void zero_grads();

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
};

enum class Mode { Plain, Byte };

// A scoring model over a fixed graph: either per-symbol lookup tables or the
// byte-pair encoder pathway, plus a scorer configuration.
class Model {
public:
    static Model make_plain(const kg::KnowledgeGraph& g, scorers::ScorerConfig scorer, Rng& rng);
    static Model make_byte(const kg::KnowledgeGraph& g, scorers::ScorerConfig scorer,
                           std::shared_ptr<const bpe::BpeVocab> vocab,
                           const bpe::TokenizerConfig& tok_cfg, bool attention, Rng& rng);

    Mode mode() const { return mode_; }
    const scorers::ScorerConfig& scorer() const { return scorer_; }
    scorers::ScorerConfig& scorer() { return scorer_; }
    std::int64_t d() const { return scorer_.d; }
    std::int64_t num_entities() const { return num_entities_; }
    std::int64_t num_relations() const { return num_relations_; }

    ParameterStore& params() { return params_; }
    const ParameterStore& params() const { return params_; }

    byte_enc::ByteEncoder& encoder();
    const byte_enc::ByteEncoder& encoder() const;

    // All entity embeddings under current parameters: the lookup table itself
    // in plain mode, a fresh byte-encoder materialization otherwise.
    Tensor entity_matrix(Tape* tape, double dropout_rate = 0.0, Rng* dropout_rng = nullptr) const;
    Tensor relation_matrix(Tape* tape, double dropout_rate = 0.0, Rng* dropout_rng = nullptr) const;

    // byte mode only: open-vocabulary encoding of an arbitrary string -> [1,d]
    Tensor encode_string(Tape* tape, const std::string& s) const;

    // union of token-table rows reachable from the graph's token sequences
    // (byte mode); empty in plain mode
    const std::vector<std::int64_t>& used_token_rows() const { return used_token_rows_; }

    std::int64_t trainable_param_count() const { return params_.total_params(); }

private:
    Mode mode_ = Mode::Plain;
    scorers::ScorerConfig scorer_;
    std::int64_t num_entities_ = 0;
    std::int64_t num_relations_ = 0;
    ParameterStore params_;

    // plain mode
    Tensor entity_emb_;    // [E, d]
    Tensor relation_emb_;  // [R, d]

    // byte mode
    std::shared_ptr<byte_enc::ByteEncoder> encoder_;
    std::vector<std::int64_t> entity_tokens_;    // [E * m]
    std::vector<std::int64_t> relation_tokens_;  // [R * m]
    std::vector<std::int64_t> used_token_rows_;
};

}  // namespace kge::model
