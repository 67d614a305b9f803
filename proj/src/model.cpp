#include "kge/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kge::model {

Tensor ParameterStore::add(const std::string& name, Tensor t) {
    if (find(name)) throw std::runtime_error("duplicate parameter name: " + name);
    t.set_requires_grad(true);
    entries_.emplace_back(name, t);
    return t;
}

Tensor* ParameterStore::find(const std::string& name) {
    for (auto& [n, t] : entries_)
        if (n == name) return &t;
    return nullptr;
}

std::int64_t ParameterStore::total_params() const {
    std::int64_t n = 0;
    for (const auto& [name, t] : entries_) n += t.numel();
    return n;
}

void ParameterStore::zero_grads() {
    for (auto& [name, t] : entries_) t.zero_grad();
}

Model Model::make_plain(const kg::KnowledgeGraph& g, scorers::ScorerConfig scorer, Rng& rng) {
    scorer.validate();
    Model m;
    m.mode_ = Mode::Plain;
    m.scorer_ = scorer;
    m.num_entities_ = g.num_entities();
    m.num_relations_ = g.num_relations();
    const double bound = 1.0 / std::sqrt(static_cast<double>(scorer.d));
    m.entity_emb_ = m.params_.add(
        "entity_embeddings", Tensor::uniform({g.num_entities(), scorer.d}, -bound, bound, rng));
    m.relation_emb_ = m.params_.add(
        "relation_embeddings", Tensor::uniform({g.num_relations(), scorer.d}, -bound, bound, rng));
    return m;
}

Model Model::make_byte(const kg::KnowledgeGraph& g, scorers::ScorerConfig scorer,
                       std::shared_ptr<const bpe::BpeVocab> vocab,
                       const bpe::TokenizerConfig& tok_cfg, bool attention, Rng& rng) {
    scorer.validate();
    Model m;
    m.mode_ = Mode::Byte;
    m.scorer_ = scorer;
    m.num_entities_ = g.num_entities();
    m.num_relations_ = g.num_relations();
    m.encoder_ = std::make_shared<byte_enc::ByteEncoder>(std::move(vocab), tok_cfg, scorer.d,
                                                         attention, rng);
    m.params_.add("token_embeddings", m.encoder_->token_table());
    m.params_.add("linear_w", m.encoder_->linear_w());
    m.params_.add("linear_b", m.encoder_->linear_b());
    if (attention) {
        m.params_.add("attn_wq", m.encoder_->attn_wq());
        m.params_.add("attn_wk", m.encoder_->attn_wk());
        m.params_.add("attn_wv", m.encoder_->attn_wv());
    }

    const std::int64_t mlen = m.encoder_->m();
    m.entity_tokens_.reserve(static_cast<std::size_t>(g.num_entities() * mlen));
    for (const auto& e : g.entities) {
        const auto ids = m.encoder_->tokenize(e);
        m.entity_tokens_.insert(m.entity_tokens_.end(), ids.begin(), ids.end());
    }
    m.relation_tokens_.reserve(static_cast<std::size_t>(g.num_relations() * mlen));
    for (const auto& r : g.relations) {
        const auto ids = m.encoder_->tokenize(r);
        m.relation_tokens_.insert(m.relation_tokens_.end(), ids.begin(), ids.end());
    }
    std::vector<std::int64_t> rows = m.entity_tokens_;
    rows.insert(rows.end(), m.relation_tokens_.begin(), m.relation_tokens_.end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    m.used_token_rows_ = std::move(rows);
    return m;
}

byte_enc::ByteEncoder& Model::encoder() {
    if (!encoder_) throw std::runtime_error("plain model has no byte encoder");
    return *encoder_;
}

const byte_enc::ByteEncoder& Model::encoder() const {
    if (!encoder_) throw std::runtime_error("plain model has no byte encoder");
    return *encoder_;
}

Tensor Model::entity_matrix(Tape* tape, double dropout_rate, Rng* dropout_rng) const {
    if (mode_ == Mode::Plain) return entity_emb_;
    return encoder_->encode_sequences(tape, entity_tokens_, num_entities_, dropout_rate,
                                      dropout_rng);
}

Tensor Model::relation_matrix(Tape* tape, double dropout_rate, Rng* dropout_rng) const {
    if (mode_ == Mode::Plain) return relation_emb_;
    return encoder_->encode_sequences(tape, relation_tokens_, num_relations_, dropout_rate,
                                      dropout_rng);
}

Tensor Model::encode_string(Tape* tape, const std::string& s) const {
    if (mode_ != Mode::Byte)
        throw std::runtime_error("encode_string requires byte mode");
    return encoder_->encode_component(tape, s);
}

}  // namespace kge::model
