#include "kge/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kge/evaluator.hpp"
#include "kge/kernels.hpp"
#include "kge/scorers.hpp"

namespace kge::train {

Strategy strategy_from_string(const std::string& s) {
    if (s == "kvsall" || s == "KvsAll") return Strategy::KvsAll;
    if (s == "1vsall" || s == "1vsAll" || s == "onevsall") return Strategy::OneVsAll;
    if (s == "negsample" || s == "NegSample") return Strategy::NegSample;
    throw std::runtime_error("unknown training strategy: " + s);
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::NegSample: return "negsample";
        case Strategy::OneVsAll: return "1vsall";
        case Strategy::KvsAll: return "kvsall";
    }
    return "?";
}

double TrainConfig::effective_clip(model::Mode mode) const {
    if (grad_clip >= 0.0) return grad_clip;  // 0 disables explicitly
    return mode == model::Mode::Byte ? 10.0 : 0.0;
}

Adam::Adam(model::ParameterStore& params) {
    for (auto& [name, tensor] : params.entries()) {
        Slot s;
        s.name = name;
        s.tensor = tensor;
        s.m.assign(static_cast<std::size_t>(tensor.numel()), 0.0);
        s.v.assign(static_cast<std::size_t>(tensor.numel()), 0.0);
        slots_.push_back(std::move(s));
    }
}

void Adam::restrict_rows(const std::string& param_name, const std::vector<std::int64_t>* rows,
                         std::int64_t row_width) {
    for (auto& s : slots_) {
        if (s.name == param_name) {
            s.active_rows = rows;
            s.row_width = row_width;
            return;
        }
    }
    throw std::runtime_error("restrict_rows: no parameter named " + param_name);
}

namespace {
bool rows_finite(const double* g, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i)
        if (!std::isfinite(g[i])) return false;
    return true;
}
}  // namespace

void Adam::step(double lr, double l2) {
    ++step_;
    for (auto& s : slots_) {
        if (!s.tensor.has_grad()) continue;
        double* theta = s.tensor.data().data();
        const double* g = s.tensor.grad().data();
        const bool restricted = s.active_rows != nullptr && l2 == 0.0;
        if (restricted) {
            for (const auto row : *s.active_rows) {
                const std::int64_t off = row * s.row_width;
                if (!rows_finite(g + off, s.row_width))
                    throw std::runtime_error("non-finite gradient in parameter '" + s.name +
                                             "' at row " + std::to_string(row));
                kernels::adam_update_serial(s.row_width, theta + off, g + off, s.m.data() + off,
                                            s.v.data() + off, step_, lr, kBeta1, kBeta2, kEps, 0.0);
            }
        } else {
            const std::int64_t n = s.tensor.numel();
            if (!rows_finite(g, n))
                throw std::runtime_error("non-finite gradient in parameter '" + s.name + "'");
            kernels::adam_update(n, theta, g, s.m.data(), s.v.data(), step_, lr, kBeta1, kBeta2,
                                 kEps, l2);
        }
    }
}

double Adam::grad_norm() const {
    double total = 0.0;
    for (const auto& s : slots_) {
        if (!s.tensor.has_grad()) continue;
        const double* g = s.tensor.grad().data();
        if (s.active_rows != nullptr) {
            for (const auto row : *s.active_rows)
                total += kernels::sum_sq_serial(s.row_width, g + row * s.row_width);
        } else {
            total += kernels::sum_sq(s.tensor.numel(), g);
        }
    }
    return std::sqrt(total);
}

void Adam::clip(double max_norm) {
    if (max_norm <= 0.0) return;
    const double norm = grad_norm();
    if (norm <= max_norm || norm == 0.0) return;
    const double f = max_norm / norm;
    for (auto& s : slots_) {
        if (!s.tensor.has_grad()) continue;
        double* g = s.tensor.grad().data();
        if (s.active_rows != nullptr) {
            for (const auto row : *s.active_rows)
                kernels::scale_serial(s.row_width, f, g + row * s.row_width, g + row * s.row_width);
        } else {
            kernels::scale(s.tensor.numel(), f, g, g);
        }
    }
}

void Adam::zero_grads() {
    for (auto& s : slots_) {
        if (!s.tensor.has_grad()) continue;
        double* g = s.tensor.grad().data();
        if (s.active_rows != nullptr) {
            for (const auto row : *s.active_rows)
                std::fill(g + row * s.row_width, g + (row + 1) * s.row_width, 0.0);
        } else {
            s.tensor.zero_grad();
        }
    }
}

Tensor bce_loss(Tape* tape, const Tensor& logits, const Tensor& labels) {
    return ops::bce_with_logits_mean(tape, logits, labels);
}

namespace {

void smooth_labels(std::vector<double>& labels, double rate) {
    if (rate <= 0.0) return;
    for (double& y : labels) y = y * (1.0 - rate) + 0.5 * rate;
}

struct StepContext {
    model::Model& m;
    const TrainConfig& cfg;
    Adam& adam;
    Rng& rng;
    double clip;
};

// forward/backward/update for one batch given a loss builder
double run_step(StepContext& ctx, const std::function<Tensor(Tape*)>& build_loss) {
    Tape tape;
    Tensor loss = build_loss(&tape);
    const double value = loss.item();
    if (!std::isfinite(value)) throw std::runtime_error("non-finite training loss");
    tape.backward(loss);
    if (ctx.clip > 0.0) ctx.adam.clip(ctx.clip);
    ctx.adam.step(ctx.cfg.lr, ctx.cfg.l2);
    ctx.adam.zero_grads();
    return value;
}

void require_reciprocal(const kg::KnowledgeGraph& g, const char* who) {
    if (!g.reciprocal)
        throw std::runtime_error(std::string(who) + " requires reciprocal augmentation");
}

}  // namespace

double train_epoch_kvsall(model::Model& m, const kg::KnowledgeGraph& g,
                          const kg::PairIndex& train_index, const TrainConfig& cfg, Adam& adam,
                          Rng& rng) {
    require_reciprocal(g, "train_epoch_kvsall");
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    pairs.reserve(train_index.pairs().size());
    for (const auto& [pair, tails] : train_index.pairs()) pairs.push_back(pair);
    rng.shuffle(pairs);

    StepContext ctx{m, cfg, adam, rng, cfg.effective_clip(m.mode())};
    double total = 0.0;
    std::int64_t batches = 0;
    for (std::size_t begin = 0; begin < pairs.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end = std::min(pairs.size(), begin + static_cast<std::size_t>(cfg.batch_size));
        const std::vector<std::pair<std::int64_t, std::int64_t>> batch(pairs.begin() + begin,
                                                                       pairs.begin() + end);
        total += run_step(ctx, [&](Tape* tape) {
            Tensor ent = m.entity_matrix(tape, cfg.dropout, &rng);
            Tensor rel = m.relation_matrix(tape, cfg.dropout, &rng);
            std::vector<std::int64_t> hs, rs;
            hs.reserve(batch.size());
            rs.reserve(batch.size());
            for (const auto& [h, r] : batch) {
                hs.push_back(h);
                rs.push_back(r);
            }
            Tensor hmat = ops::gather_rows(tape, ent, hs);
            Tensor rmat = ops::gather_rows(tape, rel, rs);
            Tensor u = scorers::combine(tape, m.scorer(), hmat, rmat);
            Tensor logits = ops::matmul_nt(tape, u, ent);
            kg::KvsAllBatch targets = kg::kvsall_targets(g, train_index, batch);
            smooth_labels(targets.labels, cfg.label_smoothing);
            Tensor labels = Tensor::from({static_cast<std::int64_t>(batch.size()), g.num_entities()},
                                         std::move(targets.labels));
            return bce_loss(tape, logits, labels);
        });
        ++batches;
    }
    return batches ? total / static_cast<double>(batches) : 0.0;
}

double train_epoch_1vsall(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                          Adam& adam, Rng& rng) {
    require_reciprocal(g, "train_epoch_1vsall");
    std::vector<kg::Triple> triples = g.train;
    rng.shuffle(triples);

    StepContext ctx{m, cfg, adam, rng, cfg.effective_clip(m.mode())};
    double total = 0.0;
    std::int64_t batches = 0;
    for (std::size_t begin = 0; begin < triples.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end = std::min(triples.size(), begin + static_cast<std::size_t>(cfg.batch_size));
        const std::vector<kg::Triple> batch(triples.begin() + begin, triples.begin() + end);
        total += run_step(ctx, [&](Tape* tape) {
            Tensor ent = m.entity_matrix(tape, cfg.dropout, &rng);
            Tensor rel = m.relation_matrix(tape, cfg.dropout, &rng);
            std::vector<std::int64_t> hs, rs;
            hs.reserve(batch.size());
            rs.reserve(batch.size());
            for (const auto& t : batch) {
                hs.push_back(t.head);
                rs.push_back(t.relation);
            }
            Tensor hmat = ops::gather_rows(tape, ent, hs);
            Tensor rmat = ops::gather_rows(tape, rel, rs);
            Tensor u = scorers::combine(tape, m.scorer(), hmat, rmat);
            Tensor logits = ops::matmul_nt(tape, u, ent);
            kg::KvsAllBatch targets = kg::onevsall_targets(g, batch);
            smooth_labels(targets.labels, cfg.label_smoothing);
            Tensor labels = Tensor::from({static_cast<std::int64_t>(batch.size()), g.num_entities()},
                                         std::move(targets.labels));
            return bce_loss(tape, logits, labels);
        });
        ++batches;
    }
    return batches ? total / static_cast<double>(batches) : 0.0;
}

double train_epoch_negsample(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                             Adam& adam, Rng& rng) {
    if (cfg.neg_k < 1) throw std::runtime_error("negsample requires k >= 1");
    std::vector<kg::Triple> triples = g.train;
    rng.shuffle(triples);

    StepContext ctx{m, cfg, adam, rng, cfg.effective_clip(m.mode())};
    double total = 0.0;
    std::int64_t batches = 0;
    for (std::size_t begin = 0; begin < triples.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end = std::min(triples.size(), begin + static_cast<std::size_t>(cfg.batch_size));
        // positives plus k corruptions each, in one flat batch
        std::vector<kg::Triple> batch;
        std::vector<double> labels;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(triples[i]);
            labels.push_back(1.0);
            for (const auto& neg : kg::sample_negatives(g, triples[i], cfg.neg_k, rng)) {
                batch.push_back(neg);
                labels.push_back(0.0);
            }
        }
        smooth_labels(labels, cfg.label_smoothing);
        total += run_step(ctx, [&](Tape* tape) {
            Tensor ent = m.entity_matrix(tape, cfg.dropout, &rng);
            Tensor rel = m.relation_matrix(tape, cfg.dropout, &rng);
            std::vector<std::int64_t> hs, rs, ts;
            for (const auto& t : batch) {
                hs.push_back(t.head);
                rs.push_back(t.relation);
                ts.push_back(t.tail);
            }
            Tensor hmat = ops::gather_rows(tape, ent, hs);
            Tensor rmat = ops::gather_rows(tape, rel, rs);
            Tensor tmat = ops::gather_rows(tape, ent, ts);
            Tensor u = scorers::combine(tape, m.scorer(), hmat, rmat);
            Tensor scores = ops::rowwise_dot(tape, u, tmat);
            Tensor y = Tensor::from({static_cast<std::int64_t>(labels.size())},
                                    std::vector<double>(labels));
            return bce_loss(tape, scores, y);
        });
        ++batches;
    }
    return batches ? total / static_cast<double>(batches) : 0.0;
}

std::vector<EpochStat> fit(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                           const std::function<void(const EpochStat&)>& on_epoch) {
    if (cfg.lr <= 0.0) throw std::runtime_error("learning rate must be positive");
    if (cfg.epochs < 0) throw std::runtime_error("epochs must be non-negative");
    Rng rng(cfg.seed);
    Adam adam(m.params());
    if (m.mode() == model::Mode::Byte && !m.used_token_rows().empty())
        adam.restrict_rows("token_embeddings", &m.used_token_rows(), m.d());
    const kg::PairIndex train_index(g, true, false, false);

    std::vector<EpochStat> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        double loss = 0.0;
        switch (cfg.strategy) {
            case Strategy::KvsAll:
                loss = train_epoch_kvsall(m, g, train_index, cfg, adam, rng);
                break;
            case Strategy::OneVsAll:
                loss = train_epoch_1vsall(m, g, cfg, adam, rng);
                break;
            case Strategy::NegSample:
                loss = train_epoch_negsample(m, g, cfg, adam, rng);
                break;
        }
        const auto t1 = std::chrono::steady_clock::now();
        EpochStat stat{epoch, loss, std::chrono::duration<double>(t1 - t0).count()};
        history.push_back(stat);
        if (on_epoch) on_epoch(stat);
    }
    return history;
}

GridResult grid_search(const kg::KnowledgeGraph& g, std::vector<double> lrs,
                       std::vector<std::int64_t> ds, const TrainConfig& base,
                       const ModelFactory& make_model) {
    if (lrs.empty() || ds.empty()) throw std::runtime_error("grid_search: empty grid");
    if (g.valid.empty()) throw std::runtime_error("grid_search: empty validation split");
    std::sort(lrs.begin(), lrs.end());
    std::sort(ds.begin(), ds.end());

    GridResult result;
    for (const double lr : lrs) {
        for (const auto d : ds) {
            TrainConfig cfg = base;
            cfg.lr = lr;
            Rng rng(cfg.seed);
            model::Model m = make_model(d, rng);
            const auto history = fit(m, g, cfg);
            const auto report = eval::evaluate(m, g, kg::Split::Valid);
            GridCell cell{lr, d, report.mrr, history.empty() ? 0.0 : history.back().loss};
            result.cells.push_back(cell);
            // strict > keeps the first (lowest lr, then lowest d) on ties
            if (result.cells.size() == 1 ||
                cell.valid_mrr > result.cells[result.best].valid_mrr)
                result.best = result.cells.size() - 1;
        }
    }
    return result;
}

}  // namespace kge::train
