#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kge/kg.hpp"
#include "kge/model.hpp"
#include "kge/tensor.hpp"

namespace kge::train {

enum class Strategy { NegSample, OneVsAll, KvsAll };

Strategy strategy_from_string(const std::string& s);
const char* strategy_name(Strategy s);

struct TrainConfig {
    Strategy strategy = Strategy::KvsAll;
    std::int64_t neg_k = 1;           // NegSample only
    double lr = 0.01;
    std::int64_t epochs = 500;
    std::int64_t batch_size = 256;
    double l2 = 0.0;
    double dropout = 0.0;
    double label_smoothing = 0.0;
    std::uint64_t seed = 1;
    // <0 selects the default: 10.0 in byte mode, off in plain mode
    double grad_clip = -1.0;

    double effective_clip(model::Mode mode) const;
};

// Bias-corrected Adam over a parameter store. The token table may be
// row-restricted: when l2 == 0 rows that never receive gradient provably
// never move, so skipping them is exact, not an approximation.
class Adam {
public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    explicit Adam(model::ParameterStore& params);

    void restrict_rows(const std::string& param_name, const std::vector<std::int64_t>* rows,
                       std::int64_t row_width);

    // one update; throws (naming the parameter) on non-finite gradients
    void step(double lr, double l2);
    std::int64_t step_count() const { return step_; }

    // deterministic global gradient norm over all parameters
    double grad_norm() const;
    // scales all gradients so the global norm is at most max_norm
    void clip(double max_norm);
    void zero_grads();

private:
    struct Slot {
        std::string name;
        Tensor tensor;
        std::vector<double> m, v;
        const std::vector<std::int64_t>* active_rows = nullptr;
        std::int64_t row_width = 0;
    };
    std::vector<Slot> slots_;
    std::int64_t step_ = 0;
};

// Eq-style binary cross-entropy over logits (mean over all cells); exposed
// for the loss-oracle tests.
Tensor bce_loss(Tape* tape, const Tensor& logits, const Tensor& labels);

// One optimization epoch; returns the mean batch loss. All three require the
// graph they are given; KvsAll/1vsAll additionally require reciprocal
// augmentation.
double train_epoch_kvsall(model::Model& m, const kg::KnowledgeGraph& g,
                          const kg::PairIndex& train_index, const TrainConfig& cfg, Adam& adam,
                          Rng& rng);
double train_epoch_1vsall(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                          Adam& adam, Rng& rng);
double train_epoch_negsample(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                             Adam& adam, Rng& rng);

struct EpochStat {
    std::int64_t epoch;
    double loss;
    double seconds;
};

// Full training loop; the callback (when set) fires after every epoch.
std::vector<EpochStat> fit(model::Model& m, const kg::KnowledgeGraph& g, const TrainConfig& cfg,
                           const std::function<void(const EpochStat&)>& on_epoch = {});

struct GridCell {
    double lr;
    std::int64_t d;
    double valid_mrr;
    double final_loss;
};

struct GridResult {
    std::vector<GridCell> cells;
    std::size_t best = 0;  // ties: lower lr, then lower d
};

using ModelFactory = std::function<model::Model(std::int64_t d, Rng& rng)>;

GridResult grid_search(const kg::KnowledgeGraph& g, std::vector<double> lrs,
                       std::vector<std::int64_t> ds, const TrainConfig& base,
                       const ModelFactory& make_model);

}  // namespace kge::train
