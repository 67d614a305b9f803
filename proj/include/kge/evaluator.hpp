#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge::eval {

struct RankingReport {
    std::string split;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    std::int64_t n_queries = 0;
};

std::string report_csv(const RankingReport& r);   // header + one row, RFC-4180
std::string report_json(const RankingReport& r);

// term missing from a plain model's vocabulary
struct UnknownTermError : std::runtime_error {
    explicit UnknownTermError(const std::string& term)
        : std::runtime_error("unknown term: '" + term + "'"), term(term) {}
    std::string term;
};

// Filtered expected rank of gold: 1 + |strictly greater| + ceil(|equal|/2)
// over non-gold candidates, with entities in `filtered` (gold excluded)
// removed from contention.
std::int64_t rank_of(const std::vector<double>& scores, std::int64_t gold,
                     const std::vector<std::int64_t>& filtered);

// Scores (h, r, ?) against all entities and ranks gold_t under the filter.
std::int64_t rank_query(const model::Model& m, const kg::KnowledgeGraph& g, std::int64_t h,
                        std::int64_t r, std::int64_t gold_t,
                        const std::vector<std::int64_t>& filtered);

// Filtered MRR / Hits@{1,3,10} by tail prediction over the (augmented) split;
// the filter scope is train + valid + test.
RankingReport evaluate(const model::Model& m, const kg::KnowledgeGraph& g, kg::Split split);

// Raw logit for an arbitrary string triple. Byte mode accepts any strings;
// plain mode throws UnknownTermError for out-of-vocabulary terms.
double score_raw_triple(const model::Model& m, const kg::KnowledgeGraph& g,
                        const std::string& h_str, const std::string& r_str,
                        const std::string& t_str);

}  // namespace kge::eval
