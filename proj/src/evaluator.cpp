#include "kge/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kge/scorers.hpp"

namespace kge::eval {

std::string report_csv(const RankingReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "split,mrr,h1,h3,h10,n\n";
    os << r.split << ',' << r.mrr << ',' << r.hits1 << ',' << r.hits3 << ',' << r.hits10 << ','
       << r.n_queries << '\n';
    return os.str();
}

std::string report_json(const RankingReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"split\":\"" << r.split << "\",\"mrr\":" << r.mrr << ",\"h1\":" << r.hits1
       << ",\"h3\":" << r.hits3 << ",\"h10\":" << r.hits10 << ",\"n\":" << r.n_queries << "}";
    return os.str();
}

std::int64_t rank_of(const std::vector<double>& scores, std::int64_t gold,
                     const std::vector<std::int64_t>& filtered) {
    const double gold_score = scores[static_cast<std::size_t>(gold)];
    std::vector<bool> skip(scores.size(), false);
    for (const auto f : filtered)
        if (f != gold) skip[static_cast<std::size_t>(f)] = true;
    std::int64_t greater = 0, equal = 0;
    for (std::size_t e = 0; e < scores.size(); ++e) {
        if (static_cast<std::int64_t>(e) == gold || skip[e]) continue;
        if (scores[e] > gold_score) ++greater;
        else if (scores[e] == gold_score) ++equal;
    }
    return 1 + greater + (equal + 1) / 2;
}

namespace {

std::vector<double> embedding_row(const Tensor& matrix, std::int64_t row) {
    const std::int64_t d = matrix.cols();
    const double* p = matrix.data().data() + row * d;
    return std::vector<double>(p, p + d);
}

struct QueryScorer {
    // frozen embeddings for the whole evaluation pass
    Tensor ent;
    Tensor rel;
    const model::Model* m;

    explicit QueryScorer(const model::Model& model)
        : ent(model.entity_matrix(nullptr)), rel(model.relation_matrix(nullptr)), m(&model) {}

    // scores of (h, r, e) for all entities e, one batch of queries at a time
    Tensor batch_scores(const std::vector<std::int64_t>& hs,
                        const std::vector<std::int64_t>& rs) const {
        Tensor hmat = ops::gather_rows(nullptr, ent, hs);
        Tensor rmat = ops::gather_rows(nullptr, rel, rs);
        Tensor u = scorers::combine(nullptr, m->scorer(), hmat, rmat);
        return ops::matmul_nt(nullptr, u, ent);
    }
};

}  // namespace

std::int64_t rank_query(const model::Model& m, const kg::KnowledgeGraph& g, std::int64_t h,
                        std::int64_t r, std::int64_t gold_t,
                        const std::vector<std::int64_t>& filtered) {
    if (h < 0 || h >= g.num_entities() || gold_t < 0 || gold_t >= g.num_entities() || r < 0 ||
        r >= g.num_relations())
        throw std::invalid_argument("rank_query: index out of range");
    QueryScorer qs(m);
    Tensor row = qs.batch_scores({h}, {r});
    std::vector<double> scores(row.data().begin(), row.data().end());
    return rank_of(scores, gold_t, filtered);
}

RankingReport evaluate(const model::Model& m, const kg::KnowledgeGraph& g, kg::Split split) {
    const std::vector<kg::Triple>& queries = g.split(split);
    if (queries.empty())
        throw std::runtime_error(std::string("evaluate: empty split ") + kg::split_name(split));

    const kg::PairIndex filter(g, true, true, true);
    QueryScorer qs(m);

    const std::int64_t ne = g.num_entities();
    const std::size_t batch_size = 1024;
    double mrr_sum = 0.0;
    std::int64_t h1 = 0, h3 = 0, h10 = 0;

    for (std::size_t begin = 0; begin < queries.size(); begin += batch_size) {
        const std::size_t end = std::min(queries.size(), begin + batch_size);
        std::vector<std::int64_t> hs, rs;
        hs.reserve(end - begin);
        rs.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            hs.push_back(queries[i].head);
            rs.push_back(queries[i].relation);
        }
        Tensor block = qs.batch_scores(hs, rs);
        for (std::size_t i = begin; i < end; ++i) {
            const kg::Triple& t = queries[i];
            const double* row = block.data().data() + static_cast<std::int64_t>(i - begin) * ne;
            std::vector<double> scores(row, row + ne);
            const auto* tails = filter.tails(t.head, t.relation);
            static const std::vector<std::int64_t> kNone;
            const std::int64_t rank = rank_of(scores, t.tail, tails ? *tails : kNone);
            mrr_sum += 1.0 / static_cast<double>(rank);
            if (rank <= 1) ++h1;
            if (rank <= 3) ++h3;
            if (rank <= 10) ++h10;
        }
    }

    RankingReport report;
    report.split = kg::split_name(split);
    report.n_queries = static_cast<std::int64_t>(queries.size());
    const double n = static_cast<double>(queries.size());
    report.mrr = mrr_sum / n;
    report.hits1 = static_cast<double>(h1) / n;
    report.hits3 = static_cast<double>(h3) / n;
    report.hits10 = static_cast<double>(h10) / n;
    return report;
}

double score_raw_triple(const model::Model& m, const kg::KnowledgeGraph& g,
                        const std::string& h_str, const std::string& r_str,
                        const std::string& t_str) {
    if (m.mode() == model::Mode::Byte) {
        Tensor h = m.encode_string(nullptr, h_str);
        Tensor r = m.encode_string(nullptr, r_str);
        Tensor t = m.encode_string(nullptr, t_str);
        Tensor u = scorers::combine(nullptr, m.scorer(), h, r);
        return ops::rowwise_dot(nullptr, u, t).item();
    }
    auto lookup = [](const std::unordered_map<std::string, std::int64_t>& ids,
                     const std::string& s) {
        const auto it = ids.find(s);
        if (it == ids.end()) throw UnknownTermError(s);
        return it->second;
    };
    const std::int64_t h = lookup(g.entity_id, h_str);
    const std::int64_t r = lookup(g.relation_id, r_str);
    const std::int64_t t = lookup(g.entity_id, t_str);
    Tensor ent = m.entity_matrix(nullptr);
    Tensor rel = m.relation_matrix(nullptr);
    return scorers::score(m.scorer(), embedding_row(ent, h), embedding_row(rel, r),
                          embedding_row(ent, t));
}

}  // namespace kge::eval
