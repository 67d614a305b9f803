#include "kge/kg.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>

namespace kge::kg {

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

const std::vector<Triple>& KnowledgeGraph::split(Split s) const {
    switch (s) {
        case Split::Train: return train;
        case Split::Valid: return valid;
        case Split::Test: return test;
    }
    throw std::logic_error("unknown split");
}

namespace {

struct RawTriple {
    std::string h, r, t;
};

std::vector<RawTriple> read_split(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open triple file: " + path);
    std::vector<RawTriple> out;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos ||
            line.find('\t', t2 + 1) != std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected exactly 3 tab-separated fields");
        out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
    }
    return out;
}

std::int64_t intern(std::vector<std::string>& names,
                    std::unordered_map<std::string, std::int64_t>& ids, const std::string& s) {
    const auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<std::int64_t>(names.size());
    names.push_back(s);
    ids.emplace(s, id);
    return id;
}

}  // namespace

KnowledgeGraph load_graph(const std::string& dir) {
    KnowledgeGraph g;
    const std::array<std::pair<const char*, std::vector<Triple>*>, 3> splits = {{
        {"train.txt", &g.train},
        {"valid.txt", &g.valid},
        {"test.txt", &g.test},
    }};
    for (const auto& [file, dst] : splits) {
        for (const auto& raw : read_split(dir + "/" + file)) {
            Triple t;
            t.head = intern(g.entities, g.entity_id, raw.h);
            t.relation = intern(g.relations, g.relation_id, raw.r);
            t.tail = intern(g.entities, g.entity_id, raw.t);
            dst->push_back(t);
        }
    }
    return g;
}

KnowledgeGraph add_reciprocals(const KnowledgeGraph& g) {
    if (g.reciprocal)
        throw std::runtime_error("add_reciprocals: graph is already augmented");
    KnowledgeGraph out = g;
    out.reciprocal = true;
    const std::int64_t nr = g.num_relations();
    for (std::int64_t r = 0; r < nr; ++r) {
        const std::string inv = g.relations[static_cast<std::size_t>(r)] + "_inverse";
        if (out.relation_id.count(inv))
            throw std::runtime_error("add_reciprocals: relation name collision on '" + inv + "'");
        out.relation_id.emplace(inv, static_cast<std::int64_t>(out.relations.size()));
        out.relations.push_back(inv);
    }
    auto augment = [nr](std::vector<Triple>& split) {
        const std::size_t n = split.size();
        split.reserve(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const Triple& t = split[i];
            split.push_back({t.tail, t.relation + nr, t.head});
        }
    };
    augment(out.train);
    augment(out.valid);
    augment(out.test);
    return out;
}

PairIndex::PairIndex(const KnowledgeGraph& g, bool include_train, bool include_valid,
                     bool include_test) {
    auto take = [this](const std::vector<Triple>& split) {
        for (const Triple& t : split) index_[{t.head, t.relation}].push_back(t.tail);
    };
    if (include_train) take(g.train);
    if (include_valid) take(g.valid);
    if (include_test) take(g.test);
    for (auto& [pair, tails] : index_) {
        std::sort(tails.begin(), tails.end());
        tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
    }
}

const std::vector<std::int64_t>* PairIndex::tails(std::int64_t head, std::int64_t relation) const {
    const auto it = index_.find({head, relation});
    return it == index_.end() ? nullptr : &it->second;
}

KvsAllBatch kvsall_targets(const KnowledgeGraph& g, const PairIndex& train_index,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
    KvsAllBatch batch;
    batch.pairs = pairs;
    batch.num_entities = g.num_entities();
    batch.labels.assign(pairs.size() * static_cast<std::size_t>(batch.num_entities), 0.0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto* tails = train_index.tails(pairs[i].first, pairs[i].second);
        if (!tails) continue;
        double* row = batch.labels.data() + i * static_cast<std::size_t>(batch.num_entities);
        for (const auto t : *tails) row[t] = 1.0;
    }
    return batch;
}

KvsAllBatch onevsall_targets(const KnowledgeGraph& g, const std::vector<Triple>& triples) {
    KvsAllBatch batch;
    batch.num_entities = g.num_entities();
    batch.pairs.reserve(triples.size());
    batch.labels.assign(triples.size() * static_cast<std::size_t>(batch.num_entities), 0.0);
    for (std::size_t i = 0; i < triples.size(); ++i) {
        batch.pairs.emplace_back(triples[i].head, triples[i].relation);
        batch.labels[i * static_cast<std::size_t>(batch.num_entities) +
                     static_cast<std::size_t>(triples[i].tail)] = 1.0;
    }
    return batch;
}

std::vector<Triple> sample_negatives(const KnowledgeGraph& g, const Triple& triple,
                                     std::int64_t k, Rng& rng) {
    if (k < 1) throw std::runtime_error("sample_negatives: k must be >= 1");
    const std::int64_t ne = g.num_entities();
    if (ne < 2) throw std::runtime_error("sample_negatives: need at least 2 entities");
    std::vector<Triple> out;
    out.reserve(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) {
        Triple neg = triple;
        const bool corrupt_head = rng.coin();
        const std::int64_t original = corrupt_head ? triple.head : triple.tail;
        // uniform over the other ne-1 entities
        std::int64_t e = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(ne - 1)));
        if (e >= original) ++e;
        (corrupt_head ? neg.head : neg.tail) = e;
        out.push_back(neg);
    }
    return out;
}

}  // namespace kge::kg
