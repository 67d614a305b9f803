#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kge/rng.hpp"

namespace kge::kg {

struct Triple {
    std::int64_t head = 0;
    std::int64_t relation = 0;
    std::int64_t tail = 0;

    bool operator==(const Triple&) const = default;
    auto operator<=>(const Triple&) const = default;
};

enum class Split { Train, Valid, Test };
const char* split_name(Split s);

// Indexed triple store. Vocabularies are built over the union of all splits
// in first-appearance order (train, then valid, then test). Immutable once
// loaded/augmented.
struct KnowledgeGraph {
    std::vector<std::string> entities;
    std::vector<std::string> relations;
    std::unordered_map<std::string, std::int64_t> entity_id;
    std::unordered_map<std::string, std::int64_t> relation_id;
    std::vector<Triple> train, valid, test;
    bool reciprocal = false;

    std::int64_t num_entities() const { return static_cast<std::int64_t>(entities.size()); }
    std::int64_t num_relations() const { return static_cast<std::int64_t>(relations.size()); }
    const std::vector<Triple>& split(Split s) const;
};

// Sorted tail sets per (head, relation): the filter index for evaluation and
// the label source for KvsAll.
class PairIndex {
public:
    PairIndex() = default;
    // scope: which splits contribute (train-only for targets; all for filtering)
    PairIndex(const KnowledgeGraph& g, bool include_train, bool include_valid, bool include_test);

    const std::vector<std::int64_t>* tails(std::int64_t head, std::int64_t relation) const;
    const std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::int64_t>>& pairs() const {
        return index_;
    }

private:
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::int64_t>> index_;
};

struct KvsAllBatch {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (head, relation)
    std::vector<double> labels;  // row-major [pairs.size() x num_entities]
    std::int64_t num_entities = 0;
};

// dir must contain train.txt/valid.txt/test.txt, one "h<TAB>r<TAB>t" per line
KnowledgeGraph load_graph(const std::string& dir);

// Appends an inverse relation "<r>_inverse" per relation and an inverse
// triple per triple in every split. Calling it twice is an error.
KnowledgeGraph add_reciprocals(const KnowledgeGraph& g);

// labels[i][j] = 1 iff (pairs[i].head, pairs[i].relation, e_j) is in train
KvsAllBatch kvsall_targets(const KnowledgeGraph& g, const PairIndex& train_index,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs);

// one row per triple, single 1 at the gold tail
KvsAllBatch onevsall_targets(const KnowledgeGraph& g, const std::vector<Triple>& triples);

// k corruptions of one triple: replace head or tail (fair coin) by a uniform
// entity different from the original; collisions with true triples allowed
std::vector<Triple> sample_negatives(const KnowledgeGraph& g, const Triple& triple,
                                     std::int64_t k, Rng& rng);

}  // namespace kge::kg
