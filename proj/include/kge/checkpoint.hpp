#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge::ckpt {

// FNV-1a 64-bit
std::uint64_t hash_bytes(const void* data, std::size_t n);
std::uint64_t hash_file(const std::string& path);
std::uint64_t hash_strings(const std::vector<std::string>& strings);

struct Meta {
    std::uint64_t seed = 0;
    // byte mode provenance
    std::string vocab_file, merges_file;
};

// Layout: 8-byte little-endian header length, JSON header, then the blobs in
// header-declared order as little-endian 8-byte floats. Reload is bit-exact.
void save(const std::string& path, const model::Model& m, const kg::KnowledgeGraph& g,
          const Meta& meta);

struct Loaded {
    model::Model model;
    Meta meta;
};

// Plain checkpoints validate the graph vocabularies against stored hashes;
// byte checkpoints validate the tokenizer files. Mismatch refuses the load.
Loaded load(const std::string& path, const kg::KnowledgeGraph& g,
            const std::string& vocab_file = {}, const std::string& merges_file = {});

}  // namespace kge::ckpt
