#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace kge::bpe {

// Byte-level BPE vocabulary. Tokens are stored in the printable byte-encoder
// alphabet (every raw byte maps to a distinct unicode character), so any byte
// string is encodable and decode is exact.
struct BpeVocab {
    std::unordered_map<std::string, std::int64_t> token_to_id;
    std::vector<std::string> id_to_token;
    std::unordered_map<std::string, std::int64_t> merge_rank;  // key: "left right"
    std::int64_t vocab_size = 0;
};

struct TokenizerConfig {
    std::int64_t max_len = 1;        // m
    std::string pad_token = "\t";
    std::int64_t pad_id = -1;
};

// Fixed bijection between the 256 byte values and printable characters.
const std::array<char32_t, 256>& byte_to_char();
std::string encode_bytes_to_units(const std::string& bytes);  // one utf-8 char per byte

// vocab file: JSON {token: id}; merges file: "left right" per line, optional
// leading '#' header. Errors carry file/line context.
BpeVocab load_vocab(const std::string& vocab_file, const std::string& merges_file);

// Standard BPE training over the corpus: merge the most frequent adjacent
// pair (ties broken lexicographically) until target_size is reached or no
// pair occurs twice. Base alphabet is the 256 byte tokens.
BpeVocab train_vocab(const std::vector<std::string>& corpus, std::int64_t target_size);

std::vector<std::int64_t> encode(const std::string& s, const BpeVocab& vocab);
std::string decode(const std::vector<std::int64_t>& ids, const BpeVocab& vocab);

// Resolves the pad id by encoding cfg.pad_token (must yield exactly one id).
TokenizerConfig make_config(const BpeVocab& vocab, std::int64_t max_len,
                            const std::string& pad_token = "\t");

// encode, truncate to m, right-pad with pad_id to exactly m
std::vector<std::int64_t> encode_padded(const std::string& s, const TokenizerConfig& cfg,
                                        const BpeVocab& vocab);

// longest encode() length over all strings; the default m
std::int64_t max_seq_len(const std::vector<std::string>& entities,
                         const std::vector<std::string>& relations, const BpeVocab& vocab);

// GPT-2 style pre-tokenization split; returns byte spans that partition s.
std::vector<std::string> pre_split(const std::string& s);

}  // namespace kge::bpe
