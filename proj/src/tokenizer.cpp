#include "kge/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kge::bpe {

namespace {

// ---- unicode helpers ----

std::string cp_to_utf8(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

// Lenient UTF-8 decode of one codepoint at byte offset i; invalid bytes fall
// back to single-byte codepoints so arbitrary byte strings are accepted.
char32_t decode_cp(const std::string& s, std::size_t i, std::size_t& len) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (b0 < 0x80) {
        len = 1;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        len = 2;
        return ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        len = 3;
        return ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
               (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        len = 4;
        return ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
               ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
               (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    }
    len = 1;
    return b0;  // invalid lead byte: treat as latin-1
}

bool is_ws(char32_t c) {
    switch (c) {
        case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
        case 0x1C: case 0x1D: case 0x1E: case 0x1F:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return (c >= 0x2000 && c <= 0x200A);
    }
}

bool is_number(char32_t c) {
    if (c >= U'0' && c <= U'9') return true;
    if (c == 0xB2 || c == 0xB3 || c == 0xB9) return true;           // superscripts
    if (c >= 0xBC && c <= 0xBE) return true;                         // vulgar fractions
    if (c >= 0x660 && c <= 0x669) return true;                       // arabic-indic
    if (c >= 0x6F0 && c <= 0x6F9) return true;
    if (c >= 0x966 && c <= 0x96F) return true;                       // devanagari
    if (c >= 0xFF10 && c <= 0xFF19) return true;                     // fullwidth
    return false;
}

// Approximate \p{L}: exact for ASCII/Latin-1; codepoints above U+00FF are
// treated as letters unless they sit in well-known punctuation/symbol blocks.
// KG identifiers are overwhelmingly ASCII, so the approximation only affects
// exotic inputs, and never breaks the byte-level round trip.
bool is_letter(char32_t c) {
    if (c < 0x80)
        return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    if (c < 0x100)
        return c == 0xAA || c == 0xB5 || c == 0xBA || (c >= 0xC0 && c <= 0xD6) ||
               (c >= 0xD8 && c <= 0xF6) || c >= 0xF8;
    if (is_ws(c) || is_number(c)) return false;
    if (c >= 0x2000 && c <= 0x206F) return false;   // general punctuation
    if (c >= 0x2070 && c <= 0x2BFF) return false;   // super/subscripts..symbols/arrows
    if (c >= 0x3000 && c <= 0x303F) return false;   // cjk punctuation
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF0F) return false;
    return true;
}

enum class Cat { Letter, Number, Space, Other };

Cat category(char32_t c) {
    if (is_ws(c)) return Cat::Space;
    if (is_letter(c)) return Cat::Letter;
    if (is_number(c)) return Cat::Number;
    return Cat::Other;
}

struct Cp {
    char32_t cp;
    std::size_t byte_off;
    std::size_t byte_len;
    Cat cat;
};

std::vector<Cp> decode_all(const std::string& s) {
    std::vector<Cp> cps;
    cps.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len = 0;
        const char32_t c = decode_cp(s, i, len);
        cps.push_back({c, i, len, category(c)});
        i += len;
    }
    return cps;
}

}  // namespace

const std::array<char32_t, 256>& byte_to_char() {
    static const std::array<char32_t, 256> table = [] {
        std::array<char32_t, 256> t{};
        std::array<bool, 256> direct{};
        auto mark = [&](int lo, int hi) {
            for (int b = lo; b <= hi; ++b) direct[static_cast<std::size_t>(b)] = true;
        };
        mark('!', '~');
        mark(0xA1, 0xAC);
        mark(0xAE, 0xFF);
        char32_t next = 256;
        for (int b = 0; b < 256; ++b) {
            if (direct[static_cast<std::size_t>(b)]) t[static_cast<std::size_t>(b)] = static_cast<char32_t>(b);
            else t[static_cast<std::size_t>(b)] = next++;
        }
        return t;
    }();
    return table;
}

namespace {
const std::unordered_map<char32_t, unsigned char>& char_to_byte() {
    static const std::unordered_map<char32_t, unsigned char> rev = [] {
        std::unordered_map<char32_t, unsigned char> m;
        const auto& fwd = byte_to_char();
        for (int b = 0; b < 256; ++b) m[fwd[static_cast<std::size_t>(b)]] = static_cast<unsigned char>(b);
        return m;
    }();
    return rev;
}
}  // namespace

std::string encode_bytes_to_units(const std::string& bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    const auto& fwd = byte_to_char();
    for (char ch : bytes) out += cp_to_utf8(fwd[static_cast<unsigned char>(ch)]);
    return out;
}

std::vector<std::string> pre_split(const std::string& s) {
    std::vector<std::string> pieces;
    const std::vector<Cp> cps = decode_all(s);
    const std::size_t n = cps.size();
    std::size_t pos = 0;

    auto emit = [&](std::size_t from, std::size_t to) {
        const std::size_t b0 = cps[from].byte_off;
        const std::size_t b1 = cps[to - 1].byte_off + cps[to - 1].byte_len;
        pieces.emplace_back(s.substr(b0, b1 - b0));
    };

    auto run_of = [&](Cat cat, std::size_t from) {
        std::size_t e = from;
        while (e < n && cps[e].cat == cat) ++e;
        return e;
    };

    while (pos < n) {
        // contractions: 's 't 're 've 'm 'll 'd
        if (cps[pos].cp == U'\'' && pos + 1 < n) {
            const char32_t c1 = cps[pos + 1].cp;
            const char32_t c2 = pos + 2 < n ? cps[pos + 2].cp : 0;
            std::size_t take = 0;
            if (c1 == U's' || c1 == U't' || c1 == U'm' || c1 == U'd') take = 2;
            if ((c1 == U'r' && c2 == U'e') || (c1 == U'v' && c2 == U'e') ||
                (c1 == U'l' && c2 == U'l'))
                take = 3;
            if (take) {
                // a longer letter run after 's etc. still belongs to the
                // contraction match only when the next char is not a letter
                // continuation handled below; GPT-2's pattern takes the
                // contraction unconditionally.
                emit(pos, pos + take);
                pos += take;
                continue;
            }
        }
        const bool leading_space = cps[pos].cp == U' ';
        const std::size_t start = pos + (leading_space ? 1 : 0);
        if (start < n) {
            const Cat c = cps[start].cat;
            if (c == Cat::Letter || c == Cat::Number || c == Cat::Other) {
                const std::size_t e = run_of(c, start);
                emit(pos, e);
                pos = e;
                continue;
            }
        }
        if (cps[pos].cat == Cat::Space) {
            const std::size_t e = run_of(Cat::Space, pos);
            if (e == n) {
                emit(pos, e);          // trailing whitespace
                pos = e;
            } else if (e - pos >= 2) {
                emit(pos, e - 1);      // keep one space for the next word
                pos = e - 1;
            } else {
                emit(pos, pos + 1);    // lone non-space-prefix whitespace
                pos += 1;
            }
            continue;
        }
        // leading space not followed by anything matchable: emit it alone
        emit(pos, pos + 1);
        pos += 1;
    }
    return pieces;
}

namespace {

std::vector<std::string> units_of(const std::string& piece) {
    std::vector<std::string> units;
    units.reserve(piece.size());
    const auto& fwd = byte_to_char();
    for (char ch : piece) units.push_back(cp_to_utf8(fwd[static_cast<unsigned char>(ch)]));
    return units;
}

void apply_merges(std::vector<std::string>& units, const BpeVocab& vocab) {
    while (units.size() >= 2) {
        std::int64_t best_rank = std::numeric_limits<std::int64_t>::max();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i + 1 < units.size(); ++i) {
            const auto it = vocab.merge_rank.find(units[i] + " " + units[i + 1]);
            if (it != vocab.merge_rank.end() && it->second < best_rank) {
                best_rank = it->second;
                best_i = i;
            }
        }
        if (best_rank == std::numeric_limits<std::int64_t>::max()) break;
        const std::string left = units[best_i];
        const std::string right = units[best_i + 1];
        const std::string merged = left + right;
        std::vector<std::string> next;
        next.reserve(units.size());
        std::size_t i = 0;
        while (i < units.size()) {
            if (i + 1 < units.size() && units[i] == left && units[i + 1] == right) {
                next.push_back(merged);
                i += 2;
            } else {
                next.push_back(units[i]);
                i += 1;
            }
        }
        units = std::move(next);
    }
}

void validate_vocab(BpeVocab& vocab, const std::string& where) {
    const auto n = static_cast<std::int64_t>(vocab.token_to_id.size());
    vocab.id_to_token.assign(static_cast<std::size_t>(n), {});
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& [tok, id] : vocab.token_to_id) {
        if (id < 0 || id >= n)
            throw std::runtime_error(where + ": id " + std::to_string(id) + " for token '" + tok +
                                     "' outside dense range [0," + std::to_string(n) + ")");
        if (seen[static_cast<std::size_t>(id)])
            throw std::runtime_error(where + ": duplicate id " + std::to_string(id));
        seen[static_cast<std::size_t>(id)] = true;
        vocab.id_to_token[static_cast<std::size_t>(id)] = tok;
    }
    vocab.vocab_size = n;
    // all 256 single-byte tokens must exist or the open-vocabulary guarantee breaks
    const auto& fwd = byte_to_char();
    for (int b = 0; b < 256; ++b) {
        const std::string unit = cp_to_utf8(fwd[static_cast<std::size_t>(b)]);
        if (!vocab.token_to_id.count(unit))
            throw std::runtime_error(where + ": base byte token for byte " + std::to_string(b) +
                                     " ('" + unit + "') missing from vocabulary");
    }
}

}  // namespace

BpeVocab load_vocab(const std::string& vocab_file, const std::string& merges_file) {
    std::ifstream vf(vocab_file, std::ios::binary);
    if (!vf) throw std::runtime_error("cannot open vocab file: " + vocab_file);
    nlohmann::json j;
    try {
        vf >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed JSON in " + vocab_file + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(vocab_file + ": expected a JSON object {token: id}");

    BpeVocab vocab;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number_integer())
            throw std::runtime_error(vocab_file + ": non-integer id for key '" + it.key() + "'");
        vocab.token_to_id[it.key()] = it.value().get<std::int64_t>();
    }
    validate_vocab(vocab, vocab_file);

    std::ifstream mf(merges_file, std::ios::binary);
    if (!mf) throw std::runtime_error("cannot open merges file: " + merges_file);
    std::string line;
    std::int64_t rank = 0;
    std::int64_t lineno = 0;
    while (std::getline(mf, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line[0] == '#') continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
            line.find(' ', sp + 1) != std::string::npos)
            throw std::runtime_error(merges_file + ":" + std::to_string(lineno) +
                                     ": expected exactly two space-separated tokens");
        const std::string left = line.substr(0, sp);
        const std::string right = line.substr(sp + 1);
        if (!vocab.token_to_id.count(left + right))
            throw std::runtime_error(merges_file + ":" + std::to_string(lineno) + ": merged token '" +
                                     left + right + "' not present in vocabulary");
        vocab.merge_rank.emplace(left + " " + right, rank++);
    }
    return vocab;
}

BpeVocab train_vocab(const std::vector<std::string>& corpus, std::int64_t target_size) {
    if (corpus.empty()) throw std::runtime_error("train_vocab: empty corpus");
    if (target_size < 256)
        throw std::runtime_error("train_vocab: target_size must be at least 256, got " +
                                 std::to_string(target_size));

    BpeVocab vocab;
    const auto& fwd = byte_to_char();
    for (int b = 0; b < 256; ++b)
        vocab.token_to_id.emplace(cp_to_utf8(fwd[static_cast<std::size_t>(b)]), b);

    // word -> frequency over pre-split pieces (same split as encode)
    std::map<std::vector<std::string>, std::int64_t> words;
    for (const auto& s : corpus)
        for (const auto& piece : pre_split(s)) ++words[units_of(piece)];

    while (static_cast<std::int64_t>(vocab.token_to_id.size()) < target_size) {
        std::map<std::pair<std::string, std::string>, std::int64_t> pair_counts;
        for (const auto& [units, freq] : words)
            for (std::size_t i = 0; i + 1 < units.size(); ++i)
                pair_counts[{units[i], units[i + 1]}] += freq;

        std::pair<std::string, std::string> best;
        std::int64_t best_count = 0;
        for (const auto& [pair, count] : pair_counts) {
            // map iteration is in lexicographic pair order, so strict > keeps
            // the lexicographically smallest pair on ties
            if (count > best_count) {
                best_count = count;
                best = pair;
            }
        }
        if (best_count < 2) break;  // no pair repeats

        const std::string merged = best.first + best.second;
        vocab.merge_rank.emplace(best.first + " " + best.second,
                                 static_cast<std::int64_t>(vocab.merge_rank.size()));
        vocab.token_to_id.emplace(merged, static_cast<std::int64_t>(vocab.token_to_id.size()));

        std::map<std::vector<std::string>, std::int64_t> next_words;
        for (const auto& [units, freq] : words) {
            std::vector<std::string> merged_units;
            merged_units.reserve(units.size());
            std::size_t i = 0;
            while (i < units.size()) {
                if (i + 1 < units.size() && units[i] == best.first && units[i + 1] == best.second) {
                    merged_units.push_back(merged);
                    i += 2;
                } else {
                    merged_units.push_back(units[i]);
                    i += 1;
                }
            }
            next_words[std::move(merged_units)] += freq;
        }
        words = std::move(next_words);
    }
    validate_vocab(vocab, "train_vocab");
    return vocab;
}

std::vector<std::int64_t> encode(const std::string& s, const BpeVocab& vocab) {
    std::vector<std::int64_t> ids;
    for (const auto& piece : pre_split(s)) {
        std::vector<std::string> units = units_of(piece);
        apply_merges(units, vocab);
        for (const auto& u : units) {
            const auto it = vocab.token_to_id.find(u);
            if (it == vocab.token_to_id.end())
                throw std::runtime_error("encode: token '" + u + "' missing from vocabulary");
            ids.push_back(it->second);
        }
    }
    return ids;
}

std::string decode(const std::vector<std::int64_t>& ids, const BpeVocab& vocab) {
    std::string unit_text;
    for (const auto id : ids) {
        if (id < 0 || id >= vocab.vocab_size)
            throw std::runtime_error("decode: id " + std::to_string(id) + " out of range [0," +
                                     std::to_string(vocab.vocab_size) + ")");
        unit_text += vocab.id_to_token[static_cast<std::size_t>(id)];
    }
    std::string out;
    out.reserve(unit_text.size());
    const auto& rev = char_to_byte();
    std::size_t i = 0;
    while (i < unit_text.size()) {
        std::size_t len = 0;
        const char32_t cp = decode_cp(unit_text, i, len);
        const auto it = rev.find(cp);
        if (it == rev.end())
            throw std::runtime_error("decode: character U+" + std::to_string(cp) +
                                     " is not a byte-encoder unit");
        out += static_cast<char>(it->second);
        i += len;
    }
    return out;
}

TokenizerConfig make_config(const BpeVocab& vocab, std::int64_t max_len,
                            const std::string& pad_token) {
    if (max_len < 1) throw std::runtime_error("max_len must be >= 1, got " + std::to_string(max_len));
    TokenizerConfig cfg;
    cfg.max_len = max_len;
    cfg.pad_token = pad_token;
    const auto ids = encode(pad_token, vocab);
    if (ids.size() != 1)
        throw std::runtime_error("pad token does not map to exactly one id");
    cfg.pad_id = ids[0];
    return cfg;
}

std::vector<std::int64_t> encode_padded(const std::string& s, const TokenizerConfig& cfg,
                                        const BpeVocab& vocab) {
    std::vector<std::int64_t> ids = encode(s, vocab);
    if (static_cast<std::int64_t>(ids.size()) > cfg.max_len)
        ids.resize(static_cast<std::size_t>(cfg.max_len));
    while (static_cast<std::int64_t>(ids.size()) < cfg.max_len) ids.push_back(cfg.pad_id);
    return ids;
}

std::int64_t max_seq_len(const std::vector<std::string>& entities,
                         const std::vector<std::string>& relations, const BpeVocab& vocab) {
    std::int64_t m = 1;
    for (const auto& s : entities)
        m = std::max(m, static_cast<std::int64_t>(encode(s, vocab).size()));
    for (const auto& s : relations)
        m = std::max(m, static_cast<std::int64_t>(encode(s, vocab).size()));
    return m;
}

}  // namespace kge::bpe
