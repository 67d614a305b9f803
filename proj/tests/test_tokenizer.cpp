#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "kge/rng.hpp"
#include "kge/tokenizer.hpp"

using namespace kge;
namespace fs = std::filesystem;

namespace {

const std::string kVocabFile = std::string(KGE_SOURCE_DIR) + "/data/gpt2/vocab.json";
const std::string kMergesFile = std::string(KGE_SOURCE_DIR) + "/data/gpt2/merges.txt";

const bpe::BpeVocab& gpt2() {
    static const bpe::BpeVocab v = bpe::load_vocab(kVocabFile, kMergesFile);
    return v;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "kge_tok_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_temp(const char* name, const std::string& content) {
    const fs::path p = temp_dir() / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    return p.string();
}

}  // namespace

TEST_CASE("byte encoder is a bijection over all 256 byte values") {
    const auto& fwd = bpe::byte_to_char();
    std::set<char32_t> seen(fwd.begin(), fwd.end());
    CHECK(seen.size() == 256);
    std::string all_bytes;
    for (int b = 0; b < 256; ++b) all_bytes += static_cast<char>(b);
    const std::string units = bpe::encode_bytes_to_units(all_bytes);
    CHECK(units.size() > 256);  // some bytes map to multi-byte utf-8 chars
}

TEST_CASE("pretrained vocabulary loads with the published shape") {
    const auto& v = gpt2();
    CHECK(v.vocab_size == 50257);
    CHECK(v.merge_rank.size() == 50000);
}

TEST_CASE("published token ids for the running example") {
    const auto& v = gpt2();
    CHECK(bpe::encode("Obama", v) == std::vector<std::int64_t>{15948});
    CHECK(bpe::encode("bornIn", v) == std::vector<std::int64_t>{6286, 818});
    CHECK(bpe::encode("NewYork", v) == std::vector<std::int64_t>{3791, 49278});
    CHECK(bpe::encode("", v).empty());
}

TEST_CASE("pad token resolves to id 197 and padding/truncation work") {
    const auto& v = gpt2();
    const auto cfg = bpe::make_config(v, 2);
    CHECK(cfg.pad_id == 197);
    CHECK(bpe::encode_padded("Obama", cfg, v) == std::vector<std::int64_t>{15948, 197});
    CHECK(bpe::encode_padded("NewYork", cfg, v) == std::vector<std::int64_t>{3791, 49278});

    const auto long_ids = bpe::encode("bornInTheUnitedStatesOfAmerica", v);
    REQUIRE(long_ids.size() > 2);
    const auto truncated = bpe::encode_padded("bornInTheUnitedStatesOfAmerica", cfg, v);
    CHECK(truncated == std::vector<std::int64_t>(long_ids.begin(), long_ids.begin() + 2));

    // every output has exactly length m
    for (const char* s : {"", "a", "Obama", "bornInTheUnitedStatesOfAmerica"})
        CHECK(bpe::encode_padded(s, cfg, v).size() == 2);
}

TEST_CASE("decode inverts encode on random byte strings") {
    const auto& v = gpt2();
    CHECK(bpe::decode({15948}, v) == "Obama");
    CHECK(bpe::decode({}, v).empty());

    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        std::string s;
        const int len = static_cast<int>(rng.uniform_int(24));
        for (int i = 0; i < len; ++i) {
            // mix printable ascii, whitespace and raw high bytes
            const auto pick = rng.uniform_int(10);
            if (pick < 6) s += static_cast<char>(32 + rng.uniform_int(95));
            else if (pick < 8) s += static_cast<char>(rng.uniform_int(33));
            else s += static_cast<char>(128 + rng.uniform_int(128));
        }
        CHECK(bpe::decode(bpe::encode(s, v), v) == s);
    }
}

TEST_CASE("encode is deterministic and ids stay in range") {
    const auto& v = gpt2();
    const std::string s = "western_europe locatedin europe";
    const auto a = bpe::encode(s, v);
    const auto b = bpe::encode(s, v);
    CHECK(a == b);
    for (const auto id : a) {
        CHECK(id >= 0);
        CHECK(id < v.vocab_size);
    }
}

TEST_CASE("decode rejects out-of-range ids") {
    const auto& v = gpt2();
    CHECK_THROWS_AS(bpe::decode({v.vocab_size}, v), std::runtime_error);
    CHECK_THROWS_AS(bpe::decode({-1}, v), std::runtime_error);
}

TEST_CASE("vocabulary training follows pair frequencies") {
    const auto v = bpe::train_vocab({"aaab", "aaab"}, 258);
    // most frequent adjacent pair is (a,a)
    REQUIRE(v.merge_rank.count("a a"));
    CHECK(v.merge_rank.at("a a") == 0);
    CHECK(v.vocab_size == 258);

    const auto identity = bpe::train_vocab({"abc"}, 256);
    CHECK(identity.vocab_size == 256);
    CHECK(identity.merge_rank.empty());

    // merges exhaust early when no pair repeats: vocab stays at the base
    const auto early = bpe::train_vocab({"z"}, 400);
    CHECK(early.vocab_size == 256);

    CHECK_THROWS_AS(bpe::train_vocab({}, 300), std::runtime_error);
}

TEST_CASE("trained vocabulary round-trips and padding works") {
    const auto v = bpe::train_vocab({"western_europe", "eastern_europe", "europe", "\t"}, 300);
    for (const char* s : {"western_europe", "europe", "western_asia", "never seen before"})
        CHECK(bpe::decode(bpe::encode(s, v), v) == s);
    const auto cfg = bpe::make_config(v, 4);
    CHECK(bpe::encode_padded("europe", cfg, v).size() == 4);
}

namespace {
std::string base_vocab_json() {
    std::string json = "{";
    const auto& fwd = bpe::byte_to_char();
    for (int b = 0; b < 256; ++b) {
        const char32_t cp = fwd[static_cast<std::size_t>(b)];
        std::string unit;
        if (cp < 0x80) {
            if (cp == '"' || cp == '\\') unit += '\\';
            unit += static_cast<char>(cp);
        } else {
            unit += static_cast<char>(0xC0 | (cp >> 6));
            unit += static_cast<char>(0x80 | (cp & 0x3F));
        }
        json += "\"" + unit + "\":" + std::to_string(b) + ",";
    }
    json.back() = '}';
    return json;
}
}  // namespace

TEST_CASE("loader errors carry file and token context") {
    CHECK_THROWS_AS(bpe::load_vocab("/nonexistent/vocab.json", kMergesFile), std::runtime_error);
    const auto bad_json = write_temp("bad.json", "{not json");
    CHECK_THROWS_WITH_AS(bpe::load_vocab(bad_json, kMergesFile),
                         doctest::Contains("malformed JSON"), std::runtime_error);

    // a merge whose concatenation is missing from the vocabulary
    const auto vocab_path = write_temp("v2.json", base_vocab_json());
    const auto merges_path = write_temp("m2.txt", "#version\nQ Z\n");
    CHECK_THROWS_WITH_AS(bpe::load_vocab(vocab_path, merges_path),
                         doctest::Contains("not present in vocabulary"), std::runtime_error);

    // header line is skipped, valid merges accepted
    const auto v = bpe::load_vocab(vocab_path, write_temp("m3.txt", "#version\n"));
    CHECK(v.vocab_size == 256);
    CHECK(v.merge_rank.empty());
}

TEST_CASE("max sequence length over a tiny graph") {
    const auto v = bpe::train_vocab({"ab"}, 256);
    CHECK(bpe::max_seq_len({"ab"}, {}, v) == 2);
    CHECK(bpe::max_seq_len({"a"}, {"abcd"}, v) == 4);
}

TEST_CASE("whitespace and contraction pre-splitting matches the reference scheme") {
    const auto& v = gpt2();
    // trailing spaces fold into one whitespace token; inner runs keep one
    // space attached to the following word
    CHECK(bpe::decode(bpe::encode("don't stop", v), v) == "don't stop");
    CHECK(bpe::decode(bpe::encode("  leading and   inner  ", v), v) == "  leading and   inner  ");
    CHECK(bpe::decode(bpe::encode("tab\tand\nnewline", v), v) == "tab\tand\nnewline");
}
