#include "kge/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace kge::ckpt {

std::uint64_t hash_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::uint64_t hash_strings(const std::vector<std::string>& strings) {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& s : strings) {
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= static_cast<unsigned char>('\n');
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

void write_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (in.gcount() != 8) throw std::runtime_error("checkpoint truncated in length prefix");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_doubles_le(std::ostream& out, const std::vector<double>& xs) {
    static_assert(sizeof(double) == 8);
    // x86-64 doubles are already little-endian IEEE-754; write per element to
    // stay byte-order explicit
    for (const double x : xs) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        write_u64_le(out, bits);
    }
}

void read_doubles_le(std::istream& in, std::vector<double>& xs, const std::string& name) {
    for (auto& x : xs) {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        if (in.gcount() != 8)
            throw std::runtime_error("checkpoint truncated inside blob '" + name + "'");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        std::memcpy(&x, &bits, 8);
    }
}

}  // namespace

void save(const std::string& path, const model::Model& m, const kg::KnowledgeGraph& g,
          const Meta& meta) {
    nlohmann::json header;
    header["format_version"] = 1;
    header["family"] = scorers::family_name(m.scorer().family);
    header["d"] = m.scorer().d;
    header["p"] = m.scorer().p;
    header["q"] = m.scorer().q;
    header["normalize"] = m.scorer().normalize;
    header["byte_mode"] = m.mode() == model::Mode::Byte;
    header["seed"] = meta.seed;
    header["flatten_order"] = "token-major";
    header["reciprocal"] = g.reciprocal;
    header["entity_vocab_hash"] = hash_strings(g.entities);
    header["relation_vocab_hash"] = hash_strings(g.relations);
    if (m.mode() == model::Mode::Byte) {
        const auto& enc = m.encoder();
        header["m"] = enc.m();
        header["pad_id"] = enc.tokenizer_config().pad_id;
        header["attention"] = enc.attention_enabled();
        header["vocab_file_hash"] = hash_file(meta.vocab_file);
        header["merges_file_hash"] = hash_file(meta.merges_file);
    }
    nlohmann::json blobs = nlohmann::json::array();
    for (const auto& [name, tensor] : m.params().entries()) {
        nlohmann::json b;
        b["name"] = name;
        b["shape"] = tensor.shape();
        blobs.push_back(b);
    }
    header["blobs"] = blobs;

    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    write_u64_le(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, tensor] : m.params().entries())
        write_doubles_le(out, tensor.data());
    if (!out) throw std::runtime_error("write failed for checkpoint: " + path);
}

Loaded load(const std::string& path, const kg::KnowledgeGraph& g, const std::string& vocab_file,
            const std::string& merges_file) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    const std::uint64_t header_len = read_u64_le(in);
    std::string text(header_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_len));
    if (in.gcount() != static_cast<std::streamsize>(header_len))
        throw std::runtime_error("checkpoint truncated in header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("malformed checkpoint header: ") + e.what());
    }
    if (header.at("format_version").get<int>() != 1)
        throw std::runtime_error("unsupported checkpoint format version");

    scorers::ScorerConfig scfg;
    scfg.family = scorers::family_from_string(header.at("family").get<std::string>());
    scfg.d = header.at("d").get<std::int64_t>();
    scfg.p = header.at("p").get<std::int64_t>();
    scfg.q = header.at("q").get<std::int64_t>();
    scfg.normalize = header.at("normalize").get<bool>();

    if (header.at("reciprocal").get<bool>() != g.reciprocal)
        throw std::runtime_error("checkpoint reciprocal-augmentation flag does not match the graph");
    if (header.at("entity_vocab_hash").get<std::uint64_t>() != hash_strings(g.entities))
        throw std::runtime_error("entity vocabulary hash mismatch: wrong dataset for checkpoint");
    if (header.at("relation_vocab_hash").get<std::uint64_t>() != hash_strings(g.relations))
        throw std::runtime_error("relation vocabulary hash mismatch: wrong dataset for checkpoint");

    const bool byte_mode = header.at("byte_mode").get<bool>();
    Meta meta;
    meta.seed = header.at("seed").get<std::uint64_t>();
    Rng init_rng(0);
    model::Model m = [&] {
        if (!byte_mode) return model::Model::make_plain(g, scfg, init_rng);
        if (vocab_file.empty() || merges_file.empty())
            throw std::runtime_error("byte-mode checkpoint requires tokenizer files to load");
        if (header.at("vocab_file_hash").get<std::uint64_t>() != hash_file(vocab_file))
            throw std::runtime_error("vocab file hash mismatch: refusing to load checkpoint");
        if (header.at("merges_file_hash").get<std::uint64_t>() != hash_file(merges_file))
            throw std::runtime_error("merges file hash mismatch: refusing to load checkpoint");
        meta.vocab_file = vocab_file;
        meta.merges_file = merges_file;
        auto vocab = std::make_shared<bpe::BpeVocab>(bpe::load_vocab(vocab_file, merges_file));
        auto cfg = bpe::make_config(*vocab, header.at("m").get<std::int64_t>());
        if (cfg.pad_id != header.at("pad_id").get<std::int64_t>())
            throw std::runtime_error("pad id mismatch between checkpoint and tokenizer files");
        return model::Model::make_byte(g, scfg, std::move(vocab), cfg,
                                       header.at("attention").get<bool>(), init_rng);
    }();

    for (const auto& b : header.at("blobs")) {
        const std::string name = b.at("name").get<std::string>();
        const std::vector<std::int64_t> shape = b.at("shape").get<std::vector<std::int64_t>>();
        Tensor* t = m.params().find(name);
        if (!t) throw std::runtime_error("checkpoint blob '" + name + "' has no matching parameter");
        if (t->shape() != shape)
            throw std::runtime_error("checkpoint blob '" + name + "' shape mismatch: stored " +
                                     shape_str(shape) + ", model wants " + shape_str(t->shape()));
        read_doubles_le(in, t->data(), name);
    }
    char extra;
    if (in.read(&extra, 1), in.gcount() != 0)
        throw std::runtime_error("checkpoint has trailing bytes after declared blobs");
    return Loaded{std::move(m), std::move(meta)};
}

}  // namespace kge::ckpt
