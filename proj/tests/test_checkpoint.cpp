#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "kge/checkpoint.hpp"
#include "kge/evaluator.hpp"
#include "kge/trainer.hpp"

using namespace kge;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "kge_ckpt_test";

fs::path write_graph(const char* name, const std::string& train, const std::string& valid = "",
                     const std::string& test = "") {
    const fs::path dir = kDir / name;
    fs::create_directories(dir);
    std::ofstream(dir / "train.txt", std::ios::binary | std::ios::trunc) << train;
    std::ofstream(dir / "valid.txt", std::ios::binary | std::ios::trunc) << valid;
    std::ofstream(dir / "test.txt", std::ios::binary | std::ios::trunc) << test;
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

kg::KnowledgeGraph demo_graph() {
    const auto dir = write_graph("demo", "a\tr\tb\nb\tr\tc\n", "a\tr\tc\n", "c\tr\ta\n");
    return kg::add_reciprocals(kg::load_graph(dir.string()));
}

std::pair<std::string, std::string> tiny_tokenizer_files() {
    const auto vocab = bpe::train_vocab({"alpha", "alphabet", "beta", "\t"}, 280);
    nlohmann::json vj;
    for (const auto& [tok, id] : vocab.token_to_id) vj[tok] = id;
    const auto vpath = (kDir / "tiny_vocab.json").string();
    const auto mpath = (kDir / "tiny_merges.txt").string();
    std::ofstream(vpath, std::ios::binary | std::ios::trunc) << vj.dump();
    std::ofstream mf(mpath, std::ios::binary | std::ios::trunc);
    mf << "#version: trained\n";
    std::vector<std::pair<std::int64_t, std::string>> ranked;
    for (const auto& [pair, rank] : vocab.merge_rank) ranked.emplace_back(rank, pair);
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [rank, pair] : ranked) mf << pair << '\n';
    return {vpath, mpath};
}

}  // namespace

TEST_CASE("plain checkpoint save-load-save is byte-identical") {
    fs::create_directories(kDir);
    const auto g = demo_graph();
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::ComplEx;
    sc.d = 8;
    Rng rng(9);
    auto m = model::Model::make_plain(g, sc, rng);

    ckpt::Meta meta;
    meta.seed = 9;
    const auto p1 = kDir / "plain1.bin";
    const auto p2 = kDir / "plain2.bin";
    ckpt::save(p1.string(), m, g, meta);
    auto loaded = ckpt::load(p1.string(), g);
    CHECK(loaded.meta.seed == 9);
    ckpt::save(p2.string(), loaded.model, g, meta);
    CHECK(file_bytes(p1) == file_bytes(p2));

    // every parameter reproduced bit-exactly
    for (std::size_t i = 0; i < m.params().entries().size(); ++i)
        CHECK(m.params().entries()[i].second.data() ==
              loaded.model.params().entries()[i].second.data());
}

TEST_CASE("reload reproduces evaluation metrics exactly") {
    const auto g = demo_graph();
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::Keci;
    sc.d = 8;
    Rng rng(4);
    auto m = model::Model::make_plain(g, sc, rng);
    train::TrainConfig cfg;
    cfg.epochs = 25;
    cfg.lr = 0.05;
    cfg.batch_size = 4;
    train::fit(m, g, cfg);

    const auto path = kDir / "trained.bin";
    ckpt::Meta meta;
    ckpt::save(path.string(), m, g, meta);
    const auto before = eval::evaluate(m, g, kg::Split::Test);
    auto loaded = ckpt::load(path.string(), g);
    const auto after = eval::evaluate(loaded.model, g, kg::Split::Test);
    CHECK(before.mrr == after.mrr);
    CHECK(before.hits10 == after.hits10);
}

TEST_CASE("byte checkpoint round-trips with tokenizer-file validation") {
    const auto g = demo_graph();
    const auto [vpath, mpath] = tiny_tokenizer_files();
    const auto vocab = std::make_shared<bpe::BpeVocab>(bpe::load_vocab(vpath, mpath));
    const auto tok_cfg = bpe::make_config(*vocab, 3);
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 6;
    Rng rng(2);
    auto m = model::Model::make_byte(g, sc, vocab, tok_cfg, true, rng);

    ckpt::Meta meta;
    meta.seed = 2;
    meta.vocab_file = vpath;
    meta.merges_file = mpath;
    const auto path = kDir / "byte.bin";
    ckpt::save(path.string(), m, g, meta);

    auto loaded = ckpt::load(path.string(), g, vpath, mpath);
    CHECK(loaded.model.mode() == model::Mode::Byte);
    CHECK(loaded.model.encoder().m() == 3);
    CHECK(loaded.model.encoder().attention_enabled());
    for (std::size_t i = 0; i < m.params().entries().size(); ++i)
        CHECK(m.params().entries()[i].second.data() ==
              loaded.model.params().entries()[i].second.data());

    // wrong tokenizer files are refused
    const auto other = bpe::train_vocab({"xxxx", "xxxx", "\t"}, 260);
    nlohmann::json vj;
    for (const auto& [tok, id] : other.token_to_id) vj[tok] = id;
    const auto wrong_vocab = (kDir / "wrong_vocab.json").string();
    std::ofstream(wrong_vocab, std::ios::binary | std::ios::trunc) << vj.dump();
    CHECK_THROWS_WITH_AS(ckpt::load(path.string(), g, wrong_vocab, mpath),
                         doctest::Contains("hash mismatch"), std::runtime_error);
    // byte checkpoints refuse to load without tokenizer files
    CHECK_THROWS_AS(ckpt::load(path.string(), g), std::runtime_error);
}

TEST_CASE("dataset mismatch is refused") {
    const auto g = demo_graph();
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 4;
    Rng rng(1);
    auto m = model::Model::make_plain(g, sc, rng);
    const auto path = kDir / "ds.bin";
    ckpt::save(path.string(), m, g, {});

    const auto dir2 = write_graph("other", "x\tr\ty\ny\tr\tz\n", "x\tr\tz\n", "z\tr\tx\n");
    const auto g2 = kg::add_reciprocals(kg::load_graph(dir2.string()));
    CHECK_THROWS_WITH_AS(ckpt::load(path.string(), g2), doctest::Contains("hash mismatch"),
                         std::runtime_error);
}

TEST_CASE("corrupt checkpoints are rejected") {
    const auto g = demo_graph();
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 4;
    Rng rng(1);
    auto m = model::Model::make_plain(g, sc, rng);
    const auto path = kDir / "corrupt.bin";
    ckpt::save(path.string(), m, g, {});

    // truncate inside the final blob
    auto bytes = file_bytes(path);
    std::ofstream(path, std::ios::binary | std::ios::trunc)
        << bytes.substr(0, bytes.size() - 13);
    CHECK_THROWS_WITH_AS(ckpt::load(path.string(), g), doctest::Contains("truncated"),
                         std::runtime_error);

    // trailing garbage after the declared blobs
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes << "zz";
    CHECK_THROWS_WITH_AS(ckpt::load(path.string(), g), doctest::Contains("trailing"),
                         std::runtime_error);

    CHECK_THROWS_AS(ckpt::load((kDir / "missing.bin").string(), g), std::runtime_error);
}
