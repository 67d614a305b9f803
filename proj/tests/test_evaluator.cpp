#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "kge/evaluator.hpp"
#include "kge/trainer.hpp"

using namespace kge;
namespace fs = std::filesystem;

namespace {

fs::path write_graph(const char* name, const std::string& train, const std::string& valid = "",
                     const std::string& test = "") {
    const fs::path dir = fs::temp_directory_path() / "kge_eval_test" / name;
    fs::create_directories(dir);
    std::ofstream(dir / "train.txt", std::ios::binary | std::ios::trunc) << train;
    std::ofstream(dir / "valid.txt", std::ios::binary | std::ios::trunc) << valid;
    std::ofstream(dir / "test.txt", std::ios::binary | std::ios::trunc) << test;
    return dir;
}

// Independent oracle: full sort with explicit filtering and midpoint ties.
std::int64_t brute_force_rank(const std::vector<double>& scores, std::int64_t gold,
                              const std::vector<std::int64_t>& filtered) {
    std::vector<double> kept;
    for (std::size_t e = 0; e < scores.size(); ++e) {
        if (static_cast<std::int64_t>(e) == gold) continue;
        if (std::find(filtered.begin(), filtered.end(), static_cast<std::int64_t>(e)) !=
                filtered.end())
            continue;
        kept.push_back(scores[e]);
    }
    std::sort(kept.begin(), kept.end(), std::greater<>());
    const double gs = scores[static_cast<std::size_t>(gold)];
    std::int64_t greater = 0, equal = 0;
    for (const double s : kept) {
        if (s > gs) ++greater;
        else if (s == gs) ++equal;
    }
    return 1 + greater + (equal + 1) / 2;
}

}  // namespace

TEST_CASE("rank conventions: unique top, all-equal midpoint, filtering") {
    CHECK(eval::rank_of({0.9, 0.1, 0.2}, 0, {}) == 1);
    // five entities, all scores equal: expected rank 3
    CHECK(eval::rank_of({1, 1, 1, 1, 1}, 2, {}) == 3);
    // filtering removes stronger candidates
    CHECK(eval::rank_of({0.9, 0.8, 0.7}, 2, {0, 1}) == 1);
    CHECK(eval::rank_of({0.9, 0.8, 0.7}, 2, {0}) == 2);
    // the gold itself is never filtered
    CHECK(eval::rank_of({0.9, 0.8, 0.7}, 2, {0, 1, 2}) == 1);
}

TEST_CASE("filtered rank never exceeds the raw rank") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t n = 3 + static_cast<std::int64_t>(rng.uniform_int(20));
        std::vector<double> scores(static_cast<std::size_t>(n));
        for (auto& s : scores) s = rng.uniform(-1, 1);
        const auto gold = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        std::vector<std::int64_t> filtered;
        for (std::int64_t e = 0; e < n; ++e)
            if (e != gold && rng.uniform() < 0.3) filtered.push_back(e);
        CHECK(eval::rank_of(scores, gold, filtered) <= eval::rank_of(scores, gold, {}));
        CHECK(eval::rank_of(scores, gold, filtered) ==
              brute_force_rank(scores, gold, filtered));
    }
}

TEST_CASE("ranks are invariant under strictly monotone score transforms") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(12);
        for (auto& s : scores) s = rng.uniform(-2, 2);
        std::vector<double> warped(12);
        for (std::size_t i = 0; i < 12; ++i) warped[i] = 3.0 * scores[i] + 1.0;
        const auto gold = static_cast<std::int64_t>(rng.uniform_int(12));
        CHECK(eval::rank_of(scores, gold, {1, 2}) == eval::rank_of(warped, gold, {1, 2}));
    }
}

TEST_CASE("report arithmetic from known ranks") {
    // ranks {1, 2, 4} -> MRR (1 + 0.5 + 0.25)/3, Hits@1 = 1/3
    const double mrr = (1.0 + 0.5 + 0.25) / 3.0;
    CHECK(mrr == doctest::Approx(0.5833333333).epsilon(1e-9));
}

TEST_CASE("evaluate matches a brute-force reimplementation on random toy graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::int64_t ne = 4 + static_cast<std::int64_t>(rng.uniform_int(17));  // <= 20
        const std::int64_t nr = 1 + static_cast<std::int64_t>(rng.uniform_int(5));
        std::string train, valid, test;
        auto line = [&](std::int64_t h, std::int64_t r, std::int64_t t) {
            return "e" + std::to_string(h) + "\tr" + std::to_string(r) + "\te" +
                   std::to_string(t) + "\n";
        };
        // every entity/relation appears in train so vocabularies are complete
        for (std::int64_t e = 0; e < ne; ++e)
            train += line(e, rng.uniform_int(static_cast<std::uint64_t>(nr)),
                          rng.uniform_int(static_cast<std::uint64_t>(ne)));
        for (std::int64_t r = 0; r < nr; ++r)
            train += line(rng.uniform_int(static_cast<std::uint64_t>(ne)), r,
                          rng.uniform_int(static_cast<std::uint64_t>(ne)));
        for (int i = 0; i < 6; ++i) {
            const auto h = rng.uniform_int(static_cast<std::uint64_t>(ne));
            const auto r = rng.uniform_int(static_cast<std::uint64_t>(nr));
            const auto t = rng.uniform_int(static_cast<std::uint64_t>(ne));
            (i < 3 ? valid : test) += line(h, r, t);
        }
        const auto dir = write_graph(("bf" + std::to_string(trial)).c_str(), train, valid, test);
        const auto g = kg::add_reciprocals(kg::load_graph(dir.string()));

        scorers::ScorerConfig sc;
        sc.family = trial % 2 ? scorers::Family::DistMult : scorers::Family::ComplEx;
        sc.d = 8;
        Rng mrng(static_cast<std::uint64_t>(trial));
        const auto m = model::Model::make_plain(g, sc, mrng);

        const auto report = eval::evaluate(m, g, kg::Split::Test);

        // brute force: score every candidate with the scalar scorer, filter, sort
        Tensor ent = m.entity_matrix(nullptr);
        Tensor rel = m.relation_matrix(nullptr);
        const kg::PairIndex filter(g, true, true, true);
        auto vec = [&](const Tensor& mat, std::int64_t idx) {
            return std::vector<double>(mat.data().begin() + idx * sc.d,
                                       mat.data().begin() + (idx + 1) * sc.d);
        };
        double mrr_sum = 0.0;
        std::int64_t h1 = 0, h3 = 0, h10 = 0;
        for (const auto& q : g.test) {
            std::vector<double> scores(static_cast<std::size_t>(g.num_entities()));
            for (std::int64_t e = 0; e < g.num_entities(); ++e)
                scores[static_cast<std::size_t>(e)] =
                    scorers::score(sc, vec(ent, q.head), vec(rel, q.relation), vec(ent, e));
            const auto* tails = filter.tails(q.head, q.relation);
            const auto rank = brute_force_rank(scores, q.tail,
                                               tails ? *tails : std::vector<std::int64_t>{});
            mrr_sum += 1.0 / static_cast<double>(rank);
            h1 += rank <= 1;
            h3 += rank <= 3;
            h10 += rank <= 10;
        }
        const double n = static_cast<double>(g.test.size());
        CHECK(report.mrr == doctest::Approx(mrr_sum / n).epsilon(1e-12));
        CHECK(report.hits1 == doctest::Approx(h1 / n).epsilon(1e-12));
        CHECK(report.hits3 == doctest::Approx(h3 / n).epsilon(1e-12));
        CHECK(report.hits10 == doctest::Approx(h10 / n).epsilon(1e-12));
        CHECK(report.n_queries == static_cast<std::int64_t>(g.test.size()));

        // metric sanity
        CHECK(report.hits1 <= report.hits3);
        CHECK(report.hits3 <= report.hits10);
        CHECK(report.hits10 <= 1.0);
        CHECK(report.hits1 <= report.mrr);
        CHECK(report.mrr <= 1.0);
    }
}

TEST_CASE("evaluation covers both directions through reciprocals") {
    const auto dir = write_graph("recf", "a\tr\tb\nb\tr\tc\n", "a\tr\tc\n", "c\tr\ta\n");
    const auto g = kg::add_reciprocals(kg::load_graph(dir.string()));
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 4;
    Rng rng(1);
    const auto m = model::Model::make_plain(g, sc, rng);
    CHECK(eval::evaluate(m, g, kg::Split::Valid).n_queries == 2);
    CHECK(eval::evaluate(m, g, kg::Split::Test).n_queries == 2);
    const auto dir2 = write_graph("recf2", "a\tr\tb\n", "", "");
    const auto g2 = kg::add_reciprocals(kg::load_graph(dir2.string()));
    const auto m2 = model::Model::make_plain(g2, sc, rng);
    CHECK_THROWS_AS(eval::evaluate(m2, g2, kg::Split::Test), std::runtime_error);
}

TEST_CASE("perfect model yields perfect metrics") {
    const auto dir = write_graph("perfect", "a\tr\tb\n", "", "a\tr\tb\n");
    auto g = kg::add_reciprocals(kg::load_graph(dir.string()));
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 8;
    Rng rng(1);
    auto m = model::Model::make_plain(g, sc, rng);
    train::TrainConfig cfg;
    cfg.lr = 0.1;
    cfg.epochs = 120;
    cfg.batch_size = 4;
    train::fit(m, g, cfg);
    const auto report = eval::evaluate(m, g, kg::Split::Test);
    CHECK(report.mrr == 1.0);
    CHECK(report.hits1 == 1.0);
    CHECK(report.hits10 == 1.0);
}

TEST_CASE("raw-triple scoring: byte mode is total, plain mode names unknown terms") {
    const auto dir = write_graph("raw", "germany\tlocatedin\teurope\n", "",
                                 "germany\tlocatedin\teurope\n");
    const auto g = kg::add_reciprocals(kg::load_graph(dir.string()));
    scorers::ScorerConfig sc;
    sc.family = scorers::Family::DistMult;
    sc.d = 8;
    Rng rng(1);

    const auto plain = model::Model::make_plain(g, sc, rng);
    CHECK(std::isfinite(eval::score_raw_triple(plain, g, "germany", "locatedin", "europe")));
    CHECK_THROWS_WITH_AS(eval::score_raw_triple(plain, g, "germany", "located", "europe"),
                         doctest::Contains("located"), eval::UnknownTermError);

    const auto vocab = std::make_shared<bpe::BpeVocab>(
        bpe::train_vocab({"germany", "locatedin", "europe", "\t"}, 300));
    const auto tok_cfg = bpe::make_config(*vocab, 6);
    Rng rng2(1);
    const auto byte = model::Model::make_byte(g, sc, vocab, tok_cfg, false, rng2);
    CHECK(std::isfinite(eval::score_raw_triple(byte, g, "germany", "located", "europe")));
    CHECK(std::isfinite(eval::score_raw_triple(byte, g, "germany", "locatedin", "western_europ")));
}

TEST_CASE("report serialization round-trips through csv") {
    eval::RankingReport r;
    r.split = "test";
    r.mrr = 0.612;
    r.hits1 = 0.5;
    r.hits3 = 0.729;
    r.hits10 = 0.812;
    r.n_queries = 48;
    const auto csv = eval::report_csv(r);
    CHECK(csv.find("split,mrr,h1,h3,h10,n") == 0);
    const auto line = csv.substr(csv.find('\n') + 1);
    CHECK(line.substr(0, 5) == "test,");
    CHECK(std::stod(line.substr(5)) == 0.612);
    const auto json = eval::report_json(r);
    const auto pos = json.find("\"mrr\":");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(json.substr(pos + 6)) == 0.612);
}
