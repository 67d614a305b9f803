// Command-line front end: train / eval / score / sweep / tokenize.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kge/checkpoint.hpp"
#include "kge/evaluator.hpp"
#include "kge/kernels.hpp"
#include "kge/kg.hpp"
#include "kge/model.hpp"
#include "kge/scorers.hpp"
#include "kge/tokenizer.hpp"
#include "kge/trainer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace kge;

namespace {

struct RunConfig {
    std::string dataset;
    std::string family = "Keci";
    std::int64_t d = 32;
    std::int64_t p = 0;
    std::int64_t q = 1;
    bool normalize = false;
    std::string strategy = "kvsall";
    std::int64_t neg_k = 1;
    double lr = 0.01;
    std::int64_t epochs = 500;
    std::int64_t batch_size = 256;
    double l2 = 0.0;
    double dropout = 0.0;
    double label_smoothing = 0.0;
    std::uint64_t seed = 1;
    double grad_clip = -1.0;
    bool byte_mode = false;
    bool attention = false;
    std::string vocab_file = "data/gpt2/vocab.json";
    std::string merges_file = "data/gpt2/merges.txt";
    std::int64_t train_vocab_size = 0;  // >0 trains a vocab instead of loading one
    std::int64_t max_len = 0;           // 0 = longest sequence in the dataset
    std::string out_dir = "runs/run";
};

void set_threads(int threads) {
    if (threads <= 0) return;
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    if (threads == 1) kernels::set_parallel(false);
}

scorers::ScorerConfig scorer_config(const RunConfig& rc) {
    scorers::ScorerConfig sc;
    sc.family = scorers::family_from_string(rc.family);
    sc.d = rc.d;
    sc.p = rc.p;
    sc.q = rc.q;
    sc.normalize = rc.normalize;
    sc.validate();
    return sc;
}

train::TrainConfig train_config(const RunConfig& rc) {
    train::TrainConfig tc;
    tc.strategy = train::strategy_from_string(rc.strategy);
    tc.neg_k = rc.neg_k;
    tc.lr = rc.lr;
    tc.epochs = rc.epochs;
    tc.batch_size = rc.batch_size;
    tc.l2 = rc.l2;
    tc.dropout = rc.dropout;
    tc.label_smoothing = rc.label_smoothing;
    tc.seed = rc.seed;
    tc.grad_clip = rc.grad_clip;
    return tc;
}

nlohmann::json config_json(const RunConfig& rc) {
    nlohmann::json j;
    j["dataset"] = rc.dataset;
    j["family"] = rc.family;
    j["d"] = rc.d;
    j["p"] = rc.p;
    j["q"] = rc.q;
    j["normalize"] = rc.normalize;
    j["strategy"] = rc.strategy;
    j["neg_k"] = rc.neg_k;
    j["lr"] = rc.lr;
    j["epochs"] = rc.epochs;
    j["batch_size"] = rc.batch_size;
    j["l2"] = rc.l2;
    j["dropout"] = rc.dropout;
    j["label_smoothing"] = rc.label_smoothing;
    j["seed"] = rc.seed;
    j["grad_clip"] = rc.grad_clip;
    j["byte_pair_encoding"] = rc.byte_mode;
    j["attention"] = rc.attention;
    j["vocab_file"] = rc.vocab_file;
    j["merges_file"] = rc.merges_file;
    j["train_vocab_size"] = rc.train_vocab_size;
    j["max_len"] = rc.max_len;
    j["out_dir"] = rc.out_dir;
    return j;
}

// Builds the model; in byte mode resolves the vocabulary (loaded or trained)
// and the sequence length. Returns the tokenizer file paths actually in use.
model::Model build_model(const RunConfig& rc, const kg::KnowledgeGraph& g,
                         std::string& vocab_file, std::string& merges_file) {
    Rng rng(rc.seed);
    if (!rc.byte_mode) return model::Model::make_plain(g, scorer_config(rc), rng);

    std::shared_ptr<bpe::BpeVocab> vocab;
    if (rc.train_vocab_size > 0) {
        std::vector<std::string> corpus = g.entities;
        corpus.insert(corpus.end(), g.relations.begin(), g.relations.end());
        corpus.push_back("\t");
        vocab = std::make_shared<bpe::BpeVocab>(bpe::train_vocab(corpus, rc.train_vocab_size));
        // persist so the checkpoint can reference real files
        fs::create_directories(rc.out_dir);
        vocab_file = (fs::path(rc.out_dir) / "vocab.json").string();
        merges_file = (fs::path(rc.out_dir) / "merges.txt").string();
        nlohmann::json vj;
        for (const auto& [tok, id] : vocab->token_to_id) vj[tok] = id;
        std::ofstream vf(vocab_file, std::ios::binary | std::ios::trunc);
        vf << vj.dump();
        std::vector<std::pair<std::int64_t, std::string>> ranked;
        for (const auto& [pair, rank] : vocab->merge_rank) ranked.emplace_back(rank, pair);
        std::sort(ranked.begin(), ranked.end());
        std::ofstream mf(merges_file, std::ios::binary | std::ios::trunc);
        mf << "#version: trained\n";
        for (const auto& [rank, pair] : ranked) mf << pair << '\n';
    } else {
        vocab_file = rc.vocab_file;
        merges_file = rc.merges_file;
        vocab = std::make_shared<bpe::BpeVocab>(bpe::load_vocab(vocab_file, merges_file));
    }
    const std::int64_t m =
        rc.max_len > 0 ? rc.max_len : bpe::max_seq_len(g.entities, g.relations, *vocab);
    const auto cfg = bpe::make_config(*vocab, m);
    return model::Model::make_byte(g, scorer_config(rc), std::move(vocab), cfg, rc.attention, rng);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int cmd_train(const RunConfig& rc, int threads) {
    set_threads(threads);
    kg::KnowledgeGraph g = kg::add_reciprocals(kg::load_graph(rc.dataset));
    std::string vocab_file, merges_file;
    model::Model m = build_model(rc, g, vocab_file, merges_file);
    std::printf("# %s%s on %s: |E|=%lld |R|=%lld d=%lld params=%lld\n", rc.family.c_str(),
                rc.byte_mode ? "-BPE" : "", rc.dataset.c_str(), (long long)g.num_entities(),
                (long long)g.num_relations(), (long long)rc.d,
                (long long)m.trainable_param_count());

    fs::create_directories(rc.out_dir);
    write_file((fs::path(rc.out_dir) / "config.json").string(), config_json(rc).dump(2) + "\n");

    std::ofstream epochs_csv(fs::path(rc.out_dir) / "epochs.csv",
                             std::ios::binary | std::ios::trunc);
    epochs_csv << "epoch,loss,seconds\n";
    epochs_csv.precision(17);
    const auto t0 = std::chrono::steady_clock::now();
    train::fit(m, g, train_config(rc), [&](const train::EpochStat& s) {
        std::printf("%lld,%.6f,%.3f\n", (long long)s.epoch, s.loss, s.seconds);
        std::fflush(stdout);
        epochs_csv << s.epoch << ',' << s.loss << ',' << s.seconds << '\n';
    });
    const double train_secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();

    ckpt::Meta meta;
    meta.seed = rc.seed;
    meta.vocab_file = vocab_file;
    meta.merges_file = merges_file;
    ckpt::save((fs::path(rc.out_dir) / "checkpoint.bin").string(), m, g, meta);

    const auto train_report = eval::evaluate(m, g, kg::Split::Train);
    const auto test_report = eval::evaluate(m, g, kg::Split::Test);
    write_file((fs::path(rc.out_dir) / "report_train.csv").string(), eval::report_csv(train_report));
    write_file((fs::path(rc.out_dir) / "report_test.csv").string(), eval::report_csv(test_report));
    std::printf("# trained %.1fs | train MRR %.4f H@1 %.4f H@3 %.4f H@10 %.4f (n=%lld)\n",
                train_secs, train_report.mrr, train_report.hits1, train_report.hits3,
                train_report.hits10, (long long)train_report.n_queries);
    std::printf("# test  MRR %.4f H@1 %.4f H@3 %.4f H@10 %.4f (n=%lld)\n", test_report.mrr,
                test_report.hits1, test_report.hits3, test_report.hits10,
                (long long)test_report.n_queries);
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset, const std::string& split,
             const std::string& vocab_file, const std::string& merges_file, int threads) {
    set_threads(threads);
    kg::KnowledgeGraph g = kg::add_reciprocals(kg::load_graph(dataset));
    auto loaded = ckpt::load(checkpoint, g, vocab_file, merges_file);
    kg::Split sp = split == "train" ? kg::Split::Train
                  : split == "valid" ? kg::Split::Valid
                                     : kg::Split::Test;
    const auto report = eval::evaluate(loaded.model, g, sp);
    std::fputs(eval::report_csv(report).c_str(), stdout);
    std::puts(eval::report_json(report).c_str());
    return 0;
}

int cmd_score(const std::string& checkpoint, const std::string& dataset,
              const std::string& vocab_file, const std::string& merges_file,
              const std::string& h, const std::string& r, const std::string& t, int threads) {
    set_threads(threads);
    kg::KnowledgeGraph g = kg::add_reciprocals(kg::load_graph(dataset));
    auto loaded = ckpt::load(checkpoint, g, vocab_file, merges_file);
    const double logit = eval::score_raw_triple(loaded.model, g, h, r, t);
    std::vector<double> s(1);
    kernels::sigmoid_serial(1, &logit, s.data());
    std::printf("logit=%.6f sigmoid=%.6g\n", logit, s[0]);
    return 0;
}

int cmd_tokenize(const std::string& vocab_file, const std::string& merges_file,
                 std::int64_t max_len, const std::vector<std::string>& strings) {
    const auto vocab = bpe::load_vocab(vocab_file, merges_file);
    std::optional<bpe::TokenizerConfig> cfg;
    if (max_len > 0) cfg = bpe::make_config(vocab, max_len);
    for (const auto& s : strings) {
        const auto ids = cfg ? bpe::encode_padded(s, *cfg, vocab) : bpe::encode(s, vocab);
        for (std::size_t i = 0; i < ids.size(); ++i)
            std::printf("%s%lld", i ? " " : "", (long long)ids[i]);
        std::printf("\n");
    }
    return 0;
}

int cmd_sweep(const RunConfig& rc, const std::string& mode, std::vector<std::int64_t> dims,
              std::vector<double> lrs, std::vector<std::int64_t> grid_ds,
              const std::string& out_csv, int threads) {
    set_threads(threads);
    kg::KnowledgeGraph g = kg::add_reciprocals(kg::load_graph(rc.dataset));

    std::ostringstream csv;
    csv.precision(17);
    if (mode == "grid") {
        const auto factory = [&](std::int64_t d, Rng& rng) {
            RunConfig cell = rc;
            cell.d = d;
            if (!cell.byte_mode) return model::Model::make_plain(g, scorer_config(cell), rng);
            std::string vf, mf;
            return build_model(cell, g, vf, mf);
        };
        const auto result = train::grid_search(g, lrs, grid_ds, train_config(rc), factory);
        csv << "lr,d,valid_mrr,final_loss,best\n";
        for (std::size_t i = 0; i < result.cells.size(); ++i) {
            const auto& c = result.cells[i];
            csv << c.lr << ',' << c.d << ',' << c.valid_mrr << ',' << c.final_loss << ','
                << (i == result.best ? 1 : 0) << '\n';
        }
    } else {
        const std::string fam = rc.family;
        csv << "dim," << fam << "_train_mrr," << fam << "_test_mrr," << fam << "_bpe_train_mrr,"
            << fam << "_bpe_test_mrr\n";
        for (const auto d : dims) {
            RunConfig cell = rc;
            cell.d = d;
            double vals[4];
            for (int byte_mode = 0; byte_mode < 2; ++byte_mode) {
                cell.byte_mode = byte_mode == 1;
                Rng rng(cell.seed);
                std::string vf, mf;
                model::Model m = cell.byte_mode
                                     ? build_model(cell, g, vf, mf)
                                     : model::Model::make_plain(g, scorer_config(cell), rng);
                train::fit(m, g, train_config(cell));
                vals[byte_mode * 2 + 0] = eval::evaluate(m, g, kg::Split::Train).mrr;
                vals[byte_mode * 2 + 1] = eval::evaluate(m, g, kg::Split::Test).mrr;
                std::printf("# d=%lld %s train %.4f test %.4f\n", (long long)d,
                            cell.byte_mode ? "bpe" : "plain", vals[byte_mode * 2],
                            vals[byte_mode * 2 + 1]);
                std::fflush(stdout);
            }
            csv << d << ',' << vals[0] << ',' << vals[1] << ',' << vals[2] << ',' << vals[3]
                << '\n';
        }
    }
    write_file(out_csv, csv.str());
    std::fputs(csv.str().c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge graph embeddings over subword units"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (1 forces serial kernels)");

    RunConfig rc;
    auto add_model_opts = [&](CLI::App* cmd) {
        cmd->add_option("--dataset", rc.dataset, "directory with train/valid/test.txt")->required();
        cmd->add_option("--model", rc.family, "DistMult|ComplEx|QMult|Keci");
        cmd->add_option("--d", rc.d, "embedding dimension");
        cmd->add_option("--p", rc.p, "Keci positive-signature blocks");
        cmd->add_option("--q", rc.q, "Keci negative-signature blocks");
        cmd->add_flag("--normalize", rc.normalize, "unit-normalize h and r before scoring");
        cmd->add_option("--strategy", rc.strategy, "kvsall|1vsall|negsample");
        cmd->add_option("--neg-k", rc.neg_k, "negatives per positive (negsample)");
        cmd->add_option("--lr", rc.lr, "learning rate");
        cmd->add_option("--epochs", rc.epochs, "training epochs");
        cmd->add_option("--batch-size", rc.batch_size, "batch size");
        cmd->add_option("--l2", rc.l2, "L2 regularization coefficient");
        cmd->add_option("--dropout", rc.dropout, "dropout rate on token embeddings");
        cmd->add_option("--label-smoothing", rc.label_smoothing, "label smoothing rate");
        cmd->add_option("--seed", rc.seed, "run seed");
        cmd->add_option("--grad-clip", rc.grad_clip,
                        "gradient-norm clip; 0 disables, <0 = 10 in byte mode only");
        cmd->add_flag("--byte-pair-encoding", rc.byte_mode,
                      "encode entities/relations from subword units");
        cmd->add_flag("--attention", rc.attention, "single-head attention over subword units");
        cmd->add_option("--vocab-file", rc.vocab_file, "BPE vocab JSON");
        cmd->add_option("--merges-file", rc.merges_file, "BPE merges file");
        cmd->add_option("--train-vocab-size", rc.train_vocab_size,
                        "train a BPE vocab of this size on the dataset instead of loading one");
        cmd->add_option("--max-len", rc.max_len, "subword sequence length m (0 = dataset max)");
    };

    auto* t = app.add_subcommand("train", "train a model and write a checkpoint");
    add_model_opts(t);
    t->add_option("--out", rc.out_dir, "output directory");

    std::string checkpoint, split = "test", h_str, r_str, t_str;
    std::string eval_vocab = "data/gpt2/vocab.json", eval_merges = "data/gpt2/merges.txt";
    auto* e = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string eval_dataset;
    e->add_option("--checkpoint", checkpoint)->required();
    e->add_option("--dataset", eval_dataset)->required();
    e->add_option("--split", split, "train|valid|test");
    e->add_option("--vocab-file", eval_vocab);
    e->add_option("--merges-file", eval_merges);

    auto* s = app.add_subcommand("score", "score one (head, relation, tail) string triple");
    std::string score_dataset;
    s->add_option("--checkpoint", checkpoint)->required();
    s->add_option("--dataset", score_dataset)->required();
    s->add_option("--vocab-file", eval_vocab);
    s->add_option("--merges-file", eval_merges);
    s->add_option("head", h_str)->required();
    s->add_option("relation", r_str)->required();
    s->add_option("tail", t_str)->required();

    auto* w = app.add_subcommand("sweep", "dimension sweep or lr/d grid search");
    add_model_opts(w);
    std::string sweep_mode = "dims", sweep_out = "sweep.csv";
    std::vector<std::int64_t> dims = {2, 4, 8, 16, 32, 64, 128, 256};
    std::vector<double> lrs = {0.1, 0.01, 0.011};
    std::vector<std::int64_t> grid_ds = {32, 64};
    w->add_option("--mode", sweep_mode, "dims|grid");
    w->add_option("--dims", dims, "dimensions for --mode dims")->delimiter(',');
    w->add_option("--lrs", lrs, "learning rates for --mode grid")->delimiter(',');
    w->add_option("--grid-ds", grid_ds, "dimensions for --mode grid")->delimiter(',');
    w->add_option("--out", sweep_out, "output CSV path");

    auto* k = app.add_subcommand("tokenize", "print BPE ids for strings");
    std::string tok_vocab = "data/gpt2/vocab.json", tok_merges = "data/gpt2/merges.txt";
    std::int64_t tok_max_len = 0;
    std::vector<std::string> tok_strings;
    k->add_option("--vocab-file", tok_vocab);
    k->add_option("--merges-file", tok_merges);
    k->add_option("--max-len", tok_max_len, "pad/truncate to this length");
    k->add_option("strings", tok_strings, "strings to tokenize");

    for (auto* sub : {t, e, s, w, k}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return err.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (t->parsed()) return cmd_train(rc, threads);
        if (e->parsed()) return cmd_eval(checkpoint, eval_dataset, split, eval_vocab, eval_merges, threads);
        if (s->parsed())
            return cmd_score(checkpoint, score_dataset, eval_vocab, eval_merges, h_str, r_str,
                             t_str, threads);
        if (w->parsed()) return cmd_sweep(rc, sweep_mode, dims, lrs, grid_ds, sweep_out, threads);
        if (k->parsed()) return cmd_tokenize(tok_vocab, tok_merges, tok_max_len, tok_strings);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
