// Command-line front end: ingest -> train -> transfer -> evaluate -> report.
// Exit codes: 0 success, 2 input/configuration error, 3 data-consistency error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dqd/errors.hpp"
#include "dqd/pipeline.hpp"
#include "dqd/transfer.hpp"

namespace fs = std::filesystem;
using namespace dqd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitData = 3;

std::string env_data_dir() {
    const char* v = std::getenv("DQD_DATA_DIR");
    return v ? v : ".";
}

struct IngestArgs {
    std::string source = "quora";
    std::string input;       // quora tsv
    std::string posts;       // stack exchange
    std::string postlinks;
    double negative_ratio = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_ingest(const IngestArgs& args) {
    auto source = source_from_name(args.source);
    if (!source) {
        std::cerr << "unknown source: " << args.source << "\n";
        return kExitInput;
    }

    std::vector<QuestionPair> raw;
    LoadTally tally;
    if (*source == Source::Quora) {
        raw = load_quora_tsv(args.input, &tally);
    } else {
        raw = load_stackexchange(args.posts, args.postlinks, args.negative_ratio,
                                 args.seed, *source, &tally);
    }
    std::cout << "loaded " << raw.size() << " pairs (rows read " << tally.rows_read
              << ", skipped: bad_label " << tally.skipped_bad_label << ", missing_text "
              << tally.skipped_missing_text << ", malformed " << tally.skipped_malformed
              << ")\n";

    std::vector<ProcessedPair> processed;
    processed.reserve(raw.size());
    for (const auto& p : raw) processed.push_back(preprocess_pair(p));

    FilterTally filter;
    auto kept = filter_pairs(processed, &filter);
    std::cout << "filtered: kept " << filter.kept << ", dropped_empty "
              << filter.dropped_empty << ", dropped_non_english "
              << filter.dropped_non_english << "\n";

    DatasetStats stats = dataset_stats(kept);
    std::cout << "stats: pairs " << stats.pair_count << ", max_wpq " << stats.max_wpq
              << ", mean_wpq " << stats.mean_wpq << "\n";

    save_corpus_cache(args.out, kept);
    std::cout << "wrote " << args.out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string cache;
    std::string model = "gbt";
    std::string dataset_id;
    std::uint64_t seed = 0;
    std::string embeddings;
    std::size_t dim = 50;
    std::string encoder = "mean";
    std::string aggregation = "expabs";
    std::size_t max_len = 30;
    int rounds = 200;
    int max_depth = 6;
    double gbt_lr = 0.1;
    int epochs = 20;
    std::size_t batch_size = 32;
    double snn_lr = 0.002;
    int patience = 5;
    bool no_graph = false;
    std::string out = "run";
};

DatasetSplit load_and_split(const std::string& cache_path, std::uint64_t seed,
                            std::string* dataset_id) {
    auto pairs = load_corpus_cache(cache_path);
    if (dataset_id && dataset_id->empty() && !pairs.empty()) {
        *dataset_id = source_name(pairs.front().source);
    }
    return split_dataset(std::move(pairs), seed);
}

int cmd_train(TrainArgs args) {
    fs::create_directories(args.out);
    DatasetSplit split = load_and_split(args.cache, args.seed, &args.dataset_id);

    EmbeddingTable table;
    table.dim = args.dim;
    if (!args.embeddings.empty()) {
        table = load_text_embeddings(args.embeddings, args.dim);
    }

    std::vector<EvalReport> reports;
    if (args.model == "gbt") {
        GbtParams params;
        params.rounds = args.rounds;
        params.max_depth = args.max_depth;
        params.learning_rate = args.gbt_lr;
        params.seed = args.seed;
        params.early_stopping_patience = args.patience;
        GbtRun run = train_eval_gbt(args.dataset_id, split, table, params, !args.no_graph);
        save_gbt(args.out + "/model.gbt", run.model);
        save_feature_catalog(args.out + "/feature_catalog.tsv");
        reports.push_back(run.report);
    } else if (args.model == "snn") {
        if (args.embeddings.empty()) {
            std::cerr << "snn training needs --embeddings\n";
            return kExitInput;
        }
        SnnSpec spec;
        spec.max_len = args.max_len;
        spec.embed_dim = args.dim;
        auto enc = encoder_from_name(args.encoder);
        auto agg = aggregation_from_name(args.aggregation);
        if (!enc || !agg) {
            std::cerr << "unknown encoder or aggregation\n";
            return kExitInput;
        }
        spec.encoder = *enc;
        spec.aggregation = *agg;
        TrainConfig config;
        config.epochs = args.epochs;
        config.batch_size = args.batch_size;
        config.learning_rate = args.snn_lr;
        config.patience = args.patience;
        config.seed = args.seed;
        SnnRun run = train_eval_snn(args.dataset_id, split, table, spec, config);
        save_snn(args.out + "/model.snn", run.model);
        save_vocab(args.out + "/vocab.tsv", run.vocab);
        save_history(args.out + "/history.jsonl", run.history);
        reports.push_back(run.report);
    } else {
        std::cerr << "unknown model kind: " << args.model << "\n";
        return kExitInput;
    }

    save_reports(args.out + "/report.jsonl", reports);
    std::cout << "test AUC " << reports.front().auc << "\n";
    std::cout << "wrote " << args.out << "/report.jsonl\n";
    return kExitOk;
}

struct TransferArgs {
    std::string source_model;
    std::string source_vocab;
    std::string target_cache;
    std::string dataset_id;
    std::string sweep = "curated";
    std::string embeddings;
    std::size_t dim = 50;
    std::uint64_t seed = 0;
    int epochs = 10;
    std::size_t batch_size = 32;
    double lr = 0.002;
    int patience = 5;
    std::string out = "transfer_run";
};

int cmd_transfer(TransferArgs args) {
    fs::create_directories(args.out);
    SnnModel source = load_snn(args.source_model);
    Vocab source_vocab = load_vocab(args.source_vocab);

    DatasetSplit split = load_and_split(args.target_cache, args.seed, &args.dataset_id);
    Vocab target_vocab = build_vocab(split.train, 1);

    EmbeddingTable table;
    table.dim = args.dim;
    if (!args.embeddings.empty()) table = load_text_embeddings(args.embeddings, args.dim);

    SnnSpec target_spec = source.spec;
    target_spec.vocab_size = target_vocab.size();

    TrainConfig config;
    config.epochs = args.epochs;
    config.batch_size = args.batch_size;
    config.learning_rate = args.lr;
    config.patience = args.patience;
    config.seed = args.seed;

    std::vector<TlConfig> configs =
        enumerate_configs(args.sweep == "full" ? SweepMode::Full : SweepMode::Curated);

    auto encode_all = [&](const std::vector<ProcessedPair>& pairs) {
        std::vector<EncodedPair> out;
        out.reserve(pairs.size());
        for (const auto& p : pairs) out.push_back(encode_pair(target_vocab, p, target_spec.max_len));
        return out;
    };

    TransferExperiment exp = run_transfer_experiment(
        source, encode_all(split.train), encode_all(split.validation),
        encode_all(split.test), args.dataset_id, configs, config, target_spec,
        &source_vocab, &target_vocab, &table);

    save_tl_reports(args.out + "/sweep.jsonl", exp);

    const TlReport& best = exp.reports[exp.best_index];
    EvalReport report;
    report.model_kind = "snn_transfer";
    report.dataset = args.dataset_id;
    report.train_size = split.train.size();
    report.validation_size = split.validation.size();
    report.test_size = split.test.size();
    report.auc = best.transferred_auc;
    report.config = {{"config", best.config.name()},
                     {"baseline_auc", std::to_string(best.baseline_auc)},
                     {"sweep", args.sweep},
                     {"seed", std::to_string(args.seed)},
                     {"split_seed", std::to_string(split.seed)}};
    save_reports(args.out + "/report.jsonl", {report});

    std::cout << "sweep of " << exp.reports.size() << " configs; best "
              << best.config.name() << " with test AUC " << best.transferred_auc
              << " (baseline " << best.baseline_auc << ")\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string model_file;
    std::string model_kind = "gbt";
    std::string vocab;
    std::string cache;
    std::string dataset_id;
    std::string embeddings;
    std::size_t dim = 50;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_evaluate(EvaluateArgs args) {
    DatasetSplit split = load_and_split(args.cache, args.seed, &args.dataset_id);
    EvalReport report;
    if (args.model_kind == "gbt") {
        EmbeddingTable table;
        table.dim = args.dim;
        if (!args.embeddings.empty()) table = load_text_embeddings(args.embeddings, args.dim);
        report = evaluate_gbt(load_gbt(args.model_file), args.dataset_id, split, table);
    } else if (args.model_kind == "snn") {
        if (args.vocab.empty()) {
            std::cerr << "snn evaluation needs --vocab\n";
            return kExitInput;
        }
        report = evaluate_snn(load_snn(args.model_file), load_vocab(args.vocab),
                              args.dataset_id, split);
    } else {
        std::cerr << "unknown model kind: " << args.model_kind << "\n";
        return kExitInput;
    }
    std::cout << "test AUC " << report.auc << "\n";
    if (!args.out.empty()) save_reports(args.out, {report});
    return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& out_tsv) {
    std::vector<EvalReport> reports;
    if (fs::exists(dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().filename() == "report.jsonl") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto part = load_reports(f.string());
            reports.insert(reports.end(), part.begin(), part.end());
        }
    }
    std::string table = results_table(reports);  // throws on duplicate cells
    std::cout << table;
    if (!out_tsv.empty()) {
        std::ofstream out(out_tsv);
        out << results_table_tsv(reports);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duplicate question pair detection toolkit"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* cmd_i = app.add_subcommand("ingest", "load a dataset and write the processed cache");
    cmd_i->add_option("--dataset", ingest.source, "quora | askubuntu | english_se");
    cmd_i->add_option("--input", ingest.input, "quora tsv path");
    cmd_i->add_option("--posts", ingest.posts, "stack exchange Posts.xml");
    cmd_i->add_option("--postlinks", ingest.postlinks, "stack exchange PostLinks.xml");
    cmd_i->add_option("--ratio", ingest.negative_ratio, "negative sampling ratio");
    cmd_i->add_option("--seed", ingest.seed);
    cmd_i->add_option("--out", ingest.out)->required();

    TrainArgs train;
    auto* cmd_t = app.add_subcommand("train", "train a model and evaluate the test split");
    cmd_t->add_option("--cache", train.cache, "processed corpus cache")->required();
    cmd_t->add_option("--dataset", train.dataset_id, "dataset id for reports");
    cmd_t->add_option("--model", train.model, "gbt | snn");
    cmd_t->add_option("--seed", train.seed);
    cmd_t->add_option("--embeddings", train.embeddings, "word vector text file");
    cmd_t->add_option("--dim", train.dim, "embedding dimensionality");
    cmd_t->add_option("--encoder", train.encoder, "mean | lstm");
    cmd_t->add_option("--aggregation", train.aggregation, "expabs | concat");
    cmd_t->add_option("--max-len", train.max_len);
    cmd_t->add_option("--rounds", train.rounds, "gbt boosting rounds");
    cmd_t->add_option("--max-depth", train.max_depth);
    cmd_t->add_option("--gbt-lr", train.gbt_lr);
    cmd_t->add_option("--epochs", train.epochs);
    cmd_t->add_option("--batch-size", train.batch_size);
    cmd_t->add_option("--snn-lr", train.snn_lr);
    cmd_t->add_option("--patience", train.patience);
    cmd_t->add_flag("--no-graph", train.no_graph, "disable the pair-graph feature block");
    cmd_t->add_option("--out", train.out, "output directory");

    TransferArgs transfer;
    auto* cmd_tr = app.add_subcommand("transfer", "run the module-wise initialization transfer sweep");
    cmd_tr->add_option("--source-model", transfer.source_model)->required();
    cmd_tr->add_option("--source-vocab", transfer.source_vocab)->required();
    cmd_tr->add_option("--target-cache", transfer.target_cache)->required();
    cmd_tr->add_option("--dataset", transfer.dataset_id);
    cmd_tr->add_option("--sweep", transfer.sweep, "curated | full");
    cmd_tr->add_option("--embeddings", transfer.embeddings);
    cmd_tr->add_option("--dim", transfer.dim);
    cmd_tr->add_option("--seed", transfer.seed);
    cmd_tr->add_option("--epochs", transfer.epochs);
    cmd_tr->add_option("--batch-size", transfer.batch_size);
    cmd_tr->add_option("--lr", transfer.lr);
    cmd_tr->add_option("--patience", transfer.patience);
    cmd_tr->add_option("--out", transfer.out);

    EvaluateArgs evaluate;
    auto* cmd_e = app.add_subcommand("evaluate", "score an existing model on a cache");
    cmd_e->add_option("--model-file", evaluate.model_file)->required();
    cmd_e->add_option("--model", evaluate.model_kind, "gbt | snn");
    cmd_e->add_option("--vocab", evaluate.vocab, "vocab file (snn)");
    cmd_e->add_option("--cache", evaluate.cache)->required();
    cmd_e->add_option("--dataset", evaluate.dataset_id);
    cmd_e->add_option("--embeddings", evaluate.embeddings);
    cmd_e->add_option("--dim", evaluate.dim);
    cmd_e->add_option("--seed", evaluate.seed);
    cmd_e->add_option("--out", evaluate.out, "report output path");

    std::string report_dir = env_data_dir();
    std::string report_tsv;
    auto* cmd_r = app.add_subcommand("report", "assemble the approach x dataset AUC grid");
    cmd_r->add_option("--dir", report_dir, "directory scanned for report.jsonl files");
    cmd_r->add_option("--out", report_tsv, "also write the grid as TSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_i->parsed()) return cmd_ingest(ingest);
        if (cmd_t->parsed()) return cmd_train(train);
        if (cmd_tr->parsed()) return cmd_transfer(transfer);
        if (cmd_e->parsed()) return cmd_evaluate(evaluate);
        if (cmd_r->parsed()) return cmd_report(report_dir, report_tsv);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
