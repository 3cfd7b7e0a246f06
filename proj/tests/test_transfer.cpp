#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dqd/rng.hpp"
#include "dqd/eval.hpp"
#include "dqd/transfer.hpp"
#include "json.hpp"

using namespace dqd;

namespace {

SnnSpec small_spec(std::size_t vocab_size) {
    SnnSpec spec;
    spec.max_len = 4;
    spec.vocab_size = vocab_size;
    spec.embed_dim = 3;
    spec.encoder = EncoderKind::MeanPool;
    spec.hidden_dim = 2;
    spec.representation_dense = {3};
    spec.aggregation = Aggregation::ExpAbsDiff;
    spec.decision_dense = {2, 1};
    spec.seed = 11;
    return spec;
}

Vocab make_vocab(const std::vector<std::string>& tokens) {
    Vocab v;
    for (const auto& t : tokens) {
        v.index[t] = static_cast<std::uint32_t>(v.tokens.size() + 2);
        v.tokens.push_back(t);
    }
    return v;
}

std::vector<EncodedPair> labelled_batch(const SnnSpec& spec, std::size_t n,
                                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EncodedPair> batch;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> a, b;
        std::size_t la = 1 + rng.next_below(spec.max_len);
        std::size_t lb = 1 + rng.next_below(spec.max_len);
        for (std::size_t k = 0; k < la; ++k) {
            a.push_back(2 + static_cast<std::uint32_t>(rng.next_below(spec.vocab_size - 2)));
        }
        for (std::size_t k = 0; k < lb; ++k) {
            b.push_back(2 + static_cast<std::uint32_t>(rng.next_below(spec.vocab_size - 2)));
        }
        a.resize(spec.max_len, Vocab::kPad);
        b.resize(spec.max_len, Vocab::kPad);
        int label = a[0] == b[0] ? 1 : 0;
        batch.push_back({std::move(a), std::move(b), label});
    }
    batch[0].label = 0;
    batch[1].label = 1;
    return batch;
}

}  // namespace

TEST_CASE("config names and sweep enumeration") {
    TlConfig all3{{InitState::I3, InitState::I3, InitState::I3, InitState::I3}};
    CHECK(all3.name() == "E(I3),R(I3),A(I3),D(I3)");
    TlConfig mixed{{InitState::I1, InitState::I2, InitState::I3, InitState::I2}};
    CHECK(mixed.name() == "E(I1),R(I2),A(I3),D(I2)");

    auto curated = enumerate_configs(SweepMode::Curated);
    REQUIRE(curated.size() == 6);
    CHECK(curated.front().name() == "E(I3),R(I3),A(I3),D(I3)");  // baseline first
    std::set<std::string> names;
    for (const auto& c : curated) names.insert(c.name());
    CHECK(names.size() == 6);  // no duplicates

    auto full = enumerate_configs(SweepMode::Full);
    REQUIRE(full.size() == 81);
    names.clear();
    for (const auto& c : full) names.insert(c.name());
    CHECK(names.size() == 81);
    for (const auto& c : curated) CHECK(names.count(c.name()) == 1);
}

TEST_CASE("apply_init_config copies, freezes, or redraws per group") {
    SnnSpec spec = small_spec(10);
    ParameterStore source = init_params(spec);
    // make the source visibly different from any fresh draw
    for (auto& a : source.arrays) {
        for (auto& v : a.data) v += 10.0;
    }

    TlConfig config{{InitState::I1, InitState::I2, InitState::I3, InitState::I3}};
    ParameterStore target = apply_init_config(source, spec, config, /*seed=*/99);

    ParameterStore fresh_spec_seed = [&] {
        SnnSpec s = spec;
        s.seed = 99;
        return init_params(s);
    }();

    for (std::size_t i = 0; i < target.arrays.size(); ++i) {
        const auto& a = target.arrays[i];
        if (a.group == ParamGroup::E || a.group == ParamGroup::R) {
            CHECK(a.data == source.arrays[i].data);  // copied bitwise
        } else {
            CHECK(a.data == fresh_spec_seed.arrays[i].data);  // fresh seeded draw
        }
    }
    CHECK(target.frozen[static_cast<int>(ParamGroup::E)]);        // I1 freezes
    CHECK_FALSE(target.frozen[static_cast<int>(ParamGroup::R)]);  // I2 fine-tunes
    CHECK_FALSE(target.frozen[static_cast<int>(ParamGroup::D)]);  // I3 fine-tunes
}

TEST_CASE("embedding rows transfer by token name") {
    Vocab source_vocab = make_vocab({"alpha", "beta", "gamma"});
    Vocab target_vocab = make_vocab({"beta", "delta", "alpha"});

    SnnSpec src_spec = small_spec(2 + source_vocab.tokens.size());
    SnnSpec tgt_spec = small_spec(2 + target_vocab.tokens.size());

    ParameterStore source = init_params(src_spec, &source_vocab);
    for (auto& v : source.at("E.embedding").data) v += 10.0;

    TlConfig config{{InitState::I2, InitState::I3, InitState::I3, InitState::I3}};
    ParameterStore target = apply_init_config(source, tgt_spec, config, 5,
                                              &source_vocab, &target_vocab);

    SnnSpec fresh_spec = tgt_spec;
    fresh_spec.seed = 5;
    ParameterStore fresh = init_params(fresh_spec, &target_vocab);

    const auto& E = target.at("E.embedding");
    const auto& Es = source.at("E.embedding");
    const auto& Ef = fresh.at("E.embedding");
    std::size_t d = tgt_spec.embed_dim;
    auto row = [&](const ParamArray& a, std::size_t r) {
        return std::vector<double>(a.data.begin() + r * d, a.data.begin() + (r + 1) * d);
    };
    // shared tokens come from the source at the source's row positions
    CHECK(row(E, target_vocab.lookup("beta")) == row(Es, source_vocab.lookup("beta")));
    CHECK(row(E, target_vocab.lookup("alpha")) == row(Es, source_vocab.lookup("alpha")));
    // a token unseen by the source keeps its fresh draw
    CHECK(row(E, target_vocab.lookup("delta")) == row(Ef, target_vocab.lookup("delta")));
    // out-of-vocabulary row carries over; the padding row stays zero
    CHECK(row(E, Vocab::kOov) == row(Es, Vocab::kOov));
    CHECK(row(E, Vocab::kPad) == std::vector<double>(d, 0.0));
}

TEST_CASE("copied groups require matching shapes") {
    SnnSpec src_spec = small_spec(10);
    SnnSpec tgt_spec = small_spec(10);
    tgt_spec.representation_dense = {4};  // changes R.dense0 shape
    ParameterStore source = init_params(src_spec);
    TlConfig config{{InitState::I3, InitState::I2, InitState::I3, InitState::I3}};
    CHECK_THROWS_WITH_AS(
        (void)apply_init_config(source, tgt_spec, config, 1),
        doctest::Contains("R"), std::runtime_error);
}

TEST_CASE("all-I3 config reproduces the target-only baseline bit for bit") {
    SnnSpec spec = small_spec(10);
    auto train = labelled_batch(spec, 40, 301);
    auto val = labelled_batch(spec, 16, 302);
    auto test = labelled_batch(spec, 16, 303);

    SnnModel source{spec, init_params(spec)};
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 8;
    config.patience = 3;
    config.seed = 17;

    TlConfig all3{{InitState::I3, InitState::I3, InitState::I3, InitState::I3}};
    TransferExperiment exp = run_transfer_experiment(
        source, train, val, test, "toy", {all3}, config, spec);
    REQUIRE(exp.reports.size() == 1);
    CHECK(exp.reports[0].transferred_auc == exp.reports[0].baseline_auc);  // bitwise
    CHECK(exp.reports[0].target_dataset == "toy");
    CHECK_FALSE(exp.reports[0].history.empty());
}

TEST_CASE("best_index takes the max transferred AUC with ties by order") {
    SnnSpec spec = small_spec(10);
    auto train = labelled_batch(spec, 40, 311);
    auto val = labelled_batch(spec, 16, 312);
    auto test = labelled_batch(spec, 16, 313);

    // a source model good enough that copying it should not hurt
    TrainConfig pre;
    pre.epochs = 4;
    pre.batch_size = 8;
    pre.patience = 4;
    pre.seed = 3;
    TrainResult pretrained = train_snn(spec, labelled_batch(spec, 60, 314), val, pre);
    SnnModel source{spec, pretrained.params};

    TrainConfig config;
    config.epochs = 2;
    config.batch_size = 8;
    config.patience = 2;
    config.seed = 17;

    auto configs = enumerate_configs(SweepMode::Curated);
    TransferExperiment exp = run_transfer_experiment(
        source, train, val, test, "toy", configs, config, spec);
    REQUIRE(exp.reports.size() == configs.size());
    double best = exp.reports[exp.best_index].transferred_auc;
    for (std::size_t i = 0; i < exp.reports.size(); ++i) {
        CHECK(exp.reports[i].transferred_auc <= best);
        if (i < exp.best_index) CHECK(exp.reports[i].transferred_auc < best);
    }
    // every report shares the one baseline number
    for (const auto& r : exp.reports) CHECK(r.baseline_auc == exp.reports[0].baseline_auc);
}

TEST_CASE("epochs zero evaluates the initialization directly") {
    SnnSpec spec = small_spec(10);
    auto test = labelled_batch(spec, 20, 321);
    SnnModel source{spec, init_params(spec)};
    TrainConfig config;
    config.epochs = 0;
    config.seed = 17;

    // all-I2: the evaluated model is exactly the source
    TlConfig copy_all{{InitState::I2, InitState::I2, InitState::I2, InitState::I2}};
    TransferExperiment exp = run_transfer_experiment(
        source, labelled_batch(spec, 8, 322), {}, test, "toy", {copy_all}, config, spec);
    REQUIRE(exp.reports.size() == 1);
    CHECK(exp.reports[0].history.empty());

    std::vector<int> labels;
    for (const auto& p : test) labels.push_back(p.label);
    double direct = auc(predict_snn(source, test), labels);
    CHECK(exp.reports[0].transferred_auc == direct);
}

TEST_CASE("report file carries configs, AUCs, and a single best flag") {
    SnnSpec spec = small_spec(10);
    auto train = labelled_batch(spec, 24, 331);
    auto val = labelled_batch(spec, 12, 332);
    auto test = labelled_batch(spec, 12, 333);
    SnnModel source{spec, init_params(spec)};
    TrainConfig config;
    config.epochs = 1;
    config.seed = 17;

    auto configs = enumerate_configs(SweepMode::Curated);
    TransferExperiment exp = run_transfer_experiment(
        source, train, val, test, "toy", configs, config, spec);

    std::string path = "/tmp/dqd_test_tl.jsonl";
    save_tl_reports(path, exp);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::size_t lines = 0, best_flags = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j.at("config").get<std::string>() == configs[lines].name());
        CHECK(j.at("target_dataset").get<std::string>() == "toy");
        CHECK(j.at("transferred_auc").get<double>() ==
              exp.reports[lines].transferred_auc);
        if (j.at("best").get<bool>()) {
            ++best_flags;
            CHECK(lines == exp.best_index);
        }
        ++lines;
    }
    CHECK(lines == configs.size());
    CHECK(best_flags == 1);
    std::remove(path.c_str());
}
