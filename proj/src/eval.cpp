#include "dqd/eval.hpp"

#include "dqd/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dqd {

using nlohmann::json;

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::runtime_error("auc: scores and labels must be non-empty and parallel");
    }
    std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += y;
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::runtime_error("auc: needs at least one positive and one negative");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, ranks are 1-based.
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k]) pos_rank_sum += rank[k];
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double auc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) {
                wins += 1.0;
            } else if (scores[i] == scores[j]) {
                wins += 0.5;
            }
        }
    }
    if (pairs == 0) throw std::runtime_error("auc: needs both classes");
    return wins / static_cast<double>(pairs);
}

void save_reports(const std::string& path, const std::vector<EvalReport>& reports) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write reports: " + path);
    for (const auto& r : reports) {
        json j{{"model_kind", r.model_kind},
               {"dataset", r.dataset},
               {"train_size", r.train_size},
               {"validation_size", r.validation_size},
               {"test_size", r.test_size},
               {"auc", r.auc},
               {"config", r.config}};
        out << j.dump() << "\n";
    }
}

std::vector<EvalReport> load_reports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reports: " + path);
    std::vector<EvalReport> reports;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        EvalReport r;
        r.model_kind = j.at("model_kind").get<std::string>();
        r.dataset = j.at("dataset").get<std::string>();
        r.train_size = j.at("train_size").get<std::size_t>();
        r.validation_size = j.at("validation_size").get<std::size_t>();
        r.test_size = j.at("test_size").get<std::size_t>();
        r.auc = j.at("auc").get<double>();
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        reports.push_back(std::move(r));
    }
    return reports;
}

namespace {

// Fixed row order for the grid; datasets become columns in first-seen order.
const std::vector<std::string>& approach_order() {
    static const std::vector<std::string> order = {"gbt", "snn", "snn_transfer", "combined"};
    return order;
}

}  // namespace

std::string results_table(const std::vector<EvalReport>& reports) {
    std::vector<std::string> datasets;
    std::map<std::pair<std::string, std::string>, double> cells;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
            datasets.push_back(r.dataset);
        }
        auto key = std::make_pair(r.model_kind, r.dataset);
        if (cells.count(key)) {
            throw DataError("duplicate results cell: " + r.model_kind + " / " +
                                     r.dataset);
        }
        cells[key] = r.auc;
    }

    std::ostringstream out;
    out << std::left;
    out.width(14);
    out << "approach";
    for (const auto& d : datasets) {
        out.width(14);
        out << d;
    }
    out << "\n";
    for (const auto& approach : approach_order()) {
        bool any = false;
        for (const auto& d : datasets) any |= cells.count({approach, d}) > 0;
        if (!any) continue;
        out.width(14);
        out << approach;
        for (const auto& d : datasets) {
            char buf[16];
            auto it = cells.find({approach, d});
            if (it != cells.end()) {
                std::snprintf(buf, sizeof(buf), "%.3f", it->second);
            } else {
                std::snprintf(buf, sizeof(buf), "-");
            }
            out.width(14);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string results_table_tsv(const std::vector<EvalReport>& reports) {
    std::vector<std::string> datasets;
    std::map<std::pair<std::string, std::string>, double> cells;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
            datasets.push_back(r.dataset);
        }
        auto key = std::make_pair(r.model_kind, r.dataset);
        if (cells.count(key)) {
            throw DataError("duplicate results cell: " + r.model_kind + " / " +
                                     r.dataset);
        }
        cells[key] = r.auc;
    }
    std::ostringstream out;
    out << "approach";
    for (const auto& d : datasets) out << "\t" << d;
    out << "\n";
    for (const auto& approach : approach_order()) {
        bool any = false;
        for (const auto& d : datasets) any |= cells.count({approach, d}) > 0;
        if (!any) continue;
        out << approach;
        for (const auto& d : datasets) {
            auto it = cells.find({approach, d});
            out << "\t";
            if (it != cells.end()) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%.3f", it->second);
                out << buf;
            } else {
                out << "-";
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace dqd
