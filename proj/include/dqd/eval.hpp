#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dqd {

// ROC AUC as the Mann-Whitney rank statistic with average ranks on ties.
// Throws if the labels are single-class.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// O(n^2) pair-counting oracle (ties half-credited); test reference.
double auc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalReport {
    std::string model_kind;  // gbt | snn | snn_transfer | combined
    std::string dataset;
    std::size_t train_size = 0;
    std::size_t validation_size = 0;
    std::size_t test_size = 0;
    double auc = 0.0;
    std::map<std::string, std::string> config;  // hyperparameters, seeds, versions
};

void save_reports(const std::string& path, const std::vector<EvalReport>& reports);
std::vector<EvalReport> load_reports(const std::string& path);

// Approach x dataset AUC grid, cells to 3 decimals. Throws on a duplicate
// (model_kind, dataset) cell.
std::string results_table(const std::vector<EvalReport>& reports);
std::string results_table_tsv(const std::vector<EvalReport>& reports);

}  // namespace dqd
