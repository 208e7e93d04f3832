#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wastebench {

/// counts[t][p]: rows are true classes, columns predictions.
struct ConfusionMatrix {
    std::vector<std::vector<long>> counts;

    std::size_t classes() const { return counts.size(); }
    long total() const;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int classes);

enum class Averaging { Macro, Weighted };

struct ClassStats {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
};
std::vector<ClassStats> per_class(const ConfusionMatrix& m);

/// Percentages in [0, 100], unrounded.
struct Summary {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};
Summary summarize(const ConfusionMatrix& m, Averaging averaging);

/// Two-decimal percentage, as in the report tables.
std::string format_percent(double v);

struct TimingRecord {
    std::string model;
    double train_s = 0.0;
    double fe_s = 0.0;
    double fe_ms = 0.0;
    double clf_ms = 0.0;
    double infer_ms_per_sample = 0.0;  // fe_ms + clf_ms
    std::size_t batch_size = 0;
    std::size_t n_test = 0;

    nlohmann::json to_json() const;
};

struct StageTiming {
    double median_ms = 0.0;      // whole stage
    double per_sample_ms = 0.0;  // median_ms / n_items
    std::vector<double> samples_ms;
};

/// Runs `stage` once as warm-up, then `reps` timed runs; reports the median.
/// Throws ConfigError when reps < 3.
StageTiming time_pipeline(const std::function<void()>& stage, int reps, std::size_t n_items);

/// Full evaluation record of one experiment cell.
struct EvalReport {
    std::string dataset;
    std::string pipeline;
    std::string model;
    std::size_t k_features = 0;
    std::size_t total_features = 0;
    Summary macro;
    Summary weighted;
    ConfusionMatrix confusion;
    TimingRecord timing;
    std::string error;  // non-empty when the cell failed

    bool ok() const { return error.empty(); }
    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

}  // namespace wastebench
