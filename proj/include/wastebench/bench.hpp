#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wastebench/classifiers.hpp"
#include "wastebench/dataset.hpp"
#include "wastebench/deepfeat.hpp"
#include "wastebench/handcrafted.hpp"
#include "wastebench/metrics.hpp"
#include "wastebench/select.hpp"

namespace wastebench {

enum class Pipeline { Handcrafted, Deep, Hybrid };
enum class SegmentMode { GrabCut, Threshold, None };

std::string to_string(Pipeline p);
std::string to_string(SegmentMode m);
Pipeline parse_pipeline(const std::string& s);
SegmentMode parse_segment_mode(const std::string& s);

struct SelectionPlan {
    SelectionMethod method = SelectionMethod::EmbeddedRf;
    std::vector<std::size_t> k_list{100, 90, 80, 70, 60, 50};
    int trees = 200;
    bool baseline = true;  // also evaluate all features
    std::size_t patience = 5;
};

struct ExperimentPlan {
    std::string name = "experiment";
    Pipeline pipeline = Pipeline::Hybrid;
    // handcrafted pipeline
    std::filesystem::path dataset;
    SegmentMode segment = SegmentMode::GrabCut;
    int side = 400;
    bool augment = false;
    // deep / hybrid pipelines
    std::filesystem::path features;
    std::filesystem::path labels;
    double external_fe_s = 0.0;   // one-time extraction cost measured by the exporter
    double external_fe_ms = 0.0;  // per-sample extraction latency measured by the exporter

    SplitRatios ratios;
    std::uint64_t seed = 0;
    std::vector<ClassifierSpec> specs;
    std::optional<SelectionPlan> selection;
    int timing_reps = 5;
    std::filesystem::path output;

    /// Throws ConfigError when the plan cannot run.
    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentPlan from_json(const nlohmann::json& j);
    static ExperimentPlan load(const std::filesystem::path& path);
};

/// Feature rows with labels and split assignment, the input of every grid cell.
struct LabeledFeatures {
    FeatureMatrix matrix;
    Labels labels;
    std::vector<Split> splits;
    int class_count = 0;
    std::vector<std::string> class_names;
    double fe_s = 0.0;   // extraction time over the training rows
    double fe_ms = 0.0;  // extraction latency per sample

    std::vector<std::size_t> rows_of(Split s) const;
    Matrix dense(std::span<const std::size_t> rows) const;
    Labels labels_of(std::span<const std::size_t> rows) const;
};

/// Segmentation, crop and all descriptors for one already-resized image.
HandcraftedVector extract_image(const ImageBuffer& img, SegmentMode mode);

/// Handcrafted features for every sample; augmented copies of training
/// samples are appended when `augment` is set.
LabeledFeatures extract_dataset(const LabeledDataset& ds, SegmentMode mode, int side, bool augment = false,
                                std::uint64_t seed = 0);

/// Labels CSV `path,class_id,split` joined to the matrix by sample id. Rows
/// without a split are assigned by a stratified split with `seed`.
LabeledFeatures attach_labels(FeatureMatrix matrix, const std::filesystem::path& labels_csv,
                              const SplitRatios& ratios, std::uint64_t seed);
void write_labels(const LabeledFeatures& data, const std::filesystem::path& path);

/// Loads or extracts the plan's data source.
LabeledFeatures load_plan_data(const ExperimentPlan& plan);

struct CellArtifacts {
    EvalReport report;
    std::string model_json;
    std::vector<std::size_t> columns;
};

struct BenchResult {
    std::vector<CellArtifacts> cells;
    std::optional<SelectionResult> ranking;

    std::vector<EvalReport> reports() const;
    std::string combined_csv() const;
};

/// Runs every (spec, k) cell: selection ranking and model fitting see only the
/// training rows; metrics come from the test rows. Failed cells carry their
/// error and the remaining cells proceed.
BenchResult run_experiment(const ExperimentPlan& plan, const LabeledFeatures& data);
/// Loads the data, runs the grid and writes reports, models and results.csv
/// to plan.output.
BenchResult run_experiment(const ExperimentPlan& plan);

struct SweepRow {
    std::size_t k = 0;
    std::string model;
    Summary weighted;
    Summary macro;
    double reduction_pct = 0.0;
};

/// Feature-count sweep on one embedded ranking (nested subsets).
std::vector<SweepRow> sweep_selection(const ExperimentPlan& plan, const LabeledFeatures& data,
                                      const std::vector<std::size_t>& k_list = {100, 90, 80, 70, 60, 50});

/// Training time, extraction time and per-sample inference decomposition per spec.
std::vector<TimingRecord> timing_table(const ExperimentPlan& plan, const LabeledFeatures& data);

/// Dimensionality reduction of keeping k of d features, in percent.
double reduction_percent(std::size_t k, std::size_t d);

}  // namespace wastebench
