#include "wastebench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"
#include "wastebench/random.hpp"
#include "wastebench/segmentation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace wastebench {

std::string to_string(Pipeline p) {
    switch (p) {
        case Pipeline::Handcrafted: return "handcrafted";
        case Pipeline::Deep: return "deep";
        case Pipeline::Hybrid: return "hybrid";
    }
    return "?";
}

std::string to_string(SegmentMode m) {
    switch (m) {
        case SegmentMode::GrabCut: return "grabcut";
        case SegmentMode::Threshold: return "threshold";
        case SegmentMode::None: return "none";
    }
    return "?";
}

Pipeline parse_pipeline(const std::string& s) {
    if (s == "handcrafted") return Pipeline::Handcrafted;
    if (s == "deep") return Pipeline::Deep;
    if (s == "hybrid") return Pipeline::Hybrid;
    throw ConfigError("unknown pipeline '" + s + "'");
}

SegmentMode parse_segment_mode(const std::string& s) {
    if (s == "grabcut") return SegmentMode::GrabCut;
    if (s == "threshold") return SegmentMode::Threshold;
    if (s == "none") return SegmentMode::None;
    throw ConfigError("unknown segmentation mode '" + s + "'");
}

double reduction_percent(std::size_t k, std::size_t d) {
    if (d == 0) return 0.0;
    return (1.0 - static_cast<double>(k) / static_cast<double>(d)) * 100.0;
}

// ---- plan -----------------------------------------------------------------

void ExperimentPlan::validate() const {
    if (specs.empty()) throw ConfigError("plan lists no classifiers");
    for (const auto& s : specs) s.validate();
    if (pipeline == Pipeline::Handcrafted) {
        if (dataset.empty()) throw ConfigError("handcrafted pipeline needs 'dataset'");
        if (side < 16) throw ConfigError("side must be >= 16");
    } else {
        if (features.empty()) throw ConfigError(to_string(pipeline) + " pipeline needs 'features'");
        if (labels.empty()) throw ConfigError(to_string(pipeline) + " pipeline needs 'labels'");
    }
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw ConfigError("split ratios must be non-negative and sum to 1");
    if (ratios.train <= 0 || ratios.test <= 0) throw ConfigError("plan needs train and test rows");
    if (timing_reps < 3) throw ConfigError("timing_reps must be >= 3");
    if (external_fe_s < 0 || external_fe_ms < 0) throw ConfigError("external timings must be >= 0");
    if (selection) {
        if (selection->k_list.empty() && !selection->baseline) throw ConfigError("selection has no cells");
        for (auto k : selection->k_list)
            if (k == 0) throw ConfigError("k must be >= 1");
        if (selection->trees < 1) throw ConfigError("selection forest needs trees");
        if (selection->method == SelectionMethod::WrapperForward && ratios.val <= 0)
            throw ConfigError("wrapper selection needs validation rows");
    }
}

json ExperimentPlan::to_json() const {
    json specs_json = json::array();
    for (const auto& s : specs) specs_json.push_back(spec_to_json(s));
    json j{{"name", name},
           {"pipeline", to_string(pipeline)},
           {"ratios", {{"train", ratios.train}, {"val", ratios.val}, {"test", ratios.test}}},
           {"seed", seed},
           {"specs", specs_json},
           {"timing_reps", timing_reps},
           {"output", output.string()}};
    if (pipeline == Pipeline::Handcrafted) {
        j["dataset"] = dataset.string();
        j["segment"] = to_string(segment);
        j["side"] = side;
        j["augment"] = augment;
    } else {
        j["features"] = features.string();
        j["labels"] = labels.string();
        j["external_fe_s"] = external_fe_s;
        j["external_fe_ms"] = external_fe_ms;
    }
    if (selection) {
        j["selection"] = {{"method", selection->method == SelectionMethod::EmbeddedRf ? "embedded" : "wrapper"},
                          {"k_list", selection->k_list},
                          {"trees", selection->trees},
                          {"baseline", selection->baseline},
                          {"patience", selection->patience}};
    }
    return j;
}

ExperimentPlan ExperimentPlan::from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("plan must be a JSON object");
        ExperimentPlan p;
        p.name = j.value("name", p.name);
        p.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
        p.dataset = j.value("dataset", std::string{});
        p.segment = parse_segment_mode(j.value("segment", std::string{"grabcut"}));
        p.side = j.value("side", p.side);
        p.augment = j.value("augment", p.augment);
        p.features = j.value("features", std::string{});
        p.labels = j.value("labels", std::string{});
        p.external_fe_s = j.value("external_fe_s", 0.0);
        p.external_fe_ms = j.value("external_fe_ms", 0.0);
        if (j.contains("ratios")) {
            const auto& r = j.at("ratios");
            if (r.is_array()) {
                if (r.size() != 3) throw ConfigError("ratios must hold three fractions");
                p.ratios = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
            } else {
                p.ratios = {r.at("train").get<double>(), r.at("val").get<double>(), r.at("test").get<double>()};
            }
        }
        p.seed = j.value("seed", std::uint64_t{0});
        for (const auto& s : j.at("specs")) p.specs.push_back(spec_from_json(s));
        if (j.contains("selection") && !j.at("selection").is_null()) {
            const auto& s = j.at("selection");
            SelectionPlan sp;
            const auto m = s.value("method", std::string{"embedded"});
            if (m == "embedded" || m == "embedded_rf") sp.method = SelectionMethod::EmbeddedRf;
            else if (m == "wrapper" || m == "wrapper_forward") sp.method = SelectionMethod::WrapperForward;
            else throw ConfigError("unknown selection method '" + m + "'");
            if (s.contains("k_list")) sp.k_list = s.at("k_list").get<std::vector<std::size_t>>();
            sp.trees = s.value("trees", sp.trees);
            sp.baseline = s.value("baseline", sp.baseline);
            sp.patience = s.value("patience", sp.patience);
            p.selection = sp;
        }
        p.timing_reps = j.value("timing_reps", p.timing_reps);
        p.output = j.value("output", std::string{});
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed plan: ") + e.what());
    }
}

ExperimentPlan ExperimentPlan::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    ExperimentPlan p = from_json(j);
    // Relative paths are relative to the plan file.
    const fs::path base = path.parent_path();
    for (fs::path* f : {&p.dataset, &p.features, &p.labels, &p.output})
        if (!f->empty() && f->is_relative()) *f = base / *f;
    return p;
}

// ---- data -----------------------------------------------------------------

std::vector<std::size_t> LabeledFeatures::rows_of(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < splits.size(); ++i)
        if (splits[i] == s) out.push_back(i);
    return out;
}

Matrix LabeledFeatures::dense(std::span<const std::size_t> rows) const {
    Matrix X(static_cast<Eigen::Index>(rows.size()), matrix.d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const float* src = matrix.row(rows[r]);
        for (std::uint32_t j = 0; j < matrix.d; ++j) X(static_cast<Eigen::Index>(r), j) = src[j];
    }
    return X;
}

Labels LabeledFeatures::labels_of(std::span<const std::size_t> rows) const {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(labels[r]);
    return out;
}

HandcraftedVector extract_image(const ImageBuffer& img, SegmentMode mode) {
    if (mode == SegmentMode::None) return extract_handcrafted(img, Mask::full(img.width, img.height));
    Mask mask = Mask::full(img.width, img.height);
    if (mode == SegmentMode::GrabCut) mask = grabcut_segment(img, default_init_rect(img.width, img.height)).mask;
    try {
        const ThresholdCropResult tc = threshold_crop(img, mask);
        return extract_handcrafted(tc.image, tc.mask);
    } catch (const DegenerateInput&) {
        return extract_handcrafted(img, Mask::full(img.width, img.height));
    }
}

LabeledFeatures extract_dataset(const LabeledDataset& ds, SegmentMode mode, int side, bool augment,
                                std::uint64_t seed) {
    struct Item {
        std::size_t sample;
        bool augmented;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) items.push_back({i, false});
    if (augment)
        for (std::size_t i = 0; i < ds.samples.size(); ++i)
            if (ds.samples[i].split == Split::Train) items.push_back({i, true});

    LabeledFeatures out;
    out.class_count = static_cast<int>(ds.class_count());
    out.class_names = ds.class_names;
    out.matrix.n = static_cast<std::uint32_t>(items.size());
    out.matrix.d = static_cast<std::uint32_t>(kHandcraftedDim);
    out.matrix.source_tag = "handcrafted-" + to_string(mode);
    out.matrix.values.resize(items.size() * kHandcraftedDim);
    out.matrix.sample_ids.resize(items.size());
    out.labels.resize(items.size());
    out.splits.resize(items.size());
    std::vector<double> elapsed_ms(items.size(), 0.0);

    parallel_for(items.size(), [&](std::size_t k) {
        const auto& ref = ds.samples[items[k].sample];
        const auto start = std::chrono::steady_clock::now();
        ImageBuffer img = load_and_resize(ref, side);
        if (items[k].augmented)
            img = wastebench::augment(img, default_policy_for(seed, items[k].sample), derive_seed(seed, items[k].sample));
        const HandcraftedVector v = extract_image(img, mode);
        elapsed_ms[k] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::copy(v.flat.begin(), v.flat.end(), out.matrix.values.begin() + static_cast<std::ptrdiff_t>(k * kHandcraftedDim));
        out.matrix.sample_ids[k] = ref.path.generic_string() + (items[k].augmented ? "#aug" : "");
        out.labels[k] = ref.class_id;
        out.splits[k] = ref.split;
    });

    double train_ms = 0.0, all_ms = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        all_ms += elapsed_ms[k];
        if (out.splits[k] == Split::Train) train_ms += elapsed_ms[k];
    }
    out.fe_s = train_ms / 1000.0;
    out.fe_ms = items.empty() ? 0.0 : all_ms / static_cast<double>(items.size());
    return out;
}

LabeledFeatures attach_labels(FeatureMatrix matrix, const fs::path& labels_csv, const SplitRatios& ratios,
                              std::uint64_t seed) {
    const LabeledDataset manifest = read_manifest(labels_csv);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
        if (!by_id.emplace(manifest.samples[i].path.generic_string(), i).second)
            throw FormatError(labels_csv.string() + ": duplicate sample '" + manifest.samples[i].path.string() + "'");
    }
    LabeledFeatures out;
    out.labels.resize(matrix.n);
    out.splits.resize(matrix.n);
    LabeledDataset pending;
    pending.class_names = manifest.class_names;
    std::vector<std::size_t> pending_rows;
    for (std::size_t r = 0; r < matrix.n; ++r) {
        const auto it = by_id.find(matrix.sample_ids[r]);
        if (it == by_id.end())
            throw ValidationError("sample '" + matrix.sample_ids[r] + "' has no entry in " + labels_csv.string());
        const SampleRef& ref = manifest.samples[it->second];
        out.labels[r] = ref.class_id;
        out.splits[r] = ref.split;
        if (ref.split == Split::Unassigned) {
            pending.samples.push_back(ref);
            pending_rows.push_back(r);
        }
    }
    if (!pending.samples.empty()) {
        const LabeledDataset assigned = split(pending, ratios, seed);
        for (std::size_t k = 0; k < pending_rows.size(); ++k) out.splits[pending_rows[k]] = assigned.samples[k].split;
    }
    out.class_count = static_cast<int>(manifest.class_count());
    out.class_names = manifest.class_names;
    for (std::size_t c = 0; c < out.class_names.size(); ++c)
        if (out.class_names[c].empty()) out.class_names[c] = "class_" + std::to_string(c);
    out.matrix = std::move(matrix);
    return out;
}

void write_labels(const LabeledFeatures& data, const fs::path& path) {
    LabeledDataset ds;
    ds.class_names = data.class_names;
    for (std::size_t r = 0; r < data.matrix.n; ++r)
        ds.samples.push_back({data.matrix.sample_ids[r], data.labels[r], data.splits[r]});
    write_manifest(ds, path);
}

LabeledFeatures load_plan_data(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.pipeline == Pipeline::Handcrafted) {
        const ScanResult scan = scan_directory(plan.dataset);
        const LabeledDataset ds = split(scan.dataset, plan.ratios, plan.seed);
        return extract_dataset(ds, plan.segment, plan.side, plan.augment, plan.seed);
    }
    LabeledFeatures data = attach_labels(read_matrix(plan.features), plan.labels, plan.ratios, plan.seed);
    data.fe_s = plan.external_fe_s;
    data.fe_ms = plan.external_fe_ms;
    return data;
}

// ---- grid -----------------------------------------------------------------

namespace {

struct Cell {
    std::size_t spec_index = 0;
    std::optional<std::size_t> k;  // empty: all features
};

struct Prepared {
    std::vector<std::size_t> train, val, test;
    Matrix X_train, X_val, X_test;
    Labels y_train, y_val, y_test;
};

Prepared prepare(const LabeledFeatures& data) {
    if (data.labels.size() != data.matrix.n || data.splits.size() != data.matrix.n)
        throw ValidationError("labels and splits must cover every feature row");
    Prepared p;
    p.train = data.rows_of(Split::Train);
    p.val = data.rows_of(Split::Val);
    p.test = data.rows_of(Split::Test);
    if (p.train.empty()) throw ConfigError("no training rows");
    if (p.test.empty()) throw ConfigError("no test rows");
    p.X_train = data.dense(p.train);
    p.X_val = data.dense(p.val);
    p.X_test = data.dense(p.test);
    p.y_train = data.labels_of(p.train);
    p.y_val = data.labels_of(p.val);
    p.y_test = data.labels_of(p.test);
    return p;
}

std::string dataset_label(const ExperimentPlan& plan) {
    const fs::path& src = plan.pipeline == Pipeline::Handcrafted ? plan.dataset : plan.features;
    const std::string stem = src.filename().empty() ? src.parent_path().filename().string() : src.stem().string();
    return stem.empty() ? plan.name : stem;
}

std::vector<Cell> grid_cells(const ExperimentPlan& plan) {
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < plan.specs.size(); ++s) {
        if (!plan.selection || plan.selection->baseline) cells.push_back({s, std::nullopt});
        if (plan.selection)
            for (auto k : plan.selection->k_list) cells.push_back({s, k});
    }
    return cells;
}

struct Trained {
    std::optional<TrainedModel> model;
};

BenchResult run_grid(const ExperimentPlan& plan, const LabeledFeatures& data, bool with_timing) {
    plan.validate();
    const Prepared p = prepare(data);
    const std::size_t d = data.matrix.d;
    const int classes = std::max(data.class_count, *std::max_element(data.labels.begin(), data.labels.end()) + 1);

    BenchResult result;
    std::string ranking_error;
    if (plan.selection) {
        try {
            if (plan.selection->method == SelectionMethod::EmbeddedRf) {
                result.ranking = rank_embedded_rf(p.X_train, p.y_train, plan.selection->trees, derive_seed(plan.seed, 1));
            } else {
                std::size_t max_k = 0;
                for (auto k : plan.selection->k_list) max_k = std::max(max_k, k);
                result.ranking = wrapper_forward(p.X_train, p.y_train, p.X_val, p.y_val, plan.specs.front(),
                                                 std::min(max_k, d), plan.selection->patience,
                                                 derive_seed(plan.seed, 1));
            }
        } catch (const std::exception& e) {
            ranking_error = e.what();
        }
    }

    const auto cells = grid_cells(plan);
    result.cells.resize(cells.size());
    std::vector<Trained> models(cells.size());
    const std::string dataset = dataset_label(plan);

    parallel_for(cells.size(), [&](std::size_t c) {
        const Cell& cell = cells[c];
        const ClassifierSpec& spec = plan.specs[cell.spec_index];
        CellArtifacts& art = result.cells[c];
        EvalReport& rep = art.report;
        rep.dataset = dataset;
        rep.pipeline = to_string(plan.pipeline);
        rep.model = spec.label();
        rep.total_features = d;
        rep.k_features = cell.k.value_or(d);
        rep.timing.model = rep.model;
        try {
            if (cell.k) {
                if (!result.ranking) throw TrainingError("selection failed: " + ranking_error);
                if (*cell.k > result.ranking->ranked_indices.size())
                    throw ConfigError("k=" + std::to_string(*cell.k) + " exceeds the " +
                                      std::to_string(result.ranking->ranked_indices.size()) + " ranked features");
                art.columns = select_top_k(*result.ranking, *cell.k);
            } else {
                art.columns.resize(d);
                for (std::size_t j = 0; j < d; ++j) art.columns[j] = j;
            }
            const Matrix Xtr = select_columns(p.X_train, art.columns);
            const auto start = std::chrono::steady_clock::now();
            TrainedModel model = train(spec, Xtr, p.y_train, derive_seed(plan.seed, 100 + cell.spec_index), classes);
            rep.timing.train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const Matrix Xte = select_columns(p.X_test, art.columns);
            rep.confusion = confusion(p.y_test, model.predict_all(Xte), classes);
            rep.macro = summarize(rep.confusion, Averaging::Macro);
            rep.weighted = summarize(rep.confusion, Averaging::Weighted);
            json mj = model.to_json();
            mj["feature_indices"] = art.columns;
            art.model_json = mj.dump();
            models[c].model = std::move(model);
        } catch (const std::exception& e) {
            rep.error = e.what();
        }
    });

    // Timing runs one cell at a time.
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& rep = result.cells[c].report;
        if (!rep.ok()) continue;
        rep.timing.fe_s = data.fe_s;
        rep.timing.fe_ms = data.fe_ms;
        rep.timing.n_test = p.test.size();
        rep.timing.batch_size = p.test.size();
        if (with_timing) {
            const Matrix Xte = select_columns(p.X_test, result.cells[c].columns);
            const TrainedModel& m = *models[c].model;
            const StageTiming t = time_pipeline([&] { (void)m.predict_all(Xte); }, plan.timing_reps, p.test.size());
            rep.timing.clf_ms = t.per_sample_ms;
        }
        rep.timing.infer_ms_per_sample = rep.timing.fe_ms + rep.timing.clf_ms;
    }
    return result;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << text;
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string cell_name(std::size_t index, const EvalReport& rep) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%03zu_%s_k%zu", index, rep.model.c_str(), rep.k_features);
    return buf;
}

}  // namespace

std::vector<EvalReport> BenchResult::reports() const {
    std::vector<EvalReport> out;
    for (const auto& c : cells) out.push_back(c.report);
    return out;
}

std::string BenchResult::combined_csv() const {
    std::string out = EvalReport::csv_header() + "\n";
    for (const auto& c : cells) out += c.report.csv_row() + "\n";
    return out;
}

BenchResult run_experiment(const ExperimentPlan& plan, const LabeledFeatures& data) {
    return run_grid(plan, data, true);
}

BenchResult run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.output.empty()) throw ConfigError("plan has no output directory");
    const LabeledFeatures data = load_plan_data(plan);
    BenchResult result = run_experiment(plan, data);

    fs::create_directories(plan.output / "reports");
    fs::create_directories(plan.output / "models");
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto& cell = result.cells[c];
        const std::string name = cell_name(c, cell.report);
        write_text(plan.output / "reports" / (name + ".json"), cell.report.to_json().dump(2) + "\n");
        if (!cell.model_json.empty()) write_text(plan.output / "models" / (name + ".json"), cell.model_json + "\n");
    }
    write_text(plan.output / "results.csv", result.combined_csv());
    if (result.ranking) write_text(plan.output / "selection.json", result.ranking->to_json().dump() + "\n");
    write_text(plan.output / "plan.json", plan.to_json().dump(2) + "\n");
    return result;
}

std::vector<SweepRow> sweep_selection(const ExperimentPlan& plan, const LabeledFeatures& data,
                                      const std::vector<std::size_t>& k_list) {
    ExperimentPlan sweep = plan;
    SelectionPlan sel = plan.selection.value_or(SelectionPlan{});
    sel.method = SelectionMethod::EmbeddedRf;
    sel.k_list = k_list;
    sel.baseline = false;
    sweep.selection = sel;
    const BenchResult r = run_grid(sweep, data, false);
    std::vector<SweepRow> rows;
    for (const auto& cell : r.cells) {
        const auto& rep = cell.report;
        if (!rep.ok()) throw TrainingError(rep.model + " at k=" + std::to_string(rep.k_features) + ": " + rep.error);
        rows.push_back({rep.k_features, rep.model, rep.weighted, rep.macro, reduction_percent(rep.k_features, rep.total_features)});
    }
    return rows;
}

std::vector<TimingRecord> timing_table(const ExperimentPlan& plan, const LabeledFeatures& data) {
    ExperimentPlan base = plan;
    base.selection.reset();
    const BenchResult r = run_grid(base, data, true);
    std::vector<TimingRecord> rows;
    for (const auto& cell : r.cells) {
        if (!cell.report.ok()) throw TrainingError(cell.report.model + ": " + cell.report.error);
        rows.push_back(cell.report.timing);
    }
    return rows;
}

}  // namespace wastebench
