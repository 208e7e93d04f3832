// wastebench: feature extraction, training, evaluation and benchmark grids
// for waste-image classification. Run `wastebench <command> --help`.

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wastebench/audit.hpp"
#include "wastebench/bench.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"
#include "wastebench/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wastebench;

namespace {

fs::path sidecar_labels(const fs::path& fmx) {
    fs::path p = fmx;
    p += ".labels.csv";
    return p;
}

LabeledFeatures load_features(const fs::path& fmx, const std::string& labels, std::uint64_t seed) {
    const fs::path lp = labels.empty() ? sidecar_labels(fmx) : fs::path(labels);
    if (!fs::exists(lp)) throw ConfigError("no labels for " + fmx.string() + " (expected " + lp.string() + ")");
    return attach_labels(read_matrix(fmx), lp, SplitRatios{}, seed);
}

// Rows of `s`, or every row when no row carries that split.
std::vector<std::size_t> rows_or_all(const LabeledFeatures& data, Split s) {
    auto rows = data.rows_of(s);
    if (rows.empty())
        for (std::size_t i = 0; i < data.matrix.n; ++i) rows.push_back(i);
    return rows;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

struct Options {
    std::size_t workers = 0;
    std::uint64_t seed = 0;

    // extract
    fs::path dataset, out;
    std::string segment = "grabcut";
    int side = 400;
    bool augment = false;

    // deepfeat import
    fs::path csv;
    bool header = false;
    bool label_last = false;
    std::string tag = "deep";

    // select / train / eval
    fs::path features, model_path, report, selection;
    std::string labels;
    std::string method = "embedded";
    std::string family = "logistic";
    std::string loss = "cross_entropy";
    double gamma = 2.0;
    double alpha = 0.25;
    int trees = 200;
    std::size_t max_k = 100;
    std::size_t patience = 5;
    std::size_t k = 0;

    // bench / audit / synth
    fs::path plan;
    int folds = 5;
    int classes = 3;
    int per_class = 100;
};

ClassifierSpec cli_spec(const Options& o) {
    ClassifierSpec s;
    s.family = parse_family(o.family);
    if (o.loss == "focal") s.logistic.loss = LossKind::Focal;
    else if (o.loss != "cross_entropy") throw ConfigError("unknown loss '" + o.loss + "'");
    s.logistic.gamma = o.gamma;
    s.logistic.alpha = o.alpha;
    s.validate();
    return s;
}

int cmd_extract(const Options& o) {
    const ScanResult scan = scan_directory(o.dataset);
    for (const auto& p : scan.skipped) std::cerr << "skipped undecodable " << p.string() << '\n';
    const LabeledDataset ds = split(scan.dataset, SplitRatios{}, o.seed);
    const LabeledFeatures data = extract_dataset(ds, parse_segment_mode(o.segment), o.side, o.augment, o.seed);
    write_matrix(data.matrix, o.out);
    write_labels(data, sidecar_labels(o.out));
    std::cout << "extracted " << data.matrix.n << " x " << data.matrix.d << " (" << ds.class_count()
              << " classes) in " << data.fe_ms << " ms/image -> " << o.out.string() << '\n';
    return 0;
}

int cmd_import(const Options& o) {
    CsvImport imp = import_csv(o.csv, o.header, o.label_last, o.tag);
    write_matrix(imp.matrix, o.out);
    if (imp.labels) {
        LabeledDataset ds;
        int classes = 0;
        for (int l : *imp.labels) classes = std::max(classes, l + 1);
        for (int c = 0; c < classes; ++c) ds.class_names.push_back("class_" + std::to_string(c));
        for (std::size_t r = 0; r < imp.matrix.n; ++r) ds.samples.push_back({imp.matrix.sample_ids[r], (*imp.labels)[r], Split::Unassigned});
        write_manifest(split(ds, SplitRatios{}, o.seed), sidecar_labels(o.out));
    }
    std::cout << "imported " << imp.matrix.n << " x " << imp.matrix.d << " -> " << o.out.string() << '\n';
    return 0;
}

int cmd_select(const Options& o) {
    const LabeledFeatures data = load_features(o.features, o.labels, o.seed);
    const auto tr = rows_or_all(data, Split::Train);
    SelectionResult r;
    if (o.method == "embedded") {
        r = rank_embedded_rf(data.dense(tr), data.labels_of(tr), o.trees, o.seed);
    } else if (o.method == "wrapper") {
        const auto va = data.rows_of(Split::Val);
        if (va.empty()) throw ConfigError("wrapper selection needs rows in the val split");
        r = wrapper_forward(data.dense(tr), data.labels_of(tr), data.dense(va), data.labels_of(va), cli_spec(o),
                            std::min<std::size_t>(o.max_k, data.matrix.d), o.patience, o.seed);
    } else {
        throw ConfigError("unknown selection method '" + o.method + "'");
    }
    write_json(o.out, r.to_json());
    std::cout << "ranked " << r.ranked_indices.size() << " features (k=" << r.k << ") -> " << o.out.string() << '\n';
    return 0;
}

int cmd_train(const Options& o) {
    const LabeledFeatures data = load_features(o.features, o.labels, o.seed);
    const auto tr = rows_or_all(data, Split::Train);
    std::vector<std::size_t> columns;
    if (!o.selection.empty()) {
        const SelectionResult sel = SelectionResult::from_json(read_json(o.selection));
        columns = select_top_k(sel, o.k ? o.k : sel.k);
    } else {
        for (std::size_t j = 0; j < data.matrix.d; ++j) columns.push_back(j);
    }
    const Matrix X = select_columns(data.dense(tr), columns);
    const auto start = std::chrono::steady_clock::now();
    const TrainedModel m = train(cli_spec(o), X, data.labels_of(tr), o.seed, data.class_count);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json j = m.to_json();
    j["feature_indices"] = columns;
    j["train_s"] = secs;
    write_json(o.out, j);
    std::cout << "trained " << m.spec.label() << " on " << tr.size() << " rows x " << columns.size()
              << " features in " << secs << " s -> " << o.out.string() << '\n';
    return 0;
}

int cmd_eval(const Options& o) {
    const json mj = read_json(o.model_path);
    const TrainedModel m = TrainedModel::from_json(mj);
    const LabeledFeatures data = load_features(o.features, o.labels, o.seed);
    std::vector<std::size_t> columns;
    if (mj.contains("feature_indices")) {
        columns = mj.at("feature_indices").get<std::vector<std::size_t>>();
    } else {
        for (std::size_t j = 0; j < data.matrix.d; ++j) columns.push_back(j);
    }
    const auto te = rows_or_all(data, Split::Test);
    const Matrix X = select_columns(data.dense(te), columns);
    const Labels y = data.labels_of(te);

    EvalReport rep;
    rep.dataset = o.features.stem().string();
    rep.pipeline = data.matrix.source_tag;
    rep.model = m.spec.label();
    rep.k_features = columns.size();
    rep.total_features = data.matrix.d;
    rep.confusion = confusion(y, m.predict_all(X), std::max(m.class_count, data.class_count));
    rep.macro = summarize(rep.confusion, Averaging::Macro);
    rep.weighted = summarize(rep.confusion, Averaging::Weighted);
    rep.timing.model = rep.model;
    rep.timing.train_s = mj.value("train_s", 0.0);
    rep.timing.n_test = rep.timing.batch_size = te.size();
    rep.timing.clf_ms = time_pipeline([&] { (void)m.predict_all(X); }, 5, te.size()).per_sample_ms;
    rep.timing.infer_ms_per_sample = rep.timing.fe_ms + rep.timing.clf_ms;
    write_json(o.report, rep.to_json());
    std::cout << "accuracy " << format_percent(rep.weighted.accuracy) << "% on " << te.size() << " rows, macro F1 "
              << format_percent(rep.macro.f1) << "% -> " << o.report.string() << '\n';
    return 0;
}

int cmd_bench(const Options& o) {
    ExperimentPlan plan = ExperimentPlan::load(o.plan);
    if (!o.out.empty()) plan.output = o.out;
    const BenchResult r = run_experiment(plan);
    std::size_t failed = 0;
    for (const auto& c : r.cells) {
        if (!c.report.ok()) {
            ++failed;
            std::cerr << "cell " << c.report.model << " k=" << c.report.k_features << " failed: " << c.report.error << '\n';
        }
    }
    std::cout << r.combined_csv();
    std::cout << r.cells.size() - failed << '/' << r.cells.size() << " cells ok -> " << plan.output.string() << '\n';
    return failed == r.cells.size() ? static_cast<int>(ExitCode::Training) : 0;
}

int cmd_audit(const Options& o) {
    LabeledFeatures data;
    std::vector<std::string> names;
    if (fs::is_directory(o.dataset)) {
        const ScanResult scan = scan_directory(o.dataset);
        data = extract_dataset(scan.dataset, parse_segment_mode(o.segment), o.side, false, o.seed);
    } else {
        data = load_features(o.dataset, o.labels, o.seed);
    }
    std::vector<std::size_t> all(data.matrix.n);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto flags = audit_labels(data.dense(all), data.labels, o.folds, cli_spec(o), o.seed);
    json out = json::array();
    std::cout << "sample,stored,predicted,confidence\n";
    for (const auto& f : flags) {
        const std::string& id = data.matrix.sample_ids[f.index];
        std::cout << id << ',' << f.stored_label << ',' << f.predicted << ',' << f.confidence << '\n';
        out.push_back({{"sample", id}, {"stored", f.stored_label}, {"predicted", f.predicted}, {"confidence", f.confidence}});
    }
    if (!o.out.empty()) write_json(o.out, out);
    std::cerr << flags.size() << " of " << data.matrix.n << " samples flagged\n";
    return 0;
}

int cmd_synth(const Options& o) {
    SynthOptions so;
    so.classes = o.classes;
    so.per_class = o.per_class;
    so.seed = o.seed;
    so.side = o.side;
    const std::size_t n = write_synth_corpus(o.out, so);
    std::cout << "wrote " << n << " images -> " << o.out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Waste-image classification benchmark workbench"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--workers", o.workers, "Worker threads (0 = all cores)");

    auto* extract = app.add_subcommand("extract", "Extract handcrafted features from an image directory");
    extract->add_option("--dataset", o.dataset, "root/<class>/*.{jpg,png,bmp}")->required();
    extract->add_option("--out", o.out, "Output FMX file")->required();
    extract->add_option("--segment", o.segment)->check(CLI::IsMember({"grabcut", "threshold", "none"}));
    extract->add_option("--side", o.side, "Resize side in pixels");
    extract->add_flag("--augment", o.augment, "Append augmented copies of training images");
    extract->add_option("--seed", o.seed);

    auto* deepfeat = app.add_subcommand("deepfeat", "Deep feature ingestion");
    deepfeat->require_subcommand(1);
    auto* import = deepfeat->add_subcommand("import", "Import a numeric CSV as FMX");
    import->add_option("--csv", o.csv)->required();
    import->add_option("--out", o.out)->required();
    import->add_flag("--header", o.header, "Skip the first line");
    import->add_flag("--label-last", o.label_last, "Last column holds the class id");
    import->add_option("--tag", o.tag, "Source tag stored in the matrix");
    import->add_option("--seed", o.seed);

    auto* select = app.add_subcommand("select", "Rank features");
    select->add_option("--features", o.features)->required();
    select->add_option("--labels", o.labels);
    select->add_option("--method", o.method)->check(CLI::IsMember({"embedded", "wrapper"}));
    select->add_option("--out", o.out)->required();
    select->add_option("--trees", o.trees);
    select->add_option("--max-k", o.max_k);
    select->add_option("--patience", o.patience);
    select->add_option("--model", o.family, "Base model of the wrapper");
    select->add_option("--seed", o.seed);

    auto* trn = app.add_subcommand("train", "Train a classifier on the train split");
    trn->add_option("--features", o.features)->required();
    trn->add_option("--labels", o.labels);
    trn->add_option("--model", o.family)->required()->check(
        CLI::IsMember({"logistic", "knn", "svm", "dtree", "rforest", "gbdt"}));
    trn->add_option("--loss", o.loss)->check(CLI::IsMember({"cross_entropy", "focal"}));
    trn->add_option("--gamma", o.gamma);
    trn->add_option("--alpha", o.alpha);
    trn->add_option("--selection", o.selection, "Selection JSON restricting the columns");
    trn->add_option("--k", o.k, "Top-k of the selection (default: its k)");
    trn->add_option("--out", o.out)->required();
    trn->add_option("--seed", o.seed);

    auto* ev = app.add_subcommand("eval", "Evaluate a model on the test split");
    ev->add_option("--model", o.model_path)->required();
    ev->add_option("--features", o.features)->required();
    ev->add_option("--labels", o.labels);
    ev->add_option("--report", o.report)->required();

    auto* bench = app.add_subcommand("bench", "Run an experiment plan");
    bench->add_option("--plan", o.plan)->required();
    bench->add_option("--out", o.out, "Output directory (overrides the plan)");

    auto* audit = app.add_subcommand("audit", "Flag samples whose cross-validated prediction disagrees with the label");
    audit->add_option("--dataset", o.dataset, "Image directory or FMX file")->required();
    audit->add_option("--folds", o.folds)->required();
    audit->add_option("--labels", o.labels);
    audit->add_option("--model", o.family);
    audit->add_option("--segment", o.segment)->check(CLI::IsMember({"grabcut", "threshold", "none"}));
    audit->add_option("--side", o.side);
    audit->add_option("--out", o.out, "Also write the flags as JSON");
    audit->add_option("--seed", o.seed);

    auto* synth = app.add_subcommand("synth", "Write the synthetic shape/colour corpus");
    synth->add_option("--out", o.out)->required();
    synth->add_option("--classes", o.classes);
    synth->add_option("--per-class", o.per_class);
    synth->add_option("--side", o.side);
    synth->add_option("--seed", o.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }
    // synth images default to their native size
    if (synth->parsed() && synth->count("--side") == 0) o.side = 128;

    set_worker_count(o.workers);
    try {
        if (extract->parsed()) return cmd_extract(o);
        if (import->parsed()) return cmd_import(o);
        if (select->parsed()) return cmd_select(o);
        if (trn->parsed()) return cmd_train(o);
        if (ev->parsed()) return cmd_eval(o);
        if (bench->parsed()) return cmd_bench(o);
        if (audit->parsed()) return cmd_audit(o);
        if (synth->parsed()) return cmd_synth(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::Data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::Data);
    }
    return static_cast<int>(ExitCode::Usage);
}
