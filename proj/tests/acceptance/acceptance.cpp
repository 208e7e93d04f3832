// Acceptance checks: one PASS/FAIL line per criterion. Criterion 11 needs
// the TrashNet images and runs only when WASTEBENCH_TRASHNET points at them.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "support.hpp"
#include "wastebench/bench.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"
#include "wastebench/metrics.hpp"
#include "wastebench/select.hpp"
#include "wastebench/synth.hpp"

using namespace wastebench;
using namespace oracles;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Collects the first few failures of a criterion.
struct Tally {
    int failures = 0;
    std::ostringstream first;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (failures++ < 3) first << (failures > 1 ? "; " : "") << what;
    }
    Outcome done(const std::string& summary) const {
        if (failures == 0) return {true, summary};
        return {false, std::to_string(failures) + " failed: " + first.str()};
    }
};

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + WASTEBENCH_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

LabeledFeatures labeled(const FeatureBenchmark& b, int classes, double fe_ms) {
    LabeledFeatures out;
    const auto n_tr = static_cast<std::size_t>(b.X_train.rows());
    const auto n_te = static_cast<std::size_t>(b.X_test.rows());
    out.matrix.n = static_cast<std::uint32_t>(n_tr + n_te);
    out.matrix.d = static_cast<std::uint32_t>(b.X_train.cols());
    out.matrix.source_tag = "synthetic";
    for (std::size_t i = 0; i < n_tr + n_te; ++i) {
        const bool tr = i < n_tr;
        const auto r = static_cast<Eigen::Index>(tr ? i : i - n_tr);
        for (Eigen::Index j = 0; j < b.X_train.cols(); ++j)
            out.matrix.values.push_back(static_cast<float>(tr ? b.X_train(r, j) : b.X_test(r, j)));
        out.matrix.sample_ids.push_back("row_" + std::to_string(i));
        out.labels.push_back(tr ? b.y_train[static_cast<std::size_t>(r)] : b.y_test[static_cast<std::size_t>(r)]);
        out.splits.push_back(tr ? Split::Train : Split::Test);
    }
    out.class_count = classes;
    out.fe_ms = fe_ms;
    return out;
}

ExperimentPlan memory_plan(std::vector<Family> families) {
    ExperimentPlan p;
    p.pipeline = Pipeline::Hybrid;
    p.features = "synthetic.fmx";
    p.labels = "synthetic.csv";
    for (auto f : families) {
        ClassifierSpec s;
        s.family = f;
        p.specs.push_back(s);
    }
    p.timing_reps = 5;
    return p;
}

// ---- criteria ---------------------------------------------------------------

Outcome layout_fidelity() {
    Tally t;
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const int cls = static_cast<int>(rng.index(3));
        const ImageBuffer img = synth_image(cls, 1000 + static_cast<std::uint64_t>(i), 128);
        const HandcraftedVector v = extract_image(img, SegmentMode::GrabCut);
        t.expect(v.flat.size() == 1305, "image " + std::to_string(i) + " has " + std::to_string(v.flat.size()) + " dims");
        t.expect(v.blocks.size() == kBlockCount, "image " + std::to_string(i) + " block count");
        std::size_t offset = 0;
        for (std::size_t b = 0; b < v.blocks.size() && b < kBlockCount; ++b) {
            t.expect(v.blocks[b].kind == kCanonicalOrder[b], "block order");
            t.expect(v.blocks[b].dim() == kBlockDims[b], std::string(block_name(kCanonicalOrder[b])) + " size");
            for (std::size_t j = 0; j < v.blocks[b].dim() && offset + j < v.flat.size(); ++j)
                t.expect(v.flat[offset + j] == v.blocks[b].values[j], "flat copy");
            offset += v.blocks[b].dim();
        }
    }
    const std::vector<std::size_t> want{15, 1024, 5, 7, 20, 10, 32, 128, 64};
    t.expect(std::vector<std::size_t>(kBlockDims.begin(), kBlockDims.end()) == want, "block dims");
    return t.done("50 images x 1305 dims, blocks (15,1024,5,7,20,10,32,128,64)");
}

Outcome descriptor_oracles() {
    Tally t;
    double worst = 0.0;
    auto close = [&](const std::vector<double>& got, const std::vector<double>& want, const std::string& what) {
        if (got.size() != want.size()) return t.expect(false, what + " size");
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double err = std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i]));
            worst = std::max(worst, err);
            t.expect(err <= 1e-9, what + "[" + std::to_string(i) + "]");
        }
    };
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const ImageBuffer img = testing::random_image(64, 64, 50 + seed);
        for (const Mask& mask : {Mask::full(64, 64), random_mask(64, 64, 90 + seed)}) {
            close(extract_color_basic(img, mask).values, naive_color_basic(img, mask), "moments");
            close(extract_color_hist(img, mask).values, naive_color_hist(img, mask), "histogram");
            close(extract_glcm(img, mask).values, naive_glcm(img, mask), "glcm");
            t.expect(extract_lbp(img, mask).values == naive_lbp(img, mask), "lbp bins differ");
        }
    }
    return t.done("4 images x 2 masks, worst relative error " + fmt(worst) + ", lbp exact");
}

Outcome hu_invariance() {
    Tally t;
    Rng rng(21);
    const ImageBuffer canvas = testing::constant_image(300, 300, 200, 200, 200);
    const ImageBuffer canvas2 = testing::constant_image(600, 600, 200, 200, 200);
    double wt = 0, wr = 0, ws = 0;
    for (int shape = 0; shape < 10; ++shape) {
        const auto poly = random_polygon(rng);
        const Mask a = polygon_mask(300, 300, poly, 120, 20, 30);
        const auto h = extract_hu(canvas, a).values;
        const auto ht = extract_hu(canvas, polygon_mask(300, 300, poly, 120, 40, 50)).values;
        const auto hr = extract_hu(canvas, rotate90(a)).values;
        const auto hs = extract_hu(canvas2, upscale2(a)).values;
        for (int i = 0; i < 7; ++i) {
            wt = std::max(wt, std::abs(ht[i] - h[i]));
            wr = std::max(wr, std::abs(hr[i] - h[i]));
            ws = std::max(ws, std::abs(hs[i] - h[i]));
        }
    }
    t.expect(wt <= 1e-9, "translation " + fmt(wt));
    t.expect(wr <= 1e-3, "rotation " + fmt(wr));
    t.expect(ws <= 1e-2, "scale " + fmt(ws));
    return t.done("10 shapes, max diff translation " + fmt(wt) + ", rotation " + fmt(wr) + ", 2x scale " + fmt(ws));
}

Outcome focal_loss_checks() {
    Tally t;
    t.expect(std::abs(focal_loss(1.0, 2.0, 0.25)) <= 1e-12, "p_t=1");
    t.expect(std::abs(focal_loss(0.5, 0.0, 1.0) - std::log(2.0)) <= 1e-12, "p_t=0.5");

    Rng rng(3);
    const Matrix X = random_matrix(120, 6, rng);
    const Labels y = random_labels(120, 3, rng);
    ClassifierSpec ce;
    ce.logistic.max_iter = 50;
    ce.logistic.grad_tol = 0.0;
    ClassifierSpec fl = ce;
    fl.logistic.loss = LossKind::Focal;
    fl.logistic.gamma = 0.0;
    fl.logistic.alpha = 1.0;
    const auto a = std::get<LogisticModel>(train(ce, X, y, 1).params).loss_history;
    const auto b = std::get<LogisticModel>(train(fl, X, y, 1).params).loss_history;
    double delta = 0.0;
    t.expect(a.size() == 50 && b.size() == 50, "50 iterations");
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) delta = std::max(delta, std::abs(a[i] - b[i]));
    t.expect(delta < 1e-12, "loss delta " + fmt(delta));

    double worst = 0.0;
    Rng g(17);
    for (int instance = 0; instance < 20; ++instance) {
        LogisticParams p;
        p.loss = LossKind::Focal;
        p.gamma = g.uniform(0.0, 4.0);
        p.alpha = g.uniform(0.1, 1.0);
        p.l2 = g.uniform(0.0, 0.1);
        const int C = 2 + static_cast<int>(g.index(3));
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(g.index(5));
        const std::size_t n = 5 + g.index(20);
        const Matrix Xi = random_matrix(static_cast<Eigen::Index>(n), d, g) * 1.5;
        const Labels yi = random_labels(n, C, g);
        const Matrix W = random_matrix(C, d, g);
        const Vector bias = random_matrix(C, 1, g).col(0);
        Matrix gW;
        Vector gb;
        logistic_objective(p, Xi, yi, W, bias, &gW, &gb);
        const double h = 1e-5;
        double err = 0.0, norm = 0.0;
        for (Eigen::Index c = 0; c < C; ++c) {
            for (Eigen::Index j = 0; j < d; ++j) {
                Matrix Wp = W, Wm = W;
                Wp(c, j) += h;
                Wm(c, j) -= h;
                const double fd =
                    (reference_objective(p, Xi, yi, Wp, bias) - reference_objective(p, Xi, yi, Wm, bias)) / (2 * h);
                err += (fd - gW(c, j)) * (fd - gW(c, j));
                norm += gW(c, j) * gW(c, j);
            }
            Vector bp = bias, bm = bias;
            bp(c) += h;
            bm(c) -= h;
            const double fd = (reference_objective(p, Xi, yi, W, bp) - reference_objective(p, Xi, yi, W, bm)) / (2 * h);
            err += (fd - gb(c)) * (fd - gb(c));
            norm += gb(c) * gb(c);
        }
        worst = std::max(worst, std::sqrt(err / norm));
    }
    t.expect(worst <= 1e-4, "gradient relative error " + fmt(worst));
    return t.done("CE delta " + fmt(delta) + " over 50 iterations, worst gradient error " + fmt(worst));
}

Outcome classifier_oracles() {
    Tally t;
    Rng rng(12);
    int queries = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.index(181));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(6));
        const int C = 2 + static_cast<int>(rng.index(4));
        ClassifierSpec spec;
        spec.family = Family::Knn;
        spec.knn.k = 1 + static_cast<int>(rng.index(9));
        const Matrix X = random_matrix(n, d, rng);
        const Labels y = random_labels(static_cast<std::size_t>(n), C, rng);
        const auto model = train(spec, X, y, 0);
        const Matrix Q = random_matrix(50, d, rng);
        for (Eigen::Index i = 0; i < Q.rows(); ++i, ++queries)
            t.expect(model.predict(row_of(Q, i)) == brute_knn(X, y, C, spec.knn.k, row_of(Q, i)), "knn query");
    }

    ClassifierSpec tree;
    tree.family = Family::DTree;
    tree.dtree.max_depth = kUnlimitedDepth;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix X = random_matrix(300, 5, rng);
        const Labels y = random_labels(300, 4, rng);
        t.expect(accuracy(y, train(tree, X, y, 0).predict_all(X)) == 1.0, "tree train accuracy");
    }

    {
        const Matrix X = random_matrix(300, 6, rng);
        Labels y(300);
        for (Eigen::Index i = 0; i < 300; ++i) {
            const double s = X(i, 0) + X(i, 1) * X(i, 2) + 0.8 * rng.normal();
            y[i] = s < -0.5 ? 0 : (s < 0.5 ? 1 : 2);
        }
        for (auto growth : {Growth::LevelWise, Growth::LeafWise}) {
            ClassifierSpec g;
            g.family = Family::Gbdt;
            g.gbdt.growth = growth;
            g.gbdt.rounds = 200;
            const auto hist = std::get<GbdtModel>(train(g, X, y, 0).params).loss_history;
            t.expect(hist.size() == 200, "gbdt rounds");
            for (std::size_t r = 1; r < hist.size(); ++r) t.expect(hist[r] <= hist[r - 1], "gbdt loss rose");
        }
    }

    double kkt = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix X = random_matrix(80, 3, rng);
        std::vector<double> y(80);
        for (Eigen::Index i = 0; i < 80; ++i) y[i] = X(i, 0) + 0.5 * X(i, 1) * X(i, 1) + 0.3 * rng.normal() > 0.4 ? 1 : -1;
        const double C = trial % 2 ? 10.0 : 1.0;
        const Matrix K = rbf_kernel(X, X, 0.5);
        const auto res = solve_smo(K, y, C, 1e-3, 1'000'000);
        for (Eigen::Index i = 0; i < 80; ++i) {
            double f = res.bias;
            for (Eigen::Index j = 0; j < 80; ++j) f += res.alpha[j] * y[j] * K(i, j);
            const double m = y[i] * f, a = res.alpha[i];
            const double v = a > 1e-12 && a < C - 1e-12 ? std::abs(m - 1.0)
                             : a <= 1e-12              ? std::max(0.0, 1.0 - m)
                                                       : std::max(0.0, m - 1.0);
            kkt = std::max(kkt, v);
        }
    }
    t.expect(kkt <= 1e-3, "KKT violation " + fmt(kkt));
    return t.done(std::to_string(queries) + " knn queries exact, trees 100%, gbdt monotone, KKT violation " + fmt(kkt));
}

Outcome selection_recovery() {
    Tally t;
    std::ostringstream s;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto b = make_feature_benchmark(400, 200, 2048, 20, 3, seed);
        const auto r = rank_embedded_rf(b.X_train, b.y_train, 200, seed);
        const std::set<std::size_t> top(r.ranked_indices.begin(), r.ranked_indices.begin() + 40);
        int hits = 0;
        for (auto i : b.informative) hits += top.count(i) > 0;
        t.expect(hits >= 18, "seed " + std::to_string(seed) + ": " + std::to_string(hits) + "/20 in top 40");

        ClassifierSpec lr;
        std::vector<std::size_t> all(2048);
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
        const auto k100 = select_top_k(r, 100);
        const double full = accuracy(b.y_test, train(lr, b.X_train, b.y_train, seed).predict_all(b.X_test));
        const double top100 = accuracy(b.y_test, train(lr, select_columns(b.X_train, k100), b.y_train, seed)
                                                     .predict_all(select_columns(b.X_test, k100)));
        t.expect(top100 >= full - 0.01, "seed " + std::to_string(seed) + ": top-100 " + fmt(100 * top100) +
                                            " vs full " + fmt(100 * full));
        s << (seed ? ", " : "") << hits << "/20 " << fmt(100 * top100, 4) << "%/" << fmt(100 * full, 4) << "%";
    }
    return t.done("per seed hits, top-100 vs full accuracy: " + s.str());
}

Outcome synthetic_pipeline() {
    Tally t;
    testing::TempDir dir;
    const fs::path log = dir / "log.txt";
    auto step = [&](const std::string& args) {
        const int rc = run_cli(args, log);
        t.expect(rc == 0, args.substr(0, args.find(' ')) + " exited " + std::to_string(rc) + ": " + slurp(log));
        return rc == 0;
    };
    if (!step("synth --out " + q(dir / "data") + " --classes 3 --per-class 100 --seed 1")) return t.done("");
    if (!step("extract --dataset " + q(dir / "data") + " --segment grabcut --side 128 --out " + q(dir / "f.fmx")))
        return t.done("");
    if (!step("train --features " + q(dir / "f.fmx") + " --model gbdt --out " + q(dir / "m.json"))) return t.done("");
    if (!step("eval --model " + q(dir / "m.json") + " --features " + q(dir / "f.fmx") + " --report " + q(dir / "r.json")))
        return t.done("");
    const json rep = json::parse(slurp(dir / "r.json"));
    const double acc = rep.at("metrics").at("weighted").at("accuracy").get<double>();
    const long n = rep.at("timing").at("n_test").get<long>();
    t.expect(acc >= 99.0, "test accuracy " + fmt(acc, 4) + "%");
    t.expect(rep.at("total_features") == 1305, "feature count");
    return t.done("300 images, grabcut, gbdt test accuracy " + format_percent(acc) + "% on " + std::to_string(n) + " rows");
}

Outcome timing_decomposition() {
    Tally t;
    const auto b = make_feature_benchmark(400, 200, 2048, 20, 3, 7);
    const auto data = labeled(b, 3, 3.7);
    auto plan = memory_plan({Family::Logistic, Family::Knn, Family::Svm, Family::DTree, Family::RForest, Family::Gbdt});
    const auto rows = timing_table(plan, data);
    t.expect(rows.size() == 6, "row count");
    double lr_ms = -1;
    for (const auto& r : rows) {
        t.expect(r.infer_ms_per_sample == r.fe_ms + r.clf_ms, r.model + " infer != fe + clf");
        t.expect(r.fe_ms == 3.7, r.model + " fe_ms");
        if (r.model == "logistic") lr_ms = r.clf_ms;
    }
    t.expect(lr_ms >= 0 && lr_ms < 0.5, "logistic clf_ms " + fmt(lr_ms));
    return t.done("6 rows exact, logistic clf " + fmt(lr_ms) + " ms/sample on 2048 dims");
}

Outcome leak_freedom() {
    Tally t;
    const auto b = make_feature_benchmark(200, 100, 300, 10, 3, 9);
    auto data = labeled(b, 3, 0.0);
    auto plan = memory_plan({Family::Logistic, Family::Knn, Family::Svm, Family::DTree, Family::RForest, Family::Gbdt});
    plan.specs[4].rforest.trees = 50;
    plan.specs[5].gbdt.rounds = 50;
    SelectionPlan sel;
    sel.k_list = {20, 10};
    sel.trees = 100;
    plan.selection = sel;
    plan.timing_reps = 3;
    const auto clean = run_experiment(plan, data);
    for (std::size_t i = 0; i < data.labels.size(); ++i)
        if (data.splits[i] == Split::Test) data.labels[i] = (data.labels[i] + 1) % 3;
    const auto poisoned = run_experiment(plan, data);
    t.expect(clean.ranking && poisoned.ranking, "ranking missing");
    if (clean.ranking && poisoned.ranking)
        t.expect(clean.ranking->to_json().dump() == poisoned.ranking->to_json().dump(), "rankings differ");
    t.expect(clean.cells.size() == poisoned.cells.size(), "cell count");
    std::size_t same = 0;
    for (std::size_t c = 0; c < std::min(clean.cells.size(), poisoned.cells.size()); ++c) {
        t.expect(!clean.cells[c].model_json.empty(), "cell " + std::to_string(c) + " failed: " + clean.cells[c].report.error);
        t.expect(clean.cells[c].model_json == poisoned.cells[c].model_json, "model bytes differ in cell " + std::to_string(c));
        same += clean.cells[c].model_json == poisoned.cells[c].model_json;
    }
    return t.done(std::to_string(same) + " models and the ranking byte-identical after flipping every test label");
}

Outcome audit_recovery() {
    Tally t;
    testing::TempDir dir;
    // 100 separable samples: one feature, class 0 around -10 and class 1
    // around +10 with unit noise. Three class-0 and two class-1 labels flipped.
    Rng rng(10);
    std::set<std::size_t> planted;
    while (planted.size() < 3) planted.insert(2 * rng.index(50));
    while (planted.size() < 5) planted.insert(2 * rng.index(50) + 1);
    {
        std::ofstream csv(dir / "features.csv");
        csv.precision(17);
        for (std::size_t i = 0; i < 100; ++i) {
            const int c = static_cast<int>(i % 2);
            csv << (c ? 10.0 : -10.0) + rng.normal() << ',' << (planted.count(i) ? 1 - c : c) << '\n';
        }
    }
    const fs::path log = dir / "log.txt";
    int rc = run_cli("deepfeat import --csv " + q(dir / "features.csv") + " --label-last --out " + q(dir / "f.fmx"), log);
    t.expect(rc == 0, "import exited " + std::to_string(rc) + ": " + slurp(log));
    rc = run_cli("audit --dataset " + q(dir / "f.fmx") + " --folds 5 --model logistic --out " + q(dir / "flags.json"), log);
    t.expect(rc == 0, "audit exited " + std::to_string(rc) + ": " + slurp(log));
    if (rc != 0) return t.done("");
    const auto m = read_matrix(dir / "f.fmx");
    std::set<std::size_t> flagged;
    for (const auto& f : json::parse(slurp(dir / "flags.json"))) {
        const auto id = f.at("sample").get<std::string>();
        const auto it = std::find(m.sample_ids.begin(), m.sample_ids.end(), id);
        flagged.insert(static_cast<std::size_t>(it - m.sample_ids.begin()));
    }
    t.expect(flagged == planted, std::to_string(flagged.size()) + " flagged, planted set " +
                                     (flagged == planted ? "matched" : "not matched"));
    return t.done("5 planted flips among 100 samples, 5-fold logistic audit flagged exactly those 5");
}

// Full TrashNet run: handcrafted features, gbdt, 80/10/10 split.
Outcome trashnet(const fs::path& root) {
    Tally t;
    ExperimentPlan plan;
    plan.pipeline = Pipeline::Handcrafted;
    plan.dataset = root;
    plan.segment = SegmentMode::GrabCut;
    ClassifierSpec g;
    g.family = Family::Gbdt;
    plan.specs = {g};
    const auto data = load_plan_data(plan);
    const auto r = run_experiment(plan, data);
    const auto& rep = r.cells.at(0).report;
    t.expect(rep.ok(), rep.error);
    const double acc = rep.weighted.accuracy;
    t.expect(acc >= 70.0 && acc <= 85.0, "test accuracy " + format_percent(acc) + "% outside [70, 85]");
    return t.done("gbdt test accuracy " + format_percent(acc) + "% on " + std::to_string(rep.confusion.total()) + " images");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"layout fidelity", layout_fidelity},
        {"descriptor oracles", descriptor_oracles},
        {"hu invariance", hu_invariance},
        {"focal loss", focal_loss_checks},
        {"classifier oracles", classifier_oracles},
        {"selection recovery", selection_recovery},
        {"synthetic end-to-end pipeline", synthetic_pipeline},
        {"timing decomposition", timing_decomposition},
        {"leak freedom", leak_freedom},
        {"audit recovery", audit_recovery},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ("
                  << o.detail << "; " << fmt(secs, 3) << " s)" << std::endl;
    }

    const char* trash = std::getenv("WASTEBENCH_TRASHNET");
    if (trash == nullptr || !fs::is_directory(trash)) {
        std::cout << "criterion 11: SKIP  full-data check  (set WASTEBENCH_TRASHNET to the TrashNet image root)" << std::endl;
    } else {
        Outcome o;
        try {
            o = trashnet(trash);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion 11: " << (o.pass ? "PASS" : "FAIL") << "  full-data check  (" << o.detail << ")"
                  << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
