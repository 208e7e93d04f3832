#include "wastebench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "csv.hpp"
#include "wastebench/errors.hpp"

namespace wastebench {

long ConfusionMatrix::total() const {
    long t = 0;
    for (const auto& row : counts)
        for (long v : row) t += v;
    return t;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int classes) {
    if (y_true.size() != y_pred.size()) throw ValidationError("label vectors differ in length");
    if (classes < 1) throw ValidationError("class count must be positive");
    ConfusionMatrix m;
    m.counts.assign(static_cast<std::size_t>(classes), std::vector<long>(static_cast<std::size_t>(classes), 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || t >= classes || p < 0 || p >= classes)
            throw ValidationError("label out of range at position " + std::to_string(i));
        ++m.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    }
    return m;
}

std::vector<ClassStats> per_class(const ConfusionMatrix& m) {
    const std::size_t c = m.classes();
    std::vector<ClassStats> out(c);
    for (std::size_t k = 0; k < c; ++k) {
        long col = 0, row = 0;
        for (std::size_t j = 0; j < c; ++j) {
            col += m.counts[j][k];
            row += m.counts[k][j];
        }
        const double tp = static_cast<double>(m.counts[k][k]);
        auto& s = out[k];
        s.support = row;
        s.precision = col > 0 ? tp / static_cast<double>(col) : 0.0;
        s.recall = row > 0 ? tp / static_cast<double>(row) : 0.0;
        s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    }
    return out;
}

Summary summarize(const ConfusionMatrix& m, Averaging averaging) {
    const long total = m.total();
    if (m.classes() == 0 || total <= 0) throw ValidationError("empty confusion matrix");
    Summary s;
    long trace = 0;
    for (std::size_t k = 0; k < m.classes(); ++k) trace += m.counts[k][k];
    s.accuracy = 100.0 * static_cast<double>(trace) / static_cast<double>(total);
    const auto stats = per_class(m);
    for (const auto& c : stats) {
        const double w = averaging == Averaging::Macro ? 1.0 / static_cast<double>(stats.size())
                                                       : static_cast<double>(c.support) / static_cast<double>(total);
        s.precision += w * c.precision;
        s.recall += w * c.recall;
        s.f1 += w * c.f1;
    }
    s.precision *= 100.0;
    s.recall *= 100.0;
    s.f1 *= 100.0;
    return s;
}

std::string format_percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

nlohmann::json TimingRecord::to_json() const {
    return {{"model", model},   {"train_s", train_s},       {"fe_s", fe_s},
            {"fe_ms", fe_ms},   {"clf_ms", clf_ms},         {"infer_ms_per_sample", infer_ms_per_sample},
            {"batch_size", batch_size}, {"n_test", n_test}};
}

StageTiming time_pipeline(const std::function<void()>& stage, int reps, std::size_t n_items) {
    if (reps < 3) throw ConfigError("timing needs at least 3 repetitions");
    using clock = std::chrono::steady_clock;
    stage();  // warm-up, not recorded
    StageTiming t;
    for (int r = 0; r < reps; ++r) {
        const auto start = clock::now();
        stage();
        t.samples_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - start).count());
    }
    std::vector<double> sorted = t.samples_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    t.median_ms = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    t.per_sample_ms = n_items ? t.median_ms / static_cast<double>(n_items) : 0.0;
    return t;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
    return {{"accuracy", s.accuracy}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j{{"dataset", dataset},
                     {"pipeline", pipeline},
                     {"model", model},
                     {"k_features", k_features},
                     {"total_features", total_features}};
    if (!ok()) {
        j["error"] = error;
        return j;
    }
    j["metrics"] = {{"macro", summary_json(macro)}, {"weighted", summary_json(weighted)}};
    j["confusion"] = confusion.counts;
    j["timing"] = timing.to_json();
    return j;
}

std::string EvalReport::csv_header() {
    return "dataset,pipeline,model,k_features,total_features,accuracy,precision_weighted,recall_weighted,"
           "f1_weighted,precision_macro,recall_macro,f1_macro,train_s,fe_s,infer_ms,fe_ms,clf_ms,error";
}

std::string EvalReport::csv_row() const {
    std::ostringstream out;
    out << csv::quote(dataset) << ',' << csv::quote(pipeline) << ',' << csv::quote(model) << ',' << k_features << ','
        << total_features << ',';
    if (ok()) {
        out << format_percent(weighted.accuracy) << ',' << format_percent(weighted.precision) << ','
            << format_percent(weighted.recall) << ',' << format_percent(weighted.f1) << ','
            << format_percent(macro.precision) << ',' << format_percent(macro.recall) << ','
            << format_percent(macro.f1) << ',';
        out.precision(6);
        out << timing.train_s << ',' << timing.fe_s << ',' << timing.infer_ms_per_sample << ',' << timing.fe_ms << ','
            << timing.clf_ms << ',';
    } else {
        out << ",,,,,,,,,,,,";
        out << csv::quote(error);
    }
    return out.str();
}

}  // namespace wastebench
