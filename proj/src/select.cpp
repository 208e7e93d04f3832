#include "wastebench/select.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"

namespace wastebench {

namespace {

const char* method_name(SelectionMethod m) {
    return m == SelectionMethod::EmbeddedRf ? "embedded_rf" : "wrapper_forward";
}

}  // namespace

nlohmann::json SelectionResult::to_json() const {
    return {{"method", method_name(method)}, {"k", k}, {"ranked_indices", ranked_indices}, {"scores", scores}};
}

SelectionResult SelectionResult::from_json(const nlohmann::json& j) {
    try {
        SelectionResult r;
        const auto m = j.at("method").get<std::string>();
        if (m == "embedded_rf") r.method = SelectionMethod::EmbeddedRf;
        else if (m == "wrapper_forward") r.method = SelectionMethod::WrapperForward;
        else throw FormatError("unknown selection method '" + m + "'");
        r.k = j.at("k").get<std::size_t>();
        r.ranked_indices = j.at("ranked_indices").get<std::vector<std::size_t>>();
        r.scores = j.at("scores").get<std::vector<double>>();
        std::set<std::size_t> seen(r.ranked_indices.begin(), r.ranked_indices.end());
        if (seen.size() != r.ranked_indices.size()) throw FormatError("ranked_indices repeats an index");
        if (r.k > r.ranked_indices.size()) throw FormatError("k exceeds the ranking length");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed selection result: ") + e.what());
    }
}

SelectionResult rank_embedded_rf(const Matrix& X, const Labels& y, int trees, std::uint64_t seed) {
    if (X.rows() < 2) throw TrainingError("selection needs at least two samples");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ValidationError("feature rows and labels differ in count");
    std::set<int> classes(y.begin(), y.end());
    if (classes.size() < 2) throw TrainingError("selection needs at least two classes");
    if (*classes.begin() < 0) throw ValidationError("negative class label");
    if (trees < 1) throw ConfigError("forest needs at least one tree");

    ForestParams p;
    p.trees = trees;
    const ForestModel forest = fit_forest(p, X, y, *classes.rbegin() + 1, seed);

    SelectionResult r;
    r.method = SelectionMethod::EmbeddedRf;
    r.scores = forest.importances;
    r.ranked_indices.resize(r.scores.size());
    std::iota(r.ranked_indices.begin(), r.ranked_indices.end(), std::size_t{0});
    std::stable_sort(r.ranked_indices.begin(), r.ranked_indices.end(),
                     [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
    r.k = r.ranked_indices.size();
    return r;
}

std::vector<std::size_t> select_top_k(const SelectionResult& res, std::size_t k) {
    if (k < 1 || k > res.ranked_indices.size())
        throw ConfigError("k=" + std::to_string(k) + " outside [1, " + std::to_string(res.ranked_indices.size()) + "]");
    std::vector<std::size_t> out(res.ranked_indices.begin(), res.ranked_indices.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
    return out;
}

SelectionResult wrapper_forward(const Matrix& X_train, const Labels& y_train, const Matrix& X_val,
                                const Labels& y_val, const ClassifierSpec& base, std::size_t max_k,
                                std::size_t patience, std::uint64_t seed) {
    const auto d = static_cast<std::size_t>(X_train.cols());
    if (max_k == 0) throw ConfigError("wrapper selection needs max_k >= 1");
    if (max_k > d) throw ConfigError("max_k exceeds the feature count");
    if (X_val.cols() != X_train.cols()) throw ValidationError("train and validation widths differ");
    if (X_val.rows() == 0) throw ConfigError("wrapper selection needs validation rows");
    base.validate();

    SelectionResult r;
    r.method = SelectionMethod::WrapperForward;
    std::vector<char> used(d, 0);
    std::vector<std::size_t> chosen;
    double best_overall = -1.0;
    std::size_t stale = 0;
    std::vector<double> acc(d);
    while (chosen.size() < max_k) {
        std::vector<std::size_t> candidates;
        for (std::size_t f = 0; f < d; ++f)
            if (!used[f]) candidates.push_back(f);
        parallel_for(candidates.size(), [&](std::size_t c) {
            std::vector<std::size_t> cols = chosen;
            cols.push_back(candidates[c]);
            const Matrix tr = select_columns(X_train, cols);
            const Matrix va = select_columns(X_val, cols);
            const TrainedModel m = train(base, tr, y_train, seed);
            acc[candidates[c]] = accuracy(y_val, m.predict_all(va));
        });
        std::size_t pick = candidates.front();
        for (std::size_t f : candidates)
            if (acc[f] > acc[pick]) pick = f;
        used[pick] = 1;
        chosen.push_back(pick);
        r.ranked_indices.push_back(pick);
        r.scores.push_back(acc[pick]);
        if (acc[pick] > best_overall) {
            best_overall = acc[pick];
            r.k = chosen.size();
            stale = 0;
        } else if (++stale >= patience) {
            break;
        }
    }
    return r;
}

}  // namespace wastebench
