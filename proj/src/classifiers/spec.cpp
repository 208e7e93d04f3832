#include <algorithm>
#include <cmath>

#include "wastebench/classifiers.hpp"
#include "wastebench/errors.hpp"

namespace wastebench {

namespace {

constexpr std::pair<Family, const char*> kFamilyNames[] = {
    {Family::Logistic, "logistic"}, {Family::Knn, "knn"},         {Family::Svm, "svm"},
    {Family::DTree, "dtree"},       {Family::RForest, "rforest"}, {Family::Gbdt, "gbdt"},
};

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

int depth_from_json(const nlohmann::json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (j.at(key).is_null()) return kUnlimitedDepth;
    return get_or<int>(j, key, fallback);
}

nlohmann::json depth_to_json(int depth) {
    return depth == kUnlimitedDepth ? nlohmann::json(nullptr) : nlohmann::json(depth);
}

}  // namespace

std::string to_string(Family f) {
    for (const auto& [fam, name] : kFamilyNames)
        if (fam == f) return name;
    return "?";
}

Family parse_family(const std::string& s) {
    for (const auto& [fam, name] : kFamilyNames)
        if (s == name) return fam;
    throw ConfigError("unknown model family '" + s + "'");
}

void ClassifierSpec::validate() const {
    switch (family) {
        case Family::Logistic:
            if (!(logistic.gamma >= 0)) throw ConfigError("focal gamma must be >= 0");
            if (!(logistic.alpha > 0 && logistic.alpha <= 1)) throw ConfigError("focal alpha must lie in (0, 1]");
            if (!(logistic.l2 >= 0)) throw ConfigError("l2 penalty must be >= 0");
            if (logistic.max_iter < 1) throw ConfigError("max_iter must be >= 1");
            break;
        case Family::Knn:
            if (knn.k < 1) throw ConfigError("knn k must be >= 1");
            break;
        case Family::Svm:
            if (!(svm.C > 0)) throw ConfigError("svm C must be > 0");
            if (!(svm.tol > 0)) throw ConfigError("svm tol must be > 0");
            if (svm.max_iter < 1) throw ConfigError("svm max_iter must be >= 1");
            break;
        case Family::DTree:
            if (dtree.max_depth < 1) throw ConfigError("tree depth must be >= 1");
            if (dtree.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
            break;
        case Family::RForest:
            if (rforest.trees < 1) throw ConfigError("forest needs at least one tree");
            if (rforest.max_depth < 1) throw ConfigError("tree depth must be >= 1");
            if (rforest.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
            break;
        case Family::Gbdt:
            if (gbdt.rounds < 1) throw ConfigError("gbdt needs at least one round");
            if (!(gbdt.learning_rate > 0)) throw ConfigError("learning rate must be > 0");
            if (gbdt.max_bins < 2 || gbdt.max_bins > 65536) throw ConfigError("max_bins must lie in [2, 65536]");
            if (gbdt.max_depth < 1) throw ConfigError("tree depth must be >= 1");
            if (gbdt.max_leaves < 2) throw ConfigError("max_leaves must be >= 2");
            if (!(gbdt.lambda >= 0)) throw ConfigError("lambda must be >= 0");
            break;
    }
}

std::string ClassifierSpec::label() const {
    std::string s = to_string(family);
    if (family == Family::Logistic && logistic.loss == LossKind::Focal) s += "-focal";
    if (family == Family::Gbdt) s += gbdt.growth == Growth::LeafWise ? "-leaf" : "-level";
    return s;
}

nlohmann::json spec_to_json(const ClassifierSpec& s) {
    nlohmann::json j;
    j["family"] = to_string(s.family);
    switch (s.family) {
        case Family::Logistic:
            j["loss"] = s.logistic.loss == LossKind::Focal ? "focal" : "cross_entropy";
            j["gamma"] = s.logistic.gamma;
            j["alpha"] = s.logistic.alpha;
            j["l2"] = s.logistic.l2;
            j["max_iter"] = s.logistic.max_iter;
            j["grad_tol"] = s.logistic.grad_tol;
            break;
        case Family::Knn:
            j["k"] = s.knn.k;
            break;
        case Family::Svm:
            j["C"] = s.svm.C;
            j["kernel_gamma"] = s.svm.kernel_gamma;
            j["tol"] = s.svm.tol;
            j["max_iter"] = s.svm.max_iter;
            break;
        case Family::DTree:
            j["max_depth"] = depth_to_json(s.dtree.max_depth);
            j["min_leaf"] = s.dtree.min_leaf;
            break;
        case Family::RForest:
            j["trees"] = s.rforest.trees;
            j["max_features"] = s.rforest.max_features;
            j["max_depth"] = depth_to_json(s.rforest.max_depth);
            j["min_leaf"] = s.rforest.min_leaf;
            break;
        case Family::Gbdt:
            j["growth"] = s.gbdt.growth == Growth::LeafWise ? "leaf_wise" : "level_wise";
            j["learning_rate"] = s.gbdt.learning_rate;
            j["rounds"] = s.gbdt.rounds;
            j["max_bins"] = s.gbdt.max_bins;
            j["max_depth"] = s.gbdt.max_depth;
            j["max_leaves"] = s.gbdt.max_leaves;
            j["lambda"] = s.gbdt.lambda;
            j["min_child_weight"] = s.gbdt.min_child_weight;
            break;
    }
    return j;
}

ClassifierSpec spec_from_json(const nlohmann::json& j) {
    if (j.is_string()) return spec_from_json(nlohmann::json{{"family", j}});
    if (!j.is_object() || !j.contains("family")) throw ConfigError("classifier spec needs a 'family'");
    ClassifierSpec s;
    s.family = parse_family(get_or<std::string>(j, "family", ""));
    auto& lr = s.logistic;
    const auto loss = get_or<std::string>(j, "loss", "cross_entropy");
    if (loss == "focal") lr.loss = LossKind::Focal;
    else if (loss == "cross_entropy" || loss == "ce") lr.loss = LossKind::CrossEntropy;
    else throw ConfigError("unknown loss '" + loss + "'");
    lr.gamma = get_or(j, "gamma", lr.gamma);
    lr.alpha = get_or(j, "alpha", lr.alpha);
    lr.l2 = get_or(j, "l2", lr.l2);
    lr.grad_tol = get_or(j, "grad_tol", lr.grad_tol);
    s.knn.k = get_or(j, "k", s.knn.k);
    s.svm.C = get_or(j, "C", s.svm.C);
    s.svm.kernel_gamma = get_or(j, "kernel_gamma", s.svm.kernel_gamma);
    s.svm.tol = get_or(j, "tol", s.svm.tol);
    switch (s.family) {
        case Family::Logistic: lr.max_iter = get_or(j, "max_iter", lr.max_iter); break;
        case Family::Svm: s.svm.max_iter = get_or(j, "max_iter", s.svm.max_iter); break;
        case Family::DTree: s.dtree.max_depth = depth_from_json(j, "max_depth", s.dtree.max_depth); break;
        case Family::RForest: s.rforest.max_depth = depth_from_json(j, "max_depth", s.rforest.max_depth); break;
        case Family::Gbdt: s.gbdt.max_depth = get_or(j, "max_depth", s.gbdt.max_depth); break;
        case Family::Knn: break;
    }
    s.dtree.min_leaf = s.rforest.min_leaf = get_or(j, "min_leaf", 1);
    s.rforest.trees = get_or(j, "trees", s.rforest.trees);
    s.rforest.max_features = get_or(j, "max_features", s.rforest.max_features);
    const auto growth = get_or<std::string>(j, "growth", "level_wise");
    if (growth == "leaf_wise") s.gbdt.growth = Growth::LeafWise;
    else if (growth == "level_wise") s.gbdt.growth = Growth::LevelWise;
    else throw ConfigError("unknown growth '" + growth + "'");
    s.gbdt.learning_rate = get_or(j, "learning_rate", s.gbdt.learning_rate);
    s.gbdt.rounds = get_or(j, "rounds", s.gbdt.rounds);
    s.gbdt.max_bins = get_or(j, "max_bins", s.gbdt.max_bins);
    s.gbdt.max_leaves = get_or(j, "max_leaves", s.gbdt.max_leaves);
    s.gbdt.lambda = get_or(j, "lambda", s.gbdt.lambda);
    s.gbdt.min_child_weight = get_or(j, "min_child_weight", s.gbdt.min_child_weight);
    s.validate();
    return s;
}

double focal_loss(double p_true, double gamma, double alpha) {
    if (gamma < 0) throw ConfigError("focal gamma must be >= 0");
    const double p = std::max(p_true, 1e-12);
    const double q = 1.0 - p;
    // pow(0, 0) is 1, so gamma = 0 degrades to weighted cross-entropy.
    return -alpha * std::pow(q, gamma) * std::log(p);
}

Scaler Scaler::fit(const Matrix& X) {
    Scaler s;
    const auto n = static_cast<double>(X.rows());
    s.mean.resize(X.cols());
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mu = X.col(j).sum() / n;
        const double var = (X.col(j).array() - mu).square().sum() / n;
        s.mean[j] = mu;
        s.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Matrix Scaler::apply(const Matrix& X) const {
    if (identity()) return X;
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) out(i, j) = (X(i, j) - mean[j]) / scale[j];
    return out;
}

void Scaler::apply_inplace(std::span<double> row) const {
    if (identity()) return;
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
}

double accuracy(const Labels& truth, const Labels& pred) {
    if (truth.size() != pred.size()) throw ValidationError("label vectors differ in length");
    if (truth.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

Matrix select_columns(const Matrix& X, std::span<const std::size_t> columns) {
    Matrix out(X.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] >= static_cast<std::size_t>(X.cols())) throw ConfigError("column index out of range");
        out.col(static_cast<Eigen::Index>(c)) = X.col(static_cast<Eigen::Index>(columns[c]));
    }
    return out;
}

Matrix select_rows(const Matrix& X, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

Labels select_rows(const Labels& y, std::span<const std::size_t> rows) {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

}  // namespace wastebench
