#include <algorithm>
#include <cmath>
#include <set>

#include "internal.hpp"
#include "wastebench/errors.hpp"

namespace wastebench {

namespace {

constexpr int kModelSchema = 1;

bool scaled_family(Family f) { return f == Family::Logistic || f == Family::Knn || f == Family::Svm; }

using json = nlohmann::json;

json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
        throw FormatError("matrix shape does not match its data");
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

json tree_to_json(const Tree& t) {
    // Parallel arrays keep large ensembles compact.
    std::vector<int> feature, left, right;
    std::vector<double> threshold;
    std::vector<std::vector<double>> value;
    for (const auto& n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(n.value);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from_json(const json& j, int feature_dim) {
    const auto feature = j.at("feature").get<std::vector<int>>();
    const auto threshold = j.at("threshold").get<std::vector<double>>();
    const auto left = j.at("left").get<std::vector<int>>();
    const auto right = j.at("right").get<std::vector<int>>();
    const auto value = j.at("value").get<std::vector<std::vector<double>>>();
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n)
        throw FormatError("inconsistent tree arrays");
    Tree t;
    t.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = t.nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.value = value[i];
        if (node.feature >= feature_dim) throw FormatError("tree feature index out of range");
        if (node.feature >= 0) {
            // Children always follow their parent, which also rules out cycles.
            auto ok = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
            if (!ok(node.left) || !ok(node.right)) throw FormatError("tree child index out of range");
        }
    }
    return t;
}

void check_finite(const Matrix& X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            if (!std::isfinite(X(i, j)))
                throw ValidationError("non-finite feature at row " + std::to_string(i) + ", column " +
                                      std::to_string(j));
}

}  // namespace

TrainedModel train(const ClassifierSpec& spec, const Matrix& X, const Labels& y, std::uint64_t seed, int class_count) {
    spec.validate();
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ValidationError("feature rows and labels differ in count");
    if (X.rows() < 2) throw TrainingError("need at least two training samples");
    if (X.cols() < 1) throw ValidationError("need at least one feature");
    check_finite(X);
    int max_label = -1;
    std::set<int> distinct;
    for (int label : y) {
        if (label < 0) throw ValidationError("negative class label");
        max_label = std::max(max_label, label);
        distinct.insert(label);
    }
    if (class_count <= 0) class_count = max_label + 1;
    if (max_label >= class_count) throw ValidationError("class label out of range");
    if (distinct.size() < 2) throw TrainingError("training data holds a single class");

    TrainedModel m;
    m.spec = spec;
    m.class_count = class_count;
    m.feature_dim = static_cast<int>(X.cols());
    m.scaler = scaled_family(spec.family) ? Scaler::fit(X) : Scaler{};
    const Matrix Xs = m.scaler.apply(X);
    switch (spec.family) {
        case Family::Logistic:
            m.params = detail::fit_logistic(spec.logistic, Xs, y, class_count);
            break;
        case Family::Knn:
            m.params = KnnModel{Xs, y};
            break;
        case Family::Svm:
            m.params = detail::fit_svm(spec.svm, Xs, y, class_count);
            break;
        case Family::DTree: {
            std::vector<int> rows(y.size());
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
            m.params = fit_cart(Xs, y, class_count, rows, spec.dtree.max_depth, spec.dtree.min_leaf, 0, seed).tree;
            break;
        }
        case Family::RForest:
            m.params = fit_forest(spec.rforest, Xs, y, class_count, seed);
            break;
        case Family::Gbdt:
            m.params = detail::fit_gbdt(spec.gbdt, Xs, y, class_count);
            break;
    }
    return m;
}

std::vector<double> TrainedModel::score(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(feature_dim))
        throw ValidationError("expected " + std::to_string(feature_dim) + " features, got " + std::to_string(x.size()));
    std::vector<double> buf;
    if (!scaler.identity()) {
        buf.assign(x.begin(), x.end());
        scaler.apply_inplace(buf);
        x = buf;
    }
    return std::visit(
        [&](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LogisticModel>) return detail::logistic_scores(p, x);
            else if constexpr (std::is_same_v<T, KnnModel>) return detail::knn_scores(p, spec.knn.k, class_count, x);
            else if constexpr (std::is_same_v<T, SvmModel>) return detail::svm_scores(p, x);
            else if constexpr (std::is_same_v<T, Tree>) return detail::tree_scores(p, class_count, x);
            else if constexpr (std::is_same_v<T, ForestModel>) return detail::forest_scores(p, class_count, x);
            else return detail::gbdt_scores(p, x);
        },
        params);
}

int TrainedModel::predict(std::span<const double> x) const {
    const auto s = score(x);
    return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

Labels TrainedModel::predict_all(const Matrix& X) const {
    Labels out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out[static_cast<std::size_t>(i)] = predict(std::span<const double>(X.row(i).data(), static_cast<std::size_t>(X.cols())));
    return out;
}

Matrix TrainedModel::score_all(const Matrix& X) const {
    Matrix out(X.rows(), class_count);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const auto s = score(std::span<const double>(X.row(i).data(), static_cast<std::size_t>(X.cols())));
        for (int c = 0; c < class_count; ++c) out(i, c) = s[static_cast<std::size_t>(c)];
    }
    return out;
}

json TrainedModel::to_json() const {
    json j;
    j["model_schema"] = kModelSchema;
    j["spec"] = spec_to_json(spec);
    j["class_count"] = class_count;
    j["feature_dim"] = feature_dim;
    j["scaler"] = {{"mean", scaler.mean}, {"scale", scaler.scale}};
    json p;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                p["weights"] = matrix_to_json(m.weights);
                p["bias"] = std::vector<double>(m.bias.data(), m.bias.data() + m.bias.size());
                p["iterations"] = m.iterations;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                p["train"] = matrix_to_json(m.train);
                p["labels"] = m.labels;
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                p["kernel_gamma"] = m.kernel_gamma;
                p["vectors"] = matrix_to_json(m.vectors);
                json machines = json::array();
                for (const auto& b : m.machines)
                    machines.push_back({{"support", b.support}, {"coef", b.coef}, {"bias", b.bias}});
                p["machines"] = machines;
            } else if constexpr (std::is_same_v<T, Tree>) {
                p["tree"] = tree_to_json(m);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                p["trees"] = trees;
                p["oob_accuracy"] = m.oob_accuracy;
                p["importances"] = m.importances;
            } else {
                p["base_score"] = m.base_score;
                json rounds = json::array();
                for (const auto& r : m.rounds) {
                    json per_class = json::array();
                    for (const auto& t : r) per_class.push_back(tree_to_json(t));
                    rounds.push_back(per_class);
                }
                p["rounds"] = rounds;
            }
        },
        params);
    j["params"] = p;
    return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
    try {
        if (!j.is_object() || !j.contains("model_schema")) throw FormatError("not a model file");
        if (j.at("model_schema").get<int>() != kModelSchema)
            throw FormatError("unsupported model_schema " + j.at("model_schema").dump());
        TrainedModel m;
        try {
            m.spec = spec_from_json(j.at("spec"));
        } catch (const ConfigError& e) {
            throw FormatError(std::string("bad spec: ") + e.what());
        }
        m.class_count = j.at("class_count").get<int>();
        m.feature_dim = j.at("feature_dim").get<int>();
        if (m.class_count < 2 || m.feature_dim < 1) throw FormatError("bad class_count or feature_dim");
        m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler.scale = j.at("scaler").at("scale").get<std::vector<double>>();
        if (m.scaler.mean.size() != m.scaler.scale.size() ||
            (!m.scaler.identity() && m.scaler.mean.size() != static_cast<std::size_t>(m.feature_dim)))
            throw FormatError("scaler size mismatch");
        const auto C = static_cast<std::size_t>(m.class_count);
        const json& p = j.at("params");
        auto check_tree = [&](const Tree& t, std::size_t value_size) {
            for (const auto& n : t.nodes)
                if (n.feature < 0 && n.value.size() != value_size) throw FormatError("bad leaf value size");
        };
        switch (m.spec.family) {
            case Family::Logistic: {
                LogisticModel lm;
                lm.weights = matrix_from_json(p.at("weights"));
                const auto bias = p.at("bias").get<std::vector<double>>();
                lm.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
                lm.iterations = p.value("iterations", 0);
                if (static_cast<std::size_t>(lm.weights.rows()) != C || lm.weights.cols() != m.feature_dim ||
                    bias.size() != C)
                    throw FormatError("logistic weight shape mismatch");
                m.params = std::move(lm);
                break;
            }
            case Family::Knn: {
                KnnModel km{matrix_from_json(p.at("train")), p.at("labels").get<Labels>()};
                if (km.train.cols() != m.feature_dim || km.labels.size() != static_cast<std::size_t>(km.train.rows()) ||
                    km.labels.empty())
                    throw FormatError("knn training set shape mismatch");
                for (int l : km.labels)
                    if (l < 0 || l >= m.class_count) throw FormatError("knn label out of range");
                m.params = std::move(km);
                break;
            }
            case Family::Svm: {
                SvmModel sm;
                sm.kernel_gamma = p.at("kernel_gamma").get<double>();
                sm.vectors = matrix_from_json(p.at("vectors"));
                for (const auto& b : p.at("machines")) {
                    BinarySvm bs;
                    bs.support = b.at("support").get<std::vector<int>>();
                    bs.coef = b.at("coef").get<std::vector<double>>();
                    bs.bias = b.at("bias").get<double>();
                    if (bs.support.size() != bs.coef.size()) throw FormatError("svm support/coef mismatch");
                    for (int s : bs.support)
                        if (s < 0 || s >= sm.vectors.rows()) throw FormatError("svm support index out of range");
                    sm.machines.push_back(std::move(bs));
                }
                if (sm.machines.size() != C || (sm.vectors.rows() > 0 && sm.vectors.cols() != m.feature_dim))
                    throw FormatError("svm shape mismatch");
                m.params = std::move(sm);
                break;
            }
            case Family::DTree: {
                Tree t = tree_from_json(p.at("tree"), m.feature_dim);
                check_tree(t, C);
                m.params = std::move(t);
                break;
            }
            case Family::RForest: {
                ForestModel fm;
                for (const auto& t : p.at("trees")) {
                    fm.trees.push_back(tree_from_json(t, m.feature_dim));
                    check_tree(fm.trees.back(), C);
                }
                if (fm.trees.empty()) throw FormatError("forest without trees");
                fm.oob_accuracy = p.value("oob_accuracy", 0.0);
                fm.importances = p.value("importances", std::vector<double>{});
                m.params = std::move(fm);
                break;
            }
            case Family::Gbdt: {
                GbdtModel gm;
                gm.base_score = p.at("base_score").get<std::vector<double>>();
                if (gm.base_score.size() != C) throw FormatError("gbdt base score size mismatch");
                for (const auto& r : p.at("rounds")) {
                    std::vector<Tree> trees;
                    for (const auto& t : r) {
                        trees.push_back(tree_from_json(t, m.feature_dim));
                        check_tree(trees.back(), 1);
                    }
                    if (trees.size() != C) throw FormatError("gbdt round size mismatch");
                    gm.rounds.push_back(std::move(trees));
                }
                m.params = std::move(gm);
                break;
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    }
}

std::string TrainedModel::serialize() const { return to_json().dump(); }

TrainedModel TrainedModel::deserialize(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

}  // namespace wastebench
