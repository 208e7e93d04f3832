#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace wastebench {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

enum class Family { Logistic, Knn, Svm, DTree, RForest, Gbdt };
enum class LossKind { CrossEntropy, Focal };
enum class Growth { LevelWise, LeafWise };

std::string to_string(Family f);
Family parse_family(const std::string& s);

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct LogisticParams {
    LossKind loss = LossKind::CrossEntropy;
    double gamma = 2.0;  // focusing parameter
    double alpha = 0.25; // class weight, shared by all classes
    double l2 = 1e-4;
    int max_iter = 2000;
    double grad_tol = 1e-6;
};

struct KnnParams {
    int k = 5;
};

struct SvmParams {
    double C = 1.0;
    /// RBF width; <= 0 selects 1 / (d * variance of the scaled training data).
    double kernel_gamma = 0.0;
    double tol = 1e-3;
    std::int64_t max_iter = 1'000'000;
};

struct TreeParams {
    int max_depth = 32;
    int min_leaf = 1;
};

struct ForestParams {
    int trees = 200;
    /// Features tried per split; <= 0 selects floor(sqrt(d)).
    int max_features = 0;
    int max_depth = kUnlimitedDepth;
    int min_leaf = 1;
};

struct GbdtParams {
    Growth growth = Growth::LevelWise;
    double learning_rate = 0.1;
    int rounds = 200;
    int max_bins = 256;
    int max_depth = 6;    // level-wise depth
    int max_leaves = 31;  // leaf-wise leaf budget
    double lambda = 1.0;
    double min_child_weight = 1e-3;
};

/// Family tag plus the hyperparameter record of every family; only the
/// record matching `family` is used.
struct ClassifierSpec {
    Family family = Family::Logistic;
    LogisticParams logistic;
    KnnParams knn;
    SvmParams svm;
    TreeParams dtree;
    ForestParams rforest;
    GbdtParams gbdt;

    /// Throws ConfigError on an invalid hyperparameter.
    void validate() const;
    std::string label() const;
};

nlohmann::json spec_to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(const nlohmann::json& j);

/// -alpha * (1 - p)^gamma * ln(p), p clamped to >= 1e-12.
double focal_loss(double p_true, double gamma, double alpha);

struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;  // empty scaler = identity

    bool identity() const { return mean.empty(); }
    static Scaler fit(const Matrix& X);
    Matrix apply(const Matrix& X) const;
    void apply_inplace(std::span<double> row) const;
};

// Family parameter records.

struct LogisticModel {
    Matrix weights;  // class_count x d
    Vector bias;
    std::vector<double> loss_history;  // objective per iteration, not serialized
    int iterations = 0;
};

struct KnnModel {
    Matrix train;  // scaled
    Labels labels;
};

struct BinarySvm {
    std::vector<int> support;     // indices into SvmModel::vectors rows
    std::vector<double> coef;     // alpha_i * y_i
    double bias = 0.0;
};

struct SvmModel {
    double kernel_gamma = 0.0;
    Matrix vectors;              // union of support vectors (scaled)
    std::vector<BinarySvm> machines;  // one per class
};

struct TreeNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> value;  // class distribution (trees) or leaf score (gbdt, size 1)
};

struct Tree {
    std::vector<TreeNode> nodes;
    const TreeNode& leaf_for(std::span<const double> x) const;
};

struct ForestModel {
    std::vector<Tree> trees;
    double oob_accuracy = 0.0;
    std::vector<double> importances;  // mean impurity decrease per feature
};

struct GbdtModel {
    std::vector<double> base_score;       // per class
    std::vector<std::vector<Tree>> rounds;  // rounds[r][class]
    std::vector<double> loss_history;       // training loss after each round, not serialized
};

using ModelParams = std::variant<LogisticModel, KnnModel, SvmModel, Tree, ForestModel, GbdtModel>;

class TrainedModel {
public:
    ClassifierSpec spec;
    int class_count = 0;
    int feature_dim = 0;
    Scaler scaler;
    ModelParams params;

    /// Per-class scores summing to 1. Throws ValidationError on dimension mismatch.
    std::vector<double> score(std::span<const double> x) const;
    /// argmax of score; ties resolve to the lowest class id.
    int predict(std::span<const double> x) const;

    Labels predict_all(const Matrix& X) const;
    Matrix score_all(const Matrix& X) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);
    std::string serialize() const;
    static TrainedModel deserialize(const std::string& bytes);
};

/// Trains one model. Throws TrainingError on a single class or solver
/// failure and ValidationError on non-finite features or bad labels.
TrainedModel train(const ClassifierSpec& spec, const Matrix& X, const Labels& y, std::uint64_t seed,
                   int class_count = 0);

// Exposed internals, used by selection and tests.

/// Objective value and gradient of the regularized multinomial loss at
/// (W, b). `X` must already be scaled.
double logistic_objective(const LogisticParams& p, const Matrix& X, const Labels& y, const Matrix& W,
                          const Vector& b, Matrix* grad_W, Vector* grad_b);

struct TreeFit {
    Tree tree;
    std::vector<double> importance;  // impurity decrease per feature (count-weighted / n)
};

/// CART with Gini impurity on rows `rows` of X (duplicates allowed for bootstrap).
/// max_features <= 0 considers every feature.
TreeFit fit_cart(const Matrix& X, const Labels& y, int class_count, std::span<const int> rows, int max_depth,
                 int min_leaf, int max_features, std::uint64_t seed);

ForestModel fit_forest(const ForestParams& p, const Matrix& X, const Labels& y, int class_count,
                       std::uint64_t seed);

/// Binary SMO result on the full kernel, exposed for KKT checks.
struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
    std::int64_t iterations = 0;
};
SmoResult solve_smo(const Matrix& K, const std::vector<double>& y, double C, double tol, std::int64_t max_iter);
Matrix rbf_kernel(const Matrix& A, const Matrix& B, double gamma);

/// Mean softmax cross-entropy of the GBDT raw scores; exposed for monotonicity checks.
double softmax_loss(const Matrix& raw, const Labels& y);

/// Accuracy of predictions, in [0, 1].
double accuracy(const Labels& truth, const Labels& pred);

/// Selects columns of X in the given order.
Matrix select_columns(const Matrix& X, std::span<const std::size_t> columns);
Matrix select_rows(const Matrix& X, std::span<const std::size_t> rows);
Labels select_rows(const Labels& y, std::span<const std::size_t> rows);

}  // namespace wastebench
