#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wastebench/classifiers.hpp"

namespace wastebench {

enum class SelectionMethod { EmbeddedRf, WrapperForward };

struct SelectionResult {
    SelectionMethod method = SelectionMethod::EmbeddedRf;
    std::vector<std::size_t> ranked_indices;
    /// Embedded: one score per feature. Wrapper: best validation accuracy per round.
    std::vector<double> scores;
    std::size_t k = 0;

    nlohmann::json to_json() const;
    static SelectionResult from_json(const nlohmann::json& j);
    bool operator==(const SelectionResult&) const = default;
};

/// Ranks features by mean Gini impurity decrease over a random forest.
/// Ties resolve to the lower index.
SelectionResult rank_embedded_rf(const Matrix& X, const Labels& y, int trees = 200, std::uint64_t seed = 0);

/// First k ranked indices, sorted ascending.
std::vector<std::size_t> select_top_k(const SelectionResult& res, std::size_t k);

/// Greedy forward selection on validation accuracy. Stops at max_k or after
/// `patience` rounds without improvement. `k` of the result is the length of
/// the earliest prefix reaching the best accuracy.
SelectionResult wrapper_forward(const Matrix& X_train, const Labels& y_train, const Matrix& X_val,
                                const Labels& y_val, const ClassifierSpec& base, std::size_t max_k,
                                std::size_t patience = 5, std::uint64_t seed = 0);

}  // namespace wastebench
