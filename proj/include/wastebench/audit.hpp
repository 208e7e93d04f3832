#pragma once

#include <cstdint>
#include <vector>

#include "wastebench/classifiers.hpp"

namespace wastebench {

struct AuditFlag {
    std::size_t index = 0;  // row of the audited matrix
    int stored_label = 0;
    int predicted = 0;
    double confidence = 0.0;  // score of the predicted class
};

/// Cross-validated label audit: flags rows whose out-of-fold prediction
/// disagrees with the stored label, by descending confidence (ties: lower row).
/// Folds are stratified; a class missing from any training fold is a
/// StratificationError.
std::vector<AuditFlag> audit_labels(const Matrix& X, const Labels& y, int k_folds, const ClassifierSpec& spec,
                                    std::uint64_t seed = 0);

/// Stratified fold assignment (fold id per row).
std::vector<int> stratified_folds(const Labels& y, int k_folds, std::uint64_t seed);

}  // namespace wastebench
