#pragma once

#include "wastebench/classifiers.hpp"

namespace wastebench::detail {

LogisticModel fit_logistic(const LogisticParams& p, const Matrix& X, const Labels& y, int class_count);
std::vector<double> logistic_scores(const LogisticModel& m, std::span<const double> x);

std::vector<double> knn_scores(const KnnModel& m, int k, int class_count, std::span<const double> x);

SvmModel fit_svm(const SvmParams& p, const Matrix& X, const Labels& y, int class_count);
std::vector<double> svm_scores(const SvmModel& m, std::span<const double> x);

std::vector<double> tree_scores(const Tree& t, int class_count, std::span<const double> x);
std::vector<double> forest_scores(const ForestModel& m, int class_count, std::span<const double> x);

GbdtModel fit_gbdt(const GbdtParams& p, const Matrix& X, const Labels& y, int class_count);
std::vector<double> gbdt_scores(const GbdtModel& m, std::span<const double> x);

/// In-place numerically stable softmax.
void softmax(std::span<double> z);

}  // namespace wastebench::detail
