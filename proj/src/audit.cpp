#include "wastebench/audit.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"
#include "wastebench/random.hpp"

namespace wastebench {

std::vector<int> stratified_folds(const Labels& y, int k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw ConfigError("audit needs at least 2 folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    std::vector<int> fold(y.size(), 0);
    for (auto& [cls, rows] : by_class) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(std::span<std::size_t>(rows));
        for (std::size_t k = 0; k < rows.size(); ++k) fold[rows[k]] = static_cast<int>(k % static_cast<std::size_t>(k_folds));
    }
    return fold;
}

std::vector<AuditFlag> audit_labels(const Matrix& X, const Labels& y, int k_folds, const ClassifierSpec& spec,
                                    std::uint64_t seed) {
    if (k_folds < 2) throw ConfigError("audit needs at least 2 folds");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ValidationError("feature rows and labels differ in count");
    if (y.size() < static_cast<std::size_t>(k_folds)) throw ConfigError("fewer samples than folds");
    const std::set<int> classes(y.begin(), y.end());
    const int class_count = *classes.rbegin() + 1;
    const auto fold = stratified_folds(y, k_folds, seed);

    std::vector<std::vector<AuditFlag>> found(static_cast<std::size_t>(k_folds));
    parallel_for(found.size(), [&](std::size_t f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == static_cast<int>(f) ? te : tr).push_back(i);
        const Labels ytr = select_rows(y, tr);
        const std::set<int> seen(ytr.begin(), ytr.end());
        if (seen != classes)
            throw StratificationError("training fold " + std::to_string(f) + " lacks a class");
        const TrainedModel m = train(spec, select_rows(X, tr), ytr, derive_seed(seed, f), class_count);
        for (std::size_t i : te) {
            const auto s = m.score(std::span<const double>(X.row(static_cast<Eigen::Index>(i)).data(),
                                                           static_cast<std::size_t>(X.cols())));
            const int pred = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
            if (pred != y[i]) found[f].push_back({i, y[i], pred, s[static_cast<std::size_t>(pred)]});
        }
    });
    std::vector<AuditFlag> flags;
    for (auto& v : found) flags.insert(flags.end(), v.begin(), v.end());
    std::sort(flags.begin(), flags.end(), [](const AuditFlag& a, const AuditFlag& b) {
        return a.confidence != b.confidence ? a.confidence > b.confidence : a.index < b.index;
    });
    return flags;
}

}  // namespace wastebench
