#include "epp/prediction_table.hpp"

#include <algorithm>
#include <cmath>

#include "epp/errors.hpp"

namespace epp {

PredictionTable::PredictionTable(int horizon, std::vector<std::string> experts,
                                 std::vector<std::string> outcomes)
    : horizon_(horizon), experts_(std::move(experts)), outcomes_(std::move(outcomes)) {
    if (horizon_ < 0) throw InvalidInputError("negative horizon");
    if (experts_.empty()) throw InvalidInputError("prediction table needs at least one expert");
    if (outcomes_.empty()) throw InvalidInputError("prediction table needs at least one outcome");
    probs_.assign(static_cast<std::size_t>(horizon_) * experts_.size() * outcomes_.size(), 0.0);
}

static int find_name(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

int PredictionTable::expert_index(const std::string& name) const {
    return find_name(experts_, name);
}

int PredictionTable::outcome_index(const std::string& token) const {
    return find_name(outcomes_, token);
}

void PredictionTable::validate(double tol) const {
    for (int t = 1; t <= horizon_; ++t) {
        for (int e = 0; e < num_experts(); ++e) {
            double total = 0;
            for (int x = 0; x < num_outcomes(); ++x) {
                double p = prob(t, e, x);
                if (p < 0 || !std::isfinite(p))
                    throw InvalidInputError("bad probability for expert " + experts_[e] +
                                            " at round " + std::to_string(t));
                total += p;
            }
            if (std::abs(total - 1.0) > tol)
                throw InvalidInputError("predictions of expert " + experts_[e] + " at round " +
                                        std::to_string(t) + " sum to " + std::to_string(total));
        }
    }
}

PredictionTable PredictionTable::with_floor(double eps) const {
    if (eps < 0) throw InvalidInputError("negative probability floor");
    PredictionTable out = *this;
    for (int t = 1; t <= horizon_; ++t) {
        for (int e = 0; e < num_experts(); ++e) {
            double total = 0;
            for (int x = 0; x < num_outcomes(); ++x)
                total += std::max(prob(t, e, x), eps);
            for (int x = 0; x < num_outcomes(); ++x)
                out.set_prob(t, e, x, std::max(prob(t, e, x), eps) / total);
        }
    }
    return out;
}

PredView::PredView(const PredictionTable& table, const std::vector<std::string>& expert_names)
    : table_(&table) {
    map_.reserve(expert_names.size());
    for (const auto& name : expert_names) {
        int idx = table.expert_index(name);
        if (idx < 0)
            throw InvalidInputError("prediction table has no expert named '" + name + "'");
        map_.push_back(idx);
    }
}

} // namespace epp
