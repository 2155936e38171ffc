#ifndef EPP_PREDICTION_TABLE_HPP
#define EPP_PREDICTION_TABLE_HPP

#include <string>
#include <vector>

namespace epp {

// Dense horizon x experts x outcomes table of expert predictions p^e_t(x).
// Rounds are 1-based throughout (round t lives at index t-1); experts and
// outcomes are addressed by 0-based index into the name lists.
class PredictionTable {
public:
    PredictionTable() = default;
    PredictionTable(int horizon, std::vector<std::string> experts,
                    std::vector<std::string> outcomes);

    int horizon() const { return horizon_; }
    int num_experts() const { return static_cast<int>(experts_.size()); }
    int num_outcomes() const { return static_cast<int>(outcomes_.size()); }
    const std::vector<std::string>& experts() const { return experts_; }
    const std::vector<std::string>& outcomes() const { return outcomes_; }
    int expert_index(const std::string& name) const;   // -1 when absent
    int outcome_index(const std::string& token) const; // -1 when absent

    double prob(int t, int expert, int outcome) const {
        return probs_[offset(t, expert, outcome)];
    }
    void set_prob(int t, int expert, int outcome, double p) {
        probs_[offset(t, expert, outcome)] = p;
    }

    // Requires every (t, expert) row to sum to 1 within tol and all cells to
    // be nonnegative; throws InvalidInputError otherwise.
    void validate(double tol = 1e-9) const;

    // Returns a copy where each cell is max(p, eps) renormalized per row.
    PredictionTable with_floor(double eps) const;

private:
    std::size_t offset(int t, int expert, int outcome) const {
        return (static_cast<std::size_t>(t - 1) * experts_.size() + expert) * outcomes_.size() +
               outcome;
    }

    int horizon_ = 0;
    std::vector<std::string> experts_;
    std::vector<std::string> outcomes_;
    std::vector<double> probs_;
};

// Resolves a model's expert names against a table's columns once, so runs can
// look predictions up by the model's expert index.  Tables may carry extra
// experts; a missing one is an error.
class PredView {
public:
    PredView() = default;
    PredView(const PredictionTable& table, const std::vector<std::string>& expert_names);

    double prob(int t, int model_expert, int outcome) const {
        return table_->prob(t, map_[model_expert], outcome);
    }
    int horizon() const { return table_->horizon(); }
    int num_outcomes() const { return table_->num_outcomes(); }
    const PredictionTable& table() const { return *table_; }

private:
    const PredictionTable* table_ = nullptr;
    std::vector<int> map_;
};

} // namespace epp

#endif
