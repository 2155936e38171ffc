#ifndef EPP_EHMM_HPP
#define EPP_EHMM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epp/distribution.hpp"
#include "epp/prediction_table.hpp"

namespace epp {

// Hidden Markov model over experts: states carry a transition law `trans` and
// a state->expert distribution `prod`; experts produce the actual outcome
// predictions (supplied separately as a PredictionTable).  State spaces may be
// countably infinite, so states are opaque int64 ids and all rows are sparse.
class Ehmm {
public:
    virtual ~Ehmm() = default;

    const std::vector<std::string>& experts() const { return experts_; }
    int num_experts() const { return static_cast<int>(experts_.size()); }
    int expert_index(const std::string& name) const;

    virtual Distribution init() const = 0;
    virtual Distribution trans(StateId q) const = 0;
    // Distribution over expert indices (0 .. num_experts-1).
    virtual Distribution prod(StateId q) const = 0;
    virtual std::string state_name(StateId q) const = 0;
    // Number of states when finite and materialized; nullopt for lazy models.
    virtual std::optional<std::int64_t> state_count() const { return std::nullopt; }

protected:
    std::vector<std::string> experts_;
};

// Finite, fully materialized model; states are 0..n-1.
class TabularEhmm : public Ehmm {
public:
    TabularEhmm(std::vector<std::string> state_names, std::vector<std::string> expert_names,
                Distribution init, std::vector<Distribution> trans_rows,
                std::vector<Distribution> prod_rows);

    Distribution init() const override { return init_; }
    Distribution trans(StateId q) const override;
    Distribution prod(StateId q) const override;
    std::string state_name(StateId q) const override;
    std::optional<std::int64_t> state_count() const override {
        return static_cast<std::int64_t>(state_names_.size());
    }
    int state_index(const std::string& name) const; // -1 when absent
    const std::vector<std::string>& state_names() const { return state_names_; }

private:
    void check_state(StateId q) const;

    std::vector<std::string> state_names_;
    Distribution init_;
    std::vector<Distribution> trans_rows_;
    std::vector<Distribution> prod_rows_;
};

// One frozen state per expert: no dynamics, prior = initial weights.  Running
// the forward algorithm on this model is exact Bayesian mixture over experts.
std::shared_ptr<TabularEhmm> bayes_ehmm(const std::vector<std::string>& expert_names,
                                        const std::vector<double>& prior);

// Classical HMM with emission distributions; converts to an EHMM whose experts
// are the hidden states (expert q always predicts emit(q, .)).
struct HmmSpec {
    std::vector<std::string> states;
    std::vector<std::string> outcomes;
    std::vector<double> init;
    std::vector<std::vector<double>> trans;
    std::vector<std::vector<double>> emit;

    void validate() const;
    std::shared_ptr<TabularEhmm> to_ehmm() const;
    // Constant-in-time table: p^q_t(x) = emit(q, x).
    PredictionTable prediction_table(int horizon) const;
};

// Three-state payout machine used as a demo HMM (cold / hot / jackpot).
HmmSpec slot_machine();

// Binary-sequence model whose marginal is the add-one (Laplace) estimator:
// states are (count of 0s, count of 1s, bit predicted now) and the two experts
// "e0"/"e1" deterministically predict their bit.  Layer t has exactly 2t
// states.  State ids pack the triple into an int64.
class LaplaceEhmm : public Ehmm {
public:
    LaplaceEhmm();
    Distribution init() const override;
    Distribution trans(StateId q) const override;
    Distribution prod(StateId q) const override;
    std::string state_name(StateId q) const override;

    static StateId encode(std::int64_t n0, std::int64_t n1, int bit);
    static void decode(StateId q, std::int64_t& n0, std::int64_t& n1, int& bit);
    // Deterministic expert predictions over outcomes {"0","1"}.
    static PredictionTable prediction_table(int horizon);
};

// Prior-weighted disjoint union of models sharing one expert set: running
// inference on the mixture is Bayes over the component models.
std::shared_ptr<Ehmm> bayes_mixture(std::vector<std::shared_ptr<const Ehmm>> components,
                                    std::vector<double> prior);

// Splits state q into two copies carrying fractions w and 1-w of every
// in-flow; the result unrolls to the same process (used to probe invariance).
std::shared_ptr<TabularEhmm> split_state(const TabularEhmm& model, int state, double w);

// States reachable at layer t (init = layer 1) plus cumulative reach and
// transition-row sizes, for cost accounting.
struct LayerInfo {
    std::vector<StateId> exact;
    std::vector<StateId> cumulative;
    std::int64_t exact_transitions = 0;
    std::int64_t cumulative_transitions = 0;
};
LayerInfo layers(const Ehmm& model, int t);

// True when both models induce the same joint law over expert sequences of
// length <= horizon (probabilities compared within tol).  Enumerates expert
// sequences; guarded at 10^6 sequences per level.
bool equivalent(const Ehmm& a, const Ehmm& b, int horizon, double tol = 1e-9);

// --- shared inference steps ---

// Sum_q mu(q) * trans(q).
Distribution evolve(const Distribution& mu, const Ehmm& model);

// Per-state outcome weight Sum_e prod(q)(e) * p^e_t(x).
double emission_weight(const Ehmm& model, StateId q, const PredView& preds, int t, int x);

// Dense expert weights w(e) = Sum_q mu(q) * prod(q)(e).
std::vector<double> expert_weights(const Distribution& mu, const Ehmm& model);

// Predictive distribution over outcomes given state weights mu at round t.
std::vector<double> predictive_from_weights(const std::vector<double>& weights,
                                            const PredView& preds, int t);

// mu(q) * emission_weight(q, x), pruned, NOT normalized; total is the
// predictive probability of x.  Throws ZeroProbabilityError when total <= 0.
Distribution condition_on_outcome(const Distribution& mu, const Ehmm& model,
                                  const PredView& preds, int t, int x);

} // namespace epp

#endif
