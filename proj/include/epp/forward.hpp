#ifndef EPP_FORWARD_HPP
#define EPP_FORWARD_HPP

#include <memory>
#include <vector>

#include "epp/distribution.hpp"
#include "epp/ehmm.hpp"
#include "epp/prediction_table.hpp"
#include "epp/trace.hpp"

namespace epp {

struct Prediction {
    std::vector<double> outcome_probs;  // indexed like the table's alphabet
    std::vector<double> expert_weights; // indexed like the model's expert list
};

// Standard forward (filtering) recursion over an EHMM: posterior over states,
// condition on the outcome, evolve one transition step.  Can be seeded at an
// arbitrary distribution and round, which the partition oracles rely on.
class ForwardState {
public:
    explicit ForwardState(std::shared_ptr<const Ehmm> model);
    ForwardState(std::shared_ptr<const Ehmm> model, Distribution seed, int start_round);

    int round() const { return t_; }
    const Distribution& posterior() const { return posterior_; }
    double cumulative_log_loss() const { return cum_loss_; }
    double last_drift() const { return drift_; }

    // Expert weights before seeing this round's predictions.
    std::vector<double> weights() const;
    Prediction predict(const PredView& preds) const;
    // Observes the outcome of the current round and advances one transition.
    // Throws ZeroProbabilityError (state unchanged) when the predictive
    // probability of `outcome` is zero.
    double update(const PredView& preds, int outcome); // returns the round loss

private:
    std::shared_ptr<const Ehmm> model_;
    Distribution posterior_;
    int t_;
    double cum_loss_ = 0;
    double drift_ = 0;
};

// Runs the forward recursion over the whole outcome sequence.
RunTrace forward_run(std::shared_ptr<const Ehmm> model, const PredictionTable& preds,
                     const std::vector<int>& outcomes);

} // namespace epp

#endif
