#ifndef EPP_LOSSES_HPP
#define EPP_LOSSES_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "epp/engine.hpp"
#include "epp/prediction_table.hpp"

namespace epp {

// An action is what the protected algorithm actually plays: a full outcome
// distribution for log loss, a single number in [0,1] for the scalar losses
// on the binary alphabet.
using Action = std::vector<double>;

// A loss function together with its mixability constant eta: mixing expert
// actions with exp(-eta * loss) weights always admits a single substitute
// action at least as good at every outcome.
class MixableLoss {
public:
    virtual ~MixableLoss() = default;
    virtual std::string name() const = 0;
    virtual double eta() const = 0;
    virtual double loss(const Action& action, int outcome) const = 0;
    // Picks one action whose loss is bounded by the eta-mixture of the given
    // actions under `weights` simultaneously for every outcome.
    virtual Action substitute(const std::vector<double>& weights,
                              const std::vector<Action>& actions) const = 0;
};

// name in {log, square, hellinger}.
std::unique_ptr<MixableLoss> make_loss(const std::string& name);

// -(1/eta) ln sum_e w_e exp(-eta * loss(a_e, x)); weights are normalized
// defensively.
double mix_bound(const MixableLoss& loss, const std::vector<double>& weights,
                 const std::vector<Action>& actions, int outcome);

// Synthetic per-expert outcome distributions that make a log-loss algorithm
// reweight exactly as the eta-discounted true losses dictate: the realized
// outcome gets exp(-eta * loss(a_e, x)), the rest is spread evenly.
std::vector<std::vector<double>> fake_predictions(const MixableLoss& loss,
                                                  const std::vector<Action>& actions, int outcome,
                                                  int num_outcomes);

// A log-loss algorithm that exposes its expert weights each round and can be
// stepped on a prediction table filled in as the game unfolds.
class WeightedBase {
public:
    virtual ~WeightedBase() = default;
    virtual std::vector<double> weights() const = 0;
    virtual void observe(int outcome) = 0;
    virtual double cumulative_log_loss() const = 0;
};

// Factory receives the (initially blank) fake table the driver fills row by
// row; the base must read predictions from it.
using BaseFactory = std::function<std::unique_ptr<WeightedBase>(const PredictionTable&)>;

BaseFactory forward_base(std::shared_ptr<const Ehmm> model);
BaseFactory epp_base(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant);
BaseFactory mpp_base(std::vector<std::string> expert_names, std::vector<double> prior,
                     MixingScheme scheme);

struct DerivedRow {
    int round = 0;
    int outcome = 0;
    Action action;
    double loss = 0;
    double cum_loss = 0;
    double bound = 0; // this round's mixture bound; loss <= bound certifies the step
};

struct DerivedTrace {
    std::vector<DerivedRow> rows;
    double cumulative_loss() const { return rows.empty() ? 0.0 : rows.back().cum_loss; }
};

// Lifts the log-loss base to an arbitrary mixable loss: each round the base's
// weights pick a substitute action over actions[t-1] (one per expert), the
// action's loss is suffered, and the base is advanced on fake predictions.
DerivedTrace derived_run(const BaseFactory& factory, const MixableLoss& loss,
                         const std::vector<std::vector<Action>>& actions,
                         const std::vector<int>& outcomes,
                         const std::vector<std::string>& expert_names,
                         const std::vector<std::string>& outcome_names);

} // namespace epp

#endif
