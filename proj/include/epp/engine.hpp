#ifndef EPP_ENGINE_HPP
#define EPP_ENGINE_HPP

#include <memory>
#include <vector>

#include "epp/distribution.hpp"
#include "epp/ehmm.hpp"
#include "epp/forward.hpp"
#include "epp/mixing.hpp"
#include "epp/prediction_table.hpp"
#include "epp/trace.hpp"

namespace epp {

// Whether past posteriors stay frozen as recorded (freeze) or keep evolving
// one transition step per round while stored (sleep).
enum class Variant { freeze, sleep };

Variant parse_variant(const std::string& text);
std::string variant_name(Variant variant);

struct EppOptions {
    // Use the store-everything path even for schemes with a cheaper layout.
    bool force_naive = false;
};

// Online mixture over past posteriors: each round mixes the stored posteriors
// with the scheme's look-back weights, predicts through the model's experts,
// conditions on the realized outcome, evolves one step, and stores the result
// as the next posterior.  Storage layout per scheme:
//   - uniform-past: newest posterior + running sum of all stored ones,
//   - decaying-past-approx: newest + dyadic block sums (binary counter),
//   - everything else (or force_naive): the full list v_1..v_t.
class EppState {
public:
    EppState(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant,
             EppOptions options = {});

    int round() const { return t_; }
    Variant variant() const { return variant_; }
    const MixingScheme& scheme() const { return scheme_; }
    double cumulative_log_loss() const { return cum_loss_; }
    double last_drift() const { return drift_; }

    // Mixed state distribution the next prediction is based on.
    const Distribution& configuration() const { return config_; }
    std::vector<double> weights() const; // expert weights of the configuration
    Prediction predict(const PredView& preds) const;
    // Observes the realized outcome, advancing to the next round; returns the
    // round loss.  Throws ZeroProbabilityError (state unchanged) when the
    // predictive probability of `outcome` is zero.
    double update(const PredView& preds, int outcome);

    // Stored posteriors as currently held (sleep keeps them evolving); only
    // available on the naive path.
    const std::vector<Distribution>& stored_posteriors() const;
    // Number of block sums currently held (block path only).
    int block_count() const;

private:
    enum class Layout { naive, uniform_sum, blocks };

    void refresh_configuration();

    std::shared_ptr<const Ehmm> model_;
    MixingScheme scheme_;
    Variant variant_;
    Layout layout_;
    int t_ = 1;
    double cum_loss_ = 0;
    double drift_ = 0;
    Distribution config_;

    // naive
    std::vector<Distribution> past_;
    // uniform_sum: newest posterior and sum of all stored posteriors
    // blocks: newest posterior + per-block sums, oldest block first
    Distribution newest_;
    Distribution sum_;
    struct BlockSum {
        int width;
        Distribution sum;
    };
    std::vector<BlockSum> blocks_;
    DecayPrefix prefix_;
};

RunTrace epp_run(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant,
                 const PredictionTable& preds, const std::vector<int>& outcomes,
                 EppOptions options = {});

// Mixture over past posteriors applied directly to an expert set with no
// hidden dynamics (the model-free reference algorithm).  Always stores the
// full posterior list and mixes with dense scheme weights.
class MppState {
public:
    MppState(std::vector<std::string> expert_names, std::vector<double> prior,
             MixingScheme scheme);

    int round() const { return t_; }
    double cumulative_log_loss() const { return cum_loss_; }
    const std::vector<std::string>& experts() const { return experts_; }
    std::vector<double> weights() const; // mixture over experts this round
    Prediction predict(const PredView& preds) const;
    double update(const PredView& preds, int outcome);

private:
    std::vector<std::string> experts_;
    MixingScheme scheme_;
    std::vector<std::vector<double>> past_; // posterior entering round j+1
    int t_ = 1;
    double cum_loss_ = 0;
};

RunTrace mpp_run(std::vector<std::string> expert_names, std::vector<double> prior,
                 MixingScheme scheme, const PredictionTable& preds,
                 const std::vector<int>& outcomes);

} // namespace epp

#endif
