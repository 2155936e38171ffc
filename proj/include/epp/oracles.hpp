#ifndef EPP_ORACLES_HPP
#define EPP_ORACLES_HPP

#include <vector>

#include "epp/distribution.hpp"
#include "epp/ehmm.hpp"
#include "epp/engine.hpp"
#include "epp/mixing.hpp"
#include "epp/partition.hpp"
#include "epp/prediction_table.hpp"

namespace epp {

// Brute-force counterparts of the online algorithms, computed in log space by
// direct enumeration.  These are deliberately independent of the engine's
// incremental bookkeeping so the two sides can certify each other.

double log_sum_exp(const std::vector<double>& values);

// Likelihood a single cell contributes when the run is restricted to it:
// starting from `seed` (the posterior as stored entering round seed_round),
// the chain is scored at the cell's rounds only.  Under freeze the state
// takes one transition step between consecutive cell elements and none
// elsewhere; under sleep it takes one step every round from seed_round on.
// Returns -inf when the cell has zero likelihood.
double log_cell_likelihood_seeded(const Ehmm& model, const Distribution& seed, int seed_round,
                                  const std::vector<int>& cell, Variant variant,
                                  const PredictionTable& preds,
                                  const std::vector<int>& outcomes);

// Same, seeded at the initial state distribution entering round 1.
double log_cell_likelihood(const Ehmm& model, const std::vector<int>& cell, Variant variant,
                           const PredictionTable& preds, const std::vector<int>& outcomes);

// Product over the partition's cells.
double log_partition_likelihood(const Ehmm& model, const Partition& partition, Variant variant,
                                const PredictionTable& preds, const std::vector<int>& outcomes);

// Predictive distribution at each cell element (before conditioning on it),
// following the same cell-restricted dynamics.
std::vector<std::vector<double>> cell_predictives(const Ehmm& model, const std::vector<int>& cell,
                                                  Variant variant, const PredictionTable& preds,
                                                  const std::vector<int>& outcomes);

struct PartitionRow {
    std::vector<int> prev;
    double prior;          // scheme mass of the partition
    double log_likelihood; // -inf allowed
};

// One row per partition of 1..T (cell likelihoods memoized across rows).
std::vector<PartitionRow> partition_report(const Ehmm& model, const MixingScheme& scheme,
                                           Variant variant, const PredictionTable& preds,
                                           const std::vector<int>& outcomes);

// ln sum_P prior(P) * likelihood(P) over all partitions.
double log_partition_mixture(const Ehmm& model, const MixingScheme& scheme, Variant variant,
                             const PredictionTable& preds, const std::vector<int>& outcomes);

// Model-free analogues over a bare expert set: a cell's likelihood is the
// prior mixture of each expert's product over the cell, with predictions
// looked up at the original rounds.
double log_bayes_cell(const std::vector<double>& prior, const PredictionTable& preds,
                      const std::vector<int>& cell, const std::vector<int>& outcomes);
double log_bayes_partition(const std::vector<double>& prior, const PredictionTable& preds,
                           const Partition& partition, const std::vector<int>& outcomes);
std::vector<PartitionRow> bayes_partition_report(const std::vector<double>& prior,
                                                 const MixingScheme& scheme,
                                                 const PredictionTable& preds,
                                                 const std::vector<int>& outcomes);
double log_bayes_partition_mixture(const std::vector<double>& prior, const MixingScheme& scheme,
                                   const PredictionTable& preds,
                                   const std::vector<int>& outcomes);

// Comparator cost of following one expert per cell, plus the complexity
// price of the partition itself (log-uniform expert charge per cell).
struct ComparatorBound {
    double loss;    // sum over cells of the assigned expert's log loss
    double penalty; // -ln prior(partition) + |cells| * ln(num experts)
    double total() const { return loss + penalty; }
};
ComparatorBound comparator_bound(const MixingScheme& scheme, const Partition& partition,
                                 const std::vector<int>& assignment,
                                 const PredictionTable& preds, const std::vector<int>& outcomes);
// Loss-minimizing expert per cell (lowest index wins ties).
std::vector<int> best_assignment(const Partition& partition, const PredictionTable& preds,
                                 const std::vector<int>& outcomes);

// Every length-T state path of a finite model as one meta-expert: prior mass
// of the path and its per-round outcome predictions.  Guarded at 10^5 paths.
struct MetaExperts {
    std::vector<std::string> names;
    std::vector<double> prior;
    PredictionTable preds;
};
MetaExperts path_meta_experts(const Ehmm& model, const PredictionTable& preds, int horizon);

// Stress instance: T experts on a binary alphabet, the realized outcome is
// always "1", and expert i is confident exactly at round i (1-eps there, eps
// elsewhere).  Mass then concentrates on the finest partition.
struct AdversarialInstance {
    std::vector<std::string> experts;
    std::vector<double> prior; // uniform
    PredictionTable preds;
    std::vector<int> outcomes;
};
AdversarialInstance adversarial_instance(int horizon, double eps);

} // namespace epp

#endif
