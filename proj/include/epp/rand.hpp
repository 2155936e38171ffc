#ifndef EPP_RAND_HPP
#define EPP_RAND_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "epp/ehmm.hpp"
#include "epp/prediction_table.hpp"

namespace epp {

// Deterministic generator: identical seeds give identical streams on every
// platform, so uniforms are derived from raw engine words rather than the
// distribution adapters of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform() { // [0, 1), 53-bit resolution
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    int uniform_int(int n); // 0..n-1, unbiased
    // Random full-support probability vector (normalized exponentials).
    std::vector<double> simplex(int n);
    // Index sampled from (possibly unnormalized) nonnegative weights.
    int sample(const std::vector<double>& weights);

private:
    std::mt19937_64 engine_;
};

std::shared_ptr<TabularEhmm> random_tabular_ehmm(Rng& rng, int num_states, int num_experts);
PredictionTable random_prediction_table(Rng& rng, int horizon,
                                        const std::vector<std::string>& experts,
                                        const std::vector<std::string>& outcomes);
std::vector<int> random_outcomes(Rng& rng, int horizon, int num_outcomes);
// Samples an outcome sequence from the classical HMM.
std::vector<int> sample_hmm(const HmmSpec& spec, int horizon, Rng& rng);

std::vector<std::string> indexed_names(const std::string& prefix, int count);

} // namespace epp

#endif
