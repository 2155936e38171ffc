#include <doctest.h>

#include <cmath>
#include <vector>

#include "epp/ehmm.hpp"
#include "epp/errors.hpp"
#include "epp/forward.hpp"
#include "epp/rand.hpp"

using namespace epp;

namespace {

// Brute-force marginal of an outcome sequence under a classical HMM by
// summing over every hidden state path.
double hmm_marginal(const HmmSpec& spec, const std::vector<int>& outcomes) {
    std::size_t n = spec.states.size();
    double total = 0;
    std::vector<std::size_t> path(outcomes.size(), 0);
    while (true) {
        double mass = spec.init[path[0]] * spec.emit[path[0]][static_cast<std::size_t>(outcomes[0])];
        for (std::size_t i = 1; i < path.size(); ++i)
            mass *= spec.trans[path[i - 1]][path[i]] *
                    spec.emit[path[i]][static_cast<std::size_t>(outcomes[i])];
        total += mass;
        std::size_t i = 0;
        for (; i < path.size(); ++i) {
            if (++path[i] < n) break;
            path[i] = 0;
        }
        if (i == path.size()) break;
    }
    return total;
}

} // namespace

TEST_CASE("filtering loss equals the path-enumeration marginal") {
    HmmSpec spec = slot_machine();
    auto model = spec.to_ehmm();
    PredictionTable table = spec.prediction_table(5);
    // Warm-up zeros, a payout streak, the jackpot, then back to cold.
    std::vector<int> data = {0, 0, 1, 6, 0};
    RunTrace trace = forward_run(model, table, data);
    double direct = hmm_marginal(spec, data);
    CHECK(std::exp(-trace.cumulative_log_loss()) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("filtering on a random model matches path enumeration") {
    Rng rng(11);
    auto model = random_tabular_ehmm(rng, 3, 2);
    PredictionTable table = random_prediction_table(rng, 5, model->experts(), {"0", "1"});
    std::vector<int> data = random_outcomes(rng, 5, 2);

    // Expert-level enumeration: sum over state paths of prior * prod * preds.
    double total = 0;
    std::vector<StateId> path(data.size(), 0);
    PredView view(table, model->experts());
    while (true) {
        double mass = model->init().prob(path[0]);
        for (std::size_t i = 1; i < path.size(); ++i) mass *= model->trans(path[i - 1]).prob(path[i]);
        if (mass > 0) {
            for (std::size_t i = 0; i < path.size(); ++i)
                mass *= emission_weight(*model, path[i], view, static_cast<int>(i + 1), data[i]);
            total += mass;
        }
        std::size_t i = 0;
        for (; i < path.size(); ++i) {
            if (++path[i] < 3) break;
            path[i] = 0;
        }
        if (i == path.size()) break;
    }
    RunTrace trace = forward_run(model, table, data);
    CHECK(std::exp(-trace.cumulative_log_loss()) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("seeded filtering starts at the given round") {
    HmmSpec spec = slot_machine();
    auto model = spec.to_ehmm();
    PredictionTable table = spec.prediction_table(8);
    PredView view(table, model->experts());
    ForwardState state(model, Distribution::point_mass(1), 5); // hot at round 5
    CHECK(state.round() == 5);
    Prediction p = state.predict(view);
    CHECK(p.outcome_probs[1] == doctest::Approx(0.2)); // hot pays 1..5 uniformly
    CHECK(p.outcome_probs[0] == doctest::Approx(0.0));
}

TEST_CASE("zero-probability outcome leaves the filter untouched") {
    HmmSpec spec = slot_machine();
    auto model = spec.to_ehmm();
    PredictionTable table = spec.prediction_table(3);
    PredView view(table, model->experts());
    ForwardState state(model);
    int jackpot = table.outcome_index("10");
    CHECK_THROWS_AS(state.update(view, jackpot), ZeroProbabilityError);
    CHECK(state.round() == 1);
    CHECK(state.cumulative_log_loss() == 0.0);
    // The same state still accepts a feasible outcome.
    CHECK_NOTHROW(state.update(view, table.outcome_index("0")));
    CHECK(state.round() == 2);
}

TEST_CASE("posterior drift stays negligible over a long run") {
    Rng rng(13);
    auto model = random_tabular_ehmm(rng, 4, 3);
    PredictionTable table = random_prediction_table(rng, 400, model->experts(), {"0", "1", "2"});
    std::vector<int> data = random_outcomes(rng, 400, 3);
    RunTrace trace = forward_run(model, table, data);
    CHECK(trace.max_drift() < 1e-9);
    for (const auto& row : trace.rows) {
        double mass = 0;
        for (double p : row.predictive) mass += p;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}
