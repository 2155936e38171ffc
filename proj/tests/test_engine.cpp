#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "epp/distribution.hpp"
#include "epp/ehmm.hpp"
#include "epp/engine.hpp"
#include "epp/errors.hpp"
#include "epp/forward.hpp"
#include "epp/mixing.hpp"
#include "epp/rand.hpp"

using namespace epp;

namespace {

// Two-state chain A -> B -> B whose states produce distinct experts; the
// simplest model on which frozen and re-evolved past posteriors disagree.
std::shared_ptr<TabularEhmm> chain_model() {
    return std::make_shared<TabularEhmm>(
        std::vector<std::string>{"A", "B"}, std::vector<std::string>{"a", "b"},
        Distribution::point_mass(0),
        std::vector<Distribution>{Distribution::point_mass(1), Distribution::point_mass(1)},
        std::vector<Distribution>{Distribution::point_mass(0), Distribution::point_mass(1)});
}

std::vector<MixingScheme> all_kinds() {
    return {MixingScheme::yesterday(),
            MixingScheme::fixed_share(0.3),
            MixingScheme::uniform_past(0.25),
            MixingScheme::decaying_past(0.5, 1.0),
            MixingScheme::decaying_past_approx(0.5, 1.0)};
}

} // namespace

TEST_CASE("looking back only one round reproduces the forward algorithm") {
    Rng rng(11);
    auto model = random_tabular_ehmm(rng, 4, 3);
    auto preds = random_prediction_table(rng, 60, model->experts(), {"x", "y"});
    auto outcomes = random_outcomes(rng, 60, 2);

    RunTrace fwd = forward_run(model, preds, outcomes);
    for (Variant variant : {Variant::freeze, Variant::sleep}) {
        RunTrace run = epp_run(model, MixingScheme::yesterday(), variant, preds, outcomes);
        REQUIRE(run.rows.size() == fwd.rows.size());
        for (std::size_t i = 0; i < run.rows.size(); ++i) {
            CHECK(run.rows[i].loss == doctest::Approx(fwd.rows[i].loss).epsilon(1e-13));
            for (std::size_t x = 0; x < run.rows[i].predictive.size(); ++x)
                CHECK(run.rows[i].predictive[x] ==
                      doctest::Approx(fwd.rows[i].predictive[x]).epsilon(1e-13));
        }
        CHECK(run.cumulative_log_loss() ==
              doctest::Approx(fwd.cumulative_log_loss()).epsilon(1e-13));
    }
}

TEST_CASE("one posterior is stored per round and each stays normalized") {
    Rng rng(12);
    auto model = random_tabular_ehmm(rng, 3, 2);
    auto preds = random_prediction_table(rng, 30, model->experts(), {"x", "y"});
    auto outcomes = random_outcomes(rng, 30, 2);
    PredView view(preds, model->experts());

    for (Variant variant : {Variant::freeze, Variant::sleep}) {
        EppState state(model, MixingScheme::fixed_share(0.2), variant);
        CHECK(state.round() == 1);
        CHECK(state.stored_posteriors().size() == 1);
        for (int i = 0; i < 30; ++i) {
            state.update(view, outcomes[static_cast<std::size_t>(i)]);
            CHECK(state.round() == i + 2);
            CHECK(state.stored_posteriors().size() == static_cast<std::size_t>(i + 2));
            for (const auto& v : state.stored_posteriors())
                CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(state.configuration().sum() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("running-sum layout matches the store-everything path") {
    Rng rng(13);
    auto model = random_tabular_ehmm(rng, 4, 3);
    const int horizon = 300;
    auto preds = random_prediction_table(rng, horizon, model->experts(), {"x", "y", "z"});
    auto outcomes = random_outcomes(rng, horizon, 3);
    MixingScheme scheme = MixingScheme::uniform_past(0.3);

    for (Variant variant : {Variant::freeze, Variant::sleep}) {
        RunTrace fast = epp_run(model, scheme, variant, preds, outcomes);
        RunTrace naive = epp_run(model, scheme, variant, preds, outcomes, {.force_naive = true});
        for (std::size_t i = 0; i < fast.rows.size(); ++i)
            CHECK(fast.rows[i].loss == doctest::Approx(naive.rows[i].loss).epsilon(1e-12));
        CHECK(fast.cumulative_log_loss() ==
              doctest::Approx(naive.cumulative_log_loss()).epsilon(1e-12));
    }
}

TEST_CASE("block layout matches the store-everything path") {
    Rng rng(14);
    auto model = random_tabular_ehmm(rng, 3, 2);
    const int horizon = 200;
    auto preds = random_prediction_table(rng, horizon, model->experts(), {"x", "y"});
    auto outcomes = random_outcomes(rng, horizon, 2);
    MixingScheme scheme = MixingScheme::decaying_past_approx(0.5, 1.0);

    for (Variant variant : {Variant::freeze, Variant::sleep}) {
        RunTrace fast = epp_run(model, scheme, variant, preds, outcomes);
        RunTrace naive = epp_run(model, scheme, variant, preds, outcomes, {.force_naive = true});
        for (std::size_t i = 0; i < fast.rows.size(); ++i)
            CHECK(fast.rows[i].loss == doctest::Approx(naive.rows[i].loss).epsilon(1e-12));
    }
}

TEST_CASE("block count is the popcount of the number of past indices") {
    Rng rng(15);
    auto model = random_tabular_ehmm(rng, 3, 2);
    const int horizon = 130;
    auto preds = random_prediction_table(rng, horizon, model->experts(), {"x", "y"});
    auto outcomes = random_outcomes(rng, horizon, 2);
    PredView view(preds, model->experts());

    EppState state(model, MixingScheme::decaying_past_approx(0.4, 1.5), Variant::freeze);
    CHECK(state.block_count() == 0);
    for (int i = 0; i < horizon; ++i) {
        state.update(view, outcomes[static_cast<std::size_t>(i)]);
        int m = state.round() - 1;
        int expected = 0;
        for (; m; m >>= 1) expected += m & 1;
        CHECK(state.block_count() == expected);
    }
    CHECK_THROWS_AS(state.stored_posteriors(), InvalidInputError);

    EppState naive(model, MixingScheme::yesterday(), Variant::freeze);
    CHECK_THROWS_AS(naive.block_count(), InvalidInputError);
}

TEST_CASE("frozen and re-evolved pasts part ways on a drifting chain") {
    auto model = chain_model();
    PredictionTable preds(2, {"a", "b"}, {"0", "1"});
    preds.set_prob(1, 0, 0, 0.9);
    preds.set_prob(1, 0, 1, 0.1);
    preds.set_prob(1, 1, 0, 0.4);
    preds.set_prob(1, 1, 1, 0.6);
    preds.set_prob(2, 0, 0, 0.9);
    preds.set_prob(2, 0, 1, 0.1);
    preds.set_prob(2, 1, 0, 0.4);
    preds.set_prob(2, 1, 1, 0.6);
    PredView view(preds, model->experts());
    const double alpha = 0.25;
    MixingScheme scheme = MixingScheme::fixed_share(alpha);

    // Freeze: the round-1 posterior stays put on state A, so round 2 mixes
    // alpha of expert a back in.
    EppState freeze(model, scheme, Variant::freeze);
    freeze.update(view, 0);
    Prediction pf = freeze.predict(view);
    CHECK(pf.expert_weights[0] == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(pf.expert_weights[1] == doctest::Approx(1 - alpha).epsilon(1e-12));
    CHECK(pf.outcome_probs[0] == doctest::Approx(alpha * 0.9 + (1 - alpha) * 0.4).epsilon(1e-12));

    // Sleep: the stored round-1 posterior has meanwhile moved to state B, so
    // the round-2 mixture is pure expert b regardless of alpha.
    EppState sleep(model, scheme, Variant::sleep);
    sleep.update(view, 0);
    Prediction ps = sleep.predict(view);
    CHECK(ps.expert_weights[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ps.expert_weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ps.outcome_probs[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(pf.outcome_probs[0] != doctest::Approx(ps.outcome_probs[0]).epsilon(1e-6));
}

TEST_CASE("on a static expert mixture the engine agrees with the model-free reference") {
    Rng rng(16);
    std::vector<std::string> names = indexed_names("e", 3);
    std::vector<double> prior = rng.simplex(3);
    auto model = bayes_ehmm(names, prior);
    const int horizon = 40;
    auto preds = random_prediction_table(rng, horizon, names, {"x", "y"});
    auto outcomes = random_outcomes(rng, horizon, 2);

    for (const auto& scheme : all_kinds()) {
        RunTrace mpp = mpp_run(names, prior, scheme, preds, outcomes);
        for (Variant variant : {Variant::freeze, Variant::sleep}) {
            RunTrace run = epp_run(model, scheme, variant, preds, outcomes);
            REQUIRE(run.rows.size() == mpp.rows.size());
            for (std::size_t i = 0; i < run.rows.size(); ++i) {
                CHECK(run.rows[i].loss == doctest::Approx(mpp.rows[i].loss).epsilon(1e-12));
                for (std::size_t e = 0; e < names.size(); ++e)
                    CHECK(run.rows[i].weights[e] ==
                          doctest::Approx(mpp.rows[i].weights[e]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("an impossible outcome raises and leaves the state reusable") {
    HmmSpec spec = slot_machine();
    auto model = spec.to_ehmm();
    PredictionTable preds = spec.prediction_table(5);
    PredView view(preds, model->experts());
    int zero = preds.outcome_index("0");
    int one = preds.outcome_index("1");
    REQUIRE(zero >= 0);
    REQUIRE(one >= 0);

    EppState state(model, MixingScheme::fixed_share(0.1), Variant::freeze);
    // Round 1 is surely cold, which only ever pays "0".
    CHECK_THROWS_AS(state.update(view, one), ZeroProbabilityError);
    CHECK(state.round() == 1);
    CHECK(state.cumulative_log_loss() == 0.0);
    double loss = state.update(view, zero);
    CHECK(loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(state.round() == 2);

    MppState mpp({"c", "h"}, {1.0, 0.0}, MixingScheme::yesterday());
    PredictionTable dead(3, {"c", "h"}, {"x", "y"});
    for (int t = 1; t <= 3; ++t)
        for (int e = 0; e < 2; ++e) {
            dead.set_prob(t, e, 0, 1.0);
            dead.set_prob(t, e, 1, 0.0);
        }
    PredView dead_view(dead, std::vector<std::string>{"c", "h"});
    CHECK_THROWS_AS(mpp.update(dead_view, 1), ZeroProbabilityError);
    CHECK(mpp.round() == 1);
    CHECK_NOTHROW(mpp.update(dead_view, 0));
}

TEST_CASE("trace rows telescope") {
    Rng rng(17);
    auto model = random_tabular_ehmm(rng, 3, 2);
    auto preds = random_prediction_table(rng, 50, model->experts(), {"x", "y"});
    auto outcomes = random_outcomes(rng, 50, 2);

    RunTrace run =
        epp_run(model, MixingScheme::decaying_past(0.5, 1.0), Variant::sleep, preds, outcomes);
    double cum = 0;
    for (std::size_t i = 0; i < run.rows.size(); ++i) {
        const TraceRow& row = run.rows[i];
        CHECK(row.round == static_cast<int>(i) + 1);
        cum += row.loss;
        CHECK(row.cum_loss == doctest::Approx(cum).epsilon(1e-12));
        CHECK(row.loss ==
              doctest::Approx(-std::log(row.predictive[static_cast<std::size_t>(row.outcome)]))
                  .epsilon(1e-12));
        double total = 0;
        for (double p : row.predictive) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(run.max_drift() < 1e-9);
    CHECK(run.cumulative_log_loss() == doctest::Approx(cum).epsilon(1e-12));
}

TEST_CASE("model-free reference validates its inputs") {
    CHECK_THROWS_AS(MppState({}, {}, MixingScheme::yesterday()), InvalidInputError);
    CHECK_THROWS_AS(MppState({"a", "b"}, {0.5}, MixingScheme::yesterday()), InvalidInputError);
    CHECK_THROWS_AS(MppState({"a", "b"}, {0.7, 0.7}, MixingScheme::yesterday()),
                    InvalidInputError);
    CHECK_THROWS_AS(MppState({"a", "b"}, {-0.5, 1.5}, MixingScheme::yesterday()),
                    InvalidInputError);
    CHECK(parse_variant("freeze") == Variant::freeze);
    CHECK(parse_variant("sleep") == Variant::sleep);
    CHECK_THROWS_AS(parse_variant("nap"), InvalidInputError);
    CHECK(variant_name(Variant::freeze) == "freeze");
    CHECK(variant_name(Variant::sleep) == "sleep");
}
