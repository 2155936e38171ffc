#include <doctest.h>

#include <cmath>

#include "epp/ehmm.hpp"
#include "epp/errors.hpp"
#include "epp/forward.hpp"
#include "epp/rand.hpp"

using namespace epp;

namespace {

// Two constant experts on a binary alphabet.
PredictionTable two_expert_table(int horizon) {
    PredictionTable table(horizon, {"e1", "e2"}, {"0", "1"});
    for (int t = 1; t <= horizon; ++t) {
        table.set_prob(t, 0, 0, 0.7);
        table.set_prob(t, 0, 1, 0.3);
        table.set_prob(t, 1, 0, 0.2);
        table.set_prob(t, 1, 1, 0.8);
    }
    return table;
}

} // namespace

TEST_CASE("static expert mixture model reproduces hand-computed posterior math") {
    auto model = bayes_ehmm({"e1", "e2"}, {0.6, 0.4});
    PredictionTable table = two_expert_table(2);
    RunTrace trace = forward_run(model, table, {0, 1});
    // Round 1: 0.6*0.7 + 0.4*0.2 = 0.5; round 2 after reweighting: 0.38.
    CHECK(trace.rows[0].predictive[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(trace.rows[1].predictive[1] == doctest::Approx(0.38).epsilon(1e-12));
    // Joint likelihood 0.19 = 0.6*0.7*0.3 + 0.4*0.2*0.8.
    CHECK(trace.cumulative_log_loss() == doctest::Approx(-std::log(0.19)).epsilon(1e-12));
    // Posterior weights entering round 2: (0.84, 0.16).
    CHECK(trace.rows[1].weights[0] == doctest::Approx(0.84).epsilon(1e-12));
}

TEST_CASE("add-one count model: marginals and layer sizes") {
    auto model = std::make_shared<LaplaceEhmm>();
    PredictionTable table = LaplaceEhmm::prediction_table(3);

    SUBCASE("probability of three ones is 1/4") {
        RunTrace trace = forward_run(model, table, {1, 1, 1});
        CHECK(std::exp(-trace.cumulative_log_loss()) == doctest::Approx(0.25).epsilon(1e-13));
        // Per-round predictions 1/2, 2/3, 3/4.
        CHECK(trace.rows[0].predictive[1] == doctest::Approx(0.5));
        CHECK(trace.rows[1].predictive[1] == doctest::Approx(2.0 / 3));
        CHECK(trace.rows[2].predictive[1] == doctest::Approx(0.75));
    }

    SUBCASE("layer t holds 2t states, cumulatively t(t+1)") {
        for (int t = 1; t <= 6; ++t) {
            LayerInfo info = layers(*model, t);
            CHECK(info.exact.size() == static_cast<std::size_t>(2 * t));
            CHECK(info.cumulative.size() == static_cast<std::size_t>(t * (t + 1)));
        }
    }

    SUBCASE("count packing round-trips") {
        StateId q = LaplaceEhmm::encode(123, 45, 1);
        std::int64_t n0, n1;
        int bit;
        LaplaceEhmm::decode(q, n0, n1, bit);
        CHECK(n0 == 123);
        CHECK(n1 == 45);
        CHECK(bit == 1);
    }
}

TEST_CASE("payout machine construction") {
    HmmSpec spec = slot_machine();
    spec.validate();
    auto model = spec.to_ehmm();
    CHECK(model->state_index("cold") == 0);
    CHECK(model->trans(0).prob(1) == doctest::Approx(0.01));
    CHECK(model->trans(2).prob(0) == 1.0);
    PredictionTable table = spec.prediction_table(4);
    // Starts cold, and cold always pays nothing.
    RunTrace trace = forward_run(model, table, {0, 0, 0, 0});
    CHECK(trace.rows[0].predictive[0] == doctest::Approx(1.0));
    CHECK(trace.rows[0].loss == doctest::Approx(0.0));
}

TEST_CASE("prior-weighted model union behaves like a mixed prior") {
    auto a = bayes_ehmm({"e1", "e2"}, {0.6, 0.4});
    auto b = bayes_ehmm({"e1", "e2"}, {0.2, 0.8});
    auto mix = bayes_mixture({a, b}, {0.5, 0.5});
    auto direct = bayes_ehmm({"e1", "e2"}, {0.4, 0.6});
    PredictionTable table = two_expert_table(4);
    RunTrace lhs = forward_run(mix, table, {0, 1, 1, 0});
    RunTrace rhs = forward_run(direct, table, {0, 1, 1, 0});
    for (std::size_t t = 0; t < lhs.rows.size(); ++t)
        CHECK(lhs.rows[t].loss == doctest::Approx(rhs.rows[t].loss).epsilon(1e-13));

    SUBCASE("component expert sets must agree") {
        auto c = bayes_ehmm({"e1", "e3"}, {0.5, 0.5});
        CHECK_THROWS_AS(bayes_mixture({a, c}, {0.5, 0.5}), InvalidInputError);
    }
}

TEST_CASE("splitting a state preserves behaviour") {
    Rng rng(7);
    auto model = random_tabular_ehmm(rng, 3, 2);
    auto split = split_state(*model, 1, 0.3);
    CHECK(*split->state_count() == 4);
    CHECK(equivalent(*model, *split, 4));

    PredictionTable table = random_prediction_table(rng, 12, model->experts(), {"0", "1"});
    std::vector<int> data = random_outcomes(rng, 12, 2);
    RunTrace lhs = forward_run(model, table, data);
    RunTrace rhs = forward_run(split, table, data);
    for (std::size_t t = 0; t < lhs.rows.size(); ++t)
        CHECK(std::abs(lhs.rows[t].loss - rhs.rows[t].loss) < 1e-12);

    SUBCASE("split weight must be interior") {
        CHECK_THROWS_AS(split_state(*model, 1, 0.0), InvalidInputError);
        CHECK_THROWS_AS(split_state(*model, 1, 1.0), InvalidInputError);
    }
}

TEST_CASE("behavioural equivalence distinguishes different priors") {
    auto a = bayes_ehmm({"e1", "e2"}, {0.6, 0.4});
    auto b = bayes_ehmm({"e1", "e2"}, {0.5, 0.5});
    CHECK(equivalent(*a, *a, 5));
    CHECK_FALSE(equivalent(*a, *b, 3));
    auto c = bayes_ehmm({"e1", "e9"}, {0.6, 0.4});
    CHECK_THROWS_AS(equivalent(*a, *c, 3), InvalidInputError);
}

TEST_CASE("one-step inference helpers") {
    // trans(0) = {0:1}, trans(1) = {0:0.5, 1:0.5}
    std::vector<Distribution> trans_rows{Distribution::point_mass(0),
                                         Distribution::checked({{0, 0.5}, {1, 0.5}})};
    std::vector<Distribution> prod_rows{Distribution::point_mass(0), Distribution::point_mass(1)};
    TabularEhmm model({"q0", "q1"}, {"e1", "e2"},
                      Distribution::checked({{0, 0.5}, {1, 0.5}}), trans_rows, prod_rows);

    Distribution mu = model.init();
    Distribution stepped = evolve(mu, model);
    CHECK(stepped.prob(0) == doctest::Approx(0.75));
    CHECK(stepped.prob(1) == doctest::Approx(0.25));

    std::vector<double> w = expert_weights(mu, model);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));

    PredictionTable table = two_expert_table(1);
    PredView view(table, model.experts());
    std::vector<double> pred = predictive_from_weights(w, view, 1);
    CHECK(pred[0] == doctest::Approx(0.45)); // 0.5*0.7 + 0.5*0.2
    CHECK(emission_weight(model, 0, view, 1, 0) == doctest::Approx(0.7));

    Distribution conditioned = condition_on_outcome(mu, model, view, 1, 1);
    CHECK(conditioned.sum() == doctest::Approx(0.55));

    SUBCASE("zero-probability outcome raises with the round index") {
        PredictionTable zero(1, {"e1", "e2"}, {"0", "1"});
        for (int e = 0; e < 2; ++e) {
            zero.set_prob(1, e, 0, 1.0);
            zero.set_prob(1, e, 1, 0.0);
        }
        PredView zview(zero, model.experts());
        try {
            condition_on_outcome(mu, model, zview, 1, 1);
            FAIL("expected a zero-probability error");
        } catch (const ZeroProbabilityError& err) {
            CHECK(err.round == 1);
        }
    }
}

TEST_CASE("model validation rejects out-of-range references") {
    CHECK_THROWS_AS(TabularEhmm({"q0"}, {"e0"}, Distribution::point_mass(1),
                                {Distribution::point_mass(0)}, {Distribution::point_mass(0)}),
                    InvalidInputError);
    CHECK_THROWS_AS(TabularEhmm({"q0"}, {"e0"}, Distribution::point_mass(0),
                                {Distribution::point_mass(3)}, {Distribution::point_mass(0)}),
                    InvalidInputError);
    CHECK_THROWS_AS(TabularEhmm({"q0"}, {"e0"}, Distribution::point_mass(0),
                                {Distribution::point_mass(0)}, {Distribution::point_mass(2)}),
                    InvalidInputError);
}
