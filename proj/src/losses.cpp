#include "epp/losses.hpp"

#include <algorithm>
#include <cmath>

#include "epp/errors.hpp"
#include "epp/oracles.hpp"

namespace epp {

namespace {

std::vector<double> normalized(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw InvalidInputError("negative weight");
        total += w;
    }
    if (!(total > 0)) throw InvalidInputError("weights sum to zero");
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / total;
    return out;
}

void check_scalar_action(const Action& action) {
    if (action.size() != 1) throw InvalidInputError("scalar loss takes a single-number action");
    if (!(action[0] >= 0 && action[0] <= 1))
        throw InvalidInputError("action must lie in [0,1]");
}

void check_binary_outcome(int outcome) {
    if (outcome != 0 && outcome != 1)
        throw InvalidInputError("scalar losses are defined on the binary alphabet");
}

class LogLoss final : public MixableLoss {
public:
    std::string name() const override { return "log"; }
    double eta() const override { return 1.0; }
    double loss(const Action& action, int outcome) const override {
        if (outcome < 0 || outcome >= static_cast<int>(action.size()))
            throw InvalidInputError("outcome index out of range");
        return -std::log(action[static_cast<std::size_t>(outcome)]);
    }
    Action substitute(const std::vector<double>& weights,
                      const std::vector<Action>& actions) const override {
        if (weights.size() != actions.size())
            throw InvalidInputError("one weight per action required");
        std::vector<double> w = normalized(weights);
        if (actions.empty()) throw InvalidInputError("no actions");
        Action mix(actions[0].size(), 0.0);
        for (std::size_t e = 0; e < actions.size(); ++e) {
            if (actions[e].size() != mix.size())
                throw InvalidInputError("actions must share one alphabet");
            for (std::size_t x = 0; x < mix.size(); ++x) mix[x] += w[e] * actions[e][x];
        }
        return mix;
    }
};

class SquareLoss final : public MixableLoss {
public:
    std::string name() const override { return "square"; }
    double eta() const override { return 2.0; }
    double loss(const Action& action, int outcome) const override {
        check_scalar_action(action);
        check_binary_outcome(outcome);
        double d = action[0] - static_cast<double>(outcome);
        return d * d;
    }
    Action substitute(const std::vector<double>& weights,
                      const std::vector<Action>& actions) const override {
        double g0 = mix_bound(*this, weights, actions, 0);
        double g1 = mix_bound(*this, weights, actions, 1);
        double a = 0.5 * (1.0 + g0 - g1);
        return {std::clamp(a, 0.0, 1.0)};
    }
};

class HellingerLoss final : public MixableLoss {
public:
    std::string name() const override { return "hellinger"; }
    double eta() const override { return std::sqrt(2.0); }
    double loss(const Action& action, int outcome) const override {
        check_scalar_action(action);
        check_binary_outcome(outcome);
        double a = action[0];
        double x = static_cast<double>(outcome);
        double d0 = std::sqrt(1.0 - x) - std::sqrt(1.0 - a);
        double d1 = std::sqrt(x) - std::sqrt(a);
        return 0.5 * (d0 * d0 + d1 * d1);
    }
    Action substitute(const std::vector<double>& weights,
                      const std::vector<Action>& actions) const override {
        double g0 = mix_bound(*this, weights, actions, 0);
        double g1 = mix_bound(*this, weights, actions, 1);
        // loss(., 0) grows with a and loss(., 1) shrinks, so the feasible set
        // {a : loss(a,x) <= g(x) for both x} is an interval; bisect both ends.
        auto upper = [&](double g) { // largest a with loss(a, 0) <= g
            if (loss({1.0}, 0) <= g) return 1.0;
            double lo = 0, hi = 1;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                (loss({mid}, 0) <= g ? lo : hi) = mid;
            }
            return lo;
        };
        auto lower = [&](double g) { // smallest a with loss(a, 1) <= g
            if (loss({0.0}, 1) <= g) return 0.0;
            double lo = 0, hi = 1;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                (loss({mid}, 1) <= g ? hi : lo) = mid;
            }
            return hi;
        };
        double hi = upper(g0), lo = lower(g1);
        if (lo > hi + 1e-9)
            throw NumericError("substitution interval is empty; mixture bound violated");
        return {std::clamp(0.5 * (lo + hi), 0.0, 1.0)};
    }
};

} // namespace

std::unique_ptr<MixableLoss> make_loss(const std::string& name) {
    if (name == "log") return std::make_unique<LogLoss>();
    if (name == "square") return std::make_unique<SquareLoss>();
    if (name == "hellinger") return std::make_unique<HellingerLoss>();
    throw InvalidInputError("unknown loss '" + name + "'");
}

double mix_bound(const MixableLoss& loss, const std::vector<double>& weights,
                 const std::vector<Action>& actions, int outcome) {
    if (weights.size() != actions.size())
        throw InvalidInputError("one weight per action required");
    std::vector<double> w = normalized(weights);
    std::vector<double> terms;
    terms.reserve(w.size());
    for (std::size_t e = 0; e < w.size(); ++e) {
        if (w[e] <= 0) continue;
        terms.push_back(std::log(w[e]) - loss.eta() * loss.loss(actions[e], outcome));
    }
    return -log_sum_exp(terms) / loss.eta();
}

std::vector<std::vector<double>> fake_predictions(const MixableLoss& loss,
                                                  const std::vector<Action>& actions, int outcome,
                                                  int num_outcomes) {
    if (num_outcomes < 1) throw InvalidInputError("alphabet must be nonempty");
    if (outcome < 0 || outcome >= num_outcomes)
        throw InvalidInputError("outcome index out of range");
    std::vector<std::vector<double>> fakes;
    fakes.reserve(actions.size());
    for (const auto& action : actions) {
        double hit = std::exp(-loss.eta() * loss.loss(action, outcome));
        if (hit > 1.0 + 1e-12) throw NumericError("discounted loss exceeds 1");
        hit = std::min(hit, 1.0);
        if (num_outcomes == 1 && hit < 1.0 - 1e-9)
            throw InvalidInputError("cannot spread residual mass on a single-outcome alphabet");
        std::vector<double> row(static_cast<std::size_t>(num_outcomes),
                                num_outcomes == 1 ? 0.0 : (1.0 - hit) / (num_outcomes - 1));
        row[static_cast<std::size_t>(outcome)] = hit;
        fakes.push_back(std::move(row));
    }
    return fakes;
}

namespace {

class ForwardWeightedBase final : public WeightedBase {
public:
    ForwardWeightedBase(std::shared_ptr<const Ehmm> model, const PredictionTable& fake)
        : view_(fake, model->experts()), state_(std::move(model)) {}
    std::vector<double> weights() const override { return state_.weights(); }
    void observe(int outcome) override { state_.update(view_, outcome); }
    double cumulative_log_loss() const override { return state_.cumulative_log_loss(); }

private:
    PredView view_;
    ForwardState state_;
};

class EppWeightedBase final : public WeightedBase {
public:
    EppWeightedBase(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant,
                    const PredictionTable& fake)
        : view_(fake, model->experts()), state_(std::move(model), scheme, variant) {}
    std::vector<double> weights() const override { return state_.weights(); }
    void observe(int outcome) override { state_.update(view_, outcome); }
    double cumulative_log_loss() const override { return state_.cumulative_log_loss(); }

private:
    PredView view_;
    EppState state_;
};

class MppWeightedBase final : public WeightedBase {
public:
    MppWeightedBase(std::vector<std::string> names, std::vector<double> prior,
                    MixingScheme scheme, const PredictionTable& fake)
        : view_(fake, names), state_(std::move(names), std::move(prior), scheme) {}
    std::vector<double> weights() const override { return state_.weights(); }
    void observe(int outcome) override { state_.update(view_, outcome); }
    double cumulative_log_loss() const override { return state_.cumulative_log_loss(); }

private:
    PredView view_;
    MppState state_;
};

} // namespace

BaseFactory forward_base(std::shared_ptr<const Ehmm> model) {
    return [model](const PredictionTable& fake) {
        return std::make_unique<ForwardWeightedBase>(model, fake);
    };
}

BaseFactory epp_base(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant) {
    return [model, scheme, variant](const PredictionTable& fake) {
        return std::make_unique<EppWeightedBase>(model, scheme, variant, fake);
    };
}

BaseFactory mpp_base(std::vector<std::string> expert_names, std::vector<double> prior,
                     MixingScheme scheme) {
    return [expert_names, prior, scheme](const PredictionTable& fake) {
        return std::make_unique<MppWeightedBase>(expert_names, prior, scheme, fake);
    };
}

DerivedTrace derived_run(const BaseFactory& factory, const MixableLoss& loss,
                         const std::vector<std::vector<Action>>& actions,
                         const std::vector<int>& outcomes,
                         const std::vector<std::string>& expert_names,
                         const std::vector<std::string>& outcome_names) {
    if (actions.size() != outcomes.size())
        throw InvalidInputError("one action set per round required");
    int horizon = static_cast<int>(outcomes.size());
    PredictionTable fake(horizon, expert_names, outcome_names);
    std::unique_ptr<WeightedBase> base = factory(fake);
    DerivedTrace trace;
    double cum = 0;
    for (int t = 1; t <= horizon; ++t) {
        const auto& round_actions = actions[static_cast<std::size_t>(t - 1)];
        if (round_actions.size() != expert_names.size())
            throw InvalidInputError("one action per expert required");
        int x = outcomes[static_cast<std::size_t>(t - 1)];
        std::vector<double> w = base->weights();
        DerivedRow row;
        row.round = t;
        row.outcome = x;
        row.action = loss.substitute(w, round_actions);
        row.loss = loss.loss(row.action, x);
        row.bound = mix_bound(loss, w, round_actions, x);
        cum += row.loss;
        row.cum_loss = cum;
        auto fakes = fake_predictions(loss, round_actions, x,
                                      static_cast<int>(outcome_names.size()));
        for (std::size_t e = 0; e < fakes.size(); ++e)
            for (std::size_t o = 0; o < outcome_names.size(); ++o)
                fake.set_prob(t, static_cast<int>(e), static_cast<int>(o), fakes[e][o]);
        base->observe(x);
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

} // namespace epp
