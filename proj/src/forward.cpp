#include "epp/forward.hpp"

#include <cmath>

#include "epp/errors.hpp"

namespace epp {

namespace {
constexpr double kDriftTolerance = 1e-12;
}

ForwardState::ForwardState(std::shared_ptr<const Ehmm> model)
    : model_(std::move(model)), posterior_(model_->init()), t_(1) {}

ForwardState::ForwardState(std::shared_ptr<const Ehmm> model, Distribution seed, int start_round)
    : model_(std::move(model)), posterior_(std::move(seed)), t_(start_round) {
    if (start_round < 1) throw InvalidInputError("rounds are 1-based");
}

std::vector<double> ForwardState::weights() const {
    return expert_weights(posterior_, *model_);
}

Prediction ForwardState::predict(const PredView& preds) const {
    Prediction out;
    out.expert_weights = expert_weights(posterior_, *model_);
    out.outcome_probs = predictive_from_weights(out.expert_weights, preds, t_);
    return out;
}

double ForwardState::update(const PredView& preds, int outcome) {
    Distribution conditioned = condition_on_outcome(posterior_, *model_, preds, t_, outcome);
    double predictive = conditioned.sum();
    conditioned.scale(1.0 / predictive);
    Distribution next = evolve(conditioned, *model_);
    drift_ = std::abs(next.sum() - 1.0);
    if (drift_ > kDriftTolerance) next.normalize();
    posterior_ = std::move(next);
    ++t_;
    double loss = -std::log(predictive);
    cum_loss_ += loss;
    return loss;
}

RunTrace forward_run(std::shared_ptr<const Ehmm> model, const PredictionTable& preds,
                     const std::vector<int>& outcomes) {
    PredView view(preds, model->experts());
    ForwardState state(model);
    RunTrace trace;
    trace.outcome_names = preds.outcomes();
    trace.expert_names = model->experts();
    for (int outcome : outcomes) {
        TraceRow row;
        row.round = state.round();
        row.outcome = outcome;
        Prediction p = state.predict(view);
        row.predictive = std::move(p.outcome_probs);
        row.weights = std::move(p.expert_weights);
        row.loss = state.update(view, outcome);
        row.cum_loss = state.cumulative_log_loss();
        row.drift = state.last_drift();
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

} // namespace epp
