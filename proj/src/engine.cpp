#include "epp/engine.hpp"

#include <cmath>

#include "epp/errors.hpp"

namespace epp {

namespace {
constexpr double kDriftTolerance = 1e-12;
}

Variant parse_variant(const std::string& text) {
    if (text == "freeze") return Variant::freeze;
    if (text == "sleep") return Variant::sleep;
    throw InvalidInputError("unknown variant '" + text + "'");
}

std::string variant_name(Variant variant) {
    return variant == Variant::freeze ? "freeze" : "sleep";
}

EppState::EppState(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant,
                   EppOptions options)
    : model_(std::move(model)),
      scheme_(scheme),
      variant_(variant),
      prefix_(scheme.gamma()) {
    if (options.force_naive)
        layout_ = Layout::naive;
    else if (scheme_.kind() == SchemeKind::uniform_past)
        layout_ = Layout::uniform_sum;
    else if (scheme_.kind() == SchemeKind::decaying_past_approx)
        layout_ = Layout::blocks;
    else
        layout_ = Layout::naive;

    Distribution v1 = model_->init();
    switch (layout_) {
        case Layout::naive: past_.push_back(std::move(v1)); break;
        case Layout::uniform_sum:
            newest_ = v1;
            sum_ = std::move(v1);
            break;
        case Layout::blocks: newest_ = std::move(v1); break;
    }
    refresh_configuration();
}

void EppState::refresh_configuration() {
    switch (layout_) {
        case Layout::naive: {
            std::vector<double> w = scheme_.weights(t_);
            Distribution acc;
            for (std::size_t j = 0; j < w.size(); ++j)
                if (w[j] != 0.0) acc.add_scaled(past_[j], w[j]);
            config_ = std::move(acc);
            break;
        }
        case Layout::uniform_sum: {
            if (t_ == 1) {
                config_ = newest_;
                break;
            }
            // (1-a) * newest + a/(t-1) * (sum of the older ones)
            Distribution acc = sum_;
            acc.add_scaled(newest_, -1.0);
            acc.scale(scheme_.alpha() / static_cast<double>(t_ - 1));
            acc.add_scaled(newest_, 1.0 - scheme_.alpha());
            acc.drop_nonpositive();
            config_ = std::move(acc);
            break;
        }
        case Layout::blocks: {
            prefix_.extend_to(t_);
            BlockLayout layout = scheme_.block_layout(t_, prefix_);
            if (layout.blocks.size() != blocks_.size())
                throw Error("block bookkeeping diverged from layout");
            Distribution acc;
            for (std::size_t i = 0; i < blocks_.size(); ++i) {
                const auto& block = layout.blocks[i];
                if (block.end - block.begin != blocks_[i].width)
                    throw Error("block bookkeeping diverged from layout");
                acc.add_scaled(blocks_[i].sum,
                               block.weight / static_cast<double>(blocks_[i].width));
            }
            acc.add_scaled(newest_, layout.newest_weight);
            config_ = std::move(acc);
            break;
        }
    }
}

std::vector<double> EppState::weights() const { return expert_weights(config_, *model_); }

Prediction EppState::predict(const PredView& preds) const {
    Prediction out;
    out.expert_weights = weights();
    out.outcome_probs = predictive_from_weights(out.expert_weights, preds, t_);
    return out;
}

double EppState::update(const PredView& preds, int outcome) {
    if (t_ > preds.horizon())
        throw InvalidInputError("prediction table ends before round " + std::to_string(t_));
    if (outcome < 0 || outcome >= preds.num_outcomes())
        throw InvalidInputError("outcome index out of range");

    Distribution conditioned = condition_on_outcome(config_, *model_, preds, t_, outcome);
    double predictive = conditioned.sum();
    conditioned.scale(1.0 / predictive);
    Distribution next = evolve(conditioned, *model_);
    drift_ = std::abs(next.sum() - 1.0);
    if (drift_ > kDriftTolerance) next.normalize();

    bool sleeping = variant_ == Variant::sleep;
    switch (layout_) {
        case Layout::naive:
            if (sleeping)
                for (auto& v : past_) v = evolve(v, *model_);
            past_.push_back(std::move(next));
            break;
        case Layout::uniform_sum:
            if (sleeping) sum_ = evolve(sum_, *model_);
            sum_.add_scaled(next, 1.0);
            newest_ = std::move(next);
            break;
        case Layout::blocks: {
            if (sleeping)
                for (auto& block : blocks_) block.sum = evolve(block.sum, *model_);
            Distribution retiring = sleeping ? evolve(newest_, *model_) : std::move(newest_);
            blocks_.push_back({1, std::move(retiring)});
            // Binary-counter step: widths are the binary decomposition of the
            // number of past indices, kept largest-first.
            while (blocks_.size() >= 2 &&
                   blocks_[blocks_.size() - 1].width == blocks_[blocks_.size() - 2].width) {
                auto& lower = blocks_[blocks_.size() - 2];
                lower.sum.add_scaled(blocks_.back().sum, 1.0);
                lower.width *= 2;
                blocks_.pop_back();
            }
            newest_ = std::move(next);
            break;
        }
    }

    double loss = -std::log(predictive);
    cum_loss_ += loss;
    ++t_;
    refresh_configuration();
    return loss;
}

const std::vector<Distribution>& EppState::stored_posteriors() const {
    if (layout_ != Layout::naive)
        throw InvalidInputError("stored posteriors are only enumerable on the naive path");
    return past_;
}

int EppState::block_count() const {
    if (layout_ != Layout::blocks)
        throw InvalidInputError("block count only applies to the block layout");
    return static_cast<int>(blocks_.size());
}

RunTrace epp_run(std::shared_ptr<const Ehmm> model, MixingScheme scheme, Variant variant,
                 const PredictionTable& preds, const std::vector<int>& outcomes,
                 EppOptions options) {
    PredView view(preds, model->experts());
    RunTrace trace;
    trace.outcome_names = preds.outcomes();
    trace.expert_names = model->experts();
    EppState state(std::move(model), scheme, variant, options);
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

MppState::MppState(std::vector<std::string> expert_names, std::vector<double> prior,
                   MixingScheme scheme)
    : experts_(std::move(expert_names)), scheme_(scheme) {
    if (experts_.empty()) throw InvalidInputError("need at least one expert");
    if (prior.size() != experts_.size())
        throw InvalidInputError("prior size does not match expert count");
    double total = 0;
    for (double p : prior) {
        if (p < 0) throw InvalidInputError("negative prior mass");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInputError("prior does not sum to 1");
    past_.push_back(std::move(prior));
}

std::vector<double> MppState::weights() const {
    std::vector<double> beta = scheme_.weights(t_);
    std::vector<double> mix(experts_.size(), 0.0);
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (beta[j] == 0.0) continue;
        for (std::size_t e = 0; e < experts_.size(); ++e) mix[e] += beta[j] * past_[j][e];
    }
    return mix;
}

Prediction MppState::predict(const PredView& preds) const {
    Prediction out;
    out.expert_weights = weights();
    out.outcome_probs = predictive_from_weights(out.expert_weights, preds, t_);
    return out;
}

double MppState::update(const PredView& preds, int outcome) {
    if (t_ > preds.horizon())
        throw InvalidInputError("prediction table ends before round " + std::to_string(t_));
    if (outcome < 0 || outcome >= preds.num_outcomes())
        throw InvalidInputError("outcome index out of range");
    std::vector<double> mix = weights();
    std::vector<double> next(experts_.size());
    double predictive = 0;
    for (std::size_t e = 0; e < experts_.size(); ++e) {
        next[e] = mix[e] * preds.prob(t_, static_cast<int>(e), outcome);
        predictive += next[e];
    }
    if (!(predictive > 0)) throw ZeroProbabilityError(t_);
    for (double& v : next) v /= predictive;
    past_.push_back(std::move(next));
    double loss = -std::log(predictive);
    cum_loss_ += loss;
    ++t_;
    return loss;
}

RunTrace mpp_run(std::vector<std::string> expert_names, std::vector<double> prior,
                 MixingScheme scheme, const PredictionTable& preds,
                 const std::vector<int>& outcomes) {
    PredView view(preds, expert_names);
    MppState state(std::move(expert_names), std::move(prior), scheme);
    RunTrace trace;
    trace.outcome_names = preds.outcomes();
    trace.expert_names = state.experts();
    for (int outcome : outcomes) {
        TraceRow row;
        row.round = state.round();
        row.outcome = outcome;
        Prediction p = state.predict(view);
        row.predictive = std::move(p.outcome_probs);
        row.weights = std::move(p.expert_weights);
        row.loss = state.update(view, outcome);
        row.cum_loss = state.cumulative_log_loss();
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

} // namespace epp
