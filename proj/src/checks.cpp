#include "epp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "epp/ehmm.hpp"
#include "epp/engine.hpp"
#include "epp/errors.hpp"
#include "epp/forward.hpp"
#include "epp/format.hpp"
#include "epp/mixing.hpp"
#include "epp/oracles.hpp"
#include "epp/partition.hpp"
#include "epp/rand.hpp"

namespace epp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string>& scheme_cycle() {
    static const std::vector<std::string> cycle = {
        "yesterday", "fixedshare:0.3", "uniformpast:0.2", "decayingpast:0.5:1",
        "decayingpast-approx:0.5:1"};
    return cycle;
}

MixingScheme scheme_for(const CheckOptions& opt, int instance) {
    if (!opt.scheme.empty()) return MixingScheme::parse(opt.scheme);
    const auto& cycle = scheme_cycle();
    return MixingScheme::parse(cycle[static_cast<std::size_t>(instance) % cycle.size()]);
}

std::vector<Variant> variants_for(const CheckOptions& opt) {
    if (opt.variant == "both") return {Variant::freeze, Variant::sleep};
    return {parse_variant(opt.variant)};
}

int pick(int chosen, int fallback) { return chosen > 0 ? chosen : fallback; }
double pick_tol(double chosen, double fallback) { return chosen >= 0 ? chosen : fallback; }

void guard_horizon(int horizon, int limit, const char* what) {
    if (horizon > limit)
        throw CapacityError(std::string(what) + " is guarded at T <= " + std::to_string(limit));
    if (horizon < 1) throw InvalidInputError("horizon must be at least 1");
}

// Signed relative margin of the bound lhs >= rhs, both given as logs of
// probabilities: 0 means equality, 1 means rhs = 0, negative means violated.
double log_margin(double lhs_log, double rhs_log) {
    if (rhs_log == -kInf) return 1.0;
    if (lhs_log == -kInf) return -kInf;
    return 1.0 - std::exp(rhs_log - lhs_log);
}

// Relative deviation between two log-probabilities (0 when both are -inf).
double log_deviation(double a, double b) {
    if (a == -kInf && b == -kInf) return 0.0;
    if (a == -kInf || b == -kInf) return kInf;
    return std::abs(std::exp(b - a) - 1.0);
}

struct RandomInstance {
    std::shared_ptr<TabularEhmm> model;
    PredictionTable preds;
    std::vector<int> outcomes;
};

RandomInstance random_instance(Rng& rng, int horizon, int max_states, int max_experts,
                               int num_outcomes) {
    int num_states = 2 + (max_states > 2 ? rng.uniform_int(max_states - 1) : 0);
    int num_experts = 1 + rng.uniform_int(max_experts);
    auto model = random_tabular_ehmm(rng, num_states, num_experts);
    PredictionTable preds = random_prediction_table(rng, horizon, model->experts(),
                                                    indexed_names("x", num_outcomes));
    std::vector<int> outcomes = random_outcomes(rng, horizon, num_outcomes);
    return {std::move(model), std::move(preds), std::move(outcomes)};
}

double worst_trace_deviation(const RunTrace& a, const RunTrace& b) {
    if (a.rows.size() != b.rows.size()) return kInf;
    double worst = 0;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        worst = std::max(worst, std::abs(a.rows[r].loss - b.rows[r].loss));
        if (a.rows[r].predictive.size() != b.rows[r].predictive.size()) return kInf;
        for (std::size_t x = 0; x < a.rows[r].predictive.size(); ++x)
            worst = std::max(worst,
                             std::abs(a.rows[r].predictive[x] - b.rows[r].predictive[x]));
    }
    return worst;
}

// The algorithm's probability mass dominates the prior-weighted partition
// mixture; equality for the properly normalized schemes.  Per partition when
// `per_partition` (the corollary form), against the full mixture otherwise.
CheckResult check_partition_bound(const CheckOptions& opt, bool per_partition) {
    CheckResult res;
    int horizon = pick(opt.horizon, 6);
    guard_horizon(horizon, 8, "partition enumeration");
    int instances = pick(opt.instances, 20);
    double tol = pick_tol(opt.slack, 1e-9);
    Rng rng(opt.seed);
    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);
        RandomInstance inst = random_instance(rng, horizon, 3, 2, 2);
        for (Variant variant : variants_for(opt)) {
            RunTrace trace = epp_run(inst.model, scheme, variant, inst.preds, inst.outcomes);
            double lhs_log = -trace.cumulative_log_loss();
            double margin = kInf;
            if (per_partition) {
                auto report =
                    partition_report(*inst.model, scheme, variant, inst.preds, inst.outcomes);
                for (const auto& row : report) {
                    if (row.prior <= 0) continue;
                    margin = std::min(
                        margin, log_margin(lhs_log, std::log(row.prior) + row.log_likelihood));
                }
            } else {
                double rhs_log = log_partition_mixture(*inst.model, scheme, variant, inst.preds,
                                                       inst.outcomes);
                margin = log_margin(lhs_log, rhs_log);
            }
            bool ok = margin >= -tol;
            bool proper = scheme.kind() == SchemeKind::yesterday ||
                          scheme.kind() == SchemeKind::fixed_share;
            if (!per_partition && proper) ok = ok && margin <= tol;
            res.rows.push_back({i, scheme.to_string(), variant_name(variant), margin, ok});
        }
    }
    return res;
}

enum class MppBound { per_partition, comparator, mixture };

// Model-free reference algorithm against its partition bounds, with a
// uniform prior over the expert pool.
CheckResult check_mpp_bound(const CheckOptions& opt, MppBound which) {
    CheckResult res;
    int horizon = pick(opt.horizon, 5);
    guard_horizon(horizon, 8, "partition enumeration");
    int instances = pick(opt.instances, 20);
    double tol = pick_tol(opt.slack, 1e-9);
    Rng rng(opt.seed);
    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);
        int num_experts = 2 + rng.uniform_int(2);
        std::vector<std::string> experts = indexed_names("e", num_experts);
        PredictionTable preds =
            random_prediction_table(rng, horizon, experts, indexed_names("x", 2));
        std::vector<int> outcomes = random_outcomes(rng, horizon, 2);
        std::vector<double> prior(static_cast<std::size_t>(num_experts),
                                  1.0 / static_cast<double>(num_experts));
        RunTrace trace = mpp_run(experts, prior, scheme, preds, outcomes);
        double lhs_log = -trace.cumulative_log_loss();
        double margin = kInf;
        switch (which) {
            case MppBound::per_partition: {
                auto report = bayes_partition_report(prior, scheme, preds, outcomes);
                for (const auto& row : report) {
                    if (row.prior <= 0) continue;
                    margin = std::min(
                        margin, log_margin(lhs_log, std::log(row.prior) + row.log_likelihood));
                }
                break;
            }
            case MppBound::comparator: {
                double loss = trace.cumulative_log_loss();
                for (const Partition& p : enumerate_partitions(horizon)) {
                    if (scheme.partition_prior(p) <= 0) continue;
                    ComparatorBound bound = comparator_bound(
                        scheme, p, best_assignment(p, preds, outcomes), preds, outcomes);
                    double total = bound.total();
                    if (!std::isfinite(total)) continue;
                    margin = std::min(margin,
                                      (total - loss) / std::max(1.0, std::abs(total)));
                }
                break;
            }
            case MppBound::mixture: {
                double rhs_log = log_bayes_partition_mixture(prior, scheme, preds, outcomes);
                margin = log_margin(lhs_log, rhs_log);
                // The summed bound also dominates every single-partition term.
                auto report = bayes_partition_report(prior, scheme, preds, outcomes);
                for (const auto& row : report) {
                    if (row.prior <= 0) continue;
                    margin = std::min(
                        margin, log_margin(rhs_log, std::log(row.prior) + row.log_likelihood));
                }
                break;
            }
        }
        res.rows.push_back({i, scheme.to_string(), "-", margin, margin >= -tol});
    }
    return res;
}

// The configuration entering round t, composed over any future cell, equals
// the look-back mixture of the earlier configurations composed over the cell
// extended by their own round (conditioned on its outcome).
CheckResult check_backport_identity(const CheckOptions& opt) {
    CheckResult res;
    int horizon = pick(opt.horizon, 5);
    guard_horizon(horizon, 6, "future-cell enumeration");
    int instances = pick(opt.instances, 10);
    double tol = pick_tol(opt.slack, 1e-9);
    Rng rng(opt.seed);
    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);
        RandomInstance inst = random_instance(rng, horizon, 3, 2, 2);
        PredView view(inst.preds, inst.model->experts());
        for (Variant variant : variants_for(opt)) {
            EppState state(inst.model, scheme, variant);
            std::vector<Distribution> configs;
            std::vector<double> realized;
            for (int t = 1; t <= horizon; ++t) {
                configs.push_back(state.configuration());
                double loss = state.update(view, inst.outcomes[static_cast<std::size_t>(t - 1)]);
                realized.push_back(std::exp(-loss));
            }
            double worst = 0;
            for (int t = 1; t <= horizon; ++t) {
                int tail = horizon - t + 1;
                for (unsigned mask = 1; mask < (1u << tail); ++mask) {
                    std::vector<int> cell;
                    for (int b = 0; b < tail; ++b)
                        if (mask & (1u << b)) cell.push_back(t + b);
                    double lhs = log_cell_likelihood_seeded(
                        *inst.model, configs[static_cast<std::size_t>(t - 1)], t, cell, variant,
                        inst.preds, inst.outcomes);
                    std::vector<double> beta = scheme.weights(t);
                    std::vector<double> terms;
                    for (int j = 0; j < t; ++j) {
                        if (beta[static_cast<std::size_t>(j)] <= 0) continue;
                        double term;
                        if (j == 0) {
                            term = log_cell_likelihood(*inst.model, cell, variant, inst.preds,
                                                       inst.outcomes);
                        } else {
                            std::vector<int> joined;
                            joined.reserve(cell.size() + 1);
                            joined.push_back(j);
                            joined.insert(joined.end(), cell.begin(), cell.end());
                            term = log_cell_likelihood_seeded(
                                       *inst.model, configs[static_cast<std::size_t>(j - 1)], j,
                                       joined, variant, inst.preds, inst.outcomes) -
                                   std::log(realized[static_cast<std::size_t>(j - 1)]);
                        }
                        terms.push_back(std::log(beta[static_cast<std::size_t>(j)]) + term);
                    }
                    worst = std::max(worst, log_deviation(lhs, log_sum_exp(terms)));
                }
            }
            res.rows.push_back({i, scheme.to_string(), variant_name(variant), worst,
                                worst <= tol});
        }
    }
    return res;
}

// Splitting a state into two fractional copies leaves every per-round
// prediction unchanged.
CheckResult check_split_invariance(const CheckOptions& opt) {
    CheckResult res;
    int horizon = pick(opt.horizon, 30);
    guard_horizon(horizon, 100000, "run length");
    int instances = pick(opt.instances, 20);
    double tol = pick_tol(opt.slack, 1e-12);
    Rng rng(opt.seed);
    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);
        RandomInstance inst = random_instance(rng, horizon, 3, 2, 2);
        int state = rng.uniform_int(static_cast<int>(inst.model->state_names().size()));
        double w = 0.2 + 0.6 * rng.uniform();
        std::shared_ptr<TabularEhmm> split = split_state(*inst.model, state, w);
        for (Variant variant : variants_for(opt)) {
            RunTrace original = epp_run(inst.model, scheme, variant, inst.preds, inst.outcomes);
            RunTrace doubled = epp_run(split, scheme, variant, inst.preds, inst.outcomes);
            double worst = worst_trace_deviation(original, doubled);
            res.rows.push_back({i, scheme.to_string(), variant_name(variant), worst,
                                worst <= tol});
        }
    }
    return res;
}

// On the static Bayesian model both variants and the model-free reference
// are the same algorithm.
CheckResult check_bayes_agreement(const CheckOptions& opt) {
    CheckResult res;
    int horizon = pick(opt.horizon, 50);
    guard_horizon(horizon, 100000, "run length");
    int instances = pick(opt.instances, 20);
    double tol = pick_tol(opt.slack, 1e-12);
    Rng rng(opt.seed);
    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);
        std::vector<std::string> experts = indexed_names("e", 5);
        std::vector<double> prior = rng.simplex(5);
        int num_outcomes = 2 + (i % 2);
        PredictionTable preds =
            random_prediction_table(rng, horizon, experts, indexed_names("x", num_outcomes));
        std::vector<int> outcomes = random_outcomes(rng, horizon, num_outcomes);
        std::shared_ptr<TabularEhmm> model = bayes_ehmm(experts, prior);
        RunTrace frozen = epp_run(model, scheme, Variant::freeze, preds, outcomes);
        RunTrace sleeping = epp_run(model, scheme, Variant::sleep, preds, outcomes);
        RunTrace reference = mpp_run(experts, prior, scheme, preds, outcomes);
        double worst = std::max(worst_trace_deviation(frozen, sleeping),
                                std::max(worst_trace_deviation(frozen, reference),
                                         worst_trace_deviation(sleeping, reference)));
        res.rows.push_back({i, scheme.to_string(), "-", worst, worst <= tol});
    }
    return res;
}

std::shared_ptr<TabularEhmm> chain_model() {
    std::vector<Distribution> trans;
    trans.push_back(Distribution::point_mass(1)); // A -> B
    trans.push_back(Distribution::point_mass(1)); // B -> B
    std::vector<Distribution> prod;
    prod.push_back(Distribution::point_mass(0)); // A produces a
    prod.push_back(Distribution::point_mass(1)); // B produces b
    return std::make_shared<TabularEhmm>(std::vector<std::string>{"A", "B"},
                                         std::vector<std::string>{"a", "b"},
                                         Distribution::point_mass(0), std::move(trans),
                                         std::move(prod));
}

// Three facts in one check: the look-back scheme concentrated on yesterday
// reduces to plain forward filtering; the sleeping variant is the model-free
// reference run on whole-path meta-experts; and no such reduction exists for
// freezing (its round-2 prediction varies with the look-back weights).
CheckResult check_reduction(const CheckOptions& opt) {
    CheckResult res;
    int horizon = pick(opt.horizon, 4);
    guard_horizon(horizon, 16, "path enumeration");
    int instances = pick(opt.instances, 10);
    double meta_tol = pick_tol(opt.slack, 1e-9);
    const double exact_tol = 1e-12;
    Rng rng(opt.seed);

    // Fixed two-expert chain: the state advances deterministically, so the
    // frozen mixture at round 2 blends the two experts with the look-back
    // weights while round 1 is scheme-independent.
    std::shared_ptr<TabularEhmm> chain = chain_model();
    PredictionTable chain_preds(2, chain->experts(), {"0", "1"});
    for (int t = 1; t <= 2; ++t) {
        chain_preds.set_prob(t, 0, 1, 0.9);
        chain_preds.set_prob(t, 0, 0, 0.1);
        chain_preds.set_prob(t, 1, 1, 0.4);
        chain_preds.set_prob(t, 1, 0, 0.6);
    }
    std::vector<int> chain_outcomes = {1, 1};
    RunTrace low = epp_run(chain, MixingScheme::fixed_share(0.1), Variant::freeze, chain_preds,
                           chain_outcomes);
    RunTrace high = epp_run(chain, MixingScheme::fixed_share(0.5), Variant::freeze, chain_preds,
                            chain_outcomes);
    double round1_gap = std::abs(low.rows[0].predictive[1] - high.rows[0].predictive[1]);
    double round2_gap = std::abs(low.rows[1].predictive[1] - high.rows[1].predictive[1]);
    bool counterexample_ok = round1_gap <= exact_tol && round2_gap > 1e-3;
    res.notes.push_back("freeze round-2 prediction gap between fixedshare:0.1 and "
                        "fixedshare:0.5 = " +
                        format_double(round2_gap) + " (round-1 gap " +
                        format_double(round1_gap) + ")");

    for (int i = 0; i < instances; ++i) {
        MixingScheme scheme = scheme_for(opt, i);

        // Yesterday reduction on a longer random run, both variants.
        RandomInstance plain = random_instance(rng, 25, 3, 2, 2);
        RunTrace filter = forward_run(plain.model, plain.preds, plain.outcomes);
        double yesterday_dev = 0;
        for (Variant variant : {Variant::freeze, Variant::sleep}) {
            RunTrace reduced = epp_run(plain.model, MixingScheme::yesterday(), variant,
                                       plain.preds, plain.outcomes);
            yesterday_dev = std::max(yesterday_dev, worst_trace_deviation(filter, reduced));
        }

        // Whole-path meta-experts under the same scheme reproduce the
        // sleeping run exactly.
        auto model = random_tabular_ehmm(rng, 2, 2);
        PredictionTable preds =
            random_prediction_table(rng, horizon, model->experts(), indexed_names("x", 2));
        std::vector<int> outcomes = random_outcomes(rng, horizon, 2);
        MetaExperts meta = path_meta_experts(*model, preds, horizon);
        RunTrace lifted = mpp_run(meta.names, meta.prior, scheme, meta.preds, outcomes);
        RunTrace sleeping = epp_run(model, scheme, Variant::sleep, preds, outcomes);
        double meta_dev = worst_trace_deviation(lifted, sleeping);

        bool ok = yesterday_dev <= exact_tol && meta_dev <= meta_tol && counterexample_ok;
        res.rows.push_back(
            {i, scheme.to_string(), "-", std::max(yesterday_dev, meta_dev), ok});
    }
    return res;
}

// Expert pool where expert t is confident exactly at round t: the summed
// partition bound is dominated by the finest partition as the floor shrinks.
CheckResult check_adversarial(const CheckOptions& opt) {
    CheckResult res;
    int horizon = pick(opt.horizon, 5);
    guard_horizon(horizon, 8, "partition enumeration");
    double tol = pick_tol(opt.slack, 1e-4);
    MixingScheme scheme =
        opt.scheme.empty() ? MixingScheme::fixed_share(0.5) : MixingScheme::parse(opt.scheme);
    AdversarialInstance inst = adversarial_instance(horizon, opt.eps);

    double sum_log = log_bayes_partition_mixture(inst.prior, scheme, inst.preds, inst.outcomes);
    Partition finest = Partition::finest(horizon);
    double finest_log = scheme.log_partition_prior(finest) +
                        log_bayes_partition(inst.prior, inst.preds, finest, inst.outcomes);
    double gap = log_margin(sum_log, finest_log);

    double single_log = log_bayes_partition(inst.prior, inst.preds,
                                            Partition::single_cell(horizon), inst.outcomes);
    double single_floor = static_cast<double>(horizon - 1) * (-std::log(opt.eps));
    bool single_ok = -single_log >= single_floor - 1e-9;

    bool ok = std::isfinite(finest_log) && gap >= -1e-12 && gap <= tol && single_ok;
    res.rows.push_back({0, scheme.to_string(), "-", gap, ok});
    res.notes.push_back("summed bound vs finest-partition bound relative gap = " +
                        format_double(gap));
    res.notes.push_back("single-cell loss " + format_double(-single_log) +
                        " nats >= floor " + format_double(single_floor));
    return res;
}

} // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {
        "thm1", "thm4",  "cor1", "cor3", "cor4",
        "lemma6", "thm2", "thm3", "sleep-reduction", "adversarial"};
    return names;
}

CheckResult run_check(const std::string& name, const CheckOptions& options) {
    CheckResult res;
    if (name == "thm1")
        res = check_mpp_bound(options, MppBound::per_partition);
    else if (name == "thm4")
        res = check_partition_bound(options, false);
    else if (name == "cor1")
        res = check_mpp_bound(options, MppBound::comparator);
    else if (name == "cor3")
        res = check_partition_bound(options, true);
    else if (name == "cor4")
        res = check_mpp_bound(options, MppBound::mixture);
    else if (name == "lemma6")
        res = check_backport_identity(options);
    else if (name == "thm2")
        res = check_split_invariance(options);
    else if (name == "thm3")
        res = check_bayes_agreement(options);
    else if (name == "sleep-reduction")
        res = check_reduction(options);
    else if (name == "adversarial")
        res = check_adversarial(options);
    else
        throw InvalidInputError("unknown check '" + name + "'");
    res.name = name;
    res.pass = true;
    for (const auto& row : res.rows) res.pass = res.pass && row.pass;
    return res;
}

} // namespace epp
