#include "epp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "epp/errors.hpp"

namespace epp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_cell(const std::vector<int>& cell, int horizon, int seed_round) {
    if (cell.empty()) throw InvalidInputError("cell must be nonempty");
    int last = seed_round - 1;
    for (int t : cell) {
        if (t <= last) throw InvalidInputError("cell must be sorted and start at the seed round");
        if (t > horizon) throw InvalidInputError("cell element beyond the data horizon");
        last = t;
    }
}
} // namespace

double log_sum_exp(const std::vector<double>& values) {
    double peak = kNegInf;
    for (double v : values) peak = std::max(peak, v);
    if (peak == kNegInf) return kNegInf;
    double total = 0;
    for (double v : values) total += std::exp(v - peak);
    return peak + std::log(total);
}

double log_cell_likelihood_seeded(const Ehmm& model, const Distribution& seed, int seed_round,
                                  const std::vector<int>& cell, Variant variant,
                                  const PredictionTable& preds,
                                  const std::vector<int>& outcomes) {
    if (seed_round < 1) throw InvalidInputError("rounds are 1-based");
    check_cell(cell, std::min<int>(preds.horizon(), static_cast<int>(outcomes.size())),
               seed_round);
    PredView view(preds, model.experts());
    Distribution current = seed;
    double total = 0;
    int clock = seed_round;
    bool first = true;
    for (int t : cell) {
        if (variant == Variant::sleep) {
            for (; clock < t; ++clock) current = evolve(current, model);
        } else if (!first) {
            // Freeze: exactly one step between consecutive cell elements.
            current = evolve(current, model);
        }
        first = false;
        int x = outcomes[static_cast<std::size_t>(t - 1)];
        Distribution conditioned;
        try {
            conditioned = condition_on_outcome(current, model, view, t, x);
        } catch (const ZeroProbabilityError&) {
            return kNegInf;
        }
        double mass = conditioned.sum();
        total += std::log(mass);
        conditioned.scale(1.0 / mass);
        current = std::move(conditioned);
    }
    return total;
}

double log_cell_likelihood(const Ehmm& model, const std::vector<int>& cell, Variant variant,
                           const PredictionTable& preds, const std::vector<int>& outcomes) {
    return log_cell_likelihood_seeded(model, model.init(), 1, cell, variant, preds, outcomes);
}

double log_partition_likelihood(const Ehmm& model, const Partition& partition, Variant variant,
                                const PredictionTable& preds, const std::vector<int>& outcomes) {
    double total = 0;
    for (const auto& cell : partition.cells()) {
        double part = log_cell_likelihood(model, cell, variant, preds, outcomes);
        if (part == kNegInf) return kNegInf;
        total += part;
    }
    return total;
}

std::vector<std::vector<double>> cell_predictives(const Ehmm& model, const std::vector<int>& cell,
                                                  Variant variant, const PredictionTable& preds,
                                                  const std::vector<int>& outcomes) {
    check_cell(cell, std::min<int>(preds.horizon(), static_cast<int>(outcomes.size())), 1);
    PredView view(preds, model.experts());
    Distribution current = model.init();
    std::vector<std::vector<double>> result;
    int clock = 1;
    bool first = true;
    for (int t : cell) {
        if (variant == Variant::sleep) {
            for (; clock < t; ++clock) current = evolve(current, model);
        } else if (!first) {
            current = evolve(current, model);
        }
        first = false;
        result.push_back(predictive_from_weights(expert_weights(current, model), view, t));
        int x = outcomes[static_cast<std::size_t>(t - 1)];
        Distribution conditioned = condition_on_outcome(current, model, view, t, x);
        conditioned.normalize();
        current = std::move(conditioned);
    }
    return result;
}

namespace {

// Memoizes cell likelihoods by round bitmask while sweeping partitions.
template <typename CellFn>
std::vector<PartitionRow> report_with(const MixingScheme& scheme, int horizon, CellFn&& cell_fn) {
    std::vector<Partition> partitions = enumerate_partitions(horizon);
    std::unordered_map<std::uint64_t, double> memo;
    std::vector<PartitionRow> rows;
    rows.reserve(partitions.size());
    for (const auto& partition : partitions) {
        double log_like = 0;
        for (const auto& cell : partition.cells()) {
            std::uint64_t mask = 0;
            for (int t : cell) mask |= std::uint64_t{1} << t;
            auto it = memo.find(mask);
            if (it == memo.end()) it = memo.emplace(mask, cell_fn(cell)).first;
            if (it->second == kNegInf) {
                log_like = kNegInf;
                break;
            }
            log_like += it->second;
        }
        rows.push_back({partition.prev_vector(), scheme.partition_prior(partition), log_like});
    }
    return rows;
}

double mixture_from_rows(const std::vector<PartitionRow>& rows) {
    std::vector<double> terms;
    terms.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.prior <= 0 || row.log_likelihood == kNegInf) continue;
        terms.push_back(std::log(row.prior) + row.log_likelihood);
    }
    return log_sum_exp(terms);
}

} // namespace

std::vector<PartitionRow> partition_report(const Ehmm& model, const MixingScheme& scheme,
                                           Variant variant, const PredictionTable& preds,
                                           const std::vector<int>& outcomes) {
    return report_with(scheme, static_cast<int>(outcomes.size()), [&](const std::vector<int>& cell) {
        return log_cell_likelihood(model, cell, variant, preds, outcomes);
    });
}

double log_partition_mixture(const Ehmm& model, const MixingScheme& scheme, Variant variant,
                             const PredictionTable& preds, const std::vector<int>& outcomes) {
    return mixture_from_rows(partition_report(model, scheme, variant, preds, outcomes));
}

double log_bayes_cell(const std::vector<double>& prior, const PredictionTable& preds,
                      const std::vector<int>& cell, const std::vector<int>& outcomes) {
    if (static_cast<int>(prior.size()) != preds.num_experts())
        throw InvalidInputError("prior size does not match expert count");
    check_cell(cell, std::min<int>(preds.horizon(), static_cast<int>(outcomes.size())), 1);
    std::vector<double> terms;
    for (std::size_t e = 0; e < prior.size(); ++e) {
        if (prior[e] <= 0) continue;
        double log_prod = std::log(prior[e]);
        for (int t : cell) {
            double p = preds.prob(t, static_cast<int>(e), outcomes[static_cast<std::size_t>(t - 1)]);
            if (p <= 0) {
                log_prod = kNegInf;
                break;
            }
            log_prod += std::log(p);
        }
        if (log_prod != kNegInf) terms.push_back(log_prod);
    }
    return log_sum_exp(terms);
}

double log_bayes_partition(const std::vector<double>& prior, const PredictionTable& preds,
                           const Partition& partition, const std::vector<int>& outcomes) {
    double total = 0;
    for (const auto& cell : partition.cells()) {
        double part = log_bayes_cell(prior, preds, cell, outcomes);
        if (part == kNegInf) return kNegInf;
        total += part;
    }
    return total;
}

std::vector<PartitionRow> bayes_partition_report(const std::vector<double>& prior,
                                                 const MixingScheme& scheme,
                                                 const PredictionTable& preds,
                                                 const std::vector<int>& outcomes) {
    return report_with(scheme, static_cast<int>(outcomes.size()), [&](const std::vector<int>& cell) {
        return log_bayes_cell(prior, preds, cell, outcomes);
    });
}

double log_bayes_partition_mixture(const std::vector<double>& prior, const MixingScheme& scheme,
                                   const PredictionTable& preds,
                                   const std::vector<int>& outcomes) {
    return mixture_from_rows(bayes_partition_report(prior, scheme, preds, outcomes));
}

ComparatorBound comparator_bound(const MixingScheme& scheme, const Partition& partition,
                                 const std::vector<int>& assignment,
                                 const PredictionTable& preds, const std::vector<int>& outcomes) {
    if (assignment.size() != partition.cells().size())
        throw InvalidInputError("one expert per cell required");
    ComparatorBound bound{0, 0};
    for (std::size_t c = 0; c < assignment.size(); ++c) {
        int e = assignment[c];
        if (e < 0 || e >= preds.num_experts()) throw InvalidInputError("expert index out of range");
        for (int t : partition.cells()[c]) {
            double p = preds.prob(t, e, outcomes[static_cast<std::size_t>(t - 1)]);
            bound.loss += -std::log(p);
        }
    }
    bound.penalty = -scheme.log_partition_prior(partition) +
                    static_cast<double>(partition.num_cells()) *
                        std::log(static_cast<double>(preds.num_experts()));
    return bound;
}

std::vector<int> best_assignment(const Partition& partition, const PredictionTable& preds,
                                 const std::vector<int>& outcomes) {
    std::vector<int> assignment;
    for (const auto& cell : partition.cells()) {
        int best = 0;
        double best_loss = std::numeric_limits<double>::infinity();
        for (int e = 0; e < preds.num_experts(); ++e) {
            double loss = 0;
            for (int t : cell)
                loss += -std::log(preds.prob(t, e, outcomes[static_cast<std::size_t>(t - 1)]));
            if (loss < best_loss) {
                best_loss = loss;
                best = e;
            }
        }
        assignment.push_back(best);
    }
    return assignment;
}

MetaExperts path_meta_experts(const Ehmm& model, const PredictionTable& preds, int horizon) {
    auto count = model.state_count();
    if (!count) throw InvalidInputError("path enumeration needs a materialized state space");
    double paths = std::pow(static_cast<double>(*count), horizon);
    if (paths > 1e5) throw CapacityError("too many state paths to enumerate");
    if (horizon < 1) throw InvalidInputError("horizon must be >= 1");
    if (preds.horizon() < horizon) throw InvalidInputError("prediction table too short");

    Distribution init = model.init();
    std::vector<std::string> outcome_names = preds.outcomes();
    PredView view(preds, model.experts());

    MetaExperts meta;
    std::vector<StateId> path(static_cast<std::size_t>(horizon));
    // Iterative odometer over Q^horizon keeps enumeration order fixed.
    std::int64_t total = 1;
    for (int i = 0; i < horizon; ++i) total *= *count;
    std::vector<std::vector<double>> rows;
    for (std::int64_t index = 0; index < total; ++index) {
        std::int64_t rest = index;
        for (int i = horizon - 1; i >= 0; --i) {
            path[static_cast<std::size_t>(i)] = rest % *count;
            rest /= *count;
        }
        double mass = init.prob(path[0]);
        for (int i = 0; i + 1 < horizon; ++i)
            mass *= model.trans(path[static_cast<std::size_t>(i)])
                        .prob(path[static_cast<std::size_t>(i + 1)]);
        std::string name;
        for (int i = 0; i < horizon; ++i) {
            if (i) name += "/";
            name += model.state_name(path[static_cast<std::size_t>(i)]);
        }
        meta.names.push_back(std::move(name));
        meta.prior.push_back(mass);
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(horizon) * outcome_names.size());
        for (int t = 1; t <= horizon; ++t) {
            std::vector<double> w(static_cast<std::size_t>(model.num_experts()), 0.0);
            Distribution prod_row = model.prod(path[static_cast<std::size_t>(t - 1)]);
            for (const auto& [e, pe] : prod_row.entries())
                w[static_cast<std::size_t>(e)] = pe;
            std::vector<double> pred = predictive_from_weights(w, view, t);
            row.insert(row.end(), pred.begin(), pred.end());
        }
        rows.push_back(std::move(row));
    }
    meta.preds = PredictionTable(horizon, meta.names, outcome_names);
    for (std::size_t e = 0; e < rows.size(); ++e)
        for (int t = 1; t <= horizon; ++t)
            for (std::size_t x = 0; x < outcome_names.size(); ++x)
                meta.preds.set_prob(t, static_cast<int>(e), static_cast<int>(x),
                                    rows[e][static_cast<std::size_t>(t - 1) * outcome_names.size() + x]);
    return meta;
}

AdversarialInstance adversarial_instance(int horizon, double eps) {
    if (horizon < 1) throw InvalidInputError("horizon must be >= 1");
    if (!(eps > 0 && eps < 0.5)) throw InvalidInputError("eps must lie in (0, 0.5)");
    AdversarialInstance inst;
    for (int i = 1; i <= horizon; ++i) {
        std::string name = "e";
        if (horizon >= 10 && i < 10) name += "0";
        name += std::to_string(i);
        inst.experts.push_back(std::move(name));
    }
    inst.prior.assign(static_cast<std::size_t>(horizon), 1.0 / horizon);
    inst.preds = PredictionTable(horizon, inst.experts, {"0", "1"});
    for (int t = 1; t <= horizon; ++t) {
        for (int e = 0; e < horizon; ++e) {
            double p1 = (e + 1 == t) ? 1.0 - eps : eps;
            inst.preds.set_prob(t, e, 0, 1.0 - p1);
            inst.preds.set_prob(t, e, 1, p1);
        }
        inst.outcomes.push_back(1);
    }
    return inst;
}

} // namespace epp
