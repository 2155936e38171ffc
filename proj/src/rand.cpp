#include "epp/rand.hpp"

#include <cmath>

#include "epp/errors.hpp"

namespace epp {

int Rng::uniform_int(int n) {
    if (n <= 0) throw InvalidInputError("uniform_int needs a positive bound");
    auto bound = static_cast<std::uint64_t>(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    while (true) {
        std::uint64_t r = engine_();
        if (r < limit) return static_cast<int>(r % bound);
    }
}

std::vector<double> Rng::simplex(int n) {
    if (n <= 0) throw InvalidInputError("simplex needs a positive dimension");
    std::vector<double> out(static_cast<std::size_t>(n));
    double total = 0;
    for (double& v : out) {
        v = -std::log(1.0 - uniform()); // Exp(1), strictly positive
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

int Rng::sample(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (!(total > 0)) throw InvalidInputError("cannot sample from zero weights");
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

std::vector<std::string> indexed_names(const std::string& prefix, int count) {
    std::vector<std::string> names;
    int width = count >= 100 ? 3 : count >= 10 ? 2 : 1;
    for (int i = 1; i <= count; ++i) {
        std::string num = std::to_string(i);
        names.push_back(prefix + std::string(static_cast<std::size_t>(width) - num.size(), '0') +
                        num);
    }
    return names;
}

std::shared_ptr<TabularEhmm> random_tabular_ehmm(Rng& rng, int num_states, int num_experts) {
    auto dense = [&](int n) {
        std::vector<double> probs = rng.simplex(n);
        std::vector<Distribution::Entry> entries;
        for (int i = 0; i < n; ++i) entries.emplace_back(i, probs[static_cast<std::size_t>(i)]);
        return Distribution::checked(std::move(entries));
    };
    std::vector<Distribution> trans_rows, prod_rows;
    for (int q = 0; q < num_states; ++q) {
        trans_rows.push_back(dense(num_states));
        prod_rows.push_back(dense(num_experts));
    }
    return std::make_shared<TabularEhmm>(indexed_names("q", num_states),
                                         indexed_names("e", num_experts), dense(num_states),
                                         std::move(trans_rows), std::move(prod_rows));
}

PredictionTable random_prediction_table(Rng& rng, int horizon,
                                        const std::vector<std::string>& experts,
                                        const std::vector<std::string>& outcomes) {
    PredictionTable table(horizon, experts, outcomes);
    for (int t = 1; t <= horizon; ++t)
        for (int e = 0; e < table.num_experts(); ++e) {
            std::vector<double> row = rng.simplex(table.num_outcomes());
            for (int x = 0; x < table.num_outcomes(); ++x)
                table.set_prob(t, e, x, row[static_cast<std::size_t>(x)]);
        }
    return table;
}

std::vector<int> random_outcomes(Rng& rng, int horizon, int num_outcomes) {
    std::vector<int> outcomes(static_cast<std::size_t>(horizon));
    for (int& x : outcomes) x = rng.uniform_int(num_outcomes);
    return outcomes;
}

std::vector<int> sample_hmm(const HmmSpec& spec, int horizon, Rng& rng) {
    spec.validate();
    std::vector<int> outcomes;
    int state = rng.sample(spec.init);
    for (int t = 0; t < horizon; ++t) {
        outcomes.push_back(rng.sample(spec.emit[static_cast<std::size_t>(state)]));
        state = rng.sample(spec.trans[static_cast<std::size_t>(state)]);
    }
    return outcomes;
}

} // namespace epp
