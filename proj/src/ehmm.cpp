#include "epp/ehmm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "epp/errors.hpp"

namespace epp {

int Ehmm::expert_index(const std::string& name) const {
    auto it = std::find(experts_.begin(), experts_.end(), name);
    return it == experts_.end() ? -1 : static_cast<int>(it - experts_.begin());
}

// --- TabularEhmm ---

TabularEhmm::TabularEhmm(std::vector<std::string> state_names,
                         std::vector<std::string> expert_names, Distribution init,
                         std::vector<Distribution> trans_rows,
                         std::vector<Distribution> prod_rows)
    : state_names_(std::move(state_names)),
      init_(std::move(init)),
      trans_rows_(std::move(trans_rows)),
      prod_rows_(std::move(prod_rows)) {
    experts_ = std::move(expert_names);
    if (state_names_.empty()) throw InvalidInputError("model needs at least one state");
    if (experts_.empty()) throw InvalidInputError("model needs at least one expert");
    if (trans_rows_.size() != state_names_.size() || prod_rows_.size() != state_names_.size())
        throw InvalidInputError("row count does not match state count");
    auto n = static_cast<StateId>(state_names_.size());
    auto check_keys = [&](const Distribution& d, StateId bound, const char* what) {
        for (const auto& [key, mass] : d.entries())
            if (key < 0 || key >= bound)
                throw InvalidInputError(std::string(what) + " references key " +
                                        std::to_string(key) + " out of range");
    };
    check_keys(init_, n, "initial distribution");
    for (const auto& row : trans_rows_) check_keys(row, n, "transition row");
    for (const auto& row : prod_rows_)
        check_keys(row, static_cast<StateId>(experts_.size()), "product row");
}

void TabularEhmm::check_state(StateId q) const {
    if (q < 0 || q >= static_cast<StateId>(state_names_.size()))
        throw InvalidInputError("state id " + std::to_string(q) + " out of range");
}

Distribution TabularEhmm::trans(StateId q) const {
    check_state(q);
    return trans_rows_[static_cast<std::size_t>(q)];
}

Distribution TabularEhmm::prod(StateId q) const {
    check_state(q);
    return prod_rows_[static_cast<std::size_t>(q)];
}

std::string TabularEhmm::state_name(StateId q) const {
    check_state(q);
    return state_names_[static_cast<std::size_t>(q)];
}

int TabularEhmm::state_index(const std::string& name) const {
    auto it = std::find(state_names_.begin(), state_names_.end(), name);
    return it == state_names_.end() ? -1 : static_cast<int>(it - state_names_.begin());
}

// --- builders ---

std::shared_ptr<TabularEhmm> bayes_ehmm(const std::vector<std::string>& expert_names,
                                        const std::vector<double>& prior) {
    if (expert_names.size() != prior.size())
        throw InvalidInputError("prior size does not match expert count");
    std::vector<Distribution::Entry> init;
    std::vector<Distribution> trans_rows, prod_rows;
    for (std::size_t e = 0; e < expert_names.size(); ++e) {
        auto id = static_cast<StateId>(e);
        init.emplace_back(id, prior[e]);
        trans_rows.push_back(Distribution::point_mass(id));
        prod_rows.push_back(Distribution::point_mass(id));
    }
    return std::make_shared<TabularEhmm>(expert_names, expert_names,
                                         Distribution::checked(std::move(init)),
                                         std::move(trans_rows), std::move(prod_rows));
}

void HmmSpec::validate() const {
    if (states.empty() || outcomes.empty()) throw InvalidInputError("empty HMM spec");
    auto n = states.size();
    if (init.size() != n || trans.size() != n || emit.size() != n)
        throw InvalidInputError("HMM spec row counts do not match state count");
    auto check_row = [](const std::vector<double>& row, std::size_t len, const char* what) {
        if (row.size() != len) throw InvalidInputError(std::string(what) + ": wrong row length");
        double total = 0;
        for (double p : row) {
            if (p < 0 || !std::isfinite(p))
                throw InvalidInputError(std::string(what) + ": bad probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw InvalidInputError(std::string(what) + ": row does not sum to 1");
    };
    check_row(init, n, "HMM init");
    for (const auto& row : trans) check_row(row, n, "HMM transition");
    for (const auto& row : emit) check_row(row, outcomes.size(), "HMM emission");
}

std::shared_ptr<TabularEhmm> HmmSpec::to_ehmm() const {
    validate();
    auto sparse = [](const std::vector<double>& row) {
        std::vector<Distribution::Entry> entries;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i] > 0) entries.emplace_back(static_cast<StateId>(i), row[i]);
        return Distribution::checked(std::move(entries));
    };
    std::vector<Distribution> trans_rows, prod_rows;
    for (std::size_t q = 0; q < states.size(); ++q) {
        trans_rows.push_back(sparse(trans[q]));
        prod_rows.push_back(Distribution::point_mass(static_cast<StateId>(q)));
    }
    return std::make_shared<TabularEhmm>(states, states, sparse(init), std::move(trans_rows),
                                         std::move(prod_rows));
}

PredictionTable HmmSpec::prediction_table(int horizon) const {
    validate();
    PredictionTable table(horizon, states, outcomes);
    for (int t = 1; t <= horizon; ++t)
        for (std::size_t q = 0; q < states.size(); ++q)
            for (std::size_t x = 0; x < outcomes.size(); ++x)
                table.set_prob(t, static_cast<int>(q), static_cast<int>(x), emit[q][x]);
    return table;
}

HmmSpec slot_machine() {
    HmmSpec spec;
    spec.states = {"cold", "hot", "jackpot"};
    spec.outcomes = {"0", "1", "2", "3", "4", "5", "10"};
    spec.init = {1.0, 0.0, 0.0};
    spec.trans = {{0.99, 0.01, 0.0}, {0.0, 0.9, 0.1}, {1.0, 0.0, 0.0}};
    spec.emit = {{1.0, 0, 0, 0, 0, 0, 0},
                 {0, 0.2, 0.2, 0.2, 0.2, 0.2, 0},
                 {0, 0, 0, 0, 0, 0, 1.0}};
    return spec;
}

// --- LaplaceEhmm ---

namespace {
constexpr std::int64_t kLaplaceCountLimit = std::int64_t{1} << 21;
}

LaplaceEhmm::LaplaceEhmm() { experts_ = {"e0", "e1"}; }

StateId LaplaceEhmm::encode(std::int64_t n0, std::int64_t n1, int bit) {
    if (n0 < 0 || n1 < 0 || n0 >= kLaplaceCountLimit || n1 >= kLaplaceCountLimit ||
        (bit != 0 && bit != 1))
        throw CapacityError("count state out of packable range");
    return (n0 << 22) | (n1 << 1) | bit;
}

void LaplaceEhmm::decode(StateId q, std::int64_t& n0, std::int64_t& n1, int& bit) {
    bit = static_cast<int>(q & 1);
    n1 = (q >> 1) & (kLaplaceCountLimit - 1);
    n0 = q >> 22;
}

Distribution LaplaceEhmm::init() const {
    return Distribution::checked({{encode(0, 0, 0), 0.5}, {encode(0, 0, 1), 0.5}});
}

Distribution LaplaceEhmm::trans(StateId q) const {
    std::int64_t n0, n1;
    int bit;
    decode(q, n0, n1, bit);
    // The predicted bit becomes an observed count, then the next bit is drawn
    // with add-one smoothing.
    std::int64_t m0 = n0 + (bit == 0), m1 = n1 + (bit == 1);
    double denom = static_cast<double>(m0 + m1 + 2);
    return Distribution::checked({{encode(m0, m1, 0), static_cast<double>(m0 + 1) / denom},
                                  {encode(m0, m1, 1), static_cast<double>(m1 + 1) / denom}});
}

Distribution LaplaceEhmm::prod(StateId q) const {
    return Distribution::point_mass(static_cast<StateId>(q & 1));
}

std::string LaplaceEhmm::state_name(StateId q) const {
    std::int64_t n0, n1;
    int bit;
    decode(q, n0, n1, bit);
    return "(" + std::to_string(n0) + "," + std::to_string(n1) + ";" + std::to_string(bit) + ")";
}

PredictionTable LaplaceEhmm::prediction_table(int horizon) {
    PredictionTable table(horizon, {"e0", "e1"}, {"0", "1"});
    for (int t = 1; t <= horizon; ++t) {
        table.set_prob(t, 0, 0, 1.0);
        table.set_prob(t, 1, 1, 1.0);
    }
    return table;
}

// --- mixture ---

namespace {

class MixtureEhmm : public Ehmm {
public:
    MixtureEhmm(std::vector<std::shared_ptr<const Ehmm>> components, std::vector<double> prior)
        : components_(std::move(components)), prior_(std::move(prior)) {
        if (components_.empty()) throw InvalidInputError("mixture needs components");
        if (components_.size() != prior_.size())
            throw InvalidInputError("mixture prior size mismatch");
        if (components_.size() > 120) throw CapacityError("too many mixture components");
        std::vector<std::string> sorted = components_[0]->experts();
        std::sort(sorted.begin(), sorted.end());
        for (const auto& c : components_) {
            std::vector<std::string> names = c->experts();
            std::sort(names.begin(), names.end());
            if (names != sorted)
                throw InvalidInputError("mixture components must share one expert set");
        }
        experts_ = sorted;
        for (const auto& c : components_) {
            std::vector<StateId> map(c->experts().size());
            for (std::size_t e = 0; e < c->experts().size(); ++e)
                map[e] = expert_index(c->experts()[e]);
            expert_map_.push_back(std::move(map));
        }
        double total = 0;
        for (double w : prior_) {
            if (w < 0) throw InvalidInputError("negative mixture weight");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw InvalidInputError("mixture prior does not sum to 1");
    }

    Distribution init() const override {
        Distribution out;
        for (std::size_t i = 0; i < components_.size(); ++i) {
            Distribution part = reencode(components_[i]->init(), i);
            out.add_scaled(part, prior_[i]);
        }
        return out;
    }

    Distribution trans(StateId q) const override {
        auto [i, inner] = split(q);
        return reencode(components_[i]->trans(inner), i);
    }

    Distribution prod(StateId q) const override {
        auto [i, inner] = split(q);
        Distribution row = components_[i]->prod(inner);
        std::vector<Distribution::Entry> entries;
        for (const auto& [e, mass] : row.entries())
            entries.emplace_back(expert_map_[i][static_cast<std::size_t>(e)], mass);
        return Distribution::unnormalized(std::move(entries));
    }

    std::string state_name(StateId q) const override {
        auto [i, inner] = split(q);
        return std::to_string(i) + ":" + components_[i]->state_name(inner);
    }

    std::optional<std::int64_t> state_count() const override {
        std::int64_t total = 0;
        for (const auto& c : components_) {
            auto n = c->state_count();
            if (!n) return std::nullopt;
            total += *n;
        }
        return total;
    }

private:
    static constexpr int kShift = 56;

    std::pair<std::size_t, StateId> split(StateId q) const {
        auto i = static_cast<std::size_t>(q >> kShift);
        if (i >= components_.size()) throw InvalidInputError("mixture state id out of range");
        return {i, q & ((StateId{1} << kShift) - 1)};
    }

    Distribution reencode(const Distribution& d, std::size_t i) const {
        std::vector<Distribution::Entry> entries;
        entries.reserve(d.entries().size());
        for (const auto& [inner, mass] : d.entries()) {
            if (inner < 0 || inner >= (StateId{1} << kShift))
                throw CapacityError("component state id does not fit in mixture encoding");
            entries.emplace_back((static_cast<StateId>(i) << kShift) | inner, mass);
        }
        return Distribution::unnormalized(std::move(entries));
    }

    std::vector<std::shared_ptr<const Ehmm>> components_;
    std::vector<double> prior_;
    std::vector<std::vector<StateId>> expert_map_;
};

} // namespace

std::shared_ptr<Ehmm> bayes_mixture(std::vector<std::shared_ptr<const Ehmm>> components,
                                    std::vector<double> prior) {
    return std::make_shared<MixtureEhmm>(std::move(components), std::move(prior));
}

// --- state splitting ---

std::shared_ptr<TabularEhmm> split_state(const TabularEhmm& model, int state, double w) {
    auto count = *model.state_count();
    if (state < 0 || state >= count) throw InvalidInputError("split target out of range");
    if (!(w > 0 && w < 1)) throw InvalidInputError("split weight must lie strictly in (0,1)");

    auto names = model.state_names();
    auto unique_name = [&](std::string base) {
        while (std::find(names.begin(), names.end(), base) != names.end()) base += "'";
        return base;
    };
    std::string base = names[static_cast<std::size_t>(state)];
    names[static_cast<std::size_t>(state)] = unique_name(base + "_a");
    names.push_back(unique_name(base + "_b"));
    StateId twin = count; // second copy appended at the end

    // Redirect any mass aimed at `state` to the two copies in ratio w : 1-w.
    auto redirect = [&](const Distribution& d) {
        std::vector<Distribution::Entry> entries;
        for (const auto& [key, mass] : d.entries()) {
            if (key == state) {
                entries.emplace_back(state, w * mass);
                entries.emplace_back(twin, (1 - w) * mass);
            } else {
                entries.emplace_back(key, mass);
            }
        }
        return Distribution::unnormalized(std::move(entries));
    };

    std::vector<Distribution> trans_rows, prod_rows;
    for (StateId q = 0; q < count; ++q) {
        trans_rows.push_back(redirect(model.trans(q)));
        prod_rows.push_back(model.prod(q));
    }
    trans_rows.push_back(trans_rows[static_cast<std::size_t>(state)]);
    prod_rows.push_back(prod_rows[static_cast<std::size_t>(state)]);

    return std::make_shared<TabularEhmm>(std::move(names), model.experts(),
                                         redirect(model.init()), std::move(trans_rows),
                                         std::move(prod_rows));
}

// --- layer accounting ---

LayerInfo layers(const Ehmm& model, int t) {
    if (t < 1) throw InvalidInputError("layer index must be >= 1");
    std::set<StateId> frontier, seen;
    Distribution start = model.init();
    for (const auto& [q, mass] : start.entries()) frontier.insert(q);
    seen = frontier;
    for (int step = 1; step < t; ++step) {
        std::set<StateId> next;
        for (StateId q : frontier) {
            Distribution row = model.trans(q);
            for (const auto& [r, mass] : row.entries()) next.insert(r);
        }
        frontier = std::move(next);
        seen.insert(frontier.begin(), frontier.end());
    }
    LayerInfo info;
    info.exact.assign(frontier.begin(), frontier.end());
    info.cumulative.assign(seen.begin(), seen.end());
    for (StateId q : info.exact)
        info.exact_transitions += static_cast<std::int64_t>(model.trans(q).support_size());
    for (StateId q : info.cumulative)
        info.cumulative_transitions += static_cast<std::int64_t>(model.trans(q).support_size());
    return info;
}

// --- behavioural equivalence over expert sequences ---

bool equivalent(const Ehmm& a, const Ehmm& b, int horizon, double tol) {
    std::vector<std::string> ea = a.experts(), eb = b.experts();
    {
        auto sa = ea, sb = eb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) throw InvalidInputError("models have different expert sets");
    }
    // b's expert index for each of a's experts.
    std::vector<StateId> remap(ea.size());
    for (std::size_t e = 0; e < ea.size(); ++e)
        remap[e] = static_cast<StateId>(b.expert_index(ea[e]));

    auto num_experts = ea.size();
    std::vector<Distribution> fa{a.init()}, fb{b.init()};
    std::size_t level_size = 1;
    for (int t = 1; t <= horizon; ++t) {
        level_size *= num_experts;
        if (level_size > 1000000) throw CapacityError("expert-sequence enumeration too large");
        std::vector<Distribution> na(level_size), nb(level_size);
        for (std::size_t prefix = 0; prefix < fa.size(); ++prefix) {
            for (std::size_t e = 0; e < num_experts; ++e) {
                // Keep only the mass that produces expert e, then step.
                auto keep = [](const Distribution& mu, const Ehmm& m, StateId expert) {
                    std::vector<Distribution::Entry> entries;
                    for (const auto& [q, mass] : mu.entries()) {
                        double pe = m.prod(q).prob(expert);
                        if (mass * pe > 0) entries.emplace_back(q, mass * pe);
                    }
                    return Distribution::unnormalized(std::move(entries));
                };
                Distribution ka = keep(fa[prefix], a, static_cast<StateId>(e));
                Distribution kb = keep(fb[prefix], b, remap[e]);
                if (std::abs(ka.sum() - kb.sum()) > tol) return false;
                std::size_t slot = prefix * num_experts + e;
                if (t < horizon) {
                    na[slot] = evolve(ka, a);
                    nb[slot] = evolve(kb, b);
                }
            }
        }
        fa = std::move(na);
        fb = std::move(nb);
    }
    return true;
}

// --- shared inference steps ---

Distribution evolve(const Distribution& mu, const Ehmm& model) {
    std::vector<Distribution::Entry> gathered;
    for (const auto& [q, mass] : mu.entries()) {
        if (mass == 0) continue;
        Distribution row = model.trans(q);
        for (const auto& [r, p] : row.entries()) gathered.emplace_back(r, mass * p);
    }
    std::stable_sort(gathered.begin(), gathered.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Distribution::Entry> combined;
    for (const auto& [key, mass] : gathered) {
        if (!combined.empty() && combined.back().first == key)
            combined.back().second += mass;
        else
            combined.emplace_back(key, mass);
    }
    return Distribution::unnormalized(std::move(combined));
}

double emission_weight(const Ehmm& model, StateId q, const PredView& preds, int t, int x) {
    double total = 0;
    Distribution row = model.prod(q);
    for (const auto& [e, pe] : row.entries())
        total += pe * preds.prob(t, static_cast<int>(e), x);
    return total;
}

std::vector<double> expert_weights(const Distribution& mu, const Ehmm& model) {
    std::vector<double> weights(static_cast<std::size_t>(model.num_experts()), 0.0);
    for (const auto& [q, mass] : mu.entries()) {
        Distribution row = model.prod(q);
        for (const auto& [e, pe] : row.entries())
            weights[static_cast<std::size_t>(e)] += mass * pe;
    }
    return weights;
}

std::vector<double> predictive_from_weights(const std::vector<double>& weights,
                                            const PredView& preds, int t) {
    std::vector<double> out(static_cast<std::size_t>(preds.num_outcomes()), 0.0);
    for (std::size_t e = 0; e < weights.size(); ++e) {
        if (weights[e] == 0) continue;
        for (int x = 0; x < preds.num_outcomes(); ++x)
            out[static_cast<std::size_t>(x)] += weights[e] * preds.prob(t, static_cast<int>(e), x);
    }
    return out;
}

Distribution condition_on_outcome(const Distribution& mu, const Ehmm& model,
                                  const PredView& preds, int t, int x) {
    std::vector<Distribution::Entry> entries;
    double total = 0;
    for (const auto& [q, mass] : mu.entries()) {
        double v = mass * emission_weight(model, q, preds, t, x);
        if (v > 0) entries.emplace_back(q, v);
        total += v;
    }
    if (!(total > 0)) throw ZeroProbabilityError(t);
    return Distribution::unnormalized(std::move(entries));
}

} // namespace epp
