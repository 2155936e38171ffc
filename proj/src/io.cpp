#include "epp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "epp/errors.hpp"
#include "epp/format.hpp"

namespace epp {

namespace {

double parse_double(const std::string& text) {
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw InvalidInputError("bad number '" + text + "'");
    return value;
}

int parse_int(const std::string& text) {
    int value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw InvalidInputError("bad integer '" + text + "'");
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

// Sectioned token files: "name:" opens a section, '#' comments to end of line.
std::map<std::string, std::vector<std::string>> read_sections(
    std::istream& in, const std::set<std::string>& known) {
    std::map<std::string, std::vector<std::string>> sections;
    std::string line;
    std::string current;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            if (token.back() == ':') {
                current = token.substr(0, token.size() - 1);
                if (!known.count(current))
                    throw InvalidInputError("unknown section '" + current + "'");
                sections[current]; // section may legitimately stay empty
            } else {
                if (current.empty())
                    throw InvalidInputError("token '" + token + "' before any section");
                sections[current].push_back(token);
            }
        }
    }
    return sections;
}

const std::vector<std::string>& need_section(
    const std::map<std::string, std::vector<std::string>>& sections, const std::string& name) {
    auto it = sections.find(name);
    if (it == sections.end()) throw InvalidInputError("missing section '" + name + "'");
    return it->second;
}

void check_unique(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& name : names)
        if (!seen.insert(name).second)
            throw InvalidInputError(std::string("duplicate ") + what + " '" + name + "'");
}

int lookup(const std::vector<std::string>& names, const std::string& name, const char* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw InvalidInputError(std::string("unknown ") + what + " '" + name + "'");
    return static_cast<int>(it - names.begin());
}

// Indices of names in alphabetical order.
std::vector<int> sorted_order(const std::vector<std::string>& names) {
    std::vector<int> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return names[static_cast<std::size_t>(a)] < names[static_cast<std::size_t>(b)]; });
    return order;
}

} // namespace

std::shared_ptr<TabularEhmm> parse_ehmm(std::istream& in) {
    auto sections = read_sections(in, {"experts", "states", "init", "trans", "prod"});
    std::vector<std::string> experts = need_section(sections, "experts");
    std::vector<std::string> states = need_section(sections, "states");
    check_unique(experts, "expert");
    check_unique(states, "state");

    const auto& init_tokens = need_section(sections, "init");
    if (init_tokens.size() % 2 != 0)
        throw InvalidInputError("init section expects (state, prob) pairs");
    std::vector<Distribution::Entry> init;
    for (std::size_t i = 0; i < init_tokens.size(); i += 2)
        init.emplace_back(lookup(states, init_tokens[i], "state"),
                          parse_double(init_tokens[i + 1]));

    auto triples = [&](const std::vector<std::string>& tokens,
                       const std::vector<std::string>& col, const char* what) {
        if (tokens.size() % 3 != 0)
            throw InvalidInputError(std::string(what) + " section expects triples");
        std::vector<std::vector<Distribution::Entry>> rows(states.size());
        for (std::size_t i = 0; i < tokens.size(); i += 3) {
            int from = lookup(states, tokens[i], "state");
            int to = lookup(col, tokens[i + 1], what);
            rows[static_cast<std::size_t>(from)].emplace_back(to, parse_double(tokens[i + 2]));
        }
        return rows;
    };
    auto trans_entries = triples(need_section(sections, "trans"), states, "state");
    auto prod_entries = triples(need_section(sections, "prod"), experts, "expert");

    auto rows = [&](std::vector<std::vector<Distribution::Entry>>& entries, const char* what) {
        std::vector<Distribution> out;
        for (std::size_t q = 0; q < entries.size(); ++q) {
            try {
                out.push_back(Distribution::checked(std::move(entries[q])));
            } catch (const InvalidInputError& err) {
                throw InvalidInputError(std::string(what) + " row of state '" + states[q] +
                                        "': " + err.what());
            }
        }
        return out;
    };
    std::vector<Distribution> trans_rows = rows(trans_entries, "trans");
    std::vector<Distribution> prod_rows = rows(prod_entries, "prod");
    return std::make_shared<TabularEhmm>(states, experts, Distribution::checked(std::move(init)),
                                         std::move(trans_rows), std::move(prod_rows));
}

void write_ehmm(std::ostream& out, const TabularEhmm& model) {
    out << "experts:";
    for (const auto& name : model.experts()) out << " " << name;
    out << "\nstates:";
    for (const auto& name : model.state_names()) out << " " << name;
    out << "\ninit:\n";
    Distribution start = model.init();
    for (const auto& [q, mass] : start.entries())
        out << model.state_name(q) << " " << format_double(mass) << "\n";
    out << "trans:\n";
    for (std::size_t q = 0; q < model.state_names().size(); ++q) {
        Distribution row = model.trans(static_cast<StateId>(q));
        for (const auto& [r, mass] : row.entries())
            out << model.state_name(static_cast<StateId>(q)) << " " << model.state_name(r) << " "
                << format_double(mass) << "\n";
    }
    out << "prod:\n";
    for (std::size_t q = 0; q < model.state_names().size(); ++q) {
        Distribution row = model.prod(static_cast<StateId>(q));
        for (const auto& [e, mass] : row.entries())
            out << model.state_name(static_cast<StateId>(q)) << " "
                << model.experts()[static_cast<std::size_t>(e)] << " " << format_double(mass)
                << "\n";
    }
}

HmmSpec parse_hmm_spec(std::istream& in) {
    auto sections = read_sections(in, {"states", "outcomes", "init", "trans", "emit"});
    HmmSpec spec;
    spec.states = need_section(sections, "states");
    spec.outcomes = need_section(sections, "outcomes");
    check_unique(spec.states, "state");
    check_unique(spec.outcomes, "outcome");
    auto n = spec.states.size();
    spec.init.assign(n, 0.0);
    spec.trans.assign(n, std::vector<double>(n, 0.0));
    spec.emit.assign(n, std::vector<double>(spec.outcomes.size(), 0.0));

    const auto& init_tokens = need_section(sections, "init");
    if (init_tokens.size() % 2 != 0)
        throw InvalidInputError("init section expects (state, prob) pairs");
    for (std::size_t i = 0; i < init_tokens.size(); i += 2)
        spec.init[static_cast<std::size_t>(lookup(spec.states, init_tokens[i], "state"))] =
            parse_double(init_tokens[i + 1]);

    const auto& trans_tokens = need_section(sections, "trans");
    if (trans_tokens.size() % 3 != 0) throw InvalidInputError("trans section expects triples");
    for (std::size_t i = 0; i < trans_tokens.size(); i += 3)
        spec.trans[static_cast<std::size_t>(lookup(spec.states, trans_tokens[i], "state"))]
                  [static_cast<std::size_t>(lookup(spec.states, trans_tokens[i + 1], "state"))] =
            parse_double(trans_tokens[i + 2]);

    const auto& emit_tokens = need_section(sections, "emit");
    if (emit_tokens.size() % 3 != 0) throw InvalidInputError("emit section expects triples");
    for (std::size_t i = 0; i < emit_tokens.size(); i += 3)
        spec.emit[static_cast<std::size_t>(lookup(spec.states, emit_tokens[i], "state"))]
                 [static_cast<std::size_t>(lookup(spec.outcomes, emit_tokens[i + 1], "outcome"))] =
            parse_double(emit_tokens[i + 2]);

    spec.validate();
    return spec;
}

PredictionTable parse_prediction_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError("empty prediction file");
    if (split_csv(line) != std::vector<std::string>{"t", "expert", "outcome", "prob"})
        throw InvalidInputError("prediction file must start with 't,expert,outcome,prob'");
    struct Row {
        int t;
        std::string expert;
        std::string outcome;
        double prob;
    };
    std::vector<Row> rows;
    std::set<std::string> experts, outcomes;
    int horizon = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 4)
            throw InvalidInputError("prediction row needs 4 fields: '" + line + "'");
        Row row{parse_int(fields[0]), fields[1], fields[2], parse_double(fields[3])};
        if (row.t < 1) throw InvalidInputError("rounds are 1-based");
        horizon = std::max(horizon, row.t);
        experts.insert(row.expert);
        outcomes.insert(row.outcome);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInputError("prediction file has no rows");
    PredictionTable table(horizon, {experts.begin(), experts.end()},
                          {outcomes.begin(), outcomes.end()});
    std::vector<char> filled(static_cast<std::size_t>(horizon) * experts.size() * outcomes.size(), 0);
    for (const auto& row : rows) {
        int e = table.expert_index(row.expert);
        int x = table.outcome_index(row.outcome);
        std::size_t slot = (static_cast<std::size_t>(row.t - 1) * experts.size() +
                            static_cast<std::size_t>(e)) *
                               outcomes.size() +
                           static_cast<std::size_t>(x);
        if (filled[slot])
            throw InvalidInputError("duplicate prediction for round " + std::to_string(row.t));
        filled[slot] = 1;
        table.set_prob(row.t, e, x, row.prob);
    }
    for (char f : filled)
        if (!f) throw InvalidInputError("prediction table has missing cells");
    table.validate();
    return table;
}

void write_prediction_table(std::ostream& out, const PredictionTable& table) {
    out << "t,expert,outcome,prob\n";
    for (int t = 1; t <= table.horizon(); ++t)
        for (int e = 0; e < table.num_experts(); ++e)
            for (int x = 0; x < table.num_outcomes(); ++x)
                out << t << "," << table.experts()[static_cast<std::size_t>(e)] << ","
                    << table.outcomes()[static_cast<std::size_t>(x)] << ","
                    << format_double(table.prob(t, e, x)) << "\n";
}

std::vector<int> parse_outcomes(std::istream& in, const std::vector<std::string>& alphabet) {
    std::vector<int> outcomes;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) outcomes.push_back(lookup(alphabet, token, "outcome"));
    }
    if (outcomes.empty()) throw InvalidInputError("no outcomes in data file");
    return outcomes;
}

void write_outcomes(std::ostream& out, const std::vector<int>& outcomes,
                    const std::vector<std::string>& alphabet) {
    for (int x : outcomes) out << alphabet.at(static_cast<std::size_t>(x)) << "\n";
}

Partition parse_partition(std::istream& in) {
    std::vector<int> prev;
    std::string token;
    while (in >> token) prev.push_back(parse_int(token));
    if (prev.empty()) throw InvalidInputError("empty partition file");
    return Partition(std::move(prev));
}

void write_partition(std::ostream& out, const Partition& partition) {
    for (int t = 1; t <= partition.horizon(); ++t) out << (t > 1 ? " " : "") << partition.prev(t);
    out << "\n";
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    std::vector<int> outcome_order = sorted_order(trace.outcome_names);
    std::vector<int> expert_order = sorted_order(trace.expert_names);
    out << "t,outcome,loss,cumloss";
    for (int x : outcome_order) out << ",pred:" << trace.outcome_names[static_cast<std::size_t>(x)];
    for (int e : expert_order) out << ",w:" << trace.expert_names[static_cast<std::size_t>(e)];
    out << "\n";
    for (const auto& row : trace.rows) {
        out << row.round << "," << trace.outcome_names[static_cast<std::size_t>(row.outcome)]
            << "," << format_double(row.loss) << "," << format_double(row.cum_loss);
        for (int x : outcome_order)
            out << "," << format_double(row.predictive[static_cast<std::size_t>(x)]);
        for (int e : expert_order)
            out << "," << format_double(row.weights[static_cast<std::size_t>(e)]);
        out << "\n";
    }
}

void write_oracle_report(std::ostream& out, const std::vector<PartitionRow>& rows,
                         double algorithm_log_score, double slack) {
    out << "partition,prior,likelihood,bound_ok\n";
    double algorithm_score = std::exp(algorithm_log_score);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.prev.size(); ++i)
            out << (i ? " " : "") << row.prev[i];
        double likelihood = std::exp(row.log_likelihood);
        bool ok = algorithm_score >= row.prior * likelihood - slack;
        out << "," << format_double(row.prior) << "," << format_double(likelihood) << ","
            << (ok ? 1 : 0) << "\n";
    }
}

std::vector<std::vector<Action>> parse_actions(std::istream& in,
                                               const std::vector<std::string>& experts,
                                               int horizon) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError("empty action file");
    if (split_csv(line) != std::vector<std::string>{"t", "expert", "action"})
        throw InvalidInputError("action file must start with 't,expert,action'");
    std::vector<std::vector<Action>> actions(
        static_cast<std::size_t>(horizon),
        std::vector<Action>(experts.size()));
    std::vector<std::vector<char>> filled(static_cast<std::size_t>(horizon),
                                          std::vector<char>(experts.size(), 0));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 3) throw InvalidInputError("action row needs 3 fields: '" + line + "'");
        int t = parse_int(fields[0]);
        if (t < 1 || t > horizon)
            throw InvalidInputError("action round " + std::to_string(t) + " out of range");
        int e = lookup(experts, fields[1], "expert");
        auto& flag = filled[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(e)];
        if (flag) throw InvalidInputError("duplicate action for round " + std::to_string(t));
        flag = 1;
        actions[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(e)] = {
            parse_double(fields[2])};
    }
    for (const auto& row : filled)
        for (char f : row)
            if (!f) throw InvalidInputError("action table has missing cells");
    return actions;
}

void write_derived_csv(std::ostream& out, const DerivedTrace& trace,
                       const std::vector<std::string>& outcome_names) {
    bool scalar = trace.rows.empty() || trace.rows.front().action.size() == 1;
    std::vector<int> outcome_order = sorted_order(outcome_names);
    out << "t,outcome,loss,cumloss,bound";
    if (scalar)
        out << ",action";
    else
        for (int x : outcome_order) out << ",action:" << outcome_names[static_cast<std::size_t>(x)];
    out << "\n";
    for (const auto& row : trace.rows) {
        out << row.round << "," << outcome_names.at(static_cast<std::size_t>(row.outcome)) << ","
            << format_double(row.loss) << "," << format_double(row.cum_loss) << ","
            << format_double(row.bound);
        if (scalar)
            out << "," << format_double(row.action.at(0));
        else
            for (int x : outcome_order)
                out << "," << format_double(row.action.at(static_cast<std::size_t>(x)));
        out << "\n";
    }
}

} // namespace epp
