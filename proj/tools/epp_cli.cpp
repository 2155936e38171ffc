// Command-line front end: run the prediction algorithms on files, generate
// synthetic inputs, execute the named numeric certifications, and emit the
// demo experiment CSVs.  Exit codes: 0 success, 1 certification failure,
// 2 invalid input, 3 zero-probability outcome, 4 capacity guard.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epp/checks.hpp"
#include "epp/ehmm.hpp"
#include "epp/engine.hpp"
#include "epp/errors.hpp"
#include "epp/format.hpp"
#include "epp/forward.hpp"
#include "epp/io.hpp"
#include "epp/losses.hpp"
#include "epp/mixing.hpp"
#include "epp/oracles.hpp"
#include "epp/partition.hpp"
#include "epp/rand.hpp"

namespace {

using namespace epp;

std::uint64_t env_seed() {
    const char* raw = std::getenv("EPP_SEED");
    if (raw == nullptr || *raw == '\0') return 1;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(raw, &used);
        if (used != std::string(raw).size()) throw std::invalid_argument("trailing junk");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw InvalidInputError(std::string("EPP_SEED is not an unsigned integer: '") + raw +
                                "'");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    return in;
}

// A model plus, for the self-contained builtins, the prediction table its
// experts imply at a given horizon.
struct ModelBundle {
    std::shared_ptr<const Ehmm> model;
    std::function<PredictionTable(int)> builtin_preds; // null for file models
};

// Builtin names win over files of the same name.
ModelBundle load_model(const std::string& name) {
    if (name == "laplace") {
        auto model = std::make_shared<LaplaceEhmm>();
        return {model, [](int horizon) { return LaplaceEhmm::prediction_table(horizon); }};
    }
    if (name == "slotmachine") {
        HmmSpec spec = slot_machine();
        return {spec.to_ehmm(),
                [spec](int horizon) { return spec.prediction_table(horizon); }};
    }
    if (name.rfind("bayes:", 0) == 0) {
        int count = 0;
        try {
            std::size_t used = 0;
            count = std::stoi(name.substr(6), &used);
            if (used != name.size() - 6) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw InvalidInputError("bad expert count in '" + name + "'");
        }
        if (count < 1 || count > 10000)
            throw InvalidInputError("expert count out of range in '" + name + "'");
        std::vector<std::string> experts = indexed_names("e", count);
        std::vector<double> prior(static_cast<std::size_t>(count),
                                  1.0 / static_cast<double>(count));
        return {bayes_ehmm(experts, prior), nullptr};
    }
    auto in = open_in(name);
    return {parse_ehmm(in), nullptr};
}

std::vector<int> load_outcomes(const std::string& path, const std::vector<std::string>& alphabet) {
    auto in = open_in(path);
    return parse_outcomes(in, alphabet);
}

// ---- run ----

struct RunArgs {
    std::string algorithm;
    std::string scheme = "yesterday";
    std::string model;
    std::string preds_path;
    std::string data_path;
    std::string output = "trace.csv";
    std::string base = "forward";
    std::string actions_path;
    double eps_floor = -1;
    bool force_naive = false;
};

RunTrace run_model_algorithm(const RunArgs& args, const std::string& algorithm) {
    if (args.model.empty()) throw InvalidInputError("--ehmm is required for this algorithm");
    ModelBundle bundle = load_model(args.model);

    PredictionTable preds;
    std::vector<int> outcomes;
    if (!args.preds_path.empty()) {
        auto in = open_in(args.preds_path);
        preds = parse_prediction_table(in);
        outcomes = load_outcomes(args.data_path, preds.outcomes());
    } else if (bundle.builtin_preds) {
        PredictionTable probe = bundle.builtin_preds(1);
        outcomes = load_outcomes(args.data_path, probe.outcomes());
        preds = bundle.builtin_preds(static_cast<int>(outcomes.size()));
    } else {
        throw InvalidInputError("model '" + args.model +
                                "' does not supply predictions; pass --preds");
    }
    if (args.eps_floor > 0) preds = preds.with_floor(args.eps_floor);

    if (algorithm == "forward") return forward_run(bundle.model, preds, outcomes);
    MixingScheme scheme = MixingScheme::parse(args.scheme);
    Variant variant = algorithm == "epp-freeze" ? Variant::freeze : Variant::sleep;
    return epp_run(bundle.model, scheme, variant, preds, outcomes,
                   EppOptions{args.force_naive});
}

RunTrace run_mpp(const RunArgs& args) {
    if (args.preds_path.empty()) throw InvalidInputError("--preds is required for mpp");
    auto in = open_in(args.preds_path);
    PredictionTable preds = parse_prediction_table(in);
    std::vector<int> outcomes = load_outcomes(args.data_path, preds.outcomes());
    if (args.eps_floor > 0) preds = preds.with_floor(args.eps_floor);
    std::vector<double> prior(static_cast<std::size_t>(preds.num_experts()),
                              1.0 / static_cast<double>(preds.num_experts()));
    return mpp_run(preds.experts(), prior, MixingScheme::parse(args.scheme), preds, outcomes);
}

int cmd_run(const RunArgs& args) {
    if (args.data_path.empty()) throw InvalidInputError("--data is required");

    if (args.algorithm.rfind("derived:", 0) == 0) {
        std::unique_ptr<MixableLoss> loss = make_loss(args.algorithm.substr(8));
        if (args.model.empty())
            throw InvalidInputError("--ehmm is required for derived runs");
        ModelBundle bundle = load_model(args.model);
        const std::vector<std::string>& experts = bundle.model->experts();

        std::vector<std::string> alphabet;
        std::vector<int> outcomes;
        std::vector<std::vector<Action>> actions;
        PredictionTable preds;
        if (loss->name() == "log") {
            // Actions are the experts' own outcome distributions.
            if (!args.preds_path.empty()) {
                auto in = open_in(args.preds_path);
                preds = parse_prediction_table(in);
            } else if (bundle.builtin_preds) {
                PredictionTable probe = bundle.builtin_preds(1);
                outcomes = load_outcomes(args.data_path, probe.outcomes());
                preds = bundle.builtin_preds(static_cast<int>(outcomes.size()));
            } else {
                throw InvalidInputError("derived:log needs --preds or a builtin model");
            }
            if (outcomes.empty()) outcomes = load_outcomes(args.data_path, preds.outcomes());
            if (args.eps_floor > 0) preds = preds.with_floor(args.eps_floor);
            alphabet = preds.outcomes();
            PredView view(preds, experts);
            actions.resize(outcomes.size());
            for (std::size_t t = 0; t < outcomes.size(); ++t)
                for (std::size_t e = 0; e < experts.size(); ++e) {
                    Action a(alphabet.size());
                    for (std::size_t x = 0; x < alphabet.size(); ++x)
                        a[x] = view.prob(static_cast<int>(t + 1), static_cast<int>(e),
                                         static_cast<int>(x));
                    actions[t].push_back(std::move(a));
                }
        } else {
            // Scalar actions over the binary alphabet, from the actions file.
            if (args.actions_path.empty())
                throw InvalidInputError("--actions is required for derived:" + loss->name());
            alphabet = {"0", "1"};
            outcomes = load_outcomes(args.data_path, alphabet);
            auto in = open_in(args.actions_path);
            actions = parse_actions(in, experts, static_cast<int>(outcomes.size()));
            preds = PredictionTable(static_cast<int>(outcomes.size()), experts, alphabet);
        }

        BaseFactory factory;
        MixingScheme scheme = MixingScheme::parse(args.scheme);
        if (args.base == "forward")
            factory = forward_base(bundle.model);
        else if (args.base == "epp-freeze")
            factory = epp_base(bundle.model, scheme, Variant::freeze);
        else if (args.base == "epp-sleep")
            factory = epp_base(bundle.model, scheme, Variant::sleep);
        else if (args.base == "mpp") {
            std::vector<double> prior(experts.size(), 1.0 / static_cast<double>(experts.size()));
            factory = mpp_base(experts, prior, scheme);
        } else
            throw InvalidInputError("unknown base algorithm '" + args.base + "'");

        DerivedTrace trace = derived_run(factory, *loss, actions, outcomes, experts, alphabet);
        auto out = open_out(args.output);
        write_derived_csv(out, trace, alphabet);
        std::cout << "cumloss=" << format_double(trace.cumulative_loss()) << "\n";
        return 0;
    }

    RunTrace trace;
    if (args.algorithm == "mpp")
        trace = run_mpp(args);
    else if (args.algorithm == "forward" || args.algorithm == "epp-freeze" ||
             args.algorithm == "epp-sleep")
        trace = run_model_algorithm(args, args.algorithm);
    else
        throw InvalidInputError("unknown algorithm '" + args.algorithm + "'");

    auto out = open_out(args.output);
    write_trace_csv(out, trace);
    std::cout << "cumloss=" << format_double(trace.cumulative_log_loss()) << "\n";
    return 0;
}

// ---- gen ----

struct GenArgs {
    std::string kind;
    std::string lengths;
    std::string symbols;
    std::string spec = "slotmachine";
    int rounds = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::string preds_out;
    std::string model_out;
};

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto comma = text.find(',', start);
        parts.push_back(text.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

int cmd_gen(const GenArgs& args) {
    if (args.out.empty()) throw InvalidInputError("--out is required");
    if (args.kind == "blocks") {
        std::vector<std::string> lengths = split_commas(args.lengths);
        std::vector<std::string> symbols = split_commas(args.symbols);
        if (lengths.empty() || args.lengths.empty())
            throw InvalidInputError("--lengths is required for blocks");
        if (symbols.size() != lengths.size())
            throw InvalidInputError("--symbols must list one token per block");
        std::string line;
        for (std::size_t b = 0; b < lengths.size(); ++b) {
            int n = 0;
            try {
                std::size_t used = 0;
                n = std::stoi(lengths[b], &used);
                if (used != lengths[b].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw InvalidInputError("bad block length '" + lengths[b] + "'");
            }
            if (n < 1) throw InvalidInputError("block lengths must be positive");
            if (symbols[b].empty()) throw InvalidInputError("empty block symbol");
            for (int i = 0; i < n; ++i) {
                if (!line.empty()) line += ' ';
                line += symbols[b];
            }
        }
        auto out = open_out(args.out);
        out << line << "\n";
        return 0;
    }
    if (args.kind == "hmm") {
        HmmSpec spec;
        if (args.spec == "slotmachine") {
            spec = slot_machine();
        } else {
            auto in = open_in(args.spec);
            spec = parse_hmm_spec(in);
        }
        if (args.rounds < 1) throw InvalidInputError("--rounds must be positive");
        Rng rng(args.seed);
        std::vector<int> outcomes = sample_hmm(spec, args.rounds, rng);
        auto out = open_out(args.out);
        write_outcomes(out, outcomes, spec.outcomes);
        if (!args.preds_out.empty()) {
            auto preds_out = open_out(args.preds_out);
            write_prediction_table(preds_out, spec.prediction_table(args.rounds));
        }
        if (!args.model_out.empty()) {
            auto model_out = open_out(args.model_out);
            write_ehmm(model_out, *spec.to_ehmm());
        }
        return 0;
    }
    throw InvalidInputError("unknown generator kind '" + args.kind + "'");
}

// ---- oracle ----

struct OracleArgs {
    std::string check;
    CheckOptions options;
    std::string output;
};

int cmd_oracle(const OracleArgs& args) {
    CheckResult result = run_check(args.check, args.options);
    for (const auto& row : result.rows) {
        std::cout << result.name << "[" << row.instance << "] scheme=" << row.scheme
                  << " variant=" << row.variant << " slack=" << format_double(row.slack) << " "
                  << (row.pass ? "ok" : "VIOLATED") << "\n";
    }
    for (const auto& note : result.notes) std::cout << "note: " << note << "\n";
    int passed = 0;
    for (const auto& row : result.rows) passed += row.pass ? 1 : 0;
    std::cout << result.name << ": " << (result.pass ? "PASS" : "FAIL") << " (" << passed << "/"
              << result.rows.size() << " cases)\n";
    if (!args.output.empty()) {
        auto out = open_out(args.output);
        out << "instance,scheme,variant,slack,pass\n";
        for (const auto& row : result.rows)
            out << row.instance << "," << row.scheme << "," << row.variant << ","
                << format_double(row.slack) << "," << (row.pass ? 1 : 0) << "\n";
    }
    return result.pass ? 0 : 1;
}

// ---- experiment ----

struct ExperimentArgs {
    std::string name;
    std::string out;
    std::string svg;
};

// Minimal self-contained polyline plot; series share the x axis 1..n.
void write_svg_lines(std::ostream& out, const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    const double width = 860, height = 480;
    const double left = 60, right = 20, top = 40, bottom = 40;
    double lo = 0, hi = 1;
    bool first = true;
    std::size_t max_len = 1;
    for (const auto& s : series) {
        max_len = std::max(max_len, s.second.size());
        for (double v : s.second) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (hi - lo < 1e-12) hi = lo + 1;
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto xpos = [&](std::size_t i) {
        double span = max_len > 1 ? static_cast<double>(max_len - 1) : 1.0;
        return left + (width - left - right) * static_cast<double>(i) / span;
    };
    auto ypos = [&](double v) {
        return top + (height - top - bottom) * (hi - v) / (hi - lo);
    };
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"8\" y=\"" << ypos(hi - pad) + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << num(hi - pad) << "</text>\n";
    out << "<text x=\"8\" y=\"" << ypos(lo + pad) + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << num(lo + pad) << "</text>\n";
    out << "<text x=\"" << width - right - 30 << "\" y=\"" << height - bottom + 16
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << max_len << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& values = series[s].second;
        out << "<polyline fill=\"none\" stroke=\"" << palette[s % 4]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ' ';
            out << num(xpos(i)) << ',' << num(ypos(values[i]));
        }
        out << "\"/>\n";
        out << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 * static_cast<double>(s) + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << palette[s % 4]
            << "\">" << series[s].first << "</text>\n";
    }
    out << "</svg>\n";
}

void maybe_svg(const ExperimentArgs& args, const std::string& title,
               const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    if (args.svg.empty()) return;
    auto out = open_out(args.svg);
    write_svg_lines(out, title, series);
}

std::vector<int> block_outcomes(const std::vector<std::pair<int, int>>& blocks) {
    std::vector<int> outcomes;
    for (const auto& [len, sym] : blocks)
        for (int i = 0; i < len; ++i) outcomes.push_back(sym);
    return outcomes;
}

int experiment_figure1(const ExperimentArgs& args) {
    const int horizon = 150;
    auto model = std::make_shared<LaplaceEhmm>();
    PredictionTable preds = LaplaceEhmm::prediction_table(horizon);
    int one = 1; // index of outcome "1"
    std::vector<int> outcomes = block_outcomes({{50, 1}, {50, 0}, {50, 1}});

    RunTrace in_context = forward_run(model, preds, outcomes);

    std::vector<int> ones_cell, zeros_cell;
    for (int t = 1; t <= 50; ++t) ones_cell.push_back(t);
    for (int t = 101; t <= horizon; ++t) ones_cell.push_back(t);
    for (int t = 51; t <= 100; ++t) zeros_cell.push_back(t);
    std::vector<double> frozen(static_cast<std::size_t>(horizon), 0.0);
    for (const auto& cell : {ones_cell, zeros_cell}) {
        auto rows = cell_predictives(*model, cell, Variant::freeze, preds, outcomes);
        for (std::size_t k = 0; k < cell.size(); ++k)
            frozen[static_cast<std::size_t>(cell[k] - 1)] = rows[k][static_cast<std::size_t>(one)];
    }

    RunTrace epp = epp_run(model, MixingScheme::parse("uniformpast:0.05"), Variant::freeze,
                           preds, outcomes);

    std::vector<double> in_context_p1, epp_p1;
    for (const auto& row : in_context.rows)
        in_context_p1.push_back(row.predictive[static_cast<std::size_t>(one)]);
    for (const auto& row : epp.rows)
        epp_p1.push_back(row.predictive[static_cast<std::size_t>(one)]);

    auto out = open_out(args.out);
    out << "t,in_context,frozen,epp_freeze\n";
    for (int t = 1; t <= horizon; ++t)
        out << t << "," << format_double(in_context_p1[static_cast<std::size_t>(t - 1)]) << ","
            << format_double(frozen[static_cast<std::size_t>(t - 1)]) << ","
            << format_double(epp_p1[static_cast<std::size_t>(t - 1)]) << "\n";
    std::cout << "round101 in_context=" << format_double(in_context_p1[100])
              << " frozen=" << format_double(frozen[100]) << " epp=" << format_double(epp_p1[100])
              << "\n";
    std::cout << "cumloss=" << format_double(epp.cumulative_log_loss()) << "\n";
    maybe_svg(args, "Estimated probability of a one",
              {{"in-context", in_context_p1}, {"frozen", frozen}, {"epp-freeze", epp_p1}});
    return 0;
}

int experiment_counterexample(const ExperimentArgs& args) {
    std::vector<Distribution> trans;
    trans.push_back(Distribution::point_mass(1));
    trans.push_back(Distribution::point_mass(1));
    std::vector<Distribution> prod;
    prod.push_back(Distribution::point_mass(0));
    prod.push_back(Distribution::point_mass(1));
    auto chain = std::make_shared<TabularEhmm>(
        std::vector<std::string>{"A", "B"}, std::vector<std::string>{"a", "b"},
        Distribution::point_mass(0), std::move(trans), std::move(prod));
    PredictionTable preds(2, chain->experts(), {"0", "1"});
    for (int t = 1; t <= 2; ++t) {
        preds.set_prob(t, 0, 1, 0.9);
        preds.set_prob(t, 0, 0, 0.1);
        preds.set_prob(t, 1, 1, 0.4);
        preds.set_prob(t, 1, 0, 0.6);
    }
    std::vector<int> outcomes = {1, 1};
    RunTrace low = epp_run(chain, MixingScheme::parse("fixedshare:0.1"), Variant::freeze, preds,
                           outcomes);
    RunTrace high = epp_run(chain, MixingScheme::parse("fixedshare:0.5"), Variant::freeze, preds,
                            outcomes);
    auto out = open_out(args.out);
    out << "t,p1_fixedshare_low,p1_fixedshare_high\n";
    std::vector<double> low_p1, high_p1;
    for (int t = 0; t < 2; ++t) {
        low_p1.push_back(low.rows[static_cast<std::size_t>(t)].predictive[1]);
        high_p1.push_back(high.rows[static_cast<std::size_t>(t)].predictive[1]);
        out << t + 1 << "," << format_double(low_p1.back()) << ","
            << format_double(high_p1.back()) << "\n";
    }
    std::cout << "round1_gap=" << format_double(std::abs(low_p1[0] - high_p1[0]))
              << " round2_gap=" << format_double(std::abs(low_p1[1] - high_p1[1])) << "\n";
    maybe_svg(args, "Frozen round-2 prediction depends on the look-back weights",
              {{"fixedshare:0.1", low_p1}, {"fixedshare:0.5", high_p1}});
    return 0;
}

int experiment_relearn(const ExperimentArgs& args) {
    const int horizon = 150;
    auto model = std::make_shared<LaplaceEhmm>();
    PredictionTable preds = LaplaceEhmm::prediction_table(horizon);
    std::vector<int> outcomes = block_outcomes({{50, 1}, {50, 0}, {50, 1}});
    RunTrace restart = epp_run(model, MixingScheme::parse("fixedshare:0.05"), Variant::freeze,
                               preds, outcomes);
    RunTrace resume = epp_run(model, MixingScheme::parse("uniformpast:0.05"), Variant::freeze,
                              preds, outcomes);
    auto out = open_out(args.out);
    out << "t,fixedshare_loss,fixedshare_cumloss,uniformpast_loss,uniformpast_cumloss\n";
    std::vector<double> restart_cum, resume_cum;
    for (int t = 0; t < horizon; ++t) {
        const auto& a = restart.rows[static_cast<std::size_t>(t)];
        const auto& b = resume.rows[static_cast<std::size_t>(t)];
        restart_cum.push_back(a.cum_loss);
        resume_cum.push_back(b.cum_loss);
        out << t + 1 << "," << format_double(a.loss) << "," << format_double(a.cum_loss) << ","
            << format_double(b.loss) << "," << format_double(b.cum_loss) << "\n";
    }
    std::cout << "cumloss_fixedshare=" << format_double(restart.cumulative_log_loss())
              << " cumloss_uniformpast=" << format_double(resume.cumulative_log_loss()) << "\n";
    maybe_svg(args, "Cumulative loss: restart vs resume",
              {{"fixedshare:0.05", restart_cum}, {"uniformpast:0.05", resume_cum}});
    return 0;
}

int cmd_experiment(const ExperimentArgs& args) {
    if (args.out.empty()) throw InvalidInputError("--out is required");
    if (args.name == "figure1") return experiment_figure1(args);
    if (args.name == "counterexample") return experiment_counterexample(args);
    if (args.name == "relearn-demo") return experiment_relearn(args);
    throw InvalidInputError("unknown experiment '" + args.name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online prediction over expert hidden Markov models"};
    app.require_subcommand(1);
    int rc = 0;

    RunArgs run_args;
    GenArgs gen_args;
    OracleArgs oracle_args;
    ExperimentArgs exp_args;

    try {
        run_args.scheme = "yesterday";
        auto* run = app.add_subcommand("run", "Run an algorithm over a data file");
        run->add_option("--algorithm", run_args.algorithm,
                        "forward | mpp | epp-freeze | epp-sleep | derived:<log|square|hellinger>")
            ->required();
        run->add_option("--scheme", run_args.scheme, "mixing scheme spec (default yesterday)");
        run->add_option("--ehmm", run_args.model, "model file or builtin (bayes:<k>, laplace, slotmachine)");
        run->add_option("--preds", run_args.preds_path, "prediction table CSV");
        run->add_option("--data", run_args.data_path, "outcome file")->required();
        run->add_option("--output", run_args.output, "trace CSV path (default trace.csv)");
        run->add_option("--eps-floor", run_args.eps_floor, "floor expert predictions at eps");
        run->add_option("--base", run_args.base,
                        "base algorithm for derived runs (forward | epp-freeze | epp-sleep | mpp)");
        run->add_option("--actions", run_args.actions_path, "actions CSV for scalar losses");
        run->add_flag("--force-naive", run_args.force_naive,
                      "disable the fast storage layouts");
        run->callback([&] { rc = cmd_run(run_args); });

        gen_args.seed = env_seed();
        auto* gen = app.add_subcommand("gen", "Generate synthetic inputs");
        gen->add_option("--kind", gen_args.kind, "blocks | hmm")->required();
        gen->add_option("--lengths", gen_args.lengths, "comma-separated block lengths");
        gen->add_option("--symbols", gen_args.symbols, "comma-separated block symbols");
        gen->add_option("--spec", gen_args.spec, "HMM spec file or builtin 'slotmachine'");
        gen->add_option("--rounds", gen_args.rounds, "rounds to sample (hmm kind)");
        gen->add_option("--seed", gen_args.seed, "sampling seed (default $EPP_SEED or 1)");
        gen->add_option("--out", gen_args.out, "output data file")->required();
        gen->add_option("--preds-out", gen_args.preds_out, "also write the emission table CSV");
        gen->add_option("--model-out", gen_args.model_out, "also write the converted model file");
        gen->callback([&] { rc = cmd_gen(gen_args); });

        oracle_args.options.seed = env_seed();
        auto* oracle = app.add_subcommand("oracle", "Run a named numeric certification");
        std::string check_list;
        for (const auto& name : check_names())
            check_list += (check_list.empty() ? "" : " | ") + name;
        oracle->add_option("check", oracle_args.check, check_list)->required();
        oracle->add_option("--instances", oracle_args.options.instances,
                           "random instances (0 = per-check default)");
        oracle->add_option("--T", oracle_args.options.horizon,
                           "horizon (0 = per-check default)");
        oracle->add_option("--seed", oracle_args.options.seed,
                           "instance seed (default $EPP_SEED or 1)");
        oracle->add_option("--scheme", oracle_args.options.scheme,
                           "mixing scheme spec (default: cycle through all kinds)");
        oracle->add_option("--variant", oracle_args.options.variant, "freeze | sleep | both");
        oracle->add_option("--eps", oracle_args.options.eps,
                           "prediction floor for the adversarial check");
        oracle->add_option("--slack", oracle_args.options.slack,
                           "tolerance override (negative = per-check default)");
        oracle->add_option("--output", oracle_args.output, "per-case slack CSV path");
        oracle->callback([&] { rc = cmd_oracle(oracle_args); });

        auto* experiment = app.add_subcommand("experiment", "Reproduce a demo experiment");
        experiment->add_option("--name", exp_args.name,
                               "figure1 | counterexample | relearn-demo")
            ->required();
        experiment->add_option("--out", exp_args.out, "output CSV path")->required();
        experiment->add_option("--svg", exp_args.svg, "also write a line plot SVG");
        experiment->callback([&] { rc = cmd_experiment(exp_args); });

        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ZeroProbabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
