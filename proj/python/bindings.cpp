// Python bindings for the core prediction algorithms: load or build models,
// run the filtering / mixture / reference algorithms over outcome sequences,
// and invoke the numeric certifications.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "epp/checks.hpp"
#include "epp/ehmm.hpp"
#include "epp/engine.hpp"
#include "epp/errors.hpp"
#include "epp/forward.hpp"
#include "epp/io.hpp"
#include "epp/mixing.hpp"
#include "epp/oracles.hpp"
#include "epp/partition.hpp"
#include "epp/rand.hpp"

namespace py = pybind11;
using namespace epp;

namespace {

struct ModelHandle {
    std::shared_ptr<const Ehmm> model;
    std::function<PredictionTable(int)> builtin_preds; // null for file models
    std::string name;
};

ModelHandle load_model(const std::string& name) {
    ModelHandle out;
    out.name = name;
    if (name == "laplace") {
        out.model = std::make_shared<LaplaceEhmm>();
        out.builtin_preds = [](int horizon) { return LaplaceEhmm::prediction_table(horizon); };
        return out;
    }
    if (name == "slotmachine") {
        HmmSpec spec = slot_machine();
        out.model = spec.to_ehmm();
        out.builtin_preds = [spec](int horizon) { return spec.prediction_table(horizon); };
        return out;
    }
    if (name.rfind("bayes:", 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(name.substr(6), &used);
            if (used != name.size() - 6) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw InvalidInputError("bad expert count in '" + name + "'");
        }
        if (k < 1 || k > 10000) throw InvalidInputError("expert count out of range in '" + name + "'");
        std::vector<std::string> experts = indexed_names("e", k);
        std::vector<double> prior(static_cast<std::size_t>(k), 1.0 / k);
        out.model = bayes_ehmm(experts, prior);
        return out;
    }
    std::ifstream in(name, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open model file '" + name + "'");
    out.model = parse_ehmm(in);
    return out;
}

ModelHandle model_from_text(const std::string& text) {
    std::istringstream in(text);
    ModelHandle out;
    out.name = "<inline>";
    out.model = parse_ehmm(in);
    return out;
}

PredictionTable predictions_from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_prediction_table(in);
}

PredictionTable resolve_preds(const ModelHandle& handle, const py::object& preds, int horizon) {
    if (!preds.is_none()) return preds.cast<PredictionTable>();
    if (!handle.builtin_preds)
        throw InvalidInputError("model '" + handle.name +
                                "' does not supply predictions; pass preds");
    return handle.builtin_preds(horizon);
}

std::vector<int> resolve_outcomes(const py::sequence& seq,
                                  const std::vector<std::string>& alphabet) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(py::len(seq)));
    for (const auto& item : seq) {
        int index;
        if (py::isinstance<py::str>(item)) {
            std::string token = item.cast<std::string>();
            index = -1;
            for (std::size_t x = 0; x < alphabet.size(); ++x)
                if (alphabet[x] == token) index = static_cast<int>(x);
            if (index < 0) throw InvalidInputError("unknown outcome token '" + token + "'");
        } else {
            index = item.cast<int>();
            if (index < 0 || index >= static_cast<int>(alphabet.size()))
                throw InvalidInputError("outcome index out of range");
        }
        out.push_back(index);
    }
    return out;
}

py::dict trace_to_dict(const RunTrace& trace) {
    py::dict out;
    out["outcomes"] = trace.outcome_names;
    out["experts"] = trace.expert_names;
    py::list rows;
    for (const auto& row : trace.rows) {
        py::dict r;
        r["t"] = row.round;
        r["outcome"] = row.outcome;
        r["loss"] = row.loss;
        r["cum_loss"] = row.cum_loss;
        r["predictive"] = row.predictive;
        r["weights"] = row.weights;
        rows.append(std::move(r));
    }
    out["rows"] = std::move(rows);
    out["cum_loss"] = trace.cumulative_log_loss();
    return out;
}

py::dict run(const ModelHandle& model, const std::string& algorithm,
             const py::sequence& outcome_seq, const std::string& scheme,
             const py::object& preds_obj, bool force_naive) {
    PredictionTable preds =
        resolve_preds(model, preds_obj, static_cast<int>(py::len(outcome_seq)));
    std::vector<int> outcomes = resolve_outcomes(outcome_seq, preds.outcomes());
    RunTrace trace;
    if (algorithm == "forward") {
        trace = forward_run(model.model, preds, outcomes);
    } else if (algorithm == "epp-freeze" || algorithm == "epp-sleep") {
        Variant variant = algorithm == "epp-freeze" ? Variant::freeze : Variant::sleep;
        trace = epp_run(model.model, MixingScheme::parse(scheme), variant, preds, outcomes,
                        EppOptions{force_naive});
    } else {
        throw InvalidInputError("unknown algorithm '" + algorithm + "'");
    }
    return trace_to_dict(trace);
}

py::dict run_reference(const py::object& preds_obj, const std::string& scheme,
                       const py::sequence& outcome_seq, const py::object& prior_obj) {
    PredictionTable preds = preds_obj.cast<PredictionTable>();
    std::vector<int> outcomes = resolve_outcomes(outcome_seq, preds.outcomes());
    std::vector<double> prior;
    if (prior_obj.is_none())
        prior.assign(static_cast<std::size_t>(preds.num_experts()),
                     1.0 / preds.num_experts());
    else
        prior = prior_obj.cast<std::vector<double>>();
    return trace_to_dict(
        mpp_run(preds.experts(), prior, MixingScheme::parse(scheme), preds, outcomes));
}

py::dict check(const std::string& name, int instances, int horizon, std::uint64_t seed,
               const std::string& scheme, const std::string& variant, double eps, double slack) {
    CheckOptions options;
    options.instances = instances;
    options.horizon = horizon;
    options.seed = seed;
    options.scheme = scheme;
    options.variant = variant;
    options.eps = eps;
    options.slack = slack;
    CheckResult result = run_check(name, options);
    py::dict out;
    out["name"] = result.name;
    out["pass"] = result.pass;
    py::list rows;
    for (const auto& row : result.rows) {
        py::dict r;
        r["instance"] = row.instance;
        r["scheme"] = row.scheme;
        r["variant"] = row.variant;
        r["slack"] = row.slack;
        r["pass"] = row.pass;
        rows.append(std::move(r));
    }
    out["rows"] = std::move(rows);
    out["notes"] = result.notes;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Online prediction over expert hidden Markov models";

    py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<ZeroProbabilityError>(m, "ZeroProbabilityError", PyExc_ArithmeticError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);

    py::class_<PredictionTable>(m, "PredictionTable")
        .def(py::init<int, std::vector<std::string>, std::vector<std::string>>(),
             py::arg("horizon"), py::arg("experts"), py::arg("outcomes"))
        .def_property_readonly("horizon", &PredictionTable::horizon)
        .def_property_readonly("experts", &PredictionTable::experts)
        .def_property_readonly("outcomes", &PredictionTable::outcomes)
        .def("prob", &PredictionTable::prob, py::arg("t"), py::arg("expert"), py::arg("outcome"))
        .def("set_prob", &PredictionTable::set_prob, py::arg("t"), py::arg("expert"),
             py::arg("outcome"), py::arg("p"))
        .def("validate", &PredictionTable::validate, py::arg("tol") = 1e-9)
        .def("with_floor", &PredictionTable::with_floor, py::arg("eps"));

    py::class_<ModelHandle>(m, "Model")
        .def_property_readonly("name", [](const ModelHandle& h) { return h.name; })
        .def_property_readonly("experts",
                               [](const ModelHandle& h) { return h.model->experts(); })
        .def("default_predictions", [](const ModelHandle& h, int horizon) {
            if (!h.builtin_preds)
                throw InvalidInputError("model '" + h.name + "' does not supply predictions");
            return h.builtin_preds(horizon);
        }, py::arg("horizon"));

    m.def("load_model", &load_model, py::arg("name"),
          "Builtin model name (bayes:<k>, laplace, slotmachine) or a model file path");
    m.def("model_from_text", &model_from_text, py::arg("text"));
    m.def("predictions_from_text", &predictions_from_text, py::arg("text"));

    m.def("run", &run, py::arg("model"), py::arg("algorithm"), py::arg("outcomes"),
          py::arg("scheme") = "yesterday", py::arg("preds") = py::none(),
          py::arg("force_naive") = false,
          "Run forward / epp-freeze / epp-sleep over an outcome sequence");
    m.def("run_reference", &run_reference, py::arg("preds"), py::arg("scheme"),
          py::arg("outcomes"), py::arg("prior") = py::none(),
          "Run the model-free reference mixture over an outcome sequence");

    m.def("check", &check, py::arg("name"), py::arg("instances") = 0, py::arg("T") = 0,
          py::arg("seed") = 1, py::arg("scheme") = "", py::arg("variant") = "both",
          py::arg("eps") = 1e-6, py::arg("slack") = -1.0,
          "Run one named numeric certification; see check_names()");
    m.def("check_names", [] { return check_names(); });

    m.def("scheme_weights",
          [](const std::string& scheme, int t) { return MixingScheme::parse(scheme).weights(t); },
          py::arg("scheme"), py::arg("t"),
          "Look-back weights over past indices 0..t-1 used at round t");
    m.def("log_partition_prior",
          [](const std::string& scheme, const std::vector<int>& prev) {
              return MixingScheme::parse(scheme).log_partition_prior(Partition(prev));
          },
          py::arg("scheme"), py::arg("prev"),
          "Log prior mass the scheme places on the partition given by predecessor indices");

    m.def("sample_outcomes",
          [](int rounds, std::uint64_t seed) {
              HmmSpec spec = slot_machine();
              Rng rng(seed);
              std::vector<int> ids = sample_hmm(spec, rounds, rng);
              std::vector<std::string> tokens;
              tokens.reserve(ids.size());
              for (int id : ids) tokens.push_back(spec.outcomes[static_cast<std::size_t>(id)]);
              return tokens;
          },
          py::arg("rounds"), py::arg("seed") = 1,
          "Sample an outcome sequence from the builtin three-state machine");
}
