#ifndef EPP_TRACE_HPP
#define EPP_TRACE_HPP

#include <string>
#include <vector>

namespace epp {

// Per-round record of a prediction run.  `predictive` is indexed like the
// outcome alphabet and `weights` like the expert list carried by the trace.
struct TraceRow {
    int round = 0;
    int outcome = 0;
    double loss = 0;           // -ln predictive[outcome]
    double cum_loss = 0;
    std::vector<double> predictive;
    std::vector<double> weights;
    double drift = 0;          // |mass - 1| of the next posterior before renormalization
};

struct RunTrace {
    std::vector<std::string> outcome_names;
    std::vector<std::string> expert_names;
    std::vector<TraceRow> rows;

    double cumulative_log_loss() const { return rows.empty() ? 0.0 : rows.back().cum_loss; }
    double max_drift() const {
        double worst = 0;
        for (const auto& r : rows) worst = worst < r.drift ? r.drift : worst;
        return worst;
    }
};

} // namespace epp

#endif
