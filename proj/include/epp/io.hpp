#ifndef EPP_IO_HPP
#define EPP_IO_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "epp/ehmm.hpp"
#include "epp/losses.hpp"
#include "epp/oracles.hpp"
#include "epp/partition.hpp"
#include "epp/prediction_table.hpp"
#include "epp/trace.hpp"

namespace epp {

// Model file: sections introduced by the keywords "experts:", "states:",
// "init:", "trans:", "prod:" in any order, '#' starts a comment.  experts and
// states list names; init holds (state, prob) pairs; trans holds
// (from, to, prob) triples and prod (state, expert, prob) triples, one per
// line by convention though any whitespace works.
std::shared_ptr<TabularEhmm> parse_ehmm(std::istream& in);
void write_ehmm(std::ostream& out, const TabularEhmm& model);

// Classical HMM spec: sections "states:", "outcomes:", "init:", "trans:",
// "emit:" with the same token rules.
HmmSpec parse_hmm_spec(std::istream& in);

// CSV with header t,expert,outcome,prob; every (round, expert) row must cover
// the full alphabet.  Experts and outcomes are sorted by name; the horizon is
// the largest round mentioned.
PredictionTable parse_prediction_table(std::istream& in);
void write_prediction_table(std::ostream& out, const PredictionTable& table);

// Whitespace-separated outcome tokens resolved against an alphabet.
std::vector<int> parse_outcomes(std::istream& in, const std::vector<std::string>& alphabet);
void write_outcomes(std::ostream& out, const std::vector<int>& outcomes,
                    const std::vector<std::string>& alphabet);

// Single line of predecessor indices (0 = open a new cell).
Partition parse_partition(std::istream& in);
void write_partition(std::ostream& out, const Partition& partition);

// CSV with header t,outcome,loss,cumloss,pred:<o>..,w:<e>.. where outcome
// and expert columns appear in alphabetical order.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

// CSV with header partition,prior,likelihood,bound_ok; the partition column
// is the space-joined predecessor vector, and bound_ok records whether
// exp(algorithm_log_score) >= prior * likelihood - slack.
void write_oracle_report(std::ostream& out, const std::vector<PartitionRow>& rows,
                         double algorithm_log_score, double slack = 1e-9);

// CSV with header t,expert,action holding one scalar action per round/expert.
std::vector<std::vector<Action>> parse_actions(std::istream& in,
                                               const std::vector<std::string>& experts,
                                               int horizon);

void write_derived_csv(std::ostream& out, const DerivedTrace& trace,
                       const std::vector<std::string>& outcome_names);

} // namespace epp

#endif
