#ifndef EPP_CHECKS_HPP
#define EPP_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace epp {

// Options for the named numeric certifications exposed by the CLI.  Values
// at or below zero select per-check defaults (instances, horizon, slack).
struct CheckOptions {
    int instances = 0;
    int horizon = 0;
    std::uint64_t seed = 1;
    std::string scheme;           // empty: cycle through all five kinds
    std::string variant = "both"; // freeze | sleep | both; model-free checks ignore it
    double eps = 1e-6;            // prediction floor for the adversarial stress check
    double slack = -1;            // tolerance override
};

// One certified case.  For bound checks `slack` is the smallest signed
// relative margin observed (negative = violated); for identity checks it is
// the largest relative deviation (pass means small).
struct CheckRow {
    int instance = 0;
    std::string scheme;
    std::string variant;
    double slack = 0;
    bool pass = false;
};

struct CheckResult {
    std::string name;
    bool pass = true;
    std::vector<CheckRow> rows;      // ordered by instance index
    std::vector<std::string> notes;  // extra human-readable quantities
};

const std::vector<std::string>& check_names();

// Runs the named certification.  Throws InvalidInputError for unknown names
// or malformed options and CapacityError when a desk-scale guard would be
// exceeded.
CheckResult run_check(const std::string& name, const CheckOptions& options);

} // namespace epp

#endif
