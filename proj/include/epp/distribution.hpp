#ifndef EPP_DISTRIBUTION_HPP
#define EPP_DISTRIBUTION_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace epp {

using StateId = std::int64_t;

// Sparse probability vector over int64 keys, kept sorted by key so that
// iteration order (and therefore floating-point summation order) is
// deterministic.  Used for state posteriors and per-state product/transition
// rows; keys are state ids or expert indices depending on context.
class Distribution {
public:
    using Entry = std::pair<StateId, double>;

    Distribution() = default;

    // Validating factory: sorts entries, merges nothing (duplicate keys are an
    // error), rejects negative masses, and requires the total to be within
    // `tol` of 1.  Zero-mass entries are dropped.
    static Distribution checked(std::vector<Entry> entries, double tol = 1e-9);

    // Same cleanup but with no total-mass requirement (intermediate sums).
    static Distribution unnormalized(std::vector<Entry> entries);

    static Distribution point_mass(StateId key);

    double prob(StateId key) const;           // 0 when absent
    double sum() const;
    std::size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }

    void scale(double factor);
    // this += w * other (merge of two sorted supports).
    void add_scaled(const Distribution& other, double w);
    // Divides by sum(); throws NumericError when the total mass is <= 0.
    void normalize();

    // Drops zero entries (after conditioning steps that zero some states).
    void prune();
    // Drops entries with mass <= 0 (guards cancellation in subtractive paths).
    void drop_nonpositive();

    bool operator==(const Distribution& other) const = default;

private:
    std::vector<Entry> entries_;
};

// Largest absolute difference over the union of supports.
double max_abs_diff(const Distribution& a, const Distribution& b);

} // namespace epp

#endif
