#ifndef EPP_MIXING_HPP
#define EPP_MIXING_HPP

#include <string>
#include <vector>

#include "epp/partition.hpp"

namespace epp {

enum class SchemeKind {
    yesterday,
    fixed_share,
    uniform_past,
    decaying_past,
    decaying_past_approx,
};

// Running prefix sums H(n) = sum_{d=1..n} d^-gamma, grown incrementally so a
// long run never recomputes the series.
class DecayPrefix {
public:
    explicit DecayPrefix(double gamma) : gamma_(gamma), sums_{0.0} {}
    void extend_to(int n);
    // sum_{d=lo+1..hi} d^-gamma.
    double range(int lo, int hi) const { return sums_[static_cast<std::size_t>(hi)] - sums_[static_cast<std::size_t>(lo)]; }
    int size() const { return static_cast<int>(sums_.size()) - 1; }

private:
    double gamma_;
    std::vector<double> sums_;
};

// Dyadic grouping of the past indices 0..t-2 (newest index t-1 stays on its
// own): block widths follow the binary decomposition of t-1, largest first,
// so there are popcount(t-1) blocks and an increment is a binary-counter
// step.  Each block carries the exact total weight of its indices.
struct BlockLayout {
    struct Block {
        int begin; // inclusive, oldest side
        int end;   // exclusive
        double weight;
    };
    std::vector<Block> blocks;
    double newest_weight = 1.0;
};

// How much of the mixture at round t looks back at each earlier posterior:
// weights(t) is a distribution over indices 0..t-1, where index j selects the
// posterior recorded entering round j+1 and index t-1 is "yesterday".
class MixingScheme {
public:
    static MixingScheme yesterday();
    static MixingScheme fixed_share(double alpha);
    static MixingScheme uniform_past(double alpha);
    // By default the decay of index j at round t follows (t-j)^-gamma; with
    // measure_from_newest the distance is taken from the newest past index
    // instead, (t-1-j)^-gamma.  Both normalize the switch mass to alpha.
    static MixingScheme decaying_past(double alpha, double gamma,
                                      bool measure_from_newest = false);
    static MixingScheme decaying_past_approx(double alpha, double gamma,
                                             bool measure_from_newest = false);

    // Grammar: yesterday | fixedshare:A | uniformpast:A | decayingpast:A:G |
    // decayingpast-approx:A:G
    static MixingScheme parse(const std::string& text);
    std::string to_string() const;

    SchemeKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    bool measure_from_newest() const { return measure_from_newest_; }

    std::vector<double> weights(int t) const;
    double weight(int t, int j) const;

    // Decaying kinds only.  The overload taking a prefix cache must already
    // cover t and runs in O(log t).
    BlockLayout block_layout(int t) const;
    BlockLayout block_layout(int t, const DecayPrefix& prefix) const;

    // Prior mass this scheme assigns to a partition: the product over rounds
    // of the weight given to each round's predecessor.  Sums to 1 over all
    // partitions for yesterday/fixed-share and is sub-normalized for the
    // uniform/decaying kinds.
    double log_partition_prior(const Partition& partition) const;
    double partition_prior(const Partition& partition) const;

private:
    MixingScheme(SchemeKind kind, double alpha, double gamma, bool measure_from_newest);

    SchemeKind kind_;
    double alpha_;
    double gamma_;
    bool measure_from_newest_;
};

} // namespace epp

#endif
