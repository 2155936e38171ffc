#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "epp/errors.hpp"
#include "epp/mixing.hpp"
#include "epp/partition.hpp"

using namespace epp;

namespace {

std::vector<MixingScheme> all_kinds() {
    return {MixingScheme::yesterday(),
            MixingScheme::fixed_share(0.3),
            MixingScheme::uniform_past(0.25),
            MixingScheme::decaying_past(0.5, 1.0),
            MixingScheme::decaying_past_approx(0.5, 1.0)};
}

double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

TEST_CASE("parse and to_string round-trip") {
    const char* texts[] = {"yesterday", "fixedshare:0.3", "uniformpast:0.25",
                           "decayingpast:0.5:1", "decayingpast-approx:0.1:2"};
    for (const char* text : texts) {
        MixingScheme scheme = MixingScheme::parse(text);
        CHECK(scheme.to_string() == text);
        CHECK(MixingScheme::parse(scheme.to_string()).kind() == scheme.kind());
    }
    CHECK(MixingScheme::parse("fixedshare:0.3").alpha() == 0.3);
    CHECK(MixingScheme::parse("decayingpast:0.5:1").gamma() == 1.0);

    CHECK_THROWS_AS(MixingScheme::parse("nonsense"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("yesterday:0.1"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("fixedshare"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("fixedshare:abc"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("fixedshare:1.5"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("decayingpast:0.5"), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::parse("decayingpast:0.5:-1"), InvalidInputError);
}

TEST_CASE("weights form a distribution over 0..t-1") {
    for (const auto& scheme : all_kinds()) {
        for (int t : {1, 2, 3, 7, 64, 65, 1000, 10000}) {
            auto w = scheme.weights(t);
            REQUIRE(w.size() == static_cast<std::size_t>(t));
            double total = sum(w);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            for (double x : w) CHECK(x >= 0.0);
        }
        // Round 1 always puts everything on the initial distribution.
        CHECK(scheme.weights(1) == std::vector<double>{1.0});
    }
}

TEST_CASE("weight(t, j) matches the dense vector") {
    for (const auto& scheme : all_kinds()) {
        for (int t : {1, 2, 5, 17}) {
            auto w = scheme.weights(t);
            for (int j = 0; j < t; ++j)
                CHECK(scheme.weight(t, j) == doctest::Approx(w[static_cast<std::size_t>(j)])
                                                 .epsilon(1e-15));
            CHECK(scheme.weight(t, -1) == 0.0);
            CHECK(scheme.weight(t, t) == 0.0);
        }
    }
}

TEST_CASE("hand-checked weight vectors") {
    CHECK(MixingScheme::yesterday().weights(4) == std::vector<double>{0, 0, 0, 1});

    auto fs = MixingScheme::fixed_share(0.3).weights(4);
    CHECK(fs[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fs[1] == 0.0);
    CHECK(fs[2] == 0.0);
    CHECK(fs[3] == doctest::Approx(0.7).epsilon(1e-15));

    auto up = MixingScheme::uniform_past(0.25).weights(5);
    for (int j = 0; j < 4; ++j)
        CHECK(up[static_cast<std::size_t>(j)] == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(up[4] == doctest::Approx(0.75).epsilon(1e-15));

    // Decaying past, alpha=0.5, gamma=1: at t=3 the past indices sit at
    // distances 3 and 2, Z = 1/3 + 1/2, so the weights are (0.2, 0.3, 0.5).
    auto dp3 = MixingScheme::decaying_past(0.5, 1.0).weights(3);
    CHECK(dp3[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(dp3[1] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(dp3[2] == doctest::Approx(0.5).epsilon(1e-14));

    // Same scheme at t=4: Z = 1/4 + 1/3 + 1/2 = 13/12.
    auto dp4 = MixingScheme::decaying_past(0.5, 1.0).weights(4);
    CHECK(dp4[0] == doctest::Approx(3.0 / 26.0).epsilon(1e-14));
    CHECK(dp4[1] == doctest::Approx(2.0 / 13.0).epsilon(1e-14));
    CHECK(dp4[2] == doctest::Approx(3.0 / 13.0).epsilon(1e-14));
    CHECK(dp4[3] == doctest::Approx(0.5).epsilon(1e-14));

    // Distance measured from the newest past index instead: at t=3 the
    // distances become 2 and 1, Z = 1/2 + 1, giving (1/6, 1/3, 1/2).
    auto dpn = MixingScheme::decaying_past(0.5, 1.0, true).weights(3);
    CHECK(dpn[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(dpn[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(dpn[2] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("decay prefix sums") {
    DecayPrefix prefix(1.0);
    prefix.extend_to(6);
    CHECK(prefix.size() == 6);
    CHECK(prefix.range(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(prefix.range(1, 3) == doctest::Approx(0.5 + 1.0 / 3.0).epsilon(1e-15));
    CHECK(prefix.range(2, 2) == 0.0);
    prefix.extend_to(3); // shrinking request is a no-op
    CHECK(prefix.size() == 6);
}

TEST_CASE("block layout follows the binary decomposition of t-1") {
    MixingScheme scheme = MixingScheme::decaying_past_approx(0.5, 1.0);

    // t = 6: five past indices split as 4 + 1.
    BlockLayout layout = scheme.block_layout(6);
    REQUIRE(layout.blocks.size() == 2);
    CHECK(layout.blocks[0].begin == 0);
    CHECK(layout.blocks[0].end == 4);
    CHECK(layout.blocks[1].begin == 4);
    CHECK(layout.blocks[1].end == 5);
    CHECK(layout.newest_weight == doctest::Approx(0.5).epsilon(1e-15));

    // Masses are the exact decay mass of each block's index range.
    double z = 1.0 / 2 + 1.0 / 3 + 1.0 / 4 + 1.0 / 5 + 1.0 / 6;
    double old_mass = 1.0 / 3 + 1.0 / 4 + 1.0 / 5 + 1.0 / 6; // distances 6,5,4,3
    double new_mass = 1.0 / 2;                               // distance 2
    CHECK(layout.blocks[0].weight == doctest::Approx(0.5 * old_mass / z).epsilon(1e-14));
    CHECK(layout.blocks[1].weight == doctest::Approx(0.5 * new_mass / z).epsilon(1e-14));
    CHECK(layout.blocks[0].weight + layout.blocks[1].weight ==
          doctest::Approx(0.5).epsilon(1e-14));

    // Block count equals the popcount of t-1 for a good range of t.
    DecayPrefix prefix(1.0);
    prefix.extend_to(4097);
    for (int t = 1; t <= 4097; ++t) {
        BlockLayout l = scheme.block_layout(t, prefix);
        int expected = 0;
        for (int m = t - 1; m; m >>= 1) expected += m & 1;
        CHECK(static_cast<int>(l.blocks.size()) == expected);
        int cursor = 0;
        double mass = l.newest_weight;
        for (const auto& block : l.blocks) {
            CHECK(block.begin == cursor);
            CHECK(block.begin < block.end);
            cursor = block.end;
            mass += block.weight;
        }
        CHECK(cursor == t - 1);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(MixingScheme::uniform_past(0.5).block_layout(4), InvalidInputError);
    DecayPrefix small(1.0);
    small.extend_to(3);
    CHECK_THROWS_AS(scheme.block_layout(10, small), InvalidInputError);
}

TEST_CASE("zero decay exponent reduces the block scheme to uniform past") {
    MixingScheme approx = MixingScheme::decaying_past_approx(0.35, 0.0);
    MixingScheme uniform = MixingScheme::uniform_past(0.35);
    for (int t : {1, 2, 3, 9, 64, 257}) {
        auto a = approx.weights(t);
        auto u = uniform.weights(t);
        for (int j = 0; j < t; ++j)
            CHECK(a[static_cast<std::size_t>(j)] ==
                  doctest::Approx(u[static_cast<std::size_t>(j)]).epsilon(1e-13));
    }
}

TEST_CASE("approximation stays close to the exact decaying weights") {
    MixingScheme exact = MixingScheme::decaying_past(0.5, 1.0);
    MixingScheme approx = MixingScheme::decaying_past_approx(0.5, 1.0);
    for (int t : {2, 5, 33, 200}) {
        auto we = exact.weights(t);
        auto wa = approx.weights(t);
        // Same switch mass in total, and blockwise totals match exactly.
        CHECK(sum(we) == doctest::Approx(sum(wa)).epsilon(1e-12));
        BlockLayout layout = approx.block_layout(t);
        for (const auto& block : layout.blocks) {
            double exact_mass = 0;
            for (int j = block.begin; j < block.end; ++j)
                exact_mass += we[static_cast<std::size_t>(j)];
            CHECK(block.weight == doctest::Approx(exact_mass).epsilon(1e-12));
        }
    }
}

TEST_CASE("partition priors") {
    // Fixed share: every round independently keeps yesterday (1-alpha) or
    // resets to the first cell (alpha), so a pattern with k resets after
    // round 1 has prior alpha^k (1-alpha)^(T-1-k).
    MixingScheme fs = MixingScheme::fixed_share(0.3);
    Partition keep_all({0, 1, 2, 3, 4});
    CHECK(fs.partition_prior(keep_all) == doctest::Approx(std::pow(0.7, 4)).epsilon(1e-12));
    Partition one_reset({0, 1, 0, 3, 4});
    CHECK(fs.partition_prior(one_reset) ==
          doctest::Approx(0.3 * std::pow(0.7, 3)).epsilon(1e-12));
    Partition unreachable({0, 1, 0, 2, 4}); // round 4 resumes cell of round 2
    CHECK(fs.partition_prior(unreachable) == 0.0);
    CHECK(std::isinf(fs.log_partition_prior(unreachable)));

    // Yesterday concentrates on the single chain.
    MixingScheme y = MixingScheme::yesterday();
    CHECK(y.partition_prior(Partition::single_cell(5)) == doctest::Approx(1.0));
    CHECK(y.partition_prior(one_reset) == 0.0);

    // Normalization over all partitions: exactly 1 for yesterday and fixed
    // share, at most 1 (leaking mass to invalid predecessor combinations)
    // for the others.
    auto partitions = enumerate_partitions(6);
    for (const auto& scheme : all_kinds()) {
        double total = 0;
        for (const auto& partition : partitions) total += scheme.partition_prior(partition);
        if (scheme.kind() == SchemeKind::yesterday || scheme.kind() == SchemeKind::fixed_share)
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        else {
            CHECK(total <= 1.0 + 1e-12);
            CHECK(total > 0.0);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(MixingScheme::fixed_share(-0.1), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::uniform_past(1.1), InvalidInputError);
    CHECK_THROWS_AS(MixingScheme::decaying_past(0.5, -1.0), InvalidInputError);
    CHECK_NOTHROW(MixingScheme::fixed_share(0.0));
    CHECK_NOTHROW(MixingScheme::fixed_share(1.0));
}
