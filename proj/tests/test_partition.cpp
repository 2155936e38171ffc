#include <doctest.h>

#include <set>

#include "epp/errors.hpp"
#include "epp/partition.hpp"

using namespace epp;

TEST_CASE("enumeration counts match the Bell numbers") {
    const int bell[] = {0, 1, 2, 5, 15, 52, 203};
    for (int horizon = 1; horizon <= 6; ++horizon)
        CHECK(enumerate_partitions(horizon).size() == static_cast<std::size_t>(bell[horizon]));
    CHECK_THROWS_AS(enumerate_partitions(11), CapacityError);
}

TEST_CASE("enumerated partitions are distinct and valid") {
    auto partitions = enumerate_partitions(5);
    std::set<std::vector<int>> seen;
    for (const auto& partition : partitions) {
        CHECK(seen.insert(partition.prev_vector()).second);
        // Every round appears in exactly one cell.
        std::set<int> covered;
        for (const auto& cell : partition.cells())
            for (int t : cell) CHECK(covered.insert(t).second);
        CHECK(covered.size() == 5);
    }
}

TEST_CASE("predecessor vectors map to cells and back") {
    Partition partition({0, 1, 0, 2, 3});
    REQUIRE(partition.num_cells() == 2);
    CHECK(partition.cells()[0] == std::vector<int>{1, 2, 4});
    CHECK(partition.cells()[1] == std::vector<int>{3, 5});
    CHECK(partition.cell_of(4) == 0);
    CHECK(partition.cell_of(5) == 1);

    for (const auto& p : enumerate_partitions(4)) {
        Partition rebuilt = Partition::from_cells(4, p.cells());
        CHECK(rebuilt == p);
    }
}

TEST_CASE("invalid predecessor vectors are rejected") {
    CHECK_THROWS_AS(Partition({1}), InvalidInputError);        // self-reference
    CHECK_THROWS_AS(Partition({0, 2}), InvalidInputError);     // future reference
    CHECK_THROWS_AS(Partition({0, 1, 1}), InvalidInputError);  // shared predecessor
    CHECK_THROWS_AS(Partition({0, -1}), InvalidInputError);
    CHECK_THROWS_AS(Partition::from_cells(3, {{1, 2}}), InvalidInputError); // round 3 uncovered
    CHECK_THROWS_AS(Partition::from_cells(3, {{1, 2}, {2, 3}}), InvalidInputError);
}

TEST_CASE("canonical shapes") {
    Partition chain = Partition::single_cell(4);
    CHECK(chain.num_cells() == 1);
    CHECK(chain.prev_vector() == std::vector<int>{0, 1, 2, 3});
    Partition dust = Partition::finest(4);
    CHECK(dust.num_cells() == 4);
    CHECK(dust.prev_vector() == std::vector<int>{0, 0, 0, 0});
}
