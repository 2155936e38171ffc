#include "epp/partition.hpp"

#include <algorithm>
#include <string>

#include "epp/errors.hpp"

namespace epp {

Partition::Partition(std::vector<int> prev) : prev_(std::move(prev)) {
    int horizon = static_cast<int>(prev_.size());
    cell_of_.assign(prev_.size(), -1);
    std::vector<char> used(prev_.size() + 1, 0);
    for (int t = 1; t <= horizon; ++t) {
        int p = prev_[static_cast<std::size_t>(t - 1)];
        if (p < 0 || p >= t)
            throw InvalidInputError("predecessor of round " + std::to_string(t) +
                                    " must lie in 0.." + std::to_string(t - 1));
        if (p == 0) {
            cell_of_[static_cast<std::size_t>(t - 1)] = static_cast<int>(cells_.size());
            cells_.push_back({t});
        } else {
            if (used[static_cast<std::size_t>(p)])
                throw InvalidInputError("round " + std::to_string(p) +
                                        " is the predecessor of two rounds");
            used[static_cast<std::size_t>(p)] = 1;
            int c = cell_of_[static_cast<std::size_t>(p - 1)];
            cell_of_[static_cast<std::size_t>(t - 1)] = c;
            cells_[static_cast<std::size_t>(c)].push_back(t);
        }
    }
}

Partition Partition::from_cells(int horizon, const std::vector<std::vector<int>>& cells) {
    std::vector<int> prev(static_cast<std::size_t>(horizon), -1);
    for (const auto& cell : cells) {
        auto sorted = cell;
        std::sort(sorted.begin(), sorted.end());
        int last = 0;
        for (int t : sorted) {
            if (t < 1 || t > horizon) throw InvalidInputError("cell element out of range");
            if (prev[static_cast<std::size_t>(t - 1)] != -1)
                throw InvalidInputError("round appears in two cells");
            prev[static_cast<std::size_t>(t - 1)] = last;
            last = t;
        }
    }
    for (int v : prev)
        if (v == -1) throw InvalidInputError("cells do not cover every round");
    return Partition(std::move(prev));
}

Partition Partition::single_cell(int horizon) {
    std::vector<int> prev(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t) prev[static_cast<std::size_t>(t - 1)] = t - 1;
    return Partition(std::move(prev));
}

Partition Partition::finest(int horizon) {
    return Partition(std::vector<int>(static_cast<std::size_t>(horizon), 0));
}

std::vector<Partition> enumerate_partitions(int horizon) {
    if (horizon < 1) throw InvalidInputError("horizon must be >= 1");
    if (horizon > 10) throw CapacityError("partition enumeration limited to 10 rounds");
    std::vector<Partition> out;
    std::vector<int> prev(static_cast<std::size_t>(horizon), 0);
    std::vector<char> used(static_cast<std::size_t>(horizon + 1), 0);
    // Depth-first over predecessor vectors; `used` enforces distinctness of
    // the positive entries.
    auto rec = [&](auto&& self, int t) -> void {
        if (t > horizon) {
            out.emplace_back(prev);
            return;
        }
        for (int p = 0; p < t; ++p) {
            if (p > 0 && used[static_cast<std::size_t>(p)]) continue;
            prev[static_cast<std::size_t>(t - 1)] = p;
            if (p > 0) used[static_cast<std::size_t>(p)] = 1;
            self(self, t + 1);
            if (p > 0) used[static_cast<std::size_t>(p)] = 0;
        }
    };
    rec(rec, 1);
    return out;
}

} // namespace epp
