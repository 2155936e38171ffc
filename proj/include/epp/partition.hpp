#ifndef EPP_PARTITION_HPP
#define EPP_PARTITION_HPP

#include <vector>

namespace epp {

// Partition of rounds 1..T into cells, stored as a predecessor vector:
// prev(t) = 0 means round t opens a new cell, prev(t) = j in 1..t-1 appends t
// to j's cell.  Positive predecessor values are necessarily distinct, which
// makes the representation a bijection with set partitions.
class Partition {
public:
    explicit Partition(std::vector<int> prev); // prev[i] belongs to round i+1
    static Partition from_cells(int horizon, const std::vector<std::vector<int>>& cells);
    static Partition single_cell(int horizon);
    static Partition finest(int horizon);

    int horizon() const { return static_cast<int>(prev_.size()); }
    int prev(int t) const { return prev_[static_cast<std::size_t>(t - 1)]; }
    const std::vector<int>& prev_vector() const { return prev_; }
    // Cells in order of first element; each cell sorted ascending.
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    // Index of the cell containing round t.
    int cell_of(int t) const { return cell_of_[static_cast<std::size_t>(t - 1)]; }

    bool operator==(const Partition& other) const { return prev_ == other.prev_; }

private:
    std::vector<int> prev_;
    std::vector<std::vector<int>> cells_;
    std::vector<int> cell_of_;
};

// All partitions of 1..T (Bell(T) of them); guarded at T <= 10.
std::vector<Partition> enumerate_partitions(int horizon);

} // namespace epp

#endif
