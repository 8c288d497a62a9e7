#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kpe/qstate.hpp"

namespace kpe {

// A set partition of {1..n} into pairwise disjoint blocks, each of size at
// most k_max. Canonical form: blocks sorted by smallest element, elements
// sorted within blocks.
struct Partition {
    int n = 0;
    int k_max = 0;
    std::vector<QubitSubset> blocks;

    int block_count() const { return static_cast<int>(blocks.size()); }
    std::string render() const;  // "{1,3}|{2}|{4}"
};

// Number of partitions of {1..n} with all blocks of size <= k, by the
// recurrence T(n) = sum_j C(n-1, j-1) T(n-j) over block sizes j <= k.
// Guarded against uint64 overflow (n <= 25).
std::uint64_t count_partitions(int n, int k);

// Streams every admissible partition exactly once. Order: restricted-growth
// strings in descending lexicographic order, which puts the all-singleton
// partition first and makes argmin tie-breaking reproducible. A stream
// instance is single-consumer; distinct streams are independent.
class PartitionStream {
public:
    PartitionStream(int n, int k);
    std::optional<Partition> next();

private:
    int n_ = 0;
    int k_ = 0;
    bool started_ = false;
    bool done_ = false;
    std::vector<int> assign_;  // block index of each element (growth string)
    std::vector<int> size_;    // current block sizes

    Partition materialize() const;
    bool advance();
};

// Convenience wrapper; fn(const Partition&) returns false to stop early.
template <typename Fn>
void for_each_partition(int n, int k, Fn&& fn) {
    PartitionStream stream(n, k);
    while (auto p = stream.next())
        if (!fn(*p)) break;
}

}  // namespace kpe
