#include "kpe/partitions.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace kpe {

namespace {

void check_args(int n, int k) {
    if (n < 1) throw std::invalid_argument("partition count requires n >= 1");
    if (k < 1 || k > n) {
        std::ostringstream os;
        os << "block-size bound k = " << k << " out of range 1.." << n;
        throw std::invalid_argument(os.str());
    }
}

constexpr int count_cap = 25;  // Bell(25) still fits in uint64

}  // namespace

std::string Partition::render() const {
    std::ostringstream os;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (b) os << '|';
        os << '{';
        for (std::size_t i = 0; i < blocks[b].indices.size(); ++i) {
            if (i) os << ',';
            os << blocks[b].indices[i];
        }
        os << '}';
    }
    return os.str();
}

std::uint64_t count_partitions(int n, int k) {
    check_args(n, k);
    if (n > count_cap) {
        std::ostringstream os;
        os << "partition count for n = " << n << " exceeds the uint64 guard (n <= "
           << count_cap << ")";
        throw cap_error(os.str());
    }
    // Binomial table up to n-1.
    std::vector<std::vector<std::uint64_t>> choose(n, std::vector<std::uint64_t>(n, 0));
    for (int i = 0; i < n; ++i) {
        choose[i][0] = 1;
        for (int j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0);
    }
    std::vector<std::uint64_t> t(n + 1, 0);
    t[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::uint64_t acc = 0;
        for (int j = 1; j <= std::min(k, m); ++j) acc += choose[m - 1][j - 1] * t[m - j];
        t[m] = acc;
    }
    return t[n];
}

PartitionStream::PartitionStream(int n, int k) : n_(n), k_(k) {
    check_args(n, k);
    assign_.assign(n_, 0);
    size_.assign(n_, 0);
}

Partition PartitionStream::materialize() const {
    Partition p;
    p.n = n_;
    p.k_max = k_;
    const int nblocks = *std::max_element(assign_.begin(), assign_.end()) + 1;
    p.blocks.resize(nblocks);
    // Growth-string block indices are ordered by first occurrence, i.e. by
    // smallest element, so this is already the canonical form.
    for (int i = 0; i < n_; ++i) p.blocks[assign_[i]].indices.push_back(i + 1);
    return p;
}

std::optional<Partition> PartitionStream::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        // All singletons: the lexicographically largest growth string.
        for (int i = 0; i < n_; ++i) {
            assign_[i] = i;
            size_[i] = 0;
        }
        for (int i = 0; i < n_; ++i) size_[i] = 1;
        return materialize();
    }
    if (!advance()) {
        done_ = true;
        return std::nullopt;
    }
    return materialize();
}

bool PartitionStream::advance() {
    // Find the rightmost position whose block index can decrease, then refill
    // the suffix with new singleton blocks (the largest valid continuation).
    for (int i = n_ - 1; i >= 1; --i) {
        size_[assign_[i]]--;
        for (int v = assign_[i] - 1; v >= 0; --v) {
            if (size_[v] >= k_) continue;  // block full
            assign_[i] = v;
            size_[v]++;
            int mx = 0;
            for (int j = 0; j < i; ++j) mx = std::max(mx, assign_[j]);
            mx = std::max(mx, v);
            for (int j = i + 1; j < n_; ++j) {
                assign_[j] = ++mx;
                size_[assign_[j]] = 1;
            }
            return true;
        }
    }
    return false;
}

}  // namespace kpe
