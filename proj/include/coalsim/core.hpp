#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coalsim/rng.hpp"

namespace coalsim {

// Finite vector of positive block masses, stored non-increasing.
class MassVector {
public:
    // `masses` must already be non-increasing and strictly positive.
    explicit MassVector(std::vector<double> masses);

    // Sorts descending before construction.
    static MassVector from_unsorted(std::vector<double> masses);

    // n equal blocks of the given mass.
    static MassVector uniform(std::size_t n, double mass);

    std::size_t len() const noexcept { return masses_.size(); }
    double operator[](std::size_t i) const noexcept { return masses_[i]; }
    const std::vector<double>& masses() const noexcept { return masses_; }

private:
    std::vector<double> masses_;
};

struct MomentStats {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma3 = 0.0;
};

// sigma_r = sum_i masses[i]^r for r = 1,2,3, by Kahan-compensated summation.
// sigma2 appears in denominators of the scaled walks, so the extra digits
// matter.
MomentStats moments(const MassVector& x);

// Compensated sum of an arbitrary range (shared by the moment and residual
// computations).
double compensated_sum(const std::vector<double>& values);

// One exponential clock per block: xi[i] ~ Exp(x[i]), independent over i.
// order[k] is the 0-based index of the block holding the (k+1)-th smallest
// clock, so reading blocks along `order` gives the size-biased ordering.
// All clock values are strictly distinct.
struct ClockFamily {
    std::vector<double> xi;
    std::vector<std::size_t> order;

    std::size_t size() const noexcept { return xi.size(); }
    // k-th order statistic xi_(k+1), k 0-based.
    double sorted(std::size_t k) const noexcept { return xi[order[k]]; }
};

// Deterministic given (x, seed, stream); tied clock values (possible in
// floating point, probability zero) are redrawn so the marginals stay
// exactly exponential.
ClockFamily draw_clocks(const MassVector& x, std::uint64_t seed, std::uint64_t stream = 0);
ClockFamily draw_clocks(const MassVector& x, RngStream& rng);

// Wraps externally supplied clock values (golden tests, CLI --xi). Values
// must be positive and pairwise distinct, one per block.
ClockFamily clocks_from_values(std::vector<double> xi);

// Partition of {1..n} in canonical form: every block sorted ascending and
// blocks ordered by their smallest element, so equality is structural.
class Partition {
public:
    Partition() = default;

    static Partition trivial(std::size_t n);
    // Canonicalizes; blocks must be disjoint and cover {1..n}.
    static Partition from_blocks(std::vector<std::vector<int>> blocks);

    const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
    std::size_t ground_size() const noexcept { return ground_size_; }
    std::size_t block_count() const noexcept { return blocks_.size(); }

    // True if every block of *this is contained in a block of `coarser`.
    bool refines(const Partition& coarser) const;

    bool operator==(const Partition&) const = default;

    // Canonical text key, e.g. "{1,3}{2}{4}". Stable across runs; used to
    // index partition frequency tables.
    std::string key() const;

private:
    std::vector<std::vector<int>> blocks_;
    std::size_t ground_size_ = 0;
};

// Non-increasing positive lengths (conceptually followed by zeros).
struct OrderedLengths {
    std::vector<double> lengths;

    static OrderedLengths from_unsorted(std::vector<double> values);
    double total() const;
    std::size_t size() const noexcept { return lengths.size(); }
    double operator[](std::size_t i) const noexcept { return lengths[i]; }
};

// One coalescence event: the blocks listed in `left` merge with the blocks
// in `right` at `time`. Both sides are sorted ascending and
// left.front() < right.front().
struct MergeRecord {
    double time = 0.0;
    std::vector<int> left;
    std::vector<int> right;
};

MergeRecord make_merge_record(double time, std::vector<int> a, std::vector<int> b);

}  // namespace coalsim
