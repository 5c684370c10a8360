#include "coalsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace coalsim {

MassVector::MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
            throw std::invalid_argument("MassVector: masses must be positive and finite");
        }
        if (i > 0 && masses_[i] > masses_[i - 1]) {
            throw std::invalid_argument("MassVector: masses must be non-increasing");
        }
    }
}

MassVector MassVector::from_unsorted(std::vector<double> masses) {
    std::sort(masses.begin(), masses.end(), std::greater<double>());
    return MassVector(std::move(masses));
}

MassVector MassVector::uniform(std::size_t n, double mass) {
    return MassVector(std::vector<double>(n, mass));
}

double compensated_sum(const std::vector<double>& values) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

MomentStats moments(const MassVector& x) {
    double s1 = 0.0, c1 = 0.0;
    double s2 = 0.0, c2 = 0.0;
    double s3 = 0.0, c3 = 0.0;
    auto add = [](double& sum, double& carry, double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    };
    for (double m : x.masses()) {
        add(s1, c1, m);
        add(s2, c2, m * m);
        add(s3, c3, m * m * m);
    }
    return MomentStats{s1, s2, s3};
}

namespace {

std::vector<std::size_t> sorted_order(const std::vector<double>& xi) {
    std::vector<std::size_t> order(xi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xi[a] < xi[b]; });
    return order;
}

bool has_adjacent_tie(const std::vector<double>& xi, const std::vector<std::size_t>& order) {
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (xi[order[k]] == xi[order[k - 1]]) return true;
    }
    return false;
}

}  // namespace

ClockFamily draw_clocks(const MassVector& x, RngStream& rng) {
    ClockFamily cf;
    cf.xi.resize(x.len());
    for (std::size_t i = 0; i < x.len(); ++i) {
        cf.xi[i] = rng.exponential(x[i]);
    }
    cf.order = sorted_order(cf.xi);
    // Ties are redrawn rather than perturbed, keeping the exponential
    // marginals exact.
    while (has_adjacent_tie(cf.xi, cf.order)) {
        for (std::size_t k = 1; k < cf.order.size(); ++k) {
            if (cf.xi[cf.order[k]] == cf.xi[cf.order[k - 1]]) {
                const std::size_t i = cf.order[k];
                cf.xi[i] = rng.exponential(x[i]);
            }
        }
        cf.order = sorted_order(cf.xi);
    }
    return cf;
}

ClockFamily draw_clocks(const MassVector& x, std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    return draw_clocks(x, rng);
}

ClockFamily clocks_from_values(std::vector<double> xi) {
    for (double v : xi) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("clocks_from_values: clock values must be positive");
        }
    }
    ClockFamily cf;
    cf.xi = std::move(xi);
    cf.order = sorted_order(cf.xi);
    if (has_adjacent_tie(cf.xi, cf.order)) {
        throw std::invalid_argument("clocks_from_values: clock values must be distinct");
    }
    return cf;
}

Partition Partition::trivial(std::size_t n) {
    std::vector<std::vector<int>> blocks(n);
    for (std::size_t i = 0; i < n; ++i) blocks[i] = {static_cast<int>(i + 1)};
    Partition p;
    p.blocks_ = std::move(blocks);
    p.ground_size_ = n;
    return p;
}

Partition Partition::from_blocks(std::vector<std::vector<int>> blocks) {
    std::size_t total = 0;
    std::set<int> seen;
    for (auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("Partition: empty block");
        std::sort(b.begin(), b.end());
        for (int e : b) {
            if (e < 1) throw std::invalid_argument("Partition: indices are 1-based");
            if (!seen.insert(e).second) {
                throw std::invalid_argument("Partition: blocks must be disjoint");
            }
        }
        total += b.size();
    }
    if (!seen.empty() && *seen.rbegin() != static_cast<int>(total)) {
        throw std::invalid_argument("Partition: blocks must cover {1..n}");
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    Partition p;
    p.blocks_ = std::move(blocks);
    p.ground_size_ = total;
    return p;
}

bool Partition::refines(const Partition& coarser) const {
    if (ground_size_ != coarser.ground_size_) return false;
    std::vector<int> owner(ground_size_ + 1, -1);
    for (std::size_t b = 0; b < coarser.blocks_.size(); ++b) {
        for (int e : coarser.blocks_[b]) owner[e] = static_cast<int>(b);
    }
    for (const auto& block : blocks_) {
        const int first = owner[block.front()];
        for (int e : block) {
            if (owner[e] != first) return false;
        }
    }
    return true;
}

std::string Partition::key() const {
    std::ostringstream os;
    for (const auto& block : blocks_) {
        os << '{';
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i) os << ',';
            os << block[i];
        }
        os << '}';
    }
    return os.str();
}

OrderedLengths OrderedLengths::from_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<double>());
    return OrderedLengths{std::move(values)};
}

double OrderedLengths::total() const {
    return compensated_sum(lengths);
}

MergeRecord make_merge_record(double time, std::vector<int> a, std::vector<int> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("MergeRecord: merge sides must be nonempty");
    }
    if (a.front() > b.front()) std::swap(a, b);
    return MergeRecord{time, std::move(a), std::move(b)};
}

}  // namespace coalsim
