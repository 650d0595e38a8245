#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qlat/matrix.hpp"

namespace qlat {

/// Exact LLL on a positive definite Gram matrix. transform * gram * transform^T = reduced.
struct LllResult {
    IntMatrix transform;
    RatMatrix gram;
};
LllResult lll_reduce(const RatMatrix& gram, const Rational& delta = Rational(3, 4));

/// Fincke-Pohst enumeration of the points x = shift + z (z integral) with x^T A x <= bound.
/// Pruning is done in long double with a small slack, so callers must re-check exactly;
/// every point satisfying the exact inequality is visited.
class ShortVectorEnumerator {
  public:
    /// A must be positive definite. LLL is applied first unless disabled.
    explicit ShortVectorEnumerator(const RatMatrix& a, bool reduce = true);

    std::size_t dimension() const { return n_; }

    /// f(const std::vector<int64_t>& z) for every candidate; returns the number of visited tree nodes.
    /// Throws GuardExceeded after max_nodes nodes.
    template <class F>
    std::uint64_t for_each(const RatVector& shift, const Rational& bound, F&& f, std::uint64_t max_nodes = 1000000000ULL) const;

  private:
    void check_nodes(std::uint64_t nodes, std::uint64_t max_nodes) const;

    std::size_t n_ = 0;
    std::vector<std::int64_t> transform_;  // row-major; original x = reduced y * transform_
    RatMatrix transform_inv_;
    std::vector<long double> q_diag_;
    std::vector<std::vector<long double>> q_off_;  // q_off_[i][j], j > i
};

template <class F>
std::uint64_t ShortVectorEnumerator::for_each(const RatVector& shift, const Rational& bound, F&& f, std::uint64_t max_nodes) const {
    if (shift.size() != n_) fail(ErrorKind::InvalidInput, "shift has the wrong length");
    if (bound < 0) return 0;
    if (n_ == 0) {
        std::vector<std::int64_t> empty;
        f(empty);
        return 1;
    }
    // shift in reduced coordinates
    std::vector<long double> c(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        Rational s = 0;
        for (std::size_t k = 0; k < n_; ++k)
            if (shift[k] != 0) s += shift[k] * transform_inv_(k, j);
        c[j] = static_cast<long double>(s.get_d());
    }
    const long double b = static_cast<long double>(bound.get_d());
    const long double limit = b * (1.0L + 1e-12L) + 1e-9L;

    std::vector<std::int64_t> w(n_, 0);
    std::vector<long double> rem(n_ + 1, 0), center(n_, 0);
    std::vector<std::int64_t> hi(n_, 0);
    std::vector<std::int64_t> z(n_);
    std::uint64_t nodes = 0;
    rem[n_] = limit;

    auto setup = [&](std::size_t i) -> bool {
        long double ctr = 0;
        for (std::size_t j = i + 1; j < n_; ++j) ctr -= q_off_[i][j] * (c[j] + static_cast<long double>(w[j]));
        center[i] = ctr;
        long double r = rem[i + 1];
        if (r < 0) return false;
        long double half = std::sqrt(r / q_diag_[i]);
        long double lo = std::ceil(ctr - half - c[i] - 1e-12L);
        long double up = std::floor(ctr + half - c[i] + 1e-12L);
        if (lo > up) return false;
        w[i] = static_cast<std::int64_t>(lo);
        hi[i] = static_cast<std::int64_t>(up);
        return true;
    };

    std::size_t i = n_ - 1;
    bool ok = setup(i);
    while (true) {
        if (!ok || w[i] > hi[i]) {
            if (i == n_ - 1) break;
            ++i;
            ++w[i];
            ok = true;
            continue;
        }
        ++nodes;
        if ((nodes & 0xFFFFF) == 0) check_nodes(nodes, max_nodes);
        long double d = c[i] + static_cast<long double>(w[i]) - center[i];
        rem[i] = rem[i + 1] - q_diag_[i] * d * d;
        if (rem[i] < -1e-9L * (1.0L + b)) {
            ++w[i];
            continue;
        }
        if (i == 0) {
            for (std::size_t k = 0; k < n_; ++k) {
                std::int64_t s = 0;
                for (std::size_t j = 0; j < n_; ++j) s += w[j] * transform_[j * n_ + k];
                z[k] = s;
            }
            f(static_cast<const std::vector<std::int64_t>&>(z));
            ++w[0];
            continue;
        }
        --i;
        ok = setup(i);
    }
    return nodes;
}

} // namespace qlat
