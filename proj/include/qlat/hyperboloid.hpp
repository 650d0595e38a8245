#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlat/local_density.hpp"

namespace qlat {

/// Orthogonal frame of V tensor R adapted to a positive 2-plane P_0.
/// The exact data are integral vectors f_1, f_2 spanning P_0 and rational vectors spanning its orthogonal;
/// the normalized frame e_i = f_i / sqrt(Q(f_i)), xi_j = g_j / sqrt(-Q(g_j)) has Gram diag(2, 2, -2, ..., -2).
struct SplittingFrame {
    IntMatrix positive;          // 2 rows
    RatMatrix negative;          // b rows
    std::vector<Integer> positive_q;
    std::vector<Rational> negative_q;
    /// Columns e_1, e_2, xi_1, ..., xi_b in lattice coordinates.
    std::vector<std::vector<long double>> columns;
    long double abs_det = 0;
};

/// Frame from the exact orthogonal basis of the Gram matrix.
SplittingFrame make_frame(const IntegerLattice& v);
/// Frame on a given positive 2-plane spanned by two orthogonal vectors of positive norm.
SplittingFrame make_frame(const IntegerLattice& v, const RationalVector& f1, const RationalVector& f2);

/// Omega = {x in A_0 : a_1^2 + a_2^2 <= rho^2}, a_i the coordinates along e_1, e_2.
struct Window {
    SplittingFrame frame;
    Rational rho;
};

struct PointCount {
    std::uint64_t count = 0;
    /// Points with a_1^2 + a_2^2 exactly rho^2 n (included in count).
    std::uint64_t grazing = 0;
    std::vector<RationalVector> points;
    std::string method;  // "hyperbolic" or "generic"
};

/// Exact number of lambda in gamma + V with Q(lambda) = -n and lambda / sqrt(n) in the window.
/// Uses the lattice's hyperbolic split when present; otherwise enumerates the majorant ellipsoid,
/// throwing GuardExceeded if its estimated volume exceeds max_nodes.
PointCount enumerate_points(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w,
                            bool collect = false, bool use_split = true, double max_nodes = 1e9);

/// The same count by scanning the box |x_i| <= sqrt(B (A^-1)_ii) of the majorant, for testing small cases.
std::uint64_t box_scan_count(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w,
                             double max_points = 1e8);

struct MeasureEstimate {
    double value = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
};

/// Invariant measure of the window, integrated in the chart over the last negative coordinate
/// (both sheets, with the half-angle substitution that makes the integrand bounded).
MeasureEstimate mu_a0(const Window& w, std::uint64_t samples, std::uint64_t seed, unsigned workers = 1);
/// Lebesgue volume (covolume of V equal to 1) of {|Q + 1| < eps} over the window, divided by 2 eps.
MeasureEstimate mu_infty(const IntegerLattice& v, const Window& w, std::uint64_t samples, double eps, std::uint64_t seed,
                         unsigned workers = 1);

/// Area of the unit sphere S^(b-1): b pi^(b/2) / Gamma(1 + b/2).
BigFloat unit_sphere_area(int b);

struct CountReport {
    Rational n;
    std::uint64_t empirical = 0;
    std::uint64_t grazing = 0;
    double predicted = 0;
    double ratio = 0;
    Rational ss_truncated;
};

struct EquidistributionReport {
    std::vector<CountReport> rows;
    std::vector<std::string> notes;  // skipped exponents
    MeasureEstimate mu_a0;
    MeasureEstimate mu_infty;
    unsigned long prime_bound = 0;
    double mean_ratio = 0;
};

struct EquidistributionOptions {
    unsigned long prime_bound = 100;
    std::uint64_t samples = 1000000;
    double eps = 1e-3;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

/// Per admissible n in [n_min, n_max]: exact count against mu_infty(Omega) n^(b/2) prod_{p <= P} mu_p.
EquidistributionReport equidistribution_run(const FiniteQuadraticModule& d, const Element& gamma, const Window& w,
                                            const Rational& n_min, const Rational& n_max, const EquidistributionOptions& opt);

/// Admissible exponents n in [n_min, n_max] with n = -Q(gamma) mod 1 and n > 0.
std::vector<Rational> admissible_exponents(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n_min,
                                           const Rational& n_max);

} // namespace qlat
