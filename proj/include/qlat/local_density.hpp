#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "qlat/fqm.hpp"

namespace qlat {

using BigFloat = boost::multiprecision::cpp_dec_float_50;

/// #{alpha in L/aL : Q(alpha + lift) + n = 0 mod a} by exhaustive enumeration.
Integer count_solutions_naive(const IntegerLattice& l, const RationalVector& lift, const Rational& n, std::uint64_t a,
                              std::uint64_t guard = 100000000ULL);
Integer count_solutions_naive(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, std::uint64_t a,
                              std::uint64_t guard = 100000000ULL);

/// p-adic Jordan splitting: columns of `basis` (p-integral, invertible mod p) give a block diagonal Gram.
struct JordanDecomposition {
    unsigned long prime = 0;
    RatMatrix basis;
    RatMatrix gram;
    std::vector<std::vector<std::size_t>> blocks;  // each block has rank 1, or rank 2 when p = 2
};
JordanDecomposition jordan_decomposition(const IntMatrix& gram, unsigned long p);

/// Same count for a = p^s via the Jordan splitting and cyclic convolution of per-block value counts.
Integer count_solutions_split(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long p, int s);

struct LocalDensityReport {
    unsigned long prime = 0;
    int floor_exponent = 1;
    int stabilization_exponent = 0;
    /// N(gamma, n, L, p^s) for s = 1 .. stabilization_exponent + 1.
    std::vector<Integer> raw_counts;
    Rational density;
    std::string method;  // "hensel" or "split"
};

struct SingularSeries {
    std::map<unsigned long, LocalDensityReport> factors;
    unsigned long prime_bound = 0;
    Rational truncated_product;
    std::string tail_policy = "omitted primes contribute 1";
    bool locally_representable = true;
};

struct EisensteinCoefficient {
    BigFloat value;
    bool exact = false;
    std::optional<Rational> exact_value;
    BigFloat archimedean;  // the factor multiplying the singular series
    std::optional<SingularSeries> series;
    unsigned long prime_bound = 0;
};

/// Gamma(1 + b/2) via factorials and the half-integer ladder.
BigFloat gamma_one_plus_half(int b);
BigFloat pi_big();

/// Cached local data for one (lattice, gamma); shares distributions across n. Not thread-safe.
class DensityEngine {
  public:
    DensityEngine(const FiniteQuadraticModule& d, Element gamma);
    ~DensityEngine();
    DensityEngine(DensityEngine&&) noexcept;

    const FiniteQuadraticModule& module() const { return d_; }
    const Element& gamma() const { return gamma_; }

    /// N(gamma, n, L, p^s) through the split counter (or the Hensel recursion when use_hensel and p is odd, p not | det).
    Integer count(const Rational& n, unsigned long p, int s, bool use_hensel = true);
    /// Throws NoStabilization if no two consecutive exponents up to s_max agree.
    LocalDensityReport local_density(const Rational& n, unsigned long p, std::optional<int> s_max = std::nullopt);
    SingularSeries singular_series(const Rational& n, unsigned long prime_bound);
    bool is_representable(const Rational& n);

    /// The integer Q(gamma) + n; throws NotInSupport if n is not in -Q(gamma) + Z.
    Integer shifted(const Rational& n) const;

  private:
    struct Impl;
    FiniteQuadraticModule d_;
    Element gamma_;
    std::unique_ptr<Impl> impl_;
};

LocalDensityReport local_density(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long p,
                                 std::optional<int> s_max = std::nullopt);
/// Primes up to prime_bound together with the primes dividing 2 n_num n_den det.
SingularSeries singular_series(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long prime_bound);
EisensteinCoefficient eisenstein_coefficient(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n,
                                             unsigned long prime_bound);
/// Uses the archimedean constant of c with an already computed singular series.
EisensteinCoefficient eisenstein_from_series(const FiniteQuadraticModule& d, const Rational& n, const SingularSeries& ss);
bool is_representable(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n);

/// Default upper exponent 1 + v_p(4 n_num n_den det) + 2.
int default_s_max(const Integer& det, const Rational& n, unsigned long p);

std::string format_decimal(const BigFloat& x, int digits = 12);

} // namespace qlat
