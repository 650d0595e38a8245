#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qlat/fqm.hpp"

namespace qlat {

/// Which class an exponent may sit in: n = -Q(gamma) mod 1 or n = +Q(gamma) mod 1.
enum class Support { MinusQ, PlusQ, Unchecked };

/// Truncated q-expansion sum_gamma sum_n c(gamma, n) q^n v_gamma with exponents in (1/N)Z.
class VectorQSeries {
  public:
    /// Scalar series (one component, integral exponents).
    explicit VectorQSeries(Rational truncation);
    /// One component per element of d, N = level of d.
    VectorQSeries(const FiniteQuadraticModule& d, Rational truncation, Support support);

    std::size_t components() const { return terms_.size(); }
    std::int64_t denominator() const { return den_; }
    const Rational& truncation() const { return trunc_; }
    Support support() const { return support_; }
    const std::vector<Rational>& q_values() const { return q_values_; }

    /// Coefficient at (gamma, n). Throws Truncation beyond the truncation order.
    Rational coeff(std::size_t gamma, const Rational& n) const;
    /// Adds to a coefficient; exponents beyond the truncation are dropped.
    void add(std::size_t gamma, const Rational& n, const Rational& value);

    /// Terms of one component keyed by N * exponent.
    const std::map<std::int64_t, Rational>& component(std::size_t gamma) const { return terms_.at(gamma); }
    Rational exponent(std::int64_t key) const { return make_rational(static_cast<long>(key), static_cast<long>(den_)); }

    VectorQSeries truncated(const Rational& order) const;
    /// Drops every term, keeping shape and truncation.
    void clear();
    /// gamma_index,exp_num,exp_den,coeff_num,coeff_den rows sorted by (exponent, gamma_index).
    std::string csv() const;

  private:
    std::int64_t key(const Rational& n) const;
    void check_support(std::size_t gamma, const Rational& n) const;

    std::vector<std::map<std::int64_t, Rational>> terms_;
    std::int64_t den_ = 1;
    Rational trunc_;
    Support support_ = Support::Unchecked;
    std::vector<Rational> q_values_;
};

bool operator==(const VectorQSeries& a, const VectorQSeries& b);

/// sum_{x in gamma + K} q^{-Q(x)} v_gamma for negative definite K, complete up to `order`.
VectorQSeries theta_series(const IntegerLattice& k, const Rational& order);
/// Same, indexed by the given discriminant module of k.
VectorQSeries theta_series(const FiniteQuadraticModule& d, const Rational& order);

std::int64_t sigma1(std::int64_t n);
/// 1 - 24 sum sigma_1(n) q^n.
VectorQSeries e2_series(std::int64_t order);

/// Cauchy product of a scalar series with a vector series (or of two scalar series).
VectorQSeries multiply(const VectorQSeries& f, const VectorQSeries& g);
/// Componentwise sum with the same shape.
VectorQSeries add(const VectorQSeries& f, const VectorQSeries& g);

/// p^*: component delta of the result is component projection[delta] of s (zero where -1).
VectorQSeries pullback(const VectorQSeries& s, const FiniteQuadraticModule& target, const std::vector<long>& projection);

} // namespace qlat
