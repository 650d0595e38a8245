#pragma once

#include <optional>
#include <string>

#include "qlat/cusp.hpp"
#include "qlat/local_density.hpp"
#include "qlat/qseries.hpp"

namespace qlat {

/// u(gamma, n, F) = (c(gamma, n) / 2) a(0, 0, F) - a(gamma, n, F).
struct BoundaryCoefficient {
    BigFloat value;
    bool exact = false;
    std::optional<Rational> exact_value;
    Rational a;  // a(gamma, n, F)
    unsigned long prime_bound = 0;
    /// Growth order quoted for strongly primitive cusps, empty otherwise.
    std::string order_note;
};

/// E_2 . p^*(Theta_F) on D(V), computed once up to a truncation order.
class BoundarySeries {
  public:
    BoundarySeries(const FiniteQuadraticModule& dv, const CuspDatum& f, const Rational& order);

    const VectorQSeries& series() const { return series_; }
    const Integer& imprimitivity() const { return nf_; }

    /// (N_F / 24) (E_2 . p^* Theta_F)(gamma, n); zero off the support, Truncation error beyond the order.
    Rational a_coeff(std::size_t gamma, const Rational& n) const;
    BoundaryCoefficient u_coeff(std::size_t gamma, const Rational& n, const EisensteinCoefficient& c) const;

  private:
    VectorQSeries series_;
    Integer nf_;
    int b_ = 0;
    bool strongly_primitive_ = false;
};

} // namespace qlat
