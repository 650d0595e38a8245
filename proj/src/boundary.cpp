#include "qlat/boundary.hpp"

namespace qlat {

namespace {

VectorQSeries boundary_series(const FiniteQuadraticModule& dv, const CuspDatum& f, const Rational& order) {
    if (order < 0) fail(ErrorKind::InvalidInput, "negative truncation order");
    VectorQSeries theta = theta_series(f.kf_module, order);
    VectorQSeries pulled = pullback(theta, dv, f.projection);
    Integer top = floor_div(order.get_num(), order.get_den());
    if (!is_integer(order)) top += 1;
    return multiply(e2_series(top.get_si()), pulled);
}

} // namespace

BoundarySeries::BoundarySeries(const FiniteQuadraticModule& dv, const CuspDatum& f, const Rational& order)
    : series_(boundary_series(dv, f, order)),
      nf_(f.imprimitivity),
      b_(static_cast<int>(dv.lattice().rank()) - 2),
      strongly_primitive_(f.strongly_primitive) {}

Rational BoundarySeries::a_coeff(std::size_t gamma, const Rational& n) const {
    if (!is_integer(n + series_.q_values().at(gamma))) return 0;
    return Rational(nf_) * series_.coeff(gamma, n) / 24;
}

BoundaryCoefficient BoundarySeries::u_coeff(std::size_t gamma, const Rational& n, const EisensteinCoefficient& c) const {
    BoundaryCoefficient out;
    out.a = a_coeff(gamma, n);
    const Rational a00 = a_coeff(0, Rational(0));
    out.prime_bound = c.prime_bound;
    if (c.exact) {
        out.exact = true;
        out.exact_value = *c.exact_value / 2 * a00 - out.a;
        Rational v = *out.exact_value;
        out.value = BigFloat(v.get_num().get_str()) / BigFloat(v.get_den().get_str());
    } else {
        const BigFloat a00f = BigFloat(a00.get_num().get_str()) / BigFloat(a00.get_den().get_str());
        const BigFloat af = BigFloat(out.a.get_num().get_str()) / BigFloat(out.a.get_den().get_str());
        out.value = c.value / 2 * a00f - af;
    }
    if (strongly_primitive_) out.order_note = "O_eps(n^(" + to_string(make_rational(b_ - 2, 2)) + "+eps))";
    return out;
}

} // namespace qlat
