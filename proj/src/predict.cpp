#include "qlat/predict.hpp"

#include <cmath>

namespace qlat {

namespace {

using i128 = __int128;

Integer from_i128(i128 x) {
    const bool neg = x < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-x) : static_cast<unsigned __int128>(x);
    std::string digits;
    do {
        digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    } while (u);
    Integer out(digits);
    return neg ? Integer(-out) : out;
}

BigFloat to_big(const Rational& r) { return BigFloat(r.get_num().get_str()) / BigFloat(r.get_den().get_str()); }

void check_signature(const FiniteQuadraticModule& d) {
    Signature s = signature(d.lattice());
    if (s.positive != 2 || s.negative < 3) fail(ErrorKind::HypothesisViolated, "predictions need signature (2, b) with b >= 3");
}

std::optional<Integer> exact_sqrt(const Integer& x) {
    if (x < 0) return std::nullopt;
    Integer r = sqrt(x);
    if (r * r != x) return std::nullopt;
    return r;
}

std::optional<Rational> rational_sqrt(const Rational& x) {
    auto a = exact_sqrt(x.get_num());
    auto b = exact_sqrt(x.get_den());
    if (!a || !b) return std::nullopt;
    return make_rational(*a, *b);
}

Representability rank_one(const FiniteQuadraticModule& dp, const Element& gamma, const Rational& n) {
    const Integer two_d = dp.lattice().gram()(0, 0);
    const Rational l = dp.lift(gamma)[0];
    // Q(t) = d t^2 = n
    auto r = rational_sqrt(n * 2 / Rational(two_d));
    if (!r) return Representability::No;
    return is_integer(*r - l) || is_integer(-*r - l) ? Representability::Yes : Representability::No;
}

Representability rank_two(const FiniteQuadraticModule& dp, const Element& gamma, const Rational& n) {
    const IntMatrix& g = dp.lattice().gram();
    const i128 a = g(0, 0).get_si() / 2, b = g(0, 1).get_si(), c = g(1, 1).get_si() / 2;
    const i128 disc = b * b - 4 * a * c;
    if (disc <= 0) fail(ErrorKind::HypothesisViolated, "rank-2 P must be indefinite");
    RationalVector l = dp.lift(gamma);
    Integer den = lcm(Integer(l[0].get_den()), Integer(l[1].get_den()));
    if (!den.fits_slong_p()) fail(ErrorKind::GuardExceeded, "coset denominator too large");
    const i128 delta = den.get_si();
    const i128 x0 = Rational(l[0] * Rational(den)).get_num().get_si(), y0 = Rational(l[1] * Rational(den)).get_num().get_si();
    Rational nn = n * Rational(den * den);
    if (!is_integer(nn)) return Representability::No;
    const i128 big_n = nn.get_num().get_si();
    auto mod = [](i128 x, i128 m) { return ((x % m) + m) % m; };

    // fundamental solution of u^2 - D v^2 = 4
    i128 u = 0, v = 0;
    for (i128 t = 1; t <= 10000000; ++t) {
        Integer w = Integer(static_cast<long>(disc)) * Integer(static_cast<long>(t)) * Integer(static_cast<long>(t)) + 4;
        if (auto s = exact_sqrt(w)) {
            u = s->get_si();
            v = t;
            break;
        }
    }
    if (v == 0) fail(ErrorKind::GuardExceeded, "Pell equation has no small fundamental solution");
    // automorph of a x^2 + b x y + c y^2, its order modulo delta
    const i128 m00 = (u - b * v) / 2, m01 = -c * v, m10 = a * v, m11 = (u + b * v) / 2;
    i128 p00 = 1, p01 = 0, p10 = 0, p11 = 1;
    long order = 0;
    for (long k = 1; k <= 1000000; ++k) {
        i128 q00 = mod(p00 * m00 + p01 * m10, delta), q01 = mod(p00 * m01 + p01 * m11, delta);
        i128 q10 = mod(p10 * m00 + p11 * m10, delta), q11 = mod(p10 * m01 + p11 * m11, delta);
        p00 = q00, p01 = q01, p10 = q10, p11 = q11;
        if (mod(p00 - 1, delta) == 0 && p01 == 0 && p10 == 0 && mod(p11 - 1, delta) == 0) {
            order = k;
            break;
        }
    }
    if (order == 0) fail(ErrorKind::GuardExceeded, "automorph order modulo the coset denominator not found");
    const long double sd = std::sqrt(static_cast<long double>(disc));
    const long double eta = std::pow((static_cast<long double>(u) + static_cast<long double>(v) * sd) / 2, order);
    const long double m = std::fabs(static_cast<long double>(4 * a * big_n));
    const long double ybound = std::sqrt(m) * (eta + 1) / (2 * sd) + 1;
    if (!(ybound < 1e8)) fail(ErrorKind::GuardExceeded, "fundamental domain too large for the exact search");
    // (2aX + bY)^2 - D Y^2 = 4aN on each orbit of the congruence automorphs has a point with |Y| <= ybound
    const i128 yb = static_cast<i128>(ybound);
    for (i128 y = -yb; y <= yb; ++y) {
        if (mod(y - y0, delta) != 0) continue;
        const i128 rhs = 4 * a * big_n + disc * y * y;
        auto z = exact_sqrt(from_i128(rhs));
        if (!z) continue;
        for (int sgn : {1, -1}) {
            const i128 zz = sgn * static_cast<i128>(z->get_si()) - b * y;
            if (zz % (2 * a) != 0) continue;
            if (mod(zz / (2 * a) - x0, delta) == 0) return Representability::Yes;
        }
    }
    return Representability::No;
}

} // namespace

Prediction predict_N(DensityEngine& engine, const Rational& n, const BigFloat& mu_s, unsigned long prime_bound) {
    const FiniteQuadraticModule& d = engine.module();
    check_signature(d);
    if (n <= 0) fail(ErrorKind::InvalidInput, "n must be positive");
    const int b = static_cast<int>(d.lattice().rank()) - 2;
    Prediction p;
    p.prime_bound = prime_bound;
    p.error_order = "O_eps(n^(" + to_string(make_rational(2 + b, 4)) + "+eps))";
    if (!is_integer(n + d.q_value(engine.gamma()))) {
        p.value = 0;
        p.note = "n is not in -Q(gamma) + Z";
        return p;
    }
    p.series = engine.singular_series(n, prime_bound);
    p.representable = engine.is_representable(n);
    const BigFloat half_b = BigFloat(b) / 2;
    p.archimedean = mu_s * boost::multiprecision::pow(2 * pi_big(), 1 + half_b) * boost::multiprecision::pow(to_big(n), half_b) /
                    (boost::multiprecision::sqrt(BigFloat(static_cast<unsigned long>(d.order()))) * gamma_one_plus_half(b));
    if (!p.representable) {
        p.value = 0;
        p.note = "n is not locally represented by gamma + V";
        return p;
    }
    p.value = p.archimedean * to_big(p.series->truncated_product);
    return p;
}

Prediction predict_N(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const BigFloat& mu_s,
                     unsigned long prime_bound) {
    DensityEngine engine(d, gamma);
    return predict_N(engine, n, mu_s, prime_bound);
}

DegreePrediction degree_prediction(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const BigFloat& mu_s,
                                   const std::vector<BoundaryTerm>& boundary, unsigned long prime_bound) {
    DegreePrediction out;
    out.main = predict_N(d, gamma, n, mu_s, prime_bound);
    EisensteinCoefficient c;
    if (out.main.series) {
        c = eisenstein_from_series(d, n, *out.main.series);
    } else {
        c.exact = true;
        c.exact_value = Rational(0);
        c.value = 0;
        c.prime_bound = prime_bound;
    }
    out.total = out.main.value;
    const std::size_t gi = d.index(gamma);
    for (const auto& t : boundary) {
        if (!t.series) fail(ErrorKind::InvalidInput, "boundary term without a series");
        BoundaryCoefficient u = t.series->u_coeff(gi, n, c);
        out.total += u.value * BigFloat(t.degree.get_str());
        out.u.push_back(u);
    }
    return out;
}

IntMatrix k3_rank_one_embedding(long d) {
    if (d == 0) fail(ErrorKind::InvalidInput, "rank1(0) is degenerate");
    IntMatrix rows(1, 22);
    rows(0, 0) = 1;
    rows(0, 1) = d;
    return rows;
}

K3Setup k3_setup(const IntMatrix& p_rows) {
    const IntegerLattice lambda = k3_lattice();
    if (p_rows.cols() != 22) fail(ErrorKind::InvalidInput, "P rows must have 22 entries");
    const std::size_t rho = p_rows.rows();
    if (rho == 0 || rho > 4) fail(ErrorKind::HypothesisViolated, "P must have rank between 1 and 4");
    IntegerLattice p(induced_gram(lambda, p_rows), "P");
    Signature sp = signature(p);
    if (sp.positive != 1) fail(ErrorKind::HypothesisViolated, "P is not Lorentzian");
    if (!is_anisotropic_over_Q(p)) fail(ErrorKind::HypothesisViolated, "P is isotropic");
    IntMatrix v_rows = orthogonal_complement_basis(lambda, p_rows);
    IntegerLattice v(induced_gram(lambda, v_rows), "V");
    Signature sv = signature(v);
    if (sv.positive != 2 || sv.negative != 20 - static_cast<int>(rho))
        fail(ErrorKind::RelationFailure, "P-perp does not have signature (2, 20 - rho)");
    FiniteQuadraticModule dp(p), dv(v);
    if (dp.order() != dv.order()) fail(ErrorKind::RelationFailure, "P and P-perp have different discriminant orders");

    std::vector<std::size_t> to_v(dp.order());
    const IntMatrix pg = p_rows * lambda.gram();
    const IntMatrix vg = v_rows * lambda.gram();
    const RatMatrix gv = to_rational(v.gram());
    for (std::size_t i = 0; i < dp.order(); ++i) {
        RationalVector l = dp.lift(dp.element(i));
        RatVector tau = mat_vec(to_rational(p.gram()), l);
        IntVector target;
        for (const auto& t : tau) target.push_back(t.get_num());
        auto lam = solve_integer(pg, target);
        if (!lam) fail(ErrorKind::NotPrimitive, "P is not primitive in the K3 lattice");
        RatVector lr(lam->begin(), lam->end());
        RatVector sigma = mat_vec(to_rational(vg), lr);
        RationalVector y = solve(gv, sigma);
        Element img = dv.class_of(y);
        if (mod_one(dv.q_value(img) + dp.q_value(i)) != 0) fail(ErrorKind::RelationFailure, "gluing does not negate Q");
        to_v[i] = dv.index(img);
    }
    return K3Setup{p_rows, p, v_rows, v, dp, dv, to_v};
}

Representability represents_on_coset(const FiniteQuadraticModule& dp, const Element& gamma, const Rational& n) {
    if (n <= 0) return Representability::No;
    if (!is_integer(n - dp.q_value(gamma))) return Representability::No;
    const std::size_t r = dp.lattice().rank();
    if (r == 1) return rank_one(dp, gamma, n);
    if (r == 2) return rank_two(dp, gamma, n);
    // Q_P(t) = n is Q_{P(-1)}(t) + n = 0 on the same coset
    FiniteQuadraticModule neg(rescale(dp.lattice(), -1));
    DensityEngine e(neg, neg.class_of(dp.lift(gamma)));
    return e.is_representable(n) ? Representability::LocalOnly : Representability::No;
}

K3Report k3_predict(const K3Setup& s, const Element& gamma_p, const Rational& n, const BigFloat& mu_s, unsigned long prime_bound) {
    K3Report rep;
    const long rho = static_cast<long>(s.p.rank());
    rep.exponent = make_rational(20 - rho, 2);
    rep.gamma_v = s.to_v.at(s.dp.index(gamma_p));
    rep.prediction = predict_N(s.dv, s.dv.element(rep.gamma_v), n, mu_s, prime_bound);
    rep.parabolic = represents_on_coset(s.dp, gamma_p, n);
    return rep;
}

CensusReport elliptic_census_prediction(const K3Setup& s, const Rational& n_max, const BigFloat& mu_s, unsigned long prime_bound) {
    if (isotropic_subgroups(s.dp).size() > 1)
        fail(ErrorKind::HypothesisViolated, "P^/P has a nontrivial isotropic subgroup");
    CensusReport out;
    out.total = 0;
    for (std::size_t g = 0; g < s.dp.order(); ++g) {
        Element gp = s.dp.element(g);
        DensityEngine engine(s.dv, s.dv.element(s.to_v[g]));
        const Rational q = mod_one(s.dp.q_value(g));
        for (Rational sv = q == 0 ? Rational(1) : q; sv <= n_max; sv += 1) {
            Representability r = represents_on_coset(s.dp, gp, sv);
            if (r == Representability::No) continue;
            if (r == Representability::LocalOnly) out.heuristic = true;
            Prediction p = predict_N(engine, sv, mu_s, prime_bound);
            out.terms.push_back(CensusTerm{g, sv, p.value});
            out.total += p.value;
        }
    }
    return out;
}

} // namespace qlat
