#include "doctest.h"

#include "qlat/predict.hpp"

using namespace qlat;

namespace {

bool close(const BigFloat& a, const BigFloat& b, const char* tol = "1e-40") {
    return boost::multiprecision::abs(a - b) <= BigFloat(tol) * (1 + boost::multiprecision::abs(b));
}

IntMatrix rows_of(std::initializer_list<std::vector<long>> rows) {
    IntMatrix m(rows.size(), 22);
    std::size_t i = 0;
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) m(i, j) = r[j];
        ++i;
    }
    return m;
}

// brute force Q(t) = n on gamma + P over a box of coefficients
bool brute_represents(const FiniteQuadraticModule& dp, const Element& g, const Rational& n, long box) {
    RationalVector l = dp.lift(g);
    const std::size_t r = l.size();
    std::vector<long> z(r, -box);
    while (true) {
        RationalVector t(r);
        for (std::size_t i = 0; i < r; ++i) t[i] = l[i] + Rational(z[i]);
        if (dp.lattice().q(t) == n) return true;
        std::size_t k = r;
        while (k-- > 0) {
            if (z[k] < box) {
                ++z[k];
                break;
            }
            z[k] = -box;
        }
        if (k == static_cast<std::size_t>(-1)) return false;
    }
}

} // namespace

TEST_CASE("main term against the Eisenstein coefficient") {
    for (const char* expr : {"U+U+rank1(-2)", "U+U+rank1(-6)", "U+rescale(U,2)+rank1(-2)"}) {
        FiniteQuadraticModule d(parse_lattice_expression(expr));
        for (std::size_t gi = 0; gi < d.order(); ++gi) {
            Element g = d.element(gi);
            for (long k = 1; k <= 6; ++k) {
                Rational n = mod_one(-d.q_value(g)) + Rational(k);
                Prediction p = predict_N(d, g, n, BigFloat(3), 30);
                EisensteinCoefficient c = eisenstein_coefficient(d, g, n, 30);
                CHECK(close(p.value, -3 * c.value / 2));
                CHECK(p.error_order == "O_eps(n^(5/4+eps))");
            }
        }
    }
}

TEST_CASE("main term formula and zeros") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    Prediction p = predict_N(d, Element{0}, Rational(1), BigFloat(1), 100);
    REQUIRE(p.series);
    const BigFloat pi = pi_big();
    BigFloat expect = boost::multiprecision::pow(2 * pi, BigFloat(5) / 2) /
                      (boost::multiprecision::sqrt(BigFloat(2)) * 3 * boost::multiprecision::sqrt(pi) / 4);
    expect *= BigFloat(p.series->truncated_product.get_num().get_str()) / BigFloat(p.series->truncated_product.get_den().get_str());
    CHECK(close(p.value, expect));
    CHECK(p.representable);

    Prediction off = predict_N(d, Element{0}, make_rational(1, 4), BigFloat(1), 100);
    CHECK(off.value == 0);
    CHECK_FALSE(off.note.empty());
    CHECK_THROWS_AS(predict_N(d, Element{0}, Rational(0), BigFloat(1), 100), Error);
    CHECK_THROWS_AS(predict_N(FiniteQuadraticModule(parse_lattice_expression("U+U")), {}, Rational(1), BigFloat(1), 10), Error);
}

TEST_CASE("degree prediction") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    IntMatrix plane{{1, 0, 0, 0, 0}, {0, 0, 1, 0, 0}};
    CuspDatum f = cusp_datum(d, plane);
    BoundarySeries bs(d, f, Rational(10));
    for (long n = 1; n <= 5; ++n) {
        Prediction p = predict_N(d, Element{0}, Rational(n), BigFloat(2), 40);
        DegreePrediction zero = degree_prediction(d, Element{0}, Rational(n), BigFloat(2), {{&bs, Integer(0)}}, 40);
        CHECK(close(zero.total, p.value));
        DegreePrediction one = degree_prediction(d, Element{0}, Rational(n), BigFloat(2), {{&bs, Integer(1)}}, 40);
        REQUIRE(one.u.size() == 1);
        EisensteinCoefficient c = eisenstein_coefficient(d, Element{0}, Rational(n), 40);
        BigFloat u = c.value / 2 * BigFloat(1) / 24 -
                     BigFloat(bs.a_coeff(0, Rational(n)).get_num().get_str()) / BigFloat(bs.a_coeff(0, Rational(n)).get_den().get_str());
        CHECK(close(one.total, p.value + u));
        CHECK_FALSE(one.u[0].exact);
    }
    CHECK_THROWS_AS(degree_prediction(d, Element{0}, Rational(11), BigFloat(1), {{&bs, Integer(1)}}, 10), Error);
}

TEST_CASE("K3 setup for rank1(2d)") {
    for (long dd : {1L, 2L, 3L}) {
        K3Setup s = k3_setup(k3_rank_one_embedding(dd));
        CHECK(s.v.rank() == 21);
        CHECK(s.v.abs_determinant() == s.p.abs_determinant());
        CHECK(s.dv.order() == static_cast<std::size_t>(2 * dd));
        for (std::size_t i = 0; i < s.dp.order(); ++i) CHECK(mod_one(s.dv.q_value(s.to_v[i]) + s.dp.q_value(i)) == 0);
        std::vector<std::size_t> sorted = s.to_v;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
    }
    K3Setup s = k3_setup(k3_rank_one_embedding(1));
    K3Report rep = k3_predict(s, Element{0}, Rational(4), BigFloat(1), 20);
    CHECK(rep.exponent == make_rational(19, 2));
    CHECK(rep.parabolic == Representability::Yes);
    CHECK(rep.prediction.value > 0);
    Prediction direct = predict_N(s.dv, s.dv.element(rep.gamma_v), Rational(4), BigFloat(1), 20);
    CHECK(close(rep.prediction.value, direct.value));
    CHECK(k3_predict(s, Element{0}, Rational(3), BigFloat(1), 20).parabolic == Representability::No);

    CHECK_THROWS_AS(k3_setup(rows_of({{1, 0}, {0, 1}})), Error);
    CHECK_THROWS_AS(k3_setup(rows_of({{1, -1}})), Error);
    CHECK_THROWS_AS(k3_setup(rows_of({{2, 2}})), Error);
    CHECK_THROWS_AS(k3_setup(rows_of({{1, 1}, {0, 0, 1, 1}, {0, 0, 0, 0, 1, 1}, {1}, {0, 1}})), Error);
}

TEST_CASE("coset representability") {
    // rank 1: Q(k g) = d k^2
    K3Setup s1 = k3_setup(k3_rank_one_embedding(3));
    for (std::size_t g = 0; g < s1.dp.order(); ++g)
        for (long k = 0; k <= 12; ++k) {
            Rational n = mod_one(s1.dp.q_value(g)) + Rational(k);
            if (n <= 0) continue;
            const bool expect = brute_represents(s1.dp, s1.dp.element(g), n, 40);
            CHECK((represents_on_coset(s1.dp, s1.dp.element(g), n) == Representability::Yes) == expect);
        }
    // rank 2: x^2 + x y - y^2
    K3Setup s2 = k3_setup(rows_of({{1, 1}, {1, 0, 1, -1}}));
    CHECK(s2.dp.order() == 5);
    int yes = 0;
    for (std::size_t g = 0; g < s2.dp.order(); ++g)
        for (long k = 0; k <= 10; ++k) {
            Rational n = mod_one(s2.dp.q_value(g)) + Rational(k);
            if (n <= 0) continue;
            const bool expect = brute_represents(s2.dp, s2.dp.element(g), n, 30);
            Representability r = represents_on_coset(s2.dp, s2.dp.element(g), n);
            CHECK((r == Representability::Yes) == expect);
            yes += expect;
        }
    CHECK(yes > 5);
    // rank 3 is only tested locally
    K3Setup s3 = k3_setup(rows_of({{1, 1}, {0, 0, 1, -3}, {0, 0, 0, 0, 1, -3}}));
    bool local = false;
    for (long k = 1; k <= 6; ++k)
        if (represents_on_coset(s3.dp, s3.dp.zero(), Rational(k)) == Representability::LocalOnly) local = true;
    CHECK(local);
}

TEST_CASE("elliptic census") {
    K3Setup s = k3_setup(k3_rank_one_embedding(1));
    CensusReport c = elliptic_census_prediction(s, Rational(4), BigFloat(1), 20);
    std::vector<Rational> zero_s;
    for (const auto& t : c.terms)
        if (t.gamma == 0) zero_s.push_back(t.s);
    CHECK(zero_s == std::vector<Rational>{Rational(1), Rational(4)});
    CHECK_FALSE(c.heuristic);
    CHECK(elliptic_census_prediction(s, make_rational(1, 8), BigFloat(1), 20).total == 0);
    BigFloat prev = 0;
    for (long m = 1; m <= 5; ++m) {
        BigFloat t = elliptic_census_prediction(s, Rational(m), BigFloat(1), 20).total;
        CHECK(t >= prev);
        prev = t;
    }
    CHECK_THROWS_AS(elliptic_census_prediction(k3_setup(k3_rank_one_embedding(4)), Rational(4), BigFloat(1), 20), Error);
}
