#include "doctest.h"

#include "qlat/boundary.hpp"

using namespace qlat;

namespace {

IntMatrix plane_of(std::size_t r, std::size_t i, std::size_t j) {
    IntMatrix p(2, r);
    p(0, i) = 1;
    p(1, j) = 1;
    return p;
}

void check_datum(const FiniteQuadraticModule& dv, const CuspDatum& f) {
    const IntegerLattice& v = dv.lattice();
    RatMatrix pr = to_rational(f.plane);
    CHECK(v.pair(pr.row(0), pr.row(0)) == 0);
    CHECK(v.pair(pr.row(1), pr.row(1)) == 0);
    CHECK(v.pair(pr.row(0), pr.row(1)) == 0);
    CHECK(f.brieskorn_holds);
    CHECK(v.abs_determinant() == f.kf.abs_determinant() * f.imprimitivity * f.imprimitivity);
    CHECK(f.kf.rank() + 4 == v.rank());
    CHECK(signature(f.kf).positive == 0);
    CHECK(f.strongly_primitive == (f.imprimitivity == 1));
    CHECK(f.sharp_group.size() == f.imprimitivity);
    // H_I maps to zero and the projection keeps Q mod 1
    for (auto i : f.sharp_group.members) CHECK(f.projection[i] == 0);
    for (std::size_t i = 0; i < dv.order(); ++i) {
        CHECK((f.projection[i] >= 0) == f.sharp_perp.contains(i));
        if (f.projection[i] < 0) continue;
        CHECK(dv.q_value(i) == f.kf_module.q_value(static_cast<std::size_t>(f.projection[i])));
    }
    // every class of D(K_F) is hit by exactly N_F elements
    std::vector<Integer> fibres(f.kf_module.order(), Integer(0));
    for (auto p : f.projection)
        if (p >= 0) fibres[static_cast<std::size_t>(p)] += 1;
    for (const auto& c : fibres) CHECK(c == f.imprimitivity);
}

} // namespace

TEST_CASE("canonical cusp of U+U+rank1(-2)") {
    FiniteQuadraticModule dv(parse_lattice_expression("U+U+rank1(-2)"));
    CuspDatum f = cusp_datum(dv, plane_of(5, 0, 2));
    CHECK(f.imprimitivity == 1);
    CHECK(f.strongly_primitive);
    CHECK(f.kf.gram() == IntMatrix{{-2}});
    CHECK(dv.lattice().abs_determinant() == f.kf.abs_determinant() * f.imprimitivity * f.imprimitivity);
    CHECK(project_to_kf(f, dv, Element{1}) == Element{1});
    CHECK(project_to_kf(f, dv, Element{0}) == Element{0});
    CHECK(f.kf_module.q_value(Element{1}) == Rational(3, 4));
    check_datum(dv, f);

    IntMatrix other{{1, 0, 1, 0, 0}, {0, 0, 1, 0, 0}};
    CHECK(cusp_datum(dv, other).plane == f.plane);
}

TEST_CASE("imprimitive cusps") {
    for (const char* expr : {"U+rescale(U,2)+rank1(-2)", "rescale(U,2)+rescale(U,2)+rank1(-2)", "U+rescale(U,3)+rank1(-4)"}) {
        FiniteQuadraticModule dv(parse_lattice_expression(expr));
        CuspDatum f = cusp_datum(dv, plane_of(5, 0, 2));
        check_datum(dv, f);
        CHECK_FALSE(f.strongly_primitive);
    }
    FiniteQuadraticModule dv(parse_lattice_expression("rescale(U,2)+rescale(U,2)+rank1(-2)"));
    CHECK(cusp_datum(dv, plane_of(5, 0, 2)).imprimitivity == 4);
}

TEST_CASE("bad planes are rejected") {
    FiniteQuadraticModule dv(parse_lattice_expression("U+U+rank1(-2)"));
    CHECK_THROWS_AS(cusp_datum(dv, plane_of(5, 0, 1)), Error);
    CHECK_THROWS_AS(cusp_datum(dv, IntMatrix{{2, 0, 0, 0, 0}, {0, 0, 1, 0, 0}}), Error);
    CHECK_THROWS_AS(cusp_datum(dv, IntMatrix{{1, 0, 0, 0, 0}, {1, 0, 0, 0, 0}}), Error);
    try {
        cusp_datum(dv, IntMatrix{{2, 0, 0, 0, 0}, {0, 0, 1, 0, 0}});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPrimitive);
    }
}

TEST_CASE("plane search") {
    FiniteQuadraticModule dv(parse_lattice_expression("U+U+rank1(-2)"));
    auto planes = find_isotropic_planes(dv, 1);
    REQUIRE_FALSE(planes.empty());
    bool canonical = false;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        check_datum(dv, planes[i]);
        CHECK(planes[i].strongly_primitive);  // square-free determinant
        if (planes[i].plane == plane_of(5, 0, 2)) canonical = true;
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(planes[i].plane == planes[j].plane);
    }
    CHECK(canonical);
    CHECK(find_isotropic_planes(dv, 0).empty());
    CHECK_THROWS_AS(find_isotropic_planes(dv, 30), Error);

    FiniteQuadraticModule d6(parse_lattice_expression("U+U+rank1(-6)"));
    for (const auto& f : find_isotropic_planes(d6, 1)) CHECK(f.strongly_primitive);
    FiniteQuadraticModule di(parse_lattice_expression("U+rescale(U,2)+rank1(-2)"));
    auto mixed = find_isotropic_planes(di, 1);
    for (const auto& f : mixed) check_datum(di, f);
}

TEST_CASE("boundary coefficients") {
    FiniteQuadraticModule dv(parse_lattice_expression("U+U+rank1(-2)"));
    CuspDatum f = cusp_datum(dv, plane_of(5, 0, 2));
    BoundarySeries bs(dv, f, Rational(6));
    CHECK(bs.a_coeff(0, Rational(0)) == Rational(1, 24));
    CHECK(bs.a_coeff(0, Rational(1, 4)) == 0);
    CHECK(bs.a_coeff(1, Rational(1)) == 0);

    // oracle: theta components of rank1(-2) are sums over k of q^{k^2} and q^{(k+1/2)^2}
    auto sigma = [](long n) {
        long s = 0;
        for (long d = 1; d <= n; ++d)
            if (n % d == 0) s += d;
        return s;
    };
    auto e2 = [&](long m) { return m == 0 ? 1L : -24 * sigma(m); };
    for (long n4 = 0; n4 <= 24; ++n4) {
        Rational n = make_rational(n4, 4);
        for (std::size_t g = 0; g < 2; ++g) {
            Rational expect = 0;
            for (long k = -10; k <= 10; ++k) {
                long sq4 = g == 0 ? 4 * k * k : (2 * k + 1) * (2 * k + 1);
                long rest = n4 - sq4;
                if (rest >= 0 && rest % 4 == 0) expect += e2(rest / 4);
            }
            CHECK(bs.a_coeff(g, n) == expect / 24);
        }
    }
    CHECK_THROWS_AS(bs.a_coeff(0, Rational(7)), Error);

    EisensteinCoefficient c00 = eisenstein_coefficient(dv, Element{0}, Rational(0), 100);
    BoundaryCoefficient u = bs.u_coeff(0, Rational(0), c00);
    REQUIRE(u.exact);
    CHECK(*u.exact_value == 0);
    CHECK_FALSE(u.order_note.empty());

    EisensteinCoefficient c = eisenstein_coefficient(dv, Element{0}, Rational(1), 50);
    BoundaryCoefficient u1 = bs.u_coeff(0, Rational(1), c);
    CHECK_FALSE(u1.exact);
    CHECK(u1.prime_bound == 50);
    BigFloat expect = c.value / 48 - BigFloat(-11) / 12;
    CHECK(boost::multiprecision::abs(u1.value - expect) < BigFloat("1e-40"));

    FiniteQuadraticModule di(parse_lattice_expression("U+rescale(U,2)+rank1(-2)"));
    CuspDatum fi = cusp_datum(di, plane_of(5, 0, 2));
    BoundarySeries bi(di, fi, Rational(2));
    CHECK(bi.a_coeff(0, Rational(0)) == make_rational(2, 24));
    CHECK(bi.u_coeff(0, Rational(0), eisenstein_coefficient(di, di.zero(), Rational(0), 10)).exact_value == Rational(0));
}
