#include "doctest.h"

#include "qlat/fqm.hpp"
#include "qlat/lattice.hpp"

using namespace qlat;

TEST_CASE("named constructors") {
    CHECK(make_named("U").gram() == IntMatrix{{0, 1}, {1, 0}});
    CHECK(make_named("rank1", {-2}).gram() == IntMatrix{{-2}});
    IntegerLattice k3 = make_named("K3");
    CHECK(k3.rank() == 22);
    CHECK(signature(k3) == Signature{3, 19});
    CHECK(abs(k3.determinant()) == 1);
    CHECK(e8(false).determinant() == 1);
    CHECK_THROWS_AS(make_named("rank1", {3}), Error);
    CHECK_THROWS_AS(make_named("A2"), Error);
    CHECK_THROWS_AS(rescale(make_named("U"), 0), Error);
}

TEST_CASE("gram validation") {
    CHECK_THROWS_AS(IntegerLattice(IntMatrix{{2, 1}, {0, 2}}), Error);
    CHECK_THROWS_AS(IntegerLattice(IntMatrix{{1, 0}, {0, 2}}), Error);
    CHECK_THROWS_AS(IntegerLattice(IntMatrix{{2, 2}, {2, 2}}), Error);
    CHECK_THROWS_AS(IntegerLattice(IntMatrix{{2, 1}, {1, 2}}, "", HyperbolicSplit{0, 1}), Error);
}

TEST_CASE("signatures") {
    CHECK(signature(make_named("U")) == Signature{1, 1});
    CHECK(signature(e8(true)) == Signature{0, 8});
    IntegerLattice a = parse_lattice_expression("U+U+rank1(-2)");
    IntegerLattice b = parse_lattice_expression("E8(-1)+rank1(4)");
    IntegerLattice s = direct_sum({a, b});
    Signature sa = signature(a), sb = signature(b), ss = signature(s);
    CHECK(ss.positive == sa.positive + sb.positive);
    CHECK(ss.negative == sa.negative + sb.negative);
}

TEST_CASE("expression parser") {
    IntegerLattice v = parse_lattice_expression("U + U + rank1(-8)");
    CHECK(v.rank() == 5);
    CHECK(v.gram()(4, 4) == -8);
    REQUIRE(v.hyperbolic_split());
    CHECK(v.hyperbolic_split()->first == 0);
    CHECK(parse_lattice_expression("E8(-1)").gram()(0, 0) == -2);
    CHECK(parse_lattice_expression("U(2)").gram()(0, 1) == 2);
    CHECK_THROWS_AS(parse_lattice_expression("U+"), Error);
}

TEST_CASE("orthogonal complement") {
    IntegerLattice uu = parse_lattice_expression("U+U");
    IntMatrix first{{1, 0, 0, 0}, {0, 1, 0, 0}};
    IntegerLattice perp = orthogonal_complement(uu, first);
    CHECK(perp.gram() == IntMatrix{{0, 1}, {1, 0}});

    IntegerLattice k3 = k3_lattice();
    IntMatrix h(1, 22);
    h(0, 0) = 1;
    h(0, 1) = 1;
    IntegerLattice v = orthogonal_complement(k3, h);
    CHECK(signature(v) == Signature{2, 19});
    FiniteQuadraticModule d(v);
    CHECK(d.invariant_factors() == std::vector<std::int64_t>{2});

    CHECK(orthogonal_complement(uu, IntMatrix::identity(4)).rank() == 0);
    IntMatrix twice{{2, 0, 0, 0}};
    CHECK_THROWS_AS(orthogonal_complement(uu, twice), Error);
    IntMatrix dep{{1, 0, 0, 0}, {2, 0, 0, 0}};
    CHECK_THROWS_AS(orthogonal_complement(uu, dep), Error);
}

TEST_CASE("complement of a primitive sublattice of a unimodular lattice") {
    IntegerLattice k3 = k3_lattice();
    // P spanned by e1 + 3 f1 and e2 + f2 - e3, a rank-2 primitive sublattice
    IntMatrix p(2, 22);
    p(0, 0) = 1;
    p(0, 1) = 3;
    p(1, 2) = 1;
    p(1, 3) = 1;
    p(1, 4) = -1;
    IntegerLattice pl(induced_gram(k3, p));
    IntegerLattice v = orthogonal_complement(k3, p);
    CHECK(v.rank() == 20);
    CHECK(abs(v.determinant()) == abs(pl.determinant()));
}

TEST_CASE("anisotropy") {
    CHECK(is_anisotropic_over_Q(make_named("rank1", {2})));
    CHECK_FALSE(is_anisotropic_over_Q(make_named("U")));
    CHECK(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(-4)")));
    CHECK_FALSE(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(-8)")));
    // x^2 + y^2 - 3 z^2 is anisotropic (3 is not a sum of two rational squares)
    CHECK(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(2)+rank1(-6)")));
    CHECK_FALSE(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(2)+rank1(-10)")));
    // x^2+y^2+z^2-7w^2: 7 is not a sum of three squares and the discriminant -7 is a 2-adic square... anisotropic
    CHECK(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(2)+rank1(2)+rank1(-14)")));
    CHECK_FALSE(is_anisotropic_over_Q(parse_lattice_expression("rank1(2)+rank1(2)+rank1(2)+rank1(-6)")));
    CHECK_THROWS_AS(is_anisotropic_over_Q(parse_lattice_expression("U+U+rank1(2)")), Error);
}

TEST_CASE("hilbert symbols") {
    CHECK(hilbert_symbol(Integer(-1), Integer(-1), 0) == -1);
    CHECK(hilbert_symbol(Integer(-1), Integer(-1), 2) == -1);
    CHECK(hilbert_symbol(Integer(-1), Integer(-1), 3) == 1);
    CHECK(hilbert_symbol(Integer(2), Integer(3), 3) == -1);
    CHECK(hilbert_symbol(Integer(5), Integer(5), 5) == 1);
    CHECK(hilbert_symbol(Integer(3), Integer(3), 3) == -1);
    // product formula on a few pairs
    for (long a : {-6, -3, -1, 2, 5, 7, 10})
        for (long b : {-5, -2, 3, 6, 11}) {
            int prod = hilbert_symbol(Integer(a), Integer(b), 0) * hilbert_symbol(Integer(a), Integer(b), 2);
            for (auto p : primes_up_to(13))
                if (p > 2) prod *= hilbert_symbol(Integer(a), Integer(b), p);
            CHECK(prod == 1);
        }
}

TEST_CASE("json round trip") {
    IntegerLattice v = parse_lattice_expression("U+U+rank1(-2)");
    IntegerLattice w = lattice_from_json(lattice_to_json(v));
    CHECK(w.gram() == v.gram());
    CHECK(w.hyperbolic_split() == v.hyperbolic_split());
    CHECK_THROWS_AS(lattice_from_json(R"({"gram": [[2, 1], [0, 2]]})"), Error);
    CHECK_THROWS_AS(lattice_from_json(R"({"gram": [[1]]})"), Error);
    CHECK_THROWS_AS(lattice_from_json(R"({"gram": [[0, 1], [1, 0]], "hyperbolic_split": {"rows": [0, 0]}})"), Error);
}
