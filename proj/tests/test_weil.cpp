#include "doctest.h"

#include <cmath>

#include "qlat/weil.hpp"

using namespace qlat;

TEST_CASE("T and S for small modules") {
    WeilAction wt(FiniteQuadraticModule(parse_lattice_expression("U+U")));
    CHECK(std::abs(wt.T()(0, 0) - Complex(1)) < 1e-15);
    CHECK(std::abs(wt.S()(0, 0) - Complex(1)) < 1e-15);

    WeilAction w2(FiniteQuadraticModule(parse_lattice_expression("U+U+rank1(-2)")));
    CHECK(std::abs(w2.T()(1, 1) - Complex(0, -1)) < 1e-15);
    const Complex c = std::exp(Complex(0, M_PI / 4)) / std::sqrt(2.0);
    CHECK(std::abs(w2.S()(0, 0) - c) < 1e-12);
    CHECK(std::abs(w2.S()(0, 1) - c) < 1e-12);
    CHECK(std::abs(w2.S()(1, 1) + c) < 1e-12);

    FiniteQuadraticModule d8(parse_lattice_expression("U+U+rank1(-8)"));
    WeilAction w8(d8);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(w8.T()(k, k) - std::exp(Complex(0, -2 * M_PI * k * k / 16.0))) < 1e-12);
}

TEST_CASE("relations on a family of modules") {
    for (const char* expr : {"U+U", "rank1(-2)", "U+U+rank1(-8)", "rank1(2)+rank1(2)", "U(2)+rank1(-2)", "rank1(-4)+rank1(6)",
                             "rank1(-16)", "rank1(2)+rank1(-6)", "E8(-1)+rank1(10)", "U(3)"}) {
        FiniteQuadraticModule d(parse_lattice_expression(expr));
        WeilAction w(d);
        RelationReport r = verify_relations(w);
        CHECK(r.unitarity < 1e-9);
        CHECK(r.braid < 1e-9);
        CHECK(r.t_order < 1e-9);
        RelationReport rd = verify_relations(w.dual());
        CHECK(rd.braid < 1e-9);
    }
}

TEST_CASE("a wrong eighth root breaks the braid relation") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    WeilAction w(d, Signature{3, 2});
    CHECK_THROWS_AS(verify_relations(w), Error);
}

TEST_CASE("pullback and pushforward for Z/8 -> Z/2") {
    FiniteQuadraticModule d8(parse_lattice_expression("U+U+rank1(-8)"));
    Gluing g = glue(d8, make_subgroup(d8, {Element{4}}));
    ComplexMatrix up = pullback_map(g);
    ComplexMatrix down = pushforward_map(g);
    CHECK(up.rows == 8);
    CHECK(up.cols == 2);
    CHECK(up(2, 1) == Complex(1));
    CHECK(up(6, 1) == Complex(1));
    CHECK(up(0, 0) == Complex(1));
    CHECK(up(4, 0) == Complex(1));
    CHECK(down(0, 1) == Complex(0));
    CHECK(down(1, 2) == Complex(1));
    ComplexMatrix both = down * up;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(both(i, j) - (i == j ? 2.0 : 0.0)) < 1e-15);

    WeilAction wv(d8), wk(g.quotient);
    CHECK(intertwining_defect(wv, wk, up) < 1e-9);

    Gluing triv = glue(d8, make_subgroup(d8, {}));
    CHECK(max_abs(pullback_map(triv) - ComplexMatrix::identity(8)) == 0);
}

TEST_CASE("intertwining for every isotropic subgroup") {
    for (const char* expr : {"U(2)+rank1(-2)", "U+rank1(-8)+rank1(4)", "rank1(-4)+rank1(-4)"}) {
        FiniteQuadraticModule d(parse_lattice_expression(expr));
        WeilAction wv(d);
        for (const auto& h : isotropic_subgroups(d)) {
            Gluing g = glue(d, h);
            CHECK(intertwining_defect(wv, WeilAction(g.quotient), pullback_map(g)) < 1e-9);
        }
    }
}

TEST_CASE("dump format") {
    WeilAction w(FiniteQuadraticModule(parse_lattice_expression("U+U")));
    CHECK(dump(w.T()) == "1,0\n");
}
