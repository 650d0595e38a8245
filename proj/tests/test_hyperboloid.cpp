#include "doctest.h"

#include <cmath>
#include <random>

#include "qlat/hyperboloid.hpp"

using namespace qlat;

namespace {

Window window_of(const IntegerLattice& v, Rational rho) { return Window{make_frame(v), std::move(rho)}; }

// closed forms of the two cap measures, derived in frame coordinates
double cap_mu_a0(int b, double rho) {
    return 2 * std::pow(M_PI, 1 + b / 2.0) / std::tgamma(1 + b / 2.0) * (std::pow(1 + rho * rho, b / 2.0) - 1);
}
double cap_mu_infty(int b, double rho, double det) { return std::pow(2.0, b / 2.0) / std::sqrt(det) * cap_mu_a0(b, rho); }

} // namespace

TEST_CASE("frames are orthonormal for diag(1, 1, -1, ...)") {
    for (const char* expr : {"U+U+rank1(-2)", "U+rank1(2)+rank1(-4)+rank1(-2)", "U+U+E8(-1)", "rescale(U,2)+U+rank1(-6)"}) {
        IntegerLattice v = parse_lattice_expression(expr);
        SplittingFrame f = make_frame(v);
        const std::size_t r = v.rank();
        REQUIRE(f.columns.size() == r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                long double s = 0;
                for (std::size_t x = 0; x < r; ++x)
                    for (std::size_t y = 0; y < r; ++y) s += f.columns[i][x] * v.gram()(x, y).get_d() * f.columns[j][y];
                const double expect = i != j ? 0 : i < 2 ? 2 : -2;
                CHECK(std::fabs(static_cast<double>(s) - expect) < 1e-10);
            }
        const double det = std::pow(2.0, r / 2.0) / std::sqrt(v.abs_determinant().get_d());
        CHECK(std::fabs(static_cast<double>(f.abs_det) - det) < 1e-10 * det);
    }
}

TEST_CASE("point counts against the box scan") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    Window w = window_of(d.lattice(), Rational(1));
    PointCount pc = enumerate_points(d, Element{0}, Rational(1), w, true);
    CHECK(pc.method == "hyperbolic");
    CHECK(pc.count > 0);
    CHECK(pc.count == box_scan_count(d, Element{0}, Rational(1), w));
    CHECK(pc.count == enumerate_points(d, Element{0}, Rational(1), w, false, false).count);
    CHECK(pc.count % 2 == 0);
    for (const auto& x : pc.points) CHECK(d.lattice().q(x) == -1);
}

TEST_CASE("randomized agreement of the three counters") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> lattices = {"U+U+rank1(-2)", "U+U+rank1(-6)", "U+rescale(U,2)+rank1(-2)",
                                               "U+rank1(2)+rank1(-4)+rank1(-2)", "U+rank1(4)+rank1(-2)+rank1(-2)+rank1(-2)"};
    const std::vector<Rational> radii = {make_rational(1, 2), Rational(1), make_rational(3, 2)};
    int done = 0;
    for (int trial = 0; trial < 60; ++trial) {
        FiniteQuadraticModule d(parse_lattice_expression(lattices[trial % lattices.size()]));
        Element g = d.element(rng() % d.order());
        Rational n = mod_one(-d.q_value(g)) + Rational(static_cast<long>(rng() % 12));
        if (n <= 0) n += 1;
        Window w = window_of(d.lattice(), radii[rng() % radii.size()]);
        std::uint64_t box;
        try {
            box = box_scan_count(d, g, n, w, 1e7);
        } catch (const Error&) {
            continue;
        }
        PointCount fast = enumerate_points(d, g, n, w, true);
        PointCount slow = enumerate_points(d, g, n, w, false, false);
        CHECK(fast.count == box);
        CHECK(slow.count == box);
        CHECK(fast.grazing == slow.grazing);
        if (d.neg(g) == g) CHECK((fast.count - fast.grazing) % 2 == 0);
        for (const auto& x : fast.points) CHECK(d.lattice().q(x) == -n);
        ++done;
    }
    CHECK(done >= 40);
}

TEST_CASE("counts depend only on the positive plane") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-6)"));
    SplittingFrame f = make_frame(d.lattice());
    RationalVector f1 = to_rational(f.positive).row(0), f2 = to_rational(f.positive).row(1);
    RationalVector g1(f1.size()), g2(f1.size());
    const Rational q1 = Rational(f.positive_q[0]), q2 = Rational(f.positive_q[1]);
    for (std::size_t i = 0; i < f1.size(); ++i) {
        g1[i] = f1[i] + f2[i];
        g2[i] = q2 * f1[i] - q1 * f2[i];
    }
    Window a{f, Rational(1)};
    Window b{make_frame(d.lattice(), g1, g2), Rational(1)};
    for (long n = 1; n <= 20; ++n) {
        Element g{static_cast<std::int64_t>(n % 6)};
        Rational nn = mod_one(-d.q_value(g)) + Rational(n);
        CHECK(enumerate_points(d, g, nn, a).count == enumerate_points(d, g, nn, b).count);
    }
}

TEST_CASE("errors") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    Window w = window_of(d.lattice(), Rational(1));
    CHECK_THROWS_AS(enumerate_points(d, Element{0}, make_rational(1, 2), w), Error);
    CHECK_THROWS_AS(enumerate_points(d, Element{0}, Rational(0), w), Error);
    CHECK_THROWS_AS(enumerate_points(d, Element{0}, Rational(500), w, false, false, 1e3), Error);
    FiniteQuadraticModule def(parse_lattice_expression("E8(-1)"));
    CHECK_THROWS_AS(make_frame(def.lattice()), Error);
}

TEST_CASE("measures") {
    CHECK(std::fabs(static_cast<double>(unit_sphere_area(3)) - 4 * M_PI) < 1e-12);
    CHECK(std::fabs(static_cast<double>(unit_sphere_area(2)) - 2 * M_PI) < 1e-12);
    for (const char* expr : {"U+U+rank1(-2)", "U+rank1(2)+rank1(-4)+rank1(-2)", "U+U+rank1(-2)+rank1(-2)"}) {
        IntegerLattice v = parse_lattice_expression(expr);
        const int b = static_cast<int>(v.rank()) - 2;
        for (Rational rho : {make_rational(1, 2), Rational(1)}) {
            Window w = window_of(v, rho);
            MeasureEstimate a = mu_a0(w, 200000, 7);
            MeasureEstimate m = mu_infty(v, w, 200000, 1e-3, 8);
            CHECK(std::fabs(a.value - cap_mu_a0(b, rho.get_d())) < 5 * a.std_error + 1e-12);
            CHECK(std::fabs(m.value - cap_mu_infty(b, rho.get_d(), v.abs_determinant().get_d())) < 5 * m.std_error);
        }
    }
    IntegerLattice v = parse_lattice_expression("U+U+rank1(-2)");
    Window w = window_of(v, Rational(1));
    MeasureEstimate small = mu_infty(v, w, 100000, 1e-3, 1), big = mu_infty(v, w, 200000, 1e-3, 1);
    CHECK(small.std_error / big.std_error == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
    CHECK(mu_a0(w, 1000, 5).value == mu_a0(w, 1000, 5).value);
    CHECK(mu_infty(v, w, 1000, 1e-3, 5, 3).value == doctest::Approx(mu_infty(v, w, 1000, 1e-3, 5, 1).value).epsilon(1e-12));
    Window empty = window_of(v, Rational(0));
    CHECK(mu_a0(empty, 10, 1).value == 0);
    CHECK(mu_infty(v, empty, 10, 1e-3, 1).value == 0);
}

TEST_CASE("equidistribution on a short range") {
    FiniteQuadraticModule d(parse_lattice_expression("U+U+rank1(-2)"));
    Window w = window_of(d.lattice(), Rational(1));
    auto ns = admissible_exponents(d, Element{1}, Rational(0), Rational(3));
    REQUIRE(ns.size() == 3);
    CHECK(ns[0] == make_rational(1, 4));
    CHECK(admissible_exponents(d, Element{0}, Rational(5), Rational(4)).empty());
    EquidistributionOptions opt;
    opt.samples = 20000;
    EquidistributionReport rep = equidistribution_run(d, Element{0}, w, Rational(40), Rational(60), opt);
    CHECK(rep.rows.size() == 21);
    for (const auto& row : rep.rows) {
        CHECK(row.predicted > 0);
        CHECK(row.ratio > 0.5);
        CHECK(row.ratio < 1.5);
    }
}
