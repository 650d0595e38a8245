#include "qlat/hyperboloid.hpp"

#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/constants/constants.hpp>

#include "qlat/enumerate.hpp"

namespace qlat {

namespace {

using i128 = __int128;

std::int64_t to64(const Integer& x) {
    if (!x.fits_slong_p()) fail(ErrorKind::GuardExceeded, "integer does not fit in 64 bits");
    return x.get_si();
}

// primitive integral multiple of a rational vector
IntVector primitive_integral(const RationalVector& v) {
    Integer den = 1;
    for (const auto& c : v) den = lcm(den, Integer(c.get_den()));
    IntVector out;
    Integer g = 0;
    for (const auto& c : v) {
        Rational t = c * Rational(den);
        out.push_back(t.get_num());
        g = gcd(g, t.get_num());
    }
    if (g == 0) fail(ErrorKind::InvalidInput, "zero vector");
    for (auto& c : out) c /= g;
    return out;
}

long double det_ld(std::vector<std::vector<long double>> m) {
    const std::size_t n = m.size();
    long double det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (m[piv][c] == 0) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            long double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

SplittingFrame build_frame(const IntegerLattice& v, const IntMatrix& pos, const RatMatrix& neg) {
    const std::size_t r = v.rank();
    SplittingFrame f{pos, neg, {}, {}, {}, 0};
    for (std::size_t i = 0; i < 2; ++i) {
        Rational q = v.q(to_rational(pos).row(i));
        f.positive_q.push_back(q.get_num());
        std::vector<long double> col(r);
        const long double s = std::sqrt(static_cast<long double>(q.get_d()));
        for (std::size_t k = 0; k < r; ++k) col[k] = static_cast<long double>(pos(i, k).get_d()) / s;
        f.columns.push_back(col);
    }
    for (std::size_t i = 0; i < neg.rows(); ++i) {
        Rational q = v.q(neg.row(i));
        if (q >= 0) fail(ErrorKind::InvalidInput, "frame vector is not negative");
        f.negative_q.push_back(q);
        std::vector<long double> col(r);
        const long double s = std::sqrt(static_cast<long double>(Rational(-q).get_d()));
        for (std::size_t k = 0; k < r; ++k) col[k] = static_cast<long double>(neg(i, k).get_d()) / s;
        f.columns.push_back(col);
    }
    f.abs_det = std::fabs(det_ld(f.columns));
    return f;
}

// Exact test a_1^2 + a_2^2 <= rho^2 n on scaled integral coordinates X = delta x.
struct RadialTest {
    std::vector<std::vector<std::int64_t>> g;  // pairing rows G f_i in the working coordinates
    i128 w1 = 0, w2 = 0;                       // weights q_2, q_1
    i128 lhs_scale = 0, rhs = 0;

    RadialTest(const IntMatrix& gram_times_f, const std::vector<Integer>& q, std::int64_t delta, const Rational& rho, const Rational& n) {
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<std::int64_t> row;
            for (std::size_t k = 0; k < gram_times_f.cols(); ++k) row.push_back(to64(gram_times_f(i, k)));
            g.push_back(row);
        }
        w1 = to64(q[1]);
        w2 = to64(q[0]);
        Rational bound = rho * rho * n;
        lhs_scale = to64(bound.get_den());
        rhs = static_cast<i128>(4) * delta * delta * w1 * w2 * to64(bound.get_num());
    }
    // -1 outside, 0 inside, 1 on the boundary
    int classify(const std::vector<std::int64_t>& x) const {
        i128 l1 = 0, l2 = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            l1 += static_cast<i128>(g[0][k]) * x[k];
            l2 += static_cast<i128>(g[1][k]) * x[k];
        }
        i128 lhs = lhs_scale * (l1 * l1 * w1 + l2 * l2 * w2);
        return lhs < rhs ? 0 : lhs == rhs ? 1 : -1;
    }
};

// Majorant 2R - Q of the frame, as a rational matrix in lattice coordinates.
RatMatrix majorant(const IntegerLattice& v, const SplittingFrame& f) {
    const std::size_t r = v.rank();
    RatMatrix g = to_rational(v.gram());
    RatMatrix a(r, r);
    for (std::size_t i = 0; i < 2; ++i) {
        RatVector gf = mat_vec(g, to_rational(f.positive).row(i));
        Rational w = Rational(1) / (Rational(f.positive_q[i]) * 2);
        for (std::size_t x = 0; x < r; ++x)
            for (std::size_t y = 0; y < r; ++y) a(x, y) += w * gf[x] * gf[y];
    }
    for (std::size_t x = 0; x < r; ++x)
        for (std::size_t y = 0; y < r; ++y) a(x, y) -= g(x, y) / 2;
    return a;
}

Rational majorant_bound(const Rational& n, const Rational& rho) { return n * (1 + 2 * rho * rho); }

std::int64_t common_den(const RationalVector& v) {
    Integer den = 1;
    for (const auto& c : v) den = lcm(den, Integer(c.get_den()));
    return to64(den);
}

void check_input(const FiniteQuadraticModule& d, const Rational& n, const Window& w) {
    if (n <= 0) fail(ErrorKind::InvalidInput, "n must be positive");
    if (w.rho < 0) fail(ErrorKind::InvalidInput, "negative window radius");
    if (signature(d.lattice()).positive != 2) fail(ErrorKind::HypothesisViolated, "hyperboloid counts need signature (2, b)");
}

PointCount generic_count(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w, bool collect,
                         double max_nodes) {
    const IntegerLattice& v = d.lattice();
    const std::size_t r = v.rank();
    RationalVector lift = d.lift(gamma);
    const std::int64_t delta = common_den(lift);
    RatMatrix a = majorant(v, w.frame);
    Rational bound = majorant_bound(n, w.rho);
    {
        // volume of the ellipsoid x^T A x <= B
        double vol = std::pow(M_PI, r / 2.0) / std::tgamma(1 + r / 2.0) * std::pow(bound.get_d(), r / 2.0);
        RatMatrix aa = a;
        Rational det = 1;
        for (std::size_t c = 0; c < r; ++c) {
            std::size_t p = c;
            while (p < r && aa(p, c) == 0) ++p;
            if (p == r) fail(ErrorKind::Degenerate, "degenerate majorant");
            aa.swap_rows(p, c);
            if (p != c) det = -det;
            det *= aa(c, c);
            for (std::size_t k = c + 1; k < r; ++k) aa.add_row(k, c, -aa(k, c) / aa(c, c));
        }
        if (vol / std::sqrt(det.get_d()) > max_nodes) fail(ErrorKind::GuardExceeded, "estimated search volume exceeds the node guard");
    }
    IntMatrix gf = to_integer(to_rational(w.frame.positive) * to_rational(v.gram()));
    RadialTest test(gf, w.frame.positive_q, delta, w.rho, n);
    std::vector<std::int64_t> lnum(r), g(r * r);
    for (std::size_t i = 0; i < r; ++i) {
        lnum[i] = to64(Rational(lift[i] * delta).get_num());
        for (std::size_t j = 0; j < r; ++j) g[i * r + j] = to64(v.gram()(i, j));
    }
    // Q(x) = -n  <=>  X^T G X n_den = -2 delta^2 n_num
    const i128 qtarget = -2 * static_cast<i128>(delta) * delta * to64(n.get_num());
    const i128 nden = to64(n.get_den());
    PointCount out;
    out.method = "generic";
    std::vector<std::int64_t> x(r);
    ShortVectorEnumerator en(a);
    en.for_each(lift, bound, [&](const std::vector<std::int64_t>& z) {
        for (std::size_t i = 0; i < r; ++i) x[i] = lnum[i] + delta * z[i];
        i128 t = 0;
        for (std::size_t i = 0; i < r; ++i) {
            i128 row = 0;
            for (std::size_t j = 0; j < r; ++j) row += static_cast<i128>(g[i * r + j]) * x[j];
            t += row * x[i];
        }
        if (t * nden != qtarget) return;
        int c = test.classify(x);
        if (c < 0) return;
        ++out.count;
        if (c == 1) ++out.grazing;
        if (collect) {
            RationalVector p(r);
            for (std::size_t i = 0; i < r; ++i) p[i] = make_rational(x[i], delta);
            out.points.push_back(p);
        }
    }, static_cast<std::uint64_t>(max_nodes));
    return out;
}

void divisors_of(std::int64_t m, std::vector<std::int64_t>& out) {
    out.clear();
    std::vector<std::pair<std::int64_t, int>> f;
    for (std::int64_t p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.emplace_back(p, e);
    }
    if (m > 1) f.emplace_back(m, 1);
    out.push_back(1);
    for (auto [p, e] : f) {
        const std::size_t base = out.size();
        std::int64_t pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
}

PointCount split_count(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w, bool collect) {
    const IntegerLattice& v = d.lattice();
    const std::size_t r = v.rank();
    auto [si, sj] = *v.hyperbolic_split();
    IntMatrix u(2, r);
    u(0, si) = 1;
    u(1, sj) = 1;
    IntMatrix kb = orthogonal_complement_basis(v, u);
    const std::size_t k = kb.rows();
    // working basis: e, f of the split, then K = U-perp
    IntMatrix wb(r, r);
    wb.set_row(0, u.row(0));
    wb.set_row(1, u.row(1));
    for (std::size_t i = 0; i < k; ++i) wb.set_row(i + 2, kb.row(i));
    auto wbinv = inverse(to_rational(wb));
    if (!wbinv) fail(ErrorKind::Degenerate, "split basis is singular");
    if (abs(determinant(wb)) != 1) fail(ErrorKind::InvalidInput, "split does not give a unimodular change of basis");

    RationalVector lift = d.lift(gamma);
    // row vector: lift = y * wb
    RationalVector y(r, Rational(0));
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i) y[j] += lift[i] * (*wbinv)(i, j);
    RationalVector yk(y.begin() + 2, y.end());
    for (std::size_t j = 0; j < 2; ++j)
        if (!is_integer(y[j])) fail(ErrorKind::InvalidInput, "lift has a non-integral hyperbolic component");
    const std::int64_t delta = common_den(yk);

    IntMatrix gk = induced_gram(v, kb);
    RatMatrix a = to_rational(wb) * majorant(v, w.frame) * to_rational(wb).transpose();
    Rational bound = majorant_bound(n, w.rho);
    // Schur complement of the hyperbolic block
    RatMatrix auu(2, 2), schur(k, k);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) auu(i, j) = a(i, j);
    RatMatrix auui = *inverse(auu);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            Rational s = a(i + 2, j + 2);
            for (std::size_t p = 0; p < 2; ++p)
                for (std::size_t q = 0; q < 2; ++q) s -= a(i + 2, p) * auui(p, q) * a(q, j + 2);
            schur(i, j) = s;
        }

    IntMatrix gf = wb * v.gram() * w.frame.positive.transpose();
    RadialTest test(gf.transpose(), w.frame.positive_q, delta, w.rho, n);

    std::vector<std::int64_t> gk64(k * k), knum(k);
    for (std::size_t i = 0; i < k; ++i) {
        knum[i] = to64(Rational(yk[i] * delta).get_num());
        for (std::size_t j = 0; j < k; ++j) gk64[i * k + j] = to64(gk(i, j));
    }
    std::vector<long double> ald(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) ald[i * r + j] = static_cast<long double>(a(i, j).get_d());
    const long double bld = static_cast<long double>(bound.get_d());
    const i128 nnum = to64(n.get_num()), nden = to64(n.get_den());
    const i128 scale = 2 * static_cast<i128>(delta) * delta * nden;

    PointCount out;
    out.method = "hyperbolic";
    std::vector<std::int64_t> x(r), divs;
    auto visit = [&](std::int64_t ea, std::int64_t fb) {
        x[0] = ea * delta;
        x[1] = fb * delta;
        int c = test.classify(x);
        if (c < 0) return;
        ++out.count;
        if (c == 1) ++out.grazing;
        if (collect) {
            RationalVector yy(r);
            for (std::size_t i = 0; i < r; ++i) yy[i] = make_rational(x[i], delta);
            RationalVector p(r, Rational(0));
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) p[j] += yy[i] * Rational(wb(i, j));
            out.points.push_back(p);
        }
    };
    // b-range (or a-range) of the majorant ellipsoid on the line through the current kappa
    auto line_range = [&](std::size_t idx, std::int64_t& lo, std::int64_t& hi) {
        long double lin = 0, cst = 0;
        for (std::size_t i = 2; i < r; ++i) {
            const long double xi = static_cast<long double>(x[i]) / delta;
            lin += ald[idx * r + i] * xi;
            for (std::size_t j = 2; j < r; ++j) cst += ald[i * r + j] * xi * static_cast<long double>(x[j]) / delta;
        }
        const long double qa = ald[idx * r + idx];
        const long double disc = lin * lin - qa * (cst - bld * (1 + 1e-12L) - 1e-9L);
        if (disc < 0) {
            lo = 1;
            hi = 0;
            return;
        }
        const long double s = std::sqrt(disc);
        lo = static_cast<std::int64_t>(std::floor((-lin - s) / qa)) - 1;
        hi = static_cast<std::int64_t>(std::ceil((-lin + s) / qa)) + 1;
    };

    ShortVectorEnumerator en(schur);
    en.for_each(yk, bound, [&](const std::vector<std::int64_t>& z) {
        for (std::size_t i = 0; i < k; ++i) x[i + 2] = knum[i] + delta * z[i];
        i128 qk = 0;
        for (std::size_t i = 0; i < k; ++i) {
            i128 row = 0;
            for (std::size_t j = 0; j < k; ++j) row += static_cast<i128>(gk64[i * k + j]) * x[j + 2];
            qk += row * x[i + 2];
        }
        // t = -n - Q_K(kappa) = (-2 delta^2 n_num - qk n_den) / (2 delta^2 n_den)
        const i128 tn = -2 * static_cast<i128>(delta) * delta * nnum - qk * nden;
        if (tn % scale != 0) fail(ErrorKind::NotInSupport, "n is not in the support of gamma");
        const i128 t = tn / scale;
        if (t != 0) {
            if (t > static_cast<i128>(INT64_MAX / 2) || t < -static_cast<i128>(INT64_MAX / 2)) fail(ErrorKind::GuardExceeded, "norm too large");
            const std::int64_t tt = static_cast<std::int64_t>(t);
            divisors_of(tt < 0 ? -tt : tt, divs);
            for (auto dv : divs) {
                visit(dv, tt / dv);
                visit(-dv, -(tt / dv));
            }
            return;
        }
        std::int64_t lo, hi;
        x[0] = 0;
        line_range(1, lo, hi);
        for (std::int64_t fb = lo; fb <= hi; ++fb) visit(0, fb);
        x[1] = 0;
        line_range(0, lo, hi);
        for (std::int64_t ea = lo; ea <= hi; ++ea)
            if (ea != 0) visit(ea, 0);
    });
    return out;
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0) u1 = 0x1.0p-60;
        return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
    }
};

SplitMix sample_stream(std::uint64_t seed, std::uint64_t i) {
    SplitMix m{seed ^ 0xD1B54A32D192ED03ULL};
    std::uint64_t a = m.next();
    return SplitMix{a ^ (i * 0xA24BAED4963EE407ULL + 0x2545F4914F6CDD1DULL)};
}

struct Kahan {
    double sum = 0, c = 0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Mean and standard error of f over samples, split into fixed chunks per worker and merged in order.
template <class F>
MeasureEstimate monte_carlo(std::uint64_t samples, std::uint64_t seed, unsigned workers, F f) {
    if (samples == 0) fail(ErrorKind::InvalidInput, "samples must be positive");
    if (workers == 0) workers = 1;
    std::vector<Kahan> s1(workers), s2(workers);
    auto run = [&](unsigned wk) {
        const std::uint64_t lo = samples * wk / workers, hi = samples * (wk + 1) / workers;
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix rng = sample_stream(seed, i);
            double v = f(rng);
            s1[wk].add(v);
            s2[wk].add(v * v);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned wk = 0; wk < workers; ++wk) pool.emplace_back(run, wk);
        for (auto& t : pool) t.join();
    }
    Kahan a, b;
    for (unsigned wk = 0; wk < workers; ++wk) {
        a.add(s1[wk].sum);
        b.add(s2[wk].sum);
    }
    const double m = a.sum / static_cast<double>(samples);
    const double var = std::max(0.0, b.sum / static_cast<double>(samples) - m * m);
    return MeasureEstimate{m, std::sqrt(var / static_cast<double>(samples)), samples};
}

} // namespace

SplittingFrame make_frame(const IntegerLattice& v) {
    if (signature(v).positive != 2) fail(ErrorKind::HypothesisViolated, "frames need signature (2, b)");
    OrthogonalBasis ob = orthogonal_basis(v.gram());
    const std::size_t r = v.rank();
    IntMatrix pos(2, r);
    RatMatrix neg(r - 2, r);
    std::size_t ip = 0, in = 0;
    for (std::size_t i = 0; i < r; ++i) {
        if (ob.norms[i] > 0) {
            pos.set_row(ip++, primitive_integral(ob.basis.row(i)));
        } else {
            neg.set_row(in++, ob.basis.row(i));
        }
    }
    return build_frame(v, pos, neg);
}

SplittingFrame make_frame(const IntegerLattice& v, const RationalVector& f1, const RationalVector& f2) {
    const std::size_t r = v.rank();
    if (f1.size() != r || f2.size() != r) fail(ErrorKind::InvalidInput, "frame vectors have the wrong length");
    if (signature(v).positive != 2) fail(ErrorKind::HypothesisViolated, "frames need signature (2, b)");
    if (v.pair(f1, f2) != 0 || v.q(f1) <= 0 || v.q(f2) <= 0) fail(ErrorKind::InvalidInput, "frame vectors must be orthogonal and positive");
    IntMatrix pos(2, r);
    pos.set_row(0, primitive_integral(f1));
    pos.set_row(1, primitive_integral(f2));
    IntMatrix perp = kernel_basis(pos * v.gram());
    OrthogonalBasis ob = orthogonal_basis(induced_gram(v, perp));
    RatMatrix neg = ob.basis * to_rational(perp);
    return build_frame(v, pos, neg);
}

PointCount enumerate_points(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w,
                            bool collect, bool use_split, double max_nodes) {
    check_input(d, n, w);
    if (!is_integer(n + d.q_value(gamma))) fail(ErrorKind::NotInSupport, "n is not in -Q(gamma) + Z");
    if (use_split && d.lattice().hyperbolic_split()) return split_count(d, gamma, n, w, collect);
    return generic_count(d, gamma, n, w, collect, max_nodes);
}

std::uint64_t box_scan_count(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const Window& w,
                             double max_points) {
    check_input(d, n, w);
    const IntegerLattice& v = d.lattice();
    const std::size_t r = v.rank();
    RationalVector lift = d.lift(gamma);
    RatMatrix a = majorant(v, w.frame);
    const double bound = majorant_bound(n, w.rho).get_d();
    RatMatrix ainv = *inverse(a);
    std::vector<std::int64_t> lo(r), hi(r);
    double size = 1;
    for (std::size_t i = 0; i < r; ++i) {
        const double h = std::sqrt(bound * ainv(i, i).get_d()) + 1e-9;
        const double l = lift[i].get_d();
        lo[i] = static_cast<std::int64_t>(std::ceil(-h - l));
        hi[i] = static_cast<std::int64_t>(std::floor(h - l));
        size *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (size > max_points) fail(ErrorKind::GuardExceeded, "box too large");
    // Q is tested in scaled integers, the radius (rarely reached) in rationals
    const std::int64_t delta = common_den(lift);
    std::vector<std::int64_t> lnum(r), g(r * r);
    for (std::size_t i = 0; i < r; ++i) {
        lnum[i] = to64(Rational(lift[i] * delta).get_num());
        for (std::size_t j = 0; j < r; ++j) g[i * r + j] = to64(v.gram()(i, j));
    }
    const i128 qtarget = -2 * static_cast<i128>(delta) * delta * to64(n.get_num());
    const i128 nden = to64(n.get_den());
    std::uint64_t count = 0;
    std::vector<std::int64_t> z(lo), xs(r);
    RationalVector x(r);
    while (true) {
        for (std::size_t i = 0; i < r; ++i) xs[i] = lnum[i] + delta * z[i];
        i128 t = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) t += static_cast<i128>(xs[i]) * g[i * r + j] * xs[j];
        if (t * nden == qtarget) {
            for (std::size_t i = 0; i < r; ++i) x[i] = lift[i] + Rational(static_cast<long>(z[i]));
            Rational rad = 0;
            for (std::size_t i = 0; i < 2; ++i) {
                Rational p = v.pair(x, to_rational(w.frame.positive).row(i));
                rad += p * p / (Rational(w.frame.positive_q[i]) * 4);
            }
            if (rad <= w.rho * w.rho * n) ++count;
        }
        std::size_t k = r;
        while (k-- > 0) {
            if (z[k] < hi[k]) {
                ++z[k];
                break;
            }
            z[k] = lo[k];
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    return count;
}

BigFloat unit_sphere_area(int b) {
    if (b < 1) fail(ErrorKind::InvalidInput, "sphere dimension must be positive");
    return BigFloat(b) * boost::multiprecision::pow(pi_big(), BigFloat(b) / 2) / gamma_one_plus_half(b);
}

MeasureEstimate mu_a0(const Window& w, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    const int b = static_cast<int>(w.frame.columns.size()) - 2;
    if (b < 2) fail(ErrorKind::InvalidInput, "mu_A0 needs b >= 2");
    const double rho = std::sqrt(w.rho.get_d() * w.rho.get_d());
    if (w.rho <= 0) return MeasureEstimate{0, 0, samples};
    // chart over the disc |a| <= rho; the last negative coordinate is solved from Q = -1, and on the remaining
    // b - 1 coordinates |c'| = R sin(phi) turns dc' / |c_1| into area(S^(b-2)) R^(b-2) sin^(b-2)(phi) dphi
    const double sphere = static_cast<double>(unit_sphere_area(b - 1));
    const double weight = 2 * M_PI * rho * rho * sphere * (M_PI / 2);  // two sheets
    return monte_carlo(samples, seed, workers, [&](SplitMix& rng) {
        const double s = rho * rho * rng.uniform();
        const double phi = (M_PI / 2) * rng.uniform();
        const double big_r = std::sqrt(1 + s);
        return weight * std::pow(big_r * std::sin(phi), b - 2);
    });
}

MeasureEstimate mu_infty(const IntegerLattice& v, const Window& w, std::uint64_t samples, double eps, std::uint64_t seed,
                         unsigned workers) {
    const std::size_t r = v.rank();
    const int b = static_cast<int>(r) - 2;
    if (eps <= 0) fail(ErrorKind::InvalidInput, "shell width must be positive");
    if (w.rho <= 0) return MeasureEstimate{0, 0, samples};
    const double rho = w.rho.get_d();
    const double sphere = static_cast<double>(unit_sphere_area(b));
    const double weight = M_PI * rho * rho * sphere * static_cast<double>(w.frame.abs_det);
    std::vector<double> g(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) g[i * r + j] = v.gram()(i, j).get_d();
    std::vector<std::vector<double>> cols;
    for (const auto& c : w.frame.columns) cols.emplace_back(c.begin(), c.end());
    return monte_carlo(samples, seed, workers, [&](SplitMix& rng) {
        // frame coordinates: a uniform in the disc, |c|^2 uniform in a band of width 4 eps around the shell
        const double rad = rho * std::sqrt(rng.uniform());
        const double th = 2 * M_PI * rng.uniform();
        std::vector<double> u(r);
        u[0] = rad * std::cos(th);
        u[1] = rad * std::sin(th);
        const double s = 1 + rad * rad;
        const double c2 = s + eps * (4 * rng.uniform() - 2);
        double nn = 0;
        for (int j = 0; j < b; ++j) {
            u[2 + j] = rng.normal();
            nn += u[2 + j] * u[2 + j];
        }
        const double cn = std::sqrt(c2 / nn);
        for (int j = 0; j < b; ++j) u[2 + j] *= cn;
        std::vector<double> z(r, 0);
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t i = 0; i < r; ++i) z[i] += u[k] * cols[k][i];
        double q = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) q += z[i] * g[i * r + j] * z[j];
        q /= 2;
        if (std::fabs(q + 1) >= eps) return 0.0;
        return weight * std::pow(c2, (b - 2) / 2.0);
    });
}

std::vector<Rational> admissible_exponents(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n_min,
                                           const Rational& n_max) {
    std::vector<Rational> out;
    const Rational q = mod_one(-d.q_value(gamma));
    Rational lo = n_min - q;
    Integer k = floor_div(lo.get_num(), lo.get_den());
    if (Rational(k) < lo) k += 1;
    for (;; k += 1) {
        Rational n = q + Rational(k);
        if (n > n_max) break;
        if (n > 0) out.push_back(n);
    }
    return out;
}

EquidistributionReport equidistribution_run(const FiniteQuadraticModule& d, const Element& gamma, const Window& w,
                                            const Rational& n_min, const Rational& n_max, const EquidistributionOptions& opt) {
    EquidistributionReport rep;
    rep.prime_bound = opt.prime_bound;
    const int b = static_cast<int>(d.lattice().rank()) - 2;
    rep.mu_a0 = mu_a0(w, opt.samples, opt.seed, opt.workers);
    rep.mu_infty = mu_infty(d.lattice(), w, opt.samples, opt.eps, opt.seed + 1, opt.workers);
    DensityEngine engine(d, gamma);
    double total = 0;
    for (const auto& n : admissible_exponents(d, gamma, n_min, n_max)) {
        if (!engine.is_representable(n)) {
            rep.notes.push_back("n = " + to_string(n) + " skipped: not locally representable");
            continue;
        }
        CountReport row;
        row.n = n;
        PointCount pc = enumerate_points(d, gamma, n, w);
        row.empirical = pc.count;
        row.grazing = pc.grazing;
        row.ss_truncated = engine.singular_series(n, opt.prime_bound).truncated_product;
        row.predicted = rep.mu_infty.value * std::pow(n.get_d(), b / 2.0) * row.ss_truncated.get_d();
        row.ratio = row.predicted > 0 ? static_cast<double>(row.empirical) / row.predicted : 0;
        total += row.ratio;
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) rep.mean_ratio = total / static_cast<double>(rep.rows.size());
    return rep;
}

} // namespace qlat
