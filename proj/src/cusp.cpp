#include "qlat/cusp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qlat/enumerate.hpp"

namespace qlat {

namespace {

struct SharpData {
    SmithForm snf;  // of plane * G
    std::vector<Integer> d;
};

SharpData sharp_data(const IntegerLattice& v, const IntMatrix& plane) {
    SharpData s{smith_form(plane * v.gram()), {}};
    for (std::size_t i = 0; i < plane.rows(); ++i) s.d.push_back(s.snf.D(i, i));
    return s;
}

// x in V^ with class in H_I-perp: move x by a lattice vector into I-perp, then read off its pairing with the transversal.
RationalVector move_into_perp(const IntegerLattice& v, const IntMatrix& plane, const SharpData& sd, RationalVector x) {
    const std::size_t r = v.rank();
    IntVector beta(plane.rows());
    for (std::size_t j = 0; j < plane.rows(); ++j) {
        Rational t = v.pair(x, to_rational(plane).row(j));
        if (!is_integer(t)) fail(ErrorKind::InvalidInput, "vector is not in the dual lattice");
        beta[j] = t.get_num();
    }
    std::vector<Integer> y(r, Integer(0));
    for (std::size_t i = 0; i < plane.rows(); ++i) {
        Integer ub = 0;
        for (std::size_t j = 0; j < plane.rows(); ++j) ub += sd.snf.U(i, j) * beta[j];
        if (!mpz_divisible_p(ub.get_mpz_t(), sd.d[i].get_mpz_t()))
            fail(ErrorKind::NotInSupport, "element is not orthogonal to H_I");
        y[i] = -ub / sd.d[i];
    }
    for (std::size_t k = 0; k < r; ++k) {
        Integer s = 0;
        for (std::size_t i = 0; i < r; ++i) s += sd.snf.V(k, i) * y[i];
        x[k] += s;
    }
    return x;
}

Element kf_class(const CuspDatum& f, const IntegerLattice& v, const RationalVector& xp) {
    const std::size_t k = f.transversal.rows();
    if (k == 0) return f.kf_module.zero();
    RatVector pairing(k);
    RatMatrix t = to_rational(f.transversal);
    for (std::size_t i = 0; i < k; ++i) pairing[i] = v.pair(xp, t.row(i));
    return f.kf_module.class_of(solve(to_rational(f.kf.gram()), pairing));
}

std::vector<std::int64_t> to_i64(const IntMatrix& m) {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!m(i, j).fits_slong_p()) fail(ErrorKind::GuardExceeded, "entry too large");
            out.push_back(m(i, j).get_si());
        }
    return out;
}

} // namespace

CuspDatum cusp_datum(const FiniteQuadraticModule& dv, const IntMatrix& plane_in) {
    const IntegerLattice& v = dv.lattice();
    const std::size_t r = v.rank();
    if (plane_in.rows() != 2 || plane_in.cols() != r) fail(ErrorKind::InvalidInput, "plane needs two rows of length " + std::to_string(r));
    if (signature(v).positive != 2) fail(ErrorKind::HypothesisViolated, "cusp data need signature (2, b)");
    RatMatrix pr = to_rational(plane_in);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = i; j < 2; ++j)
            if (v.pair(pr.row(i), pr.row(j)) != 0) fail(ErrorKind::NotIsotropic, "plane is not totally isotropic");
    if (rank(pr) != 2) fail(ErrorKind::InvalidInput, "plane rows are dependent");
    for (const auto& e : elementary_divisors(plane_in))
        if (e != 1) fail(ErrorKind::NotPrimitive, "plane is not primitive");
    IntMatrix plane = hermite_form(plane_in).H;

    SharpData sd = sharp_data(v, plane);
    std::vector<std::int64_t> invariants;
    std::vector<RationalVector> gens;
    Integer nf = 1;
    for (std::size_t i = 0; i < 2; ++i) {
        nf *= sd.d[i];
        if (sd.d[i] == 1) continue;
        invariants.push_back(sd.d[i].get_si());
        RationalVector g(r, Rational(0));
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < r; ++k) g[k] += Rational(sd.snf.U(i, j) * plane(j, k));
        for (auto& c : g) {
            c /= Rational(sd.d[i]);
            c.canonicalize();
        }
        gens.push_back(g);
    }

    // I-perp, and a transversal of I inside it from the Smith form of I's coordinates
    IntMatrix perp = kernel_basis(plane * v.gram());
    const std::size_t m = perp.rows();
    IntMatrix coords(2, m);
    {
        RatMatrix pt = to_rational(perp).transpose();
        // solve perp^T c = plane_row via the normal equations restricted to independent rows
        RatMatrix gram_pp = to_rational(perp) * pt;
        for (std::size_t i = 0; i < 2; ++i) {
            RatVector rhs = mat_vec(to_rational(perp), pr.row(i));
            RatVector c = solve(gram_pp, rhs);
            for (std::size_t j = 0; j < m; ++j) {
                if (!is_integer(c[j])) fail(ErrorKind::NotPrimitive, "plane is not saturated in its orthogonal");
                coords(i, j) = c[j].get_num();
            }
        }
    }
    SmithForm cs = smith_form(coords);
    auto vinv = inverse(to_rational(cs.V));
    IntMatrix moved = to_integer(*vinv) * perp;
    IntMatrix trans(m - 2, r);
    for (std::size_t i = 2; i < m; ++i)
        for (std::size_t k = 0; k < r; ++k) trans(i - 2, k) = moved(i, k);
    if (trans.rows() > 0) {
        IntMatrix g = induced_gram(v, trans);
        RatMatrix neg = to_rational(g);
        for (std::size_t i = 0; i < neg.rows(); ++i)
            for (std::size_t j = 0; j < neg.cols(); ++j) neg(i, j) = -neg(i, j);
        trans = lll_reduce(neg).transform * trans;
    }
    IntegerLattice kf(trans.rows() ? induced_gram(v, trans) : IntMatrix(0, 0), "K_F");
    if (signature(kf).positive != 0) fail(ErrorKind::HypothesisViolated, "K_F is not negative definite");
    FiniteQuadraticModule kfm(kf);

    std::vector<Element> hgens;
    for (const auto& g : gens) hgens.push_back(dv.class_of(g));
    Subgroup h = make_subgroup(dv, hgens);
    Subgroup hp = orthogonal_subgroup(dv, h);

    CuspDatum f{plane, invariants, gens, nf, nf == 1, perp, trans, kf, kfm, h, hp, {}, false};
    f.projection.assign(dv.order(), -1);
    for (auto i : hp.members) {
        RationalVector xp = move_into_perp(v, plane, sd, dv.lift(dv.element(i)));
        f.projection[i] = static_cast<long>(kfm.index(kf_class(f, v, xp)));
    }
    const Integer dvo = static_cast<long>(dv.order());
    f.brieskorn_holds = dvo == Integer(static_cast<long>(kfm.order())) * nf * nf &&
                        Integer(static_cast<long>(hp.size())) * nf == dvo;
    return f;
}

Element project_to_kf(const CuspDatum& f, const FiniteQuadraticModule& dv, const Element& x) {
    const auto i = dv.index(x);
    if (f.projection.at(i) < 0) fail(ErrorKind::NotInSupport, "element is not orthogonal to H_I");
    return f.kf_module.element(static_cast<std::size_t>(f.projection[i]));
}

std::vector<CuspDatum> find_isotropic_planes(const FiniteQuadraticModule& dv, int bound) {
    const IntegerLattice& v = dv.lattice();
    const std::size_t r = v.rank();
    if (bound < 0 || r < 4) return {};
    const double box = std::pow(2.0 * bound + 1.0, static_cast<double>(r));
    if (box > 1e7) fail(ErrorKind::GuardExceeded, "search box of " + std::to_string(box) + " points exceeds 1e7");
    if (signature(v).positive != 2) return {};
    const std::vector<std::int64_t> g = to_i64(v.gram());

    std::vector<std::vector<std::int64_t>> iso;
    std::vector<std::int64_t> x(r, -bound);
    auto pairing = [&](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < r; ++i) {
            if (!a[i]) continue;
            std::int64_t row = 0;
            for (std::size_t j = 0; j < r; ++j) row += g[i * r + j] * b[j];
            s += a[i] * row;
        }
        return s;
    };
    while (true) {
        std::size_t lead = 0;
        while (lead < r && x[lead] == 0) ++lead;
        if (lead < r && x[lead] > 0 && pairing(x, x) == 0) {
            std::int64_t gg = 0;
            for (auto c : x) gg = std::gcd(gg, c);
            if (gg == 1) iso.push_back(x);
        }
        std::size_t k = r;
        while (k-- > 0) {
            if (x[k] < bound) {
                ++x[k];
                break;
            }
            x[k] = -bound;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    if (static_cast<double>(iso.size()) * static_cast<double>(iso.size()) > 1e8)
        fail(ErrorKind::GuardExceeded, "too many isotropic vectors in the search box");

    std::map<std::vector<std::int64_t>, IntMatrix> planes;
    for (std::size_t a = 0; a < iso.size(); ++a)
        for (std::size_t b = a + 1; b < iso.size(); ++b) {
            if (pairing(iso[a], iso[b]) != 0) continue;
            IntMatrix p(2, r);
            for (std::size_t k = 0; k < r; ++k) {
                p(0, k) = static_cast<long>(iso[a][k]);
                p(1, k) = static_cast<long>(iso[b][k]);
            }
            IntMatrix sat = saturation(p);
            if (sat.rows() != 2) continue;
            IntMatrix h = hermite_form(sat).H;
            planes.emplace(to_i64(h), h);
        }
    std::vector<CuspDatum> out;
    for (const auto& [key, p] : planes) out.push_back(cusp_datum(dv, p));
    return out;
}

} // namespace qlat
