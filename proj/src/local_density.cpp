#include "qlat/local_density.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <variant>

namespace qlat {

namespace {

using u128 = unsigned __int128;

Integer from_u128(u128 x) {
    Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(x >> 64)));
    Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(x)));
    return hi * ipow(Integer(2), 64) + lo;
}

void require_support(const Rational& shifted, const Rational& n) {
    if (!is_integer(shifted)) fail(ErrorKind::NotInSupport, "n = " + to_string(n) + " is not in -Q(gamma) + Z");
}

Integer lcm_of_denominators(const RationalVector& v) {
    Integer den = 1;
    for (const auto& c : v) den = lcm(den, Integer(c.get_den()));
    return den;
}

} // namespace

Integer count_solutions_naive(const IntegerLattice& l, const RationalVector& lift, const Rational& n, std::uint64_t a,
                              std::uint64_t guard) {
    const std::size_t r = l.rank();
    if (a == 0) fail(ErrorKind::InvalidInput, "modulus must be positive");
    if (lift.size() != r) fail(ErrorKind::InvalidInput, "lift has the wrong length");
    require_support(Rational(l.q(lift) + n), n);
    long double volume = std::pow(static_cast<long double>(a), static_cast<long double>(r));
    if (volume > static_cast<long double>(guard))
        fail(ErrorKind::GuardExceeded, "naive count needs " + std::to_string(static_cast<double>(volume)) + " evaluations");

    // T = n_den (delta a + g)^T G (delta a + g) + 2 delta^2 n_num, test T = 0 mod 2 n_den delta^2 a
    const Integer delta = lcm_of_denominators(lift);
    const Integer nden = n.get_den();
    const Integer modulus_big = Integer(2) * nden * delta * delta * Integer(static_cast<unsigned long>(a));
    if (!modulus_big.fits_slong_p() || modulus_big > Integer(3037000499L))
        fail(ErrorKind::GuardExceeded, "naive count modulus too large");
    const std::int64_t mod = modulus_big.get_si();
    const std::int64_t dl = mod_floor(delta, modulus_big).get_si();
    std::vector<std::int64_t> g(r), gram(r * r);
    for (std::size_t i = 0; i < r; ++i) g[i] = mod_floor(Integer(lift[i] * Rational(delta)), modulus_big).get_si();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) gram[i * r + j] = mod_floor(Integer(l.gram()(i, j) * nden), modulus_big).get_si();
    const std::int64_t constant = mod_floor(Integer(Integer(2) * delta * delta * n.get_num()), modulus_big).get_si();

    std::vector<std::uint64_t> alpha(r, 0);
    std::vector<std::int64_t> y(r);
    std::uint64_t count = 0;
    while (true) {
        for (std::size_t i = 0; i < r; ++i) y[i] = (dl * static_cast<std::int64_t>(alpha[i]) + g[i]) % mod;
        std::int64_t t = constant;
        for (std::size_t i = 0; i < r; ++i) {
            if (!y[i]) continue;
            std::int64_t row = 0;
            for (std::size_t j = 0; j < r; ++j) row = (row + gram[i * r + j] * y[j]) % mod;
            t = (t + row * y[i]) % mod;
        }
        if (t == 0) ++count;
        std::size_t i = 0;
        while (i < r && ++alpha[i] == a) alpha[i++] = 0;
        if (i == r) break;
    }
    return Integer(static_cast<unsigned long>(count));
}

Integer count_solutions_naive(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, std::uint64_t a,
                              std::uint64_t guard) {
    return count_solutions_naive(d.lattice(), d.lift(gamma), n, a, guard);
}

JordanDecomposition jordan_decomposition(const IntMatrix& gram, unsigned long p) {
    const std::size_t r = gram.rows();
    JordanDecomposition jd{p, RatMatrix::identity(r), to_rational(gram), {}};
    RatMatrix& b = jd.basis;
    RatMatrix& a = jd.gram;
    // b_k += c b_j, keeping a = b^T G b
    auto add = [&](std::size_t k, std::size_t j, const Rational& c) {
        b.add_col(k, j, c);
        a.add_row(k, j, c);
        a.add_col(k, j, c);
    };
    std::vector<std::size_t> rem(r);
    for (std::size_t i = 0; i < r; ++i) rem[i] = i;
    auto drop = [&](std::size_t i) { rem.erase(std::find(rem.begin(), rem.end(), i)); };
    while (!rem.empty()) {
        int v = 1 << 28;
        for (auto i : rem)
            for (auto j : rem) v = std::min(v, valuation(a(i, j), p));
        if (v == (1 << 28)) fail(ErrorKind::Degenerate, "degenerate form in Jordan splitting");
        std::optional<std::size_t> diag;
        for (auto i : rem)
            if (valuation(a(i, i), p) == v) {
                diag = i;
                break;
            }
        std::size_t pi = 0, pj = 0;
        if (!diag) {
            bool found = false;
            for (std::size_t x = 0; x < rem.size() && !found; ++x)
                for (std::size_t y = x + 1; y < rem.size() && !found; ++y)
                    if (valuation(a(rem[x], rem[y]), p) == v) {
                        pi = rem[x];
                        pj = rem[y];
                        found = true;
                    }
            if (p != 2) {
                add(pi, pj, Rational(1));
                diag = pi;
            }
        }
        if (diag) {
            const std::size_t i = *diag;
            for (auto k : rem)
                if (k != i && a(k, i) != 0) add(k, i, Rational(-a(k, i) / a(i, i)));
            jd.blocks.push_back({i});
            drop(i);
            continue;
        }
        const Rational det = a(pi, pi) * a(pj, pj) - a(pi, pj) * a(pi, pj);
        for (auto k : rem) {
            if (k == pi || k == pj) continue;
            Rational u = a(pi, k), w = a(pj, k);
            if (u == 0 && w == 0) continue;
            Rational c1 = (a(pj, pj) * u - a(pi, pj) * w) / det;
            Rational c2 = (a(pi, pi) * w - a(pi, pj) * u) / det;
            add(k, pi, Rational(-c1));
            add(k, pj, Rational(-c2));
        }
        jd.blocks.push_back({pi, pj});
        drop(pi);
        drop(pj);
    }
    return jd;
}

namespace {

/// Value counts of a block polynomial over (Z/m)^k.
struct BlockPoly {
    std::vector<Rational> quad;  // k = 1: {a}; k = 2: {a, b, c} for a x^2 + b x y + c y^2
    std::vector<Rational> lin;
};

std::vector<std::uint64_t> block_histogram(const BlockPoly& bp, std::int64_t m) {
    std::vector<std::uint64_t> h(static_cast<std::size_t>(m), 0);
    if (bp.lin.size() == 1) {
        const std::int64_t a = residue(bp.quad[0], m), l = residue(bp.lin[0], m);
        for (std::int64_t x = 0; x < m; ++x) {
            std::int64_t v = ((a * x % m) * x + l * x) % m;
            ++h[static_cast<std::size_t>(v)];
        }
        return h;
    }
    const std::int64_t a = residue(bp.quad[0], m), b = residue(bp.quad[1], m), c = residue(bp.quad[2], m);
    const std::int64_t l1 = residue(bp.lin[0], m), l2 = residue(bp.lin[1], m);
    for (std::int64_t x = 0; x < m; ++x) {
        const std::int64_t base = ((a * x % m) * x + l1 * x) % m;
        const std::int64_t bx = (b * x + l2) % m;
        // value(x, y) = base + (bx + c y) y, stepped incrementally in y
        std::int64_t v = base;
        for (std::int64_t y = 0; y < m; ++y) {
            ++h[static_cast<std::size_t>(v)];
            // v(y+1) - v(y) = bx + c (2y + 1)
            v = (v + bx + c * ((2 * y + 1) % m)) % m;
        }
    }
    return h;
}

template <class C>
std::vector<C> convolve(const std::vector<C>& f, const std::vector<C>& g) {
    const std::size_t m = f.size();
    std::vector<C> out(m, C(0));
    for (std::size_t t = 0; t < m; ++t) {
        if (f[t] == 0) continue;
        const C ft = f[t];
        std::size_t u = 0;
        for (std::size_t k = t; k < m; ++k, ++u) out[k] += ft * g[u];
        for (std::size_t k = 0; k < t; ++k, ++u) out[k] += ft * g[u];
    }
    return out;
}

template <class C>
std::vector<C> total_distribution(const std::vector<BlockPoly>& blocks, std::int64_t m) {
    std::vector<C> acc(static_cast<std::size_t>(m), C(0));
    acc[0] = C(1);
    for (const auto& bp : blocks) {
        auto h = block_histogram(bp, m);
        std::vector<C> hc(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) hc[i] = C(static_cast<unsigned long>(h[i]));
        acc = convolve(acc, hc);
    }
    return acc;
}

using Distribution = std::variant<std::vector<u128>, std::vector<Integer>>;

Integer dist_at(const Distribution& d, std::size_t i) {
    if (auto* v = std::get_if<std::vector<u128>>(&d)) return from_u128((*v)[i]);
    return std::get<std::vector<Integer>>(d)[i];
}

} // namespace

struct DensityEngine::Impl {
    std::size_t rank = 0;
    Integer det;
    RationalVector lift;
    IntVector w;  // G * lift
    Rational q_gamma;
    std::map<unsigned long, JordanDecomposition> jordan;
    std::map<std::pair<unsigned long, int>, Distribution> dists;
    std::map<unsigned long, std::vector<Integer>> dist1;  // Q mod p, no linear term

    const JordanDecomposition& jordan_at(unsigned long p, const IntMatrix& gram) {
        auto it = jordan.find(p);
        if (it == jordan.end()) it = jordan.emplace(p, jordan_decomposition(gram, p)).first;
        return it->second;
    }

    std::vector<BlockPoly> block_polys(const JordanDecomposition& jd, bool with_linear) const {
        std::vector<BlockPoly> out;
        for (const auto& blk : jd.blocks) {
            BlockPoly bp;
            auto lin = [&](std::size_t col) {
                if (!with_linear) return Rational(0);
                Rational s = 0;
                for (std::size_t k = 0; k < rank; ++k) s += jd.basis(k, col) * Rational(w[k]);
                return s;
            };
            if (blk.size() == 1) {
                bp.quad = {Rational(jd.gram(blk[0], blk[0]) / 2)};
                bp.lin = {lin(blk[0])};
            } else {
                bp.quad = {Rational(jd.gram(blk[0], blk[0]) / 2), jd.gram(blk[0], blk[1]), Rational(jd.gram(blk[1], blk[1]) / 2)};
                bp.lin = {lin(blk[0]), lin(blk[1])};
            }
            out.push_back(std::move(bp));
        }
        return out;
    }
};

DensityEngine::DensityEngine(const FiniteQuadraticModule& d, Element gamma)
    : d_(d), gamma_(std::move(gamma)), impl_(std::make_unique<Impl>()) {
    d_.check_element(gamma_);
    const IntegerLattice& l = d_.lattice();
    impl_->rank = l.rank();
    impl_->det = l.abs_determinant();
    impl_->lift = d_.lift(gamma_);
    impl_->q_gamma = l.q(impl_->lift);
    impl_->w.resize(impl_->rank);
    for (std::size_t i = 0; i < impl_->rank; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < impl_->rank; ++j) s += Rational(l.gram()(i, j)) * impl_->lift[j];
        impl_->w[i] = s.get_num();
    }
}

DensityEngine::~DensityEngine() = default;
DensityEngine::DensityEngine(DensityEngine&&) noexcept = default;

Integer DensityEngine::shifted(const Rational& n) const {
    Rational c = impl_->q_gamma + n;
    require_support(c, n);
    return c.get_num();
}

Integer DensityEngine::count(const Rational& n, unsigned long p, int s, bool use_hensel) {
    if (s < 0) fail(ErrorKind::InvalidInput, "negative exponent");
    const Integer c = shifted(n);
    if (s == 0) return 1;
    const std::size_t r = impl_->rank;
    const Integer pp(p);

    if (use_hensel && p != 2 && !mpz_divisible_ui_p(impl_->det.get_mpz_t(), p)) {
        // Q(x) = -n mod p^s with x = alpha + gamma, gamma p-integral here
        auto it = impl_->dist1.find(p);
        if (it == impl_->dist1.end()) {
            auto polys = impl_->block_polys(impl_->jordan_at(p, d_.lattice().gram()), false);
            std::vector<Integer> d1;
            if (static_cast<double>(r) * std::log2(static_cast<double>(p)) <= 120) {
                for (u128 x : total_distribution<u128>(polys, static_cast<std::int64_t>(p))) d1.push_back(from_u128(x));
            } else {
                d1 = total_distribution<Integer>(polys, static_cast<std::int64_t>(p));
            }
            it = impl_->dist1.emplace(p, std::move(d1)).first;
        }
        const auto& d1 = it->second;
        std::function<Integer(const Integer&, int)> rec = [&](const Integer& m, int e) -> Integer {
            if (e == 0) return 1;
            const unsigned long m1 = mpz_fdiv_ui(m.get_mpz_t(), p);
            Integer prim = (d1[m1] - (m1 == 0 ? 1 : 0)) * ipow(pp, (r - 1) * static_cast<unsigned long>(e - 1));
            Integer sing = 0;
            if (e <= 2) {
                if (m == 0) sing = ipow(pp, r * static_cast<unsigned long>(e - 1));
            } else if (mpz_divisible_p(m.get_mpz_t(), Integer(pp * pp).get_mpz_t())) {
                sing = ipow(pp, r) * rec(mod_floor(Integer(m / (pp * pp)), ipow(pp, static_cast<unsigned long>(e - 2))), e - 2);
            }
            return prim + sing;
        };
        const Integer ps = ipow(pp, static_cast<unsigned long>(s));
        return rec(residue_big(Rational(-n), ps), s);
    }

    const long double m_ld = std::pow(static_cast<long double>(p), static_cast<long double>(s));
    if (m_ld > 40000.0L) fail(ErrorKind::GuardExceeded, "split count modulus " + std::to_string(p) + "^" + std::to_string(s) + " too large");
    const std::int64_t m = ipow64(static_cast<std::int64_t>(p), static_cast<unsigned>(s));
    for (const auto& blk : impl_->jordan_at(p, d_.lattice().gram()).blocks)
        if (blk.size() == 2 && m_ld * m_ld > 1.1e9L) fail(ErrorKind::GuardExceeded, "rank-2 block enumeration too large");
    auto key = std::make_pair(p, s);
    auto it = impl_->dists.find(key);
    if (it == impl_->dists.end()) {
        auto polys = impl_->block_polys(impl_->jordan_at(p, d_.lattice().gram()), true);
        const double bits = static_cast<double>(r) * s * std::log2(static_cast<double>(p));
        Distribution dist;
        if (bits <= 120) dist = total_distribution<u128>(polys, m);
        else dist = total_distribution<Integer>(polys, m);
        it = impl_->dists.emplace(key, std::move(dist)).first;
    }
    const std::int64_t target = mod_floor(Integer(-c), Integer(static_cast<long>(m))).get_si();
    return dist_at(it->second, static_cast<std::size_t>(target));
}

int default_s_max(const Integer& det, const Rational& n, unsigned long p) {
    Integer x = Integer(4) * n.get_num() * n.get_den() * det;
    return 1 + valuation(x, p) + 2;
}

LocalDensityReport DensityEngine::local_density(const Rational& n, unsigned long p, std::optional<int> s_max) {
    if (n <= 0) fail(ErrorKind::InvalidInput, "local density needs n > 0");
    if (!is_prime(p)) fail(ErrorKind::InvalidInput, std::to_string(p) + " is not prime");
    shifted(n);
    const Integer& det = impl_->det;
    LocalDensityReport rep;
    rep.prime = p;
    rep.floor_exponent = 1 + valuation(Integer(Integer(2) * n.get_num() * n.get_den() * det), p);
    const int smax = s_max ? *s_max : default_s_max(det, n, p);
    const bool hensel = p != 2 && !mpz_divisible_ui_p(det.get_mpz_t(), p);
    rep.method = hensel ? "hensel" : "split";
    const unsigned long e = static_cast<unsigned long>(impl_->rank - 1);
    auto normalized = [&](int s, const Integer& cnt) {
        Rational v(cnt, ipow(Integer(p), e * static_cast<unsigned long>(s)));
        v.canonicalize();
        return v;
    };
    for (int s = 1; s <= rep.floor_exponent + 1; ++s) rep.raw_counts.push_back(count(n, p, s));
    int s0 = rep.floor_exponent;
    while (normalized(s0, rep.raw_counts[s0 - 1]) != normalized(s0 + 1, rep.raw_counts[s0])) {
        ++s0;
        if (s0 + 1 > smax)
            fail(ErrorKind::NoStabilization, "no stabilization for p = " + std::to_string(p) + " up to s = " + std::to_string(smax));
        rep.raw_counts.push_back(count(n, p, s0 + 1));
    }
    rep.stabilization_exponent = s0;
    rep.density = normalized(s0, rep.raw_counts[s0 - 1]);
    return rep;
}

SingularSeries DensityEngine::singular_series(const Rational& n, unsigned long prime_bound) {
    if (n <= 0) fail(ErrorKind::InvalidInput, "singular series needs n > 0");
    std::set<unsigned long> primes;
    for (auto p : primes_up_to(prime_bound)) primes.insert(p);
    for (auto p : prime_factors(Integer(Integer(2) * n.get_num() * n.get_den() * impl_->det))) primes.insert(p);
    SingularSeries ss;
    ss.prime_bound = prime_bound;
    ss.truncated_product = 1;
    for (auto p : primes) {
        LocalDensityReport rep = local_density(n, p);
        ss.truncated_product *= rep.density;
        if (rep.density == 0) ss.locally_representable = false;
        ss.factors.emplace(p, std::move(rep));
    }
    return ss;
}

bool DensityEngine::is_representable(const Rational& n) {
    if (n <= 0) return false;
    if (!is_integer(Rational(impl_->q_gamma + n))) return false;
    std::set<unsigned long> primes;
    for (auto p : primes_up_to(50)) primes.insert(p);
    for (auto p : prime_factors(Integer(Integer(2) * n.get_num() * n.get_den() * impl_->det))) primes.insert(p);
    for (auto p : primes)
        if (local_density(n, p).density == 0) return false;
    return true;
}

LocalDensityReport local_density(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long p,
                                 std::optional<int> s_max) {
    return DensityEngine(d, gamma).local_density(n, p, s_max);
}

SingularSeries singular_series(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long prime_bound) {
    if (d.lattice().rank() < 5) fail(ErrorKind::HypothesisViolated, "singular series needs b >= 3 (rank >= 5)");
    return DensityEngine(d, gamma).singular_series(n, prime_bound);
}

bool is_representable(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n) {
    return DensityEngine(d, gamma).is_representable(n);
}

Integer count_solutions_split(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, unsigned long p, int s) {
    if (!is_prime(p)) fail(ErrorKind::InvalidInput, std::to_string(p) + " is not prime");
    return DensityEngine(d, gamma).count(n, p, s, false);
}

BigFloat pi_big() { return boost::math::constants::pi<BigFloat>(); }

BigFloat gamma_one_plus_half(int b) {
    if (b < 0) fail(ErrorKind::InvalidInput, "negative b");
    auto fact = [](int k) {
        BigFloat f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    if (b % 2 == 0) return fact(b / 2);
    const int k = (b + 1) / 2;
    return fact(2 * k) * boost::multiprecision::sqrt(pi_big()) / (boost::multiprecision::pow(BigFloat(4), k) * fact(k));
}

namespace {

BigFloat to_big(const Rational& x) { return BigFloat(x.get_num().get_str()) / BigFloat(x.get_den().get_str()); }

void check_eisenstein_hypotheses(const FiniteQuadraticModule& d) {
    Signature sig = signature(d.lattice());
    if (sig.positive != 2 || sig.negative < 3)
        fail(ErrorKind::HypothesisViolated, "Eisenstein coefficients need signature (2,b) with b >= 3");
}

} // namespace

EisensteinCoefficient eisenstein_from_series(const FiniteQuadraticModule& d, const Rational& n, const SingularSeries& ss) {
    check_eisenstein_hypotheses(d);
    const int b = static_cast<int>(d.lattice().rank()) - 2;
    const BigFloat half_b = BigFloat(b) / 2;
    EisensteinCoefficient c;
    c.prime_bound = ss.prime_bound;
    c.archimedean = -boost::multiprecision::pow(BigFloat(2), 2 + half_b) * boost::multiprecision::pow(pi_big(), 1 + half_b) *
                    boost::multiprecision::pow(to_big(n), half_b) /
                    (boost::multiprecision::sqrt(BigFloat(static_cast<unsigned long>(d.order()))) * gamma_one_plus_half(b));
    c.value = c.archimedean * to_big(ss.truncated_product);
    c.series = ss;
    if (ss.truncated_product == 0) {
        c.exact = true;
        c.exact_value = Rational(0);
    }
    return c;
}

EisensteinCoefficient eisenstein_coefficient(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n,
                                             unsigned long prime_bound) {
    check_eisenstein_hypotheses(d);
    if (n < 0) fail(ErrorKind::InvalidInput, "Eisenstein coefficients vanish for n < 0");
    DensityEngine engine(d, gamma);
    engine.shifted(n);
    if (n == 0) {
        EisensteinCoefficient c;
        c.exact = true;
        c.prime_bound = prime_bound;
        const bool zero = std::all_of(gamma.begin(), gamma.end(), [](std::int64_t x) { return x == 0; });
        c.exact_value = zero ? Rational(2) : Rational(0);
        c.value = zero ? 2 : 0;
        return c;
    }
    return eisenstein_from_series(d, n, engine.singular_series(n, prime_bound));
}

std::string format_decimal(const BigFloat& x, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

} // namespace qlat
