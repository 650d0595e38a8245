#include "qlat/qseries.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "qlat/enumerate.hpp"

namespace qlat {

VectorQSeries::VectorQSeries(Rational truncation) : terms_(1), den_(1), trunc_(std::move(truncation)) {
    q_values_.push_back(Rational(0));
    support_ = Support::MinusQ;
}

VectorQSeries::VectorQSeries(const FiniteQuadraticModule& d, Rational truncation, Support support)
    : terms_(d.order()), den_(d.level()), trunc_(std::move(truncation)), support_(support) {
    for (std::size_t i = 0; i < d.order(); ++i) q_values_.push_back(d.q_value(i));
}

std::int64_t VectorQSeries::key(const Rational& n) const {
    Rational k = n * Rational(static_cast<long>(den_));
    if (!is_integer(k))
        fail(ErrorKind::InvalidInput, "exponent " + to_string(n) + " has denominator not dividing " + std::to_string(den_));
    if (!k.get_num().fits_slong_p()) fail(ErrorKind::GuardExceeded, "exponent too large");
    return k.get_num().get_si();
}

void VectorQSeries::check_support(std::size_t gamma, const Rational& n) const {
    if (gamma >= terms_.size()) fail(ErrorKind::InvalidInput, "component index out of range");
    if (support_ == Support::Unchecked) return;
    Rational shift = support_ == Support::MinusQ ? Rational(n + q_values_[gamma]) : Rational(n - q_values_[gamma]);
    if (!is_integer(shift)) fail(ErrorKind::NotInSupport, "exponent " + to_string(n) + " outside the support of component " + std::to_string(gamma));
}

Rational VectorQSeries::coeff(std::size_t gamma, const Rational& n) const {
    if (gamma >= terms_.size()) fail(ErrorKind::InvalidInput, "component index out of range");
    if (n > trunc_) fail(ErrorKind::Truncation, "exponent " + to_string(n) + " beyond truncation order " + to_string(trunc_));
    Rational k = n * Rational(static_cast<long>(den_));
    if (!is_integer(k)) return 0;
    auto it = terms_[gamma].find(k.get_num().get_si());
    return it == terms_[gamma].end() ? Rational(0) : it->second;
}

void VectorQSeries::add(std::size_t gamma, const Rational& n, const Rational& value) {
    if (n > trunc_ || value == 0) return;
    check_support(gamma, n);
    auto& slot = terms_[gamma][key(n)];
    slot += value;
    if (slot == 0) terms_[gamma].erase(key(n));
}

void VectorQSeries::clear() {
    for (auto& comp : terms_) comp.clear();
}

VectorQSeries VectorQSeries::truncated(const Rational& order) const {
    VectorQSeries out = *this;
    out.trunc_ = std::min(order, trunc_);
    for (auto& comp : out.terms_)
        for (auto it = comp.begin(); it != comp.end();)
            it = out.exponent(it->first) > out.trunc_ ? comp.erase(it) : std::next(it);
    return out;
}

std::string VectorQSeries::csv() const {
    std::vector<std::tuple<std::int64_t, std::size_t, Rational>> rows;
    for (std::size_t g = 0; g < terms_.size(); ++g)
        for (const auto& [k, v] : terms_[g]) rows.emplace_back(k, g, v);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::ostringstream os;
    os << "gamma_index,exp_num,exp_den,coeff_num,coeff_den\n";
    for (const auto& [k, g, v] : rows) {
        Rational e = exponent(k);
        os << g << ',' << e.get_num().get_str() << ',' << e.get_den().get_str() << ',' << v.get_num().get_str() << ','
           << v.get_den().get_str() << '\n';
    }
    return os.str();
}

bool operator==(const VectorQSeries& a, const VectorQSeries& b) {
    if (a.components() != b.components() || a.truncation() != b.truncation()) return false;
    for (std::size_t g = 0; g < a.components(); ++g) {
        const auto& x = a.component(g);
        const auto& y = b.component(g);
        if (x.size() != y.size()) return false;
        for (const auto& [k, v] : x)
            if (b.coeff(g, a.exponent(k)) != v) return false;
    }
    return true;
}

VectorQSeries theta_series(const IntegerLattice& k, const Rational& order) {
    return theta_series(FiniteQuadraticModule(k), order);
}

VectorQSeries theta_series(const FiniteQuadraticModule& d, const Rational& order) {
    const IntegerLattice& k = d.lattice();
    if (order < 0) fail(ErrorKind::InvalidInput, "negative truncation order");
    Signature sig = signature(k);
    if (sig.positive != 0) fail(ErrorKind::InvalidInput, "theta series needs a negative definite lattice");
    VectorQSeries out(d, order, Support::MinusQ);
    const std::size_t n = k.rank();
    if (n == 0) {
        out.add(0, Rational(0), Rational(1));
        return out;
    }
    IntMatrix neg = k.gram();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) neg(i, j) = -neg(i, j);
    ShortVectorEnumerator en(to_rational(neg));
    std::vector<std::int64_t> g(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] = neg(i, j).get_si();

    for (std::size_t idx = 0; idx < d.order(); ++idx) {
        RationalVector lift = d.lift(d.element(idx));
        Integer den = 1;
        for (const auto& c : lift) den = lcm(den, Integer(c.get_den()));
        const std::int64_t dd = den.get_si();
        std::vector<std::int64_t> num(n);
        for (std::size_t i = 0; i < n; ++i) num[i] = Rational(lift[i] * Rational(den)).get_num().get_si();
        // 2 dd^2 (-Q(x)) <= 2 dd^2 order, evaluated exactly in 128-bit integers
        Rational lim = order * 2 * Rational(den * den);
        const __int128 limit = floor_div(lim.get_num(), lim.get_den()).get_si();
        std::map<__int128, long> counts;
        std::vector<__int128> y(n);
        en.for_each(lift, order * 2, [&](const std::vector<std::int64_t>& z) {
            for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<__int128>(num[i]) + static_cast<__int128>(dd) * z[i];
            __int128 t = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!y[i]) continue;
                __int128 row = 0;
                for (std::size_t j = 0; j < n; ++j) row += static_cast<__int128>(g[i * n + j]) * y[j];
                t += y[i] * row;
            }
            if (t <= limit) ++counts[t];
        });
        for (const auto& [t, cnt] : counts) {
            Rational m(Integer(static_cast<long>(t)), Integer(2) * den * den);
            m.canonicalize();
            out.add(idx, m, Rational(cnt));
        }
    }
    return out;
}

std::int64_t sigma1(std::int64_t n) {
    std::int64_t s = 0;
    for (std::int64_t d = 1; d * d <= n; ++d)
        if (n % d == 0) s += d + (d * d == n ? 0 : n / d);
    return s;
}

VectorQSeries e2_series(std::int64_t order) {
    if (order < 0) fail(ErrorKind::InvalidInput, "negative truncation order");
    VectorQSeries e(Rational(static_cast<long>(order)));
    e.add(0, Rational(0), Rational(1));
    for (std::int64_t n = 1; n <= order; ++n) e.add(0, Rational(static_cast<long>(n)), Rational(-24 * sigma1(n)));
    return e;
}

VectorQSeries multiply(const VectorQSeries& f, const VectorQSeries& g) {
    if (f.components() != 1 || f.denominator() != 1) fail(ErrorKind::InvalidInput, "left factor must be a scalar series with integral exponents");
    VectorQSeries out = g.truncated(std::min(f.truncation(), g.truncation()));
    out.clear();
    for (std::size_t c = 0; c < out.components(); ++c) {
        std::map<std::int64_t, Rational> acc;
        for (const auto& [kf, vf] : f.component(0)) {
            const std::int64_t shift = kf * g.denominator();
            for (const auto& [kg, vg] : g.component(c)) acc[kg + shift] += vf * vg;
        }
        for (const auto& [k, v] : acc) out.add(c, g.exponent(k), v);
    }
    return out;
}

VectorQSeries add(const VectorQSeries& f, const VectorQSeries& g) {
    if (f.components() != g.components() || f.denominator() != g.denominator())
        fail(ErrorKind::InvalidInput, "series have different shapes");
    VectorQSeries out = f.truncated(std::min(f.truncation(), g.truncation()));
    for (std::size_t c = 0; c < g.components(); ++c)
        for (const auto& [k, v] : g.component(c)) out.add(c, g.exponent(k), v);
    return out;
}

VectorQSeries pullback(const VectorQSeries& s, const FiniteQuadraticModule& target, const std::vector<long>& projection) {
    if (projection.size() != target.order()) fail(ErrorKind::InvalidInput, "projection does not match the target module");
    VectorQSeries out(target, s.truncation(), s.support());
    for (std::size_t delta = 0; delta < projection.size(); ++delta) {
        if (projection[delta] < 0) continue;
        const auto p = static_cast<std::size_t>(projection[delta]);
        if (p >= s.components()) fail(ErrorKind::InvalidInput, "projection target out of range");
        for (const auto& [k, v] : s.component(p)) out.add(delta, s.exponent(k), v);
    }
    return out;
}

} // namespace qlat
