#include "qlat/fqm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace qlat {

namespace {

constexpr std::size_t kTableLimit = std::size_t(1) << 20;

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

} // namespace

FiniteQuadraticModule::FiniteQuadraticModule(IntegerLattice lattice) : lattice_(std::move(lattice)) {
    const std::size_t n = lattice_.rank();
    if (n == 0) {
        elements_.push_back({});
        q_table_.push_back(Rational(0));
        return;
    }
    const IntMatrix& g = lattice_.gram();
    SmithForm s = smith_form(g);
    snf_u_ = s.U;
    auto ginv = inverse(to_rational(g));
    auto uinv = inverse(to_rational(s.U));
    for (std::size_t i = 0; i < n; ++i) {
        const Integer& d = s.D(i, i);
        if (d == 1) continue;
        if (!d.fits_slong_p()) fail(ErrorKind::GuardExceeded, "invariant factor too large");
        factors_.push_back(d.get_si());
        factor_rows_.push_back(i);
        RatVector e(n, Rational(0));
        for (std::size_t k = 0; k < n; ++k) e[k] = (*uinv)(k, i);
        lifts_.push_back(mat_vec(*ginv, e));
    }
    for (auto d : factors_) {
        if (order_ > kTableLimit * 1024) fail(ErrorKind::GuardExceeded, "discriminant group too large");
        order_ *= static_cast<std::size_t>(d);
    }
    const std::size_t k = factors_.size();
    gen_b_.assign(k, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i) {
        gen_q_.push_back(mod_one(lattice_.q(lifts_[i])));
        for (std::size_t j = 0; j < k; ++j) gen_b_[i][j] = mod_one(lattice_.pair(lifts_[i], lifts_[j]));
    }
    for (std::size_t i = 0; i < k; ++i) {
        level_ = lcm64(level_, gen_q_[i].get_den().get_si());
        for (std::size_t j = i + 1; j < k; ++j) level_ = lcm64(level_, gen_b_[i][j].get_den().get_si());
    }
    if (order_ <= kTableLimit) {
        elements_.reserve(order_);
        q_table_.reserve(order_);
        for (std::size_t i = 0; i < order_; ++i) {
            elements_.push_back(element(i));
            q_table_.push_back(q_value(elements_.back()));
        }
    }
}

void FiniteQuadraticModule::check_element(const Element& x) const {
    if (x.size() != factors_.size()) fail(ErrorKind::InvalidInput, "element has the wrong number of residues");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0 || x[i] >= factors_[i])
            fail(ErrorKind::InvalidInput, "residue " + std::to_string(x[i]) + " out of range mod " + std::to_string(factors_[i]));
}

std::size_t FiniteQuadraticModule::index(const Element& x) const {
    check_element(x);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) idx = idx * static_cast<std::size_t>(factors_[i]) + static_cast<std::size_t>(x[i]);
    return idx;
}

Element FiniteQuadraticModule::element(std::size_t index) const {
    if (index >= order_) fail(ErrorKind::InvalidInput, "element index out of range");
    Element x(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
        x[i] = static_cast<std::int64_t>(index % static_cast<std::size_t>(factors_[i]));
        index /= static_cast<std::size_t>(factors_[i]);
    }
    return x;
}

Element FiniteQuadraticModule::add(const Element& x, const Element& y) const {
    Element z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] + y[i]) % factors_[i];
    return z;
}

Element FiniteQuadraticModule::neg(const Element& x) const {
    Element z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (factors_[i] - x[i]) % factors_[i];
    return z;
}

Element FiniteQuadraticModule::scale(const Element& x, std::int64_t k) const {
    Element z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = mod_floor(static_cast<std::int64_t>((static_cast<__int128>(x[i]) * k) % factors_[i]), factors_[i]);
    return z;
}

RationalVector FiniteQuadraticModule::lift(const Element& x) const {
    check_element(x);
    RationalVector v(lattice_.rank(), Rational(0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += Rational(static_cast<long>(x[i])) * lifts_[i][k];
    return v;
}

Element FiniteQuadraticModule::class_of(const RationalVector& v) const {
    const std::size_t n = lattice_.rank();
    if (v.size() != n) fail(ErrorKind::InvalidInput, "vector has the wrong length");
    IntVector w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational t = 0;
        for (std::size_t j = 0; j < n; ++j) t += Rational(lattice_.gram()(i, j)) * v[j];
        if (!is_integer(t)) fail(ErrorKind::InvalidInput, "vector is not in the dual lattice");
        w[i] = t.get_num();
    }
    Element x(factors_.size());
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        Integer s = 0;
        for (std::size_t j = 0; j < n; ++j) s += snf_u_(factor_rows_[f], j) * w[j];
        x[f] = mod_floor(s, Integer(static_cast<long>(factors_[f]))).get_si();
    }
    return x;
}

Rational FiniteQuadraticModule::q_value(const Element& x) const {
    check_element(x);
    Rational q = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i]) continue;
        Rational xi(static_cast<long>(x[i]));
        q += xi * xi * gen_q_[i];
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (x[j]) q += xi * Rational(static_cast<long>(x[j])) * gen_b_[i][j];
    }
    return mod_one(q);
}

Rational FiniteQuadraticModule::b_value(const Element& x, const Element& y) const {
    check_element(x);
    check_element(y);
    Rational b = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i]) continue;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j]) b += Rational(static_cast<long>(x[i])) * Rational(static_cast<long>(y[j])) * gen_b_[i][j];
    }
    return mod_one(b);
}

Rational FiniteQuadraticModule::b_value(std::size_t i, std::size_t j) const {
    if (!elements_.empty()) return b_value(elements_[i], elements_[j]);
    return b_value(element(i), element(j));
}

std::string FiniteQuadraticModule::dump() const {
    std::ostringstream os;
    os << "invariant_factors:";
    for (auto d : factors_) os << ' ' << d;
    os << "\nlevel: " << level_ << '\n';
    for (std::size_t i = 0; i < order_; ++i) {
        Element x = element(i);
        for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
        if (x.empty()) os << "()";
        os << " : Q=" << to_string(q_value(x)) << '\n';
    }
    return os.str();
}

bool Subgroup::contains(std::size_t i) const { return std::binary_search(members.begin(), members.end(), i); }

Subgroup make_subgroup(const FiniteQuadraticModule& d, const std::vector<Element>& generators) {
    std::set<std::size_t> seen{d.index(d.zero())};
    std::deque<Element> todo{d.zero()};
    while (!todo.empty()) {
        Element x = todo.front();
        todo.pop_front();
        for (const auto& g : generators) {
            Element y = d.add(x, g);
            if (seen.insert(d.index(y)).second) todo.push_back(y);
        }
    }
    return Subgroup{{seen.begin(), seen.end()}, false};
}

bool is_isotropic(const FiniteQuadraticModule& d, const Subgroup& h) {
    for (auto i : h.members)
        if (d.q_value(d.element(i)) != 0) return false;
    return true;
}

std::vector<Subgroup> isotropic_subgroups(const FiniteQuadraticModule& d, std::size_t guard) {
    if (d.order() > guard)
        fail(ErrorKind::GuardExceeded, "discriminant group of order " + std::to_string(d.order()) + " exceeds the enumeration guard");
    std::vector<std::size_t> isotropic;
    for (std::size_t i = 0; i < d.order(); ++i)
        if (d.q_value(i) == 0) isotropic.push_back(i);

    std::map<std::vector<std::size_t>, bool> found; // members -> extendable
    std::deque<std::vector<std::size_t>> todo;
    std::vector<std::size_t> trivial{d.index(d.zero())};
    found[trivial] = false;
    todo.push_back(trivial);
    while (!todo.empty()) {
        Subgroup h{todo.front(), false};
        todo.pop_front();
        for (auto x : isotropic) {
            if (h.contains(x)) continue;
            bool orth = true;
            for (auto m : h.members)
                if (d.b_value(x, m) != 0) {
                    orth = false;
                    break;
                }
            if (!orth) continue;
            found[h.members] = true;
            std::vector<Element> gens{d.element(x)};
            for (auto m : h.members) gens.push_back(d.element(m));
            Subgroup bigger = make_subgroup(d, gens);
            if (found.emplace(bigger.members, false).second) todo.push_back(bigger.members);
        }
    }
    std::vector<Subgroup> out;
    for (const auto& [members, extendable] : found) out.push_back(Subgroup{members, !extendable});
    std::stable_sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
        return a.size() != b.size() ? a.size() < b.size() : a.members < b.members;
    });
    return out;
}

Subgroup orthogonal_subgroup(const FiniteQuadraticModule& d, const Subgroup& h) {
    Subgroup out;
    for (std::size_t i = 0; i < d.order(); ++i) {
        bool orth = true;
        for (auto m : h.members)
            if (d.b_value(i, m) != 0) {
                orth = false;
                break;
            }
        if (orth) out.members.push_back(i);
    }
    return out;
}

Gluing glue(const FiniteQuadraticModule& d, const Subgroup& h) {
    if (!is_isotropic(d, h)) fail(ErrorKind::NotIsotropic, "subgroup is not isotropic");
    const IntegerLattice& l = d.lattice();
    const std::size_t n = l.rank();
    const Integer scale = d.level() * static_cast<long>(d.order());
    IntMatrix gens(n + h.size(), n);
    for (std::size_t i = 0; i < n; ++i) gens(i, i) = scale;
    for (std::size_t k = 0; k < h.size(); ++k) {
        RationalVector v = d.lift(d.element(h.members[k]));
        for (std::size_t j = 0; j < n; ++j) {
            Rational t = v[j] * Rational(scale);
            if (!is_integer(t)) fail(ErrorKind::InvalidInput, "lift denominator exceeds the module exponent");
            gens(n + k, j) = t.get_num();
        }
    }
    HermiteForm hf = hermite_form(gens);
    RatMatrix basis(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) basis(i, j) = Rational(hf.H(i, j), scale), basis(i, j).canonicalize();
    RatMatrix gram = basis * to_rational(l.gram()) * basis.transpose();
    IntegerLattice over(to_integer(gram), l.name().empty() ? "overlattice" : l.name() + "/H");
    FiniteQuadraticModule quotient(over);

    auto binv = inverse(basis);
    Subgroup perp = orthogonal_subgroup(d, h);
    std::vector<long> projection(d.order(), -1);
    for (auto i : perp.members) {
        RationalVector v = d.lift(d.element(i));
        RationalVector c(n, Rational(0));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) c[j] += v[k] * (*binv)(k, j);
        projection[i] = static_cast<long>(quotient.index(quotient.class_of(c)));
    }
    return Gluing{std::move(over), std::move(basis), std::move(quotient), std::move(projection)};
}

IntegerLattice overlattice(const FiniteQuadraticModule& d, const Subgroup& h) { return glue(d, h).overlattice; }

FiniteQuadraticModule quotient_module(const FiniteQuadraticModule& d, const Subgroup& h) { return glue(d, h).quotient; }

} // namespace qlat
