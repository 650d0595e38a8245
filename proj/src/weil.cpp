#include "qlat/weil.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qlat {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m = *this;
    for (auto& z : m.data) z = std::conj(z);
    return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols != b.rows) fail(ErrorKind::InvalidInput, "matrix shape mismatch");
    ComplexMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0)) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) fail(ErrorKind::InvalidInput, "matrix shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

double max_abs(const ComplexMatrix& m) {
    double r = 0;
    for (const auto& z : m.data) r = std::max(r, std::abs(z));
    return r;
}

std::string dump(const ComplexMatrix& m) {
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            // print -0 as 0 so dumps compare cleanly
            double re = m(i, j).real(), im = m(i, j).imag();
            os << (j ? " " : "") << (re == 0 ? 0.0 : re) << ',' << (im == 0 ? 0.0 : im);
        }
        os << '\n';
    }
    return os.str();
}

Complex unit_root(const Rational& x) {
    Rational r = mod_one(x);
    if (r == 0) return 1.0;
    if (r == Rational(1, 2)) return -1.0;
    if (r == Rational(1, 4)) return Complex(0, 1);
    if (r == Rational(3, 4)) return Complex(0, -1);
    long double angle = 2.0L * std::numbers::pi_v<long double> * (static_cast<long double>(r.get_num().get_d()) / static_cast<long double>(r.get_den().get_d()));
    return Complex(static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle)));
}

WeilAction::WeilAction(const FiniteQuadraticModule& d) : WeilAction(d, qlat::signature(d.lattice())) {}

WeilAction::WeilAction(const FiniteQuadraticModule& d, Signature sig) : sig_(sig), level_(d.level()) {
    const std::size_t n = d.order();
    if (n > 2048) fail(ErrorKind::GuardExceeded, "Weil matrices limited to |D| <= 2048");
    t_ = ComplexMatrix(n, n);
    s_ = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) t_(i, i) = unit_root(d.q_value(i));
    // i^{(b- - b+)/2} on the principal branch e^{i pi (b- - b+)/4}
    Complex scalar = unit_root(Rational(sig.negative - sig.positive, 8)) / std::sqrt(static_cast<double>(n));
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t e = g; e < n; ++e) {
            Complex z = scalar * unit_root(Rational(-d.b_value(g, e)));
            s_(e, g) = z;
            s_(g, e) = z;
        }
}

WeilAction WeilAction::dual() const {
    WeilAction w;
    w.t_ = t_.conj();
    w.s_ = s_.conj();
    w.sig_ = sig_;
    w.level_ = level_;
    return w;
}

RelationReport verify_relations(const WeilAction& w, double tol) {
    const std::size_t n = w.S().rows;
    if (n > 512) fail(ErrorKind::GuardExceeded, "relation check limited to |D| <= 512");
    RelationReport r;
    ComplexMatrix id = ComplexMatrix::identity(n);
    r.unitarity = max_abs(w.S() * w.S().adjoint() - id);
    ComplexMatrix st = w.S() * w.T();
    r.braid = max_abs(w.S() * w.S() - st * st * st);
    for (std::size_t i = 0; i < n; ++i) {
        Complex z = w.T()(i, i), acc = 1.0;
        for (std::int64_t k = 0; k < w.level(); ++k) acc *= z;
        r.t_order = std::max(r.t_order, std::abs(acc - 1.0));
        r.t_unit = std::max(r.t_unit, std::abs(std::abs(z) - 1.0));
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && w.T()(i, j) != Complex(0)) r.t_unit = std::max(r.t_unit, std::abs(w.T()(i, j)));
    }
    if (r.unitarity > tol || r.braid > tol || r.t_order > tol || r.t_unit > tol) {
        std::ostringstream os;
        os << "Weil relations fail: unitarity " << r.unitarity << ", S^2-(ST)^3 " << r.braid << ", T^N " << r.t_order;
        fail(ErrorKind::RelationFailure, os.str());
    }
    return r;
}

ComplexMatrix pullback_map(const std::vector<long>& projection, std::size_t target_order) {
    ComplexMatrix m(projection.size(), target_order);
    for (std::size_t i = 0; i < projection.size(); ++i)
        if (projection[i] >= 0) {
            if (static_cast<std::size_t>(projection[i]) >= target_order) fail(ErrorKind::InvalidInput, "projection target out of range");
            m(i, static_cast<std::size_t>(projection[i])) = 1.0;
        }
    return m;
}

ComplexMatrix pullback_map(const Gluing& g) { return pullback_map(g.projection, g.quotient.order()); }

ComplexMatrix pushforward_map(const Gluing& g) { return pullback_map(g).adjoint(); }

double intertwining_defect(const WeilAction& wv, const WeilAction& wk, const ComplexMatrix& pullback) {
    if (pullback.rows != wv.S().rows || pullback.cols != wk.S().rows)
        fail(ErrorKind::InvalidInput, "pullback shape does not match the two modules");
    double s = max_abs(wv.S() * pullback - pullback * wk.S());
    double t = max_abs(wv.T() * pullback - pullback * wk.T());
    return std::max(s, t);
}

} // namespace qlat
