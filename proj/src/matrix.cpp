#include "qlat/matrix.hpp"

#include <algorithm>

namespace qlat {

RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

IntMatrix to_integer(const RatMatrix& m) {
    IntMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!is_integer(m(i, j))) fail(ErrorKind::InvalidInput, "non-integral matrix entry " + to_string(m(i, j)));
            r(i, j) = m(i, j).get_num();
        }
    return r;
}

RatVector mat_vec(const RatMatrix& a, const RatVector& v) {
    RatVector out(a.rows(), Rational(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

Rational dot(const RatVector& a, const RatVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Rational bilinear(const RatMatrix& a, const RatVector& x, const RatVector& y) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (x[i] == 0) continue;
        Rational t = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) t += a(i, j) * y[j];
        s += x[i] * t;
    }
    return s;
}

Rational bilinear(const IntMatrix& a, const RatVector& x, const RatVector& y) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (x[i] == 0) continue;
        Rational t = 0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0) t += Rational(a(i, j)) * y[j];
        s += x[i] * t;
    }
    return s;
}

Integer determinant(const IntMatrix& a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) fail(ErrorKind::InvalidInput, "determinant of non-square matrix");
    if (n == 0) return 1;
    // Bareiss fraction-free elimination.
    IntMatrix m = a;
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

std::size_t rank(const RatMatrix& a) {
    RatMatrix m = a;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        m.swap_rows(r, p);
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            if (m(i, c) == 0) continue;
            Rational f = m(i, c) / m(r, c);
            m.add_row(i, r, Rational(-f));
        }
        ++r;
    }
    return r;
}

std::optional<RatMatrix> inverse(const RatMatrix& a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) fail(ErrorKind::InvalidInput, "inverse of non-square matrix");
    RatMatrix m = a;
    RatMatrix inv = RatMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c) == 0) ++p;
        if (p == n) return std::nullopt;
        m.swap_rows(c, p);
        inv.swap_rows(c, p);
        Rational piv = m(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            m(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m(i, c) == 0) continue;
            Rational f = -m(i, c);
            m.add_row(i, c, f);
            inv.add_row(i, c, f);
        }
    }
    return inv;
}

RatVector solve(const RatMatrix& a, const RatVector& b) {
    auto inv = inverse(a);
    if (!inv) fail(ErrorKind::Degenerate, "singular system");
    return mat_vec(*inv, b);
}

std::vector<Integer> SmithForm::diagonal() const {
    std::vector<Integer> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
}

SmithForm smith_form(const IntMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    SmithForm s{IntMatrix::identity(m), a, IntMatrix::identity(n)};
    IntMatrix& D = s.D;
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        while (true) {
            // smallest nonzero entry of the trailing block becomes the pivot
            bool found = false;
            std::size_t pi = t, pj = t;
            Integer best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (D(i, j) != 0 && (!found || abs(D(i, j)) < best)) {
                        found = true;
                        best = abs(D(i, j));
                        pi = i;
                        pj = j;
                    }
            if (!found) return s;
            D.swap_rows(t, pi);
            s.U.swap_rows(t, pi);
            D.swap_cols(t, pj);
            s.V.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (D(i, t) == 0) continue;
                Integer q = floor_div(D(i, t), D(t, t));
                D.add_row(i, t, Integer(-q));
                s.U.add_row(i, t, Integer(-q));
                if (D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (D(t, j) == 0) continue;
                Integer q = floor_div(D(t, j), D(t, t));
                D.add_col(j, t, Integer(-q));
                s.V.add_col(j, t, Integer(-q));
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            bool divisible = true;
            for (std::size_t i = t + 1; i < m && divisible; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
                        D.add_row(t, i, Integer(1));
                        s.U.add_row(t, i, Integer(1));
                        divisible = false;
                        break;
                    }
            if (divisible) break;
        }
        if (D(t, t) < 0) {
            for (std::size_t j = 0; j < n; ++j) D(t, j) = -D(t, j);
            for (std::size_t j = 0; j < m; ++j) s.U(t, j) = -s.U(t, j);
        }
    }
    return s;
}

std::vector<Integer> elementary_divisors(const IntMatrix& a) { return smith_form(a).diagonal(); }

HermiteForm hermite_form(const IntMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    HermiteForm h{a, IntMatrix::identity(m), 0};
    IntMatrix& H = h.H;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        while (true) {
            std::size_t p = m;
            for (std::size_t i = r; i < m; ++i)
                if (H(i, c) != 0 && (p == m || abs(H(i, c)) < abs(H(p, c)))) p = i;
            if (p == m) break;
            H.swap_rows(r, p);
            h.U.swap_rows(r, p);
            bool clean = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (H(i, c) == 0) continue;
                Integer q = floor_div(H(i, c), H(r, c));
                H.add_row(i, r, Integer(-q));
                h.U.add_row(i, r, Integer(-q));
                if (H(i, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (H(r, c) == 0) continue;
        if (H(r, c) < 0) {
            for (std::size_t j = 0; j < n; ++j) H(r, j) = -H(r, j);
            for (std::size_t j = 0; j < m; ++j) h.U(r, j) = -h.U(r, j);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Integer q = floor_div(H(i, c), H(r, c));
            if (q == 0) continue;
            H.add_row(i, r, Integer(-q));
            h.U.add_row(i, r, Integer(-q));
        }
        ++r;
    }
    h.rank = r;
    return h;
}

IntMatrix kernel_basis(const IntMatrix& a) {
    const std::size_t n = a.cols();
    HermiteForm h = hermite_form(a.transpose());
    const std::size_t k = n - h.rank;
    IntMatrix ker(k, n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) ker(i, j) = h.U(h.rank + i, j);
    if (k == 0) return ker;
    HermiteForm canon = hermite_form(ker);
    return canon.H;
}

std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b) {
    SmithForm s = smith_form(a);
    const std::size_t m = a.rows(), n = a.cols();
    IntVector ub(m, Integer(0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) ub[i] += s.U(i, j) * b[j];
    IntVector y(n, Integer(0));
    for (std::size_t i = 0; i < m; ++i) {
        Integer d = i < n ? s.D(i, i) : Integer(0);
        if (d == 0) {
            if (ub[i] != 0) return std::nullopt;
            continue;
        }
        if (!mpz_divisible_p(ub[i].get_mpz_t(), d.get_mpz_t())) return std::nullopt;
        y[i] = ub[i] / d;
    }
    IntVector x(n, Integer(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x[i] += s.V(i, j) * y[j];
    return x;
}

IntMatrix saturation(const IntMatrix& rows) {
    // The kernel of the kernel is the saturated row space.
    IntMatrix k = kernel_basis(rows);
    if (k.rows() == 0) return IntMatrix::identity(rows.cols());
    return kernel_basis(k);
}

std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j).get_str();
        os << "]";
    }
    return os << "]";
}

} // namespace qlat
