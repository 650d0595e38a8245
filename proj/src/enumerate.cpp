#include "qlat/enumerate.hpp"

#include <string>

namespace qlat {

namespace {

struct GramSchmidt {
    std::vector<std::vector<Rational>> mu;
    std::vector<Rational> b;
};

GramSchmidt gram_schmidt(const RatMatrix& g) {
    const std::size_t n = g.rows();
    GramSchmidt gs{std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)), std::vector<Rational>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            Rational s = g(i, j);
            for (std::size_t l = 0; l < j; ++l) s -= gs.mu[j][l] * gs.mu[i][l] * gs.b[l];
            gs.mu[i][j] = s / gs.b[j];
        }
        Rational s = g(i, i);
        for (std::size_t l = 0; l < i; ++l) s -= gs.mu[i][l] * gs.mu[i][l] * gs.b[l];
        if (s <= 0) fail(ErrorKind::InvalidInput, "Gram matrix is not positive definite");
        gs.b[i] = s;
    }
    return gs;
}

Integer round_nearest(const Rational& x) {
    // floor(x + 1/2)
    Rational y = x + Rational(1, 2);
    return floor_div(y.get_num(), y.get_den());
}

} // namespace

LllResult lll_reduce(const RatMatrix& gram, const Rational& delta) {
    const std::size_t n = gram.rows();
    LllResult r{IntMatrix::identity(n), gram};
    if (n <= 1) {
        if (n == 1 && gram(0, 0) <= 0) fail(ErrorKind::InvalidInput, "Gram matrix is not positive definite");
        return r;
    }
    RatMatrix& g = r.gram;
    GramSchmidt gs = gram_schmidt(g);
    auto reduce = [&](std::size_t k, std::size_t j) {
        Integer q = round_nearest(gs.mu[k][j]);
        if (q == 0) return;
        Rational qr(q);
        // b_k -= q b_j
        r.transform.add_row(k, j, Integer(-q));
        g.add_row(k, j, Rational(-qr));
        g.add_col(k, j, Rational(-qr));
        for (std::size_t l = 0; l < j; ++l) gs.mu[k][l] -= qr * gs.mu[j][l];
        gs.mu[k][j] -= qr;
    };
    std::size_t k = 1;
    while (k < n) {
        reduce(k, k - 1);
        if (gs.b[k] >= (delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.b[k - 1]) {
            for (std::size_t j = k - 1; j-- > 0;) reduce(k, j);
            ++k;
        } else {
            r.transform.swap_rows(k, k - 1);
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            gs = gram_schmidt(g);
            k = k > 1 ? k - 1 : 1;
        }
    }
    return r;
}

ShortVectorEnumerator::ShortVectorEnumerator(const RatMatrix& a, bool reduce) : n_(a.rows()) {
    if (a.cols() != n_) fail(ErrorKind::InvalidInput, "form matrix is not square");
    IntMatrix t = IntMatrix::identity(n_);
    RatMatrix g = a;
    if (reduce) {
        LllResult l = lll_reduce(a);
        t = l.transform;
        g = l.gram;
    }
    transform_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            if (!t(i, j).fits_slong_p()) fail(ErrorKind::GuardExceeded, "reduction transform entries too large");
            transform_[i * n_ + j] = t(i, j).get_si();
        }
    auto inv = inverse(to_rational(t));
    transform_inv_ = *inv;

    // Fincke-Pohst form: x^T g x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    std::vector<std::vector<Rational>> q(n_, std::vector<Rational>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
        Rational s = g(i, i);
        for (std::size_t k = 0; k < i; ++k) s -= q[k][k] * q[k][i] * q[k][i];
        if (s <= 0) fail(ErrorKind::InvalidInput, "form is not positive definite");
        q[i][i] = s;
        for (std::size_t j = i + 1; j < n_; ++j) {
            Rational u = g(i, j);
            for (std::size_t k = 0; k < i; ++k) u -= q[k][k] * q[k][i] * q[k][j];
            q[i][j] = u / s;
        }
    }
    q_diag_.resize(n_);
    q_off_.assign(n_, std::vector<long double>(n_, 0));
    for (std::size_t i = 0; i < n_; ++i) {
        q_diag_[i] = static_cast<long double>(q[i][i].get_d());
        for (std::size_t j = i + 1; j < n_; ++j) q_off_[i][j] = static_cast<long double>(q[i][j].get_d());
    }
}

void ShortVectorEnumerator::check_nodes(std::uint64_t nodes, std::uint64_t max_nodes) const {
    if (nodes > max_nodes)
        fail(ErrorKind::GuardExceeded, "enumeration exceeded " + std::to_string(max_nodes) + " nodes");
}

} // namespace qlat
