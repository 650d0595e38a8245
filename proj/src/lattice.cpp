#include "qlat/lattice.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qlat {

IntegerLattice::IntegerLattice(IntMatrix gram, std::string name, std::optional<HyperbolicSplit> split)
    : gram_(std::move(gram)), name_(std::move(name)), split_(split) {
    const std::size_t n = gram_.rows();
    if (gram_.cols() != n) fail(ErrorKind::InvalidInput, "Gram matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
        if (!mpz_even_p(gram_(i, i).get_mpz_t()))
            fail(ErrorKind::InvalidInput, "odd diagonal entry: lattice is not even");
        for (std::size_t j = 0; j < i; ++j)
            if (gram_(i, j) != gram_(j, i)) fail(ErrorKind::InvalidInput, "Gram matrix is not symmetric");
    }
    det_ = qlat::determinant(gram_);
    if (det_ == 0) fail(ErrorKind::Degenerate, "degenerate Gram matrix (det = 0)");
    if (split_) {
        auto [i, j] = *split_;
        if (i >= n || j >= n || i == j || gram_(i, i) != 0 || gram_(j, j) != 0 || gram_(i, j) != 1)
            fail(ErrorKind::InvalidInput, "hyperbolic_split rows do not span a hyperbolic plane");
    }
}

IntegerLattice IntegerLattice::renamed(std::string name) const {
    IntegerLattice copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

IntegerLattice hyperbolic_plane() { return IntegerLattice(IntMatrix{{0, 1}, {1, 0}}, "U", HyperbolicSplit{0, 1}); }

IntegerLattice rank_one(long two_m) {
    if (two_m == 0 || two_m % 2 != 0)
        fail(ErrorKind::InvalidInput, "rank1 parameter must be a nonzero even integer, got " + std::to_string(two_m));
    return IntegerLattice(IntMatrix{{two_m}}, "rank1(" + std::to_string(two_m) + ")");
}

IntegerLattice e8(bool negative) {
    // Cartan matrix: chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
    IntMatrix g(8, 8);
    for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2;
    auto link = [&](std::size_t a, std::size_t b) { g(a, b) = g(b, a) = -1; };
    for (std::size_t i = 0; i + 1 < 7; ++i) link(i, i + 1);
    link(4, 7);
    if (negative)
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) g(i, j) = -g(i, j);
    return IntegerLattice(g, negative ? "E8(-1)" : "E8");
}

IntegerLattice k3_lattice() {
    IntegerLattice u = hyperbolic_plane();
    IntegerLattice e = e8(true);
    return direct_sum({u, u, u, e, e}).renamed("K3");
}

IntegerLattice make_named(const std::string& name, const std::vector<long>& params) {
    if (name == "U") return hyperbolic_plane();
    if (name == "E8") return e8(false);
    if (name == "E8(-1)") return e8(true);
    if (name == "K3") return k3_lattice();
    if (name == "rank1") {
        if (params.size() != 1) fail(ErrorKind::InvalidInput, "rank1 takes one parameter");
        return rank_one(params[0]);
    }
    fail(ErrorKind::InvalidInput, "unknown lattice name '" + name + "'");
}

IntegerLattice direct_sum(const std::vector<IntegerLattice>& parts) {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.rank();
    IntMatrix g(n, n);
    std::optional<HyperbolicSplit> split;
    std::string name;
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.rank(); ++i)
            for (std::size_t j = 0; j < p.rank(); ++j) g(off + i, off + j) = p.gram()(i, j);
        if (!split && p.hyperbolic_split())
            split = HyperbolicSplit{off + p.hyperbolic_split()->first, off + p.hyperbolic_split()->second};
        name += (name.empty() ? "" : "+") + (p.name().empty() ? std::string("L") : p.name());
        off += p.rank();
    }
    return IntegerLattice(g, name, split);
}

IntegerLattice rescale(const IntegerLattice& lattice, long m) {
    if (m == 0) fail(ErrorKind::InvalidInput, "rescale by zero");
    IntMatrix g = lattice.gram();
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) *= m;
    std::optional<HyperbolicSplit> split = m == 1 ? lattice.hyperbolic_split() : std::nullopt;
    return IntegerLattice(g, lattice.name() + "(" + std::to_string(m) + ")", split);
}

namespace {

class ExprParser {
  public:
    explicit ExprParser(const std::string& s) {
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) text_ += c;
    }

    IntegerLattice parse() {
        IntegerLattice l = sum();
        if (pos_ != text_.size()) error("unexpected '" + text_.substr(pos_) + "'");
        return l;
    }

  private:
    IntegerLattice sum() {
        std::vector<IntegerLattice> parts{atom()};
        while (peek() == '+') {
            ++pos_;
            parts.push_back(atom());
        }
        return parts.size() == 1 ? parts.front() : direct_sum(parts);
    }

    IntegerLattice atom() {
        std::optional<IntegerLattice> base;
        if (peek() == '(') {
            ++pos_;
            base = sum();
            expect(')');
        } else {
            std::string word;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                word += text_[pos_++];
            if (word.empty()) error("expected a lattice name");
            if (word == "rank1") {
                expect('(');
                long v = integer();
                expect(')');
                base = rank_one(v);
            } else if (word == "rescale") {
                expect('(');
                IntegerLattice inner = sum();
                expect(',');
                long m = integer();
                expect(')');
                base = rescale(inner, m);
            } else {
                base = make_named(word);
            }
        }
        while (peek() == '(') {
            ++pos_;
            long m = integer();
            expect(')');
            IntegerLattice scaled = rescale(*base, m);
            if (base->name() == "E8" && m == -1) scaled = e8(true);
            base = scaled;
        }
        return *base;
    }

    long integer() {
        std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) error("expected an integer");
        return std::stol(text_.substr(start, pos_ - start));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void expect(char c) {
        if (peek() != c) error(std::string("expected '") + c + "'");
        ++pos_;
    }
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::InvalidInput, "lattice expression '" + text_ + "': " + msg);
    }

    std::string text_;
    std::size_t pos_ = 0;
};

} // namespace

IntegerLattice parse_lattice_expression(const std::string& expr) { return ExprParser(expr).parse(); }

OrthogonalBasis orthogonal_basis(const IntMatrix& gram) {
    const std::size_t n = gram.rows();
    RatMatrix a = to_rational(gram);
    RatMatrix b = RatMatrix::identity(n);
    // symmetric congruence a -> E a E^T, tracked in the rows of b
    auto add = [&](std::size_t dst, std::size_t src, const Rational& f) {
        b.add_row(dst, src, f);
        a.add_row(dst, src, f);
        a.add_col(dst, src, f);
    };
    for (std::size_t k = 0; k < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t j = k + 1;
            while (j < n && a(k, j) == 0) ++j;
            if (j == n) fail(ErrorKind::Degenerate, "degenerate Gram matrix");
            add(k, j, Rational(1));
            if (a(k, k) == 0) add(k, j, Rational(-2));
        }
        for (std::size_t j = k + 1; j < n; ++j) {
            if (a(j, k) == 0) continue;
            Rational f = -a(j, k) / a(k, k);
            add(j, k, f);
        }
    }
    OrthogonalBasis out{b, {}};
    for (std::size_t k = 0; k < n; ++k) out.norms.push_back(a(k, k));
    return out;
}

Signature signature(const IntegerLattice& lattice) {
    Signature s;
    for (const auto& d : orthogonal_basis(lattice.gram()).norms) (d > 0 ? s.positive : s.negative)++;
    return s;
}

IntMatrix induced_gram(const IntegerLattice& lattice, const IntMatrix& basis) {
    return basis * lattice.gram() * basis.transpose();
}

IntMatrix orthogonal_complement_basis(const IntegerLattice& lattice, const IntMatrix& sub) {
    if (sub.cols() != lattice.rank()) fail(ErrorKind::InvalidInput, "sublattice rows have the wrong length");
    if (rank(to_rational(sub)) != sub.rows()) fail(ErrorKind::InvalidInput, "sublattice rows are linearly dependent");
    for (const auto& d : elementary_divisors(sub))
        if (d != 1) fail(ErrorKind::NotPrimitive, "sublattice is not primitive (saturation index " + d.get_str() + ")");
    if (sub.rows() == 0) return IntMatrix::identity(lattice.rank());
    return kernel_basis(sub * lattice.gram());
}

IntegerLattice orthogonal_complement(const IntegerLattice& lattice, const IntMatrix& sub) {
    IntMatrix k = orthogonal_complement_basis(lattice, sub);
    if (k.rows() == 0) return IntegerLattice(IntMatrix(0, 0), "0");
    return IntegerLattice(induced_gram(lattice, k), "perp");
}

namespace {

int legendre(const Integer& a, const Integer& p) { return mpz_legendre(a.get_mpz_t(), p.get_mpz_t()); }

/// Splits a = p^v u with u coprime to p.
std::pair<int, Integer> split_p(const Integer& a, unsigned long p) {
    Integer u = a;
    int v = 0;
    while (mpz_divisible_ui_p(u.get_mpz_t(), p)) {
        mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), p);
        ++v;
    }
    return {v, u};
}

int eps2(const Integer& u) { return mod_floor(Integer((u - 1) / 2), Integer(2)).get_si(); }
int omega2(const Integer& u) { return mod_floor(Integer((u * u - 1) / 8), Integer(2)).get_si(); }

bool is_square_qp(const Integer& d, unsigned long p) {
    if (p == 0) return d > 0;
    auto [v, u] = split_p(d, p);
    if (v % 2) return false;
    if (p == 2) return mod_floor(u, Integer(8)) == 1;
    return legendre(u, Integer(p)) == 1;
}

Integer squarefree_part(const Rational& r) {
    Integer x = r.get_num() * r.get_den();
    Integer sign = x < 0 ? -1 : 1;
    x = abs(x);
    Integer out = 1;
    for (auto p : prime_factors(x)) {
        auto [v, u] = split_p(x, p);
        if (v % 2) out *= p;
    }
    return sign * out;
}

} // namespace

int hilbert_symbol(const Integer& a, const Integer& b, unsigned long p) {
    if (a == 0 || b == 0) fail(ErrorKind::InvalidInput, "Hilbert symbol of zero");
    if (p == 0) return (a < 0 && b < 0) ? -1 : 1;
    auto [alpha, u] = split_p(a, p);
    auto [beta, v] = split_p(b, p);
    if (p == 2) {
        int e = (eps2(u) * eps2(v) + alpha * omega2(v) + beta * omega2(u)) % 2;
        return e ? -1 : 1;
    }
    Integer pp(p);
    int s = ((alpha * beta) % 2 && (p % 4 == 3)) ? -1 : 1;
    if (beta % 2) s *= legendre(u, pp);
    if (alpha % 2) s *= legendre(v, pp);
    return s;
}

bool is_anisotropic_over_Q(const IntegerLattice& lattice) {
    const std::size_t n = lattice.rank();
    if (n >= 5) fail(ErrorKind::InvalidInput, "anisotropy test supports rank <= 4 only");
    if (n <= 1) return true;
    std::vector<Integer> diag;
    for (const auto& d : orthogonal_basis(lattice.gram()).norms) diag.push_back(squarefree_part(d));
    Integer disc = 1;
    for (const auto& d : diag) disc *= d;
    std::vector<unsigned long> places{0, 2};
    for (const auto& d : diag)
        for (auto p : prime_factors(d))
            if (p != 2 && std::find(places.begin(), places.end(), p) == places.end()) places.push_back(p);
    for (auto p : places) {
        int eps = 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) eps *= hilbert_symbol(diag[i], diag[j], p);
        bool isotropic_here = false;
        if (n == 2) isotropic_here = is_square_qp(Integer(-disc), p);
        else if (n == 3) isotropic_here = hilbert_symbol(Integer(-1), Integer(-disc), p) == eps;
        else isotropic_here = !is_square_qp(disc, p) || eps == hilbert_symbol(Integer(-1), Integer(-1), p);
        if (!isotropic_here) return true;
    }
    return false;
}

IntegerLattice lattice_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::InvalidInput, std::string("lattice file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("gram") || !j["gram"].is_array())
        fail(ErrorKind::InvalidInput, "lattice file: missing \"gram\" array");
    const auto& rows = j["gram"];
    const std::size_t n = rows.size();
    IntMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n) fail(ErrorKind::InvalidInput, "lattice file: gram is not square");
        for (std::size_t k = 0; k < n; ++k) {
            if (!rows[i][k].is_number_integer()) fail(ErrorKind::InvalidInput, "lattice file: non-integer gram entry");
            g(i, k) = Integer(static_cast<long>(rows[i][k].get<long long>()));
        }
    }
    std::string name = j.value("name", std::string{});
    std::optional<HyperbolicSplit> split;
    if (j.contains("hyperbolic_split")) {
        const auto& r = j["hyperbolic_split"]["rows"];
        if (!r.is_array() || r.size() != 2) fail(ErrorKind::InvalidInput, "lattice file: hyperbolic_split.rows must have two entries");
        split = HyperbolicSplit{r[0].get<std::size_t>(), r[1].get<std::size_t>()};
    }
    return IntegerLattice(g, name, split);
}

std::string lattice_to_json(const IntegerLattice& lattice) {
    nlohmann::json j;
    if (!lattice.name().empty()) j["name"] = lattice.name();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < lattice.rank(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < lattice.rank(); ++k) row.push_back(lattice.gram()(i, k).get_si());
        rows.push_back(row);
    }
    j["gram"] = rows;
    if (lattice.hyperbolic_split())
        j["hyperbolic_split"] = {{"rows", {lattice.hyperbolic_split()->first, lattice.hyperbolic_split()->second}}};
    return j.dump();
}

IntegerLattice load_lattice(const std::string& spec) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(spec, ec)) {
        std::ifstream in(spec);
        std::stringstream ss;
        ss << in.rdbuf();
        return lattice_from_json(ss.str());
    }
    return parse_lattice_expression(spec);
}

} // namespace qlat
