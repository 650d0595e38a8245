#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace qlat {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ErrorKind {
    InvalidInput,
    Degenerate,
    NotPrimitive,
    NotIsotropic,
    NotInSupport,
    GuardExceeded,
    NoStabilization,
    RelationFailure,
    HypothesisViolated,
    Truncation,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Lower-case name such as "guard_exceeded".
std::string kind_name(ErrorKind kind);

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}
inline Rational make_rational(const Integer& num, const Integer& den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Reduce to the representative in [0, 1).
inline Rational mod_one(const Rational& x) {
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    Rational r = x - Rational(fl);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// Nonnegative residue of a modulo m (m > 0).
inline Integer mod_floor(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

/// p-adic valuation of a nonzero integer. Returns a large sentinel for zero.
inline int valuation(const Integer& a, unsigned long p) {
    if (a == 0) return 1 << 28;
    Integer x = abs(a);
    int v = 0;
    while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
        mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), p);
        ++v;
    }
    return v;
}

inline int valuation(const Rational& a, unsigned long p) {
    if (a == 0) return 1 << 28;
    return valuation(Integer(a.get_num()), p) - valuation(Integer(a.get_den()), p);
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline std::int64_t ipow64(std::int64_t base, unsigned e) {
    std::int64_t r = 1;
    while (e--) r *= base;
    return r;
}

/// Image of a p-integral rational in Z/mZ, where gcd(den, m) = 1.
inline std::int64_t residue(const Rational& x, std::int64_t m) {
    Integer mm(static_cast<long>(m));
    Integer num = mod_floor(Integer(x.get_num()), mm);
    Integer den = mod_floor(Integer(x.get_den()), mm);
    if (m == 1) return 0;
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mm.get_mpz_t()) == 0)
        fail(ErrorKind::InvalidInput, "denominator not invertible modulo " + std::to_string(m));
    return mod_floor(Integer(num * inv), mm).get_si();
}

inline Integer residue_big(const Rational& x, const Integer& m) {
    Integer num = mod_floor(Integer(x.get_num()), m);
    Integer den = mod_floor(Integer(x.get_den()), m);
    if (m == 1) return 0;
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
        fail(ErrorKind::InvalidInput, "denominator not invertible modulo " + m.get_str());
    return mod_floor(Integer(num * inv), m);
}

inline std::string to_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

/// Parses "a", "-a", "a/b" or a terminating decimal like "1.25".
Rational parse_rational(const std::string& text);

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> primes_up_to(std::uint64_t bound);
std::vector<std::uint64_t> prime_factors(Integer n);

} // namespace qlat
