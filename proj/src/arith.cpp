#include "qlat/arith.hpp"

#include <algorithm>
#include <cctype>

namespace qlat {

std::string kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::NotPrimitive: return "not_primitive";
    case ErrorKind::NotIsotropic: return "not_isotropic";
    case ErrorKind::NotInSupport: return "not_in_support";
    case ErrorKind::GuardExceeded: return "guard_exceeded";
    case ErrorKind::NoStabilization: return "no_stabilization";
    case ErrorKind::RelationFailure: return "relation_failure";
    case ErrorKind::HypothesisViolated: return "hypothesis_violated";
    case ErrorKind::Truncation: return "truncation";
    }
    return "unknown";
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) fail(ErrorKind::InvalidInput, "empty rational");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            Rational r(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
            if (r.get_den() == 0) fail(ErrorKind::InvalidInput, "zero denominator in '" + text + "'");
            r.canonicalize();
            return r;
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string whole = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            bool neg = !whole.empty() && whole[0] == '-';
            if (neg || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
            if (whole.empty()) whole = "0";
            if (frac.empty()) frac = "0";
            Integer num(whole + frac);
            Integer den = ipow(Integer(10), frac.size());
            Rational r(num, den);
            r.canonicalize();
            return neg ? Rational(-r) : r;
        }
        return Rational(Integer(s));
    } catch (const std::invalid_argument&) {
        fail(ErrorKind::InvalidInput, "cannot parse rational '" + text + "'");
    }
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    if (bound < 2) return out;
    std::vector<bool> sieve(bound + 1, true);
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= bound; j += i) sieve[j] = false;
    }
    return out;
}

std::vector<std::uint64_t> prime_factors(Integer n) {
    std::vector<std::uint64_t> out;
    n = abs(n);
    if (n == 0) fail(ErrorKind::InvalidInput, "prime_factors of zero");
    for (unsigned long d = 2; Integer(d) * d <= n; ++d) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            out.push_back(d);
            while (mpz_divisible_ui_p(n.get_mpz_t(), d)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
        }
    }
    if (n > 1) {
        if (!n.fits_ulong_p()) fail(ErrorKind::GuardExceeded, "prime factor too large");
        out.push_back(n.get_ui());
    }
    return out;
}

} // namespace qlat
