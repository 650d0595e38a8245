#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qlat/fqm.hpp"

namespace qlat {

using Complex = std::complex<double>;

struct ComplexMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    static ComplexMatrix identity(std::size_t n);

    Complex& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    ComplexMatrix adjoint() const;
    ComplexMatrix conj() const;
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
};

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);
/// Rows of "re,im" pairs separated by spaces.
std::string dump(const ComplexMatrix& m);

/// e^{2 pi i x} for rational x, reduced mod 1 before conversion.
Complex unit_root(const Rational& x);

/// The Weil representation on C[D] in the element order of D.
class WeilAction {
  public:
    /// Guards |D| <= 2048 (dense matrices).
    WeilAction(const FiniteQuadraticModule& d, Signature sig);
    explicit WeilAction(const FiniteQuadraticModule& d);

    const ComplexMatrix& T() const { return t_; }
    const ComplexMatrix& S() const { return s_; }
    const Signature& signature() const { return sig_; }
    std::int64_t level() const { return level_; }
    /// Entrywise conjugate matrices.
    WeilAction dual() const;

  private:
    WeilAction() = default;
    ComplexMatrix t_, s_;
    Signature sig_;
    std::int64_t level_ = 1;
};

struct RelationReport {
    double unitarity = 0;   // |S S^* - I|
    double braid = 0;       // |S^2 - (ST)^3|
    double t_order = 0;     // |T^N - I|
    double t_unit = 0;      // |(|T_ii|) - 1|
};

/// Throws RelationFailure if any deviation exceeds tol.
RelationReport verify_relations(const WeilAction& w, double tol = 1e-9);

/// p^* : C[K^/K] -> C[D], |D| x |K| 0/1 matrix.
ComplexMatrix pullback_map(const Gluing& g);
/// Same for an arbitrary projection table (entries -1 outside the domain).
ComplexMatrix pullback_map(const std::vector<long>& projection, std::size_t target_order);
/// p_* : C[D] -> C[K^/K], |K| x |D| 0/1 matrix.
ComplexMatrix pushforward_map(const Gluing& g);

/// max over g in {S, T} of |rho_V(g) p^* - p^* rho_K(g)|.
double intertwining_defect(const WeilAction& wv, const WeilAction& wk, const ComplexMatrix& pullback);

} // namespace qlat
