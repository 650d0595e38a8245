#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlat/lattice.hpp"

namespace qlat {

/// Residues with respect to the invariant factors.
using Element = std::vector<std::int64_t>;

/// The discriminant group L^/L with its Q/Z-valued forms.
class FiniteQuadraticModule {
  public:
    explicit FiniteQuadraticModule(IntegerLattice lattice);

    const IntegerLattice& lattice() const { return lattice_; }
    /// Nontrivial invariant factors d_1 | d_2 | ..., each > 1.
    const std::vector<std::int64_t>& invariant_factors() const { return factors_; }
    const std::vector<RationalVector>& generator_lifts() const { return lifts_; }
    std::size_t order() const { return order_; }
    std::int64_t level() const { return level_; }

    /// Mixed-radix index, first residue most significant (lexicographic order).
    std::size_t index(const Element& x) const;
    Element element(std::size_t index) const;
    const std::vector<Element>& elements() const { return elements_; }

    Element add(const Element& x, const Element& y) const;
    Element neg(const Element& x) const;
    Element scale(const Element& x, std::int64_t k) const;
    Element zero() const { return Element(factors_.size(), 0); }

    RationalVector lift(const Element& x) const;
    /// Class of v in L^ (given in lattice coordinates); throws if v is not in L^.
    Element class_of(const RationalVector& v) const;

    /// Q(x) reduced to [0,1).
    Rational q_value(const Element& x) const;
    Rational q_value(std::size_t index) const { return q_table_[index]; }
    /// b(x,y) reduced to [0,1).
    Rational b_value(const Element& x, const Element& y) const;
    Rational b_value(std::size_t i, std::size_t j) const;

    void check_element(const Element& x) const;
    std::string dump() const;

  private:
    IntegerLattice lattice_;
    IntMatrix snf_u_;
    std::vector<std::int64_t> factors_;
    std::vector<std::size_t> factor_rows_;
    std::vector<RationalVector> lifts_;
    std::vector<Rational> gen_q_;
    std::vector<std::vector<Rational>> gen_b_;
    std::size_t order_ = 1;
    std::int64_t level_ = 1;
    std::vector<Element> elements_;
    std::vector<Rational> q_table_;
};

/// A subgroup as the sorted list of element indices.
struct Subgroup {
    std::vector<std::size_t> members;
    bool maximal = false;
    bool contains(std::size_t i) const;
    std::size_t size() const { return members.size(); }
};

Subgroup make_subgroup(const FiniteQuadraticModule& d, const std::vector<Element>& generators);
bool is_isotropic(const FiniteQuadraticModule& d, const Subgroup& h);
/// Every isotropic subgroup, ordered by size then members; maximal ones flagged.
std::vector<Subgroup> isotropic_subgroups(const FiniteQuadraticModule& d, std::size_t guard = 10000);
Subgroup orthogonal_subgroup(const FiniteQuadraticModule& d, const Subgroup& h);

/// The overlattice attached to an isotropic subgroup together with the projection of H-perp onto its discriminant group.
struct Gluing {
    IntegerLattice overlattice;
    /// Rows: overlattice basis in coordinates of the original lattice.
    RatMatrix basis;
    FiniteQuadraticModule quotient;
    /// projection[i] = index in the quotient of element i of the original module, or -1 outside H-perp.
    std::vector<long> projection;
};

Gluing glue(const FiniteQuadraticModule& d, const Subgroup& h);
IntegerLattice overlattice(const FiniteQuadraticModule& d, const Subgroup& h);
FiniteQuadraticModule quotient_module(const FiniteQuadraticModule& d, const Subgroup& h);

} // namespace qlat
