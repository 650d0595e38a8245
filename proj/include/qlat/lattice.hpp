#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlat/matrix.hpp"

namespace qlat {

struct Signature {
    int positive = 0;
    int negative = 0;
    int rank() const { return positive + negative; }
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Coordinates of a vector of V tensor Q in the lattice basis.
using RationalVector = RatVector;

using HyperbolicSplit = std::pair<std::size_t, std::size_t>;

/// An even nondegenerate integral lattice, given by its Gram matrix in a fixed basis.
class IntegerLattice {
  public:
    /// Validates symmetry, evenness and nondegeneracy; throws Error otherwise.
    explicit IntegerLattice(IntMatrix gram, std::string name = {},
                            std::optional<HyperbolicSplit> split = std::nullopt);

    const IntMatrix& gram() const { return gram_; }
    std::size_t rank() const { return gram_.rows(); }
    const std::string& name() const { return name_; }
    const std::optional<HyperbolicSplit>& hyperbolic_split() const { return split_; }
    const Integer& determinant() const { return det_; }
    Integer abs_determinant() const { return abs(det_); }

    Rational pair(const RationalVector& x, const RationalVector& y) const { return bilinear(gram_, x, y); }
    /// Q(x) = (x.x)/2
    Rational q(const RationalVector& x) const { return pair(x, x) / 2; }

    IntegerLattice renamed(std::string name) const;

  private:
    IntMatrix gram_;
    std::string name_;
    std::optional<HyperbolicSplit> split_;
    Integer det_;
};

IntegerLattice hyperbolic_plane();
IntegerLattice rank_one(long two_m);
IntegerLattice e8(bool negative);
IntegerLattice k3_lattice();

/// Named constructors: U, rank1 [2m], E8, E8(-1), K3. Other names throw.
IntegerLattice make_named(const std::string& name, const std::vector<long>& params = {});
/// Block diagonal sum, blocks in argument order. Keeps the first hyperbolic split found.
IntegerLattice direct_sum(const std::vector<IntegerLattice>& parts);
/// Multiplies the Gram matrix by m; the result must again be even.
IntegerLattice rescale(const IntegerLattice& lattice, long m);

/// Expressions such as "U+U+rank1(-2)", "E8(-1)", "K3", "U(2)+A" where "X(m)" rescales X.
IntegerLattice parse_lattice_expression(const std::string& expr);

/// Exact orthogonal basis of V tensor Q (rows), with the pairings (b_i.b_i) on the diagonal.
struct OrthogonalBasis {
    RatMatrix basis;
    std::vector<Rational> norms;
};
OrthogonalBasis orthogonal_basis(const IntMatrix& gram);

Signature signature(const IntegerLattice& lattice);

/// Integral basis (rows, in coordinates of `lattice`) of the orthogonal complement of the rows of `sub`.
IntMatrix orthogonal_complement_basis(const IntegerLattice& lattice, const IntMatrix& sub);
IntegerLattice orthogonal_complement(const IntegerLattice& lattice, const IntMatrix& sub);

/// Gram matrix of the sublattice spanned by the rows of `basis`.
IntMatrix induced_gram(const IntegerLattice& lattice, const IntMatrix& basis);

/// Hilbert symbol (a,b)_p for nonzero integers; p = 0 denotes the real place.
int hilbert_symbol(const Integer& a, const Integer& b, unsigned long p);
/// Hasse-Minkowski test, rank <= 4.
bool is_anisotropic_over_Q(const IntegerLattice& lattice);

/// Lattice file: {"name": str?, "gram": [[int]], "hyperbolic_split": {"rows": [i, j]}?}
IntegerLattice lattice_from_json(const std::string& text);
std::string lattice_to_json(const IntegerLattice& lattice);
/// Reads a file if one exists at `spec`, else parses a lattice expression.
IntegerLattice load_lattice(const std::string& spec);

} // namespace qlat
