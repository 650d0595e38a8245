#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlat/boundary.hpp"

namespace qlat {

/// Main term mu(S) (2 pi)^(1+b/2) n^(b/2) / (sqrt|D| Gamma(1+b/2)) prod_{p} mu_p(gamma, n, V).
struct Prediction {
    BigFloat value;
    bool representable = false;
    std::string note;  // why the value is 0, when it is
    BigFloat archimedean;
    std::optional<SingularSeries> series;
    unsigned long prime_bound = 0;
    std::string error_order;
};

/// n <= 0 is an InvalidInput error; n off the support of gamma or not locally represented gives 0 with a note.
Prediction predict_N(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const BigFloat& mu_s,
                     unsigned long prime_bound);
/// Same, reusing an engine for gamma.
Prediction predict_N(DensityEngine& engine, const Rational& n, const BigFloat& mu_s, unsigned long prime_bound);

/// A designated cusp with its boundary degree deg(rho^* Delta_F).
struct BoundaryTerm {
    const BoundarySeries* series = nullptr;
    Integer degree;
};

struct DegreePrediction {
    Prediction main;
    std::vector<BoundaryCoefficient> u;
    BigFloat total;
};

/// main term + sum_F u(gamma, n, F) deg_F, every u built from the same truncated singular series as the main term.
DegreePrediction degree_prediction(const FiniteQuadraticModule& d, const Element& gamma, const Rational& n, const BigFloat& mu_s,
                                   const std::vector<BoundaryTerm>& boundary, unsigned long prime_bound);

/// Primitive sublattice P of the K3 lattice together with V = P-perp and the gluing between their discriminants.
struct K3Setup {
    IntMatrix p_rows;  // basis of P in K3 coordinates
    IntegerLattice p;
    IntMatrix v_rows;
    IntegerLattice v;
    FiniteQuadraticModule dp;
    FiniteQuadraticModule dv;
    /// to_v[i] = index in D(V) of the image of element i of D(P); Q_V(to_v(x)) = -Q_P(x).
    std::vector<std::size_t> to_v;
};

/// Embedding of rank1(2d) as e + d f in the first hyperbolic plane.
IntMatrix k3_rank_one_embedding(long d);
/// Checks rank <= 4, signature (1, rho - 1), anisotropy and primitivity.
K3Setup k3_setup(const IntMatrix& p_rows);

enum class Representability { Yes, No, LocalOnly };

/// Is Q_P(t) = n for some t in gamma + P. Exact for rank 1 and 2, local solvability for larger rank.
Representability represents_on_coset(const FiniteQuadraticModule& dp, const Element& gamma, const Rational& n);

struct K3Report {
    Prediction prediction;
    Rational exponent;  // 10 - rho/2
    Representability parabolic = Representability::No;
    std::size_t gamma_v = 0;
};

K3Report k3_predict(const K3Setup& s, const Element& gamma_p, const Rational& n, const BigFloat& mu_s, unsigned long prime_bound);

struct CensusTerm {
    std::size_t gamma = 0;
    Rational s;
    BigFloat value;
};

struct CensusReport {
    BigFloat total;
    std::vector<CensusTerm> terms;
    bool heuristic = false;
};

/// Sum of main terms over gamma in D(P) and admissible 0 < s <= n_max with 2s represented on gamma + P.
/// Throws HypothesisViolated if D(P) has a nontrivial isotropic subgroup.
CensusReport elliptic_census_prediction(const K3Setup& s, const Rational& n_max, const BigFloat& mu_s, unsigned long prime_bound);

} // namespace qlat
