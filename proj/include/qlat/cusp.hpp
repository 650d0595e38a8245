#pragma once

#include <cstdint>
#include <vector>

#include "qlat/fqm.hpp"

namespace qlat {

/// Data attached to a primitive totally isotropic plane I of a lattice of signature (2, b).
struct CuspDatum {
    /// Rows span I (Hermite form of the saturated span).
    IntMatrix plane;
    /// I^# / I = H_I as Z/d_1 x Z/d_2 (factors 1 dropped) with generators in V-coordinates.
    std::vector<std::int64_t> sharp_invariants;
    std::vector<RationalVector> sharp_generators;
    Integer imprimitivity;
    bool strongly_primitive = false;
    /// Rows: basis of I-perp, and the transversal of I inside it that carries K_F.
    IntMatrix perp_basis;
    IntMatrix transversal;
    IntegerLattice kf;
    FiniteQuadraticModule kf_module;
    /// H_I and H_I-perp inside V^/V.
    Subgroup sharp_group;
    Subgroup sharp_perp;
    /// projection[i] = index in D(K_F) of element i of D(V), -1 outside H_I-perp.
    std::vector<long> projection;
    /// |D(V)| = |D(K_F)| N_F^2 and |H_I-perp| = |D(V)| / N_F.
    bool brieskorn_holds = false;
};

/// Throws NotIsotropic or NotPrimitive for a bad plane, HypothesisViolated unless V has exactly two positive directions.
CuspDatum cusp_datum(const FiniteQuadraticModule& dv, const IntMatrix& plane);

/// Class in D(K_F) of an element of H_I-perp; throws NotInSupport outside it.
Element project_to_kf(const CuspDatum& f, const FiniteQuadraticModule& dv, const Element& x);

/// Every primitive isotropic plane spanned by isotropic vectors with coefficients in [-bound, bound],
/// deduplicated by the saturated span. Throws GuardExceeded when the box has more than 1e7 points.
std::vector<CuspDatum> find_isotropic_planes(const FiniteQuadraticModule& dv, int bound);

} // namespace qlat
