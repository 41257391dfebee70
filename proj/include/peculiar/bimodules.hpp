#pragma once

#include "peculiar/complexes.hpp"
#include "peculiar/curves.hpp"

// The three explicit type AD bimodules: the half-twist bimodule D(tau),
// the half-identity bimodules, and the conjugation bimodule. Each ships as
// a transcription table and is validated against the AD structure
// relations at load time.

namespace pq {

// Half-twist along the given arc (1..4 for a..d). The reference arc is c
// (arc 3), the A side over A∂_43 and the D side over A∂_34; other arcs are
// cyclic relabellings. Pairing convention: for a type D structure M over
// the A side, first swap the two Alexander slots of the twisted ends
// (aconv of the bimodule), then box.
const ADBimodule& dehn_twist(int arc = 3);

// Identity type AD bimodule of A∂_ij; acts as the identity on type D
// structures over A∂_ij.
const ADBimodule& half_identity(int i = 3, int j = 1);

// The 32-generator A∂_31-A∂_13 conjugation bimodule; inputs are rr-twisted
// (aconv negated) and outputs carry two extra stabilizations.
const ADBimodule& conjugation_bimodule();

// rr34(F_43(pi(curve))) ⊠ D(tau_arc), reduced: the bimodule route of the
// half-twist action on curves.
CurvedComplex dehn_twist_route(const Loop& curve, int arc);

// The corresponding grading-slot pre-swap for dehn_twist(arc).
CurvedComplex dehn_pre_op(const CurvedComplex& m, int arc);

}  // namespace pq
