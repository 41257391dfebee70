#pragma once

#include <optional>

#include "peculiar/complexes.hpp"

// Homotopy-type preserving reductions of curved complexes.

namespace pq {

// Cancels an identity component src -> dst (idempotent label, invertible
// matrix, src != dst): removes both generators and adds the zig-zag
// corrections. Throws on precondition violation.
CurvedComplex cancel(const CurvedComplex& m, const EntryKey& e);

// Iterates cancel on the lexicographically least cancellable entry.
CurvedComplex reduce(const CurvedComplex& m);

// Base change by 1 + h for a single-component morphism h: src -> dst of
// degree 0 with h² = 0 and h∂h = 0 (both checked).
CurvedComplex clean_up(const CurvedComplex& m, const std::string& src,
                       const std::string& dst, const MinusBasis& label,
                       const F2Matrix& coeff);

// A reduced complex is in loop form if every generator meets exactly one
// p-labelled and one q-labelled arrow (counting ingoing and outgoing).
bool is_loop_form(const CurvedComplex& m);

// Reduce, then push parallel same-type arrows (longer toward shorter) until
// the complex is in loop form. Throws with a diagnostic dump if the
// iteration cap 10·(generators)² is exceeded.
CurvedComplex to_loop_form(const CurvedComplex& m);

// Splits a complex into connected components.
std::vector<CurvedComplex> decompose(const CurvedComplex& m);

}  // namespace pq
