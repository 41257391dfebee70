#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "peculiar/algebra.hpp"
#include "peculiar/f2.hpp"

// Curved type D structures over the peculiar algebra and its relatives,
// type AD bimodules, box tensor products, morphism complexes and the
// extension search over A⁻.
//
// A differential entry src -> dst carries a basis label and an F2 matrix
// of shape dst.dim x src.dim. Labels satisfy left(label) = idem(dst),
// right(label) = idem(src), delta(dst) - delta(src) + delta(label) = 1
// and A(dst) - A(src) + A(label) = 0 in Z^4 modulo the diagonal.

namespace pq {

struct Generator {
    std::string id;
    int idem = 1;       // site index 1..4
    int delta2 = 0;     // twice the δ-grading
    AlexVec alex;       // generalized Alexander grading (doubled entries)
    int dim = 1;        // local system fibre dimension

    bool operator<(const Generator& o) const { return id < o.id; }
};

// Key for one labelled arrow between two generators.
struct EntryKey {
    std::string src, dst;
    MinusBasis label;

    auto tie() const { return std::tuple(src, dst, label); }
    bool operator<(const EntryKey& o) const { return tie() < o.tie(); }
    bool operator==(const EntryKey& o) const { return tie() == o.tie(); }
};

class CurvedComplex {
public:
    CurvedComplex() = default;
    CurvedComplex(Algebra alg, std::optional<Matching> matching = {})
        : alg_(alg), matching_(std::move(matching)) {}

    const Algebra& algebra() const { return alg_; }
    const std::optional<Matching>& matching() const { return matching_; }
    AlgebraElement curvature() const { return curvature_element(alg_, matching_); }

    void add_generator(Generator g);
    const Generator& generator(const std::string& id) const;
    bool has_generator(const std::string& id) const;
    const std::vector<Generator>& generators() const { return gens_; }
    int total_dim() const;

    // Adds the matrix to the entry (F2 accumulation); removes the entry
    // when it becomes zero. Checks idempotents and grading coherence.
    void add_entry(const std::string& src, const std::string& dst,
                   const MinusBasis& label, const F2Matrix& coeff);
    void add_entry(const std::string& src, const std::string& dst,
                   const MinusBasis& label);  // 1x1 identity coefficient
    const std::map<EntryKey, F2Matrix>& entries() const { return entries_; }

    // Entries leaving src / arriving at dst.
    std::vector<const std::pair<const EntryKey, F2Matrix>*> out_entries(
        const std::string& src) const;
    std::vector<const std::pair<const EntryKey, F2Matrix>*> in_entries(
        const std::string& dst) const;

    bool is_reduced() const;  // no idempotent-labelled entries

    // Replaces every generator of dim > 1 by dim scalar generators.
    CurvedComplex flattened() const;

    // Copies all entries of `other` verbatim, skipping grading validation.
    // Used by the grading transforms rr and rr34, whose outputs deliberately
    // break the coherence rule relative to this algebra.
    void copy_entries_unchecked(const CurvedComplex& other);

    void rename_generators(const std::string& prefix);
    bool isomorphic_graded(const CurvedComplex& other) const;

    std::string to_text() const;
    static CurvedComplex from_text(const std::string& text);

private:
    Algebra alg_;
    std::optional<Matching> matching_;
    std::vector<Generator> gens_;                // sorted by id
    std::map<std::string, size_t> index_;
    std::map<EntryKey, F2Matrix> entries_;
};

struct D2Violation {
    std::string src, dst;
    MinusBasis term;
    std::string message;
};

// Verifies (1 ⊗ μ)(∂ ⊗ 1)∂ = 1 ⊗ curvature; returns the first violation.
std::optional<D2Violation> check_d2(const CurvedComplex& m);

// Grading-only transforms.
CurvedComplex rr(const CurvedComplex& m);    // negate all Alexander gradings
CurvedComplex rr34(const CurvedComplex& m);  // swap Alexander entries 3 and 4

// Stabilization by V_t: doubles every generator, shifting the Alexander
// grading by ±1 at the given tangle end (the two copies sit in consecutive
// gradings t^{+1}, t^{-1} of the colour at that end).
CurvedComplex tensor_V(const CurvedComplex& m, int end);

// Quotient functor F_ij: kill differential terms containing p_i or q_j.
CurvedComplex apply_quotient(const CurvedComplex& m, int i, int j);

// Pushforward along an algebra relabelling.
CurvedComplex relabel_complex(const CurvedComplex& m, const Relabel& r);

// ----------------------------------------------------------------- bimodules

struct ADGenerator {
    std::string id;
    int a_idem = 1;
    int d_idem = 1;
    int delta2 = 0;
    AlexVec alex;
};

struct ADActionKey {
    std::string src;
    std::vector<PathBasis> inputs;  // consumed first-to-last; empty = δ1

    auto tie() const { return std::tuple(src, inputs); }
    bool operator<(const ADActionKey& o) const;
};

struct ADOutput {
    std::string dst;
    MinusBasis out;  // D-side label (possibly an idempotent)

    auto tie() const { return std::tuple(dst, out); }
    bool operator<(const ADOutput& o) const { return tie() < o.tie(); }
    bool operator==(const ADOutput& o) const { return tie() == o.tie(); }
};

// How the A-side generalized Alexander grading of a bimodule is twisted
// relative to the standard one. The Dehn twist bimodule swaps entries 3,4
// (inputs must come from an rr34-twisted module); the conjugation bimodule
// negates (inputs come from an rr-twisted module).
enum class ASideAlex : uint8_t { Standard, Negated, Swap12, Swap23, Swap34, Swap14 };

// Applies the convention's twist to an A-side grading vector.
AlexVec aside_twist(ASideAlex conv, const AlexVec& v);
std::string aside_name(ASideAlex conv);
ASideAlex aside_parse(const std::string& s);

// Strictly unital type AD bimodule with finitely supported actions.
class ADBimodule {
public:
    ADBimodule() = default;
    ADBimodule(std::string name, Algebra a_side, Algebra d_side,
               ASideAlex conv = ASideAlex::Standard)
        : name_(std::move(name)), a_(a_side), d_(d_side), conv_(conv) {}

    const std::string& name() const { return name_; }
    const Algebra& a_side() const { return a_; }
    const Algebra& d_side() const { return d_; }
    ASideAlex a_alex_convention() const { return conv_; }
    int max_input_len() const { return max_input_len_; }

    void add_generator(ADGenerator g);
    const std::vector<ADGenerator>& generators() const { return gens_; }
    const ADGenerator& generator(const std::string& id) const;

    void add_action(const std::string& src, std::vector<PathBasis> inputs,
                    const std::string& dst, const MinusBasis& out);
    const std::map<ADActionKey, std::set<ADOutput>>& actions() const {
        return actions_;
    }
    // Action on a single input sequence applied to src; empty set if none.
    const std::set<ADOutput>* action(const std::string& src,
                                     const std::vector<PathBasis>& inputs) const;

    // Checks the AD structure relations for all input sequences up to
    // max_input_len + 1 over the A-side basis. Returns a description of
    // the first failure, or nullopt.
    std::optional<std::string> check_relations() const;

    std::string to_text() const;
    static ADBimodule from_text(const std::string& text);

private:
    std::string name_;
    Algebra a_, d_;
    ASideAlex conv_ = ASideAlex::Standard;
    std::vector<ADGenerator> gens_;
    std::map<std::string, size_t> index_;
    std::map<ADActionKey, std::set<ADOutput>> actions_;
    int max_input_len_ = 0;
};

// M ⊠ B for M a type D structure over the A side of B. Generator names are
// "<module gen>|<bimodule gen>".
CurvedComplex box_tensor(const CurvedComplex& m, const ADBimodule& b);

// ------------------------------------------------------------ Mor complexes

struct GradedRanks {
    // (delta2, canonical AlexVec) -> F2 rank
    std::map<std::pair<int, AlexVec>, int> ranks;
    int total() const;
    // Collapse to δ-only ranks.
    std::map<int, int> delta_ranks() const;
    std::string to_string() const;
};

// Homology of Mor((M,∂),(N,∂')) with D(f) = ∂'∘f + f∘∂, computed per
// bigrading by Gaussian elimination. Both complexes must share algebra and
// curvature. Alexander part is tracked relative to the generalized grading.
GradedRanks mor_homology(const CurvedComplex& m, const CurvedComplex& n);

// ------------------------------------------------------ extension over A⁻

struct ExtensionResult {
    bool ok = false;
    CurvedComplex extension;          // valid when ok
    std::string certificate;          // unresolvable ∂² term otherwise
};

// Searches for arrows with labels in ker(A⁻ -> A∂) (positive U-degree)
// extending m (over the full algebra) to a curved complex over A⁻ with
// curvature p^4+q^4+U_{i1}U_{o1}+U_{i2}U_{o2}. Degree-by-degree linear
// solve in total U-degree, lexicographically least solution.
ExtensionResult extend_over_minus(const CurvedComplex& m, const Matching& p,
                                  int u_bound);

}  // namespace pq
