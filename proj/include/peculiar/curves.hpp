#pragma once

#include <optional>
#include <string>
#include <vector>

#include "peculiar/complexes.hpp"

// Combinatorial immersed curves with local systems on the 4-punctured
// sphere, their planar lifts, the functor Π to curved complexes, and the
// mapping class group / mutation / mirror actions.
//
// Lift conventions: punctures sit at lattice points of classes
// 3:(even,even), 2:(odd,even), 4:(even,odd), 1:(odd,odd). Arc lifts are
// the unit grid segments: a vertical at odd x, c vertical at even x,
// b horizontal at even y, d horizontal at odd y. A unit square
// [k,k+1]x[l,l+1] lies on the front face (p-labels) iff k+l is even.

namespace pq {

struct Slope {
    int p = 0, q = 1;  // reduced; q >= 0, and (p,q) = (1,0) for the vertical

    static Slope of(int p, int q);
    std::array<int, 2> direction() const { return {q, p}; }  // (dx, dy)
    bool operator==(const Slope& o) const { return p == o.p && q == o.q; }
    bool operator<(const Slope& o) const { return std::tuple(p, q) < std::tuple(o.p, o.q); }
    std::string to_string() const { return std::to_string(p) + "/" + std::to_string(q); }
    static Slope parse(const std::string& s);
};

// One intersection point of the curve with a parametrizing arc, together
// with the face of the segment leaving it toward the next position.
struct LoopStep {
    int site = 1;       // 1..4 for a,b,c,d
    bool front = true;  // face of the outgoing segment
    int delta2 = 0;     // gradings of the generator at this position
    AlexVec alex;
};

class Loop {
public:
    Loop() = default;
    // Builds a loop from sites and outgoing faces at position 0 onward,
    // anchor gradings (delta2, alex) at position 0, propagated around the
    // word; throws if the word is invalid or ungradeable (a matching can
    // make more words gradeable).
    Loop(std::vector<std::pair<int, bool>> word, F2Matrix local_system,
         int sys_segment, int anchor_delta2, AlexVec anchor_alex,
         std::optional<Matching> matching = {});

    int length() const { return static_cast<int>(steps_.size()); }
    const std::vector<LoopStep>& steps() const { return steps_; }
    const F2Matrix& local_system() const { return local_system_; }
    int sys_segment() const { return sys_segment_; }
    const std::optional<Matching>& matching() const { return matching_; }
    int dim() const { return local_system_.rows(); }

    // Forward label of segment k (position k -> k+1) and its reverse.
    PathBasis out_label(int k) const;
    PathBasis in_label(int k) const;  // position k+1 -> k

    // Minimal rotation over both orientations with the local system in
    // rational canonical form.
    Loop canonical() const;
    Loop rotated(int k) const;
    Loop reversed() const;
    Loop with_shift(int delta2_shift, const AlexVec& alex_shift) const;

    bool same_curve(const Loop& o) const;   // ungraded equality
    bool same_graded(const Loop& o) const;  // including gradings

    std::string to_text() const;
    static Loop parse(const std::string& text);

private:
    std::vector<LoopStep> steps_;
    F2Matrix local_system_;
    int sys_segment_ = 0;
    std::optional<Matching> matching_;
};

struct Multicurve {
    std::vector<Loop> loops;

    // Splits local systems into companion blocks of the invariant factors
    // and sorts components canonically.
    Multicurve canonical() const;
    bool same_graded(const Multicurve& o) const;
    std::string to_text() const;
    static Multicurve parse(const std::string& text);
};

// ------------------------------------------------------------ constructors

// Embedded curve lifting to a straight line of slope s, with local system.
Loop rational_curve(Slope s, const F2Matrix& x = F2Matrix::identity(1));

// Immersed curve lifting to a push-off of the slope-s line through the
// punctures (i1, i2), crossing every (2n)-th interval. The pair must lie on
// a line of slope s in the lattice parity scheme.
Loop irrational_curve(int n, Slope s, std::array<int, 2> pair);

// ---------------------------------------------------------------- functor Π

// Generators are named <prefix><site><position>.
CurvedComplex pi(const Loop& l, const std::string& prefix = "");
CurvedComplex pi(const Multicurve& m);

// --------------------------------------------------------------------- lift

struct LiftCrossing {
    bool vertical;  // on a vertical grid line
    int line;       // its coordinate
    int offset;     // segment of the line: (offset, offset+1)
};

struct LiftWalk {
    std::vector<LiftCrossing> crossings;
    std::array<int, 2> displacement{0, 0};  // per period
};

LiftWalk lift(const Loop& l);

enum class CurveKind { Rational, Irrational, Other };

struct Classification {
    CurveKind kind = CurveKind::Other;
    Slope slope;
    int n = 0;                       // irrational only
    std::array<int, 2> pair{0, 0};   // irrational only
    F2Matrix local_system;           // rational canonical form
    int delta2_shift = 0;            // grading shift against the reference
    AlexVec alex_shift;
    std::string to_string() const;
};

Classification classify(const Loop& l);

// ------------------------------------------------------------------ actions

// Generators of the mapping class group action: tau1 is the half-twist
// along arc b (swapping punctures 2,3; lift (x,y) -> (x+y+1, y)), tau2
// along arc c (swapping 3,4; lift (x,y) -> (x, x+y+1)).
struct TwistGen {
    int which = 2;       // 1 or 2
    bool inverse = false;
};
std::vector<TwistGen> parse_twist_word(const std::string& word);  // "t2,t1'"

Loop twist(const Loop& l, const TwistGen& g);
Loop twist(const Loop& l, const std::vector<TwistGen>& word);
Multicurve twist(const Multicurve& m, const std::vector<TwistGen>& word);

enum class MutationAxis { X, Y, Z };
Loop mutate(const Loop& l, MutationAxis axis);
Multicurve mutate(const Multicurve& m, MutationAxis axis);
Loop mirror_curve(const Loop& l);
Multicurve mirror_curve(const Multicurve& m);

// -------------------------------------------------------------- recognition

// Reads a loop-form complex back into a multicurve; gradings transported.
Multicurve recognize(const CurvedComplex& m);

// Reference bigradings: slope-0/1 curves carry the gradings of the
// conjugation-symmetry normalization; other slopes are obtained from those
// by twisting. Returns the canonical representative of the class of l with
// absolute gradings installed.
Loop reference_graded(const Classification& c);
Multicurve assign_absolute_gradings(const Multicurve& m);

}  // namespace pq
