#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// The peculiar algebra A∂ of the 4-punctured sphere, its quotients
// A∂_ij = A∂/(p_i = 0 = q_j) and the generalised algebra A⁻ in which
// p_i q_i = U_i ι_{i-1} and q_i p_i = U_i ι_i. Sites a,b,c,d correspond
// to the idempotents ι_1..ι_4; p_i has left idempotent ι_{i-1} and right
// idempotent ι_i, q_i the reverse. Products are written left to right as
// in p_1 p_2 = p_12; p-paths ascend mod 4, q-paths descend.

namespace pq {

// Indices 1..4 throughout, arithmetic mod 4 with offset 1.
inline int mod4(int i) { return ((i - 1) % 4 + 4) % 4 + 1; }

inline char site_char(int idem) { return static_cast<char>('a' + idem - 1); }
int site_index(char c);  // 'a'..'d' -> 1..4

// Element of Z^4, compared modulo the diagonal (and, where a matching is
// in play, modulo the pair relations e_i + e_o of that matching; rational
// curves of a given slope are only gradeable in that quotient). Entries are
// stored doubled so that half-integer gradings stay integral, and raw: the
// stored representative is printed verbatim. canonical() reduces mod the
// diagonal so the minimum entry is 0.
class AlexVec {
public:
    AlexVec() : v_{0, 0, 0, 0} {}
    explicit AlexVec(std::array<int, 4> doubled) : v_(doubled) {}
    static AlexVec unit(int i) {  // grading of p_i and q_i
        std::array<int, 4> v{0, 0, 0, 0};
        v[i - 1] = 2;
        return AlexVec(v);
    }

    const std::array<int, 4>& doubled() const { return v_; }
    AlexVec operator+(const AlexVec& o) const;
    AlexVec operator-(const AlexVec& o) const;
    AlexVec negated() const;
    AlexVec permuted(const std::array<int, 4>& perm) const;  // perm[i-1] = image of i
    AlexVec swapped34() const;
    bool operator==(const AlexVec& o) const { return v_ == o.v_; }  // raw equality
    bool operator!=(const AlexVec& o) const { return v_ != o.v_; }
    bool operator<(const AlexVec& o) const { return v_ < o.v_; }

    AlexVec canonical() const;          // reduce mod diagonal, min entry 0
    bool equiv(const AlexVec& o) const {  // equality mod diagonal
        return canonical() == o.canonical();
    }
    bool is_diagonal() const;

    std::string to_string() const;  // "[a,b,c,d]" with halves as k/2
    static AlexVec parse(const std::string& s);

private:
    std::array<int, 4> v_;
};

// Basis path of the quiver: an idempotent or a run of p- or q-letters.
struct PathBasis {
    enum class Kind : uint8_t { Idem, P, Q };
    Kind kind = Kind::Idem;
    uint8_t start = 1;  // first letter index (or the idempotent index)
    uint16_t len = 0;   // number of letters; 0 for idempotents

    static PathBasis idem(int i) { return {Kind::Idem, static_cast<uint8_t>(i), 0}; }
    static PathBasis p(int start, int len = 1) {
        return {Kind::P, static_cast<uint8_t>(start), static_cast<uint16_t>(len)};
    }
    static PathBasis q(int start, int len = 1) {
        return {Kind::Q, static_cast<uint8_t>(start), static_cast<uint16_t>(len)};
    }

    bool is_idem() const { return kind == Kind::Idem; }
    int left_idem() const;   // ι index acting as identity on the left
    int right_idem() const;
    int letter(int k) const;  // index of the k-th letter (0-based, product order)
    bool contains_letter(Kind k, int index) const;
    int delta2() const { return len; }  // twice the δ-grading
    AlexVec alex() const;

    auto tie() const { return std::tuple(kind, start, len); }
    bool operator==(const PathBasis& o) const { return tie() == o.tie(); }
    bool operator<(const PathBasis& o) const { return tie() < o.tie(); }

    std::string to_string() const;  // "i3", "p12", "q32"
};

// Basis element of A⁻: a path times a U-monomial. Elements of A∂ and its
// quotients use u = 0.
struct MinusBasis {
    PathBasis path;
    std::array<uint8_t, 4> u{0, 0, 0, 0};

    MinusBasis() = default;
    MinusBasis(PathBasis pb) : path(pb) {}
    MinusBasis(PathBasis pb, std::array<uint8_t, 4> uu) : path(pb), u(uu) {}

    int u_total() const { return u[0] + u[1] + u[2] + u[3]; }
    int delta2() const { return path.delta2() + 2 * u_total(); }
    AlexVec alex() const;
    int left_idem() const { return path.left_idem(); }
    int right_idem() const { return path.right_idem(); }

    auto tie() const { return std::tuple(path.kind, path.start, path.len, u); }
    bool operator==(const MinusBasis& o) const { return tie() == o.tie(); }
    bool operator<(const MinusBasis& o) const { return tie() < o.tie(); }

    std::string to_string() const;  // "U2^3*p1"
};

enum class AlgebraTag : uint8_t { Full, Quotient, Minus };

struct Algebra {
    AlgebraTag tag = AlgebraTag::Full;
    int qi = 0, qj = 0;  // killed letters p_qi, q_qj for Quotient

    static Algebra full() { return {AlgebraTag::Full, 0, 0}; }
    static Algebra quotient(int i, int j) { return {AlgebraTag::Quotient, i, j}; }
    static Algebra minus() { return {AlgebraTag::Minus, 0, 0}; }

    bool operator==(const Algebra& o) const {
        return tag == o.tag && qi == o.qi && qj == o.qj;
    }
    bool operator!=(const Algebra& o) const { return !(*this == o); }
    // A basis path survives this algebra's relations.
    bool admits(const MinusBasis& b) const;
    std::string to_string() const;  // "full", "quotient31", "minus"
    static Algebra parse(const std::string& s);

    // All admissible basis paths (u = 0 part); finite for quotients,
    // length-capped by max_len otherwise.
    std::vector<PathBasis> path_basis(int max_len) const;
};

// F2-linear combination of basis elements, tagged with its algebra.
class AlgebraElement {
public:
    AlgebraElement() = default;
    explicit AlgebraElement(Algebra alg) : alg_(alg) {}
    AlgebraElement(Algebra alg, MinusBasis b) : alg_(alg) { add_term(b); }

    static AlgebraElement zero(Algebra alg) { return AlgebraElement(alg); }
    static AlgebraElement unit(Algebra alg);  // sum of the four idempotents

    const Algebra& algebra() const { return alg_; }
    const std::vector<MinusBasis>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const MinusBasis& b);  // F2 addition (toggles)

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator*(const AlgebraElement& o) const;
    bool operator==(const AlgebraElement& o) const {
        return alg_ == o.alg_ && terms_ == o.terms_;
    }
    bool operator!=(const AlgebraElement& o) const { return !(*this == o); }

    // Gradings of a homogeneous element; nullopt for 0 or mixed gradings.
    std::optional<int> delta2() const;
    std::optional<AlexVec> alex() const;

    std::string to_string() const;
    static AlgebraElement parse(Algebra alg, const std::string& s);

private:
    Algebra alg_;
    std::vector<MinusBasis> terms_;  // sorted, no duplicates
};

// Product of basis elements in A⁻ (or A∂ when both u-parts vanish and the
// result is truncated). Returns nullopt for zero.
std::optional<MinusBasis> multiply_basis(const MinusBasis& x, const MinusBasis& y,
                                         const Algebra& alg);

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y);

struct Matching {
    // pairs[k] = {in, out} of the colour t_{k+1}; ordered.
    std::array<std::array<int, 2>, 2> pairs;
    std::array<std::string, 2> colors{"t1", "t2"};

    static Matching of(int i1, int o1, int i2, int o2,
                       std::string c1 = "t1", std::string c2 = "t2");
    bool valid() const;
    // Colored Alexander grading of a generalized grading vector (doubled).
    std::array<int, 2> colored(const AlexVec& a) const;
    std::string to_string() const;  // "14|23"
    static Matching parse(const std::string& s);
};

// Curvature of the given algebra: p^4+q^4 for A∂, 0 for quotients, and
// p^4+q^4+U_{i1}U_{o1}+U_{i2}U_{o2} over A⁻ (matching required).
AlgebraElement curvature_element(const Algebra& alg,
                                 const std::optional<Matching>& matching = {});

// Whether diff lies in the subgroup generated by the diagonal and, when a
// matching is given, the pair relations e_i + e_o. Gradings of complexes
// are compared modulo this subgroup.
bool alex_congruent_zero(const AlexVec& diff, const std::optional<Matching>& m);

// Deterministic representative of the class of v modulo that subgroup;
// usable as a map key.
AlexVec alex_key(const AlexVec& v, const std::optional<Matching>& m);

// Algebra endomorphisms induced by permutations of the punctures.
struct Relabel {
    // p_i -> letter(kind flip?, index) etc.; represented by the index
    // permutation and whether p and q letters swap.
    std::array<int, 4> letter_perm{1, 2, 3, 4};  // i -> letter_perm[i-1]
    std::array<int, 4> idem_perm{1, 2, 3, 4};
    bool swap_pq = false;

    static Relabel cyclic(int k);
    static Relabel mut_x();
    static Relabel mut_y();
    static Relabel mut_z();
    static Relabel mirror();  // p_i <-> q_{5-i}

    PathBasis apply(const PathBasis& b) const;
    MinusBasis apply(const MinusBasis& b) const;
    AlgebraElement apply(const AlgebraElement& e) const;
    Algebra apply(const Algebra& a) const;  // transports quotient labels
    Relabel compose(const Relabel& inner) const;
};

}  // namespace pq
