#include "peculiar/algebra.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace pq {

int site_index(char c) {
    if (c < 'a' || c > 'd') throw std::invalid_argument("bad site letter");
    return c - 'a' + 1;
}

// ---------------------------------------------------------------- AlexVec

AlexVec AlexVec::canonical() const {
    std::array<int, 4> v = v_;
    // The diagonal subgroup is integral, i.e. steps of (2,2,2,2) in doubled
    // units; reduce by the largest even value below the minimum entry.
    int m = *std::min_element(v.begin(), v.end());
    m = m >= 0 ? (m / 2) * 2 : -(((-m) + 1) / 2) * 2;
    for (auto& x : v) x -= m;
    return AlexVec(v);
}

bool AlexVec::is_diagonal() const {
    return v_[0] == v_[1] && v_[1] == v_[2] && v_[2] == v_[3];
}

AlexVec AlexVec::operator+(const AlexVec& o) const {
    std::array<int, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = v_[i] + o.v_[i];
    return AlexVec(v);
}

AlexVec AlexVec::operator-(const AlexVec& o) const {
    std::array<int, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = v_[i] - o.v_[i];
    return AlexVec(v);
}

AlexVec AlexVec::negated() const {
    std::array<int, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = -v_[i];
    return AlexVec(v);
}

AlexVec AlexVec::permuted(const std::array<int, 4>& perm) const {
    std::array<int, 4> v{0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) v[perm[i] - 1] = v_[i];
    return AlexVec(v);
}

AlexVec AlexVec::swapped34() const {
    return AlexVec({v_[0], v_[1], v_[3], v_[2]});
}

static std::string half_string(int doubled) {
    if (doubled % 2 == 0) return std::to_string(doubled / 2);
    return std::to_string(doubled) + "/2";
}

static int parse_half(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return 2 * std::stoi(s);
    if (s.substr(slash + 1) != "2") throw std::invalid_argument("bad half-integer: " + s);
    return std::stoi(s.substr(0, slash));
}

std::string AlexVec::to_string() const {
    std::string out = "[";
    for (int i = 0; i < 4; ++i) {
        if (i) out += ",";
        out += half_string(v_[i]);
    }
    return out + "]";
}

AlexVec AlexVec::parse(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw std::invalid_argument("bad AlexVec: " + s);
    std::array<int, 4> v;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string item;
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(ss, item, ','))
            throw std::invalid_argument("bad AlexVec: " + s);
        v[i] = parse_half(item);
    }
    return AlexVec(v);
}

// --------------------------------------------------------------- PathBasis

int PathBasis::left_idem() const {
    switch (kind) {
        case Kind::Idem: return start;
        case Kind::P: return mod4(start - 1);
        case Kind::Q: return start;
    }
    return 0;
}

int PathBasis::right_idem() const {
    switch (kind) {
        case Kind::Idem: return start;
        case Kind::P: return mod4(start + len - 1);
        case Kind::Q: return mod4(start - len);
    }
    return 0;
}

int PathBasis::letter(int k) const {
    assert(k >= 0 && k < len);
    return kind == Kind::P ? mod4(start + k) : mod4(start - k);
}

bool PathBasis::contains_letter(Kind k, int index) const {
    if (kind != k || len == 0) return false;
    if (len >= 4) return true;
    int d = kind == Kind::P ? mod4(index - start + 1) - 1 : mod4(start - index + 1) - 1;
    return d < len;
}

AlexVec PathBasis::alex() const {
    std::array<int, 4> v{0, 0, 0, 0};
    for (int k = 0; k < len; ++k) v[letter(k) - 1] += 2;
    return AlexVec(v);
}

std::string PathBasis::to_string() const {
    if (kind == Kind::Idem) return std::string("i") + std::to_string(start);
    std::string out(1, kind == Kind::P ? 'p' : 'q');
    for (int k = 0; k < len; ++k) out += std::to_string(letter(k));
    return out;
}

// -------------------------------------------------------------- MinusBasis

AlexVec MinusBasis::alex() const {
    std::array<int, 4> v = path.alex().doubled();
    for (int i = 0; i < 4; ++i) v[i] += 4 * u[i];
    return AlexVec(v);
}

std::string MinusBasis::to_string() const {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (!u[i]) continue;
        if (!out.empty()) out += "*";
        out += "U" + std::to_string(i + 1);
        if (u[i] > 1) out += "^" + std::to_string(static_cast<int>(u[i]));
    }
    if (out.empty()) return path.to_string();
    return out + "*" + path.to_string();
}

// ----------------------------------------------------------------- Algebra

bool Algebra::admits(const MinusBasis& b) const {
    switch (tag) {
        case AlgebraTag::Minus: return true;
        case AlgebraTag::Full: return b.u_total() == 0;
        case AlgebraTag::Quotient:
            return b.u_total() == 0 && !b.path.contains_letter(PathBasis::Kind::P, qi) &&
                   !b.path.contains_letter(PathBasis::Kind::Q, qj);
    }
    return false;
}

std::string Algebra::to_string() const {
    switch (tag) {
        case AlgebraTag::Full: return "full";
        case AlgebraTag::Minus: return "minus";
        case AlgebraTag::Quotient:
            return "quotient" + std::to_string(qi) + std::to_string(qj);
    }
    return "?";
}

Algebra Algebra::parse(const std::string& s) {
    if (s == "full") return full();
    if (s == "minus") return minus();
    if (s.rfind("quotient", 0) == 0 && s.size() == 10)
        return quotient(s[8] - '0', s[9] - '0');
    throw std::invalid_argument("bad algebra tag: " + s);
}

std::vector<PathBasis> Algebra::path_basis(int max_len) const {
    std::vector<PathBasis> out;
    for (int i = 1; i <= 4; ++i) out.push_back(PathBasis::idem(i));
    for (int len = 1; len <= max_len; ++len)
        for (int s = 1; s <= 4; ++s)
            for (auto kind : {PathBasis::Kind::P, PathBasis::Kind::Q}) {
                PathBasis b{kind, static_cast<uint8_t>(s), static_cast<uint16_t>(len)};
                if (admits(MinusBasis(b))) out.push_back(b);
            }
    return out;
}

// ---------------------------------------------------------- multiplication

std::optional<MinusBasis> multiply_basis(const MinusBasis& x, const MinusBasis& y,
                                         const Algebra& alg) {
    if (x.right_idem() != y.left_idem()) return std::nullopt;
    std::array<uint8_t, 4> u;
    for (int i = 0; i < 4; ++i) u[i] = x.u[i] + y.u[i];

    const PathBasis& a = x.path;
    const PathBasis& b = y.path;
    PathBasis prod;
    if (a.is_idem()) {
        prod = b;
    } else if (b.is_idem()) {
        prod = a;
    } else if (a.kind == b.kind) {
        prod = {a.kind, a.start, static_cast<uint16_t>(a.len + b.len)};
    } else {
        // Mixed products reduce via p_i q_i = U_i ι_{i-1}, q_i p_i = U_i ι_i;
        // they vanish unless we are over A⁻.
        if (alg.tag != AlgebraTag::Minus) return std::nullopt;
        int t = std::min(a.len, b.len);
        if (a.kind == PathBasis::Kind::P) {
            // p_a ... p_{a+l-1} q_{a+l-1} ... : cancel from index a+l-1 down
            for (int k = 0; k < t; ++k) u[mod4(a.start + a.len - 1 - k) - 1] += 1;
            if (a.len > b.len)
                prod = PathBasis::p(a.start, a.len - b.len);
            else if (b.len > a.len)
                prod = PathBasis::q(mod4(b.start - a.len), b.len - a.len);
            else
                prod = PathBasis::idem(a.left_idem());
        } else {
            // q_b ... q_{b-m+1} p_{b-m+1} ... : cancel from index b-m+1 up
            for (int k = 0; k < t; ++k) u[mod4(a.start - a.len + 1 + k) - 1] += 1;
            if (a.len > b.len)
                prod = PathBasis::q(a.start, a.len - b.len);
            else if (b.len > a.len)
                prod = PathBasis::p(mod4(b.start + a.len), b.len - a.len);
            else
                prod = PathBasis::idem(a.left_idem());
        }
    }
    MinusBasis out{prod, u};
    if (!alg.admits(out)) return std::nullopt;
    return out;
}

// ---------------------------------------------------------- AlgebraElement

AlgebraElement AlgebraElement::unit(Algebra alg) {
    AlgebraElement e(alg);
    for (int i = 1; i <= 4; ++i) e.add_term(MinusBasis(PathBasis::idem(i)));
    return e;
}

void AlgebraElement::add_term(const MinusBasis& b) {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), b);
    if (it != terms_.end() && *it == b)
        terms_.erase(it);
    else
        terms_.insert(it, b);
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    if (alg_ != o.alg_) throw std::invalid_argument("algebra tag mismatch in +");
    AlgebraElement out = *this;
    for (const auto& t : o.terms_) out.add_term(t);
    return out;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
    return multiply(*this, o);
}

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) {
    if (x.algebra() != y.algebra())
        throw std::invalid_argument("algebra tag mismatch in multiply");
    AlgebraElement out(x.algebra());
    for (const auto& a : x.terms())
        for (const auto& b : y.terms())
            if (auto p = multiply_basis(a, b, x.algebra())) out.add_term(*p);
    return out;
}

std::optional<int> AlgebraElement::delta2() const {
    if (terms_.empty()) return std::nullopt;
    int d = terms_[0].delta2();
    for (const auto& t : terms_)
        if (t.delta2() != d) return std::nullopt;
    return d;
}

std::optional<AlexVec> AlgebraElement::alex() const {
    if (terms_.empty()) return std::nullopt;
    AlexVec a = terms_[0].alex();
    for (const auto& t : terms_)
        if (!(t.alex() == a)) return std::nullopt;
    return a;
}

std::string AlgebraElement::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) out += "+";
        out += t.to_string();
    }
    return out;
}

namespace {

MinusBasis parse_basis(const std::string& tok) {
    MinusBasis b;
    size_t i = 0;
    bool saw_path = false;
    while (i < tok.size()) {
        if (tok[i] == '*') { ++i; continue; }
        if (tok[i] == 'U') {
            ++i;
            if (i >= tok.size() || tok[i] < '1' || tok[i] > '4')
                throw std::invalid_argument("bad U index in: " + tok);
            int idx = tok[i++] - '0';
            int e = 1;
            if (i < tok.size() && tok[i] == '^') {
                ++i;
                e = 0;
                while (i < tok.size() && isdigit(tok[i])) e = 10 * e + (tok[i++] - '0');
            }
            b.u[idx - 1] += e;
            continue;
        }
        if (tok[i] == 'i' || tok[i] == 'p' || tok[i] == 'q') {
            if (saw_path) throw std::invalid_argument("two paths in term: " + tok);
            saw_path = true;
            char kind = tok[i++];
            std::vector<int> digits;
            while (i < tok.size() && tok[i] >= '1' && tok[i] <= '4')
                digits.push_back(tok[i++] - '0');
            if (digits.empty()) throw std::invalid_argument("missing index in: " + tok);
            if (kind == 'i') {
                if (digits.size() != 1)
                    throw std::invalid_argument("bad idempotent: " + tok);
                b.path = PathBasis::idem(digits[0]);
            } else {
                int step = kind == 'p' ? 1 : -1;
                for (size_t k = 1; k < digits.size(); ++k)
                    if (digits[k] != mod4(digits[k - 1] + step))
                        throw std::invalid_argument("non-consecutive path: " + tok);
                b.path = {kind == 'p' ? PathBasis::Kind::P : PathBasis::Kind::Q,
                          static_cast<uint8_t>(digits[0]),
                          static_cast<uint16_t>(digits.size())};
            }
            continue;
        }
        throw std::invalid_argument("bad algebra term: " + tok);
    }
    if (!saw_path) throw std::invalid_argument("term without path part: " + tok);
    return b;
}

}  // namespace

AlgebraElement AlgebraElement::parse(Algebra alg, const std::string& s) {
    AlgebraElement out(alg);
    if (s == "0") return out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '+')) {
        MinusBasis b = parse_basis(tok);
        if (!alg.admits(b))
            throw std::invalid_argument("term not admitted by " + alg.to_string() +
                                        ": " + tok);
        out.add_term(b);
    }
    return out;
}

// ---------------------------------------------------------------- Matching

Matching Matching::of(int i1, int o1, int i2, int o2, std::string c1, std::string c2) {
    Matching m;
    m.pairs = {{{i1, o1}, {i2, o2}}};
    m.colors = {std::move(c1), std::move(c2)};
    if (!m.valid()) throw std::invalid_argument("bad matching");
    return m;
}

bool Matching::valid() const {
    std::array<bool, 5> seen{false, false, false, false, false};
    for (const auto& p : pairs)
        for (int e : p) {
            if (e < 1 || e > 4 || seen[e]) return false;
            seen[e] = true;
        }
    return true;
}

std::array<int, 2> Matching::colored(const AlexVec& a) const {
    const auto& v = a.doubled();
    return {v[pairs[0][0] - 1] - v[pairs[0][1] - 1],
            v[pairs[1][0] - 1] - v[pairs[1][1] - 1]};
}

std::string Matching::to_string() const {
    std::string out;
    out += std::to_string(pairs[0][0]);
    out += std::to_string(pairs[0][1]);
    out += "|";
    out += std::to_string(pairs[1][0]);
    out += std::to_string(pairs[1][1]);
    return out;
}

Matching Matching::parse(const std::string& s) {
    if (s.size() != 5 || s[2] != '|') throw std::invalid_argument("bad matching: " + s);
    return of(s[0] - '0', s[1] - '0', s[3] - '0', s[4] - '0');
}

// --------------------------------------------------------------- curvature

AlgebraElement curvature_element(const Algebra& alg,
                                 const std::optional<Matching>& matching) {
    AlgebraElement out(alg);
    if (alg.tag == AlgebraTag::Quotient) return out;  // both cycles die
    for (int i = 1; i <= 4; ++i) {
        out.add_term(MinusBasis(PathBasis::p(i, 4)));
        out.add_term(MinusBasis(PathBasis::q(i, 4)));
    }
    if (alg.tag == AlgebraTag::Minus) {
        if (!matching) throw std::invalid_argument("minus curvature needs a matching");
        for (const auto& pr : matching->pairs) {
            std::array<uint8_t, 4> u{0, 0, 0, 0};
            u[pr[0] - 1] += 1;
            u[pr[1] - 1] += 1;
            for (int s = 1; s <= 4; ++s)
                out.add_term(MinusBasis(PathBasis::idem(s), u));
        }
    }
    return out;
}

bool alex_congruent_zero(const AlexVec& diff, const std::optional<Matching>& m) {
    const auto& v = diff.doubled();
    if (!m) {
        // Multiples of the (integer) diagonal: all entries equal and even.
        return v[0] == v[1] && v[1] == v[2] && v[2] == v[3] && v[0] % 2 == 0;
    }
    int i1 = m->pairs[0][0] - 1, o1 = m->pairs[0][1] - 1;
    int i2 = m->pairs[1][0] - 1, o2 = m->pairs[1][1] - 1;
    // Subgroup generated by 2(e_i1+e_o1) and 2(e_i2+e_o2) (their sum is the
    // diagonal), in doubled units.
    return v[i1] == v[o1] && v[i2] == v[o2] && v[i1] % 2 == 0 && v[i2] % 2 == 0;
}

AlexVec alex_key(const AlexVec& v, const std::optional<Matching>& m) {
    if (!m) return v.canonical();
    std::array<int, 4> w = v.doubled();
    int i1 = m->pairs[0][0] - 1, o1 = m->pairs[0][1] - 1;
    int i2 = m->pairs[1][0] - 1, o2 = m->pairs[1][1] - 1;
    // Shift the first pair by multiples of 2(e_i1 + e_o1) toward the second.
    int beta = (w[i1] + w[o1] - w[i2] - w[o2]);
    beta = beta >= 0 ? beta / 4 : -((-beta + 3) / 4);
    w[i1] -= 2 * beta;
    w[o1] -= 2 * beta;
    return AlexVec(w).canonical();
}

// ----------------------------------------------------------------- Relabel

Relabel Relabel::cyclic(int k) {
    Relabel r;
    for (int i = 1; i <= 4; ++i) {
        r.letter_perm[i - 1] = mod4(i + k);
        r.idem_perm[i - 1] = mod4(i + k);
    }
    return r;
}

static Relabel swap_relabel(const std::array<int, 4>& sigma) {
    Relabel r;
    r.swap_pq = true;
    for (int i = 1; i <= 4; ++i) {
        r.letter_perm[i - 1] = sigma[i - 1];
        r.idem_perm[i - 1] = mod4(sigma[i - 1] - 1);
    }
    return r;
}

Relabel Relabel::mut_x() { return swap_relabel({2, 1, 4, 3}); }
Relabel Relabel::mut_y() { return swap_relabel({4, 3, 2, 1}); }
Relabel Relabel::mut_z() { return cyclic(2); }
Relabel Relabel::mirror() { return swap_relabel({4, 3, 2, 1}); }

PathBasis Relabel::apply(const PathBasis& b) const {
    if (b.is_idem()) return PathBasis::idem(idem_perm[b.start - 1]);
    int s = letter_perm[b.start - 1];
    PathBasis::Kind kind = b.kind;
    if (swap_pq)
        kind = kind == PathBasis::Kind::P ? PathBasis::Kind::Q : PathBasis::Kind::P;
    return {kind, static_cast<uint8_t>(s), b.len};
}

MinusBasis Relabel::apply(const MinusBasis& b) const {
    MinusBasis out(apply(b.path));
    for (int i = 0; i < 4; ++i) out.u[letter_perm[i] - 1] = b.u[i];
    return out;
}

AlgebraElement Relabel::apply(const AlgebraElement& e) const {
    AlgebraElement out(apply(e.algebra()));
    for (const auto& t : e.terms()) out.add_term(apply(t));
    return out;
}

Algebra Relabel::apply(const Algebra& a) const {
    if (a.tag != AlgebraTag::Quotient) return a;
    if (swap_pq)
        return Algebra::quotient(letter_perm[a.qj - 1], letter_perm[a.qi - 1]);
    return Algebra::quotient(letter_perm[a.qi - 1], letter_perm[a.qj - 1]);
}

Relabel Relabel::compose(const Relabel& inner) const {
    Relabel r;
    r.swap_pq = swap_pq != inner.swap_pq;
    for (int i = 1; i <= 4; ++i) {
        r.letter_perm[i - 1] = letter_perm[inner.letter_perm[i - 1] - 1];
        r.idem_perm[i - 1] = idem_perm[inner.idem_perm[i - 1] - 1];
    }
    return r;
}

}  // namespace pq

// Note on mut_y vs mirror: both use the index permutation (14)(23), but
// mut_y swaps p and q with letter map p_i -> q_{sigma(i)}, which equals the
// mirror letter map. They differ in how they act on curves (mutation moves
// the lift, the mirror reflects it); at the algebra level they agree.
