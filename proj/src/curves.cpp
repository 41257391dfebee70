#include "peculiar/curves.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pq {

// ------------------------------------------------------------------- Slope

Slope Slope::of(int p, int q) {
    if (p == 0 && q == 0) throw std::invalid_argument("bad slope 0/0");
    int g = std::gcd(std::abs(p), std::abs(q));
    p /= g;
    q /= g;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    return Slope{p, q};
}

Slope Slope::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return of(std::stoi(s), 1);
    return of(std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1)));
}

// ------------------------------------------------------------ face geometry

namespace {

// Puncture class of a lattice point: 3 (e,e), 2 (o,e), 4 (e,o), 1 (o,o).
int puncture_class(long long x, long long y) {
    bool ox = ((x % 2) + 2) % 2, oy = ((y % 2) + 2) % 2;
    if (!ox && !oy) return 3;
    if (ox && !oy) return 2;
    if (!ox && oy) return 4;
    return 1;
}

int line_site(bool vertical, long long c) {
    bool odd = ((c % 2) + 2) % 2;
    if (vertical) return odd ? 1 : 3;  // a at odd x, c at even x
    return odd ? 4 : 2;                // d at odd y, b at even y
}

bool square_front(long long xmin, long long ymin) {
    return (((xmin + ymin) % 2) + 2) % 2 == 0;
}

// Directed label of an elementary segment from site s to site t.
PathBasis segment_label(int s, int t, bool front) {
    if (s == t) throw std::invalid_argument("segment connects equal arcs");
    if (front) {
        int len = ((s - t - 1) % 4 + 4) % 4 + 1;
        return PathBasis::p(mod4(t + 1), len);
    }
    int len = ((t - s - 1) % 4 + 4) % 4 + 1;
    return PathBasis::q(t, len);
}

}  // namespace

// -------------------------------------------------------------------- Loop

Loop::Loop(std::vector<std::pair<int, bool>> word, F2Matrix local_system,
           int sys_segment, int anchor_delta2, AlexVec anchor_alex,
           std::optional<Matching> matching)
    : local_system_(std::move(local_system)),
      sys_segment_(sys_segment),
      matching_(std::move(matching)) {
    int n = static_cast<int>(word.size());
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("loop words have even "
                                                         "length >= 2");
    if (!local_system_.invertible())
        throw std::invalid_argument("local system must be invertible");
    if (sys_segment_ < 0 || sys_segment_ >= n)
        throw std::invalid_argument("bad local system segment");
    for (int k = 0; k < n; ++k) {
        if (word[k].first == word[(k + 1) % n].first)
            throw std::invalid_argument("segment connects equal arcs");
        if (word[k].second == word[(k + 1) % n].second)
            throw std::invalid_argument("segment faces must alternate");
    }
    // Primitivity: the (site, face) word is not a proper power.
    for (int d = 1; d < n; ++d) {
        if (n % d) continue;
        bool power = true;
        for (int k = 0; k < n && power; ++k)
            power = word[k] == word[(k + d) % n];
        if (power) throw std::invalid_argument("loop word is a proper power");
    }
    steps_.resize(n);
    for (int k = 0; k < n; ++k) {
        steps_[k].site = word[k].first;
        steps_[k].front = word[k].second;
    }
    // Propagate gradings from the anchor along the forward labels.
    steps_[0].delta2 = anchor_delta2;
    steps_[0].alex = anchor_alex;
    for (int k = 0; k + 1 < n; ++k) {
        PathBasis lab = out_label(k);
        steps_[k + 1].delta2 = steps_[k].delta2 + 2 - lab.delta2();
        steps_[k + 1].alex = steps_[k].alex - lab.alex();
    }
    PathBasis wrap = out_label(n - 1);
    int d_back = steps_[n - 1].delta2 + 2 - wrap.delta2();
    AlexVec a_back = steps_[n - 1].alex - wrap.alex();
    if (d_back != steps_[0].delta2)
        throw std::invalid_argument("loop is not delta-gradeable");
    if (!alex_congruent_zero(a_back - steps_[0].alex, matching_))
        throw std::invalid_argument(
            "loop is not Alexander-gradeable" +
            std::string(matching_ ? "" : " (a matching may be required)"));
}

PathBasis Loop::out_label(int k) const {
    int n = length();
    return segment_label(steps_[k].site, steps_[(k + 1) % n].site, steps_[k].front);
}

PathBasis Loop::in_label(int k) const {
    int n = length();
    return segment_label(steps_[(k + 1) % n].site, steps_[k].site, steps_[k].front);
}

Loop Loop::rotated(int r) const {
    int n = length();
    r = ((r % n) + n) % n;
    std::vector<std::pair<int, bool>> word(n);
    for (int k = 0; k < n; ++k)
        word[k] = {steps_[(k + r) % n].site, steps_[(k + r) % n].front};
    Loop out(word, local_system_, ((sys_segment_ - r) % n + n) % n,
             steps_[r].delta2, steps_[r].alex, matching_);
    return out;
}

Loop Loop::reversed() const {
    // Traverse backwards: new position k sits at old position -k; the
    // outgoing segment of new k is the old segment (-k-1 -> -k).
    int n = length();
    std::vector<std::pair<int, bool>> word(n);
    for (int k = 0; k < n; ++k) {
        int old = ((-k) % n + n) % n;
        int seg = ((old - 1) % n + n) % n;
        word[k] = {steps_[old].site, steps_[seg].front};
    }
    int seg_new = ((-(sys_segment_ + 1)) % n + n) % n;
    Loop out(word, local_system_.inverse(), seg_new, steps_[0].delta2,
             steps_[0].alex, matching_);
    return out;
}

Loop Loop::with_shift(int delta2_shift, const AlexVec& alex_shift) const {
    Loop out = *this;
    for (auto& s : out.steps_) {
        s.delta2 += delta2_shift;
        s.alex = s.alex + alex_shift;
    }
    return out;
}

namespace {

std::vector<std::pair<int, int>> word_key(const Loop& l) {
    std::vector<std::pair<int, int>> key;
    for (const auto& s : l.steps()) key.push_back({s.site, s.front ? 0 : 1});
    return key;
}

}  // namespace

Loop Loop::canonical() const {
    const Loop* best = nullptr;
    Loop best_loop;
    for (int orient = 0; orient < 2; ++orient) {
        Loop base = orient ? reversed() : *this;
        for (int r = 0; r < length(); ++r) {
            Loop cand = base.rotated(r);
            if (!best || word_key(cand) < word_key(best_loop)) {
                best_loop = cand;
                best = &best_loop;
            }
        }
    }
    // Local system in Frobenius form on a fixed segment. The conjugacy
    // class of the cycle product is a loop invariant, so this is canonical.
    Loop out = best_loop;
    out.local_system_ = out.local_system_.frobenius_form();
    if (out.dim() == 1) out.sys_segment_ = 0;
    return out;
}

bool Loop::same_curve(const Loop& o) const {
    Loop a = canonical(), b = o.canonical();
    return word_key(a) == word_key(b) &&
           a.local_system_.invariant_factors() == b.local_system_.invariant_factors();
}

bool Loop::same_graded(const Loop& o) const {
    if (!same_curve(o)) return false;
    Loop a = canonical(), b = o.canonical();
    if (a.steps()[0].delta2 != b.steps()[0].delta2) return false;
    auto key_matching = matching_ ? matching_ : o.matching();
    return alex_congruent_zero(a.steps()[0].alex - b.steps()[0].alex, key_matching);
}

std::string Loop::to_text() const {
    std::ostringstream out;
    out << "loop";
    if (dim() > 1 || !local_system_.is_identity()) {
        out << " X=";
        auto rows = local_system_.row_strings();
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i) out << ",";
            out << rows[i];
        }
        out << "@" << sys_segment_;
    }
    for (int k = 0; k < length(); ++k)
        out << " " << site_char(steps_[k].site) << ":" << out_label(k).to_string();
    return out.str();
}

Loop Loop::parse(const std::string& text) {
    std::stringstream ss(text);
    std::string tok;
    ss >> tok;
    if (tok != "loop") throw std::invalid_argument("expected 'loop'");
    F2Matrix x = F2Matrix::identity(1);
    int seg = 0;
    std::vector<std::pair<int, bool>> word;
    while (ss >> tok) {
        if (tok.rfind("X=", 0) == 0) {
            auto at = tok.find('@');
            std::string body = tok.substr(2, at - 2);
            if (at != std::string::npos) seg = std::stoi(tok.substr(at + 1));
            std::vector<std::string> rows;
            std::stringstream rs(body);
            std::string row;
            while (std::getline(rs, row, ',')) rows.push_back(row);
            x = F2Matrix::from_row_strings(rows);
            continue;
        }
        auto colon = tok.find(':');
        if (colon == std::string::npos || colon != 1)
            throw std::invalid_argument("bad loop token: " + tok);
        int site = site_index(tok[0]);
        std::string lab = tok.substr(2);
        bool front = lab[0] == 'p';
        word.push_back({site, front});
    }
    return Loop(word, x, seg, 0, AlexVec());
}

// --------------------------------------------------------------- Multicurve

Multicurve Multicurve::canonical() const {
    std::vector<Loop> out;
    for (const auto& l : loops) {
        Loop c = l.canonical();
        auto factors = c.local_system().invariant_factors();
        if (factors.size() <= 1) {
            out.push_back(c);
            continue;
        }
        // Split into the companion summands of the invariant factors.
        std::vector<std::pair<int, bool>> word;
        for (const auto& s : c.steps()) word.push_back({s.site, s.front});
        for (auto f : factors) {
            int d = f2poly::degree(f);
            Loop piece(word, F2Matrix::companion(f, d), c.sys_segment(),
                       c.steps()[0].delta2, c.steps()[0].alex, c.matching());
            out.push_back(piece);
        }
    }
    std::sort(out.begin(), out.end(), [](const Loop& a, const Loop& b) {
        auto ka = word_key(a), kb = word_key(b);
        if (ka != kb) return ka < kb;
        auto fa = a.local_system().invariant_factors();
        auto fb = b.local_system().invariant_factors();
        if (fa != fb) return fa < fb;
        if (a.steps()[0].delta2 != b.steps()[0].delta2)
            return a.steps()[0].delta2 < b.steps()[0].delta2;
        return a.steps()[0].alex.canonical() < b.steps()[0].alex.canonical();
    });
    return Multicurve{out};
}

bool Multicurve::same_graded(const Multicurve& o) const {
    Multicurve a = canonical(), b = o.canonical();
    if (a.loops.size() != b.loops.size()) return false;
    std::vector<bool> used(b.loops.size(), false);
    for (const auto& la : a.loops) {
        bool hit = false;
        for (size_t j = 0; j < b.loops.size() && !hit; ++j) {
            if (used[j]) continue;
            if (la.same_graded(b.loops[j])) {
                used[j] = true;
                hit = true;
            }
        }
        if (!hit) return false;
    }
    return true;
}

std::string Multicurve::to_text() const {
    std::string out;
    for (const auto& l : loops) out += l.to_text() + "\n";
    return out;
}

Multicurve Multicurve::parse(const std::string& text) {
    Multicurve m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        m.loops.push_back(Loop::parse(line));
    }
    return m;
}

// ------------------------------------------------------- exact 2D fractions

namespace {

struct Frac {
    long long n = 0, d = 1;
    Frac() = default;
    Frac(long long num, long long den = 1) : n(num), d(den) { norm(); }
    void norm() {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        long long g = std::gcd(std::abs(n), d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
    }
    Frac operator+(const Frac& o) const { return Frac(n * o.d + o.n * d, d * o.d); }
    Frac operator-(const Frac& o) const { return Frac(n * o.d - o.n * d, d * o.d); }
    Frac operator*(const Frac& o) const { return Frac(n * o.n, d * o.d); }
    Frac operator/(const Frac& o) const { return Frac(n * o.d, d * o.n); }
    bool operator<(const Frac& o) const { return n * o.d < o.n * d; }
    bool operator==(const Frac& o) const { return n == o.n && d == o.d; }
    bool operator<=(const Frac& o) const { return !(o < *this); }
    bool is_integer() const { return d == 1; }
    long long floor() const { return n >= 0 ? n / d : -((-n + d - 1) / d); }
};

struct Pt {
    Frac x, y;
};

// Grid crossings of the segment (a, b] listed in traversal order.
struct RawCrossing {
    bool vertical;
    long long line;
    Pt at;
    Frac t;
};

std::vector<RawCrossing> segment_crossings(const Pt& a, const Pt& b) {
    std::vector<RawCrossing> out;
    auto scan = [&](bool vertical) {
        Frac ca = vertical ? a.x : a.y;
        Frac cb = vertical ? b.x : b.y;
        if (ca == cb) return;
        long long lo, hi;
        bool up = ca < cb;
        Frac mn = up ? ca : cb, mx = up ? cb : ca;
        lo = mn.floor() + 1;
        hi = mx.is_integer() ? mx.floor() : mx.floor();
        if (mn.is_integer()) lo = mn.floor() + 1;
        for (long long k = lo; k <= hi; ++k) {
            Frac t = (Frac(k) - ca) / (cb - ca);
            if (t <= Frac(0) || Frac(1) < t) continue;
            Pt at{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
            if (at.x.is_integer() && at.y.is_integer())
                throw std::runtime_error("curve passes through a puncture");
            out.push_back({vertical, k, at, t});
        }
    };
    scan(true);
    scan(false);
    std::sort(out.begin(), out.end(),
              [](const RawCrossing& l, const RawCrossing& r) { return l.t < r.t; });
    return out;
}

// Reads a closed PL lift (points of one period; point m is point 0 shifted
// by the period translation) back into a loop word. Returns the crossing
// list and, per crossing, which PL edge produced it.
struct Reading {
    std::vector<std::pair<int, bool>> word;  // (site, face of out-segment)
    std::vector<RawCrossing> crossings;
    std::vector<int> edge_of;  // PL edge index per crossing
};

Reading read_word(const std::vector<Pt>& pts, const std::array<long long, 2>& period) {
    Reading r;
    size_t m = pts.size();
    for (size_t i = 0; i < m; ++i) {
        Pt a = pts[i];
        Pt b = i + 1 < m ? pts[i + 1]
                         : Pt{pts[0].x + Frac(period[0]), pts[0].y + Frac(period[1])};
        for (auto& c : segment_crossings(a, b)) {
            r.crossings.push_back(c);
            r.edge_of.push_back(static_cast<int>(i));
        }
    }
    size_t n = r.crossings.size();
    if (n == 0) throw std::runtime_error("lift has no grid crossings");
    for (size_t i = 0; i < n; ++i) {
        const auto& c = r.crossings[i];
        const auto& c2 = r.crossings[(i + 1) % n];
        Pt next = c2.at;
        if (i + 1 == n) {
            next.x = next.x + Frac(period[0]);
            next.y = next.y + Frac(period[1]);
        }
        // Face of the segment between crossing i and i+1: parity of the
        // square containing the midpoint.
        Frac mx = (c.at.x + next.x) * Frac(1, 2);
        Frac my = (c.at.y + next.y) * Frac(1, 2);
        long long sx = mx.floor(), sy = my.floor();
        if (mx.is_integer() || my.is_integer())
            throw std::runtime_error("degenerate midpoint while reading a lift");
        r.word.push_back({line_site(c.vertical, c.line),
                          square_front(sx, sy)});
    }
    return r;
}

}  // namespace

// ------------------------------------------------------------ constructors

Loop rational_curve(Slope s, const F2Matrix& x) {
    int q = s.q, p = s.p;
    // Base point on the line q·y - p·x = 1/2.
    Pt base = q != 0 ? Pt{Frac(0), Frac(1, 2 * q)} : Pt{Frac(-1, 2), Frac(0)};
    std::vector<Pt> pts = {base};
    std::array<long long, 2> period{2 * q, 2 * p};
    Reading r = read_word(pts, period);
    // Matching: punctures pair up by the parity of q·Y - p·X.
    std::array<std::vector<int>, 2> sides;
    for (auto [px, py, cls] : {std::tuple{1, 1, 1}, {1, 0, 2}, {0, 0, 3}, {0, 1, 4}})
        sides[(((q * py - p * px) % 2) + 2) % 2].push_back(cls);
    Matching matching = Matching::of(std::min(sides[0][0], sides[0][1]),
                                     std::max(sides[0][0], sides[0][1]),
                                     std::min(sides[1][0], sides[1][1]),
                                     std::max(sides[1][0], sides[1][1]));
    return Loop(r.word, x, 0, 0, AlexVec(), matching);
}

Loop irrational_curve(int n, Slope s, std::array<int, 2> pair) {
    if (n < 1) throw std::invalid_argument("irrational curves need n >= 1");
    int q = s.q, p = s.p;
    static const std::array<std::array<long long, 2>, 5> base_of = {
        {{0, 0}, {1, 1}, {1, 0}, {0, 0}, {0, 1}}};
    auto b0 = base_of[pair[0]];
    auto b1 = base_of[pair[1]];
    if (pair[0] == pair[1]) throw std::invalid_argument("puncture pair must be "
                                                        "distinct");
    // Both punctures must lie on one line of slope s, i.e. the second class
    // is the first shifted by the direction vector.
    if (puncture_class(b0[0] + q, b0[1] + p) != pair[1])
        throw std::invalid_argument("puncture pair does not lie on a line of "
                                    "slope " + s.to_string());
    (void)b1;
    // Push-off of the line through the pair; side flips at every (2n)-th
    // interval, crossing the marked interval once at its midpoint.
    long long steps = 4 * n;
    Frac e(1, 8 * (std::abs(p) + q + 2));
    Frac nx = Frac(-p) * e, ny = Frac(q) * e;  // normal offset
    std::vector<Pt> pts;
    int side = -1;
    for (long long j = 0; j < steps; ++j) {
        Frac lx(b0[0] + j * q), ly(b0[1] + j * p);
        pts.push_back({lx + nx * Frac(side), ly + ny * Frac(side)});
        if (j % (2 * n) == 0) {  // marked interval (L_j, L_{j+1})
            pts.push_back({lx + Frac(q, 2), ly + Frac(p, 2)});
            side = -side;
        }
    }
    std::array<long long, 2> period{steps * q, steps * p};
    Reading r = read_word(pts, period);
    return Loop(r.word, F2Matrix::identity(1), 0, 0, AlexVec());
}

// ---------------------------------------------------------------- functor Π

CurvedComplex pi(const Loop& l, const std::string& prefix) {
    CurvedComplex out(Algebra::full(), l.matching());
    int n = l.length();
    auto name = [&](int k) {
        return prefix + site_char(l.steps()[k].site) + std::to_string(k);
    };
    for (int k = 0; k < n; ++k) {
        Generator g;
        g.id = name(k);
        g.idem = l.steps()[k].site;
        g.delta2 = l.steps()[k].delta2;
        g.alex = l.steps()[k].alex;
        g.dim = l.dim();
        out.add_generator(g);
    }
    F2Matrix id = F2Matrix::identity(l.dim());
    for (int k = 0; k < n; ++k) {
        int next = (k + 1) % n;
        F2Matrix fwd = k == l.sys_segment() ? l.local_system() : id;
        F2Matrix bwd = k == l.sys_segment() ? l.local_system().inverse() : id;
        out.add_entry(name(k), name(next), MinusBasis(l.out_label(k)), fwd);
        out.add_entry(name(next), name(k), MinusBasis(l.in_label(k)), bwd);
    }
    return out;
}

CurvedComplex pi(const Multicurve& m) {
    std::optional<Matching> matching;
    for (const auto& l : m.loops)
        if (l.matching()) matching = l.matching();
    CurvedComplex out(Algebra::full(), matching);
    for (size_t i = 0; i < m.loops.size(); ++i) {
        CurvedComplex piece = pi(m.loops[i], "l" + std::to_string(i) + ".");
        for (const auto& g : piece.generators()) out.add_generator(g);
        for (const auto& e : piece.entries())
            out.add_entry(e.first.src, e.first.dst, e.first.label, e.second);
    }
    return out;
}

// --------------------------------------------------------------------- lift

LiftWalk lift(const Loop& l) {
    // Combinatorial square walk: place crossing 0 and follow the labels.
    int n = l.length();
    LiftWalk walk;
    // Current crossing: edge of a square; track the square ahead (the one
    // the outgoing segment traverses) and the edge index of the crossing on
    // that square. Edges ccw: 0 left, 1 bottom, 2 right, 3 top; corner i
    // sits between edges i and i+1: 0 (x,y) bl, 1 (x+1,y) br, 2 (x+1,y+1)
    // tr, 3 (x,y+1) tl.
    long long sx = 0, sy = 0;  // square min corner
    int edge = 0;
    {
        int site = l.steps()[0].site;
        bool front = l.steps()[0].front;
        // Choose a square of the right parity with our entering edge on the
        // correct line type.
        for (long long cx = -2; cx <= 2 && walk.crossings.empty(); ++cx)
            for (long long cy = -2; cy <= 2; ++cy) {
                if (square_front(cx, cy) != front) continue;
                for (int e = 0; e < 4; ++e) {
                    bool vertical = e == 0 || e == 2;
                    long long line = e == 2 ? cx + 1 : (e == 0 ? cx : cy + (e == 3));
                    if (!vertical) line = e == 3 ? cy + 1 : cy;
                    if (line_site(vertical, line) != site) continue;
                    sx = cx;
                    sy = cy;
                    edge = e;
                    walk.crossings.push_back(
                        {vertical, line, vertical ? sy : sx});
                    goto placed;
                }
            }
    placed:
        if (walk.crossings.empty())
            throw std::runtime_error("lift: could not place the first crossing");
    }
    auto corner_class = [&](int i) {
        long long cx = sx + (i == 1 || i == 2);
        long long cy = sy + (i == 2 || i == 3);
        return puncture_class(cx, cy);
    };
    for (int k = 0; k < n; ++k) {
        PathBasis lab = l.out_label(k);
        int len = lab.len;
        // Letters in traversal order are the label letters reversed.
        std::vector<int> trav;
        for (int t = len - 1; t >= 0; --t) trav.push_back(lab.letter(t));
        // Try ccw (corners edge, edge+1, ...) and cw.
        bool ccw_ok = true, cw_ok = true;
        for (int t = 0; t < len; ++t) {
            if (corner_class(((edge + t) % 4 + 4) % 4) != trav[t]) ccw_ok = false;
            if (corner_class(((edge - 1 - t) % 4 + 4) % 4) != trav[t]) cw_ok = false;
        }
        if (ccw_ok == cw_ok)
            throw std::runtime_error("lift: ambiguous or impossible segment");
        int exit = ccw_ok ? (edge + len) % 4 : ((edge - len) % 4 + 4) % 4;
        // Move across the exit edge into the next square.
        bool vertical = exit == 0 || exit == 2;
        long long line = vertical ? (exit == 2 ? sx + 1 : sx)
                                  : (exit == 3 ? sy + 1 : sy);
        walk.crossings.push_back({vertical, line, vertical ? sy : sx});
        // The next square is on the other side of the exit edge; the
        // crossing enters it on the opposite edge.
        if (exit == 0) { sx -= 1; edge = 2; }
        else if (exit == 2) { sx += 1; edge = 0; }
        else if (exit == 1) { sy -= 1; edge = 3; }
        else { sy += 1; edge = 1; }
        // Validate the site of the next crossing.
        int next_site = l.steps()[(k + 1) % n].site;
        if (line_site(vertical, line) != next_site)
            throw std::runtime_error("lift: site mismatch while walking");
    }
    // Closure: compare the final crossing with the first.
    const auto& first = walk.crossings.front();
    const auto& last = walk.crossings.back();
    if (first.vertical != last.vertical)
        throw std::runtime_error("lift: walk does not close up");
    if (first.vertical)
        walk.displacement = {static_cast<int>(last.line - first.line),
                             static_cast<int>(last.offset - first.offset)};
    else
        walk.displacement = {static_cast<int>(last.offset - first.offset),
                             static_cast<int>(last.line - first.line)};
    walk.crossings.pop_back();
    return walk;
}

// ------------------------------------------------------------------ twists

std::vector<TwistGen> parse_twist_word(const std::string& word) {
    std::vector<TwistGen> out;
    std::stringstream ss(word);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        TwistGen g;
        if (tok[0] != 't' || tok.size() < 2)
            throw std::invalid_argument("bad twist token: " + tok);
        g.which = tok[1] - '0';
        if (g.which != 1 && g.which != 2)
            throw std::invalid_argument("bad twist generator: " + tok);
        g.inverse = tok.size() > 2 && (tok[2] == '\'' || tok[2] == '-');
        out.push_back(g);
    }
    return out;
}

Loop twist(const Loop& l, const TwistGen& g) {
    LiftWalk walk = lift(l);
    int n = l.length();
    // PL points: crossing midpoints.
    std::vector<Pt> pts;
    for (const auto& c : walk.crossings) {
        if (c.vertical)
            pts.push_back({Frac(c.line), Frac(2 * c.offset + 1, 2)});
        else
            pts.push_back({Frac(2 * c.offset + 1, 2), Frac(c.line)});
    }
    auto apply = [&](const Pt& p) -> Pt {
        // tau1: (x,y) -> (x+y+1, y); tau2: (x,y) -> (x, x+y+1); inverses
        // subtract instead.
        if (g.which == 1) {
            Frac x = g.inverse ? p.x - p.y - Frac(1) : p.x + p.y + Frac(1);
            return {x, p.y};
        }
        Frac y = g.inverse ? p.y - p.x - Frac(1) : p.y + p.x + Frac(1);
        return {p.x, y};
    };
    std::vector<Pt> image;
    for (const auto& p : pts) image.push_back(apply(p));
    std::array<long long, 2> d{walk.displacement[0], walk.displacement[1]};
    std::array<long long, 2> period;
    if (g.which == 1)
        period = {g.inverse ? d[0] - d[1] : d[0] + d[1], d[1]};
    else
        period = {d[0], g.inverse ? d[1] - d[0] : d[1] + d[0]};
    Reading r = read_word(image, period);

    // Local system: the matrix sits at the midpoint of old segment k0 (PL
    // edge k0 at parameter 1/2); the new segment containing that point
    // starts at the last crossing not past it.
    int new_n = static_cast<int>(r.word.size());
    int sys_new = new_n - 1;
    for (int i = 0; i < new_n; ++i) {
        if (r.edge_of[i] < l.sys_segment() ||
            (r.edge_of[i] == l.sys_segment() && !(Frac(1, 2) < r.crossings[i].t)))
            sys_new = i;
    }

    // Grading anchor: a crossing on a line type preserved by the twist
    // (vertical for tau2, horizontal for tau1) persists at the same PL
    // position; transfer its gradings with the puncture slots permuted.
    bool want_vertical = g.which == 2;
    int old_anchor = -1;
    for (int i = 0; i < n; ++i)
        if (walk.crossings[i].vertical == want_vertical) { old_anchor = i; break; }
    std::array<int, 4> perm =
        g.which == 2 ? std::array<int, 4>{1, 2, 4, 3} : std::array<int, 4>{1, 3, 2, 4};
    int anchor_d2;
    AlexVec anchor_alex;
    int new_anchor = 0;
    if (old_anchor >= 0) {
        anchor_d2 = l.steps()[old_anchor].delta2;
        anchor_alex = l.steps()[old_anchor].alex.permuted(perm);
        // Its image is the crossing with the same point: locate it as the
        // crossing produced at the end of the PL edge old_anchor - 1.
        int prev_edge = ((old_anchor - 1) % n + n) % n;
        for (int i = 0; i < new_n; ++i)
            if (r.edge_of[i] == prev_edge && r.crossings[i].t == Frac(1)) {
                new_anchor = i;
                break;
            }
    } else {
        // No preserved crossing (pure rational of the fixed slope): keep the
        // grading of the first generator on the same site.
        anchor_d2 = l.steps()[0].delta2;
        anchor_alex = l.steps()[0].alex.permuted(perm);
        for (int i = 0; i < new_n; ++i)
            if (r.word[i].first == l.steps()[0].site) { new_anchor = i; break; }
    }
    // Build with the anchor rotated to position 0, then rotate back.
    std::vector<std::pair<int, bool>> word(new_n);
    for (int i = 0; i < new_n; ++i) word[i] = r.word[(new_anchor + i) % new_n];
    Loop out(word, l.local_system(),
             ((sys_new - new_anchor) % new_n + new_n) % new_n, anchor_d2,
             anchor_alex, l.matching());
    return out.rotated(((-new_anchor) % new_n + new_n) % new_n);
}

Loop twist(const Loop& l, const std::vector<TwistGen>& word) {
    Loop out = l;
    for (const auto& g : word) out = twist(out, g);
    return out;
}

Multicurve twist(const Multicurve& m, const std::vector<TwistGen>& word) {
    Multicurve out;
    for (const auto& l : m.loops) out.loops.push_back(twist(l, word));
    return out;
}

// --------------------------------------------------------------- relabelings

namespace {

Loop relabel_loop(const Loop& l, const Relabel& r) {
    std::vector<std::pair<int, bool>> word;
    for (const auto& s : l.steps())
        word.push_back({r.idem_perm[s.site - 1], s.front != r.swap_pq});
    std::optional<Matching> matching = l.matching();
    if (matching) {
        Matching m = *matching;
        for (auto& pr : m.pairs)
            for (auto& e : pr) e = r.letter_perm[e - 1];
        matching = m;
    }
    Loop out(word, l.local_system(), l.sys_segment(), l.steps()[0].delta2,
             l.steps()[0].alex.permuted(r.letter_perm), matching);
    return out;
}

}  // namespace

Loop mutate(const Loop& l, MutationAxis axis) {
    switch (axis) {
        case MutationAxis::X: return relabel_loop(l, Relabel::mut_x());
        case MutationAxis::Y: return relabel_loop(l, Relabel::mut_y());
        case MutationAxis::Z: return relabel_loop(l, Relabel::mut_z());
    }
    throw std::logic_error("bad axis");
}

Multicurve mutate(const Multicurve& m, MutationAxis axis) {
    Multicurve out;
    for (const auto& l : m.loops) out.loops.push_back(mutate(l, axis));
    return out;
}

Loop mirror_curve(const Loop& l) { return relabel_loop(l, Relabel::mirror()); }

Multicurve mirror_curve(const Multicurve& m) {
    Multicurve out;
    for (const auto& l : m.loops) out.loops.push_back(mirror_curve(l));
    return out;
}

// -------------------------------------------------------------- recognition

Multicurve recognize(const CurvedComplex& m_in) {
    CurvedComplex m = m_in.flattened();
    if (!m.is_reduced())
        throw std::invalid_argument("recognize: complex is not reduced");
    // Bundle parallel same-label arrows: connected components of the
    // bipartite graph of each (per-label) arrow set form the edges.
    struct Bundle {
        std::vector<std::string> srcs, dsts;  // sorted generator ids
        PathBasis label;
        F2Matrix coeff;  // dsts x srcs
    };
    std::map<std::pair<std::string, PathBasis>, int> seen;  // (gen, label) -> bundle
    std::vector<Bundle> bundles;
    {
        // Union-find over (gen, label) pairs per label.
        std::map<std::tuple<std::string, std::string, int>, int> dummy;
        std::map<PathBasis, std::vector<const std::pair<const EntryKey, F2Matrix>*>>
            by_label;
        for (const auto& e : m.entries()) {
            if (e.first.label.u_total())
                throw std::invalid_argument("recognize: U-labelled entry");
            by_label[e.first.label.path].push_back(&e);
        }
        for (auto& lb : by_label) {
            std::map<std::string, int> comp;  // "s:"+id / "d:"+id -> component
            std::function<int(const std::string&)> find;
            std::map<std::string, std::string> parent;
            find = [&](const std::string& x) -> int {
                (void)comp;
                return 0;
            };
            // Simple union-find on strings.
            std::function<std::string(const std::string&)> root =
                [&](const std::string& x) -> std::string {
                auto& p = parent[x];
                if (p.empty() || p == x) return p = x;
                return p = root(p);
            };
            for (const auto* e : lb.second)
                parent[root("s:" + e->first.src)] = root("d:" + e->first.dst);
            std::map<std::string, Bundle> acc;
            for (const auto* e : lb.second) {
                std::string key = root("s:" + e->first.src);
                Bundle& b = acc[key];
                b.label = lb.first;
                if (std::find(b.srcs.begin(), b.srcs.end(), e->first.src) ==
                    b.srcs.end())
                    b.srcs.push_back(e->first.src);
                if (std::find(b.dsts.begin(), b.dsts.end(), e->first.dst) ==
                    b.dsts.end())
                    b.dsts.push_back(e->first.dst);
            }
            for (auto& kv : acc) {
                Bundle& b = kv.second;
                std::sort(b.srcs.begin(), b.srcs.end());
                std::sort(b.dsts.begin(), b.dsts.end());
                if (b.srcs.size() != b.dsts.size())
                    throw std::invalid_argument(
                        "recognize: non-square arrow bundle (not loop form)");
                int dim = static_cast<int>(b.srcs.size());
                b.coeff = F2Matrix(dim, dim);
                for (const auto* e : lb.second) {
                    auto si = std::find(b.srcs.begin(), b.srcs.end(), e->first.src);
                    if (si == b.srcs.end()) continue;
                    auto di = std::find(b.dsts.begin(), b.dsts.end(), e->first.dst);
                    b.coeff.set(static_cast<int>(di - b.dsts.begin()),
                                static_cast<int>(si - b.srcs.begin()), true);
                }
                if (!b.coeff.invertible())
                    throw std::invalid_argument(
                        "recognize: bundle matrix is not invertible");
                int idx = static_cast<int>(bundles.size());
                bundles.push_back(b);
                for (const auto& s : b.srcs) {
                    auto k = std::make_pair(s, b.label);
                    if (seen.count(k))
                        throw std::invalid_argument("recognize: not loop form");
                    seen[k] = idx;
                }
                (void)dummy;
            }
        }
    }
    // Generator groups: each generator must meet exactly one p-bundle and
    // one q-bundle (in either direction). Walk the cycles.
    struct Incident {
        int bundle;
        bool outgoing;
    };
    std::map<std::string, std::vector<Incident>> inc;
    for (int i = 0; i < static_cast<int>(bundles.size()); ++i) {
        for (const auto& s : bundles[i].srcs) inc[s].push_back({i, true});
        for (const auto& d : bundles[i].dsts) inc[d].push_back({i, false});
    }
    std::map<std::string, bool> used;
    Multicurve out;
    for (const auto& g0 : m.generators()) {
        if (used[g0.id]) continue;
        // Start a new cycle at g0; find its group through any bundle.
        auto& ii = inc[g0.id];
        std::vector<Incident> pq_inc[2];
        for (const auto& i : ii)
            pq_inc[bundles[i.bundle].label.kind == PathBasis::Kind::P ? 0 : 1]
                .push_back(i);
        for (int side = 0; side < 2; ++side) {
            // Deduplicate (a two-directional pair over the full algebra
            // counts as one segment).
            auto& v = pq_inc[side];
            std::set<int> bs;
            for (const auto& i : v) bs.insert(i.bundle);
            if (bs.size() < 1 || bs.size() > 2)
                throw std::invalid_argument("recognize: generator " + g0.id +
                                            " is not on one p- and one q-segment");
            if (bs.size() == 2) {
                // Two bundles on this side must be the two directions of a
                // single segment: same generator sets.
                auto it = bs.begin();
                const Bundle& b1 = bundles[*it++];
                const Bundle& b2 = bundles[*it];
                if (!(b1.srcs == b2.dsts && b1.dsts == b2.srcs))
                    throw std::invalid_argument("recognize: generator " + g0.id +
                                                " meets two distinct segments of "
                                                "one type");
            }
        }
        // Walk: start from the group of g0, leave through the p-side.
        std::vector<std::string> group0 = {g0.id};
        // group = all generators tied to g0 through bundle rows.
        {
            const Bundle& b = bundles[pq_inc[0][0].bundle];
            group0 = pq_inc[0][0].outgoing ? b.srcs : b.dsts;
        }
        std::vector<std::pair<int, bool>> word;
        std::vector<int> d2s;
        std::vector<AlexVec> alexes;
        F2Matrix sys = F2Matrix::identity(static_cast<int>(group0.size()));
        std::vector<std::string> group = group0;
        bool use_p = true;
        int guard = 0;
        do {
            if (++guard > 10000)
                throw std::runtime_error("recognize: cycle walk did not close");
            const Generator& rep = m.generator(group[0]);
            for (const auto& id : group) {
                const Generator& g = m.generator(id);
                if (g.idem != rep.idem || g.delta2 != rep.delta2 ||
                    !alex_congruent_zero(g.alex - rep.alex, m_in.matching()))
                    throw std::invalid_argument(
                        "recognize: inconsistent gradings within a fibre");
                used[id] = true;
            }
            d2s.push_back(rep.delta2);
            alexes.push_back(rep.alex);
            // Find the bundle of the wanted side at this group.
            int chosen = -1;
            bool outgoing = true;
            for (const auto& i : inc[group[0]]) {
                const Bundle& b = bundles[i.bundle];
                bool is_p = b.label.kind == PathBasis::Kind::P;
                if (is_p != use_p) continue;
                // Skip the bundle we came in through: handled by preferring
                // the one not yet used... both directions of one segment are
                // equivalent; to walk forward we need the segment different
                // from the previous one, which the face alternation ensures.
                chosen = i.bundle;
                outgoing = i.outgoing;
                if (outgoing) break;
            }
            if (chosen < 0)
                throw std::invalid_argument("recognize: missing segment at " +
                                            group[0]);
            const Bundle& b = bundles[chosen];
            const auto& next_group = outgoing ? b.dsts : b.srcs;
            F2Matrix step = outgoing ? b.coeff : b.coeff.inverse();
            sys = step * sys;
            word.push_back({rep.idem, use_p});
            group = next_group;
            use_p = !use_p;
        } while (group != group0 || !use_p);
        // The walked word lists (site, face-of-outgoing-segment).
        int wn = static_cast<int>(word.size());
        // Local system: the cycle product, attributed to the last segment.
        std::vector<std::pair<int, bool>> w2 = word;
        Loop loop(w2, sys, wn - 1, d2s[0], alexes[0], m_in.matching());
        // Consistency: propagated gradings must match the complex.
        for (int k = 0; k < wn; ++k) {
            if (loop.steps()[k].delta2 != d2s[k] ||
                !alex_congruent_zero(loop.steps()[k].alex - alexes[k],
                                     m_in.matching()))
                throw std::invalid_argument("recognize: gradings do not propagate");
        }
        out.loops.push_back(loop);
    }
    return out.canonical();
}

// ------------------------------------------------- lift walk classification

namespace {

// Twist generators whose application takes a curve of slope s to slope 0/1,
// by the Euclidean algorithm on the direction vector (q, p): tau2^±1 sends
// p to p ∓ q, tau1^±1 sends q to q ∓ p.
std::vector<TwistGen> reduction_word(Slope s) {
    int p = s.p, q = s.q;
    std::vector<TwistGen> word;
    int guard = 0;
    while (p != 0) {
        if (++guard > 128) throw std::runtime_error("slope reduction diverged");
        if (q == 0) {
            bool inv = p < 0;
            word.push_back({1, inv});
            q += inv ? -p : p;
        } else if (std::abs(p) >= std::abs(q)) {
            bool inv = (p > 0) == (q > 0);
            word.push_back({2, inv});
            p += inv ? -q : q;
        } else {
            bool inv = (q > 0) == (p > 0);
            word.push_back({1, inv});
            q += inv ? -p : p;
        }
    }
    return word;
}

std::array<int, 2> transport_pair(std::array<int, 2> pair, const TwistGen& g) {
    std::array<int, 4> perm = g.which == 2 ? std::array<int, 4>{1, 2, 4, 3}
                                           : std::array<int, 4>{1, 3, 2, 4};
    return {perm[pair[0] - 1], perm[pair[1] - 1]};
}

}  // namespace

Classification classify(const Loop& l) {
    Classification out;
    Loop cur = l.canonical();
    LiftWalk walk = lift(cur);
    auto [dx, dy] = walk.displacement;
    if (dx == 0 && dy == 0) return out;  // wraps: not linear
    out.slope = Slope::of(dy, dx);

    std::vector<TwistGen> red = reduction_word(out.slope);
    Loop work = twist(cur, red);
    work = work.canonical();

    // Dictionary at slope 0/1.
    auto try_match = [&](const Loop& ref, CurveKind kind, int n,
                         std::array<int, 2> pair) {
        if (!word_key(work).empty() && word_key(work) == word_key(ref.canonical())) {
            out.kind = kind;
            out.n = n;
            out.pair = pair;
            return true;
        }
        return false;
    };
    bool hit = false;
    if (try_match(rational_curve(Slope::of(0, 1)), CurveKind::Rational, 0, {0, 0}))
        hit = true;
    int max_n = work.length() / 4 + 1;
    for (int n = 1; !hit && n <= max_n; ++n) {
        if (try_match(irrational_curve(n, Slope::of(0, 1), {2, 3}),
                      CurveKind::Irrational, n, {2, 3}))
            hit = true;
        else if (try_match(irrational_curve(n, Slope::of(0, 1), {4, 1}),
                           CurveKind::Irrational, n, {4, 1}))
            hit = true;
    }
    if (!hit) return out;  // Other
    if (out.kind == CurveKind::Irrational && !work.local_system().is_identity())
        return Classification{};  // irrational curves carry identity systems
    out.local_system = work.local_system().frobenius_form();

    // Transport the puncture pair back through the reduction (the slot
    // permutation of each generator is an involution).
    if (out.kind == CurveKind::Irrational) {
        for (auto it = red.rbegin(); it != red.rend(); ++it)
            out.pair = transport_pair(out.pair, *it);
        std::sort(out.pair.begin(), out.pair.end());
        if (out.pair == std::array<int, 2>{1, 4}) out.pair = {4, 1};
    }

    // Grading shift against the reference curve of this class.
    Classification ref_cls = out;
    ref_cls.delta2_shift = 0;
    ref_cls.alex_shift = AlexVec();
    Loop ref = reference_graded(ref_cls);
    Loop a = cur.canonical(), b = ref.canonical();
    out.delta2_shift = a.steps()[0].delta2 - b.steps()[0].delta2;
    out.alex_shift = a.steps()[0].alex - b.steps()[0].alex;
    return out;
}

std::string Classification::to_string() const {
    switch (kind) {
        case CurveKind::Other: return "other";
        case CurveKind::Rational: {
            std::string s = "r(" + slope.to_string() + ")";
            if (!local_system.is_identity() || local_system.rows() > 1) s += " X";
            return s;
        }
        case CurveKind::Irrational:
            return "i" + std::to_string(n) + "(" + slope.to_string() + ";" +
                   std::to_string(pair[0]) + "," + std::to_string(pair[1]) + ")";
    }
    return "?";
}

// ------------------------------------------------------- reference gradings

Loop reference_graded(const Classification& c) {
    if (c.kind == CurveKind::Other)
        throw std::invalid_argument("no reference gradings for non-linear curves");
    // Slope 0/1 references carry the gradings of the conjugation-symmetry
    // normalization; other slopes are twisted from them along the slope's
    // continued fraction expansion.
    if (c.slope == Slope::of(0, 1)) {
        if (c.kind == CurveKind::Rational) {
            Loop r = rational_curve(c.slope, c.local_system.rows() == 0
                                                 ? F2Matrix::identity(1)
                                                 : c.local_system);
            return r.canonical();  // anchor gradings are already 0
        }
        // b_n = i_n(0/1;2,3): anchor so that the back-facing b sits in
        // delta -1/2 and Alexander [0,n,n,0]; d_n = i_n(0/1;4,1): the
        // back-facing d sits in delta +1/2 and Alexander [n,0,0,n].
        Loop raw = irrational_curve(c.n, c.slope, c.pair);
        bool is_b = c.pair == std::array<int, 2>{2, 3};
        int site = is_b ? 2 : 4;
        int pos = -1;
        for (int k = 0; k < raw.length(); ++k)
            if (raw.steps()[k].site == site && !raw.steps()[k].front) pos = k;
        if (pos < 0) throw std::logic_error("reference curve without anchor");
        Loop rot = raw.rotated(pos);
        std::vector<std::pair<int, bool>> word;
        for (const auto& s : rot.steps()) word.push_back({s.site, s.front});
        int d2 = is_b ? -1 : 1;
        AlexVec alex = is_b ? AlexVec({0, 2 * c.n, 2 * c.n, 0})
                            : AlexVec({2 * c.n, 0, 0, 2 * c.n});
        Loop anchored(word, rot.local_system(), rot.sys_segment(), d2, alex,
                      rot.matching());
        return anchored.canonical();
    }
    // Twist the 0/1 reference out to the requested slope: apply the
    // inverses of the reduction word in reverse order.
    std::vector<TwistGen> red = reduction_word(c.slope);
    std::vector<TwistGen> word(red.rbegin(), red.rend());
    for (auto& g : word) g.inverse = !g.inverse;
    Classification b0 = c;
    b0.slope = Slope::of(0, 1);
    if (c.kind == CurveKind::Irrational) {
        std::array<int, 2> pair = c.pair;
        for (const auto& g : red) pair = transport_pair(pair, g);
        std::sort(pair.begin(), pair.end());
        if (pair != std::array<int, 2>{2, 3} && pair != std::array<int, 2>{1, 4})
            throw std::logic_error("pair transport failed");
        b0.pair = pair == std::array<int, 2>{1, 4} ? std::array<int, 2>{4, 1} : pair;
    }
    Loop ref0 = reference_graded(b0);
    Loop twisted = twist(ref0, word);
    return twisted.canonical();
}

Multicurve assign_absolute_gradings(const Multicurve& m) {
    Multicurve out;
    for (const auto& l : m.loops) {
        Classification c = classify(l);
        if (c.kind == CurveKind::Other)
            throw std::invalid_argument("cannot grade a non-linear component");
        c.delta2_shift = 0;
        c.alex_shift = AlexVec();
        Loop ref = reference_graded(c);
        if (l.dim() != ref.dim()) {
            // keep the local system of l
            Classification c2 = c;
            c2.local_system = l.canonical().local_system();
            ref = reference_graded(c2);
        }
        out.loops.push_back(ref);
    }
    return out;
}

}  // namespace pq
