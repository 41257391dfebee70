#include "peculiar/f2.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace pq {

F2Matrix F2Matrix::identity(int n) {
    F2Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

F2Matrix F2Matrix::companion(uint64_t poly_mask, int deg) {
    // Companion of a monic polynomial of degree deg: subdiagonal ones,
    // last column carries the low coefficients.
    F2Matrix m(deg, deg);
    for (int i = 1; i < deg; ++i) m.set(i, i - 1, true);
    for (int i = 0; i < deg; ++i)
        if ((poly_mask >> i) & 1) m.set(i, deg - 1, true);
    return m;
}

bool F2Matrix::is_zero() const {
    for (auto b : bits_)
        if (b) return false;
    return true;
}

bool F2Matrix::is_identity() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i)
        if (bits_[i] != (uint64_t{1} << i)) return false;
    return true;
}

F2Matrix F2Matrix::operator*(const F2Matrix& rhs) const {
    assert(cols_ == rhs.rows_);
    F2Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
        uint64_t acc = 0;
        uint64_t row = bits_[i];
        while (row) {
            int k = __builtin_ctzll(row);
            row &= row - 1;
            acc ^= rhs.bits_[k];
        }
        out.bits_[i] = acc;
    }
    return out;
}

F2Matrix F2Matrix::operator+(const F2Matrix& rhs) const {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    F2Matrix out = *this;
    for (int i = 0; i < rows_; ++i) out.bits_[i] ^= rhs.bits_[i];
    return out;
}

bool F2Matrix::operator<(const F2Matrix& rhs) const {
    if (rows_ != rhs.rows_) return rows_ < rhs.rows_;
    if (cols_ != rhs.cols_) return cols_ < rhs.cols_;
    return bits_ < rhs.bits_;
}

F2Matrix F2Matrix::transpose() const {
    F2Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (get(i, j)) out.set(j, i, true);
    return out;
}

int F2Matrix::rank() const {
    std::vector<uint64_t> work = bits_;
    int rank = 0;
    for (int c = 0; c < cols_ && rank < rows_; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows_; ++r)
            if ((work[r] >> c) & 1) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(work[rank], work[pivot]);
        for (int r = 0; r < rows_; ++r)
            if (r != rank && ((work[r] >> c) & 1)) work[r] ^= work[rank];
        ++rank;
    }
    return rank;
}

F2Matrix F2Matrix::inverse() const {
    assert(is_square());
    int n = rows_;
    std::vector<uint64_t> work = bits_;
    std::vector<uint64_t> inv(n);
    for (int i = 0; i < n; ++i) inv[i] = uint64_t{1} << i;
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if ((work[r] >> c) & 1) { pivot = r; break; }
        if (pivot < 0) throw std::invalid_argument("F2Matrix::inverse: singular");
        std::swap(work[c], work[pivot]);
        std::swap(inv[c], inv[pivot]);
        for (int r = 0; r < n; ++r)
            if (r != c && ((work[r] >> c) & 1)) {
                work[r] ^= work[c];
                inv[r] ^= inv[c];
            }
    }
    F2Matrix out(n, n);
    out.bits_ = inv;
    return out;
}

namespace f2poly {

int degree(uint64_t p) { return p ? 63 - __builtin_clzll(p) : -1; }

uint64_t mul(uint64_t a, uint64_t b) {
    uint64_t out = 0;
    while (b) {
        int k = __builtin_ctzll(b);
        b &= b - 1;
        out ^= a << k;
    }
    return out;
}

uint64_t mod(uint64_t a, uint64_t b) {
    assert(b != 0);
    int db = degree(b);
    while (degree(a) >= db) a ^= b << (degree(a) - db);
    return a;
}

uint64_t divq(uint64_t a, uint64_t b) {
    assert(b != 0);
    uint64_t q = 0;
    int db = degree(b);
    while (degree(a) >= db) {
        int shift = degree(a) - db;
        q ^= uint64_t{1} << shift;
        a ^= b << shift;
    }
    return q;
}

uint64_t gcd(uint64_t a, uint64_t b) {
    while (b) {
        uint64_t r = mod(a, b);
        a = b;
        b = r;
    }
    return a;
}

std::string to_string(uint64_t p) {
    if (!p) return "0";
    std::string out;
    for (int i = degree(p); i >= 0; --i) {
        if (!((p >> i) & 1)) continue;
        if (!out.empty()) out += "+";
        if (i == 0) out += "1";
        else if (i == 1) out += "x";
        else out += "x^" + std::to_string(i);
    }
    return out;
}

uint64_t parse(const std::string& s) {
    uint64_t p = 0;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '+') { ++i; continue; }
        if (s[i] == '1') { p ^= 1; ++i; continue; }
        if (s[i] == '0') { ++i; continue; }
        if (s[i] == 'x') {
            ++i;
            int e = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                e = 0;
                while (i < s.size() && isdigit(s[i])) e = 10 * e + (s[i++] - '0');
            }
            p ^= uint64_t{1} << e;
            continue;
        }
        throw std::invalid_argument("bad polynomial: " + s);
    }
    return p;
}

}  // namespace f2poly

std::vector<uint64_t> F2Matrix::invariant_factors() const {
    assert(is_square());
    int n = rows_;
    // Smith normal form of xI - A over F2[x]. Entries are polynomial
    // bitmasks; n <= 32 keeps degrees < 64.
    std::vector<std::vector<uint64_t>> m(n, std::vector<uint64_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = get(i, j) ? 1 : 0;
    for (int i = 0; i < n; ++i) m[i][i] ^= 2;  // + x on the diagonal

    auto swap_rows = [&](int a, int b) { std::swap(m[a], m[b]); };
    auto swap_cols = [&](int a, int b) {
        for (int i = 0; i < n; ++i) std::swap(m[i][a], m[i][b]);
    };
    auto row_op = [&](int dst, int src, uint64_t c) {  // row dst += c * row src
        for (int j = 0; j < n; ++j) m[dst][j] ^= f2poly::mul(c, m[src][j]);
    };
    auto col_op = [&](int dst, int src, uint64_t c) {
        for (int i = 0; i < n; ++i) m[i][dst] ^= f2poly::mul(c, m[i][src]);
    };

    for (int t = 0; t < n; ++t) {
        // Find entry of minimal degree in the remaining block.
        for (;;) {
            int bi = -1, bj = -1, bd = 65;
            for (int i = t; i < n; ++i)
                for (int j = t; j < n; ++j)
                    if (m[i][j] && f2poly::degree(m[i][j]) < bd) {
                        bd = f2poly::degree(m[i][j]);
                        bi = i;
                        bj = j;
                    }
            if (bi < 0) break;  // block is zero
            swap_rows(t, bi);
            swap_cols(t, bj);
            bool clean = true;
            for (int i = t + 1; i < n; ++i)
                if (m[i][t]) {
                    row_op(i, t, f2poly::divq(m[i][t], m[t][t]));
                    if (m[i][t]) clean = false;
                }
            for (int j = t + 1; j < n; ++j)
                if (m[t][j]) {
                    col_op(j, t, f2poly::divq(m[t][j], m[t][t]));
                    if (m[t][j]) clean = false;
                }
            if (!clean) continue;
            // Enforce divisibility of the rest by m[t][t].
            bool divides_all = true;
            for (int i = t + 1; i < n && divides_all; ++i)
                for (int j = t + 1; j < n && divides_all; ++j)
                    if (f2poly::mod(m[i][j], m[t][t])) {
                        row_op(t, i, 1);
                        divides_all = false;
                    }
            if (divides_all) break;
        }
    }
    std::vector<uint64_t> factors;
    for (int i = 0; i < n; ++i)
        if (m[i][i] && f2poly::degree(m[i][i]) > 0) factors.push_back(m[i][i]);
    std::sort(factors.begin(), factors.end(), [](uint64_t a, uint64_t b) {
        int da = f2poly::degree(a), db = f2poly::degree(b);
        return da != db ? da < db : a < b;
    });
    return factors;
}

F2Matrix F2Matrix::frobenius_form() const {
    auto factors = invariant_factors();
    int n = 0;
    for (auto f : factors) n += f2poly::degree(f);
    F2Matrix out(n, n);
    int off = 0;
    for (auto f : factors) {
        int d = f2poly::degree(f);
        F2Matrix c = companion(f, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (c.get(i, j)) out.set(off + i, off + j, true);
        off += d;
    }
    return out;
}

bool F2Matrix::similar_to(const F2Matrix& other) const {
    if (!is_square() || !other.is_square() || rows_ != other.rows_) return false;
    return invariant_factors() == other.invariant_factors();
}

std::vector<std::string> F2Matrix::row_strings() const {
    std::vector<std::string> out;
    for (int i = 0; i < rows_; ++i) {
        std::string s(cols_, '0');
        for (int j = 0; j < cols_; ++j)
            if (get(i, j)) s[j] = '1';
        out.push_back(s);
    }
    return out;
}

F2Matrix F2Matrix::from_row_strings(const std::vector<std::string>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows[0].size()) : 0;
    F2Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw std::invalid_argument("ragged matrix rows");
        for (int j = 0; j < c; ++j) {
            if (rows[i][j] != '0' && rows[i][j] != '1')
                throw std::invalid_argument("bad matrix bit");
            if (rows[i][j] == '1') m.set(i, j, true);
        }
    }
    return m;
}

bool f2_solve(std::vector<uint64_t> rows, std::vector<int> rhs, int cols,
              uint64_t* solution) {
    assert(rows.size() == rhs.size());
    int nr = static_cast<int>(rows.size());
    int rank = 0;
    std::vector<int> pivot_col;
    for (int c = 0; c < cols && rank < nr; ++c) {
        int pivot = -1;
        for (int r = rank; r < nr; ++r)
            if ((rows[r] >> c) & 1) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        std::swap(rhs[rank], rhs[pivot]);
        for (int r = 0; r < nr; ++r)
            if (r != rank && ((rows[r] >> c) & 1)) {
                rows[r] ^= rows[rank];
                rhs[r] ^= rhs[rank];
            }
        pivot_col.push_back(c);
        ++rank;
    }
    for (int r = rank; r < nr; ++r)
        if (rhs[r]) return false;
    uint64_t x = 0;
    for (int r = 0; r < rank; ++r)
        if (rhs[r]) x |= uint64_t{1} << pivot_col[r];
    *solution = x;
    return true;
}

}  // namespace pq
