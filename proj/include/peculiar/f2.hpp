#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Dense linear algebra over the two-element field. Matrices are small
// (local systems rarely exceed dimension 4), so rows are stored as
// 64-bit masks.

namespace pq {

class F2Matrix {
public:
    F2Matrix() : rows_(0), cols_(0) {}
    F2Matrix(int rows, int cols) : rows_(rows), cols_(cols), bits_(rows, 0) {}

    static F2Matrix identity(int n);
    static F2Matrix zero(int rows, int cols) { return F2Matrix(rows, cols); }
    // Companion matrix of x^n + c_{n-1} x^{n-1} + ... + c_0, with the
    // coefficient bitmask c (bit i = c_i).
    static F2Matrix companion(uint64_t poly_mask, int deg);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const { return (bits_[r] >> c) & 1; }
    void set(int r, int c, bool v) {
        if (v) bits_[r] |= (uint64_t{1} << c);
        else bits_[r] &= ~(uint64_t{1} << c);
    }
    void add(int r, int c) { bits_[r] ^= (uint64_t{1} << c); }

    bool is_zero() const;
    bool is_identity() const;
    bool is_square() const { return rows_ == cols_; }

    F2Matrix operator*(const F2Matrix& rhs) const;
    F2Matrix operator+(const F2Matrix& rhs) const;
    bool operator==(const F2Matrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && bits_ == rhs.bits_;
    }
    bool operator!=(const F2Matrix& rhs) const { return !(*this == rhs); }
    bool operator<(const F2Matrix& rhs) const;

    F2Matrix transpose() const;
    int rank() const;
    bool invertible() const { return is_square() && rank() == rows_; }
    // Inverse; matrix must be invertible.
    F2Matrix inverse() const;

    // Invariant factors of the F2[x]-module defined by the matrix
    // (Frobenius/rational canonical form data). Returned as coefficient
    // masks of monic polynomials, each dividing the next, nontrivial
    // factors only. Matrix must be square.
    std::vector<uint64_t> invariant_factors() const;
    // Block diagonal matrix of companion blocks of the invariant factors.
    F2Matrix frobenius_form() const;
    bool similar_to(const F2Matrix& other) const;

    // Rows as bitstrings, e.g. {"10","01"} for the 2x2 identity.
    std::vector<std::string> row_strings() const;
    static F2Matrix from_row_strings(const std::vector<std::string>& rows);

private:
    int rows_, cols_;
    std::vector<uint64_t> bits_;
};

// Polynomials over F2 as bitmasks (bit i = coefficient of x^i).
namespace f2poly {
int degree(uint64_t p);                       // degree, -1 for zero
uint64_t mul(uint64_t a, uint64_t b);
uint64_t mod(uint64_t a, uint64_t b);         // remainder of a by b != 0
uint64_t divq(uint64_t a, uint64_t b);        // quotient of a by b != 0
uint64_t gcd(uint64_t a, uint64_t b);
std::string to_string(uint64_t p);            // e.g. "x^2+x+1"
uint64_t parse(const std::string& s);
}  // namespace f2poly

// Solve A x = b over F2 (A given as row bitmасks over `cols` unknowns
// spread across several 64-bit words when needed is not required here;
// cols <= 64 callers only). Returns true and writes a solution picking
// the lexicographically least free-variable assignment (all free
// variables zero, pivot columns as small as possible).
bool f2_solve(std::vector<uint64_t> rows, std::vector<int> rhs, int cols,
              uint64_t* solution);

}  // namespace pq
