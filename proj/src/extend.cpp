#include <algorithm>
#include <stdexcept>

#include "peculiar/complexes.hpp"

// Extension of a peculiar module to a curved complex over A⁻ with curvature
// p⁴+q⁴+U_{i1}U_{o1}+U_{i2}U_{o2}. The added arrows have labels of positive
// U-degree (the kernel of A⁻ → A∂). Writing ∂ = ∂₀ + ∂₁ + ... by total
// U-degree of the labels, the degree-k part of ∂² = curvature is linear in
// ∂_k once ∂_{<k} is fixed: compositions only ever raise the U-degree.
// Degrees are solved in order, taking the lexicographically least solution.

namespace pq {

namespace {

struct Candidate {
    std::string src, dst;
    MinusBasis label;

    auto tie() const { return std::tuple(src, dst, label); }
    bool operator<(const Candidate& o) const { return tie() < o.tie(); }
};

using TermKey = std::tuple<std::string, std::string, MinusBasis>;

// d² of the given complex, collected as F2 coefficients per term.
std::map<TermKey, int> d_squared(const CurvedComplex& c) {
    std::map<TermKey, int> out;
    for (const auto& e1 : c.entries())
        for (const auto& e2 : c.entries()) {
            if (e2.first.src != e1.first.dst) continue;
            auto prod = multiply_basis(e2.first.label, e1.first.label, c.algebra());
            if (!prod) continue;
            if (!(e2.second * e1.second).is_zero())
                out[{e1.first.src, e2.first.dst, *prod}] ^= 1;
        }
    for (auto it = out.begin(); it != out.end();)
        it = it->second ? std::next(it) : out.erase(it);
    return out;
}

}  // namespace

ExtensionResult extend_over_minus(const CurvedComplex& m_in, const Matching& p,
                                  int u_bound) {
    if (m_in.algebra().tag != AlgebraTag::Full)
        throw std::invalid_argument("extend_over_minus expects a complex over A∂");
    if (auto bad = check_d2(m_in))
        throw std::invalid_argument("extend_over_minus: input fails d²: " +
                                    bad->message);
    CurvedComplex flat = m_in.flattened();

    // Lift to A⁻.
    CurvedComplex ext(Algebra::minus(), p);
    for (const auto& g : flat.generators()) ext.add_generator(g);
    for (const auto& e : flat.entries())
        ext.add_entry(e.first.src, e.first.dst, e.first.label, e.second);

    // Candidate arrows per U-degree.
    std::vector<std::vector<Candidate>> cands(u_bound + 1);
    std::vector<std::array<uint8_t, 4>> monomials;
    {
        for (int a = 0; a <= u_bound; ++a)
            for (int b = 0; a + b <= u_bound; ++b)
                for (int c = 0; a + b + c <= u_bound; ++c)
                    for (int d = 0; a + b + c + d <= u_bound; ++d)
                        if (a + b + c + d > 0)
                            monomials.push_back({static_cast<uint8_t>(a),
                                                 static_cast<uint8_t>(b),
                                                 static_cast<uint8_t>(c),
                                                 static_cast<uint8_t>(d)});
    }
    for (const auto& x : flat.generators())
        for (const auto& y : flat.generators())
            for (const auto& u : monomials) {
                int utot = u[0] + u[1] + u[2] + u[3];
                int len = 2 + x.delta2 - y.delta2 - 2 * utot;
                if (len < 0) continue;
                std::vector<PathBasis> paths;
                if (len == 0) {
                    if (x.idem == y.idem) paths.push_back(PathBasis::idem(x.idem));
                } else {
                    for (auto kind : {PathBasis::Kind::P, PathBasis::Kind::Q}) {
                        int start = kind == PathBasis::Kind::P ? mod4(y.idem + 1)
                                                               : y.idem;
                        PathBasis pb{kind, static_cast<uint8_t>(start),
                                     static_cast<uint16_t>(len)};
                        if (pb.right_idem() == x.idem) paths.push_back(pb);
                    }
                }
                for (const auto& pb : paths) {
                    MinusBasis label{pb, u};
                    if (!alex_congruent_zero(y.alex - x.alex + label.alex(),
                                             std::optional<Matching>(p)))
                        continue;
                    cands[utot].push_back({x.id, y.id, label});
                }
            }
    for (auto& c : cands) std::sort(c.begin(), c.end());

    AlgebraElement curv = curvature_element(Algebra::minus(), p);

    for (int deg = 1; deg <= u_bound; ++deg) {
        // Required degree-deg terms: curvature part minus current d².
        std::map<TermKey, int> rhs;
        for (const auto& g : ext.generators())
            for (const auto& t : curv.terms())
                if (t.u_total() == deg && t.right_idem() == g.idem &&
                    t.left_idem() == g.idem)
                    rhs[{g.id, g.id, t}] ^= 1;
        for (const auto& t : d_squared(ext))
            if (std::get<2>(t.first).u_total() == deg) rhs[t.first] ^= 1;
        for (auto it = rhs.begin(); it != rhs.end();)
            it = it->second ? std::next(it) : rhs.erase(it);

        const auto& vars = cands[deg];
        const int nwords = static_cast<int>(vars.size() / 64 + 1);
        if (vars.empty()) {
            if (!rhs.empty()) {
                auto& k = *rhs.begin();
                return ExtensionResult{
                    false, {}, "unresolvable d² term at U-degree " +
                                   std::to_string(deg) + ": " +
                                   std::get<0>(k.first) + " -> " +
                                   std::get<1>(k.first) + " ⊗ " +
                                   std::get<2>(k.first).to_string()};
            }
            continue;
        }

        // Row space: effect of each candidate on degree-deg terms, i.e. its
        // U-degree-preserving compositions with ∂₀ on either side.
        std::map<TermKey, std::vector<uint64_t>> rows;
        auto flip = [&](std::vector<uint64_t>& row, size_t v) {
            if (row.empty()) row.assign(nwords, 0);
            row[v / 64] ^= uint64_t{1} << (v % 64);
        };
        for (size_t v = 0; v < vars.size(); ++v) {
            const Candidate& c = vars[v];
            for (const auto& e : ext.entries()) {
                if (e.first.label.u_total() != 0) continue;
                if (e.first.src == c.dst) {  // candidate then ∂₀
                    auto prod = multiply_basis(e.first.label,
                                               MinusBasis(c.label), ext.algebra());
                    if (prod && prod->u_total() == deg)
                        flip(rows[{c.src, e.first.dst, *prod}], v);
                }
                if (e.first.dst == c.src) {  // ∂₀ then candidate
                    auto prod = multiply_basis(MinusBasis(c.label),
                                               e.first.label, ext.algebra());
                    if (prod && prod->u_total() == deg)
                        flip(rows[{e.first.src, c.dst, *prod}], v);
                }
            }
        }
        // Assemble and solve the linear system over all touched terms,
        // preferring the all-free-variables-zero solution (variables are in
        // lexicographic order, so this is the lexicographically least one).
        std::map<TermKey, int> rhs_all = rhs;
        for (const auto& r : rows)
            if (!rhs_all.count(r.first)) rhs_all[r.first] = 0;
        std::vector<std::vector<uint64_t>> mat;
        std::vector<int> b;
        for (const auto& t : rhs_all) {
            auto it = rows.find(t.first);
            mat.push_back(it == rows.end() ? std::vector<uint64_t>(nwords, 0)
                                           : it->second);
            b.push_back(t.second);
        }
        auto bit = [](const std::vector<uint64_t>& row, int c) {
            return (row[c / 64] >> (c % 64)) & 1;
        };
        int nr = static_cast<int>(mat.size());
        int rank = 0;
        std::vector<int> pivot_col;
        bool solvable = true;
        for (int c = 0; c < static_cast<int>(vars.size()) && rank < nr; ++c) {
            int pivot = -1;
            for (int r = rank; r < nr; ++r)
                if (bit(mat[r], c)) { pivot = r; break; }
            if (pivot < 0) continue;
            std::swap(mat[rank], mat[pivot]);
            std::swap(b[rank], b[pivot]);
            for (int r = 0; r < nr; ++r)
                if (r != rank && bit(mat[r], c)) {
                    for (int w = 0; w < nwords; ++w) mat[r][w] ^= mat[rank][w];
                    b[r] ^= b[rank];
                }
            pivot_col.push_back(c);
            ++rank;
        }
        for (int r = rank; r < nr; ++r)
            if (b[r]) solvable = false;
        std::vector<uint64_t> solution(nwords, 0);
        for (int r = 0; r < rank; ++r)
            if (b[r]) solution[pivot_col[r] / 64] |= uint64_t{1} << (pivot_col[r] % 64);

        if (!solvable) {
            // Certificate: report the first required term not touched by any
            // candidate if there is one, otherwise the lexicographically
            // first required term.
            auto row_zero = [&](const std::vector<uint64_t>& row) {
                for (auto w : row)
                    if (w) return false;
                return true;
            };
            for (const auto& t : rhs) {
                auto it = rows.find(t.first);
                if (it == rows.end() || row_zero(it->second))
                    return ExtensionResult{
                        false, {}, "unresolvable d² term at U-degree " +
                                       std::to_string(deg) + ": " +
                                       std::get<0>(t.first) + " -> " +
                                       std::get<1>(t.first) + " ⊗ " +
                                       std::get<2>(t.first).to_string()};
            }
            return ExtensionResult{false, {},
                                   "inconsistent linear system at U-degree " +
                                       std::to_string(deg) + " near " +
                                       std::get<0>(rhs.begin()->first) + " -> " +
                                       std::get<1>(rhs.begin()->first) + " ⊗ " +
                                       std::get<2>(rhs.begin()->first).to_string()};
        }
        for (size_t v = 0; v < vars.size(); ++v)
            if ((solution[v / 64] >> (v % 64)) & 1)
                ext.add_entry(vars[v].src, vars[v].dst, vars[v].label,
                              F2Matrix::identity(1));
    }

    if (auto bad = check_d2(ext))
        return ExtensionResult{false, {},
                               "residual d² failure past the U-degree bound: " +
                                   bad->message};
    return ExtensionResult{true, ext, ""};
}

}  // namespace pq
