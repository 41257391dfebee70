#include "peculiar/simplify.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <stdexcept>

namespace pq {

static bool trace_enabled() {
    static bool on = [] {
        const char* env = std::getenv("PECULIAR_TRACE");
        return env && *env && std::string(env) != "0";
    }();
    return on;
}

CurvedComplex cancel(const CurvedComplex& m, const EntryKey& e) {
    auto it = m.entries().find(e);
    if (it == m.entries().end()) throw std::invalid_argument("cancel: no such entry");
    if (!e.label.path.is_idem() || e.label.u_total() != 0)
        throw std::invalid_argument("cancel: entry is not an identity component");
    if (e.src == e.dst) throw std::invalid_argument("cancel: src equals dst");
    if (!it->second.invertible())
        throw std::invalid_argument("cancel: coefficient matrix is not invertible");
    if (trace_enabled())
        std::cerr << "cancel " << e.src << " -> " << e.dst << "\n";

    F2Matrix eps_inv = it->second.inverse();
    CurvedComplex out(m.algebra(), m.matching());
    for (const auto& g : m.generators())
        if (g.id != e.src && g.id != e.dst) out.add_generator(g);
    for (const auto& en : m.entries()) {
        if (en.first.src == e.src || en.first.src == e.dst) continue;
        if (en.first.dst == e.src || en.first.dst == e.dst) continue;
        out.add_entry(en.first.src, en.first.dst, en.first.label, en.second);
    }
    // Zig-zag corrections v -> dst, src -> w  ==>  v -> w.
    for (const auto& in : m.in_entries(e.dst)) {
        if (in->first.src == e.src || in->first.src == e.dst) continue;
        for (const auto& outp : m.out_entries(e.src)) {
            if (outp->first.dst == e.dst || outp->first.dst == e.src) continue;
            auto prod =
                multiply_basis(outp->first.label, in->first.label, m.algebra());
            if (!prod) continue;
            F2Matrix coeff = outp->second * (eps_inv * in->second);
            if (coeff.is_zero()) continue;
            out.add_entry(in->first.src, outp->first.dst, *prod, coeff);
        }
    }
    return out;
}

CurvedComplex reduce(const CurvedComplex& m) {
    CurvedComplex cur = m;
    for (;;) {
        const EntryKey* pick = nullptr;
        for (const auto& e : cur.entries()) {
            if (!e.first.label.path.is_idem() || e.first.label.u_total() != 0) continue;
            if (e.first.src == e.first.dst) continue;
            if (!e.second.invertible()) continue;
            pick = &e.first;
            break;  // entries() is ordered: first hit is lexicographically least
        }
        if (!pick) return cur;
        cur = cancel(cur, *pick);
    }
}

CurvedComplex clean_up(const CurvedComplex& m, const std::string& src,
                       const std::string& dst, const MinusBasis& label,
                       const F2Matrix& coeff) {
    if (src == dst) throw std::invalid_argument("clean_up: h must connect distinct "
                                                "generators");
    const Generator& s = m.generator(src);
    const Generator& d = m.generator(dst);
    if (label.right_idem() != s.idem || label.left_idem() != d.idem)
        throw std::invalid_argument("clean_up: idempotent mismatch");
    if (d.delta2 - s.delta2 + label.delta2() != 0)
        throw std::invalid_argument("clean_up: h is not of degree 0");
    if (!alex_congruent_zero(d.alex - s.alex + label.alex(), m.matching()))
        throw std::invalid_argument("clean_up: h does not preserve the Alexander "
                                    "grading");
    if (coeff.rows() != d.dim || coeff.cols() != s.dim)
        throw std::invalid_argument("clean_up: matrix shape mismatch");

    // h∂h = 0: the only way a composite src -> dst -> src -> dst arises.
    for (const auto& mid : m.out_entries(dst)) {
        if (mid->first.dst != src) continue;
        auto p1 = multiply_basis(mid->first.label, label, m.algebra());
        if (!p1) continue;
        auto p2 = multiply_basis(label, *p1, m.algebra());
        if (!p2) continue;
        F2Matrix mat = coeff * (mid->second * coeff);
        if (!mat.is_zero())
            throw std::invalid_argument("clean_up: h∂h != 0 via composite " +
                                        p2->to_string());
    }
    if (trace_enabled())
        std::cerr << "clean_up " << src << " -> " << dst << " by "
                  << label.to_string() << "\n";

    CurvedComplex out(m.algebra(), m.matching());
    for (const auto& g : m.generators()) out.add_generator(g);
    for (const auto& e : m.entries())
        out.add_entry(e.first.src, e.first.dst, e.first.label, e.second);
    // h∂: arrows w -> src become w -> dst.
    for (const auto& in : m.in_entries(src)) {
        auto prod = multiply_basis(label, in->first.label, m.algebra());
        if (!prod) continue;
        F2Matrix mat = coeff * in->second;
        if (!mat.is_zero()) out.add_entry(in->first.src, dst, *prod, mat);
    }
    // ∂h: arrows dst -> w become src -> w.
    for (const auto& outp : m.out_entries(dst)) {
        auto prod = multiply_basis(outp->first.label, label, m.algebra());
        if (!prod) continue;
        F2Matrix mat = outp->second * coeff;
        if (!mat.is_zero()) out.add_entry(src, outp->first.dst, *prod, mat);
    }
    return out;
}

bool is_loop_form(const CurvedComplex& m) {
    if (!m.is_reduced()) return false;
    std::map<std::string, std::array<int, 2>> valence;  // p-arrows, q-arrows
    for (const auto& g : m.generators()) valence[g.id] = {0, 0};
    for (const auto& e : m.entries()) {
        if (e.first.label.u_total() != 0) return false;
        int side = e.first.label.path.kind == PathBasis::Kind::P ? 0 : 1;
        // A matrix-weighted arrow counts once at each endpoint.
        valence[e.first.src][side] += 1;
        valence[e.first.dst][side] += 1;
    }
    // Over the full algebra each elementary segment appears as a pair of
    // arrows (both directions); over a quotient only one survives. Either
    // way, each generator must meet exactly one segment of each type, so
    // admissible valences are 1 (one direction) or 2 (a directed pair with
    // the same underlying segment, i.e. between the same two generators).
    for (const auto& g : m.generators()) {
        for (int side = 0; side < 2; ++side) {
            int v = valence[g.id][side];
            if (v == 1) continue;
            if (v != 2) return false;
            // Must be a single segment seen from both ends.
            std::vector<const EntryKey*> touching;
            for (const auto& e : m.entries()) {
                int s = e.first.label.path.kind == PathBasis::Kind::P ? 0 : 1;
                if (s != side) continue;
                if (e.first.src == g.id || e.first.dst == g.id)
                    touching.push_back(&e.first);
            }
            if (touching.size() != 2) return false;
            if (touching[0]->src != touching[1]->dst ||
                touching[0]->dst != touching[1]->src)
                return false;
        }
    }
    return true;
}

namespace {

// Right divisibility of same-kind paths: longer = ext · shorter.
std::optional<PathBasis> right_complement(const PathBasis& shorter,
                                          const PathBasis& longer) {
    if (shorter.kind != longer.kind || shorter.is_idem() || longer.is_idem())
        return std::nullopt;
    if (shorter.len >= longer.len) return std::nullopt;
    if (shorter.right_idem() != longer.right_idem()) return std::nullopt;
    return PathBasis{longer.kind, longer.start,
                     static_cast<uint16_t>(longer.len - shorter.len)};
}

// Left divisibility: longer = shorter · ext.
std::optional<PathBasis> left_complement(const PathBasis& shorter,
                                         const PathBasis& longer) {
    if (shorter.kind != longer.kind || shorter.is_idem() || longer.is_idem())
        return std::nullopt;
    if (shorter.len >= longer.len) return std::nullopt;
    if (shorter.left_idem() != longer.left_idem()) return std::nullopt;
    int start = longer.kind == PathBasis::Kind::P
                    ? mod4(longer.start + shorter.len)
                    : mod4(longer.start - shorter.len);
    return PathBasis{longer.kind, static_cast<uint8_t>(start),
                     static_cast<uint16_t>(longer.len - shorter.len)};
}

}  // namespace

CurvedComplex to_loop_form(const CurvedComplex& m) {
    if (m.algebra().tag == AlgebraTag::Minus)
        throw std::invalid_argument("to_loop_form is not defined over A⁻");
    CurvedComplex cur = reduce(m);
    long cap = 10L * cur.generators().size() * cur.generators().size() + 10;
    for (long step = 0; step < cap; ++step) {
        if (is_loop_form(cur)) return cur;
        // Find a pushable pair: two same-kind arrows out of (or into) the
        // same generator; shorten the longer toward the shorter. Entries are
        // scanned in key order, which makes the pick deterministic.
        bool pushed = false;
        for (auto longer = cur.entries().begin();
             longer != cur.entries().end() && !pushed; ++longer) {
            for (auto shorter = cur.entries().begin();
                 shorter != cur.entries().end(); ++shorter) {
                if (shorter == longer) continue;
                const EntryKey& lk = longer->first;
                const EntryKey& sk = shorter->first;
                if (lk.label.u_total() || sk.label.u_total()) continue;
                // Outgoing siblings: h cancels `longer` via h∂.
                if (lk.src == sk.src && lk.dst != sk.dst) {
                    auto ext = right_complement(sk.label.path, lk.label.path);
                    if (ext && shorter->second.invertible()) {
                        F2Matrix h = longer->second * shorter->second.inverse();
                        try {
                            cur = clean_up(cur, sk.dst, lk.dst, MinusBasis(*ext), h);
                            pushed = true;
                            break;
                        } catch (const std::invalid_argument&) {
                        }
                    }
                }
                // Ingoing siblings: h cancels `longer` via ∂h.
                if (lk.dst == sk.dst && lk.src != sk.src) {
                    auto ext = left_complement(sk.label.path, lk.label.path);
                    if (ext && shorter->second.invertible()) {
                        F2Matrix h = shorter->second.inverse() * longer->second;
                        try {
                            cur = clean_up(cur, lk.src, sk.src, MinusBasis(*ext), h);
                            pushed = true;
                            break;
                        } catch (const std::invalid_argument&) {
                        }
                    }
                }
            }
        }
        if (pushed) {
            cur = reduce(cur);
            continue;
        }
        throw std::runtime_error("to_loop_form: no pushable arrow pair; dump:\n" +
                                 cur.to_text());
    }
    throw std::runtime_error("to_loop_form: iteration cap exceeded; dump:\n" +
                             cur.to_text());
}

std::vector<CurvedComplex> decompose(const CurvedComplex& m) {
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> find =
        [&](const std::string& x) -> std::string {
        auto& p = parent[x];
        if (p.empty() || p == x) return p = x;
        return p = find(p);
    };
    for (const auto& g : m.generators()) find(g.id);
    for (const auto& e : m.entries()) parent[find(e.first.src)] = find(e.first.dst);
    std::map<std::string, CurvedComplex> comps;
    for (const auto& g : m.generators()) {
        std::string root = find(g.id);
        if (!comps.count(root)) comps[root] = CurvedComplex(m.algebra(), m.matching());
        comps[root].add_generator(g);
    }
    for (const auto& e : m.entries())
        comps[find(e.first.src)].add_entry(e.first.src, e.first.dst, e.first.label,
                                           e.second);
    std::vector<CurvedComplex> out;
    for (auto& c : comps) out.push_back(std::move(c.second));
    return out;
}

}  // namespace pq
