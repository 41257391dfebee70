#include "peculiar/complexes.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace pq {

// ------------------------------------------------------------ CurvedComplex

void CurvedComplex::add_generator(Generator g) {
    if (index_.count(g.id)) throw std::invalid_argument("duplicate generator " + g.id);
    if (g.dim < 1) throw std::invalid_argument("generator dim must be >= 1");
    auto it = std::lower_bound(gens_.begin(), gens_.end(), g);
    size_t pos = it - gens_.begin();
    gens_.insert(it, std::move(g));
    index_.clear();
    for (size_t i = 0; i < gens_.size(); ++i) index_[gens_[i].id] = i;
}

const Generator& CurvedComplex::generator(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("no generator " + id);
    return gens_[it->second];
}

bool CurvedComplex::has_generator(const std::string& id) const {
    return index_.count(id) > 0;
}

int CurvedComplex::total_dim() const {
    int n = 0;
    for (const auto& g : gens_) n += g.dim;
    return n;
}

void CurvedComplex::add_entry(const std::string& src, const std::string& dst,
                              const MinusBasis& label, const F2Matrix& coeff) {
    const Generator& s = generator(src);
    const Generator& d = generator(dst);
    if (!alg_.admits(label))
        throw std::invalid_argument("label " + label.to_string() + " not in " +
                                    alg_.to_string());
    if (label.right_idem() != s.idem || label.left_idem() != d.idem)
        throw std::invalid_argument("idempotent mismatch on " + src + "->" + dst +
                                    " label " + label.to_string());
    if (coeff.rows() != d.dim || coeff.cols() != s.dim)
        throw std::invalid_argument("matrix shape mismatch on " + src + "->" + dst);
    if (d.delta2 - s.delta2 + label.delta2() != 2)
        throw std::invalid_argument("delta-grading violation on " + src + "->" + dst +
                                    " label " + label.to_string());
    if (!alex_congruent_zero(d.alex - s.alex + label.alex(), matching_))
        throw std::invalid_argument("Alexander-grading violation on " + src + "->" +
                                    dst + " label " + label.to_string());
    EntryKey key{src, dst, label};
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        if (!coeff.is_zero()) entries_.emplace(key, coeff);
    } else {
        it->second = it->second + coeff;
        if (it->second.is_zero()) entries_.erase(it);
    }
}

void CurvedComplex::add_entry(const std::string& src, const std::string& dst,
                              const MinusBasis& label) {
    add_entry(src, dst, label, F2Matrix::identity(1));
}

std::vector<const std::pair<const EntryKey, F2Matrix>*> CurvedComplex::out_entries(
    const std::string& src) const {
    std::vector<const std::pair<const EntryKey, F2Matrix>*> out;
    for (const auto& e : entries_)
        if (e.first.src == src) out.push_back(&e);
    return out;
}

std::vector<const std::pair<const EntryKey, F2Matrix>*> CurvedComplex::in_entries(
    const std::string& dst) const {
    std::vector<const std::pair<const EntryKey, F2Matrix>*> out;
    for (const auto& e : entries_)
        if (e.first.dst == dst) out.push_back(&e);
    return out;
}

bool CurvedComplex::is_reduced() const {
    for (const auto& e : entries_)
        if (e.first.label.path.is_idem() && e.first.label.u_total() == 0) return false;
    return true;
}

CurvedComplex CurvedComplex::flattened() const {
    CurvedComplex out(alg_, matching_);
    for (const auto& g : gens_) {
        if (g.dim == 1) {
            out.add_generator(g);
            continue;
        }
        for (int k = 0; k < g.dim; ++k) {
            Generator h = g;
            h.id = g.id + "." + std::to_string(k);
            h.dim = 1;
            out.add_generator(h);
        }
    }
    auto name = [&](const std::string& id, int k) {
        return generator(id).dim == 1 ? id : id + "." + std::to_string(k);
    };
    for (const auto& e : entries_) {
        for (int r = 0; r < e.second.rows(); ++r)
            for (int c = 0; c < e.second.cols(); ++c)
                if (e.second.get(r, c))
                    out.add_entry(name(e.first.src, c), name(e.first.dst, r),
                                  e.first.label);
    }
    return out;
}

void CurvedComplex::rename_generators(const std::string& prefix) {
    std::map<std::string, std::string> renaming;
    int k = 0;
    for (const auto& g : gens_) renaming[g.id] = prefix + std::to_string(k++);
    std::vector<Generator> gens = std::move(gens_);
    std::map<EntryKey, F2Matrix> entries = std::move(entries_);
    gens_.clear();
    entries_.clear();
    index_.clear();
    for (auto& g : gens) {
        g.id = renaming[g.id];
        add_generator(g);
    }
    for (const auto& e : entries)
        add_entry(renaming[e.first.src], renaming[e.first.dst], e.first.label,
                  e.second);
}

// ---------------------------------------------------------------- check_d2

std::optional<D2Violation> check_d2(const CurvedComplex& m) {
    AlgebraElement curv = m.curvature();
    // Accumulate d² as (src, dst) -> label -> matrix.
    std::map<std::pair<std::string, std::string>, std::map<MinusBasis, F2Matrix>> dd;
    for (const auto& e1 : m.entries()) {
        for (const auto& e2 : m.entries()) {
            if (e2.first.src != e1.first.dst) continue;
            auto prod = multiply_basis(e2.first.label, e1.first.label, m.algebra());
            if (!prod) continue;
            F2Matrix mat = e2.second * e1.second;
            if (mat.is_zero()) continue;
            auto& slot = dd[{e1.first.src, e2.first.dst}][*prod];
            if (slot.rows() == 0) slot = mat;
            else slot = slot + mat;
        }
    }
    // Expected: curvature times identity on the diagonal.
    for (const auto& g : m.generators()) {
        for (const auto& t : curv.terms()) {
            if (t.right_idem() != g.idem || t.left_idem() != g.idem) continue;
            auto& slot = dd[{g.id, g.id}][t];
            if (slot.rows() == 0) slot = F2Matrix::identity(g.dim);
            else slot = slot + F2Matrix::identity(g.dim);
        }
    }
    for (const auto& pair : dd)
        for (const auto& term : pair.second)
            if (!term.second.is_zero())
                return D2Violation{pair.first.first, pair.first.second, term.first,
                                   "d2 mismatch at " + pair.first.first + "->" +
                                       pair.first.second + " term " +
                                       term.first.to_string()};
    return std::nullopt;
}

// --------------------------------------------------------------- transforms

void CurvedComplex::copy_entries_unchecked(const CurvedComplex& other) {
    for (const auto& e : other.entries()) {
        if (!has_generator(e.first.src) || !has_generator(e.first.dst))
            throw std::invalid_argument("copy_entries_unchecked: missing generator");
        entries_[e.first] = e.second;
    }
}

CurvedComplex rr(const CurvedComplex& m) {
    CurvedComplex out(m.algebra(), m.matching());
    for (auto g : m.generators()) {
        g.alex = g.alex.negated();
        out.add_generator(g);
    }
    out.copy_entries_unchecked(m);
    return out;
}

CurvedComplex rr34(const CurvedComplex& m) {
    CurvedComplex out(m.algebra(), m.matching());
    for (auto g : m.generators()) {
        g.alex = g.alex.swapped34();
        out.add_generator(g);
    }
    out.copy_entries_unchecked(m);
    return out;
}

CurvedComplex tensor_V(const CurvedComplex& m, int end) {
    CurvedComplex out(m.algebra(), m.matching());
    std::array<int, 4> up{0, 0, 0, 0}, down{0, 0, 0, 0};
    up[end - 1] = 2;
    down[end - 1] = -2;
    for (const auto& g : m.generators()) {
        Generator a = g, b = g;
        a.id = g.id + "^";
        a.alex = g.alex + AlexVec(up);
        b.id = g.id + "_";
        b.alex = g.alex + AlexVec(down);
        out.add_generator(a);
        out.add_generator(b);
    }
    for (const auto& e : m.entries()) {
        out.add_entry(e.first.src + "^", e.first.dst + "^", e.first.label, e.second);
        out.add_entry(e.first.src + "_", e.first.dst + "_", e.first.label, e.second);
    }
    return out;
}

CurvedComplex apply_quotient(const CurvedComplex& m, int i, int j) {
    if (m.algebra().tag != AlgebraTag::Full)
        throw std::invalid_argument("apply_quotient expects a complex over A∂");
    CurvedComplex out(Algebra::quotient(i, j), m.matching());
    for (const auto& g : m.generators()) out.add_generator(g);
    for (const auto& e : m.entries()) {
        if (e.first.label.path.contains_letter(PathBasis::Kind::P, i)) continue;
        if (e.first.label.path.contains_letter(PathBasis::Kind::Q, j)) continue;
        out.add_entry(e.first.src, e.first.dst, e.first.label, e.second);
    }
    return out;
}

CurvedComplex relabel_complex(const CurvedComplex& m, const Relabel& r) {
    CurvedComplex out(r.apply(m.algebra()), m.matching());
    for (auto g : m.generators()) {
        g.idem = r.idem_perm[g.idem - 1];
        g.alex = g.alex.permuted(r.letter_perm);
        out.add_generator(g);
    }
    for (const auto& e : m.entries())
        out.add_entry(e.first.src, e.first.dst, r.apply(e.first.label), e.second);
    return out;
}

AlexVec aside_twist(ASideAlex conv, const AlexVec& v) {
    switch (conv) {
        case ASideAlex::Standard: return v;
        case ASideAlex::Negated: return v.negated();
        case ASideAlex::Swap12: return v.permuted({2, 1, 3, 4});
        case ASideAlex::Swap23: return v.permuted({1, 3, 2, 4});
        case ASideAlex::Swap34: return v.permuted({1, 2, 4, 3});
        case ASideAlex::Swap14: return v.permuted({4, 2, 3, 1});
    }
    return v;
}

std::string aside_name(ASideAlex conv) {
    switch (conv) {
        case ASideAlex::Standard: return "standard";
        case ASideAlex::Negated: return "negated";
        case ASideAlex::Swap12: return "swap12";
        case ASideAlex::Swap23: return "swap23";
        case ASideAlex::Swap34: return "swap34";
        case ASideAlex::Swap14: return "swap14";
    }
    return "?";
}

ASideAlex aside_parse(const std::string& s) {
    for (auto c : {ASideAlex::Standard, ASideAlex::Negated, ASideAlex::Swap12,
                   ASideAlex::Swap23, ASideAlex::Swap34, ASideAlex::Swap14})
        if (aside_name(c) == s) return c;
    throw std::invalid_argument("bad aconv: " + s);
}

// ---------------------------------------------------------------- ADBimodule

bool ADActionKey::operator<(const ADActionKey& o) const {
    return tie() < o.tie();
}

void ADBimodule::add_generator(ADGenerator g) {
    if (index_.count(g.id)) throw std::invalid_argument("duplicate AD generator " + g.id);
    index_[g.id] = gens_.size();
    gens_.push_back(std::move(g));
}

const ADGenerator& ADBimodule::generator(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("no AD generator " + id);
    return gens_[it->second];
}

void ADBimodule::add_action(const std::string& src, std::vector<PathBasis> inputs,
                            const std::string& dst, const MinusBasis& out) {
    const ADGenerator& s = generator(src);
    const ADGenerator& d = generator(dst);
    // Inputs are consumed first-to-last; each moves the A-side idempotent.
    int idem = s.a_idem;
    for (const auto& in : inputs) {
        if (in.is_idem())
            throw std::invalid_argument("idempotent input recorded (not strictly unital)");
        if (!a_.admits(MinusBasis(in)))
            throw std::invalid_argument("input not in A-side algebra");
        if (in.right_idem() != idem)
            throw std::invalid_argument("input idempotent mismatch at " + src);
        idem = in.left_idem();
    }
    if (idem != d.a_idem)
        throw std::invalid_argument("A-side idempotent mismatch " + src + "->" + dst);
    if (!d_.admits(out)) throw std::invalid_argument("output not in D-side algebra");
    if (out.right_idem() != s.d_idem || out.left_idem() != d.d_idem)
        throw std::invalid_argument("D-side idempotent mismatch " + src + "->" + dst);
    int n = static_cast<int>(inputs.size());
    int din = 0;
    AlexVec ain;
    for (const auto& in : inputs) {
        din += in.delta2();
        ain = ain + in.alex();
    }
    if (d.delta2 - s.delta2 + out.delta2() - din != 2 - 2 * n)
        throw std::invalid_argument("AD action delta-grading violation " + src + "->" +
                                    dst);
    AlexVec twisted = aside_twist(conv_, ain);
    if (!alex_congruent_zero(d.alex - s.alex + out.alex() - twisted, std::nullopt))
        throw std::invalid_argument("AD action Alexander-grading violation " + src +
                                    "->" + dst);
    ADActionKey key{src, std::move(inputs)};
    auto& set = actions_[key];
    ADOutput o{dst, out};
    if (set.count(o)) {
        set.erase(o);
        if (set.empty()) actions_.erase(key);
    } else {
        set.insert(o);
    }
    max_input_len_ = 0;
    for (const auto& a : actions_)
        max_input_len_ = std::max(max_input_len_, static_cast<int>(a.first.inputs.size()));
}

const std::set<ADOutput>* ADBimodule::action(const std::string& src,
                                             const std::vector<PathBasis>& inputs) const {
    auto it = actions_.find(ADActionKey{src, inputs});
    return it == actions_.end() ? nullptr : &it->second;
}

std::optional<std::string> ADBimodule::check_relations() const {
    // Collect, per A-side idempotent, basis paths whose right idempotent is
    // that idempotent (candidates for the next input).
    std::vector<PathBasis> paths = a_.path_basis(8);
    std::array<std::vector<PathBasis>, 5> by_right;
    for (const auto& p : paths)
        if (!p.is_idem()) by_right[p.right_idem()].push_back(p);

    for (const auto& g : gens_) {
        // Enumerate compatible input chains up to length max_input_len_ + 1.
        std::vector<std::vector<PathBasis>> chains{{}};
        for (int len = 0; len <= max_input_len_; ++len) {
            std::vector<std::vector<PathBasis>> next;
            for (const auto& ch : chains) {
                if (static_cast<int>(ch.size()) != len) continue;
                int idem = ch.empty() ? g.a_idem : ch.back().left_idem();
                for (const auto& p : by_right[idem]) {
                    auto ext = ch;
                    ext.push_back(p);
                    next.push_back(ext);
                }
            }
            for (auto& c : next) chains.push_back(std::move(c));
        }
        // The empty chain checks the n = 0 relation δ1∘δ1 = 0 (the D-side
        // algebras here have zero curvature).
        for (const auto& chain : chains) {
            std::map<std::pair<std::string, MinusBasis>, int> sum;
            int n = static_cast<int>(chain.size());
            // Split terms.
            for (int i = 0; i <= n; ++i) {
                std::vector<PathBasis> first(chain.begin(), chain.begin() + i);
                std::vector<PathBasis> second(chain.begin() + i, chain.end());
                const auto* act1 = action(g.id, first);
                if (!act1) continue;
                for (const auto& o1 : *act1) {
                    const auto* act2 = action(o1.dst, second);
                    if (!act2) continue;
                    for (const auto& o2 : *act2) {
                        auto prod = multiply_basis(o2.out, o1.out, d_);
                        if (!prod) continue;
                        sum[{o2.dst, *prod}] ^= 1;
                    }
                }
            }
            // μ-terms on adjacent inputs.
            for (int k = 0; k + 1 < n; ++k) {
                auto prod = multiply_basis(MinusBasis(chain[k + 1]),
                                           MinusBasis(chain[k]), a_);
                if (!prod) continue;
                std::vector<PathBasis> contracted;
                for (int t = 0; t < n; ++t) {
                    if (t == k) {
                        if (prod->path.is_idem())
                            throw std::logic_error("unexpected idempotent product");
                        contracted.push_back(prod->path);
                    } else if (t != k + 1) {
                        contracted.push_back(chain[t]);
                    }
                }
                const auto* act = action(g.id, contracted);
                if (!act) continue;
                for (const auto& o : *act) sum[{o.dst, o.out}] ^= 1;
            }
            for (const auto& s : sum)
                if (s.second) {
                    std::string desc = "AD relation fails at " + g.id + " inputs (";
                    for (size_t t = 0; t < chain.size(); ++t) {
                        if (t) desc += ",";
                        desc += chain[t].to_string();
                    }
                    desc += "): surviving term " + s.first.first + " ⊗ " +
                            s.first.second.to_string();
                    return desc;
                }
        }
    }
    return std::nullopt;
}

// --------------------------------------------------------------- box tensor

CurvedComplex box_tensor(const CurvedComplex& m, const ADBimodule& b) {
    if (m.algebra() != b.a_side())
        throw std::invalid_argument("box_tensor: module algebra does not match the "
                                    "bimodule A side");
    CurvedComplex out(b.d_side(), m.matching());
    for (const auto& x : m.generators())
        for (const auto& g : b.generators())
            if (x.idem == g.a_idem) {
                Generator h;
                h.id = x.id + "|" + g.id;
                h.idem = g.d_idem;
                h.delta2 = x.delta2 + g.delta2;
                h.alex = x.alex + g.alex;
                h.dim = x.dim;
                out.add_generator(h);
            }
    // Differential: chains of module differentials feeding the actions.
    struct Chain {
        std::string end;
        std::vector<PathBasis> inputs;
        F2Matrix coeff;
    };
    for (const auto& x : m.generators()) {
        std::vector<Chain> chains{{x.id, {}, F2Matrix::identity(x.dim)}};
        for (size_t i = 0; i < chains.size(); ++i) {
            Chain ch = chains[i];  // copy: vector may reallocate
            if (static_cast<int>(ch.inputs.size()) < b.max_input_len()) {
                for (const auto* e : m.out_entries(ch.end)) {
                    if (e->first.label.u_total() != 0)
                        throw std::invalid_argument("box_tensor over U-labels");
                    Chain ext;
                    ext.end = e->first.dst;
                    ext.inputs = ch.inputs;
                    ext.inputs.push_back(e->first.label.path);
                    ext.coeff = e->second * ch.coeff;
                    if (!ext.coeff.is_zero()) chains.push_back(std::move(ext));
                }
            }
            for (const auto& g : b.generators()) {
                if (g.a_idem != x.idem) continue;
                const auto* act = b.action(g.id, ch.inputs);
                if (!act) continue;
                for (const auto& o : *act)
                    out.add_entry(x.id + "|" + g.id, ch.end + "|" + o.dst, o.out,
                                  ch.coeff);
            }
        }
    }
    return out;
}

// ------------------------------------------------------------- GradedRanks

int GradedRanks::total() const {
    int t = 0;
    for (const auto& r : ranks) t += r.second;
    return t;
}

std::map<int, int> GradedRanks::delta_ranks() const {
    std::map<int, int> out;
    for (const auto& r : ranks)
        if (r.second) out[r.first.first] += r.second;
    return out;
}

static std::string half_str(int doubled) {
    if (doubled % 2 == 0) return std::to_string(doubled / 2);
    return std::to_string(doubled) + "/2";
}

std::string GradedRanks::to_string() const {
    std::string out;
    for (const auto& r : ranks) {
        if (!r.second) continue;
        out += "d^" + half_str(r.first.first) + " " + r.first.second.to_string() +
               " : " + std::to_string(r.second) + "\n";
    }
    out += "total : " + std::to_string(total()) + "\n";
    return out;
}

}  // namespace pq
