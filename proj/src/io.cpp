#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "peculiar/complexes.hpp"

// Line-based text formats.
//
// Module:
//   module <tag> curvature <elt> [matching <iioo|iioo>]
//   gen <name> <site> <delta> <A4>
//   arr <src> <dst> <elt> [<matrix rows as bitstrings>]
//
// Bimodule:
//   bimodule <name> aside <tag> dside <tag> aconv <standard|negated|swap34>
//   gen <name> <a-site> <d-site> <delta> <A4>
//   act <src> <inputs|-> <dst> <out>
//
// Generators are listed lexicographically, entries by (src, dst, term);
// parse ∘ print is the identity.

namespace pq {

static std::string half(int doubled) {
    if (doubled % 2 == 0) return std::to_string(doubled / 2);
    return std::to_string(doubled) + "/2";
}

static int parse_half_tok(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return 2 * std::stoi(s);
    return std::stoi(s.substr(0, slash));
}

static std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string CurvedComplex::to_text() const {
    std::ostringstream out;
    out << "module " << alg_.to_string() << " curvature "
        << curvature().to_string();
    if (matching_) out << " matching " << matching_->to_string();
    out << "\n";
    for (const auto& g : gens_) {
        out << "gen " << g.id << " " << site_char(g.idem) << " " << half(g.delta2)
            << " " << g.alex.to_string();
        if (g.dim != 1) out << " dim " << g.dim;
        out << "\n";
    }
    for (const auto& e : entries_) {
        out << "arr " << e.first.src << " " << e.first.dst << " "
            << e.first.label.to_string();
        if (!(e.second.rows() == 1 && e.second.cols() == 1 && !e.second.is_zero())) {
            for (const auto& row : e.second.row_strings()) out << " " << row;
        }
        out << "\n";
    }
    return out.str();
}

CurvedComplex CurvedComplex::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CurvedComplex m;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tok = split_ws(line);
        if (tok[0] == "module") {
            Algebra alg = Algebra::parse(tok.at(1));
            std::optional<Matching> matching;
            for (size_t i = 2; i + 1 < tok.size(); ++i)
                if (tok[i] == "matching") matching = Matching::parse(tok[i + 1]);
            m = CurvedComplex(alg, matching);
            have_header = true;
        } else if (tok[0] == "gen") {
            if (!have_header) throw std::invalid_argument("gen before module header");
            Generator g;
            g.id = tok.at(1);
            g.idem = site_index(tok.at(2)[0]);
            g.delta2 = parse_half_tok(tok.at(3));
            g.alex = AlexVec::parse(tok.at(4));
            if (tok.size() >= 7 && tok[5] == "dim") g.dim = std::stoi(tok[6]);
            m.add_generator(g);
        } else if (tok[0] == "arr") {
            if (!have_header) throw std::invalid_argument("arr before module header");
            MinusBasis label = AlgebraElement::parse(m.algebra(), tok.at(3)).terms().at(0);
            F2Matrix coeff;
            if (tok.size() > 4) {
                std::vector<std::string> rows(tok.begin() + 4, tok.end());
                coeff = F2Matrix::from_row_strings(rows);
            } else {
                int r = m.generator(tok.at(2)).dim;
                int c = m.generator(tok.at(1)).dim;
                if (r != 1 || c != 1)
                    throw std::invalid_argument("matrix required for arr " + line);
                coeff = F2Matrix::identity(1);
            }
            m.add_entry(tok.at(1), tok.at(2), label, coeff);
        } else {
            throw std::invalid_argument("bad module line: " + line);
        }
    }
    if (!have_header) throw std::invalid_argument("missing module header");
    return m;
}

std::string ADBimodule::to_text() const {
    std::ostringstream out;
    out << "bimodule " << name_ << " aside " << a_.to_string() << " dside "
        << d_.to_string() << " aconv " << aside_name(conv_) << "\n";
    std::vector<ADGenerator> gens = gens_;
    std::sort(gens.begin(), gens.end(),
              [](const ADGenerator& a, const ADGenerator& b) { return a.id < b.id; });
    for (const auto& g : gens)
        out << "gen " << g.id << " " << site_char(g.a_idem) << " "
            << site_char(g.d_idem) << " " << half(g.delta2) << " "
            << g.alex.to_string() << "\n";
    for (const auto& a : actions_) {
        std::string ins;
        for (const auto& p : a.first.inputs) {
            if (!ins.empty()) ins += ",";
            ins += p.to_string();
        }
        if (ins.empty()) ins = "-";
        for (const auto& o : a.second)
            out << "act " << a.first.src << " " << ins << " " << o.dst << " "
                << o.out.to_string() << "\n";
    }
    return out.str();
}

ADBimodule ADBimodule::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    ADBimodule b;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tok = split_ws(line);
        if (tok[0] == "bimodule") {
            Algebra a = Algebra::full(), d = Algebra::full();
            ASideAlex conv = ASideAlex::Standard;
            for (size_t i = 2; i + 1 < tok.size(); i += 2) {
                if (tok[i] == "aside") a = Algebra::parse(tok[i + 1]);
                else if (tok[i] == "dside") d = Algebra::parse(tok[i + 1]);
                else if (tok[i] == "aconv") conv = aside_parse(tok[i + 1]);
            }
            b = ADBimodule(tok.at(1), a, d, conv);
            have_header = true;
        } else if (tok[0] == "gen") {
            if (!have_header) throw std::invalid_argument("gen before bimodule header");
            ADGenerator g;
            g.id = tok.at(1);
            g.a_idem = site_index(tok.at(2)[0]);
            g.d_idem = site_index(tok.at(3)[0]);
            g.delta2 = parse_half_tok(tok.at(4));
            g.alex = AlexVec::parse(tok.at(5));
            b.add_generator(g);
        } else if (tok[0] == "act") {
            std::vector<PathBasis> inputs;
            if (tok.at(2) != "-") {
                std::stringstream ss(tok.at(2));
                std::string item;
                while (std::getline(ss, item, ',')) {
                    auto terms = AlgebraElement::parse(b.a_side(), item).terms();
                    inputs.push_back(terms.at(0).path);
                }
            }
            MinusBasis out = AlgebraElement::parse(b.d_side(), tok.at(4)).terms().at(0);
            b.add_action(tok.at(1), std::move(inputs), tok.at(3), out);
        } else {
            throw std::invalid_argument("bad bimodule line: " + line);
        }
    }
    if (!have_header) throw std::invalid_argument("missing bimodule header");
    return b;
}

// ------------------------------------------------- graded isomorphism check

namespace {

struct IsoClass {
    int idem, delta2, dim;
    AlexVec alex;  // class key mod the grading relations
    auto tie() const { return std::tuple(idem, delta2, alex.doubled(), dim); }
    bool operator<(const IsoClass& o) const { return tie() < o.tie(); }
};

}  // namespace

bool CurvedComplex::isomorphic_graded(const CurvedComplex& other) const {
    // Backtracking search for a label- and grading-preserving bijection.
    // Gradings are compared up to an overall shift.
    if (alg_ != other.alg_) return false;
    if (gens_.size() != other.gens_.size()) return false;
    if (entries_.size() != other.entries_.size()) return false;
    if (gens_.empty()) return true;

    // Normalize gradings: shift so the lexicographically least
    // (idem, alex, delta2, dim) class starts at zero.
    auto classes = [this](const CurvedComplex& m, int dshift, const AlexVec& ashift) {
        std::map<IsoClass, std::vector<std::string>> by;
        for (const auto& g : m.generators())
            by[IsoClass{g.idem, g.delta2 - dshift, g.dim,
                        alex_key(g.alex - ashift, matching_)}]
                .push_back(g.id);
        return by;
    };
    const Generator* base = &gens_[0];
    for (const auto& g : gens_)
        if (std::tuple(g.idem, g.alex.doubled(), g.delta2, g.dim) <
            std::tuple(base->idem, base->alex.doubled(), base->delta2, base->dim))
            base = &g;
    // Try matching `base` with each generator of the same idem in `other`.
    for (const auto& h : other.gens_) {
        if (h.idem != base->idem || h.dim != base->dim) continue;
        int dshift = h.delta2 - base->delta2;
        AlexVec ashift = h.alex - base->alex;
        auto mine = classes(*this, 0, AlexVec());
        auto theirs = classes(other, dshift, ashift);
        if (mine.size() != theirs.size()) continue;
        bool sizes_ok = true;
        for (const auto& c : mine) {
            auto it = theirs.find(c.first);
            if (it == theirs.end() || it->second.size() != c.second.size()) {
                sizes_ok = false;
                break;
            }
        }
        if (!sizes_ok) continue;

        // Backtracking over per-class permutations.
        std::map<std::string, std::string> match;
        std::function<bool(std::map<IsoClass, std::vector<std::string>>::iterator)> go =
            [&](std::map<IsoClass, std::vector<std::string>>::iterator it) -> bool {
            if (it == mine.end()) {
                // Verify all entries map correctly.
                for (const auto& e : entries_) {
                    EntryKey key{match[e.first.src], match[e.first.dst], e.first.label};
                    auto f = other.entries_.find(key);
                    if (f == other.entries_.end()) return false;
                    if (f->second.rows() != e.second.rows() ||
                        f->second.cols() != e.second.cols())
                        return false;
                }
                return true;
            }
            auto next = std::next(it);
            auto& cands = theirs[it->first];
            std::sort(cands.begin(), cands.end());
            std::vector<std::string> perm = cands;
            do {
                for (size_t i = 0; i < it->second.size(); ++i)
                    match[it->second[i]] = perm[i];
                if (go(next)) return true;
            } while (std::next_permutation(perm.begin(), perm.end()));
            return false;
        };
        if (go(mine.begin())) return true;
    }
    return false;
}

}  // namespace pq
