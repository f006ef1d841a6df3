#include "cardforge/verifier.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cardforge {

std::string SecurityMode::str() const {
    switch (kind) {
        case Kind::OutputAware: return "output-aware";
        case Kind::Committed: return "committed";
        case Kind::PlayerView: return viewer == Player::Alice ? "player:alice" : "player:bob";
    }
    return "?";
}

bool TruthTable::eval(const InputPair& in) const {
    size_t idx = 0;
    for (bool b : in.x) idx = (idx << 1) | (b ? 1 : 0);
    for (bool b : in.y) idx = (idx << 1) | (b ? 1 : 0);
    return values.at(idx);
}

TruthTable table_constant(int n, bool v) {
    return TruthTable{n, std::vector<bool>(static_cast<size_t>(1) << (2 * n), v)};
}

std::string VerdictReport::report_line() const {
    if (pass) return "PASS";
    std::ostringstream os;
    os << "FAIL";
    if (!input_a.empty()) os << " pair=(" << input_a << ")|(" << input_b << ")";
    if (has_prefix_witness) {
        os << " prefix=" << trace_key(prefix) << " p1=" << rat_str(p1) << " p2=" << rat_str(p2);
    } else if (!detail.empty()) {
        os << " " << detail;
    }
    return os.str();
}

// --- exact trace-distribution equivalence ------------------------------------
//
// Forward basis maintenance over prefix-conditioned weight vectors. A vector
// lives over the disjoint union of both chains' level states; an entry is the
// probability of (prefix so far, state). Every emitted prefix class must put
// equal mass on the two sides; spanned classes inherit the equality linearly.

namespace {

using Vec = std::map<int, Rat>; // sparse, ordered by state index

struct ArenaEntry {
    int parent; // arena id of the level-(t-1) row, -1 at level 0
    std::string symbol;
};

Rat side_sum(const Vec& v, int offset, int upto) {
    Rat s(0);
    for (auto& [i, q] : v)
        if (i >= offset && i < upto) s += q;
    s.canonicalize();
    return s;
}

void axpy(Vec& dst, const Rat& c, const Vec& src) { // dst -= c * src
    for (auto& [i, q] : src) {
        auto it = dst.find(i);
        if (it == dst.end()) {
            Rat nq = -c * q;
            nq.canonicalize();
            if (nq != 0) dst.emplace(i, std::move(nq));
        } else {
            it->second -= c * q;
            it->second.canonicalize();
            if (it->second == 0) dst.erase(it);
        }
    }
}

// Span-membership structure, kept mutually reduced (Gauss-Jordan): no stored
// vector touches another's pivot, so one elimination pass is exact. The basis
// rows carried across levels stay the original prefix vectors — failure
// witnesses then report true prefix probabilities, independently replayable.
struct Echelon {
    struct Row {
        int pivot;
        Vec v;
    };
    std::vector<Row> rows;

    // true if v was independent (and is now absorbed)
    bool try_insert(Vec v) {
        for (const Row& r : rows) {
            auto it = v.find(r.pivot);
            if (it == v.end()) continue;
            Rat c = it->second / r.v.at(r.pivot);
            c.canonicalize();
            axpy(v, c, r.v);
        }
        if (v.empty()) return false;
        int pivot = v.begin()->first;
        for (Row& r : rows) {
            auto it = r.v.find(pivot);
            if (it == r.v.end()) continue;
            Rat c = it->second / v.at(pivot);
            c.canonicalize();
            axpy(r.v, c, v);
        }
        rows.push_back(Row{pivot, std::move(v)});
        return true;
    }
};

struct BasisRow {
    Vec v; // exact prefix-conditioned weights over both chains' states
    int arena_id;
};

std::vector<std::string> rebuild_prefix(const std::vector<ArenaEntry>& arena, int id) {
    std::vector<std::string> out;
    for (int cur = id; cur >= 0; cur = arena[cur].parent) out.push_back(arena[cur].symbol);
    std::reverse(out.begin(), out.end());
    return out;
}

std::string annotated_sym(const Visible& emission, const std::string& note) {
    return note.empty() ? emission : emission + "[" + note + "]";
}

} // namespace

VerdictReport distributions_equal(const StepChain& a, const StepChain& b) {
    VerdictReport rep;
    rep.check = "equivalence";
    if (a.steps != b.steps) {
        rep.pass = false;
        rep.has_prefix_witness = true;
        rep.p1 = Rat(a.steps);
        rep.p2 = Rat(b.steps);
        rep.detail = "LENGTH_MISMATCH";
        return rep;
    }
    const int T = a.steps;
    std::vector<ArenaEntry> arena;
    std::vector<BasisRow> basis; // rows of the current level

    auto fail_with = [&](int parent, const std::string& sym, const Rat& pa, const Rat& pb) {
        rep.pass = false;
        rep.has_prefix_witness = true;
        rep.prefix = parent >= 0 ? rebuild_prefix(arena, parent) : std::vector<std::string>{};
        rep.prefix.push_back(sym);
        rep.p1 = pa;
        rep.p2 = pb;
    };

    // level 0: one candidate per initial emission
    {
        int nA = static_cast<int>(a.levels[0].size());
        int nB = static_cast<int>(b.levels[0].size());
        std::map<std::string, Vec> by_sym;
        for (int i = 0; i < nA; ++i)
            if (a.init_weights[i] != 0) by_sym[a.levels[0][i].emission][i] += a.init_weights[i];
        for (int i = 0; i < nB; ++i)
            if (b.init_weights[i] != 0) by_sym[b.levels[0][i].emission][nA + i] += b.init_weights[i];
        for (auto& [sym, v] : by_sym) {
            Rat pa = side_sum(v, 0, nA), pb = side_sum(v, nA, nA + nB);
            if (pa != pb) {
                fail_with(-1, sym, pa, pb);
                return rep;
            }
            if (!reduce(v, basis)) continue;
            arena.push_back(ArenaEntry{-1, sym});
            insert_row(basis, std::move(v), static_cast<int>(arena.size()) - 1);
        }
    }

    for (int t = 0; t < T; ++t) {
        int nA = static_cast<int>(a.levels[t].size());
        int nA1 = static_cast<int>(a.levels[t + 1].size());
        int nB1 = static_cast<int>(b.levels[t + 1].size());

        // adjacency grouped by source state
        std::vector<std::vector<const ChainEdge*>> outA(a.levels[t].size()), outB(b.levels[t].size());
        for (const ChainEdge& e : a.edges[t]) outA[e.from].push_back(&e);
        for (const ChainEdge& e : b.edges[t]) outB[e.from].push_back(&e);

        std::vector<BasisRow> next_basis;
        for (const BasisRow& row : basis) {
            std::map<std::string, Vec> by_sym;
            for (auto& [i, q] : row.v) {
                if (i < nA) {
                    for (const ChainEdge* e : outA[i]) {
                        std::string sym = annotated_sym(a.levels[t + 1][e->to].emission, e->note);
                        by_sym[sym][e->to] += q * e->weight;
                    }
                } else {
                    for (const ChainEdge* e : outB[i - nA]) {
                        std::string sym = annotated_sym(b.levels[t + 1][e->to].emission, e->note);
                        by_sym[sym][nA1 + e->to] += q * e->weight;
                    }
                }
            }
            for (auto& [sym, v] : by_sym) {
                for (auto it = v.begin(); it != v.end();) {
                    it->second.canonicalize();
                    it = it->second == 0 ? v.erase(it) : std::next(it);
                }
                Rat pa = side_sum(v, 0, nA1), pb = side_sum(v, nA1, nA1 + nB1);
                if (pa != pb) {
                    fail_with(row.arena_id, sym, pa, pb);
                    return rep;
                }
                if (!reduce(v, next_basis)) continue;
                arena.push_back(ArenaEntry{row.arena_id, sym});
                insert_row(next_basis, std::move(v), static_cast<int>(arena.size()) - 1);
            }
        }
        basis = std::move(next_basis);
    }
    return rep;
}

// --- correctness --------------------------------------------------------------

VerdictReport check_correctness(const Protocol& p, const TruthTable& f) {
    VerdictReport rep;
    rep.check = "correctness";
    for (const InputPair& in : all_inputs(p.layout.n)) {
        bool want = f.eval(in);
        StepChain chain = build_step_chain(p, in);
        for (const ChainNode& node : chain.levels.back()) {
            bool got;
            try {
                got = decode_output(p, node.state);
            } catch (const CardError& e) {
                rep.pass = false;
                rep.input_a = in.str();
                rep.detail = "input=(" + in.str() + ") " + e.what() + " final=" + node.state;
                return rep;
            }
            if (got != want) {
                rep.pass = false;
                rep.input_a = in.str();
                rep.detail = "input=(" + in.str() + ") decoded=" + std::to_string(got) +
                             " expected=" + std::to_string(want) + " final=" + node.state;
                return rep;
            }
        }
    }
    return rep;
}

// --- read-only ------------------------------------------------------------------

VerdictReport check_read_only(const Protocol& p) {
    VerdictReport rep;
    rep.check = "read-only";
    for (const InputPair& in : all_inputs(p.layout.n)) {
        StepChain chain = build_step_chain(p, in);
        std::map<int, char> committed; // input position -> suit char ('h'/'c')
        for (int t = 0; t <= chain.steps; ++t) {
            for (const ChainNode& node : chain.levels[t]) {
                for (int pos = 1; pos <= p.layout.bob_input.hi; ++pos) {
                    char c = node.state[pos - 1];
                    if (!cell_occupied(c)) continue;
                    char suit = cell_suit(c) == Suit::Heart ? 'h' : 'c';
                    auto [it, fresh] = committed.emplace(pos, suit);
                    if (!fresh && it->second != suit) {
                        rep.pass = false;
                        rep.input_a = in.str();
                        rep.detail = "input=(" + in.str() + ") position " + std::to_string(pos) +
                                     " changed suit at step " + std::to_string(t);
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

// --- security ---------------------------------------------------------------------

VerdictReport check_security(const Protocol& p, const TruthTable& f, const SecurityMode& mode) {
    VerdictReport rep;
    rep.check = "security:" + mode.str();
    std::vector<InputPair> inputs = all_inputs(p.layout.n);

    ChainOptions opt;
    if (mode.kind == SecurityMode::Kind::PlayerView) opt.player_view = mode.viewer;

    std::vector<StepChain> chains(inputs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < inputs.size(); ++i) chains[i] = build_step_chain(p, inputs[i], opt);

    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < inputs.size(); ++i) {
        for (size_t j = i + 1; j < inputs.size(); ++j) {
            bool take = false;
            switch (mode.kind) {
                case SecurityMode::Kind::Committed: take = true; break;
                case SecurityMode::Kind::OutputAware: take = f.eval(inputs[i]) == f.eval(inputs[j]); break;
                case SecurityMode::Kind::PlayerView:
                    take = mode.viewer == Player::Alice ? inputs[i].x == inputs[j].x
                                                        : inputs[i].y == inputs[j].y;
                    break;
            }
            if (take) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }

    std::vector<VerdictReport> results(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t k = 0; k < pairs.size(); ++k)
        results[k] = distributions_equal(chains[pairs[k].first], chains[pairs[k].second]);

    for (size_t k = 0; k < pairs.size(); ++k) { // lexicographic pair order
        if (!results[k].pass) {
            rep = results[k];
            rep.check = "security:" + mode.str();
            rep.input_a = inputs[pairs[k].first].str();
            rep.input_b = inputs[pairs[k].second].str();
            return rep;
        }
    }
    rep.detail = std::to_string(pairs.size()) + " pairs compared";
    return rep;
}

std::pair<Rat, Rat> replay_witness(const Protocol& p, const std::string& input_a,
                                   const std::string& input_b,
                                   const std::vector<std::string>& prefix,
                                   std::optional<Player> view) {
    auto parse_input = [&](const std::string& s) {
        auto comma = s.find(',');
        if (comma == std::string::npos) fail(Err::ParseError, "input must be x,y: " + s);
        return InputPair{parse_bits(s.substr(0, comma)), parse_bits(s.substr(comma + 1))};
    };
    ChainOptions opt;
    opt.player_view = view;
    StepChain ca = build_step_chain(p, parse_input(input_a), opt);
    StepChain cb = build_step_chain(p, parse_input(input_b), opt);
    return {chain_prefix_prob(ca, prefix), chain_prefix_prob(cb, prefix)};
}

} // namespace cardforge
