#include "cardforge/branching.hpp"

#include <algorithm>

namespace cardforge {

int BranchingProgram::max_var(Player p) const {
    int m = 0;
    for (const BpLayer& l : layers)
        if (l.owner == p) m = std::max(m, l.var);
    return m;
}

void validate_bp(const BranchingProgram& bp) {
    if (bp.depth() < 1 || bp.width < 1) fail(Err::ValidationError, "empty branching program");
    if (static_cast<int>(bp.layer_sizes.size()) != bp.depth())
        fail(Err::ValidationError, "layer size list does not match depth");
    int maxw = 0;
    for (int w : bp.layer_sizes) maxw = std::max(maxw, w);
    if (maxw != bp.width) fail(Err::ValidationError, "width field does not match the widest layer");
    for (size_t i = 0; i < bp.layers.size(); ++i) {
        const BpLayer& l = bp.layers[i];
        int w = bp.layer_sizes[i], wn = bp.layer_sizes[i + 1];
        if (l.var < 1) fail(Err::ValidationError, "variable index below 1 in layer " + std::to_string(i + 1));
        if (static_cast<int>(l.e0.size()) != w || static_cast<int>(l.e1.size()) != w)
            fail(Err::ValidationError, "edge map size mismatch in layer " + std::to_string(i + 1));
        for (int v : l.e0)
            if (v < 0 || v >= wn) fail(Err::ValidationError, "zero-edge out of range in layer " + std::to_string(i + 1));
        for (int v : l.e1)
            if (v < 0 || v >= wn) fail(Err::ValidationError, "one-edge out of range in layer " + std::to_string(i + 1));
        if (bp.permutation && (w != bp.width || wn != bp.width || !perm_is_valid(l.e0) || !perm_is_valid(l.e1)))
            fail(Err::ValidationError, "perm1 or perm0 is not a bijection in layer " + std::to_string(i + 1));
    }
    if (bp.start < 0 || bp.start >= bp.layer_sizes.front())
        fail(Err::ValidationError, "start vertex out of range");
    int last = bp.layer_sizes.back();
    if (bp.accept < 0 || bp.accept >= last || bp.reject < 0 || bp.reject >= last)
        fail(Err::ValidationError, "accept/reject vertex out of range");
    if (bp.accept == bp.reject) fail(Err::ValidationError, "accept and reject vertices coincide");
}

static bool assignment_bit(const BpLayer& l, const std::vector<bool>& x, const std::vector<bool>& y) {
    const std::vector<bool>& bits = l.owner == Player::Alice ? x : y;
    if (l.var > static_cast<int>(bits.size()))
        fail(Err::ValidationError, "assignment does not cover variable " +
                                       std::string(1, player_char(l.owner)) + std::to_string(l.var));
    return bits[l.var - 1];
}

bool eval_bp(const BranchingProgram& bp, const std::vector<bool>& x, const std::vector<bool>& y,
             bool restricted_check) {
    int v = bp.start;
    for (const BpLayer& l : bp.layers) v = (assignment_bit(l, x, y) ? l.e1 : l.e0)[v];
    if (restricted_check && v != bp.accept && v != bp.reject)
        fail(Err::NotRestrictedTerminal, "computation ended at vertex " + std::to_string(v + 1));
    return v == bp.accept;
}

BranchingProgram normalize_zero_identity(const BranchingProgram& bp) {
    if (!bp.permutation) fail(Err::ValidationError, "normalization applies to permutation programs");
    BranchingProgram out = bp;
    Perm r = perm_identity(bp.width); // relabeling of the current layer
    for (size_t j = 0; j < bp.layers.size(); ++j) {
        const BpLayer& l = bp.layers[j];
        Perm r_next = perm_compose(perm_inverse(l.e0), r);
        out.layers[j].e0 = perm_identity(bp.width);
        out.layers[j].e1 = perm_compose(perm_compose(perm_inverse(r), l.e1), r_next);
        r = std::move(r_next);
    }
    out.start = bp.start; // r_1 is the identity
    out.accept = r[bp.accept];
    out.reject = r[bp.reject];
    return out;
}

std::vector<Transposition> decompose_transpositions(const Perm& p) {
    if (!perm_is_valid(p)) fail(Err::ValidationError, "not a permutation");
    Perm inv = perm_inverse(p);
    std::vector<Transposition> out;
    std::vector<bool> done(p.size(), false);
    for (int c = 0; c < static_cast<int>(p.size()); ++c) {
        if (done[c] || p[c] == c) {
            done[c] = true;
            continue;
        }
        // walk the cycle backwards so the left-to-right product equals p
        std::vector<int> walk{c};
        for (int v = inv[c]; v != c; v = inv[v]) walk.push_back(v);
        for (int v : walk) done[v] = true;
        for (size_t i = 0; i + 1 < walk.size(); ++i)
            out.push_back(Transposition{std::min(walk[i], walk[i + 1]),
                                        std::max(walk[i], walk[i + 1])});
    }
    return out;
}

Perm recompose(int width, const std::vector<Transposition>& ts) {
    Perm p = perm_identity(width);
    for (const Transposition& t : ts) {
        Perm tau = perm_identity(width);
        std::swap(tau[t.a], tau[t.b]);
        p = perm_compose(p, tau);
    }
    return p;
}

Perm perm_from_cycle(int width, const std::vector<int>& cycle) {
    Perm p = perm_identity(width);
    if (cycle.size() < 2) return p;
    for (size_t i = 0; i + 1 < cycle.size(); ++i) p[cycle[i + 1]] = cycle[i];
    p[cycle.front()] = cycle.back();
    if (!perm_is_valid(p)) fail(Err::ValidationError, "invalid cycle");
    return p;
}

bool is_single_cycle(const Perm& p, int len) {
    int moved = 0;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] != static_cast<int>(i)) moved++;
    if (moved != len) return false;
    int start = -1;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] != static_cast<int>(i)) { start = static_cast<int>(i); break; }
    if (start < 0) return len == 0;
    int steps = 0, v = start;
    do {
        v = p[v];
        steps++;
    } while (v != start && steps <= static_cast<int>(p.size()));
    return steps == len;
}

// --- formulas ---------------------------------------------------------------

Formula f_var(Player owner, int index) {
    Formula f;
    f.op = Formula::Op::Var;
    f.owner = owner;
    f.index = index;
    return f;
}
Formula f_and(Formula a, Formula b) {
    Formula f;
    f.op = Formula::Op::And;
    f.kids = {std::move(a), std::move(b)};
    return f;
}
Formula f_or(Formula a, Formula b) {
    Formula f;
    f.op = Formula::Op::Or;
    f.kids = {std::move(a), std::move(b)};
    return f;
}
Formula f_not(Formula a) {
    Formula f;
    f.op = Formula::Op::Not;
    f.kids = {std::move(a)};
    return f;
}

bool eval_formula(const Formula& f, const std::vector<bool>& x, const std::vector<bool>& y) {
    switch (f.op) {
        case Formula::Op::Var: {
            const std::vector<bool>& bits = f.owner == Player::Alice ? x : y;
            if (f.index > static_cast<int>(bits.size()))
                fail(Err::ValidationError, "assignment does not cover a formula variable");
            return bits[f.index - 1];
        }
        case Formula::Op::Not: return !eval_formula(f.kids[0], x, y);
        case Formula::Op::And: return eval_formula(f.kids[0], x, y) && eval_formula(f.kids[1], x, y);
        case Formula::Op::Or: return eval_formula(f.kids[0], x, y) || eval_formula(f.kids[1], x, y);
    }
    return false;
}

int formula_max_var(const Formula& f, Player p) {
    if (f.op == Formula::Op::Var) return f.owner == p ? f.index : 0;
    int m = 0;
    for (const Formula& k : f.kids) m = std::max(m, formula_max_var(k, p));
    return m;
}

Formula rewrite_or_de_morgan(const Formula& f) {
    Formula out = f;
    for (Formula& k : out.kids) k = rewrite_or_de_morgan(k);
    if (out.op == Formula::Op::Or)
        out = f_not(f_and(f_not(std::move(out.kids[0])), f_not(std::move(out.kids[1]))));
    return out;
}

// --- Barrington -----------------------------------------------------------------

Perm barrington_sigma() { return perm_from_cycle(5, {0, 1, 2, 3, 4}); }

namespace {

std::vector<Perm> all_five_cycles() {
    std::vector<Perm> out;
    Perm p = perm_identity(5);
    std::sort(p.begin(), p.end());
    do {
        if (is_single_cycle(p, 5)) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Fixed base pair of 5-cycles whose left-to-right commutator is a 5-cycle.
struct CommutatorBase {
    Perm g1, g2, com;
};

const CommutatorBase& commutator_base() {
    static const CommutatorBase base = [] {
        auto cycles = all_five_cycles();
        for (const Perm& a : cycles)
            for (const Perm& b : cycles) {
                Perm com = perm_compose(perm_compose(perm_compose(a, b), perm_inverse(a)),
                                        perm_inverse(b));
                if (is_single_cycle(com, 5)) return CommutatorBase{a, b, com};
            }
        fail(Err::Internal, "no commutator base found");
    }();
    return base;
}

std::vector<int> cycle_sequence(const Perm& p) {
    std::vector<int> seq{0};
    for (int v = p[0]; v != 0; v = p[v]) seq.push_back(v);
    return seq;
}

// psi with psi^-1 * from * psi == to (left-to-right), for 5-cycles
Perm conjugator(const Perm& from, const Perm& to) {
    std::vector<int> a = cycle_sequence(from), b = cycle_sequence(to);
    Perm psi(from.size());
    for (size_t i = 0; i < a.size(); ++i) psi[a[i]] = b[i];
    return psi;
}

std::vector<BpLayer> program_for(const Formula& f, const Perm& tau) {
    switch (f.op) {
        case Formula::Op::Var:
            return {BpLayer{f.owner, f.index, perm_identity(5), tau}};
        case Formula::Op::Not: {
            auto layers = program_for(f.kids[0], perm_inverse(tau));
            layers.push_back(BpLayer{Player::Alice, 1, tau, tau}); // constant layer
            return layers;
        }
        case Formula::Op::And: {
            const CommutatorBase& base = commutator_base();
            Perm psi = conjugator(base.com, tau);
            Perm g1 = perm_compose(perm_compose(perm_inverse(psi), base.g1), psi);
            Perm g2 = perm_compose(perm_compose(perm_inverse(psi), base.g2), psi);
            auto layers = program_for(f.kids[0], g1);
            auto l2 = program_for(f.kids[1], g2);
            auto l3 = program_for(f.kids[0], perm_inverse(g1));
            auto l4 = program_for(f.kids[1], perm_inverse(g2));
            layers.insert(layers.end(), l2.begin(), l2.end());
            layers.insert(layers.end(), l3.begin(), l3.end());
            layers.insert(layers.end(), l4.begin(), l4.end());
            return layers;
        }
        case Formula::Op::Or:
            fail(Err::Internal, "OR must be rewritten before compilation");
    }
    fail(Err::Internal, "unreachable");
}

} // namespace

BranchingProgram barrington_compile(const Formula& f) {
    Formula g = rewrite_or_de_morgan(f);
    Perm sigma = barrington_sigma();
    BranchingProgram bp;
    bp.width = 5;
    bp.layers = program_for(g, sigma);
    bp.layer_sizes.assign(bp.depth(), 5);
    bp.start = 0;
    bp.accept = sigma[0];
    bp.reject = 0;
    bp.permutation = true;
    BranchingProgram norm = normalize_zero_identity(bp);
    validate_bp(norm);
    return norm;
}

} // namespace cardforge
