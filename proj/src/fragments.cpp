#include "cardforge/fragments.hpp"

#include <algorithm>
#include <sstream>

namespace cardforge {

// --- ScriptBuilder -----------------------------------------------------------

ScriptBuilder::ScriptBuilder(TableLayout layout, std::vector<State> seeds) : lay_(layout) {
    if (seeds.empty()) fail(Err::Internal, "builder needs at least one seed state");
    for (State& s : seeds) {
        if (static_cast<int>(s.size()) != lay_.m) fail(Err::Internal, "seed state of wrong length");
        frontier_.insert(std::move(s));
    }
}

Action noop_for(const Visible& v, const TableLayout& lay, Player p) {
    for (int pos = lay.deck.lo; pos <= lay.m; ++pos)
        if (v[pos - 1] != kEmpty) return make_noop(p, pos);
    fail(Err::NoFreeCell, "no occupied work-space cell for a padding shuffle");
}

void ScriptBuilder::record_and_apply(const std::map<Visible, Action>& step) {
    StepMap rec;
    std::set<State> next;
    for (const State& s : frontier_) {
        Visible v = visible_of(s);
        auto it = step.find(v);
        if (it == step.end()) fail(Err::MissingAction, "builder step misses visible " + v);
        rec[v] = it->second;
        for (auto& o : apply_action(s, it->second, lay_)) next.insert(std::move(o.state));
    }
    program_.push_back(std::move(rec));
    frontier_ = std::move(next);
}

void ScriptBuilder::emit(const std::function<Action(const Visible&)>& policy) {
    std::map<Visible, Action> step;
    for (const State& s : frontier_) {
        Visible v = visible_of(s);
        if (!step.count(v)) step.emplace(v, policy(v));
    }
    record_and_apply(step);
}

void ScriptBuilder::constant(const Action& a) {
    emit([&a](const Visible&) { return a; });
}

void ScriptBuilder::pad(Player p) {
    emit([&](const Visible& v) { return noop_for(v, lay_, p); });
}

static std::string action_fingerprint(const Action& a) {
    std::ostringstream os;
    os << static_cast<int>(a.kind) << ':' << static_cast<int>(a.player) << ':' << a.from << ':'
       << a.to << ':';
    for (int p : a.positions) os << p << ',';
    os << static_cast<int>(a.group.kind);
    for (const Perm& q : a.group.perms) {
        os << ';';
        for (int i : q) os << i << '.';
    }
    return os.str();
}

void ScriptBuilder::run_plans(Player pad_player,
                              const std::function<std::vector<Action>(const State&)>& plan_of) {
    struct Thread {
        State s;
        std::vector<Action> plan;
    };
    std::vector<Thread> threads;
    size_t maxlen = 0;
    for (const State& s : frontier_) {
        threads.push_back(Thread{s, plan_of(s)});
        maxlen = std::max(maxlen, threads.back().plan.size());
    }
    for (size_t k = 0; k < maxlen; ++k) {
        std::map<Visible, Action> step;
        for (const Thread& th : threads) {
            Visible v = visible_of(th.s);
            Action a = k < th.plan.size() ? th.plan[k] : noop_for(v, lay_, pad_player);
            auto [it, fresh] = step.emplace(v, a);
            if (!fresh && !(it->second == a))
                fail(Err::Internal, "conflicting branch plans meet at visible " + v +
                                        " (builder step " + std::to_string(this->step()) + ")");
        }
        std::vector<Thread> advanced;
        std::set<std::string> seen;
        for (Thread& th : threads) {
            const Action& a = step.at(visible_of(th.s));
            for (auto& o : apply_action(th.s, a, lay_)) {
                std::string key = o.state;
                for (size_t j = k + 1; j < th.plan.size(); ++j)
                    key += '|' + action_fingerprint(th.plan[j]);
                if (seen.insert(std::move(key)).second)
                    advanced.push_back(Thread{std::move(o.state), th.plan});
            }
        }
        program_.emplace_back(step.begin(), step.end());
        threads = std::move(advanced);
    }
    frontier_.clear();
    for (Thread& th : threads) frontier_.insert(std::move(th.s));
}

void ScriptBuilder::run_recorded(const std::vector<StepMap>& steps) {
    for (const StepMap& sm : steps) record_and_apply({sm.begin(), sm.end()});
}

void ScriptBuilder::require(const std::function<bool(const State&)>& pred, Err code,
                            const std::string& what) const {
    for (const State& s : frontier_)
        if (!pred(s)) fail(code, what + " (state " + s + ")");
}

std::vector<Action> plan_moves(const State& s, Player p, std::vector<std::pair<int, int>> want,
                               const std::vector<int>& spares) {
    std::vector<Action> out;
    State sim = s;
    want.erase(std::remove_if(want.begin(), want.end(), [](auto& w) { return w.first == w.second; }),
               want.end());
    while (!want.empty()) {
        bool progress = false;
        for (auto it = want.begin(); it != want.end();) {
            if (it->first == it->second) {
                it = want.erase(it);
                progress = true;
            } else if (!cell_occupied(sim[it->second - 1])) {
                out.push_back(make_move(p, it->first, it->second));
                sim[it->second - 1] = sim[it->first - 1];
                sim[it->first - 1] = kEmpty;
                it = want.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
        if (!progress) {
            int spare = 0;
            for (int cand : spares)
                if (!cell_occupied(sim[cand - 1])) {
                    spare = cand;
                    break;
                }
            if (!spare) fail(Err::NoFreeCell, "no spare cell to break a placement cycle");
            out.push_back(make_move(p, want.front().first, spare));
            sim[spare - 1] = sim[want.front().first - 1];
            sim[want.front().first - 1] = kEmpty;
            want.front().first = spare;
        }
    }
    return out;
}

ShuffleGroup identity_shuffle(int k) { return explicit_group({perm_identity(k)}); }

// --- copy gadget ---------------------------------------------------------------

CopyMarks emit_copy(ScriptBuilder& b, Player owner, const CopyCells& c) {
    b.require(
        [&](const State& s) {
            for (int i = 0; i < 6; ++i) {
                char ch = s[c.aux[i] - 1];
                if (!cell_face_down(ch)) return false;
                if (cell_suit(ch) != (i % 2 == 0 ? Suit::Heart : Suit::Club)) return false;
            }
            return cell_face_down(s[c.src1 - 1]) && cell_face_down(s[c.src2 - 1]) &&
                   !cell_occupied(s[c.dst1a - 1]) && !cell_occupied(s[c.dst1b - 1]) &&
                   !cell_occupied(s[c.dst2a - 1]) && !cell_occupied(s[c.dst2b - 1]);
        },
        Err::DeckShortage, "copy needs three hearts and three clubs laid out alternately");

    CopyMarks m;
    // display the auxiliary layout face-up, then hide it again
    for (int i = 0; i < 6; ++i) b.turn(owner, c.aux[i]);
    for (int i = 0; i < 6; ++i) b.turn(owner, c.aux[i]);

    m.shuffle6 = b.step();
    b.shuffle(owner, {c.aux.begin(), c.aux.end()}, cyclic_group());
    m.shuffle4 = b.step();
    b.shuffle(owner, {c.src1, c.src2, c.aux[0], c.aux[1]}, cyclic_group());

    m.reveal_begin = b.step();
    b.turn(owner, c.src1);
    b.turn(owner, c.src2);
    b.turn(owner, c.aux[0]);
    b.turn(owner, c.aux[1]);
    m.reveal_end = b.step();

    // alternating reveal: the copies already hold the bit; otherwise both
    // copies hold its negation and have their cells switched (equal action
    // count on both branches)
    b.run_plans(owner, [&](const State& s) -> std::vector<Action> {
        Suit s0 = cell_suit(s[c.src1 - 1]), s1 = cell_suit(s[c.src2 - 1]);
        Suit s2 = cell_suit(s[c.aux[0] - 1]), s3 = cell_suit(s[c.aux[1] - 1]);
        bool alternating = s0 != s1 && s1 != s2 && s2 != s3;
        if (alternating) return {};
        return {make_move(owner, c.aux[2], c.dst1a), make_move(owner, c.aux[3], c.aux[2]),
                make_move(owner, c.dst1a, c.aux[3]), make_move(owner, c.aux[4], c.dst1a),
                make_move(owner, c.aux[5], c.aux[4]), make_move(owner, c.dst1a, c.aux[5])};
    });

    b.move(owner, c.aux[2], c.dst1a);
    b.move(owner, c.aux[3], c.dst1b);
    b.move(owner, c.aux[4], c.dst2a);
    b.move(owner, c.aux[5], c.dst2b);

    // leftovers return to canonical deck cells, hearts first
    b.run_plans(owner, [&](const State& s) {
        std::vector<int> hearts, clubs;
        for (int src : {c.src1, c.src2, c.aux[0], c.aux[1]})
            (cell_suit(s[src - 1]) == Suit::Heart ? hearts : clubs).push_back(src);
        if (hearts.size() != 2 || clubs.size() != 2)
            fail(Err::Internal, "copy leftovers are not two hearts and two clubs");
        std::vector<std::pair<int, int>> want = {{hearts[0], c.home[0]},
                                                 {hearts[1], c.home[1]},
                                                 {clubs[0], c.home[2]},
                                                 {clubs[1], c.home[3]}};
        return plan_moves(s, owner, want, {c.aux[4], c.aux[5]});
    });
    for (int i = 0; i < 4; ++i) b.turn(owner, c.home[i]);
    b.shuffle(owner, {c.home.begin(), c.home.end()}, identity_shuffle(4));
    return m;
}

// --- conditional swap ------------------------------------------------------------

namespace {

struct SwapGeometry {
    std::vector<int> circle;
    int n = 0;    // 2L + 4
    int half = 0; // L + 2

    int cell_at(int slot) const { return circle[((slot % n) + n) % n]; }
};

// The two auxiliary-club slots sit at cyclic distance n/2; returned in
// ascending slot order.
std::pair<int, int> aux_slots_from_faceup_clubs(const SwapGeometry& g, const Visible& v) {
    std::vector<int> ups;
    for (int i = 0; i < g.n; ++i)
        if (v[g.cell_at(i) - 1] == 'C') ups.push_back(i);
    for (size_t i = 0; i < ups.size(); ++i)
        for (size_t j = i + 1; j < ups.size(); ++j)
            if ((ups[j] - ups[i]) % g.n == g.half) return {ups[i], ups[j]};
    fail(Err::Internal, "auxiliary club slots not found in visible " + v);
}

// After parking, the auxiliary slots head the two adjacent empty runs.
std::pair<int, int> aux_slots_from_empties(const SwapGeometry& g, const Visible& v) {
    std::vector<int> firsts;
    for (int i = 0; i < g.n; ++i) {
        bool e0 = v[g.cell_at(i) - 1] == kEmpty;
        bool e1 = v[g.cell_at(i + 1) - 1] == kEmpty;
        bool prev = v[g.cell_at(i - 1) - 1] == kEmpty;
        if (e0 && e1 && !prev) firsts.push_back(i);
    }
    if (firsts.size() != 2) fail(Err::Internal, "ambiguous circle occupancy in " + v);
    return {firsts[0], firsts[1]};
}

} // namespace

SwapMarks emit_swap(ScriptBuilder& b, Player owner, const SwapCells& c) {
    if (c.alpha.size() != c.beta.size())
        fail(Err::LengthMismatch, "swap payload sequences must have equal length");
    const int L = static_cast<int>(c.alpha.size());
    SwapGeometry g;
    g.circle.push_back(c.c1);
    g.circle.push_back(c.g1);
    g.circle.insert(g.circle.end(), c.alpha.begin(), c.alpha.end());
    g.circle.push_back(c.c2);
    g.circle.push_back(c.g2);
    g.circle.insert(g.circle.end(), c.beta.begin(), c.beta.end());
    g.n = 2 * L + 4;
    g.half = L + 2;

    b.require(
        [&](const State& s) {
            for (int cell : g.circle)
                if (!cell_face_down(s[cell - 1])) return false;
            if (cell_suit(s[c.c1 - 1]) != Suit::Club || cell_suit(s[c.c2 - 1]) != Suit::Club)
                return false;
            for (int cell : {c.park1, c.park2, c.park_role0, c.park_role1, c.heart_home,
                             c.club_home[2]})
                if (cell_occupied(s[cell - 1])) return false;
            return true;
        },
        Err::DeckShortage, "swap needs two face-down auxiliary clubs and free parking cells");

    SwapMarks m;
    b.turn(owner, c.c1);
    b.turn(owner, c.c2);
    m.shuffle = b.step();
    b.shuffle(owner, g.circle, cyclic_group());

    // reveal the bit cards right after each face-up club
    m.reveal_begin = b.step();
    for (int rep = 0; rep < 2; ++rep) {
        b.emit([&](const Visible& v) {
            auto [a1, a2] = aux_slots_from_faceup_clubs(g, v);
            for (int slot : {a1 + 1, a2 + 1}) {
                int cell = g.cell_at(slot);
                if (v[cell - 1] == '?') return make_turn(owner, cell);
            }
            fail(Err::Internal, "no bit card left to reveal in " + v);
        });
    }
    m.reveal_end = b.step();

    // retire the revealed club to the deck
    b.emit([&](const Visible& v) {
        auto [a1, a2] = aux_slots_from_faceup_clubs(g, v);
        for (int slot : {a1 + 1, a2 + 1}) {
            int cell = g.cell_at(slot);
            if (v[cell - 1] == 'C') return make_turn(owner, cell);
        }
        fail(Err::Internal, "revealed club not found in " + v);
    });
    b.emit([&](const Visible& v) {
        auto [a1, a2] = aux_slots_from_faceup_clubs(g, v);
        for (int slot : {a1 + 1, a2 + 1}) {
            int cell = g.cell_at(slot);
            if (v[cell - 1] == '?') return make_move(owner, cell, c.club_home[2]);
        }
        fail(Err::Internal, "retired club not found in " + v);
    });

    // park the revealed heart; the chosen cell encodes which club led
    b.emit([&](const Visible& v) {
        auto [a1, a2] = aux_slots_from_faceup_clubs(g, v);
        int heart = -1;
        for (int slot : {a1 + 1, a2 + 1})
            if (v[g.cell_at(slot) - 1] == 'H') heart = slot;
        if (heart < 0) fail(Err::Internal, "revealed heart not found in " + v);
        bool role0 = heart == a2 + 1; // the revealed club followed the lower club slot
        return make_move(owner, g.cell_at(heart), role0 ? c.park_role0 : c.park_role1);
    });
    // park the auxiliary clubs, lower slot first
    for (int rep = 0; rep < 2; ++rep) {
        b.emit([&](const Visible& v) {
            std::vector<int> ups;
            for (int i = 0; i < g.n; ++i)
                if (v[g.cell_at(i) - 1] == 'C') ups.push_back(i);
            if (ups.empty()) fail(Err::Internal, "no auxiliary club left to park in " + v);
            int park = v[c.park1 - 1] == kEmpty ? c.park1 : c.park2;
            return make_move(owner, g.cell_at(ups.front()), park);
        });
    }

    // payloads to their final cells: the sequence after the revealed club
    // leads, so payloads land exchanged exactly when the bit was 1
    b.run_plans(owner, [&](const State& s) {
        Visible v = visible_of(s);
        auto [a1, a2] = aux_slots_from_empties(g, v);
        bool role0 = cell_occupied(s[c.park_role0 - 1]);
        int club_slot = role0 ? a1 + 1 : a2 + 1;
        std::vector<std::pair<int, int>> want;
        for (int i = 0; i < L; ++i) {
            want.push_back({g.cell_at(club_slot + 1 + i), c.alpha[i]});
            want.push_back({g.cell_at(club_slot + 1 + g.half + i), c.beta[i]});
        }
        return plan_moves(s, owner, want,
                          {g.cell_at(a1), g.cell_at(a2), g.cell_at(a1 + 1), g.cell_at(a2 + 1)});
    });

    // revealed heart home
    b.emit([&](const Visible& v) {
        int park = v[c.park_role0 - 1] != kEmpty ? c.park_role0 : c.park_role1;
        return make_turn(owner, park);
    });
    b.emit([&](const Visible& v) {
        int park = v[c.park_role0 - 1] != kEmpty ? c.park_role0 : c.park_role1;
        return make_move(owner, park, c.heart_home);
    });
    // auxiliary clubs home
    b.turn(owner, c.park1);
    b.move(owner, c.park1, c.club_home[0]);
    b.turn(owner, c.park2);
    b.move(owner, c.park2, c.club_home[1]);

    b.shuffle(owner, c.deck_rest, identity_shuffle(static_cast<int>(c.deck_rest.size())));
    return m;
}

// --- fragment records -----------------------------------------------------------

static SuitCount deck_count(const TableLayout& lay, const State& s) {
    SuitCount sc;
    for (int p = lay.deck.lo; p <= lay.deck.hi; ++p) {
        char c = s[p - 1];
        if (!cell_occupied(c)) continue;
        if (cell_suit(c) == Suit::Heart) sc.hearts++; else sc.clubs++;
    }
    return sc;
}

static SuitCount uniform_deck_count(const TableLayout& lay, const std::set<State>& states) {
    SuitCount sc = deck_count(lay, *states.begin());
    for (const State& s : states)
        if (!(deck_count(lay, s) == sc)) fail(Err::Internal, "deck multiset differs across branches");
    return sc;
}

ProtocolFragment copy_fragment(const TableLayout& lay, Player owner, const CopyCells& c,
                               std::vector<State> pre_states, CopyMarks* marks) {
    ScriptBuilder b(lay, std::move(pre_states));
    ProtocolFragment f;
    f.name = "copy";
    f.layout = lay;
    f.deck_required = SuitCount{3, 3};
    f.contract.deck_pre = uniform_deck_count(lay, b.frontier());
    f.contract.pre = {{c.src1, 'p'}, {c.src2, 'q'}, {c.dst1a, '.'}, {c.dst1b, '.'},
                      {c.dst2a, '.'}, {c.dst2b, '.'}};
    for (int i = 0; i < 6; ++i) f.contract.pre[c.aux[i]] = i % 2 == 0 ? 'h' : 'c';
    CopyMarks m = emit_copy(b, owner, c);
    if (marks) *marks = m;
    f.contract.deck_post = uniform_deck_count(lay, b.frontier());
    f.contract.post = {{c.src1, '.'}, {c.src2, '.'}, {c.dst1a, 'p'}, {c.dst1b, 'q'},
                       {c.dst2a, 'p'}, {c.dst2b, 'q'}};
    f.contract.post[c.home[0]] = 'h';
    f.contract.post[c.home[1]] = 'h';
    f.contract.post[c.home[2]] = 'c';
    f.contract.post[c.home[3]] = 'c';
    for (int i = 0; i < 6; ++i)
        if (!f.contract.post.count(c.aux[i])) f.contract.post[c.aux[i]] = '.';
    f.steps = b.take_program();
    return f;
}

ProtocolFragment swap_fragment(const TableLayout& lay, Player owner, const SwapCells& c,
                               std::vector<State> pre_states, SwapMarks* marks) {
    ScriptBuilder b(lay, std::move(pre_states));
    ProtocolFragment f;
    f.name = "swap";
    f.layout = lay;
    f.deck_required = SuitCount{0, 2};
    f.contract.deck_pre = uniform_deck_count(lay, b.frontier());
    f.contract.pre = {{c.g1, 'p'}, {c.g2, 'q'}, {c.c1, 'c'}, {c.c2, 'c'}};
    for (int cell : c.alpha) f.contract.pre[cell] = '?';
    for (int cell : c.beta) f.contract.pre[cell] = '?';
    SwapMarks m = emit_swap(b, owner, c);
    if (marks) *marks = m;
    f.contract.deck_post = uniform_deck_count(lay, b.frontier());
    f.contract.post = {{c.g1, '.'}, {c.g2, '.'}, {c.heart_home, 'h'}};
    for (int cell : c.alpha) f.contract.post[cell] = '?';
    for (int cell : c.beta) f.contract.post[cell] = '?';
    for (int cell : c.club_home) f.contract.post[cell] = 'c';
    f.steps = b.take_program();
    return f;
}

ProtocolFragment not_fragment(const TableLayout& lay, Player owner, std::pair<int, int> pair,
                              int free_cell, std::vector<State> pre_states) {
    for (const State& s : pre_states)
        if (cell_occupied(s[free_cell - 1])) fail(Err::NoFreeCell, "not-gadget free cell is occupied");
    ScriptBuilder b(lay, std::move(pre_states));
    ProtocolFragment f;
    f.name = "not";
    f.layout = lay;
    f.deck_required = SuitCount{0, 0};
    f.contract.deck_pre = uniform_deck_count(lay, b.frontier());
    f.contract.pre = {{pair.first, 'p'}, {pair.second, 'q'}, {free_cell, '.'}};
    // the pair relocates to (pair.first, free_cell) with its cards exchanged
    b.move(owner, pair.first, free_cell);
    b.move(owner, pair.second, pair.first);
    f.contract.deck_post = f.contract.deck_pre;
    f.contract.post = {{pair.first, 'p'}, {free_cell, 'q'}, {pair.second, '.'}};
    f.steps = b.take_program();
    return f;
}

ProtocolFragment compose(const std::vector<ProtocolFragment>& fragments) {
    if (fragments.empty()) fail(Err::ContractMismatch, "nothing to compose");
    ProtocolFragment out = fragments.front();
    for (size_t i = 1; i < fragments.size(); ++i) {
        const ProtocolFragment& nxt = fragments[i];
        if (!(nxt.layout.m == out.layout.m && nxt.layout.deck == out.layout.deck))
            fail(Err::ContractMismatch, "fragment layouts differ");
        if (!(out.contract.deck_post == nxt.contract.deck_pre))
            fail(Err::ContractMismatch, "deck multiset required by '" + nxt.name +
                                            "' differs from what '" + out.name + "' leaves");
        for (const auto& [pos, req] : nxt.contract.pre) {
            auto it = out.contract.post.find(pos);
            char have = it != out.contract.post.end() ? it->second : 0;
            bool ok = it != out.contract.post.end() &&
                      (have == req || (req == '?' && have != '.' && have != 0));
            if (!ok)
                fail(Err::ContractMismatch,
                     "position " + std::to_string(pos) + ": '" + nxt.name + "' requires '" +
                         std::string(1, req) + "' but '" + out.name + "' leaves '" +
                         (have ? std::string(1, have) : std::string("unspecified")) + "'");
        }
        for (const auto& [pos, req] : nxt.contract.post) out.contract.post[pos] = req;
        out.contract.deck_post = nxt.contract.deck_post;
        out.steps.insert(out.steps.end(), nxt.steps.begin(), nxt.steps.end());
        out.name += "+" + nxt.name;
    }
    return out;
}

// --- ready-made gadget protocols ------------------------------------------------

static std::vector<State> seed_all_inputs(const Protocol& p) {
    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(p.layout.n))
        for (const Weighted& w : initial_states(p, in)) seeds.push_back(w.state);
    return seeds;
}

GadgetProtocol make_copy_protocol() {
    GadgetProtocol g;
    Protocol& p = g.protocol;
    p.name = "copy";
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 6, 12, Encoding::TwoCard); // deck 5..10, free 11..22
    p.deck_multiset = SuitCount{3, 3};

    const int d = p.layout.deck.lo; // hearts d..d+2, clubs d+3..d+5
    g.copy_cells = CopyCells{11, 12, 13, 14, 15, 16,
                             {d, d + 3, d + 1, d + 4, d + 2, d + 5},
                             {d, d + 1, d + 3, d + 4}};
    ScriptBuilder b(p.layout, seed_all_inputs(p));
    b.move(Player::Alice, 1, 11);
    b.move(Player::Alice, 2, 12);
    const int base = b.step();
    CopyMarks rel;
    g.fragment = copy_fragment(p.layout, Player::Alice, g.copy_cells,
                               {b.frontier().begin(), b.frontier().end()}, &rel);
    b.run_recorded(g.fragment.steps);
    g.copy_marks = CopyMarks{base + rel.shuffle6, base + rel.shuffle4, base + rel.reveal_begin,
                             base + rel.reveal_end};
    p.program = b.take_program();
    p.output = OutputSpec{{13, 14, 15, 16}, OutputKind::Committed2Card};
    return g;
}

GadgetProtocol make_swap_protocol(int payload_len) {
    const int L = payload_len;
    GadgetProtocol g;
    Protocol& p = g.protocol;
    p.name = "swap" + std::to_string(L);
    p.encoding = Encoding::TwoCard;
    const int s = 2 * L + 2;
    p.layout = make_layout(1, s, 2 * L + 6, Encoding::TwoCard);
    p.deck_multiset = SuitCount{L, L + 2};

    const int d = p.layout.deck.lo;      // hearts d..d+L-1, clubs d+L..d+s-1
    const int w = p.layout.work_free.lo; // alpha, beta, bit pair, parks
    SwapCells& c = g.swap_cells;
    for (int i = 0; i < L; ++i) c.alpha.push_back(w + i);
    for (int i = 0; i < L; ++i) c.beta.push_back(w + L + i);
    c.g1 = w + 2 * L;
    c.g2 = w + 2 * L + 1;
    c.park1 = w + 2 * L + 2;
    c.park2 = w + 2 * L + 3;
    c.park_role0 = w + 2 * L + 4;
    c.park_role1 = w + 2 * L + 5;
    c.c1 = d + 2 * L; // last two clubs are the auxiliary ones
    c.c2 = d + 2 * L + 1;
    c.heart_home = d;
    c.club_home = {c.c1, c.c2, d + L}; // retired club takes the first payload-club cell
    c.deck_rest = {d, d + L, c.c1, c.c2};

    ScriptBuilder b(p.layout, seed_all_inputs(p));
    for (int i = 0; i < L; ++i) b.move(Player::Alice, d + i, c.alpha[i]);
    for (int i = 0; i < L; ++i) b.move(Player::Alice, d + L + i, c.beta[i]);
    b.move(Player::Alice, 1, c.g1);
    b.move(Player::Alice, 2, c.g2);
    const int base = b.step();
    SwapMarks rel;
    g.fragment = swap_fragment(p.layout, Player::Alice, c,
                               {b.frontier().begin(), b.frontier().end()}, &rel);
    b.run_recorded(g.fragment.steps);
    g.swap_marks = SwapMarks{base + rel.shuffle, base + rel.reveal_begin, base + rel.reveal_end};
    p.program = b.take_program();
    // alpha0/beta0 form a committed pair reading NOT b
    p.output = OutputSpec{{c.alpha[0], c.beta[0]}, OutputKind::Committed2Card};
    return g;
}

GadgetProtocol make_not_protocol() {
    GadgetProtocol g;
    Protocol& p = g.protocol;
    p.name = "not";
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 0, 3, Encoding::TwoCard); // free 5..7
    p.deck_multiset = SuitCount{0, 0};
    ScriptBuilder b(p.layout, seed_all_inputs(p));
    b.move(Player::Alice, 1, 5);
    b.move(Player::Alice, 2, 6);
    g.fragment = not_fragment(p.layout, Player::Alice, {5, 6}, 7,
                              {b.frontier().begin(), b.frontier().end()});
    b.run_recorded(g.fragment.steps);
    p.program = b.take_program();
    p.output = OutputSpec{{5, 7}, OutputKind::Committed2Card};
    return g;
}

GadgetProtocol make_extend1_protocol() {
    GadgetProtocol g;
    Protocol& p = g.protocol;
    p.name = "extend1";
    p.encoding = Encoding::OneCard;
    p.layout = make_layout(1, 8, 6, Encoding::OneCard); // inputs 1,2; deck 3..10; free 11..16
    p.deck_multiset = SuitCount{4, 4}; // copy deck 3+3 plus the designated pair

    const int d = p.layout.deck.lo; // hearts 3,4,5 clubs 6,7,8 designated 9,10
    auto des = p.designated_cells();
    g.copy_cells = CopyCells{11, 12, 15, 16, 13, 14,
                             {d, d + 3, d + 1, d + 4, d + 2, d + 5},
                             {d, d + 1, d + 3, d + 4}};

    ScriptBuilder b(p.layout, seed_all_inputs(p));
    b.constant(make_extend(Player::Alice, 1, 12, des));
    b.move(Player::Alice, 1, 11);
    g.copy_marks = emit_copy(b, Player::Alice, g.copy_cells);
    b.move(Player::Alice, 15, 1); // first card of the first copy back to the input
    b.emit([&](const Visible& v) { // second card back into the designated deck
        int vac = v[des[0] - 1] == kEmpty ? des[0] : des[1];
        return make_move(Player::Alice, 16, vac);
    });
    b.shuffle(Player::Alice, des, symmetric_group());
    p.program = b.take_program();
    p.output = OutputSpec{{13, 14}, OutputKind::Committed2Card};

    // the whole body forms the extension fragment: extend, copy, restore, reshuffle
    g.fragment.name = "extend1";
    g.fragment.layout = p.layout;
    g.fragment.steps = p.program;
    g.fragment.deck_required = SuitCount{4, 4};
    g.fragment.contract.pre = {{1, '?'}, {13, '.'}, {14, '.'}, {des[0], 'h'}, {des[1], 'c'}};
    g.fragment.contract.post = {{1, '?'}, {13, 'p'}, {14, 'q'}, {des[0], '?'}, {des[1], '?'}};
    g.fragment.contract.deck_pre = SuitCount{4, 4};
    g.fragment.contract.deck_post = SuitCount{3, 3};
    return g;
}

GadgetProtocol make_extend_half_protocol() {
    GadgetProtocol g;
    Protocol& p = g.protocol;
    p.name = "extend_half";
    p.encoding = Encoding::HalfCard;
    p.layout = make_layout(2, 9, 7, Encoding::HalfCard); // inputs 1..8; deck 9..17; free 18..24
    p.deck_multiset = SuitCount{4, 5}; // copy deck, marker club, designated pair

    const int d = p.layout.deck.lo; // hearts 9..11, clubs 12..14, marker 15, designated 16,17
    auto des = p.designated_cells();
    const int f1 = 18, f2 = 19, g1 = 20, g2 = 21, g3 = 22, g4 = 23, mark = 24;
    const int marker_src = d + 6;
    g.copy_cells = CopyCells{f1, f2, g3, g4, g1, g2,
                             {d, d + 3, d + 1, d + 4, d + 2, d + 5},
                             {d, d + 1, d + 3, d + 4}};

    // bit 1 of Alice lives at cells 1,2; exactly one of them is occupied
    ScriptBuilder b(p.layout, seed_all_inputs(p));
    b.emit([&](const Visible& v) { // mark the right-occupied branch
        if (v[1] == '?') return make_move(Player::Alice, marker_src, mark);
        return noop_for(v, p.layout, Player::Alice);
    });
    b.emit([&](const Visible& v) { // fill the empty slot with the complement
        if (v[0] == '?') return make_extend(Player::Alice, 1, 2, des);
        return make_extend(Player::Alice, 2, 1, des);
    });
    b.move(Player::Alice, 1, f1);
    b.move(Player::Alice, 2, f2);
    g.copy_marks = emit_copy(b, Player::Alice, g.copy_cells);
    b.emit([&](const Visible& v) { // restore the originally occupied slot
        if (v[mark - 1] == '?') return make_move(Player::Alice, g4, 2);
        return make_move(Player::Alice, g3, 1);
    });
    b.emit([&](const Visible& v) { // the filling card returns to the designated deck
        int vac = v[des[0] - 1] == kEmpty ? des[0] : des[1];
        int src = v[mark - 1] == '?' ? g3 : g4;
        return make_move(Player::Alice, src, vac);
    });
    b.shuffle(Player::Alice, des, symmetric_group());
    b.emit([&](const Visible& v) { // unmark
        if (v[mark - 1] == '?') return make_move(Player::Alice, mark, marker_src);
        return noop_for(v, p.layout, Player::Alice);
    });
    p.program = b.take_program();
    p.output = OutputSpec{{g1, g2}, OutputKind::Committed2Card};

    g.fragment.name = "extend_half";
    g.fragment.layout = p.layout;
    g.fragment.steps = p.program;
    g.fragment.deck_required = SuitCount{4, 5};
    g.fragment.contract.pre = {{g1, '.'}, {g2, '.'}, {des[0], 'h'}, {des[1], 'c'}};
    g.fragment.contract.post = {{g1, 'p'}, {g2, 'q'}, {des[0], '?'}, {des[1], '?'}};
    g.fragment.contract.deck_pre = SuitCount{4, 5};
    g.fragment.contract.deck_post = SuitCount{3, 4};
    return g;
}

Protocol make_turn_x1_protocol() {
    Protocol p;
    p.name = "turn_x1";
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 0, 0, Encoding::TwoCard);
    p.deck_multiset = SuitCount{0, 0};
    ScriptBuilder b(p.layout, seed_all_inputs(p));
    b.turn(Player::Alice, 1);
    p.program = b.take_program();
    p.output = OutputSpec{{1}, OutputKind::Open};
    return p;
}

} // namespace cardforge
