#include "cardforge/protocol.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cardforge {

std::vector<int> Protocol::designated_cells() const {
    if (encoding == Encoding::TwoCard) return {};
    return {layout.deck.hi - 1, layout.deck.hi};
}

std::vector<int> Protocol::main_deck_cells() const {
    int hi = encoding == Encoding::TwoCard ? layout.deck.hi : layout.deck.hi - 2;
    std::vector<int> out;
    for (int p = layout.deck.lo; p <= hi; ++p) out.push_back(p);
    return out;
}

std::vector<InputPair> all_inputs(int n) {
    std::vector<InputPair> out;
    int total = 1 << n;
    for (int xv = 0; xv < total; ++xv) {
        for (int yv = 0; yv < total; ++yv) {
            InputPair in;
            for (int i = 0; i < n; ++i) in.x.push_back((xv >> (n - 1 - i)) & 1);
            for (int i = 0; i < n; ++i) in.y.push_back((yv >> (n - 1 - i)) & 1);
            out.push_back(std::move(in));
        }
    }
    return out;
}

static void place_deck(const Protocol& p, State& s) {
    int hearts = p.deck_multiset.hearts, clubs = p.deck_multiset.clubs;
    std::vector<int> cells = p.main_deck_cells();
    if (p.encoding != Encoding::TwoCard) {
        // the designated extension deck holds one heart and one club
        hearts -= 1;
        clubs -= 1;
        auto des = p.designated_cells();
        s[des[0] - 1] = 'h';
        s[des[1] - 1] = 'c';
    }
    if (hearts < 0 || clubs < 0 || hearts + clubs != static_cast<int>(cells.size()))
        fail(Err::DeckShortage, "deck multiset does not fill the main deck positions");
    size_t i = 0;
    for (int k = 0; k < hearts; ++k) s[cells[i++] - 1] = 'h';
    for (int k = 0; k < clubs; ++k) s[cells[i++] - 1] = 'c';
}

static void place_player(const Protocol& p, State& s, Player pl, const std::vector<bool>& bits,
                         const std::optional<OmissionChoice>& choice) {
    const Range r = p.layout.input_of(pl);
    if (static_cast<int>(bits.size()) != p.layout.n)
        fail(Err::ValidationError, "input length does not match the layout");
    switch (p.encoding) {
        case Encoding::TwoCard:
            for (int i = 0; i < p.layout.n; ++i) {
                auto [a, b] = commit_2card(bits[i]);
                s[r.lo - 1 + 2 * i] = a;
                s[r.lo + 2 * i] = b;
            }
            break;
        case Encoding::OneCard:
            for (int i = 0; i < p.layout.n; ++i) s[r.lo - 1 + i] = commit_1card(bits[i]);
            break;
        case Encoding::HalfCard: {
            if (!choice) fail(Err::BadChoice, "half-card commitment needs an omission choice");
            std::string cells = commit_half_card(bits, *choice);
            for (size_t i = 0; i < cells.size(); ++i) s[r.lo - 1 + i] = cells[i];
            break;
        }
    }
}

State initial_state(const Protocol& p, const InputPair& in,
                    const std::optional<OmissionChoice>& alice_choice,
                    const std::optional<OmissionChoice>& bob_choice) {
    State s(p.layout.m, kEmpty);
    place_deck(p, s);
    place_player(p, s, Player::Alice, in.x, alice_choice);
    place_player(p, s, Player::Bob, in.y, bob_choice);
    return s;
}

std::vector<Weighted> initial_states(const Protocol& p, const InputPair& in,
                                     const std::optional<OmissionChoice>& alice_choice,
                                     const std::optional<OmissionChoice>& bob_choice) {
    if (p.encoding != Encoding::HalfCard || (alice_choice && bob_choice))
        return {Weighted{initial_state(p, in, alice_choice, bob_choice), Rat(1)}};
    auto alice_set = alice_choice ? std::vector<OmissionChoice>{*alice_choice} : all_omissions(p.layout.n);
    auto bob_set = bob_choice ? std::vector<OmissionChoice>{*bob_choice} : all_omissions(p.layout.n);
    Rat w(1, alice_set.size() * bob_set.size());
    w.canonicalize();
    std::vector<Weighted> out;
    for (const auto& ac : alice_set)
        for (const auto& bc : bob_set)
            out.push_back(Weighted{initial_state(p, in, ac, bc), w});
    return out;
}

std::string ValidationReport::str() const {
    if (ok()) return "valid";
    std::ostringstream os;
    for (const auto& v : violations) {
        os << err_name(v.code);
        if (v.step >= 0) os << " step=" << v.step;
        os << " " << v.detail << "\n";
    }
    return os.str();
}

ValidationReport validate_protocol(const Protocol& p) {
    ValidationReport rep;
    auto add = [&rep](Err c, int step, std::string d) {
        rep.violations.push_back(Violation{c, step, std::move(d)});
    };

    const TableLayout& L = p.layout;
    int cpb = cells_per_bit(p.encoding);
    if (L.alice_input.lo != 1 || L.alice_input.size() != L.n * cpb ||
        L.bob_input.lo != L.alice_input.hi + 1 || L.bob_input.size() != L.n * cpb ||
        L.deck.lo != L.bob_input.hi + 1 || L.deck.size() != L.s ||
        L.work_free.lo != L.deck.hi + 1 || L.work_free.hi != L.m)
        add(Err::ValidationError, -1, "layout ranges are not disjoint covering 1..m");
    if (p.deck_multiset.hearts + p.deck_multiset.clubs != L.s)
        add(Err::ValidationError, -1, "deck multiset size differs from deck positions");
    if (p.encoding != Encoding::TwoCard && (p.deck_multiset.hearts < 1 || p.deck_multiset.clubs < 1))
        add(Err::DeckShortage, -1, "designated extension deck needs one heart and one club");
    if (p.output.positions.empty())
        add(Err::ValidationError, -1, "no output positions");
    for (int pos : p.output.positions)
        if (pos < 1 || pos > L.m) add(Err::ValidationError, -1, "output position out of range");
    if (p.output.kind == OutputKind::Committed2Card && p.output.positions.size() % 2 != 0)
        add(Err::ValidationError, -1, "committed output needs an even number of positions");
    if (p.output.kind == OutputKind::Open && p.output.positions.size() > 2)
        add(Err::ValidationError, -1, "open output reads one cell or one pair");

    // static action checks
    for (int t = 0; t < p.length(); ++t) {
        for (const auto& [vis, a] : p.program[t]) {
            if (static_cast<int>(vis.size()) != L.m)
                add(Err::ValidationError, t, "visible key of wrong length");
            if (a.kind == Action::Kind::Shuffle)
                for (int pos : a.positions)
                    if (L.is_input(pos))
                        add(Err::ShuffleOnInput, t, "shuffle position " + std::to_string(pos));
            if (a.kind == Action::Kind::Extend && p.encoding == Encoding::TwoCard)
                add(Err::IllegalAction, t, "extend under the 2-card encoding");
        }
    }
    if (!rep.ok()) return rep;

    // forward exploration: every reachable visible must have an action
    std::set<State> frontier;
    for (const InputPair& in : all_inputs(L.n))
        for (const auto& w : initial_states(p, in)) frontier.insert(w.state);
    for (int t = 0; t < p.length(); ++t) {
        std::set<State> next;
        std::set<Visible> missing;
        for (const State& s : frontier) {
            Visible v = visible_of(s);
            auto it = p.program[t].find(v);
            if (it == p.program[t].end()) {
                if (missing.insert(v).second)
                    add(Err::MissingAction, t, "no action for visible " + v);
                continue;
            }
            try {
                for (auto& o : apply_action(s, it->second, L)) next.insert(std::move(o.state));
            } catch (const CardError& e) {
                add(Err::IllegalAction, t, std::string(e.what()) + " at visible " + v);
            }
        }
        if (!rep.ok()) return rep;
        frontier = std::move(next);
    }
    return rep;
}

bool decode_output(const Protocol& p, const State& s) {
    const auto& pos = p.output.positions;
    if (p.output.kind == OutputKind::Open) {
        for (int q : pos)
            if (!cell_face_up(s[q - 1]))
                fail(Err::DecodeFailure, "open output cell not face-up at position " + std::to_string(q));
        if (pos.size() == 1) return cell_suit(s[pos[0] - 1]) == Suit::Heart;
        return decode_2card(s[pos[0] - 1], s[pos[1] - 1]);
    }
    // committed pairs, all must agree
    std::optional<bool> val;
    for (size_t i = 0; i + 1 < pos.size(); i += 2) {
        char a = s[pos[i] - 1], b = s[pos[i + 1] - 1];
        if (!cell_face_down(a) || !cell_face_down(b))
            fail(Err::DecodeFailure, "committed output cells must hold face-down cards");
        bool bit = decode_2card(a, b);
        if (val && *val != bit) fail(Err::DecodeFailure, "committed output pairs disagree");
        val = bit;
    }
    if (!val) fail(Err::DecodeFailure, "no output pairs");
    return *val;
}

} // namespace cardforge
