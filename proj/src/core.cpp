#include "cardforge/core.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cardforge {

const char* err_name(Err e) {
    switch (e) {
        case Err::IllegalAction: return "ILLEGAL_ACTION";
        case Err::ShuffleOnInput: return "SHUFFLE_ON_INPUT";
        case Err::MissingAction: return "INCOMPLETE_STEP";
        case Err::TooLarge: return "TOO_LARGE";
        case Err::LengthMismatch: return "LENGTH_MISMATCH";
        case Err::DecodeFailure: return "DECODE_FAILURE";
        case Err::InvalidPair: return "INVALID_PAIR";
        case Err::NotOwner: return "NOT_OWNER";
        case Err::DeckShortage: return "DECK_SHORTAGE";
        case Err::NoFreeCell: return "NO_FREE_CELL";
        case Err::ContractMismatch: return "CONTRACT_MISMATCH";
        case Err::NotNormalized: return "NOT_NORMALIZED";
        case Err::NotRestricted: return "NOT_RESTRICTED";
        case Err::WidthNot5: return "WIDTH_NOT_5";
        case Err::NotReadOnly: return "NOT_READ_ONLY";
        case Err::NotOpenOutput: return "NOT_OPEN_OUTPUT";
        case Err::NotRestrictedTerminal: return "NOT_RESTRICTED_TERMINAL";
        case Err::ParseError: return "PARSE_ERROR";
        case Err::ValidationError: return "VALIDATION_ERROR";
        case Err::OddLength: return "ODD_LENGTH";
        case Err::BadChoice: return "BAD_CHOICE";
        case Err::MalformedHalfCell: return "MALFORMED_HALF_CELL";
        case Err::SuitExhausted: return "SUIT_EXHAUSTED";
        case Err::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

Visible visible_of(const State& s) {
    Visible v(s.size(), '.');
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        v[i] = cell_occupied(c) ? (cell_face_down(c) ? '?' : c) : kEmpty;
    }
    return v;
}

SuitCount count_suits(const State& s) {
    SuitCount sc;
    for (char c : s) {
        if (!cell_occupied(c)) continue;
        if (cell_suit(c) == Suit::Heart) sc.hearts++; else sc.clubs++;
    }
    return sc;
}

const char* encoding_name(Encoding e) {
    switch (e) {
        case Encoding::TwoCard: return "two_card";
        case Encoding::OneCard: return "one_card";
        case Encoding::HalfCard: return "half_card";
    }
    return "?";
}

int cells_per_bit(Encoding e) { return e == Encoding::OneCard ? 1 : 2; }

Player TableLayout::owner_of_input(int pos) const {
    if (alice_input.contains(pos)) return Player::Alice;
    if (bob_input.contains(pos)) return Player::Bob;
    fail(Err::Internal, "position " + std::to_string(pos) + " is not an input position");
}

std::pair<int, bool> TableLayout::bit_of_input(int pos, Encoding enc) const {
    Range r = alice_input.contains(pos) ? alice_input : bob_input;
    int off = pos - r.lo;
    int cpb = cells_per_bit(enc);
    return {off / cpb + 1, off % cpb == 0};
}

TableLayout make_layout(int n, int s, int free_cells, Encoding enc) {
    TableLayout lay;
    lay.n = n;
    lay.s = s;
    int cpb = cells_per_bit(enc);
    lay.alice_input = Range{1, n * cpb};
    lay.bob_input = Range{n * cpb + 1, 2 * n * cpb};
    lay.deck = Range{2 * n * cpb + 1, 2 * n * cpb + s};
    lay.work_free = Range{lay.deck.hi + 1, lay.deck.hi + free_cells};
    lay.m = lay.work_free.hi;
    return lay;
}

// --- permutations ----------------------------------------------------------

Perm perm_identity(int k) {
    Perm p(k);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Perm perm_compose(const Perm& a, const Perm& b) {
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = b[a[i]];
    return r;
}

Perm perm_inverse(const Perm& a) {
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[a[i]] = static_cast<int>(i);
    return r;
}

bool perm_is_identity(const Perm& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != static_cast<int>(i)) return false;
    return true;
}

bool perm_is_valid(const Perm& a) {
    std::vector<bool> seen(a.size(), false);
    for (int v : a) {
        if (v < 0 || v >= static_cast<int>(a.size()) || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<Perm> ShuffleGroup::elements(int k) const {
    std::vector<Perm> out;
    switch (kind) {
        case GroupKind::Cyclic:
            for (int r = 0; r < k; ++r) {
                Perm p(k);
                for (int i = 0; i < k; ++i) p[i] = (i + r) % k;
                out.push_back(std::move(p));
            }
            break;
        case GroupKind::Symmetric: {
            if (k > 8) fail(Err::TooLarge, "symmetric shuffle over " + std::to_string(k) + " positions");
            Perm p = perm_identity(k);
            do out.push_back(p);
            while (std::next_permutation(p.begin(), p.end()));
            break;
        }
        case GroupKind::Explicit:
            for (const Perm& p : perms) {
                if (static_cast<int>(p.size()) != k || !perm_is_valid(p))
                    fail(Err::ValidationError, "explicit shuffle permutation does not match position count");
                out.push_back(p);
            }
            break;
    }
    if (out.empty()) fail(Err::ValidationError, "empty shuffle set");
    return out;
}

ShuffleGroup cyclic_group() { return ShuffleGroup{GroupKind::Cyclic, {}, true}; }
ShuffleGroup symmetric_group() { return ShuffleGroup{GroupKind::Symmetric, {}, true}; }

bool is_closed_under_composition(const std::vector<Perm>& perms) {
    for (const Perm& a : perms)
        for (const Perm& b : perms)
            if (std::find(perms.begin(), perms.end(), perm_compose(a, b)) == perms.end())
                return false;
    return true;
}

ShuffleGroup explicit_group(std::vector<Perm> perms) {
    if (perms.empty()) fail(Err::ValidationError, "explicit shuffle set is empty");
    for (size_t i = 0; i < perms.size(); ++i)
        for (size_t j = i + 1; j < perms.size(); ++j)
            if (perms[i] == perms[j]) fail(Err::ValidationError, "duplicate permutation in explicit shuffle set");
    ShuffleGroup g{GroupKind::Explicit, perms, is_closed_under_composition(perms)};
    return g;
}

Action make_move(Player p, int from, int to) {
    Action a;
    a.kind = Action::Kind::Move;
    a.player = p;
    a.from = from;
    a.to = to;
    return a;
}

Action make_turn(Player p, int pos) {
    Action a;
    a.kind = Action::Kind::Turn;
    a.player = p;
    a.from = pos;
    return a;
}

Action make_shuffle(Player p, std::vector<int> positions, ShuffleGroup g) {
    Action a;
    a.kind = Action::Kind::Shuffle;
    a.player = p;
    a.positions = std::move(positions);
    a.group = std::move(g);
    return a;
}

Action make_extend(Player p, int source, int target, std::vector<int> deck_positions) {
    Action a;
    a.kind = Action::Kind::Extend;
    a.player = p;
    a.from = source;
    a.to = target;
    a.positions = std::move(deck_positions);
    return a;
}

Action make_noop(Player p, int pos) { return make_shuffle(p, {pos}, cyclic_group()); }

// --- legality ---------------------------------------------------------------

static void check_pos(int p, const TableLayout& lay) {
    if (p < 1 || p > lay.m) fail(Err::IllegalAction, "position " + std::to_string(p) + " out of range");
}

void check_action_legal(const State& s, const Action& a, const TableLayout& lay) {
    switch (a.kind) {
        case Action::Kind::Move:
            check_pos(a.from, lay);
            check_pos(a.to, lay);
            if (a.from == a.to) fail(Err::IllegalAction, "move onto itself");
            if (!cell_occupied(s[a.from - 1])) fail(Err::IllegalAction, "move from empty position " + std::to_string(a.from));
            if (cell_occupied(s[a.to - 1])) fail(Err::IllegalAction, "move onto occupied position " + std::to_string(a.to));
            break;
        case Action::Kind::Turn:
            check_pos(a.from, lay);
            if (!cell_occupied(s[a.from - 1])) fail(Err::IllegalAction, "turn on empty position " + std::to_string(a.from));
            break;
        case Action::Kind::Shuffle: {
            if (a.positions.empty()) fail(Err::IllegalAction, "shuffle over no positions");
            std::vector<int> sorted = a.positions;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                fail(Err::IllegalAction, "duplicate shuffle position");
            for (int p : a.positions) {
                check_pos(p, lay);
                if (lay.is_input(p)) fail(Err::ShuffleOnInput, "shuffle touches input position " + std::to_string(p));
                if (!cell_occupied(s[p - 1])) fail(Err::IllegalAction, "shuffle over empty position " + std::to_string(p));
            }
            break;
        }
        case Action::Kind::Extend: {
            check_pos(a.from, lay);
            check_pos(a.to, lay);
            if (!lay.is_input(a.from)) fail(Err::IllegalAction, "extend source must be an input position");
            if (lay.owner_of_input(a.from) != a.player)
                fail(Err::NotOwner, "extension attempted by the non-owner of position " + std::to_string(a.from));
            if (!cell_face_down(s[a.from - 1])) fail(Err::IllegalAction, "extend source must hold a face-down card");
            if (cell_occupied(s[a.to - 1])) fail(Err::IllegalAction, "extend target occupied");
            if (a.positions.empty()) fail(Err::IllegalAction, "extend without deck positions");
            for (int p : a.positions) {
                check_pos(p, lay);
                if (!lay.is_workspace(p)) fail(Err::IllegalAction, "extend deck position not in work space");
                if (!cell_occupied(s[p - 1])) fail(Err::IllegalAction, "extend deck position empty");
            }
            Suit want = cell_suit(s[a.from - 1]) == Suit::Heart ? Suit::Club : Suit::Heart;
            bool found = false;
            for (int p : a.positions) found |= cell_suit(s[p - 1]) == want;
            if (!found) fail(Err::SuitExhausted, "no complementary card in the designated deck");
            break;
        }
    }
}

// --- scan pick (probability 1/(k+1) recursion) -------------------------------

std::vector<std::pair<int, Rat>> scan_pick_distribution(const std::string& arrangement, Suit desired) {
    // Scan left to right; accept each desired-suit card with probability
    // 1/(k+1), k = desired-suit cards still unseen to the right.
    std::vector<int> spots;
    for (size_t i = 0; i < arrangement.size(); ++i)
        if (cell_occupied(arrangement[i]) && cell_suit(arrangement[i]) == desired)
            spots.push_back(static_cast<int>(i));
    if (spots.empty()) fail(Err::SuitExhausted, "no card of the desired suit");
    std::vector<std::pair<int, Rat>> out;
    Rat carry(1);
    int total = static_cast<int>(spots.size());
    for (int j = 0; j < total; ++j) {
        int k = total - 1 - j; // unseen desired cards after this one
        Rat accept = carry * Rat(1, k + 1);
        accept.canonicalize();
        out.emplace_back(spots[j], accept);
        carry *= Rat(k, k + 1);
        carry.canonicalize();
    }
    return out;
}

// --- application ------------------------------------------------------------

static State apply_perm_to_positions(const State& s, const std::vector<int>& pos, const Perm& p) {
    State t = s;
    for (size_t i = 0; i < pos.size(); ++i) t[pos[p[i]] - 1] = s[pos[i] - 1];
    return t;
}

static std::string extend_note(Suit peeked, const std::string& arrangement) {
    std::string n = peeked == Suit::Heart ? "H|" : "C|";
    for (char c : arrangement) n += cell_face_down(c) || cell_face_up(c) ? (cell_suit(c) == Suit::Heart ? 'H' : 'C') : '.';
    return n;
}

// Enumerates extend branches: the designated deck is shuffled uniformly, the
// owner peeks the source card and scan-picks a complementary card, which moves
// to the target. One branch per (permutation, scan path).
static std::vector<Outcome> extend_outcomes(const State& s, const Action& a, bool annotate) {
    std::string contents;
    for (int p : a.positions) contents += s[p - 1];
    Suit src = cell_suit(s[a.from - 1]);
    Suit want = src == Suit::Heart ? Suit::Club : Suit::Heart;
    int k = static_cast<int>(a.positions.size());
    auto perms = symmetric_group().elements(k);
    Rat per_perm(1, perms.size());
    per_perm.canonicalize();

    std::vector<Outcome> out;
    for (const Perm& p : perms) {
        std::string arr(contents.size(), kEmpty);
        for (int i = 0; i < k; ++i) arr[p[i]] = contents[i];
        auto picks = scan_pick_distribution(arr, want);
        for (auto& [idx, pr] : picks) {
            State t = s;
            for (int i = 0; i < k; ++i) t[a.positions[i] - 1] = arr[i];
            t[a.to - 1] = t[a.positions[idx] - 1];
            t[a.positions[idx] - 1] = kEmpty;
            Rat q = per_perm * pr;
            q.canonicalize();
            out.push_back(Outcome{std::move(t), q, annotate ? extend_note(src, arr) : std::string()});
        }
    }
    return out;
}

static std::vector<Outcome> merge_outcomes(std::vector<Outcome> raw) {
    std::map<std::pair<State, std::string>, Rat> acc;
    for (auto& o : raw) acc[{o.state, o.note}] += o.prob;
    std::vector<Outcome> out;
    out.reserve(acc.size());
    for (auto& [key, q] : acc) {
        Rat p = q;
        p.canonicalize();
        out.push_back(Outcome{key.first, p, key.second});
    }
    return out;
}

std::vector<Outcome> apply_action_raw(const State& s, const Action& a, const TableLayout& lay,
                                      std::optional<Player> annotate) {
    check_action_legal(s, a, lay);
    switch (a.kind) {
        case Action::Kind::Move: {
            State t = s;
            t[a.to - 1] = t[a.from - 1];
            t[a.from - 1] = kEmpty;
            return {Outcome{std::move(t), Rat(1), ""}};
        }
        case Action::Kind::Turn: {
            State t = s;
            t[a.from - 1] = flip_cell(t[a.from - 1]);
            return {Outcome{std::move(t), Rat(1), ""}};
        }
        case Action::Kind::Shuffle: {
            auto perms = a.group.elements(static_cast<int>(a.positions.size()));
            Rat each(1, perms.size());
            each.canonicalize();
            std::vector<Outcome> out;
            out.reserve(perms.size());
            for (const Perm& p : perms)
                out.push_back(Outcome{apply_perm_to_positions(s, a.positions, p), each, ""});
            return out;
        }
        case Action::Kind::Extend:
            return extend_outcomes(s, a, annotate && *annotate == a.player);
    }
    fail(Err::Internal, "unreachable");
}

std::vector<Outcome> apply_action(const State& s, const Action& a, const TableLayout& lay,
                                  std::optional<Player> annotate) {
    return merge_outcomes(apply_action_raw(s, a, lay, annotate));
}

long raw_branch_count(const State& s, const Action& a) {
    switch (a.kind) {
        case Action::Kind::Move:
        case Action::Kind::Turn:
            return 1;
        case Action::Kind::Shuffle: {
            int k = static_cast<int>(a.positions.size());
            switch (a.group.kind) {
                case GroupKind::Cyclic: return k;
                case GroupKind::Symmetric: {
                    long f = 1;
                    for (int i = 2; i <= k; ++i) f *= i;
                    return f;
                }
                case GroupKind::Explicit: return static_cast<long>(a.group.perms.size());
            }
            return 1;
        }
        case Action::Kind::Extend: {
            int k = static_cast<int>(a.positions.size());
            long f = 1;
            for (int i = 2; i <= k; ++i) f *= i;
            Suit src = cell_suit(s[a.from - 1]);
            Suit want = src == Suit::Heart ? Suit::Club : Suit::Heart;
            long desired = 0;
            for (int p : a.positions)
                if (cell_suit(s[p - 1]) == want) desired++;
            return f * std::max(desired, 1L);
        }
    }
    return 1;
}

} // namespace cardforge
