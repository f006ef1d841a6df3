#pragma once

#include "cardforge/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cardforge {

// ---------------------------------------------------------------------------
// Errors

enum class Err {
    IllegalAction,
    ShuffleOnInput,
    MissingAction,   // no program entry for a reachable (step, visible)
    TooLarge,        // oracle branch cap exceeded
    LengthMismatch,
    DecodeFailure,
    InvalidPair,
    NotOwner,
    DeckShortage,
    NoFreeCell,
    ContractMismatch,
    NotNormalized,
    NotRestricted,
    WidthNot5,
    NotReadOnly,
    NotOpenOutput,
    NotRestrictedTerminal,
    ParseError,
    ValidationError,
    OddLength,
    BadChoice,
    MalformedHalfCell,
    SuitExhausted,
    Internal,
};

const char* err_name(Err e);

struct CardError : std::runtime_error {
    Err code;
    CardError(Err c, const std::string& msg)
        : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw CardError(c, msg); }

// ---------------------------------------------------------------------------
// Cards and table state
//
// A table state is a string of length m, one char per position (1-based
// positions, index pos-1):
//   '.'  empty
//   'h'  heart face-down      'c'  club face-down
//   'H'  heart face-up        'C'  club face-up
// Cards are identified by suit only; two face-down cards of equal suit are
// interchangeable, so string equality is exactly suit-level state identity.

enum class Suit : uint8_t { Heart, Club };
enum class Player : uint8_t { Alice, Bob };

inline Player other(Player p) { return p == Player::Alice ? Player::Bob : Player::Alice; }
inline char player_char(Player p) { return p == Player::Alice ? 'a' : 'b'; }

using State = std::string;

inline constexpr char kEmpty = '.';

inline bool cell_occupied(char c) { return c != kEmpty; }
inline bool cell_face_down(char c) { return c == 'h' || c == 'c'; }
inline bool cell_face_up(char c) { return c == 'H' || c == 'C'; }
inline Suit cell_suit(char c) {
    return (c == 'h' || c == 'H') ? Suit::Heart : Suit::Club;
}
inline char make_cell(Suit s, bool face_up) {
    if (s == Suit::Heart) return face_up ? 'H' : 'h';
    return face_up ? 'C' : 'c';
}
inline char flip_cell(char c) {
    switch (c) {
        case 'h': return 'H';
        case 'H': return 'h';
        case 'c': return 'C';
        case 'C': return 'c';
        default: fail(Err::IllegalAction, "turn on empty cell");
    }
}

// Canonical visible state: '.' empty, '?' face-down, 'H'/'C' face-up suit.
using Visible = std::string;

Visible visible_of(const State& s);

// Multiset of suits on the table, for the conservation invariant.
struct SuitCount {
    int hearts = 0, clubs = 0;
    bool operator==(const SuitCount&) const = default;
};
SuitCount count_suits(const State& s);

// ---------------------------------------------------------------------------
// Layout

enum class Encoding { TwoCard, OneCard, HalfCard };

const char* encoding_name(Encoding e);
int cells_per_bit(Encoding e); // 2, 1, 2

// 1-based inclusive position range; empty when lo > hi.
struct Range {
    int lo = 1, hi = 0;
    bool contains(int p) const { return p >= lo && p <= hi; }
    int size() const { return hi >= lo ? hi - lo + 1 : 0; }
    bool operator==(const Range&) const = default;
};

struct TableLayout {
    int n = 0;  // bits per player
    int s = 0;  // deck size (card count)
    int m = 0;  // total positions
    Range alice_input, bob_input, deck, work_free;

    bool is_input(int p) const { return alice_input.contains(p) || bob_input.contains(p); }
    bool is_workspace(int p) const { return p >= deck.lo && p <= m; }
    Range input_of(Player p) const { return p == Player::Alice ? alice_input : bob_input; }
    Player owner_of_input(int pos) const;
    // bit index (1-based) an input position belongs to, and whether it is the
    // first or second cell of that bit (always first for 1-card encoding)
    std::pair<int, bool> bit_of_input(int pos, Encoding enc) const;
};

// Input ranges sized by encoding; deck cells next; `free_cells` empty cells after.
TableLayout make_layout(int n, int s, int free_cells, Encoding enc);

// ---------------------------------------------------------------------------
// Permutations (0-based image vectors; composition is left-to-right:
// compose(a,b) applies a first, then b).

using Perm = std::vector<int>;

Perm perm_identity(int k);
Perm perm_compose(const Perm& a, const Perm& b);
Perm perm_inverse(const Perm& a);
bool perm_is_identity(const Perm& a);
bool perm_is_valid(const Perm& a);

// ---------------------------------------------------------------------------
// Shuffles and actions

enum class GroupKind { Cyclic, Symmetric, Explicit };

struct ShuffleGroup {
    GroupKind kind = GroupKind::Cyclic;
    std::vector<Perm> perms; // explicit only
    bool closed = true;      // explicit sets: closed under composition?

    // Uniform distribution over the listed permutations of k positions.
    std::vector<Perm> elements(int k) const;
    bool operator==(const ShuffleGroup&) const = default;
};

ShuffleGroup cyclic_group();
ShuffleGroup symmetric_group();
ShuffleGroup explicit_group(std::vector<Perm> perms);
bool is_closed_under_composition(const std::vector<Perm>& perms);

struct Action {
    enum class Kind { Move, Shuffle, Turn, Extend } kind = Kind::Move;
    Player player = Player::Alice;
    int from = 0; // move/extend source; turn position
    int to = 0;   // move/extend target
    std::vector<int> positions; // shuffle positions (cyclic order) / extend deck positions
    ShuffleGroup group;         // shuffle only

    bool operator==(const Action&) const = default;
};

Action make_move(Player p, int from, int to);
Action make_turn(Player p, int pos);
Action make_shuffle(Player p, std::vector<int> positions, ShuffleGroup g);
Action make_extend(Player p, int source, int target, std::vector<int> deck_positions);
// The paper's no-op padding: shuffling a single card.
Action make_noop(Player p, int pos);

// ---------------------------------------------------------------------------
// Action application

struct Outcome {
    State state;
    Rat prob;
    // Private view annotation, non-empty only for Extend when requested:
    // "<peeked suit>|<post-shuffle deck arrangement>".
    std::string note;
};

// Full outcome distribution of one action, merged by suit-level state identity
// (and by annotation when `annotate` matches the acting player). Probabilities
// sum to exactly 1. Throws CardError on an illegal action.
std::vector<Outcome> apply_action(const State& s, const Action& a, const TableLayout& lay,
                                  std::optional<Player> annotate = std::nullopt);

// Un-merged expansion: one branch per group element (shuffles) or per
// (arrangement, scan decision) path (extend). Used by the brute-force oracle.
std::vector<Outcome> apply_action_raw(const State& s, const Action& a, const TableLayout& lay,
                                      std::optional<Player> annotate = std::nullopt);

// Number of raw branches apply_action_raw would produce.
long raw_branch_count(const State& s, const Action& a);

void check_action_legal(const State& s, const Action& a, const TableLayout& lay);

// Left-to-right scan over an arrangement string, accepting each desired-suit
// card with probability 1/(k+1) where k counts the unseen desired cards still
// to the right. Returns the exact distribution of the chosen index; it is
// uniform over the desired-suit positions.
std::vector<std::pair<int, Rat>> scan_pick_distribution(const std::string& arrangement, Suit desired);

} // namespace cardforge
