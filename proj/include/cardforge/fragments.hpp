#pragma once

#include "cardforge/protocol.hpp"

#include <array>
#include <functional>
#include <set>

namespace cardforge {

// ---------------------------------------------------------------------------
// ScriptBuilder
//
// Records an oblivious program by forward exploration: it holds every table
// state reachable from the seed set (all inputs, all shuffle outcomes) and
// extends the program one step at a time. A step is a policy mapping the
// current visible state to an action, so obliviousness holds by construction.
// Conflicting per-branch plans that meet in the same visible state abort the
// build.

class ScriptBuilder {
public:
    ScriptBuilder(TableLayout layout, std::vector<State> seeds);

    int step() const { return static_cast<int>(program_.size()); }
    const std::set<State>& frontier() const { return frontier_; }
    const TableLayout& layout() const { return lay_; }

    void emit(const std::function<Action(const Visible&)>& policy);
    void constant(const Action& a);
    void move(Player p, int from, int to) { constant(make_move(p, from, to)); }
    void turn(Player p, int pos) { constant(make_turn(p, pos)); }
    void shuffle(Player p, std::vector<int> pos, ShuffleGroup g) {
        constant(make_shuffle(p, std::move(pos), std::move(g)));
    }
    void pad(Player p); // no-op step: single-card shuffle on the lowest occupied workspace cell

    // Runs per-state move/turn plans in lockstep; shorter plans are padded
    // with no-op shuffles. States sharing a visible must agree on the action.
    void run_plans(Player pad_player, const std::function<std::vector<Action>(const State&)>& plan_of);

    // Replays pre-recorded step maps (e.g. a fragment's steps).
    void run_recorded(const std::vector<StepMap>& steps);

    // Every frontier state must satisfy the predicate.
    void require(const std::function<bool(const State&)>& pred, Err code, const std::string& what) const;

    std::vector<StepMap> take_program() { return std::move(program_); }
    const std::vector<StepMap>& program() const { return program_; }

private:
    void record_and_apply(const std::map<Visible, Action>& step);

    TableLayout lay_;
    std::set<State> frontier_;
    std::vector<StepMap> program_;
};

// No-op action usable at any state: shuffles the lowest occupied workspace cell.
Action noop_for(const Visible& v, const TableLayout& lay, Player p);

// Conflict-free move sequence realizing src->dst placements, routing through
// spare cells when targets are blocked. Entries with src == dst vanish.
std::vector<Action> plan_moves(const State& s, Player p,
                               std::vector<std::pair<int, int>> want,
                               const std::vector<int>& spares);

// Identity-only shuffle: a legal closed uniform shuffle whose outcome set is a
// single state. Used for the deck "reshuffle" over canonically placed cards
// (suit-level card identity makes any suit-preserving shuffle a no-op) and
// realizable as the paper-style trivial shuffle.
ShuffleGroup identity_shuffle(int k);

// ---------------------------------------------------------------------------
// Gadget emitters

struct CopyCells {
    int src1 = 0, src2 = 0;       // committed pair to copy (consumed)
    int dst1a = 0, dst1b = 0;     // first copy
    int dst2a = 0, dst2b = 0;     // second copy
    std::array<int, 6> aux{};     // deck cells holding H,C,H,C,H,C in circle order
    std::array<int, 4> home{};    // leftover returns: heart, heart, club, club
};

struct CopyMarks {
    int shuffle6 = -1, shuffle4 = -1, reveal_begin = -1, reveal_end = -1;
};

// Bit copying: lay out the six auxiliary cards, cyclic-shuffle them,
// cyclic-shuffle the first four, reveal, fix or pad, return the leftovers.
CopyMarks emit_copy(ScriptBuilder& b, Player owner, const CopyCells& cells);

struct SwapCells {
    int c1 = 0, c2 = 0;               // deck cells holding the two auxiliary clubs
    int g1 = 0, g2 = 0;               // condition bit pair (consumed)
    std::vector<int> alpha, beta;     // payload cells, |alpha| == |beta|
    int park1 = 0, park2 = 0;         // face-up parking for the auxiliary clubs
    int park_role0 = 0, park_role1 = 0; // revealed-heart parking; the cell encodes the branch
    int heart_home = 0;               // return cell for the revealed heart
    std::array<int, 3> club_home{};   // return cells for the three clubs
    std::vector<int> deck_rest;       // occupied deck cells at fragment end (reshuffle scope)
};

struct SwapMarks {
    int shuffle = -1, reveal_begin = -1, reveal_end = -1;
};

// Conditional swap: payloads exchanged iff the bit is 1.
SwapMarks emit_swap(ScriptBuilder& b, Player owner, const SwapCells& cells);

// ---------------------------------------------------------------------------
// Fragments: recorded steps plus a position/deck contract.

struct FragmentContract {
    // pos -> expectation: 'p'/'q' first/second cell of a committed pair,
    // 'h'/'c' known face-down card, 'H'/'C' known face-up card, '.' empty,
    // '?' any card
    std::map<int, char> pre, post;
    SuitCount deck_pre, deck_post; // multiset over the layout's deck range
};

struct ProtocolFragment {
    std::string name; // declared effect
    TableLayout layout;
    std::vector<StepMap> steps;
    FragmentContract contract;
    SuitCount deck_required; // what the fragment borrows

    int length() const { return static_cast<int>(steps.size()); }
};

// Sequential composition; errors with CONTRACT_MISMATCH naming the first
// violated requirement.
ProtocolFragment compose(const std::vector<ProtocolFragment>& fragments);

// Fragment builders. `pre_states` seeds the exploration and must satisfy the
// fragment's pre-contract (committed bit values are enumerated by the caller).
ProtocolFragment copy_fragment(const TableLayout& lay, Player owner, const CopyCells& cells,
                               std::vector<State> pre_states, CopyMarks* marks = nullptr);
ProtocolFragment swap_fragment(const TableLayout& lay, Player owner, const SwapCells& cells,
                               std::vector<State> pre_states, SwapMarks* marks = nullptr);
// Two moves relocating the pair to (pair.first, free_cell) with flipped value.
ProtocolFragment not_fragment(const TableLayout& lay, Player owner, std::pair<int, int> pair,
                              int free_cell, std::vector<State> pre_states);

// ---------------------------------------------------------------------------
// Ready-made gadget protocols (layouts per the constructions above).

struct GadgetProtocol {
    Protocol protocol;
    CopyCells copy_cells;   // meaningful for copy-based gadgets
    SwapCells swap_cells;   // meaningful for swap-based gadgets
    CopyMarks copy_marks;
    SwapMarks swap_marks;
    ProtocolFragment fragment; // the core fragment, recorded
};

// Copy gadget as a protocol computing (b, b): Alice's bit is copied into two
// committed pairs.
GadgetProtocol make_copy_protocol();

// Conditional swap over heart/club payloads of the given length; committed
// output (alpha0, beta0) decodes to NOT b.
GadgetProtocol make_swap_protocol(int payload_len);

// NOT applied to Alice's bit, output at the relocated pair.
GadgetProtocol make_not_protocol();

// 1-card extension followed by the copy protocol; the extended committed pair
// is the output, input card restored, designated deck restored and shuffled.
GadgetProtocol make_extend1_protocol();

// Same for one bit of a 1/2-card committed input (n = 2 bits per player).
GadgetProtocol make_extend_half_protocol();

// Single step: turn Alice's first input card face-up; open output on that cell.
Protocol make_turn_x1_protocol();

} // namespace cardforge
