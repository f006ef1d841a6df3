#pragma once

#include "cardforge/executor.hpp"

namespace cardforge {

// ---------------------------------------------------------------------------
// Security modes
//
//   OutputAware — compare input pairs with equal function value
//   Committed   — compare all input pairs (strictly stronger)
//   PlayerView  — compare over the other player's inputs using the player's
//                 augmented emissions (peeks during Extend)

struct SecurityMode {
    enum class Kind { OutputAware, Committed, PlayerView } kind = Kind::Committed;
    Player viewer = Player::Alice; // PlayerView only
    std::string str() const;

    static SecurityMode output_aware() { return {Kind::OutputAware, Player::Alice}; }
    static SecurityMode committed() { return {Kind::Committed, Player::Alice}; }
    static SecurityMode player_view(Player p) { return {Kind::PlayerView, p}; }
};

struct TruthTable {
    int n = 0;
    std::vector<bool> values; // indexed by (x-bits << n) | y-bits, MSB-first
    bool eval(const InputPair& in) const;
};

TruthTable table_constant(int n, bool v);

struct VerdictReport {
    bool pass = true;
    std::string check;            // which verifier produced it
    std::string detail;           // human-readable diagnostics
    // distribution witness
    std::string input_a, input_b; // "x,y" bit strings
    std::vector<std::string> prefix;
    Rat p1, p2;
    bool has_prefix_witness = false;

    std::string report_line() const; // "PASS" or the machine-parseable FAIL line
};

// Exact equality of the induced distributions over (annotated) emission
// sequences, decided by forward basis maintenance over the rationals. On
// failure the witness prefix is the shortest distinguishing one (ties broken
// lexicographically); chains of different length fail with an empty prefix.
VerdictReport distributions_equal(const StepChain& a, const StepChain& b);

// Every reachable final state's output decodes to f(x,y), for every input.
VerdictReport check_correctness(const Protocol& p, const TruthTable& f);

// Whenever an input position is occupied, it holds the same card suit, over
// all inputs, levels, and reachable states.
VerdictReport check_read_only(const Protocol& p);

// Builds chains for all inputs and compares pairs according to the mode.
VerdictReport check_security(const Protocol& p, const TruthTable& f, const SecurityMode& mode);

// Replays a witness: recomputes the prefix probability under both inputs.
std::pair<Rat, Rat> replay_witness(const Protocol& p, const std::string& input_a,
                                   const std::string& input_b,
                                   const std::vector<std::string>& prefix,
                                   std::optional<Player> view = std::nullopt);

} // namespace cardforge
