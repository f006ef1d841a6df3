#pragma once

#include "cardforge/encodings.hpp"

#include <map>

namespace cardforge {

enum class OutputKind { Committed2Card, Open };

// Output positions plus how to read them. Committed output lists 2k positions
// forming k face-down pairs that must all decode to the same bit. Open output
// lists face-up cells: a single cell decodes by suit, a pair like a committed
// pair.
struct OutputSpec {
    std::vector<int> positions;
    OutputKind kind = OutputKind::Committed2Card;
    bool operator==(const OutputSpec&) const = default;
};

using StepMap = std::map<Visible, Action>;

// Oblivious fixed-length protocol: per step, a total map from reachable
// canonical visible state to the next action.
struct Protocol {
    std::string name;
    Encoding encoding = Encoding::TwoCard;
    TableLayout layout;
    SuitCount deck_multiset;          // initial deck content
    std::vector<StepMap> program;     // length T
    OutputSpec output;

    int length() const { return static_cast<int>(program.size()); }
    // Designated extension deck: by convention the last two deck positions
    // (one heart, one club) for the 1-card and 1/2-card encodings.
    std::vector<int> designated_cells() const;
    // Deck cells holding the main deck (all deck cells minus designated ones).
    std::vector<int> main_deck_cells() const;
};

// Committed inputs for one execution.
struct InputPair {
    std::vector<bool> x, y; // Alice, Bob
    std::string str() const { return bits_str(x) + "," + bits_str(y); }
};

std::vector<InputPair> all_inputs(int n);

struct Weighted {
    State state;
    Rat prob;
};

// Initial table states for a committed input. Deterministic single state for
// the 2-card and 1-card encodings; for the 1/2-card encoding a uniform mixture
// over all omission subsets of both players unless choices are supplied.
std::vector<Weighted> initial_states(const Protocol& p, const InputPair& in,
                                     const std::optional<OmissionChoice>& alice_choice = std::nullopt,
                                     const std::optional<OmissionChoice>& bob_choice = std::nullopt);

// The single initial state under fixed omission choices.
State initial_state(const Protocol& p, const InputPair& in,
                    const std::optional<OmissionChoice>& alice_choice = std::nullopt,
                    const std::optional<OmissionChoice>& bob_choice = std::nullopt);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    Err code;
    int step = -1; // -1: structural
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string str() const;
};

// Checks layout consistency, shuffle-position legality, Extend/encoding
// agreement, and totality of every step map over the visible states reachable
// from all committed inputs (all omissions included for half-card).
ValidationReport validate_protocol(const Protocol& p);

// Output decoding against a final state. Throws DECODE_FAILURE / INVALID_PAIR.
bool decode_output(const Protocol& p, const State& final_state);

} // namespace cardforge
