#pragma once

#include "cardforge/branching.hpp"
#include "cardforge/verifier.hpp"

namespace cardforge {

// Which group element stands in for a shuffle when the execution is projected
// onto a branching program (the particular choice does not matter for the
// computed function).
enum class ShuffleChoice { LexMin, LexMax };

// Extracts a layered branching program from a read-only oblivious protocol
// with open boolean output over the 2-card encoding. Layer-t vertices are the
// reachable internal states (work space plus input occupancy) at step t; moves
// and turns of input cards become real variable queries, everything else a
// dummy query of Alice's first bit. A final collapse layer leaves exactly one
// accept and one reject vertex.
BranchingProgram protocol_to_bp(const Protocol& p, const TruthTable& f,
                                ShuffleChoice choice = ShuffleChoice::LexMin);

} // namespace cardforge
