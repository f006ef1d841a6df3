#pragma once

#include "cardforge/branching.hpp"
#include "cardforge/fragments.hpp"
#include "cardforge/verifier.hpp"

namespace cardforge {

// Line-oriented UTF-8/LF text formats. '#' lines are comments. Positions and
// vertices are one-based; permutations are one-based image lists like 2,1,3.

std::string serialize_protocol(const Protocol& p);
Protocol parse_protocol(const std::string& text); // PARSE_ERROR with line numbers

std::string serialize_fragment(const ProtocolFragment& f, Encoding enc);
ProtocolFragment parse_fragment(const std::string& text, Encoding* enc_out = nullptr);

std::string serialize_bp(const BranchingProgram& bp);
BranchingProgram parse_bp(const std::string& text);

std::string serialize_formula(const Formula& f);
Formula parse_formula(const std::string& text); // errors carry line/column

std::string serialize_action(const Action& a);
Action parse_action(const std::string& text, const std::string& where);

// Truth table files: one line "<xy> -> <bit>" per input, x and y concatenated.
std::string serialize_truth_table(const TruthTable& t);
TruthTable parse_truth_table(const std::string& text);
TruthTable table_from_formula(const Formula& f, int n = 0);

} // namespace cardforge
