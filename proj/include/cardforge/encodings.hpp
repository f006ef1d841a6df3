#pragma once

#include "cardforge/core.hpp"

#include <set>

namespace cardforge {

// ---------------------------------------------------------------------------
// 2-card encoding: 1 = heart club, 0 = club heart, both face-down.

std::pair<char, char> commit_2card(bool bit);
bool decode_2card(char first, char second); // throws INVALID_PAIR

// 1-card encoding: 1 = heart, 0 = club, face-down.
char commit_1card(bool bit);
bool decode_1card(char cell);

// ---------------------------------------------------------------------------
// 1/2-card encoding: a bit is one card plus one deliberately empty cell.
//   1 = (h, .) or (., c)      0 = (c, .) or (., h)

bool decode_half_card(char first, char second); // throws MALFORMED_HALF_CELL

// Bits whose heart-slot is left empty. |S| = n/2 exactly, n even.
struct OmissionChoice {
    int n = 0;
    std::set<int> omit_heart; // 1-based bit indices
};

OmissionChoice make_omission(int n, std::set<int> omit_heart); // validates
std::vector<OmissionChoice> all_omissions(int n);

// Cells (2 per bit) for a half-card commitment. Bits in S place their club,
// bits outside S place their heart, so every input uses exactly n/2 cards of
// each suit.
std::string commit_half_card(const std::vector<bool>& bits, const OmissionChoice& choice);

// ---------------------------------------------------------------------------
// Uniform complementary pick (scan with probability 1/(k+1)).

std::vector<std::pair<int, Rat>> uniform_complement_pick(const std::string& deck_arrangement,
                                                         Suit desired);

// Bit string helpers ("0110" style, index 1 = leftmost).
std::vector<bool> parse_bits(const std::string& s);
std::string bits_str(const std::vector<bool>& bits);

} // namespace cardforge
