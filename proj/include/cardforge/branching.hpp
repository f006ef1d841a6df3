#pragma once

#include "cardforge/core.hpp"

#include <map>

namespace cardforge {

// ---------------------------------------------------------------------------
// Branching programs. Vertices are 0-based internally (1-based in the text
// format). Permutations compose left-to-right throughout.

struct Transposition {
    int a = 0, b = 0; // 0-based, a < b
    bool operator==(const Transposition&) const = default;
};

struct BpLayer {
    Player owner = Player::Alice;
    int var = 1;  // 1-based bit index of the owner
    Perm e0, e1;  // edge maps into the next layer; bijections for permutation programs
};

struct BranchingProgram {
    int width = 0;                // maximum layer size
    std::vector<int> layer_sizes; // one entry per layer (d entries)
    std::vector<BpLayer> layers;  // d-1 entries
    int start = 0;
    int accept = 0, reject = 0;   // vertices of the last layer
    bool permutation = true;      // uniform width, bijective edges

    int depth() const { return static_cast<int>(layers.size()) + 1; }
    // highest variable index used, per player
    int max_var(Player p) const;
};

void validate_bp(const BranchingProgram& bp); // throws VALIDATION_ERROR

// Follows the active vertex from start; returns 1 iff it ends at the accept
// vertex. With restricted_check, ending elsewhere raises
// NOT_RESTRICTED_TERMINAL.
bool eval_bp(const BranchingProgram& bp, const std::vector<bool>& x, const std::vector<bool>& y,
             bool restricted_check = true);

// Equivalent program with every zero-edge map the identity; vertices are
// relabeled layer by layer and start/accept/reject remapped accordingly.
BranchingProgram normalize_zero_identity(const BranchingProgram& bp);

// Deterministic decomposition: cycles in increasing order of their smallest
// element; composing the result left-to-right recovers the permutation.
std::vector<Transposition> decompose_transpositions(const Perm& p);
Perm recompose(int width, const std::vector<Transposition>& ts);

// The permutation denoted by a cycle under the left-to-right convention:
// cycle (c1 c2 ... ck) maps c_{i+1} to c_i and c1 to ck.
Perm perm_from_cycle(int width, const std::vector<int>& cycle);
bool is_single_cycle(const Perm& p, int len);

// ---------------------------------------------------------------------------
// Formulas

struct Formula {
    enum class Op { And, Or, Not, Var } op = Op::Var;
    Player owner = Player::Alice; // Var only
    int index = 1;                // Var only, 1-based
    std::vector<Formula> kids;
};

Formula f_var(Player owner, int index);
Formula f_and(Formula a, Formula b);
Formula f_or(Formula a, Formula b);
Formula f_not(Formula a);

bool eval_formula(const Formula& f, const std::vector<bool>& x, const std::vector<bool>& y);
int formula_max_var(const Formula& f, Player p);
Formula rewrite_or_de_morgan(const Formula& f);

// Width-5 restricted permutation program with all zero-edges the identity,
// truth-table equal to the formula. ORs are rewritten via De Morgan first.
BranchingProgram barrington_compile(const Formula& f);

// The designated output 5-cycle of the construction.
Perm barrington_sigma();

} // namespace cardforge
