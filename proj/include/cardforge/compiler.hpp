#pragma once

#include "cardforge/branching.hpp"
#include "cardforge/fragments.hpp"

namespace cardforge {

struct GadgetRecord {
    Player owner;
    int var = 1;
    Transposition tau;
    int first_step = 0, past_step = 0; // [first, past)
};

struct CompilationPlan {
    Encoding encoding = Encoding::TwoCard;
    std::array<int, 5> program_cells{};
    SuitCount deck_budget;
    std::vector<GadgetRecord> gadgets;
    int accept_cell = 0, reject_cell = 0;
    int setup_steps = 0;

    std::string str() const; // '#'-commented dump for --emit-plan
};

// Fixed deck multiset sufficient for the program cards plus the worst
// simultaneous gadget need; independent of the program.
SuitCount deck_budget(const BranchingProgram& bp, Encoding enc = Encoding::TwoCard);

struct CompiledProtocol {
    Protocol protocol;
    CompilationPlan plan;
};

// Compiles a restricted width-5 permutation branching program with identity
// zero-edges into an oblivious, read-only, secure card protocol with committed
// 2-card output (the accept-vertex cell first).
CompiledProtocol compile_bp_to_protocol(const BranchingProgram& bp,
                                        Encoding enc = Encoding::TwoCard);

} // namespace cardforge
