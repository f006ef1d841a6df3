#pragma once

#include "cardforge/protocol.hpp"

#include <map>

namespace cardforge {

// ---------------------------------------------------------------------------
// Levelled Markov chain of reachable table states with visible emissions.

struct ChainNode {
    State state;
    Visible emission;
};

struct ChainEdge {
    int from = 0, to = 0;
    Rat weight;
    std::string note; // player-view annotation carried by the step, usually empty
};

struct StepChain {
    int steps = 0;                                // T
    std::vector<std::vector<ChainNode>> levels;   // T+1 levels
    std::vector<Rat> init_weights;                // level-0 distribution
    std::vector<std::vector<ChainEdge>> edges;    // edges[t]: level t -> t+1

    // Total probability mass reaching each node of a level.
    std::vector<Rat> level_mass(int level) const;
};

struct ChainOptions {
    std::optional<Player> player_view;  // annotate Extend steps of this player
    bool merge = true;                  // merge nodes by suit-level identity
    bool parallel = true;               // OpenMP level expansion
    std::optional<OmissionChoice> alice_choice, bob_choice;
};

// Builds the exact execution distribution for one committed input. Level t+1
// holds all outcomes of the step-t action applied to level-t states.
StepChain build_step_chain(const Protocol& p, const InputPair& in, const ChainOptions& opt = {});

// Serial reference implementation; kept for testing the parallel kernel and
// for the benchmark target.
StepChain build_step_chain_serial(const Protocol& p, const InputPair& in, const ChainOptions& opt = {});

// ---------------------------------------------------------------------------
// Trace distributions

// A trace is the emission sequence, one entry per level; entries with a
// player-view annotation read "<emission>[<note>]". Keys join entries with '/'.
using TraceDistribution = std::map<std::string, Rat>;

std::string trace_key(const std::vector<std::string>& emissions);

// Exhaustive path expansion without merging: one branch per shuffle group
// element / extend scan path. Refuses with TOO_LARGE when the estimated raw
// branch count exceeds the cap (default 10^6, overridable via the
// CARDFORGE_ORACLE_CAP environment variable).
TraceDistribution enumerate_traces_oracle(const Protocol& p, const InputPair& in,
                                          const ChainOptions& opt = {},
                                          std::optional<long> cap = std::nullopt);

// Raw executions with their final states; used by gadget-level tests.
struct Execution {
    std::vector<std::string> emissions; // T+1, annotated
    std::vector<int> choices;           // branch index chosen at each step
    State final_state;
    Rat prob;
};
std::vector<Execution> enumerate_executions(const Protocol& p, const InputPair& in,
                                            const ChainOptions& opt = {},
                                            std::optional<long> cap = std::nullopt);

mpz_class estimate_raw_paths(const Protocol& p, const InputPair& in, const ChainOptions& opt = {});
long oracle_cap_from_env(std::optional<long> explicit_cap);

// Projection of a chain onto its emission-sequence distribution (exact).
TraceDistribution chain_trace_distribution(const StepChain& chain);

// Exact probability of an emission-sequence prefix under a chain.
Rat chain_prefix_prob(const StepChain& chain, const std::vector<std::string>& prefix);

// ---------------------------------------------------------------------------
// Sampling runner: reproducible single execution from a 64-bit seed.

struct SampledRun {
    std::vector<std::string> emissions; // T+1
    State final_state;
};

SampledRun run_sampled(const Protocol& p, const InputPair& in, uint64_t seed,
                       const std::optional<OmissionChoice>& alice_choice = std::nullopt,
                       const std::optional<OmissionChoice>& bob_choice = std::nullopt);

} // namespace cardforge
