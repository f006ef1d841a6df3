#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardforge/compiler.hpp"
#include "cardforge/io.hpp"

using namespace cardforge;

// Full formula -> program -> protocol -> verifier sweeps beyond the AND2 case
// covered by the acceptance suite.

TEST_CASE("xor of two bits: compiled protocol is correct, read-only and secure") {
    Formula a1 = f_var(Player::Alice, 1), b1 = f_var(Player::Bob, 1);
    Formula xor2 = f_or(f_and(a1, f_not(b1)), f_and(f_not(a1), b1));
    CompiledProtocol cp = compile_bp_to_protocol(barrington_compile(xor2));
    TruthTable t = table_from_formula(xor2);
    CHECK(check_correctness(cp.protocol, t).pass);
    CHECK(check_read_only(cp.protocol).pass);
    CHECK(check_security(cp.protocol, t, SecurityMode::committed()).pass);
    CHECK(check_security(cp.protocol, t, SecurityMode::output_aware()).pass);
}

TEST_CASE("majority of three: compiled protocol is correct and read-only") {
    Formula a1 = f_var(Player::Alice, 1), a2 = f_var(Player::Alice, 2), b1 = f_var(Player::Bob, 1);
    Formula maj = f_or(f_and(a1, a2), f_or(f_and(a1, b1), f_and(a2, b1)));
    CompiledProtocol cp = compile_bp_to_protocol(barrington_compile(maj));
    CHECK(cp.plan.gadgets.size() >= 100); // a real workload, thousands of steps
    TruthTable t = table_from_formula(maj);
    CHECK(check_correctness(cp.protocol, t).pass);
    CHECK(check_read_only(cp.protocol).pass);
}

TEST_CASE("sampled runs of the xor protocol decode correctly for every input") {
    Formula a1 = f_var(Player::Alice, 1), b1 = f_var(Player::Bob, 1);
    Formula xor2 = f_or(f_and(a1, f_not(b1)), f_and(f_not(a1), b1));
    CompiledProtocol cp = compile_bp_to_protocol(barrington_compile(xor2));
    for (const InputPair& in : all_inputs(1))
        for (uint64_t seed : {1u, 2u, 3u})
            CHECK(decode_output(cp.protocol, run_sampled(cp.protocol, in, seed).final_state) ==
                  (in.x[0] != in.y[0]));
}
