#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardforge/compiler.hpp"
#include "cardforge/io.hpp"

using namespace cardforge;

namespace {

SuitCount deck_suits(const TableLayout& lay, const State& s) {
    SuitCount sc;
    for (int p = lay.deck.lo; p <= lay.deck.hi; ++p) {
        char c = s[p - 1];
        if (!cell_occupied(c)) continue;
        (cell_suit(c) == Suit::Heart ? sc.hearts : sc.clubs)++;
    }
    return sc;
}

} // namespace

TEST_CASE("copy: both destinations decode to the bit on all 24 branches") {
    GadgetProtocol g = make_copy_protocol();
    for (bool b : {false, true}) {
        auto execs = enumerate_executions(g.protocol, InputPair{{b}, {true}});
        CHECK(execs.size() == 24);
        for (const Execution& e : execs) {
            CHECK(decode_2card(e.final_state[12], e.final_state[13]) == b);
            CHECK(decode_2card(e.final_state[14], e.final_state[15]) == b);
        }
    }
}

TEST_CASE("copy: the reveal shows an alternating pattern with probability exactly 1/2") {
    GadgetProtocol g = make_copy_protocol();
    const CopyCells& c = g.copy_cells;
    for (bool b : {false, true}) {
        Rat alternating(0);
        for (const Execution& e : enumerate_executions(g.protocol, InputPair{{b}, {false}})) {
            const std::string& v = e.emissions[g.copy_marks.reveal_end];
            char s0 = v[c.src1 - 1], s1 = v[c.src2 - 1], s2 = v[c.aux[0] - 1], s3 = v[c.aux[1] - 1];
            if (s0 != s1 && s1 != s2 && s2 != s3) alternating += e.prob;
        }
        alternating.canonicalize();
        CHECK(alternating == Rat(1, 2));
    }
}

TEST_CASE("copy fragment restores the declared deck on every branch") {
    GadgetProtocol g = make_copy_protocol();
    const FragmentContract& contract = g.fragment.contract;
    CHECK(contract.deck_pre == SuitCount{3, 3});
    CHECK(contract.deck_post == SuitCount{2, 2}); // one pair consumed into the copies
    for (const InputPair& in : all_inputs(1))
        for (const Execution& e : enumerate_executions(g.protocol, in))
            CHECK(deck_suits(g.protocol.layout, e.final_state) == contract.deck_post);
}

TEST_CASE("copy fragment steps are branch-uniform and end with the deck reshuffle") {
    GadgetProtocol g = make_copy_protocol();
    // every execution runs exactly length() actions (oblivious padding)
    for (const Execution& e : enumerate_executions(g.protocol, InputPair{{true}, {false}}))
        CHECK(static_cast<int>(e.emissions.size()) == g.protocol.length() + 1);
    const StepMap& last = g.fragment.steps.back();
    for (const auto& [vis, a] : last) {
        CHECK(a.kind == Action::Kind::Shuffle);
        CHECK(a.group.kind == GroupKind::Explicit);
    }
}

TEST_CASE("swap: payloads exchanged iff the bit is one, for lengths 1 and 2") {
    for (int L : {1, 2}) {
        GadgetProtocol g = make_swap_protocol(L);
        for (bool b : {false, true}) {
            for (const Execution& e : enumerate_executions(g.protocol, InputPair{{b}, {false}})) {
                for (int i = 0; i < L; ++i) {
                    Suit a = cell_suit(e.final_state[g.swap_cells.alpha[i] - 1]);
                    Suit bb = cell_suit(e.final_state[g.swap_cells.beta[i] - 1]);
                    CHECK(a == (b ? Suit::Club : Suit::Heart));
                    CHECK(bb == (b ? Suit::Heart : Suit::Club));
                }
            }
        }
    }
}

TEST_CASE("swap: the card after the leading club reveals heart with probability 1/2") {
    for (int L : {1, 2}) {
        GadgetProtocol g = make_swap_protocol(L);
        const SwapCells& c = g.swap_cells;
        std::vector<int> circle{c.c1, c.g1};
        circle.insert(circle.end(), c.alpha.begin(), c.alpha.end());
        circle.push_back(c.c2);
        circle.push_back(c.g2);
        circle.insert(circle.end(), c.beta.begin(), c.beta.end());
        const int n = static_cast<int>(circle.size());

        for (bool b : {false, true}) {
            Rat heart_after_lower(0);
            for (const Execution& e : enumerate_executions(g.protocol, InputPair{{b}, {true}})) {
                const std::string& v = e.emissions[g.swap_marks.reveal_end];
                std::vector<int> clubs;
                for (int i = 0; i < n; ++i)
                    if (v[circle[i] - 1] == 'C') clubs.push_back(i);
                int a1 = -1;
                for (size_t i = 0; i < clubs.size() && a1 < 0; ++i)
                    for (size_t j = i + 1; j < clubs.size(); ++j)
                        if ((clubs[j] - clubs[i]) % n == n / 2) {
                            a1 = clubs[i];
                            break;
                        }
                REQUIRE(a1 >= 0);
                if (v[circle[(a1 + 1) % n] - 1] == 'H') heart_after_lower += e.prob;
            }
            heart_after_lower.canonicalize();
            CHECK(heart_after_lower == Rat(1, 2));
        }
    }
}

TEST_CASE("not gadget: negation, and its trace is independent of the bit") {
    GadgetProtocol g = make_not_protocol();
    for (bool b : {false, true}) {
        auto execs = enumerate_executions(g.protocol, InputPair{{b}, {false}});
        REQUIRE(execs.size() == 1);
        CHECK(decode_output(g.protocol, execs[0].final_state) == !b);
    }
    TraceDistribution d0 = enumerate_traces_oracle(g.protocol, InputPair{{false}, {false}});
    TraceDistribution d1 = enumerate_traces_oracle(g.protocol, InputPair{{true}, {false}});
    CHECK(d0 == d1);
    CHECK(check_security(g.protocol, table_constant(1, false), SecurityMode::committed()).pass);
}

TEST_CASE("not composed with not is the identity, contracts included") {
    Protocol p;
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 0, 3, Encoding::TwoCard);
    p.deck_multiset = SuitCount{0, 0};
    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(1)) seeds.push_back(initial_state(p, in));
    ScriptBuilder b(p.layout, seeds);
    b.move(Player::Alice, 1, 5);
    b.move(Player::Alice, 2, 6);
    std::vector<State> pre(b.frontier().begin(), b.frontier().end());

    ProtocolFragment n1 = not_fragment(p.layout, Player::Alice, {5, 6}, 7, pre);
    // after the first not the pair sits at (5,7) and cell 6 is free
    ScriptBuilder probe(p.layout, pre);
    probe.run_recorded(n1.steps);
    std::vector<State> mid(probe.frontier().begin(), probe.frontier().end());
    ProtocolFragment n2 = not_fragment(p.layout, Player::Alice, {5, 7}, 6, mid);

    ProtocolFragment both = compose({n1, n2});
    CHECK(both.length() == n1.length() + n2.length());
    CHECK(both.contract.post.at(5) == 'p');
    CHECK(both.contract.post.at(6) == 'q');

    b.run_recorded(both.steps);
    p.program = b.take_program();
    p.output = OutputSpec{{5, 6}, OutputKind::Committed2Card};
    for (bool bit : {false, true}) {
        auto execs = enumerate_executions(p, InputPair{{bit}, {false}});
        REQUIRE(execs.size() == 1);
        CHECK(decode_output(p, execs[0].final_state) == bit); // double negation
    }
}

TEST_CASE("compose(copy, swap): contracts line up and lengths add") {
    // the swap consumes the second copy as its bit and conditionally negates the first
    GadgetProtocol g = make_copy_protocol();
    const CopyCells& cc = g.copy_cells;
    Protocol p = g.protocol;
    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(1)) seeds.push_back(initial_state(p, in));
    ScriptBuilder b(p.layout, seeds);
    b.move(Player::Alice, 1, cc.src1);
    b.move(Player::Alice, 2, cc.src2);
    std::vector<State> pre(b.frontier().begin(), b.frontier().end());
    CopyMarks marks;
    ProtocolFragment copy = copy_fragment(p.layout, Player::Alice, cc, pre, &marks);

    ScriptBuilder probe(p.layout, pre);
    probe.run_recorded(copy.steps);
    SwapCells sc;
    sc.c1 = cc.home[2];
    sc.c2 = cc.home[3];
    sc.g1 = cc.dst2a;
    sc.g2 = cc.dst2b;
    sc.alpha = {cc.dst1a};
    sc.beta = {cc.dst1b};
    sc.park1 = 17;
    sc.park2 = 18;
    sc.park_role0 = 19;
    sc.park_role1 = 20;
    sc.heart_home = cc.aux[4];   // vacated by the copy
    sc.club_home = {cc.home[2], cc.home[3], cc.aux[5]};
    sc.deck_rest = {cc.home[0], cc.home[1], cc.home[2], cc.home[3], cc.aux[4], cc.aux[5]};
    ProtocolFragment swap =
        swap_fragment(p.layout, Player::Alice, sc, {probe.frontier().begin(), probe.frontier().end()});

    ProtocolFragment pipeline = compose({copy, swap});
    CHECK(pipeline.length() == copy.length() + swap.length());
    CHECK(pipeline.name == "copy+swap");

    // a swap needing two clubs right after the copy returned its leftovers is consistent
    CHECK(copy.contract.post.at(sc.c1) == 'c');
    CHECK(copy.contract.post.at(sc.c2) == 'c');

    // run it: dst1 now encodes b XOR b = 0 (swap condition equals the payload bit)
    b.run_recorded(pipeline.steps);
    p.program = b.take_program();
    p.output = OutputSpec{{cc.dst1a, cc.dst1b}, OutputKind::Committed2Card};
    CHECK(validate_protocol(p).ok());
    for (bool bit : {false, true})
        for (const Execution& e : enumerate_executions(p, InputPair{{bit}, {false}}))
            CHECK(decode_output(p, e.final_state) == false); // b conditionally negated by b
}

TEST_CASE("contract mismatch errors name the first violated requirement") {
    GadgetProtocol g = make_copy_protocol();
    GadgetProtocol n = make_not_protocol();
    try {
        compose({g.fragment, n.fragment});
        CHECK(false);
    } catch (const CardError& e) {
        CHECK(e.code == Err::ContractMismatch);
    }
}

TEST_CASE("two conditional swaps on the same condition restore the payloads") {
    // copy produces two pairs of b; each conditions one swap over the same payloads
    Protocol p;
    p.name = "swap_twice";
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 8, 12, Encoding::TwoCard); // deck 5..12, free 13..24
    p.deck_multiset = SuitCount{4, 4};
    const int d = p.layout.deck.lo; // hearts 5,6,7,8  clubs 9,10,11,12
    CopyCells cc{13, 14, 15, 16, 17, 18, {d, d + 4, d + 1, d + 5, d + 2, d + 6}, {d, d + 1, d + 4, d + 5}};
    const int payload_h = d + 3, payload_c = d + 7;
    const int alpha = 19, beta = 20;

    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(1)) seeds.push_back(initial_state(p, in));
    ScriptBuilder b(p.layout, seeds);
    b.move(Player::Alice, payload_h, alpha);
    b.move(Player::Alice, payload_c, beta);
    b.move(Player::Alice, 1, cc.src1);
    b.move(Player::Alice, 2, cc.src2);
    emit_copy(b, Player::Alice, cc);

    SwapCells s1;
    s1.c1 = cc.home[2];
    s1.c2 = cc.home[3];
    s1.g1 = cc.dst2a;
    s1.g2 = cc.dst2b;
    s1.alpha = {alpha};
    s1.beta = {beta};
    s1.park1 = 21;
    s1.park2 = 22;
    s1.park_role0 = 23;
    s1.park_role1 = 24;
    s1.heart_home = cc.aux[4];
    s1.club_home = {cc.home[2], cc.home[3], cc.aux[5]};
    s1.deck_rest = {cc.home[0], cc.home[1], s1.heart_home, cc.home[2], cc.home[3], cc.aux[5]};
    emit_swap(b, Player::Alice, s1);

    SwapCells s2 = s1;
    s2.g1 = cc.dst1a;
    s2.g2 = cc.dst1b;
    s2.heart_home = payload_h;                    // vacated at setup
    s2.club_home = {cc.home[2], cc.home[3], payload_c};
    s2.deck_rest = {cc.home[0], cc.home[1], cc.aux[4], payload_h,
                    cc.home[2], cc.home[3], cc.aux[5], payload_c};
    emit_swap(b, Player::Alice, s2);

    p.program = b.take_program();
    p.output = OutputSpec{{alpha, beta}, OutputKind::Committed2Card};
    CHECK(validate_protocol(p).ok());
    for (bool bit : {false, true}) {
        for (const Execution& e : enumerate_executions(p, InputPair{{bit}, {false}})) {
            CHECK(cell_suit(e.final_state[alpha - 1]) == Suit::Heart); // double swap = identity
            CHECK(cell_suit(e.final_state[beta - 1]) == Suit::Club);
        }
    }
}

TEST_CASE("copy fragment refuses a short deck") {
    Protocol p;
    p.encoding = Encoding::TwoCard;
    p.layout = make_layout(1, 4, 10, Encoding::TwoCard); // only 2 hearts 2 clubs
    p.deck_multiset = SuitCount{2, 2};
    const int d = p.layout.deck.lo;
    CopyCells cc{9, 10, 11, 12, 13, 14, {d, d + 2, d + 1, d + 3, d, d + 1}, {d, d + 1, d + 2, d + 3}};
    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(1)) seeds.push_back(initial_state(p, in));
    ScriptBuilder b(p.layout, seeds);
    b.move(Player::Alice, 1, 9);
    b.move(Player::Alice, 2, 10);
    try {
        emit_copy(b, Player::Alice, cc);
        CHECK(false);
    } catch (const CardError& e) {
        CHECK(e.code == Err::DeckShortage);
    }
}

TEST_CASE("swap fragment rejects payloads of different lengths") {
    GadgetProtocol g = make_swap_protocol(1);
    SwapCells c = g.swap_cells;
    c.beta.push_back(c.beta[0] + 1);
    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(1)) seeds.push_back(initial_state(g.protocol, in));
    ScriptBuilder b(g.protocol.layout, seeds);
    try {
        emit_swap(b, Player::Alice, c);
        CHECK(false);
    } catch (const CardError& e) {
        CHECK(e.code == Err::LengthMismatch);
    }
}

TEST_CASE("extend gadgets restore the committed input exactly, on every branch") {
    GadgetProtocol one = make_extend1_protocol();
    for (const InputPair& in : all_inputs(1)) {
        State initial = initial_state(one.protocol, in);
        for (const Execution& e : enumerate_executions(one.protocol, in)) {
            CHECK(e.final_state[0] == initial[0]);
            CHECK(e.final_state[1] == initial[1]);
            CHECK(decode_output(one.protocol, e.final_state) == in.x[0]);
        }
    }
    GadgetProtocol half = make_extend_half_protocol();
    for (bool bit : {false, true}) {
        InputPair in{{bit, false}, {false, false}};
        for (const auto& ca : all_omissions(2)) {
            ChainOptions opt;
            opt.alice_choice = ca;
            opt.bob_choice = all_omissions(2).front();
            State initial = initial_state(half.protocol, in, opt.alice_choice, opt.bob_choice);
            for (const Execution& e : enumerate_executions(half.protocol, in, opt)) {
                for (int pos = 1; pos <= 8; ++pos) CHECK(e.final_state[pos - 1] == initial[pos - 1]);
                CHECK(decode_output(half.protocol, e.final_state) == bit);
            }
        }
    }
}

TEST_CASE("fragments serialize with a fragment header") {
    GadgetProtocol g = make_copy_protocol();
    std::string text = serialize_fragment(g.fragment, Encoding::TwoCard);
    CHECK(text.rfind("fragment copy", 0) == 0);
    ProtocolFragment back = parse_fragment(text);
    CHECK(back.length() == g.fragment.length());
    CHECK(back.steps == g.fragment.steps);
}
