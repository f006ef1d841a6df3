#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardforge/branching.hpp"

#include <random>

using namespace cardforge;

namespace {

BranchingProgram one_transposition_bp() {
    BranchingProgram bp;
    bp.width = 5;
    bp.layer_sizes = {5, 5};
    BpLayer l;
    l.owner = Player::Alice;
    l.var = 1;
    l.e0 = perm_identity(5);
    l.e1 = perm_identity(5);
    std::swap(l.e1[0], l.e1[1]);
    bp.layers = {l};
    bp.start = 0;
    bp.accept = 1;
    bp.reject = 0;
    return bp;
}

std::vector<std::pair<std::vector<bool>, std::vector<bool>>> assignments(int na, int nb) {
    std::vector<std::pair<std::vector<bool>, std::vector<bool>>> out;
    for (int xv = 0; xv < (1 << na); ++xv)
        for (int yv = 0; yv < (1 << nb); ++yv) {
            std::vector<bool> x, y;
            for (int i = 0; i < na; ++i) x.push_back((xv >> i) & 1);
            for (int i = 0; i < nb; ++i) y.push_back((yv >> i) & 1);
            out.push_back({x, y});
        }
    return out;
}

} // namespace

TEST_CASE("eval: a single conditional transposition computes the variable") {
    BranchingProgram bp = one_transposition_bp();
    validate_bp(bp);
    CHECK(eval_bp(bp, {true}, {}) == true);
    CHECK(eval_bp(bp, {false}, {}) == false);
}

TEST_CASE("eval: the all-identity program rejects everything") {
    BranchingProgram bp = one_transposition_bp();
    bp.layers[0].e1 = perm_identity(5);
    CHECK_FALSE(eval_bp(bp, {true}, {}));
    CHECK_FALSE(eval_bp(bp, {false}, {}));
}

TEST_CASE("eval flags a computation ending outside accept/reject") {
    BranchingProgram bp = one_transposition_bp();
    bp.layers[0].e1 = perm_from_cycle(5, {0, 2, 4}); // 1 -> somewhere else
    try {
        eval_bp(bp, {true}, {});
        CHECK(false);
    } catch (const CardError& e) {
        CHECK(e.code == Err::NotRestrictedTerminal);
    }
    CHECK_FALSE(eval_bp(bp, {true}, {}, false)); // unrestricted mode just answers
}

TEST_CASE("decompose: frozen examples under the left-to-right convention") {
    CHECK(decompose_transpositions(perm_identity(5)).empty());
    auto ts = decompose_transpositions(perm_from_cycle(5, {0, 1, 2, 3, 4}));
    REQUIRE(ts.size() == 4);
    CHECK(ts[0] == Transposition{0, 1});
    CHECK(ts[1] == Transposition{1, 2});
    CHECK(ts[2] == Transposition{2, 3});
    CHECK(ts[3] == Transposition{3, 4});

    Perm two_swaps = recompose(5, {Transposition{0, 1}, Transposition{2, 3}});
    auto ts2 = decompose_transpositions(two_swaps);
    REQUIRE(ts2.size() == 2);
    CHECK(ts2[0] == Transposition{0, 1});
    CHECK(ts2[1] == Transposition{2, 3});
}

TEST_CASE("recompose(decompose(p)) == p exhaustively and at random") {
    Perm p = perm_identity(5);
    std::sort(p.begin(), p.end());
    do {
        CHECK(recompose(5, decompose_transpositions(p)) == p);
    } while (std::next_permutation(p.begin(), p.end()));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10000; ++trial) {
        Perm q = perm_identity(5);
        std::shuffle(q.begin(), q.end(), rng);
        CHECK(recompose(5, decompose_transpositions(q)) == q);
    }
}

TEST_CASE("normalization: fixpoint on normalized programs, equivalence otherwise") {
    BranchingProgram bp = one_transposition_bp();
    BranchingProgram same = normalize_zero_identity(bp);
    CHECK(same.layers[0].e0 == bp.layers[0].e0);
    CHECK(same.layers[0].e1 == bp.layers[0].e1);
    CHECK(same.accept == bp.accept);

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        BranchingProgram rnd;
        rnd.width = 5;
        int depth = 2 + static_cast<int>(rng() % 5);
        rnd.layer_sizes.assign(depth, 5);
        for (int j = 0; j + 1 < depth; ++j) {
            BpLayer l;
            l.owner = rng() % 2 ? Player::Alice : Player::Bob;
            l.var = 1 + static_cast<int>(rng() % 4); // up to four variables
            l.e0 = perm_identity(5);
            l.e1 = perm_identity(5);
            std::shuffle(l.e0.begin(), l.e0.end(), rng);
            std::shuffle(l.e1.begin(), l.e1.end(), rng);
            rnd.layers.push_back(std::move(l));
        }
        rnd.start = static_cast<int>(rng() % 5);
        rnd.accept = static_cast<int>(rng() % 5);
        rnd.reject = (rnd.accept + 1 + static_cast<int>(rng() % 4)) % 5;
        validate_bp(rnd);

        BranchingProgram norm = normalize_zero_identity(rnd);
        validate_bp(norm);
        CHECK(norm.width == rnd.width);
        CHECK(norm.depth() == rnd.depth());
        CHECK(norm.start == rnd.start);
        for (const BpLayer& l : norm.layers) CHECK(perm_is_identity(l.e0));
        for (auto& [x, y] : assignments(4, 4))
            CHECK(eval_bp(norm, x, y, false) == eval_bp(rnd, x, y, false));
    }
}

TEST_CASE("barrington: var compiles to a single conditional layer") {
    BranchingProgram bp = barrington_compile(f_var(Player::Alice, 1));
    CHECK(bp.depth() == 2);
    CHECK(bp.width == 5);
    CHECK(eval_bp(bp, {true}, {false}));
    CHECK_FALSE(eval_bp(bp, {false}, {true}));
}

TEST_CASE("barrington: truth tables for the standard connectives") {
    struct Case {
        Formula f;
        std::function<bool(bool, bool)> want;
    };
    Formula a1 = f_var(Player::Alice, 1), b1 = f_var(Player::Bob, 1);
    std::vector<Case> cases;
    cases.push_back({f_and(a1, b1), [](bool x, bool y) { return x && y; }});
    cases.push_back({f_or(a1, b1), [](bool x, bool y) { return x || y; }});
    cases.push_back({f_not(a1), [](bool x, bool) { return !x; }});
    cases.push_back({f_or(f_and(a1, f_not(b1)), f_and(f_not(a1), b1)),
                     [](bool x, bool y) { return x != y; }});
    for (const Case& c : cases) {
        BranchingProgram bp = barrington_compile(c.f);
        CHECK(bp.width == 5);
        for (const BpLayer& l : bp.layers) CHECK(perm_is_identity(l.e0));
        for (bool x : {false, true})
            for (bool y : {false, true})
                CHECK(eval_bp(bp, {x}, {y}) == c.want(x, y));
    }
}

TEST_CASE("barrington: majority of three mixed variables") {
    Formula a1 = f_var(Player::Alice, 1), a2 = f_var(Player::Alice, 2), b1 = f_var(Player::Bob, 1);
    Formula maj = f_or(f_and(a1, a2), f_or(f_and(a1, b1), f_and(a2, b1)));
    BranchingProgram bp = barrington_compile(maj);
    CHECK(bp.width == 5);
    for (auto& [x, y] : assignments(2, 1)) {
        int ones = x[0] + x[1] + y[0];
        CHECK(eval_bp(bp, x, y) == (ones >= 2));
    }
}

TEST_CASE("de morgan rewrite preserves the function") {
    std::mt19937_64 rng(5);
    std::function<Formula(int)> random_formula = [&](int depth) -> Formula {
        if (depth == 0 || rng() % 3 == 0)
            return f_var(rng() % 2 ? Player::Alice : Player::Bob, 1 + static_cast<int>(rng() % 3));
        switch (rng() % 3) {
            case 0: return f_and(random_formula(depth - 1), random_formula(depth - 1));
            case 1: return f_or(random_formula(depth - 1), random_formula(depth - 1));
            default: return f_not(random_formula(depth - 1));
        }
    };
    for (int trial = 0; trial < 50; ++trial) {
        Formula f = random_formula(3);
        Formula g = rewrite_or_de_morgan(f);
        std::function<bool(const Formula&)> has_or = [&](const Formula& h) {
            if (h.op == Formula::Op::Or) return true;
            for (const Formula& k : h.kids)
                if (has_or(k)) return true;
            return false;
        };
        CHECK_FALSE(has_or(g));
        for (auto& [x, y] : assignments(3, 3))
            CHECK(eval_formula(f, x, y) == eval_formula(g, x, y));
    }
}

TEST_CASE("random formulas over four variables compile exhaustively correctly") {
    std::mt19937_64 rng(31);
    std::function<Formula(int)> random_formula = [&](int depth) -> Formula {
        if (depth == 0 || rng() % 3 == 0) {
            Player who = rng() % 2 ? Player::Alice : Player::Bob;
            return f_var(who, 1 + static_cast<int>(rng() % 2)); // a1,a2,b1,b2
        }
        switch (rng() % 3) {
            case 0: return f_and(random_formula(depth - 1), random_formula(depth - 1));
            case 1: return f_or(random_formula(depth - 1), random_formula(depth - 1));
            default: return f_not(random_formula(depth - 1));
        }
    };
    for (int trial = 0; trial < 20; ++trial) {
        Formula f = random_formula(3);
        BranchingProgram bp = barrington_compile(f);
        CHECK(bp.width == 5);
        for (const BpLayer& l : bp.layers) CHECK(perm_is_identity(l.e0));
        for (auto& [x, y] : assignments(2, 2))
            CHECK(eval_bp(bp, x, y) == eval_formula(f, x, y));
    }
}

TEST_CASE("bp validation rejects malformed programs") {
    BranchingProgram bp = one_transposition_bp();
    bp.layers[0].e1[0] = 0; // not a bijection
    CHECK_THROWS_AS(validate_bp(bp), CardError);

    bp = one_transposition_bp();
    bp.accept = bp.reject;
    CHECK_THROWS_AS(validate_bp(bp), CardError);

    bp = one_transposition_bp();
    bp.start = 7;
    CHECK_THROWS_AS(validate_bp(bp), CardError);
}
