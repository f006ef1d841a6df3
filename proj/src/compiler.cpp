#include "cardforge/compiler.hpp"

#include <sstream>

namespace cardforge {

SuitCount deck_budget(const BranchingProgram& bp, Encoding enc) {
    (void)bp; // constant by design: the schedule reuses the same gadget cells
    switch (enc) {
        case Encoding::TwoCard: return SuitCount{4, 7};   // program 1+4, copy 3+3
        case Encoding::OneCard: return SuitCount{5, 8};   // plus the designated pair
        case Encoding::HalfCard: return SuitCount{5, 9};  // plus the side-marker club
    }
    return SuitCount{};
}

std::string CompilationPlan::str() const {
    std::ostringstream os;
    os << "# plan encoding=" << encoding_name(encoding) << " deck=H:" << deck_budget.hearts
       << ",C:" << deck_budget.clubs << "\n";
    os << "# program-cells";
    for (int c : program_cells) os << " " << c;
    os << "\n# output accept-cell=" << accept_cell << " reject-cell=" << reject_cell << "\n";
    os << "# setup steps 0.." << setup_steps - 1 << "\n";
    for (const GadgetRecord& g : gadgets)
        os << "# gadget var=" << player_char(g.owner) << g.var << " swap=(" << g.tau.a + 1 << ","
           << g.tau.b + 1 << ") steps " << g.first_step << ".." << g.past_step - 1 << "\n";
    return os.str();
}

namespace {

struct Cells {
    std::array<int, 5> P{};
    int f1, f2, g1, g2, g3, g4, mark;
    std::array<int, 3> hh{}; // resting heart cells
    std::array<int, 3> ch{}; // resting club cells
    int marker_home;
    std::vector<int> designated;
    CopyCells copy;
    SwapCells swap;
};

Cells plan_cells(const TableLayout& lay, Encoding enc, int start_vertex) {
    Cells c{};
    const int D = lay.deck.lo;
    const int W = lay.work_free.lo;
    for (int i = 0; i < 5; ++i) c.P[i] = W + i;
    c.f1 = W + 5;
    c.f2 = W + 6;
    c.g1 = W + 7;
    c.g2 = W + 8;
    c.g3 = W + 9;
    c.g4 = W + 10;
    c.mark = W + 11;
    c.hh = {D, D + 1, D + 2};
    c.ch = {D + 4, D + 5, D + 6};
    c.marker_home = D + 7; // half-card only
    if (enc != Encoding::TwoCard) c.designated = {lay.deck.hi - 1, lay.deck.hi};

    c.copy = CopyCells{c.f1, c.f2, c.g3, c.g4, c.g1, c.g2,
                       {c.hh[0], c.ch[0], c.hh[1], c.ch[1], c.hh[2], c.ch[2]},
                       {c.hh[0], c.hh[1], c.ch[0], c.ch[1]}};
    c.swap = SwapCells{};
    c.swap.c1 = c.ch[0];
    c.swap.c2 = c.ch[1];
    c.swap.g1 = c.g1;
    c.swap.g2 = c.g2;
    c.swap.park1 = c.g3;
    c.swap.park2 = c.g4;
    c.swap.park_role0 = c.f1;
    c.swap.park_role1 = c.f2;
    c.swap.heart_home = c.hh[2];
    c.swap.club_home = {c.ch[0], c.ch[1], c.ch[2]};
    c.swap.deck_rest = {c.hh[0], c.hh[1], c.hh[2], c.ch[0], c.ch[1], c.ch[2]};
    (void)start_vertex;
    return c;
}

} // namespace

CompiledProtocol compile_bp_to_protocol(const BranchingProgram& bp, Encoding enc) {
    validate_bp(bp);
    if (bp.width != 5) fail(Err::WidthNot5, "compilation needs width exactly 5");
    if (!bp.permutation) fail(Err::NotRestricted, "compilation needs a restricted permutation program");
    for (size_t i = 0; i < bp.layers.size(); ++i)
        if (!perm_is_identity(bp.layers[i].e0))
            fail(Err::NotNormalized, "zero-edge permutation of layer " + std::to_string(i + 1) +
                                         " is not the identity; normalize first");

    CompiledProtocol out;
    Protocol& p = out.protocol;
    CompilationPlan& plan = out.plan;
    plan.encoding = enc;
    plan.deck_budget = deck_budget(bp, enc);

    int n = std::max({1, bp.max_var(Player::Alice), bp.max_var(Player::Bob)});
    if (enc == Encoding::HalfCard && n % 2 != 0) n++; // the encoding needs an even bit count
    const int s = plan.deck_budget.hearts + plan.deck_budget.clubs;
    p.name = "compiled";
    p.encoding = enc;
    p.layout = make_layout(n, s, s, enc); // deck s, work space 2s
    p.deck_multiset = plan.deck_budget;

    Cells c = plan_cells(p.layout, enc, bp.start);
    plan.program_cells = c.P;
    plan.accept_cell = c.P[bp.accept];
    plan.reject_cell = c.P[bp.reject];

    std::vector<State> seeds;
    for (const InputPair& in : all_inputs(n))
        for (const Weighted& w : initial_states(p, in)) seeds.push_back(w.state);
    ScriptBuilder b(p.layout, std::move(seeds));

    // --- setup: program cards H,C,C,C,C placed face-up from the deck, then hidden
    const int D = p.layout.deck.lo;
    const int heart_src = D + 3; // fourth heart; the first three stay for the copy deck
    int club_src = enc == Encoding::HalfCard ? D + 8 : D + 7;
    b.move(Player::Alice, heart_src, c.P[bp.start]);
    for (int v = 0, src = club_src; v < 5; ++v) {
        if (v == bp.start) continue;
        b.move(Player::Alice, src++, c.P[v]);
    }
    for (int v = 0; v < 5; ++v) b.turn(Player::Alice, c.P[v]);
    for (int v = 0; v < 5; ++v) b.turn(Player::Alice, c.P[v]);
    plan.setup_steps = b.step();

    // --- one copy+swap gadget per transposition of each layer
    for (const BpLayer& layer : bp.layers) {
        const Player owner = layer.owner;
        for (const Transposition& tau : decompose_transpositions(layer.e1)) {
            GadgetRecord rec{owner, layer.var, tau, b.step(), 0};
            const Range in_range = p.layout.input_of(owner);

            switch (enc) {
                case Encoding::TwoCard: {
                    int in1 = in_range.lo + 2 * (layer.var - 1);
                    b.move(owner, in1, c.f1);
                    b.move(owner, in1 + 1, c.f2);
                    break;
                }
                case Encoding::OneCard: {
                    int in = in_range.lo + layer.var - 1;
                    b.constant(make_extend(owner, in, c.f2, c.designated));
                    b.move(owner, in, c.f1);
                    break;
                }
                case Encoding::HalfCard: {
                    int b1 = in_range.lo + 2 * (layer.var - 1), b2 = b1 + 1;
                    b.emit([&](const Visible& v) { // mark the right-occupied branch
                        if (v[b2 - 1] == '?') return make_move(owner, c.marker_home, c.mark);
                        return noop_for(v, p.layout, owner);
                    });
                    b.emit([&](const Visible& v) { // fill the empty slot
                        if (v[b1 - 1] == '?') return make_extend(owner, b1, b2, c.designated);
                        return make_extend(owner, b2, b1, c.designated);
                    });
                    b.move(owner, b1, c.f1);
                    b.move(owner, b2, c.f2);
                    break;
                }
            }

            emit_copy(b, owner, c.copy);

            switch (enc) {
                case Encoding::TwoCard: {
                    int in1 = in_range.lo + 2 * (layer.var - 1);
                    b.move(owner, c.g3, in1);
                    b.move(owner, c.g4, in1 + 1);
                    break;
                }
                case Encoding::OneCard: {
                    int in = in_range.lo + layer.var - 1;
                    b.move(owner, c.g3, in);
                    b.emit([&](const Visible& v) {
                        int vac = v[c.designated[0] - 1] == kEmpty ? c.designated[0] : c.designated[1];
                        return make_move(owner, c.g4, vac);
                    });
                    b.shuffle(owner, c.designated, symmetric_group());
                    break;
                }
                case Encoding::HalfCard: {
                    int b1 = in_range.lo + 2 * (layer.var - 1), b2 = b1 + 1;
                    b.emit([&](const Visible& v) { // restore the originally occupied slot
                        if (v[c.mark - 1] == '?') return make_move(owner, c.g4, b2);
                        return make_move(owner, c.g3, b1);
                    });
                    b.emit([&](const Visible& v) { // filling card back to the designated deck
                        int vac = v[c.designated[0] - 1] == kEmpty ? c.designated[0] : c.designated[1];
                        int src = v[c.mark - 1] == '?' ? c.g3 : c.g4;
                        return make_move(owner, src, vac);
                    });
                    b.shuffle(owner, c.designated, symmetric_group());
                    b.emit([&](const Visible& v) { // unmark
                        if (v[c.mark - 1] == '?') return make_move(owner, c.mark, c.marker_home);
                        return noop_for(v, p.layout, owner);
                    });
                    break;
                }
            }

            SwapCells sw = c.swap;
            sw.alpha = {c.P[tau.a]};
            sw.beta = {c.P[tau.b]};
            emit_swap(b, owner, sw);

            rec.past_step = b.step();
            plan.gadgets.push_back(rec);
        }
    }

    p.program = b.take_program();
    p.output = OutputSpec{{plan.accept_cell, plan.reject_cell}, OutputKind::Committed2Card};
    return out;
}

} // namespace cardforge
