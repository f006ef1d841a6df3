#include "cardforge/extraction.hpp"

#include <algorithm>

namespace cardforge {

namespace {

// Abstract execution state: work-space cells are concrete, input cells are
// '.'/'?'/'H'/'C' ('?' = committed card, suit resolved only when queried).
using Vertex = std::string;

Visible vertex_visible(const Vertex& key, const TableLayout& lay) {
    Visible v = key;
    for (int pos = lay.deck.lo; pos <= lay.m; ++pos) {
        char c = key[pos - 1];
        v[pos - 1] = cell_occupied(c) ? (cell_face_down(c) ? '?' : c) : kEmpty;
    }
    return v;
}

struct Query {
    Player owner;
    int var;
    bool operator==(const Query&) const = default;
};

// suit of an input cell's card for a given bit value, via the 2-card layout
char input_suit(const TableLayout& lay, int pos, bool bit) {
    auto [var, first] = lay.bit_of_input(pos, Encoding::TwoCard);
    (void)var;
    bool heart = first ? bit : !bit;
    return heart ? 'h' : 'c';
}

} // namespace

BranchingProgram protocol_to_bp(const Protocol& p, const TruthTable& f, ShuffleChoice choice) {
    const TableLayout& lay = p.layout;
    if (p.encoding != Encoding::TwoCard)
        fail(Err::ValidationError, "extraction supports protocols over the 2-card encoding");
    if (p.output.kind != OutputKind::Open)
        fail(Err::NotOpenOutput, "extraction needs an open boolean output");
    if (lay.n < 1) fail(Err::ValidationError, "protocols over empty inputs are rejected");
    if (!check_read_only(p).pass) fail(Err::NotReadOnly, "protocol writes to its input positions");
    if (!check_correctness(p, f).pass)
        fail(Err::ValidationError, "protocol does not compute the given truth table");

    // initial vertex: all input cards committed face-down, concrete work space
    Vertex init = initial_state(p, all_inputs(lay.n).front());
    for (int pos = 1; pos <= lay.bob_input.hi; ++pos) init[pos - 1] = '?';

    // Queries resolve each input card independently, so the walk also creates
    // states no consistent assignment reaches (both cards of a pair alike).
    // Those have no protocol action; they fall through to a dead sink that
    // feeds the reject vertex.
    const Vertex dead = "<dead>";

    std::vector<std::vector<Vertex>> levels{{init}};
    std::vector<BpLayer> layers;

    for (int t = 0; t < p.length(); ++t) {
        const std::vector<Vertex>& cur = levels[t];
        std::vector<Vertex> next;
        std::map<Vertex, int> index;
        auto vertex_id = [&](Vertex v) {
            auto it = index.find(v);
            if (it != index.end()) return it->second;
            int id = static_cast<int>(next.size());
            index.emplace(v, id);
            next.push_back(std::move(v));
            return id;
        };

        BpLayer layer;
        layer.e0.resize(cur.size());
        layer.e1.resize(cur.size());
        std::optional<Query> label;

        for (size_t vi = 0; vi < cur.size(); ++vi) {
            const Vertex& key = cur[vi];
            if (key == dead) {
                layer.e0[vi] = layer.e1[vi] = vertex_id(dead);
                continue;
            }
            Visible vis = vertex_visible(key, lay);
            auto it = p.program[t].find(vis);
            if (it == p.program[t].end()) {
                layer.e0[vi] = layer.e1[vi] = vertex_id(dead);
                continue;
            }
            const Action& a = it->second;

            std::optional<Query> q;
            Vertex v0 = key, v1 = key;
            try {
                switch (a.kind) {
                case Action::Kind::Move: {
                    bool from_hidden_input = lay.is_input(a.from) && key[a.from - 1] == '?';
                    if (from_hidden_input) {
                        auto [var, first] = lay.bit_of_input(a.from, Encoding::TwoCard);
                        (void)first;
                        q = Query{lay.owner_of_input(a.from), var};
                        v0[a.from - 1] = kEmpty;
                        v0[a.to - 1] = input_suit(lay, a.from, false);
                        v1[a.from - 1] = kEmpty;
                        v1[a.to - 1] = input_suit(lay, a.from, true);
                    } else {
                        char moved = key[a.from - 1];
                        if (!cell_occupied(moved) && !(moved == '?'))
                            fail(Err::IllegalAction, "move from empty cell in extraction");
                        char landing = moved;
                        if (lay.is_input(a.to) && (moved == '?' || cell_face_down(moved)))
                            landing = '?'; // face-down card returned to an input position
                        v0[a.from - 1] = kEmpty;
                        v0[a.to - 1] = landing;
                        v1 = v0;
                    }
                    break;
                }
                case Action::Kind::Turn: {
                    char cell = key[a.from - 1];
                    if (lay.is_input(a.from) && cell == '?') {
                        auto [var, first] = lay.bit_of_input(a.from, Encoding::TwoCard);
                        (void)first;
                        q = Query{lay.owner_of_input(a.from), var};
                        v0[a.from - 1] = std::toupper(input_suit(lay, a.from, false));
                        v1[a.from - 1] = std::toupper(input_suit(lay, a.from, true));
                    } else if (lay.is_input(a.from) && cell_face_up(cell)) {
                        v0[a.from - 1] = '?'; // turned back down, suit forgotten
                        v1 = v0;
                    } else {
                        v0[a.from - 1] = flip_cell(cell);
                        v1 = v0;
                    }
                    break;
                }
                case Action::Kind::Shuffle: {
                    auto perms = a.group.elements(static_cast<int>(a.positions.size()));
                    std::sort(perms.begin(), perms.end());
                    const Perm& pi = choice == ShuffleChoice::LexMin ? perms.front() : perms.back();
                    for (size_t i = 0; i < a.positions.size(); ++i)
                        v0[a.positions[pi[i]] - 1] = key[a.positions[i] - 1];
                    v1 = v0;
                    break;
                }
                case Action::Kind::Extend:
                    fail(Err::IllegalAction, "extend action in a 2-card protocol");
                }
            } catch (const CardError&) {
                // the action is illegal in this assignment-inconsistent state
                layer.e0[vi] = layer.e1[vi] = vertex_id(dead);
                continue;
            }

            if (q) {
                if (label && !(*label == *q))
                    fail(Err::ValidationError, "two different variables queried in one step");
                label = q;
            }
            layer.e0[vi] = vertex_id(std::move(v0));
            layer.e1[vi] = vertex_id(std::move(v1));
            if (next.size() > 200000) fail(Err::TooLarge, "internal state count exploded");
        }

        layer.owner = label ? label->owner : Player::Alice;
        layer.var = label ? label->var : 1;
        layers.push_back(std::move(layer));
        levels.push_back(std::move(next));
    }

    // classify the final states by their open output
    const std::vector<Vertex>& fin = levels.back();
    std::vector<bool> accepting(fin.size());
    for (size_t vi = 0; vi < fin.size(); ++vi) {
        const Vertex& key = fin[vi];
        if (key == "<dead>") {
            accepting[vi] = false;
            continue;
        }
        if (p.output.positions.size() == 1) {
            char c = key[p.output.positions[0] - 1];
            if (c != 'H' && c != 'C') fail(Err::DecodeFailure, "open output cell not revealed");
            accepting[vi] = c == 'H';
        } else {
            char a = key[p.output.positions[0] - 1], b = key[p.output.positions[1] - 1];
            if ((a != 'H' && a != 'C') || (b != 'H' && b != 'C'))
                fail(Err::DecodeFailure, "open output cells not revealed");
            accepting[vi] =
                decode_2card(static_cast<char>(std::tolower(a)), static_cast<char>(std::tolower(b)));
        }
    }

    BranchingProgram bp;
    bp.layers = std::move(layers);
    bp.layer_sizes.clear();
    for (const auto& lvl : levels) bp.layer_sizes.push_back(static_cast<int>(lvl.size()));

    long acc_count = std::count(accepting.begin(), accepting.end(), true);
    if (acc_count == 1 && fin.size() == 2) {
        // already restricted: exactly one accepting and one rejecting vertex
        bp.accept = static_cast<int>(std::find(accepting.begin(), accepting.end(), true) -
                                     accepting.begin());
        bp.reject = 1 - bp.accept;
    } else {
        // collapse layer with a dummy query leaves exactly one of each
        BpLayer layer;
        layer.owner = Player::Alice;
        layer.var = 1;
        layer.e0.resize(fin.size());
        layer.e1.resize(fin.size());
        for (size_t vi = 0; vi < fin.size(); ++vi)
            layer.e0[vi] = layer.e1[vi] = accepting[vi] ? 0 : 1;
        bp.layers.push_back(std::move(layer));
        bp.layer_sizes.push_back(2);
        bp.accept = 0;
        bp.reject = 1;
    }
    bp.width = *std::max_element(bp.layer_sizes.begin(), bp.layer_sizes.end());
    bp.start = 0;
    bp.permutation = false;
    validate_bp(bp);
    return bp;
}

} // namespace cardforge
