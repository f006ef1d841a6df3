#include "cardforge/executor.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cardforge {

std::vector<Rat> StepChain::level_mass(int level) const {
    std::vector<Rat> mass = init_weights;
    for (int t = 0; t < level; ++t) {
        std::vector<Rat> next(levels[t + 1].size(), Rat(0));
        for (const ChainEdge& e : edges[t]) next[e.to] += mass[e.from] * e.weight;
        for (Rat& q : next) q.canonicalize();
        mass = std::move(next);
    }
    return mass;
}

static const Action& action_for(const Protocol& p, int t, const Visible& v) {
    auto it = p.program[t].find(v);
    if (it == p.program[t].end())
        fail(Err::MissingAction, "step " + std::to_string(t) + " has no action for visible " + v);
    return it->second;
}

static StepChain build_chain_impl(const Protocol& p, const InputPair& in, const ChainOptions& opt,
                                  bool parallel) {
    StepChain chain;
    chain.steps = p.length();
    chain.levels.resize(chain.steps + 1);
    chain.edges.resize(chain.steps);

    for (const Weighted& w : initial_states(p, in, opt.alice_choice, opt.bob_choice)) {
        chain.levels[0].push_back(ChainNode{w.state, visible_of(w.state)});
        chain.init_weights.push_back(w.prob);
    }

    for (int t = 0; t < chain.steps; ++t) {
        const auto& nodes = chain.levels[t];
        const int cnt = static_cast<int>(nodes.size());
        std::vector<std::vector<Outcome>> outs(cnt);

        auto expand = [&](int i) {
            const Action& a = action_for(p, t, nodes[i].emission);
            outs[i] = opt.merge ? apply_action(nodes[i].state, a, p.layout, opt.player_view)
                                : apply_action_raw(nodes[i].state, a, p.layout, opt.player_view);
        };
        if (parallel && cnt >= 32) { // below this the fork/join overhead dominates
            std::exception_ptr first_error; // exceptions must not escape the omp region
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (int i = 0; i < cnt; ++i) {
                try {
                    expand(i);
                } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                    if (!first_error) first_error = std::current_exception();
                }
            }
            if (first_error) std::rethrow_exception(first_error);
        } else {
            for (int i = 0; i < cnt; ++i) expand(i);
        }

        // merge in node order so numbering is schedule-independent
        std::map<std::pair<State, std::string>, int> index;
        for (int i = 0; i < cnt; ++i) {
            for (Outcome& o : outs[i]) {
                int target;
                if (opt.merge) {
                    auto key = std::make_pair(o.state, o.note);
                    auto it = index.find(key);
                    if (it == index.end()) {
                        target = static_cast<int>(chain.levels[t + 1].size());
                        index.emplace(std::move(key), target);
                        chain.levels[t + 1].push_back(ChainNode{o.state, visible_of(o.state)});
                    } else {
                        target = it->second;
                    }
                } else {
                    target = static_cast<int>(chain.levels[t + 1].size());
                    chain.levels[t + 1].push_back(ChainNode{o.state, visible_of(o.state)});
                }
                chain.edges[t].push_back(ChainEdge{i, target, o.prob, o.note});
            }
        }
    }
    return chain;
}

StepChain build_step_chain(const Protocol& p, const InputPair& in, const ChainOptions& opt) {
    return build_chain_impl(p, in, opt, opt.parallel);
}

StepChain build_step_chain_serial(const Protocol& p, const InputPair& in, const ChainOptions& opt) {
    return build_chain_impl(p, in, opt, false);
}

std::string trace_key(const std::vector<std::string>& emissions) {
    std::string k;
    for (size_t i = 0; i < emissions.size(); ++i) {
        if (i) k += '/';
        k += emissions[i];
    }
    return k;
}

static std::string annotated(const Visible& emission, const std::string& note) {
    return note.empty() ? emission : emission + "[" + note + "]";
}

long oracle_cap_from_env(std::optional<long> explicit_cap) {
    if (explicit_cap) return *explicit_cap;
    if (const char* env = std::getenv("CARDFORGE_ORACLE_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 1000000;
}

mpz_class estimate_raw_paths(const Protocol& p, const InputPair& in, const ChainOptions& opt) {
    std::map<State, mpz_class> counts;
    for (const Weighted& w : initial_states(p, in, opt.alice_choice, opt.bob_choice))
        counts[w.state] += 1;
    for (int t = 0; t < p.length(); ++t) {
        std::map<State, mpz_class> next;
        for (const auto& [s, c] : counts) {
            const Action& a = action_for(p, t, visible_of(s));
            for (const Outcome& o : apply_action_raw(s, a, p.layout))
                next[o.state] += c;
        }
        counts = std::move(next);
    }
    mpz_class total = 0;
    for (const auto& [s, c] : counts) total += c;
    return total;
}

std::vector<Execution> enumerate_executions(const Protocol& p, const InputPair& in,
                                            const ChainOptions& opt, std::optional<long> cap) {
    long limit = oracle_cap_from_env(cap);
    mpz_class est = estimate_raw_paths(p, in, opt);
    if (est > limit)
        fail(Err::TooLarge, "estimated " + est.get_str() + " raw branches exceeds cap " + std::to_string(limit));

    std::vector<Execution> out;
    struct Frame {
        State state;
        Rat prob;
    };
    std::vector<std::string> emissions;
    std::vector<int> choices;

    std::function<void(const State&, const Rat&, const std::string&, int)> dfs =
        [&](const State& s, const Rat& prob, const std::string& note, int t) {
            emissions.push_back(annotated(visible_of(s), note));
            if (t == p.length()) {
                out.push_back(Execution{emissions, choices, s, prob});
            } else {
                const Action& a = action_for(p, t, visible_of(s));
                auto branches = apply_action_raw(s, a, p.layout, opt.player_view);
                for (size_t i = 0; i < branches.size(); ++i) {
                    choices.push_back(static_cast<int>(i));
                    Rat q = prob * branches[i].prob;
                    q.canonicalize();
                    dfs(branches[i].state, q, branches[i].note, t + 1);
                    choices.pop_back();
                }
            }
            emissions.pop_back();
        };

    for (const Weighted& w : initial_states(p, in, opt.alice_choice, opt.bob_choice))
        dfs(w.state, w.prob, "", 0);
    return out;
}

TraceDistribution enumerate_traces_oracle(const Protocol& p, const InputPair& in,
                                          const ChainOptions& opt, std::optional<long> cap) {
    TraceDistribution dist;
    for (const Execution& e : enumerate_executions(p, in, opt, cap)) dist[trace_key(e.emissions)] += e.prob;
    for (auto& [k, q] : dist) q.canonicalize();
    return dist;
}

TraceDistribution chain_trace_distribution(const StepChain& chain) {
    // DFS over chain paths; exact, intended for gadget-scale chains.
    TraceDistribution dist;
    std::vector<std::vector<std::vector<std::pair<int, const ChainEdge*>>>> outgoing(chain.steps);
    for (int t = 0; t < chain.steps; ++t) {
        outgoing[t].resize(chain.levels[t].size());
        for (const ChainEdge& e : chain.edges[t]) outgoing[t][e.from].push_back({e.to, &e});
    }
    std::vector<std::string> emissions;
    std::function<void(int, int, const Rat&)> dfs = [&](int t, int node, const Rat& prob) {
        if (t == chain.steps) {
            dist[trace_key(emissions)] += prob;
            return;
        }
        for (auto& [to, e] : outgoing[t][node]) {
            emissions.push_back(annotated(chain.levels[t + 1][to].emission, e->note));
            Rat q = prob * e->weight;
            q.canonicalize();
            dfs(t + 1, to, q);
            emissions.pop_back();
        }
    };
    for (size_t i = 0; i < chain.levels[0].size(); ++i) {
        emissions.push_back(chain.levels[0][i].emission);
        dfs(0, static_cast<int>(i), chain.init_weights[i]);
        emissions.pop_back();
    }
    for (auto& [k, q] : dist) q.canonicalize();
    return dist;
}

Rat chain_prefix_prob(const StepChain& chain, const std::vector<std::string>& prefix) {
    if (prefix.empty()) return Rat(1);
    std::vector<Rat> mass(chain.levels[0].size(), Rat(0));
    for (size_t i = 0; i < chain.levels[0].size(); ++i)
        if (chain.levels[0][i].emission == prefix[0]) mass[i] = chain.init_weights[i];
    for (size_t k = 1; k < prefix.size(); ++k) {
        int t = static_cast<int>(k) - 1;
        if (t >= chain.steps) return Rat(0);
        std::vector<Rat> next(chain.levels[t + 1].size(), Rat(0));
        for (const ChainEdge& e : chain.edges[t]) {
            if (annotated(chain.levels[t + 1][e.to].emission, e.note) == prefix[k])
                next[e.to] += mass[e.from] * e.weight;
        }
        for (Rat& q : next) q.canonicalize();
        mass = std::move(next);
    }
    Rat total(0);
    for (const Rat& q : mass) total += q;
    total.canonicalize();
    return total;
}

// --- sampling ----------------------------------------------------------------

static uint64_t draw(std::mt19937_64& rng, uint64_t bound) { // uniform in [0, bound)
    return bound <= 1 ? 0 : rng() % bound;
}

static OmissionChoice sample_omission(int n, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 1);
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[draw(rng, i + 1)]);
    std::set<int> s(idx.begin(), idx.begin() + n / 2);
    return make_omission(n, std::move(s));
}

SampledRun run_sampled(const Protocol& p, const InputPair& in, uint64_t seed,
                       const std::optional<OmissionChoice>& alice_choice,
                       const std::optional<OmissionChoice>& bob_choice) {
    std::mt19937_64 rng(seed);
    std::optional<OmissionChoice> ac = alice_choice, bc = bob_choice;
    if (p.encoding == Encoding::HalfCard) {
        if (!ac) ac = sample_omission(p.layout.n, rng);
        if (!bc) bc = sample_omission(p.layout.n, rng);
    }
    State s = initial_state(p, in, ac, bc);
    SampledRun run;
    run.emissions.push_back(visible_of(s));
    for (int t = 0; t < p.length(); ++t) {
        const Action& a = action_for(p, t, visible_of(s));
        check_action_legal(s, a, p.layout);
        switch (a.kind) {
            case Action::Kind::Move:
                s[a.to - 1] = s[a.from - 1];
                s[a.from - 1] = kEmpty;
                break;
            case Action::Kind::Turn:
                s[a.from - 1] = flip_cell(s[a.from - 1]);
                break;
            case Action::Kind::Shuffle: {
                auto perms = a.group.elements(static_cast<int>(a.positions.size()));
                const Perm& pi = perms[draw(rng, perms.size())];
                State t2 = s;
                for (size_t i = 0; i < a.positions.size(); ++i)
                    t2[a.positions[pi[i]] - 1] = s[a.positions[i] - 1];
                s = std::move(t2);
                break;
            }
            case Action::Kind::Extend: {
                int k = static_cast<int>(a.positions.size());
                std::string contents;
                for (int q : a.positions) contents += s[q - 1];
                for (int i = k - 1; i > 0; --i)
                    std::swap(contents[i], contents[draw(rng, i + 1)]);
                Suit want = cell_suit(s[a.from - 1]) == Suit::Heart ? Suit::Club : Suit::Heart;
                int chosen = -1, remaining = 0;
                for (char c : contents)
                    if (cell_suit(c) == want && cell_occupied(c)) remaining++;
                for (int i = 0; i < k && chosen < 0; ++i) {
                    if (!cell_occupied(contents[i]) || cell_suit(contents[i]) != want) continue;
                    remaining--; // cards of the desired suit after position i
                    if (draw(rng, remaining + 1) == 0) chosen = i;
                }
                for (int i = 0; i < k; ++i) s[a.positions[i] - 1] = contents[i];
                s[a.to - 1] = s[a.positions[chosen] - 1];
                s[a.positions[chosen] - 1] = kEmpty;
                break;
            }
        }
        run.emissions.push_back(visible_of(s));
    }
    run.final_state = s;
    return run;
}

} // namespace cardforge
