// cardforge: model, compile and verify card-based secure two-party protocols.
//
// Subcommands:
//   compile          formula -> width-5 branching program -> card protocol
//   bp-from-formula  formula -> branching program
//   bp-eval          evaluate a branching program on an assignment
//   run              sampled execution of a protocol (reproducible by seed)
//   verify           correctness / read-only / security verdicts
//   oracle           exhaustive trace distribution (exact rationals)
//   inspect          validation summary; replays FAIL report lines
//
// Exit codes: 0 success/PASS, 1 parse or validation error, 2 verification
// FAIL, 3 resource cap exceeded.

#include "cardforge/compiler.hpp"
#include "cardforge/extraction.hpp"
#include "cardforge/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cardforge;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::ParseError, "cannot write " + path);
    out << text;
}

InputPair parse_input_flag(const std::string& s, int n) {
    // --input a=0110,b=1010
    std::string a, b;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (cur.rfind("a=", 0) == 0) a = cur.substr(2);
            else if (cur.rfind("b=", 0) == 0) b = cur.substr(2);
            else fail(Err::ParseError, "input must look like a=0110,b=1010");
            cur.clear();
        } else {
            cur += c;
        }
    }
    InputPair in{parse_bits(a), parse_bits(b)};
    if (static_cast<int>(in.x.size()) != n || static_cast<int>(in.y.size()) != n)
        fail(Err::ParseError, "input length does not match the protocol (n = " + std::to_string(n) + ")");
    return in;
}

// --omit a=1,3 --omit b=2,4
std::pair<std::optional<OmissionChoice>, std::optional<OmissionChoice>> parse_omit_flags(
    const std::vector<std::string>& flags, int n) {
    std::optional<OmissionChoice> alice, bob;
    for (const std::string& s : flags) {
        if (s.size() < 3 || (s[0] != 'a' && s[0] != 'b') || s[1] != '=')
            fail(Err::ParseError, "omission subset must look like a=1,3");
        std::set<int> idx;
        std::string cur;
        for (char c : s.substr(2) + ",") {
            if (c == ',') {
                idx.insert(std::stoi(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        (s[0] == 'a' ? alice : bob) = make_omission(n, std::move(idx));
    }
    return {alice, bob};
}

Protocol load_protocol(const std::string& path) {
    Protocol p = parse_protocol(slurp(path));
    ValidationReport rep = validate_protocol(p);
    if (!rep.ok()) fail(Err::ValidationError, path + ":\n" + rep.str());
    return p;
}

TruthTable load_truth(const std::string& truth_path, const std::string& formula_text, int n) {
    if (!truth_path.empty()) return parse_truth_table(slurp(truth_path));
    if (!formula_text.empty()) return table_from_formula(parse_formula(formula_text), n);
    fail(Err::ParseError, "need --truth or --formula");
}

SecurityMode parse_mode(const std::string& m) {
    if (m == "committed") return SecurityMode::committed();
    if (m == "output-aware") return SecurityMode::output_aware();
    if (m == "player:alice") return SecurityMode::player_view(Player::Alice);
    if (m == "player:bob") return SecurityMode::player_view(Player::Bob);
    fail(Err::ParseError, "mode must be committed|output-aware|player:alice|player:bob");
}

std::vector<std::string> split_prefix(const std::string& joined) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : joined + "/") {
        if (c == '/') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"card-based secure two-party computation: compile and verify"};
    app.require_subcommand(1);

    // compile
    auto* cmd_compile = app.add_subcommand("compile", "formula -> branching program -> protocol");
    std::string formula_text, out_path, emit_bp_path, enc_name = "two_card";
    bool emit_plan = false;
    cmd_compile->add_option("--formula", formula_text, "formula, e.g. (AND (VAR a1) (VAR b1))")->required();
    cmd_compile->add_option("-o,--output", out_path, "protocol file to write")->required();
    cmd_compile->add_option("--encoding", enc_name, "two_card|one_card|half_card");
    cmd_compile->add_option("--emit-bp", emit_bp_path, "also write the branching program");
    cmd_compile->add_flag("--emit-plan", emit_plan, "append the compilation plan as comments");

    // bp-from-formula
    auto* cmd_bpf = app.add_subcommand("bp-from-formula", "formula -> width-5 branching program");
    std::string bpf_formula, bpf_out;
    cmd_bpf->add_option("--formula", bpf_formula)->required();
    cmd_bpf->add_option("-o,--output", bpf_out)->required();

    // bp-eval
    auto* cmd_bpe = app.add_subcommand("bp-eval", "evaluate a branching program");
    std::string bpe_path, bpe_input;
    cmd_bpe->add_option("--bp", bpe_path)->required();
    cmd_bpe->add_option("--input", bpe_input, "a=0110,b=1010")->required();

    // run
    auto* cmd_run = app.add_subcommand("run", "sampled execution");
    std::string run_proto, run_input;
    std::vector<std::string> run_omit;
    uint64_t run_seed = 0;
    bool run_trace = false;
    cmd_run->add_option("--protocol", run_proto)->required();
    cmd_run->add_option("--input", run_input)->required();
    cmd_run->add_option("--seed", run_seed);
    cmd_run->add_flag("--trace", run_trace, "print the visible trace");
    cmd_run->add_option("--omit", run_omit, "half-card omission subset, e.g. a=1,3 (repeatable)");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "security / correctness / read-only verdicts");
    std::string v_proto, v_truth, v_formula, v_mode = "committed";
    std::vector<std::string> v_also;
    cmd_verify->add_option("--protocol", v_proto)->required();
    cmd_verify->add_option("--truth", v_truth, "truth table file");
    cmd_verify->add_option("--formula", v_formula, "derive the truth table from a formula");
    cmd_verify->add_option("--mode", v_mode, "committed|output-aware|player:alice|player:bob");
    cmd_verify->add_option("--also", v_also, "read-only|correctness (repeatable)");

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "exhaustive trace distribution");
    std::string o_proto, o_input;
    cmd_oracle->add_option("--protocol", o_proto)->required();
    cmd_oracle->add_option("--input", o_input)->required();

    // inspect
    auto* cmd_inspect = app.add_subcommand("inspect", "validate; replay FAIL lines");
    std::string i_proto, i_replay, i_truth, i_formula;
    cmd_inspect->add_option("--protocol", i_proto)->required();
    cmd_inspect->add_option("--replay", i_replay, "a FAIL report line to recompute");
    cmd_inspect->add_option("--truth", i_truth);
    cmd_inspect->add_option("--formula", i_formula);

    CLI11_PARSE(app, argc, argv);

    if (cmd_compile->parsed()) {
        Formula f = parse_formula(formula_text);
        BranchingProgram bp = barrington_compile(f);
        if (!emit_bp_path.empty()) spit(emit_bp_path, serialize_bp(bp));
        Encoding enc = enc_name == "one_card" ? Encoding::OneCard
                       : enc_name == "half_card" ? Encoding::HalfCard
                                                 : Encoding::TwoCard;
        CompiledProtocol cp = compile_bp_to_protocol(bp, enc);
        std::string text = serialize_protocol(cp.protocol);
        if (emit_plan) text += cp.plan.str();
        spit(out_path, text);
        std::cout << "compiled n=" << cp.protocol.layout.n << " length=" << cp.protocol.length()
                  << " gadgets=" << cp.plan.gadgets.size() << "\n";
        return 0;
    }
    if (cmd_bpf->parsed()) {
        spit(bpf_out, serialize_bp(barrington_compile(parse_formula(bpf_formula))));
        return 0;
    }
    if (cmd_bpe->parsed()) {
        BranchingProgram bp = parse_bp(slurp(bpe_path));
        int n = std::max({1, bp.max_var(Player::Alice), bp.max_var(Player::Bob)});
        InputPair in = parse_input_flag(bpe_input, n);
        std::cout << (eval_bp(bp, in.x, in.y) ? 1 : 0) << "\n";
        return 0;
    }
    if (cmd_run->parsed()) {
        Protocol p = load_protocol(run_proto);
        InputPair in = parse_input_flag(run_input, p.layout.n);
        auto [omit_a, omit_b] = parse_omit_flags(run_omit, p.layout.n);
        SampledRun run = run_sampled(p, in, run_seed, omit_a, omit_b);
        if (run_trace)
            for (size_t t = 0; t < run.emissions.size(); ++t)
                std::cout << "step " << t << " " << run.emissions[t] << "\n";
        std::cout << "final " << run.final_state << "\n";
        try {
            std::cout << "output " << (decode_output(p, run.final_state) ? 1 : 0) << "\n";
        } catch (const CardError& e) {
            std::cout << "output undecodable: " << e.what() << "\n";
        }
        return 0;
    }
    if (cmd_verify->parsed()) {
        Protocol p = load_protocol(v_proto);
        SecurityMode mode = parse_mode(v_mode);
        if (mode.kind == SecurityMode::Kind::OutputAware && v_truth.empty() && v_formula.empty())
            fail(Err::ParseError, "output-aware mode needs --truth or --formula");
        TruthTable t = v_truth.empty() && v_formula.empty()
                           ? table_constant(p.layout.n, false)
                           : load_truth(v_truth, v_formula, p.layout.n);
        bool all_pass = true;
        VerdictReport sec = check_security(p, t, mode);
        std::cout << "security " << mode.str() << ": " << sec.report_line() << "\n";
        all_pass &= sec.pass;
        for (const std::string& extra : v_also) {
            if (extra == "read-only") {
                VerdictReport r = check_read_only(p);
                std::cout << "read-only: " << r.report_line() << "\n";
                all_pass &= r.pass;
            } else if (extra == "correctness") {
                if (v_truth.empty() && v_formula.empty())
                    fail(Err::ParseError, "correctness needs --truth or --formula");
                VerdictReport r = check_correctness(p, t);
                std::cout << "correctness: " << r.report_line() << "\n";
                all_pass &= r.pass;
            } else {
                fail(Err::ParseError, "--also takes read-only or correctness");
            }
        }
        return all_pass ? 0 : 2;
    }
    if (cmd_oracle->parsed()) {
        Protocol p = load_protocol(o_proto);
        InputPair in = parse_input_flag(o_input, p.layout.n);
        TraceDistribution dist = enumerate_traces_oracle(p, in);
        for (const auto& [trace, prob] : dist) std::cout << "p=" << rat_str(prob) << " " << trace << "\n";
        return 0;
    }
    if (cmd_inspect->parsed()) {
        Protocol p = load_protocol(i_proto);
        std::cout << "protocol " << p.name << " n=" << p.layout.n << " deck=H:"
                  << p.deck_multiset.hearts << ",C:" << p.deck_multiset.clubs
                  << " positions=" << p.layout.m << " length=" << p.length() << "\n";
        std::cout << "validation: ok\n";
        if (!i_replay.empty()) {
            // FAIL pair=(x,y)|(x',y') prefix=... p1=... p2=...
            std::istringstream is(i_replay);
            std::string tok, pair_tok, prefix_tok;
            while (is >> tok) {
                if (tok.rfind("pair=", 0) == 0) pair_tok = tok.substr(5);
                if (tok.rfind("prefix=", 0) == 0) prefix_tok = tok.substr(7);
            }
            if (pair_tok.empty()) fail(Err::ParseError, "replay line has no pair=");
            auto bar = pair_tok.find("|");
            std::string a = pair_tok.substr(1, bar - 2);             // strip ( )
            std::string b = pair_tok.substr(bar + 2, pair_tok.size() - bar - 3);
            auto [p1, p2] = replay_witness(p, a, b, split_prefix(prefix_tok));
            std::cout << "replay p1=" << rat_str(p1) << " p2=" << rat_str(p2) << " "
                      << (p1 == p2 ? "EQUAL" : "DISTINGUISHING") << "\n";
        }
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const CardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code == Err::TooLarge) return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
