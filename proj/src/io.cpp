#include "cardforge/io.hpp"

#include <charconv>
#include <sstream>

namespace cardforge {

namespace {

[[noreturn]] void parse_fail(const std::string& msg, int line) {
    fail(Err::ParseError, msg + " (line " + std::to_string(line) + ")");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int to_int(const std::string& s, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) parse_fail("expected an integer, got '" + s + "'", line);
    return v;
}

std::vector<int> parse_int_list(const std::string& s, int line) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (cur.empty()) parse_fail("empty entry in list '" + s + "'", line);
            out.push_back(to_int(cur, line));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

std::string int_list(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string perm_text(const Perm& p) { // one-based image list
    std::vector<int> v;
    for (int i : p) v.push_back(i + 1);
    return int_list(v);
}

Perm parse_perm(const std::string& s, int line) {
    Perm p;
    for (int v : parse_int_list(s, line)) p.push_back(v - 1);
    if (!perm_is_valid(p)) parse_fail("'" + s + "' is not a permutation image list", line);
    return p;
}

Player parse_player(const std::string& s, int line) {
    if (s == "a") return Player::Alice;
    if (s == "b") return Player::Bob;
    parse_fail("expected player a|b, got '" + s + "'", line);
}

Encoding parse_encoding(const std::string& s, int line) {
    if (s == "two_card") return Encoding::TwoCard;
    if (s == "one_card") return Encoding::OneCard;
    if (s == "half_card") return Encoding::HalfCard;
    parse_fail("unknown encoding '" + s + "'", line);
}

} // namespace

std::string serialize_action(const Action& a) {
    std::ostringstream os;
    switch (a.kind) {
        case Action::Kind::Move:
            os << "move " << player_char(a.player) << " " << a.from << " " << a.to;
            break;
        case Action::Kind::Turn:
            os << "turn " << player_char(a.player) << " " << a.from;
            break;
        case Action::Kind::Shuffle:
            os << "shuffle " << player_char(a.player) << " " << int_list(a.positions) << " ";
            switch (a.group.kind) {
                case GroupKind::Cyclic: os << "cyclic"; break;
                case GroupKind::Symmetric: os << "symmetric"; break;
                case GroupKind::Explicit: {
                    os << "explicit:";
                    for (size_t i = 0; i < a.group.perms.size(); ++i) {
                        if (i) os << ';';
                        os << perm_text(a.group.perms[i]);
                    }
                    break;
                }
            }
            break;
        case Action::Kind::Extend:
            os << "extend " << player_char(a.player) << " " << a.from << " " << a.to << " "
               << int_list(a.positions);
            break;
    }
    return os.str();
}

Action parse_action(const std::string& text, const std::string& where) {
    int line = 0;
    auto toks = split_ws(text);
    if (toks.empty()) fail(Err::ParseError, "empty action in " + where);
    try {
        if (toks[0] == "move" && toks.size() == 4)
            return make_move(parse_player(toks[1], line), to_int(toks[2], line), to_int(toks[3], line));
        if (toks[0] == "turn" && toks.size() == 3)
            return make_turn(parse_player(toks[1], line), to_int(toks[2], line));
        if (toks[0] == "extend" && toks.size() == 5)
            return make_extend(parse_player(toks[1], line), to_int(toks[2], line), to_int(toks[3], line),
                               parse_int_list(toks[4], line));
        if (toks[0] == "shuffle" && toks.size() == 4) {
            Player pl = parse_player(toks[1], line);
            std::vector<int> pos = parse_int_list(toks[2], line);
            if (toks[3] == "cyclic") return make_shuffle(pl, pos, cyclic_group());
            if (toks[3] == "symmetric") return make_shuffle(pl, pos, symmetric_group());
            if (toks[3].rfind("explicit:", 0) == 0) {
                std::vector<Perm> perms;
                std::string body = toks[3].substr(9), cur;
                for (char c : body + ";") {
                    if (c == ';') {
                        if (!cur.empty()) perms.push_back(parse_perm(cur, line));
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
                return make_shuffle(pl, pos, explicit_group(perms));
            }
        }
    } catch (const CardError&) {
        throw;
    }
    fail(Err::ParseError, "unknown action '" + text + "' in " + where);
}

// --- protocol ----------------------------------------------------------------

static std::string protocol_body(const Protocol& p) {
    std::ostringstream os;
    os << "n " << p.layout.n << "\n";
    os << "deck H:" << p.deck_multiset.hearts << " C:" << p.deck_multiset.clubs << "\n";
    os << "positions " << p.layout.m << "\n";
    os << "encoding " << encoding_name(p.encoding) << "\n";
    os << "length " << p.length() << "\n";
    os << "output";
    for (int pos : p.output.positions) os << " " << pos;
    os << " " << (p.output.kind == OutputKind::Committed2Card ? "committed" : "open") << "\n";
    for (int t = 0; t < p.length(); ++t)
        for (const auto& [vis, a] : p.program[t])
            os << "step " << t << " " << vis << " " << serialize_action(a) << "\n";
    return os.str();
}

std::string serialize_protocol(const Protocol& p) {
    return "protocol " + p.name + "\n" + protocol_body(p);
}

namespace {

struct BodyFields {
    std::string name;
    int n = -1, m = -1, length = -1;
    SuitCount deck;
    Encoding enc = Encoding::TwoCard;
    bool have_enc = false;
    OutputSpec output;
    bool have_output = false;
    std::vector<std::vector<std::pair<Visible, Action>>> steps;
};

BodyFields parse_body(const std::string& text, const std::string& head_keyword) {
    BodyFields f;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    bool have_head = false;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& k = toks[0];
        if (k == head_keyword) {
            if (toks.size() != 2) parse_fail("expected '" + head_keyword + " <name>'", ln);
            f.name = toks[1];
            have_head = true;
        } else if (k == "n" && toks.size() == 2) {
            f.n = to_int(toks[1], ln);
        } else if (k == "deck" && toks.size() == 3) {
            if (toks[1].rfind("H:", 0) != 0 || toks[2].rfind("C:", 0) != 0)
                parse_fail("expected 'deck H:<int> C:<int>'", ln);
            f.deck.hearts = to_int(toks[1].substr(2), ln);
            f.deck.clubs = to_int(toks[2].substr(2), ln);
        } else if (k == "positions" && toks.size() == 2) {
            f.m = to_int(toks[1], ln);
        } else if (k == "encoding" && toks.size() == 2) {
            f.enc = parse_encoding(toks[1], ln);
            f.have_enc = true;
        } else if (k == "length" && toks.size() == 2) {
            f.length = to_int(toks[1], ln);
        } else if (k == "output") {
            if (toks.size() < 3) parse_fail("expected 'output <pos>... <committed|open>'", ln);
            f.output.positions.clear();
            for (size_t i = 1; i + 1 < toks.size(); ++i) f.output.positions.push_back(to_int(toks[i], ln));
            const std::string& kind = toks.back();
            if (kind == "committed") f.output.kind = OutputKind::Committed2Card;
            else if (kind == "open") f.output.kind = OutputKind::Open;
            else parse_fail("output kind must be committed|open, got '" + kind + "'", ln);
            f.have_output = true;
        } else if (k == "step") {
            if (toks.size() < 4) parse_fail("expected 'step <t> <visible> <action>'", ln);
            int t = to_int(toks[1], ln);
            if (t < 0) parse_fail("negative step index", ln);
            std::string rest;
            for (size_t i = 3; i < toks.size(); ++i) {
                if (i > 3) rest += ' ';
                rest += toks[i];
            }
            Action a = [&] {
                try {
                    return parse_action(rest, "line " + std::to_string(ln));
                } catch (const CardError& e) {
                    parse_fail(e.what(), ln);
                }
            }();
            if (static_cast<size_t>(t) >= f.steps.size()) f.steps.resize(t + 1);
            f.steps[t].emplace_back(toks[2], a);
        } else {
            parse_fail("unknown keyword '" + k + "'", ln);
        }
    }
    if (!have_head) fail(Err::ParseError, "missing '" + head_keyword + "' header line");
    if (f.n < 0 || f.m < 0 || f.length < 0 || !f.have_enc)
        fail(Err::ParseError, "missing one of n/deck/positions/encoding/length");
    if (static_cast<int>(f.steps.size()) > f.length)
        fail(Err::ParseError, "step index beyond the declared length");
    return f;
}

std::vector<StepMap> steps_to_program(const BodyFields& f) {
    std::vector<StepMap> program(f.length);
    for (size_t t = 0; t < f.steps.size(); ++t)
        for (const auto& [vis, a] : f.steps[t]) {
            if (static_cast<int>(vis.size()) != f.m)
                fail(Err::ParseError, "visible string of wrong length at step " + std::to_string(t));
            program[t][vis] = a;
        }
    return program;
}

} // namespace

Protocol parse_protocol(const std::string& text) {
    BodyFields f = parse_body(text, "protocol");
    if (!f.have_output) fail(Err::ParseError, "missing output line");
    Protocol p;
    p.name = f.name;
    p.encoding = f.enc;
    p.deck_multiset = f.deck;
    int s = f.deck.hearts + f.deck.clubs;
    int input_cells = 2 * f.n * cells_per_bit(f.enc);
    int free_cells = f.m - input_cells - s;
    if (f.n < 0 || free_cells < 0) fail(Err::ParseError, "positions do not cover inputs and deck");
    p.layout = make_layout(f.n, s, free_cells, f.enc);
    p.program = steps_to_program(f);
    p.output = f.output;
    return p;
}

std::string serialize_fragment(const ProtocolFragment& frag, Encoding enc) {
    std::ostringstream os;
    os << "fragment " << frag.name << "\n";
    os << "n " << frag.layout.n << "\n";
    os << "deck H:" << frag.deck_required.hearts << " C:" << frag.deck_required.clubs << "\n";
    os << "positions " << frag.layout.m << "\n";
    os << "encoding " << encoding_name(enc) << "\n";
    os << "length " << frag.length() << "\n";
    for (int t = 0; t < frag.length(); ++t)
        for (const auto& [vis, a] : frag.steps[t])
            os << "step " << t << " " << vis << " " << serialize_action(a) << "\n";
    return os.str();
}

ProtocolFragment parse_fragment(const std::string& text, Encoding* enc_out) {
    BodyFields f = parse_body(text, "fragment");
    ProtocolFragment frag;
    frag.name = f.name;
    frag.deck_required = f.deck;
    int input_cells = 2 * f.n * cells_per_bit(f.enc);
    frag.layout = make_layout(f.n, 0, f.m - input_cells, f.enc);
    frag.layout.s = 0;
    frag.steps = steps_to_program(f);
    if (enc_out) *enc_out = f.enc;
    return frag;
}

// --- branching programs ---------------------------------------------------------

std::string serialize_bp(const BranchingProgram& bp) {
    std::ostringstream os;
    os << "bp width=" << bp.width << " length=" << bp.depth();
    if (!bp.permutation) {
        os << " kind=layered sizes=" << int_list(bp.layer_sizes);
    }
    os << "\n";
    for (size_t i = 0; i < bp.layers.size(); ++i) {
        const BpLayer& l = bp.layers[i];
        os << "layer " << i + 1 << " label=" << player_char(l.owner) << l.var
           << " perm0=" << perm_text(l.e0) << " perm1=" << perm_text(l.e1) << "\n";
    }
    os << "start=" << bp.start + 1 << " accept=" << bp.accept + 1 << " reject=" << bp.reject + 1
       << "\n";
    return os.str();
}

BranchingProgram parse_bp(const std::string& text) {
    BranchingProgram bp;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    bool have_head = false, have_foot = false;
    int depth = 0;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "bp") {
            std::map<std::string, std::string> kv;
            for (size_t i = 1; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) parse_fail("expected key=value, got '" + toks[i] + "'", ln);
                kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
            }
            if (!kv.count("width") || !kv.count("length")) parse_fail("bp header needs width= and length=", ln);
            bp.width = to_int(kv["width"], ln);
            depth = to_int(kv["length"], ln);
            if (depth < 1 || bp.width < 1) parse_fail("bp needs positive width and length", ln);
            bp.permutation = !kv.count("kind") || kv["kind"] == "permutation";
            if (kv.count("kind") && kv["kind"] != "permutation" && kv["kind"] != "layered")
                parse_fail("kind must be permutation|layered", ln);
            if (bp.permutation) {
                bp.layer_sizes.assign(depth, bp.width);
            } else {
                if (!kv.count("sizes")) parse_fail("layered bp needs sizes=", ln);
                bp.layer_sizes = parse_int_list(kv["sizes"], ln);
            }
            have_head = true;
        } else if (toks[0] == "layer") {
            if (!have_head) parse_fail("layer before bp header", ln);
            if (toks.size() != 5) parse_fail("expected 'layer <i> label=.. perm0=.. perm1=..'", ln);
            BpLayer l;
            int idx = to_int(toks[1], ln);
            if (idx != static_cast<int>(bp.layers.size()) + 1) parse_fail("layers out of order", ln);
            if (toks[2].rfind("label=", 0) != 0 || toks[2].size() < 8)
                parse_fail("expected label=<a|b><idx>", ln);
            l.owner = parse_player(toks[2].substr(6, 1), ln);
            l.var = to_int(toks[2].substr(7), ln);
            if (toks[3].rfind("perm0=", 0) != 0 || toks[4].rfind("perm1=", 0) != 0)
                parse_fail("expected perm0= and perm1=", ln);
            auto parse_edges = [&](const std::string& body) {
                std::vector<int> img = parse_int_list(body, ln);
                Perm e;
                for (int v : img) e.push_back(v - 1);
                return e;
            };
            l.e0 = parse_edges(toks[3].substr(6));
            l.e1 = parse_edges(toks[4].substr(6));
            bp.layers.push_back(std::move(l));
        } else if (toks[0].rfind("start=", 0) == 0) {
            std::map<std::string, std::string> kv;
            for (const std::string& t : toks) {
                auto eq = t.find('=');
                if (eq == std::string::npos) parse_fail("expected key=value in footer", ln);
                kv[t.substr(0, eq)] = t.substr(eq + 1);
            }
            if (!kv.count("start") || !kv.count("accept") || !kv.count("reject"))
                parse_fail("footer needs start= accept= reject=", ln);
            bp.start = to_int(kv["start"], ln) - 1;
            bp.accept = to_int(kv["accept"], ln) - 1;
            bp.reject = to_int(kv["reject"], ln) - 1;
            have_foot = true;
        } else {
            parse_fail("unknown keyword '" + toks[0] + "'", ln);
        }
    }
    if (!have_head) fail(Err::ParseError, "missing bp header");
    if (!have_foot) fail(Err::ParseError, "missing start/accept/reject footer");
    if (static_cast<int>(bp.layers.size()) != depth - 1)
        fail(Err::ParseError, "expected " + std::to_string(depth - 1) + " layers");
    try {
        validate_bp(bp);
    } catch (const CardError& e) {
        fail(Err::ValidationError, e.what());
    }
    return bp;
}

// --- formulas --------------------------------------------------------------------

std::string serialize_formula(const Formula& f) {
    switch (f.op) {
        case Formula::Op::Var:
            return "(VAR " + std::string(1, player_char(f.owner)) + std::to_string(f.index) + ")";
        case Formula::Op::Not: return "(NOT " + serialize_formula(f.kids[0]) + ")";
        case Formula::Op::And:
            return "(AND " + serialize_formula(f.kids[0]) + " " + serialize_formula(f.kids[1]) + ")";
        case Formula::Op::Or:
            return "(OR " + serialize_formula(f.kids[0]) + " " + serialize_formula(f.kids[1]) + ")";
    }
    return "";
}

namespace {

struct FormulaParser {
    const std::string& text;
    size_t pos = 0;
    int line = 1, col = 1;

    [[noreturn]] void err(const std::string& msg) const {
        fail(Err::ParseError, msg + " at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    void advance() {
        if (text[pos] == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        pos++;
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance();
    }
    char peek() {
        skip_ws();
        if (pos >= text.size()) err("unexpected end of input");
        return text[pos];
    }
    std::string word() {
        skip_ws();
        std::string w;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')') {
            w += text[pos];
            advance();
        }
        if (w.empty()) err("expected a token");
        return w;
    }

    Formula parse() {
        if (peek() != '(') err("expected '('");
        advance();
        std::string op = word();
        Formula f;
        if (op == "VAR") {
            std::string v = word();
            if (v.size() < 2 || (v[0] != 'a' && v[0] != 'b')) err("expected variable like a1 or b2");
            f = f_var(v[0] == 'a' ? Player::Alice : Player::Bob, to_int(v.substr(1), line));
            if (f.index < 1) err("variable index must be positive");
        } else if (op == "NOT") {
            f = f_not(parse());
        } else if (op == "AND" || op == "OR") {
            Formula a = parse();
            Formula b = parse();
            f = op == "AND" ? f_and(std::move(a), std::move(b)) : f_or(std::move(a), std::move(b));
        } else {
            err("unknown operator '" + op + "'");
        }
        if (peek() != ')') err("unbalanced parenthesis: expected ')'");
        advance();
        return f;
    }
};

} // namespace

Formula parse_formula(const std::string& text) {
    FormulaParser p{text};
    Formula f = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.err("trailing input after formula");
    return f;
}

// --- truth tables ----------------------------------------------------------------

std::string serialize_truth_table(const TruthTable& t) {
    std::ostringstream os;
    for (const InputPair& in : all_inputs(t.n))
        os << bits_str(in.x) << bits_str(in.y) << " -> " << (t.eval(in) ? 1 : 0) << "\n";
    return os.str();
}

TruthTable parse_truth_table(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    std::map<std::string, bool> rows;
    size_t width = 0;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks.size() != 3 || toks[1] != "->") parse_fail("expected '<xy> -> <bit>'", ln);
        if (width == 0) width = toks[0].size();
        if (toks[0].size() != width || width % 2 != 0) parse_fail("inconsistent input width", ln);
        if (toks[2] != "0" && toks[2] != "1") parse_fail("bit must be 0 or 1", ln);
        rows[toks[0]] = toks[2] == "1";
    }
    if (rows.empty()) fail(Err::ParseError, "empty truth table");
    int n = static_cast<int>(width) / 2;
    TruthTable t;
    t.n = n;
    t.values.resize(static_cast<size_t>(1) << (2 * n));
    if (rows.size() != t.values.size())
        fail(Err::ParseError, "truth table must cover all " + std::to_string(t.values.size()) + " inputs");
    for (const InputPair& in : all_inputs(n)) {
        std::string key = bits_str(in.x) + bits_str(in.y);
        auto it = rows.find(key);
        if (it == rows.end()) fail(Err::ParseError, "truth table misses input " + key);
        size_t idx = 0;
        for (char c : key) idx = (idx << 1) | (c == '1');
        t.values[idx] = it->second;
    }
    return t;
}

TruthTable table_from_formula(const Formula& f, int n) {
    if (n == 0)
        n = std::max({1, formula_max_var(f, Player::Alice), formula_max_var(f, Player::Bob)});
    TruthTable t;
    t.n = n;
    for (const InputPair& in : all_inputs(n)) t.values.push_back(eval_formula(f, in.x, in.y));
    return t;
}

} // namespace cardforge
