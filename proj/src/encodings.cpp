#include "cardforge/encodings.hpp"

namespace cardforge {

std::pair<char, char> commit_2card(bool bit) {
    return bit ? std::make_pair('h', 'c') : std::make_pair('c', 'h');
}

bool decode_2card(char first, char second) {
    if (!cell_occupied(first) || !cell_occupied(second))
        fail(Err::InvalidPair, "committed pair has an empty cell");
    Suit a = cell_suit(first), b = cell_suit(second);
    if (a == b) fail(Err::InvalidPair, "committed pair with equal suits");
    return a == Suit::Heart;
}

char commit_1card(bool bit) { return bit ? 'h' : 'c'; }

bool decode_1card(char cell) {
    if (!cell_occupied(cell)) fail(Err::DecodeFailure, "1-card cell is empty");
    return cell_suit(cell) == Suit::Heart;
}

bool decode_half_card(char first, char second) {
    bool lo = cell_occupied(first), hi = cell_occupied(second);
    if (lo == hi) fail(Err::MalformedHalfCell, lo ? "both half-card cells occupied" : "both half-card cells empty");
    if (lo) return cell_suit(first) == Suit::Heart;  // h. = 1, c. = 0
    return cell_suit(second) == Suit::Club;          // .c = 1, .h = 0
}

OmissionChoice make_omission(int n, std::set<int> omit_heart) {
    if (n % 2 != 0) fail(Err::OddLength, "half-card encoding needs an even bit count");
    if (static_cast<int>(omit_heart.size()) != n / 2)
        fail(Err::BadChoice, "omission subset must contain exactly n/2 bits");
    for (int i : omit_heart)
        if (i < 1 || i > n) fail(Err::BadChoice, "omission index out of range");
    return OmissionChoice{n, std::move(omit_heart)};
}

std::vector<OmissionChoice> all_omissions(int n) {
    if (n % 2 != 0) fail(Err::OddLength, "half-card encoding needs an even bit count");
    std::vector<OmissionChoice> out;
    std::vector<int> pick(n / 2);
    // enumerate subsets of {1..n} of size n/2 in lexicographic order
    std::string mask(n / 2, 1);
    mask.resize(n, 0);
    std::sort(mask.begin(), mask.end(), std::greater<char>());
    do {
        std::set<int> s;
        for (int i = 0; i < n; ++i)
            if (mask[i]) s.insert(i + 1);
        out.push_back(OmissionChoice{n, std::move(s)});
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
}

std::string commit_half_card(const std::vector<bool>& bits, const OmissionChoice& choice) {
    int n = static_cast<int>(bits.size());
    if (n != choice.n) fail(Err::BadChoice, "omission choice sized for a different input");
    if (n % 2 != 0) fail(Err::OddLength, "half-card encoding needs an even bit count");
    std::string cells;
    for (int i = 1; i <= n; ++i) {
        auto [first, second] = commit_2card(bits[i - 1]);
        bool omit_heart = choice.omit_heart.count(i) > 0;
        // remove the heart for bits in S, the club otherwise
        char drop = omit_heart ? 'h' : 'c';
        cells += (first == drop) ? kEmpty : first;
        cells += (second == drop) ? kEmpty : second;
    }
    return cells;
}

std::vector<std::pair<int, Rat>> uniform_complement_pick(const std::string& deck_arrangement,
                                                         Suit desired) {
    return scan_pick_distribution(deck_arrangement, desired);
}

std::vector<bool> parse_bits(const std::string& s) {
    std::vector<bool> out;
    for (char c : s) {
        if (c != '0' && c != '1') fail(Err::ParseError, "bit string must be over {0,1}: " + s);
        out.push_back(c == '1');
    }
    return out;
}

std::string bits_str(const std::vector<bool>& bits) {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

} // namespace cardforge
