#include "wahl/dsl.hpp"

#include <fstream>
#include <sstream>

namespace wahl {

namespace {

// Tokenizer shared by both formats. Intersection/product aliases are
// normalized to '^' and 'x'.
struct Tokenizer {
    std::string text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Tokenizer(std::string t) : text(std::move(t)) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(line, col, msg);
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos < text.size(); ++i, ++pos) {
            if (text[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    }

    void skip_space_and_comments(bool stop_at_newline) {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n')
                    advance(1);
            } else if (c == '\n') {
                if (stop_at_newline)
                    return;
                advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else {
                return;
            }
        }
    }

    bool at_end() {
        skip_space_and_comments(false);
        return pos >= text.size();
    }

    bool end_of_line() {
        skip_space_and_comments(true);
        return pos >= text.size() || text[pos] == '\n';
    }

    // A token: identifier (letters, digits, _, ', optional trailing chars),
    // number, or a single punctuation character. UTF-8 aliases for the
    // intersection and product signs map to "^" and "x".
    std::string next_token() {
        skip_space_and_comments(false);
        if (pos >= text.size())
            fail("unexpected end of input");
        unsigned char c = static_cast<unsigned char>(text[pos]);
        // U+2229 INTERSECTION = E2 88 A9; U+00D7 MULTIPLICATION = C3 97.
        if (c == 0xE2 && pos + 2 < text.size() &&
            static_cast<unsigned char>(text[pos + 1]) == 0x88 &&
            static_cast<unsigned char>(text[pos + 2]) == 0xA9) {
            advance(3);
            return "^";
        }
        if (c == 0xC3 && pos + 1 < text.size() &&
            static_cast<unsigned char>(text[pos + 1]) == 0x97) {
            advance(2);
            return "x";
        }
        if (std::isalnum(c) || c == '_' || c == '\'' || c == '-') {
            std::size_t start = pos;
            while (pos < text.size()) {
                unsigned char d = static_cast<unsigned char>(text[pos]);
                if (std::isalnum(d) || d == '_' || d == '\'' ||
                    (text[pos] == '-' && pos == start))
                    advance(1);
                else
                    break;
            }
            return text.substr(start, pos - start);
        }
        advance(1);
        return std::string(1, static_cast<char>(c));
    }

    std::string peek_token() {
        auto save = *this;
        std::string t = next_token();
        *this = save;
        return t;
    }

    void expect(const std::string& tok) {
        std::string t = next_token();
        if (t != tok)
            fail("expected '" + tok + "', found '" + t + "'");
    }

    long long next_int() {
        std::string t = next_token();
        try {
            std::size_t used = 0;
            long long v = std::stoll(t, &used);
            if (used != t.size())
                throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            fail("expected an integer, found '" + t + "'");
        }
    }

    Int next_bigint() {
        std::string t = next_token();
        for (std::size_t i = 0; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i])) &&
                !(i == 0 && t[i] == '-'))
                fail("expected an integer, found '" + t + "'");
        return Int(t);
    }
};

bool is_identifier(const std::string& t) {
    if (t.empty() || !std::isalpha(static_cast<unsigned char>(t[0])))
        return false;
    for (char c : t)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'')
            return false;
    return true;
}

std::vector<long long> parse_bracket_ll(Tokenizer& tz) {
    std::vector<long long> out;
    tz.expect("[");
    for (;;) {
        out.push_back(tz.next_int());
        std::string t = tz.next_token();
        if (t == "]")
            break;
        if (t != ",")
            tz.fail("expected ',' or ']' in bracket");
    }
    return out;
}

} // namespace

Arena parse_arena(const std::string& text) {
    Tokenizer tz(text);
    Arena arena;
    bool saw_arena = false, saw_ambient = false;

    while (!tz.at_end()) {
        std::string kw = tz.next_token();
        if (kw == "arena") {
            arena.ambient.name = tz.next_token();
            saw_arena = true;
        } else if (kw == "ambient") {
            for (int i = 0; i < 4; ++i) {
                std::string key = tz.next_token();
                tz.expect("=");
                long long v = tz.next_int();
                if (key == "k2")
                    arena.ambient.k2 = v;
                else if (key == "chi")
                    arena.ambient.chi_top = v;
                else if (key == "pg")
                    arena.ambient.pg = v;
                else if (key == "q")
                    arena.ambient.q_irr = v;
                else
                    tz.fail("unknown ambient field '" + key + "'");
            }
            saw_ambient = true;
        } else if (kw == "curve") {
            Curve c;
            c.name = tz.next_token();
            if (!is_identifier(c.name))
                tz.fail("bad curve name '" + c.name + "'");
            bool saw_self = false;
            while (!tz.end_of_line()) {
                std::string key = tz.next_token();
                tz.expect("=");
                if (key == "self") {
                    c.self_int = tz.next_int();
                    saw_self = true;
                } else if (key == "nodes") {
                    c.nodes = tz.next_int();
                } else if (key == "tags") {
                    for (;;) {
                        std::string tag = tz.next_token();
                        while (!tz.end_of_line() && tz.peek_token() == ":") {
                            tz.expect(":");
                            tag += ":" + tz.next_token(); // tags like fiber:I8a
                        }
                        c.tags.insert(tag);
                        if (tz.end_of_line() || tz.peek_token() != ",")
                            break;
                        tz.expect(",");
                    }
                } else {
                    tz.fail("unknown curve field '" + key + "'");
                }
            }
            if (!saw_self)
                tz.fail("curve " + c.name + " missing self=");
            arena.curves.push_back(c);
        } else if (kw == "point") {
            IncidencePoint p;
            std::vector<std::pair<std::string, int>> branches;
            // Optional leading "NAME =".
            auto save = tz;
            std::string first = tz.next_token();
            if (!tz.end_of_line() && tz.peek_token() == "=") {
                tz.expect("=");
                p.name = first;
            } else {
                tz = save;
            }
            while (!tz.end_of_line()) {
                std::string cname = tz.next_token();
                if (!is_identifier(cname))
                    tz.fail("bad curve name '" + cname + "' in point");
                int mult = 1;
                if (!tz.end_of_line() && tz.peek_token() == ":") {
                    tz.expect(":");
                    mult = static_cast<int>(tz.next_int());
                }
                branches.emplace_back(cname, mult);
            }
            if (branches.empty())
                tz.fail("point with no branches");
            for (auto& [cname, mult] : branches) {
                int ci = arena.curve_index(cname);
                if (ci < 0)
                    tz.fail("point references unknown curve '" + cname + "'");
                p.branches.emplace_back(ci, mult);
            }
            arena.points.push_back(p);
        } else {
            tz.fail("unknown keyword '" + kw + "'");
        }
    }
    if (!saw_arena)
        throw parse_error(1, 1, "missing 'arena' header");
    if (!saw_ambient)
        throw parse_error(1, 1, "missing 'ambient' line");
    auto violations = validate(arena);
    if (!violations.empty())
        throw parse_error(1, 1, "arena invalid: " + violations.front());
    return arena;
}

BoxExample parse_box(const std::string& text) {
    Tokenizer tz(text);
    BoxExample box;
    bool saw_box = false, saw_k2 = false;

    while (!tz.at_end()) {
        std::string kw = tz.next_token();
        if (kw == "box") {
            box.id = static_cast<int>(tz.next_int());
            saw_box = true;
        } else if (kw == "arena") {
            box.arena_name = tz.next_token();
        } else if (kw == "k2") {
            box.target_k2 = tz.next_int();
            saw_k2 = true;
        } else if (kw == "configuration") {
            while (!tz.end_of_line()) {
                std::string name = tz.next_token();
                if (!is_identifier(name))
                    tz.fail("bad curve name '" + name + "' in configuration");
                box.configuration.push_back(name);
            }
        } else if (kw == "blowup") {
            BlowupDirective d;
            if (tz.peek_token() == "[") {
                d.kind = BlowupDirective::Kind::Chain;
                d.chain = parse_bracket_ll(tz);
                if (!chain_valid(d.chain))
                    tz.fail("chain bracket is not contractible");
                tz.expect("x");
                d.point_spec.push_back(tz.next_token());
                tz.expect("^");
                d.point_spec.push_back(tz.next_token());
                if (d.point_spec.size() != 2)
                    tz.fail("chain directive needs exactly two curves");
            } else {
                d.kind = BlowupDirective::Kind::Simple;
                std::string first = tz.next_token();
                if (!is_identifier(first))
                    tz.fail("bad name '" + first + "' in blowup");
                if (tz.peek_token() == ":") {
                    tz.expect(":");
                    tz.expect("=");
                    d.exc_name = first;
                    d.point_spec.push_back(tz.next_token());
                } else {
                    d.point_spec.push_back(first);
                }
                while (!tz.end_of_line()) {
                    tz.expect("^");
                    d.point_spec.push_back(tz.next_token());
                }
                if (d.point_spec.size() < 2)
                    tz.fail("blowup needs at least two curves");
            }
            box.directives.push_back(std::move(d));
        } else if (kw == "chain") {
            DeclaredChain dc;
            tz.expect("(");
            dc.params.n = tz.next_bigint();
            tz.expect(",");
            dc.params.a = tz.next_bigint();
            tz.expect(")");
            tz.expect(":");
            tz.expect("[");
            for (;;) {
                dc.bracket.push_back(tz.next_bigint());
                std::string t = tz.next_token();
                if (t == "]")
                    break;
                if (t != ",")
                    tz.fail("expected ',' or ']' in chain bracket");
            }
            std::vector<Int> expect_bracket;
            try {
                expect_bracket = wahl_chain(dc.params);
            } catch (const hj_input_error& e) {
                tz.fail(std::string("bad chain params: ") + e.what());
            }
            if (expect_bracket != dc.bracket)
                tz.fail("chain bracket does not match its (n,a)");
            box.chains.push_back(std::move(dc));
        } else {
            tz.fail("unknown keyword '" + kw + "'");
        }
    }
    if (!saw_box || !saw_k2 || box.arena_name.empty())
        throw parse_error(1, 1, "box file missing box/arena/k2 header");
    if (box.configuration.empty())
        throw parse_error(1, 1, "box file has empty configuration");
    return box;
}

std::string print_box(const BoxExample& box) {
    std::ostringstream os;
    os << "box " << box.id << "\n";
    os << "arena " << box.arena_name << "\n";
    os << "k2 " << box.target_k2 << "\n";
    os << "configuration";
    for (const std::string& c : box.configuration)
        os << " " << c;
    os << "\n";
    for (const BlowupDirective& d : box.directives) {
        os << "blowup ";
        if (d.kind == BlowupDirective::Kind::Chain) {
            os << "[";
            for (std::size_t i = 0; i < d.chain.size(); ++i)
                os << (i ? "," : "") << d.chain[i];
            os << "] x " << d.point_spec[0] << " ^ " << d.point_spec[1];
        } else {
            if (!d.exc_name.empty())
                os << d.exc_name << " := ";
            for (std::size_t i = 0; i < d.point_spec.size(); ++i)
                os << (i ? " ^ " : "") << d.point_spec[i];
        }
        os << "\n";
    }
    for (const DeclaredChain& dc : box.chains) {
        os << "chain (" << dc.params.n << "," << dc.params.a << ") : [";
        for (std::size_t i = 0; i < dc.bracket.size(); ++i)
            os << (i ? "," : "") << dc.bracket[i];
        os << "]\n";
    }
    return os.str();
}

bool operator==(const BoxExample& a, const BoxExample& b) {
    auto dir_eq = [](const BlowupDirective& x, const BlowupDirective& y) {
        return x.kind == y.kind && x.point_spec == y.point_spec &&
               x.exc_name == y.exc_name && x.chain == y.chain;
    };
    if (a.id != b.id || a.arena_name != b.arena_name || a.target_k2 != b.target_k2 ||
        a.configuration != b.configuration ||
        a.directives.size() != b.directives.size() || a.chains.size() != b.chains.size())
        return false;
    for (std::size_t i = 0; i < a.directives.size(); ++i)
        if (!dir_eq(a.directives[i], b.directives[i]))
            return false;
    for (std::size_t i = 0; i < a.chains.size(); ++i)
        if (!(a.chains[i].params == b.chains[i].params) ||
            a.chains[i].bracket != b.chains[i].bracket)
            return false;
    return true;
}

std::string json_int(const Int& v) {
    static const Int kSafe = Int(1) << 53; // IEEE-754 exact-integer limit
    if (v >= kSafe || v <= -kSafe)
        return "\"" + v.str() + "\"";
    return v.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace wahl
