#pragma once

// Parsers and serializers: the .arena curve/point format, the .wahlbox
// boxed-example format, and the versioned JSON certificate report.

#include <string>
#include <vector>

#include "wahl/arena.hpp"
#include "wahl/blowup.hpp"

namespace wahl {

struct parse_error : std::runtime_error {
    int line;
    int column;
    parse_error(int l, int c, const std::string& what)
        : std::runtime_error("line " + std::to_string(l) + ", col " +
                             std::to_string(c) + ": " + what),
          line(l), column(c) {}
};

struct DeclaredChain {
    WahlParams params;
    std::vector<Int> bracket;
};

struct BoxExample {
    int id = 0;
    std::string arena_name;
    long long target_k2 = 0;
    std::vector<std::string> configuration;
    std::vector<BlowupDirective> directives;
    std::vector<DeclaredChain> chains;
};

// Parse an arena description. The grammar is line based:
//   arena NAME
//   ambient k2=INT chi=INT pg=INT q=INT
//   curve NAME self=INT [nodes=INT] [tags=a,b,...]
//   point [NAME =] CURVE[:MULT] CURVE[:MULT] ...
// '#' starts a comment. The result passes validate().
Arena parse_arena(const std::string& text);

// Parse a boxed example:
//   box ID
//   arena NAME
//   k2 INT
//   configuration NAME NAME ...
//   blowup [EXC :=] A ^ B [^ C ...]
//   blowup [a1,...,an] x A ^ B
//   chain (n,a) : [b1,...,bs]
// ASCII '^' and 'x' are canonical; the aliases U+2229 and U+00D7 are
// accepted. Chain brackets are checked against wahl_chain(n,a) at parse
// time. Configuration lines may repeat and accumulate.
BoxExample parse_box(const std::string& text);

// Canonical ASCII serialization; parse_box(print_box(x)) == x.
std::string print_box(const BoxExample& box);

bool operator==(const BoxExample& a, const BoxExample& b);

// Helpers for the JSON report (full certificate emission lives with the
// certify module, which owns the Certificate type).
std::string json_int(const Int& v);   // decimal string when |v| >= 2^53
std::string read_file(const std::string& path);

} // namespace wahl
