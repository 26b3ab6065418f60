#pragma once

#include <string>
#include <vector>

#include "rehab/fuzzy.hpp"

namespace rehab {

// Rule file grammar (whitespace-insensitive, '#' comments, LF or CRLF):
//
//   INPUT  <name> [lo, hi] { <label>(a, b, c) ... }
//   OUTPUT <name> [lo, hi] { <label>(a, b, c) ... }
//   RULE [weight=w] IF <name> IS [NOT] <label>
//        (AND|OR <name> IS [NOT] <label>)* THEN <output> IS <label>
//
// Identifiers match [A-Za-z_][A-Za-z0-9_.]*; the dot keeps names like O.E_W
// legal. Exactly one OUTPUT per file; declarations precede the rules that
// use them. All structural violations raise ParseError with line/column.
RuleBase parse_rulebase(const std::string& text);

// Reads and parses a .frules file; errors gain the path as context.
RuleBase load_rulebase_file(const std::string& path);

// Canonical text: inputs in declaration order, then the output, then rules.
// parse(format(rb)) equals rb field for field.
std::string format_rulebase(const RuleBase& rb);

enum class DiagnosticKind {
    CoverageGap,       // part of a universe has no positive membership
    UnreachableTerm,   // term declared but never referenced by any rule
    VacuousRule,       // antecedent can never exceed 0, or weight is 0
};

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
};

// Non-fatal consistency review of a structurally valid rule base.
std::vector<Diagnostic> validate(const RuleBase& rb);

}  // namespace rehab
