#include "rehab/dsl.hpp"

#include <charconv>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "rehab/numfmt.hpp"

namespace rehab {

namespace {

enum class TokKind {
    Ident,
    Number,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Equals,
    End,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    double value = 0.0;  // Number only
    int line = 1;
    int col = 1;
};

bool is_reserved(const std::string& s) {
    static const std::set<std::string> kReserved = {
        "INPUT", "OUTPUT", "RULE", "IF", "IS", "NOT", "AND", "OR", "THEN", "weight"};
    return kReserved.count(s) != 0;
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_blank();
        Token tok;
        tok.line = line_;
        tok.col = col_;
        if (pos_ >= text_.size()) {
            tok.kind = TokKind::End;
            return tok;
        }
        const char c = text_[pos_];
        switch (c) {
            case '[': return punct(tok, TokKind::LBracket);
            case ']': return punct(tok, TokKind::RBracket);
            case '{': return punct(tok, TokKind::LBrace);
            case '}': return punct(tok, TokKind::RBrace);
            case '(': return punct(tok, TokKind::LParen);
            case ')': return punct(tok, TokKind::RParen);
            case ',': return punct(tok, TokKind::Comma);
            case '=': return punct(tok, TokKind::Equals);
            default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.kind = TokKind::Ident;
            while (pos_ < text_.size()) {
                const char d = text_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    tok.text.push_back(d);
                    advance();
                } else {
                    break;
                }
            }
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
            c == '.') {
            return lex_number(tok);
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    Token punct(Token tok, TokKind kind) {
        tok.kind = kind;
        tok.text = text_[pos_];
        advance();
        return tok;
    }

    Token lex_number(Token tok) {
        tok.kind = TokKind::Number;
        std::size_t start = pos_;
        if (text_[pos_] == '+' || text_[pos_] == '-') advance();
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '.')) {
            advance();
        }
        if ((pos_ < text_.size()) && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                advance();
            }
            if (pos_ < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    advance();
                }
            } else {
                // 'e' not followed by an exponent: not part of this number
                pos_ = mark;
                col_ = tok.col + static_cast<int>(mark - start);
            }
        }
        tok.text = text_.substr(start, pos_ - start);
        const char* first = tok.text.c_str();
        if (*first == '+') ++first;
        const char* last = tok.text.c_str() + tok.text.size();
        const auto res = std::from_chars(first, last, tok.value);
        if (res.ec != std::errc() || res.ptr != last) {
            throw ParseError(tok.line, tok.col, "malformed number '" + tok.text + "'");
        }
        return tok;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { shift(); }

    RuleBase parse() {
        while (cur_.kind != TokKind::End) {
            if (cur_.kind != TokKind::Ident) {
                fail(cur_, "expected INPUT, OUTPUT, or RULE");
            }
            if (cur_.text == "INPUT") {
                shift();
                parse_decl(false);
            } else if (cur_.text == "OUTPUT") {
                shift();
                parse_decl(true);
            } else if (cur_.text == "RULE") {
                shift();
                parse_rule();
            } else {
                fail(cur_, "expected INPUT, OUTPUT, or RULE, got '" + cur_.text + "'");
            }
        }
        if (!have_output_) {
            fail(cur_, "missing OUTPUT declaration");
        }
        return std::move(rb_);
    }

private:
    void shift() { cur_ = lexer_.next(); }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw ParseError(at.line, at.col, msg);
    }

    Token expect(TokKind kind, const std::string& what) {
        if (cur_.kind != kind) {
            fail(cur_, "expected " + what + ", got '" +
                           (cur_.kind == TokKind::End ? "end of file" : cur_.text) + "'");
        }
        Token tok = cur_;
        shift();
        return tok;
    }

    Token expect_name(const std::string& what) {
        Token tok = expect(TokKind::Ident, what);
        if (is_reserved(tok.text)) {
            fail(tok, "'" + tok.text + "' is a reserved word");
        }
        return tok;
    }

    void expect_keyword(const std::string& kw) {
        if (cur_.kind != TokKind::Ident || cur_.text != kw) {
            fail(cur_, "expected '" + kw + "', got '" +
                           (cur_.kind == TokKind::End ? "end of file" : cur_.text) + "'");
        }
        shift();
    }

    bool at_keyword(const std::string& kw) const {
        return cur_.kind == TokKind::Ident && cur_.text == kw;
    }

    void parse_decl(bool is_output) {
        const Token name = expect_name("variable name");
        if (rb_.find_input(name.text) != nullptr ||
            (have_output_ && rb_.output.name == name.text)) {
            fail(name, "duplicate variable name '" + name.text + "'");
        }
        if (is_output && have_output_) {
            fail(name, "duplicate OUTPUT declaration (only one allowed)");
        }

        LinguisticVariable var;
        var.name = name.text;
        expect(TokKind::LBracket, "'['");
        const Token lo = expect(TokKind::Number, "universe lower bound");
        expect(TokKind::Comma, "','");
        const Token hi = expect(TokKind::Number, "universe upper bound");
        expect(TokKind::RBracket, "']'");
        if (!(lo.value < hi.value)) {
            fail(lo, "universe must satisfy lo < hi");
        }
        var.lo = lo.value;
        var.hi = hi.value;

        expect(TokKind::LBrace, "'{'");
        while (cur_.kind != TokKind::RBrace) {
            const Token label = expect_name("term label");
            if (var.find_term(label.text) != nullptr) {
                fail(label, "duplicate term label '" + label.text + "'");
            }
            expect(TokKind::LParen, "'('");
            const Token a = expect(TokKind::Number, "triangle alpha");
            expect(TokKind::Comma, "','");
            const Token b = expect(TokKind::Number, "triangle beta");
            expect(TokKind::Comma, "','");
            const Token c = expect(TokKind::Number, "triangle gamma");
            expect(TokKind::RParen, "')'");
            if (!(a.value <= b.value && b.value <= c.value)) {
                fail(a, "triangle must satisfy alpha <= beta <= gamma");
            }
            if (c.value < var.lo || a.value > var.hi) {
                fail(a, "triangle does not intersect the universe");
            }
            var.terms.push_back({label.text, {a.value, b.value, c.value}});
        }
        const Token close = expect(TokKind::RBrace, "'}'");
        if (var.terms.empty()) {
            fail(close, "variable '" + var.name + "' declares no terms");
        }
        if (is_output) {
            rb_.output = std::move(var);
            have_output_ = true;
        } else {
            rb_.inputs.push_back(std::move(var));
        }
    }

    Clause parse_clause() {
        const Token name = expect_name("variable name");
        const LinguisticVariable* var = rb_.find_input(name.text);
        if (var == nullptr) {
            if (have_output_ && rb_.output.name == name.text) {
                fail(name, "output variable '" + name.text +
                               "' cannot appear in an antecedent");
            }
            fail(name, "unknown variable '" + name.text + "'");
        }
        expect_keyword("IS");
        Clause clause;
        clause.variable = name.text;
        if (at_keyword("NOT")) {
            shift();
            clause.negated = true;
        }
        const Token label = expect_name("term label");
        if (var->find_term(label.text) == nullptr) {
            fail(label, "variable '" + name.text + "' has no term '" + label.text + "'");
        }
        clause.term = label.text;
        return clause;
    }

    void parse_rule() {
        Rule rule;
        if (cur_.kind == TokKind::LBracket) {
            shift();
            expect_keyword("weight");
            expect(TokKind::Equals, "'='");
            const Token w = expect(TokKind::Number, "weight value");
            expect(TokKind::RBracket, "']'");
            if (!(w.value >= 0.0 && w.value <= 1.0)) {
                fail(w, "weight outside [0,1]");
            }
            rule.weight = w.value;
        }
        expect_keyword("IF");

        std::vector<Clause> group{parse_clause()};
        while (true) {
            if (at_keyword("AND")) {
                shift();
                group.push_back(parse_clause());
            } else if (at_keyword("OR")) {
                shift();
                rule.or_groups.push_back(std::move(group));
                group = {parse_clause()};
            } else {
                break;
            }
        }
        rule.or_groups.push_back(std::move(group));

        expect_keyword("THEN");
        const Token out = expect_name("output variable name");
        if (!have_output_) {
            fail(out, "no OUTPUT variable declared before this rule");
        }
        if (out.text != rb_.output.name) {
            fail(out, "consequent variable '" + out.text + "' is not the OUTPUT variable");
        }
        expect_keyword("IS");
        const Token label = expect_name("output term label");
        if (rb_.output.find_term(label.text) == nullptr) {
            fail(label, "output has no term '" + label.text + "'");
        }
        rule.consequent_term = label.text;
        rb_.rules.push_back(std::move(rule));
    }

    Lexer lexer_;
    Token cur_;
    RuleBase rb_;
    bool have_output_ = false;
};

}  // namespace

RuleBase parse_rulebase(const std::string& text) {
    Parser parser(text);
    return parser.parse();
}

RuleBase load_rulebase_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open rule file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_rulebase(buf.str());
    } catch (Error& e) {
        e.add_context(path);
        throw;
    }
}

namespace {

void format_variable(std::string& out, const char* kw, const LinguisticVariable& var) {
    out += kw;
    out += ' ';
    out += var.name;
    out += " [" + format_double(var.lo) + ", " + format_double(var.hi) + "] {\n";
    for (const Term& t : var.terms) {
        out += "    " + t.label + "(" + format_double(t.mf.alpha) + ", " +
               format_double(t.mf.beta) + ", " + format_double(t.mf.gamma) + ")\n";
    }
    out += "}\n";
}

}  // namespace

std::string format_rulebase(const RuleBase& rb) {
    std::string out;
    for (const LinguisticVariable& var : rb.inputs) {
        format_variable(out, "INPUT", var);
        out += '\n';
    }
    format_variable(out, "OUTPUT", rb.output);
    if (!rb.rules.empty()) out += '\n';
    for (const Rule& rule : rb.rules) {
        out += "RULE ";
        if (rule.weight != 1.0) {
            out += "[weight=" + format_double(rule.weight) + "] ";
        }
        out += "IF ";
        bool first_group = true;
        for (const auto& group : rule.or_groups) {
            if (!first_group) out += " OR ";
            first_group = false;
            bool first_clause = true;
            for (const Clause& c : group) {
                if (!first_clause) out += " AND ";
                first_clause = false;
                out += c.variable + " IS " + (c.negated ? "NOT " : "") + c.term;
            }
        }
        out += " THEN " + rb.output.name + " IS " + rule.consequent_term + "\n";
    }
    return out;
}

namespace {

// Candidate abscissae where the extrema of piecewise-linear membership
// combinations can occur: universe endpoints, every in-range triangle
// breakpoint, and the midpoints between consecutive candidates.
std::vector<double> probe_points(const LinguisticVariable& var,
                                 const std::vector<const TriangularMF*>& mfs) {
    std::set<double> pts{var.lo, var.hi};
    for (const TriangularMF* mf : mfs) {
        for (double p : {mf->alpha, mf->beta, mf->gamma}) {
            if (p > var.lo && p < var.hi) pts.insert(p);
        }
    }
    std::vector<double> probes(pts.begin(), pts.end());
    const std::size_t n = probes.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        probes.push_back(0.5 * (probes[i] + probes[i + 1]));
    }
    return probes;
}

// True if some x in the universe gives every clause of `clauses` (all on
// `var`) a strictly positive degree. Exact for triangular memberships:
// positivity boundaries lie on breakpoints, so probing breakpoints and
// midpoints decides the question.
bool variable_clauses_satisfiable(const LinguisticVariable& var,
                                  const std::vector<const Clause*>& clauses) {
    std::vector<const TriangularMF*> mfs;
    mfs.reserve(clauses.size());
    for (const Clause* c : clauses) {
        const Term* term = var.find_term(c->term);
        if (term == nullptr) return false;
        mfs.push_back(&term->mf);
    }
    for (double x : probe_points(var, mfs)) {
        bool all_positive = true;
        for (std::size_t i = 0; i < clauses.size(); ++i) {
            double degree = mf_eval(*mfs[i], x);
            if (clauses[i]->negated) degree = negate(degree);
            if (degree <= 0.0) {
                all_positive = false;
                break;
            }
        }
        if (all_positive) return true;
    }
    return false;
}

}  // namespace

std::vector<Diagnostic> validate(const RuleBase& rb) {
    std::vector<Diagnostic> diags;

    auto report_gaps = [&diags](const LinguisticVariable& var) {
        for (const auto& [a, b] : coverage_gaps(var)) {
            diags.push_back({DiagnosticKind::CoverageGap,
                             "variable '" + var.name + "': no membership on [" +
                                 format_double(a) + ", " + format_double(b) + "]"});
        }
    };
    for (const LinguisticVariable& var : rb.inputs) report_gaps(var);
    report_gaps(rb.output);

    std::set<std::pair<std::string, std::string>> referenced;
    std::set<std::string> used_consequents;
    for (const Rule& rule : rb.rules) {
        for (const auto& group : rule.or_groups) {
            for (const Clause& c : group) {
                referenced.emplace(c.variable, c.term);
            }
        }
        used_consequents.insert(rule.consequent_term);
    }
    for (const LinguisticVariable& var : rb.inputs) {
        for (const Term& t : var.terms) {
            if (!referenced.count({var.name, t.label})) {
                diags.push_back({DiagnosticKind::UnreachableTerm,
                                 "term '" + t.label + "' of variable '" + var.name +
                                     "' is never referenced by a rule"});
            }
        }
    }
    for (const Term& t : rb.output.terms) {
        if (!used_consequents.count(t.label)) {
            diags.push_back({DiagnosticKind::UnreachableTerm,
                             "output term '" + t.label +
                                 "' is never used as a consequent"});
        }
    }

    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
        const Rule& rule = rb.rules[i];
        const std::string where = "rule " + std::to_string(i + 1);
        if (rule.weight == 0.0) {
            diags.push_back({DiagnosticKind::VacuousRule,
                             where + ": weight is 0 so it never fires"});
            continue;
        }
        bool any_group_satisfiable = false;
        for (const auto& group : rule.or_groups) {
            // Clauses on distinct variables vary independently; the group is
            // satisfiable iff each variable's own clause set is.
            std::map<std::string, std::vector<const Clause*>> by_var;
            for (const Clause& c : group) by_var[c.variable].push_back(&c);
            bool group_ok = true;
            for (const auto& [name, clauses] : by_var) {
                const LinguisticVariable* var = rb.find_input(name);
                if (var == nullptr || !variable_clauses_satisfiable(*var, clauses)) {
                    group_ok = false;
                    break;
                }
            }
            if (group_ok) {
                any_group_satisfiable = true;
                break;
            }
        }
        if (!any_group_satisfiable) {
            diags.push_back({DiagnosticKind::VacuousRule,
                             where + ": antecedent can never exceed 0"});
        }
    }
    return diags;
}

}  // namespace rehab
