#include <sstream>

#include "lw/grammar.hpp"

namespace lw {

namespace {

std::string escape_literal(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

enum class Ctx { Choice, Sequence, Postfix };

void print_expr(const RhsExpr& e, Ctx ctx, std::ostream& os) {
    switch (e.kind) {
        case RhsExpr::Kind::Terminal:
            os << '"' << escape_literal(e.text) << '"';
            return;
        case RhsExpr::Kind::NonterminalRef:
        case RhsExpr::Kind::TokenRef:
            if (e.attr_label) os << *e.attr_label << ':';
            os << e.text;
            return;
        case RhsExpr::Kind::Sequence: {
            bool parens = ctx == Ctx::Postfix || (ctx == Ctx::Sequence && e.children.empty());
            if (parens) os << '(';
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) os << ' ';
                print_expr(*e.children[i], Ctx::Sequence, os);
            }
            if (parens) os << ')';
            return;
        }
        case RhsExpr::Kind::OrderedChoice: {
            bool parens = ctx != Ctx::Choice;
            if (parens) os << '(';
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) os << " | ";
                print_expr(*e.children[i], Ctx::Sequence, os);
            }
            if (parens) os << ')';
            return;
        }
        case RhsExpr::Kind::Repetition:
            print_expr(*e.children[0], Ctx::Postfix, os);
            os << (e.rep_min == 0 ? '*' : '+');
            return;
        case RhsExpr::Kind::Optional:
            print_expr(*e.children[0], Ctx::Postfix, os);
            os << '?';
            return;
    }
}

} // namespace

std::string print_rhs(const RhsExpr& e) {
    std::ostringstream os;
    print_expr(e, Ctx::Choice, os);
    return os.str();
}

std::string print_grammar(const GrammarModel& g) {
    std::ostringstream os;
    os << "grammar " << g.name.qualified();
    if (g.extends_grammar) os << " extends " << g.extends_grammar->qualified();
    os << " {\n";
    bool start_is_owned = g.start_production && g.find_production(*g.start_production);
    if (g.start_production && !start_is_owned) os << "  start " << *g.start_production << " ;\n";
    for (const auto& t : g.tokens)
        os << "  token " << t.name << " = \"" << escape_literal(t.pattern) << "\" ;\n";
    for (const auto& p : g.productions) {
        os << "  ";
        if (start_is_owned && p.name == *g.start_production) os << "start ";
        switch (p.flavor) {
            case Flavor::Abstract: os << "abstract "; break;
            case Flavor::Interface: os << "interface "; break;
            case Flavor::External: os << "external "; break;
            case Flavor::Normal: break;
        }
        os << p.name;
        if (p.extends_production) os << " extends " << *p.extends_production;
        if (!p.implements_list.empty()) {
            os << " implements ";
            for (std::size_t i = 0; i < p.implements_list.size(); ++i) {
                if (i) os << ", ";
                os << p.implements_list[i];
            }
        }
        if (p.rhs) os << " = " << print_rhs(*p.rhs);
        os << " ;\n";
    }
    os << "}\n";
    return os.str();
}

bool structurally_equal(const RhsExpr& a, const RhsExpr& b) {
    if (a.kind != b.kind || a.text != b.text || a.attr_label != b.attr_label ||
        a.rep_min != b.rep_min || a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

bool structurally_equal(const ProductionRule& a, const ProductionRule& b) {
    if (a.name != b.name || a.flavor != b.flavor || a.extends_production != b.extends_production ||
        a.implements_list != b.implements_list)
        return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    return !a.rhs || structurally_equal(*a.rhs, *b.rhs);
}

bool structurally_equal(const GrammarModel& a, const GrammarModel& b) {
    if (a.name != b.name || a.extends_grammar != b.extends_grammar ||
        a.start_production != b.start_production)
        return false;
    if (a.productions.size() != b.productions.size() || a.tokens.size() != b.tokens.size())
        return false;
    for (std::size_t i = 0; i < a.tokens.size(); ++i)
        if (a.tokens[i].name != b.tokens[i].name || a.tokens[i].pattern != b.tokens[i].pattern)
            return false;
    for (std::size_t i = 0; i < a.productions.size(); ++i)
        if (!structurally_equal(a.productions[i], b.productions[i])) return false;
    return true;
}

} // namespace lw
