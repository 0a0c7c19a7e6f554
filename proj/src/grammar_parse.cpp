#include <map>
#include <regex>
#include <set>

#include "lw/grammar.hpp"
#include "lw/scan.hpp"

namespace lw {

namespace {

RhsPtr node(RhsExpr e) { return std::make_shared<const RhsExpr>(std::move(e)); }

} // namespace

RhsPtr make_terminal(std::string lit, SourcePos pos) {
    RhsExpr e;
    e.kind = RhsExpr::Kind::Terminal;
    e.text = std::move(lit);
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_nonterminal(std::string target, std::optional<std::string> label, SourcePos pos) {
    RhsExpr e;
    e.kind = RhsExpr::Kind::NonterminalRef;
    e.text = std::move(target);
    e.attr_label = std::move(label);
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_token_ref(std::string token, std::optional<std::string> label, SourcePos pos) {
    RhsExpr e;
    e.kind = RhsExpr::Kind::TokenRef;
    e.text = std::move(token);
    e.attr_label = std::move(label);
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_sequence(std::vector<RhsPtr> elems, SourcePos pos) {
    if (elems.size() == 1) return elems[0];
    RhsExpr e;
    e.kind = RhsExpr::Kind::Sequence;
    e.children = std::move(elems);
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_choice(std::vector<RhsPtr> alts, SourcePos pos) {
    if (alts.size() == 1) return alts[0];
    RhsExpr e;
    e.kind = RhsExpr::Kind::OrderedChoice;
    e.children = std::move(alts);
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_repetition(RhsPtr inner, int min, SourcePos pos) {
    RhsExpr e;
    e.kind = RhsExpr::Kind::Repetition;
    e.children.push_back(std::move(inner));
    e.rep_min = min;
    e.pos = std::move(pos);
    return node(std::move(e));
}

RhsPtr make_optional(RhsPtr inner, SourcePos pos) {
    RhsExpr e;
    e.kind = RhsExpr::Kind::Optional;
    e.children.push_back(std::move(inner));
    e.pos = std::move(pos);
    return node(std::move(e));
}

std::string flavor_name(Flavor f) {
    switch (f) {
        case Flavor::Normal: return "normal";
        case Flavor::Abstract: return "abstract";
        case Flavor::Interface: return "interface";
        case Flavor::External: return "external";
    }
    return "?";
}

const std::vector<TokenRule>& builtin_tokens() {
    static const std::vector<TokenRule> builtins = {
        {"ID", "[A-Za-z_][A-Za-z0-9_]*", {}},
        {"INT", "[0-9]+", {}},
        {"STRING", "\"([^\"\\\\\\n]|\\\\.)*\"", {}},
    };
    return builtins;
}

bool is_builtin_token(const std::string& name) {
    for (const auto& t : builtin_tokens())
        if (t.name == name) return true;
    return false;
}

const ProductionRule* GrammarModel::find_production(const std::string& n) const {
    for (const auto& p : productions)
        if (p.name == n) return &p;
    return nullptr;
}

const TokenRule* GrammarModel::find_token(const std::string& n) const {
    for (const auto& t : tokens)
        if (t.name == n) return &t;
    return nullptr;
}

std::optional<std::string> GrammarModel::effective_start() const {
    if (start_production) return start_production;
    for (const auto& p : productions)
        if (p.flavor == Flavor::Normal) return p.name;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// parse_grammar
// ---------------------------------------------------------------------------

namespace {

class GrammarParser {
public:
    GrammarParser(const std::string& text, const std::string& path) : scan_(text, path) {}

    Result<GrammarModel> run() {
        parse_file();
        if (failed_ || has_error(findings_)) return Result<GrammarModel>::failure(std::move(findings_));
        classify_token_refs();
        Result<GrammarModel> r;
        r.value = std::move(model_);
        r.findings = std::move(findings_);
        return r;
    }

private:
    TextScanner scan_;
    GrammarModel model_;
    std::vector<Finding> findings_;
    bool failed_ = false;

    void fail(const std::string& expected) {
        if (!failed_) findings_.push_back(scan_.syntax_error(expected));
        failed_ = true;
    }

    void parse_file() {
        std::optional<std::string> package_header;
        if (scan_.accept("package")) {
            auto pkg = scan_.accept_dotted_name();
            if (!pkg || !scan_.accept(";")) return fail("package name followed by ';'");
            package_header = *pkg;
        }
        if (!scan_.accept("grammar")) return fail("'grammar'");
        auto name = scan_.accept_dotted_name();
        if (!name) return fail("grammar name");
        model_.name = grammar_name_from(*name);
        if (package_header) {
            if (!model_.name.package_path.empty()) {
                findings_.push_back(error_at("PackageConflict",
                                             "grammar name is already package-qualified but a package "
                                             "header is also present",
                                             scan_.here()));
            } else {
                model_.name.package_path = split_dotted(*package_header);
            }
        }
        if (scan_.accept("extends")) {
            auto parent = scan_.accept_dotted_name();
            if (!parent) return fail("parent grammar name after 'extends'");
            model_.extends_grammar = grammar_name_from(*parent);
            if (model_.extends_grammar->qualified() == model_.name.qualified())
                findings_.push_back(
                    error_at("SelfExtends", "grammar extends itself: " + model_.name.qualified(),
                             scan_.here()));
        }
        if (!scan_.accept("{")) return fail("'{'");
        while (!failed_ && !scan_.peek("}")) {
            if (scan_.at_end()) return fail("'}'");
            parse_item();
        }
        if (!failed_ && !scan_.accept("}")) return fail("'}'");
        finish_checks();
    }

    void parse_item() {
        SourcePos item_pos = scan_.here();
        if (scan_.accept("token")) return parse_token_rule(item_pos);
        if (scan_.accept("external")) {
            auto n = scan_.accept_identifier();
            if (!n) return fail("external production name");
            ProductionRule p;
            p.name = *n;
            p.flavor = Flavor::External;
            p.pos = item_pos;
            // Tolerate heritage/body so the flavor invariant yields a finding.
            parse_heritage(p);
            if (scan_.peek("=")) parse_body(p);
            if (!scan_.accept(";")) return fail("';'");
            check_flavor(p);
            add_production(std::move(p));
            return;
        }
        if (scan_.accept("interface")) {
            auto n = scan_.accept_identifier();
            if (!n) return fail("interface production name");
            ProductionRule p;
            p.name = *n;
            p.flavor = Flavor::Interface;
            p.pos = item_pos;
            parse_heritage(p);
            if (scan_.peek("=")) parse_body(p);
            if (!scan_.accept(";")) return fail("';'");
            check_flavor(p);
            add_production(std::move(p));
            return;
        }
        bool is_start = false;
        bool is_abstract = false;
        if (scan_.accept("start")) {
            is_start = true;
            // Standalone form: start <Name> ; names a possibly inherited rule.
            auto n = scan_.accept_identifier();
            if (!n) return fail("production name after 'start'");
            if (scan_.accept(";")) {
                set_start(*n, item_pos);
                return;
            }
            return parse_production(*n, is_start, is_abstract, item_pos);
        }
        if (scan_.accept("abstract")) is_abstract = true;
        auto n = scan_.accept_identifier();
        if (!n) return fail("production name");
        parse_production(*n, is_start, is_abstract, item_pos);
    }

    void parse_token_rule(SourcePos pos) {
        auto n = scan_.accept_identifier();
        if (!n) return fail("token name");
        if (!scan_.accept("=")) return fail("'=' in token rule");
        auto pattern = scan_.accept_string(findings_);
        if (!pattern) return fail("token pattern string");
        if (!scan_.accept(";")) return fail("';'");

        TokenRule t{*n, *pattern, pos};
        if (is_builtin_token(t.name)) {
            findings_.push_back(
                error_at("BuiltinTokenRedefined", "token '" + t.name + "' is predeclared", pos));
            return;
        }
        for (const auto& other : model_.tokens) {
            if (other.name == t.name) {
                findings_.push_back(
                    error_at("DuplicateToken", "token '" + t.name + "' is already defined", pos));
                return;
            }
        }
        try {
            std::regex re(t.pattern, std::regex_constants::ECMAScript);
            std::smatch m;
            const std::string empty;
            if (std::regex_search(empty, m, re, std::regex_constants::match_continuous))
                findings_.push_back(error_at(
                    "BadTokenPattern", "token '" + t.name + "' pattern accepts the empty string", pos));
        } catch (const std::regex_error& e) {
            findings_.push_back(error_at(
                "BadTokenPattern", "token '" + t.name + "' pattern does not compile: " + e.what(), pos));
        }
        model_.tokens.push_back(std::move(t));
    }

    void parse_production(const std::string& name, bool is_start, bool is_abstract, SourcePos pos) {
        ProductionRule p;
        p.name = name;
        p.flavor = is_abstract ? Flavor::Abstract : Flavor::Normal;
        p.pos = pos;
        parse_heritage(p);
        if (scan_.peek("=")) parse_body(p);
        if (failed_) return;
        if (!scan_.accept(";")) return fail("';'");
        check_flavor(p);
        if (is_start) set_start(p.name, pos);
        add_production(std::move(p));
    }

    void parse_heritage(ProductionRule& p) {
        if (scan_.accept("extends")) {
            auto t = scan_.accept_identifier();
            if (!t) return fail("production name after 'extends'");
            p.extends_production = *t;
        }
        if (scan_.accept("implements")) {
            do {
                auto t = scan_.accept_identifier();
                if (!t) return fail("interface name after 'implements'");
                p.implements_list.push_back(*t);
            } while (scan_.accept(","));
        }
    }

    void parse_body(ProductionRule& p) {
        scan_.accept("=");
        p.rhs = parse_choice();
    }

    RhsPtr parse_choice() {
        SourcePos pos = scan_.here();
        std::vector<RhsPtr> alts;
        alts.push_back(parse_sequence());
        while (!failed_ && scan_.accept("|")) alts.push_back(parse_sequence());
        if (failed_) return nullptr;
        return make_choice(std::move(alts), pos);
    }

    RhsPtr parse_sequence() {
        SourcePos pos = scan_.here();
        std::vector<RhsPtr> elems;
        while (!failed_ && !scan_.peek(";") && !scan_.peek(")") && !scan_.peek("|") &&
               !scan_.at_end()) {
            elems.push_back(parse_element());
        }
        if (failed_) return nullptr;
        if (elems.empty()) {
            // Epsilon alternative.
            RhsExpr e;
            e.kind = RhsExpr::Kind::Sequence;
            e.pos = pos;
            return std::make_shared<const RhsExpr>(std::move(e));
        }
        return make_sequence(std::move(elems), pos);
    }

    RhsPtr parse_element() {
        RhsPtr atom = parse_atom();
        while (!failed_ && atom) {
            SourcePos pos = scan_.here();
            if (scan_.accept("*"))
                atom = make_repetition(std::move(atom), 0, pos);
            else if (scan_.accept("+"))
                atom = make_repetition(std::move(atom), 1, pos);
            else if (scan_.accept("?"))
                atom = make_optional(std::move(atom), pos);
            else
                break;
        }
        return atom;
    }

    RhsPtr parse_atom() {
        SourcePos pos = scan_.here();
        if (scan_.peek("\"")) {
            auto lit = scan_.accept_string(findings_);
            if (!lit) {
                failed_ = true;
                return nullptr;
            }
            if (lit->empty()) {
                findings_.push_back(error_at("SyntaxError", "terminal literal must be nonempty", pos));
                failed_ = true;
                return nullptr;
            }
            return make_terminal(*lit, pos);
        }
        if (scan_.accept("(")) {
            RhsPtr inner = parse_choice();
            if (failed_) return nullptr;
            if (!scan_.accept(")")) {
                fail("')'");
                return nullptr;
            }
            return inner;
        }
        auto first = scan_.accept_dotted_name();
        if (!first) {
            fail("terminal, reference, or '('");
            return nullptr;
        }
        if (scan_.accept(":")) {
            if (first->find('.') != std::string::npos) {
                findings_.push_back(
                    error_at("SyntaxError", "attribute label must be a simple identifier", pos));
                failed_ = true;
                return nullptr;
            }
            auto target = scan_.accept_dotted_name();
            if (!target) {
                fail("reference after ':'");
                return nullptr;
            }
            return make_nonterminal(*target, *first, pos);
        }
        return make_nonterminal(*first, std::nullopt, pos);
    }

    void set_start(const std::string& name, SourcePos pos) {
        if (model_.start_production) {
            findings_.push_back(error_at("MultipleStart",
                                         "start production is already set to '" +
                                             *model_.start_production + "'",
                                         pos));
            return;
        }
        model_.start_production = name;
    }

    void add_production(ProductionRule p) {
        for (const auto& other : model_.productions) {
            if (other.name == p.name) {
                findings_.push_back(error_at(
                    "DuplicateProduction", "production '" + p.name + "' is already defined", p.pos));
                return;
            }
        }
        model_.productions.push_back(std::move(p));
    }

    void check_flavor(ProductionRule& p) {
        switch (p.flavor) {
            case Flavor::External:
                if (p.rhs || p.extends_production || !p.implements_list.empty())
                    findings_.push_back(error_at(
                        "ExternalWithBody",
                        "external production '" + p.name + "' cannot have a body or heritage", p.pos));
                break;
            case Flavor::Interface:
                if (p.rhs)
                    findings_.push_back(error_at(
                        "InterfaceWithBody",
                        "interface production '" + p.name + "' cannot define concrete syntax", p.pos));
                break;
            case Flavor::Normal:
            case Flavor::Abstract:
                if (!p.rhs)
                    findings_.push_back(error_at(
                        "MissingBody", flavor_name(p.flavor) + " production '" + p.name +
                                           "' needs a right-hand side",
                        p.pos));
                break;
        }
    }

    void finish_checks() {
        if (failed_) return;
        if (model_.start_production && !model_.name.simple_name.empty()) {
            // Standalone directives may point at inherited rules; a marker on
            // an owned production always resolves. Nothing to check here when
            // the grammar has an extends clause.
            if (!model_.extends_grammar && !model_.find_production(*model_.start_production))
                findings_.push_back(error_at("UnknownStartProduction",
                                             "start production '" + *model_.start_production +
                                                 "' is not defined in this grammar",
                                             scan_.here()));
        }
    }

    // Rewrites NonterminalRef nodes whose target names a token rule of this
    // grammar (or a built-in) into TokenRef nodes. References to parent
    // grammar tokens stay NonterminalRef and are resolved by the engine.
    void classify_token_refs() {
        std::set<std::string> token_names;
        for (const auto& t : builtin_tokens()) token_names.insert(t.name);
        for (const auto& t : model_.tokens) token_names.insert(t.name);
        for (auto& p : model_.productions)
            if (p.rhs) p.rhs = reclassify(p.rhs, token_names);
    }

    static RhsPtr reclassify(const RhsPtr& e, const std::set<std::string>& tokens) {
        if (e->kind == RhsExpr::Kind::NonterminalRef) {
            if (tokens.count(e->text)) {
                RhsExpr t = *e;
                t.kind = RhsExpr::Kind::TokenRef;
                return std::make_shared<const RhsExpr>(std::move(t));
            }
            return e;
        }
        if (e->children.empty()) return e;
        bool changed = false;
        std::vector<RhsPtr> kids;
        kids.reserve(e->children.size());
        for (const auto& c : e->children) {
            RhsPtr n = reclassify(c, tokens);
            changed = changed || n != c;
            kids.push_back(std::move(n));
        }
        if (!changed) return e;
        RhsExpr copy = *e;
        copy.children = std::move(kids);
        return std::make_shared<const RhsExpr>(std::move(copy));
    }
};

} // namespace

Result<GrammarModel> parse_grammar(const std::string& text, const std::string& artifact_path) {
    return GrammarParser(text, artifact_path).run();
}

} // namespace lw
