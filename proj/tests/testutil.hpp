#ifndef LW_TESTUTIL_HPP
#define LW_TESTUTIL_HPP

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lw/demo.hpp"
#include "lw/render.hpp"

namespace lwtest {

namespace fs = std::filesystem;
using namespace lw;

inline std::string fixtures_dir() { return LW_FIXTURES_DIR; }
inline std::string cli_path() { return LW_CLI_PATH; }

inline std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline GrammarRepository fixture_repo() { return GrammarRepository({fixtures_dir()}); }

inline GrammarModel parse_fixture_grammar(const std::string& rel) {
    std::string path = fixtures_dir() + "/" + rel;
    Result<GrammarModel> r = parse_grammar(read_file_or_throw(path), path);
    if (!r.ok()) {
        std::string msg = "fixture grammar " + rel + " failed to parse:";
        for (const auto& f : r.findings) msg += "\n  " + render_finding(f);
        throw std::runtime_error(msg);
    }
    return std::move(*r.value);
}

inline ModelingLanguageDef load_fixture_member(const std::string& lcfg_rel,
                                               Registries& registries) {
    demo::register_demo_languages(registries);
    std::string path = fixtures_dir() + "/" + lcfg_rel;
    Result<LanguageConfiguration> cfg =
        parse_language_configuration(read_file_or_throw(path), path);
    if (!cfg.ok()) throw std::runtime_error("fixture lcfg " + lcfg_rel + " failed to parse");
    GrammarRepository repo = fixture_repo();
    Result<ModelingLanguageDef> member = assemble_member(*cfg.value, repo.loader(), registries);
    if (!member.ok()) {
        std::string msg = "member " + lcfg_rel + " failed to assemble:";
        for (const auto& f : member.findings) msg += "\n  " + render_finding(f);
        throw std::runtime_error(msg);
    }
    return std::move(*member.value);
}

/// Scratch directory removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("lwtest-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.generic_string(); }
};

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the lw binary through the shell with stdout/stderr captured
/// separately.
inline CliResult run_cli(const std::string& args, const std::string& cwd = "") {
    TempDir capture;
    std::string out_path = capture.str() + "/out";
    std::string err_path = capture.str() + "/err";
    std::string cmd;
    if (!cwd.empty()) cmd += "cd '" + cwd + "' && ";
    cmd += "'" + cli_path() + "' " + args + " >'" + out_path + "' 2>'" + err_path + "'";
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
    r.out = read_file_or_throw(out_path);
    r.err = read_file_or_throw(err_path);
    return r;
}

// ---------------------------------------------------------------------------
// Random sentence generation over composed grammars
// ---------------------------------------------------------------------------

/// Generates random sentences by walking a composed grammar's dispatch
/// lists. Token texts come from the sample table; external productions are
/// never generated. Deterministic for a fixed seed.
class SentenceGenerator {
public:
    SentenceGenerator(const ComposedGrammar& g, std::uint32_t seed)
        : g_(g), rng_(seed) {
        samples_["ID"] = {"alpha", "beta", "gamma", "delta", "sensor", "value7", "handler"};
        samples_["INT"] = {"0", "7", "42", "64"};
        samples_["STRING"] = {"\"text\""};
        samples_["QN"] = {"alpha", "beta.gamma", "de.se.sensor", "value7"};
        samples_["DIR"] = {"in", "out"};
        samples_["MOD"] = {"public", "private", "protected"};
        compute_costs();
    }

    void set_samples(const std::string& token, std::vector<std::string> samples) {
        samples_[token] = std::move(samples);
    }

    /// A random sentence whose production nesting stays within max_depth.
    std::optional<std::string> generate(const std::string& start, int max_depth) {
        toks_.clear();
        if (!gen_ref(start, max_depth)) return std::nullopt;
        std::string out;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (i) out += ' ';
            out += toks_[i];
        }
        return out;
    }

private:
    static constexpr int kInf = 1 << 20;

    const ComposedGrammar& g_;
    std::mt19937 rng_;
    std::map<std::string, std::vector<std::string>> samples_;
    std::map<std::string, int> prod_cost_; // by qualified key
    std::vector<std::string> toks_;

    std::size_t pick(std::size_t n) { return rng_() % n; }

    int expr_cost(const RhsExpr& e) const {
        switch (e.kind) {
            case RhsExpr::Kind::Terminal:
            case RhsExpr::Kind::TokenRef:
                return 0;
            case RhsExpr::Kind::NonterminalRef: return ref_cost(e.text);
            case RhsExpr::Kind::Sequence: {
                int m = 0;
                for (const auto& c : e.children) m = std::max(m, expr_cost(*c));
                return m;
            }
            case RhsExpr::Kind::OrderedChoice: {
                int m = kInf;
                for (const auto& c : e.children) m = std::min(m, expr_cost(*c));
                return m;
            }
            case RhsExpr::Kind::Repetition:
                return e.rep_min == 0 ? 0 : expr_cost(*e.children[0]);
            case RhsExpr::Kind::Optional: return 0;
        }
        return kInf;
    }

    int ref_cost(const std::string& name) const {
        if (g_.find_token(name)) return 0;
        int m = kInf;
        for (const ProdEntry* cand : g_.dispatch_for(name)) {
            auto it = prod_cost_.find(cand->qualified_key);
            if (it != prod_cost_.end()) m = std::min(m, it->second);
        }
        return m;
    }

    void compute_costs() {
        for (const auto& [key, entry] : g_.production_table) prod_cost_[key] = kInf;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [key, entry] : g_.production_table) {
                if (!entry.rule.rhs) continue;
                int c = expr_cost(*entry.rule.rhs);
                if (c < kInf && c + 1 < prod_cost_[key]) {
                    prod_cost_[key] = c + 1;
                    changed = true;
                }
            }
        }
    }

    std::string sample(const std::string& token) {
        auto it = samples_.find(token);
        if (it == samples_.end() || it->second.empty()) return "x";
        return it->second[pick(it->second.size())];
    }

    bool gen_ref(const std::string& name, int budget) {
        if (g_.find_token(name)) {
            toks_.push_back(sample(name));
            return true;
        }
        std::vector<const ProdEntry*> candidates = g_.dispatch_for(name);
        if (candidates.empty()) return false;
        std::vector<const ProdEntry*> viable;
        for (const ProdEntry* c : candidates)
            if (prod_cost_.at(c->qualified_key) <= budget) viable.push_back(c);
        const ProdEntry* chosen;
        if (!viable.empty()) {
            chosen = viable[pick(viable.size())];
        } else {
            chosen = *std::min_element(candidates.begin(), candidates.end(),
                                       [&](const ProdEntry* a, const ProdEntry* b) {
                                           return prod_cost_.at(a->qualified_key) <
                                                  prod_cost_.at(b->qualified_key);
                                       });
            if (prod_cost_.at(chosen->qualified_key) >= kInf) return false;
        }
        return gen_expr(*chosen->rule.rhs, budget - 1);
    }

    bool gen_expr(const RhsExpr& e, int budget) {
        switch (e.kind) {
            case RhsExpr::Kind::Terminal:
                toks_.push_back(e.text);
                return true;
            case RhsExpr::Kind::TokenRef:
                toks_.push_back(sample(e.text));
                return true;
            case RhsExpr::Kind::NonterminalRef:
                return gen_ref(e.text, budget);
            case RhsExpr::Kind::Sequence:
                for (const auto& c : e.children)
                    if (!gen_expr(*c, budget)) return false;
                return true;
            case RhsExpr::Kind::OrderedChoice: {
                std::vector<const RhsExpr*> viable;
                for (const auto& c : e.children)
                    if (expr_cost(*c) <= budget) viable.push_back(c.get());
                if (viable.empty()) {
                    const RhsExpr* best = nullptr;
                    for (const auto& c : e.children)
                        if (!best || expr_cost(*c) < expr_cost(*best)) best = c.get();
                    return best && expr_cost(*best) < kInf && gen_expr(*best, budget);
                }
                return gen_expr(*viable[pick(viable.size())], budget);
            }
            case RhsExpr::Kind::Repetition: {
                int n = e.rep_min;
                if (expr_cost(*e.children[0]) <= budget) n += static_cast<int>(pick(3));
                for (int i = 0; i < n; ++i)
                    if (!gen_expr(*e.children[0], budget)) return false;
                return true;
            }
            case RhsExpr::Kind::Optional:
                if (expr_cost(*e.children[0]) <= budget && pick(2) == 0)
                    return gen_expr(*e.children[0], budget);
                return true;
        }
        return false;
    }
};

} // namespace lwtest

#endif
