#include <filesystem>
#include <fstream>
#include <sstream>

#include "lw/grammar.hpp"

namespace fs = std::filesystem;

namespace lw {

GrammarRepository::GrammarRepository(std::vector<std::string> search_roots)
    : roots_(std::move(search_roots)) {}

void GrammarRepository::add(GrammarModel g) {
    auto key = g.name.qualified();
    cache_[key] = std::make_shared<const GrammarModel>(std::move(g));
}

Result<GrammarModelPtr> GrammarRepository::load(const GrammarName& name) {
    const std::string key = name.qualified();
    if (auto it = cache_.find(key); it != cache_.end())
        return Result<GrammarModelPtr>::success(it->second);

    fs::path rel;
    for (const auto& seg : name.package_path) rel /= seg;
    rel /= name.simple_name + ".mcg";

    for (const auto& root : roots_) {
        fs::path candidate = fs::path(root) / rel;
        std::error_code ec;
        if (!fs::exists(candidate, ec)) continue;
        std::ifstream in(candidate, std::ios::binary);
        if (!in) continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        Result<GrammarModel> parsed = parse_grammar(buf.str(), candidate.generic_string());
        if (!parsed.ok()) return Result<GrammarModelPtr>::failure(std::move(parsed.findings));
        if (parsed->name.qualified() != key) {
            return Result<GrammarModelPtr>::failure(error_at(
                "GrammarNotFound",
                "file " + candidate.generic_string() + " declares grammar '" +
                    parsed->name.qualified() + "', expected '" + key + "'",
                SourcePos{candidate.generic_string(), 1, 1}));
        }
        auto ptr = std::make_shared<const GrammarModel>(std::move(*parsed.value));
        cache_[key] = ptr;
        Result<GrammarModelPtr> r = Result<GrammarModelPtr>::success(ptr);
        r.findings = std::move(parsed.findings);
        return r;
    }

    std::string searched;
    for (const auto& root : roots_) {
        if (!searched.empty()) searched += ", ";
        searched += (fs::path(root) / rel).generic_string();
    }
    return Result<GrammarModelPtr>::failure(error_at(
        "GrammarNotFound",
        "grammar '" + key + "' not found" + (searched.empty() ? "" : " (searched " + searched + ")"),
        SourcePos{key, 1, 1}));
}

GrammarLoader GrammarRepository::loader() {
    return [this](const GrammarName& n) { return load(n); };
}

} // namespace lw
