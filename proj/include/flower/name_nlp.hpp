#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace flower {

/// Noise words and a ranked synonym dictionary for one language.
///
/// Pack files are UTF-8 text, one entry per line:
///
///     # comment
///     language en
///     noise id pk fk
///     customer: client, buyer, patron
///
/// Entries are lowercased (ASCII). Synonym order is the rank order.
class LanguagePack {
public:
    LanguagePack() = default;
    LanguagePack(std::string code, std::vector<std::string> noise, std::map<std::string, std::vector<std::string>> dictionary);

    /// Throws ConfigError naming the offending line.
    static LanguagePack parse(std::string_view text, std::string_view origin = "<pack>");
    static LanguagePack load(const std::filesystem::path& file);

    const std::string& code() const { return code_; }
    bool is_noise(std::string_view token) const;
    /// Ranked synonyms of `token`; empty when the token is not in the dictionary.
    const std::vector<std::string>& synonyms(std::string_view token) const;
    const std::vector<std::string>& noise() const { return noise_; }
    std::size_t dictionary_size() const { return dictionary_.size(); }

private:
    std::string code_;
    std::vector<std::string> noise_;  // sorted
    std::map<std::string, std::vector<std::string>, std::less<>> dictionary_;
};

/// Finds "<code>.pack" in `dirs` (earlier directories win).
/// Throws ConfigError when no directory has it.
LanguagePack find_pack(std::string_view code, const std::vector<std::filesystem::path>& dirs);

struct TokenList {
    std::vector<std::string> tokens;
    std::string source_name;

    std::size_t tokens_number() const { return tokens.size(); }
};

/// Sorted set of lowercase strings.
using SynonymSet = std::vector<std::string>;

/// Splits an identifier on separators (_ - space . and other punctuation),
/// letter/digit boundaries and lower-to-upper camel-case boundaries, and
/// lowercases the pieces. Non-ASCII bytes count as letters.
TokenList tokenize(std::string_view name, const LanguagePack& pack);

/// Drops the pack's noise tokens unless that would leave nothing.
TokenList denoise(const TokenList& tokens, const LanguagePack& pack);

/// Per-token synonym count: trunc(confidence / (coeff * tokens_number))
/// split evenly across tokens, at least 1 per token.
std::size_t synonym_budget(double confidence, double confidence_coeff, std::size_t tokens_number);

/// Tokens plus the first `budget_per_token` ranked synonyms of each.
SynonymSet expand_synonyms(const TokenList& tokens, std::size_t budget_per_token, const LanguagePack& pack);

/// tokenize -> denoise -> budget -> expand for one column name.
SynonymSet column_synonyms(std::string_view column_name, double confidence, double confidence_coeff,
                           const LanguagePack& pack);

}  // namespace flower
