#include "flower/name_nlp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flower/error.hpp"
#include "flower/identifier.hpp"

namespace flower {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(sep, start);
        if (end == std::string_view::npos) end = s.size();
        auto piece = trim(s.substr(start, end - start));
        if (!piece.empty()) out.push_back(to_lower_ascii(piece));
        start = end + 1;
    }
    return out;
}

}  // namespace

LanguagePack::LanguagePack(std::string code, std::vector<std::string> noise,
                           std::map<std::string, std::vector<std::string>> dictionary)
    : code_(std::move(code)), noise_(std::move(noise)) {
    for (auto& n : noise_) n = to_lower_ascii(n);
    std::sort(noise_.begin(), noise_.end());
    noise_.erase(std::unique(noise_.begin(), noise_.end()), noise_.end());
    for (auto& [token, syns] : dictionary) {
        std::vector<std::string> lowered;
        for (auto& s : syns) lowered.push_back(to_lower_ascii(s));
        dictionary_[to_lower_ascii(token)] = std::move(lowered);
    }
}

LanguagePack LanguagePack::parse(std::string_view text, std::string_view origin) {
    std::string code;
    std::vector<std::string> noise;
    std::map<std::string, std::vector<std::string>> dictionary;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (auto colon = line.find(':'); colon != std::string::npos) {
            std::string token = to_lower_ascii(trim(std::string_view(line).substr(0, colon)));
            if (token.empty() || token.find(' ') != std::string::npos) fail("dictionary entry needs a single token");
            if (dictionary.count(token)) fail("duplicate dictionary entry '" + token + "'");
            dictionary[token] = split_on(std::string_view(line).substr(colon + 1), ',');
            continue;
        }
        std::istringstream words(line);
        std::string keyword;
        words >> keyword;
        if (keyword == "language") {
            if (!(words >> code)) fail("language needs a code");
        } else if (keyword == "noise") {
            std::string w;
            while (words >> w) noise.push_back(w);
        } else {
            fail("unrecognized line '" + line + "'");
        }
    }
    if (code.empty()) fail("missing 'language <code>' line");
    return LanguagePack(std::move(code), std::move(noise), std::move(dictionary));
}

LanguagePack LanguagePack::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read language pack " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), file.string());
}

bool LanguagePack::is_noise(std::string_view token) const {
    return std::binary_search(noise_.begin(), noise_.end(), token);
}

const std::vector<std::string>& LanguagePack::synonyms(std::string_view token) const {
    static const std::vector<std::string> none;
    auto it = dictionary_.find(token);
    return it == dictionary_.end() ? none : it->second;
}

LanguagePack find_pack(std::string_view code, const std::vector<std::filesystem::path>& dirs) {
    for (const auto& dir : dirs) {
        auto file = dir / (std::string(code) + ".pack");
        if (std::filesystem::is_regular_file(file)) {
            auto pack = LanguagePack::load(file);
            if (pack.code() != code) {
                throw ConfigError("language pack " + file.string() + " declares language '" + pack.code() + "'");
            }
            return pack;
        }
    }
    throw ConfigError("no language pack for --lang " + std::string(code));
}

TokenList tokenize(std::string_view name, const LanguagePack& /*pack*/) {
    enum class Kind { Lower, Upper, Digit, Other };
    auto kind_of = [](char c) {
        auto u = static_cast<unsigned char>(c);
        if (std::isdigit(u)) return Kind::Digit;
        if (std::isupper(u)) return Kind::Upper;
        if (std::islower(u) || u >= 0x80) return Kind::Lower;
        return Kind::Other;
    };

    TokenList out;
    out.source_name = std::string(name);
    std::string current;
    Kind prev = Kind::Other;
    auto flush = [&] {
        if (!current.empty()) out.tokens.push_back(to_lower_ascii(current));
        current.clear();
    };
    for (char c : name) {
        Kind k = kind_of(c);
        if (k == Kind::Other) {
            flush();
        } else if (!current.empty()) {
            bool letter_digit = (k == Kind::Digit) != (prev == Kind::Digit);
            bool camel = prev == Kind::Lower && k == Kind::Upper;
            if (letter_digit || camel) flush();
        }
        if (k != Kind::Other) current += c;
        prev = k;
    }
    flush();
    return out;
}

TokenList denoise(const TokenList& tokens, const LanguagePack& pack) {
    TokenList out;
    out.source_name = tokens.source_name;
    for (const auto& t : tokens.tokens) {
        if (!pack.is_noise(t)) out.tokens.push_back(t);
    }
    if (out.tokens.empty()) out.tokens = tokens.tokens;
    return out;
}

std::size_t synonym_budget(double confidence, double confidence_coeff, std::size_t tokens_number) {
    if (confidence_coeff <= 0.0) throw ConfigError("confidence_coeff must be > 0");
    if (tokens_number == 0) tokens_number = 1;
    const double raw = confidence / (confidence_coeff * static_cast<double>(tokens_number));
    // Absorb representation error so 0.95 / 0.05 counts as 19, not 18.999...
    const double total = std::max(0.0, std::trunc(raw + 1e-9));
    auto per_token = static_cast<std::size_t>(total) / tokens_number;
    return std::max<std::size_t>(per_token, 1);
}

SynonymSet expand_synonyms(const TokenList& tokens, std::size_t budget_per_token, const LanguagePack& pack) {
    SynonymSet out;
    for (const auto& token : tokens.tokens) {
        out.push_back(token);
        const auto& ranked = pack.synonyms(token);
        const std::size_t n = std::min(budget_per_token, ranked.size());
        out.insert(out.end(), ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SynonymSet column_synonyms(std::string_view column_name, double confidence, double confidence_coeff,
                           const LanguagePack& pack) {
    TokenList tokens = denoise(tokenize(column_name, pack), pack);
    std::size_t budget = synonym_budget(confidence, confidence_coeff, tokens.tokens_number());
    return expand_synonyms(tokens, budget, pack);
}

}  // namespace flower
