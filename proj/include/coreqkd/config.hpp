// config.hpp
// Line-oriented "key = value" configuration with [section] headers.
//
//   # comment (also after a value)
//   [section]            or  [section label]
//   key = value words ...
//
// Keys are case-sensitive; blank lines are ignored; a key may appear once per
// section. Errors carry the line number.

#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "error.hpp"

namespace coreqkd {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    std::string label;  // text after the name in "[name label]"
    int line = 0;
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(std::string_view key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

struct ConfigDoc {
    std::string source = "config";
    std::vector<ConfigSection> sections;

    const ConfigSection* section(std::string_view name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline Error parse_error(std::string_view source, int line, const std::string& what) {
    return Error(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ConfigDoc parse_config(std::string_view text, std::string source = "config") {
    ConfigDoc doc;
    doc.source = std::move(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw parse_error(doc.source, line_no, "unterminated section header");
            auto inner = detail::trim(line.substr(1, line.size() - 2));
            if (inner.empty()) throw parse_error(doc.source, line_no, "empty section name");
            ConfigSection sec;
            sec.line = line_no;
            const auto sp = inner.find_first_of(" \t");
            sec.name = std::string(inner.substr(0, sp));
            if (sp != std::string_view::npos) sec.label = std::string(detail::trim(inner.substr(sp)));
            doc.sections.push_back(std::move(sec));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw parse_error(doc.source, line_no, "expected 'key = value'");
        if (doc.sections.empty()) throw parse_error(doc.source, line_no, "entry before any [section]");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw parse_error(doc.source, line_no, "empty key");
        auto& sec = doc.sections.back();
        if (sec.find(key)) throw parse_error(doc.source, line_no, "duplicate key '" + std::string(key) + "'");
        sec.entries.push_back(ConfigEntry{std::string(key), std::string(value), line_no});
    }
    return doc;
}

// Typed access to one entry with line diagnostics.
class ConfigValue {
public:
    ConfigValue(const ConfigDoc& doc, const ConfigEntry& e) : source_(doc.source), e_(&e) {}

    const std::string& str() const { return e_->value; }

    std::vector<std::string> words() const {
        std::vector<std::string> out;
        std::istringstream in(e_->value);
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }

    template <class T>
    T as() const {
        return parse<T>(e_->value);
    }

    template <class T>
    std::vector<T> list() const {
        std::vector<T> out;
        for (const auto& w : words()) out.push_back(parse<T>(w));
        if (out.empty()) fail("expected at least one value");
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(source_, e_->line, "'" + e_->key + "': " + what);
    }

private:
    template <class T>
    T parse(std::string_view w) const {
        if constexpr (std::is_same_v<T, std::string>) {
            return std::string(w);
        } else if constexpr (std::is_same_v<T, bool>) {
            if (w == "true" || w == "1") return true;
            if (w == "false" || w == "0") return false;
            fail("expected true/false, got '" + std::string(w) + "'");
        } else {
            T v{};
            const auto* end = w.data() + w.size();
            const auto [ptr, ec] = std::from_chars(w.data(), end, v);
            if (ec != std::errc{} || ptr != end) fail("cannot parse '" + std::string(w) + "'");
            return v;
        }
    }

    std::string source_;
    const ConfigEntry* e_;
};

}  // namespace coreqkd
