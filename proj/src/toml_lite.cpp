#include "faircurtail/toml_lite.hpp"

#include <cstdlib>
#include <sstream>

#include "faircurtail/errors.hpp"

namespace faircurtail {

namespace {

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

double parse_number(const std::string& raw, const std::string& key) {
    const char* begin = raw.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || trim(std::string_view(end)) != "")
        throw ParseError("value for '" + key + "' is not a number: " + raw);
    return v;
}

}  // namespace

TomlLite TomlLite::parse(std::string_view text) {
    TomlLite out;
    std::string section;          // current [section] prefix ("" at top level)
    Table* array_entry = nullptr; // current [[name]] entry, if any

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (size_t h = line.find('#'); h != std::string::npos) {
            // keep '#' inside quoted strings
            size_t q1 = line.find('"');
            if (q1 == std::string::npos || q1 > h) line.erase(h);
        }
        std::string t = trim(line);
        if (t.empty()) continue;

        if (t.size() >= 4 && t.rfind("[[", 0) == 0 && t.substr(t.size() - 2) == "]]") {
            std::string name = trim(t.substr(2, t.size() - 4));
            if (name.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty [[ ]] name");
            out.arrays[name].emplace_back();
            array_entry = &out.arrays[name].back();
            section.clear();
            continue;
        }
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty [ ] name");
            array_entry = nullptr;
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");

        if (array_entry)
            (*array_entry)[key] = value;
        else
            out.scalars[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

double TomlLite::number(const std::string& key) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) throw ParseError("missing required key '" + key + "'");
    return parse_number(it->second, key);
}

double TomlLite::number_or(const std::string& key, double fallback) const {
    auto it = scalars.find(key);
    return it == scalars.end() ? fallback : parse_number(it->second, key);
}

bool TomlLite::boolean_or(const std::string& key, bool fallback) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ParseError("value for '" + key + "' is not a boolean: " + it->second);
}

std::string TomlLite::string_or(const std::string& key, const std::string& fallback) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return fallback;
    const std::string& v = it->second;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

std::vector<double> TomlLite::number_list(const std::string& key) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) throw ParseError("missing required key '" + key + "'");
    std::string v = it->second;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ParseError("value for '" + key + "' is not a [list]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    size_t pos = 0;
    while (pos < v.size()) {
        size_t comma = v.find(',', pos);
        std::string item = trim(v.substr(pos, comma == std::string::npos ? std::string::npos
                                                                         : comma - pos));
        if (!item.empty()) out.push_back(parse_number(item, key));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

double TomlLite::entry_number(const Table& t, const std::string& key) {
    auto it = t.find(key);
    if (it == t.end()) throw ParseError("missing required key '" + key + "' in table entry");
    return parse_number(it->second, key);
}

double TomlLite::entry_number_or(const Table& t, const std::string& key, double fallback) {
    auto it = t.find(key);
    return it == t.end() ? fallback : parse_number(it->second, key);
}

}  // namespace faircurtail
