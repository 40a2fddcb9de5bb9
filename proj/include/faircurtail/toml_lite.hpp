#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace faircurtail {

// Minimal TOML-style reader covering what the scenario and run-config
// files need: top-level and [section] key = value scalars (numbers,
// booleans, quoted strings, flat arrays of numbers) plus repeated
// [[name]] table entries.  Keys inside a [section] are exposed as
// "section.key".  Throws ParseError with the line number on anything
// it does not understand.
struct TomlLite {
    using Table = std::map<std::string, std::string>;

    Table scalars;                                  // raw value text by key
    std::map<std::string, std::vector<Table>> arrays;  // [[name]] entries in order

    static TomlLite parse(std::string_view text);

    bool has(const std::string& key) const { return scalars.count(key) != 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> number_list(const std::string& key) const;

    // Accessors for one [[...]] entry.
    static double entry_number(const Table& t, const std::string& key);
    static double entry_number_or(const Table& t, const std::string& key, double fallback);
};

}  // namespace faircurtail
