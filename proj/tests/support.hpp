#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string data_path(const std::string& rel) {
    return std::string(FAIRCURTAIL_DATA_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
