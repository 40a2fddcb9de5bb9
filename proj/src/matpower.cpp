#include "faircurtail/matpower.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "faircurtail/errors.hpp"

namespace faircurtail {

namespace {

struct Matrix {
    std::vector<std::vector<double>> rows;
};

// Strips % comments and splits the file into "mpc.<field> = <value>;"
// assignments.  Matrix values keep their row structure (';' or newline).
struct CaseFile {
    std::map<std::string, double> scalars;
    std::map<std::string, Matrix> matrices;
};

[[noreturn]] void fail(int line, const std::string& what) {
    throw ParseError("case file line " + std::to_string(line) + ": " + what);
}

CaseFile read_case_file(std::string_view text) {
    CaseFile out;
    std::string cleaned;
    cleaned.reserve(text.size());
    {
        bool in_comment = false;
        for (char c : text) {
            if (c == '%') in_comment = true;
            if (c == '\n') in_comment = false;
            cleaned.push_back(in_comment ? (c == '\n' ? '\n' : ' ') : c);
        }
    }

    size_t pos = 0;
    int line = 1;
    auto peek = [&]() -> int { return pos < cleaned.size() ? cleaned[pos] : -1; };
    auto advance = [&]() {
        if (cleaned[pos] == '\n') ++line;
        ++pos;
    };
    auto skip_ws = [&](bool stop_at_newline) {
        while (pos < cleaned.size()) {
            char c = cleaned[pos];
            if (c == ' ' || c == '\t' || c == '\r' || (c == '\n' && !stop_at_newline))
                advance();
            else
                break;
        }
    };
    auto read_word = [&]() {
        skip_ws(false);
        size_t start = pos;
        while (pos < cleaned.size() &&
               (std::isalnum(static_cast<unsigned char>(cleaned[pos])) || cleaned[pos] == '_' ||
                cleaned[pos] == '.'))
            advance();
        return cleaned.substr(start, pos - start);
    };
    auto read_number = [&](double& value) -> bool {
        skip_ws(true);
        const char* begin = cleaned.c_str() + pos;
        char* end = nullptr;
        value = std::strtod(begin, &end);
        if (end == begin) return false;
        pos += static_cast<size_t>(end - begin);
        return true;
    };

    while (true) {
        skip_ws(false);
        if (pos >= cleaned.size()) break;
        std::string word = read_word();
        if (word.empty()) fail(line, "unexpected character");
        if (word == "function") {
            // "function mpc = <name>" — consume to end of line.
            while (pos < cleaned.size() && cleaned[pos] != '\n') advance();
            continue;
        }
        if (word.rfind("mpc.", 0) != 0) fail(line, "expected mpc.<field>, got '" + word + "'");
        std::string field = word.substr(4);
        skip_ws(false);
        if (peek() != '=') fail(line, "expected '=' after " + word);
        advance();
        skip_ws(false);
        if (peek() == '\'') {
            // quoted string (version tag) — ignore.
            advance();
            while (pos < cleaned.size() && cleaned[pos] != '\'') advance();
            if (pos >= cleaned.size()) fail(line, "unterminated string");
            advance();
        } else if (peek() == '[') {
            advance();
            Matrix m;
            std::vector<double> row;
            while (true) {
                skip_ws(true);
                int c = peek();
                if (c == -1) fail(line, "unterminated matrix mpc." + field);
                if (c == ']') {
                    advance();
                    if (!row.empty()) m.rows.push_back(std::move(row));
                    break;
                }
                if (c == ';' || c == '\n') {
                    advance();
                    if (!row.empty()) {
                        m.rows.push_back(std::move(row));
                        row.clear();
                    }
                    continue;
                }
                double v;
                if (!read_number(v)) fail(line, "expected a number in mpc." + field);
                row.push_back(v);
            }
            out.matrices[field] = std::move(m);
        } else {
            double v;
            if (!read_number(v)) fail(line, "expected a value for mpc." + field);
            out.scalars[field] = v;
        }
        skip_ws(false);
        if (peek() == ';') advance();
    }
    return out;
}

}  // namespace

Network parse_matpower(std::string_view text) {
    CaseFile cf = read_case_file(text);

    Network net;
    auto base_it = cf.scalars.find("baseMVA");
    if (base_it == cf.scalars.end()) throw ParseError("case file: missing mpc.baseMVA");
    net.base_mva = base_it->second;

    auto bus_it = cf.matrices.find("bus");
    if (bus_it == cf.matrices.end()) throw ParseError("case file: missing mpc.bus");
    auto branch_it = cf.matrices.find("branch");
    if (branch_it == cf.matrices.end()) throw ParseError("case file: missing mpc.branch");

    std::map<int, int> ext_to_idx;
    int idx = 0;
    for (const auto& row : bus_it->second.rows) {
        if (row.size() < 13)
            throw ParseError("case file: bus row " + std::to_string(idx + 1) +
                             " has fewer than 13 columns");
        Bus b;
        b.index = idx;
        b.ext_id = static_cast<int>(row[0]);
        const int type = static_cast<int>(row[1]);
        if (type == 3)
            b.kind = BusKind::Slack;
        else if (type == 1)
            b.kind = BusKind::Pq;
        else
            throw ParseError("case file: bus " + std::to_string(b.ext_id) +
                             " has unsupported type " + std::to_string(type));
        b.base_kv = row[9];
        if (ext_to_idx.count(b.ext_id))
            throw ParseError("case file: duplicate bus number " + std::to_string(b.ext_id));
        ext_to_idx[b.ext_id] = idx;
        if (b.kind == BusKind::Slack) net.slack_bus = idx;
        net.buses.push_back(b);
        const double pd = row[2], qd = row[3];
        if (pd != 0.0 || qd != 0.0)
            net.loads.push_back({idx, pd / net.base_mva, qd / net.base_mva});
        ++idx;
    }

    int brow = 0;
    for (const auto& row : branch_it->second.rows) {
        ++brow;
        if (row.size() < 13)
            throw ParseError("case file: branch row " + std::to_string(brow) +
                             " has fewer than 13 columns");
        const int status = static_cast<int>(row[10]);
        if (status != 1)
            throw ParseError("case file: branch row " + std::to_string(brow) +
                             " is out of service (unsupported)");
        auto f = ext_to_idx.find(static_cast<int>(row[0]));
        auto t = ext_to_idx.find(static_cast<int>(row[1]));
        if (f == ext_to_idx.end() || t == ext_to_idx.end())
            throw ParseError("case file: branch row " + std::to_string(brow) +
                             " references an unknown bus");
        net.branches.push_back({f->second, t->second, row[2], row[3], row[4]});
    }

    net.validate();
    return net;
}

std::string serialize_matpower(const Network& net, const std::string& name) {
    std::map<int, std::pair<double, double>> load_by_bus;
    for (const LoadPoint& l : net.loads) {
        load_by_bus[l.bus].first += l.p_nom;
        load_by_bus[l.bus].second += l.q_nom;
    }

    char buf[512];
    std::ostringstream os;
    os << "function mpc = " << name << "\n";
    os << "mpc.version = '2';\n";
    std::snprintf(buf, sizeof buf, "mpc.baseMVA = %.17g;\n", net.base_mva);
    os << buf << "\nmpc.bus = [\n";
    for (const Bus& b : net.buses) {
        double pd = 0.0, qd = 0.0;
        if (auto it = load_by_bus.find(b.index); it != load_by_bus.end()) {
            pd = it->second.first * net.base_mva;
            qd = it->second.second * net.base_mva;
        }
        std::snprintf(buf, sizeof buf, "\t%d\t%d\t%.17g\t%.17g\t0\t0\t1\t1\t0\t%.17g\t1\t1.05\t0.95;\n",
                      b.ext_id, b.kind == BusKind::Slack ? 3 : 1, pd, qd, b.base_kv);
        os << buf;
    }
    os << "];\n\nmpc.gen = [\n";
    std::snprintf(buf, sizeof buf, "\t%d\t0\t0\t999\t-999\t1\t%.17g\t1\t999\t-999\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0;\n",
                  net.buses[net.slack_bus].ext_id, net.base_mva);
    os << buf;
    os << "];\n\nmpc.branch = [\n";
    for (const Branch& br : net.branches) {
        std::snprintf(buf, sizeof buf, "\t%d\t%d\t%.17g\t%.17g\t%.17g\t999\t999\t999\t0\t0\t1\t-360\t360;\n",
                      net.buses[br.from].ext_id, net.buses[br.to].ext_id, br.r, br.x, br.b_shunt);
        os << buf;
    }
    os << "];\n";
    return os.str();
}

Network load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open case file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_matpower(ss.str());
}

}  // namespace faircurtail
