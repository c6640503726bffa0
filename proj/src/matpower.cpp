#include "gridshed/matpower.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace gridshed {

int RawCase::bus_index(int id) const {
    for (size_t i = 0; i < bus.size(); ++i)
        if (bus[i].id == id) return static_cast<int>(i);
    return -1;
}

namespace {

// Strip MATLAB comments and trailing whitespace.
std::string strip_comment(const std::string& line) {
    auto pos = line.find('%');
    std::string s = (pos == std::string::npos) ? line : line.substr(0, pos);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

struct Matrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> line_nos;
};

// `mpc.<name> = [ ... ];` matrices and scalar assignments of a case script.
// Everything else (functions, gencost, strings) is ignored.
struct CaseScript {
    std::unordered_map<std::string, Matrix> matrices;
    std::unordered_map<std::string, double> scalars;
};

struct Tok {
    CaseScript script;

    void parse(std::istream& in) {
        std::string line;
        int line_no = 0;
        std::string current;
        std::string pending;  // accumulated numbers of an unterminated row
        int pending_line = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = strip_comment(line);
            if (s.empty()) continue;
            if (current.empty()) {
                auto dot = s.find("mpc.");
                auto eq = s.find('=');
                if (dot == std::string::npos || eq == std::string::npos || eq < dot) continue;
                std::string key = s.substr(dot + 4, eq - dot - 4);
                while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
                    key.pop_back();
                std::string rhs = s.substr(eq + 1);
                auto bracket = rhs.find('[');
                if (bracket == std::string::npos) {
                    std::istringstream v(rhs);
                    double val;
                    if (v >> val) script.scalars[key] = val;
                    continue;
                }
                current = key;
                script.matrices[current];
                pending.clear();
                s = rhs.substr(bracket + 1);
                if (s.empty()) continue;
            }
            consume_rows(s, current, pending, line_no, pending_line);
        }
    }

    void consume_rows(const std::string& s, std::string& current, std::string& pending,
                      int line_no, int& pending_line) {
        std::string body = s;
        bool closes = false;
        auto rb = body.find(']');
        if (rb != std::string::npos) {
            closes = true;
            body = body.substr(0, rb);
        }
        if (pending.empty()) pending_line = line_no;
        for (char ch : body) {
            if (ch == ';') {
                flush_row(current, pending, pending_line);
            } else {
                pending.push_back(ch);
            }
        }
        if (closes) {
            flush_row(current, pending, pending_line);  // last row may lack ';'
            current.clear();
        }
    }

    void flush_row(const std::string& name, std::string& acc, int line_no) {
        std::istringstream rs(acc);
        std::vector<double> vals;
        std::string tok;
        while (rs >> tok) {
            try {
                size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw MalformedRow(line_no, "bad numeric token '" + tok + "'");
            }
        }
        acc.clear();
        if (!vals.empty()) script.matrices[name].rows.push_back(std::move(vals)),
                           script.matrices[name].line_nos.push_back(line_no);
    }
};

double col(const std::vector<double>& row, size_t i, int line_no) {
    if (i >= row.size()) throw MalformedRow(line_no, "too few columns");
    return row[i];
}

}  // namespace

RawCase parse_case(std::istream& in, const std::string& name) {
    Tok tok;
    tok.parse(in);
    auto& script = tok.script;

    RawCase cs;
    cs.name = name;
    if (!script.scalars.count("baseMVA")) throw MissingSection("baseMVA");
    cs.baseMVA = script.scalars["baseMVA"];
    if (!(cs.baseMVA > 0)) throw ParseError("baseMVA must be positive");

    for (const char* sec : {"bus", "gen", "branch"})
        if (!script.matrices.count(sec) || script.matrices[sec].rows.empty())
            throw MissingSection(sec);

    std::unordered_set<int> seen;
    const auto& busm = script.matrices["bus"];
    for (size_t i = 0; i < busm.rows.size(); ++i) {
        const auto& r = busm.rows[i];
        int ln = busm.line_nos[i];
        BusRow b;
        b.id = static_cast<int>(col(r, 0, ln));
        int ty = static_cast<int>(col(r, 1, ln));
        if (ty < 1 || ty > 3) throw MalformedRow(ln, "bus type " + std::to_string(ty));
        b.type = static_cast<BusType>(ty);
        b.Pd = col(r, 2, ln);
        b.Qd = col(r, 3, ln);
        b.Gs = col(r, 4, ln);
        b.Bs = col(r, 5, ln);
        b.Vm = col(r, 7, ln);
        b.Va = col(r, 8, ln);
        if (!seen.insert(b.id).second) throw DuplicateBusId(b.id);
        cs.bus.push_back(b);
    }

    const auto& genm = script.matrices["gen"];
    for (size_t i = 0; i < genm.rows.size(); ++i) {
        const auto& r = genm.rows[i];
        int ln = genm.line_nos[i];
        GenRow g;
        g.bus = static_cast<int>(col(r, 0, ln));
        g.Pg = col(r, 1, ln);
        g.Qg = col(r, 2, ln);
        g.Vg = col(r, 5, ln);
        g.status = static_cast<int>(col(r, 7, ln));
        if (cs.bus_index(g.bus) < 0)
            throw MalformedRow(ln, "generator references unknown bus " + std::to_string(g.bus));
        cs.gen.push_back(g);
    }

    const auto& brm = script.matrices["branch"];
    for (size_t i = 0; i < brm.rows.size(); ++i) {
        const auto& r = brm.rows[i];
        int ln = brm.line_nos[i];
        BranchRow br;
        br.from = static_cast<int>(col(r, 0, ln));
        br.to = static_cast<int>(col(r, 1, ln));
        br.r = col(r, 2, ln);
        br.x = col(r, 3, ln);
        br.b = col(r, 4, ln);
        br.tap = col(r, 8, ln);
        br.shift = col(r, 9, ln);
        br.status = static_cast<int>(col(r, 10, ln));
        if (cs.bus_index(br.from) < 0 || cs.bus_index(br.to) < 0)
            throw MalformedRow(ln, "branch references unknown bus");
        cs.branch.push_back(br);
    }

    int n_ref = 0;
    for (const auto& b : cs.bus)
        if (b.type == BusType::Ref) ++n_ref;
    if (n_ref != 1)
        throw ParseError("expected exactly one reference bus, found " + std::to_string(n_ref));
    return cs;
}

RawCase parse_case_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open case file: " + path);
    std::string name = path;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_case(f, name);
}

std::string serialize_case(const RawCase& cs) {
    std::ostringstream os;
    os.precision(17);
    os << "function mpc = " << (cs.name.empty() ? "case_dump" : cs.name) << "\n";
    os << "mpc.version = '2';\n";
    os << "mpc.baseMVA = " << cs.baseMVA << ";\n";
    os << "mpc.bus = [\n";
    for (const auto& b : cs.bus)
        os << '\t' << b.id << '\t' << static_cast<int>(b.type) << '\t' << b.Pd << '\t' << b.Qd
           << '\t' << b.Gs << '\t' << b.Bs << "\t1\t" << b.Vm << '\t' << b.Va
           << "\t0\t1\t1.1\t0.9;\n";
    os << "];\n";
    os << "mpc.gen = [\n";
    for (const auto& g : cs.gen)
        os << '\t' << g.bus << '\t' << g.Pg << '\t' << g.Qg << "\t0\t0\t" << g.Vg << "\t"
           << cs.baseMVA << '\t' << g.status << "\t0\t0;\n";
    os << "];\n";
    os << "mpc.branch = [\n";
    for (const auto& br : cs.branch)
        os << '\t' << br.from << '\t' << br.to << '\t' << br.r << '\t' << br.x << '\t' << br.b
           << "\t0\t0\t0\t" << br.tap << '\t' << br.shift << '\t' << br.status
           << "\t-360\t360;\n";
    os << "];\n";
    return os.str();
}

std::string dump_case_json(const RawCase& cs) {
    nlohmann::json j;
    j["name"] = cs.name;
    j["baseMVA"] = cs.baseMVA;
    for (const auto& b : cs.bus)
        j["bus"].push_back({{"id", b.id},
                            {"type", static_cast<int>(b.type)},
                            {"Pd", b.Pd},
                            {"Qd", b.Qd},
                            {"Gs", b.Gs},
                            {"Bs", b.Bs},
                            {"Vm", b.Vm},
                            {"Va", b.Va}});
    for (const auto& g : cs.gen)
        j["gen"].push_back({{"bus", g.bus},
                            {"Pg", g.Pg},
                            {"Qg", g.Qg},
                            {"Vg", g.Vg},
                            {"status", g.status}});
    for (const auto& br : cs.branch)
        j["branch"].push_back({{"from", br.from},
                               {"to", br.to},
                               {"r", br.r},
                               {"x", br.x},
                               {"b", br.b},
                               {"tap", br.tap},
                               {"shift", br.shift},
                               {"status", br.status}});
    return j.dump(2);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool check_connected(const RawCase& cs) {
    if (cs.bus.empty()) return false;
    if (cs.bus.size() == 1) return true;
    UnionFind uf(cs.bus.size());
    std::unordered_map<int, int> idx;
    for (size_t i = 0; i < cs.bus.size(); ++i) idx[cs.bus[i].id] = static_cast<int>(i);
    for (const auto& br : cs.branch)
        if (br.status) uf.unite(idx[br.from], idx[br.to]);
    int root = uf.find(0);
    for (size_t i = 1; i < cs.bus.size(); ++i)
        if (uf.find(static_cast<int>(i)) != root) return false;
    return true;
}

RawCase apply_contingency(const RawCase& cs, const Contingency& c) {
    RawCase out = cs;
    switch (c.kind) {
        case Contingency::Kind::None:
            break;
        case Contingency::Kind::ImpedanceScale:
            if (!(c.beta >= 1.0)) throw CaseError("impedance scale beta must be >= 1");
            for (auto& br : out.branch)
                if (br.status) {
                    br.r *= c.beta;
                    br.x *= c.beta;
                }
            break;
        case Contingency::Kind::RemoveLine: {
            if (c.line_index < 0 || c.line_index >= static_cast<int>(out.branch.size()))
                throw IndexOutOfRange("line index " + std::to_string(c.line_index));
            out.branch[c.line_index].status = 0;
            if (!check_connected(out))
                throw DisconnectsNetwork("removing line " + std::to_string(c.line_index + 1) +
                                         " splits the network");
            break;
        }
        case Contingency::Kind::RemoveGenerator: {
            if (c.gen_index < 0 || c.gen_index >= static_cast<int>(out.gen.size()))
                throw IndexOutOfRange("gen index " + std::to_string(c.gen_index));
            auto& g = out.gen[c.gen_index];
            g.status = 0;
            bool any_left = false;
            for (const auto& og : out.gen)
                if (og.status && og.bus == g.bus) any_left = true;
            int bi = out.bus_index(g.bus);
            if (!any_left && out.bus[bi].type == BusType::PV)
                out.bus[bi].type = BusType::PQ;
            break;
        }
    }
    return out;
}

bool operator==(const BusRow& a, const BusRow& b) {
    return a.id == b.id && a.type == b.type && a.Pd == b.Pd && a.Qd == b.Qd && a.Gs == b.Gs &&
           a.Bs == b.Bs && a.Vm == b.Vm && a.Va == b.Va;
}
bool operator==(const GenRow& a, const GenRow& b) {
    return a.bus == b.bus && a.Pg == b.Pg && a.Qg == b.Qg && a.Vg == b.Vg && a.status == b.status;
}
bool operator==(const BranchRow& a, const BranchRow& b) {
    return a.from == b.from && a.to == b.to && a.r == b.r && a.x == b.x && a.b == b.b &&
           a.tap == b.tap && a.shift == b.shift && a.status == b.status;
}
bool operator==(const RawCase& a, const RawCase& b) {
    return a.baseMVA == b.baseMVA && a.bus == b.bus && a.gen == b.gen && a.branch == b.branch;
}

}  // namespace gridshed
