#pragma once

// MATPOWER-style case file handling: parsing, disruption edits, connectivity.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridshed {

enum class BusType : int { PQ = 1, PV = 2, Ref = 3 };

struct BusRow {
    int id = 0;
    BusType type = BusType::PQ;
    double Pd = 0, Qd = 0;   // MW / MVAr
    double Gs = 0, Bs = 0;   // shunt, MW / MVAr at V = 1 p.u.
    double Vm = 1, Va = 0;   // p.u. / degrees
};

struct GenRow {
    int bus = 0;
    double Pg = 0, Qg = 0;   // MW / MVAr
    double Vg = 1;           // p.u. setpoint
    int status = 1;
};

struct BranchRow {
    int from = 0, to = 0;
    double r = 0, x = 0, b = 0;    // series impedance + total line charging, p.u.
    double tap = 0;                // off-nominal ratio, 0 means 1
    double shift = 0;              // phase shift, degrees
    int status = 1;
};

struct RawCase {
    std::string name;
    double baseMVA = 100;
    std::vector<BusRow> bus;
    std::vector<GenRow> gen;
    std::vector<BranchRow> branch;

    int bus_index(int id) const;   // position in bus table, -1 if absent
};

struct Contingency {
    enum class Kind { None, ImpedanceScale, RemoveLine, RemoveGenerator };
    Kind kind = Kind::None;
    double beta = 1.0;
    int line_index = -1;   // 0-based row in branch table
    int gen_index = -1;    // 0-based row in gen table
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingSection : ParseError {
    explicit MissingSection(const std::string& name)
        : ParseError("missing section: " + name) {}
};
struct MalformedRow : ParseError {
    int line_no;
    explicit MalformedRow(int line, const std::string& what)
        : ParseError("malformed row at line " + std::to_string(line) + ": " + what),
          line_no(line) {}
};
struct DuplicateBusId : ParseError {
    explicit DuplicateBusId(int id)
        : ParseError("duplicate bus id " + std::to_string(id)) {}
};
struct CaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : CaseError {
    using CaseError::CaseError;
};
struct DisconnectsNetwork : CaseError {
    using CaseError::CaseError;
};

RawCase parse_case(std::istream& in, const std::string& name = "");
RawCase parse_case_file(const std::string& path);

// Round-trippable text form of a RawCase (MATPOWER syntax).
std::string serialize_case(const RawCase& cs);

// Canonical JSON dump used by --dump-case.
std::string dump_case_json(const RawCase& cs);

bool check_connected(const RawCase& cs);

// Returns an edited copy.  ImpedanceScale multiplies r and x of every
// in-service branch by beta; RemoveLine flips the branch status;
// RemoveGenerator flips the gen status and retypes its bus to PQ when no
// in-service generator remains there.
RawCase apply_contingency(const RawCase& cs, const Contingency& c);

bool operator==(const BusRow&, const BusRow&);
bool operator==(const GenRow&, const GenRow&);
bool operator==(const BranchRow&, const BranchRow&);
bool operator==(const RawCase&, const RawCase&);

}  // namespace gridshed
