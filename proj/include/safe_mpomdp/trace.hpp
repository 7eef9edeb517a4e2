#pragma once

// JSONL mission traces. Line 1 is a header record (t = 0) carrying the
// barrier value of the initial belief and the run parameters; each further
// line is one executed step. Records with an "event" key are annotations and
// carry no barrier value.

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtbf.hpp"

namespace safe_mpomdp {

using ordered_json = nlohmann::ordered_json;

class MalformedTrace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_record(std::ostream& out, const ordered_json& record) { out << record.dump() << '\n'; }

struct ParsedTrace {
    ordered_json header;
    std::vector<ordered_json> steps;   // records with an h_value, header excluded
    std::vector<ordered_json> events;
    std::vector<double> h_values;      // header value first
    std::vector<double> margins;       // as recorded, one per step

    std::optional<double> alpha0() const {
        if (header.contains("alpha0") && header["alpha0"].is_number()) return header["alpha0"].get<double>();
        return std::nullopt;
    }
};

inline ParsedTrace parse_trace(std::istream& in) {
    ParsedTrace trace;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTrace("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.is_object()) throw MalformedTrace("line " + std::to_string(lineno) + ": record is not an object");
        if (rec.contains("event")) {
            trace.events.push_back(std::move(rec));
            continue;
        }
        if (!rec.contains("h_value") || !rec["h_value"].is_number())
            throw MalformedTrace("line " + std::to_string(lineno) + ": missing numeric h_value");
        const double h = rec["h_value"].get<double>();
        if (!have_header) {
            if (!rec.contains("t") || rec["t"] != 0) throw MalformedTrace("first record must be the t = 0 header");
            have_header = true;
            trace.h_values.push_back(h);
            trace.header = std::move(rec);
            continue;
        }
        trace.h_values.push_back(h);
        if (rec.contains("margin") && rec["margin"].is_number()) trace.margins.push_back(rec["margin"].get<double>());
        trace.steps.push_back(std::move(rec));
    }
    if (!have_header) throw MalformedTrace("trace is empty");
    return trace;
}

inline ParsedTrace parse_trace_string(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

/// Re-checks the barrier condition over the recorded values.
inline TraceReport verify_trace(const ParsedTrace& trace, const KappaFn& kappa) {
    return verify_barrier_values(trace.h_values, kappa);
}

inline std::string render_report(const TraceReport& report) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t t = 0; t < report.steps.size(); ++t) {
        const auto& s = report.steps[t];
        out << "step " << t + 1 << " h=" << s.h_next << " margin=" << s.margin << (s.satisfied ? "" : " VIOLATION")
            << '\n';
    }
    out << "violations: " << report.violation_count() << '\n';
    if (report.first_violation) out << "first violation at step " << *report.first_violation + 1 << '\n';
    if (report.bound_checked) {
        out << "decay bound: " << (report.first_bound_violation ? "violated" : "holds") << '\n';
        if (report.first_bound_violation) out << "first bound violation at step " << *report.first_bound_violation << '\n';
    }
    return out.str();
}

}  // namespace safe_mpomdp
