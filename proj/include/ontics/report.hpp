#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ontics::report {

// One result row, shared by every command and output format.
struct ReportRecord {
    std::string check;
    std::string model;  // "-" when the check is not model-bound
    std::string inputs;
    double estimate = 0.0;
    double standard_error = 0.0;
    std::string verdict;
    std::string claim;   // what the check asserts, in plain words
    std::string detail;  // witnesses, statistics, classifications
};

inline bool verdict_allowed(const std::string& v) {
    static const char* const allowed[] = {"pass",       "fail",           "deficient",
                                          "not-deficient", "contextual",  "non-contextual",
                                          "SAT",        "UNSAT"};
    for (const char* a : allowed)
        if (v == a) return true;
    return false;
}

enum class Format { Json, Csv, Text };

inline Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "text") return Format::Text;
    throw std::invalid_argument("unknown format: " + s);
}

// Full-precision, locale-independent rendering so identical runs emit
// identical bytes.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_double_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    bool needs = s.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

class Writer {
public:
    Writer(std::ostream& out, Format fmt) : out_(out), fmt_(fmt) {}

    void write(const ReportRecord& r) {
        if (!verdict_allowed(r.verdict))
            throw std::logic_error("ReportRecord: bad verdict '" + r.verdict + "'");
        if (r.claim.empty()) throw std::logic_error("ReportRecord: empty claim");
        switch (fmt_) {
            case Format::Json: write_json(r); break;
            case Format::Csv: write_csv(r); break;
            case Format::Text: write_text(r); break;
        }
    }

private:
    void write_json(const ReportRecord& r) {
        nlohmann::ordered_json j;
        j["check"] = r.check;
        j["model"] = r.model;
        j["inputs"] = r.inputs;
        j["estimate"] = r.estimate;
        j["standard_error"] = r.standard_error;
        j["verdict"] = r.verdict;
        j["claim"] = r.claim;
        j["detail"] = r.detail;
        out_ << j.dump() << '\n';
    }

    void write_csv(const ReportRecord& r) {
        if (!header_written_) {
            out_ << "check,model,inputs,estimate,standard_error,verdict,claim,detail\n";
            header_written_ = true;
        }
        out_ << detail::csv_escape(r.check) << ',' << detail::csv_escape(r.model) << ','
             << detail::csv_escape(r.inputs) << ',' << format_double(r.estimate) << ','
             << format_double(r.standard_error) << ',' << detail::csv_escape(r.verdict) << ','
             << detail::csv_escape(r.claim) << ',' << detail::csv_escape(r.detail) << '\n';
    }

    void write_text(const ReportRecord& r) {
        char head[64];
        std::snprintf(head, sizeof head, "[%s]", r.verdict.c_str());
        char line[512];
        std::snprintf(line, sizeof line, "%-16s %-34s %-9s est=%-12s se=%-12s %s", head,
                      r.check.c_str(), r.model.c_str(), format_double_short(r.estimate).c_str(),
                      format_double_short(r.standard_error).c_str(), r.detail.c_str());
        std::string s(line);
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out_ << s << '\n';
    }

    std::ostream& out_;
    Format fmt_;
    bool header_written_ = false;
};

}  // namespace ontics::report
