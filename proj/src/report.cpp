#include "ydk/report.hpp"

#include <sstream>

namespace ydk {

void VerificationReport::add(const std::string& name, bool pass, const std::string& details) {
    checks_.push_back({name, pass, details});
}

void VerificationReport::merge(const VerificationReport& o) {
    for (const auto& c : o.checks_) {
        std::string name = o.subject_.empty() ? c.name : o.subject_ + "/" + c.name;
        checks_.push_back({name, c.pass, c.details});
    }
}

bool VerificationReport::all_passed() const {
    for (const auto& c : checks_)
        if (!c.pass) return false;
    return true;
}

int VerificationReport::failed_count() const {
    int n = 0;
    for (const auto& c : checks_)
        if (!c.pass) ++n;
    return n;
}

std::string json_escape(const std::string& s) {
    std::ostringstream o;
    for (char ch : s) {
        switch (ch) {
            case '"': o << "\\\""; break;
            case '\\': o << "\\\\"; break;
            case '\n': o << "\\n"; break;
            case '\t': o << "\\t"; break;
            case '\r': o << "\\r"; break;
            default:
                if ((unsigned char)ch < 0x20) {
                    char buf[8];
                    snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    o << buf;
                } else {
                    o << ch;
                }
        }
    }
    return o.str();
}

std::string VerificationReport::json() const {
    std::ostringstream o;
    o << "{\"schema_version\":1,\"subject\":\"" << json_escape(subject_) << "\",\"passed\":"
      << (all_passed() ? "true" : "false") << ",\"checks\":[";
    for (size_t i = 0; i < checks_.size(); ++i) {
        const auto& c = checks_[i];
        if (i) o << ",";
        o << "{\"name\":\"" << json_escape(c.name) << "\",\"pass\":" << (c.pass ? "true" : "false")
          << ",\"details\":\"" << json_escape(c.details) << "\"}";
    }
    o << "]}\n";
    return o.str();
}

} // namespace ydk
