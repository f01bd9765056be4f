#pragma once

// Verification reports: an ordered list of named pass/fail checks with
// details, serializable to canonical (byte-stable) JSON.

#include <string>
#include <vector>

namespace ydk {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details; // empty unless noteworthy (first mismatch, counts, ...)
};

class VerificationReport {
  public:
    explicit VerificationReport(std::string subject = "") : subject_(std::move(subject)) {}

    const std::string& subject() const { return subject_; }
    const std::vector<CheckResult>& checks() const { return checks_; }

    void add(const std::string& name, bool pass, const std::string& details = "");
    void merge(const VerificationReport& o); // appends o's checks, prefixed by its subject
    bool all_passed() const;
    int failed_count() const;

    // Canonical JSON: fixed key order, no whitespace variance, '\n'-terminated.
    std::string json() const;

  private:
    std::string subject_;
    std::vector<CheckResult> checks_;
};

std::string json_escape(const std::string& s);

} // namespace ydk
