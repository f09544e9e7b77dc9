#pragma once

#include <string>
#include <vector>

#include "gridlocal/harness.hpp"
#include "gridlocal/transcript.hpp"

namespace gridlocal {

struct VerifyIssue {
    std::size_t event_index = 0;   // 1-based position in the transcript
    std::string what;
};

struct VerifyReport {
    bool ok = false;
    std::vector<VerifyIssue> issues;
    bool has_cert = false;
    Certificate::Kind kind = Certificate::Kind::Survived;
    i64 spent_recomputed = 0;

    std::string summary() const;
};

// Re-validates a match transcript from scratch, without GameState: rebuilds
// the hidden placement from frag/commit events, recomputes visibility balls
// and the budget, and re-checks reservation containment, turn order, the
// commit-time separation rule, view immutability under commits, and the
// final certificate's claim against the recorded labels.
VerifyReport verify_transcript(const std::string& jsonl);

}  // namespace gridlocal
