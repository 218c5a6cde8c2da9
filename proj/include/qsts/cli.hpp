#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qsts/protocol.hpp"

namespace qsts::cli {

// Exit codes.
inline constexpr int kVerified = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kInvalidInput = 2;

// Parses the --forced grammar: Bell outcomes comma-separated, then one
// ';'-separated row of m signs per controller, e.g. "PhiPlus,PsiMinus;+,-;-,-".
// Throws InvalidArgument on malformed text or wrong counts.
ForcedOutcomes parse_forced(std::string_view text, int m, int n);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qsts::cli
