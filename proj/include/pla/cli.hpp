#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace pla::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericalFailure = 3;

// Entry point shared by the `pla` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "0.2,0.3,0.5" or an inclusive range "0.2..0.8" (step 0.1) / "0.2..0.8:0.05".
std::vector<double> parse_real_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

}  // namespace pla::cli
