// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace ecgrob::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `ecgrob` executable; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecgrob::cli
