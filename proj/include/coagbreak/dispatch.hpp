// Command pipelines behind the CLI: run, check-assumptions, study,
// compare-analytic.
#ifndef COAGBREAK_DISPATCH_HPP
#define COAGBREAK_DISPATCH_HPP

#include <string>

namespace coagbreak {

// Exit codes: 0 success with all verdicts passing, 1 completed with failing
// verdicts, 2 execution error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFail = 1;
inline constexpr int kExitError = 2;

int dispatch(const std::string& command, const std::string& config_path,
             const std::string& out_dir, int threads);

} // namespace coagbreak

#endif
