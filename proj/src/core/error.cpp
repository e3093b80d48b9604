#include "endspace/error.hpp"

#include <cstdio>
#include <cstdlib>

namespace endspace {

void consistency_failure(const std::string& message) {
  throw Error(ErrorCode::consistency_failure, "consistency check failed: " + message);
}

void contract_violation(const char* expression, const char* file, int line) {
  std::fprintf(stderr, "endspace: contract violated: %s (%s:%d)\n", expression,
               file, line);
  std::abort();
}

}  // namespace endspace
