#include <cstdio>

#include "scl/sclkit.hpp"

int main() {
  std::printf("scl %s (stub)\n", scl::kVersion);
  return 0;
}
