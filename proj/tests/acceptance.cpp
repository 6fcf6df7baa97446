// Placeholder; the acceptance suite is implemented after the modules land.
#include <cstdio>

int main() {
  std::printf("acceptance stub\n");
  return 1;
}
