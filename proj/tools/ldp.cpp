// Command-line front end for the lot-type design toolkit.

#include <cstdio>

int main() {
  std::puts("ldp: subcommands not wired up yet");
  return 1;
}
