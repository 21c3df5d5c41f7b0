#include <string>
#include <vector>

#include "stanceval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stanceval::cli_main(args);
}
