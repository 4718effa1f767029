#include <vector>

#include "epr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return epr::run_command(args);
}
