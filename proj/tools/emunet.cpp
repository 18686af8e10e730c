#include <string>
#include <vector>

#include "emunet/cli.hpp"

int main(int argc, char** argv) {
  return emunet::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
