#include <string>
#include <vector>

#include "eulermax/cli.hpp"

int main(int argc, char** argv) {
  return eulermax::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
