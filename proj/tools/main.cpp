#include <vector>

#include "skewshed/cli.hpp"

int main(int argc, char** argv) {
  return skewshed::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
