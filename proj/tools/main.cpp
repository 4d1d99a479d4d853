#include <string>
#include <vector>

#include "lintslab/cli.hpp"

int main(int argc, char** argv) {
  return lintslab::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
