#include "symprod_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return symprod::cli::run(args, std::cout, std::cerr);
}
