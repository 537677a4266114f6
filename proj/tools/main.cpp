#include "verikit/cli.hpp"

int main(int argc, char** argv) {
  return verikit::cli::run({argv + 1, argv + argc});
}
