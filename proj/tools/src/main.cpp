#include "subnyq_cli/cli.hpp"

int main(int argc, char** argv)
{
  return subnyq::cli::run_cli(argc, argv);
}
