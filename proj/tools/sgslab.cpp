#include <string>
#include <vector>

#include "sgslab/cli.hpp"

int main(int argc, char** argv) { return sgs::run_cli(std::vector<std::string>(argv, argv + argc)); }
