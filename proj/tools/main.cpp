#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
	std::vector<std::string> args(argv, argv + argc);
	return packrat::cli::run_with_big_stack(args, std::cout, std::cerr);
}
