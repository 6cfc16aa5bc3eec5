#include <vdt/cli/commands.hpp>

int main(int argc, char** argv) { return vdt::cli::run(argc, argv); }
