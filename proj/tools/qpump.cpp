#include <qpump/cli.hpp>

int main(int argc, char** argv) { return qpump::cli::run(argc, argv); }
