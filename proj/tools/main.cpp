#include "reibun/service.hpp"

int main(int argc, char** argv) { return reibun::run_cli(argc, argv); }
