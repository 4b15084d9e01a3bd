#include "qmelab/cli_app.hpp"

int main(int argc, char** argv) { return qmelab::run_cli(argc, argv); }
