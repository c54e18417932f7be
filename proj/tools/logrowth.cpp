#include "logrowth/cli.hpp"

int main(int argc, char** argv) { return logrowth::dispatch(argc, argv); }
