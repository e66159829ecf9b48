// qcorr_pump.cpp - entry point of the qcorr-pump executable

#include <iostream>

#include "qcorr/experiments/cli.hpp"

int main(int argc, char** argv) { return qcorr::experiments::run_cli(argc, argv, std::cout, std::cerr); }
