// cli.hpp - qcorr-pump command-line front end

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace qcorr::experiments {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_config = 2,
    exit_numerical = 3,
    exit_resource = 4,
};

// qcorr-pump <mode> --config <path> --out <dir> [--preset <name>] [--depth L]
//            [--matsubara K] [--reset-ados] [--jobs N]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Value of QCORR_PUMP_CAP, if set. Throws config_error when it is not a positive integer.
std::optional<std::size_t> ado_cap_from_env();

} // namespace qcorr::experiments
