#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/hamiltonian.hpp"
#include "dicke/report.hpp"
#include "dicke/sweep.hpp"

namespace dicke::cli {

enum class Subcommand { Ground, Sweep, Converge, Verify };

enum class Format { Text, Csv, Json };

struct RunConfig {
    Subcommand subcommand = Subcommand::Ground;
    ModelKind model = ModelKind::Gidm;
    double delta = 1.0;
    CouplingGrid coupling;
    std::vector<int> atoms;
    NtrPolicy ntr = NtrAuto{};
    /// Explicit cutoffs for `converge`; empty means the AUTO escalation trace.
    std::vector<int> ntr_list;
    double tol = 1e-10;
    Format format = Format::Csv;
    std::string output = "-";
    int threads = 1;
    int verbosity = 0;
    bool timing = false;
    std::string histogram_path;
    std::string matrix_path;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConvergence = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;

/// Thrown for invalid command lines; the message names the offending flag.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default thread budget: DICKE_THREADS when set, else the hardware concurrency.
int default_threads();

/// Parses argv (argv[0] is the program name). Returns std::nullopt when help
/// was requested and printed to `out`.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes a parsed configuration and returns the process exit code.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute with usage errors mapped to exit code 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dicke::cli
