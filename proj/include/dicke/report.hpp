#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dicke/observables.hpp"
#include "dicke/sweep.hpp"

namespace dicke {

enum class OutputFormat { Csv, Json };

inline constexpr const char* kCsvHeader =
    "model,N,delta,lambda,f,ntr,epsilon,eta,alpha,c0,c1,cmult,sigma_x,sigma_p,r,xi,entropy,gap,degenerate,"
    "converged,iters,ms";

struct EmitOptions {
    /// Wall times vary between runs; unless requested the ms column is written as 0
    /// so that output is byte-identical across runs and thread budgets.
    bool timing = false;
};

/// %.17g; round-trips through strtod.
std::string format_double(double value);

void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out, const EmitOptions& options = {});
void emit_json(const std::vector<SweepRow>& rows, std::ostream& out, const EmitOptions& options = {});

/// Writes to `path`, or standard output for "-". I/O failures throw
/// std::runtime_error naming the path.
void emit(const std::vector<SweepRow>& rows, OutputFormat format, const std::string& path,
          const EmitOptions& options = {});

/// Readers for the two schemas; they restore every emitted column.
std::vector<SweepRow> parse_csv(std::istream& in);
std::vector<SweepRow> parse_json(std::istream& in);

/// Side file of the photon histogram, "n,prob" per line after a header.
void write_histogram(const PhotonDistribution& dist, std::ostream& out);

}  // namespace dicke
